//! Recursive-descent parser for the supported C subset and the preomp
//! directive grammar.

use super::ast::*;
use super::lexer::{tokenize, tokenize_fragment, Keyword, Punct, Token, TokenKind};
use super::FrontendError;

const PREOMP_PREFIX: &str = "pragma preomp";

/// True when a preprocessor line's text is a preomp directive.
pub fn is_preomp_line(text: &str) -> bool {
    text == PREOMP_PREFIX || text.starts_with("pragma preomp ")
}

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
    lenient: bool,
}

pub(crate) fn parse(source: &str, lenient: bool) -> Result<SyntaxTree, FrontendError> {
    let mut p = Parser {
        toks: tokenize(source)?,
        pos: 0,
        lenient,
    };
    p.unit()
}

/// Parses a standalone expression, e.g. the argument of a clause.
pub fn parse_expr_str(src: &str) -> Result<Expr, FrontendError> {
    let mut p = Parser {
        toks: tokenize(src)?,
        pos: 0,
        lenient: false,
    };
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

impl Parser {
    fn from_tokens(toks: Vec<Token>) -> Parser {
        Parser {
            toks,
            pos: 0,
            lenient: false,
        }
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_kind(&self) -> &TokenKind {
        &self.toks[self.pos].kind
    }

    fn peek_nth(&self, n: usize) -> &TokenKind {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].kind
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn span(&self) -> Span {
        self.peek().span
    }

    fn error(&self, expected: &str) -> FrontendError {
        FrontendError::Syntax {
            span: self.span(),
            expected: expected.to_string(),
            found: self.peek_kind().to_string(),
        }
    }

    fn at_punct(&self, p: Punct) -> bool {
        *self.peek_kind() == TokenKind::Punct(p)
    }

    fn at_keyword(&self, k: Keyword) -> bool {
        *self.peek_kind() == TokenKind::Keyword(k)
    }

    fn eat_punct(&mut self, p: Punct) -> bool {
        if self.at_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: Punct) -> Result<(), FrontendError> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.error(&format!("`{}`", p.as_str())))
        }
    }

    fn expect_ident(&mut self) -> Result<String, FrontendError> {
        match self.peek_kind() {
            TokenKind::Ident(n) => {
                let n = n.clone();
                self.bump();
                Ok(n)
            }
            _ => Err(self.error("identifier")),
        }
    }

    fn expect_eof(&self) -> Result<(), FrontendError> {
        match self.peek_kind() {
            TokenKind::Eof => Ok(()),
            _ => Err(self.error("end of input")),
        }
    }

    fn at_type(&self) -> bool {
        matches!(self.peek_kind(), TokenKind::Keyword(k) if k.is_type_word())
    }

    fn unit(&mut self) -> Result<SyntaxTree, FrontendError> {
        let mut items = Vec::new();
        loop {
            let span = self.span();
            match self.peek_kind().clone() {
                TokenKind::Eof => break,
                TokenKind::Preproc(text) => {
                    if is_preomp_line(&text) {
                        return Err(FrontendError::Directive {
                            span,
                            message: "preomp directive outside of a function body".into(),
                        });
                    }
                    self.bump();
                    items.push(Item::Preproc { text, span });
                }
                _ => items.push(self.external_decl()?),
            }
        }
        Ok(SyntaxTree { items })
    }

    fn type_spec(&mut self) -> Result<TypeSpec, FrontendError> {
        let mut words = Vec::new();
        while let TokenKind::Keyword(k) = self.peek_kind() {
            if !k.is_type_word() {
                break;
            }
            words.push(*k);
            self.bump();
        }
        if words.is_empty() {
            return Err(self.error("type specifier"));
        }
        Ok(TypeSpec(words))
    }

    fn dims(&mut self) -> Result<Vec<Option<Expr>>, FrontendError> {
        let mut dims = Vec::new();
        while self.eat_punct(Punct::LBracket) {
            if self.eat_punct(Punct::RBracket) {
                dims.push(None);
            } else {
                dims.push(Some(self.expr()?));
                self.expect_punct(Punct::RBracket)?;
            }
        }
        Ok(dims)
    }

    fn external_decl(&mut self) -> Result<Item, FrontendError> {
        let span = self.span();
        let ty = self.type_spec()?;
        let name = self.expect_ident()?;
        if self.at_punct(Punct::LParen) {
            self.bump();
            let params = self.params()?;
            let body = if self.eat_punct(Punct::Semi) {
                None
            } else if self.at_punct(Punct::LBrace) {
                Some(self.block()?)
            } else {
                return Err(self.error("`;` or function body"));
            };
            return Ok(Item::Function(Function {
                ret: ty,
                name,
                params,
                body,
                span,
            }));
        }
        let decl = self.declarators(ty, name, span)?;
        self.expect_punct(Punct::Semi)?;
        Ok(Item::Declaration(decl))
    }

    fn params(&mut self) -> Result<Params, FrontendError> {
        if self.eat_punct(Punct::RParen) {
            return Ok(Params::Empty);
        }
        if self.at_keyword(Keyword::Void) && *self.peek_nth(1) == TokenKind::Punct(Punct::RParen) {
            self.bump();
            self.bump();
            return Ok(Params::Void);
        }
        let mut list = Vec::new();
        loop {
            let ty = self.type_spec()?;
            let name = match self.peek_kind() {
                TokenKind::Ident(_) => Some(self.expect_ident()?),
                _ => None,
            };
            let dims = self.dims()?;
            list.push(Param { ty, name, dims });
            if self.eat_punct(Punct::RParen) {
                break;
            }
            self.expect_punct(Punct::Comma)?;
        }
        Ok(Params::List(list))
    }

    /// Parses the declarator list after the type and first name. Does not
    /// consume the terminating `;`.
    fn declarators(
        &mut self,
        ty: TypeSpec,
        first: String,
        span: Span,
    ) -> Result<Declaration, FrontendError> {
        let mut declarators = Vec::new();
        let mut name = first;
        loop {
            let dims = self.dims()?;
            let init = if self.eat_punct(Punct::Assign) {
                Some(self.assignment()?)
            } else {
                None
            };
            declarators.push(Declarator { name, dims, init });
            if !self.eat_punct(Punct::Comma) {
                break;
            }
            name = self.expect_ident()?;
        }
        Ok(Declaration {
            ty,
            declarators,
            span,
        })
    }

    fn declaration(&mut self) -> Result<Declaration, FrontendError> {
        let span = self.span();
        let ty = self.type_spec()?;
        let name = self.expect_ident()?;
        self.declarators(ty, name, span)
    }

    fn block(&mut self) -> Result<Block, FrontendError> {
        self.expect_punct(Punct::LBrace)?;
        let mut stmts = Vec::new();
        while !self.at_punct(Punct::RBrace) {
            if *self.peek_kind() == TokenKind::Eof {
                return Err(self.error("`}`"));
            }
            stmts.push(self.stmt()?);
        }
        self.bump();
        Ok(Block { stmts })
    }

    fn stmt(&mut self) -> Result<Stmt, FrontendError> {
        let span = self.span();
        let kind = match self.peek_kind().clone() {
            TokenKind::Preproc(text) => {
                self.bump();
                if is_preomp_line(&text) {
                    return self.directed(&text, span);
                }
                StmtKind::Pragma(text)
            }
            TokenKind::Punct(Punct::LBrace) => StmtKind::Block(self.block()?),
            TokenKind::Punct(Punct::Semi) => {
                self.bump();
                StmtKind::Empty
            }
            TokenKind::Keyword(Keyword::If) => {
                self.bump();
                self.expect_punct(Punct::LParen)?;
                let cond = self.expr()?;
                self.expect_punct(Punct::RParen)?;
                let then = Box::new(self.stmt()?);
                let els = if self.at_keyword(Keyword::Else) {
                    self.bump();
                    Some(Box::new(self.stmt()?))
                } else {
                    None
                };
                StmtKind::If { cond, then, els }
            }
            TokenKind::Keyword(Keyword::For) => StmtKind::For(self.for_loop(None)?),
            TokenKind::Keyword(Keyword::While) => {
                self.bump();
                self.expect_punct(Punct::LParen)?;
                let cond = self.expr()?;
                self.expect_punct(Punct::RParen)?;
                let body = Box::new(self.stmt()?);
                StmtKind::While { cond, body }
            }
            TokenKind::Keyword(Keyword::Return) => {
                self.bump();
                let value = if self.at_punct(Punct::Semi) {
                    None
                } else {
                    Some(self.expr()?)
                };
                self.expect_punct(Punct::Semi)?;
                StmtKind::Return(value)
            }
            TokenKind::Keyword(Keyword::Break) => {
                self.bump();
                self.expect_punct(Punct::Semi)?;
                StmtKind::Break
            }
            TokenKind::Keyword(Keyword::Continue) => {
                self.bump();
                self.expect_punct(Punct::Semi)?;
                StmtKind::Continue
            }
            TokenKind::Keyword(k) if k.is_type_word() => {
                let d = self.declaration()?;
                self.expect_punct(Punct::Semi)?;
                StmtKind::Decl(d)
            }
            _ => {
                let e = self.expr()?;
                self.expect_punct(Punct::Semi)?;
                StmtKind::Expr(e)
            }
        };
        Ok(Stmt::new(kind, span))
    }

    /// A preomp directive line and the statement it annotates.
    fn directed(&mut self, text: &str, span: Span) -> Result<Stmt, FrontendError> {
        let directive = parse_directive(text, span)?;
        if self.at_keyword(Keyword::For) {
            let for_span = self.span();
            let fl = self.for_loop(Some(directive))?;
            return Ok(Stmt::new(StmtKind::For(fl), for_span));
        }
        if !self.lenient || matches!(self.peek_kind(), TokenKind::Punct(Punct::RBrace)) {
            return Err(FrontendError::DirectiveNotOnFor { span });
        }
        let stmt = Box::new(self.stmt()?);
        Ok(Stmt::new(StmtKind::Misplaced { directive, stmt }, span))
    }

    fn for_loop(&mut self, directive: Option<Directive>) -> Result<ForLoop, FrontendError> {
        self.bump();
        self.expect_punct(Punct::LParen)?;
        let init = if self.at_punct(Punct::Semi) {
            ForInit::Empty
        } else if self.at_type() {
            ForInit::Decl(self.declaration()?)
        } else {
            ForInit::Expr(self.expr()?)
        };
        self.expect_punct(Punct::Semi)?;
        let cond = if self.at_punct(Punct::Semi) {
            None
        } else {
            Some(self.expr()?)
        };
        self.expect_punct(Punct::Semi)?;
        let step = if self.at_punct(Punct::RParen) {
            None
        } else {
            Some(self.expr()?)
        };
        self.expect_punct(Punct::RParen)?;
        let body = Box::new(self.stmt()?);
        Ok(ForLoop {
            directive,
            init,
            cond,
            step,
            body,
        })
    }

    pub(crate) fn expr(&mut self) -> Result<Expr, FrontendError> {
        self.assignment()
    }

    fn assignment(&mut self) -> Result<Expr, FrontendError> {
        let lhs = self.ternary()?;
        let op = match self.peek_kind() {
            TokenKind::Punct(Punct::Assign) => AssignOp::Assign,
            TokenKind::Punct(Punct::PlusAssign) => AssignOp::Add,
            TokenKind::Punct(Punct::MinusAssign) => AssignOp::Sub,
            TokenKind::Punct(Punct::StarAssign) => AssignOp::Mul,
            TokenKind::Punct(Punct::SlashAssign) => AssignOp::Div,
            TokenKind::Punct(Punct::PercentAssign) => AssignOp::Rem,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.assignment()?;
        Ok(Expr::Assign {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        })
    }

    fn ternary(&mut self) -> Result<Expr, FrontendError> {
        let cond = self.binary(1)?;
        if !self.eat_punct(Punct::Question) {
            return Ok(cond);
        }
        let then = self.expr()?;
        self.expect_punct(Punct::Colon)?;
        let els = self.ternary()?;
        Ok(Expr::Ternary {
            cond: Box::new(cond),
            then: Box::new(then),
            els: Box::new(els),
        })
    }

    fn binop(&self) -> Option<BinOp> {
        let TokenKind::Punct(p) = self.peek_kind() else {
            return None;
        };
        Some(match p {
            Punct::Star => BinOp::Mul,
            Punct::Slash => BinOp::Div,
            Punct::Percent => BinOp::Rem,
            Punct::Plus => BinOp::Add,
            Punct::Minus => BinOp::Sub,
            Punct::Shl => BinOp::Shl,
            Punct::Shr => BinOp::Shr,
            Punct::Lt => BinOp::Lt,
            Punct::Le => BinOp::Le,
            Punct::Gt => BinOp::Gt,
            Punct::Ge => BinOp::Ge,
            Punct::Eq => BinOp::Eq,
            Punct::Ne => BinOp::Ne,
            Punct::Amp => BinOp::BitAnd,
            Punct::Caret => BinOp::BitXor,
            Punct::Pipe => BinOp::BitOr,
            Punct::AndAnd => BinOp::And,
            Punct::OrOr => BinOp::Or,
            _ => return None,
        })
    }

    // Precedence climbing; all binary operators are left-associative.
    fn binary(&mut self, min_prec: u8) -> Result<Expr, FrontendError> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binop() {
            if op.precedence() < min_prec {
                break;
            }
            self.bump();
            let rhs = self.binary(op.precedence() + 1)?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, FrontendError> {
        let op = match self.peek_kind() {
            TokenKind::Punct(Punct::Minus) => Some(UnaryOp::Neg),
            TokenKind::Punct(Punct::Plus) => Some(UnaryOp::Plus),
            TokenKind::Punct(Punct::Not) => Some(UnaryOp::Not),
            TokenKind::Punct(Punct::Tilde) => Some(UnaryOp::BitNot),
            TokenKind::Punct(Punct::PlusPlus) => Some(UnaryOp::PreInc),
            TokenKind::Punct(Punct::MinusMinus) => Some(UnaryOp::PreDec),
            _ => None,
        };
        if let Some(op) = op {
            self.bump();
            let expr = Box::new(self.unary()?);
            return Ok(Expr::Unary { op, expr });
        }
        if self.at_punct(Punct::LParen)
            && matches!(self.peek_nth(1), TokenKind::Keyword(k) if k.is_type_word())
        {
            self.bump();
            let ty = self.type_spec()?;
            self.expect_punct(Punct::RParen)?;
            let expr = Box::new(self.unary()?);
            return Ok(Expr::Cast { ty, expr });
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Expr, FrontendError> {
        let mut e = self.primary()?;
        loop {
            if self.eat_punct(Punct::LBracket) {
                let index = self.expr()?;
                self.expect_punct(Punct::RBracket)?;
                e = Expr::Index {
                    base: Box::new(e),
                    index: Box::new(index),
                };
            } else if self.eat_punct(Punct::PlusPlus) {
                e = Expr::Postfix {
                    op: PostfixOp::Inc,
                    expr: Box::new(e),
                };
            } else if self.eat_punct(Punct::MinusMinus) {
                e = Expr::Postfix {
                    op: PostfixOp::Dec,
                    expr: Box::new(e),
                };
            } else {
                return Ok(e);
            }
        }
    }

    fn primary(&mut self) -> Result<Expr, FrontendError> {
        let e = match self.peek_kind().clone() {
            TokenKind::Ident(name) => {
                self.bump();
                if self.eat_punct(Punct::LParen) {
                    let mut args = Vec::new();
                    if !self.eat_punct(Punct::RParen) {
                        loop {
                            args.push(self.assignment()?);
                            if self.eat_punct(Punct::RParen) {
                                break;
                            }
                            self.expect_punct(Punct::Comma)?;
                        }
                    }
                    return Ok(Expr::Call { callee: name, args });
                }
                return Ok(Expr::Ident(name));
            }
            TokenKind::Int(s) => Expr::Int(s),
            TokenKind::Float(s) => Expr::Float(s),
            TokenKind::Str(s) => Expr::Str(s),
            TokenKind::Char(s) => Expr::Char(s),
            TokenKind::Punct(Punct::LParen) => {
                self.bump();
                let inner = self.expr()?;
                self.expect_punct(Punct::RParen)?;
                return Ok(Expr::Paren(Box::new(inner)));
            }
            _ => return Err(self.error("expression")),
        };
        self.bump();
        Ok(e)
    }

    /// `name(args)` clause list as used on pragma lines. Returns each clause
    /// name with the parser positioned inside its parentheses handled by `f`.
    fn clauses(
        &mut self,
        mut f: impl FnMut(&mut Parser, &str, Span) -> Result<(), FrontendError>,
    ) -> Result<(), FrontendError> {
        loop {
            let span = self.span();
            let name = match self.peek_kind() {
                TokenKind::Eof => return Ok(()),
                TokenKind::Ident(n) => n.clone(),
                TokenKind::Keyword(k) => k.as_str().to_string(),
                _ => return Err(self.error("clause")),
            };
            self.bump();
            self.expect_punct(Punct::LParen)?;
            f(self, &name, span)?;
            self.expect_punct(Punct::RParen)?;
            self.eat_punct(Punct::Comma);
        }
    }

    fn ident_list(&mut self) -> Result<Vec<String>, FrontendError> {
        let mut ids = vec![self.expect_ident()?];
        while self.eat_punct(Punct::Comma) {
            ids.push(self.expect_ident()?);
        }
        Ok(ids)
    }

    fn expect_word(&mut self, word: &str) -> Result<(), FrontendError> {
        let ok = match self.peek_kind() {
            TokenKind::Ident(n) => n == word,
            TokenKind::Keyword(k) => k.as_str() == word,
            _ => false,
        };
        if ok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&format!("`{word}`")))
        }
    }
}

fn push_clause(
    clauses: &mut Vec<DataClause>,
    kind: ClauseKind,
    ids: Vec<String>,
    span: Span,
) -> Result<(), FrontendError> {
    for id in &ids {
        if clauses.iter().any(|c| c.idents.contains(id)) {
            return Err(FrontendError::Directive {
                span,
                message: format!("identifier `{id}` appears in more than one data clause"),
            });
        }
    }
    match clauses.iter_mut().find(|c| c.kind == kind) {
        Some(c) => c.idents.extend(ids),
        None => clauses.push(DataClause { kind, idents: ids }),
    }
    Ok(())
}

/// Parses the text of a `#pragma preomp ...` line (without the `#`).
pub fn parse_directive(text: &str, span: Span) -> Result<Directive, FrontendError> {
    let body = text.strip_prefix(PREOMP_PREFIX).unwrap_or(text);
    let mut p = Parser::from_tokens(tokenize_fragment(body, span)?);
    p.expect_word("parallel")?;
    p.expect_word("for")?;
    let mut data_clauses = Vec::new();
    let mut threshold = None;
    p.clauses(|p, name, span| {
        match name {
            "private" => push_clause(
                &mut data_clauses,
                ClauseKind::Private,
                p.ident_list()?,
                span,
            )?,
            "shared" => push_clause(&mut data_clauses, ClauseKind::Shared, p.ident_list()?, span)?,
            "parallel_threshold" => {
                if threshold.is_some() {
                    return Err(FrontendError::Directive {
                        span,
                        message: "duplicate parallel_threshold clause".into(),
                    });
                }
                threshold = Some(p.expr()?);
            }
            other => {
                return Err(FrontendError::UnknownClause {
                    span,
                    name: other.to_string(),
                })
            }
        }
        Ok(())
    })?;
    Ok(Directive {
        text: text.to_string(),
        data_clauses,
        threshold,
        span,
    })
}

/// Clauses of a generated `#pragma omp parallel for ...` line.
#[derive(Debug, Clone, PartialEq)]
pub struct OmpForClauses {
    pub data_clauses: Vec<DataClause>,
    pub if_expr: Option<Expr>,
}

/// Parses the text of an `omp parallel for` pragma (without the `#`).
/// Returns `None` when the line is some other pragma or carries clauses the
/// transformer never emits.
pub fn parse_omp_parallel_for(text: &str) -> Option<OmpForClauses> {
    let body = text.strip_prefix("pragma omp parallel for")?;
    if !body.is_empty() && !body.starts_with(' ') {
        return None;
    }
    let mut p = Parser::from_tokens(tokenize_fragment(body, Span::default()).ok()?);
    let mut data_clauses = Vec::new();
    let mut if_expr = None;
    p.clauses(|p, name, span| {
        match name {
            "private" => push_clause(
                &mut data_clauses,
                ClauseKind::Private,
                p.ident_list()?,
                span,
            )?,
            "shared" => push_clause(&mut data_clauses, ClauseKind::Shared, p.ident_list()?, span)?,
            "if" if if_expr.is_none() => if_expr = Some(p.expr()?),
            other => {
                return Err(FrontendError::UnknownClause {
                    span,
                    name: other.to_string(),
                })
            }
        }
        Ok(())
    })
    .ok()?;
    Some(OmpForClauses {
        data_clauses,
        if_expr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn body_of(src: &str) -> Vec<Stmt> {
        let t = parse(src, false).unwrap();
        match &t.items[0] {
            Item::Function(f) => f.body.clone().unwrap().stmts,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn precedence() {
        let e = parse_expr_str("a + b * c - d").unwrap();
        assert_eq!(e.to_string(), "a + b * c - d");
        match e {
            Expr::Binary {
                op: BinOp::Sub,
                lhs,
                ..
            } => {
                assert!(matches!(*lhs, Expr::Binary { op: BinOp::Add, .. }))
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn assignment_is_right_assoc() {
        let e = parse_expr_str("a = b = 1").unwrap();
        match e {
            Expr::Assign { rhs, .. } => assert!(matches!(*rhs, Expr::Assign { .. })),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cast_and_index() {
        let e = parse_expr_str("(double)a[i][j] / n").unwrap();
        assert_eq!(e.to_string(), "(double)a[i][j] / n");
    }

    #[test]
    fn directive_clauses() {
        let d = parse_directive(
            "pragma preomp parallel for private(j, k) shared(i) parallel_threshold(1.5)",
            Span::new(3, 1),
        )
        .unwrap();
        assert_eq!(d.data_clauses.len(), 2);
        assert_eq!(d.data_clauses[0].idents, vec!["j", "k"]);
        assert_eq!(d.threshold, Some(Expr::Float("1.5".into())));
    }

    #[test]
    fn directive_errors() {
        let e = parse_directive("pragma preomp parallel for reduction(+:s)", Span::new(1, 1));
        assert!(matches!(e, Err(FrontendError::UnknownClause { .. })));
        let e = parse_directive(
            "pragma preomp parallel for private(i) shared(i)",
            Span::new(1, 1),
        );
        assert!(matches!(e, Err(FrontendError::Directive { .. })));
        assert!(parse_directive("pragma preomp for", Span::new(1, 1)).is_err());
    }

    #[test]
    fn directive_attaches_to_for() {
        let stmts =
            body_of("void f(void) {\n#pragma preomp parallel for\nfor (i = 0; i < n; i++) x();\n}");
        match &stmts[0].kind {
            StmtKind::For(fl) => assert!(fl.directive.is_some()),
            other => panic!("{other:?}"),
        }
        assert_eq!(stmts[0].span, Span::new(3, 1));
    }

    #[test]
    fn directive_on_while_is_error_unless_lenient() {
        let src = "void f(void) {\n#pragma preomp parallel for\nwhile (x) y();\n}";
        assert!(matches!(
            parse(src, false),
            Err(FrontendError::DirectiveNotOnFor { .. })
        ));
        let t = parse(src, true).unwrap();
        let Item::Function(f) = &t.items[0] else {
            panic!()
        };
        assert!(matches!(
            f.body.as_ref().unwrap().stmts[0].kind,
            StmtKind::Misplaced { .. }
        ));
    }

    #[test]
    fn directive_outside_function() {
        let src = "#pragma preomp parallel for\nint x;";
        assert!(matches!(
            parse(src, true),
            Err(FrontendError::Directive { .. })
        ));
    }

    #[test]
    fn other_pragmas_are_opaque() {
        let stmts = body_of("void f() {\n#pragma omp parallel for private(j)\nfor(;;) ;\n}");
        assert_eq!(
            stmts[0].kind,
            StmtKind::Pragma("pragma omp parallel for private(j)".into())
        );
    }

    #[test]
    fn omp_for_clause_parse() {
        let c = parse_omp_parallel_for(
            "pragma omp parallel for private(j) if(preomp_decide(0, 0, I, 1, 1.0))",
        )
        .unwrap();
        assert_eq!(c.data_clauses[0].idents, vec!["j"]);
        assert_eq!(
            c.if_expr.unwrap().to_string(),
            "preomp_decide(0, 0, I, 1, 1.0)"
        );
        assert!(parse_omp_parallel_for("pragma omp parallel").is_none());
        assert!(parse_omp_parallel_for("pragma omp parallel for schedule(dynamic)").is_none());
    }

    #[test]
    fn syntax_error_reports_position() {
        let e = parse("int main() { x = ; }", false).unwrap_err();
        match e {
            FrontendError::Syntax { span, .. } => assert_eq!(span, Span::new(1, 18)),
            other => panic!("{other:?}"),
        }
    }
}
