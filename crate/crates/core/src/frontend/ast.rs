//! Syntax tree for the supported C subset.
//!
//! Expressions carry no spans; statements, items and directives do.
//! Structural comparison of trees goes through [`SyntaxTree::without_spans`].

use std::fmt;

use super::lexer::Keyword;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub line: u32,
    pub column: u32,
}

impl Span {
    pub const fn new(line: u32, column: u32) -> Span {
        Span { line, column }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SyntaxTree {
    pub items: Vec<Item>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Item {
    /// A top-level `#...` line, kept verbatim (whitespace-normalised).
    Preproc {
        text: String,
        span: Span,
    },
    Function(Function),
    Declaration(Declaration),
}

/// Sequence of specifier keywords, e.g. `unsigned long` or `const double`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeSpec(pub Vec<Keyword>);

impl fmt::Display for TypeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let words: Vec<_> = self.0.iter().map(|k| k.as_str()).collect();
        f.write_str(&words.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Function {
    pub ret: TypeSpec,
    pub name: String,
    pub params: Params,
    /// `None` for a prototype.
    pub body: Option<Block>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    /// `()`
    Empty,
    /// `(void)`
    Void,
    List(Vec<Param>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub ty: TypeSpec,
    pub name: Option<String>,
    /// Array dimensions; `None` for an empty `[]`.
    pub dims: Vec<Option<Expr>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Declaration {
    pub ty: TypeSpec,
    pub declarators: Vec<Declarator>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Declarator {
    pub name: String,
    pub dims: Vec<Option<Expr>>,
    pub init: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Block {
    pub stmts: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

impl Stmt {
    pub fn new(kind: StmtKind, span: Span) -> Stmt {
        Stmt { kind, span }
    }

    /// A copy with every span zeroed.
    pub fn without_spans(&self) -> Stmt {
        let mut s = self.clone();
        clear_stmt(&mut s);
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    Decl(Declaration),
    Expr(Expr),
    Empty,
    Block(Block),
    If {
        cond: Expr,
        then: Box<Stmt>,
        els: Option<Box<Stmt>>,
    },
    For(ForLoop),
    While {
        cond: Expr,
        body: Box<Stmt>,
    },
    Return(Option<Expr>),
    Break,
    Continue,
    /// A `#...` line inside a function body other than a preomp directive,
    /// kept verbatim.
    Pragma(String),
    /// A preomp directive that does not precede a `for` statement. Only
    /// produced by the lenient parser; validation reports it as an error.
    Misplaced {
        directive: Directive,
        stmt: Box<Stmt>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForLoop {
    pub directive: Option<Directive>,
    pub init: ForInit,
    pub cond: Option<Expr>,
    pub step: Option<Expr>,
    pub body: Box<Stmt>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ForInit {
    Empty,
    Decl(Declaration),
    Expr(Expr),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClauseKind {
    Private,
    Shared,
}

impl ClauseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClauseKind::Private => "private",
            ClauseKind::Shared => "shared",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataClause {
    pub kind: ClauseKind,
    pub idents: Vec<String>,
}

/// A `#pragma preomp parallel for` directive.
#[derive(Debug, Clone)]
pub struct Directive {
    /// Normalised text of the pragma line after `#`, re-emitted verbatim
    /// for untransformed trees.
    pub text: String,
    pub data_clauses: Vec<DataClause>,
    /// The `parallel_threshold` argument as written; `None` when omitted.
    pub threshold: Option<Expr>,
    pub span: Span,
}

pub const DEFAULT_THRESHOLD: &str = "1.0";

impl Directive {
    /// The threshold expression with the default materialised.
    pub fn threshold_expr(&self) -> Expr {
        self.threshold
            .clone()
            .unwrap_or_else(|| Expr::Float(DEFAULT_THRESHOLD.to_string()))
    }
}

// An omitted threshold and an explicit `parallel_threshold(1.0)` denote the
// same directive; spans and spelling never take part in equality.
impl PartialEq for Directive {
    fn eq(&self, other: &Self) -> bool {
        self.data_clauses == other.data_clauses && self.threshold_expr() == other.threshold_expr()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Plus,
    Not,
    BitNot,
    PreInc,
    PreDec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PostfixOp {
    Inc,
    Dec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Mul,
    Div,
    Rem,
    Add,
    Sub,
    Shl,
    Shr,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    BitAnd,
    BitXor,
    BitOr,
    And,
    Or,
}

impl BinOp {
    pub fn as_str(self) -> &'static str {
        match self {
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Shl => "<<",
            BinOp::Shr => ">>",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::BitAnd => "&",
            BinOp::BitXor => "^",
            BinOp::BitOr => "|",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    /// Binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Mul | BinOp::Div | BinOp::Rem => 10,
            BinOp::Add | BinOp::Sub => 9,
            BinOp::Shl | BinOp::Shr => 8,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 7,
            BinOp::Eq | BinOp::Ne => 6,
            BinOp::BitAnd => 5,
            BinOp::BitXor => 4,
            BinOp::BitOr => 3,
            BinOp::And => 2,
            BinOp::Or => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssignOp {
    Assign,
    Add,
    Sub,
    Mul,
    Div,
    Rem,
}

impl AssignOp {
    pub fn as_str(self) -> &'static str {
        match self {
            AssignOp::Assign => "=",
            AssignOp::Add => "+=",
            AssignOp::Sub => "-=",
            AssignOp::Mul => "*=",
            AssignOp::Div => "/=",
            AssignOp::Rem => "%=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Ident(String),
    Int(String),
    Float(String),
    Str(String),
    Char(String),
    Paren(Box<Expr>),
    Unary {
        op: UnaryOp,
        expr: Box<Expr>,
    },
    Postfix {
        op: PostfixOp,
        expr: Box<Expr>,
    },
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Assign {
        op: AssignOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Ternary {
        cond: Box<Expr>,
        then: Box<Expr>,
        els: Box<Expr>,
    },
    Call {
        callee: String,
        args: Vec<Expr>,
    },
    Index {
        base: Box<Expr>,
        index: Box<Expr>,
    },
    Cast {
        ty: TypeSpec,
        expr: Box<Expr>,
    },
}

impl Expr {
    pub fn ident(name: &str) -> Expr {
        Expr::Ident(name.to_string())
    }

    pub fn int(v: i64) -> Expr {
        Expr::Int(v.to_string())
    }

    pub fn call(callee: &str, args: Vec<Expr>) -> Expr {
        Expr::Call {
            callee: callee.to_string(),
            args,
        }
    }

    /// True for expressions that need no parentheses as an operand.
    pub fn is_primary(&self) -> bool {
        matches!(
            self,
            Expr::Ident(_)
                | Expr::Int(_)
                | Expr::Float(_)
                | Expr::Str(_)
                | Expr::Char(_)
                | Expr::Paren(_)
                | Expr::Call { .. }
                | Expr::Index { .. }
        )
    }

    /// Wraps in parentheses unless already primary.
    pub fn parenthesized(self) -> Expr {
        if self.is_primary() {
            self
        } else {
            Expr::Paren(Box::new(self))
        }
    }

    /// Calls `f` on every identifier read or written by this expression,
    /// including call arguments but not callee names.
    pub fn for_each_ident(&self, f: &mut dyn FnMut(&str)) {
        match self {
            Expr::Ident(n) => f(n),
            Expr::Int(_) | Expr::Float(_) | Expr::Str(_) | Expr::Char(_) => {}
            Expr::Paren(e) | Expr::Unary { expr: e, .. } | Expr::Postfix { expr: e, .. } => {
                e.for_each_ident(f)
            }
            Expr::Cast { expr, .. } => expr.for_each_ident(f),
            Expr::Binary { lhs, rhs, .. } | Expr::Assign { lhs, rhs, .. } => {
                lhs.for_each_ident(f);
                rhs.for_each_ident(f);
            }
            Expr::Index { base, index } => {
                base.for_each_ident(f);
                index.for_each_ident(f);
            }
            Expr::Ternary { cond, then, els } => {
                cond.for_each_ident(f);
                then.for_each_ident(f);
                els.for_each_ident(f);
            }
            Expr::Call { args, .. } => args.iter().for_each(|a| a.for_each_ident(f)),
        }
    }

    pub fn mentions(&self, name: &str) -> bool {
        let mut hit = false;
        self.for_each_ident(&mut |n| hit |= n == name);
        hit
    }

    /// Calls `f` on the root variable of every lvalue this expression
    /// modifies (assignment targets, `++`/`--` operands).
    pub fn for_each_write(&self, f: &mut dyn FnMut(&str)) {
        fn root(e: &Expr) -> Option<&str> {
            match e {
                Expr::Ident(n) => Some(n),
                Expr::Paren(e) => root(e),
                Expr::Index { base, .. } => root(base),
                _ => None,
            }
        }
        match self {
            Expr::Ident(_) | Expr::Int(_) | Expr::Float(_) | Expr::Str(_) | Expr::Char(_) => {}
            Expr::Assign { lhs, rhs, .. } => {
                if let Some(n) = root(lhs) {
                    f(n);
                }
                lhs.for_each_write(f);
                rhs.for_each_write(f);
            }
            Expr::Unary {
                op: UnaryOp::PreInc | UnaryOp::PreDec,
                expr,
            }
            | Expr::Postfix { expr, .. } => {
                if let Some(n) = root(expr) {
                    f(n);
                }
                expr.for_each_write(f);
            }
            Expr::Paren(e) | Expr::Unary { expr: e, .. } | Expr::Cast { expr: e, .. } => {
                e.for_each_write(f)
            }
            Expr::Binary { lhs, rhs, .. } => {
                lhs.for_each_write(f);
                rhs.for_each_write(f);
            }
            Expr::Index { base, index } => {
                base.for_each_write(f);
                index.for_each_write(f);
            }
            Expr::Ternary { cond, then, els } => {
                cond.for_each_write(f);
                then.for_each_write(f);
                els.for_each_write(f);
            }
            Expr::Call { args, .. } => args.iter().for_each(|a| a.for_each_write(f)),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Ident(s) | Expr::Int(s) | Expr::Float(s) | Expr::Str(s) | Expr::Char(s) => {
                f.write_str(s)
            }
            Expr::Paren(e) => write!(f, "({e})"),
            Expr::Unary { op, expr } => {
                let o = match op {
                    UnaryOp::Neg => "-",
                    UnaryOp::Plus => "+",
                    UnaryOp::Not => "!",
                    UnaryOp::BitNot => "~",
                    UnaryOp::PreInc => "++",
                    UnaryOp::PreDec => "--",
                };
                write!(f, "{o}{expr}")
            }
            Expr::Postfix { op, expr } => {
                let o = match op {
                    PostfixOp::Inc => "++",
                    PostfixOp::Dec => "--",
                };
                write!(f, "{expr}{o}")
            }
            Expr::Binary { op, lhs, rhs } => write!(f, "{lhs} {} {rhs}", op.as_str()),
            Expr::Assign { op, lhs, rhs } => write!(f, "{lhs} {} {rhs}", op.as_str()),
            Expr::Ternary { cond, then, els } => write!(f, "{cond} ? {then} : {els}"),
            Expr::Call { callee, args } => {
                write!(f, "{callee}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Expr::Index { base, index } => write!(f, "{base}[{index}]"),
            Expr::Cast { ty, expr } => write!(f, "({ty}){expr}"),
        }
    }
}

impl SyntaxTree {
    /// A copy with every span zeroed, for structural comparison.
    pub fn without_spans(&self) -> SyntaxTree {
        let mut t = self.clone();
        for item in &mut t.items {
            match item {
                Item::Preproc { span, .. } => *span = Span::default(),
                Item::Function(func) => {
                    func.span = Span::default();
                    if let Some(b) = &mut func.body {
                        clear_block(b);
                    }
                }
                Item::Declaration(d) => d.span = Span::default(),
            }
        }
        t
    }

    /// All function definitions (not prototypes).
    pub fn functions(&self) -> impl Iterator<Item = &Function> {
        self.items.iter().filter_map(|i| match i {
            Item::Function(f) if f.body.is_some() => Some(f),
            _ => None,
        })
    }
}

fn clear_block(b: &mut Block) {
    b.stmts.iter_mut().for_each(clear_stmt);
}

fn clear_stmt(s: &mut Stmt) {
    s.span = Span::default();
    match &mut s.kind {
        StmtKind::Decl(d) => d.span = Span::default(),
        StmtKind::Block(b) => clear_block(b),
        StmtKind::If { then, els, .. } => {
            clear_stmt(then);
            if let Some(e) = els {
                clear_stmt(e);
            }
        }
        StmtKind::For(fl) => {
            if let Some(d) = &mut fl.directive {
                d.span = Span::default();
            }
            if let ForInit::Decl(d) = &mut fl.init {
                d.span = Span::default();
            }
            clear_stmt(&mut fl.body);
        }
        StmtKind::While { body, .. } => clear_stmt(body),
        StmtKind::Misplaced { directive, stmt } => {
            directive.span = Span::default();
            clear_stmt(stmt);
        }
        StmtKind::Expr(_)
        | StmtKind::Empty
        | StmtKind::Return(_)
        | StmtKind::Break
        | StmtKind::Continue
        | StmtKind::Pragma(_) => {}
    }
}

/// Pre-order walk over statements, visiting the loop header before its body.
pub fn walk_stmts<'a>(stmts: impl IntoIterator<Item = &'a Stmt>, f: &mut dyn FnMut(&'a Stmt)) {
    for s in stmts {
        walk_stmt(s, f);
    }
}

pub fn walk_stmt<'a>(s: &'a Stmt, f: &mut dyn FnMut(&'a Stmt)) {
    f(s);
    match &s.kind {
        StmtKind::Block(b) => walk_stmts(&b.stmts, f),
        StmtKind::If { then, els, .. } => {
            walk_stmt(then, f);
            if let Some(e) = els {
                walk_stmt(e, f);
            }
        }
        StmtKind::For(fl) => walk_stmt(&fl.body, f),
        StmtKind::While { body, .. } => walk_stmt(body, f),
        StmtKind::Misplaced { stmt, .. } => walk_stmt(stmt, f),
        _ => {}
    }
}
