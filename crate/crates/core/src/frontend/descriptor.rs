//! Loop descriptors for preomp directive sites.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::ast::*;
use super::FrontendError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Comparison {
    Lt,
    Le,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparison::Lt => "<",
            Comparison::Le => "<=",
        })
    }
}

/// Number of iterations of `for (v = init; v <cmp> bound; v += step)`.
///
/// `ceil((bound - init) / step)` for `<`, `ceil((bound - init + 1) / step)`
/// for `<=`, clamped at zero. A non-positive step yields zero.
pub fn trip_count(init: i64, bound: i64, step: i64, cmp: Comparison) -> i64 {
    if step <= 0 {
        return 0;
    }
    let mut span = bound as i128 - init as i128;
    if cmp == Comparison::Le {
        span += 1;
    }
    if span <= 0 {
        return 0;
    }
    let step = step as i128;
    let n = (span + step - 1) / step;
    n.min(i64::MAX as i128) as i64
}

/// Canonical loop header facts for one directive site.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopDescriptor {
    /// Dense over all sites of a unit, in document order.
    pub loop_id: usize,
    pub var: String,
    pub init: Expr,
    pub bound: Expr,
    pub step: Expr,
    pub comparison: Comparison,
    /// Nesting depth among preomp loops of the same nest; 0 is outermost.
    pub depth: usize,
    pub nest_id: usize,
    pub threshold: Expr,
    pub data_clauses: Vec<DataClause>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("cannot evaluate `{0}` as an integer")]
    NotInteger(String),
    #[error("division by zero")]
    DivByZero,
}

pub type Env = HashMap<String, i64>;

fn parse_int_literal(s: &str) -> Option<i64> {
    let digits = s.trim_end_matches(['u', 'U', 'l', 'L']);
    if let Some(hex) = digits
        .strip_prefix("0x")
        .or_else(|| digits.strip_prefix("0X"))
    {
        i64::from_str_radix(hex, 16).ok()
    } else if digits.len() > 1 && digits.starts_with('0') {
        i64::from_str_radix(&digits[1..], 8).ok()
    } else {
        digits.parse().ok()
    }
}

/// Evaluates an integer expression under `env`. Casts are transparent.
pub fn eval_int(expr: &Expr, env: &Env) -> Result<i64, EvalError> {
    let not_int = || EvalError::NotInteger(expr.to_string());
    Ok(match expr {
        Expr::Int(s) => parse_int_literal(s).ok_or_else(not_int)?,
        Expr::Ident(n) => *env.get(n).ok_or_else(|| EvalError::Unbound(n.clone()))?,
        Expr::Paren(e) | Expr::Cast { expr: e, .. } => eval_int(e, env)?,
        Expr::Unary { op, expr: e } => {
            let v = eval_int(e, env)?;
            match op {
                UnaryOp::Neg => v.wrapping_neg(),
                UnaryOp::Plus => v,
                UnaryOp::Not => (v == 0) as i64,
                UnaryOp::BitNot => !v,
                UnaryOp::PreInc | UnaryOp::PreDec => return Err(not_int()),
            }
        }
        Expr::Binary { op, lhs, rhs } => {
            let a = eval_int(lhs, env)?;
            let b = eval_int(rhs, env)?;
            match op {
                BinOp::Add => a.wrapping_add(b),
                BinOp::Sub => a.wrapping_sub(b),
                BinOp::Mul => a.wrapping_mul(b),
                BinOp::Div => a.checked_div(b).ok_or(EvalError::DivByZero)?,
                BinOp::Rem => a.checked_rem(b).ok_or(EvalError::DivByZero)?,
                BinOp::Shl => a.wrapping_shl(b as u32),
                BinOp::Shr => a.wrapping_shr(b as u32),
                BinOp::Lt => (a < b) as i64,
                BinOp::Le => (a <= b) as i64,
                BinOp::Gt => (a > b) as i64,
                BinOp::Ge => (a >= b) as i64,
                BinOp::Eq => (a == b) as i64,
                BinOp::Ne => (a != b) as i64,
                BinOp::BitAnd => a & b,
                BinOp::BitXor => a ^ b,
                BinOp::BitOr => a | b,
                BinOp::And => (a != 0 && b != 0) as i64,
                BinOp::Or => (a != 0 || b != 0) as i64,
            }
        }
        Expr::Ternary { cond, then, els } => {
            if eval_int(cond, env)? != 0 {
                eval_int(then, env)?
            } else {
                eval_int(els, env)?
            }
        }
        _ => return Err(not_int()),
    })
}

impl LoopDescriptor {
    pub fn eval_header(&self, env: &Env) -> Result<(i64, i64, i64), EvalError> {
        Ok((
            eval_int(&self.init, env)?,
            eval_int(&self.bound, env)?,
            eval_int(&self.step, env)?,
        ))
    }

    pub fn iteration_count(&self, env: &Env) -> Result<i64, EvalError> {
        let (init, bound, step) = self.eval_header(env)?;
        Ok(trip_count(init, bound, step, self.comparison))
    }

    /// Iteration count when the header is made of constants only.
    pub fn static_iteration_count(&self) -> Option<i64> {
        self.iteration_count(&Env::new()).ok()
    }
}

/// One directive site as seen by the scanner; shared by extraction and
/// validation.
#[derive(Debug, Clone)]
pub(crate) struct Site<'a> {
    pub loop_id: usize,
    pub depth: usize,
    pub nest_id: usize,
    pub directive: &'a Directive,
    pub span: Span,
    /// `None` for a directive that is not attached to a `for`.
    pub for_loop: Option<&'a ForLoop>,
    /// Names visible at loop entry, innermost scope last.
    pub visible: Vec<String>,
    pub function: &'a str,
}

/// Visits every directive site in document order.
pub(crate) fn scan_sites(tree: &SyntaxTree) -> Vec<Site<'_>> {
    let mut globals = Vec::new();
    let mut sites = Vec::new();
    let mut next_id = 0;
    let mut next_nest = 0;
    for item in &tree.items {
        match item {
            Item::Declaration(d) => globals.extend(d.declarators.iter().map(|x| x.name.clone())),
            Item::Function(f) => {
                globals.push(f.name.clone());
                let Some(body) = &f.body else { continue };
                let mut scope = globals.clone();
                if let Params::List(ps) = &f.params {
                    scope.extend(ps.iter().filter_map(|p| p.name.clone()));
                }
                let mut sc = Scanner {
                    sites: &mut sites,
                    next_id: &mut next_id,
                    next_nest: &mut next_nest,
                    function: &f.name,
                };
                sc.block(&body.stmts, &mut scope, 0, None);
            }
            Item::Preproc { .. } => {}
        }
    }
    sites
}

struct Scanner<'s, 'a> {
    sites: &'s mut Vec<Site<'a>>,
    next_id: &'s mut usize,
    next_nest: &'s mut usize,
    function: &'a str,
}

impl<'s, 'a> Scanner<'s, 'a> {
    fn block(
        &mut self,
        stmts: &'a [Stmt],
        scope: &mut Vec<String>,
        depth: usize,
        nest: Option<usize>,
    ) {
        let mark = scope.len();
        for s in stmts {
            self.stmt(s, scope, depth, nest);
        }
        scope.truncate(mark);
    }

    fn site(
        &mut self,
        directive: &'a Directive,
        for_loop: Option<&'a ForLoop>,
        scope: &[String],
        depth: usize,
        nest: Option<usize>,
    ) -> usize {
        let nest_id = nest.unwrap_or_else(|| {
            let n = *self.next_nest;
            *self.next_nest += 1;
            n
        });
        let loop_id = *self.next_id;
        *self.next_id += 1;
        self.sites.push(Site {
            loop_id,
            depth,
            nest_id,
            directive,
            span: directive.span,
            for_loop,
            visible: scope.to_vec(),
            function: self.function,
        });
        nest_id
    }

    fn stmt(&mut self, s: &'a Stmt, scope: &mut Vec<String>, depth: usize, nest: Option<usize>) {
        match &s.kind {
            StmtKind::Decl(d) => scope.extend(d.declarators.iter().map(|x| x.name.clone())),
            StmtKind::Block(b) => self.block(&b.stmts, scope, depth, nest),
            StmtKind::If { then, els, .. } => {
                self.stmt(then, scope, depth, nest);
                if let Some(e) = els {
                    self.stmt(e, scope, depth, nest);
                }
            }
            StmtKind::While { body, .. } => self.stmt(body, scope, depth, nest),
            StmtKind::For(fl) => {
                let mark = scope.len();
                if let ForInit::Decl(d) = &fl.init {
                    scope.extend(d.declarators.iter().map(|x| x.name.clone()));
                }
                match &fl.directive {
                    Some(dir) => {
                        let nid = self.site(dir, Some(fl), scope, depth, nest);
                        self.stmt(&fl.body, scope, depth + 1, Some(nid));
                    }
                    None => self.stmt(&fl.body, scope, depth, nest),
                }
                scope.truncate(mark);
            }
            StmtKind::Misplaced { directive, stmt } => {
                let nid = self.site(directive, None, scope, depth, nest);
                self.stmt(stmt, scope, depth + 1, Some(nid));
            }
            StmtKind::Expr(_)
            | StmtKind::Empty
            | StmtKind::Return(_)
            | StmtKind::Break
            | StmtKind::Continue
            | StmtKind::Pragma(_) => {}
        }
    }
}

fn loop_form(span: Span, loop_id: usize, reason: impl Into<String>) -> FrontendError {
    FrontendError::LoopForm {
        span,
        loop_id,
        reason: reason.into(),
    }
}

fn writes_var(s: &Stmt, var: &str) -> bool {
    let mut hit = false;
    let mut check = |e: &Expr| e.for_each_write(&mut |n| hit |= n == var);
    walk_stmt(s, &mut |st| match &st.kind {
        StmtKind::Expr(e) | StmtKind::Return(Some(e)) => check(e),
        StmtKind::If { cond, .. } | StmtKind::While { cond, .. } => check(cond),
        StmtKind::Decl(d) => d
            .declarators
            .iter()
            .filter_map(|x| x.init.as_ref())
            .for_each(&mut check),
        StmtKind::For(fl) => {
            if let ForInit::Expr(e) = &fl.init {
                check(e);
            }
            if let ForInit::Decl(d) = &fl.init {
                d.declarators
                    .iter()
                    .filter_map(|x| x.init.as_ref())
                    .for_each(&mut check);
            }
            fl.cond.iter().for_each(&mut check);
            fl.step.iter().for_each(&mut check);
        }
        _ => {}
    });
    hit
}

fn redeclares(s: &Stmt, var: &str) -> bool {
    let mut hit = false;
    walk_stmt(s, &mut |st| match &st.kind {
        StmtKind::Decl(d) => hit |= d.declarators.iter().any(|x| x.name == var),
        StmtKind::For(ForLoop {
            init: ForInit::Decl(d),
            ..
        }) => hit |= d.declarators.iter().any(|x| x.name == var),
        _ => {}
    });
    hit
}

pub(crate) fn describe(site: &Site<'_>) -> Result<LoopDescriptor, FrontendError> {
    let span = site.span;
    let id = site.loop_id;
    let Some(fl) = site.for_loop else {
        return Err(FrontendError::DirectiveNotOnFor { span });
    };

    let (var, init) = match &fl.init {
        ForInit::Expr(Expr::Assign {
            op: AssignOp::Assign,
            lhs,
            rhs,
        }) => match lhs.as_ref() {
            Expr::Ident(v) => (v.clone(), (**rhs).clone()),
            _ => {
                return Err(loop_form(
                    span,
                    id,
                    "induction variable must be a plain identifier",
                ))
            }
        },
        ForInit::Decl(d) if d.declarators.len() == 1 => {
            let x = &d.declarators[0];
            match (&x.init, x.dims.is_empty()) {
                (Some(e), true) => (x.name.clone(), e.clone()),
                _ => {
                    return Err(loop_form(
                        span,
                        id,
                        "loop initialiser must assign the induction variable",
                    ))
                }
            }
        }
        _ => return Err(loop_form(span, id, "loop initialiser must be `var = expr`")),
    };

    let (comparison, bound) = match &fl.cond {
        Some(Expr::Binary { op, lhs, rhs }) => {
            let cmp =
                match op {
                    BinOp::Lt => Comparison::Lt,
                    BinOp::Le => Comparison::Le,
                    BinOp::And | BinOp::Or => {
                        return Err(loop_form(span, id, "compound loop condition"))
                    }
                    BinOp::Gt | BinOp::Ge => return Err(loop_form(
                        span,
                        id,
                        "non-monotonic loop: only increasing loops with `<` or `<=` are supported",
                    )),
                    _ => {
                        return Err(loop_form(
                            span,
                            id,
                            "condition must be `var < bound` or `var <= bound`",
                        ))
                    }
                };
            if **lhs != Expr::Ident(var.clone()) {
                return Err(loop_form(
                    span,
                    id,
                    format!("condition must compare `{var}` on the left"),
                ));
            }
            (cmp, (**rhs).clone())
        }
        Some(_) => {
            return Err(loop_form(
                span,
                id,
                "condition must be `var < bound` or `var <= bound`",
            ))
        }
        None => return Err(loop_form(span, id, "missing loop condition")),
    };

    let is_var = |e: &Expr| *e == Expr::Ident(var.clone());
    let step = match &fl.step {
        Some(Expr::Postfix {
            op: PostfixOp::Inc,
            expr,
        })
        | Some(Expr::Unary {
            op: UnaryOp::PreInc,
            expr,
        }) if is_var(expr) => Expr::int(1),
        Some(Expr::Assign {
            op: AssignOp::Add,
            lhs,
            rhs,
        }) if is_var(lhs) => (**rhs).clone(),
        Some(Expr::Assign {
            op: AssignOp::Assign,
            lhs,
            rhs,
        }) if is_var(lhs) => match rhs.as_ref() {
            Expr::Binary {
                op: BinOp::Add,
                lhs: a,
                rhs: b,
            } if is_var(a) => (**b).clone(),
            _ => return Err(loop_form(span, id, "step must be `var++` or `var += expr`")),
        },
        Some(Expr::Postfix {
            op: PostfixOp::Dec, ..
        })
        | Some(Expr::Unary {
            op: UnaryOp::PreDec,
            ..
        })
        | Some(Expr::Assign {
            op: AssignOp::Sub, ..
        }) => return Err(loop_form(span, id, "non-monotonic loop: decreasing step")),
        _ => return Err(loop_form(span, id, "step must be `var++` or `var += expr`")),
    };
    if let Ok(v) = eval_int(&step, &Env::new()) {
        if v <= 0 {
            return Err(loop_form(
                span,
                id,
                format!("non-monotonic loop: step {v} is not positive"),
            ));
        }
    }

    for (what, e) in [("initial value", &init), ("bound", &bound), ("step", &step)] {
        if e.mentions(&var) {
            return Err(loop_form(
                span,
                id,
                format!("{what} depends on the induction variable `{var}`"),
            ));
        }
        let mut writes = false;
        e.for_each_write(&mut |_| writes = true);
        if writes {
            return Err(loop_form(span, id, format!("{what} has side effects")));
        }
    }
    if writes_var(&fl.body, &var) && !redeclares(&fl.body, &var) {
        return Err(loop_form(
            span,
            id,
            format!("induction variable `{var}` is modified in the loop body"),
        ));
    }

    Ok(LoopDescriptor {
        loop_id: id,
        var,
        init,
        bound,
        step,
        comparison,
        depth: site.depth,
        nest_id: site.nest_id,
        threshold: site.directive.threshold_expr(),
        data_clauses: site.directive.data_clauses.clone(),
        span,
    })
}

/// One descriptor per directive site, in document order. Fails on the first
/// site whose loop is not in canonical form.
pub fn extract_descriptors(tree: &SyntaxTree) -> Result<Vec<LoopDescriptor>, FrontendError> {
    scan_sites(tree).iter().map(describe).collect()
}
