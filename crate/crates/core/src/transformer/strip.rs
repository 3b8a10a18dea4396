//! Inverse of [`transform`](super::transform), used as a semantic oracle.

use thiserror::Error;

use crate::frontend::ast::*;

use super::sites::*;

/// Which copy of a duplicated loop to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Serial,
    Parallel,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StripError {
    #[error("{span}: malformed instrumentation: {message}")]
    Malformed { span: Span, message: String },
}

fn malformed(span: Span, message: impl Into<String>) -> StripError {
    StripError::Malformed {
        span,
        message: message.into(),
    }
}

/// Replaces every generated decision site by the original directive loop,
/// keeping `branch` of duplicated sites, and drops the runtime include.
/// Both branches of a duplicated site must agree once stripped.
pub fn strip_instrumentation(tree: &SyntaxTree, branch: Branch) -> Result<SyntaxTree, StripError> {
    let mut out = tree.clone();
    out.items
        .retain(|i| !matches!(i, Item::Preproc { text, .. } if text == RUNTIME_INCLUDE));
    for item in &mut out.items {
        if let Item::Function(Function { body: Some(b), .. }) = item {
            strip_block(b, branch)?;
        }
    }
    Ok(out)
}

fn strip_block(b: &mut Block, branch: Branch) -> Result<(), StripError> {
    b.stmts.iter_mut().try_for_each(|s| strip_stmt(s, branch))
}

fn restore(for_stmt: &Stmt, clauses: &[DataClause], threshold: &Expr, span: Span) -> Stmt {
    let threshold = (*threshold != Expr::Float(DEFAULT_THRESHOLD.to_string())).then_some(threshold);
    let mut s = for_stmt.clone();
    if let StmtKind::For(fl) = &mut s.kind {
        fl.directive = Some(Directive {
            text: preomp_directive_text(clauses, threshold),
            data_clauses: clauses.to_vec(),
            threshold: threshold.cloned(),
            span,
        });
    }
    s
}

fn strip_stmt(s: &mut Stmt, branch: Branch) -> Result<(), StripError> {
    if let Some(shape) = classify(s) {
        let restored = match shape {
            SiteShape::Duplicate {
                decide_args,
                clauses,
                parallel_stmt,
                serial_stmt,
                ..
            } => {
                let mut par = parallel_stmt.clone();
                let mut ser = serial_stmt.clone();
                strip_stmt_body(&mut par, branch)?;
                strip_stmt_body(&mut ser, branch)?;
                if par.without_spans() != ser.without_spans() {
                    return Err(malformed(s.span, "serial and parallel branches differ"));
                }
                let kept = match branch {
                    Branch::Serial => &ser,
                    Branch::Parallel => &par,
                };
                restore(kept, &clauses.data_clauses, &decide_args[4], s.span)
            }
            SiteShape::OmpIf {
                decide_args,
                clauses,
                for_stmt,
                ..
            } => {
                let mut f = for_stmt.clone();
                strip_stmt_body(&mut f, branch)?;
                restore(&f, &clauses.data_clauses, &decide_args[4], s.span)
            }
        };
        *s = restored;
        return Ok(());
    }
    match &mut s.kind {
        StmtKind::Block(b) => strip_block(b, branch),
        StmtKind::If { cond, then, els } => {
            check_expr(cond, s.span)?;
            strip_stmt(then, branch)?;
            match els {
                Some(e) => strip_stmt(e, branch),
                None => Ok(()),
            }
        }
        StmtKind::While { cond, body } => {
            check_expr(cond, s.span)?;
            strip_stmt(body, branch)
        }
        StmtKind::For(fl) => {
            for e in [&fl.cond, &fl.step].into_iter().flatten() {
                check_expr(e, s.span)?;
            }
            if let ForInit::Expr(e) = &fl.init {
                check_expr(e, s.span)?;
            }
            strip_stmt(&mut fl.body, branch)
        }
        StmtKind::Misplaced { stmt, .. } => strip_stmt(stmt, branch),
        StmtKind::Expr(e) | StmtKind::Return(Some(e)) => check_expr(e, s.span),
        StmtKind::Decl(d) => d
            .declarators
            .iter()
            .filter_map(|x| x.init.as_ref())
            .try_for_each(|e| check_expr(e, s.span)),
        StmtKind::Pragma(text) => {
            if text.contains(DECIDE) {
                Err(malformed(s.span, "stray decision pragma"))
            } else {
                Ok(())
            }
        }
        StmtKind::Empty | StmtKind::Return(None) | StmtKind::Break | StmtKind::Continue => Ok(()),
    }
}

/// Strips inside the body of a `for` statement.
fn strip_stmt_body(s: &mut Stmt, branch: Branch) -> Result<(), StripError> {
    match &mut s.kind {
        StmtKind::For(fl) => strip_stmt(&mut fl.body, branch),
        _ => Err(malformed(s.span, "expected a for statement")),
    }
}

fn check_expr(e: &Expr, span: Span) -> Result<(), StripError> {
    match runtime_call(e) {
        Some(name) => Err(malformed(span, format!("stray `{name}` call"))),
        None => Ok(()),
    }
}

fn runtime_call(e: &Expr) -> Option<&str> {
    match e {
        Expr::Call { callee, args } => {
            if [DECIDE, ENTER, EXIT].contains(&callee.as_str()) {
                Some(callee)
            } else {
                args.iter().find_map(runtime_call)
            }
        }
        Expr::Ident(_) | Expr::Int(_) | Expr::Float(_) | Expr::Str(_) | Expr::Char(_) => None,
        Expr::Paren(x)
        | Expr::Unary { expr: x, .. }
        | Expr::Postfix { expr: x, .. }
        | Expr::Cast { expr: x, .. } => runtime_call(x),
        Expr::Binary { lhs, rhs, .. } | Expr::Assign { lhs, rhs, .. } => {
            runtime_call(lhs).or_else(|| runtime_call(rhs))
        }
        Expr::Index { base, index } => runtime_call(base).or_else(|| runtime_call(index)),
        Expr::Ternary { cond, then, els } => runtime_call(cond)
            .or_else(|| runtime_call(then))
            .or_else(|| runtime_call(els)),
    }
}
