//! Construction and recognition of generated decision sites.

use crate::frontend::ast::*;
use crate::frontend::parser::{parse_omp_parallel_for, OmpForClauses};

use super::GenerationMode;

pub const DECIDE: &str = "preomp_decide";
pub const ENTER: &str = "preomp_enter";
pub const EXIT: &str = "preomp_exit";
pub const RUNTIME_INCLUDE: &str = "include \"preomp_rt.h\"";
pub const OMP_FOR: &str = "pragma omp parallel for";

/// Text of an emitted `omp parallel for` pragma (without the `#`).
pub fn omp_pragma_text(clauses: &[DataClause], if_expr: Option<&Expr>) -> String {
    let mut s = OMP_FOR.to_string();
    for c in clauses {
        s.push_str(&format!(" {}({})", c.kind.as_str(), c.idents.join(", ")));
    }
    if let Some(e) = if_expr {
        s.push_str(&format!(" if({e})"));
    }
    s
}

/// Text of a preomp directive with the given clauses (without the `#`).
pub fn preomp_directive_text(clauses: &[DataClause], threshold: Option<&Expr>) -> String {
    let mut s = "pragma preomp parallel for".to_string();
    for c in clauses {
        s.push_str(&format!(" {}({})", c.kind.as_str(), c.idents.join(", ")));
    }
    if let Some(t) = threshold {
        s.push_str(&format!(" parallel_threshold({t})"));
    }
    s
}

pub fn call_stmt(callee: &str, id: usize, span: Span) -> Stmt {
    Stmt::new(
        StmtKind::Expr(Expr::call(callee, vec![Expr::int(id as i64)])),
        span,
    )
}

/// A recognised generated site, borrowing from the tree.
#[derive(Debug)]
pub enum SiteShape<'a> {
    Duplicate {
        loop_id: usize,
        decide_args: &'a [Expr],
        clauses: OmpForClauses,
        parallel: &'a ForLoop,
        parallel_stmt: &'a Stmt,
        serial: &'a ForLoop,
        serial_stmt: &'a Stmt,
    },
    OmpIf {
        loop_id: usize,
        decide_args: Vec<Expr>,
        clauses: OmpForClauses,
        for_loop: &'a ForLoop,
        for_stmt: &'a Stmt,
    },
}

impl SiteShape<'_> {
    pub fn loop_id(&self) -> usize {
        match self {
            SiteShape::Duplicate { loop_id, .. } | SiteShape::OmpIf { loop_id, .. } => *loop_id,
        }
    }

    pub fn mode(&self) -> GenerationMode {
        match self {
            SiteShape::Duplicate { .. } => GenerationMode::Duplicate,
            SiteShape::OmpIf { .. } => GenerationMode::OmpIf,
        }
    }
}

/// The decision-site id when `e` is a five-argument `preomp_decide` call.
pub fn decide_call(e: &Expr) -> Option<(usize, &[Expr])> {
    match e {
        Expr::Call { callee, args } if callee == DECIDE && args.len() == 5 => {
            Some((int_literal(&args[0])?, args.as_slice()))
        }
        _ => None,
    }
}

fn int_literal(e: &Expr) -> Option<usize> {
    match e {
        Expr::Int(s) => s.parse().ok(),
        _ => None,
    }
}

/// The id of a `preomp_enter(id);` or `preomp_exit(id);` statement.
pub fn instrument_call(s: &Stmt, callee: &str) -> Option<usize> {
    match &s.kind {
        StmtKind::Expr(Expr::Call { callee: c, args }) if c == callee && args.len() == 1 => {
            int_literal(&args[0])
        }
        _ => None,
    }
}

fn plain_for(s: &Stmt) -> Option<&ForLoop> {
    match &s.kind {
        StmtKind::For(fl) if fl.directive.is_none() => Some(fl),
        _ => None,
    }
}

fn block(s: &Stmt) -> Option<&[Stmt]> {
    match &s.kind {
        StmtKind::Block(b) => Some(&b.stmts),
        _ => None,
    }
}

/// Recognises a complete, well-formed generated site rooted at `s`.
pub fn classify(s: &Stmt) -> Option<SiteShape<'_>> {
    match &s.kind {
        StmtKind::If {
            cond,
            then,
            els: Some(els),
        } => {
            let (id, args) = decide_call(cond)?;
            let [enter, pragma, par, exit] = block(then)? else {
                return None;
            };
            let [s_enter, ser, s_exit] = block(els)? else {
                return None;
            };
            let StmtKind::Pragma(text) = &pragma.kind else {
                return None;
            };
            let clauses = parse_omp_parallel_for(text)?;
            let ids = [
                instrument_call(enter, ENTER)?,
                instrument_call(exit, EXIT)?,
                instrument_call(s_enter, ENTER)?,
                instrument_call(s_exit, EXIT)?,
            ];
            if clauses.if_expr.is_some() || ids.iter().any(|&x| x != id) {
                return None;
            }
            Some(SiteShape::Duplicate {
                loop_id: id,
                decide_args: args,
                clauses,
                parallel: plain_for(par)?,
                parallel_stmt: par,
                serial: plain_for(ser)?,
                serial_stmt: ser,
            })
        }
        StmtKind::Block(b) => {
            let [enter, pragma, body, exit] = b.stmts.as_slice() else {
                return None;
            };
            let StmtKind::Pragma(text) = &pragma.kind else {
                return None;
            };
            let mut clauses = parse_omp_parallel_for(text)?;
            let if_expr = clauses.if_expr.take()?;
            let (id, args) = decide_call(&if_expr)?;
            if instrument_call(enter, ENTER)? != id || instrument_call(exit, EXIT)? != id {
                return None;
            }
            Some(SiteShape::OmpIf {
                loop_id: id,
                decide_args: args.to_vec(),
                clauses,
                for_loop: plain_for(body)?,
                for_stmt: body,
            })
        }
        _ => None,
    }
}
