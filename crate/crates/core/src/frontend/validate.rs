use std::fmt;

use super::ast::*;
use super::descriptor::{describe, scan_sites};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub span: Span,
    pub loop_id: Option<usize>,
    pub message: String,
}

impl Diagnostic {
    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{}: {sev}: {}", self.span, self.message)
    }
}

fn const_real(e: &Expr) -> Option<f64> {
    match e {
        Expr::Int(s) | Expr::Float(s) => s
            .trim_end_matches(['u', 'U', 'l', 'L', 'f', 'F'])
            .parse()
            .ok(),
        Expr::Paren(e) | Expr::Cast { expr: e, .. } => const_real(e),
        Expr::Unary {
            op: UnaryOp::Neg,
            expr,
        } => const_real(expr).map(|v| -v),
        Expr::Unary {
            op: UnaryOp::Plus,
            expr,
        } => const_real(expr),
        _ => None,
    }
}

/// Checks every directive site. An empty result means the tree can be
/// transformed; warnings alone do not block transformation.
pub fn validate(tree: &SyntaxTree) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for site in scan_sites(tree) {
        let mut push = |severity, message: String| {
            out.push(Diagnostic {
                severity,
                span: site.span,
                loop_id: Some(site.loop_id),
                message,
            })
        };
        for clause in &site.directive.data_clauses {
            for id in &clause.idents {
                if !site.visible.iter().any(|v| v == id) {
                    push(
                        Severity::Error,
                        format!(
                            "`{id}` in {} clause is not declared in `{}`",
                            clause.kind.as_str(),
                            site.function
                        ),
                    );
                } else if let Some(fl) = site.for_loop {
                    if body_declares(&fl.body, id) {
                        push(
                            Severity::Warning,
                            format!(
                                "`{id}` in {} clause is shadowed by a declaration in the loop body",
                                clause.kind.as_str()
                            ),
                        );
                    }
                }
            }
        }
        if let Some(t) = &site.directive.threshold {
            if matches!(const_real(t), Some(v) if v <= 0.0 || v.is_nan()) {
                push(
                    Severity::Error,
                    format!("parallel_threshold({t}) must be positive"),
                );
            }
        }
        match describe(&site) {
            Ok(d) => {
                if d.static_iteration_count() == Some(0) {
                    push(
                        Severity::Warning,
                        "loop has zero iterations and will never run in parallel".into(),
                    );
                }
            }
            Err(e) => push(Severity::Error, e.message()),
        }
    }
    out
}

fn body_declares(s: &Stmt, name: &str) -> bool {
    let mut hit = false;
    walk_stmt(s, &mut |st| match &st.kind {
        StmtKind::Decl(d) => hit |= d.declarators.iter().any(|x| x.name == name),
        StmtKind::For(ForLoop {
            init: ForInit::Decl(d),
            ..
        }) => hit |= d.declarators.iter().any(|x| x.name == name),
        _ => {}
    });
    hit
}
