//! Rewrites preomp directive loops into runtime-selectable OpenMP code.
//!
//! Duplicate mode turns each directive loop `L` with id `n` into
//!
//! ```text
//! if (preomp_decide(n, init, bound, step, threshold)) {
//!     preomp_enter(n);
//!     #pragma omp parallel for <clauses>
//!     L
//!     preomp_exit(n);
//! } else {
//!     preomp_enter(n);
//!     L
//!     preomp_exit(n);
//! }
//! ```
//!
//! and ompif mode into a block holding a single copy:
//!
//! ```text
//! {
//!     preomp_enter(n);
//!     #pragma omp parallel for <clauses> if(preomp_decide(n, init, bound, step, threshold))
//!     L
//!     preomp_exit(n);
//! }
//! ```
//!
//! For `<=` loops the bound argument is `bound + 1`, so the runtime always
//! sees a half-open range.

mod emit;
pub mod sites;
mod strip;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::frontend::ast::*;
use crate::frontend::descriptor::scan_sites;
use crate::frontend::{validate, Comparison, Diagnostic, LoopDescriptor};

pub use emit::{emit_c, EmittedUnit, ManifestEntry, MANIFEST_HEADER};
pub use strip::{strip_instrumentation, Branch, StripError};

use sites::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GenerationMode {
    Duplicate,
    OmpIf,
}

impl GenerationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            GenerationMode::Duplicate => "duplicate",
            GenerationMode::OmpIf => "ompif",
        }
    }
}

impl fmt::Display for GenerationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GenerationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "duplicate" => Ok(GenerationMode::Duplicate),
            "ompif" => Ok(GenerationMode::OmpIf),
            other => Err(format!(
                "unknown generation mode `{other}` (expected duplicate or ompif)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error("program has {} error diagnostic(s); first: {}", .0.len(), .0[0])]
    Invalid(Vec<Diagnostic>),
    #[error("descriptor list does not match the directive sites of the tree: {0}")]
    DescriptorMismatch(String),
}

/// Rewrites every directive loop of `tree` according to `mode`.
/// `descriptors` must be the output of `extract_descriptors(tree)`.
pub fn transform(
    tree: &SyntaxTree,
    descriptors: &[LoopDescriptor],
    mode: GenerationMode,
) -> Result<SyntaxTree, TransformError> {
    let errors: Vec<Diagnostic> = validate(tree)
        .into_iter()
        .filter(|d| d.is_error())
        .collect();
    if !errors.is_empty() {
        return Err(TransformError::Invalid(errors));
    }
    let sites = scan_sites(tree);
    if sites.len() != descriptors.len() {
        return Err(TransformError::DescriptorMismatch(format!(
            "{} sites, {} descriptors",
            sites.len(),
            descriptors.len()
        )));
    }
    for (site, d) in sites.iter().zip(descriptors) {
        if site.loop_id != d.loop_id || site.span != d.span {
            return Err(TransformError::DescriptorMismatch(format!(
                "site {} at {} vs descriptor {} at {}",
                site.loop_id, site.span, d.loop_id, d.span
            )));
        }
    }

    let mut out = tree.clone();
    let mut rw = Rewriter {
        descriptors,
        mode,
        next_id: 0,
    };
    for item in &mut out.items {
        if let Item::Function(Function { body: Some(b), .. }) = item {
            rw.block(b);
        }
    }
    if !descriptors.is_empty() {
        out.items.insert(
            0,
            Item::Preproc {
                text: RUNTIME_INCLUDE.to_string(),
                span: Span::default(),
            },
        );
    }
    Ok(out)
}

/// Arguments of the decision call for a descriptor.
pub fn decide_args(d: &LoopDescriptor) -> Vec<Expr> {
    let bound = match d.comparison {
        Comparison::Lt => d.bound.clone(),
        Comparison::Le => Expr::Binary {
            op: BinOp::Add,
            lhs: Box::new(d.bound.clone().parenthesized()),
            rhs: Box::new(Expr::int(1)),
        },
    };
    vec![
        Expr::int(d.loop_id as i64),
        d.init.clone(),
        bound,
        d.step.clone(),
        d.threshold.clone(),
    ]
}

struct Rewriter<'d> {
    descriptors: &'d [LoopDescriptor],
    mode: GenerationMode,
    next_id: usize,
}

impl Rewriter<'_> {
    fn block(&mut self, b: &mut Block) {
        b.stmts.iter_mut().for_each(|s| self.stmt(s));
    }

    fn stmt(&mut self, s: &mut Stmt) {
        match &mut s.kind {
            StmtKind::Block(b) => self.block(b),
            StmtKind::If { then, els, .. } => {
                self.stmt(then);
                if let Some(e) = els {
                    self.stmt(e);
                }
            }
            StmtKind::While { body, .. } => self.stmt(body),
            StmtKind::For(fl) => match fl.directive.take() {
                None => self.stmt(&mut fl.body),
                Some(dir) => {
                    let id = self.next_id;
                    self.next_id += 1;
                    self.stmt(&mut fl.body);
                    let loop_stmt = Stmt::new(StmtKind::For(fl.clone()), s.span);
                    *s = self.site(id, &dir, loop_stmt);
                }
            },
            StmtKind::Misplaced { stmt, .. } => self.stmt(stmt),
            StmtKind::Decl(_)
            | StmtKind::Expr(_)
            | StmtKind::Empty
            | StmtKind::Return(_)
            | StmtKind::Break
            | StmtKind::Continue
            | StmtKind::Pragma(_) => {}
        }
    }

    fn site(&self, id: usize, dir: &Directive, loop_stmt: Stmt) -> Stmt {
        let span = dir.span;
        let decide = Expr::call(DECIDE, decide_args(&self.descriptors[id]));
        let pragma = |if_expr: Option<&Expr>| {
            Stmt::new(
                StmtKind::Pragma(omp_pragma_text(&dir.data_clauses, if_expr)),
                span,
            )
        };
        let group = |stmts: Vec<Stmt>| Stmt::new(StmtKind::Block(Block { stmts }), span);
        match self.mode {
            GenerationMode::Duplicate => {
                let parallel = group(vec![
                    call_stmt(ENTER, id, span),
                    pragma(None),
                    loop_stmt.clone(),
                    call_stmt(EXIT, id, span),
                ]);
                let serial = group(vec![
                    call_stmt(ENTER, id, span),
                    loop_stmt,
                    call_stmt(EXIT, id, span),
                ]);
                Stmt::new(
                    StmtKind::If {
                        cond: decide,
                        then: Box::new(parallel),
                        els: Some(Box::new(serial)),
                    },
                    span,
                )
            }
            GenerationMode::OmpIf => group(vec![
                call_stmt(ENTER, id, span),
                pragma(Some(&decide)),
                loop_stmt,
                call_stmt(EXIT, id, span),
            ]),
        }
    }
}
