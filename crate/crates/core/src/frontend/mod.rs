//! Parsing of C sources annotated with `#pragma preomp parallel for`.
//!
//! The accepted language is a small C subset: function definitions and
//! prototypes over scalar types, 1-D/2-D arrays, `for`/`while`/`if`/block and
//! expression statements, and calls to opaque functions. Preprocessor lines
//! other than preomp directives pass through untouched.
//!
//! ```text
//! #pragma preomp parallel for [private(id,...)] [shared(id,...)] [parallel_threshold(expr)]
//! for (i = init; i < bound; i++ | i += step) ...
//! ```

pub mod ast;
pub mod descriptor;
pub mod lexer;
pub mod parser;
pub mod validate;

use thiserror::Error;

pub use ast::{Directive, Span, SyntaxTree};
pub use descriptor::{extract_descriptors, trip_count, Comparison, LoopDescriptor};
pub use validate::{validate, Diagnostic, Severity};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrontendError {
    #[error("{span}: {message}")]
    Lex { span: Span, message: String },
    #[error("{span}: syntax error: expected {expected}, found {found}")]
    Syntax {
        span: Span,
        expected: String,
        found: String,
    },
    #[error("{span}: preomp directive must immediately precede a for statement")]
    DirectiveNotOnFor { span: Span },
    #[error("{span}: unknown clause `{name}`")]
    UnknownClause { span: Span, name: String },
    #[error("{span}: {message}")]
    Directive { span: Span, message: String },
    #[error("{span}: unsupported loop form for loop {loop_id}: {reason}")]
    LoopForm {
        span: Span,
        loop_id: usize,
        reason: String,
    },
}

impl FrontendError {
    pub fn span(&self) -> Span {
        match self {
            FrontendError::Lex { span, .. }
            | FrontendError::Syntax { span, .. }
            | FrontendError::DirectiveNotOnFor { span }
            | FrontendError::UnknownClause { span, .. }
            | FrontendError::Directive { span, .. }
            | FrontendError::LoopForm { span, .. } => *span,
        }
    }

    /// The error text without the leading position.
    pub fn message(&self) -> String {
        let full = self.to_string();
        let prefix = format!("{}: ", self.span());
        full.strip_prefix(&prefix).unwrap_or(&full).to_string()
    }
}

/// Parses a translation unit. A preomp directive that is not followed by a
/// `for` statement is an error.
pub fn parse_unit(source: &str) -> Result<SyntaxTree, FrontendError> {
    parser::parse(source, false)
}

/// Like [`parse_unit`], but keeps directives on non-`for` statements as
/// [`ast::StmtKind::Misplaced`] nodes so that [`validate`] can report them
/// alongside other diagnostics.
pub fn parse_unit_lenient(source: &str) -> Result<SyntaxTree, FrontendError> {
    parser::parse(source, true)
}

/// Parses leniently and validates, folding parse failures into diagnostics.
pub fn check_source(source: &str) -> (Option<SyntaxTree>, Vec<Diagnostic>) {
    match parse_unit_lenient(source) {
        Ok(tree) => {
            let diags = validate(&tree);
            (Some(tree), diags)
        }
        Err(e) => (
            None,
            vec![Diagnostic {
                severity: Severity::Error,
                span: e.span(),
                loop_id: None,
                message: e.message(),
            }],
        ),
    }
}

/// Number of `#pragma preomp` lines in the tree.
pub fn directive_count(tree: &SyntaxTree) -> usize {
    descriptor::scan_sites(tree).len()
}
