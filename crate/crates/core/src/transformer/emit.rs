//! Deterministic C printer and the per-site manifest.

use std::fmt::Write as _;

use crate::frontend::ast::*;
use crate::frontend::descriptor::scan_sites;

use super::sites::{classify, SiteShape};
use super::GenerationMode;

/// One directive site in emitted output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub loop_id: usize,
    pub nest_id: usize,
    pub depth: usize,
    pub span: Span,
    /// `None` for a site still carrying its preomp directive.
    pub mode: Option<GenerationMode>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmittedUnit {
    pub text: String,
    pub manifest: Vec<ManifestEntry>,
}

pub const MANIFEST_HEADER: &str = "loop_id,nest_id,depth,line,column,mode";

impl EmittedUnit {
    /// Manifest as CSV with a header line.
    pub fn manifest_text(&self) -> String {
        let mut s = String::from(MANIFEST_HEADER);
        s.push('\n');
        for e in &self.manifest {
            let mode = e.mode.map_or("none", |m| m.as_str());
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                e.loop_id, e.nest_id, e.depth, e.span.line, e.span.column, mode
            );
        }
        s
    }
}

/// Prints `tree` as C source and lists its directive sites.
pub fn emit_c(tree: &SyntaxTree) -> EmittedUnit {
    let mut p = Printer::default();
    p.unit(tree);
    EmittedUnit {
        text: p.out,
        manifest: manifest(tree),
    }
}

fn manifest(tree: &SyntaxTree) -> Vec<ManifestEntry> {
    let mut out: Vec<ManifestEntry> = scan_sites(tree)
        .iter()
        .map(|s| ManifestEntry {
            loop_id: s.loop_id,
            nest_id: s.nest_id,
            depth: s.depth,
            span: s.span,
            mode: None,
        })
        .collect();
    let mut generated = Vec::new();
    let mut next_nest = 0;
    for f in tree.functions() {
        let body = f.body.as_ref().unwrap();
        collect_generated(&body.stmts, 0, None, &mut next_nest, &mut generated);
    }
    for g in generated {
        if !out.iter().any(|e| e.loop_id == g.loop_id) {
            out.push(g);
        }
    }
    out.sort_by_key(|e| e.loop_id);
    out
}

fn collect_generated(
    stmts: &[Stmt],
    depth: usize,
    nest: Option<usize>,
    next_nest: &mut usize,
    out: &mut Vec<ManifestEntry>,
) {
    for s in stmts {
        collect_stmt(s, depth, nest, next_nest, out);
    }
}

fn collect_stmt(
    s: &Stmt,
    depth: usize,
    nest: Option<usize>,
    next_nest: &mut usize,
    out: &mut Vec<ManifestEntry>,
) {
    if let Some(shape) = classify(s) {
        let nest_id = nest.unwrap_or_else(|| {
            *next_nest += 1;
            *next_nest - 1
        });
        out.push(ManifestEntry {
            loop_id: shape.loop_id(),
            nest_id,
            depth,
            span: s.span,
            mode: Some(shape.mode()),
        });
        match shape {
            SiteShape::Duplicate {
                parallel, serial, ..
            } => {
                collect_stmt(&parallel.body, depth + 1, Some(nest_id), next_nest, out);
                collect_stmt(&serial.body, depth + 1, Some(nest_id), next_nest, out);
            }
            SiteShape::OmpIf { for_loop, .. } => {
                collect_stmt(&for_loop.body, depth + 1, Some(nest_id), next_nest, out)
            }
        }
        return;
    }
    match &s.kind {
        StmtKind::Block(b) => collect_generated(&b.stmts, depth, nest, next_nest, out),
        StmtKind::If { then, els, .. } => {
            collect_stmt(then, depth, nest, next_nest, out);
            if let Some(e) = els {
                collect_stmt(e, depth, nest, next_nest, out);
            }
        }
        StmtKind::For(fl) => collect_stmt(&fl.body, depth, nest, next_nest, out),
        StmtKind::While { body, .. } => collect_stmt(body, depth, nest, next_nest, out),
        _ => {}
    }
}

const INDENT: &str = "    ";

#[derive(Default)]
struct Printer {
    out: String,
    indent: usize,
}

#[derive(PartialEq)]
enum ItemClass {
    Preproc,
    Decl,
    Definition,
}

fn dims(d: &[Option<Expr>]) -> String {
    d.iter()
        .map(|x| match x {
            Some(e) => format!("[{e}]"),
            None => "[]".to_string(),
        })
        .collect()
}

fn declaration(d: &Declaration) -> String {
    let parts: Vec<String> = d
        .declarators
        .iter()
        .map(|x| {
            let mut s = format!("{}{}", x.name, dims(&x.dims));
            if let Some(init) = &x.init {
                let _ = write!(s, " = {init}");
            }
            s
        })
        .collect();
    format!("{} {}", d.ty, parts.join(", "))
}

impl Printer {
    fn pad(&mut self) {
        for _ in 0..self.indent {
            self.out.push_str(INDENT);
        }
    }

    fn line(&mut self, text: &str) {
        self.pad();
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn unit(&mut self, tree: &SyntaxTree) {
        let mut prev: Option<ItemClass> = None;
        for item in &tree.items {
            let class = match item {
                Item::Preproc { .. } => ItemClass::Preproc,
                Item::Declaration(_) => ItemClass::Decl,
                Item::Function(f) if f.body.is_none() => ItemClass::Decl,
                Item::Function(_) => ItemClass::Definition,
            };
            if let Some(p) = &prev {
                if *p != class || class == ItemClass::Definition {
                    self.out.push('\n');
                }
            }
            match item {
                Item::Preproc { text, .. } => self.line(&format!("#{text}")),
                Item::Declaration(d) => self.line(&format!("{};", declaration(d))),
                Item::Function(f) => self.function(f),
            }
            prev = Some(class);
        }
    }

    fn function(&mut self, f: &Function) {
        let params = match &f.params {
            Params::Empty => String::new(),
            Params::Void => "void".to_string(),
            Params::List(ps) => ps
                .iter()
                .map(|p| {
                    let mut s = p.ty.to_string();
                    if let Some(n) = &p.name {
                        s.push(' ');
                        s.push_str(n);
                    }
                    s.push_str(&dims(&p.dims));
                    s
                })
                .collect::<Vec<_>>()
                .join(", "),
        };
        let sig = format!("{} {}({params})", f.ret, f.name);
        match &f.body {
            None => self.line(&format!("{sig};")),
            Some(b) => {
                self.pad();
                self.out.push_str(&sig);
                self.block_tail(b);
                self.out.push('\n');
            }
        }
    }

    /// Writes ` {`, the statements, and a closing `}` without newline.
    fn block_tail(&mut self, b: &Block) {
        self.out.push_str(" {\n");
        self.indent += 1;
        for s in &b.stmts {
            self.stmt(s);
        }
        self.indent -= 1;
        self.pad();
        self.out.push('}');
    }

    /// Writes the body of a compound statement after its header. Returns
    /// true when the output ends in an unterminated `}`.
    fn body(&mut self, s: &Stmt) -> bool {
        match &s.kind {
            StmtKind::Block(b) => {
                self.block_tail(b);
                true
            }
            _ => {
                self.out.push('\n');
                self.indent += 1;
                self.stmt(s);
                self.indent -= 1;
                false
            }
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::Decl(d) => self.line(&format!("{};", declaration(d))),
            StmtKind::Expr(e) => self.line(&format!("{e};")),
            StmtKind::Empty => self.line(";"),
            StmtKind::Block(b) => {
                self.pad();
                self.out.push('{');
                self.out.push('\n');
                self.indent += 1;
                for s in &b.stmts {
                    self.stmt(s);
                }
                self.indent -= 1;
                self.line("}");
            }
            StmtKind::If { .. } => {
                self.pad();
                self.if_chain(s);
            }
            StmtKind::For(fl) => {
                if let Some(d) = &fl.directive {
                    self.line(&format!("#{}", d.text));
                }
                self.pad();
                let init = match &fl.init {
                    ForInit::Empty => String::new(),
                    ForInit::Decl(d) => declaration(d),
                    ForInit::Expr(e) => e.to_string(),
                };
                let cond = fl
                    .cond
                    .as_ref()
                    .map(|e| format!(" {e}"))
                    .unwrap_or_default();
                let step = fl
                    .step
                    .as_ref()
                    .map(|e| format!(" {e}"))
                    .unwrap_or_default();
                let _ = write!(self.out, "for ({init};{cond};{step})");
                if self.body(&fl.body) {
                    self.out.push('\n');
                }
            }
            StmtKind::While { cond, body } => {
                self.pad();
                let _ = write!(self.out, "while ({cond})");
                if self.body(body) {
                    self.out.push('\n');
                }
            }
            StmtKind::Return(None) => self.line("return;"),
            StmtKind::Return(Some(e)) => self.line(&format!("return {e};")),
            StmtKind::Break => self.line("break;"),
            StmtKind::Continue => self.line("continue;"),
            StmtKind::Pragma(text) => self.line(&format!("#{text}")),
            StmtKind::Misplaced { directive, stmt } => {
                self.line(&format!("#{}", directive.text));
                self.stmt(stmt);
            }
        }
    }

    /// Prints an `if` (already indented) including any `else if` chain.
    fn if_chain(&mut self, s: &Stmt) {
        let StmtKind::If { cond, then, els } = &s.kind else {
            unreachable!()
        };
        let _ = write!(self.out, "if ({cond})");
        let open = self.body(then);
        match els {
            None => {
                if open {
                    self.out.push('\n');
                }
            }
            Some(e) => {
                if open {
                    self.out.push_str(" else");
                } else {
                    self.pad();
                    self.out.push_str("else");
                }
                if matches!(e.kind, StmtKind::If { .. }) {
                    self.out.push(' ');
                    self.if_chain(e);
                } else if self.body(e) {
                    self.out.push('\n');
                }
            }
        }
    }
}
