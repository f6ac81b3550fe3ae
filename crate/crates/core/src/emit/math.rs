//! Formal blocks as LaTeX math, shared by PRETTY and PDF.
//!
//! The payload uses six private macros: `\fn`, `\syn`, `\sem`, `\mv` for the
//! four name sorts, `\anch{fragment}{body}` for declarations and
//! `\lnk{url}{body}` for resolved references. Link URLs are relative to the
//! PRETTY page of the block's file.
//!
//! The payload is a single-column array. A new row starts wherever the source
//! moves to a new line, and after each `|` of a syntax declaration.

use super::{link_url, name_role, Format, NameRole};
use crate::model::{FileId, NameOccurrence, NameSort, SourceFile, Span};
use crate::parser::{
    AliasDecl, Block, BlockKind, Formula, FunconDecl, LiteralKind, MetaVarsDecl, ProdItem,
    RuleDecl, SemanticsDecl, SyntaxDecl, Term, TypeDecl, TypeTerm,
};
use crate::resolver::ResolvedProject;

/// A `\lnk` used in a payload.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LinkUse {
    pub url: String,
    pub target: FileId,
    pub fragment: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MathBlock {
    pub payload: String,
    pub links: Vec<LinkUse>,
}

/// Renders a formal block; `None` for comments and skipped text.
pub fn render_block(project: &ResolvedProject, block: &Block) -> Option<MathBlock> {
    if !block.is_formal() {
        return None;
    }
    let file = project.file(block.span.file);
    let mut links = Vec::new();
    let mut w = Writer::new(project, file, &mut links);
    if let Some(kw) = block.keyword {
        w.token(kw, &format!("\\textbf{{{}}}~", file.slice(kw)));
        // The keyword shares a row with whatever follows it.
        w.fresh = true;
    }
    match &block.kind {
        BlockKind::Funcon(d) => w.funcon(d),
        BlockKind::Alias(d) => w.alias(d),
        BlockKind::Type(d) => w.type_decl(d),
        BlockKind::Syntax(d) => w.syntax(d),
        BlockKind::Semantics(d) => w.semantics(d),
        BlockKind::Rule(d) => w.rule(d),
        BlockKind::MetaVars(d) => w.metavars(d),
        BlockKind::Comment(_) | BlockKind::Error => unreachable!("not a formal block"),
    }
    let rows = w.finish();
    Some(MathBlock {
        payload: array("l", &rows),
        links,
    })
}

fn array(columns: &str, rows: &[String]) -> String {
    format!(
        "\\begin{{array}}{{{columns}}}\n{}\n\\end{{array}}",
        rows.join(" \\\\\n")
    )
}

pub fn sort_macro(sort: NameSort) -> &'static str {
    match sort {
        NameSort::Funcon => "\\fn",
        NameSort::Syntax => "\\syn",
        NameSort::Semantics => "\\sem",
        NameSort::MetaVar => "\\mv",
    }
}

/// Escapes text for `\texttt{…}` (valid in both KaTeX and LaTeX).
pub fn escape_tt(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '\\' => out.push_str("\\textbackslash{}"),
            '{' | '}' | '$' | '&' | '#' | '_' | '%' => {
                out.push('\\');
                out.push(c);
            }
            '^' => out.push_str("\\textasciicircum{}"),
            '~' => out.push_str("\\textasciitilde{}"),
            _ => out.push(c),
        }
    }
    out
}

struct Writer<'a> {
    project: &'a ResolvedProject,
    file: &'a SourceFile,
    links: &'a mut Vec<LinkUse>,
    rows: Vec<String>,
    row: String,
    /// Source line where the last emitted token ended.
    line: Option<usize>,
    /// Nesting depth of groups that must stay on one row.
    no_break: usize,
    /// No token has been emitted since the last row break.
    fresh: bool,
}

impl<'a> Writer<'a> {
    fn new(
        project: &'a ResolvedProject,
        file: &'a SourceFile,
        links: &'a mut Vec<LinkUse>,
    ) -> Self {
        Writer {
            project,
            file,
            links,
            rows: Vec::new(),
            row: String::new(),
            line: None,
            no_break: 0,
            fresh: true,
        }
    }

    fn line_of(&self, offset: usize) -> usize {
        self.file.line_starts().partition_point(|&s| s <= offset)
    }

    fn token(&mut self, span: Span, latex: &str) {
        let line = self.line_of(span.start);
        if !self.fresh && self.line.is_some_and(|prev| line > prev) && self.no_break == 0 {
            self.break_row();
        }
        self.fresh = false;
        self.row.push_str(latex);
        self.line = Some(self.line_of(span.end.max(span.start + 1) - 1));
    }

    fn raw(&mut self, latex: &str) {
        self.row.push_str(latex);
    }

    fn break_row(&mut self) {
        if !self.row.trim().is_empty() {
            let row = std::mem::take(&mut self.row);
            self.rows.push(row.trim().to_string());
        }
        self.row.clear();
        self.fresh = true;
    }

    fn finish(mut self) -> Vec<String> {
        self.break_row();
        if self.rows.is_empty() {
            self.rows.push(String::new());
        }
        self.rows
    }

    fn name(&mut self, occ: &NameOccurrence) {
        let inner = format!("{}{{{}}}", sort_macro(occ.sort), occ.name);
        let latex = match name_role(self.project, occ) {
            NameRole::Anchor { fragment } => format!("\\anch{{{fragment}}}{{{inner}}}"),
            NameRole::Link { file, fragment, .. } => {
                let url = link_url(self.project, occ.span.file, Format::Pretty, file, &fragment);
                let latex = format!("\\lnk{{{url}}}{{{inner}}}");
                self.links.push(LinkUse {
                    url,
                    target: file,
                    fragment,
                });
                latex
            }
            NameRole::Unresolved | NameRole::Shadowed => inner,
        };
        self.token(occ.span, &latex);
    }

    fn term(&mut self, t: &Term) {
        match t {
            Term::Apply { head, args, .. } => {
                self.name(head);
                if !args.is_empty() {
                    self.raw("(");
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            self.raw(", ");
                        }
                        self.term(a);
                    }
                    self.raw(")");
                }
            }
            Term::Var(occ) | Term::Sort(occ) => self.name(occ),
            Term::SemApply { fun, arg, .. } => {
                self.name(fun);
                self.raw("\\llbracket ");
                self.term(arg);
                self.raw(" \\rrbracket");
            }
            Term::Literal { kind, span } => {
                let text = self.file.slice(*span);
                let latex = match kind {
                    LiteralKind::Str => format!("\\texttt{{{}}}", escape_tt(text)),
                    LiteralKind::Int => text.to_string(),
                };
                self.token(*span, &latex);
            }
        }
    }

    fn type_term(&mut self, t: &TypeTerm) {
        if t.computes {
            self.token(t.span, "{\\Rightarrow}");
        }
        self.term(&t.term);
    }

    fn funcon(&mut self, d: &FunconDecl) {
        self.name(&d.name);
        if !d.params.is_empty() {
            self.raw("(");
            for (i, p) in d.params.iter().enumerate() {
                if i > 0 {
                    self.raw(", ");
                }
                self.token(p.span, "\\_ {:} ");
                self.type_term(p);
            }
            self.raw(")");
        }
        self.raw(" : ");
        self.type_term(&d.result);
    }

    fn alias(&mut self, d: &AliasDecl) {
        self.name(&d.alias);
        self.raw(" = ");
        self.name(&d.target);
    }

    fn type_decl(&mut self, d: &TypeDecl) {
        self.name(&d.name);
        if let Some(def) = &d.definition {
            self.raw(" \\leadsto ");
            self.type_term(def);
        }
    }

    fn syntax(&mut self, d: &SyntaxDecl) {
        self.name(&d.name);
        self.raw(" ::= ");
        for (i, alt) in d.alternatives.iter().enumerate() {
            if i > 0 {
                self.raw(" \\mid");
                self.break_row();
                self.raw("\\quad ");
            }
            for (j, item) in alt.items.iter().enumerate() {
                if j > 0 {
                    self.raw("~");
                }
                match item {
                    ProdItem::Sort(occ) => self.name(occ),
                    ProdItem::Terminal(span) => {
                        let latex = format!("\\texttt{{{}}}", escape_tt(self.file.slice(*span)));
                        self.token(*span, &latex);
                    }
                }
            }
        }
    }

    fn semantics(&mut self, d: &SemanticsDecl) {
        self.name(&d.name);
        self.raw("\\llbracket \\_ : ");
        self.name(&d.arg_sort);
        self.raw(" \\rrbracket : ");
        self.type_term(&d.result);
    }

    fn metavars(&mut self, d: &MetaVarsDecl) {
        for (i, b) in d.bindings.iter().enumerate() {
            if i > 0 && self.line == Some(self.line_of(b.var.span.start)) {
                self.raw("\\quad ");
            }
            self.name(&b.var);
            self.raw(" <: ");
            self.type_term(&b.bound);
        }
    }

    fn formula(&mut self, f: &Formula) {
        match f {
            Formula::Transition { lhs, label, rhs } => {
                self.term(lhs);
                match label {
                    Some(label) => {
                        self.raw(" \\xrightarrow{");
                        self.no_break += 1;
                        self.term(label);
                        self.no_break -= 1;
                        self.raw("} ");
                    }
                    None => self.raw(" \\longrightarrow "),
                }
                self.term(rhs);
            }
            Formula::Equation { lhs, rhs } => {
                self.term(lhs);
                self.raw(" = ");
                self.term(rhs);
            }
            Formula::Rewrite { lhs, rhs } => {
                self.term(lhs);
                self.raw(" \\leadsto ");
                self.term(rhs);
            }
            Formula::Bare(t) => self.term(t),
        }
    }

    /// Renders formulas on their own rows, `\quad`-separated within a row.
    fn stack(&mut self, formulas: &[&Formula]) -> String {
        let mut sub = Writer::new(self.project, self.file, self.links);
        for (i, f) in formulas.iter().enumerate() {
            if i > 0 {
                if sub.line == Some(sub.line_of(f.span().start)) {
                    sub.raw(" \\quad ");
                } else {
                    sub.break_row();
                }
            }
            sub.formula(f);
        }
        let rows = sub.finish();
        if rows.len() == 1 {
            rows.into_iter().next().unwrap()
        } else {
            array("c", &rows)
        }
    }

    fn rule(&mut self, d: &RuleDecl) {
        if d.premises.is_empty() {
            self.formula(&d.conclusion);
            return;
        }
        let premises: Vec<&Formula> = d.premises.iter().collect();
        let top = self.stack(&premises);
        let bottom = self.stack(&[&d.conclusion]);
        let start = d.premises[0].span();
        self.token(start, &format!("\\dfrac{{{top}}}{{{bottom}}}"));
        self.line = Some(self.line_of(d.conclusion.span().end.saturating_sub(1)));
    }
}
