use crate::model::{FileId, NameOccurrence, Span};

/// A parsed source file: blocks in source order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub file: FileId,
    pub blocks: Vec<Block>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub span: Span,
    /// Span of the leading keyword, for declaration blocks.
    pub keyword: Option<Span>,
    pub kind: BlockKind,
}

impl Block {
    pub fn is_formal(&self) -> bool {
        !matches!(self.kind, BlockKind::Comment(_) | BlockKind::Error)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlockKind {
    Comment(Comment),
    Funcon(FunconDecl),
    Alias(AliasDecl),
    Type(TypeDecl),
    Syntax(SyntaxDecl),
    Semantics(SemanticsDecl),
    Rule(RuleDecl),
    MetaVars(MetaVarsDecl),
    /// Text skipped during error recovery.
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comment {
    /// Text between `/*` and `*/`.
    pub body: Span,
    pub segments: Vec<Segment>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Segment {
    Text(Span),
    /// A back-ticked name; `span` covers the back-ticks and any sort prefix.
    EmbeddedRef {
        span: Span,
        name: NameOccurrence,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunconDecl {
    pub name: NameOccurrence,
    pub params: Vec<TypeTerm>,
    pub result: TypeTerm,
    /// Names introduced by `Alias` blocks that follow this declaration.
    pub aliases: Vec<String>,
}

impl FunconDecl {
    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AliasDecl {
    pub alias: NameOccurrence,
    pub target: NameOccurrence,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDecl {
    pub name: NameOccurrence,
    pub definition: Option<TypeTerm>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxDecl {
    pub name: NameOccurrence,
    pub alternatives: Vec<Production>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Production {
    pub items: Vec<ProdItem>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProdItem {
    Sort(NameOccurrence),
    /// A quoted terminal, span includes the quotes.
    Terminal(Span),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticsDecl {
    pub name: NameOccurrence,
    pub arg_sort: NameOccurrence,
    pub result: TypeTerm,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleDecl {
    pub premises: Vec<Formula>,
    /// The dash line separating premises from the conclusion.
    pub dashes: Option<Span>,
    pub conclusion: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetaVarsDecl {
    pub bindings: Vec<MetaVarBinding>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetaVarBinding {
    pub var: NameOccurrence,
    pub bound: TypeTerm,
}

/// A type annotation: a term optionally marked `=>` as a computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeTerm {
    pub computes: bool,
    pub term: Term,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LiteralKind {
    Str,
    Int,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Apply {
        head: NameOccurrence,
        args: Vec<Term>,
        span: Span,
    },
    Var(NameOccurrence),
    SemApply {
        fun: NameOccurrence,
        arg: Box<Term>,
        span: Span,
    },
    Literal {
        kind: LiteralKind,
        span: Span,
    },
    /// A syntax sort in a type position (the bound of a meta-variable).
    Sort(NameOccurrence),
}

impl Term {
    pub fn span(&self) -> Span {
        match self {
            Term::Apply { span, .. } | Term::SemApply { span, .. } | Term::Literal { span, .. } => {
                *span
            }
            Term::Var(occ) | Term::Sort(occ) => occ.span,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    /// `lhs --label-> rhs`, or `lhs ---> rhs` without a label.
    Transition {
        lhs: Term,
        label: Option<Term>,
        rhs: Term,
    },
    Equation {
        lhs: Term,
        rhs: Term,
    },
    Rewrite {
        lhs: Term,
        rhs: Term,
    },
    Bare(Term),
}

impl Formula {
    pub fn span(&self) -> Span {
        match self {
            Formula::Transition { lhs, rhs, .. }
            | Formula::Equation { lhs, rhs }
            | Formula::Rewrite { lhs, rhs } => lhs.span().to(rhs.span()),
            Formula::Bare(t) => t.span(),
        }
    }
}

/// All name occurrences of a document in source order.
pub fn occurrences(doc: &Document) -> Vec<&NameOccurrence> {
    let mut out = Vec::new();
    for block in &doc.blocks {
        block_occurrences(block, &mut out);
    }
    out.sort_by_key(|occ| occ.span.start);
    out
}

pub fn block_occurrences<'a>(block: &'a Block, out: &mut Vec<&'a NameOccurrence>) {
    match &block.kind {
        BlockKind::Comment(c) => {
            for seg in &c.segments {
                if let Segment::EmbeddedRef { name, .. } = seg {
                    out.push(name);
                }
            }
        }
        BlockKind::Funcon(f) => {
            out.push(&f.name);
            for p in &f.params {
                term_occurrences(&p.term, out);
            }
            term_occurrences(&f.result.term, out);
        }
        BlockKind::Alias(a) => {
            out.push(&a.alias);
            out.push(&a.target);
        }
        BlockKind::Type(t) => {
            out.push(&t.name);
            if let Some(def) = &t.definition {
                term_occurrences(&def.term, out);
            }
        }
        BlockKind::Syntax(s) => {
            out.push(&s.name);
            for alt in &s.alternatives {
                for item in &alt.items {
                    if let ProdItem::Sort(occ) = item {
                        out.push(occ);
                    }
                }
            }
        }
        BlockKind::Semantics(s) => {
            out.push(&s.name);
            out.push(&s.arg_sort);
            term_occurrences(&s.result.term, out);
        }
        BlockKind::Rule(r) => {
            for f in r.premises.iter().chain(std::iter::once(&r.conclusion)) {
                formula_occurrences(f, out);
            }
        }
        BlockKind::MetaVars(m) => {
            for b in &m.bindings {
                out.push(&b.var);
                term_occurrences(&b.bound.term, out);
            }
        }
        BlockKind::Error => {}
    }
}

pub fn formula_occurrences<'a>(f: &'a Formula, out: &mut Vec<&'a NameOccurrence>) {
    match f {
        Formula::Transition { lhs, label, rhs } => {
            term_occurrences(lhs, out);
            if let Some(l) = label {
                term_occurrences(l, out);
            }
            term_occurrences(rhs, out);
        }
        Formula::Equation { lhs, rhs } | Formula::Rewrite { lhs, rhs } => {
            term_occurrences(lhs, out);
            term_occurrences(rhs, out);
        }
        Formula::Bare(t) => term_occurrences(t, out),
    }
}

pub fn term_occurrences<'a>(t: &'a Term, out: &mut Vec<&'a NameOccurrence>) {
    match t {
        Term::Apply { head, args, .. } => {
            out.push(head);
            for a in args {
                term_occurrences(a, out);
            }
        }
        Term::Var(occ) | Term::Sort(occ) => out.push(occ),
        Term::SemApply { fun, arg, .. } => {
            out.push(fun);
            term_occurrences(arg, out);
        }
        Term::Literal { .. } => {}
    }
}

/// Calls `f` on every term of a document, outermost first.
pub fn visit_terms<'a>(doc: &'a Document, f: &mut dyn FnMut(&'a Term)) {
    fn walk<'a>(t: &'a Term, f: &mut dyn FnMut(&'a Term)) {
        f(t);
        match t {
            Term::Apply { args, .. } => args.iter().for_each(|a| walk(a, f)),
            Term::SemApply { arg, .. } => walk(arg, f),
            _ => {}
        }
    }
    fn walk_formula<'a>(fm: &'a Formula, f: &mut dyn FnMut(&'a Term)) {
        match fm {
            Formula::Transition { lhs, label, rhs } => {
                walk(lhs, f);
                if let Some(l) = label {
                    walk(l, f);
                }
                walk(rhs, f);
            }
            Formula::Equation { lhs, rhs } | Formula::Rewrite { lhs, rhs } => {
                walk(lhs, f);
                walk(rhs, f);
            }
            Formula::Bare(t) => walk(t, f),
        }
    }
    for block in &doc.blocks {
        match &block.kind {
            BlockKind::Funcon(d) => {
                d.params.iter().for_each(|p| walk(&p.term, f));
                walk(&d.result.term, f);
            }
            BlockKind::Type(d) => {
                if let Some(def) = &d.definition {
                    walk(&def.term, f);
                }
            }
            BlockKind::Semantics(d) => walk(&d.result.term, f),
            BlockKind::Rule(r) => {
                r.premises.iter().for_each(|p| walk_formula(p, f));
                walk_formula(&r.conclusion, f);
            }
            BlockKind::MetaVars(m) => m.bindings.iter().for_each(|b| walk(&b.bound.term, f)),
            BlockKind::Comment(_)
            | BlockKind::Alias(_)
            | BlockKind::Syntax(_)
            | BlockKind::Error => {}
        }
    }
}
