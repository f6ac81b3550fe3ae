//! Project-wide name resolution.
//!
//! Funcons (including types), syntax sorts and semantic functions live in one
//! flat namespace per sort shared by every file. Meta-variables are scoped to
//! the file whose `Meta-variables` block declares them. Aliases are extra
//! funcon-sort keys that map to an existing declaration.

use std::collections::BTreeMap;
use std::fmt;

use crate::model::{
    normalize_path, sanitize_fragment, Diagnostic, DiagnosticCode, FileId, NameOccurrence,
    NameSort, SourceFile, Span,
};
use crate::parser::{occurrences, BlockKind, Document, Term};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DeclId(pub u32);

impl DeclId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeclKind {
    Funcon,
    Type,
    Syntax,
    Semantics,
    MetaVar,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeclInfo {
    pub name: String,
    pub sort: NameSort,
    pub kind: DeclKind,
    pub span: Span,
    /// Declared parameter count, for funcons.
    pub arity: Option<usize>,
    /// Argument sort occurrence, for semantic functions.
    pub arg_sort: Option<Span>,
    /// Head occurrence of the bound, for meta-variables.
    pub bound_head: Option<Span>,
}

impl DeclInfo {
    pub fn file(&self) -> FileId {
        self.span.file
    }
}

/// Declarations of the whole project keyed by sort and name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolIndex {
    decls: BTreeMap<(NameSort, String), DeclId>,
    aliases: BTreeMap<String, (DeclId, Span)>,
    metavars: BTreeMap<(FileId, String), DeclId>,
    info: Vec<DeclInfo>,
}

impl SymbolIndex {
    pub fn is_empty(&self) -> bool {
        self.info.is_empty()
    }

    pub fn len(&self) -> usize {
        self.info.len()
    }

    pub fn info(&self, id: DeclId) -> &DeclInfo {
        &self.info[id.index()]
    }

    pub fn decls(&self) -> impl Iterator<Item = (DeclId, &DeclInfo)> {
        self.info
            .iter()
            .enumerate()
            .map(|(i, info)| (DeclId(i as u32), info))
    }

    /// Looks up a global name, following funcon aliases.
    pub fn lookup(&self, sort: NameSort, name: &str) -> Option<DeclId> {
        if let Some(&id) = self.decls.get(&(sort, name.to_string())) {
            return Some(id);
        }
        match sort {
            NameSort::Funcon => self.aliases.get(name).map(|&(id, _)| id),
            _ => None,
        }
    }

    pub fn lookup_metavar(&self, file: FileId, name: &str) -> Option<DeclId> {
        self.metavars.get(&(file, name.to_string())).copied()
    }

    /// Registered aliases as (alias name, alias declaration span, target).
    pub fn aliases(&self) -> impl Iterator<Item = (&str, Span, DeclId)> {
        self.aliases
            .iter()
            .map(|(name, &(id, span))| (name.as_str(), span, id))
    }

    pub fn aliases_of(&self, id: DeclId) -> Vec<(&str, Span)> {
        self.aliases()
            .filter(|&(_, _, target)| target == id)
            .map(|(name, span, _)| (name, span))
            .collect()
    }

    fn push(&mut self, info: DeclInfo) -> DeclId {
        let id = DeclId(self.info.len() as u32);
        self.info.push(info);
        id
    }
}

enum Candidate<'a> {
    Decl(DeclInfo),
    Alias {
        alias: &'a NameOccurrence,
        target: &'a NameOccurrence,
    },
}

impl Candidate<'_> {
    fn span(&self) -> Span {
        match self {
            Candidate::Decl(info) => info.span,
            Candidate::Alias { alias, .. } => alias.span,
        }
    }
}

fn decl(occ: &NameOccurrence, kind: DeclKind) -> DeclInfo {
    DeclInfo {
        name: occ.name.clone(),
        sort: occ.sort,
        kind,
        span: occ.span,
        arity: None,
        arg_sort: None,
        bound_head: None,
    }
}

fn head_span(t: &Term) -> Option<Span> {
    match t {
        Term::Apply { head, .. } => Some(head.span),
        Term::Var(occ) | Term::Sort(occ) => Some(occ.span),
        Term::SemApply { .. } | Term::Literal { .. } => None,
    }
}

/// Registers every declaration. On a duplicate key the first declaration in
/// (file path, offset) order wins and every later one gets `E002`.
///
/// `files[i]` must have id `i` and `docs[i]` must be its document.
pub fn build_index(files: &[SourceFile], docs: &[Document]) -> (SymbolIndex, Vec<Diagnostic>) {
    let mut candidates = Vec::new();
    for doc in docs {
        for block in &doc.blocks {
            match &block.kind {
                BlockKind::Funcon(f) => {
                    let mut info = decl(&f.name, DeclKind::Funcon);
                    info.arity = Some(f.arity());
                    candidates.push(Candidate::Decl(info));
                }
                BlockKind::Type(t) => {
                    candidates.push(Candidate::Decl(decl(&t.name, DeclKind::Type)))
                }
                BlockKind::Syntax(s) => {
                    candidates.push(Candidate::Decl(decl(&s.name, DeclKind::Syntax)))
                }
                BlockKind::Semantics(s) => {
                    let mut info = decl(&s.name, DeclKind::Semantics);
                    info.arg_sort = Some(s.arg_sort.span);
                    candidates.push(Candidate::Decl(info));
                }
                BlockKind::MetaVars(m) => {
                    for b in &m.bindings {
                        let mut info = decl(&b.var, DeclKind::MetaVar);
                        info.bound_head = head_span(&b.bound.term);
                        candidates.push(Candidate::Decl(info));
                    }
                }
                BlockKind::Alias(a) => candidates.push(Candidate::Alias {
                    alias: &a.alias,
                    target: &a.target,
                }),
                BlockKind::Comment(_) | BlockKind::Rule(_) | BlockKind::Error => {}
            }
        }
    }
    candidates.sort_by(|a, b| {
        let (sa, sb) = (a.span(), b.span());
        files[sa.file.index()]
            .path()
            .cmp(files[sb.file.index()].path())
            .then(sa.start.cmp(&sb.start))
    });

    let mut index = SymbolIndex::default();
    let mut diags = Vec::new();
    let mut winners: BTreeMap<(NameSort, String), Span> = BTreeMap::new();
    let mut local_winners: BTreeMap<(FileId, String), Span> = BTreeMap::new();
    let mut pending_aliases = Vec::new();

    for cand in candidates {
        let (sort, name, span) = match &cand {
            Candidate::Decl(info) => (info.sort, info.name.clone(), info.span),
            Candidate::Alias { alias, .. } => (alias.sort, alias.name.clone(), alias.span),
        };
        let winner = if sort == NameSort::MetaVar {
            local_winners.get(&(span.file, name.clone())).copied()
        } else {
            winners.get(&(sort, name.clone())).copied()
        };
        if let Some(winner) = winner {
            let what = match cand {
                Candidate::Alias { .. } => "alias",
                Candidate::Decl(_) => "declaration",
            };
            diags.push(
                Diagnostic::new(
                    DiagnosticCode::E002,
                    span,
                    format!("duplicate {what} of {sort} `{name}`"),
                )
                .with_related(winner),
            );
            continue;
        }
        if sort == NameSort::MetaVar {
            local_winners.insert((span.file, name.clone()), span);
        } else {
            winners.insert((sort, name.clone()), span);
        }
        match cand {
            Candidate::Decl(info) => {
                let id = index.push(info);
                if sort == NameSort::MetaVar {
                    index.metavars.insert((span.file, name), id);
                } else {
                    index.decls.insert((sort, name), id);
                }
            }
            Candidate::Alias { alias, target } => pending_aliases.push((alias, target)),
        }
    }

    // Alias targets must name a canonical declaration; unresolved targets
    // are reported as ordinary references during resolution.
    for (alias, target) in pending_aliases {
        if let Some(&id) = index.decls.get(&(NameSort::Funcon, target.name.clone())) {
            index.aliases.insert(alias.name.clone(), (id, alias.span));
        }
    }
    (index, diags)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ResolveOptions {
    /// Emit `W001` for funcons that are never referenced.
    pub warn_unused: bool,
}

/// A fully analysed project. Immutable once built.
#[derive(Debug, Clone)]
pub struct ResolvedProject {
    pub files: Vec<SourceFile>,
    pub docs: Vec<Document>,
    pub index: SymbolIndex,
    /// Reference occurrence span → declaration.
    pub resolution: BTreeMap<Span, DeclId>,
    /// Declaration → references, in (file path, offset) order.
    pub back_refs: Vec<Vec<Span>>,
    /// Declaration occurrence span → anchor fragment, for every declaration
    /// that owns an anchor (index winners and registered aliases).
    pub anchors: BTreeMap<Span, String>,
    /// Per file, all occurrences in source order.
    pub occurrences: Vec<Vec<NameOccurrence>>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Resolves every reference against `index` and records the inverse map.
pub fn resolve(
    files: Vec<SourceFile>,
    docs: Vec<Document>,
    index: SymbolIndex,
    options: ResolveOptions,
) -> ResolvedProject {
    let occs: Vec<Vec<NameOccurrence>> = docs
        .iter()
        .map(|d| occurrences(d).into_iter().cloned().collect())
        .collect();
    let mut order: Vec<usize> = (0..files.len()).collect();
    order.sort_by(|&a, &b| files[a].path().cmp(files[b].path()));

    let mut resolution = BTreeMap::new();
    let mut back_refs = vec![Vec::new(); index.len()];
    let mut diagnostics = Vec::new();
    for &fi in &order {
        for occ in occs[fi].iter().filter(|o| o.is_reference()) {
            let target = match occ.sort {
                NameSort::MetaVar => index.lookup_metavar(occ.span.file, &occ.name),
                sort => index.lookup(sort, &occ.name),
            };
            match target {
                Some(id) => {
                    resolution.insert(occ.span, id);
                    back_refs[id.index()].push(occ.span);
                }
                None => diagnostics.push(Diagnostic::new(
                    DiagnosticCode::E001,
                    occ.span,
                    format!("unresolved reference to {} `{}`", occ.sort, occ.name),
                )),
            }
        }
    }

    let mut anchors = BTreeMap::new();
    for (id, info) in index.decls() {
        anchors.insert(info.span, sanitize_fragment(info.sort, &info.name));
        if options.warn_unused && info.kind == DeclKind::Funcon && back_refs[id.index()].is_empty()
        {
            diagnostics.push(Diagnostic::new(
                DiagnosticCode::W001,
                info.span,
                format!("funcon `{}` is never referenced", info.name),
            ));
        }
    }
    for (name, span, _) in index.aliases() {
        anchors.insert(span, sanitize_fragment(NameSort::Funcon, name));
    }

    ResolvedProject {
        files,
        docs,
        index,
        resolution,
        back_refs,
        anchors,
        occurrences: occs,
        diagnostics,
    }
}

/// A position in the project, 1-based.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Location {
    pub path: String,
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.path, self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeclLocation {
    pub location: Location,
    pub sort: NameSort,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lookup {
    NotAName,
    Unresolved { sort: NameSort, name: String },
    Found(DeclLocation),
}

impl ResolvedProject {
    pub fn file(&self, id: FileId) -> &SourceFile {
        &self.files[id.index()]
    }

    pub fn file_by_path(&self, path: &str) -> Option<&SourceFile> {
        let path = normalize_path(path).ok()?;
        self.files.iter().find(|f| f.path() == path)
    }

    pub fn location(&self, span: Span) -> Location {
        let file = self.file(span.file);
        let (line, col) = file
            .line_col_of(span.start)
            .expect("occurrence spans lie on character boundaries");
        Location {
            path: file.path().to_string(),
            line,
            col,
        }
    }

    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(Diagnostic::is_error)
    }

    pub fn occurrence_at(&self, file: FileId, offset: usize) -> Option<&NameOccurrence> {
        let occs = &self.occurrences[file.index()];
        let i = occs.partition_point(|o| o.span.start <= offset);
        occs[..i].last().filter(|o| o.span.contains(offset))
    }

    /// Jump to definition from a 1-based position.
    pub fn lookup_at(&self, path: &str, line: usize, col: usize) -> Result<Lookup, Error> {
        let file = self
            .file_by_path(path)
            .ok_or_else(|| Error::Usage(format!("unknown file `{path}`")))?;
        let Some(offset) = file.offset_of(line, col) else {
            return Ok(Lookup::NotAName);
        };
        let Some(occ) = self.occurrence_at(file.id(), offset) else {
            return Ok(Lookup::NotAName);
        };
        if occ.is_declaration() {
            return Ok(Lookup::Found(DeclLocation {
                location: self.location(occ.span),
                sort: occ.sort,
                name: occ.name.clone(),
            }));
        }
        Ok(match self.resolution.get(&occ.span) {
            Some(&id) => {
                let info = self.index.info(id);
                Lookup::Found(DeclLocation {
                    location: self.location(info.span),
                    sort: info.sort,
                    name: info.name.clone(),
                })
            }
            None => Lookup::Unresolved {
                sort: occ.sort,
                name: occ.name.clone(),
            },
        })
    }

    /// Declarations matching a sort and name. Global sorts yield at most one;
    /// meta-variables yield one per declaring file.
    pub fn find_decls(&self, sort: NameSort, name: &str) -> Vec<DeclId> {
        match sort {
            NameSort::MetaVar => self
                .index
                .decls()
                .filter(|(_, info)| info.sort == NameSort::MetaVar && info.name == name)
                .map(|(id, _)| id)
                .collect(),
            _ => self.index.lookup(sort, name).into_iter().collect(),
        }
    }

    /// Find all references, through aliases, in (path, offset) order.
    pub fn references_of(&self, sort: NameSort, name: &str) -> Vec<Location> {
        let mut spans: Vec<Span> = self
            .find_decls(sort, name)
            .into_iter()
            .flat_map(|id| self.back_refs[id.index()].iter().copied())
            .collect();
        spans.sort_by(|a, b| {
            self.file(a.file)
                .path()
                .cmp(self.file(b.file).path())
                .then(a.start.cmp(&b.start))
        });
        spans.into_iter().map(|s| self.location(s)).collect()
    }

    /// Files containing declarations that references in `file` resolve to,
    /// excluding `file` itself.
    pub fn dependencies_of(&self, file: FileId) -> Vec<FileId> {
        let mut deps: Vec<FileId> = self
            .resolution
            .range(Span::new(file, 0, 0)..Span::new(FileId(file.0 + 1), 0, 0))
            .map(|(_, id)| self.index.info(*id).file())
            .filter(|&f| f != file)
            .collect();
        deps.sort();
        deps.dedup();
        deps
    }
}
