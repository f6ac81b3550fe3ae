//! Helpers shared by the integration tests: a random generator of parseable
//! mini-CBS projects, a brute-force resolution oracle, and output-tree
//! utilities.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use hypertwin::parser::BlockKind;
use hypertwin::resolver::{ResolveOptions, ResolvedProject};
use hypertwin::{analyze, source_files, NameSort, Role, Span};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/corpus")
}

pub fn corpus() -> ResolvedProject {
    analyze(
        hypertwin::site::load(&corpus_dir()).unwrap(),
        ResolveOptions::default(),
    )
}

pub fn project(files: &[(String, String)]) -> ResolvedProject {
    analyze(
        source_files(files.iter().cloned()).unwrap(),
        ResolveOptions::default(),
    )
}

/// Copies the fixture corpus into a fresh directory.
pub fn copy_corpus(to: &Path) {
    copy_tree(&corpus_dir(), to);
}

pub fn copy_tree(from: &Path, to: &Path) {
    for (rel, bytes) in read_tree(from) {
        let path = to.join(rel);
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(path, bytes).unwrap();
    }
}

/// Every file under `root`, keyed by `/`-separated relative path.
pub fn read_tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    walkdir::WalkDir::new(root)
        .into_iter()
        .map(Result::unwrap)
        .filter(|e| e.file_type().is_file())
        .map(|e| {
            let rel = e
                .path()
                .strip_prefix(root)
                .unwrap()
                .to_string_lossy()
                .replace('\\', "/");
            (rel, fs::read(e.path()).unwrap())
        })
        .collect()
}

/// Names of the files whose contents differ between two trees, including
/// files present in only one of them.
pub fn tree_diff(a: &BTreeMap<String, Vec<u8>>, b: &BTreeMap<String, Vec<u8>>) -> Vec<String> {
    let keys: BTreeSet<&String> = a.keys().chain(b.keys()).collect();
    keys.into_iter()
        .filter(|k| a.get(*k) != b.get(*k))
        .cloned()
        .collect()
}

// ---------------------------------------------------------------------------
// Brute-force resolution oracle

#[derive(Debug)]
enum Entry {
    Decl,
    Alias { target: String },
}

/// Resolves every reference occurrence of `project` by scanning declaration
/// occurrences in (path, offset) order, sharing nothing with the resolver
/// beyond the parsed documents. Maps reference span to declaration span.
pub fn oracle(project: &ResolvedProject) -> BTreeMap<Span, Option<Span>> {
    let mut decls: Vec<(String, usize, NameSort, String, Span, Entry)> = Vec::new();
    for (doc, file) in project.docs.iter().zip(&project.files) {
        for block in &doc.blocks {
            if let BlockKind::Alias(a) = &block.kind {
                decls.push((
                    file.path().to_string(),
                    a.alias.span.start,
                    NameSort::Funcon,
                    a.alias.name.clone(),
                    a.alias.span,
                    Entry::Alias {
                        target: a.target.name.clone(),
                    },
                ));
                continue;
            }
            let mut occs = Vec::new();
            hypertwin::parser::block_occurrences(block, &mut occs);
            for o in occs.into_iter().filter(|o| o.role == Role::Declaration) {
                decls.push((
                    file.path().to_string(),
                    o.span.start,
                    o.sort,
                    o.name.clone(),
                    o.span,
                    Entry::Decl,
                ));
            }
        }
    }
    decls.sort_by(|a, b| (&a.0, a.1).cmp(&(&b.0, b.1)));

    let first = |sort: NameSort, name: &str, file: Option<hypertwin::FileId>| {
        decls
            .iter()
            .find(|d| d.2 == sort && d.3 == name && file.is_none_or(|f| d.4.file == f))
    };

    let mut out = BTreeMap::new();
    for occs in &project.occurrences {
        for occ in occs.iter().filter(|o| o.role == Role::Reference) {
            let found = if occ.sort == NameSort::MetaVar {
                first(NameSort::MetaVar, &occ.name, Some(occ.span.file)).map(|d| d.4)
            } else {
                match first(occ.sort, &occ.name, None) {
                    Some((.., span, Entry::Decl)) => Some(*span),
                    Some((.., Entry::Alias { target })) => {
                        match first(NameSort::Funcon, target, None) {
                            Some((.., span, Entry::Decl)) => Some(*span),
                            _ => None,
                        }
                    }
                    None => None,
                }
            };
            out.insert(occ.span, found);
        }
    }
    out
}

/// The resolver's answer in the oracle's shape.
pub fn resolver_answer(project: &ResolvedProject) -> BTreeMap<Span, Option<Span>> {
    project
        .occurrences
        .iter()
        .flatten()
        .filter(|o| o.role == Role::Reference)
        .map(|o| {
            (
                o.span,
                project
                    .resolution
                    .get(&o.span)
                    .map(|&id| project.index.info(id).span),
            )
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Page inspection

/// The source text shown by a PLAIN page: the contents of its `<pre>`
/// blocks with tags removed and entities decoded.
pub fn plain_text(html: &str) -> String {
    const OPEN: &str = "<pre class=\"cbs-plain\">";
    let mut body = String::new();
    let mut rest = html;
    while let Some(i) = rest.find(OPEN) {
        rest = &rest[i + OPEN.len()..];
        let end = rest.find("</pre>").expect("closed <pre>");
        body.push_str(&rest[..end]);
        rest = &rest[end..];
    }
    decode_entities(&strip_tags(&body))
}

pub fn strip_tags(html: &str) -> String {
    let mut out = String::with_capacity(html.len());
    let mut in_tag = false;
    for c in html.chars() {
        match c {
            '<' => in_tag = true,
            '>' if in_tag => in_tag = false,
            _ if !in_tag => out.push(c),
            _ => {}
        }
    }
    out
}

pub fn decode_entities(text: &str) -> String {
    text.replace("&lt;", "<")
        .replace("&gt;", ">")
        .replace("&quot;", "\"")
        .replace("&amp;", "&")
}

/// Math payloads of a PRETTY page, in order.
pub fn md_math_blocks(md: &str) -> Vec<String> {
    let mut blocks = Vec::new();
    let mut current: Option<Vec<&str>> = None;
    for line in md.lines() {
        if line == "$$" {
            match current.take() {
                Some(lines) => blocks.push(lines.join("\n")),
                None => current = Some(Vec::new()),
            }
        } else if let Some(lines) = current.as_mut() {
            lines.push(line);
        }
    }
    blocks
}

/// Math payloads of a LaTeX document, in order.
pub fn tex_math_blocks(tex: &str) -> Vec<String> {
    const OPEN: &str = "\\begin{displaymath}\n";
    const CLOSE: &str = "\n\\end{displaymath}";
    let mut blocks = Vec::new();
    let mut rest = tex;
    while let Some(i) = rest.find(OPEN) {
        rest = &rest[i + OPEN.len()..];
        let end = rest.find(CLOSE).expect("closed displaymath");
        blocks.push(rest[..end].to_string());
        rest = &rest[end..];
    }
    blocks
}

/// Whether `{` and `}` balance, ignoring `\{` and `\}`.
pub fn braces_balance(text: &str) -> bool {
    let mut depth = 0i64;
    let mut chars = text.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => {
                chars.next();
            }
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth < 0 {
                    return false;
                }
            }
            _ => {}
        }
    }
    depth == 0
}

// ---------------------------------------------------------------------------
// Random parseable projects

const FUNCONS: &[&str] = &[
    "values", "alpha", "beta-1", "gamma", "give-it", "x2", "seq", "eval",
];
const SYNTAX: &[&str] = &["Exp", "Stmt", "Id", "Prog2", "U"];
const SEMANTICS: &[&str] = &["eval", "exec-s", "run1"];
const METAVARS: &[&str] = &["X", "Y", "Z'", "V1", "Uu"];
const WORDS: &[&str] = &[
    "the",
    "value",
    "of",
    "a <b>",
    "&amp;",
    "x_y",
    "*",
    "[link](x)",
    "$$",
    "#",
    "50%",
    "{}",
    "\\x",
    "é",
    "→",
    "\"q\"",
    "~",
    "--",
    "<!-- -->",
];

pub struct Gen {
    rng: ChaCha8Rng,
    /// Avoid duplicate declarations across the project.
    unique: bool,
    declared: BTreeSet<(NameSort, String)>,
    file_vars: BTreeSet<String>,
}

impl Gen {
    pub fn new(seed: u64, unique: bool) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            unique,
            declared: BTreeSet::new(),
            file_vars: BTreeSet::new(),
        }
    }

    /// A project of `n` files under a few directories.
    pub fn project(&mut self, n: usize) -> Vec<(String, String)> {
        let mut files = Vec::new();
        for i in 0..n {
            let dir = ["a", "a/b", "c", "d-e/f"].choose(&mut self.rng).unwrap();
            files.push((
                format!("{dir}/F{i}-{}.cbs", self.rng.gen_range(0..100)),
                self.file(),
            ));
        }
        files
    }

    pub fn file(&mut self) -> String {
        self.file_vars.clear();
        let mut out = String::new();
        out.push_str(self.opt_ws());
        for _ in 0..self.rng.gen_range(0..10) {
            self.block(&mut out);
            out.push_str(self.sep_nl());
        }
        if self.rng.gen_bool(0.3) {
            out.truncate(out.trim_end().len());
        }
        out
    }

    fn pick(&mut self, pool: &[&str]) -> String {
        pool.choose(&mut self.rng).unwrap().to_string()
    }

    /// A name to declare, or `None` when all are taken.
    fn fresh(&mut self, sort: NameSort, pool: &[&str]) -> Option<String> {
        if !self.unique {
            return Some(self.pick(pool));
        }
        let free: Vec<&str> = pool
            .iter()
            .copied()
            .filter(|n| {
                if sort == NameSort::MetaVar {
                    !self.file_vars.contains(*n)
                } else {
                    !self.declared.contains(&(sort, n.to_string()))
                }
            })
            .collect();
        let name = free.choose(&mut self.rng)?.to_string();
        if sort == NameSort::MetaVar {
            self.file_vars.insert(name.clone());
        } else {
            self.declared.insert((sort, name.clone()));
        }
        Some(name)
    }

    fn sp(&mut self) -> &'static str {
        [" ", " ", "  ", "\t", "\n  ", "\r\n "]
            .choose(&mut self.rng)
            .unwrap()
    }

    fn opt_ws(&mut self) -> &'static str {
        ["", "", " ", "\n", "\r\n"].choose(&mut self.rng).unwrap()
    }

    fn sep_nl(&mut self) -> &'static str {
        ["\n", "\n\n", "\r\n\r\n", " \n\n\n", "\n \t\n"]
            .choose(&mut self.rng)
            .unwrap()
    }

    fn block(&mut self, out: &mut String) {
        match self.rng.gen_range(0..9) {
            0 | 1 => self.comment(out),
            2 => {
                let Some(name) = self.fresh(NameSort::Funcon, FUNCONS) else {
                    return;
                };
                out.push_str(&format!("Funcon{}{name}", self.sp()));
                let n = self.rng.gen_range(0..3);
                if n > 0 {
                    let params: Vec<String> =
                        (0..n).map(|_| format!("_:{}", self.type_term(1))).collect();
                    out.push_str(&format!("({})", params.join(", ")));
                }
                let ty = self.type_term(1);
                out.push_str(&format!("{}:{}{ty}", self.opt_sp(), self.opt_sp()));
                if self.rng.gen_bool(0.4) {
                    if let Some(alias) = self.fresh(NameSort::Funcon, FUNCONS) {
                        let target = if self.rng.gen_bool(0.8) {
                            name
                        } else {
                            self.pick(FUNCONS)
                        };
                        out.push_str(&format!("\n  Alias {alias} = {target}"));
                    }
                }
            }
            3 => {
                let Some(name) = self.fresh(NameSort::Funcon, FUNCONS) else {
                    return;
                };
                out.push_str(&format!("Type {name}"));
                if self.rng.gen_bool(0.6) {
                    let ty = self.type_term(1);
                    out.push_str(&format!("{}~>{}{ty}", self.sp(), self.sp()));
                }
            }
            4 => {
                let Some(name) = self.fresh(NameSort::Syntax, SYNTAX) else {
                    return;
                };
                out.push_str(&format!("Syntax {name} ::="));
                for i in 0..self.rng.gen_range(1..4) {
                    if i > 0 {
                        out.push_str(&format!("{}|", self.sp()));
                    }
                    for _ in 0..self.rng.gen_range(1..4) {
                        let item = if self.rng.gen_bool(0.5) {
                            self.pick(SYNTAX)
                        } else {
                            self.string_lit()
                        };
                        out.push_str(self.sp());
                        out.push_str(&item);
                    }
                }
            }
            5 => {
                let Some(name) = self.fresh(NameSort::Semantics, SEMANTICS) else {
                    return;
                };
                let sort = self.pick(SYNTAX);
                let ty = self.type_term(1);
                out.push_str(&format!("Semantics {name}[[ _:{sort} ]] : {ty}"));
            }
            6 => {
                let mut bindings = Vec::new();
                for _ in 0..self.rng.gen_range(1..4) {
                    let Some(var) = self.fresh(NameSort::MetaVar, METAVARS) else {
                        break;
                    };
                    // A bound starting with an uppercase name reads as a syntax sort.
                    let bound = match self.type_term(1) {
                        t if self.rng.gen_bool(0.4) || t.starts_with(char::is_uppercase) => {
                            self.pick(SYNTAX)
                        }
                        t => t,
                    };
                    bindings.push(format!("{var} <: {bound}"));
                }
                if bindings.is_empty() {
                    return;
                }
                out.push_str("Meta-variables");
                for b in bindings {
                    out.push_str(self.sp());
                    out.push_str(&b);
                }
            }
            _ => {
                out.push_str("Rule");
                let premises = self.rng.gen_range(0..3);
                for _ in 0..premises {
                    let f = self.formula(true);
                    out.push_str(&format!("\n  {f}"));
                }
                if premises > 0 {
                    out.push_str(&format!("\n  {}", "-".repeat(self.rng.gen_range(4..30))));
                }
                let f = self.formula(false);
                out.push_str(&format!(
                    "{}{f}",
                    if premises > 0 { "\n  " } else { self.sp() }
                ));
            }
        }
    }

    fn opt_sp(&mut self) -> &'static str {
        ["", " ", "\n  "].choose(&mut self.rng).unwrap()
    }

    fn comment(&mut self, out: &mut String) {
        out.push_str("/*");
        for _ in 0..self.rng.gen_range(0..12) {
            let piece = match self.rng.gen_range(0..6) {
                0 => format!("`{}`", self.pick(FUNCONS)),
                1 => format!("`Syntax:{}`", self.pick(SYNTAX)),
                2 => format!("`Semantics:{}`", self.pick(SEMANTICS)),
                3 => ["`not a name`", "``", "`Exp`", "`x y`"]
                    .choose(&mut self.rng)
                    .unwrap()
                    .to_string(),
                4 => ["\n * ", "\n\n", "\r\n", "\n"]
                    .choose(&mut self.rng)
                    .unwrap()
                    .to_string(),
                _ => self.pick(WORDS),
            };
            out.push_str(&piece);
            out.push(' ');
        }
        out.push_str("*/");
    }

    fn string_lit(&mut self) -> String {
        let body = ["", "x", "<=", "a & b", "while", "+", "é"]
            .choose(&mut self.rng)
            .unwrap();
        format!("\"{body}\"")
    }

    fn type_term(&mut self, depth: u32) -> String {
        let arrow = if self.rng.gen_bool(0.3) { "=>" } else { "" };
        format!("{arrow}{}", self.type_body(depth))
    }

    fn type_body(&mut self, depth: u32) -> String {
        match self.rng.gen_range(0..4) {
            0 => self.pick(METAVARS),
            1 if depth > 0 => {
                let args: Vec<String> = (0..self.rng.gen_range(1..3))
                    .map(|_| self.type_body(depth - 1))
                    .collect();
                format!("{}({})", self.pick(FUNCONS), args.join(", "))
            }
            _ => self.pick(FUNCONS),
        }
    }

    fn term(&mut self, depth: u32) -> String {
        match self.rng.gen_range(0..7) {
            0 => self.pick(METAVARS),
            1 => self.string_lit(),
            2 => self.rng.gen_range(0..1000).to_string(),
            3 if depth > 0 => {
                let arg = self.term(depth - 1);
                format!("{}[[ {arg} ]]", self.pick(SEMANTICS))
            }
            4 | 5 if depth > 0 => {
                let args: Vec<String> = (0..self.rng.gen_range(1..4))
                    .map(|_| self.term(depth - 1))
                    .collect();
                let sep = if self.rng.gen_bool(0.2) {
                    ",\n    "
                } else {
                    ", "
                };
                format!("{}({})", self.pick(FUNCONS), args.join(sep))
            }
            _ => self.pick(FUNCONS),
        }
    }

    fn formula(&mut self, premise: bool) -> String {
        let lhs = self.term(2);
        let rhs = self.term(2);
        match self.rng.gen_range(0..5) {
            0 => format!("{lhs} ---> {rhs}"),
            1 => {
                let label = self.term(1);
                format!("{lhs} --{label}-> {rhs}")
            }
            2 => format!("{lhs} = {rhs}"),
            3 => format!("{lhs} ~> {rhs}"),
            _ if premise => lhs,
            _ => format!("{lhs} = {rhs}"),
        }
    }
}
