//! Parses repositories of mini-CBS specifications, resolves names across
//! files, and generates hyperlinked twins of every source file: a verbatim
//! hypertext page (PLAIN), a Markdown page with math-typeset formal blocks
//! (PRETTY), and a standalone LaTeX document (PDF).
//!
//! The pipeline is [`parser::parse`] → [`resolver::resolve`] →
//! [`checker::check`] → the emitters in [`emit`], orchestrated by
//! [`site::build`].

use std::path::PathBuf;

pub mod checker;
pub mod cli;
pub mod emit;
pub mod model;
pub mod parser;
pub mod resolver;
pub mod site;

pub use model::{
    sanitize_fragment, Anchor, Context, Diagnostic, DiagnosticCode, FileId, NameOccurrence,
    NameSort, Role, Severity, SourceFile, Span,
};
pub use parser::{parse, Document};
pub use resolver::{DeclId, ResolvedProject, SymbolIndex};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Usage(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: malformed manifest: {source}", path.display())]
    Manifest {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Parses, resolves and checks a set of files. `files[i]` must carry id `i`.
/// Diagnostics are sorted by (path, offset, code).
pub fn analyze(files: Vec<SourceFile>, options: resolver::ResolveOptions) -> ResolvedProject {
    use rayon::prelude::*;

    debug_assert!(files.iter().enumerate().all(|(i, f)| f.id().index() == i));
    let (docs, parse_diags): (Vec<Document>, Vec<Vec<Diagnostic>>) =
        files.par_iter().map(parse).unzip();
    let (index, index_diags) = resolver::build_index(&files, &docs);
    let mut project = resolver::resolve(files, docs, index, options);
    let check_diags = checker::check(&project);
    let mut diags: Vec<Diagnostic> = parse_diags.into_iter().flatten().collect();
    diags.extend(index_diags);
    diags.append(&mut project.diagnostics);
    diags.extend(check_diags);
    model::sort_diagnostics(&mut diags, &project.files);
    project.diagnostics = diags;
    project
}

/// Builds [`SourceFile`]s from (path, text) pairs, sorted by normalized path
/// with ids assigned in that order.
pub fn source_files<P: AsRef<str>, T: Into<String>>(
    sources: impl IntoIterator<Item = (P, T)>,
) -> Result<Vec<SourceFile>> {
    let mut pairs = sources
        .into_iter()
        .map(|(p, t)| Ok((model::normalize_path(p.as_ref())?, t.into())))
        .collect::<Result<Vec<(String, String)>>>()?;
    pairs.sort_by(|a, b| a.0.cmp(&b.0));
    if let Some(w) = pairs.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::Usage(format!("duplicate source path `{}`", w[0].0)));
    }
    pairs
        .into_iter()
        .enumerate()
        .map(|(i, (p, t))| SourceFile::new(FileId(i as u32), &p, t))
        .collect()
}
