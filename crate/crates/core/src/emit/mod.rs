//! Hyperlinked twin emitters.
//!
//! All emitters are pure functions of a [`ResolvedProject`]; output paths are
//! site-root-relative with `/` separators.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::model::{FileId, NameOccurrence, Span};
use crate::resolver::{DeclId, ResolvedProject};

pub mod index;
pub mod math;
pub mod pdf;
pub mod plain;
pub mod pretty;
pub mod prose;

pub use index::emit_index;
pub use pdf::{emit_pdf_source, MACROS_PATH};
pub use plain::emit_plain;
pub use pretty::emit_pretty;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Format {
    Plain,
    Pretty,
    Pdf,
}

impl Format {
    pub const ALL: [Format; 3] = [Format::Plain, Format::Pretty, Format::Pdf];

    pub fn name(self) -> &'static str {
        match self {
            Format::Plain => "plain",
            Format::Pretty => "pretty",
            Format::Pdf => "pdf",
        }
    }

    fn extension(self) -> &'static str {
        match self {
            Format::Plain => "html",
            Format::Pretty => "md",
            Format::Pdf => "tex",
        }
    }

    /// `Funcons/x.cbs` → `plain/Funcons/x.html` (or `pretty/…md`, `pdf/…tex`).
    pub fn output_path(self, source: &str) -> String {
        let stem = source.strip_suffix(".cbs").unwrap_or(source);
        format!("{}/{}.{}", self.name(), stem, self.extension())
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Format::ALL
            .into_iter()
            .find(|f| f.name() == s.trim())
            .ok_or_else(|| format!("unknown format `{s}` (expected plain, pretty or pdf)"))
    }
}

/// Parses a comma-separated format list such as `plain,pretty`.
pub fn parse_formats(csv: &str) -> Result<BTreeSet<Format>, String> {
    let formats = csv
        .split(',')
        .map(str::parse)
        .collect::<Result<BTreeSet<Format>, _>>()?;
    if formats.is_empty() {
        return Err("no output formats given".into());
    }
    Ok(formats)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmitOptions {
    pub formats: BTreeSet<Format>,
    /// Prefix for links to the original source files.
    pub source_base_url: Option<String>,
    /// Prefix for cross-file links in PDF documents.
    pub site_base_url: Option<String>,
    /// Follow each declaration in PLAIN pages with its reference list.
    pub emit_backrefs: bool,
}

impl Default for EmitOptions {
    fn default() -> Self {
        EmitOptions {
            formats: Format::ALL.into_iter().collect(),
            source_base_url: None,
            site_base_url: None,
            emit_backrefs: false,
        }
    }
}

impl EmitOptions {
    pub fn has(&self, format: Format) -> bool {
        self.formats.contains(&format)
    }
}

/// A generated file, path relative to the output root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Page {
    pub path: String,
    pub contents: String,
}

pub fn emit(project: &ResolvedProject, file: FileId, format: Format, opts: &EmitOptions) -> Page {
    match format {
        Format::Plain => emit_plain(project, file, opts),
        Format::Pretty => emit_pretty(project, file, opts),
        Format::Pdf => emit_pdf_source(project, file, opts),
    }
}

/// Relative URL from page `from` to page `to`, both site-root-relative.
pub fn relative_url(from: &str, to: &str) -> String {
    let from_dir: Vec<&str> = from.split('/').collect();
    let from_dir = &from_dir[..from_dir.len() - 1];
    let to_parts: Vec<&str> = to.split('/').collect();
    let common = from_dir
        .iter()
        .zip(&to_parts)
        .take_while(|(a, b)| a == b)
        .count()
        .min(to_parts.len() - 1);
    let mut url = "../".repeat(from_dir.len() - common);
    url.push_str(&to_parts[common..].join("/"));
    url
}

/// Joins a base URL and a relative path with exactly one `/`.
pub fn join_url(base: &str, path: &str) -> String {
    format!("{}/{}", base.trim_end_matches('/'), path)
}

/// How an occurrence participates in hyperlinking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NameRole {
    /// A declaration owning the anchor `fragment`.
    Anchor { fragment: String },
    /// A resolved reference.
    Link {
        decl: DeclId,
        file: FileId,
        fragment: String,
    },
    /// A reference that failed to resolve.
    Unresolved,
    /// A declaration that lost a duplicate check and owns no anchor.
    Shadowed,
}

pub fn name_role(project: &ResolvedProject, occ: &NameOccurrence) -> NameRole {
    if occ.is_declaration() {
        return match project.anchors.get(&occ.span) {
            Some(fragment) => NameRole::Anchor {
                fragment: fragment.clone(),
            },
            None => NameRole::Shadowed,
        };
    }
    match project.resolution.get(&occ.span) {
        Some(&decl) => {
            let info = project.index.info(decl);
            NameRole::Link {
                decl,
                file: info.file(),
                fragment: project.anchors[&info.span].clone(),
            }
        }
        None => NameRole::Unresolved,
    }
}

/// URL of a declaration seen from `from_page`, both in `format`.
pub fn link_url(
    project: &ResolvedProject,
    from: FileId,
    format: Format,
    target: FileId,
    fragment: &str,
) -> String {
    if from == target {
        return format!("#{fragment}");
    }
    let from_page = format.output_path(project.file(from).path());
    let to_page = format.output_path(project.file(target).path());
    format!("{}#{fragment}", relative_url(&from_page, &to_page))
}

/// Maps a declaration occurrence span to its id, for declarations in `file`.
pub(crate) fn decl_ids_in(
    project: &ResolvedProject,
    file: FileId,
) -> std::collections::BTreeMap<Span, DeclId> {
    project
        .index
        .decls()
        .filter(|(_, info)| info.file() == file)
        .map(|(id, info)| (info.span, id))
        .collect()
}

pub(crate) fn escape_html(text: &str, out: &mut String) {
    for c in text.chars() {
        match c {
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '&' => out.push_str("&amp;"),
            _ => out.push(c),
        }
    }
}

pub(crate) fn escape_attr(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '&' => out.push_str("&amp;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}
