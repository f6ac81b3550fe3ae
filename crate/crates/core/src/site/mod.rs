//! Whole-project builds: discovery, analysis, emission of every twin, the
//! index page, and manifest-driven incremental regeneration.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use rayon::prelude::*;

use crate::emit::{self, index::INDEX_PATH, EmitOptions, Format, NameRole, Page};
use crate::model::FileId;
use crate::resolver::{ResolveOptions, ResolvedProject};
use crate::{analyze, Error, Result};

mod fs_util;
mod links;
mod manifest;

pub use fs_util::{discover, load, remove_output, write_atomic, write_atomic_with};
pub use links::{check_links, BrokenLink};
pub use manifest::{sha256_hex, FileRecord, Manifest, MANIFEST_NAME, VERSION};

#[derive(Debug, Clone)]
pub struct ProjectConfig {
    pub root: PathBuf,
    pub out: PathBuf,
    pub emit: EmitOptions,
    pub resolve: ResolveOptions,
    pub incremental: bool,
    /// Compile regenerated `.tex` documents with `pdflatex` if it is on PATH.
    pub run_pdflatex: bool,
}

impl ProjectConfig {
    pub fn new(root: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        ProjectConfig {
            root: root.into(),
            out: out.into(),
            emit: EmitOptions::default(),
            resolve: ResolveOptions::default(),
            incremental: false,
            run_pdflatex: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.emit.formats.is_empty() {
            return Err(Error::Config("no output formats selected".into()));
        }
        let root = fs::canonicalize(&self.root).map_err(|e| Error::io(&self.root, e))?;
        if canonical_prefix(&self.out).starts_with(&root) {
            return Err(Error::Config(format!(
                "output directory {} lies inside the source root {}",
                self.out.display(),
                self.root.display()
            )));
        }
        Ok(())
    }

    /// Hash of the settings that shape generated files.
    fn fingerprint(&self) -> String {
        let formats: Vec<&str> = self.emit.formats.iter().map(|f| f.name()).collect();
        let key = serde_json::json!({
            "formats": formats,
            "source_base_url": self.emit.source_base_url,
            "site_base_url": self.emit.site_base_url,
            "emit_backrefs": self.emit.emit_backrefs,
        });
        sha256_hex(key.to_string().as_bytes())
    }
}

/// Canonical form of a path that may not exist yet: its deepest existing
/// ancestor is canonicalized and the rest appended.
fn canonical_prefix(path: &Path) -> PathBuf {
    let abs = if path.is_absolute() {
        path.to_path_buf()
    } else {
        std::env::current_dir().unwrap_or_default().join(path)
    };
    let mut rest = Vec::new();
    let mut cur = abs.as_path();
    loop {
        if let Ok(c) = fs::canonicalize(cur) {
            let mut c = c;
            for part in rest.iter().rev() {
                c.push(part);
            }
            return c;
        }
        match (cur.parent(), cur.file_name()) {
            (Some(parent), Some(name)) => {
                rest.push(name.to_os_string());
                cur = parent;
            }
            _ => return abs,
        }
    }
}

#[derive(Debug)]
pub struct BuildReport {
    pub project: ResolvedProject,
    /// Source paths whose outputs were regenerated.
    pub regenerated: Vec<String>,
    /// Source paths whose outputs were up to date.
    pub fresh: Vec<String>,
    /// Pages written, including the index.
    pub pages_written: usize,
    pub index_written: bool,
    /// Stale outputs deleted.
    pub removed: Vec<String>,
}

impl BuildReport {
    pub fn has_errors(&self) -> bool {
        self.project.has_errors()
    }
}

/// Files shared by all pages, with the format that needs them (`None`: the
/// index needs it regardless).
const SUPPORT_FILES: [(Option<Format>, &str, &str); 3] = [
    (None, emit::plain::STYLESHEET_PATH, emit::plain::STYLESHEET),
    (
        Some(Format::Pretty),
        emit::pretty::MACROS_JS_PATH,
        emit::pretty::MACROS_JS,
    ),
    (Some(Format::Pdf), emit::pdf::MACROS_PATH, emit::pdf::MACROS),
];

pub fn build(config: &ProjectConfig) -> Result<BuildReport> {
    config.validate()?;
    let files = load(&config.root)?;
    log::info!("analyzing {} files", files.len());
    let project = analyze(files, config.resolve);

    let previous = match Manifest::load(&config.out) {
        Ok(m) => m,
        Err(e) => {
            log::warn!("{e}; rebuilding everything");
            None
        }
    };
    let fingerprint = config.fingerprint();
    let old = previous
        .as_ref()
        .filter(|m| config.incremental && m.version == VERSION && m.config == fingerprint);

    let records: Vec<FileRecord> = project
        .files
        .iter()
        .map(|f| FileRecord {
            hash: sha256_hex(f.text().as_bytes()),
            resolution: resolution_digest(&project, f.id(), &config.emit),
            deps: project
                .dependencies_of(f.id())
                .into_iter()
                .map(|d| project.file(d).path().to_string())
                .collect(),
            outputs: BTreeMap::new(),
        })
        .collect();
    let new_hashes: BTreeMap<&str, &str> = project
        .files
        .iter()
        .zip(&records)
        .map(|(f, r)| (f.path(), r.hash.as_str()))
        .collect();

    let stale: Vec<FileId> = project
        .files
        .iter()
        .zip(&records)
        .filter(|(f, rec)| match old {
            Some(m) => m
                .files
                .get(f.path())
                .is_none_or(|prev| is_stale(prev, rec, &m.files, &new_hashes, &config.out)),
            None => true,
        })
        .map(|(f, _)| f.id())
        .collect();

    let jobs: Vec<(FileId, Format)> = stale
        .iter()
        .flat_map(|&f| config.emit.formats.iter().map(move |&fmt| (f, fmt)))
        .collect();
    let pages: Vec<Page> = jobs
        .par_iter()
        .map(|&(f, fmt)| emit::emit(&project, f, fmt, &config.emit))
        .collect();

    let mut manifest = Manifest {
        version: VERSION.to_string(),
        config: fingerprint,
        files: BTreeMap::new(),
        site: BTreeMap::new(),
    };
    for (f, mut rec) in project.files.iter().zip(records) {
        let carried = old
            .and_then(|m| m.files.get(f.path()))
            .map(|prev| prev.outputs.clone());
        if let (false, Some(outputs)) = (stale.contains(&f.id()), carried) {
            rec.outputs = outputs;
        }
        manifest.files.insert(f.path().to_string(), rec);
    }

    pages.par_iter().try_for_each(|page| {
        let path = config.out.join(&page.path);
        write_atomic(&path, page.contents.as_bytes()).map_err(|e| Error::io(&path, e))
    })?;
    for ((f, _), page) in jobs.iter().zip(&pages) {
        let rec = manifest
            .files
            .get_mut(project.file(*f).path())
            .expect("record per file");
        rec.outputs
            .insert(page.path.clone(), sha256_hex(page.contents.as_bytes()));
    }

    let removed_sources =
        old.is_some_and(|m| m.files.keys().any(|p| !manifest.files.contains_key(p)));
    let index_path = config.out.join(INDEX_PATH);
    let index_intact = old
        .and_then(|m| m.site.get(INDEX_PATH))
        .is_some_and(|h| output_matches(&index_path, h));
    let write_index = !stale.is_empty() || removed_sources || !index_intact;
    if write_index {
        let page = emit::emit_index(&project, &config.emit);
        write_atomic(&index_path, page.contents.as_bytes())
            .map_err(|e| Error::io(&index_path, e))?;
        manifest
            .site
            .insert(INDEX_PATH.to_string(), sha256_hex(page.contents.as_bytes()));
    } else {
        let hash = old.expect("intact index implies a manifest").site[INDEX_PATH].clone();
        manifest.site.insert(INDEX_PATH.to_string(), hash);
    }

    for (format, rel, contents) in SUPPORT_FILES {
        if format.is_some_and(|f| !config.emit.has(f)) {
            continue;
        }
        let path = config.out.join(rel);
        let hash = sha256_hex(contents.as_bytes());
        if !output_matches(&path, &hash) {
            write_atomic(&path, contents.as_bytes()).map_err(|e| Error::io(&path, e))?;
        }
        manifest.site.insert(rel.to_string(), hash);
    }

    let mut removed = Vec::new();
    if let Some(prev) = &previous {
        let keep: BTreeSet<&String> = manifest
            .files
            .values()
            .flat_map(|r| r.outputs.keys())
            .chain(manifest.site.keys())
            .collect();
        let previous = prev
            .files
            .values()
            .flat_map(|r| r.outputs.keys())
            .chain(prev.site.keys());
        for rel in previous {
            if !keep.contains(rel) {
                let path = config.out.join(rel);
                remove_output(&config.out, &path).map_err(|e| Error::io(&path, e))?;
                removed.push(rel.clone());
            }
        }
    }
    removed.sort();
    removed.dedup();

    let manifest_path = config.out.join(MANIFEST_NAME);
    let json = manifest.to_json();
    if fs::read_to_string(&manifest_path).ok().as_deref() != Some(json.as_str()) {
        write_atomic(&manifest_path, json.as_bytes()).map_err(|e| Error::io(&manifest_path, e))?;
    }

    if config.run_pdflatex && config.emit.has(Format::Pdf) {
        let docs: Vec<&Page> = pages.iter().filter(|p| p.path.ends_with(".tex")).collect();
        run_pdflatex(&config.out, &docs);
    }

    let stale_set: BTreeSet<FileId> = stale.iter().copied().collect();
    let (regenerated, fresh): (Vec<_>, Vec<_>) = project
        .files
        .iter()
        .partition(|f| stale_set.contains(&f.id()));
    Ok(BuildReport {
        regenerated: regenerated.iter().map(|f| f.path().to_string()).collect(),
        fresh: fresh.iter().map(|f| f.path().to_string()).collect(),
        pages_written: pages.len() + usize::from(write_index),
        index_written: write_index,
        removed,
        project,
    })
}

fn is_stale(
    prev: &FileRecord,
    rec: &FileRecord,
    old_files: &BTreeMap<String, FileRecord>,
    new_hashes: &BTreeMap<&str, &str>,
    out: &Path,
) -> bool {
    if prev.hash != rec.hash || prev.resolution != rec.resolution || prev.deps != rec.deps {
        return true;
    }
    let dep_changed = prev.deps.iter().any(|d| {
        let before = old_files.get(d).map(|r| r.hash.as_str());
        before.is_none() || before != new_hashes.get(d.as_str()).copied()
    });
    if dep_changed {
        return true;
    }
    prev.outputs.is_empty()
        || prev
            .outputs
            .iter()
            .any(|(rel, hash)| !output_matches(&out.join(rel), hash))
}

fn output_matches(path: &Path, hash: &str) -> bool {
    fs::read(path).is_ok_and(|bytes| sha256_hex(&bytes) == hash)
}

/// Digest of everything outside a file's own text that its outputs depend
/// on: where each of its names links, which anchors it owns, and (with
/// back-reference lists) where its declarations are referenced.
fn resolution_digest(project: &ResolvedProject, file: FileId, opts: &EmitOptions) -> String {
    let mut key = String::new();
    for occ in &project.occurrences[file.index()] {
        key.push_str(&format!("{}:", occ.span.start));
        match emit::name_role(project, occ) {
            NameRole::Anchor { fragment } => key.push_str(&format!("a {fragment}")),
            NameRole::Link {
                file: target,
                fragment,
                ..
            } => key.push_str(&format!("l {} {fragment}", project.file(target).path())),
            NameRole::Unresolved => key.push('u'),
            NameRole::Shadowed => key.push('s'),
        }
        key.push('\n');
    }
    if opts.emit_backrefs {
        for (id, info) in project.index.decls() {
            if info.file() != file {
                continue;
            }
            for r in &project.back_refs[id.index()] {
                key.push_str(&format!(
                    "r {} {} {}\n",
                    info.span.start,
                    project.location(*r),
                    r.start
                ));
            }
        }
    }
    sha256_hex(key.as_bytes())
}

fn run_pdflatex(out: &Path, docs: &[&Page]) {
    for doc in docs {
        let path = out.join(&doc.path);
        let (Some(dir), Some(name)) = (path.parent(), path.file_name()) else {
            continue;
        };
        let status = Command::new("pdflatex")
            .args(["-interaction=nonstopmode", "-halt-on-error"])
            .arg(name)
            .current_dir(dir)
            .stdout(std::process::Stdio::null())
            .status();
        match status {
            Ok(s) if s.success() => {}
            Ok(s) => log::warn!("pdflatex failed on {} ({s})", doc.path),
            Err(e) => {
                log::warn!("cannot run pdflatex: {e}");
                return;
            }
        }
    }
}
