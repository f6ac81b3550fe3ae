//! Source discovery and output-file primitives.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use walkdir::WalkDir;

use crate::model::{normalize_path, SourceFile};
use crate::{source_files, Error, Result};

/// All `*.cbs` files under `root` as (normalized relative path, absolute
/// path), sorted by path. Symbolic links are followed; a file reachable
/// through several links is listed once, under its smallest path.
pub fn discover(root: &Path) -> Result<Vec<(String, PathBuf)>> {
    let meta = fs::metadata(root).map_err(|e| Error::io(root, e))?;
    if !meta.is_dir() {
        return Err(Error::io(
            root,
            io::Error::new(io::ErrorKind::NotADirectory, "not a directory"),
        ));
    }
    let mut found: Vec<(String, PathBuf)> = Vec::new();
    for entry in WalkDir::new(root).follow_links(true) {
        let entry = match entry {
            Ok(entry) => entry,
            Err(e) if e.loop_ancestor().is_some() => {
                log::debug!(
                    "skipping symlink cycle at {}",
                    e.path().unwrap_or(root).display()
                );
                continue;
            }
            Err(e) => {
                let path = e.path().unwrap_or(root).to_path_buf();
                let io = e
                    .into_io_error()
                    .unwrap_or_else(|| io::Error::other("directory walk failed"));
                return Err(Error::io(path, io));
            }
        };
        if !entry.file_type().is_file() || entry.path().extension().is_none_or(|e| e != "cbs") {
            continue;
        }
        let rel = entry
            .path()
            .strip_prefix(root)
            .expect("walk stays under root");
        let rel = rel
            .to_str()
            .ok_or_else(|| Error::Usage(format!("non-UTF-8 path {}", rel.display())))?;
        let rel = normalize_path(&rel.replace(std::path::MAIN_SEPARATOR, "/"))?;
        found.push((rel, entry.path().to_path_buf()));
    }
    found.sort();

    let mut seen: BTreeMap<PathBuf, ()> = BTreeMap::new();
    let mut unique = Vec::with_capacity(found.len());
    for (rel, path) in found {
        let canonical = fs::canonicalize(&path).map_err(|e| Error::io(&path, e))?;
        if seen.insert(canonical, ()).is_none() {
            unique.push((rel, path));
        } else {
            log::debug!("{rel} is a duplicate through a symbolic link");
        }
    }
    Ok(unique)
}

/// Discovers and reads every source file under `root`.
pub fn load(root: &Path) -> Result<Vec<SourceFile>> {
    let mut sources = Vec::new();
    for (rel, path) in discover(root)? {
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        sources.push((rel, text));
    }
    source_files(sources)
}

/// Writes `contents` to `path` through a temporary sibling and a rename, so
/// readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    write_atomic_with(path, |f| f.write_all(contents))
}

/// Like [`write_atomic`], with the temporary file filled by `fill`. If `fill`
/// fails the temporary is removed and `path` is left untouched.
pub fn write_atomic_with(
    path: &Path,
    fill: impl FnOnce(&mut File) -> io::Result<()>,
) -> io::Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "no file name"))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".{}.tmp", std::process::id()));
    let tmp = dir.join(tmp_name);

    let result = File::create(&tmp).and_then(|mut f| {
        fill(&mut f)?;
        f.sync_all()
    });
    match result.and_then(|()| fs::rename(&tmp, path)) {
        Ok(()) => Ok(()),
        Err(e) => {
            let _ = fs::remove_file(&tmp);
            Err(e)
        }
    }
}

/// Removes `path` and then any parents left empty, up to `root`.
pub fn remove_output(root: &Path, path: &Path) -> io::Result<()> {
    match fs::remove_file(path) {
        Ok(()) => {}
        Err(e) if e.kind() == io::ErrorKind::NotFound => {}
        Err(e) => return Err(e),
    }
    let mut dir = path.parent();
    while let Some(d) = dir {
        if d == root || !d.starts_with(root) || fs::remove_dir(d).is_err() {
            break;
        }
        dir = d.parent();
    }
    Ok(())
}
