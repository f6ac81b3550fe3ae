//! Site-wide link checking over a generated output tree.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;
use walkdir::WalkDir;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BrokenLink {
    /// Page containing the link, relative to the output root.
    pub page: String,
    pub url: String,
    pub reason: String,
}

static HTML_HREF: LazyLock<Regex> = LazyLock::new(|| Regex::new(r#"\bhref="([^"]*)""#).unwrap());
static HTML_ID: LazyLock<Regex> = LazyLock::new(|| Regex::new(r#"\bid="([^"]*)""#).unwrap());
static MD_LINK: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\]\(([^)\s]*)\)").unwrap());
static LNK: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\\lnk\{([^}]*)\}").unwrap());
static ANCH: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\\anch\{([^}]*)\}").unwrap());
static TEX_MAP: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"\\cbsmaplink\{([^}]*)\}\{\\cbs(internal|external|unlinked)(?:\{([^}]*)\})?\}")
        .unwrap()
});
static TEX_INPUT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\\input\{([^}]*)\}").unwrap());
static SCHEME: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^[A-Za-z][A-Za-z0-9+.-]*:").unwrap());

enum Link {
    /// A relative URL, optionally with a fragment.
    Url(String),
    /// A `\lnk` in a LaTeX document without a `\cbsmaplink` entry.
    TexLnk(String),
    /// An internal LaTeX hyperlink to a fragment of the same document.
    TexInternal(String),
}

struct Scanned {
    anchors: BTreeSet<String>,
    links: Vec<Link>,
}

/// Checks every relative link and fragment of every page under `out`.
/// External URLs are not fetched.
pub fn check_links(out: &Path) -> Result<Vec<BrokenLink>> {
    let mut pages: BTreeMap<String, Scanned> = BTreeMap::new();
    for entry in WalkDir::new(out) {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(out).to_path_buf();
            Error::io(
                path,
                e.into_io_error()
                    .unwrap_or_else(|| std::io::Error::other("walk failed")),
            )
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = entry
            .path()
            .strip_prefix(out)
            .expect("walk stays under root")
            .to_string_lossy()
            .replace(std::path::MAIN_SEPARATOR, "/");
        let scanned = match entry.path().extension().and_then(|e| e.to_str()) {
            Some("html") => scan_html(&read(entry.path())?),
            Some("md") => scan_md(&read(entry.path())?),
            Some("tex") => scan_tex(&read(entry.path())?),
            _ => Scanned {
                anchors: BTreeSet::new(),
                links: Vec::new(),
            },
        };
        pages.insert(rel, scanned);
    }

    let mut broken = Vec::new();
    for (page, scanned) in &pages {
        for link in &scanned.links {
            let finding = match link {
                Link::Url(url) => check_url(&pages, page, url).map(|reason| (url.clone(), reason)),
                Link::TexLnk(url) => Some((url.clone(), "no \\cbsmaplink entry".to_string())),
                Link::TexInternal(fragment) => (!scanned.anchors.contains(fragment))
                    .then(|| (format!("#{fragment}"), "no such anchor".to_string())),
            };
            if let Some((url, reason)) = finding {
                broken.push(BrokenLink {
                    page: page.clone(),
                    url,
                    reason,
                });
            }
        }
    }
    broken.sort();
    broken.dedup();
    Ok(broken)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn unescape_attr(s: &str) -> String {
    s.replace("&quot;", "\"")
        .replace("&lt;", "<")
        .replace("&gt;", ">")
        .replace("&amp;", "&")
}

fn scan_html(text: &str) -> Scanned {
    Scanned {
        anchors: HTML_ID
            .captures_iter(text)
            .map(|c| unescape_attr(&c[1]))
            .collect(),
        links: HTML_HREF
            .captures_iter(text)
            .map(|c| Link::Url(unescape_attr(&c[1])))
            .collect(),
    }
}

fn scan_md(text: &str) -> Scanned {
    let mut links = Vec::new();
    let mut anchors = BTreeSet::new();
    let mut in_math = false;
    for line in text.lines() {
        if line == "$$" {
            in_math = !in_math;
            continue;
        }
        let pattern = if in_math { &*LNK } else { &*MD_LINK };
        links.extend(
            pattern
                .captures_iter(line)
                .map(|c| Link::Url(c[1].to_string())),
        );
        if in_math {
            anchors.extend(ANCH.captures_iter(line).map(|c| c[1].to_string()));
        }
    }
    Scanned { anchors, links }
}

fn scan_tex(text: &str) -> Scanned {
    let mut links = Vec::new();
    for c in TEX_INPUT.captures_iter(text) {
        links.push(Link::Url(c[1].to_string()));
    }
    for c in TEX_MAP.captures_iter(text) {
        match &c[2] {
            "internal" => links.push(Link::TexInternal(c[3].to_string())),
            "unlinked" => {}
            _ => links.push(Link::Url(
                c[3].replace("\\#", "#")
                    .replace("\\%", "%")
                    .replace("\\~", "~"),
            )),
        }
    }
    let mapped: Vec<String> = TEX_MAP
        .captures_iter(text)
        .map(|c| c[1].to_string())
        .collect();
    for c in LNK.captures_iter(text) {
        if !mapped.iter().any(|m| m == &c[1]) {
            links.push(Link::TexLnk(c[1].to_string()));
        }
    }
    Scanned {
        anchors: ANCH.captures_iter(text).map(|c| c[1].to_string()).collect(),
        links,
    }
}

fn check_url(pages: &BTreeMap<String, Scanned>, page: &str, url: &str) -> Option<String> {
    if SCHEME.is_match(url) {
        return None;
    }
    let (path, fragment) = match url.split_once('#') {
        Some((p, f)) => (p, Some(f)),
        None => (url, None),
    };
    let target = if path.is_empty() {
        page.to_string()
    } else {
        match join(page, path) {
            Some(t) => t,
            None => return Some("escapes the output root".into()),
        }
    };
    let Some(scanned) = pages.get(&target) else {
        return Some(format!("missing file `{target}`"));
    };
    match fragment {
        Some(f) if !f.is_empty() && !scanned.anchors.contains(f) => {
            Some(format!("no anchor `{f}` in `{target}`"))
        }
        _ => None,
    }
}

/// Resolves `rel` against the directory of `page`.
fn join(page: &str, rel: &str) -> Option<String> {
    let mut parts: Vec<&str> = page.split('/').collect();
    parts.pop();
    for seg in rel.split('/') {
        match seg {
            "" | "." => {}
            ".." => {
                parts.pop()?;
            }
            s => parts.push(s),
        }
    }
    Some(parts.join("/"))
}
