//! PLAIN twin: the source text verbatim inside `<pre>`, with every name
//! occurrence wrapped and hyperlinked.

use std::fmt::Write as _;

use super::{
    decl_ids_in, escape_attr, escape_html, join_url, link_url, name_role, relative_url,
    EmitOptions, Format, NameRole, Page,
};
use crate::model::{FileId, NameOccurrence, Span};
use crate::parser::{Block, BlockKind};
use crate::resolver::{DeclId, ResolvedProject};

pub const STYLESHEET_PATH: &str = "assets/cbs.css";

pub const STYLESHEET: &str = "\
body { font-family: sans-serif; margin: 1.5em; }
nav.cbs-twins { margin-bottom: 1em; }
pre.cbs-plain { font-family: monospace; margin: 0; }
.cbs-comment { color: #5a6b5a; }
.cbs-keyword { font-weight: bold; }
.cbs-funcon { color: #1f4e9b; }
.cbs-syntax { color: #7a2d8f; }
.cbs-semantics { color: #a4461f; }
.cbs-var { font-style: italic; }
.cbs-unresolved { text-decoration: underline wavy #c00; }
.cbs-error { background: #fde2e2; }
.cbs-backrefs { font-size: 0.85em; margin: 0.25em 0 0.75em 2em; }
.cbs-backrefs ul { margin: 0; }
a { color: inherit; }
";

pub fn emit_plain(project: &ResolvedProject, file: FileId, opts: &EmitOptions) -> Page {
    let source = project.file(file);
    let path = Format::Plain.output_path(source.path());
    let text = source.text();
    let decl_ids = decl_ids_in(project, file);

    let mut body = String::from("<pre class=\"cbs-plain\">");
    if text.starts_with('\n') {
        // A newline straight after <pre> is dropped by HTML parsers.
        body.push_str("<span></span>");
    }
    let mut pos = 0;
    for block in &project.docs[file.index()].blocks {
        escape_html(&text[pos..block.span.start], &mut body);
        render_block(project, block, opts, &mut body);
        pos = block.span.end;

        if opts.emit_backrefs {
            let owned: Vec<(DeclId, &NameOccurrence)> = block_decls(project, block)
                .into_iter()
                .filter_map(|occ| decl_ids.get(&occ.span).map(|&id| (id, occ)))
                .collect();
            if !owned.is_empty() {
                body.push_str("</pre>\n");
                for (id, occ) in owned {
                    backref_list(project, &path, id, occ, &mut body);
                }
                body.push_str("<pre class=\"cbs-plain\">");
                if text[pos..].starts_with('\n') {
                    body.push_str("<span></span>");
                }
            }
        }
    }
    escape_html(&text[pos..], &mut body);
    body.push_str("</pre>\n");

    let mut twins = Vec::new();
    if opts.has(Format::Pretty) {
        let to = Format::Pretty.output_path(source.path());
        twins.push(("PRETTY", relative_url(&path, &to)));
    }
    if opts.has(Format::Pdf) {
        let to = Format::Pdf.output_path(source.path());
        twins.push(("PDF", relative_url(&path, &to)));
    }
    if let Some(base) = &opts.source_base_url {
        twins.push(("Source", join_url(base, source.path())));
    }
    twins.push(("Index", relative_url(&path, "index.html")));

    let mut html = String::new();
    html.push_str("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n");
    html.push_str("<title>");
    escape_html(source.path(), &mut html);
    html.push_str("</title>\n");
    let _ = writeln!(
        html,
        "<link rel=\"stylesheet\" href=\"{}\">",
        escape_attr(&relative_url(&path, STYLESHEET_PATH))
    );
    html.push_str("</head>\n<body>\n<nav class=\"cbs-twins\">");
    for (i, (label, url)) in twins.iter().enumerate() {
        if i > 0 {
            html.push_str(" | ");
        }
        let _ = write!(html, "<a href=\"{}\">{label}</a>", escape_attr(url));
    }
    html.push_str("</nav>\n");
    html.push_str(&body);
    html.push_str("</body>\n</html>\n");
    Page {
        path,
        contents: html,
    }
}

fn render_block(project: &ResolvedProject, block: &Block, opts: &EmitOptions, out: &mut String) {
    let text = project.file(block.span.file).text();
    if matches!(block.kind, BlockKind::Error) {
        out.push_str("<span class=\"cbs-error\">");
        escape_html(&text[block.span.start..block.span.end], out);
        out.push_str("</span>");
        return;
    }
    let is_comment = matches!(block.kind, BlockKind::Comment(_));
    if is_comment {
        out.push_str("<span class=\"cbs-comment\">");
    }
    let occs = block_occs(project, block.span);
    let mut pos = block.span.start;
    if let Some(kw) = block.keyword {
        escape_html(&text[pos..kw.start], out);
        out.push_str("<span class=\"cbs-keyword\">");
        escape_html(&text[kw.start..kw.end], out);
        out.push_str("</span>");
        pos = kw.end;
    }
    for occ in occs {
        escape_html(&text[pos..occ.span.start], out);
        render_name(project, occ, opts, out);
        pos = occ.span.end;
    }
    escape_html(&text[pos..block.span.end], out);
    if is_comment {
        out.push_str("</span>");
    }
}

fn render_name(
    project: &ResolvedProject,
    occ: &NameOccurrence,
    opts: &EmitOptions,
    out: &mut String,
) {
    let text = project.file(occ.span.file).slice(occ.span);
    let class = occ.sort.css_class();
    match name_role(project, occ) {
        NameRole::Anchor { fragment } => {
            let _ = write!(
                out,
                "<span class=\"{class}\"><a id=\"{}\">",
                escape_attr(&fragment)
            );
            escape_html(text, out);
            out.push_str("</a></span>");
        }
        NameRole::Link { file, fragment, .. } => {
            let url = link_url(project, occ.span.file, Format::Plain, file, &fragment);
            let _ = write!(
                out,
                "<span class=\"{class}\"><a href=\"{}\"",
                escape_attr(&url)
            );
            if opts.emit_backrefs {
                let _ = write!(out, " id=\"{}\"", ref_id(occ.span));
            }
            out.push('>');
            escape_html(text, out);
            out.push_str("</a></span>");
        }
        NameRole::Unresolved => {
            let _ = write!(out, "<span class=\"{class} cbs-unresolved\">");
            escape_html(text, out);
            out.push_str("</span>");
        }
        NameRole::Shadowed => {
            let _ = write!(out, "<span class=\"{class}\">");
            escape_html(text, out);
            out.push_str("</span>");
        }
    }
}

/// Element id given to a reference when back-reference lists are emitted.
pub fn ref_id(span: Span) -> String {
    format!("ref-{}", span.start)
}

fn block_occs(project: &ResolvedProject, span: Span) -> &[NameOccurrence] {
    let occs = &project.occurrences[span.file.index()];
    let lo = occs.partition_point(|o| o.span.start < span.start);
    let hi = occs.partition_point(|o| o.span.start < span.end);
    &occs[lo..hi]
}

fn block_decls<'a>(project: &'a ResolvedProject, block: &Block) -> Vec<&'a NameOccurrence> {
    if !block.is_formal() {
        return Vec::new();
    }
    block_occs(project, block.span)
        .iter()
        .filter(|o| o.is_declaration())
        .collect()
}

fn backref_list(
    project: &ResolvedProject,
    page: &str,
    id: DeclId,
    occ: &NameOccurrence,
    out: &mut String,
) {
    let refs = &project.back_refs[id.index()];
    out.push_str("<div class=\"cbs-backrefs\">");
    if refs.is_empty() {
        out.push_str("No references to <code>");
        escape_html(&occ.name, out);
        out.push_str("</code>.</div>\n");
        return;
    }
    out.push_str("References to <code>");
    escape_html(&occ.name, out);
    out.push_str("</code>:\n<ul>\n");
    for &r in refs {
        let target = Format::Plain.output_path(project.file(r.file).path());
        let url = if r.file == occ.span.file {
            format!("#{}", ref_id(r))
        } else {
            format!("{}#{}", relative_url(page, &target), ref_id(r))
        };
        let _ = write!(out, "<li><a href=\"{}\">", escape_attr(&url));
        escape_html(&project.location(r).to_string(), out);
        out.push_str("</a></li>\n");
    }
    out.push_str("</ul></div>\n");
}
