//! The site index: every file with its twins, and every declaration grouped
//! by sort.

use std::fmt::Write as _;

use super::plain::STYLESHEET_PATH;
use super::{escape_attr, escape_html, EmitOptions, Format, Page};
use crate::model::NameSort;
use crate::resolver::{DeclInfo, DeclKind, ResolvedProject};

pub const INDEX_PATH: &str = "index.html";

pub fn emit_index(project: &ResolvedProject, opts: &EmitOptions) -> Page {
    let mut html = String::new();
    html.push_str("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n");
    html.push_str("<title>Index</title>\n");
    let _ = writeln!(html, "<link rel=\"stylesheet\" href=\"{STYLESHEET_PATH}\">");
    html.push_str("</head>\n<body>\n<h1>Index</h1>\n");

    html.push_str("<section id=\"files\">\n<h2>Files</h2>\n<ul>\n");
    let mut files: Vec<_> = project.files.iter().collect();
    files.sort_by(|a, b| a.path().cmp(b.path()));
    for file in files {
        html.push_str("<li><code>");
        escape_html(file.path(), &mut html);
        html.push_str("</code>:");
        for format in &opts.formats {
            let _ = write!(
                html,
                " <a href=\"{}\">{}</a>",
                escape_attr(&format.output_path(file.path())),
                format.name().to_uppercase()
            );
        }
        html.push_str("</li>\n");
    }
    html.push_str("</ul>\n</section>\n");

    html.push_str("<section id=\"declarations\">\n<h2>Declarations</h2>\n");
    for sort in NameSort::ALL {
        let mut decls: Vec<_> = project
            .index
            .decls()
            .filter(|(_, info)| info.sort == sort)
            .collect();
        if decls.is_empty() {
            continue;
        }
        decls.sort_by(|(_, a), (_, b)| {
            (&a.name, project.file(a.file()).path(), a.span.start).cmp(&(
                &b.name,
                project.file(b.file()).path(),
                b.span.start,
            ))
        });
        let _ = writeln!(html, "<h3>{}</h3>\n<ul>", heading(sort));
        for (id, info) in decls {
            html.push_str("<li>");
            decl_link(project, opts, info, &info.name, &mut html);
            let _ = write!(
                html,
                " <span class=\"cbs-kind\">{}</span>",
                kind_label(info.kind)
            );
            html.push_str(" in <code>");
            escape_html(project.file(info.file()).path(), &mut html);
            html.push_str("</code>");
            let aliases = project.index.aliases_of(id);
            if !aliases.is_empty() {
                html.push_str("<ul>\n");
                for (alias, span) in aliases {
                    html.push_str("<li>alias ");
                    let alias_info = DeclInfo {
                        span,
                        ..info.clone()
                    };
                    decl_link(project, opts, &alias_info, alias, &mut html);
                    html.push_str("</li>\n");
                }
                html.push_str("</ul>");
            }
            html.push_str("</li>\n");
        }
        html.push_str("</ul>\n");
    }
    html.push_str("</section>\n</body>\n</html>\n");
    Page {
        path: INDEX_PATH.to_string(),
        contents: html,
    }
}

fn heading(sort: NameSort) -> &'static str {
    match sort {
        NameSort::Funcon => "Funcons and types",
        NameSort::Syntax => "Syntax sorts",
        NameSort::Semantics => "Semantic functions",
        NameSort::MetaVar => "Meta-variables",
    }
}

fn kind_label(kind: DeclKind) -> &'static str {
    match kind {
        DeclKind::Funcon => "funcon",
        DeclKind::Type => "type",
        DeclKind::Syntax => "syntax",
        DeclKind::Semantics => "semantics",
        DeclKind::MetaVar => "meta-variable",
    }
}

/// Links to the declaration in the first enabled browsable twin.
fn decl_link(
    project: &ResolvedProject,
    opts: &EmitOptions,
    info: &DeclInfo,
    name: &str,
    out: &mut String,
) {
    let page_format = [Format::Plain, Format::Pretty, Format::Pdf]
        .into_iter()
        .find(|f| opts.has(*f))
        .unwrap_or(Format::Plain);
    let page = page_format.output_path(project.file(info.file()).path());
    let url = match (page_format, project.anchors.get(&info.span)) {
        (Format::Pdf, _) | (_, None) => page,
        (_, Some(fragment)) => format!("{page}#{fragment}"),
    };
    let _ = write!(
        out,
        "<a class=\"{}\" href=\"{}\">",
        info.sort.css_class(),
        escape_attr(&url)
    );
    escape_html(name, out);
    out.push_str("</a>");
}
