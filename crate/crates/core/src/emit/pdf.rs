//! PDF twin: a standalone LaTeX document using the same math payloads as the
//! PRETTY twin.
//!
//! Payloads carry PRETTY-relative URLs in `\lnk`. Each document maps those
//! URLs to real targets with `\cbsmaplink`: an internal hyperlink for the
//! same file, otherwise a web twin of the target: its HTML page under the
//! site base URL, or the relative PRETTY (else PLAIN) page when no base is
//! configured. Without either, cross-file names are typeset unlinked.

use std::collections::BTreeMap;

use super::math::{escape_tt, render_block, LinkUse};
use super::prose::{paragraphs, Piece};
use super::{join_url, relative_url, EmitOptions, Format, Page};
use crate::model::FileId;
use crate::parser::BlockKind;
use crate::resolver::ResolvedProject;

pub const MACROS_PATH: &str = "pdf/cbs-macros.tex";

pub const MACROS: &str = r"% Macros shared by every generated LaTeX document.
\usepackage[T1]{fontenc}
\usepackage[utf8]{inputenc}
\usepackage{amsmath}
\usepackage{amssymb}
\usepackage{stmaryrd}
\usepackage[hidelinks]{hyperref}
\setlength{\parindent}{0pt}
\setlength{\parskip}{0.6em}
\newcommand{\fn}[1]{\textsf{#1}}
\newcommand{\syn}[1]{\textsf{\textbf{#1}}}
\newcommand{\sem}[1]{\textsf{\textit{#1}}}
\newcommand{\mv}[1]{\mathit{#1}}
\newcommand{\anch}[2]{\hypertarget{\detokenize{#1}}{#2}}
\newcommand{\cbsinternal}[2]{\hyperlink{\detokenize{#1}}{#2}}
\newcommand{\cbsexternal}[2]{\href{#1}{#2}}
\newcommand{\cbsunlinked}[1]{#1}
\newcommand{\cbsmaplink}[2]{\expandafter\def\csname cbslnk@\detokenize{#1}\endcsname{#2}}
\newcommand{\lnk}[2]{%
  \ifcsname cbslnk@\detokenize{#1}\endcsname
    \csname cbslnk@\detokenize{#1}\endcsname{#2}%
  \else #2\fi}
";

pub fn emit_pdf_source(project: &ResolvedProject, file: FileId, opts: &EmitOptions) -> Page {
    let source = project.file(file);
    let path = Format::Pdf.output_path(source.path());

    let mut links: Vec<LinkUse> = Vec::new();
    let mut body: Vec<String> = Vec::new();
    for block in &project.docs[file.index()].blocks {
        match &block.kind {
            BlockKind::Comment(c) => {
                for para in paragraphs(project, c) {
                    let lines: Vec<String> = para
                        .iter()
                        .map(|line| {
                            line.iter()
                                .map(|piece| match piece {
                                    Piece::Text(t) => escape_text(t),
                                    Piece::Ref {
                                        name,
                                        url: Some(url),
                                    } => {
                                        format!("\\lnk{{{url}}}{{\\texttt{{{}}}}}", escape_tt(name))
                                    }
                                    Piece::Ref { name, url: None } => {
                                        format!("\\texttt{{{}}}", escape_tt(name))
                                    }
                                })
                                .collect()
                        })
                        .collect();
                    body.push(lines.join("\n"));
                }
                links.extend(comment_links(project, c));
            }
            BlockKind::Error => {
                body.push(format!(
                    "\\begin{{verbatim}}\n{}\n\\end{{verbatim}}",
                    source
                        .slice(block.span)
                        .trim_end()
                        .replace("\\end{verbatim}", "\\end {verbatim}")
                ));
            }
            _ => {
                let math = render_block(project, block).expect("formal block");
                body.push(format!(
                    "\\begin{{displaymath}}\n{}\n\\end{{displaymath}}",
                    math.payload
                ));
                links.extend(math.links);
            }
        }
    }

    let map: BTreeMap<&str, &LinkUse> = links.iter().map(|l| (l.url.as_str(), l)).collect();
    let mut tex = format!("% Generated by hypertwin from {}\n", source.path());
    tex.push_str("\\documentclass{article}\n");
    tex.push_str(&format!(
        "\\input{{{}}}\n",
        relative_url(&path, MACROS_PATH)
    ));
    // Cross-file links go to a web twin: PRETTY when generated, else PLAIN.
    let web = [Format::Pretty, Format::Plain]
        .into_iter()
        .find(|f| opts.has(*f));
    for (url, link) in &map {
        let target_path = project.file(link.target).path();
        let target = if link.target == file {
            format!("\\cbsinternal{{{}}}", link.fragment)
        } else {
            let href = match (&opts.site_base_url, web) {
                (Some(base), web) => {
                    let page = web.unwrap_or(Format::Pretty).output_path(target_path);
                    let stem = page
                        .rsplit_once('.')
                        .map_or(page.as_str(), |(stem, _)| stem);
                    Some(join_url(base, &format!("{stem}.html")))
                }
                (None, Some(web)) => Some(relative_url(&path, &web.output_path(target_path))),
                (None, None) => None,
            };
            match href {
                Some(href) => format!("\\cbsexternal{{{}\\#{}}}", escape_url(&href), link.fragment),
                None => "\\cbsunlinked".to_string(),
            }
        };
        tex.push_str(&format!("\\cbsmaplink{{{url}}}{{{target}}}\n"));
    }
    tex.push_str("\\begin{document}\n");
    tex.push_str(&format!(
        "\\section*{{\\texttt{{{}}}}}\n\n",
        escape_tt(source.path())
    ));
    tex.push_str(&body.join("\n\n"));
    if !body.is_empty() {
        tex.push_str("\n\n");
    }
    tex.push_str("\\end{document}\n");
    Page {
        path,
        contents: tex,
    }
}

fn comment_links(project: &ResolvedProject, c: &crate::parser::Comment) -> Vec<LinkUse> {
    use super::{name_role, NameRole};
    c.segments
        .iter()
        .filter_map(|seg| match seg {
            crate::parser::Segment::EmbeddedRef { name, .. } => match name_role(project, name) {
                NameRole::Link { file, fragment, .. } => Some(LinkUse {
                    url: super::link_url(project, name.span.file, Format::Pretty, file, &fragment),
                    target: file,
                    fragment,
                }),
                _ => None,
            },
            _ => None,
        })
        .collect()
}

/// Escapes prose for LaTeX text mode.
pub fn escape_text(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '\\' => out.push_str("\\textbackslash{}"),
            '{' | '}' | '$' | '&' | '#' | '_' | '%' => {
                out.push('\\');
                out.push(c);
            }
            '^' => out.push_str("\\textasciicircum{}"),
            '~' => out.push_str("\\textasciitilde{}"),
            '<' => out.push_str("\\textless{}"),
            '>' => out.push_str("\\textgreater{}"),
            '|' => out.push_str("\\textbar{}"),
            _ => out.push(c),
        }
    }
    out
}

fn escape_url(url: &str) -> String {
    url.replace('%', "\\%")
        .replace('#', "\\#")
        .replace('~', "\\~")
}
