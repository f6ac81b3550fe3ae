//! PRETTY twin: Markdown with comments as prose and formal blocks as display
//! math in the macro vocabulary of [`super::math`].

use super::math::render_block;
use super::prose::{paragraphs, Piece};
use super::{join_url, relative_url, EmitOptions, Format, Page};
use crate::model::FileId;
use crate::parser::BlockKind;
use crate::resolver::ResolvedProject;

/// Browser-side definitions of the math macros, for KaTeX or MathJax.
pub const MACROS_JS_PATH: &str = "assets/cbs-macros.js";

pub const MACROS_JS: &str = r#"// Math macros used by PRETTY pages. Pass `cbsMacros` as the `macros`
// option of KaTeX (with `trust: true`) or MathJax.
window.cbsMacros = {
  "\\fn": "\\textsf{#1}",
  "\\syn": "\\textsf{\\textbf{#1}}",
  "\\sem": "\\textsf{\\textit{#1}}",
  "\\mv": "\\mathit{#1}",
  "\\anch": "\\htmlId{#1}{#2}",
  "\\lnk": "\\href{#1}{#2}"
};
"#;

pub fn emit_pretty(project: &ResolvedProject, file: FileId, opts: &EmitOptions) -> Page {
    let source = project.file(file);
    let path = Format::Pretty.output_path(source.path());

    let mut links = Vec::new();
    if opts.has(Format::Plain) {
        let to = Format::Plain.output_path(source.path());
        links.push(format!("[PLAIN]({})", relative_url(&path, &to)));
    }
    if opts.has(Format::Pdf) {
        let to = Format::Pdf.output_path(source.path());
        links.push(format!("[PDF]({})", relative_url(&path, &to)));
    }
    if let Some(base) = &opts.source_base_url {
        links.push(format!("[Source]({})", join_url(base, source.path())));
    }
    links.push(format!("[Index]({})", relative_url(&path, "index.html")));

    let mut sections = vec![format!(
        "# {}\n{}",
        escape_md(source.path()),
        links.join(" · ")
    )];
    for block in &project.docs[file.index()].blocks {
        match &block.kind {
            BlockKind::Comment(c) => {
                for para in paragraphs(project, c) {
                    let lines: Vec<String> = para.iter().map(|line| render_line(line)).collect();
                    sections.push(lines.join("\n"));
                }
            }
            BlockKind::Error => {
                let text = source.slice(block.span);
                sections.push(format!(
                    "```\n{}\n```",
                    text.trim_end().replace("```", "`\u{200b}``")
                ));
            }
            _ => {
                let math = render_block(project, block).expect("formal block");
                sections.push(format!("$$\n{}\n$$", math.payload));
            }
        }
    }
    let mut contents = sections.join("\n\n");
    contents.push('\n');
    Page { path, contents }
}

fn render_line(line: &[Piece]) -> String {
    let mut out = String::new();
    for piece in line {
        match piece {
            Piece::Text(t) => out.push_str(&escape_md(t)),
            Piece::Ref {
                name,
                url: Some(url),
            } => {
                out.push_str(&format!("[`{name}`]({url})"));
            }
            Piece::Ref { name, url: None } => out.push_str(&format!("`{name}`")),
        }
    }
    out
}

/// Backslash-escapes every character Markdown or the math delimiters could
/// interpret.
pub fn escape_md(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        if matches!(
            c,
            '\\' | '`'
                | '*'
                | '_'
                | '['
                | ']'
                | '<'
                | '>'
                | '#'
                | '|'
                | '$'
                | '&'
                | '~'
                | '{'
                | '}'
        ) {
            out.push('\\');
        }
        out.push(c);
    }
    out
}
