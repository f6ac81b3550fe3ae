//! Comment bodies as prose paragraphs, shared by PRETTY and PDF.

use super::{link_url, name_role, Format, NameRole};
use crate::parser::{Comment, Segment};
use crate::resolver::ResolvedProject;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Piece {
    Text(String),
    /// An embedded reference; `url` is relative to the PRETTY page.
    Ref {
        name: String,
        url: Option<String>,
    },
}

pub type Line = Vec<Piece>;
pub type Paragraph = Vec<Line>;

/// Splits a comment into paragraphs at blank lines. Leading `*` decoration
/// and indentation are dropped from each line.
pub fn paragraphs(project: &ResolvedProject, comment: &Comment) -> Vec<Paragraph> {
    let file = project.file(comment.body.file);
    let mut lines: Vec<Line> = vec![Vec::new()];
    for seg in &comment.segments {
        match seg {
            Segment::Text(span) => {
                let mut parts = file.slice(*span).split('\n');
                if let Some(first) = parts.next() {
                    push_text(lines.last_mut().unwrap(), first);
                }
                for part in parts {
                    lines.push(Vec::new());
                    push_text(lines.last_mut().unwrap(), part);
                }
            }
            Segment::EmbeddedRef { name, .. } => {
                let url = match name_role(project, name) {
                    NameRole::Link { file, fragment, .. } => Some(link_url(
                        project,
                        name.span.file,
                        Format::Pretty,
                        file,
                        &fragment,
                    )),
                    _ => None,
                };
                lines.last_mut().unwrap().push(Piece::Ref {
                    name: name.name.clone(),
                    url,
                });
            }
        }
    }

    let mut out: Vec<Paragraph> = Vec::new();
    let mut current: Paragraph = Vec::new();
    for line in lines {
        let line = tidy(line);
        if line.is_empty() {
            if !current.is_empty() {
                out.push(std::mem::take(&mut current));
            }
        } else {
            current.push(line);
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}

fn push_text(line: &mut Line, text: &str) {
    if !text.is_empty() {
        line.push(Piece::Text(text.to_string()));
    }
}

fn tidy(mut line: Line) -> Line {
    if let Some(Piece::Text(first)) = line.first_mut() {
        let trimmed = first.trim_start();
        let trimmed = match trimmed.strip_prefix('*') {
            Some(rest) if rest.is_empty() || rest.starts_with(char::is_whitespace) => {
                rest.trim_start()
            }
            _ => trimmed,
        };
        *first = trimmed.to_string();
    }
    if let Some(Piece::Text(last)) = line.last_mut() {
        *last = last.trim_end().to_string();
    }
    line.retain(|p| !matches!(p, Piece::Text(t) if t.is_empty()));
    line
}
