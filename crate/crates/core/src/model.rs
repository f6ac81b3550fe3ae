//! Shared data model: source files, spans, name sorts, occurrences,
//! diagnostics and anchor fragments.

use std::fmt;

use crate::Error;

/// Dense handle for a [`SourceFile`] within one project.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FileId(pub u32);

impl FileId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A source file: normalized project-relative path plus contents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFile {
    id: FileId,
    path: String,
    text: String,
    line_starts: Vec<usize>,
}

impl SourceFile {
    /// Creates a source file. The path is normalized (`\` becomes `/`,
    /// `.` segments dropped); `..` segments are rejected.
    pub fn new(id: FileId, path: &str, text: impl Into<String>) -> Result<Self, Error> {
        let path = normalize_path(path)?;
        let text = text.into();
        let line_starts = std::iter::once(0)
            .chain(text.match_indices('\n').map(|(i, _)| i + 1))
            .collect();
        Ok(SourceFile {
            id,
            path,
            text,
            line_starts,
        })
    }

    pub fn id(&self) -> FileId {
        self.id
    }

    pub fn path(&self) -> &str {
        &self.path
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn len(&self) -> usize {
        self.text.len()
    }

    pub fn is_empty(&self) -> bool {
        self.text.is_empty()
    }

    /// Byte offsets at which each line starts. Strictly increasing, first is 0.
    pub fn line_starts(&self) -> &[usize] {
        &self.line_starts
    }

    pub fn slice(&self, span: Span) -> &str {
        &self.text[span.start..span.end]
    }

    /// 1-based (line, column) of a byte offset; columns count characters.
    pub fn line_col_of(&self, offset: usize) -> Result<(usize, usize), Error> {
        if offset > self.text.len() || !self.text.is_char_boundary(offset) {
            return Err(Error::Usage(format!(
                "offset {offset} is not a character boundary of {} (length {})",
                self.path,
                self.text.len()
            )));
        }
        let line = self.line_starts.partition_point(|&s| s <= offset) - 1;
        let col = self.text[self.line_starts[line]..offset].chars().count();
        Ok((line + 1, col + 1))
    }

    /// Inverse of [`line_col_of`](Self::line_col_of). Returns `None` when the
    /// position lies outside the file or past the end of its line.
    pub fn offset_of(&self, line: usize, col: usize) -> Option<usize> {
        if line == 0 || col == 0 || line > self.line_starts.len() {
            return None;
        }
        let start = self.line_starts[line - 1];
        let end = self
            .line_starts
            .get(line)
            .map_or(self.text.len(), |&next| next - 1);
        let line_text = &self.text[start..end];
        if col - 1 == line_text.chars().count() {
            return Some(end);
        }
        line_text
            .char_indices()
            .nth(col - 1)
            .map(|(i, _)| start + i)
    }
}

/// Normalizes a project-relative path: `/` separators, no `.` segments, no
/// empty segments. `..` and absolute paths are rejected.
pub fn normalize_path(path: &str) -> Result<String, Error> {
    let mut parts = Vec::new();
    for seg in path.split(['/', '\\']) {
        match seg {
            "" | "." => {}
            ".." => {
                return Err(Error::Usage(format!(
                    "path `{path}` escapes the project root"
                )))
            }
            s => parts.push(s),
        }
    }
    if parts.is_empty() {
        return Err(Error::Usage(format!("empty source path `{path}`")));
    }
    Ok(parts.join("/"))
}

/// Half-open byte range in one file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub file: FileId,
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(file: FileId, start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Span { file, start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn contains(&self, offset: usize) -> bool {
        self.start <= offset && offset < self.end
    }

    pub fn to(self, other: Span) -> Span {
        Span::new(self.file, self.start, other.end)
    }
}

/// The four name namespaces, which double as highlight classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NameSort {
    Funcon,
    Syntax,
    Semantics,
    MetaVar,
}

impl NameSort {
    pub const ALL: [NameSort; 4] = [
        NameSort::Funcon,
        NameSort::Syntax,
        NameSort::Semantics,
        NameSort::MetaVar,
    ];

    /// Prefix used in anchor fragments and on the command line.
    pub fn prefix(self) -> &'static str {
        match self {
            NameSort::Funcon => "funcon",
            NameSort::Syntax => "syntax",
            NameSort::Semantics => "semantics",
            NameSort::MetaVar => "var",
        }
    }

    pub fn css_class(self) -> &'static str {
        match self {
            NameSort::Funcon => "cbs-funcon",
            NameSort::Syntax => "cbs-syntax",
            NameSort::Semantics => "cbs-semantics",
            NameSort::MetaVar => "cbs-var",
        }
    }

    pub fn from_prefix(s: &str) -> Option<NameSort> {
        NameSort::ALL.into_iter().find(|sort| sort.prefix() == s)
    }
}

impl fmt::Display for NameSort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.prefix())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Declaration,
    Reference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Context {
    Formal,
    EmbeddedInComment,
}

/// One occurrence of a name in source text.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NameOccurrence {
    pub sort: NameSort,
    pub name: String,
    pub span: Span,
    pub role: Role,
    pub context: Context,
}

impl NameOccurrence {
    pub fn is_declaration(&self) -> bool {
        self.role == Role::Declaration
    }

    pub fn is_reference(&self) -> bool {
        self.role == Role::Reference
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DiagnosticCode {
    /// Unresolved reference.
    E001,
    /// Duplicate declaration.
    E002,
    /// Arity mismatch.
    E003,
    /// Sort mismatch.
    E004,
    /// Parse error.
    E005,
    /// Unused declaration.
    W001,
}

impl DiagnosticCode {
    pub fn severity(self) -> Severity {
        match self {
            DiagnosticCode::W001 => Severity::Warning,
            _ => Severity::Error,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::E001 => "E001",
            DiagnosticCode::E002 => "E002",
            DiagnosticCode::E003 => "E003",
            DiagnosticCode::E004 => "E004",
            DiagnosticCode::E005 => "E005",
            DiagnosticCode::W001 => "W001",
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    pub message: String,
    pub span: Span,
    pub related: Option<Span>,
}

impl Diagnostic {
    pub fn new(code: DiagnosticCode, span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            code,
            message: message.into(),
            span,
            related: None,
        }
    }

    pub fn with_related(mut self, related: Span) -> Self {
        self.related = Some(related);
        self
    }

    pub fn severity(&self) -> Severity {
        self.code.severity()
    }

    pub fn is_error(&self) -> bool {
        self.severity() == Severity::Error
    }

    /// `{path}:{line}:{col}: {severity}[{code}]: {message}`
    pub fn render(&self, files: &[SourceFile]) -> String {
        let file = &files[self.span.file.index()];
        let (line, col) = file
            .line_col_of(self.span.start)
            .expect("diagnostic span lies inside its file");
        format!(
            "{}:{}:{}: {}[{}]: {}",
            file.path(),
            line,
            col,
            self.severity().as_str(),
            self.code,
            self.message
        )
    }
}

/// Sorts diagnostics by (file path, span start, code).
pub fn sort_diagnostics(diags: &mut [Diagnostic], files: &[SourceFile]) {
    diags.sort_by(|a, b| {
        let pa = files[a.span.file.index()].path();
        let pb = files[b.span.file.index()].path();
        pa.cmp(pb)
            .then(a.span.start.cmp(&b.span.start))
            .then(a.code.cmp(&b.code))
            .then_with(|| a.message.cmp(&b.message))
            .then_with(|| a.related.cmp(&b.related))
    });
}

/// Link target for one declaration in the generated site.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Anchor {
    /// Output path relative to the site root.
    pub file: String,
    pub fragment: String,
}

/// Maps a (sort, name) pair to an anchor fragment.
///
/// Lowercase letters, digits and `-` pass through; an uppercase letter `C`
/// becomes `_c`, except `U` which becomes `_u_`; any other character becomes
/// `_u` followed by its code point as four lowercase hex digits.
pub fn sanitize_fragment(sort: NameSort, name: &str) -> String {
    let mut out = String::with_capacity(sort.prefix().len() + 1 + name.len() * 2);
    out.push_str(sort.prefix());
    out.push('-');
    for c in name.chars() {
        match c {
            'a'..='z' | '0'..='9' | '-' => out.push(c),
            'U' => out.push_str("_u_"),
            'A'..='Z' => {
                out.push('_');
                out.push(c.to_ascii_lowercase());
            }
            _ => {
                use fmt::Write;
                let _ = write!(out, "_u{:04x}", c as u32);
            }
        }
    }
    out
}
