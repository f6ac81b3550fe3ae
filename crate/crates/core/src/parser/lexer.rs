//! Tokenizer for mini-CBS. Whitespace is skipped; comments come out as single
//! tokens so the parser can keep them as blocks.

use crate::model::{FileId, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keyword {
    Funcon,
    Alias,
    Type,
    MetaVariables,
    Syntax,
    Semantics,
    Rule,
}

impl Keyword {
    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Funcon => "Funcon",
            Keyword::Alias => "Alias",
            Keyword::Type => "Type",
            Keyword::MetaVariables => "Meta-variables",
            Keyword::Syntax => "Syntax",
            Keyword::Semantics => "Semantics",
            Keyword::Rule => "Rule",
        }
    }

    fn from_upper(word: &str) -> Option<Keyword> {
        Some(match word {
            "Funcon" => Keyword::Funcon,
            "Alias" => Keyword::Alias,
            "Type" => Keyword::Type,
            "Syntax" => Keyword::Syntax,
            "Semantics" => Keyword::Semantics,
            "Rule" => Keyword::Rule,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Keyword(Keyword),
    /// `[a-z][a-z0-9]*(-[a-z0-9]+)*`
    Lower,
    /// `[A-Z][A-Za-z0-9]*'*`
    Upper,
    Underscore,
    Str,
    Int,
    LParen,
    RParen,
    Comma,
    Colon,
    Eq,
    /// `=>`
    FatArrow,
    /// `~>`
    Squiggle,
    /// `::=`
    Define,
    /// `<:`
    Subtype,
    Bar,
    /// `[[`
    LBrackets,
    /// `]]`
    RBrackets,
    /// `--` opening a labelled transition
    TransOpen,
    /// `->` closing a labelled transition
    Arrow,
    /// `--->`, an unlabelled transition
    LongArrow,
    /// four or more dashes
    DashLine,
    Comment {
        terminated: bool,
    },
    /// A character that starts no token.
    Unknown,
    /// A string literal missing its closing quote.
    UnterminatedStr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

impl Token {
    pub fn starts_block(&self) -> bool {
        matches!(self.kind, TokenKind::Keyword(_) | TokenKind::Comment { .. })
    }
}

pub fn tokenize(file: FileId, text: &str) -> Vec<Token> {
    Lexer {
        file,
        src: text.as_bytes(),
        text,
        pos: 0,
    }
    .run()
}

struct Lexer<'a> {
    file: FileId,
    src: &'a [u8],
    text: &'a str,
    pos: usize,
}

impl Lexer<'_> {
    fn run(mut self) -> Vec<Token> {
        let mut tokens = Vec::new();
        loop {
            while self.peek(0).is_some_and(|b| b.is_ascii_whitespace()) {
                self.pos += 1;
            }
            if self.pos >= self.src.len() {
                return tokens;
            }
            let start = self.pos;
            let kind = self.next_kind();
            tokens.push(Token {
                kind,
                span: Span::new(self.file, start, self.pos),
            });
        }
    }

    fn peek(&self, ahead: usize) -> Option<u8> {
        self.src.get(self.pos + ahead).copied()
    }

    fn starts_with(&self, s: &str) -> bool {
        self.src[self.pos..].starts_with(s.as_bytes())
    }

    fn next_kind(&mut self) -> TokenKind {
        let b = self.src[self.pos];
        match b {
            b'/' if self.peek(1) == Some(b'*') => self.comment(),
            b'a'..=b'z' => {
                self.lower_word();
                TokenKind::Lower
            }
            b'A'..=b'Z' => self.upper_word(),
            b'0'..=b'9' => {
                while self.peek(0).is_some_and(|b| b.is_ascii_digit()) {
                    self.pos += 1;
                }
                TokenKind::Int
            }
            b'"' | b'\'' => self.string(b),
            b'-' => self.dashes(),
            _ => self.punct(),
        }
    }

    fn comment(&mut self) -> TokenKind {
        self.pos += 2;
        match self.text[self.pos..].find("*/") {
            Some(i) => {
                self.pos += i + 2;
                TokenKind::Comment { terminated: true }
            }
            None => {
                self.pos = self.src.len();
                TokenKind::Comment { terminated: false }
            }
        }
    }

    fn lower_word(&mut self) {
        self.pos += 1;
        loop {
            match self.peek(0) {
                Some(b'a'..=b'z' | b'0'..=b'9') => self.pos += 1,
                Some(b'-') if matches!(self.peek(1), Some(b'a'..=b'z' | b'0'..=b'9')) => {
                    self.pos += 2
                }
                _ => return,
            }
        }
    }

    fn upper_word(&mut self) -> TokenKind {
        if self.starts_with("Meta-variables")
            && !self
                .peek("Meta-variables".len())
                .is_some_and(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'\'')
        {
            self.pos += "Meta-variables".len();
            return TokenKind::Keyword(Keyword::MetaVariables);
        }
        let start = self.pos;
        self.pos += 1;
        while self.peek(0).is_some_and(|b| b.is_ascii_alphanumeric()) {
            self.pos += 1;
        }
        let word_end = self.pos;
        while self.peek(0) == Some(b'\'') {
            self.pos += 1;
        }
        if word_end == self.pos {
            if let Some(kw) = Keyword::from_upper(&self.text[start..word_end]) {
                return TokenKind::Keyword(kw);
            }
        }
        TokenKind::Upper
    }

    fn string(&mut self, quote: u8) -> TokenKind {
        self.pos += 1;
        while let Some(b) = self.peek(0) {
            match b {
                b'\\' if self.peek(1).is_some_and(|b| b != b'\n') => self.pos += 2,
                b'\n' => return TokenKind::UnterminatedStr,
                _ if b == quote => {
                    self.pos += 1;
                    return TokenKind::Str;
                }
                _ => self.pos += 1,
            }
        }
        TokenKind::UnterminatedStr
    }

    fn dashes(&mut self) -> TokenKind {
        let mut n = 0;
        while self.peek(n) == Some(b'-') {
            n += 1;
        }
        let arrow = self.peek(n) == Some(b'>');
        match (n, arrow) {
            (1, true) => {
                self.pos += 2;
                TokenKind::Arrow
            }
            (3, true) => {
                self.pos += 4;
                TokenKind::LongArrow
            }
            (2, _) => {
                self.pos += 2;
                TokenKind::TransOpen
            }
            (n, _) if n >= 4 => {
                self.pos += n;
                TokenKind::DashLine
            }
            _ => {
                self.pos += n;
                TokenKind::Unknown
            }
        }
    }

    fn punct(&mut self) -> TokenKind {
        const TABLE: &[(&str, TokenKind)] = &[
            ("::=", TokenKind::Define),
            ("=>", TokenKind::FatArrow),
            ("~>", TokenKind::Squiggle),
            ("<:", TokenKind::Subtype),
            ("[[", TokenKind::LBrackets),
            ("]]", TokenKind::RBrackets),
            ("(", TokenKind::LParen),
            (")", TokenKind::RParen),
            (",", TokenKind::Comma),
            (":", TokenKind::Colon),
            ("=", TokenKind::Eq),
            ("|", TokenKind::Bar),
            ("_", TokenKind::Underscore),
        ];
        for (text, kind) in TABLE {
            if self.starts_with(text) {
                self.pos += text.len();
                return *kind;
            }
        }
        let c = self.text[self.pos..].chars().next().expect("not at end");
        self.pos += c.len_utf8();
        TokenKind::Unknown
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<(TokenKind, &str)> {
        tokenize(FileId(0), text)
            .into_iter()
            .map(|t| (t.kind, &text[t.span.start..t.span.end]))
            .collect()
    }

    #[test]
    fn hyphenated_names_stop_before_transition_dashes() {
        use TokenKind::*;
        assert_eq!(
            kinds("alloc-init X--give->X'"),
            vec![
                (Lower, "alloc-init"),
                (Upper, "X"),
                (TransOpen, "--"),
                (Lower, "give"),
                (Arrow, "->"),
                (Upper, "X'"),
            ]
        );
    }

    #[test]
    fn dash_runs() {
        use TokenKind::*;
        assert_eq!(kinds("----"), vec![(DashLine, "----")]);
        assert_eq!(kinds("--->"), vec![(LongArrow, "--->")]);
        assert_eq!(kinds("---"), vec![(Unknown, "---")]);
        assert_eq!(kinds("- x"), vec![(Unknown, "-"), (Lower, "x")]);
    }

    #[test]
    fn keywords_and_comments() {
        use TokenKind::*;
        assert_eq!(
            kinds("Meta-variables T /* a `b` */ Rules"),
            vec![
                (Keyword(super::Keyword::MetaVariables), "Meta-variables"),
                (Upper, "T"),
                (Comment { terminated: true }, "/* a `b` */"),
                (Upper, "Rules"),
            ]
        );
        assert_eq!(
            kinds("/* open"),
            vec![(Comment { terminated: false }, "/* open")]
        );
    }

    #[test]
    fn non_ascii_is_unknown() {
        use TokenKind::*;
        assert_eq!(kinds("scopé"), vec![(Lower, "scop"), (Unknown, "é")]);
        assert_eq!(kinds("\"é\""), vec![(Str, "\"é\"")]);
    }
}
