//! Deterministic recursive-descent parser for mini-CBS.
//!
//! Every name token becomes a [`NameOccurrence`] whose sort follows from its
//! lexical class and grammar position. Malformed declarations produce an
//! `E005` diagnostic and an [`BlockKind::Error`] block; parsing resumes at the
//! next keyword or comment.

mod ast;
pub mod lexer;

pub use ast::*;

use crate::model::{
    Context, Diagnostic, DiagnosticCode, FileId, NameOccurrence, NameSort, Role, SourceFile, Span,
};
use lexer::{Keyword, Token, TokenKind};

pub fn parse(file: &SourceFile) -> (Document, Vec<Diagnostic>) {
    let tokens = lexer::tokenize(file.id(), file.text());
    let mut p = Parser {
        file: file.id(),
        text: file.text(),
        tokens,
        pos: 0,
        diags: Vec::new(),
    };
    let mut blocks = p.document();
    attach_aliases(&mut blocks);
    (
        Document {
            file: file.id(),
            blocks,
        },
        p.diags,
    )
}

struct ParseError {
    span: Span,
    message: String,
}

type PResult<T> = Result<T, ParseError>;

struct Parser<'a> {
    file: FileId,
    text: &'a str,
    tokens: Vec<Token>,
    pos: usize,
    diags: Vec<Diagnostic>,
}

impl<'a> Parser<'a> {
    fn document(&mut self) -> Vec<Block> {
        let mut blocks = Vec::new();
        while let Some(tok) = self.peek() {
            let start = self.pos;
            let result = match tok.kind {
                TokenKind::Comment { terminated } => {
                    self.pos += 1;
                    if !terminated {
                        self.error(tok.span, "unterminated comment");
                    }
                    Ok(self.comment(tok))
                }
                TokenKind::Keyword(kw) => self.declaration(kw, tok),
                _ => Err(self.unexpected(tok, "a declaration or comment")),
            };
            match result {
                Ok(block) => {
                    blocks.push(block);
                    if let Some(next) = self.peek().filter(|t| !t.starts_block()) {
                        let err = self.unexpected(next, "a declaration or comment");
                        let from = self.pos;
                        blocks.push(self.recover(from, err));
                    }
                }
                Err(err) => blocks.push(self.recover(start, err)),
            }
        }
        blocks
    }

    /// Reports `err`, then skips from token `from` to the next block start.
    fn recover(&mut self, from: usize, err: ParseError) -> Block {
        self.error(err.span, err.message);
        let mut end = from + 1;
        while end < self.tokens.len() && !self.tokens[end].starts_block() {
            end += 1;
        }
        self.pos = end;
        Block {
            span: self.tokens[from].span.to(self.tokens[end - 1].span),
            keyword: None,
            kind: BlockKind::Error,
        }
    }

    fn error(&mut self, span: Span, message: impl Into<String>) {
        self.diags
            .push(Diagnostic::new(DiagnosticCode::E005, span, message));
    }

    fn peek(&self) -> Option<Token> {
        self.tokens.get(self.pos).copied()
    }

    fn peek_kind(&self) -> Option<TokenKind> {
        self.peek().map(|t| t.kind)
    }

    fn slice(&self, span: Span) -> &'a str {
        &self.text[span.start..span.end]
    }

    fn eof_span(&self) -> Span {
        Span::new(self.file, self.text.len(), self.text.len())
    }

    fn unexpected(&self, tok: Token, expected: &str) -> ParseError {
        let text = self.slice(tok.span);
        let found = match tok.kind {
            TokenKind::Unknown if !text.is_ascii() => {
                format!("non-ASCII character `{text}` outside comments and strings")
            }
            TokenKind::UnterminatedStr => "unterminated string literal".to_string(),
            TokenKind::Comment { .. } => "a comment".to_string(),
            _ => format!("`{text}`"),
        };
        ParseError {
            span: tok.span,
            message: format!("expected {expected}, found {found}"),
        }
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> PResult<Token> {
        match self.peek() {
            Some(tok) if tok.kind == kind => {
                self.pos += 1;
                Ok(tok)
            }
            Some(tok) => Err(self.unexpected(tok, what)),
            None => Err(ParseError {
                span: self.eof_span(),
                message: format!("expected {what}, found end of file"),
            }),
        }
    }

    fn eat(&mut self, kind: TokenKind) -> Option<Token> {
        if self.peek_kind() == Some(kind) {
            self.pos += 1;
            self.tokens.get(self.pos - 1).copied()
        } else {
            None
        }
    }

    fn last_span(&self) -> Span {
        self.tokens[self.pos - 1].span
    }

    fn occurrence(&self, tok: Token, sort: NameSort, role: Role) -> NameOccurrence {
        NameOccurrence {
            sort,
            name: self.slice(tok.span).to_string(),
            span: tok.span,
            role,
            context: Context::Formal,
        }
    }

    fn lower_name(&mut self, sort: NameSort, role: Role, what: &str) -> PResult<NameOccurrence> {
        let tok = self.expect(TokenKind::Lower, what)?;
        Ok(self.occurrence(tok, sort, role))
    }

    fn sort_name(&mut self, role: Role) -> PResult<NameOccurrence> {
        let tok = self.expect(TokenKind::Upper, "a syntax sort name")?;
        if self.slice(tok.span).ends_with('\'') {
            return Err(ParseError {
                span: tok.span,
                message: "syntax sort names cannot end in primes".into(),
            });
        }
        Ok(self.occurrence(tok, NameSort::Syntax, role))
    }

    fn comment(&self, tok: Token) -> Block {
        let text = self.slice(tok.span);
        let body_end = if text.len() >= 4 && text.ends_with("*/") {
            tok.span.end - 2
        } else {
            tok.span.end
        };
        let body = Span::new(self.file, tok.span.start + 2, body_end);
        Block {
            span: tok.span,
            keyword: None,
            kind: BlockKind::Comment(Comment {
                body,
                segments: comment_segments(self.file, self.text, body),
            }),
        }
    }

    fn declaration(&mut self, kw: Keyword, kw_tok: Token) -> PResult<Block> {
        self.pos += 1;
        let kind = match kw {
            Keyword::Funcon => BlockKind::Funcon(self.funcon()?),
            Keyword::Alias => {
                let alias =
                    self.lower_name(NameSort::Funcon, Role::Declaration, "an alias name")?;
                self.expect(TokenKind::Eq, "`=`")?;
                let target = self.lower_name(NameSort::Funcon, Role::Reference, "a funcon name")?;
                BlockKind::Alias(AliasDecl { alias, target })
            }
            Keyword::Type => {
                let name = self.lower_name(NameSort::Funcon, Role::Declaration, "a type name")?;
                let definition = match self.eat(TokenKind::Squiggle) {
                    Some(_) => Some(self.type_term()?),
                    None => None,
                };
                BlockKind::Type(TypeDecl { name, definition })
            }
            Keyword::MetaVariables => BlockKind::MetaVars(self.meta_vars()?),
            Keyword::Syntax => BlockKind::Syntax(self.syntax()?),
            Keyword::Semantics => {
                let name = self.lower_name(
                    NameSort::Semantics,
                    Role::Declaration,
                    "a semantic function name",
                )?;
                self.expect(TokenKind::LBrackets, "`[[`")?;
                self.expect(TokenKind::Underscore, "`_`")?;
                self.expect(TokenKind::Colon, "`:`")?;
                let arg_sort = self.sort_name(Role::Reference)?;
                self.expect(TokenKind::RBrackets, "`]]`")?;
                self.expect(TokenKind::Colon, "`:`")?;
                let result = self.type_term()?;
                BlockKind::Semantics(SemanticsDecl {
                    name,
                    arg_sort,
                    result,
                })
            }
            Keyword::Rule => BlockKind::Rule(self.rule()?),
        };
        Ok(Block {
            span: kw_tok.span.to(self.last_span()),
            keyword: Some(kw_tok.span),
            kind,
        })
    }

    fn funcon(&mut self) -> PResult<FunconDecl> {
        let name = self.lower_name(NameSort::Funcon, Role::Declaration, "a funcon name")?;
        let mut params = Vec::new();
        if self.eat(TokenKind::LParen).is_some() {
            loop {
                self.expect(TokenKind::Underscore, "`_`")?;
                self.expect(TokenKind::Colon, "`:`")?;
                params.push(self.type_term()?);
                if self.eat(TokenKind::Comma).is_none() {
                    break;
                }
            }
            self.expect(TokenKind::RParen, "`,` or `)`")?;
        }
        self.expect(TokenKind::Colon, "`:`")?;
        let result = self.type_term()?;
        Ok(FunconDecl {
            name,
            params,
            result,
            aliases: Vec::new(),
        })
    }

    fn meta_vars(&mut self) -> PResult<MetaVarsDecl> {
        let mut bindings = Vec::new();
        loop {
            let tok = self.expect(TokenKind::Upper, "a meta-variable")?;
            let var = self.occurrence(tok, NameSort::MetaVar, Role::Declaration);
            self.expect(TokenKind::Subtype, "`<:`")?;
            let bound = if self.peek_kind() == Some(TokenKind::Upper) {
                let occ = self.sort_name(Role::Reference)?;
                TypeTerm {
                    computes: false,
                    span: occ.span,
                    term: Term::Sort(occ),
                }
            } else {
                self.type_term()?
            };
            bindings.push(MetaVarBinding { var, bound });
            if self.peek_kind() != Some(TokenKind::Upper) {
                return Ok(MetaVarsDecl { bindings });
            }
        }
    }

    fn syntax(&mut self) -> PResult<SyntaxDecl> {
        let name = self.sort_name(Role::Declaration)?;
        self.expect(TokenKind::Define, "`::=`")?;
        let mut alternatives = Vec::new();
        loop {
            let mut items = Vec::new();
            loop {
                match self.peek_kind() {
                    Some(TokenKind::Upper) => {
                        items.push(ProdItem::Sort(self.sort_name(Role::Reference)?))
                    }
                    Some(TokenKind::Str) => {
                        self.pos += 1;
                        items.push(ProdItem::Terminal(self.last_span()));
                    }
                    _ => break,
                }
            }
            if items.is_empty() {
                return Err(self.expected_here("a production"));
            }
            alternatives.push(Production { items });
            if self.eat(TokenKind::Bar).is_none() {
                return Ok(SyntaxDecl { name, alternatives });
            }
        }
    }

    fn rule(&mut self) -> PResult<RuleDecl> {
        let mut formulas = Vec::new();
        while self.at_term_start() {
            formulas.push(self.formula()?);
        }
        if let Some(dash) = self.eat(TokenKind::DashLine) {
            if formulas.is_empty() {
                return Err(ParseError {
                    span: dash.span,
                    message: "expected premises before the dash line".into(),
                });
            }
            let conclusion = self.formula()?;
            return Ok(RuleDecl {
                premises: formulas,
                dashes: Some(dash.span),
                conclusion,
            });
        }
        match formulas.len() {
            0 => Err(self.expected_here("a formula")),
            1 => Ok(RuleDecl {
                premises: Vec::new(),
                dashes: None,
                conclusion: formulas.pop().expect("one formula"),
            }),
            _ => Err(ParseError {
                span: formulas[1].span(),
                message: "expected a dash line between premises and conclusion".into(),
            }),
        }
    }

    fn expected_here(&self, what: &str) -> ParseError {
        match self.peek() {
            Some(tok) => self.unexpected(tok, what),
            None => ParseError {
                span: self.eof_span(),
                message: format!("expected {what}, found end of file"),
            },
        }
    }

    fn at_term_start(&self) -> bool {
        matches!(
            self.peek_kind(),
            Some(TokenKind::Lower | TokenKind::Upper | TokenKind::Str | TokenKind::Int)
        )
    }

    fn formula(&mut self) -> PResult<Formula> {
        let lhs = self.term()?;
        Ok(match self.peek_kind() {
            Some(TokenKind::TransOpen) => {
                self.pos += 1;
                let label = self.term()?;
                self.expect(TokenKind::Arrow, "`->`")?;
                let rhs = self.term()?;
                Formula::Transition {
                    lhs,
                    label: Some(label),
                    rhs,
                }
            }
            Some(TokenKind::LongArrow) => {
                self.pos += 1;
                let rhs = self.term()?;
                Formula::Transition {
                    lhs,
                    label: None,
                    rhs,
                }
            }
            Some(TokenKind::Eq) => {
                self.pos += 1;
                Formula::Equation {
                    lhs,
                    rhs: self.term()?,
                }
            }
            Some(TokenKind::Squiggle) => {
                self.pos += 1;
                Formula::Rewrite {
                    lhs,
                    rhs: self.term()?,
                }
            }
            _ => Formula::Bare(lhs),
        })
    }

    fn term(&mut self) -> PResult<Term> {
        let Some(tok) = self.peek() else {
            return Err(self.expected_here("a term"));
        };
        match tok.kind {
            TokenKind::Lower => {
                self.pos += 1;
                if self.eat(TokenKind::LBrackets).is_some() {
                    let fun = self.occurrence(tok, NameSort::Semantics, Role::Reference);
                    let arg = self.term()?;
                    let close = self.expect(TokenKind::RBrackets, "`]]`")?;
                    return Ok(Term::SemApply {
                        fun,
                        arg: Box::new(arg),
                        span: tok.span.to(close.span),
                    });
                }
                let head = self.occurrence(tok, NameSort::Funcon, Role::Reference);
                let mut args = Vec::new();
                let mut span = tok.span;
                if self.eat(TokenKind::LParen).is_some() {
                    loop {
                        args.push(self.term()?);
                        if self.eat(TokenKind::Comma).is_none() {
                            break;
                        }
                    }
                    span = span.to(self.expect(TokenKind::RParen, "`,` or `)`")?.span);
                }
                Ok(Term::Apply { head, args, span })
            }
            TokenKind::Upper => {
                self.pos += 1;
                Ok(Term::Var(self.occurrence(
                    tok,
                    NameSort::MetaVar,
                    Role::Reference,
                )))
            }
            TokenKind::Str | TokenKind::Int => {
                self.pos += 1;
                let kind = if tok.kind == TokenKind::Str {
                    LiteralKind::Str
                } else {
                    LiteralKind::Int
                };
                Ok(Term::Literal {
                    kind,
                    span: tok.span,
                })
            }
            _ => Err(self.unexpected(tok, "a term")),
        }
    }

    fn type_term(&mut self) -> PResult<TypeTerm> {
        let arrow = self.eat(TokenKind::FatArrow);
        let term = self.term()?;
        check_type_term(&term)?;
        let span = match arrow {
            Some(a) => a.span.to(term.span()),
            None => term.span(),
        };
        Ok(TypeTerm {
            computes: arrow.is_some(),
            term,
            span,
        })
    }
}

fn check_type_term(t: &Term) -> PResult<()> {
    match t {
        Term::Apply { args, .. } => args.iter().try_for_each(check_type_term),
        Term::Var(_) | Term::Sort(_) => Ok(()),
        Term::SemApply { span, .. } | Term::Literal { span, .. } => Err(ParseError {
            span: *span,
            message: "expected a type, found a non-type term".into(),
        }),
    }
}

fn is_lower_name(s: &str) -> bool {
    let b = s.as_bytes();
    !b.is_empty()
        && b[0].is_ascii_lowercase()
        && b.iter()
            .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || *c == b'-')
        && !s.ends_with('-')
        && !s.contains("--")
}

fn is_sort_name(s: &str) -> bool {
    let b = s.as_bytes();
    !b.is_empty() && b[0].is_ascii_uppercase() && b.iter().all(|c| c.is_ascii_alphanumeric())
}

/// Splits a comment body into text and back-ticked references.
///
/// `` `name` `` refers to a funcon, `` `Syntax:Name` `` to a syntax sort and
/// `` `Semantics:name` `` to a semantic function. Back-ticked text that is not
/// a well-formed name stays text.
fn comment_segments(file: FileId, text: &str, body: Span) -> Vec<Segment> {
    let mut segments = Vec::new();
    let mut text_start = body.start;
    let mut i = body.start;
    let inner = &text[..body.end];
    while let Some(open) = inner[i..].find('`').map(|k| i + k) {
        let Some(close) = inner[open + 1..].find('`').map(|k| open + 1 + k) else {
            break;
        };
        let content = &inner[open + 1..close];
        let (sort, name_offset) = if let Some(rest) = content.strip_prefix("Syntax:") {
            (
                is_sort_name(rest).then_some(NameSort::Syntax),
                content.len() - rest.len(),
            )
        } else if let Some(rest) = content.strip_prefix("Semantics:") {
            (
                is_lower_name(rest).then_some(NameSort::Semantics),
                content.len() - rest.len(),
            )
        } else {
            (is_lower_name(content).then_some(NameSort::Funcon), 0)
        };
        if let Some(sort) = sort {
            if text_start < open {
                segments.push(Segment::Text(Span::new(file, text_start, open)));
            }
            let name_start = open + 1 + name_offset;
            segments.push(Segment::EmbeddedRef {
                span: Span::new(file, open, close + 1),
                name: NameOccurrence {
                    sort,
                    name: inner[name_start..close].to_string(),
                    span: Span::new(file, name_start, close),
                    role: Role::Reference,
                    context: Context::EmbeddedInComment,
                },
            });
            text_start = close + 1;
        }
        i = close + 1;
    }
    if text_start < body.end {
        segments.push(Segment::Text(Span::new(file, text_start, body.end)));
    }
    segments
}

/// Records each alias on the nearest preceding funcon declaration (ignoring
/// comments) when that declaration is the alias target.
fn attach_aliases(blocks: &mut [Block]) {
    let mut last_funcon: Option<usize> = None;
    for i in 0..blocks.len() {
        match &blocks[i].kind {
            BlockKind::Funcon(_) => last_funcon = Some(i),
            BlockKind::Comment(_) => {}
            BlockKind::Alias(a) => {
                let (alias, target) = (a.alias.name.clone(), a.target.name.clone());
                if let Some(j) = last_funcon {
                    if let BlockKind::Funcon(f) = &mut blocks[j].kind {
                        if f.name.name == target {
                            f.aliases.push(alias);
                            continue;
                        }
                    }
                }
                last_funcon = None;
            }
            _ => last_funcon = None,
        }
    }
}
