//! Shared lexical machinery for the small text formats used by the crate
//! (feature models, class diagrams, variant specs and generated code).

use std::fmt;

/// A 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Pos {
    pub line: u32,
    pub column: u32,
}

impl Pos {
    pub fn new(line: u32, column: u32) -> Self {
        Self { line, column }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// A syntax error with the position of the offending token.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at {pos}: {message}")]
pub struct SyntaxError {
    pub pos: Pos,
    pub message: String,
}

impl SyntaxError {
    pub fn new(pos: Pos, message: impl Into<String>) -> Self {
        Self {
            pos,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Token<'a> {
    Ident(&'a str),
    Sym(&'static str),
    Str(String),
    Eof,
}

impl fmt::Display for Token<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) => write!(f, "`{s}`"),
            Token::Sym(s) => write!(f, "`{s}`"),
            Token::Str(s) => write!(f, "string {s:?}"),
            Token::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Cursor {
    offset: usize,
    line: u32,
    column: u32,
}

/// On-demand scanner. Each format supplies its own symbol table; symbols must
/// be listed longest first so that e.g. `<<` wins over `<`.
pub(crate) struct Scanner<'a> {
    src: &'a str,
    at: Cursor,
    symbols: &'static [&'static str],
}

impl<'a> Scanner<'a> {
    pub fn new(src: &'a str, symbols: &'static [&'static str]) -> Self {
        Self {
            src,
            at: Cursor {
                offset: 0,
                line: 1,
                column: 1,
            },
            symbols,
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.at.offset..]
    }

    fn bump(&mut self, n: usize) {
        for ch in self.src[self.at.offset..self.at.offset + n].chars() {
            if ch == '\n' {
                self.at.line += 1;
                self.at.column = 1;
            } else {
                self.at.column += 1;
            }
        }
        self.at.offset += n;
    }

    fn skip_trivia(&mut self) {
        loop {
            let rest = self.rest();
            let ws = rest.len() - rest.trim_start().len();
            if ws > 0 {
                self.bump(ws);
                continue;
            }
            if rest.starts_with("//") {
                let len = rest.find('\n').unwrap_or(rest.len());
                self.bump(len);
                continue;
            }
            break;
        }
    }

    pub fn pos(&mut self) -> Pos {
        self.skip_trivia();
        Pos::new(self.at.line, self.at.column)
    }

    pub fn next(&mut self) -> Result<(Token<'a>, Pos), SyntaxError> {
        self.skip_trivia();
        let pos = Pos::new(self.at.line, self.at.column);
        let rest = self.rest();
        let Some(first) = rest.chars().next() else {
            return Ok((Token::Eof, pos));
        };
        if first.is_ascii_alphabetic() || first == '_' {
            let len = rest
                .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
                .unwrap_or(rest.len());
            self.bump(len);
            return Ok((Token::Ident(&rest[..len]), pos));
        }
        if first == '"' {
            return self.string(pos);
        }
        for sym in self.symbols {
            if rest.starts_with(sym) {
                self.bump(sym.len());
                return Ok((Token::Sym(sym), pos));
            }
        }
        Err(SyntaxError::new(pos, format!("unexpected character {first:?}")))
    }

    fn string(&mut self, pos: Pos) -> Result<(Token<'a>, Pos), SyntaxError> {
        let rest = self.rest();
        let mut out = String::new();
        let mut chars = rest.char_indices().skip(1);
        while let Some((i, c)) = chars.next() {
            match c {
                '"' => {
                    self.bump(i + 1);
                    return Ok((Token::Str(out), pos));
                }
                '\\' => match chars.next() {
                    Some((_, 'n')) => out.push('\n'),
                    Some((_, 't')) => out.push('\t'),
                    Some((_, c @ ('"' | '\\'))) => out.push(c),
                    Some((_, other)) => {
                        return Err(SyntaxError::new(
                            pos,
                            format!("unknown escape `\\{other}` in string"),
                        ))
                    }
                    None => break,
                },
                c => out.push(c),
            }
        }
        Err(SyntaxError::new(pos, "unterminated string literal"))
    }

    pub fn peek(&mut self) -> Result<(Token<'a>, Pos), SyntaxError> {
        let saved = self.at;
        let tok = self.next();
        self.at = saved;
        tok
    }

    /// Looks `n` tokens ahead (0 = next token).
    pub fn peek_nth(&mut self, n: usize) -> Result<Token<'a>, SyntaxError> {
        let saved = self.at;
        let mut tok = Token::Eof;
        for _ in 0..=n {
            match self.next() {
                Ok((t, _)) => tok = t,
                Err(e) => {
                    self.at = saved;
                    return Err(e);
                }
            }
        }
        self.at = saved;
        Ok(tok)
    }

    pub fn peek_is_sym(&mut self, sym: &str) -> bool {
        matches!(self.peek(), Ok((Token::Sym(s), _)) if s == sym)
    }

    pub fn peek_is_keyword(&mut self, kw: &str) -> bool {
        matches!(self.peek(), Ok((Token::Ident(s), _)) if s == kw)
    }

    pub fn eat_sym(&mut self, sym: &str) -> Result<bool, SyntaxError> {
        if self.peek_is_sym(sym) {
            self.next()?;
            Ok(true)
        } else {
            Ok(false)
        }
    }

    pub fn eat_keyword(&mut self, kw: &str) -> Result<bool, SyntaxError> {
        if self.peek_is_keyword(kw) {
            self.next()?;
            Ok(true)
        } else {
            Ok(false)
        }
    }

    pub fn expect_sym(&mut self, sym: &str) -> Result<Pos, SyntaxError> {
        let (tok, pos) = self.next()?;
        match tok {
            Token::Sym(s) if s == sym => Ok(pos),
            other => Err(unexpected(pos, &format!("`{sym}`"), &other)),
        }
    }

    pub fn expect_keyword(&mut self, kw: &str) -> Result<Pos, SyntaxError> {
        let (tok, pos) = self.next()?;
        match tok {
            Token::Ident(s) if s == kw => Ok(pos),
            other => Err(unexpected(pos, &format!("`{kw}`"), &other)),
        }
    }

    /// Any identifier-shaped token, keywords included.
    pub fn expect_ident(&mut self, what: &str) -> Result<(&'a str, Pos), SyntaxError> {
        let (tok, pos) = self.next()?;
        match tok {
            Token::Ident(s) => Ok((s, pos)),
            other => Err(unexpected(pos, what, &other)),
        }
    }

    pub fn expect_str(&mut self, what: &str) -> Result<(String, Pos), SyntaxError> {
        let (tok, pos) = self.next()?;
        match tok {
            Token::Str(s) => Ok((s, pos)),
            other => Err(unexpected(pos, what, &other)),
        }
    }

    pub fn expect_eof(&mut self) -> Result<(), SyntaxError> {
        let (tok, pos) = self.next()?;
        match tok {
            Token::Eof => Ok(()),
            other => Err(unexpected(pos, "end of input", &other)),
        }
    }

    /// Raw text up to (not including) `stop`, trimmed. Used for bare paths.
    pub fn raw_until(&mut self, stop: char, what: &str) -> Result<(String, Pos), SyntaxError> {
        let pos = self.pos();
        let rest = self.rest();
        let end = rest.find([stop, '\n']).unwrap_or(rest.len());
        let text = rest[..end].trim_end();
        if text.is_empty() {
            return Err(SyntaxError::new(pos, format!("expected {what}")));
        }
        let text = text.to_string();
        self.bump(end);
        Ok((text, pos))
    }
}

pub(crate) fn unexpected(pos: Pos, expected: &str, found: &Token<'_>) -> SyntaxError {
    SyntaxError::new(pos, format!("expected {expected}, found {found}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SYMS: &[&str] = &["<<", ">>", "{", "}", ";", ":"];

    #[test]
    fn positions_track_lines_and_comments() {
        let mut sc = Scanner::new("a // note\n  <<b>> ;", SYMS);
        assert_eq!(sc.next().unwrap(), (Token::Ident("a"), Pos::new(1, 1)));
        assert_eq!(sc.next().unwrap(), (Token::Sym("<<"), Pos::new(2, 3)));
        assert_eq!(sc.next().unwrap(), (Token::Ident("b"), Pos::new(2, 5)));
        assert_eq!(sc.next().unwrap(), (Token::Sym(">>"), Pos::new(2, 6)));
        assert_eq!(sc.next().unwrap(), (Token::Sym(";"), Pos::new(2, 9)));
        assert_eq!(sc.next().unwrap().0, Token::Eof);
    }

    #[test]
    fn strings_and_bad_characters() {
        let mut sc = Scanner::new(r#""a\"b" @"#, SYMS);
        assert_eq!(sc.next().unwrap().0, Token::Str("a\"b".into()));
        let err = sc.next().unwrap_err();
        assert_eq!(err.pos, Pos::new(1, 8));
    }
}
