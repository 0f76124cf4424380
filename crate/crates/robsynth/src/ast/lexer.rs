use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Int(u64),
    Str(String),
    Hash,
    LParen,
    RParen,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Implies,
    Iff,
    Not,
    AndAnd,
    OrOr,
    Caret,
    Comma,
    Semi,
    Colon,
    Dot,
    Minus,
    Pipe,
    Eof,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub offset: usize,
    pub line: usize,
    pub col: usize,
}

pub(crate) fn lex(src: &str) -> Result<Vec<Token>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < bytes.len() {
        let c = bytes[i];
        if c == b'\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == b'/' && bytes.get(i + 1) == Some(&b'/') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = (i, line, col);
        let rest = &bytes[i..];
        let (tok, len) = if c.is_ascii_alphabetic() || c == b'_' {
            let n = rest
                .iter()
                .take_while(|b| b.is_ascii_alphanumeric() || **b == b'_')
                .count();
            (Tok::Ident(src[i..i + n].to_string()), n)
        } else if c.is_ascii_digit() {
            let n = rest.iter().take_while(|b| b.is_ascii_digit()).count();
            let v = src[i..i + n]
                .parse::<u64>()
                .map_err(|_| Error::parse(line, col, "integer literal too large"))?;
            (Tok::Int(v), n)
        } else if c == b'"' {
            let n = rest[1..].iter().take_while(|b| **b != b'"' && **b != b'\n').count();
            if rest.get(n + 1) != Some(&b'"') {
                return Err(Error::parse(line, col, "unterminated string"));
            }
            (Tok::Str(src[i + 1..i + 1 + n].to_string()), n + 2)
        } else if rest.starts_with(b"<=>") {
            (Tok::Iff, 3)
        } else if rest.starts_with(b"<=") {
            (Tok::Le, 2)
        } else if rest.starts_with(b">=") {
            (Tok::Ge, 2)
        } else if rest.starts_with(b"=>") {
            (Tok::Implies, 2)
        } else if rest.starts_with(b"&&") {
            (Tok::AndAnd, 2)
        } else if rest.starts_with(b"||") {
            (Tok::OrOr, 2)
        } else {
            let t = match c {
                b'#' => Tok::Hash,
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b'[' => Tok::LBrack,
                b']' => Tok::RBrack,
                b'{' => Tok::LBrace,
                b'}' => Tok::RBrace,
                b'<' => Tok::Lt,
                b'>' => Tok::Gt,
                b'=' => Tok::Eq,
                b'!' => Tok::Not,
                b'^' => Tok::Caret,
                b',' => Tok::Comma,
                b';' => Tok::Semi,
                b':' => Tok::Colon,
                b'.' => Tok::Dot,
                b'-' => Tok::Minus,
                b'|' => Tok::Pipe,
                _ => {
                    let ch = src[i..].chars().next().unwrap_or('?');
                    return Err(Error::parse(line, col, format!("unexpected character `{ch}`")));
                }
            };
            (t, 1)
        };
        out.push(Token {
            tok,
            offset: start.0,
            line: start.1,
            col: start.2,
        });
        i += len;
        col += src[start.0..i].chars().count();
    }
    out.push(Token {
        tok: Tok::Eof,
        offset: bytes.len(),
        line,
        col,
    });
    Ok(out)
}
