use num_bigint::BigInt;

use super::Diagnostic;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(BigInt),
    Sym(char),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

const SYMBOLS: &str = "+-*/()[]<>,;=@{}:";

/// Splits the input into tokens; `#` starts a comment running to the end
/// of the line.
pub fn lex(text: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            Tok::Int(s.parse().expect("digits"))
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if SYMBOLS.contains(c) {
            i += 1;
            Tok::Sym(c)
        } else {
            return Err(Diagnostic::new(l0, c0, format!("unexpected character `{c}`"), vec![]));
        };
        col += i - start;
        out.push(Token { tok, line: l0, col: c0 });
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_and_comments() {
        let t = lex("basis b1; # note\neq delta(b1) f = 1/2;").unwrap();
        assert_eq!(t[0].tok, Tok::Ident("basis".into()));
        assert_eq!((t[3].line, t[3].col), (2, 1));
        assert!(t.iter().any(|x| x.tok == Tok::Sym('/')));
        assert_eq!(t.last().unwrap().tok, Tok::Eof);
    }

    #[test]
    fn bad_character() {
        let e = lex("basis b1;\n  eq $").unwrap_err();
        assert_eq!((e.line, e.col), (2, 6));
    }
}
