use std::fmt;
use std::path::PathBuf;

use crate::error::{ParseError, ParseErrorKind};

/// 1-based line and column.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// A parsed expression. Equality ignores source positions.
#[derive(Clone, Debug)]
pub enum Sexp {
    Atom(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl PartialEq for Sexp {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Sexp::Atom(a, _), Sexp::Atom(b, _)) => a == b,
            (Sexp::List(a, _), Sexp::List(b, _)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Sexp {}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s, _) => Some(s),
            Sexp::List(..) => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items, _) => Some(items),
            Sexp::Atom(..) => None,
        }
    }

    /// Head symbol of a list form.
    pub fn head(&self) -> Option<&str> {
        self.list().and_then(|l| l.first()).and_then(Sexp::atom)
    }

    pub fn atom_at(s: &str) -> Sexp {
        Sexp::Atom(s.to_string(), Pos::default())
    }

    pub fn list_of(items: Vec<Sexp>) -> Sexp {
        Sexp::List(items, Pos::default())
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(s, _) => f.write_str(s),
            Sexp::List(items, _) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SourceDocument {
    pub path: Option<PathBuf>,
    pub forms: Vec<Sexp>,
}

impl SourceDocument {
    /// One top-level form per line.
    pub fn print(&self) -> String {
        let mut out = String::new();
        for form in &self.forms {
            out.push_str(&form.to_string());
            out.push('\n');
        }
        out
    }
}

pub fn is_symbol_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '-' | '\'' | '_' | '+' | '<' | '>' | '=' | '?' | '.' | '*')
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    col: u32,
}

impl Lexer<'_> {
    fn pos(&self) -> Pos {
        Pos { line: self.line, col: self.col }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() || c == '\u{feff}' {
                self.bump();
            } else if c == ';' {
                while let Some(&c) = self.chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }
}

pub fn parse(text: &str) -> Result<SourceDocument, ParseError> {
    let mut lx = Lexer { chars: text.chars().peekable(), line: 1, col: 1 };
    // stack of open lists with their start position
    let mut stack: Vec<(Vec<Sexp>, Pos)> = Vec::new();
    let mut forms = Vec::new();
    loop {
        lx.skip_trivia();
        let pos = lx.pos();
        let Some(&c) = lx.chars.peek() else { break };
        let done = match c {
            '(' => {
                lx.bump();
                stack.push((Vec::new(), pos));
                None
            }
            ')' => {
                lx.bump();
                let (items, start) =
                    stack.pop().ok_or(ParseError { pos, kind: ParseErrorKind::Unbalanced })?;
                Some(Sexp::List(items, start))
            }
            c if is_symbol_char(c) => {
                let mut s = String::new();
                while let Some(&c) = lx.chars.peek() {
                    if !is_symbol_char(c) {
                        break;
                    }
                    s.push(c);
                    lx.bump();
                }
                Some(Sexp::Atom(s, pos))
            }
            other => return Err(ParseError { pos, kind: ParseErrorKind::Lexical(other) }),
        };
        if let Some(expr) = done {
            match stack.last_mut() {
                Some((items, _)) => items.push(expr),
                None => forms.push(expr),
            }
        }
    }
    if let Some((_, start)) = stack.pop() {
        return Err(ParseError { pos: start, kind: ParseErrorKind::Unbalanced });
    }
    Ok(SourceDocument { path: None, forms })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file() {
        assert_eq!(parse("").unwrap().forms.len(), 0);
        assert_eq!(parse("  ; only a comment\n").unwrap().forms.len(), 0);
    }

    #[test]
    fn positions_are_tracked() {
        let doc = parse("(a b)\r\n  (c (d e))").unwrap();
        assert_eq!(doc.forms[1].pos(), Pos { line: 2, col: 3 });
        let inner = &doc.forms[1].list().unwrap()[1];
        assert_eq!(inner.pos(), Pos { line: 2, col: 6 });
    }

    #[test]
    fn unbalanced() {
        let e = parse("(a (b)").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Unbalanced);
        assert_eq!(e.pos, Pos { line: 1, col: 1 });
        assert_eq!(parse("a)").unwrap_err().kind, ParseErrorKind::Unbalanced);
    }

    #[test]
    fn lexical_error() {
        let e = parse("(a \"b\")").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Lexical('"'));
        assert_eq!(e.pos, Pos { line: 1, col: 4 });
    }

    #[test]
    fn unicode_and_primes() {
        let doc = parse("(entity L4' Leg) (entity Großvater Person) (P Tp T t+t')").unwrap();
        assert_eq!(doc.forms[0].list().unwrap()[1].atom(), Some("L4'"));
        assert_eq!(doc.forms[2].list().unwrap()[3].atom(), Some("t+t'"));
    }

    #[test]
    fn print_reparses() {
        let src = "; c\n(a (b c) d)\n(e)\n";
        let doc = parse(src).unwrap();
        assert_eq!(parse(&doc.print()).unwrap(), doc);
    }
}
