//! Reader and writer for the line-oriented `.dlkb` format.
//!
//! ```text
//! # comment
//! Woman := Human and Female          # full definition
//! Male <= Person                     # partial definition
//! Woman(Claudia)                     # concept assertion
//! HasParent(Claudia, Giovanna)       # role assertion
//! ```
//!
//! Concept syntax, loosest binding first: `or`, `and`, then the prefix forms
//! `not C`, `exists R.C`, `forall R.C`, `atleast n R`, `( C )`, `Top`,
//! `Bottom` and concept names.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::concept::Concept;
use crate::error::{Error, ParseError, ParseErrorKind};
use crate::kb::{ABox, DefinitionKind, KnowledgeBase, TBox};

const KEYWORDS: &[&str] = &["and", "or", "not", "exists", "forall", "atleast", "Top", "Bottom"];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

/// Whether `s` is usable as a concept, role or individual name.
pub fn is_valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !is_keyword(s)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(u32),
    Define,
    SubsumedBy,
    LParen,
    RParen,
    Comma,
    Dot,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Define => "`:=`".into(),
            Tok::SubsumedBy => "`<=`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str, line: usize) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, line, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let single = |tok| Spanned { tok, line: l0, col: c0 };
        match c {
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                    col += 1;
                }
                continue;
            }
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => {}
            '(' => out.push(single(Tok::LParen)),
            ')' => out.push(single(Tok::RParen)),
            ',' => out.push(single(Tok::Comma)),
            '.' => out.push(single(Tok::Dot)),
            ':' | '<' => {
                if chars.get(i + 1) != Some(&'=') {
                    return Err(ParseError::new(ParseErrorKind::Lex, l0, c0, format!("expected `{c}=`")));
                }
                out.push(single(if c == ':' { Tok::Define } else { Tok::SubsumedBy }));
                i += 2;
                col += 2;
                continue;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let n = text
                    .parse::<u32>()
                    .map_err(|_| ParseError::new(ParseErrorKind::Lex, l0, c0, format!("integer `{text}` out of range")))?;
                col += i - start;
                out.push(single(Tok::Int(n)));
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                col += i - start;
                out.push(single(Tok::Ident(chars[start..i].iter().collect())));
                continue;
            }
            other => {
                return Err(ParseError::new(ParseErrorKind::Lex, l0, c0, format!("unexpected character `{other}`")));
            }
        }
        i += 1;
        col += 1;
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

#[derive(Clone, Copy, PartialEq)]
enum Use {
    Concept,
    Role,
}

struct Parser<'a> {
    toks: &'a [Spanned],
    pos: usize,
    uses: &'a mut Vec<(String, Use, usize, usize)>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, msg: impl Into<String>) -> ParseError {
        let t = self.peek();
        ParseError::new(ParseErrorKind::Syntax, t.line, t.col, msg)
    }

    fn expect(&mut self, tok: Tok) -> Result<Spanned, ParseError> {
        if self.peek().tok == tok {
            Ok(self.bump())
        } else {
            Err(self.error_here(format!("expected {}, found {}", tok.describe(), self.peek().tok.describe())))
        }
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == w)
    }

    fn name(&mut self, what: &str) -> Result<Spanned, ParseError> {
        match &self.peek().tok {
            Tok::Ident(s) if !is_keyword(s) => Ok(self.bump()),
            other => Err(self.error_here(format!("expected {what}, found {}", other.describe()))),
        }
    }

    fn record(&mut self, t: &Spanned, u: Use) {
        if let Tok::Ident(s) = &t.tok {
            self.uses.push((s.clone(), u, t.line, t.col));
        }
    }

    fn concept(&mut self) -> Result<Concept, ParseError> {
        let mut args = vec![self.conjunction()?];
        while self.is_word("or") {
            self.bump();
            args.push(self.conjunction()?);
        }
        Ok(Concept::or(args))
    }

    fn conjunction(&mut self) -> Result<Concept, ParseError> {
        let mut args = vec![self.unary()?];
        while self.is_word("and") {
            self.bump();
            args.push(self.unary()?);
        }
        Ok(Concept::and(args))
    }

    fn unary(&mut self) -> Result<Concept, ParseError> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::LParen => {
                self.bump();
                let c = self.concept()?;
                self.expect(Tok::RParen)?;
                Ok(c)
            }
            Tok::Ident(w) => match w.as_str() {
                "Top" => {
                    self.bump();
                    Ok(Concept::Top)
                }
                "Bottom" => {
                    self.bump();
                    Ok(Concept::Bottom)
                }
                "not" => {
                    self.bump();
                    Ok(Concept::not(self.unary()?))
                }
                "exists" | "forall" => {
                    self.bump();
                    let role = self.name("role name")?;
                    self.record(&role, Use::Role);
                    self.expect(Tok::Dot)?;
                    let filler = self.unary()?;
                    let Tok::Ident(r) = role.tok else { unreachable!() };
                    Ok(if w == "exists" { Concept::exists(r, filler) } else { Concept::forall(r, filler) })
                }
                "atleast" => {
                    self.bump();
                    let n = match self.peek().tok {
                        Tok::Int(n) if n >= 1 => {
                            self.bump();
                            n
                        }
                        _ => return Err(self.error_here("expected a positive integer after `atleast`")),
                    };
                    let role = self.name("role name")?;
                    self.record(&role, Use::Role);
                    let Tok::Ident(r) = role.tok else { unreachable!() };
                    Ok(Concept::AtLeast(n, r))
                }
                "and" | "or" => Err(self.error_here(format!("expected a concept, found `{w}`"))),
                _ => {
                    self.bump();
                    self.record(&t, Use::Concept);
                    Ok(Concept::Atom(w.clone()))
                }
            },
            other => Err(self.error_here(format!("expected a concept, found {}", other.describe()))),
        }
    }
}

fn check_arity(uses: &[(String, Use, usize, usize)]) -> Result<(), ParseError> {
    let mut first: HashMap<&str, Use> = HashMap::new();
    for (name, u, line, col) in uses {
        match first.get(name.as_str()) {
            Some(prev) if prev != u => {
                let (was, now) = match prev {
                    Use::Concept => ("concept", "role"),
                    Use::Role => ("role", "concept"),
                };
                return Err(ParseError::new(
                    ParseErrorKind::Syntax,
                    *line,
                    *col,
                    format!("`{name}` is used as a {now} but was previously used as a {was}"),
                ));
            }
            Some(_) => {}
            None => {
                first.insert(name, *u);
            }
        }
    }
    Ok(())
}

/// Parses a single concept expression.
pub fn parse_concept(text: &str) -> Result<Concept, ParseError> {
    let toks = lex(text, 1)?;
    let mut uses = Vec::new();
    let mut p = Parser { toks: &toks, pos: 0, uses: &mut uses };
    let c = p.concept()?;
    if p.peek().tok != Tok::Eof {
        return Err(p.error_here(format!("unexpected {} after concept", p.peek().tok.describe())));
    }
    check_arity(&uses)?;
    Ok(c)
}

/// Parses a whole knowledge base, verifying that the terminology is acyclic.
pub fn parse_kb(text: &str) -> Result<KnowledgeBase, ParseError> {
    let mut tbox = TBox::new();
    let mut abox = ABox::new();
    let mut def_pos: HashMap<String, (usize, usize)> = HashMap::new();
    let mut uses = Vec::new();

    for (idx, raw) in text.split('\n').enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let toks = lex(line, line_no)?;
        if toks.len() == 1 {
            continue;
        }
        let mut p = Parser { toks: &toks, pos: 0, uses: &mut uses };
        let head = p.name("a name")?;
        let Tok::Ident(head_name) = head.tok.clone() else { unreachable!() };
        match p.peek().tok {
            Tok::Define | Tok::SubsumedBy => {
                let kind = if p.bump().tok == Tok::Define { DefinitionKind::Equiv } else { DefinitionKind::Subsumed };
                p.record(&head, Use::Concept);
                let body = p.concept()?;
                if p.peek().tok != Tok::Eof {
                    return Err(p.error_here(format!("unexpected {} after definition", p.peek().tok.describe())));
                }
                if let Some((l, c)) = def_pos.get(&head_name) {
                    return Err(ParseError::new(
                        ParseErrorKind::DuplicateDefinition,
                        head.line,
                        head.col,
                        format!("`{head_name}` is already defined at {l}:{c}"),
                    ));
                }
                def_pos.insert(head_name.clone(), (head.line, head.col));
                tbox.define(head_name, kind, body).expect("duplicates checked above");
            }
            Tok::LParen => {
                p.bump();
                let first = p.name("an individual name")?;
                let Tok::Ident(first) = first.tok else { unreachable!() };
                if p.peek().tok == Tok::Comma {
                    p.bump();
                    let second = p.name("an individual name")?;
                    let Tok::Ident(second) = second.tok else { unreachable!() };
                    p.expect(Tok::RParen)?;
                    p.record(&head, Use::Role);
                    abox.assert_role(head_name, first, second);
                } else {
                    p.expect(Tok::RParen)?;
                    p.record(&head, Use::Concept);
                    abox.assert_concept(head_name, first);
                }
                if p.peek().tok != Tok::Eof {
                    return Err(p.error_here(format!("unexpected {} after assertion", p.peek().tok.describe())));
                }
            }
            _ => {
                return Err(p.error_here(format!(
                    "expected `:=`, `<=` or `(` after `{head_name}`, found {}",
                    p.peek().tok.describe()
                )))
            }
        }
    }
    check_arity(&uses)?;

    KnowledgeBase::new(tbox, abox).map_err(|e| match e {
        Error::CyclicTBox { path } => {
            let (line, col) = path.first().and_then(|n| def_pos.get(n)).copied().unwrap_or((1, 1));
            ParseError::new(ParseErrorKind::Cycle, line, col, format!("definition cycle {}", path.join(" -> ")))
        }
        other => ParseError::new(ParseErrorKind::Unknown, 1, 1, other.to_string()),
    })
}

/// Writes a knowledge base in `.dlkb` form: definitions in insertion order,
/// then concept assertions, then role assertions, one statement per line.
pub fn serialize_kb(kb: &KnowledgeBase) -> String {
    let mut out = String::new();
    for (name, def) in kb.tbox.iter() {
        let op = match def.kind {
            DefinitionKind::Equiv => ":=",
            DefinitionKind::Subsumed => "<=",
        };
        writeln!(out, "{name} {op} {}", def.body).unwrap();
    }
    for ca in kb.abox.concept_assertions() {
        writeln!(out, "{}({})", ca.concept, ca.individual).unwrap();
    }
    for ra in kb.abox.role_assertions() {
        writeln!(out, "{}({}, {})", ra.role, ra.subject, ra.object).unwrap();
    }
    out
}

/// Writes a concept expression; the inverse of [`parse_concept`].
pub fn serialize_concept(c: &Concept) -> String {
    c.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: &str) -> Concept {
        Concept::atom(n)
    }

    #[test]
    fn definitions_and_assertions() {
        let kb = parse_kb("Woman := Human and Female\nMale <= Person\nWoman(Claudia)\nHasParent(Claudia, Giovanna)\n")
            .unwrap();
        let w = kb.tbox.get("Woman").unwrap();
        assert_eq!(w.kind, DefinitionKind::Equiv);
        assert_eq!(w.body, Concept::And(vec![a("Human"), a("Female")]));
        let m = kb.tbox.get("Male").unwrap();
        assert_eq!((m.kind, &m.body), (DefinitionKind::Subsumed, &a("Person")));
        assert_eq!(kb.abox.concept_assertions().len(), 1);
        let ra = kb.abox.role_assertions().next().unwrap();
        assert_eq!((ra.role.as_str(), ra.subject.as_str(), ra.object.as_str()), ("HasParent", "Claudia", "Giovanna"));
        assert_eq!(kb.individuals().len(), 2);
    }

    #[test]
    fn concept_precedence() {
        assert_eq!(
            parse_concept("Male and exists hasChild.Person").unwrap(),
            Concept::And(vec![a("Male"), Concept::exists("hasChild", a("Person"))])
        );
        assert_eq!(parse_concept("Top").unwrap(), Concept::Top);
        assert_eq!(parse_concept("not (A or B)").unwrap(), Concept::not(Concept::Or(vec![a("A"), a("B")])));
        assert_eq!(
            parse_concept("A and B or C").unwrap(),
            Concept::Or(vec![Concept::And(vec![a("A"), a("B")]), a("C")])
        );
        assert_eq!(
            parse_concept("not exists R.A and B").unwrap(),
            Concept::And(vec![Concept::not(Concept::exists("R", a("A"))), a("B")])
        );
        assert_eq!(
            parse_concept("exists HasParent.(atleast 2 HasChild)").unwrap(),
            Concept::exists("HasParent", Concept::AtLeast(2, "HasChild".into()))
        );
    }

    #[test]
    fn comments_and_crlf() {
        let kb = parse_kb("# family\r\nA := B # trailing\r\n\r\nA(x)\r\n").unwrap();
        assert_eq!(kb.tbox.len(), 1);
        assert_eq!(kb.abox.len(), 1);
    }

    #[test]
    fn empty_input() {
        let kb = parse_kb("").unwrap();
        assert!(kb.tbox.is_empty() && kb.abox.is_empty());
    }

    #[test]
    fn error_positions() {
        let e = parse_kb("A := B\nC := D and\n").unwrap_err();
        assert_eq!((e.kind, e.line, e.column), (ParseErrorKind::Syntax, 2, 11));
        let e = parse_kb("A := B\n  A := C\n").unwrap_err();
        assert_eq!((e.kind, e.line, e.column), (ParseErrorKind::DuplicateDefinition, 2, 3));
        let e = parse_kb("A := B $ C").unwrap_err();
        assert_eq!((e.kind, e.line, e.column), (ParseErrorKind::Lex, 1, 8));
        let e = parse_concept("atleast 0 R").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Syntax);
    }

    #[test]
    fn cycle_is_reported() {
        let e = parse_kb("A := A and B\n").unwrap_err();
        assert_eq!((e.kind, e.line, e.column), (ParseErrorKind::Cycle, 1, 1));
        let e = parse_kb("X := Y\nA := exists R.B\nB := A and C\n").unwrap_err();
        assert_eq!((e.kind, e.line), (ParseErrorKind::Cycle, 2));
    }

    #[test]
    fn arity_conflict() {
        let e = parse_kb("R(a)\nR(a, b)\n").unwrap_err();
        assert_eq!((e.kind, e.line), (ParseErrorKind::Syntax, 2));
        assert!(parse_kb("A := exists A.B\n").is_err());
        assert!(parse_kb("A(b)\nb(c, d)\n").is_ok());
    }

    #[test]
    fn keyword_names_rejected() {
        assert!(parse_kb("and := A\n").is_err());
        assert!(parse_kb("A(not)\n").is_err());
        assert!(!is_valid_name("exists") && is_valid_name("Exists_1"));
    }

    #[test]
    fn serializer_format() {
        let text = "Niece := Human and exists HasGrandParent.Parent or exists HasUncle.Uncle\nMale <= Person\nWoman(Claudia)\nHasParent(Claudia, Giovanna)\n";
        let kb = parse_kb(text).unwrap();
        assert_eq!(serialize_kb(&kb), text);
        assert_eq!(serialize_concept(&Concept::exists("R", Concept::Top)), "exists R.Top");
    }
}
