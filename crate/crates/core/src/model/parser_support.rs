//! Shared token-level helpers for the graph, pattern and rule file parsers.

use super::parser::{parse_pname, ParseError, Prefixes, Tok};
pub(crate) use super::parser::LineParser;
use super::{Datatype, Literal, Name};
use crate::graph::{PatternPredicate, PatternTerm, TriplePattern, Var};

pub(crate) fn line_parser(src: &str, line: u32) -> LineParser<'_> {
    LineParser::new(src, line)
}

/// Consumes punctuation `ch` if it is next.
pub(crate) fn try_punct(p: &mut LineParser, ch: char) -> Result<bool, ParseError> {
    if p.peek()?.tok == Tok::Punct(ch) {
        p.next()?;
        return Ok(true);
    }
    Ok(false)
}

pub(crate) fn expect_punct(p: &mut LineParser, ch: char) -> Result<(), ParseError> {
    let t = p.next()?;
    if t.tok == Tok::Punct(ch) {
        Ok(())
    } else {
        Err(ParseError { line: t.line, col: t.col, message: format!("expected `{ch}`") })
    }
}

pub(crate) fn peek_is_eof(p: &mut LineParser) -> Result<bool, ParseError> {
    Ok(p.peek()?.tok == Tok::Eof)
}

pub(crate) fn expect_lparen(p: &mut LineParser) -> Result<(), ParseError> {
    p.expect(Tok::LParen, "`(`").map(|_| ())
}

pub(crate) fn expect_rparen(p: &mut LineParser) -> Result<(), ParseError> {
    p.expect(Tok::RParen, "`)`").map(|_| ())
}

pub(crate) fn expect_eol(p: &mut LineParser) -> Result<(), ParseError> {
    p.expect_end()
}

pub(crate) fn pname(p: &mut LineParser) -> Result<Name, ParseError> {
    parse_pname(p, &Prefixes(None), "prefixed name")
}

/// Consumes the `type` keyword if it is next.
pub(crate) fn try_type_keyword(p: &mut LineParser) -> Result<Option<()>, ParseError> {
    if matches!(&p.peek()?.tok, Tok::Ident(w) if w == "type") {
        p.next()?;
        return Ok(Some(()));
    }
    Ok(None)
}

pub(crate) enum ObjectTerm {
    Name(Name),
    Literal(Literal),
}

/// Object position of a ground triple: a prefixed name or a literal.
pub(crate) fn object_term(p: &mut LineParser) -> Result<ObjectTerm, ParseError> {
    let t = p.peek()?.clone();
    match &t.tok {
        Tok::PName(..) => Ok(ObjectTerm::Name(pname(p)?)),
        Tok::Str(_) | Tok::Num(..) => Ok(ObjectTerm::Literal(literal(p)?)),
        Tok::Ident(w) if w == "true" || w == "false" => Ok(ObjectTerm::Literal(literal(p)?)),
        _ => Err(err(&t, "expected name or literal")),
    }
}

pub(crate) fn literal(p: &mut LineParser) -> Result<Literal, ParseError> {
    let t = p.next()?;
    match t.tok {
        Tok::Str(s) => {
            if matches!(p.peek()?.tok, Tok::Punct('^')) {
                p.next()?;
                let caret = p.next()?;
                if caret.tok != Tok::Punct('^') {
                    return Err(ParseError { line: caret.line, col: caret.col, message: "expected `^^`".into() });
                }
                let (kw, line, col) = p.ident("datatype")?;
                let dt = Datatype::from_keyword(&kw).ok_or(ParseError {
                    line,
                    col,
                    message: format!("unknown datatype `{kw}`"),
                })?;
                Literal::new(s, dt).map_err(|e| ParseError { line, col, message: e.to_string() })
            } else {
                Ok(Literal::string(s))
            }
        }
        Tok::Num(text, decimal) => {
            let dt = if decimal { Datatype::Decimal } else { Datatype::Int };
            Literal::new(text, dt)
                .map_err(|e| ParseError { line: t.line, col: t.col, message: e.to_string() })
        }
        Tok::Ident(w) if w == "true" || w == "false" => {
            Ok(Literal { lexical: w, datatype: Datatype::Boolean })
        }
        _ => Err(err(&t, "expected literal")),
    }
}

fn err(t: &super::parser::Token, message: &str) -> ParseError {
    ParseError { line: t.line, col: t.col, message: message.to_string() }
}

fn pattern_term(p: &mut LineParser) -> Result<PatternTerm, ParseError> {
    let t = p.peek()?.clone();
    match &t.tok {
        Tok::Ident(w) if w.starts_with('?') => {
            p.next()?;
            Ok(PatternTerm::Var(Var(w[1..].to_string())))
        }
        Tok::PName(..) => Ok(PatternTerm::Name(pname(p)?)),
        Tok::Str(_) | Tok::Num(..) => Ok(PatternTerm::Literal(literal(p)?)),
        Tok::Ident(w) if w == "true" || w == "false" => Ok(PatternTerm::Literal(literal(p)?)),
        _ => Err(err(&t, "expected variable, name or literal")),
    }
}

/// One `(s p o)` pattern.
pub(crate) fn pattern(p: &mut LineParser) -> Result<TriplePattern, ParseError> {
    expect_lparen(p)?;
    let subject = pattern_term(p)?;
    let t = p.peek()?.clone();
    let predicate = match &t.tok {
        Tok::Ident(w) if w == "type" => {
            p.next()?;
            PatternPredicate::Type
        }
        Tok::Ident(w) if w.starts_with('?') => {
            p.next()?;
            PatternPredicate::Var(Var(w[1..].to_string()))
        }
        Tok::PName(..) => PatternPredicate::Prop(pname(p)?),
        _ => return Err(err(&t, "expected property, `type` or variable")),
    };
    let object = pattern_term(p)?;
    expect_rparen(p)?;
    Ok(TriplePattern { subject, predicate, object })
}

/// Comma-separated pattern list.
pub(crate) fn parse_pattern_list(text: &str, line: u32) -> Result<Vec<TriplePattern>, ParseError> {
    let mut p = line_parser(text, line);
    let mut out = vec![pattern(&mut p)?];
    while p.peek()?.tok == Tok::Comma {
        p.next()?;
        out.push(pattern(&mut p)?);
    }
    expect_eol(&mut p)?;
    Ok(out)
}
