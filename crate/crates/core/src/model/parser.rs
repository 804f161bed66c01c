//! Line-oriented parser for the ontology document grammar.
//!
//! A document consists of a header (`ontology <id>`, `prefix <tag>`, optional
//! `import <tag>` lines), optional `class`/`property` declarations and one
//! axiom per line. `#` starts a comment. Prefixes of all mentioned names must
//! be declared by the header.

use std::collections::BTreeSet;

use super::{
    Axiom, ClassExpression, Comparator, Datatype, Literal, Name, Ontology, PropertyDecl,
    PropertyRange,
};

/// Syntax or namespace error with a 1-based line/column position.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl ParseError {
    fn new(line: u32, col: u32, message: impl Into<String>) -> Self {
        ParseError { line, col, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    PName(String, String),
    Str(String),
    Num(String, bool),
    LParen,
    RParen,
    Comma,
    Punct(char),
    Eof,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: u32,
    pub col: u32,
}

pub(crate) struct Lexer<'a> {
    bytes: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
}

fn is_ident_start(b: u8) -> bool {
    b.is_ascii_alphabetic() || b == b'_' || b == b'?'
}

fn is_ident_continue(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_' || b == b'-'
}

impl<'a> Lexer<'a> {
    pub fn new(src: &'a str, line: u32) -> Self {
        Lexer { bytes: src.as_bytes(), pos: 0, line, col: 1 }
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.bytes.get(self.pos).copied()?;
        self.pos += 1;
        self.col += 1;
        Some(b)
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<u8> {
        self.bytes.get(self.pos + 1).copied()
    }

    pub fn next_token(&mut self) -> Result<Token, ParseError> {
        while let Some(b) = self.peek() {
            if b == b' ' || b == b'\t' {
                self.bump();
            } else {
                break;
            }
        }
        let (line, col) = (self.line, self.col);
        let at = |tok| Token { tok, line, col };
        let Some(b) = self.peek() else {
            return Ok(at(Tok::Eof));
        };
        if b == b'#' {
            self.pos = self.bytes.len();
            return Ok(at(Tok::Eof));
        }
        match b {
            b'(' => {
                self.bump();
                Ok(at(Tok::LParen))
            }
            b')' => {
                self.bump();
                Ok(at(Tok::RParen))
            }
            b',' => {
                self.bump();
                Ok(at(Tok::Comma))
            }
            b'"' => {
                self.bump();
                let mut out = String::new();
                loop {
                    match self.bump() {
                        Some(b'"') => break,
                        Some(b'\\') => match self.bump() {
                            Some(b'"') => out.push('"'),
                            Some(b'\\') => out.push('\\'),
                            other => {
                                return Err(ParseError::new(
                                    self.line,
                                    self.col,
                                    format!("invalid escape {:?}", other.map(char::from)),
                                ))
                            }
                        },
                        Some(c) => out.push(char::from(c)),
                        None => {
                            return Err(ParseError::new(line, col, "unterminated string literal"))
                        }
                    }
                }
                Ok(at(Tok::Str(out)))
            }
            b'-' if self.peek2().is_some_and(|c| c.is_ascii_digit()) => {
                self.bump();
                self.lex_number(line, col, true)
            }
            b if b.is_ascii_digit() => self.lex_number(line, col, false),
            b if is_ident_start(b) => {
                let mut word = String::new();
                word.push(char::from(self.bump().unwrap()));
                while self.peek().is_some_and(is_ident_continue) {
                    word.push(char::from(self.bump().unwrap()));
                }
                if self.peek() == Some(b':') && self.peek2().is_some_and(is_ident_start) {
                    self.bump();
                    let mut local = String::new();
                    local.push(char::from(self.bump().unwrap()));
                    while self.peek().is_some_and(is_ident_continue) {
                        local.push(char::from(self.bump().unwrap()));
                    }
                    return Ok(at(Tok::PName(word, local)));
                }
                Ok(at(Tok::Ident(word)))
            }
            other => {
                self.bump();
                Ok(at(Tok::Punct(char::from(other))))
            }
        }
    }

    fn lex_number(&mut self, line: u32, col: u32, negative: bool) -> Result<Token, ParseError> {
        let mut text = String::new();
        if negative {
            text.push('-');
        }
        let mut decimal = false;
        while let Some(b) = self.peek() {
            if b.is_ascii_digit() {
                text.push(char::from(self.bump().unwrap()));
            } else if b == b'.' && !decimal && self.peek2().is_some_and(|c| c.is_ascii_digit()) {
                decimal = true;
                text.push(char::from(self.bump().unwrap()));
            } else {
                break;
            }
        }
        let _ = (line, col);
        Ok(Token { tok: Tok::Num(text, decimal), line, col })
    }
}

/// Token stream over one line with single-token lookahead.
pub(crate) struct LineParser<'a> {
    lexer: Lexer<'a>,
    peeked: Option<Token>,
}

impl<'a> LineParser<'a> {
    pub fn new(src: &'a str, line: u32) -> Self {
        LineParser { lexer: Lexer::new(src, line), peeked: None }
    }

    pub fn peek(&mut self) -> Result<&Token, ParseError> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lexer.next_token()?);
        }
        Ok(self.peeked.as_ref().unwrap())
    }

    pub fn next(&mut self) -> Result<Token, ParseError> {
        match self.peeked.take() {
            Some(t) => Ok(t),
            None => self.lexer.next_token(),
        }
    }

    pub fn expect(&mut self, want: Tok, what: &str) -> Result<Token, ParseError> {
        let t = self.next()?;
        if t.tok == want {
            Ok(t)
        } else {
            Err(ParseError::new(t.line, t.col, format!("expected {what}")))
        }
    }

    pub fn expect_end(&mut self) -> Result<(), ParseError> {
        let t = self.next()?;
        if t.tok == Tok::Eof {
            Ok(())
        } else {
            Err(ParseError::new(t.line, t.col, "unexpected trailing input"))
        }
    }

    pub fn ident(&mut self, what: &str) -> Result<(String, u32, u32), ParseError> {
        let t = self.next()?;
        match t.tok {
            Tok::Ident(word) => Ok((word, t.line, t.col)),
            _ => Err(ParseError::new(t.line, t.col, format!("expected {what}"))),
        }
    }
}

/// Prefix environment a document is parsed under. `None` accepts any prefix.
#[derive(Debug, Clone)]
pub(crate) struct Prefixes(pub Option<BTreeSet<String>>);

impl Prefixes {
    fn check(&self, prefix: &str, line: u32, col: u32) -> Result<(), ParseError> {
        match &self.0 {
            Some(allowed) if !allowed.contains(prefix) => Err(ParseError::new(
                line,
                col,
                format!("undeclared namespace prefix `{prefix}`"),
            )),
            _ => Ok(()),
        }
    }
}

pub(crate) fn parse_pname(p: &mut LineParser, env: &Prefixes, what: &str) -> Result<Name, ParseError> {
    let t = p.next()?;
    match t.tok {
        Tok::PName(prefix, local) => {
            env.check(&prefix, t.line, t.col)?;
            Ok(Name { prefix, local })
        }
        _ => Err(ParseError::new(t.line, t.col, format!("expected {what}"))),
    }
}

fn parse_literal_tok(p: &mut LineParser) -> Result<Literal, ParseError> {
    let t = p.next()?;
    match t.tok {
        Tok::Str(s) => {
            // optional ^^datatype suffix
            if let Tok::Punct('^') = p.peek()?.tok {
                p.next()?;
                let caret = p.next()?;
                if caret.tok != Tok::Punct('^') {
                    return Err(ParseError::new(caret.line, caret.col, "expected `^^`"));
                }
                let (kw, line, col) = p.ident("datatype")?;
                let dt = Datatype::from_keyword(&kw)
                    .ok_or_else(|| ParseError::new(line, col, format!("unknown datatype `{kw}`")))?;
                Literal::new(s, dt).map_err(|e| ParseError::new(line, col, e.to_string()))
            } else {
                Ok(Literal::string(s))
            }
        }
        Tok::Num(text, decimal) => {
            let dt = if decimal { Datatype::Decimal } else { Datatype::Int };
            Literal::new(text, dt).map_err(|e| ParseError::new(t.line, t.col, e.to_string()))
        }
        Tok::Ident(word) if word == "true" || word == "false" => {
            Ok(Literal { lexical: word, datatype: Datatype::Boolean })
        }
        _ => Err(ParseError::new(t.line, t.col, "expected literal")),
    }
}

fn parse_expr(p: &mut LineParser, env: &Prefixes) -> Result<ClassExpression, ParseError> {
    let t = p.next()?;
    match t.tok {
        Tok::PName(prefix, local) => {
            env.check(&prefix, t.line, t.col)?;
            Ok(ClassExpression::Named(Name { prefix, local }))
        }
        Tok::Ident(word) => {
            if let Some(dt) = Datatype::from_keyword(&word) {
                return Ok(ClassExpression::Datatype(dt));
            }
            match word.as_str() {
                "And" => {
                    p.expect(Tok::LParen, "`(`")?;
                    let mut conjuncts = vec![parse_expr(p, env)?];
                    while p.peek()?.tok == Tok::Comma {
                        p.next()?;
                        conjuncts.push(parse_expr(p, env)?);
                    }
                    let close = p.expect(Tok::RParen, "`)`")?;
                    if conjuncts.len() < 2 {
                        return Err(ParseError::new(
                            close.line,
                            close.col,
                            "And needs at least two conjuncts",
                        ));
                    }
                    let mut seen = BTreeSet::new();
                    for c in &conjuncts {
                        if !seen.insert(c.clone()) {
                            return Err(ParseError::new(
                                close.line,
                                close.col,
                                "duplicate conjunct in And",
                            ));
                        }
                    }
                    Ok(ClassExpression::And(conjuncts))
                }
                "Exists" | "ExactlyOne" | "Only" => {
                    p.expect(Tok::LParen, "`(`")?;
                    let property = parse_pname(p, env, "property name")?;
                    p.expect(Tok::Comma, "`,`")?;
                    let filler = parse_expr(p, env)?;
                    p.expect(Tok::RParen, "`)`")?;
                    Ok(match word.as_str() {
                        "Exists" => ClassExpression::Exists(property, Box::new(filler)),
                        "ExactlyOne" => ClassExpression::ExactlyOne(property, Box::new(filler)),
                        _ => ClassExpression::Only(property, Box::new(filler)),
                    })
                }
                "Code" => {
                    p.expect(Tok::LParen, "`(`")?;
                    let property = parse_pname(p, env, "property name")?;
                    p.expect(Tok::Comma, "`,`")?;
                    let value = parse_literal_tok(p)?;
                    p.expect(Tok::RParen, "`)`")?;
                    Ok(ClassExpression::Code(property, value))
                }
                "Not" => {
                    p.expect(Tok::LParen, "`(`")?;
                    let class = parse_pname(p, env, "class name")?;
                    p.expect(Tok::RParen, "`)`")?;
                    Ok(ClassExpression::Not(class))
                }
                "OneOf" => {
                    p.expect(Tok::LParen, "`(`")?;
                    let mut individuals = vec![parse_pname(p, env, "individual name")?];
                    while p.peek()?.tok == Tok::Comma {
                        p.next()?;
                        individuals.push(parse_pname(p, env, "individual name")?);
                    }
                    p.expect(Tok::RParen, "`)`")?;
                    Ok(ClassExpression::OneOf(individuals))
                }
                "Range" => {
                    p.expect(Tok::LParen, "`(`")?;
                    let property = parse_pname(p, env, "property name")?;
                    p.expect(Tok::Comma, "`,`")?;
                    let cmp_tok = p.next()?;
                    let cmp = match &cmp_tok.tok {
                        Tok::Str(s) => Comparator::from_symbol(s),
                        _ => None,
                    }
                    .ok_or_else(|| {
                        ParseError::new(cmp_tok.line, cmp_tok.col, "expected quoted comparator")
                    })?;
                    p.expect(Tok::Comma, "`,`")?;
                    let bound = parse_literal_tok(p)?;
                    p.expect(Tok::RParen, "`)`")?;
                    Ok(ClassExpression::Range(property, cmp, bound))
                }
                other => Err(ParseError::new(
                    t.line,
                    t.col,
                    format!("unknown expression keyword `{other}`"),
                )),
            }
        }
        _ => Err(ParseError::new(t.line, t.col, "expected class expression")),
    }
}

fn parse_axiom_line(p: &mut LineParser, env: &Prefixes) -> Result<Axiom, ParseError> {
    let (kw, line, col) = p.ident("axiom keyword")?;
    p.expect(Tok::LParen, "`(`")?;
    let axiom = match kw.as_str() {
        "SubClass" | "EquivClass" => {
            let a = parse_expr(p, env)?;
            p.expect(Tok::Comma, "`,`")?;
            let b = parse_expr(p, env)?;
            if kw == "SubClass" {
                Axiom::SubClass(a, b)
            } else {
                Axiom::EquivClass(a, b)
            }
        }
        "SubProperty" | "EquivProperty" | "Disjoint" | "SameIndividual" => {
            let a = parse_pname(p, env, "name")?;
            p.expect(Tok::Comma, "`,`")?;
            let b = parse_pname(p, env, "name")?;
            match kw.as_str() {
                "SubProperty" => Axiom::SubProperty(a, b),
                "EquivProperty" => Axiom::EquivProperty(a, b),
                "Disjoint" => Axiom::Disjoint(a, b),
                _ => Axiom::SameIndividual(a, b),
            }
        }
        other => {
            return Err(ParseError::new(line, col, format!("unknown axiom keyword `{other}`")))
        }
    };
    p.expect(Tok::RParen, "`)`")?;
    Ok(axiom)
}

/// Parses a full ontology document.
pub fn parse_ontology(text: &str) -> Result<Ontology, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i as u32 + 1, l));
    let mut header: Option<(String, u32)> = None;

    for (lineno, raw) in lines.by_ref() {
        let mut p = LineParser::new(raw, lineno);
        if p.peek()?.tok == Tok::Eof {
            continue;
        }
        let (kw, line, col) = p.ident("`ontology` header")?;
        if kw != "ontology" {
            return Err(ParseError::new(line, col, "document must start with `ontology <id>`"));
        }
        let (id, ..) = p.ident("ontology id")?;
        p.expect_end()?;
        header = Some((id, lineno));
        break;
    }
    let Some((id, _)) = header else {
        return Err(ParseError::new(1, 1, "empty document: missing `ontology <id>` header"));
    };

    let mut prefix: Option<String> = None;
    for (lineno, raw) in lines.by_ref() {
        let mut p = LineParser::new(raw, lineno);
        if p.peek()?.tok == Tok::Eof {
            continue;
        }
        let (kw, line, col) = p.ident("`prefix` header")?;
        if kw != "prefix" {
            return Err(ParseError::new(line, col, "expected `prefix <tag>` after ontology header"));
        }
        let (tag, ..) = p.ident("prefix tag")?;
        p.expect_end()?;
        prefix = Some(tag);
        break;
    }
    let Some(prefix) = prefix else {
        return Err(ParseError::new(1, 1, "missing `prefix <tag>` header"));
    };

    let mut onto = Ontology::new(id, prefix.clone());
    let mut declared: BTreeSet<String> = BTreeSet::new();
    declared.insert(prefix);

    for (lineno, raw) in lines {
        let mut p = LineParser::new(raw, lineno);
        let head = p.peek()?.clone();
        let env = Prefixes(Some(declared.clone()));
        match &head.tok {
            Tok::Eof => continue,
            Tok::Ident(kw) if kw == "import" => {
                p.next()?;
                let (tag, ..) = p.ident("import tag")?;
                p.expect_end()?;
                declared.insert(tag.clone());
                onto.imports.insert(tag);
            }
            Tok::Ident(kw) if kw == "class" => {
                p.next()?;
                let name = parse_pname(&mut p, &env, "class name")?;
                p.expect_end()?;
                onto.classes.insert(name);
            }
            Tok::Ident(kw) if kw == "property" => {
                p.next()?;
                let name = parse_pname(&mut p, &env, "property name")?;
                let mut decl = PropertyDecl::default();
                loop {
                    let t = p.next()?;
                    match &t.tok {
                        Tok::Eof => break,
                        Tok::Ident(w) if w == "domain" => {
                            decl.domain = Some(parse_pname(&mut p, &env, "domain class")?);
                        }
                        Tok::Ident(w) if w == "range" => {
                            let rt = p.next()?;
                            decl.range = Some(match rt.tok {
                                Tok::Ident(kw) => {
                                    let dt = Datatype::from_keyword(&kw).ok_or_else(|| {
                                        ParseError::new(rt.line, rt.col, "expected datatype or class")
                                    })?;
                                    PropertyRange::Data(dt)
                                }
                                Tok::PName(pfx, local) => {
                                    env.check(&pfx, rt.line, rt.col)?;
                                    PropertyRange::Class(Name { prefix: pfx, local })
                                }
                                _ => {
                                    return Err(ParseError::new(
                                        rt.line,
                                        rt.col,
                                        "expected datatype or class",
                                    ))
                                }
                            });
                        }
                        _ => {
                            return Err(ParseError::new(
                                t.line,
                                t.col,
                                "expected `domain`, `range` or end of line",
                            ))
                        }
                    }
                }
                onto.properties.insert(name, decl);
            }
            _ => {
                let axiom = parse_axiom_line(&mut p, &env)?;
                p.expect_end()?;
                onto.axioms.insert(axiom);
            }
        }
    }
    Ok(onto)
}

/// Parses a single axiom outside a document. `allowed` restricts prefixes.
pub(crate) fn parse_axiom_str(
    text: &str,
    allowed: Option<&BTreeSet<String>>,
) -> Result<Axiom, ParseError> {
    let mut p = LineParser::new(text, 1);
    let axiom = parse_axiom_line(&mut p, &Prefixes(allowed.cloned()))?;
    p.expect_end()?;
    Ok(axiom)
}

/// Parses a single class expression, accepting any prefix.
pub fn parse_expression(text: &str) -> Result<ClassExpression, ParseError> {
    let mut p = LineParser::new(text, 1);
    let expr = parse_expr(&mut p, &Prefixes(None))?;
    p.expect_end()?;
    Ok(expr)
}

pub(crate) fn parse_name(text: &str) -> Result<Name, ParseError> {
    let mut p = LineParser::new(text, 1);
    let name = parse_pname(&mut p, &Prefixes(None), "prefixed name")?;
    p.expect_end()?;
    Ok(name)
}

pub(crate) fn parse_literal_str(text: &str) -> Result<Literal, ParseError> {
    let mut p = LineParser::new(text, 1);
    let lit = parse_literal_tok(&mut p)?;
    p.expect_end()?;
    Ok(lit)
}
