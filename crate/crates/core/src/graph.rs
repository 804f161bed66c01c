//! ABox triples, the triple graph, and pattern matching over it.
//!
//! A `Graph` is a set of class assertions and object/data property assertions;
//! insertion order is never observable. `match_patterns` evaluates a
//! conjunction of triple patterns against a graph and returns every binding
//! under which all patterns instantiate to triples of the graph.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::model::{Literal, Name, ParseError};
use crate::model::{parse_expression, ClassExpression};

/// One assertion: `(i type C)`, `(s p o)` or `(s p "v")`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Triple {
    Type(Name, Name),
    Object(Name, Name, Name),
    Data(Name, Name, Literal),
}

impl Triple {
    pub fn subject(&self) -> &Name {
        match self {
            Triple::Type(s, _) | Triple::Object(s, _, _) | Triple::Data(s, _, _) => s,
        }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Triple::Type(i, c) => write!(f, "({} type {})", i, c),
            Triple::Object(s, p, o) => write!(f, "({} {} {})", s, p, o),
            Triple::Data(s, p, v) => write!(f, "({} {} {})", s, p, v),
        }
    }
}

/// A set of triples.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    pub triples: BTreeSet<Triple>,
}

impl Graph {
    pub fn new() -> Self {
        Graph::default()
    }

    pub fn insert(&mut self, triple: Triple) -> bool {
        self.triples.insert(triple)
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    /// All individuals mentioned as subject or object.
    pub fn individuals(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for t in &self.triples {
            out.insert(t.subject().clone());
            if let Triple::Object(_, _, o) = t {
                out.insert(o.clone());
            }
        }
        out
    }

    /// Asserted types of an individual.
    pub fn types_of<'g>(&'g self, individual: &'g Name) -> impl Iterator<Item = &'g Name> {
        self.triples.iter().filter_map(move |t| match t {
            Triple::Type(i, c) if i == individual => Some(c),
            _ => None,
        })
    }

    /// Object successors of `individual` via `property`.
    pub fn object_successors<'g>(
        &'g self,
        individual: &'g Name,
        property: &'g Name,
    ) -> impl Iterator<Item = &'g Name> {
        self.triples.iter().filter_map(move |t| match t {
            Triple::Object(s, p, o) if s == individual && p == property => Some(o),
            _ => None,
        })
    }

    /// Data values of `individual` under `property`.
    pub fn data_values<'g>(
        &'g self,
        individual: &'g Name,
        property: &'g Name,
    ) -> impl Iterator<Item = &'g Literal> {
        self.triples.iter().filter_map(move |t| match t {
            Triple::Data(s, p, v) if s == individual && p == property => Some(v),
            _ => None,
        })
    }

    /// Renders the graph in the one-triple-per-line format, sorted.
    pub fn serialize(&self) -> String {
        let mut lines: Vec<String> = self.triples.iter().map(ToString::to_string).collect();
        lines.sort();
        let mut out = lines.join("\n");
        if !out.is_empty() {
            out.push('\n');
        }
        out
    }

    /// Parses the one-triple-per-line format.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        use crate::model::parser_support::*;
        let mut graph = Graph::new();
        for (i, raw) in text.lines().enumerate() {
            let lineno = i as u32 + 1;
            let mut p = line_parser(raw, lineno);
            if peek_is_eof(&mut p)? {
                continue;
            }
            expect_lparen(&mut p)?;
            let subject = pname(&mut p)?;
            if let Some(()) = try_type_keyword(&mut p)? {
                let class = pname(&mut p)?;
                expect_rparen(&mut p)?;
                expect_eol(&mut p)?;
                graph.insert(Triple::Type(subject, class));
                continue;
            }
            let property = pname(&mut p)?;
            match object_term(&mut p)? {
                ObjectTerm::Name(o) => graph.insert(Triple::Object(subject, property, o)),
                ObjectTerm::Literal(v) => graph.insert(Triple::Data(subject, property, v)),
            };
            expect_rparen(&mut p)?;
            expect_eol(&mut p)?;
        }
        Ok(graph)
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<T: IntoIterator<Item = Triple>>(iter: T) -> Self {
        Graph { triples: iter.into_iter().collect() }
    }
}

/// A variable of a triple pattern, written `?name`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub String);

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

/// A name, literal or variable in subject/object position.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PatternTerm {
    Var(Var),
    Name(Name),
    Literal(Literal),
}

impl fmt::Display for PatternTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternTerm::Var(v) => write!(f, "{}", v),
            PatternTerm::Name(n) => write!(f, "{}", n),
            PatternTerm::Literal(l) => write!(f, "{}", l),
        }
    }
}

/// Predicate position: the `type` keyword, a property name, or a variable
/// ranging over properties (never over `type`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PatternPredicate {
    Type,
    Prop(Name),
    Var(Var),
}

/// A triple with variables allowed in any position.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: PatternPredicate,
    pub object: PatternTerm,
}

impl fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pred = match &self.predicate {
            PatternPredicate::Type => "type".to_string(),
            PatternPredicate::Prop(p) => p.to_string(),
            PatternPredicate::Var(v) => v.to_string(),
        };
        write!(f, "({} {} {})", self.subject, pred, self.object)
    }
}

impl TriplePattern {
    pub fn variables(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for term in [&self.subject, &self.object] {
            if let PatternTerm::Var(v) = term {
                out.insert(v.clone());
            }
        }
        if let PatternPredicate::Var(v) = &self.predicate {
            out.insert(v.clone());
        }
        out
    }
}

/// Value a variable is bound to.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Name(Name),
    Literal(Literal),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Name(n) => write!(f, "{}", n),
            Term::Literal(l) => write!(f, "{}", l),
        }
    }
}

/// A solution: one value per variable of the pattern set it answers.
pub type Binding = BTreeMap<Var, Term>;

fn match_term(term: &PatternTerm, value: &Term, binding: &mut Binding) -> bool {
    match term {
        PatternTerm::Name(n) => matches!(value, Term::Name(m) if m == n),
        PatternTerm::Literal(l) => matches!(value, Term::Literal(m) if m == l),
        PatternTerm::Var(v) => match binding.get(v) {
            Some(bound) => bound == value,
            None => {
                binding.insert(v.clone(), value.clone());
                true
            }
        },
    }
}

/// Attempts to extend `binding` so that `pattern` matches `triple`.
pub(crate) fn match_triple(
    pattern: &TriplePattern,
    triple: &Triple,
    binding: &Binding,
) -> Option<Binding> {
    let mut out = binding.clone();
    let ok = match (triple, &pattern.predicate) {
        (Triple::Type(i, c), PatternPredicate::Type) => {
            match_term(&pattern.subject, &Term::Name(i.clone()), &mut out)
                && match_term(&pattern.object, &Term::Name(c.clone()), &mut out)
        }
        (Triple::Object(s, p, o), PatternPredicate::Prop(q)) if p == q => {
            match_term(&pattern.subject, &Term::Name(s.clone()), &mut out)
                && match_term(&pattern.object, &Term::Name(o.clone()), &mut out)
        }
        (Triple::Data(s, p, v), PatternPredicate::Prop(q)) if p == q => {
            match_term(&pattern.subject, &Term::Name(s.clone()), &mut out)
                && match_term(&pattern.object, &Term::Literal(v.clone()), &mut out)
        }
        (Triple::Object(s, p, o), PatternPredicate::Var(pv)) => {
            match_term(&pattern.subject, &Term::Name(s.clone()), &mut out)
                && match_term(&PatternTerm::Var(pv.clone()), &Term::Name(p.clone()), &mut out)
                && match_term(&pattern.object, &Term::Name(o.clone()), &mut out)
        }
        (Triple::Data(s, p, v), PatternPredicate::Var(pv)) => {
            match_term(&pattern.subject, &Term::Name(s.clone()), &mut out)
                && match_term(&PatternTerm::Var(pv.clone()), &Term::Name(p.clone()), &mut out)
                && match_term(&pattern.object, &Term::Literal(v.clone()), &mut out)
        }
        _ => false,
    };
    ok.then_some(out)
}

/// Evaluates a pattern conjunction: every binding under which all patterns
/// instantiate to triples of `g`. Set semantics.
pub fn match_patterns(g: &Graph, patterns: &[TriplePattern]) -> BTreeSet<Binding> {
    let mut bindings: BTreeSet<Binding> = BTreeSet::new();
    bindings.insert(Binding::new());
    for pattern in patterns {
        let mut next = BTreeSet::new();
        for binding in &bindings {
            for triple in &g.triples {
                if let Some(extended) = match_triple(pattern, triple, binding) {
                    next.insert(extended);
                }
            }
        }
        bindings = next;
        if bindings.is_empty() {
            break;
        }
    }
    bindings
}

/// Semi-naive variant: bindings where at least the pattern at one position is
/// matched against `delta` while the rest match against the full graph.
pub(crate) fn match_patterns_delta(
    g: &Graph,
    delta: &Graph,
    patterns: &[TriplePattern],
) -> BTreeSet<Binding> {
    let mut out = BTreeSet::new();
    for pivot in 0..patterns.len() {
        let mut bindings: BTreeSet<Binding> = BTreeSet::new();
        bindings.insert(Binding::new());
        for (i, pattern) in patterns.iter().enumerate() {
            let source = if i == pivot { delta } else { g };
            let mut next = BTreeSet::new();
            for binding in &bindings {
                for triple in &source.triples {
                    if let Some(extended) = match_triple(pattern, triple, binding) {
                        next.insert(extended);
                    }
                }
            }
            bindings = next;
            if bindings.is_empty() {
                break;
            }
        }
        out.extend(bindings);
    }
    out
}

/// Parses `(?s p ?o)`-style pattern text, comma separated.
pub fn parse_patterns(text: &str) -> Result<Vec<TriplePattern>, ParseError> {
    crate::model::parser_support::parse_pattern_list(text, 1)
}

/// Substitutes bound variables of `pattern`; fails if a variable is unbound.
pub(crate) fn instantiate(pattern: &TriplePattern, binding: &Binding) -> Option<Triple> {
    let term = |t: &PatternTerm| -> Option<Term> {
        match t {
            PatternTerm::Var(v) => binding.get(v).cloned(),
            PatternTerm::Name(n) => Some(Term::Name(n.clone())),
            PatternTerm::Literal(l) => Some(Term::Literal(l.clone())),
        }
    };
    let subject = match term(&pattern.subject)? {
        Term::Name(n) => n,
        Term::Literal(_) => return None,
    };
    match &pattern.predicate {
        PatternPredicate::Type => match term(&pattern.object)? {
            Term::Name(c) => Some(Triple::Type(subject, c)),
            Term::Literal(_) => None,
        },
        PatternPredicate::Prop(p) => Some(match term(&pattern.object)? {
            Term::Name(o) => Triple::Object(subject, p.clone(), o),
            Term::Literal(v) => Triple::Data(subject, p.clone(), v),
        }),
        PatternPredicate::Var(v) => {
            let p = match binding.get(v)? {
                Term::Name(n) => n.clone(),
                Term::Literal(_) => return None,
            };
            Some(match term(&pattern.object)? {
                Term::Name(o) => Triple::Object(subject, p, o),
                Term::Literal(val) => Triple::Data(subject, p, val),
            })
        }
    }
}

/// Parses a class-expression string; used by template slot patterns.
pub fn parse_class_expression(text: &str) -> Result<ClassExpression, ParseError> {
    parse_expression(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(prefix: &str, local: &str) -> Name {
        Name::new(prefix, local)
    }

    #[test]
    fn graph_round_trip() {
        let mut g = Graph::new();
        g.insert(Triple::Type(n("a", "ecg01"), n("a", "ECGDiagnosis")));
        g.insert(Triple::Object(n("a", "ecg01"), n("a", "finding"), n("a", "f01")));
        g.insert(Triple::Data(n("a", "f01"), n("a", "value"), Literal::string("Normal ECG")));
        g.insert(Triple::Data(n("a", "pax01"), n("a", "value"), Literal::int(27)));
        let text = g.serialize();
        let back = Graph::parse(&text).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn empty_graph_matches_nothing() {
        let g = Graph::new();
        let patterns = parse_patterns("(?x type a:C)").unwrap();
        assert!(match_patterns(&g, &patterns).is_empty());
    }

    #[test]
    fn ground_pattern_yields_empty_binding() {
        let mut g = Graph::new();
        g.insert(Triple::Type(n("a", "i"), n("a", "C")));
        let patterns = parse_patterns("(a:i type a:C)").unwrap();
        let result = match_patterns(&g, &patterns);
        assert_eq!(result.len(), 1);
        assert!(result.iter().next().unwrap().is_empty());
    }

    #[test]
    fn repeated_variable_must_agree() {
        let mut g = Graph::new();
        g.insert(Triple::Object(n("a", "x"), n("a", "p"), n("a", "x")));
        g.insert(Triple::Object(n("a", "x"), n("a", "p"), n("a", "y")));
        let patterns = parse_patterns("(?v a:p ?v)").unwrap();
        let result = match_patterns(&g, &patterns);
        assert_eq!(result.len(), 1);
    }
}
