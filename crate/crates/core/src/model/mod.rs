//! Core ontology model: names, literals, class expressions and axioms.
//!
//! The model covers a small description-logic fragment: named classes,
//! intersections, existential and universal restrictions, exact-cardinality-one
//! restrictions, code restrictions (existentials filled by a single terminology
//! code literal), complements of named classes, enumerations of individuals and
//! single data-range comparisons. Ontologies are sets of axioms over that
//! fragment plus class/property declarations, identified by a namespace prefix.

mod parser;
pub(crate) mod parser_support;
mod serialize;

pub(crate) use parser::parse_axiom_str;
pub use parser::{parse_expression, parse_ontology, ParseError};
pub(crate) use serialize::{render_axiom, render_expression};
pub use serialize::serialize_ontology;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A prefixed name. The `(prefix, local)` pair is the identity of classes,
/// properties and individuals; comparison is case-sensitive.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name {
    pub prefix: String,
    pub local: String,
}

impl Name {
    pub fn new(prefix: impl Into<String>, local: impl Into<String>) -> Self {
        let name = Name { prefix: prefix.into(), local: local.into() };
        debug_assert!(!name.local.is_empty(), "local part must be non-empty");
        name
    }

    /// Parses `prefix:local`; errors on missing colon or empty parts.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        parser::parse_name(text)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.prefix, self.local)
    }
}

/// Datatypes usable for literals and as fillers of value restrictions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Datatype {
    String,
    Int,
    Decimal,
    Boolean,
    Date,
}

impl Datatype {
    pub fn keyword(self) -> &'static str {
        match self {
            Datatype::String => "string",
            Datatype::Int => "int",
            Datatype::Decimal => "decimal",
            Datatype::Boolean => "boolean",
            Datatype::Date => "date",
        }
    }

    pub fn from_keyword(kw: &str) -> Option<Self> {
        match kw {
            "string" => Some(Datatype::String),
            "int" => Some(Datatype::Int),
            "decimal" => Some(Datatype::Decimal),
            "boolean" => Some(Datatype::Boolean),
            "date" => Some(Datatype::Date),
            _ => None,
        }
    }
}

impl fmt::Display for Datatype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// A typed literal. The lexical form is validated (and for int/boolean
/// normalized) against the datatype at construction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub lexical: String,
    pub datatype: Datatype,
}

/// Error raised when a lexical form does not parse under its datatype.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid {datatype} literal: {lexical:?}")]
pub struct LiteralError {
    pub lexical: String,
    pub datatype: Datatype,
}

impl Literal {
    pub fn new(lexical: impl Into<String>, datatype: Datatype) -> Result<Self, LiteralError> {
        let lexical = lexical.into();
        let bad = || LiteralError { lexical: lexical.clone(), datatype };
        let lexical = match datatype {
            Datatype::String => lexical,
            Datatype::Int => lexical.parse::<i64>().map_err(|_| bad())?.to_string(),
            Datatype::Decimal => {
                if !is_decimal_lexical(&lexical) {
                    return Err(bad());
                }
                lexical
            }
            Datatype::Boolean => lexical.parse::<bool>().map_err(|_| bad())?.to_string(),
            Datatype::Date => {
                if !is_date_lexical(&lexical) {
                    return Err(bad());
                }
                lexical
            }
        };
        Ok(Literal { lexical, datatype })
    }

    pub fn string(s: impl Into<String>) -> Self {
        Literal { lexical: s.into(), datatype: Datatype::String }
    }

    pub fn int(v: i64) -> Self {
        Literal { lexical: v.to_string(), datatype: Datatype::Int }
    }

    /// Numeric value, when the datatype is int or decimal.
    pub fn numeric(&self) -> Option<f64> {
        match self.datatype {
            Datatype::Int | Datatype::Decimal => self.lexical.parse().ok(),
            _ => None,
        }
    }
}

fn is_decimal_lexical(s: &str) -> bool {
    let t = s.strip_prefix('-').unwrap_or(s);
    let mut parts = t.splitn(2, '.');
    let int = parts.next().unwrap_or("");
    let frac = parts.next();
    !int.is_empty()
        && int.bytes().all(|b| b.is_ascii_digit())
        && frac.is_none_or(|f| !f.is_empty() && f.bytes().all(|b| b.is_ascii_digit()))
}

fn is_date_lexical(s: &str) -> bool {
    let b = s.as_bytes();
    b.len() == 10
        && b[4] == b'-'
        && b[7] == b'-'
        && [0, 1, 2, 3, 5, 6, 8, 9].iter().all(|&i| b[i].is_ascii_digit())
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"", self.lexical.replace('\\', "\\\\").replace('"', "\\\""))?;
        if self.datatype != Datatype::String {
            write!(f, "^^{}", self.datatype)?;
        }
        Ok(())
    }
}

/// Comparison operator of a data-range restriction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Comparator {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
}

impl Comparator {
    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Lt => "<",
            Comparator::Le => "<=",
            Comparator::Gt => ">",
            Comparator::Ge => ">=",
            Comparator::Eq => "=",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        match s {
            "<" => Some(Comparator::Lt),
            "<=" => Some(Comparator::Le),
            ">" => Some(Comparator::Gt),
            ">=" => Some(Comparator::Ge),
            "=" => Some(Comparator::Eq),
            _ => None,
        }
    }

    pub fn test(self, left: f64, right: f64) -> bool {
        match self {
            Comparator::Lt => left < right,
            Comparator::Le => left <= right,
            Comparator::Gt => left > right,
            Comparator::Ge => left >= right,
            Comparator::Eq => left == right,
        }
    }
}

/// Class expressions of the fragment.
///
/// `Code(p, v)` is the literal-filled existential ∃p.{v} used for terminology
/// codes and enumerated attribute values; it is a node kind of its own rather
/// than a general nominal mechanism. `Datatype` appears only as the filler of
/// value restrictions such as ∃value.int.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassExpression {
    Named(Name),
    /// Intersection of at least two conjuncts, no duplicates.
    And(Vec<ClassExpression>),
    Exists(Name, Box<ClassExpression>),
    Code(Name, Literal),
    ExactlyOne(Name, Box<ClassExpression>),
    Only(Name, Box<ClassExpression>),
    /// Complement of a named class.
    Not(Name),
    /// Enumeration of individuals.
    OneOf(Vec<Name>),
    /// Single comparison on a data property, e.g. ∃p.[>30].
    Range(Name, Comparator, Literal),
    Datatype(Datatype),
}

impl ClassExpression {
    pub fn named(name: Name) -> Self {
        ClassExpression::Named(name)
    }

    pub fn and(conjuncts: Vec<ClassExpression>) -> Self {
        debug_assert!(conjuncts.len() >= 2, "intersection needs at least two conjuncts");
        ClassExpression::And(conjuncts)
    }

    pub fn exists(property: Name, filler: ClassExpression) -> Self {
        ClassExpression::Exists(property, Box::new(filler))
    }

    /// Top-level conjuncts: the members of an `And`, or the expression itself.
    pub fn conjuncts(&self) -> impl Iterator<Item = &ClassExpression> {
        match self {
            ClassExpression::And(cs) => cs.iter(),
            other => std::slice::from_ref(other).iter(),
        }
    }

    /// All names mentioned anywhere in the expression.
    pub fn names(&self, out: &mut BTreeSet<Name>) {
        match self {
            ClassExpression::Named(n) | ClassExpression::Not(n) => {
                out.insert(n.clone());
            }
            ClassExpression::And(cs) => cs.iter().for_each(|c| c.names(out)),
            ClassExpression::Exists(p, f)
            | ClassExpression::ExactlyOne(p, f)
            | ClassExpression::Only(p, f) => {
                out.insert(p.clone());
                f.names(out);
            }
            ClassExpression::Code(p, _) | ClassExpression::Range(p, _, _) => {
                out.insert(p.clone());
            }
            ClassExpression::OneOf(is) => out.extend(is.iter().cloned()),
            ClassExpression::Datatype(_) => {}
        }
    }
}

/// Axioms of the fragment. Property axioms relate property names only;
/// `Disjoint` relates named classes only.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    SubClass(ClassExpression, ClassExpression),
    EquivClass(ClassExpression, ClassExpression),
    SubProperty(Name, Name),
    EquivProperty(Name, Name),
    Disjoint(Name, Name),
    SameIndividual(Name, Name),
}

impl Axiom {
    /// Rank used for the canonical serialization order.
    pub fn kind_rank(&self) -> u8 {
        match self {
            Axiom::SubClass(..) => 0,
            Axiom::EquivClass(..) => 1,
            Axiom::SubProperty(..) => 2,
            Axiom::EquivProperty(..) => 3,
            Axiom::Disjoint(..) => 4,
            Axiom::SameIndividual(..) => 5,
        }
    }

    pub fn names(&self, out: &mut BTreeSet<Name>) {
        match self {
            Axiom::SubClass(a, b) | Axiom::EquivClass(a, b) => {
                a.names(out);
                b.names(out);
            }
            Axiom::SubProperty(a, b)
            | Axiom::EquivProperty(a, b)
            | Axiom::Disjoint(a, b)
            | Axiom::SameIndividual(a, b) => {
                out.insert(a.clone());
                out.insert(b.clone());
            }
        }
    }
}

/// Range of a declared data property.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum PropertyRange {
    Data(Datatype),
    Class(Name),
}

/// Declaration of a property, optionally with domain and range.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PropertyDecl {
    pub domain: Option<Name>,
    pub range: Option<PropertyRange>,
}

/// A named TBox over the fragment: declarations plus a set of axioms.
///
/// Every name mentioned must live in the ontology's own namespace or in an
/// imported one. Axioms are a set; insertion order is never observable.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ontology {
    pub id: String,
    pub prefix: String,
    pub imports: BTreeSet<String>,
    pub classes: BTreeSet<Name>,
    pub properties: BTreeMap<Name, PropertyDecl>,
    pub axioms: BTreeSet<Axiom>,
}

impl Ontology {
    pub fn new(id: impl Into<String>, prefix: impl Into<String>) -> Self {
        Ontology { id: id.into(), prefix: prefix.into(), ..Default::default() }
    }

    /// Every name mentioned in axioms or declarations.
    pub fn vocabulary(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for axiom in &self.axioms {
            axiom.names(&mut out);
        }
        out.extend(self.classes.iter().cloned());
        out.extend(self.properties.keys().cloned());
        for decl in self.properties.values() {
            if let Some(domain) = &decl.domain {
                out.insert(domain.clone());
            }
            if let Some(PropertyRange::Class(c)) = &decl.range {
                out.insert(c.clone());
            }
        }
        out
    }

    /// Named classes appearing in class position of any axiom or declaration.
    pub fn named_classes(&self) -> BTreeSet<Name> {
        let mut out = self.classes.clone();
        for axiom in &self.axioms {
            match axiom {
                Axiom::SubClass(a, b) | Axiom::EquivClass(a, b) => {
                    collect_classes(a, &mut out);
                    collect_classes(b, &mut out);
                }
                Axiom::Disjoint(a, b) => {
                    out.insert(a.clone());
                    out.insert(b.clone());
                }
                _ => {}
            }
        }
        out
    }

    /// Merges axioms and declarations of `other` into `self` (id and prefix
    /// are kept). Used to assemble the merged TBoxes of the transfer steps.
    pub fn absorb(&mut self, other: &Ontology) {
        self.imports.insert(other.prefix.clone());
        self.classes.extend(other.classes.iter().cloned());
        for (name, decl) in &other.properties {
            self.properties.entry(name.clone()).or_insert_with(|| decl.clone());
        }
        self.axioms.extend(other.axioms.iter().cloned());
    }
}

fn collect_classes(expr: &ClassExpression, out: &mut BTreeSet<Name>) {
    match expr {
        ClassExpression::Named(n) | ClassExpression::Not(n) => {
            out.insert(n.clone());
        }
        ClassExpression::And(cs) => cs.iter().for_each(|c| collect_classes(c, out)),
        ClassExpression::Exists(_, f)
        | ClassExpression::ExactlyOne(_, f)
        | ClassExpression::Only(_, f) => collect_classes(f, out),
        _ => {}
    }
}

impl serde::Serialize for Name {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Name {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Name::parse(&text).map_err(serde::de::Error::custom)
    }
}

impl serde::Serialize for Datatype {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.keyword())
    }
}

impl<'de> serde::Deserialize<'de> for Datatype {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Datatype::from_keyword(&text)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown datatype `{text}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn int_literals_normalize() {
        let lit = Literal::new("027", Datatype::Int).unwrap();
        assert_eq!(lit.lexical, "27");
        assert!(Literal::new("27x", Datatype::Int).is_err());
    }

    #[test]
    fn date_and_decimal_validation() {
        assert!(Literal::new("2024-01-31", Datatype::Date).is_ok());
        assert!(Literal::new("2024-1-31", Datatype::Date).is_err());
        assert!(Literal::new("-3.25", Datatype::Decimal).is_ok());
        assert!(Literal::new("3.", Datatype::Decimal).is_err());
    }

    #[test]
    fn vocabulary_collects_declarations_and_axioms() {
        let mut onto = Ontology::new("t", "a");
        onto.classes.insert(Name::new("a", "Orphan"));
        onto.axioms.insert(Axiom::SubClass(
            ClassExpression::named(Name::new("a", "A")),
            ClassExpression::exists(Name::new("a", "p"), ClassExpression::named(Name::new("a", "B"))),
        ));
        let vocab = onto.vocabulary();
        for local in ["Orphan", "A", "p", "B"] {
            assert!(vocab.contains(&Name::new("a", local)), "missing {local}");
        }
    }
}
