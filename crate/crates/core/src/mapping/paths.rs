//! Ontology path enumeration and path mapping candidate search.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::parser_support::{self, line_parser};
use crate::model::{Axiom, ClassExpression, Name, Ontology, ParseError};
use crate::reasoner::SubsumptionLattice;

use super::{MappingDirection, MappingError, OntologyPath, PathMappingCandidate};

/// Step graph of an ontology: (start class, property, end class) triples
/// licensed by `Exists`/`ExactlyOne` conjuncts of a definition or subclass
/// axiom of the start class.
fn step_graph(onto: &Ontology) -> BTreeMap<Name, BTreeSet<(Name, Name)>> {
    let mut steps: BTreeMap<Name, BTreeSet<(Name, Name)>> = BTreeMap::new();
    for axiom in &onto.axioms {
        let (start, expr) = match axiom {
            Axiom::SubClass(ClassExpression::Named(c), e) => (c, e),
            Axiom::EquivClass(ClassExpression::Named(c), e) => (c, e),
            Axiom::EquivClass(e, ClassExpression::Named(c)) => (c, e),
            _ => continue,
        };
        for conjunct in expr.conjuncts() {
            let (property, filler) = match conjunct {
                ClassExpression::Exists(p, f) | ClassExpression::ExactlyOne(p, f) => (p, f),
                _ => continue,
            };
            if let ClassExpression::Named(end) = filler.as_ref() {
                steps.entry(start.clone()).or_default().insert((property.clone(), end.clone()));
            }
        }
    }
    steps
}

/// Every path `A.p1[B1]...pk[Bk]` with `k ≤ max_len` whose steps are licensed
/// by the ontology's axioms. Class revisits are allowed; the length bound
/// keeps the walk set finite.
pub fn enumerate_paths(onto: &Ontology, max_len: usize) -> BTreeSet<OntologyPath> {
    let steps = step_graph(onto);
    let mut out = BTreeSet::new();
    let mut stack: Vec<OntologyPath> = Vec::new();
    for start in steps.keys() {
        stack.push(OntologyPath { start: start.clone(), steps: Vec::new() });
        while let Some(path) = stack.pop() {
            let at = if path.steps.is_empty() { &path.start } else { path.end() };
            if path.steps.len() < max_len {
                if let Some(next_steps) = steps.get(at) {
                    for (property, end) in next_steps {
                        let mut extended = path.steps.clone();
                        extended.push((property.clone(), end.clone()));
                        let next = OntologyPath { start: path.start.clone(), steps: extended };
                        out.insert(next.clone());
                        stack.push(next);
                    }
                }
            }
        }
    }
    out
}

/// Definition-2 candidate search: a pair qualifies as ⊑ when both start and
/// end classes are subsumed left-to-right, as ⊒ for the converse, and as ≡
/// when both hold. All directions that hold are emitted.
pub fn find_path_candidates(
    paths_o: &BTreeSet<OntologyPath>,
    paths_g: &BTreeSet<OntologyPath>,
    lattice: &SubsumptionLattice,
) -> BTreeSet<PathMappingCandidate> {
    let mut out = BTreeSet::new();
    for left in paths_o {
        for right in paths_g {
            let sub = lattice.subsumes(&left.start, &right.start)
                && lattice.subsumes(left.end(), right.end());
            let sup = lattice.subsumes(&right.start, &left.start)
                && lattice.subsumes(right.end(), left.end());
            if sub {
                out.insert(PathMappingCandidate {
                    left: left.clone(),
                    right: right.clone(),
                    direction: MappingDirection::Sub,
                });
            }
            if sup {
                out.insert(PathMappingCandidate {
                    left: left.clone(),
                    right: right.clone(),
                    direction: MappingDirection::Sup,
                });
            }
            if sub && sup {
                out.insert(PathMappingCandidate {
                    left: left.clone(),
                    right: right.clone(),
                    direction: MappingDirection::Equiv,
                });
            }
        }
    }
    out
}

/// Parses Definition-1 path syntax: `a:A.a:p[a:B].a:q[a:C]`.
pub fn parse_path(text: &str) -> Result<OntologyPath, MappingError> {
    let mut p = line_parser(text, 1);
    let path = parse_path_tokens(&mut p)?;
    p.expect_end()?;
    Ok(path)
}

pub(crate) fn parse_path_tokens(
    p: &mut parser_support::LineParser,
) -> Result<OntologyPath, MappingError> {
    let start = parser_support::pname(p)?;
    let mut steps = Vec::new();
    loop {
        if !parser_support::try_punct(p, '.')? {
            break;
        }
        let property = parser_support::pname(p)?;
        parser_support::expect_punct(p, '[')?;
        let end = parser_support::pname(p)?;
        parser_support::expect_punct(p, ']')?;
        steps.push((property, end));
    }
    if steps.is_empty() {
        return Err(MappingError::Parse(ParseError {
            line: 1,
            col: 1,
            message: "a path needs at least one `.property[Class]` step".into(),
        }));
    }
    Ok(OntologyPath { start, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_ontology;

    #[test]
    fn path_display_round_trips() {
        let text = "a:ECGObservation.a:hasAxis[a:ECGAxis].a:hasP-Axis[a:P-Axis]";
        let path = parse_path(text).unwrap();
        assert_eq!(path.to_string(), text);
        assert_eq!(path.len(), 2);
        assert_eq!(path.end(), &Name::new("a", "P-Axis"));
    }

    #[test]
    fn enumeration_is_licensed_by_definitions() {
        let onto = parse_ontology(
            "ontology t\nprefix a\n\
             EquivClass(a:R, And(Exists(a:p, a:B), Exists(a:q, a:C)))\n\
             SubClass(a:B, Exists(a:r, a:D))\n",
        )
        .unwrap();
        let paths = enumerate_paths(&onto, 2);
        let rendered: BTreeSet<String> = paths.iter().map(ToString::to_string).collect();
        assert!(rendered.contains("a:R.a:p[a:B]"));
        assert!(rendered.contains("a:R.a:p[a:B].a:r[a:D]"));
        assert!(rendered.contains("a:B.a:r[a:D]"));
        assert!(!rendered.iter().any(|p| p.contains("Only")));
        // length bound respected
        assert!(paths.iter().all(|p| p.len() <= 2));
    }

    #[test]
    fn prefix_closure_property() {
        let onto = parse_ontology(
            "ontology t\nprefix a\n\
             SubClass(a:A, Exists(a:p, a:A))\n",
        )
        .unwrap();
        let k = 2;
        let at_k = enumerate_paths(&onto, k);
        let at_k1 = enumerate_paths(&onto, k + 1);
        let truncated: BTreeSet<OntologyPath> =
            at_k1.into_iter().filter(|p| p.len() <= k).collect();
        assert_eq!(at_k, truncated);
    }
}
