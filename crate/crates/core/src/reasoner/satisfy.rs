//! Definition satisfaction over a graph, individual recognition, and lints.
//!
//! Satisfaction of `ExactlyOne`, `Only` and `Not` conjuncts is evaluated
//! closed-world over the given graph, on the assumption that a transferred
//! clinical statement is complete. Everything else is plain existence
//! checking against the (saturated) graph.

use std::collections::BTreeSet;

use crate::graph::{Graph, Triple};
use crate::model::{Axiom, ClassExpression, Name, Ontology};

use super::SubsumptionLattice;

/// True when the definiens contains a construct whose evaluation is
/// closed-world (`ExactlyOne`, `Only`, `Not`).
pub(crate) fn uses_closed_world(expr: &ClassExpression) -> bool {
    match expr {
        ClassExpression::ExactlyOne(..) | ClassExpression::Only(..) | ClassExpression::Not(_) => {
            true
        }
        ClassExpression::And(cs) => cs.iter().any(uses_closed_world),
        ClassExpression::Exists(_, f) => uses_closed_world(f),
        _ => false,
    }
}

/// Does `individual` satisfy `expr` in `g`? Assumes `g` is saturated, so type
/// presence suffices for named-class conjuncts.
pub(crate) fn satisfies(g: &Graph, individual: &Name, expr: &ClassExpression) -> bool {
    match expr {
        ClassExpression::Named(class) => g.contains(&Triple::Type(individual.clone(), class.clone())),
        ClassExpression::And(cs) => cs.iter().all(|c| satisfies(g, individual, c)),
        ClassExpression::Exists(p, filler) => filler_witnesses(g, individual, p, filler) > 0,
        ClassExpression::ExactlyOne(p, filler) => filler_witnesses(g, individual, p, filler) == 1,
        ClassExpression::Only(p, filler) => g
            .object_successors(individual, p)
            .all(|y| satisfies(g, &y.clone(), filler)),
        ClassExpression::Code(p, v) => g.data_values(individual, p).any(|w| w == v),
        ClassExpression::Not(class) => {
            !g.contains(&Triple::Type(individual.clone(), class.clone()))
        }
        ClassExpression::OneOf(individuals) => individuals.contains(individual),
        ClassExpression::Range(p, cmp, bound) => {
            let Some(b) = bound.numeric() else { return false };
            g.data_values(individual, p)
                .filter_map(|v| v.numeric())
                .any(|v| cmp.test(v, b))
        }
        ClassExpression::Datatype(dt) => {
            // Only meaningful as a restriction filler; an individual is never
            // a datatype value.
            let _ = dt;
            false
        }
    }
}

/// Successor/value count witnessing an `Exists`/`ExactlyOne` filler.
fn filler_witnesses(g: &Graph, individual: &Name, property: &Name, filler: &ClassExpression) -> usize {
    match filler {
        ClassExpression::Datatype(dt) => {
            g.data_values(individual, property).filter(|v| v.datatype == *dt).count()
        }
        _ => g
            .object_successors(individual, property)
            .filter(|y| satisfies(g, y, filler))
            .count(),
    }
}

/// Named classes of `target` the individual provably belongs to: asserted
/// types plus every class whose equivalence definition is satisfied, closed
/// upward under the lattice.
pub fn recognize(
    g: &Graph,
    individual: &Name,
    target: &Ontology,
    lattice: &SubsumptionLattice,
) -> BTreeSet<Name> {
    let target_classes = target.named_classes();
    let mut recognized: BTreeSet<Name> = g
        .types_of(individual)
        .filter(|c| target_classes.contains(*c))
        .cloned()
        .collect();
    for axiom in &target.axioms {
        let Axiom::EquivClass(a, b) = axiom else { continue };
        let (class, definiens) = match (a, b) {
            (ClassExpression::Named(c), e) => (c, e),
            (e, ClassExpression::Named(c)) => (c, e),
            _ => continue,
        };
        if recognized.contains(class) {
            continue;
        }
        if satisfies(g, individual, definiens) {
            recognized.insert(class.clone());
        }
    }
    let mut closed = recognized.clone();
    for class in &recognized {
        for sup in lattice.subsumers_of(class) {
            if target_classes.contains(&sup) {
                closed.insert(sup);
            }
        }
    }
    closed
}

/// A constraint violation noticed in a graph. Lints never block processing.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum LintWarning {
    /// x is typed C, C requires Only(p, D), but a p-successor fails D.
    ValueConstraint { individual: Name, class: Name, property: Name },
    /// x is typed C, C requires exactly one p-successor in D, count differs.
    Cardinality { individual: Name, class: Name, property: Name, count: usize },
    /// x carries two disjoint types.
    DisjointTypes { individual: Name, a: Name, b: Name },
}

/// Checks the closed-world halves of `Only`/`ExactlyOne` conjuncts and
/// disjointness over asserted types.
pub fn lint_graph(g: &Graph, tbox: &Ontology) -> Vec<LintWarning> {
    let mut warnings = BTreeSet::new();
    let mut constraints: Vec<(Name, ClassExpression)> = Vec::new();
    let mut disjoint: Vec<(Name, Name)> = Vec::new();
    for axiom in &tbox.axioms {
        match axiom {
            Axiom::SubClass(ClassExpression::Named(c), e)
            | Axiom::EquivClass(ClassExpression::Named(c), e)
            | Axiom::EquivClass(e, ClassExpression::Named(c)) => {
                for conjunct in e.conjuncts() {
                    if matches!(
                        conjunct,
                        ClassExpression::Only(..) | ClassExpression::ExactlyOne(..)
                    ) {
                        constraints.push((c.clone(), conjunct.clone()));
                    }
                }
            }
            Axiom::Disjoint(a, b) => disjoint.push((a.clone(), b.clone())),
            _ => {}
        }
    }
    for individual in g.individuals() {
        let types: BTreeSet<Name> = g.types_of(&individual).cloned().collect();
        for (class, constraint) in &constraints {
            if !types.contains(class) {
                continue;
            }
            match constraint {
                ClassExpression::Only(p, filler) => {
                    if !g.object_successors(&individual, p).all(|y| satisfies(g, y, filler)) {
                        warnings.insert(LintWarning::ValueConstraint {
                            individual: individual.clone(),
                            class: class.clone(),
                            property: p.clone(),
                        });
                    }
                }
                ClassExpression::ExactlyOne(p, filler) => {
                    let count = filler_witnesses(g, &individual, p, filler);
                    if count != 1 {
                        warnings.insert(LintWarning::Cardinality {
                            individual: individual.clone(),
                            class: class.clone(),
                            property: p.clone(),
                            count,
                        });
                    }
                }
                _ => {}
            }
        }
        for (a, b) in &disjoint {
            if types.contains(a) && types.contains(b) {
                warnings.insert(LintWarning::DisjointTypes {
                    individual: individual.clone(),
                    a: a.clone().min(b.clone()),
                    b: a.clone().max(b.clone()),
                });
            }
        }
    }
    warnings.into_iter().collect()
}
