//! Saturation-based reasoning over the fragment.
//!
//! `classify` computes all entailed subsumptions between named classes under
//! the positive-fragment semantics: `ExactlyOne(p, C)` subsumes like
//! `Exists(p, C)` (its at-most half is only used by closed-world recognition),
//! `Only` takes no part in subsumption, and complements only feed
//! unsatisfiability reporting. Code restrictions are interned as atomic
//! tokens, which makes code-based class equivalence purely propositional.

mod rules;
mod satisfy;
mod saturate;

pub use rules::{parse_rules, serialize_rules, HornRule, RuleError};
pub use satisfy::{lint_graph, recognize, LintWarning};
pub use saturate::{saturate, saturate_traced, Provenance};

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{Axiom, ClassExpression, Comparator, Datatype, Literal, Name, Ontology};

/// All entailed subsumptions between named classes.
///
/// `subsumes` is reflexive and transitive over `classes`; two classes share an
/// equivalence block exactly when each subsumes the other.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SubsumptionLattice {
    pub classes: BTreeSet<Name>,
    subsumes: BTreeSet<(Name, Name)>,
    pub unsatisfiable: BTreeSet<Name>,
}

impl SubsumptionLattice {
    /// True when `sub` is subsumed by `sup`. Reflexivity holds for any name.
    pub fn subsumes(&self, sub: &Name, sup: &Name) -> bool {
        sub == sup || self.subsumes.contains(&(sub.clone(), sup.clone()))
    }

    pub fn equivalent(&self, a: &Name, b: &Name) -> bool {
        self.subsumes(a, b) && self.subsumes(b, a)
    }

    /// All pairs (sub, sup), including reflexive ones.
    pub fn pairs(&self) -> &BTreeSet<(Name, Name)> {
        &self.subsumes
    }

    /// Named subsumers of `class`, including itself.
    pub fn subsumers_of(&self, class: &Name) -> BTreeSet<Name> {
        let mut out: BTreeSet<Name> = self
            .subsumes
            .iter()
            .filter(|(sub, _)| sub == class)
            .map(|(_, sup)| sup.clone())
            .collect();
        out.insert(class.clone());
        out
    }

    /// Partition of `classes` into equivalence blocks.
    pub fn equiv_blocks(&self) -> Vec<BTreeSet<Name>> {
        let mut blocks: Vec<BTreeSet<Name>> = Vec::new();
        let mut seen: BTreeSet<Name> = BTreeSet::new();
        for class in &self.classes {
            if seen.contains(class) {
                continue;
            }
            let block: BTreeSet<Name> = self
                .classes
                .iter()
                .filter(|other| self.equivalent(class, other))
                .cloned()
                .collect();
            seen.extend(block.iter().cloned());
            blocks.push(block);
        }
        blocks
    }

    /// Members of `set` that no other member strictly subsumes from below.
    pub fn most_specific(&self, set: &BTreeSet<Name>) -> BTreeSet<Name> {
        set.iter()
            .filter(|c| {
                !set.iter().any(|d| d != *c && self.subsumes(d, c) && !self.subsumes(c, d))
            })
            .cloned()
            .collect()
    }
}

/// Classification output extended with the terminology codes each class is
/// subsumed by; the saturation and mapping modules build on this.
#[derive(Debug, Clone, Default)]
pub struct Classification {
    pub lattice: SubsumptionLattice,
    /// class → set of (code property, code literal) it entails.
    pub entailed_codes: BTreeMap<Name, BTreeSet<(Name, Literal)>>,
}

/// Classifies a TBox: all entailed named-class subsumptions.
pub fn classify(tbox: &Ontology) -> SubsumptionLattice {
    classify_axioms(tbox.axioms.iter(), &tbox.named_classes()).lattice
}

/// Normalized expression node of the subsumption calculus.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Node {
    Class(Name),
    Code(Name, Literal),
    Range(Name, Comparator, Literal),
    OneOf(BTreeSet<Name>),
    Not(Name),
    Dt(Datatype),
    And(Vec<Node>),
    Exists(Name, Box<Node>),
    Only(Name, Box<Node>),
}

fn normalize(expr: &ClassExpression) -> Node {
    match expr {
        ClassExpression::Named(n) => Node::Class(n.clone()),
        ClassExpression::Code(p, v) => Node::Code(p.clone(), v.clone()),
        ClassExpression::Range(p, c, b) => Node::Range(p.clone(), *c, b.clone()),
        ClassExpression::OneOf(is) => Node::OneOf(is.iter().cloned().collect()),
        ClassExpression::Not(n) => Node::Not(n.clone()),
        ClassExpression::Datatype(dt) => Node::Dt(*dt),
        ClassExpression::And(cs) => {
            let mut parts: Vec<Node> = Vec::new();
            for c in cs {
                match normalize(c) {
                    Node::And(inner) => parts.extend(inner),
                    other => parts.push(other),
                }
            }
            parts.sort();
            parts.dedup();
            if parts.len() == 1 {
                parts.pop().unwrap()
            } else {
                Node::And(parts)
            }
        }
        // ExactlyOne subsumes like Exists; its at-most half is closed-world only.
        ClassExpression::Exists(p, f) | ClassExpression::ExactlyOne(p, f) => {
            Node::Exists(p.clone(), Box::new(normalize(f)))
        }
        ClassExpression::Only(p, f) => Node::Only(p.clone(), Box::new(normalize(f))),
    }
}

fn collect_nodes(node: &Node, out: &mut BTreeSet<Node>) {
    out.insert(node.clone());
    match node {
        Node::And(cs) => cs.iter().for_each(|c| collect_nodes(c, out)),
        Node::Exists(_, f) | Node::Only(_, f) => collect_nodes(f, out),
        _ => {}
    }
}

/// Reflexive-transitive property order from Sub/EquivProperty axioms.
pub(crate) fn property_order<'a>(
    axioms: impl IntoIterator<Item = &'a Axiom>,
) -> BTreeSet<(Name, Name)> {
    let mut leq: BTreeSet<(Name, Name)> = BTreeSet::new();
    let mut props: BTreeSet<Name> = BTreeSet::new();
    for axiom in axioms {
        match axiom {
            Axiom::SubProperty(p, q) => {
                leq.insert((p.clone(), q.clone()));
                props.insert(p.clone());
                props.insert(q.clone());
            }
            Axiom::EquivProperty(p, q) => {
                leq.insert((p.clone(), q.clone()));
                leq.insert((q.clone(), p.clone()));
                props.insert(p.clone());
                props.insert(q.clone());
            }
            _ => {}
        }
    }
    for p in &props {
        leq.insert((p.clone(), p.clone()));
    }
    loop {
        let mut added = Vec::new();
        for (a, b) in &leq {
            for (c, d) in &leq {
                if b == c && !leq.contains(&(a.clone(), d.clone())) {
                    added.push((a.clone(), d.clone()));
                }
            }
        }
        if added.is_empty() {
            break;
        }
        leq.extend(added);
    }
    leq
}

/// Classifies an explicit axiom set over a given named-class universe.
pub fn classify_axioms<'a>(
    axioms: impl IntoIterator<Item = &'a Axiom> + Clone,
    classes: &BTreeSet<Name>,
) -> Classification {
    let prop_leq = property_order(axioms.clone());
    let leq = |p: &Name, q: &Name| p == q || prop_leq.contains(&(p.clone(), q.clone()));

    // Node universe: every subexpression of every class axiom plus all classes.
    let mut universe: BTreeSet<Node> = BTreeSet::new();
    let mut class_axioms: Vec<(Node, Node, bool)> = Vec::new();
    let mut disjoint: BTreeSet<(Name, Name)> = BTreeSet::new();
    for axiom in axioms {
        match axiom {
            Axiom::SubClass(a, b) => {
                let (na, nb) = (normalize(a), normalize(b));
                collect_nodes(&na, &mut universe);
                collect_nodes(&nb, &mut universe);
                class_axioms.push((na, nb, false));
            }
            Axiom::EquivClass(a, b) => {
                let (na, nb) = (normalize(a), normalize(b));
                collect_nodes(&na, &mut universe);
                collect_nodes(&nb, &mut universe);
                class_axioms.push((na, nb, true));
            }
            Axiom::Disjoint(a, b) => {
                universe.insert(Node::Class(a.clone()));
                universe.insert(Node::Class(b.clone()));
                disjoint.insert((a.clone(), b.clone()));
                disjoint.insert((b.clone(), a.clone()));
            }
            _ => {}
        }
    }
    for class in classes {
        universe.insert(Node::Class(class.clone()));
    }

    let nodes: Vec<Node> = universe.into_iter().collect();
    let index: BTreeMap<&Node, usize> = nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let n = nodes.len();

    // Indexes driving the completion rules.
    let mut and_memberships: Vec<Vec<usize>> = vec![Vec::new(); n]; // conjunct -> And nodes
    let mut exists_with_filler: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, node) in nodes.iter().enumerate() {
        match node {
            Node::And(cs) => {
                for c in cs {
                    and_memberships[index[c]].push(i);
                }
            }
            Node::Exists(_, f) => exists_with_filler[index[f.as_ref()]].push(i),
            _ => {}
        }
    }

    let mut sub = vec![vec![false; n]; n];
    let mut queue: Vec<(usize, usize)> = Vec::new();
    let add = |sub: &mut Vec<Vec<bool>>, queue: &mut Vec<(usize, usize)>, x: usize, y: usize| {
        if !sub[x][y] {
            sub[x][y] = true;
            queue.push((x, y));
        }
    };

    for i in 0..n {
        add(&mut sub, &mut queue, i, i);
    }
    for (a, b, equiv) in &class_axioms {
        let (ia, ib) = (index[a], index[b]);
        add(&mut sub, &mut queue, ia, ib);
        if *equiv {
            add(&mut sub, &mut queue, ib, ia);
        }
    }
    // conjunction elimination
    for (i, node) in nodes.iter().enumerate() {
        if let Node::And(cs) = node {
            for c in cs {
                add(&mut sub, &mut queue, i, index[c]);
            }
        }
    }
    // Token subsumption along the property order; enumeration subset edges.
    for (i, a) in nodes.iter().enumerate() {
        for (j, b) in nodes.iter().enumerate() {
            if i == j {
                continue;
            }
            let edge = match (a, b) {
                (Node::Code(p, v), Node::Code(q, w)) => v == w && leq(p, q),
                (Node::Range(p, c1, b1), Node::Range(q, c2, b2)) => {
                    c1 == c2 && b1 == b2 && leq(p, q)
                }
                (Node::OneOf(s), Node::OneOf(t)) => s.is_subset(t),
                _ => false,
            };
            if edge {
                add(&mut sub, &mut queue, i, j);
            }
        }
    }

    while let Some((x, y)) = queue.pop() {
        // transitivity
        for z in 0..n {
            if sub[y][z] && !sub[x][z] {
                add(&mut sub, &mut queue, x, z);
            }
            if sub[z][x] && !sub[z][y] {
                add(&mut sub, &mut queue, z, y);
            }
        }
        // conjunction introduction: x now below conjunct y of some And node
        for &a in &and_memberships[y] {
            if sub[x][a] {
                continue;
            }
            let Node::And(cs) = &nodes[a] else { unreachable!() };
            if cs.iter().all(|c| sub[x][index[c]]) {
                add(&mut sub, &mut queue, x, a);
            }
        }
        // existential monotonicity over filler pair (x, y)
        for &e1 in &exists_with_filler[x] {
            for &e2 in &exists_with_filler[y] {
                if sub[e1][e2] {
                    continue;
                }
                let (Node::Exists(p, _), Node::Exists(q, _)) = (&nodes[e1], &nodes[e2]) else {
                    unreachable!()
                };
                if leq(p, q) {
                    add(&mut sub, &mut queue, e1, e2);
                }
            }
        }
    }

    // Project onto named classes and collect entailed code tokens.
    let mut named: BTreeSet<Name> = classes.clone();
    for node in &nodes {
        if let Node::Class(c) = node {
            named.insert(c.clone());
        }
    }
    let mut lattice = SubsumptionLattice { classes: named.clone(), ..Default::default() };
    let mut entailed_codes: BTreeMap<Name, BTreeSet<(Name, Literal)>> = BTreeMap::new();
    for a in &named {
        let ia = index[&Node::Class(a.clone())];
        for b in &named {
            if sub[ia][index[&Node::Class(b.clone())]] {
                lattice.subsumes.insert((a.clone(), b.clone()));
            }
        }
        let codes = entailed_codes.entry(a.clone()).or_default();
        for (j, node) in nodes.iter().enumerate() {
            if let Node::Code(p, v) = node {
                if sub[ia][j] {
                    codes.insert((p.clone(), v.clone()));
                }
            }
        }
        // unsatisfiability: below two disjoint classes, or below B and ¬B
        let below_disjoint = disjoint.iter().any(|(d1, d2)| {
            d1 < d2
                && sub[ia][index[&Node::Class(d1.clone())]]
                && sub[ia][index[&Node::Class(d2.clone())]]
        });
        let below_complement = nodes.iter().enumerate().any(|(j, node)| match node {
            Node::Not(c) => sub[ia][j] && sub[ia][index[&Node::Class(c.clone())]],
            _ => false,
        });
        if below_disjoint || below_complement {
            lattice.unsatisfiable.insert(a.clone());
        }
    }
    Classification { lattice, entailed_codes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_ontology;

    #[test]
    fn code_sharing_makes_classes_equivalent() {
        let onto = parse_ontology(
            "ontology t\nprefix a\n\
             EquivClass(a:A, Code(a:loinc, \"34534-8\"))\n\
             EquivClass(a:B, Code(a:loinc, \"34534-8\"))\n",
        )
        .unwrap();
        let lattice = classify(&onto);
        assert!(lattice.equivalent(&Name::new("a", "A"), &Name::new("a", "B")));
    }

    #[test]
    fn empty_tbox_is_reflexive_only() {
        let onto = parse_ontology("ontology t\nprefix a\nclass a:A\n").unwrap();
        let lattice = classify(&onto);
        let a = Name::new("a", "A");
        assert!(lattice.subsumes(&a, &a));
        assert_eq!(lattice.pairs().len(), 1);
        assert!(lattice.unsatisfiable.is_empty());
    }

    #[test]
    fn conjunction_definition_gives_chain() {
        let onto = parse_ontology(
            "ontology t\nprefix c\n\
             EquivClass(c:Diagnosis, And(c:Evaluation, ExactlyOne(c:hasFinding, c:Finding), Exists(c:hasObs, c:Observation)))\n\
             EquivClass(c:ECGDiagnosis, And(c:Diagnosis, ExactlyOne(c:hasFinding, c:ECGFinding), Exists(c:hasObs, c:ECGRecording)))\n",
        )
        .unwrap();
        let lattice = classify(&onto);
        let ecg = Name::new("c", "ECGDiagnosis");
        assert!(lattice.subsumes(&ecg, &Name::new("c", "Diagnosis")));
        assert!(lattice.subsumes(&ecg, &Name::new("c", "Evaluation")));
        assert!(!lattice.subsumes(&Name::new("c", "Diagnosis"), &ecg));
    }

    #[test]
    fn disjointness_reports_unsatisfiable() {
        let onto = parse_ontology(
            "ontology t\nprefix a\n\
             SubClass(a:C, a:A)\nSubClass(a:C, a:B)\nDisjoint(a:A, a:B)\n",
        )
        .unwrap();
        let lattice = classify(&onto);
        assert_eq!(lattice.unsatisfiable.iter().collect::<Vec<_>>(), [&Name::new("a", "C")]);
    }

    #[test]
    fn property_equivalence_aligns_code_tokens() {
        let onto = parse_ontology(
            "ontology t\nprefix a\nimport c\n\
             EquivClass(a:A, Code(a:loinc, \"1\"))\n\
             EquivClass(c:B, Code(c:loinc, \"1\"))\n\
             EquivProperty(a:loinc, c:loinc)\n",
        )
        .unwrap();
        let lattice = classify(&onto);
        assert!(lattice.equivalent(&Name::new("a", "A"), &Name::new("c", "B")));
    }

    #[test]
    fn subproperty_gives_one_directional_code_subsumption() {
        let onto = parse_ontology(
            "ontology t\nprefix a\nimport c\n\
             EquivClass(a:A, Code(a:p, \"1\"))\n\
             EquivClass(c:B, Code(c:q, \"1\"))\n\
             SubProperty(a:p, c:q)\n",
        )
        .unwrap();
        let lattice = classify(&onto);
        let (a, b) = (Name::new("a", "A"), Name::new("c", "B"));
        assert!(lattice.subsumes(&a, &b));
        assert!(!lattice.subsumes(&b, &a));
    }
}
