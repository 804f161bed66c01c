//! ABox saturation: the least fixpoint of the derivation rules.
//!
//! The fixpoint combines type propagation along the lattice, code inheritance
//! from class definitions, universal-restriction propagation, property
//! propagation, `sameAs` aliasing, definition recognition and Horn rule
//! firing. Evaluation is semi-naive: only newly derived triples re-enter rule
//! matching.
//!
//! Generative rules mint deterministic skolem individuals, one per (rule id,
//! body binding) key, reused on re-fire. A generative rule never fires on a
//! binding that already contains a skolem, which keeps the individual
//! universe (and therefore the whole saturation) finite.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use sha2::{Digest, Sha256};

use crate::graph::{instantiate, match_patterns, match_patterns_delta, Binding, Graph, Term, Triple};
use crate::model::{Axiom, ClassExpression, Literal, Name, Ontology};

use super::satisfy::{satisfies, uses_closed_world};
use super::{classify_axioms, property_order, HornRule};

/// How a derived triple was obtained: `closed_world` marks triples that are
/// not entailed under open-world semantics of the fragment (they relied on
/// closed-world evaluation of `ExactlyOne`, `Only` or `Not` somewhere in
/// their derivation).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Provenance {
    pub closed_world: bool,
}

/// Saturates `g` against the TBox, extra property/sameAs axioms and rules.
pub fn saturate(
    g: &Graph,
    tbox: &Ontology,
    property_axioms: &BTreeSet<Axiom>,
    rules: &[HornRule],
) -> Graph {
    run(g, tbox, property_axioms, rules, true)
}

/// Like [`saturate`], additionally reporting per-triple provenance.
pub fn saturate_traced(
    g: &Graph,
    tbox: &Ontology,
    property_axioms: &BTreeSet<Axiom>,
    rules: &[HornRule],
) -> (Graph, BTreeMap<Triple, Provenance>) {
    let full = run(g, tbox, property_axioms, rules, true);
    let open = run(g, tbox, property_axioms, rules, false);
    let provenance = full
        .triples
        .iter()
        .map(|t| (t.clone(), Provenance { closed_world: !open.contains(t) }))
        .collect();
    (full, provenance)
}

fn run(
    g: &Graph,
    tbox: &Ontology,
    property_axioms: &BTreeSet<Axiom>,
    rules: &[HornRule],
    closed_world: bool,
) -> Graph {
    let engine = Engine::prepare(tbox, property_axioms, rules, closed_world);
    let mut graph = g.clone();
    let seed: Vec<Triple> = graph.triples.iter().cloned().collect();
    engine.simple_closure(&mut graph, seed);

    let mut rule_delta: Option<Graph> = None; // None: first pass matches the full graph
    loop {
        let mut added = engine.recognition_sweep(&mut graph);
        added.extend(engine.fire_rules(&mut graph, rule_delta.as_ref()));
        if added.is_empty() {
            break;
        }
        let closure_added = engine.simple_closure(&mut graph, added.clone());
        added.extend(closure_added);
        rule_delta = Some(added.into_iter().collect());
    }
    graph
}

struct Engine<'a> {
    /// class → strict and non-strict named subsumers.
    supers: BTreeMap<Name, BTreeSet<Name>>,
    /// class → terminology codes it entails.
    codes: BTreeMap<Name, BTreeSet<(Name, Literal)>>,
    /// property → strictly wider properties.
    prop_supers: BTreeMap<Name, BTreeSet<Name>>,
    /// class → (property, named filler) of its `Only` conjuncts.
    only_constraints: BTreeMap<Name, Vec<(Name, Name)>>,
    /// (class, definiens) pairs from equivalence axioms.
    definitions: Vec<(Name, ClassExpression)>,
    /// individual → its sameAs group (excluding itself).
    aliases: BTreeMap<Name, BTreeSet<Name>>,
    rules: &'a [HornRule],
    closed_world: bool,
}

impl<'a> Engine<'a> {
    fn prepare(
        tbox: &Ontology,
        property_axioms: &BTreeSet<Axiom>,
        rules: &'a [HornRule],
        closed_world: bool,
    ) -> Self {
        let axioms: Vec<&Axiom> = tbox.axioms.iter().chain(property_axioms.iter()).collect();
        let classification = classify_axioms(axioms.iter().copied(), &tbox.named_classes());

        let mut supers = BTreeMap::new();
        for class in &classification.lattice.classes {
            supers.insert(class.clone(), classification.lattice.subsumers_of(class));
        }

        let mut prop_supers: BTreeMap<Name, BTreeSet<Name>> = BTreeMap::new();
        for (p, q) in property_order(axioms.iter().copied()) {
            if p != q {
                prop_supers.entry(p).or_default().insert(q);
            }
        }

        let mut only_constraints: BTreeMap<Name, Vec<(Name, Name)>> = BTreeMap::new();
        let mut definitions = Vec::new();
        for axiom in &axioms {
            let named_with_expr = match axiom {
                Axiom::SubClass(ClassExpression::Named(c), e) => Some((c, e, false)),
                Axiom::EquivClass(ClassExpression::Named(c), e) => Some((c, e, true)),
                Axiom::EquivClass(e, ClassExpression::Named(c)) => Some((c, e, true)),
                _ => None,
            };
            let Some((class, expr, is_definition)) = named_with_expr else { continue };
            for conjunct in expr.conjuncts() {
                if let ClassExpression::Only(p, filler) = conjunct {
                    if let ClassExpression::Named(d) = filler.as_ref() {
                        only_constraints
                            .entry(class.clone())
                            .or_default()
                            .push((p.clone(), d.clone()));
                    }
                }
            }
            if is_definition && !matches!(expr, ClassExpression::Named(_)) {
                definitions.push((class.clone(), expr.clone()));
            }
        }
        definitions.sort();
        definitions.dedup();

        let mut alias_groups: Vec<BTreeSet<Name>> = Vec::new();
        for axiom in &axioms {
            if let Axiom::SameIndividual(i, j) = axiom {
                let mut group: BTreeSet<Name> = [i.clone(), j.clone()].into();
                alias_groups.retain(|existing| {
                    if existing.intersection(&group).next().is_some() {
                        group.extend(existing.iter().cloned());
                        false
                    } else {
                        true
                    }
                });
                alias_groups.push(group);
            }
        }
        let mut aliases: BTreeMap<Name, BTreeSet<Name>> = BTreeMap::new();
        for group in alias_groups {
            for member in &group {
                let mut others = group.clone();
                others.remove(member);
                aliases.insert(member.clone(), others);
            }
        }

        Engine {
            supers,
            codes: classification.entailed_codes,
            prop_supers,
            only_constraints,
            definitions,
            aliases,
            rules,
            closed_world,
        }
    }

    /// Worklist closure of the per-triple rules: type propagation, code
    /// inheritance, universal propagation, property propagation, aliasing.
    fn simple_closure(&self, graph: &mut Graph, seed: Vec<Triple>) -> Vec<Triple> {
        let mut queue: VecDeque<Triple> = seed.into();
        let mut added = Vec::new();
        while let Some(triple) = queue.pop_front() {
            let mut derived: Vec<Triple> = Vec::new();
            match &triple {
                Triple::Type(x, c) => {
                    if let Some(supers) = self.supers.get(c) {
                        derived.extend(supers.iter().map(|d| Triple::Type(x.clone(), d.clone())));
                    }
                    if let Some(codes) = self.codes.get(c) {
                        derived.extend(
                            codes.iter().map(|(p, v)| Triple::Data(x.clone(), p.clone(), v.clone())),
                        );
                    }
                    if let Some(constraints) = self.only_constraints.get(c) {
                        for (p, d) in constraints {
                            for y in graph.object_successors(x, p) {
                                derived.push(Triple::Type(y.clone(), d.clone()));
                            }
                        }
                    }
                }
                Triple::Object(x, p, y) => {
                    if let Some(wider) = self.prop_supers.get(p) {
                        derived.extend(
                            wider.iter().map(|q| Triple::Object(x.clone(), q.clone(), y.clone())),
                        );
                    }
                    for c in graph.types_of(x) {
                        if let Some(constraints) = self.only_constraints.get(c) {
                            for (q, d) in constraints {
                                if q == p {
                                    derived.push(Triple::Type(y.clone(), d.clone()));
                                }
                            }
                        }
                    }
                }
                Triple::Data(x, p, v) => {
                    if let Some(wider) = self.prop_supers.get(p) {
                        derived.extend(
                            wider.iter().map(|q| Triple::Data(x.clone(), q.clone(), v.clone())),
                        );
                    }
                }
            }
            derived.extend(self.alias_variants(&triple));
            for t in derived {
                if graph.insert(t.clone()) {
                    queue.push_back(t.clone());
                    added.push(t);
                }
            }
        }
        added
    }

    fn alias_variants(&self, triple: &Triple) -> Vec<Triple> {
        let alternatives = |name: &Name| -> Vec<Name> {
            let mut out = vec![name.clone()];
            if let Some(others) = self.aliases.get(name) {
                out.extend(others.iter().cloned());
            }
            out
        };
        let mut out = Vec::new();
        match triple {
            Triple::Type(x, c) => {
                for x2 in alternatives(x) {
                    out.push(Triple::Type(x2, c.clone()));
                }
            }
            Triple::Object(x, p, y) => {
                for x2 in alternatives(x) {
                    for y2 in alternatives(y) {
                        out.push(Triple::Object(x2.clone(), p.clone(), y2));
                    }
                }
            }
            Triple::Data(x, p, v) => {
                for x2 in alternatives(x) {
                    out.push(Triple::Data(x2, p.clone(), v.clone()));
                }
            }
        }
        out
    }

    /// Definition recognition: type an individual with every defined class
    /// whose definiens it satisfies.
    fn recognition_sweep(&self, graph: &mut Graph) -> Vec<Triple> {
        let individuals = graph.individuals();
        let mut candidates = Vec::new();
        for (class, definiens) in &self.definitions {
            if !self.closed_world && uses_closed_world(definiens) {
                continue;
            }
            for x in &individuals {
                let triple = Triple::Type(x.clone(), class.clone());
                if !graph.contains(&triple) && satisfies(graph, x, definiens) {
                    candidates.push(triple);
                }
            }
        }
        let mut added = Vec::new();
        for t in candidates {
            if graph.insert(t.clone()) {
                added.push(t);
            }
        }
        added
    }

    /// Fires all rules; `delta` of `None` matches bodies against the full
    /// graph (first pass), otherwise semi-naive against the delta.
    fn fire_rules(&self, graph: &mut Graph, delta: Option<&Graph>) -> Vec<Triple> {
        let mut pending = Vec::new();
        for rule in self.rules {
            let bindings = match delta {
                None => match_patterns(graph, &rule.body),
                Some(d) => match_patterns_delta(graph, d, &rule.body),
            };
            for binding in bindings {
                if !rule.creates.is_empty() && binding_has_skolem(&binding) {
                    // Skolems never beget skolems: bounds the chase.
                    continue;
                }
                let mut full = binding.clone();
                for var in &rule.creates {
                    full.insert(var.clone(), Term::Name(skolem_name(rule, var, &binding)));
                }
                for pattern in &rule.head {
                    if let Some(t) = instantiate(pattern, &full) {
                        pending.push(t);
                    }
                }
            }
        }
        let mut added = Vec::new();
        for t in pending {
            if graph.insert(t.clone()) {
                added.push(t);
            }
        }
        added
    }
}

pub(crate) fn is_skolem(name: &Name) -> bool {
    name.local.starts_with("_sk_")
}

fn binding_has_skolem(binding: &Binding) -> bool {
    binding.values().any(|t| matches!(t, Term::Name(n) if is_skolem(n)))
}

/// Deterministic skolem: `_sk_<ruleId>_<hash of binding>` in the namespace of
/// the rule head. Re-firing on the same binding reuses the individual.
fn skolem_name(rule: &HornRule, var: &crate::graph::Var, binding: &Binding) -> Name {
    let mut hasher = Sha256::new();
    hasher.update(rule.id.as_bytes());
    hasher.update(b"\n");
    hasher.update(var.0.as_bytes());
    for (v, term) in binding {
        hasher.update(b"\n");
        hasher.update(v.0.as_bytes());
        hasher.update(b"=");
        hasher.update(term.to_string().as_bytes());
    }
    let digest = hasher.finalize();
    let hash: String = digest[..4].iter().map(|b| format!("{b:02x}")).collect();
    let prefix = rule.skolem_namespace().unwrap_or("sk").to_string();
    Name { prefix, local: format!("_sk_{}_{}", rule.id, hash) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_ontology;
    use crate::reasoner::parse_rules;

    fn n(prefix: &str, local: &str) -> Name {
        Name::new(prefix, local)
    }

    #[test]
    fn empty_graph_stays_empty() {
        let tbox = parse_ontology("ontology t\nprefix a\nSubClass(a:A, a:B)\n").unwrap();
        let out = saturate(&Graph::new(), &tbox, &BTreeSet::new(), &[]);
        assert!(out.is_empty());
    }

    #[test]
    fn type_propagation_and_code_inheritance() {
        let tbox = parse_ontology(
            "ontology t\nprefix a\n\
             SubClass(a:B, a:A)\n\
             EquivClass(a:B, Code(a:loinc, \"8601-7\"))\n",
        )
        .unwrap();
        let mut g = Graph::new();
        g.insert(Triple::Type(n("a", "x"), n("a", "B")));
        let out = saturate(&g, &tbox, &BTreeSet::new(), &[]);
        assert!(out.contains(&Triple::Type(n("a", "x"), n("a", "A"))));
        assert!(out.contains(&Triple::Data(n("a", "x"), n("a", "loinc"), Literal::string("8601-7"))));
    }

    #[test]
    fn only_constraint_types_successors() {
        let tbox = parse_ontology(
            "ontology t\nprefix a\n\
             SubClass(a:D, Only(a:finding, a:F))\n",
        )
        .unwrap();
        let mut g = Graph::new();
        g.insert(Triple::Type(n("a", "x"), n("a", "D")));
        g.insert(Triple::Object(n("a", "x"), n("a", "finding"), n("a", "y")));
        let out = saturate(&g, &tbox, &BTreeSet::new(), &[]);
        assert!(out.contains(&Triple::Type(n("a", "y"), n("a", "F"))));
    }

    #[test]
    fn definition_recognition_via_value_code() {
        let tbox = parse_ontology(
            "ontology t\nprefix a\n\
             EquivClass(a:NormalECG, And(a:F, Code(a:value, \"Normal ECG\")))\n\
             EquivClass(a:NormalECG, Code(a:snomed, \"102593009\"))\n",
        )
        .unwrap();
        let mut g = Graph::new();
        g.insert(Triple::Type(n("a", "f01"), n("a", "F")));
        g.insert(Triple::Data(n("a", "f01"), n("a", "value"), Literal::string("Normal ECG")));
        let out = saturate(&g, &tbox, &BTreeSet::new(), &[]);
        assert!(out.contains(&Triple::Type(n("a", "f01"), n("a", "NormalECG"))));
        assert!(out.contains(&Triple::Data(
            n("a", "f01"),
            n("a", "snomed"),
            Literal::string("102593009")
        )));
    }

    #[test]
    fn rule_with_fresh_reuses_skolem_on_refire() {
        let tbox = parse_ontology("ontology t\nprefix c\nclass c:ECGRecording\n").unwrap();
        let rules = parse_rules(
            "rule r2: (?e type c:ECGRecording), (?e c:comp ?p) , !fresh(?x) -> (?e a:hasAxis ?x), (?x type a:ECGAxis), (?x a:hasP-Axis ?p)\n",
        )
        .unwrap();
        let mut g = Graph::new();
        g.insert(Triple::Type(n("a", "r01"), n("c", "ECGRecording")));
        g.insert(Triple::Object(n("a", "r01"), n("c", "comp"), n("a", "pax01")));
        let once = saturate(&g, &tbox, &BTreeSet::new(), &rules);
        let twice = saturate(&once, &tbox, &BTreeSet::new(), &rules);
        assert_eq!(once, twice, "re-running must add nothing");
        let skolems: Vec<_> = once.individuals().into_iter().filter(is_skolem).collect();
        assert_eq!(skolems.len(), 1);
        assert_eq!(skolems[0].prefix, "a");
    }

    #[test]
    fn same_individual_copies_assertions() {
        let tbox = parse_ontology(
            "ontology t\nprefix a\nSameIndividual(a:i, a:j)\nclass a:C\n",
        )
        .unwrap();
        let mut g = Graph::new();
        g.insert(Triple::Type(n("a", "i"), n("a", "C")));
        let out = saturate(&g, &tbox, &BTreeSet::new(), &[]);
        assert!(out.contains(&Triple::Type(n("a", "j"), n("a", "C"))));
    }

    #[test]
    fn traced_marks_closed_world_recognition() {
        let tbox = parse_ontology(
            "ontology t\nprefix a\n\
             EquivClass(a:Single, ExactlyOne(a:p, a:C))\n",
        )
        .unwrap();
        let mut g = Graph::new();
        g.insert(Triple::Object(n("a", "x"), n("a", "p"), n("a", "y")));
        g.insert(Triple::Type(n("a", "y"), n("a", "C")));
        let (out, prov) = saturate_traced(&g, &tbox, &BTreeSet::new(), &[]);
        let single = Triple::Type(n("a", "x"), n("a", "Single"));
        assert!(out.contains(&single));
        assert!(prov[&single].closed_world);

        // with two witnesses the exact-cardinality definition no longer holds
        g.insert(Triple::Object(n("a", "x"), n("a", "p"), n("a", "z")));
        g.insert(Triple::Type(n("a", "z"), n("a", "C")));
        let out = saturate(&g, &tbox, &BTreeSet::new(), &[]);
        assert!(!out.contains(&single));
    }
}
