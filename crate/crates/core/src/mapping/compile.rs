//! Compilation of confirmed path mappings to forward-chaining rules.
//!
//! The forward rule walks the O-path (start-class type atom plus the property
//! chain) and asserts the G-path between the same endpoints; the reverse rule
//! walks the fully typed G-path and rebuilds the O-path, minting fresh
//! individuals for O-side intermediates and asserting their classes. A ⊑
//! mapping compiles to the forward rule only, ⊒ to the reverse only, ≡ to
//! both.

use sha2::{Digest, Sha256};

use crate::graph::{PatternPredicate, PatternTerm, TriplePattern, Var};
use crate::model::Name;
use crate::reasoner::HornRule;

use super::{MappingDirection, OntologyPath, PathMapping};

/// The direction information travels through a compiled rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TravelDirection {
    /// Body over the O-path, head over the G-path.
    OToG,
    /// Body over the G-path, head over the O-path.
    GToO,
}

fn var(name: impl Into<String>) -> PatternTerm {
    PatternTerm::Var(Var(name.into()))
}

fn type_atom(subject: &str, class: &Name) -> TriplePattern {
    TriplePattern {
        subject: var(subject),
        predicate: PatternPredicate::Type,
        object: PatternTerm::Name(class.clone()),
    }
}

fn prop_atom(subject: &str, property: &Name, object: &str) -> TriplePattern {
    TriplePattern {
        subject: var(subject),
        predicate: PatternPredicate::Prop(property.clone()),
        object: var(object),
    }
}

/// Variable names along a path: start `e`, intermediates with the given stem,
/// end `p`.
fn node_vars(path: &OntologyPath, stem: &str) -> Vec<String> {
    let mut out = vec!["e".to_string()];
    for i in 1..path.len() {
        out.push(format!("{stem}{i}"));
    }
    out.push("p".to_string());
    out
}

fn pair_id(pm: &PathMapping) -> String {
    let mut hasher = Sha256::new();
    hasher.update(pm.candidate.left.to_string().as_bytes());
    hasher.update(b" ");
    hasher.update(pm.candidate.right.to_string().as_bytes());
    let digest = hasher.finalize();
    digest[..3].iter().map(|b| format!("{b:02x}")).collect()
}

/// Compiles the rule carrying instances along `direction`.
pub fn compile_rule_directed(pm: &PathMapping, direction: TravelDirection) -> HornRule {
    let (from, to, id_prefix) = match direction {
        TravelDirection::OToG => (&pm.candidate.left, &pm.candidate.right, "fwd"),
        TravelDirection::GToO => (&pm.candidate.right, &pm.candidate.left, "rev"),
    };
    let body_vars = node_vars(from, "y");
    let mut body = Vec::new();
    body.push(type_atom(&body_vars[0], &from.start));
    for (i, (property, end_class)) in from.steps.iter().enumerate() {
        body.push(prop_atom(&body_vars[i], property, &body_vars[i + 1]));
        // The reverse body checks every node type of the source path; the
        // forward body checks the start only (shared properties on the G side
        // make the extra guards necessary there).
        if direction == TravelDirection::GToO {
            body.push(type_atom(&body_vars[i + 1], end_class));
        }
    }

    let head_vars = node_vars(to, "x");
    let mut head = Vec::new();
    let mut creates = Vec::new();
    for (i, (property, end_class)) in to.steps.iter().enumerate() {
        head.push(prop_atom(&head_vars[i], property, &head_vars[i + 1]));
        let is_intermediate = i + 1 < to.steps.len();
        if is_intermediate {
            creates.push(Var(head_vars[i + 1].clone()));
            head.push(type_atom(&head_vars[i + 1], end_class));
        }
    }
    let id = format!("{id_prefix}_{}", pair_id(pm));
    HornRule::new(id, body, head, creates).expect("compiled rules are well formed")
}

/// Compiles the implementation rules of a confirmed path mapping: the sound
/// direction(s) given by the mapping's ⊑/⊒/≡ tag.
pub fn compile_path_rules(pm: &PathMapping) -> Vec<HornRule> {
    match pm.candidate.direction {
        MappingDirection::Sub => vec![compile_rule_directed(pm, TravelDirection::OToG)],
        MappingDirection::Sup => vec![compile_rule_directed(pm, TravelDirection::GToO)],
        MappingDirection::Equiv => vec![
            compile_rule_directed(pm, TravelDirection::OToG),
            compile_rule_directed(pm, TravelDirection::GToO),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::{parse_candidate_str, Confirmation};
    use crate::reasoner::serialize_rules;

    fn ecg_mapping(direction: &str) -> PathMapping {
        let candidate = parse_candidate_str(&format!(
            "a:ECGObservation.a:hasAxis[a:ECGAxis].a:hasP-Axis[a:P-Axis] {direction} c:ECGRecording.c:comp[c:P-Axis]"
        ))
        .unwrap();
        PathMapping { candidate, confirmed: Confirmation::Auto }
    }

    #[test]
    fn forward_rule_matches_r1_shape() {
        let rules = compile_path_rules(&ecg_mapping("equiv"));
        assert_eq!(rules.len(), 2);
        let text = serialize_rules(&rules[..1]);
        assert!(text.contains(
            "(?e type a:ECGObservation), (?e a:hasAxis ?x1), (?x1 a:hasP-Axis ?p) -> (?e c:comp ?p)"
        ));
    }

    #[test]
    fn reverse_rule_matches_r2_shape() {
        let rules = compile_path_rules(&ecg_mapping("equiv"));
        let text = serialize_rules(&rules[1..]);
        assert!(text.contains(
            "(?e type c:ECGRecording), (?e c:comp ?p), (?p type c:P-Axis), !fresh(?x1) -> (?e a:hasAxis ?x1), (?x1 type a:ECGAxis), (?x1 a:hasP-Axis ?p)"
        ));
    }

    #[test]
    fn sub_mapping_compiles_one_rule() {
        let rules = compile_path_rules(&ecg_mapping("sub"));
        assert_eq!(rules.len(), 1);
        assert!(rules[0].id.starts_with("fwd_"));
        assert!(rules[0].creates.is_empty());
    }
}
