//! Integration mappings between an application ontology O and the canonical
//! ontology G: seeded mapping axioms, code-based class mapping inference,
//! ontology paths, path mapping candidates and their compiled rules.

mod compile;
mod paths;

pub use compile::{compile_path_rules, compile_rule_directed, TravelDirection};
pub use paths::{enumerate_paths, find_path_candidates, parse_path};

use std::collections::BTreeSet;
use std::fmt;

use serde::Deserialize;

use crate::model::{
    parse_axiom_str, render_axiom, Axiom, ClassExpression, Name, Ontology, ParseError,
};
use crate::model::parser_support;
use crate::reasoner::{classify_axioms, Classification};

/// An ontology path `A.p1[B1]...pn[Bn]`: a start class and at least one
/// (property, end class) step, all names from one ontology.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct OntologyPath {
    pub start: Name,
    pub steps: Vec<(Name, Name)>,
}

impl OntologyPath {
    pub fn end(&self) -> &Name {
        &self.steps.last().expect("paths have at least one step").1
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All prefixes of this path (as paths), including itself.
    pub fn prefixes(&self) -> Vec<OntologyPath> {
        (1..=self.steps.len())
            .map(|k| OntologyPath { start: self.start.clone(), steps: self.steps[..k].to_vec() })
            .collect()
    }
}

impl fmt::Display for OntologyPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.start)?;
        for (property, class) in &self.steps {
            write!(f, ".{}[{}]", property, class)?;
        }
        Ok(())
    }
}

/// Direction of a mapping axiom or path mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MappingDirection {
    /// left ⊑ right
    Sub,
    /// left ⊒ right
    Sup,
    Equiv,
}

impl MappingDirection {
    pub fn token(self) -> &'static str {
        match self {
            MappingDirection::Sub => "sub",
            MappingDirection::Sup => "sup",
            MappingDirection::Equiv => "equiv",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        match s {
            "sub" => Some(MappingDirection::Sub),
            "sup" => Some(MappingDirection::Sup),
            "equiv" => Some(MappingDirection::Equiv),
            _ => None,
        }
    }
}

/// A path pair whose endpoints satisfy the candidate condition.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PathMappingCandidate {
    pub left: OntologyPath,
    pub right: OntologyPath,
    pub direction: MappingDirection,
}

impl fmt::Display for PathMappingCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.left, self.direction.token(), self.right)
    }
}

/// How a path mapping was confirmed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Confirmation {
    Auto,
    Admin,
}

/// A confirmed path mapping.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PathMapping {
    pub candidate: PathMappingCandidate,
    pub confirmed: Confirmation,
}

/// The integration mapping ⟨O, G, M⟩: its axiom part M plus the identities of
/// O and G. The O and G axiom sets live in their own documents.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IntegrationMapping {
    pub o_id: String,
    pub o_prefix: String,
    pub g_id: String,
    pub g_prefix: String,
    pub axioms: BTreeSet<Axiom>,
    pub path_mappings: BTreeSet<PathMapping>,
}

/// Mapping discovery configuration.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MappingConfig {
    #[serde(default)]
    pub basic: Vec<String>,
    #[serde(default)]
    pub confirmations: Vec<String>,
    #[serde(default = "default_max_path_length")]
    pub max_path_length: usize,
}

fn default_max_path_length() -> usize {
    3
}

impl Default for MappingConfig {
    fn default() -> Self {
        MappingConfig { basic: Vec::new(), confirmations: Vec::new(), max_path_length: 3 }
    }
}

impl MappingConfig {
    pub fn from_json(text: &str) -> Result<Self, MappingError> {
        let config: MappingConfig = serde_json::from_str(text)?;
        if config.max_path_length == 0 {
            return Err(MappingError::Config("maxPathLength must be at least 1".into()));
        }
        Ok(config)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum MappingError {
    #[error("mapping axiom refers to unknown term `{term}`: {axiom}")]
    UnknownTerm { term: Name, axiom: String },
    #[error("mapping axiom does not follow the O/G vocabulary split: {axiom}")]
    VocabularySplit { axiom: String },
    #[error("confirmation does not match any candidate: {entry}")]
    InvalidConfirmation { entry: String },
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

/// Validates and stores administrator-seeded mapping axioms.
///
/// Every axiom must split its vocabulary across O and G: class mappings relate
/// an O class name to a G expression, property and individual mappings relate
/// one name from each side.
pub fn ingest_basic_mappings(
    seed: &[Axiom],
    o: &Ontology,
    g: &Ontology,
) -> Result<IntegrationMapping, MappingError> {
    let o_vocab = o.vocabulary();
    let g_vocab = g.vocabulary();
    let mut im = IntegrationMapping {
        o_id: o.id.clone(),
        o_prefix: o.prefix.clone(),
        g_id: g.id.clone(),
        g_prefix: g.prefix.clone(),
        ..Default::default()
    };
    for axiom in seed {
        validate_mapping_axiom(axiom, o, &o_vocab, g, &g_vocab)?;
        im.axioms.insert(axiom.clone());
    }
    Ok(im)
}

fn side_of(name: &Name, o: &Ontology, g: &Ontology) -> Option<Side> {
    if name.prefix == o.prefix {
        Some(Side::O)
    } else if name.prefix == g.prefix {
        Some(Side::G)
    } else {
        None
    }
}

#[derive(PartialEq, Eq, Clone, Copy)]
enum Side {
    O,
    G,
}

fn check_known(
    name: &Name,
    o: &Ontology,
    o_vocab: &BTreeSet<Name>,
    g: &Ontology,
    g_vocab: &BTreeSet<Name>,
    axiom: &Axiom,
) -> Result<Side, MappingError> {
    let side = side_of(name, o, g)
        .ok_or_else(|| MappingError::VocabularySplit { axiom: render_axiom(axiom) })?;
    let known = match side {
        Side::O => o_vocab.contains(name),
        Side::G => g_vocab.contains(name),
    };
    if !known {
        return Err(MappingError::UnknownTerm { term: name.clone(), axiom: render_axiom(axiom) });
    }
    Ok(side)
}

fn expression_side(
    expr: &ClassExpression,
    o: &Ontology,
    o_vocab: &BTreeSet<Name>,
    g: &Ontology,
    g_vocab: &BTreeSet<Name>,
    axiom: &Axiom,
) -> Result<Side, MappingError> {
    let mut names = BTreeSet::new();
    expr.names(&mut names);
    let mut side: Option<Side> = None;
    for name in &names {
        let this = check_known(name, o, o_vocab, g, g_vocab, axiom)?;
        match side {
            None => side = Some(this),
            Some(existing) if existing != this => {
                return Err(MappingError::VocabularySplit { axiom: render_axiom(axiom) })
            }
            _ => {}
        }
    }
    side.ok_or_else(|| MappingError::VocabularySplit { axiom: render_axiom(axiom) })
}

fn validate_mapping_axiom(
    axiom: &Axiom,
    o: &Ontology,
    o_vocab: &BTreeSet<Name>,
    g: &Ontology,
    g_vocab: &BTreeSet<Name>,
) -> Result<(), MappingError> {
    let split = |a: Side, b: Side| {
        if a != b {
            Ok(())
        } else {
            Err(MappingError::VocabularySplit { axiom: render_axiom(axiom) })
        }
    };
    match axiom {
        Axiom::SubClass(a, b) | Axiom::EquivClass(a, b) => {
            let sa = expression_side(a, o, o_vocab, g, g_vocab, axiom)?;
            let sb = expression_side(b, o, o_vocab, g, g_vocab, axiom)?;
            split(sa, sb)
        }
        Axiom::SubProperty(p, q) | Axiom::EquivProperty(p, q) => {
            let sp = check_known(p, o, o_vocab, g, g_vocab, axiom)?;
            let sq = check_known(q, o, o_vocab, g, g_vocab, axiom)?;
            split(sp, sq)
        }
        Axiom::SameIndividual(i, j) => {
            // Individuals do not occur in TBox vocabularies; only check the
            // namespace split.
            let si = side_of(i, o, g)
                .ok_or_else(|| MappingError::VocabularySplit { axiom: render_axiom(axiom) })?;
            let sj = side_of(j, o, g)
                .ok_or_else(|| MappingError::VocabularySplit { axiom: render_axiom(axiom) })?;
            split(si, sj)
        }
        Axiom::Disjoint(..) => {
            Err(MappingError::VocabularySplit { axiom: render_axiom(axiom) })
        }
    }
}

/// Classification of O ∪ G ∪ M, the lattice all mapping inferences run on.
pub fn merged_classification(o: &Ontology, g: &Ontology, im: &IntegrationMapping) -> Classification {
    let mut classes = o.named_classes();
    classes.extend(g.named_classes());
    let axioms: Vec<&Axiom> =
        o.axioms.iter().chain(g.axioms.iter()).chain(im.axioms.iter()).collect();
    classify_axioms(axioms.into_iter(), &classes)
}

/// Derives class mappings from shared terminology codes: classes of O and G
/// entailing a common code restriction (after property alignment) are related
/// by the direction the merged lattice assigns them.
pub fn infer_class_mappings(o: &Ontology, g: &Ontology, im: &mut IntegrationMapping) -> Vec<Axiom> {
    let classification = merged_classification(o, g, im);
    let lattice = &classification.lattice;
    let empty = BTreeSet::new();
    let mut added = Vec::new();
    for c in &o.named_classes() {
        let c_codes = classification.entailed_codes.get(c).unwrap_or(&empty);
        if c_codes.is_empty() {
            continue;
        }
        for d in &g.named_classes() {
            let d_codes = classification.entailed_codes.get(d).unwrap_or(&empty);
            if c_codes.intersection(d_codes).next().is_none() {
                continue;
            }
            let below = lattice.subsumes(c, d);
            let above = lattice.subsumes(d, c);
            let axiom = match (below, above) {
                (true, true) => {
                    Axiom::EquivClass(ClassExpression::Named(c.clone()), ClassExpression::Named(d.clone()))
                }
                (true, false) => {
                    Axiom::SubClass(ClassExpression::Named(c.clone()), ClassExpression::Named(d.clone()))
                }
                (false, true) => {
                    Axiom::SubClass(ClassExpression::Named(d.clone()), ClassExpression::Named(c.clone()))
                }
                (false, false) => continue,
            };
            if im.axioms.insert(axiom.clone()) {
                added.push(axiom);
            }
        }
    }
    added
}

/// Auto-confirms equivalence candidates (both endpoint pairs equivalent by
/// Definition 2); everything else needs an entry in `confirmations`.
/// Returns the confirmed mappings and the reported unconfirmed candidates.
pub fn confirm_path_mappings(
    candidates: &BTreeSet<PathMappingCandidate>,
    confirmations: &[String],
) -> Result<(BTreeSet<PathMapping>, Vec<PathMappingCandidate>), MappingError> {
    let mut confirmed: BTreeSet<PathMapping> = candidates
        .iter()
        .filter(|c| c.direction == MappingDirection::Equiv)
        .map(|c| PathMapping { candidate: c.clone(), confirmed: Confirmation::Auto })
        .collect();
    for entry in confirmations {
        let parsed = parse_candidate_str(entry)?;
        if !candidates.contains(&parsed) {
            return Err(MappingError::InvalidConfirmation { entry: entry.clone() });
        }
        confirmed.insert(PathMapping { candidate: parsed, confirmed: Confirmation::Admin });
    }
    // A confirmed pair subsumes its weaker-direction siblings; the rest are
    // reported, not silently dropped.
    let confirmed_pairs: BTreeSet<(OntologyPath, OntologyPath)> = confirmed
        .iter()
        .map(|m| (m.candidate.left.clone(), m.candidate.right.clone()))
        .collect();
    let unconfirmed: Vec<PathMappingCandidate> = candidates
        .iter()
        .filter(|c| !confirmed_pairs.contains(&(c.left.clone(), c.right.clone())))
        .cloned()
        .collect();
    Ok((confirmed, unconfirmed))
}

/// The full mapping-module run: ingest seeds, infer class mappings, search
/// and confirm path mappings, compile their rules.
pub struct DiscoveryOutput {
    pub mapping: IntegrationMapping,
    pub unconfirmed: Vec<PathMappingCandidate>,
    pub rules: Vec<crate::reasoner::HornRule>,
}

pub fn discover(
    o: &Ontology,
    g: &Ontology,
    config: &MappingConfig,
) -> Result<DiscoveryOutput, MappingError> {
    let mut allowed: BTreeSet<String> = BTreeSet::new();
    allowed.insert(o.prefix.clone());
    allowed.insert(g.prefix.clone());
    let seed: Result<Vec<Axiom>, ParseError> =
        config.basic.iter().map(|s| parse_axiom_str(s, Some(&allowed))).collect();
    let mut im = ingest_basic_mappings(&seed?, o, g)?;
    infer_class_mappings(o, g, &mut im);
    let lattice = merged_classification(o, g, &im).lattice;
    let paths_o = enumerate_paths(o, config.max_path_length);
    let paths_g = enumerate_paths(g, config.max_path_length);
    let candidates = find_path_candidates(&paths_o, &paths_g, &lattice);
    let (confirmed, unconfirmed) = confirm_path_mappings(&candidates, &config.confirmations)?;
    im.path_mappings = confirmed;
    let mut rules = Vec::new();
    for pm in &im.path_mappings {
        rules.extend(compile_path_rules(pm));
    }
    rules.sort();
    Ok(DiscoveryOutput { mapping: im, unconfirmed, rules })
}

/// Parses `path <dir> path` (Definition 1 syntax on both sides).
pub fn parse_candidate_str(text: &str) -> Result<PathMappingCandidate, MappingError> {
    let mut p = parser_support::line_parser(text, 1);
    let left = paths::parse_path_tokens(&mut p)?;
    let (word, line, col) = p.ident("direction (sub, sup or equiv)")?;
    let direction = MappingDirection::from_token(&word).ok_or(ParseError {
        line,
        col,
        message: format!("unknown direction `{word}`"),
    })?;
    let right = paths::parse_path_tokens(&mut p)?;
    p.expect_end()?;
    Ok(PathMappingCandidate { left, right, direction })
}

/// Serializes the integration-mapping document: header, mapping axioms in the
/// ontology grammar, then `pathmap` lines.
pub fn serialize_mapping(im: &IntegrationMapping) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    writeln!(out, "ontology {}-to-{}", im.o_id, im.g_id).unwrap();
    writeln!(out, "prefix {}", im.o_prefix).unwrap();
    writeln!(out, "import {}", im.g_prefix).unwrap();
    let mut rendered: Vec<(u8, String)> =
        im.axioms.iter().map(|a| (a.kind_rank(), render_axiom(a))).collect();
    rendered.sort();
    for (_, line) in rendered {
        out.push_str(&line);
        out.push('\n');
    }
    for pm in &im.path_mappings {
        let tag = match pm.confirmed {
            Confirmation::Auto => "auto",
            Confirmation::Admin => "admin",
        };
        writeln!(
            out,
            "pathmap {} {} {} {}",
            pm.candidate.left,
            pm.candidate.direction.token(),
            pm.candidate.right,
            tag
        )
        .unwrap();
    }
    out
}

/// Parses an integration-mapping document.
pub fn parse_mapping(text: &str) -> Result<IntegrationMapping, MappingError> {
    let mut im = IntegrationMapping::default();
    let mut lines = text.lines().enumerate();
    let mut header_done = 0u8;
    for (i, raw) in lines.by_ref() {
        let lineno = i as u32 + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        match header_done {
            0 => {
                let id = trimmed.strip_prefix("ontology ").ok_or(ParseError {
                    line: lineno,
                    col: 1,
                    message: "expected `ontology <id>` header".into(),
                })?;
                if let Some((o_id, g_id)) = id.trim().split_once("-to-") {
                    im.o_id = o_id.to_string();
                    im.g_id = g_id.to_string();
                } else {
                    im.o_id = id.trim().to_string();
                }
                header_done = 1;
            }
            1 => {
                im.o_prefix = trimmed
                    .strip_prefix("prefix ")
                    .ok_or(ParseError {
                        line: lineno,
                        col: 1,
                        message: "expected `prefix <tag>` header".into(),
                    })?
                    .trim()
                    .to_string();
                header_done = 2;
            }
            _ => {
                im.g_prefix = trimmed
                    .strip_prefix("import ")
                    .ok_or(ParseError {
                        line: lineno,
                        col: 1,
                        message: "expected `import <tag>` header".into(),
                    })?
                    .trim()
                    .to_string();
                break;
            }
        }
    }
    for (i, raw) in lines {
        let lineno = i as u32 + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("pathmap ") {
            let mut p = parser_support::line_parser(rest, lineno);
            let left = paths::parse_path_tokens(&mut p)?;
            let (word, line, col) = p.ident("direction")?;
            let direction = MappingDirection::from_token(&word).ok_or(ParseError {
                line,
                col,
                message: format!("unknown direction `{word}`"),
            })?;
            let right = paths::parse_path_tokens(&mut p)?;
            let (tag, line, col) = p.ident("confirmation tag")?;
            let confirmed = match tag.as_str() {
                "auto" => Confirmation::Auto,
                "admin" => Confirmation::Admin,
                other => {
                    return Err(MappingError::Parse(ParseError {
                        line,
                        col,
                        message: format!("unknown confirmation tag `{other}`"),
                    }))
                }
            };
            p.expect_end()?;
            im.path_mappings.insert(PathMapping {
                candidate: PathMappingCandidate { left, right, direction },
                confirmed,
            });
        } else {
            im.axioms.insert(parse_axiom_str(trimmed, None)?);
        }
    }
    Ok(im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_ontology;

    fn small_o() -> Ontology {
        parse_ontology(
            "ontology sys-a\nprefix a\n\
             EquivClass(a:ECGObservation, Code(a:loinc, \"34534-8\"))\n\
             property a:recording\nproperty a:value\n",
        )
        .unwrap()
    }

    fn small_g() -> Ontology {
        parse_ontology(
            "ontology canonical\nprefix c\n\
             EquivClass(c:ECGRecording, Code(c:loinc, \"34534-8\"))\n\
             property c:hasObs\nproperty c:value\n",
        )
        .unwrap()
    }

    #[test]
    fn ingest_accepts_paper_style_seeds() {
        let o = small_o();
        let g = small_g();
        let seed = vec![
            Axiom::EquivProperty(Name::new("a", "loinc"), Name::new("c", "loinc")),
            Axiom::SubProperty(Name::new("a", "recording"), Name::new("c", "hasObs")),
        ];
        let im = ingest_basic_mappings(&seed, &o, &g).unwrap();
        assert_eq!(im.axioms.len(), 2);
    }

    #[test]
    fn ingest_rejects_unknown_terms() {
        let o = small_o();
        let g = small_g();
        let seed = vec![Axiom::EquivProperty(Name::new("a", "nonexistent"), Name::new("c", "loinc"))];
        match ingest_basic_mappings(&seed, &o, &g) {
            Err(MappingError::UnknownTerm { term, .. }) => {
                assert_eq!(term, Name::new("a", "nonexistent"));
            }
            other => panic!("expected unknown-term error, got {other:?}"),
        }
    }

    #[test]
    fn shared_code_infers_equivalence() {
        let o = small_o();
        let g = small_g();
        let seed = vec![Axiom::EquivProperty(Name::new("a", "loinc"), Name::new("c", "loinc"))];
        let mut im = ingest_basic_mappings(&seed, &o, &g).unwrap();
        let added = infer_class_mappings(&o, &g, &mut im);
        assert!(added.contains(&Axiom::EquivClass(
            ClassExpression::Named(Name::new("a", "ECGObservation")),
            ClassExpression::Named(Name::new("c", "ECGRecording")),
        )));
    }

    #[test]
    fn disjoint_codes_add_nothing() {
        let o = parse_ontology(
            "ontology sys-a\nprefix a\nEquivClass(a:X, Code(a:loinc, \"1\"))\n",
        )
        .unwrap();
        let g = parse_ontology(
            "ontology canonical\nprefix c\nEquivClass(c:Y, Code(c:loinc, \"2\"))\n",
        )
        .unwrap();
        let seed = vec![Axiom::EquivProperty(Name::new("a", "loinc"), Name::new("c", "loinc"))];
        let mut im = ingest_basic_mappings(&seed, &o, &g).unwrap();
        assert!(infer_class_mappings(&o, &g, &mut im).is_empty());
    }

    #[test]
    fn mapping_document_round_trips() {
        let mut im = IntegrationMapping {
            o_id: "sys-a".into(),
            o_prefix: "a".into(),
            g_id: "canonical".into(),
            g_prefix: "c".into(),
            ..Default::default()
        };
        im.axioms.insert(Axiom::EquivProperty(Name::new("a", "loinc"), Name::new("c", "loinc")));
        im.path_mappings.insert(PathMapping {
            candidate: parse_candidate_str(
                "a:ECGObservation.a:hasAxis[a:ECGAxis].a:hasP-Axis[a:P-Axis] equiv c:ECGRecording.c:comp[c:P-Axis]",
            )
            .unwrap(),
            confirmed: Confirmation::Auto,
        });
        let text = serialize_mapping(&im);
        let back = parse_mapping(&text).unwrap();
        assert_eq!(im, back);
    }
}
