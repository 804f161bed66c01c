//! Relational schema to application ontology translation.
//!
//! The inputs are a relational schema description (relations, keys,
//! dependencies, constraints) and a Terminology Manager: a table from
//! identifying paths (`Relation`, `Relation.attribute`,
//! `Relation.attribute=value`) to terminology codes. Translation produces the
//! application ontology plus one row-lifting import link per relation, after
//! which an edit script recorded by the administrator is applied.

mod edits;
mod translate;

pub use edits::{apply_edit_script, apply_renames_to_links, parse_edit_script, Edit, EditScript};
pub use translate::{
    translate_attributes, translate_domain_enums, translate_exclusions, translate_functionals,
    translate_inclusions, translate_integrity, translate_relations, translate_schema,
};

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::model::{Comparator, Datatype, Literal, Name, ParseError};

/// SQL column types of the schema description.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SqlType {
    Int,
    Varchar,
    Decimal,
    Date,
    Bool,
}

impl SqlType {
    /// The datatype map: int→int, varchar→string, decimal→decimal,
    /// date→date, bool→boolean.
    pub fn datatype(self) -> Datatype {
        match self {
            SqlType::Int => Datatype::Int,
            SqlType::Varchar => Datatype::String,
            SqlType::Decimal => Datatype::Decimal,
            SqlType::Date => Datatype::Date,
            SqlType::Bool => Datatype::Boolean,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    #[serde(rename = "type")]
    pub sql_type: SqlType,
    #[serde(default = "default_true")]
    pub compulsory: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Relation {
    pub name: String,
    pub key: Vec<String>,
    pub attributes: Vec<Attribute>,
}

impl Relation {
    pub fn attribute(&self, name: &str) -> Option<&Attribute> {
        self.attributes.iter().find(|a| a.name == name)
    }

    pub fn is_key(&self, attribute: &str) -> bool {
        self.key.iter().any(|k| k == attribute)
    }
}

/// End of an inclusion dependency: a relation and an attribute list.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DependencyEnd {
    pub relation: String,
    pub attributes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InclusionKind {
    NonkeyToKey,
    KeyToKey,
    SubkeyToKey,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InclusionDependency {
    pub kind: InclusionKind,
    pub from: DependencyEnd,
    pub to: DependencyEnd,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExclusionDependency {
    pub a: String,
    pub b: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctionalDependency {
    pub relation: String,
    pub determinant: Vec<String>,
    pub dependent: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntegrityConstraint {
    pub relation: String,
    pub attribute: String,
    pub comparator: String,
    pub bound: serde_json::Value,
}

impl IntegrityConstraint {
    pub fn comparator_op(&self) -> Option<Comparator> {
        Comparator::from_symbol(&self.comparator)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainConstraint {
    pub relation: String,
    pub attribute: String,
    pub values: Vec<String>,
}

/// A relational schema plus the dependency and constraint lists.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelationalSchema {
    pub name: String,
    pub prefix: String,
    pub relations: Vec<Relation>,
    #[serde(default)]
    pub inclusion: Vec<InclusionDependency>,
    #[serde(default)]
    pub exclusion: Vec<ExclusionDependency>,
    #[serde(default)]
    pub functional: Vec<FunctionalDependency>,
    #[serde(default)]
    pub integrity: Vec<IntegrityConstraint>,
    #[serde(default)]
    pub domains: Vec<DomainConstraint>,
}

impl RelationalSchema {
    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.iter().find(|r| r.name == name)
    }

    pub fn from_json(text: &str) -> Result<Self, Db2OntoError> {
        let schema: RelationalSchema = serde_json::from_str(text)?;
        schema.validate()?;
        Ok(schema)
    }

    /// Checks the structural invariants of the schema description.
    pub fn validate(&self) -> Result<(), Db2OntoError> {
        let bad = |message: String| Err(Db2OntoError::SchemaInvalid(message));
        let mut names = BTreeSet::new();
        for relation in &self.relations {
            if !names.insert(&relation.name) {
                return bad(format!("duplicate relation `{}`", relation.name));
            }
            if relation.key.is_empty() {
                return bad(format!("relation `{}` has no primary key", relation.name));
            }
            for key in &relation.key {
                match relation.attribute(key) {
                    None => {
                        return bad(format!(
                            "key attribute `{}.{}` does not exist",
                            relation.name, key
                        ))
                    }
                    Some(attr) if !attr.compulsory => {
                        return bad(format!(
                            "key attribute `{}.{}` must be compulsory",
                            relation.name, key
                        ))
                    }
                    _ => {}
                }
            }
        }
        let check_attr = |relation: &str, attribute: &str| -> Result<(), Db2OntoError> {
            let rel = self
                .relation(relation)
                .ok_or_else(|| Db2OntoError::SchemaInvalid(format!("unknown relation `{relation}`")))?;
            if rel.attribute(attribute).is_none() {
                return Err(Db2OntoError::SchemaInvalid(format!(
                    "unknown attribute `{relation}.{attribute}`"
                )));
            }
            Ok(())
        };
        for dep in &self.inclusion {
            if dep.from.attributes.len() != dep.to.attributes.len() {
                return bad("inclusion dependency arity mismatch".to_string());
            }
            for a in &dep.from.attributes {
                check_attr(&dep.from.relation, a)?;
            }
            for a in &dep.to.attributes {
                check_attr(&dep.to.relation, a)?;
            }
            let to_rel = self.relation(&dep.to.relation).unwrap();
            if dep.to.attributes.iter().any(|a| !to_rel.is_key(a)) {
                return bad(format!(
                    "inclusion dependency target `{}` must be key attributes",
                    dep.to.relation
                ));
            }
        }
        for dep in &self.exclusion {
            if dep.a == dep.b {
                return bad(format!("exclusion dependency relates `{}` to itself", dep.a));
            }
            for r in [&dep.a, &dep.b] {
                if self.relation(r).is_none() {
                    return bad(format!("unknown relation `{r}` in exclusion dependency"));
                }
            }
        }
        for fd in &self.functional {
            let rel = self
                .relation(&fd.relation)
                .ok_or_else(|| Db2OntoError::SchemaInvalid(format!("unknown relation `{}`", fd.relation)))?;
            for a in fd.determinant.iter().chain([&fd.dependent]) {
                check_attr(&fd.relation, a)?;
            }
            if fd.determinant.contains(&fd.dependent) {
                return bad(format!(
                    "functional dependency dependent `{}.{}` occurs in determinant",
                    fd.relation, fd.dependent
                ));
            }
            if fd.determinant.iter().any(|a| rel.is_key(a)) || rel.is_key(&fd.dependent) {
                return bad("functional dependency must relate non-key attributes".to_string());
            }
        }
        for ic in &self.integrity {
            check_attr(&ic.relation, &ic.attribute)?;
            if ic.comparator_op().is_none() {
                return bad(format!("unknown comparator `{}`", ic.comparator));
            }
        }
        for dc in &self.domains {
            check_attr(&dc.relation, &dc.attribute)?;
            let distinct: BTreeSet<&String> = dc.values.iter().collect();
            if distinct.len() < 2 {
                return bad(format!(
                    "value domain of `{}.{}` needs at least two distinct values",
                    dc.relation, dc.attribute
                ));
            }
        }
        Ok(())
    }
}

/// One Terminology Manager entry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TmEntry {
    pub path: String,
    pub terminology: String,
    pub code: String,
}

/// The Terminology Manager: identifying path → per-terminology codes.
#[derive(Debug, Clone, Default)]
pub struct TerminologyManager {
    entries: Vec<TmEntry>,
}

impl TerminologyManager {
    pub fn new(entries: Vec<TmEntry>) -> Result<Self, Db2OntoError> {
        let mut seen = BTreeSet::new();
        for entry in &entries {
            if entry.code.is_empty() {
                return Err(Db2OntoError::SchemaInvalid(format!(
                    "empty code for path `{}`",
                    entry.path
                )));
            }
            if !seen.insert((&entry.path, &entry.terminology)) {
                return Err(Db2OntoError::SchemaInvalid(format!(
                    "duplicate terminology entry for `{}` / {}",
                    entry.path, entry.terminology
                )));
            }
        }
        Ok(TerminologyManager { entries })
    }

    pub fn from_json(text: &str) -> Result<Self, Db2OntoError> {
        TerminologyManager::new(serde_json::from_str(text)?)
    }

    /// All (terminology, code) pairs for a path, sorted by terminology.
    pub fn codes_for(&self, path: &str) -> Vec<(&str, &str)> {
        let mut out: Vec<(&str, &str)> = self
            .entries
            .iter()
            .filter(|e| e.path == path)
            .map(|e| (e.terminology.as_str(), e.code.as_str()))
            .collect();
        out.sort();
        out
    }
}

/// Exact-path terminology lookup; absent means none.
pub fn lookup_code<'a>(tm: &'a TerminologyManager, path: &str, terminology: &str) -> Option<&'a str> {
    tm.entries
        .iter()
        .find(|e| e.path == path && e.terminology == terminology)
        .map(|e| e.code.as_str())
}

/// Import link of one relation: how its rows lift to triples.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SigmaImportLink {
    pub relation: String,
    pub subject_prefix: String,
    pub key_attributes: Vec<String>,
    pub subject_class: Name,
    pub directives: Vec<SigmaDirective>,
}

/// Per-attribute lifting directive.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum SigmaDirective {
    /// Mint a value-node individual, optionally typed, carrying the value.
    #[serde(rename_all = "camelCase")]
    AsNode {
        attribute: String,
        property: Name,
        node_class: Option<Name>,
        value_property: Name,
        value_datatype: Datatype,
        required: bool,
    },
    /// Object assertion to the individual of the referenced row.
    #[serde(rename_all = "camelCase")]
    AsLink { attribute: String, property: Name, target_relation: String, required: bool },
    /// Plain data assertion on the row individual.
    #[serde(rename_all = "camelCase")]
    AsData { attribute: String, property: Name, datatype: Datatype, required: bool },
}

impl SigmaDirective {
    pub fn attribute(&self) -> &str {
        match self {
            SigmaDirective::AsNode { attribute, .. }
            | SigmaDirective::AsLink { attribute, .. }
            | SigmaDirective::AsData { attribute, .. } => attribute,
        }
    }

    pub fn required(&self) -> bool {
        match self {
            SigmaDirective::AsNode { required, .. }
            | SigmaDirective::AsLink { required, .. }
            | SigmaDirective::AsData { required, .. } => *required,
        }
    }
}

/// Errors of schema translation and edit application.
#[derive(Debug, thiserror::Error)]
pub enum Db2OntoError {
    #[error("invalid schema: {0}")]
    SchemaInvalid(String),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("duplicate class name `{name}`: {origin_a} and {origin_b}")]
    ClassCollision { name: Name, origin_a: String, origin_b: String },
    #[error("edit {index}: selector matches no axiom: {selector}")]
    SelectorUnmatched { index: usize, selector: String },
    #[error("edit {index}: {message}")]
    EditInvalid { index: usize, message: String },
    #[error("edit {index}: {source}")]
    EditParse { index: usize, source: ParseError },
    #[error("value `{0}` cannot be used as an identifier")]
    BadValueIdentifier(String),
}

/// Turns an enumerated value into a class/individual identifier, e.g.
/// "Normal ECG" → "NormalECG".
pub(crate) fn value_identifier(value: &str) -> Result<String, Db2OntoError> {
    let out: String = value
        .chars()
        .filter(|c| c.is_ascii_alphanumeric() || *c == '-' || *c == '_')
        .collect();
    if out.is_empty() || !out.chars().next().unwrap().is_ascii_alphabetic() {
        return Err(Db2OntoError::BadValueIdentifier(value.to_string()));
    }
    Ok(out)
}

/// Capitalizes the first character: `systolic` → `Systolic`.
pub(crate) fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().collect::<String>() + chars.as_str(),
        None => String::new(),
    }
}

pub(crate) fn json_literal(value: &serde_json::Value, datatype: Datatype) -> Option<Literal> {
    let lexical = match value {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Number(n) => n.to_string(),
        serde_json::Value::Bool(b) => b.to_string(),
        _ => return None,
    };
    Literal::new(lexical, datatype).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bp_tm() -> TerminologyManager {
        TerminologyManager::new(vec![
            TmEntry { path: "BloodPressure".into(), terminology: "LOINC".into(), code: "18684-1".into() },
            TmEntry { path: "BloodPressure".into(), terminology: "SNOMED".into(), code: "75367002".into() },
            TmEntry { path: "BloodPressure.systolic".into(), terminology: "LOINC".into(), code: "8480-6".into() },
            TmEntry { path: "BloodPressure.systolic".into(), terminology: "SNOMED".into(), code: "72313002".into() },
            TmEntry { path: "BloodPressure.diastolic".into(), terminology: "LOINC".into(), code: "8462-4".into() },
            TmEntry { path: "BloodPressure.diastolic".into(), terminology: "SNOMED".into(), code: "271650006".into() },
        ])
        .unwrap()
    }

    #[test]
    fn lookup_is_exact_path() {
        let tm = bp_tm();
        assert_eq!(lookup_code(&tm, "BloodPressure", "LOINC"), Some("18684-1"));
        assert_eq!(lookup_code(&tm, "BloodPressure.diastolic", "SNOMED"), Some("271650006"));
        assert_eq!(lookup_code(&tm, "Unknown.x", "LOINC"), None);
        assert_eq!(lookup_code(&tm, "BloodPressure.sys", "LOINC"), None);
    }

    #[test]
    fn value_identifiers() {
        assert_eq!(value_identifier("Normal ECG").unwrap(), "NormalECG");
        assert_eq!(value_identifier("yes").unwrap(), "yes");
        assert!(value_identifier("  ").is_err());
        assert!(value_identifier("1abc").is_err());
    }
}
