//! The edit script: the administrator's recorded changes to a generated
//! ontology, standing in for an interactive ontology editor session.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::model::{
    parse_axiom_str, render_axiom, Axiom, ClassExpression, Literal, Name, Ontology,
};

use super::{Db2OntoError, SigmaDirective, SigmaImportLink};

/// One edit. Axiom selectors are canonical axiom renderings and must resolve
/// to exactly one axiom when applied.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "camelCase")]
pub enum Edit {
    /// Renames a term everywhere it occurs.
    Rename { from: Name, to: Name },
    /// Replaces a subclass axiom by the corresponding equivalence.
    Strengthen { axiom: String },
    /// Adds a terminology-code equivalence to a class.
    AddCode { class: Name, terminology: String, code: String },
    Drop { axiom: String },
    Add { axiom: String },
}

pub type EditScript = Vec<Edit>;

pub fn parse_edit_script(text: &str) -> Result<EditScript, Db2OntoError> {
    Ok(serde_json::from_str(text)?)
}

/// Applies the edits in order; renames rewrite every occurrence.
pub fn apply_edit_script(onto: &Ontology, edits: &EditScript) -> Result<Ontology, Db2OntoError> {
    let mut out = onto.clone();
    for (index, edit) in edits.iter().enumerate() {
        match edit {
            Edit::Rename { from, to } => {
                out.axioms = out.axioms.iter().map(|a| rename_axiom(a, from, to)).collect();
                out.classes = out
                    .classes
                    .iter()
                    .map(|c| if c == from { to.clone() } else { c.clone() })
                    .collect();
                out.properties = out
                    .properties
                    .iter()
                    .map(|(name, decl)| {
                        let mut decl = decl.clone();
                        if decl.domain.as_ref() == Some(from) {
                            decl.domain = Some(to.clone());
                        }
                        if let Some(crate::model::PropertyRange::Class(c)) = &decl.range {
                            if c == from {
                                decl.range = Some(crate::model::PropertyRange::Class(to.clone()));
                            }
                        }
                        (if name == from { to.clone() } else { name.clone() }, decl)
                    })
                    .collect();
            }
            Edit::Strengthen { axiom } => {
                let found = select(&out, axiom, index)?;
                let Axiom::SubClass(sub, sup) = found else {
                    return Err(Db2OntoError::EditInvalid {
                        index,
                        message: format!("strengthen selector is not a subclass axiom: {axiom}"),
                    });
                };
                out.axioms.remove(&Axiom::SubClass(sub.clone(), sup.clone()));
                out.axioms.insert(Axiom::EquivClass(sub, sup));
            }
            Edit::AddCode { class, terminology, code } => {
                out.axioms.insert(Axiom::EquivClass(
                    ClassExpression::Named(class.clone()),
                    ClassExpression::Code(
                        Name::new(&out.prefix, terminology.to_lowercase()),
                        Literal::string(code.clone()),
                    ),
                ));
            }
            Edit::Drop { axiom } => {
                let found = select(&out, axiom, index)?;
                out.axioms.remove(&found);
            }
            Edit::Add { axiom } => {
                let mut allowed: BTreeSet<String> = out.imports.clone();
                allowed.insert(out.prefix.clone());
                let parsed = parse_axiom_str(axiom, Some(&allowed))
                    .map_err(|source| Db2OntoError::EditParse { index, source })?;
                out.axioms.insert(parsed);
            }
        }
    }
    Ok(out)
}

fn select(onto: &Ontology, selector: &str, index: usize) -> Result<Axiom, Db2OntoError> {
    // Canonical rendering is unique within the axiom set, so a selector
    // matches at most once.
    onto.axioms
        .iter()
        .find(|a| render_axiom(a) == selector)
        .cloned()
        .ok_or_else(|| Db2OntoError::SelectorUnmatched { index, selector: selector.to_string() })
}

fn rename_name(name: &Name, from: &Name, to: &Name) -> Name {
    if name == from {
        to.clone()
    } else {
        name.clone()
    }
}

fn rename_expr(expr: &ClassExpression, from: &Name, to: &Name) -> ClassExpression {
    match expr {
        ClassExpression::Named(n) => ClassExpression::Named(rename_name(n, from, to)),
        ClassExpression::And(cs) => {
            ClassExpression::And(cs.iter().map(|c| rename_expr(c, from, to)).collect())
        }
        ClassExpression::Exists(p, f) => {
            ClassExpression::Exists(rename_name(p, from, to), Box::new(rename_expr(f, from, to)))
        }
        ClassExpression::ExactlyOne(p, f) => ClassExpression::ExactlyOne(
            rename_name(p, from, to),
            Box::new(rename_expr(f, from, to)),
        ),
        ClassExpression::Only(p, f) => {
            ClassExpression::Only(rename_name(p, from, to), Box::new(rename_expr(f, from, to)))
        }
        ClassExpression::Code(p, v) => ClassExpression::Code(rename_name(p, from, to), v.clone()),
        ClassExpression::Not(n) => ClassExpression::Not(rename_name(n, from, to)),
        ClassExpression::OneOf(is) => {
            ClassExpression::OneOf(is.iter().map(|i| rename_name(i, from, to)).collect())
        }
        ClassExpression::Range(p, c, b) => {
            ClassExpression::Range(rename_name(p, from, to), *c, b.clone())
        }
        ClassExpression::Datatype(dt) => ClassExpression::Datatype(*dt),
    }
}

fn rename_axiom(axiom: &Axiom, from: &Name, to: &Name) -> Axiom {
    match axiom {
        Axiom::SubClass(a, b) => Axiom::SubClass(rename_expr(a, from, to), rename_expr(b, from, to)),
        Axiom::EquivClass(a, b) => {
            Axiom::EquivClass(rename_expr(a, from, to), rename_expr(b, from, to))
        }
        Axiom::SubProperty(a, b) => {
            Axiom::SubProperty(rename_name(a, from, to), rename_name(b, from, to))
        }
        Axiom::EquivProperty(a, b) => {
            Axiom::EquivProperty(rename_name(a, from, to), rename_name(b, from, to))
        }
        Axiom::Disjoint(a, b) => Axiom::Disjoint(rename_name(a, from, to), rename_name(b, from, to)),
        Axiom::SameIndividual(a, b) => {
            Axiom::SameIndividual(rename_name(a, from, to), rename_name(b, from, to))
        }
    }
}

/// Propagates `Rename` edits into import links, so lifted triples use the
/// edited property and class names.
pub fn apply_renames_to_links(links: &[SigmaImportLink], edits: &EditScript) -> Vec<SigmaImportLink> {
    let renames: Vec<(&Name, &Name)> = edits
        .iter()
        .filter_map(|e| match e {
            Edit::Rename { from, to } => Some((from, to)),
            _ => None,
        })
        .collect();
    let rename = |name: &Name| -> Name {
        let mut current = name.clone();
        for (from, to) in &renames {
            if current == **from {
                current = (*to).clone();
            }
        }
        current
    };
    links
        .iter()
        .map(|link| {
            let mut link = link.clone();
            link.subject_class = rename(&link.subject_class);
            link.directives = link
                .directives
                .iter()
                .map(|d| match d {
                    SigmaDirective::AsNode {
                        attribute,
                        property,
                        node_class,
                        value_property,
                        value_datatype,
                        required,
                    } => SigmaDirective::AsNode {
                        attribute: attribute.clone(),
                        property: rename(property),
                        node_class: node_class.as_ref().map(&rename),
                        value_property: rename(value_property),
                        value_datatype: *value_datatype,
                        required: *required,
                    },
                    SigmaDirective::AsLink { attribute, property, target_relation, required } => {
                        SigmaDirective::AsLink {
                            attribute: attribute.clone(),
                            property: rename(property),
                            target_relation: target_relation.clone(),
                            required: *required,
                        }
                    }
                    SigmaDirective::AsData { attribute, property, datatype, required } => {
                        SigmaDirective::AsData {
                            attribute: attribute.clone(),
                            property: rename(property),
                            datatype: *datatype,
                            required: *required,
                        }
                    }
                })
                .collect();
            link
        })
        .collect()
}
