//! The schema-feature translation rules and their composition.
//!
//! Rule application order: relations and attributes first, then inclusion
//! dependencies, then functional dependencies, then exclusion dependencies,
//! and last integrity constraints and enumerated value domains. Generated
//! names are deterministic and independent of relation order: an attribute
//! class shared through a common code is named after the lexicographically
//! least attribute carrying it.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{
    Axiom, ClassExpression, Literal, Name, Ontology, PropertyDecl, PropertyRange,
};
use crate::reasoner::classify_axioms;

use super::{
    capitalize, json_literal, value_identifier, Db2OntoError, Relation, RelationalSchema,
    SigmaDirective, SigmaImportLink, TerminologyManager,
};

fn named(name: &Name) -> ClassExpression {
    ClassExpression::Named(name.clone())
}

/// How each attribute of the schema is treated.
#[derive(Debug, Clone, PartialEq, Eq)]
enum AttrRole {
    Key,
    /// Consumed by a non-key-to-key inclusion dependency.
    ForeignKey { target: String },
    /// Carries terminology codes: lifts to a typed value node.
    Coded { class: Name, codes: Vec<(String, String)> },
    /// Constrained to an enumerated value domain: lifts to a bare value node.
    Enumerated,
    /// Plain data attribute.
    Scalar,
}

/// Order-independent plan of attribute roles and attribute-class names.
struct Plan {
    roles: BTreeMap<(String, String), AttrRole>,
}

impl Plan {
    fn role(&self, relation: &str, attribute: &str) -> &AttrRole {
        &self.roles[&(relation.to_string(), attribute.to_string())]
    }
}

fn build_plan(schema: &RelationalSchema, tm: &TerminologyManager) -> Plan {
    let mut fk: BTreeMap<(String, String), String> = BTreeMap::new();
    for dep in &schema.inclusion {
        if dep.kind == super::InclusionKind::NonkeyToKey {
            for attr in &dep.from.attributes {
                fk.insert((dep.from.relation.clone(), attr.clone()), dep.to.relation.clone());
            }
        }
    }
    let enumerated: BTreeSet<(String, String)> = schema
        .domains
        .iter()
        .map(|d| (d.relation.clone(), d.attribute.clone()))
        .collect();

    // Group coded attributes by their exact code set; the class of a group is
    // named after its least attribute name, making naming independent of
    // relation order.
    let mut code_groups: BTreeMap<Vec<(String, String)>, String> = BTreeMap::new();
    for relation in &schema.relations {
        for attr in &relation.attributes {
            if relation.is_key(&attr.name) {
                continue;
            }
            let codes: Vec<(String, String)> = tm
                .codes_for(&format!("{}.{}", relation.name, attr.name))
                .into_iter()
                .map(|(t, c)| (t.to_string(), c.to_string()))
                .collect();
            if codes.is_empty() {
                continue;
            }
            let candidate = capitalize(&attr.name);
            code_groups
                .entry(codes)
                .and_modify(|name| {
                    if candidate < *name {
                        *name = candidate.clone();
                    }
                })
                .or_insert(candidate);
        }
    }

    let mut roles = BTreeMap::new();
    for relation in &schema.relations {
        for attr in &relation.attributes {
            let key = (relation.name.clone(), attr.name.clone());
            let role = if relation.is_key(&attr.name) {
                AttrRole::Key
            } else if let Some(target) = fk.get(&key) {
                AttrRole::ForeignKey { target: target.clone() }
            } else {
                let codes: Vec<(String, String)> = tm
                    .codes_for(&format!("{}.{}", relation.name, attr.name))
                    .into_iter()
                    .map(|(t, c)| (t.to_string(), c.to_string()))
                    .collect();
                if !codes.is_empty() {
                    let class = Name::new(&schema.prefix, code_groups[&codes].clone());
                    AttrRole::Coded { class, codes }
                } else if enumerated.contains(&key) {
                    AttrRole::Enumerated
                } else {
                    AttrRole::Scalar
                }
            };
            roles.insert(key, role);
        }
    }
    Plan { roles }
}

fn terminology_property(prefix: &str, terminology: &str) -> Name {
    Name::new(prefix, terminology.to_lowercase())
}

fn code_axiom(class: &Name, prefix: &str, terminology: &str, code: &str) -> Axiom {
    Axiom::EquivClass(
        named(class),
        ClassExpression::Code(terminology_property(prefix, terminology), Literal::string(code)),
    )
}

/// Relations become classes; a TM code for the relation adds a
/// code-equivalence axiom per terminology.
pub fn translate_relations(schema: &RelationalSchema, tm: &TerminologyManager) -> Vec<Axiom> {
    let mut out = Vec::new();
    for relation in &schema.relations {
        let class = Name::new(&schema.prefix, relation.name.clone());
        for (terminology, code) in tm.codes_for(&relation.name) {
            out.push(code_axiom(&class, &schema.prefix, terminology, code));
        }
    }
    out
}

/// Attribute translation. A coded attribute contributes a filler class with
/// its code axioms, a value-typing axiom, and (when compulsory) a
/// `has<Attr>` link from the relation class. An uncoded attribute becomes a
/// data property; when compulsory the relation requires a value for it.
pub fn translate_attributes(schema: &RelationalSchema, tm: &TerminologyManager) -> Vec<Axiom> {
    let plan = build_plan(schema, tm);
    let mut out = Vec::new();
    let value_prop = Name::new(&schema.prefix, "value");
    for relation in &schema.relations {
        let relation_class = Name::new(&schema.prefix, relation.name.clone());
        for attr in &relation.attributes {
            match plan.role(&relation.name, &attr.name) {
                AttrRole::Key | AttrRole::ForeignKey { .. } => {}
                AttrRole::Coded { class, codes } => {
                    for (terminology, code) in codes {
                        out.push(code_axiom(class, &schema.prefix, terminology, code));
                    }
                    out.push(Axiom::SubClass(
                        named(class),
                        ClassExpression::exists(
                            value_prop.clone(),
                            ClassExpression::Datatype(attr.sql_type.datatype()),
                        ),
                    ));
                    if attr.compulsory {
                        out.push(Axiom::SubClass(
                            named(&relation_class),
                            ClassExpression::exists(
                                Name::new(&schema.prefix, format!("has{}", capitalize(&attr.name))),
                                named(class),
                            ),
                        ));
                    }
                }
                AttrRole::Enumerated | AttrRole::Scalar => {
                    if attr.compulsory {
                        out.push(Axiom::SubClass(
                            named(&relation_class),
                            ClassExpression::exists(
                                Name::new(&schema.prefix, attr.name.clone()),
                                ClassExpression::Datatype(attr.sql_type.datatype()),
                            ),
                        ));
                    }
                }
            }
        }
    }
    out
}

/// Integrity constraint `R.a cmp bound`: through the value node for coded
/// attributes, directly on the data property otherwise.
pub fn translate_integrity(schema: &RelationalSchema, tm: &TerminologyManager) -> Vec<Axiom> {
    let plan = build_plan(schema, tm);
    let mut out = Vec::new();
    let value_prop = Name::new(&schema.prefix, "value");
    for ic in &schema.integrity {
        let relation = schema.relation(&ic.relation).expect("validated");
        let attr = relation.attribute(&ic.attribute).expect("validated");
        let cmp = ic.comparator_op().expect("validated");
        let Some(bound) = json_literal(&ic.bound, attr.sql_type.datatype()) else {
            continue;
        };
        let relation_class = Name::new(&schema.prefix, relation.name.clone());
        match plan.role(&ic.relation, &ic.attribute) {
            AttrRole::Coded { class, .. } => {
                out.push(Axiom::SubClass(
                    named(&relation_class),
                    ClassExpression::exists(
                        Name::new(&schema.prefix, format!("has{}", capitalize(&ic.attribute))),
                        ClassExpression::and(vec![
                            named(class),
                            ClassExpression::Range(value_prop.clone(), cmp, bound),
                        ]),
                    ),
                ));
            }
            _ => {
                out.push(Axiom::SubClass(
                    named(&relation_class),
                    ClassExpression::Range(Name::new(&schema.prefix, ic.attribute.clone()), cmp, bound),
                ));
            }
        }
    }
    out
}

/// Inclusion dependencies: foreign keys become object links, key-to-key
/// dependencies become class subsumption, subkey-to-key dependencies become a
/// generated `ref_<R'>` link.
pub fn translate_inclusions(schema: &RelationalSchema) -> Vec<Axiom> {
    let mut out = Vec::new();
    for dep in &schema.inclusion {
        let from_class = Name::new(&schema.prefix, dep.from.relation.clone());
        let to_class = Name::new(&schema.prefix, dep.to.relation.clone());
        match dep.kind {
            super::InclusionKind::NonkeyToKey => {
                let property = Name::new(&schema.prefix, dep.from.attributes.join("_"));
                out.push(Axiom::SubClass(
                    named(&from_class),
                    ClassExpression::exists(property, named(&to_class)),
                ));
            }
            super::InclusionKind::KeyToKey => {
                out.push(Axiom::SubClass(named(&from_class), named(&to_class)));
            }
            super::InclusionKind::SubkeyToKey => {
                let property = Name::new(&schema.prefix, format!("ref_{}", dep.to.relation));
                out.push(Axiom::SubClass(
                    named(&from_class),
                    ClassExpression::exists(property, named(&to_class)),
                ));
            }
        }
    }
    out
}

/// Exclusion dependencies: a disjointness axiom; when no existing class
/// subsumes both relations, a fresh common superclass is created.
pub fn translate_exclusions(schema: &RelationalSchema, current: &[Axiom]) -> Vec<Axiom> {
    let mut out = Vec::new();
    let mut working: Vec<Axiom> = current.to_vec();
    for dep in &schema.exclusion {
        let a = Name::new(&schema.prefix, dep.a.clone());
        let b = Name::new(&schema.prefix, dep.b.clone());
        out.push(Axiom::Disjoint(a.clone(), b.clone()));
        let classes: BTreeSet<Name> = [a.clone(), b.clone()].into();
        let classification = classify_axioms(working.iter(), &classes);
        let lattice = classification.lattice;
        let has_common = lattice
            .classes
            .iter()
            .any(|c| lattice.subsumes(&a, c) && lattice.subsumes(&b, c));
        if !has_common {
            let superclass = Name::new(&schema.prefix, format!("{}Or{}", dep.a, dep.b));
            out.push(Axiom::SubClass(named(&a), named(&superclass)));
            out.push(Axiom::SubClass(named(&b), named(&superclass)));
            working.push(Axiom::SubClass(named(&a), named(&superclass)));
            working.push(Axiom::SubClass(named(&b), named(&superclass)));
        }
    }
    out
}

fn functional_group_class(fd: &super::FunctionalDependency) -> String {
    let parts: Vec<String> = fd.determinant.iter().map(|a| capitalize(a)).collect();
    format!("{}-group", parts.join("-"))
}

/// A functional dependency `R.X → R.y` (schema not in 2NF/3NF for it) lifts
/// the determinant into a class of its own.
pub fn translate_functionals(schema: &RelationalSchema) -> Vec<Axiom> {
    let mut out = Vec::new();
    for fd in &schema.functional {
        let relation = schema.relation(&fd.relation).expect("validated");
        let dependent = relation.attribute(&fd.dependent).expect("validated");
        let group = Name::new(&schema.prefix, functional_group_class(fd));
        let has_group = Name::new(&schema.prefix, format!("has{}", group.local));
        let has_dependent = Name::new(&schema.prefix, format!("has{}", capitalize(&fd.dependent)));
        out.push(Axiom::SubClass(
            named(&Name::new(&schema.prefix, fd.relation.clone())),
            ClassExpression::exists(has_group, named(&group)),
        ));
        out.push(Axiom::SubClass(
            named(&group),
            ClassExpression::exists(
                has_dependent,
                ClassExpression::Datatype(dependent.sql_type.datatype()),
            ),
        ));
    }
    out
}

/// Enumerated value domains. When every value is coded, each value becomes a
/// class under a fresh grouping class; otherwise the grouping class is an
/// enumeration of individuals. Either way the attribute is range-restricted
/// to the grouping class.
pub fn translate_domain_enums(
    schema: &RelationalSchema,
    tm: &TerminologyManager,
) -> Result<Vec<Axiom>, Db2OntoError> {
    let mut out = Vec::new();
    for dc in &schema.domains {
        let relation_class = Name::new(&schema.prefix, dc.relation.clone());
        let attr_prop = Name::new(&schema.prefix, dc.attribute.clone());
        let grouping = Name::new(&schema.prefix, capitalize(&dc.attribute));
        let mut values: Vec<&String> = dc.values.iter().collect();
        values.dedup();
        let coded: Vec<Vec<(&str, &str)>> = values
            .iter()
            .map(|v| tm.codes_for(&format!("{}.{}={}", dc.relation, dc.attribute, v)))
            .collect();
        if coded.iter().all(|codes| !codes.is_empty()) {
            let mut value_classes = Vec::new();
            for (value, codes) in values.iter().zip(&coded) {
                let class = Name::new(&schema.prefix, value_identifier(value)?);
                for (terminology, code) in codes {
                    out.push(code_axiom(&class, &schema.prefix, terminology, code));
                }
                out.push(Axiom::SubClass(named(&class), named(&grouping)));
                value_classes.push(class);
            }
            for i in 0..value_classes.len() {
                for j in i + 1..value_classes.len() {
                    out.push(Axiom::Disjoint(value_classes[i].clone(), value_classes[j].clone()));
                }
            }
        } else {
            let individuals: Result<Vec<Name>, Db2OntoError> = values
                .iter()
                .map(|v| Ok(Name::new(&schema.prefix, value_identifier(v)?)))
                .collect();
            out.push(Axiom::EquivClass(
                named(&grouping),
                ClassExpression::OneOf(individuals?),
            ));
        }
        out.push(Axiom::SubClass(
            named(&relation_class),
            ClassExpression::Only(attr_prop, Box::new(named(&grouping))),
        ));
    }
    Ok(out)
}

/// Registers a generated class name, reporting collisions with both origins.
fn register(
    registry: &mut BTreeMap<Name, String>,
    name: &Name,
    origin: String,
) -> Result<(), Db2OntoError> {
    if let Some(existing) = registry.get(name) {
        if *existing != origin {
            return Err(Db2OntoError::ClassCollision {
                name: name.clone(),
                origin_a: existing.clone(),
                origin_b: origin,
            });
        }
        return Ok(());
    }
    registry.insert(name.clone(), origin);
    Ok(())
}

/// Runs the full rule sequence and emits one import link per relation.
pub fn translate_schema(
    schema: &RelationalSchema,
    tm: &TerminologyManager,
) -> Result<(Ontology, Vec<SigmaImportLink>), Db2OntoError> {
    schema.validate()?;
    let plan = build_plan(schema, tm);

    // Class registry: name collisions are reported with both origins.
    let mut registry: BTreeMap<Name, String> = BTreeMap::new();
    for relation in &schema.relations {
        register(
            &mut registry,
            &Name::new(&schema.prefix, relation.name.clone()),
            format!("relation {}", relation.name),
        )?;
    }
    for relation in &schema.relations {
        for attr in &relation.attributes {
            if let AttrRole::Coded { class, codes } = plan.role(&relation.name, &attr.name) {
                // All attributes sharing the code set share one class.
                let origin = format!("coded attribute group {:?}", codes);
                register(&mut registry, class, origin)?;
            }
        }
    }
    for dc in &schema.domains {
        let grouping = Name::new(&schema.prefix, capitalize(&dc.attribute));
        register(&mut registry, &grouping, format!("value domain of {}.{}", dc.relation, dc.attribute))?;
        let all_coded = dc.values.iter().all(|v| {
            !tm.codes_for(&format!("{}.{}={}", dc.relation, dc.attribute, v)).is_empty()
        });
        if all_coded {
            for value in &dc.values {
                let class = Name::new(&schema.prefix, value_identifier(value)?);
                register(
                    &mut registry,
                    &class,
                    format!("enumerated value {}.{}={}", dc.relation, dc.attribute, value),
                )?;
            }
        }
    }
    for fd in &schema.functional {
        register(
            &mut registry,
            &Name::new(&schema.prefix, functional_group_class(fd)),
            format!("functional dependency {}.{:?}", fd.relation, fd.determinant),
        )?;
    }

    let mut axioms: Vec<Axiom> = Vec::new();
    axioms.extend(translate_relations(schema, tm));
    axioms.extend(translate_attributes(schema, tm));
    axioms.extend(translate_inclusions(schema));
    axioms.extend(translate_functionals(schema));
    axioms.extend(translate_exclusions(schema, &axioms.clone()));
    axioms.extend(translate_integrity(schema, tm));
    axioms.extend(translate_domain_enums(schema, tm)?);

    let mut onto = Ontology::new(schema.name.clone(), schema.prefix.clone());
    onto.axioms = axioms.into_iter().collect();
    onto.classes = registry.keys().cloned().collect();

    // Data property declarations: terminology properties, the shared value
    // property, and uncoded attribute properties with domain and range.
    let mut used_terminologies: BTreeSet<String> = BTreeSet::new();
    let mut any_coded = false;
    for relation in &schema.relations {
        for (terminology, _) in tm.codes_for(&relation.name) {
            used_terminologies.insert(terminology.to_string());
        }
        for attr in &relation.attributes {
            match plan.role(&relation.name, &attr.name) {
                AttrRole::Coded { codes, .. } => {
                    any_coded = true;
                    used_terminologies.extend(codes.iter().map(|(t, _)| t.clone()));
                }
                AttrRole::Enumerated | AttrRole::Scalar => {
                    onto.properties.insert(
                        Name::new(&schema.prefix, attr.name.clone()),
                        PropertyDecl {
                            domain: Some(Name::new(&schema.prefix, relation.name.clone())),
                            range: Some(PropertyRange::Data(attr.sql_type.datatype())),
                        },
                    );
                }
                _ => {}
            }
        }
    }
    for dc in &schema.domains {
        let all_coded = dc.values.iter().all(|v| {
            !tm.codes_for(&format!("{}.{}={}", dc.relation, dc.attribute, v)).is_empty()
        });
        for value in &dc.values {
            for (terminology, _) in tm.codes_for(&format!("{}.{}={}", dc.relation, dc.attribute, value)) {
                used_terminologies.insert(terminology.to_string());
            }
        }
        let _ = all_coded;
    }
    for terminology in &used_terminologies {
        onto.properties
            .entry(terminology_property(&schema.prefix, terminology))
            .or_insert(PropertyDecl { domain: None, range: Some(PropertyRange::Data(crate::model::Datatype::String)) });
    }
    if any_coded || !schema.domains.is_empty() {
        onto.properties
            .entry(Name::new(&schema.prefix, "value"))
            .or_insert(PropertyDecl::default());
    }

    // Import links: subject from the key, one directive per non-key attribute.
    let mut links = Vec::new();
    for relation in &schema.relations {
        links.push(import_link(schema, relation, &plan));
    }
    Ok((onto, links))
}

fn import_link(schema: &RelationalSchema, relation: &Relation, plan: &Plan) -> SigmaImportLink {
    let mut directives = Vec::new();
    for attr in &relation.attributes {
        let directive = match plan.role(&relation.name, &attr.name) {
            AttrRole::Key => continue,
            AttrRole::ForeignKey { target } => SigmaDirective::AsLink {
                attribute: attr.name.clone(),
                property: Name::new(&schema.prefix, attr.name.clone()),
                target_relation: target.clone(),
                required: attr.compulsory,
            },
            AttrRole::Coded { class, .. } => SigmaDirective::AsNode {
                attribute: attr.name.clone(),
                property: Name::new(&schema.prefix, format!("has{}", capitalize(&attr.name))),
                node_class: Some(class.clone()),
                value_property: Name::new(&schema.prefix, "value"),
                value_datatype: attr.sql_type.datatype(),
                required: attr.compulsory,
            },
            AttrRole::Enumerated => SigmaDirective::AsNode {
                attribute: attr.name.clone(),
                property: Name::new(&schema.prefix, attr.name.clone()),
                node_class: None,
                value_property: Name::new(&schema.prefix, "value"),
                value_datatype: attr.sql_type.datatype(),
                required: attr.compulsory,
            },
            AttrRole::Scalar => SigmaDirective::AsData {
                attribute: attr.name.clone(),
                property: Name::new(&schema.prefix, attr.name.clone()),
                datatype: attr.sql_type.datatype(),
                required: attr.compulsory,
            },
        };
        directives.push(directive);
    }
    SigmaImportLink {
        relation: relation.name.clone(),
        subject_prefix: schema.prefix.clone(),
        key_attributes: relation.key.clone(),
        subject_class: Name::new(&schema.prefix, relation.name.clone()),
        directives,
    }
}
