//! Canonical serialization of ontology documents.
//!
//! Output is deterministic: header, imports, declarations, then axioms sorted
//! by (kind, lexicographic rendering). `parse ∘ serialize` is the identity on
//! the axiom set.

use std::fmt::Write;

use super::{Axiom, ClassExpression, Ontology, PropertyRange};

pub(crate) fn render_expression(expr: &ClassExpression) -> String {
    match expr {
        ClassExpression::Named(n) => n.to_string(),
        ClassExpression::And(cs) => {
            let parts: Vec<_> = cs.iter().map(render_expression).collect();
            format!("And({})", parts.join(", "))
        }
        ClassExpression::Exists(p, f) => format!("Exists({}, {})", p, render_expression(f)),
        ClassExpression::Code(p, v) => format!("Code({}, {})", p, v),
        ClassExpression::ExactlyOne(p, f) => {
            format!("ExactlyOne({}, {})", p, render_expression(f))
        }
        ClassExpression::Only(p, f) => format!("Only({}, {})", p, render_expression(f)),
        ClassExpression::Not(n) => format!("Not({})", n),
        ClassExpression::OneOf(is) => {
            let parts: Vec<_> = is.iter().map(ToString::to_string).collect();
            format!("OneOf({})", parts.join(", "))
        }
        ClassExpression::Range(p, cmp, bound) => {
            format!("Range({}, \"{}\", {})", p, cmp.symbol(), bound)
        }
        ClassExpression::Datatype(dt) => dt.keyword().to_string(),
    }
}

pub(crate) fn render_axiom(axiom: &Axiom) -> String {
    match axiom {
        Axiom::SubClass(a, b) => {
            format!("SubClass({}, {})", render_expression(a), render_expression(b))
        }
        Axiom::EquivClass(a, b) => {
            format!("EquivClass({}, {})", render_expression(a), render_expression(b))
        }
        Axiom::SubProperty(a, b) => format!("SubProperty({}, {})", a, b),
        Axiom::EquivProperty(a, b) => format!("EquivProperty({}, {})", a, b),
        Axiom::Disjoint(a, b) => format!("Disjoint({}, {})", a, b),
        Axiom::SameIndividual(a, b) => format!("SameIndividual({}, {})", a, b),
    }
}

/// Serializes the ontology in canonical order.
pub fn serialize_ontology(onto: &Ontology) -> String {
    let mut out = String::new();
    writeln!(out, "ontology {}", onto.id).unwrap();
    writeln!(out, "prefix {}", onto.prefix).unwrap();
    for import in &onto.imports {
        writeln!(out, "import {}", import).unwrap();
    }
    for class in &onto.classes {
        writeln!(out, "class {}", class).unwrap();
    }
    for (name, decl) in &onto.properties {
        write!(out, "property {}", name).unwrap();
        if let Some(domain) = &decl.domain {
            write!(out, " domain {}", domain).unwrap();
        }
        match &decl.range {
            Some(PropertyRange::Data(dt)) => write!(out, " range {}", dt).unwrap(),
            Some(PropertyRange::Class(c)) => write!(out, " range {}", c).unwrap(),
            None => {}
        }
        out.push('\n');
    }
    let mut rendered: Vec<(u8, String)> =
        onto.axioms.iter().map(|a| (a.kind_rank(), render_axiom(a))).collect();
    rendered.sort();
    for (_, line) in rendered {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

impl std::fmt::Display for Axiom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&render_axiom(self))
    }
}

impl std::fmt::Display for ClassExpression {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&render_expression(self))
    }
}
