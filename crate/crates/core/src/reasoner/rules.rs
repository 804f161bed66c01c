//! Horn rules over triple patterns, with optional fresh-individual heads.
//!
//! File format, one rule per line:
//!
//! ```text
//! rule r1: (?e type a:ECGObservation), (?e a:hasAxis ?x), (?x a:hasP-Axis ?p) -> (?e c:comp ?p)
//! rule r2: (?e type c:ECGRecording), (?e c:comp ?p), (?p type c:P-Axis), !fresh(?x) -> (?e a:hasAxis ?x), (?x type a:ECGAxis), (?x a:hasP-Axis ?p)
//! ```
//!
//! `!fresh(?x)` marks a created variable: firing mints a deterministic skolem
//! individual for it, keyed by the rule id and the body binding.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::graph::{PatternPredicate, PatternTerm, TriplePattern, Var};
use crate::model::ParseError;

/// A forward-chaining rule. Every head variable must occur in the body or be
/// created; the body is non-empty.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct HornRule {
    pub id: String,
    pub body: Vec<TriplePattern>,
    pub head: Vec<TriplePattern>,
    pub creates: Vec<Var>,
}

/// Rule construction or rule file error.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuleError {
    #[error("rule {id}: body must be non-empty")]
    EmptyBody { id: String },
    #[error("rule {id}: head variable ?{var} neither bound in body nor created")]
    UnboundHeadVar { id: String, var: String },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl HornRule {
    pub fn new(
        id: impl Into<String>,
        body: Vec<TriplePattern>,
        head: Vec<TriplePattern>,
        creates: Vec<Var>,
    ) -> Result<Self, RuleError> {
        let rule = HornRule { id: id.into(), body, head, creates };
        rule.validate()?;
        Ok(rule)
    }

    fn validate(&self) -> Result<(), RuleError> {
        if self.body.is_empty() {
            return Err(RuleError::EmptyBody { id: self.id.clone() });
        }
        let mut bound: BTreeSet<Var> = self.creates.iter().cloned().collect();
        for pattern in &self.body {
            bound.extend(pattern.variables());
        }
        for pattern in &self.head {
            for var in pattern.variables() {
                if !bound.contains(&var) {
                    return Err(RuleError::UnboundHeadVar { id: self.id.clone(), var: var.0 });
                }
            }
        }
        Ok(())
    }

    /// Namespace skolem individuals are minted in: the prefix of the first
    /// name appearing in the head.
    pub fn skolem_namespace(&self) -> Option<&str> {
        for pattern in &self.head {
            if let PatternPredicate::Prop(p) = &pattern.predicate {
                return Some(&p.prefix);
            }
            if let PatternTerm::Name(n) = &pattern.object {
                return Some(&n.prefix);
            }
            if let PatternTerm::Name(n) = &pattern.subject {
                return Some(&n.prefix);
            }
        }
        None
    }
}

/// Parses a rule file: one `rule <id>: body -> head` per line.
pub fn parse_rules(text: &str) -> Result<Vec<HornRule>, RuleError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i as u32 + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        out.push(parse_rule_line(trimmed, lineno)?);
    }
    Ok(out)
}

fn parse_rule_line(line: &str, lineno: u32) -> Result<HornRule, RuleError> {
    let err = |col: usize, message: &str| {
        RuleError::Parse(ParseError { line: lineno, col: col as u32 + 1, message: message.into() })
    };
    let rest = line.strip_prefix("rule").ok_or_else(|| err(0, "expected `rule <id>:`"))?;
    let colon = rest.find(':').ok_or_else(|| err(line.len(), "expected `:` after rule id"))?;
    let id = rest[..colon].trim().to_string();
    if id.is_empty() {
        return Err(err(4, "missing rule id"));
    }
    let rest = &rest[colon + 1..];
    let arrow = rest.find("->").ok_or_else(|| err(line.len(), "expected `->`"))?;
    let (body_src, head_src) = (&rest[..arrow], &rest[arrow + 2..]);

    let mut creates = Vec::new();
    let mut body_parts = Vec::new();
    for part in split_atoms(body_src) {
        let part = part.trim();
        if let Some(inner) = part.strip_prefix("!fresh") {
            let var = inner.trim().strip_prefix('(').and_then(|s| s.strip_suffix(')'));
            let var = var
                .map(str::trim)
                .and_then(|s| s.strip_prefix('?'))
                .ok_or_else(|| err(0, "expected `!fresh(?var)`"))?;
            creates.push(Var(var.to_string()));
        } else {
            body_parts.push(part.to_string());
        }
    }
    let parse_list = |parts: &[String]| -> Result<Vec<TriplePattern>, RuleError> {
        crate::model::parser_support::parse_pattern_list(&parts.join(", "), lineno)
            .map_err(RuleError::Parse)
    };
    let body = parse_list(&body_parts)?;
    let head_parts: Vec<String> =
        split_atoms(head_src).into_iter().map(|s| s.trim().to_string()).collect();
    let head = parse_list(&head_parts)?;
    HornRule::new(id, body, head, creates)
}

/// Splits a comma-separated atom list at top level (commas inside parens stay).
fn split_atoms(src: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    for ch in src.chars() {
        match ch {
            '(' => {
                depth += 1;
                current.push(ch);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                current.push(ch);
            }
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut current));
            }
            _ => current.push(ch),
        }
    }
    if !current.trim().is_empty() {
        out.push(current);
    }
    out
}

/// Renders rules in the file format, in the given order.
pub fn serialize_rules(rules: &[HornRule]) -> String {
    let mut out = String::new();
    for rule in rules {
        write!(out, "rule {}: ", rule.id).unwrap();
        let body: Vec<String> = rule
            .body
            .iter()
            .map(ToString::to_string)
            .chain(rule.creates.iter().map(|v| format!("!fresh({})", v)))
            .collect();
        let head: Vec<String> = rule.head.iter().map(ToString::to_string).collect();
        writeln!(out, "{} -> {}", body.join(", "), head.join(", ")).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_rule_with_fresh() {
        let text = "rule r2: (?e type c:ECGRecording), (?e c:comp ?p), (?p type c:P-Axis), !fresh(?x) -> (?e a:hasAxis ?x), (?x type a:ECGAxis), (?x a:hasP-Axis ?p)\n";
        let rules = parse_rules(text).unwrap();
        assert_eq!(rules.len(), 1);
        assert_eq!(rules[0].creates, vec![Var("x".into())]);
        assert_eq!(rules[0].skolem_namespace(), Some("a"));
        assert_eq!(serialize_rules(&rules), text);
    }

    #[test]
    fn rejects_unbound_head_variable() {
        let text = "rule bad: (?e type c:A) -> (?e c:p ?q)";
        assert!(matches!(
            parse_rules(text),
            Err(RuleError::UnboundHeadVar { var, .. }) if var == "q"
        ));
    }
}
