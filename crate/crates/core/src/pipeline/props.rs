//! Line-oriented property files.
//!
//! ```text
//! # comment
//! alias AccessControl = A
//! config prop3: A -> (L & E)
//! ctl auth_first @ HealthService.requestHistory: !E[!action:isUserAuthorized U action:fetch]
//! ```

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::frontend::lexer::is_identifier;
use crate::logic::{parse_ctl, parse_prop, CtlFormula};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct PropsError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EntryKind {
    Config,
    Ctl,
}

impl EntryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EntryKind::Config => "config",
            EntryKind::Ctl => "ctl",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyEntry {
    pub name: String,
    pub kind: EntryKind,
    /// `Type.method`; present for ctl entries only.
    pub target: Option<String>,
    pub text: String,
    /// Parsed formula; config entries contain no temporal operators.
    pub formula: CtlFormula,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PropertySpec {
    pub aliases: BTreeMap<String, String>,
    pub entries: Vec<PropertyEntry>,
}

impl PropertySpec {
    pub fn config_entries(&self) -> impl Iterator<Item = &PropertyEntry> {
        self.entries.iter().filter(|e| e.kind == EntryKind::Config)
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

pub fn parse_props(text: &str) -> Result<PropertySpec, PropsError> {
    let mut spec = PropertySpec::default();
    let mut names = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| PropsError {
            line: line_no,
            message,
        };
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match keyword {
            "alias" => {
                let (aspect, concern) = rest
                    .split_once('=')
                    .ok_or_else(|| err("expected `alias <Name> = <ConcernId>`".into()))?;
                let (aspect, concern) = (aspect.trim(), concern.trim());
                if !is_identifier(aspect) || !is_identifier(concern) {
                    return Err(err(format!("invalid alias `{rest}`")));
                }
                spec.aliases.insert(aspect.to_string(), concern.to_string());
            }
            "config" | "ctl" => {
                let (head, formula_text) = rest
                    .split_once(':')
                    .ok_or_else(|| err(format!("expected `:` after the {keyword} entry name")))?;
                let formula_text = formula_text.trim();
                let (name, target) = if keyword == "ctl" {
                    let (name, target) = head
                        .split_once('@')
                        .ok_or_else(|| err("expected `ctl <name> @ <Type.method>: <formula>`".into()))?;
                    let target = target.trim();
                    match target.split_once('.') {
                        Some((t, m)) if is_identifier(t) && is_identifier(m) => {}
                        _ => return Err(err(format!("invalid target `{target}`"))),
                    }
                    (name.trim(), Some(target.to_string()))
                } else {
                    (head.trim(), None)
                };
                if name.is_empty() || name.contains(char::is_whitespace) {
                    return Err(err(format!("invalid entry name `{name}`")));
                }
                if !names.insert(name.to_string()) {
                    return Err(err(format!("duplicate entry name `{name}`")));
                }
                let (kind, formula) = if keyword == "ctl" {
                    let f = parse_ctl(formula_text).map_err(|e| err(e.to_string()))?;
                    (EntryKind::Ctl, f)
                } else {
                    let f = parse_prop(formula_text).map_err(|e| err(e.to_string()))?;
                    (EntryKind::Config, f.to_ctl())
                };
                spec.entries.push(PropertyEntry {
                    name: name.to_string(),
                    kind,
                    target,
                    text: formula_text.to_string(),
                    formula,
                });
            }
            other => return Err(err(format!("unknown directive `{other}`"))),
        }
    }
    Ok(spec)
}
