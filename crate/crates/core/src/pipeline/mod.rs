//! End-to-end checking: parse, weave, build models, evaluate properties.

pub mod graph;
pub mod props;
pub mod report;
pub mod trace;

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use graph::{concern_edges, emit_concern_graph};
pub use props::{parse_props, EntryKind, PropertyEntry, PropertySpec, PropsError};
pub use report::{EntryReport, EvidenceReport, ModelStats, Report, Stats, Status};
pub use trace::{check_trace, check_trace_set, parse_trace, Trace, TraceError, TraceReport, TraceVerdict};

use crate::flowgraph::{build_cfg, CfgError, DEFAULT_INLINE_DEPTH};
use crate::frontend::{self, FrontendError, Program};
use crate::kripke::{from_cfg, KripkeStructure, ModelError};
use crate::logic::{check_config, check_ctl, unknown_atoms, LogicError, SatResult};
use crate::registry::Registry;
use crate::weaver::{presence_valuation, weave, ConcernValuation, WeaveError, WovenProgram};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{}: {source}", .path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: directory contains no .osm files", .0.display())]
    NoSources(PathBuf),
    #[error("{}: {error}", .path.as_ref().map_or("<sources>".to_string(), |p| p.display().to_string()))]
    Frontend {
        path: Option<PathBuf>,
        error: FrontendError,
    },
    #[error("{}: {error}", .path.display())]
    Props { path: PathBuf, error: PropsError },
    #[error(transparent)]
    Weave(#[from] WeaveError),
    #[error(transparent)]
    Cfg(#[from] CfgError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{}: {error}", .path.display())]
    Trace { path: PathBuf, error: TraceError },
    #[error("entry `{entry}`: {error}")]
    Logic { entry: String, error: LogicError },
    #[error("entry `{entry}`: atom `{atom}` labels no state of {target}")]
    StrictAtom { entry: String, target: String, atom: String },
    #[error("no checker registered for entry kind `{0}`")]
    UnknownKind(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Source {
    pub path: PathBuf,
    pub text: String,
}

fn read(path: &Path) -> Result<String, PipelineError> {
    fs::read_to_string(path).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads the given files; a directory contributes its `.osm` files
/// (non-recursive, sorted by name).
pub fn load_sources<P: AsRef<Path>>(paths: &[P]) -> Result<Vec<Source>, PipelineError> {
    let mut out = Vec::new();
    for p in paths {
        let p = p.as_ref();
        if p.is_dir() {
            let entries = fs::read_dir(p).map_err(|source| PipelineError::Io {
                path: p.to_path_buf(),
                source,
            })?;
            let mut files: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.is_file() && f.extension().is_some_and(|x| x == "osm"))
                .collect();
            if files.is_empty() {
                return Err(PipelineError::NoSources(p.to_path_buf()));
            }
            files.sort();
            for f in files {
                let text = read(&f)?;
                out.push(Source { path: f, text });
            }
        } else {
            out.push(Source {
                path: p.to_path_buf(),
                text: read(p)?,
            });
        }
    }
    Ok(out)
}

pub fn parse_sources(sources: &[Source]) -> Result<Program, PipelineError> {
    frontend::parse_all(sources.iter().map(|s| s.text.as_str())).map_err(|(i, error)| PipelineError::Frontend {
        path: i.map(|i| sources[i].path.clone()),
        error,
    })
}

pub fn load_props(path: &Path) -> Result<PropertySpec, PipelineError> {
    parse_props(&read(path)?).map_err(|error| PipelineError::Props {
        path: path.to_path_buf(),
        error,
    })
}

pub fn load_traces<P: AsRef<Path>>(paths: &[P]) -> Result<Vec<Trace>, PipelineError> {
    paths
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let p = p.as_ref();
            parse_trace(&read(p)?).map_err(|error| PipelineError::Trace {
                path: p.to_path_buf(),
                error: match error {
                    TraceError::EmptyTrace(_) => TraceError::EmptyTrace(i),
                    TraceError::EmptyEvent { event, .. } => TraceError::EmptyEvent { trace: i, event },
                },
            })
        })
        .collect()
}

pub fn build_model(woven: &WovenProgram, target: &str, inline_depth: usize) -> Result<KripkeStructure, PipelineError> {
    Ok(from_cfg(&build_cfg(woven, target, inline_depth)?))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineOptions {
    /// Added to (and overriding) the property file's aliases.
    pub aliases: BTreeMap<String, String>,
    pub strict_atoms: bool,
    pub inline_depth: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            aliases: BTreeMap::new(),
            strict_atoms: false,
            inline_depth: DEFAULT_INLINE_DEPTH,
        }
    }
}

/// Shared state handed to property checkers. Models are built once per
/// target.
pub struct CheckContext<'a> {
    pub woven: &'a WovenProgram,
    pub valuation: &'a ConcernValuation,
    pub options: &'a PipelineOptions,
    pub models: BTreeMap<String, KripkeStructure>,
    pub warnings: Vec<String>,
}

impl CheckContext<'_> {
    pub fn model(&mut self, target: &str) -> Result<&KripkeStructure, PipelineError> {
        if !self.models.contains_key(target) {
            let m = build_model(self.woven, target, self.options.inline_depth)?;
            self.models.insert(target.to_string(), m);
        }
        Ok(&self.models[target])
    }
}

/// Decides one kind of property entry.
pub trait PropertyChecker {
    fn check(&self, entry: &PropertyEntry, cx: &mut CheckContext<'_>) -> Result<SatResult, PipelineError>;
}

/// Propositional entries, evaluated on the concern valuation.
pub struct ConfigChecker;

impl PropertyChecker for ConfigChecker {
    fn check(&self, entry: &PropertyEntry, cx: &mut CheckContext<'_>) -> Result<SatResult, PipelineError> {
        let f = entry
            .formula
            .to_prop()
            .expect("config entries are parsed as propositional formulas");
        let mut res = check_config([(entry.name.as_str(), &f)], cx.valuation).map_err(|error| PipelineError::Logic {
            entry: entry.name.clone(),
            error,
        })?;
        Ok(res.remove(0).1)
    }
}

/// CTL entries, checked on the model of the entry's target method.
pub struct CtlChecker;

impl PropertyChecker for CtlChecker {
    fn check(&self, entry: &PropertyEntry, cx: &mut CheckContext<'_>) -> Result<SatResult, PipelineError> {
        let target = entry.target.as_deref().expect("ctl entries carry a target");
        let strict = cx.options.strict_atoms;
        let model = cx.model(target)?;
        let unknown = unknown_atoms(model, &entry.formula);
        let res = check_ctl(model, &entry.formula);
        if let Some(atom) = unknown.first() {
            if strict {
                return Err(PipelineError::StrictAtom {
                    entry: entry.name.clone(),
                    target: target.to_string(),
                    atom: atom.clone(),
                });
            }
        }
        for atom in unknown {
            cx.warnings
                .push(format!("entry `{}`: atom `{atom}` labels no state of {target}", entry.name));
        }
        Ok(res)
    }
}

pub fn property_checkers() -> Registry<dyn PropertyChecker> {
    let mut r: Registry<dyn PropertyChecker> = Registry::new();
    r.register(EntryKind::Config.as_str(), Box::new(ConfigChecker));
    r.register(EntryKind::Ctl.as_str(), Box::new(CtlChecker));
    r
}

/// Valuation for the woven system. Aliases that name no declaration (for
/// example an aspect removed from the sources) leave their concern false.
pub fn concern_valuation(
    woven: &WovenProgram,
    aliases: &BTreeMap<String, String>,
    warnings: &mut Vec<String>,
) -> Result<ConcernValuation, PipelineError> {
    let program = &woven.program;
    let (known, missing): (BTreeMap<_, _>, BTreeMap<_, _>) = aliases
        .iter()
        .map(|(k, v)| (k.clone(), v.clone()))
        .partition(|(k, _)| program.aspect(k).is_some() || program.type_decl(k).is_some());
    let mut valuation = presence_valuation(woven, &known)?;
    for (name, concern) in missing {
        warnings.push(format!("alias `{name}` names no declaration; concern `{concern}` is absent"));
        valuation.0.entry(concern).or_insert(false);
    }
    Ok(valuation)
}

pub fn run_pipeline(sources: &[Source], spec: &PropertySpec, options: &PipelineOptions) -> Result<Report, PipelineError> {
    let program = parse_sources(sources)?;
    let woven = weave(&program)?;
    let mut aliases = spec.aliases.clone();
    aliases.extend(options.aliases.clone());
    let mut warnings = Vec::new();
    let valuation = concern_valuation(&woven, &aliases, &mut warnings)?;

    let checkers = property_checkers();
    let mut cx = CheckContext {
        woven: &woven,
        valuation: &valuation,
        options,
        models: BTreeMap::new(),
        warnings,
    };
    let mut entries = Vec::new();
    for entry in &spec.entries {
        let kind = entry.kind.as_str();
        let checker = checkers
            .get(kind)
            .ok_or_else(|| PipelineError::UnknownKind(kind.to_string()))?;
        let res = checker.check(entry, &mut cx)?;
        let model = entry.target.as_ref().and_then(|t| cx.models.get(t));
        entries.push(EntryReport {
            name: entry.name.clone(),
            kind: kind.to_string(),
            target: entry.target.clone(),
            holds: res.holds,
            evidence: EvidenceReport::new(&res.evidence, model),
        });
    }
    let stats = Stats {
        models: cx
            .models
            .iter()
            .map(|(t, m)| {
                let s = ModelStats {
                    states: m.len(),
                    transitions: m.transition_count(),
                };
                (t.clone(), s)
            })
            .collect(),
        valuation: valuation.clone(),
    };
    Ok(Report::new(entries, stats, cx.warnings))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn src(text: &str) -> Vec<Source> {
        vec![Source {
            path: "mem.osm".into(),
            text: text.to_string(),
        }]
    }

    const PROGRAM: &str = "class S { run() { Db.fetch(); } }
aspect Guard { pointcut p(): call(* Db.*(..)); before(): p() { atomic check; } }";

    #[test]
    fn small_pipeline() {
        let spec = parse_props(
            "alias Guard = G\nconfig core: P & G\nctl guarded @ S.run: !E[!action:check U action:fetch]\nctl typo @ S.run: EF action:nope\n",
        )
        .unwrap();
        let r = run_pipeline(&src(PROGRAM), &spec, &PipelineOptions::default()).unwrap();
        assert!(r.entry("core").unwrap().holds);
        assert!(r.entry("guarded").unwrap().holds);
        assert!(!r.entry("typo").unwrap().holds);
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.warnings.len(), 1);
        assert_eq!(r.stats.models.len(), 1);

        let strict = PipelineOptions {
            strict_atoms: true,
            ..Default::default()
        };
        assert!(matches!(
            run_pipeline(&src(PROGRAM), &spec, &strict),
            Err(PipelineError::StrictAtom { .. })
        ));
    }

    #[test]
    fn missing_alias_is_absent() {
        let spec = parse_props("alias Gone = X\nconfig x: X -> P\nconfig y: X").unwrap();
        let r = run_pipeline(&src(PROGRAM), &spec, &PipelineOptions::default()).unwrap();
        assert!(r.entry("x").unwrap().holds);
        assert!(!r.entry("y").unwrap().holds);
        assert_eq!(r.stats.valuation.get("X"), Some(false));
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn upstream_errors() {
        let spec = parse_props("ctl a @ S.nothing: EF exit").unwrap();
        assert!(matches!(
            run_pipeline(&src(PROGRAM), &spec, &PipelineOptions::default()),
            Err(PipelineError::Cfg(_))
        ));
        let spec = parse_props("config a: Q").unwrap();
        assert!(matches!(
            run_pipeline(&src(PROGRAM), &spec, &PipelineOptions::default()),
            Err(PipelineError::Logic { .. })
        ));
        let err = run_pipeline(&src("class {"), &PropertySpec::default(), &PipelineOptions::default()).unwrap_err();
        assert!(err.to_string().starts_with("mem.osm: 1:7:"), "{err}");
    }
}
