use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use osm_core::flowgraph::{build_cfg, to_dot, DEFAULT_INLINE_DEPTH};
use osm_core::frontend::collect_aspect_info;
use osm_core::pipeline::{
    build_model, check_trace_set, emit_concern_graph, load_props, load_sources, load_traces, parse_sources,
    run_pipeline, PipelineError, PipelineOptions, PropertySpec,
};
use osm_core::registry::model_emitters;
use osm_core::weaver::weave;

#[derive(Parser)]
#[command(name = "osm", version, about = "Model checking for aspect-oriented programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Syntax check; prints declared classes and per-aspect counts.
    Parse {
        #[arg(required = true)]
        sources: Vec<PathBuf>,
    },
    /// Lists advice bindings in weaving order.
    Weave {
        #[arg(required = true)]
        sources: Vec<PathBuf>,
    },
    /// Control-flow graph of one method, as DOT.
    Cfg {
        /// Qualified method name, `Type.method`.
        method: String,
        #[arg(required = true)]
        sources: Vec<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_INLINE_DEPTH)]
        inline_depth: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Kripke structure of one method.
    Kripke {
        method: String,
        #[arg(required = true)]
        sources: Vec<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long, default_value_t = DEFAULT_INLINE_DEPTH)]
        inline_depth: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Checks a property file and writes a JSON report.
    Check {
        #[arg(required = true)]
        sources: Vec<PathBuf>,
        #[arg(long)]
        props: Option<PathBuf>,
        /// `AspectName=ConcernId`; repeatable.
        #[arg(long = "alias", value_parser = parse_alias)]
        aliases: Vec<(String, String)>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        strict_atoms: bool,
        #[arg(long, default_value_t = DEFAULT_INLINE_DEPTH)]
        inline_depth: usize,
    },
    /// Checks observed traces against the model of one method.
    Trace {
        method: String,
        tracefile: PathBuf,
        #[arg(required = true)]
        sources: Vec<PathBuf>,
        /// Additional trace file; repeatable.
        #[arg(long = "trace")]
        more: Vec<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_INLINE_DEPTH)]
        inline_depth: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Concern-dependency digraph of a property file's config entries.
    Graph {
        props: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_alias(s: &str) -> Result<(String, String), String> {
    match s.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() && !v.trim().is_empty() => Ok((k.trim().into(), v.trim().into())),
        _ => Err(format!("expected NAME=ID, got `{s}`")),
    }
}

#[derive(Debug)]
enum Failure {
    Pipeline(PipelineError),
    Other(String),
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        Failure::Pipeline(e)
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Pipeline(e) => write!(f, "{e}"),
            Failure::Other(s) => f.write_str(s),
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Other(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn warn_all(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

/// Returns whether every property or trace passed.
fn run(cmd: Command) -> Result<bool, Failure> {
    match cmd {
        Command::Parse { sources } => {
            let program = parse_sources(&load_sources(&sources)?)?;
            let types: Vec<&str> = program.types().map(|t| t.name.as_str()).collect();
            let info = json!({
                "classes": types,
                "aspects": collect_aspect_info(&program),
                "precedence": program.precedence,
            });
            println!("{}", serde_json::to_string_pretty(&info).expect("json"));
            Ok(true)
        }
        Command::Weave { sources } => {
            let woven = weave(&parse_sources(&load_sources(&sources)?)?).map_err(PipelineError::from)?;
            for b in &woven.bindings {
                let path: Vec<String> = b.joinpoint.path.iter().map(usize::to_string).collect();
                println!(
                    "{} [{}] {} <- {} {}#{}",
                    b.joinpoint.owner,
                    path.join("."),
                    b.joinpoint.signature,
                    b.kind.as_str(),
                    b.aspect,
                    b.ordinal
                );
            }
            Ok(true)
        }
        Command::Cfg {
            method,
            sources,
            inline_depth,
            out,
        } => {
            let woven = weave(&parse_sources(&load_sources(&sources)?)?).map_err(PipelineError::from)?;
            let cfg = build_cfg(&woven, &method, inline_depth).map_err(PipelineError::from)?;
            emit(&to_dot(&cfg), out.as_deref())?;
            Ok(true)
        }
        Command::Kripke {
            method,
            sources,
            format,
            inline_depth,
            out,
        } => {
            let emitters = model_emitters();
            let emitter = emitters.get(&format).ok_or_else(|| {
                let known: Vec<&str> = emitters.names().collect();
                Failure::Other(format!("unknown format `{format}` (expected {})", known.join(" or ")))
            })?;
            let woven = weave(&parse_sources(&load_sources(&sources)?)?).map_err(PipelineError::from)?;
            let model = build_model(&woven, &method, inline_depth)?;
            emit(&emitter.emit(&model), out.as_deref())?;
            Ok(true)
        }
        Command::Check {
            sources,
            props,
            aliases,
            out,
            strict_atoms,
            inline_depth,
        } => {
            let sources = load_sources(&sources)?;
            let spec = match props {
                Some(p) => load_props(&p)?,
                None => PropertySpec::default(),
            };
            let options = PipelineOptions {
                aliases: aliases.into_iter().collect::<BTreeMap<_, _>>(),
                strict_atoms,
                inline_depth,
            };
            let report = run_pipeline(&sources, &spec, &options)?;
            warn_all(&report.warnings);
            emit(&report.to_json(), out.as_deref())?;
            Ok(report.passed())
        }
        Command::Trace {
            method,
            tracefile,
            sources,
            more,
            inline_depth,
            out,
        } => {
            let woven = weave(&parse_sources(&load_sources(&sources)?)?).map_err(PipelineError::from)?;
            let model = build_model(&woven, &method, inline_depth)?;
            let files: Vec<PathBuf> = std::iter::once(tracefile).chain(more).collect();
            let traces = load_traces(&files)?;
            let mut report = check_trace_set(&model, &traces);
            for (entry, file) in report.traces.iter_mut().zip(&files) {
                entry.name = Some(file.display().to_string());
            }
            warn_all(&report.warnings);
            let mut text = serde_json::to_string_pretty(&report).expect("json");
            text.push('\n');
            emit(&text, out.as_deref())?;
            Ok(report.all_conform())
        }
        Command::Graph { props, out } => {
            let spec = load_props(&props)?;
            let formulas: Vec<(String, _)> = spec
                .config_entries()
                .map(|e| (e.name.clone(), e.formula.to_prop().expect("config entries are propositional")))
                .collect();
            let (dot, warnings) = emit_concern_graph(formulas.iter().map(|(n, f)| (n.as_str(), f)));
            warn_all(&warnings);
            emit(&dot, out.as_deref())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("osm: error: {msg}");
            ExitCode::from(2)
        }
    }
}
