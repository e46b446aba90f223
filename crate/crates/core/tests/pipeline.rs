use osm_core::kripke::{load, to_json};
use osm_core::logic::{check_ctl, is_model_path};
use osm_core::pipeline::{
    build_model, load_props, parse_sources, run_pipeline, EvidenceReport, PipelineOptions, Report,
};
use osm_core::weaver::weave;
use osm_testkit::corpus;

fn run(sources: &[osm_core::pipeline::Source]) -> Report {
    let spec = load_props(&corpus::props_path()).unwrap();
    run_pipeline(sources, &spec, &PipelineOptions::default()).unwrap()
}

#[test]
fn intact_corpus_passes() {
    let r = run(&corpus::sources());
    assert!(r.passed(), "{}", r.to_json());
    assert!(r.warnings.is_empty());
    assert_eq!(r.to_json(), run(&corpus::sources()).to_json());
}

#[test]
fn removing_access_control_exposes_unguarded_fetch() {
    let sources = corpus::sources_without("access_control.osm", "AccessControl");
    let r = run(&sources);
    assert!(!r.passed());
    let e = r.entry("auth_first").unwrap();
    assert!(!e.holds);
    let Some(EvidenceReport::Path { states, actions }) = &e.evidence else {
        panic!("expected a path, got {:?}", e.evidence);
    };
    assert_eq!(actions.last().map(String::as_str), Some("fetch"));
    assert!(!actions.iter().any(|a| a == "isUserAuthorized"));
    let model = build_model(&weave(&parse_sources(&sources).unwrap()).unwrap(), corpus::TARGET, 16).unwrap();
    assert!(is_model_path(&model, states));
    let last = model.index_of(*states.last().unwrap()).unwrap();
    assert!(model.has_label(last, "action:fetch"));
}

#[test]
fn removing_logging_breaks_proposition_three() {
    let r = run(&corpus::sources_without("logging.osm", "Logging"));
    let e = r.entry("prop3_access_requires_logging_and_encryption").unwrap();
    assert!(!e.holds);
    match &e.evidence {
        Some(EvidenceReport::Assignment { valuation }) => {
            assert_eq!(valuation.get("L"), Some(false));
            assert_eq!(valuation.get("A"), Some(true));
        }
        other => panic!("expected an assignment, got {other:?}"),
    }
    assert!(r.entry("prop2_health_requires_access_and_privacy").unwrap().holds);
}

#[test]
fn reloaded_model_gives_the_same_verdicts() {
    let spec = load_props(&corpus::props_path()).unwrap();
    let woven = weave(&parse_sources(&corpus::sources()).unwrap()).unwrap();
    let model = build_model(&woven, corpus::TARGET, 16).unwrap();
    let reloaded = load(&to_json(&model)).unwrap();
    let report = run(&corpus::sources());
    for entry in spec.entries.iter().filter(|e| e.target.is_some()) {
        let res = check_ctl(&reloaded, &entry.formula);
        assert_eq!(res.holds, report.entry(&entry.name).unwrap().holds, "{}", entry.name);
    }
}
