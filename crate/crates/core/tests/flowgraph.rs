use std::collections::{BTreeSet, VecDeque};

use osm_core::flowgraph::{build_cfg, to_dot, Cfg, CfgError, Guard, NodeKind, Origin, DEFAULT_INLINE_DEPTH};
use osm_core::frontend::Program;
use osm_core::pipeline::parse_sources;
use osm_core::weaver::{weave, WovenProgram};
use osm_testkit::oracle::advice_action_count;
use osm_testkit::{corpus, gen};
use rand::rngs::StdRng;
use rand::SeedableRng;

fn reachable(cfg: &Cfg) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([cfg.entry]);
    let mut q = VecDeque::from([cfg.entry]);
    while let Some(n) = q.pop_front() {
        for e in cfg.successors(n) {
            if seen.insert(e.to) {
                q.push_back(e.to);
            }
        }
    }
    seen
}

fn check_shape(cfg: &Cfg) {
    let seen = reachable(cfg);
    for n in &cfg.nodes {
        assert!(seen.contains(&n.id) || n.id == cfg.exit, "node {} unreachable", n.id);
        if n.kind == NodeKind::Branch {
            let guards: BTreeSet<Guard> = cfg.successors(n.id).map(|e| e.guard).collect();
            assert_eq!(cfg.successors(n.id).count(), 2, "branch {} arity", n.id);
            assert_eq!(guards, BTreeSet::from([Guard::Then, Guard::Else]));
        }
    }
    let ids: Vec<usize> = cfg.nodes.iter().map(|n| n.id).collect();
    assert_eq!(ids, (0..cfg.nodes.len()).collect::<Vec<_>>());
    assert!(cfg.edges.windows(2).all(|w| w[0] < w[1]));
}

fn methods(p: &Program) -> Vec<(String, String)> {
    p.types()
        .flat_map(|t| t.methods.iter().map(move |m| (t.name.clone(), m.name.clone())))
        .collect()
}

fn unwoven(w: &WovenProgram) -> WovenProgram {
    WovenProgram {
        program: w.program.clone(),
        bindings: Vec::new(),
    }
}

#[test]
fn generated_graph_invariants() {
    let mut rng = StdRng::seed_from_u64(3);
    let (mut built, mut recursive) = (0, 0);
    for _ in 0..300 {
        let p = gen::random_program(&mut rng, gen::GenConfig::default());
        let w = weave(&p).unwrap();
        for (t, m) in methods(&p) {
            let q = format!("{t}.{m}");
            match build_cfg(&w, &q, DEFAULT_INLINE_DEPTH) {
                Ok(cfg) => {
                    built += 1;
                    check_shape(&cfg);
                    assert_eq!(build_cfg(&w, &q, DEFAULT_INLINE_DEPTH).unwrap(), cfg);
                    let base = build_cfg(&unwoven(&w), &q, DEFAULT_INLINE_DEPTH).unwrap();
                    check_shape(&base);
                    assert!(base.nodes.iter().all(|n| n.origin == Origin::Base));
                }
                Err(CfgError::Recursion(_)) => recursive += 1,
                Err(e) => panic!("{q}: {e}"),
            }
        }
    }
    assert!(built > 10 * recursive.max(1), "built {built}, recursive {recursive}");
}

#[test]
fn advice_node_accounting() {
    let mut rng = StdRng::seed_from_u64(5);
    let cfg = gen::GenConfig {
        jumps: false,
        ..Default::default()
    };
    let mut checked = 0;
    for _ in 0..300 {
        let p = gen::random_program(&mut rng, cfg);
        let w = weave(&p).unwrap();
        for (t, m) in methods(&p) {
            let Ok(g) = build_cfg(&w, &format!("{t}.{m}"), DEFAULT_INLINE_DEPTH) else {
                continue;
            };
            let advice_actions = g
                .nodes
                .iter()
                .filter(|n| n.kind == NodeKind::Action && matches!(n.origin, Origin::Advice { .. }))
                .count();
            assert_eq!(advice_actions, advice_action_count(&p, &t, &m), "{t}.{m}");
            checked += 1;
        }
    }
    assert!(checked > 100);
}

#[test]
fn corpus_graph() {
    let w = weave(&parse_sources(&corpus::sources()).unwrap()).unwrap();
    let cfg = build_cfg(&w, corpus::TARGET, DEFAULT_INLINE_DEPTH).unwrap();
    check_shape(&cfg);
    let dot = to_dot(&cfg);
    assert_eq!(dot, to_dot(&build_cfg(&w, corpus::TARGET, DEFAULT_INLINE_DEPTH).unwrap()));
    let node_lines = dot.lines().filter(|l| l.trim_start().starts_with('n') && !l.contains("->")).count();
    assert_eq!(node_lines, cfg.nodes.len());
    let grouped = dot.lines().filter(|l| l.contains("group=")).count();
    let advice_nodes = cfg.nodes.iter().filter(|n| n.origin != Origin::Base).count();
    assert_eq!(grouped, advice_nodes);
    assert_eq!(
        cfg.action_labels().collect::<Vec<_>>(),
        [
            "isUserAuthorized",
            "log-start",
            "fetch",
            "encrypt",
            "log-end",
            "throw:UnauthorizedAccessException"
        ]
    );
}
