use osm_core::kripke::KripkeStructure;
use osm_core::logic::{check_ctl, is_model_path, sat_set, CtlFormula, Evidence, StateSet};
use osm_testkit::gen::{random_ctl, random_kripke};
use osm_testkit::oracle::{bfs_distance, naive_ctl};
use rand::rngs::StdRng;
use rand::SeedableRng;

const ATOMS: &[&str] = &["p", "q", "r", "s"];

fn bits(s: &StateSet) -> Vec<bool> {
    (0..s.universe()).map(|i| s.contains(i)).collect()
}

fn sample(seed: u64, n: usize) -> Vec<(KripkeStructure, CtlFormula)> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let m = random_kripke(&mut rng, 8, ATOMS);
            let f = random_ctl(&mut rng, 4, ATOMS);
            (m, f)
        })
        .collect()
}

#[test]
fn agrees_with_naive_semantics() {
    for (m, f) in sample(21, 2000) {
        assert!(f.depth() <= 4);
        assert_eq!(bits(&sat_set(&m, &f)), naive_ctl(&m, &f), "{f}");
    }
}

#[test]
fn complementation_and_dualities() {
    use CtlFormula::*;
    for (m, f) in sample(22, 500) {
        let b = Box::new(f.clone());
        let not_f = Box::new(CtlFormula::not(f.clone()));
        let sat = sat_set(&m, &f);
        assert_eq!(sat_set(&m, &Not(b.clone())), sat.complement());
        assert_eq!(sat_set(&m, &AG(b.clone())), sat_set(&m, &EF(not_f.clone())).complement());
        assert_eq!(sat_set(&m, &EF(b.clone())), sat_set(&m, &EU(Box::new(True), b.clone())));
        assert_eq!(sat_set(&m, &AF(b.clone())), sat_set(&m, &EG(not_f)).complement());
    }
}

#[test]
fn eg_is_the_greatest_closed_subset() {
    for (m, f) in sample(23, 300) {
        let phi = sat_set(&m, &f);
        let x = sat_set(&m, &CtlFormula::EG(Box::new(f.clone())));
        let closed = |set: &[bool]| {
            (0..m.len()).all(|s| !set[s] || (phi.contains(s) && m.successors(s).iter().any(|&t| set[t])))
        };
        let xb = bits(&x);
        assert!(closed(&xb));
        let extra: Vec<usize> = phi.iter().filter(|&s| !x.contains(s)).collect();
        for mask in 1u32..(1 << extra.len()) {
            let mut bigger = xb.clone();
            for (k, &s) in extra.iter().enumerate() {
                if mask & (1 << k) != 0 {
                    bigger[s] = true;
                }
            }
            assert!(!closed(&bigger), "{f}: a strict superset is closed");
        }
    }
}

#[test]
fn existential_witnesses_are_valid() {
    use CtlFormula::*;
    for (m, f) in sample(24, 500) {
        let (a, b) = (Box::new(f.clone()), Box::new(Atom("q".into())));
        for g in [EF(a.clone()), EU(b.clone(), a.clone()), EG(a.clone()), EX(a.clone())] {
            let res = check_ctl(&m, &g);
            let goal = sat_set(&m, &f);
            match &res.evidence {
                Evidence::FinitePath(p) => {
                    assert!(res.holds);
                    assert!(is_model_path(&m, p));
                    assert!(goal.contains(m.index_of(*p.last().unwrap()).unwrap()));
                    if let EU(..) = g {
                        let hold = sat_set(&m, &b);
                        assert!(p[..p.len() - 1].iter().all(|&s| hold.contains(m.index_of(s).unwrap())));
                    }
                }
                Evidence::Lasso { prefix, cycle } => {
                    assert!(res.holds && matches!(g, EG(_)));
                    let run: Vec<u64> = prefix.iter().chain(cycle).copied().collect();
                    assert!(is_model_path(&m, &run));
                    let (first, last) = (cycle[0], *cycle.last().unwrap());
                    assert!(m.successors(m.index_of(last).unwrap()).contains(&m.index_of(first).unwrap()));
                    assert!(run.iter().all(|&s| goal.contains(m.index_of(s).unwrap())));
                }
                Evidence::None => assert!(!res.holds),
                Evidence::Assignment(_) => panic!("assignment evidence from a model check"),
            }
        }
    }
}

#[test]
fn ag_counterexamples_are_shortest() {
    let mut rng = StdRng::seed_from_u64(25);
    let mut failing = 0;
    while failing < 500 {
        let m = random_kripke(&mut rng, 8, ATOMS);
        let f = random_ctl(&mut rng, 3, ATOMS);
        let res = check_ctl(&m, &CtlFormula::AG(Box::new(f.clone())));
        if res.holds {
            continue;
        }
        failing += 1;
        let Evidence::FinitePath(path) = res.evidence else {
            panic!("AG failure without a path");
        };
        assert!(is_model_path(&m, &path));
        let violating: Vec<bool> = naive_ctl(&m, &f).into_iter().map(|b| !b).collect();
        assert!(violating[m.index_of(*path.last().unwrap()).unwrap()]);
        assert_eq!(Some(path.len() - 1), bfs_distance(&m, &violating));
    }
}
