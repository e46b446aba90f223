use super::formula::PropFormula;
use super::{Evidence, LogicError, SatResult};
use crate::weaver::ConcernValuation;

pub fn eval_prop(f: &PropFormula, v: &ConcernValuation) -> Result<bool, LogicError> {
    use PropFormula::*;
    Ok(match f {
        True => true,
        False => false,
        Atom(a) => v.get(a).ok_or_else(|| LogicError::UnknownAtom(a.clone()))?,
        Not(x) => !eval_prop(x, v)?,
        And(a, b) => eval_prop(a, v)? & eval_prop(b, v)?,
        Or(a, b) => eval_prop(a, v)? | eval_prop(b, v)?,
        Implies(a, b) => !eval_prop(a, v)? | eval_prop(b, v)?,
        Iff(a, b) => eval_prop(a, v)? == eval_prop(b, v)?,
    })
}

/// Evaluates each formula; a failing one carries the valuation as its
/// counterexample.
pub fn check_config<'a, I>(formulas: I, v: &ConcernValuation) -> Result<Vec<(String, SatResult)>, LogicError>
where
    I: IntoIterator<Item = (&'a str, &'a PropFormula)>,
{
    formulas
        .into_iter()
        .map(|(name, f)| {
            let holds = eval_prop(f, v)?;
            let evidence = if holds {
                Evidence::None
            } else {
                Evidence::Assignment(v.clone())
            };
            Ok((name.to_string(), SatResult { holds, evidence }))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::logic::parse_prop;

    fn val(pairs: &[(&str, bool)]) -> ConcernValuation {
        ConcernValuation(pairs.iter().map(|(k, b)| (k.to_string(), *b)).collect::<BTreeMap<_, _>>())
    }

    #[test]
    fn full_system_satisfies_dependencies() {
        let all = val(&[("P", true), ("A", true), ("B", true), ("C", true), ("L", true), ("E", true)]);
        for text in ["P & A & B & C & L & E", "C -> (A & B)", "A -> (L & E)", "C <-> (A & B)", "(A & B) -> C"] {
            assert!(eval_prop(&parse_prop(text).unwrap(), &all).unwrap(), "{text}");
        }
    }

    #[test]
    fn truth_table_row() {
        let v = val(&[("A", true), ("L", false), ("E", true)]);
        assert!(!eval_prop(&parse_prop("A -> (L & E)").unwrap(), &v).unwrap());
        assert!(eval_prop(&PropFormula::True, &v).unwrap());
        assert!(eval_prop(&PropFormula::True, &ConcernValuation::default()).unwrap());
    }

    #[test]
    fn unknown_atom() {
        let err = eval_prop(&parse_prop("Z | true").unwrap(), &val(&[])).unwrap_err();
        assert_eq!(err, LogicError::UnknownAtom("Z".into()));
    }

    #[test]
    fn config_results() {
        let v = val(&[("A", true), ("L", false), ("E", true)]);
        let f = parse_prop("A -> (L & E)").unwrap();
        let g = parse_prop("E").unwrap();
        let res = check_config([("p3", &f), ("enc", &g)], &v).unwrap();
        assert_eq!(res[0].1, SatResult { holds: false, evidence: Evidence::Assignment(v.clone()) });
        assert_eq!(res[1].1, SatResult { holds: true, evidence: Evidence::None });
        assert!(check_config(std::iter::empty(), &v).unwrap().is_empty());
    }
}
