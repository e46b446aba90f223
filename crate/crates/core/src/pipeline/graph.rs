//! Concern-dependency digraph from implication formulas.

use crate::logic::PropFormula;

fn conjuncts<'a>(f: &'a PropFormula, out: &mut Vec<&'a str>) -> bool {
    match f {
        PropFormula::Atom(a) => {
            out.push(a);
            true
        }
        PropFormula::And(l, r) => conjuncts(l, out) && conjuncts(r, out),
        _ => false,
    }
}

/// Edges `X -> Yi` for each formula `X -> (Y1 & ... & Yn)` with atomic `X`
/// and `Yi`. Edges keep first-occurrence order; other shapes are skipped
/// with a warning.
pub fn concern_edges<'a, I>(formulas: I) -> (Vec<(String, String)>, Vec<String>)
where
    I: IntoIterator<Item = (&'a str, &'a PropFormula)>,
{
    let mut edges: Vec<(String, String)> = Vec::new();
    let mut warnings = Vec::new();
    for (name, f) in formulas {
        let mut targets = Vec::new();
        let ok = match f {
            PropFormula::Implies(lhs, rhs) => match &**lhs {
                PropFormula::Atom(x) => conjuncts(rhs, &mut targets).then_some(x.as_str()),
                _ => None,
            },
            _ => None,
        };
        match ok {
            Some(x) => {
                for y in targets {
                    let e = (x.to_string(), y.to_string());
                    if !edges.contains(&e) {
                        edges.push(e);
                    }
                }
            }
            None => warnings.push(format!("`{name}` is not of the form X -> (Y1 & ... & Yn); skipped")),
        }
    }
    (edges, warnings)
}

pub fn emit_concern_graph<'a, I>(formulas: I) -> (String, Vec<String>)
where
    I: IntoIterator<Item = (&'a str, &'a PropFormula)>,
{
    let (edges, warnings) = concern_edges(formulas);
    let mut out = String::from("digraph concerns {\n");
    for (x, y) in &edges {
        out.push_str(&format!("  \"{x}\" -> \"{y}\";\n"));
    }
    out.push_str("}\n");
    (out, warnings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_prop;

    #[test]
    fn dependency_edges() {
        let f = parse_prop("C -> (A & B)").unwrap();
        let g = parse_prop("A -> (L & E)").unwrap();
        let (dot, warnings) = emit_concern_graph([("h", &f), ("a", &g)]);
        assert!(warnings.is_empty());
        assert_eq!(
            dot,
            "digraph concerns {\n  \"C\" -> \"A\";\n  \"C\" -> \"B\";\n  \"A\" -> \"L\";\n  \"A\" -> \"E\";\n}\n"
        );
    }

    #[test]
    fn other_shapes() {
        assert_eq!(emit_concern_graph([]), ("digraph concerns {\n}\n".to_string(), vec![]));
        let f = parse_prop("A & B").unwrap();
        let (dot, warnings) = emit_concern_graph([("conj", &f)]);
        assert_eq!(dot, "digraph concerns {\n}\n");
        assert_eq!(warnings.len(), 1);
        for text in ["(A & B) -> C", "A -> (B | C)", "A -> !B", "A <-> B"] {
            let f = parse_prop(text).unwrap();
            assert_eq!(concern_edges([("x", &f)]).1.len(), 1, "{text}");
        }
        let single = parse_prop("A -> B").unwrap();
        assert_eq!(concern_edges([("x", &single)]).0, vec![("A".to_string(), "B".to_string())]);
    }
}
