use std::collections::BTreeSet;
use std::fmt;

/// Propositional formula over concern ids or atomic propositions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PropFormula {
    True,
    False,
    Atom(String),
    Not(Box<PropFormula>),
    And(Box<PropFormula>, Box<PropFormula>),
    Or(Box<PropFormula>, Box<PropFormula>),
    Implies(Box<PropFormula>, Box<PropFormula>),
    Iff(Box<PropFormula>, Box<PropFormula>),
}

/// CTL state formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CtlFormula {
    True,
    False,
    Atom(String),
    Not(Box<CtlFormula>),
    And(Box<CtlFormula>, Box<CtlFormula>),
    Or(Box<CtlFormula>, Box<CtlFormula>),
    Implies(Box<CtlFormula>, Box<CtlFormula>),
    Iff(Box<CtlFormula>, Box<CtlFormula>),
    EX(Box<CtlFormula>),
    AX(Box<CtlFormula>),
    EF(Box<CtlFormula>),
    AF(Box<CtlFormula>),
    EG(Box<CtlFormula>),
    AG(Box<CtlFormula>),
    EU(Box<CtlFormula>, Box<CtlFormula>),
    AU(Box<CtlFormula>, Box<CtlFormula>),
}

impl CtlFormula {
    pub fn not(f: CtlFormula) -> CtlFormula {
        CtlFormula::Not(Box::new(f))
    }

    pub fn atoms(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        use CtlFormula::*;
        match self {
            True | False => {}
            Atom(a) => {
                out.insert(a);
            }
            Not(f) | EX(f) | AX(f) | EF(f) | AF(f) | EG(f) | AG(f) => f.collect_atoms(out),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) | EU(a, b) | AU(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    pub fn depth(&self) -> usize {
        use CtlFormula::*;
        match self {
            True | False | Atom(_) => 0,
            Not(f) | EX(f) | AX(f) | EF(f) | AF(f) | EG(f) | AG(f) => 1 + f.depth(),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) | EU(a, b) | AU(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    /// The formula without temporal operators, if it has none.
    pub fn to_prop(&self) -> Option<PropFormula> {
        use CtlFormula as C;
        let bin = |a: &CtlFormula, b: &CtlFormula| Some((Box::new(a.to_prop()?), Box::new(b.to_prop()?)));
        Some(match self {
            C::True => PropFormula::True,
            C::False => PropFormula::False,
            C::Atom(a) => PropFormula::Atom(a.clone()),
            C::Not(f) => PropFormula::Not(Box::new(f.to_prop()?)),
            C::And(a, b) => {
                let (a, b) = bin(a, b)?;
                PropFormula::And(a, b)
            }
            C::Or(a, b) => {
                let (a, b) = bin(a, b)?;
                PropFormula::Or(a, b)
            }
            C::Implies(a, b) => {
                let (a, b) = bin(a, b)?;
                PropFormula::Implies(a, b)
            }
            C::Iff(a, b) => {
                let (a, b) = bin(a, b)?;
                PropFormula::Iff(a, b)
            }
            _ => return None,
        })
    }
}

impl PropFormula {
    pub fn atoms(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        use PropFormula::*;
        match self {
            True | False => {}
            Atom(a) => {
                out.insert(a);
            }
            Not(f) => f.collect_atoms(out),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    pub fn to_ctl(&self) -> CtlFormula {
        use PropFormula as P;
        let b = |f: &PropFormula| Box::new(f.to_ctl());
        match self {
            P::True => CtlFormula::True,
            P::False => CtlFormula::False,
            P::Atom(a) => CtlFormula::Atom(a.clone()),
            P::Not(f) => CtlFormula::Not(b(f)),
            P::And(x, y) => CtlFormula::And(b(x), b(y)),
            P::Or(x, y) => CtlFormula::Or(b(x), b(y)),
            P::Implies(x, y) => CtlFormula::Implies(b(x), b(y)),
            P::Iff(x, y) => CtlFormula::Iff(b(x), b(y)),
        }
    }
}

// Binary operators are always parenthesized so the printed form reparses to
// the same tree.
impl fmt::Display for CtlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use CtlFormula::*;
        match self {
            True => f.write_str("true"),
            False => f.write_str("false"),
            Atom(a) => f.write_str(a),
            Not(x) => write!(f, "!{x}"),
            And(a, b) => write!(f, "({a} & {b})"),
            Or(a, b) => write!(f, "({a} | {b})"),
            Implies(a, b) => write!(f, "({a} -> {b})"),
            Iff(a, b) => write!(f, "({a} <-> {b})"),
            EX(x) => write!(f, "EX {x}"),
            AX(x) => write!(f, "AX {x}"),
            EF(x) => write!(f, "EF {x}"),
            AF(x) => write!(f, "AF {x}"),
            EG(x) => write!(f, "EG {x}"),
            AG(x) => write!(f, "AG {x}"),
            EU(a, b) => write!(f, "E[{a} U {b}]"),
            AU(a, b) => write!(f, "A[{a} U {b}]"),
        }
    }
}

impl fmt::Display for PropFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_ctl().fmt(f)
    }
}
