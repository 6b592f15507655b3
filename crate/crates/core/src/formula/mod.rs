//! ATL formulas: abstract syntax, canonical printing, subformula ordering and
//! the finite unfoldings of `G` and `U`.

mod parser;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use parser::{parse_formula, ParseError};

/// A coalition: sorted, duplicate-free agent numbers.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentSet(Vec<usize>);

impl AgentSet {
    pub fn empty() -> Self {
        AgentSet(Vec::new())
    }

    pub fn new(agents: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = agents.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        AgentSet(v)
    }

    pub fn agents(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, agent: usize) -> bool {
        self.0.binary_search(&agent).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Agents of `1..=agent_count` outside the coalition.
    pub fn complement(&self, agent_count: usize) -> AgentSet {
        AgentSet((1..=agent_count).filter(|a| !self.contains(*a)).collect())
    }
}

impl fmt::Display for AgentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<<")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(">>")
    }
}

/// ATL formula. Conjunction is not a node: [`Formula::and`] rewrites it to
/// `~(~l | ~r)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Prop(String),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    CoopX(AgentSet, Box<Formula>),
    CoopU(AgentSet, Box<Formula>, Box<Formula>),
    CoopR(AgentSet, Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn prop(name: impl Into<String>) -> Formula {
        Formula::Prop(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::not(Formula::or(Formula::not(l), Formula::not(r)))
    }

    pub fn next(a: AgentSet, f: Formula) -> Formula {
        Formula::CoopX(a, Box::new(f))
    }

    pub fn until(a: AgentSet, lhs: Formula, rhs: Formula) -> Formula {
        Formula::CoopU(a, Box::new(lhs), Box::new(rhs))
    }

    pub fn release(a: AgentSet, lhs: Formula, rhs: Formula) -> Formula {
        Formula::CoopR(a, Box::new(lhs), Box::new(rhs))
    }

    /// `<<A>> F f`, i.e. `<<A>> (true U f)`.
    pub fn eventually(a: AgentSet, f: Formula) -> Formula {
        Formula::until(a, Formula::True, f)
    }

    /// `<<A>> G f`, i.e. `<<A>> (false R f)`.
    pub fn always(a: AgentSet, f: Formula) -> Formula {
        Formula::release(a, Formula::False, f)
    }

    pub fn is_strategic(&self) -> bool {
        matches!(
            self,
            Formula::CoopX(..) | Formula::CoopU(..) | Formula::CoopR(..)
        )
    }

    pub fn coalition(&self) -> Option<&AgentSet> {
        match self {
            Formula::CoopX(a, _) | Formula::CoopU(a, _, _) | Formula::CoopR(a, _, _) => Some(a),
            _ => None,
        }
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::False | Formula::Prop(_) => vec![],
            Formula::Not(f) | Formula::CoopX(_, f) => vec![f],
            Formula::Or(l, r) | Formula::CoopU(_, l, r) | Formula::CoopR(_, l, r) => vec![l, r],
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Largest agent number mentioned in any coalition.
    pub fn max_agent(&self) -> usize {
        let own = self
            .coalition()
            .and_then(|a| a.agents().last().copied())
            .unwrap_or(0);
        self.children()
            .iter()
            .map(|c| c.max_agent())
            .fold(own, usize::max)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

impl Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_formula(&text).map_err(serde::de::Error::custom)
    }
}

/// Canonical concrete syntax. Derived forms are never re-sugared, so
/// `parse_formula(&print_formula(f)) == f`.
pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_disj(f, &mut out);
    out
}

// disjunctions print left-associated without parentheses at top level
fn write_disj(f: &Formula, out: &mut String) {
    match f {
        Formula::Or(l, r) => {
            write_disj(l, out);
            out.push_str(" | ");
            write_unary(r, out);
        }
        _ => write_unary(f, out),
    }
}

fn write_unary(f: &Formula, out: &mut String) {
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Prop(p) => out.push_str(p),
        Formula::Not(g) => {
            out.push('~');
            write_unary(g, out);
        }
        Formula::Or(..) => {
            out.push('(');
            write_disj(f, out);
            out.push(')');
        }
        Formula::CoopX(a, g) => {
            out.push_str(&a.to_string());
            out.push_str(" X ");
            write_unary(g, out);
        }
        Formula::CoopU(a, l, r) | Formula::CoopR(a, l, r) => {
            let op = if matches!(f, Formula::CoopU(..)) { "U" } else { "R" };
            out.push_str(&a.to_string());
            out.push_str(" (");
            write_disj(l, out);
            out.push(' ');
            out.push_str(op);
            out.push(' ');
            write_disj(r, out);
            out.push(')');
        }
    }
}

/// Duplicate-free post-order listing: every child precedes its parent.
pub fn subformulas(f: &Formula) -> Vec<Formula> {
    fn visit(f: &Formula, seen: &mut HashMap<Formula, usize>, out: &mut Vec<Formula>) {
        if seen.contains_key(f) {
            return;
        }
        for c in f.children() {
            visit(c, seen, out);
        }
        seen.insert(f.clone(), out.len());
        out.push(f.clone());
    }
    let mut seen = HashMap::new();
    let mut out = Vec::new();
    visit(f, &mut seen, &mut out);
    out
}

/// `U^n_A(psi, theta)`: `U^0 = theta`, `U^{n+1} = theta | (psi & <<A>> X U^n)`.
pub fn unfold_until(coalition: &AgentSet, psi: &Formula, theta: &Formula, n: usize) -> Formula {
    let mut acc = theta.clone();
    for _ in 0..n {
        acc = Formula::or(
            theta.clone(),
            Formula::and(psi.clone(), Formula::next(coalition.clone(), acc)),
        );
    }
    acc
}

/// `G^n_A(theta)`: `G^0 = theta`, `G^{n+1} = theta & <<A>> X G^n`.
pub fn unfold_always(coalition: &AgentSet, theta: &Formula, n: usize) -> Formula {
    let mut acc = theta.clone();
    for _ in 0..n {
        acc = Formula::and(theta.clone(), Formula::next(coalition.clone(), acc));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::prop("p")
    }
    fn q() -> Formula {
        Formula::prop("q")
    }

    #[test]
    fn print_examples() {
        assert_eq!(print_formula(&p()), "p");
        assert_eq!(
            print_formula(&Formula::eventually(AgentSet::empty(), p())),
            "<<>> (true U p)"
        );
        assert_eq!(print_formula(&Formula::not(Formula::or(p(), q()))), "~(p | q)");
        assert_eq!(
            print_formula(&Formula::or(p(), Formula::or(q(), p()))),
            "p | (q | p)"
        );
    }

    #[test]
    fn unfold_until_examples() {
        let a = AgentSet::new([1]);
        assert_eq!(unfold_until(&a, &p(), &q(), 0), q());
        assert_eq!(
            unfold_until(&a, &p(), &q(), 1),
            Formula::or(q(), Formula::and(p(), Formula::next(a.clone(), q())))
        );
        let inner = Formula::or(q(), Formula::and(p(), Formula::next(a.clone(), q())));
        assert_eq!(
            unfold_until(&a, &p(), &q(), 2),
            Formula::or(q(), Formula::and(p(), Formula::next(a.clone(), inner)))
        );
    }

    #[test]
    fn unfold_always_examples() {
        let a = AgentSet::new([2]);
        assert_eq!(unfold_always(&a, &p(), 0), p());
        let g1 = Formula::and(p(), Formula::next(a.clone(), p()));
        assert_eq!(unfold_always(&a, &p(), 1), g1);
        assert_eq!(
            unfold_always(&a, &p(), 2),
            Formula::and(p(), Formula::next(a.clone(), g1))
        );
    }

    #[test]
    fn unfold_size_is_linear() {
        let a = AgentSet::new([1]);
        let sizes: Vec<usize> = (0..6).map(|n| unfold_until(&a, &p(), &q(), n).size()).collect();
        let step = sizes[1] - sizes[0];
        assert!(sizes.windows(2).all(|w| w[1] - w[0] == step));
        let sizes: Vec<usize> = (0..6).map(|n| unfold_always(&a, &p(), n).size()).collect();
        let step = sizes[1] - sizes[0];
        assert!(sizes.windows(2).all(|w| w[1] - w[0] == step));
    }

    #[test]
    fn subformula_order() {
        assert_eq!(subformulas(&p()), vec![p()]);
        assert_eq!(
            subformulas(&Formula::or(p(), q())),
            vec![p(), q(), Formula::or(p(), q())]
        );
        let u = Formula::until(AgentSet::new([1]), p(), q());
        assert_eq!(subformulas(&u), vec![p(), q(), u.clone()]);
        // shared children appear once
        let f = Formula::or(p(), Formula::not(p()));
        assert_eq!(subformulas(&f), vec![p(), Formula::not(p()), f.clone()]);
    }

    #[test]
    fn complement_against_model_agents() {
        assert_eq!(AgentSet::new([2]).complement(3), AgentSet::new([1, 3]));
        assert_eq!(AgentSet::new([3, 1, 3]).agents(), &[1, 3]);
    }
}
