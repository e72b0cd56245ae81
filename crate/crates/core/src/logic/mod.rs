//! The two-level probabilistic modal logic: state formulas `φ` and
//! measure formulas `ψ`, plus the finitary multi-constraint modality.
//!
//! ```text
//! φ ::= T | φ & φ | <a> ψ | <a>[ ⋈ q φ , ... ]      (⋈ ∈ {>, <})
//! ψ ::= ψ \/ ψ | !ψ | [φ]>=q | [φ]>q | [φ]<q | [φ]<=q
//! ```
//!
//! Formulas refer to labels by name; they are plain values independent of
//! any model. `Display` prints the concrete syntax accepted by
//! [`crate::text::parse_formula`].

mod eval;
mod search;
mod synth;

use std::fmt;

pub use eval::{eval_measure, eval_state, expand_bounds, expand_state_bounds, satisfies};
pub use search::{finitary_denotations, single_constraint_search, SearchOutcome};
pub use synth::{distinguish, logical_equivalence, Distinction, EquivalenceReport, Fragment};

use crate::error::{domain, Result};
use crate::rational::{format_rational, in_unit_interval, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cmp {
    Greater,
    Less,
}

impl Cmp {
    pub fn holds(self, value: &Rational, threshold: &Rational) -> bool {
        match self {
            Cmp::Greater => value > threshold,
            Cmp::Less => value < threshold,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Cmp::Greater => ">",
            Cmp::Less => "<",
        }
    }
}

/// One bound `⋈ q φ` of the multi-constraint modality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub cmp: Cmp,
    pub threshold: Rational,
    pub formula: StateFormula,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StateFormula {
    Top,
    And(Box<StateFormula>, Box<StateFormula>),
    Diamond(String, Box<MeasureFormula>),
    /// `⟨a⟩[⋈₁ q₁ φ₁, …, ⋈ₙ qₙ φₙ]`: a single transition satisfies every
    /// bound. Shorthand for `⟨a⟩ ⋀ᵢ [φᵢ]⋈ᵢqᵢ`.
    DiamondMulti(String, Vec<Constraint>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MeasureFormula {
    /// Finite disjunction; the empty disjunction is false.
    Or(Vec<MeasureFormula>),
    Not(Box<MeasureFormula>),
    AtLeast(Box<StateFormula>, Rational),
    /// Sugar for a disjunction of `AtLeast` over thresholds above `r`.
    Greater(Box<StateFormula>, Rational),
    /// Sugar for `¬[φ]≥r`.
    Less(Box<StateFormula>, Rational),
    /// Sugar for `¬[φ]>r`.
    AtMost(Box<StateFormula>, Rational),
}

fn check_threshold(q: &Rational) -> Result<()> {
    if !in_unit_interval(q) {
        return Err(domain(format!(
            "threshold {} outside [0,1]",
            format_rational(q)
        )));
    }
    Ok(())
}

impl StateFormula {
    pub fn and(left: StateFormula, right: StateFormula) -> Self {
        StateFormula::And(Box::new(left), Box::new(right))
    }

    /// Left-nested conjunction; `T` when empty.
    pub fn conjunction<I: IntoIterator<Item = StateFormula>>(parts: I) -> Self {
        parts
            .into_iter()
            .reduce(StateFormula::and)
            .unwrap_or(StateFormula::Top)
    }

    pub fn diamond(label: impl Into<String>, body: MeasureFormula) -> Self {
        StateFormula::Diamond(label.into(), Box::new(body))
    }

    pub fn multi(label: impl Into<String>, constraints: Vec<Constraint>) -> Result<Self> {
        if constraints.is_empty() {
            return Err(domain(
                "the multi-constraint modality needs at least one bound",
            ));
        }
        for c in &constraints {
            check_threshold(&c.threshold)?;
        }
        Ok(StateFormula::DiamondMulti(label.into(), constraints))
    }

    /// Rewrites every multi-constraint modality into a plain diamond over a
    /// conjunction of strict bounds.
    pub fn expand_multi(&self) -> StateFormula {
        match self {
            StateFormula::Top => StateFormula::Top,
            StateFormula::And(l, r) => StateFormula::and(l.expand_multi(), r.expand_multi()),
            StateFormula::Diamond(a, psi) => StateFormula::diamond(a.clone(), psi.expand_multi()),
            StateFormula::DiamondMulti(a, cs) => {
                let bounds = cs.iter().map(|c| {
                    let phi = Box::new(c.formula.expand_multi());
                    match c.cmp {
                        Cmp::Greater => MeasureFormula::Greater(phi, c.threshold.clone()),
                        Cmp::Less => MeasureFormula::Less(phi, c.threshold.clone()),
                    }
                });
                StateFormula::diamond(a.clone(), MeasureFormula::all(bounds))
            }
        }
    }

    /// Modal depth.
    pub fn depth(&self) -> usize {
        match self {
            StateFormula::Top => 0,
            StateFormula::And(l, r) => l.depth().max(r.depth()),
            StateFormula::Diamond(_, psi) => 1 + psi.depth(),
            StateFormula::DiamondMulti(_, cs) => {
                1 + cs.iter().map(|c| c.formula.depth()).max().unwrap_or(0)
            }
        }
    }

    /// True iff the formula lies in the finitary fragment (built from `T`,
    /// `&` and the multi-constraint modality only).
    pub fn is_finitary(&self) -> bool {
        match self {
            StateFormula::Top => true,
            StateFormula::And(l, r) => l.is_finitary() && r.is_finitary(),
            StateFormula::Diamond(..) => false,
            StateFormula::DiamondMulti(_, cs) => cs.iter().all(|c| c.formula.is_finitary()),
        }
    }

    /// Number of bounds in a top-level multi-constraint modality.
    pub fn constraint_count(&self) -> Option<usize> {
        match self {
            StateFormula::DiamondMulti(_, cs) => Some(cs.len()),
            _ => None,
        }
    }
}

impl MeasureFormula {
    pub fn at_least(phi: StateFormula, q: Rational) -> Self {
        MeasureFormula::AtLeast(Box::new(phi), q)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(psi: MeasureFormula) -> Self {
        MeasureFormula::Not(Box::new(psi))
    }

    /// Conjunction through De Morgan: `¬(¬ψ₁ ∨ … ∨ ¬ψₙ)`.
    pub fn all<I: IntoIterator<Item = MeasureFormula>>(parts: I) -> Self {
        MeasureFormula::not(MeasureFormula::Or(
            parts.into_iter().map(MeasureFormula::not).collect(),
        ))
    }

    pub fn depth(&self) -> usize {
        match self {
            MeasureFormula::Or(ps) => ps.iter().map(MeasureFormula::depth).max().unwrap_or(0),
            MeasureFormula::Not(p) => p.depth(),
            MeasureFormula::AtLeast(phi, _)
            | MeasureFormula::Greater(phi, _)
            | MeasureFormula::Less(phi, _)
            | MeasureFormula::AtMost(phi, _) => phi.depth(),
        }
    }

    fn expand_multi(&self) -> MeasureFormula {
        match self {
            MeasureFormula::Or(ps) => {
                MeasureFormula::Or(ps.iter().map(MeasureFormula::expand_multi).collect())
            }
            MeasureFormula::Not(p) => MeasureFormula::not(p.expand_multi()),
            MeasureFormula::AtLeast(phi, q) => {
                MeasureFormula::AtLeast(Box::new(phi.expand_multi()), q.clone())
            }
            MeasureFormula::Greater(phi, q) => {
                MeasureFormula::Greater(Box::new(phi.expand_multi()), q.clone())
            }
            MeasureFormula::Less(phi, q) => {
                MeasureFormula::Less(Box::new(phi.expand_multi()), q.clone())
            }
            MeasureFormula::AtMost(phi, q) => {
                MeasureFormula::AtMost(Box::new(phi.expand_multi()), q.clone())
            }
        }
    }
}

impl fmt::Display for StateFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateFormula::Top => write!(f, "T"),
            StateFormula::And(l, r) => {
                write!(f, "{l} & ")?;
                if matches!(**r, StateFormula::And(..)) {
                    write!(f, "({r})")
                } else {
                    write!(f, "{r}")
                }
            }
            StateFormula::Diamond(a, psi) => {
                write!(f, "<{a}> ")?;
                write_measure_unary(f, psi)
            }
            StateFormula::DiamondMulti(a, cs) => {
                write!(f, "<{a}>[ ")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " , ")?;
                    }
                    write!(
                        f,
                        "{}{} {}",
                        c.cmp.symbol(),
                        format_rational(&c.threshold),
                        c.formula
                    )?;
                }
                write!(f, " ]")
            }
        }
    }
}

fn write_measure_unary(f: &mut fmt::Formatter<'_>, psi: &MeasureFormula) -> fmt::Result {
    match psi {
        MeasureFormula::Or(ps) if ps.len() == 1 => write_measure_unary(f, &ps[0]),
        MeasureFormula::Or(_) => write!(f, "({psi})"),
        _ => write!(f, "{psi}"),
    }
}

impl fmt::Display for MeasureFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // The empty disjunction is false; `[T]>=0` holds for every measure.
            MeasureFormula::Or(ps) if ps.is_empty() => write!(f, "![T]>=0"),
            MeasureFormula::Or(ps) => {
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        write!(f, " \\/ ")?;
                    }
                    write_measure_unary(f, p)?;
                }
                Ok(())
            }
            MeasureFormula::Not(p) => {
                write!(f, "!")?;
                write_measure_unary(f, p)
            }
            MeasureFormula::AtLeast(phi, q) => write!(f, "[{phi}]>={}", format_rational(q)),
            MeasureFormula::Greater(phi, q) => write!(f, "[{phi}]>{}", format_rational(q)),
            MeasureFormula::Less(phi, q) => write!(f, "[{phi}]<{}", format_rational(q)),
            MeasureFormula::AtMost(phi, q) => write!(f, "[{phi}]<={}", format_rational(q)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn phi_x() -> StateFormula {
        StateFormula::diamond("b", MeasureFormula::at_least(StateFormula::Top, int(1)))
    }

    #[test]
    fn display_concrete_syntax() {
        assert_eq!(phi_x().to_string(), "<b> [T]>=1");
        let multi = StateFormula::multi(
            "a",
            vec![
                Constraint {
                    cmp: Cmp::Greater,
                    threshold: ratio(1, 4),
                    formula: phi_x(),
                },
                Constraint {
                    cmp: Cmp::Less,
                    threshold: ratio(3, 4),
                    formula: phi_x(),
                },
            ],
        )
        .unwrap();
        assert_eq!(
            multi.to_string(),
            "<a>[ >1/4 <b> [T]>=1 , <3/4 <b> [T]>=1 ]"
        );
        let conj = StateFormula::and(
            StateFormula::Top,
            StateFormula::and(phi_x(), StateFormula::Top),
        );
        assert_eq!(conj.to_string(), "T & (<b> [T]>=1 & T)");
        let or = StateFormula::diamond(
            "a",
            MeasureFormula::Or(vec![
                MeasureFormula::at_least(StateFormula::Top, int(1)),
                MeasureFormula::not(MeasureFormula::at_least(StateFormula::Top, int(1))),
            ]),
        );
        assert_eq!(or.to_string(), "<a> ([T]>=1 \\/ ![T]>=1)");
    }

    #[test]
    fn multi_requires_bounds_in_unit_interval() {
        assert!(StateFormula::multi("a", vec![]).is_err());
        let bad = Constraint {
            cmp: Cmp::Greater,
            threshold: ratio(3, 2),
            formula: StateFormula::Top,
        };
        assert!(StateFormula::multi("a", vec![bad]).is_err());
    }

    #[test]
    fn depth_and_fragment() {
        let multi = StateFormula::multi(
            "a",
            vec![Constraint {
                cmp: Cmp::Greater,
                threshold: int(0),
                formula: StateFormula::Top,
            }],
        )
        .unwrap();
        assert_eq!(multi.depth(), 1);
        assert!(multi.is_finitary());
        assert!(!phi_x().is_finitary());
        assert_eq!(multi.expand_multi().depth(), 1);
        assert!(!multi.expand_multi().is_finitary());
    }
}
