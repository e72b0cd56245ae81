use crate::error::{domain, precondition, Result};
use crate::logic::{MeasureFormula, StateFormula};
use crate::model::Nlmp;
use crate::rational::Rational;
use crate::stateset::StateSet;

/// `⟦φ⟧`. The model must be valid; the result is always measurable.
pub fn eval_state(m: &Nlmp, phi: &StateFormula) -> Result<StateSet> {
    m.require_valid()?;
    state(m, phi)
}

/// `⟦ψ⟧` as a subset of the model's measure pool.
pub fn eval_measure(m: &Nlmp, psi: &MeasureFormula) -> Result<StateSet> {
    m.require_valid()?;
    measure(m, psi)
}

/// `s ⊨ φ`, with `s` a state index.
pub fn satisfies(m: &Nlmp, s: usize, phi: &StateFormula) -> Result<bool> {
    if s >= m.num_states() {
        return Err(domain(format!("unknown state index {s}")));
    }
    Ok(eval_state(m, phi)?.contains(s))
}

pub(crate) fn state(m: &Nlmp, phi: &StateFormula) -> Result<StateSet> {
    let out = match phi {
        StateFormula::Top => StateSet::full(m.num_states()),
        StateFormula::And(l, r) => state(m, l)?.intersection(&state(m, r)?),
        StateFormula::Diamond(a, psi) => {
            let a = m.label_index(a)?;
            m.hit_preimage(a, &measure(m, psi)?)?
        }
        StateFormula::DiamondMulti(a, cs) => {
            let a = m.label_index(a)?;
            let mut xi = StateSet::full(m.pool().len());
            for c in cs {
                let target = state(m, &c.formula)?;
                for i in 0..m.pool().len() {
                    if xi.contains(i) && !c.cmp.holds(&m.pool().get(i).eval(&target)?, &c.threshold)
                    {
                        xi.remove(i);
                    }
                }
            }
            m.hit_preimage(a, &xi)?
        }
    };
    if !m.sigma().is_measurable(&out)? {
        return Err(precondition(format!(
            "denotation of `{phi}` is not measurable; the model is not a valid NLMP"
        )));
    }
    Ok(out)
}

/// Pool measures whose value on `⟦φ⟧` satisfies `keep`.
fn select(m: &Nlmp, phi: &StateFormula, keep: impl Fn(&Rational) -> bool) -> Result<StateSet> {
    let target = state(m, phi)?;
    let mut out = StateSet::empty(m.pool().len());
    for (i, mu) in m.pool().iter().enumerate() {
        if keep(&mu.eval(&target)?) {
            out.insert(i);
        }
    }
    Ok(out)
}

pub(crate) fn measure(m: &Nlmp, psi: &MeasureFormula) -> Result<StateSet> {
    match psi {
        MeasureFormula::Or(ps) => {
            let mut out = StateSet::empty(m.pool().len());
            for p in ps {
                out.union_with(&measure(m, p)?);
            }
            Ok(out)
        }
        MeasureFormula::Not(p) => Ok(measure(m, p)?.complement()),
        MeasureFormula::AtLeast(phi, q) => select(m, phi, |v| v >= q),
        MeasureFormula::Greater(phi, q) => select(m, phi, |v| v > q),
        MeasureFormula::Less(phi, q) => select(m, phi, |v| v < q),
        MeasureFormula::AtMost(phi, q) => select(m, phi, |v| v <= q),
    }
}

/// Rewrites the derived bounds `>`, `<`, `<=` into the core connectives,
/// relative to the model's pool: `[φ]>r` becomes the finite disjunction of
/// `[φ]>=q` over the pool values `q > r` of `⟦φ⟧`, `[φ]<r` becomes
/// `![φ]>=r` and `[φ]<=r` becomes `!([φ]>r)`.
pub fn expand_bounds(m: &Nlmp, psi: &MeasureFormula) -> Result<MeasureFormula> {
    let expand_state = |phi: &StateFormula| expand_state_bounds(m, phi);
    Ok(match psi {
        MeasureFormula::Or(ps) => MeasureFormula::Or(
            ps.iter()
                .map(|p| expand_bounds(m, p))
                .collect::<Result<_>>()?,
        ),
        MeasureFormula::Not(p) => MeasureFormula::not(expand_bounds(m, p)?),
        MeasureFormula::AtLeast(phi, q) => MeasureFormula::at_least(expand_state(phi)?, q.clone()),
        MeasureFormula::Greater(phi, r) => greater_as_disjunction(m, &expand_state(phi)?, r)?,
        MeasureFormula::Less(phi, r) => {
            MeasureFormula::not(MeasureFormula::at_least(expand_state(phi)?, r.clone()))
        }
        MeasureFormula::AtMost(phi, r) => {
            MeasureFormula::not(greater_as_disjunction(m, &expand_state(phi)?, r)?)
        }
    })
}

fn greater_as_disjunction(m: &Nlmp, phi: &StateFormula, r: &Rational) -> Result<MeasureFormula> {
    let target = state(m, phi)?;
    let mut values: Vec<Rational> = Vec::new();
    for mu in m.pool().iter() {
        let v = mu.eval(&target)?;
        if &v > r && !values.contains(&v) {
            values.push(v);
        }
    }
    values.sort();
    Ok(MeasureFormula::Or(
        values
            .into_iter()
            .map(|q| MeasureFormula::at_least(phi.clone(), q))
            .collect(),
    ))
}

/// [`expand_bounds`] applied inside every diamond of a state formula.
pub fn expand_state_bounds(m: &Nlmp, phi: &StateFormula) -> Result<StateFormula> {
    Ok(match phi {
        StateFormula::Top => StateFormula::Top,
        StateFormula::And(l, r) => {
            StateFormula::and(expand_state_bounds(m, l)?, expand_state_bounds(m, r)?)
        }
        StateFormula::Diamond(a, psi) => StateFormula::diamond(a.clone(), expand_bounds(m, psi)?),
        StateFormula::DiamondMulti(..) => expand_state_bounds(m, &phi.expand_multi())?,
    })
}
