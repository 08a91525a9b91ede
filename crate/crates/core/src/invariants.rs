//! Conjugate distances, j-invariants and the derivative invariants `ε, I, b`.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::algebra::{rat_int, resultant, Elem, Poly, Rat};
use crate::maclane::{chain_eval, AugmentedChain};
use crate::newton::{root_valuations, NewtonError, RootValuations};
use crate::random::Sampler;
use crate::tower::{Tower, TowerError};
use crate::value::Value;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum InvariantError {
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error(transparent)]
    Newton(#[from] NewtonError),
    #[error("element is inseparable over the base")]
    Inseparable,
    #[error("element lies in the base field")]
    BaseElement,
    #[error("polynomial lies in the support of the valuation")]
    SupportPolynomial,
    #[error("every derivative has infinite value")]
    NoFiniteDerivativeValue,
    #[error("polynomial must be non-constant")]
    ConstantPolynomial,
    #[error("polynomial must be nonzero")]
    ZeroPolynomial,
}

/// The multiset `{v(a − a′)}` over conjugates `a′ ≠ a` and what it determines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceProfile {
    pub minpoly: Poly,
    pub degree: usize,
    pub multiset: RootValuations,
    /// Distinct distances, decreasing.
    pub s_set: Vec<Value>,
    pub omega: Value,
    pub value_of_a: Value,
}

/// Distances between `a` and its conjugates, read off `Q(X + a)/X`.
pub fn distances(tower: &Tower, a: &Elem) -> Result<DistanceProfile, InvariantError> {
    let k = tower.base().field();
    let q = tower.min_poly(a)?;
    let n = q.degree().expect("nonzero");
    if n == 1 {
        return Err(InvariantError::BaseElement);
    }
    if q.derivative(k).is_zero() {
        return Err(InvariantError::Inseparable);
    }
    let shifted = tower.shifted(&q, a);
    let values = tower.coefficient_values(&shifted)?;
    debug_assert_eq!(values[0], Value::Infinity);
    let multiset = root_valuations(&values[1..])?;
    let s_set: Vec<Value> = multiset.entries.iter().map(|e| e.0.clone()).collect();
    let omega = s_set[0].clone();
    let value_of_a = tower.valuation(a)?;
    Ok(DistanceProfile { minpoly: q, degree: n, multiset, s_set, omega, value_of_a })
}

/// Root values of `f(X + a)`, i.e. the multiset `{v(z − a)}` over the roots `z` of `f`.
pub fn root_contacts(tower: &Tower, f: &Poly, a: &Elem) -> Result<RootValuations, InvariantError> {
    let shifted = tower.shifted(f, a);
    Ok(root_valuations(&tower.coefficient_values(&shifted)?)?)
}

/// `#{roots z of f : v(a − z) ≥ γ}` with multiplicity.
pub fn j_invariant(tower: &Tower, f: &Poly, a: &Elem, gamma: &Value) -> Result<usize, InvariantError> {
    match f.degree() {
        None => Err(InvariantError::ZeroPolynomial),
        Some(0) => Ok(0),
        Some(_) => Ok(root_contacts(tower, f, a)?.count_at_least(gamma)),
    }
}

/// `∂_s f`.
pub fn hasse_schmidt(f: &Poly, s: usize, tower: &Tower) -> Poly {
    f.hasse_schmidt(s, tower.base().field())
}

/// Valuations on `K[x]` used by the derivative invariants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolyValuation {
    /// `f ↦ v(f(a))`.
    Point(Elem),
    /// `v_{a,γ}` with `w(X − z) = min(γ, v(a − z))`.
    Pair(Elem, Value),
    /// `Σ c_i X^i ↦ min v(c_i) + iγ`.
    Gauss(Value),
    /// `f ↦ min μ(f_i q^i)` on the `q`-expansion.
    Truncation(Poly, Box<PolyValuation>),
    Chain(AugmentedChain),
}

impl PolyValuation {
    pub fn eval(&self, tower: &Tower, f: &Poly) -> Result<Value, InvariantError> {
        if f.is_zero() {
            return Ok(Value::Infinity);
        }
        let base = tower.base();
        match self {
            PolyValuation::Point(a) => Ok(tower.valuation(&tower.evaluate(f, a))?),
            PolyValuation::Pair(a, gamma) => pair_eval(tower, a, gamma, f),
            PolyValuation::Gauss(gamma) => Ok(f
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| base.value(c) + gamma.times(i as i64))
                .min()
                .expect("nonzero")),
            PolyValuation::Truncation(q, inner) => truncation_eval(tower, q, inner, f),
            PolyValuation::Chain(chain) => Ok(chain_eval(base, chain, f)),
        }
    }

    /// `μ̄(x − z)` over the roots `z` of `f`, for kinds whose extension to `K̄[x]` is explicit.
    fn root_contact_max(&self, tower: &Tower, f: &Poly) -> Result<Option<Value>, InvariantError> {
        let first = |r: RootValuations| r.entries[0].0.clone();
        Ok(match self {
            PolyValuation::Point(a) => Some(first(root_contacts(tower, f, a)?)),
            PolyValuation::Pair(a, gamma) => Some(first(root_contacts(tower, f, a)?).min(gamma.clone())),
            PolyValuation::Gauss(gamma) => {
                let values: Vec<Value> = f.coeffs().iter().map(|c| tower.base().value(c)).collect();
                Some(first(root_valuations(&values)?).min(gamma.clone()))
            }
            _ => None,
        })
    }
}

/// `w(f) = v(lc f) + Σ min(γ, v(z − a))` over the roots `z` of `f`.
pub fn pair_eval(tower: &Tower, a: &Elem, gamma: &Value, f: &Poly) -> Result<Value, InvariantError> {
    let base = tower.base();
    let lc = base.value(f.lc().ok_or(InvariantError::ZeroPolynomial)?);
    if f.degree() == Some(0) {
        return Ok(lc);
    }
    let contacts = root_contacts(tower, f, a)?;
    Ok(contacts
        .entries
        .iter()
        .fold(lc, |acc, (v, m)| acc + v.clone().min(gamma.clone()).times(*m as i64)))
}

/// `μ_q(f) = min μ(f_i q^i)` over the `q`-adic expansion of `f`.
pub fn truncation_eval(tower: &Tower, q: &Poly, mu: &PolyValuation, f: &Poly) -> Result<Value, InvariantError> {
    if f.is_zero() {
        return Ok(Value::Infinity);
    }
    let k = tower.base().field();
    let parts = f.expand(q, k).map_err(TowerError::from)?;
    let mq = mu.eval(tower, q)?;
    let mut best = Value::Infinity;
    for (i, part) in parts.iter().enumerate() {
        if part.is_zero() {
            continue;
        }
        best = best.min(mu.eval(tower, part)? + mq.times(i as i64));
    }
    Ok(best)
}

/// `ε_μ(f)`, its argmax set `I_μ(f)` and `b = min I_μ(f)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsilonReport {
    pub epsilon: Rat,
    pub argmax: Vec<usize>,
    pub b: usize,
    /// `(s, μ(∂_s f), (μ(f) − μ(∂_s f))/s)` with `None` for infinite `μ(∂_s f)`.
    pub per_s: Vec<(usize, Value, Option<Rat>)>,
    pub mu_f: Rat,
    /// Maximal root contact `max μ̄(x − z)` when the roots are reachable.
    pub root_contact: Option<Value>,
}

impl EpsilonReport {
    /// Whether `ε` agrees with the maximal root contact (when available).
    pub fn cross_check(&self) -> Option<bool> {
        self.root_contact.as_ref().map(|c| *c == Value::Finite(self.epsilon.clone()))
    }
}

pub fn epsilon_report(tower: &Tower, mu: &PolyValuation, f: &Poly) -> Result<EpsilonReport, InvariantError> {
    let n = match f.degree() {
        None => return Err(InvariantError::ZeroPolynomial),
        Some(0) => return Err(InvariantError::ConstantPolynomial),
        Some(n) => n,
    };
    let mu_f = match mu.eval(tower, f)? {
        Value::Finite(r) => r,
        Value::Infinity => return Err(InvariantError::SupportPolynomial),
    };
    let mut per_s = Vec::with_capacity(n);
    for s in 1..=n {
        let d = hasse_schmidt(f, s, tower);
        let v = mu.eval(tower, &d)?;
        let quotient = v.finite().map(|r| (&mu_f - r) / rat_int(s as i64));
        per_s.push((s, v, quotient));
    }
    let epsilon = per_s
        .iter()
        .filter_map(|p| p.2.clone())
        .max()
        .ok_or(InvariantError::NoFiniteDerivativeValue)?;
    let argmax: Vec<usize> = per_s.iter().filter(|p| p.2.as_ref() == Some(&epsilon)).map(|p| p.0).collect();
    let b = argmax[0];
    let root_contact = mu.root_contact_max(tower, f)?;
    Ok(EpsilonReport { epsilon, argmax, b, per_s, mu_f, root_contact })
}

/// The points `(b, μ(∂_b f))` for `0 ≤ b ≤ deg f`, infinite ones included.
pub fn derivative_points(tower: &Tower, mu: &PolyValuation, f: &Poly) -> Result<Vec<(usize, Value)>, InvariantError> {
    let n = f.degree().ok_or(InvariantError::ZeroPolynomial)?;
    (0..=n).map(|b| Ok((b, mu.eval(tower, &hasse_schmidt(f, b, tower))?))).collect()
}

/// Outcome of the abstract key polynomial falsifier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KeyCheck {
    Certified { checked: usize },
    Refuted { witness: Poly },
}

/// Sample coefficients for exhaustive checks: `±1, ±t, ±1/t` and `±u` when present, then `0`.
pub fn sample_coefficients(tower: &Tower) -> Vec<Elem> {
    let base = tower.base();
    let k = base.field();
    let pi = base.uniformizer_pow(1);
    let mut atoms = Vec::from([k.one(), pi.clone(), k.inv(&pi).expect("unit")]);
    if let Some(u) = k.base().and_then(|c| c.generator()) {
        atoms.push(k.embed(&u));
    }
    let mut out = Vec::new();
    for a in atoms {
        out.push(k.neg(&a));
        out.push(a);
    }
    out.dedup();
    out.push(k.zero());
    out
}

/// Cap on exhaustively enumerated candidates.
const EXHAUSTIVE_LIMIT: usize = 20_000;

/// Tests `deg f < deg q ⟹ ε_μ(f) < ε_μ(q)` on all small monic `f` over the sample set,
/// then on `trials` random ones.
pub fn abstract_key_check(
    tower: &Tower,
    q: &Poly,
    mu: &PolyValuation,
    trials: usize,
    sampler: &mut Sampler,
) -> Result<KeyCheck, InvariantError> {
    let k = tower.base().field();
    let n = q.degree().ok_or(InvariantError::ZeroPolynomial)?;
    if n <= 1 {
        return Ok(KeyCheck::Certified { checked: 0 });
    }
    let eps_q = Value::Finite(epsilon_report(tower, mu, q)?.epsilon);
    let below = |f: &Poly| -> Result<bool, InvariantError> {
        match epsilon_report(tower, mu, f) {
            Ok(r) => Ok(Value::Finite(r.epsilon) < eps_q),
            // f in the support of μ has a root at the centre: ε(f) is maximal
            Err(InvariantError::SupportPolynomial) => Ok(false),
            Err(e) => Err(e),
        }
    };
    let sample = sample_coefficients(tower);
    let mut checked = 0;
    for d in 1..n {
        let count = sample.len().checked_pow(d as u32).unwrap_or(usize::MAX);
        if checked + count > EXHAUSTIVE_LIMIT {
            break;
        }
        for idx in 0..count {
            let mut coeffs = Vec::with_capacity(d + 1);
            let mut m = idx;
            for _ in 0..d {
                coeffs.push(sample[m % sample.len()].clone());
                m /= sample.len();
            }
            coeffs.push(k.one());
            let f = Poly::from_coeffs(coeffs);
            checked += 1;
            if !below(&f)? {
                return Ok(KeyCheck::Refuted { witness: f });
            }
        }
    }
    for _ in 0..trials {
        let d = 1 + sampler.below(n - 1);
        let mut f = sampler.base_poly(tower.base(), d, 2);
        f = f.add(&Poly::monomial(k.one(), d, k), k).sub(
            &Poly::monomial(f.coeff(d, k), d, k),
            k,
        );
        checked += 1;
        if !below(&f)? {
            return Ok(KeyCheck::Refuted { witness: f });
        }
    }
    Ok(KeyCheck::Certified { checked })
}

/// Value of `Σ c_i b^i` against `min v(c_i b^i)`, where `q` is the minimal
/// polynomial of `b`: the sum is `f(b)` with `f = Σ c_i X^i`, and its norm to `K`
/// is `Res(q, f)`. The value never drops below the minimum, so a specialized
/// upper bound that meets it settles equality without the resultant.
pub fn basis_defect(
    tower: &Tower,
    q: &Poly,
    b: &Elem,
    value_of_b: &Value,
    coeffs: &[Elem],
) -> Result<(Value, Value), InvariantError> {
    let base = tower.base();
    let k = base.field();
    let mut min = Value::Infinity;
    for (i, c) in coeffs.iter().enumerate() {
        if !c.is_zero() {
            min = min.min(base.value(c) + value_of_b.times(i as i64));
        }
    }
    let f = Poly::from_coeffs(coeffs.to_vec());
    if f.is_zero() {
        return Ok((Value::Infinity, min));
    }
    if q.degree() == Some(tower.degree()) {
        let x = tower.evaluate(&f, b);
        if tower.valuation_at_most_by_specialization(&x, &min) {
            return Ok((min.clone(), min));
        }
    }
    let n = q.degree().ok_or(InvariantError::ZeroPolynomial)?;
    let norm = resultant(q, &f, k).map_err(TowerError::from)?;
    let value = match base.value(&norm) {
        Value::Finite(r) => Value::Finite(r / rat_int(n as i64)),
        Value::Infinity => return Err(InvariantError::Tower(TowerError::Reducible("minimal polynomial".into()))),
    };
    Ok((value, min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, Field};
    use crate::tower::BaseField;
    use alloc::vec;

    fn sqrt_t() -> Tower {
        let base = BaseField::t_adic(&Field::prime(3).unwrap(), "t").unwrap();
        let k = base.field().clone();
        let t = k.generator().unwrap();
        let q = Poly::from_coeffs(vec![k.neg(&t), k.zero(), k.one()]);
        Tower::new(base, vec![("s".into(), q)]).unwrap().certify(false, 64)
    }

    fn kpoly(tw: &Tower, cs: Vec<Elem>) -> Poly {
        let _ = tw;
        Poly::from_coeffs(cs)
    }

    #[test]
    fn sqrt_t_distances() {
        let tw = sqrt_t();
        let p = distances(&tw, &tw.generator(1)).unwrap();
        assert_eq!(p.multiset.entries, vec![(Value::frac(1, 2), 1)]);
        assert_eq!(p.s_set, vec![Value::frac(1, 2)]);
        assert_eq!(p.value_of_a, Value::frac(1, 2));
        let k = tw.base().field().clone();
        assert_eq!(distances(&tw, &tw.embed_base(&k.one())), Err(InvariantError::BaseElement));
    }

    #[test]
    fn epsilon_examples() {
        let tw = sqrt_t();
        let k = tw.base().field().clone();
        let t = k.generator().unwrap();
        let inv_t = k.inv(&t).unwrap();
        let g0 = PolyValuation::Gauss(Value::zero());
        let f = kpoly(&tw, vec![k.neg(&inv_t), k.from_i64(-1), k.zero(), k.one()]);
        let r = epsilon_report(&tw, &g0, &f).unwrap();
        assert_eq!((r.epsilon.clone(), r.argmax.clone(), r.b), (rat(-1, 3), vec![3], 3));
        assert_eq!(r.cross_check(), Some(true));
        let t2 = k.mul(&t, &t);
        let lin = Poly::linear(&t2, &k);
        let r = epsilon_report(&tw, &g0, &lin).unwrap();
        // gauss(0) caps the contact at 0 although the root has value 2
        assert_eq!((r.epsilon.clone(), r.argmax.clone()), (rat(0, 1), vec![1]));
        assert_eq!(r.cross_check(), Some(true));
        let r = epsilon_report(&tw, &PolyValuation::Gauss(Value::int(5)), &lin).unwrap();
        assert_eq!((r.epsilon, r.argmax, r.b), (rat(2, 1), vec![1], 1));
    }

    /// X² − t under gauss(0): the two-sided oracle (derivatives against root contacts).
    #[test]
    fn epsilon_quadratic_frozen() {
        let tw = sqrt_t();
        let k = tw.base().field().clone();
        let q = tw.levels()[0].minpoly.clone();
        let r = epsilon_report(&tw, &PolyValuation::Gauss(Value::zero()), &q).unwrap();
        assert_eq!((r.epsilon.clone(), r.argmax.clone(), r.b), (rat(0, 1), vec![1, 2], 1));
        // extension realized as a pair at the root with a large radius, capped at 0
        let pair = PolyValuation::Pair(tw.generator(1), Value::int(100));
        let contact = pair.root_contact_max(&tw, &q).unwrap().unwrap().min(Value::zero());
        assert_eq!(contact, Value::Finite(r.epsilon.clone()));
        let _ = k;
    }

    #[test]
    fn pair_and_truncation_examples() {
        let tw = sqrt_t();
        let k = tw.base().field().clone();
        let t = k.generator().unwrap();
        let s = tw.generator(1);
        // w = pair(0, 1), f = X² + tX
        let f = kpoly(&tw, vec![k.zero(), t.clone(), k.one()]);
        let zero = tw.embed_base(&k.zero());
        assert_eq!(pair_eval(&tw, &zero, &Value::int(1), &f).unwrap(), Value::int(2));
        let lin = Poly::linear(&k.one(), &k);
        assert_eq!(pair_eval(&tw, &s, &Value::int(3), &lin).unwrap(), Value::zero());
        let point = PolyValuation::Point(s.clone());
        let x = Poly::x(&k);
        let plus = kpoly(&tw, vec![t.clone(), k.zero(), k.one()]);
        assert_eq!(truncation_eval(&tw, &x, &point, &plus).unwrap(), Value::int(1));
        assert_eq!(point.eval(&tw, &plus).unwrap(), Value::int(1));
        let minus = tw.levels()[0].minpoly.clone();
        assert_eq!(truncation_eval(&tw, &x, &point, &minus).unwrap(), Value::int(1));
        assert_eq!(point.eval(&tw, &minus).unwrap(), Value::Infinity);
        assert_eq!(truncation_eval(&tw, &minus, &point, &minus).unwrap(), Value::Infinity);
        // pair with infinite radius is the point valuation
        let inf = PolyValuation::Pair(s, Value::Infinity);
        assert_eq!(inf.eval(&tw, &plus).unwrap(), point.eval(&tw, &plus).unwrap());
    }

    #[test]
    fn key_check_examples() {
        let tw = sqrt_t();
        let k = tw.base().field().clone();
        let t = k.generator().unwrap();
        let mut sampler = Sampler::new(0);
        let q = tw.levels()[0].minpoly.clone();
        let mu = PolyValuation::Pair(tw.generator(1), Value::int(1));
        assert!(matches!(
            abstract_key_check(&tw, &q, &mu, 20, &mut sampler).unwrap(),
            KeyCheck::Certified { .. }
        ));
        let red = Poly::linear(&k.one(), &k).mul(&Poly::linear(&t, &k), &k);
        let out = abstract_key_check(&tw, &red, &PolyValuation::Gauss(Value::zero()), 0, &mut sampler).unwrap();
        assert_eq!(out, KeyCheck::Refuted { witness: Poly::linear(&k.one(), &k) });
        let lin = Poly::linear(&t, &k);
        assert_eq!(
            abstract_key_check(&tw, &lin, &mu, 5, &mut sampler).unwrap(),
            KeyCheck::Certified { checked: 0 }
        );
    }
}
