//! Inductive valuations on `K[x]` and the MacLane approximation loop.
//!
//! The loop follows the Montes construction over a discretely valued base with
//! a finite residue field. Level `L` carries a key polynomial `φ_L` with value
//! `ν_L`; coefficients of `φ_L`-expansions have residues in the finite field
//! `κ_L`, built as a chain of explicit extensions of the base residue field.
//!
//! Monomials in the uniformizer and the key polynomials are integer exponent
//! vectors indexed `[π, φ_0, φ_1, …]`. `U_L` is a monomial of value `1/E_L`,
//! `M_{L+1}(γ) = U_L^{γ E_L}` turns values of `Γ_L = (1/E_L)Z` into monomials,
//! and `Y_L = φ_L^{e_L} / M_L(e_L ν_L)` has value zero; its residue is the
//! generator `z_L` of `κ_{L+1}` over `κ_L`.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::algebra::{rat_int, AlgebraError, Elem, Field, Poly, Rat};
use crate::newton::{lower_hull, NewtonError};
use crate::tower::BaseField;
use crate::value::Value;

/// Default cap on augmentations per branch.
pub const DEFAULT_MAX_ITERATIONS: usize = 64;

/// Residue factorizations enumerate at most this many candidates per degree.
const FACTOR_SEARCH_LIMIT: u64 = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum MacLaneError {
    #[error("polynomial is not square-free")]
    NotSquareFree,
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("residue field unsupported: {0}")]
    ResidueFieldUnsupported(String),
    #[error("iteration cap reached")]
    IterationCap,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Newton(#[from] NewtonError),
    #[error("tower: {0}")]
    Tower(String),
    #[error("inconsistent MacLane data: {0}")]
    Internal(String),
}

/// `μ_0 = Gauss(γ₀)` followed by augmentations `[μ; φ, ν]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugmentedChain {
    pub base_gamma: Value,
    pub steps: Vec<(Poly, Value)>,
}

impl AugmentedChain {
    pub fn gauss(gamma: Value) -> AugmentedChain {
        AugmentedChain { base_gamma: gamma, steps: Vec::new() }
    }

    pub fn current_degree(&self) -> usize {
        self.steps.last().and_then(|s| s.0.degree()).unwrap_or(1)
    }
}

/// Value of `f` under the chain, level by level on key-polynomial expansions.
pub fn chain_eval(base: &BaseField, chain: &AugmentedChain, f: &Poly) -> Value {
    eval_level(base, chain, chain.steps.len(), f)
}

fn eval_level(base: &BaseField, chain: &AugmentedChain, n: usize, f: &Poly) -> Value {
    if f.is_zero() {
        return Value::Infinity;
    }
    if n == 0 {
        return f
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| base.value(c) + chain.base_gamma.times(i as i64))
            .min()
            .expect("nonzero");
    }
    let (phi, nu) = &chain.steps[n - 1];
    let parts = f.expand(phi, base.field()).expect("monic key");
    parts
        .iter()
        .enumerate()
        .filter(|(_, a)| !a.is_zero())
        .map(|(j, a)| eval_level(base, chain, n - 1, a) + nu.times(j as i64))
        .min()
        .expect("nonzero")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DefectFlag {
    Defectless,
    DefectSuspected,
}

/// One level of a branch: key degree, relative ramification, residual degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameLevel {
    pub key_degree: usize,
    pub e: u64,
    pub f: u64,
}

/// One extension of the valuation to `K[x]/(Q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension {
    pub degree: usize,
    pub e: u64,
    pub f: u64,
    pub depth: usize,
    pub flag: DefectFlag,
    pub chain: AugmentedChain,
    pub frame: Vec<FrameLevel>,
    /// Best approximation in `K`: `(c, v(a − c))` maximal over `c ∈ K`.
    pub best_linear: Option<(Elem, Value)>,
}

impl Extension {
    pub fn is_defectless(&self) -> bool {
        self.flag == DefectFlag::Defectless
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MacLaneResult {
    pub extensions: Vec<Extension>,
}

impl MacLaneResult {
    pub fn extension_count(&self) -> usize {
        self.extensions.len()
    }
}

#[derive(Clone, Debug)]
struct Level {
    phi: Poly,
    nu: Rat,
    e: u64,
    /// `E_L`.
    big_e: u64,
    /// `[κ_{L+1} : κ_0]`.
    big_f: u64,
    psi_degree: usize,
    kappa_next: Field,
    z: Elem,
    unif: Vec<i64>,
    y_mon: Vec<i64>,
}

struct Engine<'a> {
    base: &'a BaseField,
    k: Field,
    kappa0: Field,
    q: Poly,
    max_iterations: usize,
}

/// All extensions of the base valuation to `K[x]/(Q)`.
pub fn approximate(base: &BaseField, q: &Poly, max_iterations: usize) -> Result<MacLaneResult, MacLaneError> {
    let k = base.field().clone();
    if !q.is_monic(&k) {
        return Err(MacLaneError::NotMonic);
    }
    if !base.residue_is_finite() {
        return Err(MacLaneError::ResidueFieldUnsupported(base.residue_field().describe()));
    }
    let d = q.derivative(&k);
    if d.is_zero() || q.gcd(&d, &k)?.degree() != Some(0) {
        return Err(MacLaneError::NotSquareFree);
    }
    if max_iterations == 0 {
        return Err(MacLaneError::IterationCap);
    }
    let engine = Engine { base, k: k.clone(), kappa0: base.residue_field(), q: q.clone(), max_iterations };
    let mut out = Vec::new();
    let n = q.degree().unwrap();
    engine.process(&[], Poly::x(&k), None, n, Vec::new(), 0, &mut out)?;
    if out.len() == 1 && out[0].is_defectless() {
        out[0].chain.steps.push((q.clone(), Value::Infinity));
    }
    Ok(MacLaneResult { extensions: out })
}

fn pad(v: &[i64], len: usize) -> Vec<i64> {
    let mut out = v.to_vec();
    out.resize(len.max(v.len()), 0);
    out
}

fn axpy(a: &[i64], c: i64, b: &[i64]) -> Vec<i64> {
    let len = a.len().max(b.len());
    let (a, b) = (pad(a, len), pad(b, len));
    a.iter().zip(&b).map(|(x, y)| x + c * y).collect()
}

fn rat_to_i64(r: &Rat) -> i64 {
    debug_assert!(r.is_integer());
    r.to_integer().to_i64().expect("small exponent")
}

/// Denominator of `r` as a `u64`.
fn den(r: &Rat) -> u64 {
    r.denom().to_u64().expect("small denominator")
}

impl Engine<'_> {
    /// `μ_{L-1}` where `L = levels.len()`; for no levels this is `v` on constants.
    fn mu(&self, levels: &[Level], f: &Poly) -> Value {
        if f.is_zero() {
            return Value::Infinity;
        }
        let Some((last, below)) = levels.split_last() else {
            debug_assert!(f.deg() == 0);
            return self.base.value(&f.coeffs()[0]);
        };
        let parts = f.expand(&last.phi, &self.k).expect("monic key");
        parts
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(j, a)| self.mu(below, a) + Value::Finite(&last.nu * rat_int(j as i64)))
            .min()
            .expect("nonzero")
    }

    /// `M_l(γ)` for `γ ∈ Γ_{l-1}`.
    fn m_mon(&self, levels: &[Level], l: usize, gamma: &Rat) -> Vec<i64> {
        if l == 0 {
            return vec![rat_to_i64(gamma)];
        }
        let prev = &levels[l - 1];
        let n = rat_to_i64(&(gamma * rat_int(prev.big_e as i64)));
        prev.unif.iter().map(|x| x * n).collect()
    }

    fn big_e_before(levels: &[Level], l: usize) -> u64 {
        if l == 0 {
            1
        } else {
            levels[l - 1].big_e
        }
    }

    fn kappa(&self, levels: &[Level], l: usize) -> Field {
        if l == 0 {
            self.kappa0.clone()
        } else {
            levels[l - 1].kappa_next.clone()
        }
    }

    /// Residue of a value-zero monomial over `(π, φ_0, …, φ_{l-1})` in `κ_l`.
    fn res_mon(&self, levels: &[Level], l: usize, w: &[i64]) -> Elem {
        if l == 0 {
            debug_assert!(w.iter().all(|&x| x == 0));
            return self.kappa0.one();
        }
        let lv = &levels[l - 1];
        let w = pad(w, l + 1);
        let (c, r) = w[l].div_rem(&(lv.e as i64));
        debug_assert_eq!(r, 0);
        let rest = axpy(&w, -c, &lv.y_mon);
        debug_assert_eq!(rest[l], 0);
        let inner = self.res_mon(levels, l - 1, &rest[..l]);
        let kn = &lv.kappa_next;
        kn.mul(&kn.pow(&lv.z, c).expect("z is a unit"), &kn.embed(&inner))
    }

    /// Normalized residue in `κ_l` of a nonzero polynomial of degree below `deg φ_l`.
    fn nr(&self, levels: &[Level], l: usize, a: &Poly) -> Elem {
        if l == 0 {
            return self.base.normalized_residue(&a.coeffs()[0]);
        }
        let lv = &levels[l - 1];
        let below = &levels[..l - 1];
        let parts = a.expand(&lv.phi, &self.k).expect("monic key");
        let terms: Vec<(usize, Rat)> = parts
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(j, p)| {
                let v = self.mu(below, p).finite().expect("nonzero").clone();
                (j, v + &lv.nu * rat_int(j as i64))
            })
            .collect();
        let gamma = terms.iter().map(|t| t.1.clone()).min().expect("nonzero");
        let dominant: Vec<usize> = terms.iter().filter(|t| t.1 == gamma).map(|t| t.0).collect();
        let s = dominant[0];
        let kn = &lv.kappa_next;
        let mut sum = kn.zero();
        for &j in &dominant {
            debug_assert_eq!((j - s) as u64 % lv.e, 0);
            let k = ((j - s) as u64 / lv.e) as i64;
            let c = kn.embed(&self.nr(levels, l - 1, &parts[j]));
            sum = kn.add(&sum, &kn.mul(&c, &kn.pow(&lv.z, k).expect("unit")));
        }
        let gamma_s = &gamma - &lv.nu * rat_int(s as i64);
        let w = self.monomial_ratio(levels, l, &gamma_s, s, &gamma);
        kn.mul(&self.res_mon(levels, l, &w), &sum)
    }

    /// `M_{l-1}(γ_s) · φ_{l-1}^s / M_l(γ)`.
    fn monomial_ratio(&self, levels: &[Level], l: usize, gamma_s: &Rat, s: usize, gamma: &Rat) -> Vec<i64> {
        let mut w = pad(&self.m_mon(levels, l - 1, gamma_s), l + 1);
        w[l] += s as i64;
        axpy(&w, -1, &self.m_mon(levels, l, gamma))
    }

    /// A polynomial `T` of degree below `deg φ_l` with `μ(T) = γ` and residue `ζ ∈ κ_l`.
    fn lift(&self, levels: &[Level], l: usize, gamma: &Rat, zeta: &Elem) -> Poly {
        if zeta.is_zero() {
            return Poly::zero();
        }
        if l == 0 {
            let c = self.base.uniformizer_pow(rat_to_i64(gamma));
            return Poly::constant(self.k.mul(&c, &self.base.lift_residue(zeta)));
        }
        let lv = &levels[l - 1];
        let e_prev = rat_int((lv.big_e / lv.e) as i64);
        let s = (0..lv.e as usize)
            .find(|&s| ((gamma - &lv.nu * rat_int(s as i64)) * &e_prev).is_integer())
            .expect("γ lies in the value group");
        let gamma_s = gamma - &lv.nu * rat_int(s as i64);
        let w = self.monomial_ratio(levels, l, &gamma_s, s, gamma);
        let kn = &lv.kappa_next;
        let scaled = kn.div(zeta, &self.res_mon(levels, l, &w)).expect("unit");
        let coeffs = scaled.as_poly().expect("extension element").clone();
        let mut out = Poly::zero();
        for (k, c) in coeffs.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let j = s + k * lv.e as usize;
            let g = gamma - &lv.nu * rat_int(j as i64);
            let part = self.lift(levels, l - 1, &g, c);
            out = out.add(&part.mul(&lv.phi.pow(j as u32, &self.k), &self.k), &self.k);
        }
        out
    }

    fn build_level(&self, levels: &[Level], l: usize, phi: &Poly, nu: &Rat, e: u64, psi: &Poly) -> Result<Level, MacLaneError> {
        let e_prev = Self::big_e_before(levels, l);
        let big_e = e_prev * e;
        let h = rat_to_i64(&(nu * rat_int(big_e as i64)));
        // x·h + y·e = 1
        let g = (h as i128).extended_gcd(&(e as i128));
        if g.gcd != 1 {
            return Err(MacLaneError::Internal("slope denominator".to_string()));
        }
        let (x, y) = (g.x as i64, g.y as i64);
        let prev_unif = if l == 0 { vec![1] } else { levels[l - 1].unif.clone() };
        let mut unif = pad(&prev_unif, l + 2);
        unif.iter_mut().for_each(|u| *u *= y);
        unif[l + 1] += x;
        let mut y_mon = pad(&self.m_mon(levels, l, &(nu * rat_int(e as i64))), l + 2);
        y_mon.iter_mut().for_each(|u| *u = -*u);
        y_mon[l + 1] += e as i64;
        let kappa = self.kappa(levels, l);
        let kappa_next = Field::extension(&kappa, psi.clone(), &alloc::format!("z{l}"))?;
        let z = kappa_next.generator().expect("extension");
        let big_f = if l == 0 { 1 } else { levels[l - 1].big_f } * psi.degree().unwrap() as u64;
        Ok(Level {
            phi: phi.clone(),
            nu: nu.clone(),
            e,
            big_e,
            big_f,
            psi_degree: psi.degree().unwrap(),
            kappa_next,
            z,
            unif,
            y_mon,
        })
    }

    fn frame(levels: &[Level]) -> Vec<FrameLevel> {
        levels
            .iter()
            .map(|lv| FrameLevel { key_degree: lv.phi.degree().unwrap(), e: lv.e, f: lv.psi_degree as u64 })
            .collect()
    }

    fn finish(&self, chain_steps: Vec<(Poly, Value)>, degree: usize, e: u64, f: u64, frame: Vec<FrameLevel>, flag: DefectFlag) -> Extension {
        let mut steps = chain_steps;
        let (_, base_gamma) = steps.remove(0);
        let mut degrees: Vec<usize> = vec![1];
        degrees.extend(steps.iter().map(|s| s.0.degree().unwrap()));
        if flag == DefectFlag::Defectless {
            degrees.push(degree);
        }
        let depth = degrees.windows(2).filter(|w| w[1] > w[0]).count();
        let linear = core::iter::once((Poly::x(&self.k), base_gamma.clone()))
            .chain(steps.iter().cloned())
            .filter(|s| s.0.degree() == Some(1))
            .last()
            .map(|(phi, v)| (self.k.neg(&phi.coeffs()[0]), v));
        Extension {
            degree,
            e,
            f,
            depth,
            flag,
            chain: AugmentedChain { base_gamma, steps },
            frame,
            best_linear: linear,
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn process(
        &self,
        levels: &[Level],
        phi: Poly,
        tau: Option<Rat>,
        omega: usize,
        reported: Vec<(Poly, Value)>,
        iterations: usize,
        out: &mut Vec<Extension>,
    ) -> Result<(), MacLaneError> {
        let l = levels.len();
        if iterations >= self.max_iterations {
            let mut rep = reported;
            if rep.is_empty() {
                rep.push((Poly::x(&self.k), Value::Infinity));
            }
            let degree = omega * phi.degree().unwrap();
            out.push(self.finish(rep, degree, 0, 0, Self::frame(levels), DefectFlag::DefectSuspected));
            return Ok(());
        }
        let parts = self.q.expand(&phi, &self.k)?;
        let mut remaining = omega;
        let mut first = 0;
        let e_prev = Self::big_e_before(levels, l);
        let f_here = if l == 0 { 1 } else { levels[l - 1].big_f };
        if parts[0].is_zero() {
            let mut rep = reported.clone();
            rep.push((phi.clone(), Value::Infinity));
            let degree = phi.degree().unwrap();
            if degree as u64 != e_prev * f_here {
                return Err(MacLaneError::Internal("exact key factor degree".to_string()));
            }
            out.push(self.finish(rep, degree, e_prev, f_here, Self::frame(levels), DefectFlag::Defectless));
            remaining -= 1;
            first = 1;
        }
        if remaining == 0 {
            return Ok(());
        }
        let values: Vec<Value> = parts.iter().map(|p| self.mu(levels, p)).collect();
        let points: Vec<(usize, Value)> =
            values.iter().enumerate().skip(first).map(|(j, v)| (j, v.clone())).collect();
        let polygon = lower_hull(&points)?;
        let principal: Vec<_> = polygon
            .sides
            .iter()
            .filter(|s| tau.as_ref().is_none_or(|t| -s.slope.clone() > *t))
            .collect();
        let total: usize = principal.iter().map(|s| s.length).sum();
        if total != remaining {
            return Err(MacLaneError::Internal(alloc::format!(
                "principal part has length {total}, expected {remaining}"
            )));
        }
        let kappa = self.kappa(levels, l);
        for side in principal {
            let nu = -side.slope.clone();
            let e = den(&(&nu * rat_int(e_prev as i64)));
            let start_value = values[side.start].finite().expect("vertex").clone();
            let mut r_coeffs = Vec::new();
            for k in 0..=(side.length as u64 / e) {
                let j = side.start + (k * e) as usize;
                let on_line = &start_value - &nu * rat_int((j - side.start) as i64);
                let c = match &values[j] {
                    Value::Finite(v) if *v == on_line => self.nr(levels, l, &parts[j]),
                    _ => kappa.zero(),
                };
                r_coeffs.push(c);
            }
            let residual = Poly::from_coeffs(r_coeffs).monic(&kappa)?;
            for (psi, mult) in factor_finite(&residual, &kappa)? {
                let level = self.build_level(levels, l, &phi, &nu, e, &psi)?;
                let mut rep = reported.clone();
                rep.push((phi.clone(), Value::Finite(nu.clone())));
                let fdeg = psi.degree().unwrap();
                if mult == 1 {
                    let mut frame = Self::frame(levels);
                    frame.push(FrameLevel { key_degree: phi.degree().unwrap(), e, f: fdeg as u64 });
                    let (be, bf) = (level.big_e, level.big_f);
                    out.push(self.finish(rep, (be * bf) as usize, be, bf, frame, DefectFlag::Defectless));
                } else if e == 1 && fdeg == 1 {
                    let c0 = psi.coeff(0, &kappa);
                    let refined = phi.add(&self.lift(levels, l, &nu, &c0), &self.k);
                    self.process(levels, refined, Some(nu.clone()), mult, rep, iterations + 1, out)?;
                } else {
                    let step = (e as usize) * fdeg;
                    let mut next = phi.pow(step as u32, &self.k);
                    for (kk, c) in psi.coeffs().iter().enumerate().take(fdeg) {
                        if c.is_zero() {
                            continue;
                        }
                        let g = &nu * rat_int(((fdeg - kk) as u64 * e) as i64);
                        let t = self.lift(levels, l, &g, c);
                        next = next.add(&t.mul(&phi.pow((kk as u64 * e) as u32, &self.k), &self.k), &self.k);
                    }
                    let tau_next = &nu * rat_int(step as i64);
                    let mut deeper = levels.to_vec();
                    deeper.push(level);
                    self.process(&deeper, next, Some(tau_next), mult, rep, iterations + 1, out)?;
                }
            }
        }
        Ok(())
    }
}

/// Factorization of a monic polynomial over a finite field by exhaustive search,
/// ordered by degree and then by enumeration order of the candidates.
pub fn factor_finite(r: &Poly, kappa: &Field) -> Result<Vec<(Poly, usize)>, MacLaneError> {
    let elems = kappa
        .elements()
        .ok_or_else(|| MacLaneError::ResidueFieldUnsupported(kappa.describe()))?;
    let q = elems.len() as u64;
    let mut rest = r.clone();
    let mut out = Vec::new();
    let mut d = 1usize;
    while rest.deg() >= 2 * d as isize {
        let count = q.checked_pow(d as u32).filter(|&c| c <= FACTOR_SEARCH_LIMIT).ok_or_else(|| {
            MacLaneError::ResidueFieldUnsupported(alloc::format!("residue factor search too large over {}", kappa.describe()))
        })?;
        for idx in 0..count {
            if rest.deg() < d as isize {
                break;
            }
            let mut coeffs = Vec::with_capacity(d + 1);
            let mut n = idx;
            for _ in 0..d {
                coeffs.push(elems[(n % q) as usize].clone());
                n /= q;
            }
            coeffs.push(kappa.one());
            let cand = Poly::from_coeffs(coeffs);
            let mut mult = 0;
            loop {
                let (quo, rem) = rest.div_rem(&cand, kappa)?;
                if !rem.is_zero() {
                    break;
                }
                rest = quo;
                mult += 1;
            }
            if mult > 0 {
                out.push((cand, mult));
            }
        }
        d += 1;
    }
    if rest.deg() >= 1 {
        out.push((rest, 1));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3t() -> BaseField {
        BaseField::t_adic(&Field::prime(3).unwrap(), "t").unwrap()
    }

    fn poly(_k: &Field, cs: &[Elem]) -> Poly {
        Poly::from_coeffs(cs.to_vec())
    }

    #[test]
    fn chain_eval_examples() {
        let base = f3t();
        let k = base.field().clone();
        let t = k.generator().unwrap();
        let inv_t = k.inv(&t).unwrap();
        let f = poly(&k, &[k.neg(&inv_t), k.from_i64(-1), k.zero(), k.one()]);
        assert_eq!(chain_eval(&base, &AugmentedChain::gauss(Value::zero()), &f), Value::int(-1));
        let chain = AugmentedChain {
            base_gamma: Value::zero(),
            steps: vec![(Poly::x(&k), Value::frac(1, 2))],
        };
        let g = poly(&k, &[k.neg(&t), k.zero(), k.one()]);
        assert_eq!(chain_eval(&base, &chain, &g), Value::int(1));
        assert_eq!(chain_eval(&base, &chain, &Poly::x(&k)), Value::frac(1, 2));
    }

    #[test]
    fn square_root_of_t() {
        let base = f3t();
        let k = base.field().clone();
        let t = k.generator().unwrap();
        let q = poly(&k, &[k.neg(&t), k.zero(), k.one()]);
        let res = approximate(&base, &q, 64).unwrap();
        assert_eq!(res.extensions.len(), 1);
        let ext = &res.extensions[0];
        assert_eq!((ext.e, ext.f, ext.depth), (2, 1, 1));
        assert_eq!(ext.chain.base_gamma, Value::frac(1, 2));
        assert_eq!(ext.best_linear.as_ref().unwrap().1, Value::frac(1, 2));
    }

    #[test]
    fn splitting_and_unramified() {
        // X² − 1 splits over F_3(t); X² + 1 stays inert
        let base = f3t();
        let k = base.field().clone();
        let split = poly(&k, &[k.from_i64(-1), k.zero(), k.one()]);
        let res = approximate(&base, &split, 64).unwrap();
        assert_eq!(res.extensions.len(), 2);
        let inert = poly(&k, &[k.one(), k.zero(), k.one()]);
        let res = approximate(&base, &inert, 64).unwrap();
        assert_eq!(res.extensions.len(), 1);
        assert_eq!((res.extensions[0].e, res.extensions[0].f), (1, 2));
        assert_eq!(res.extensions[0].depth, 1);
    }

    #[test]
    fn p_adic_gaussian_integers() {
        let q = Field::rationals();
        let x2p1 = Poly::from_coeffs(vec![q.one(), q.zero(), q.one()]);
        let count = |p| approximate(&BaseField::p_adic(p).unwrap(), &x2p1, 64).unwrap();
        assert_eq!(count(5).extensions.len(), 2);
        let r3 = count(3);
        assert_eq!((r3.extensions.len(), r3.extensions[0].f), (1, 2));
        let r2 = count(2);
        assert_eq!((r2.extensions.len(), r2.extensions[0].e), (1, 2));
        // refinement X → X + 1 before the ramified side appears
        assert_eq!(r2.extensions[0].chain.steps.len(), 2);
    }

    #[test]
    fn close_roots_need_refinement() {
        // (X − 1)(X − 1 − t)(X − 1 − t − t²) has three branches of degree one
        let base = f3t();
        let k = base.field().clone();
        let t = k.generator().unwrap();
        let one = k.one();
        let r2 = k.add(&one, &t);
        let r3 = k.add(&r2, &k.mul(&t, &t));
        let q = Poly::linear(&one, &k).mul(&Poly::linear(&r2, &k), &k).mul(&Poly::linear(&r3, &k), &k);
        let res = approximate(&base, &q, 64).unwrap();
        assert_eq!(res.extensions.len(), 3);
        assert!(res.extensions.iter().all(|e| e.degree == 1 && e.is_defectless()));
        // the roots 1 and 1 + t are met exactly by refined keys
        let exact = res.extensions.iter().filter(|e| e.best_linear.as_ref().unwrap().1 == Value::Infinity);
        assert_eq!(exact.count(), 2);
    }

    #[test]
    fn factor_search() {
        let f3 = Field::prime(3).unwrap();
        // (y − 1)² (y² + 1)
        let a = Poly::linear(&f3.one(), &f3);
        let b = Poly::from_coeffs(vec![f3.one(), f3.zero(), f3.one()]);
        let r = a.mul(&a, &f3).mul(&b, &f3);
        let fs = factor_finite(&r, &f3).unwrap();
        assert_eq!(fs, vec![(a, 2), (b, 1)]);
    }

    #[test]
    fn rejects_bad_input() {
        let base = f3t();
        let k = base.field().clone();
        let sq = Poly::x(&k).mul(&Poly::x(&k), &k);
        assert_eq!(approximate(&base, &sq, 64), Err(MacLaneError::NotSquareFree));
        let u = Field::functions(&Field::prime(3).unwrap(), "u");
        let b2 = BaseField::t_adic(&u, "t").unwrap();
        let k2 = b2.field().clone();
        let q = Poly::from_coeffs(vec![k2.neg(&k2.generator().unwrap()), k2.zero(), k2.one()]);
        assert!(matches!(approximate(&b2, &q, 64), Err(MacLaneError::ResidueFieldUnsupported(_))));
    }
}
