use alloc::vec;
use alloc::vec::Vec;

use super::{binomial, AlgebraError, Elem, Field, FieldKind};

/// Dense univariate polynomial, lowest degree first, without trailing zeros.
///
/// The coefficient field is passed to each operation rather than stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<Elem>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn from_coeffs(mut coeffs: Vec<Elem>) -> Poly {
        while coeffs.last().is_some_and(Elem::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: Elem) -> Poly {
        Poly::from_coeffs(vec![c])
    }

    /// `c·X^d`.
    pub fn monomial(c: Elem, d: usize, k: &Field) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![k.zero(); d];
        coeffs.push(c);
        Poly { coeffs }
    }

    /// The variable `X`.
    pub fn x(k: &Field) -> Poly {
        Poly { coeffs: vec![k.zero(), k.one()] }
    }

    /// `X - c`.
    pub fn linear(c: &Elem, k: &Field) -> Poly {
        Poly::from_coeffs(vec![k.neg(c), k.one()])
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Elem> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the convention `deg 0 = -1`.
    pub fn deg(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn lc(&self) -> Option<&Elem> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize, k: &Field) -> Elem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| k.zero())
    }

    pub fn is_monic(&self, k: &Field) -> bool {
        self.lc().is_some_and(|c| k.is_one(c))
    }

    pub fn add(&self, other: &Poly, k: &Field) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => k.add(a, b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Poly::from_coeffs(coeffs)
    }

    pub fn neg(&self, k: &Field) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| k.neg(c)).collect() }
    }

    pub fn sub(&self, other: &Poly, k: &Field) -> Poly {
        self.add(&other.neg(k), k)
    }

    pub fn scale(&self, c: &Elem, k: &Field) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly::from_coeffs(self.coeffs.iter().map(|a| k.mul(a, c)).collect())
    }

    /// Multiplication by `X^n`.
    pub fn shift(&self, n: usize, k: &Field) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![k.zero(); n];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    pub fn mul(&self, other: &Poly, k: &Field) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![k.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = k.add(&out[i + j], &k.mul(a, b));
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn pow(&self, n: u32, k: &Field) -> Poly {
        let mut acc = Poly::constant(k.one());
        let mut sq = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq, k);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq, k);
            }
        }
        acc
    }

    /// Euclidean division: `self = q·d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Poly, k: &Field) -> Result<(Poly, Poly), AlgebraError> {
        let lc = d.lc().ok_or(AlgebraError::DivisionByZeroPoly)?;
        let inv = k.inv(lc)?;
        Ok(self.div_rem_with(d, &inv, k))
    }

    fn div_rem_with(&self, d: &Poly, lc_inv: &Elem, k: &Field) -> (Poly, Poly) {
        let dd = d.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut r = self.coeffs.clone();
        let mut q = vec![k.zero(); r.len() - dd];
        let monic = k.is_one(lc_inv);
        for i in (0..q.len()).rev() {
            let top = &r[i + dd];
            if top.is_zero() {
                continue;
            }
            let c = if monic { top.clone() } else { k.mul(top, lc_inv) };
            for (j, b) in d.coeffs.iter().enumerate().take(dd) {
                if !b.is_zero() {
                    r[i + j] = k.sub(&r[i + j], &k.mul(&c, b));
                }
            }
            r[i + dd] = k.zero();
            q[i] = c;
        }
        r.truncate(dd);
        (Poly::from_coeffs(q), Poly::from_coeffs(r))
    }

    /// Remainder modulo a monic polynomial; needs no inversion.
    pub fn rem_monic(&self, m: &Poly, k: &Field) -> Poly {
        if self.coeffs.len() < m.coeffs.len() {
            return self.clone();
        }
        self.div_rem_with(m, &k.one(), k).1
    }

    pub fn rem(&self, d: &Poly, k: &Field) -> Result<Poly, AlgebraError> {
        Ok(self.div_rem(d, k)?.1)
    }

    /// Quotient of a division known to be exact.
    pub fn div_exact(&self, d: &Poly, k: &Field) -> Poly {
        self.div_rem(d, k).expect("nonzero divisor").0
    }

    /// Monic associate; zero stays zero.
    pub fn monic(&self, k: &Field) -> Result<Poly, AlgebraError> {
        match self.lc() {
            None => Ok(Poly::zero()),
            Some(c) if k.is_one(c) => Ok(self.clone()),
            Some(c) => Ok(self.scale(&k.inv(c)?, k)),
        }
    }

    /// Monic greatest common divisor (zero only when both inputs vanish).
    pub fn gcd(&self, other: &Poly, k: &Field) -> Result<Poly, AlgebraError> {
        let low = |f: &Poly| f.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0);
        let (s, o) = (low(self), low(other));
        if s.min(o) > 0 && !self.is_zero() && !other.is_zero() {
            let m = s.min(o);
            let strip = |f: &Poly| Poly { coeffs: f.coeffs[m..].to_vec() };
            return Ok(strip(self).gcd(&strip(other), k)?.shift(m, k));
        }
        if self.deg() > 0 && other.deg() > 0 && self.coprime_by_specialization(other, k) {
            return Ok(Poly::constant(k.one()));
        }
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            if b.degree() == Some(0) {
                return Ok(Poly::constant(k.one()));
            }
            let r = a.rem(&b, k)?;
            a = b;
            b = r;
        }
        a.monic(k)
    }

    /// Over `F_p(u)`: substituting each `u = c ∈ F_p` that keeps both degrees
    /// and all denominators nonzero; a constant gcd there proves coprimality.
    /// `false` only means undecided.
    fn coprime_by_specialization(&self, other: &Poly, k: &Field) -> bool {
        let FieldKind::Functions { base, .. } = k.kind() else {
            return false;
        };
        let FieldKind::Prime(p) = base.kind() else {
            return false;
        };
        let specialize = |f: &Poly, c: &Elem| -> Option<Poly> {
            let mut out = Vec::with_capacity(f.coeffs.len());
            for e in &f.coeffs {
                let fr = e.as_fraction()?;
                let d = fr.den.eval(c, base);
                if d.is_zero() {
                    return None;
                }
                out.push(base.mul(&fr.num.eval(c, base), &base.inv(&d).ok()?));
            }
            let g = Poly::from_coeffs(out);
            (g.degree() == f.degree()).then_some(g)
        };
        (0..*p).any(|c| {
            let c = Elem::Fp(c);
            match (specialize(self, &c), specialize(other, &c)) {
                (Some(a), Some(b)) => a.gcd(&b, base).is_ok_and(|g| g.degree() == Some(0)),
                _ => false,
            }
        })
    }

    /// Returns `(g, s, t)` with `g = s·self + t·other` and `g` monic.
    pub fn ext_gcd(&self, other: &Poly, k: &Field) -> Result<(Poly, Poly, Poly), AlgebraError> {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::constant(k.one()), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::constant(k.one()));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1, k)?;
            let s = s0.sub(&q.mul(&s1, k), k);
            let t = t0.sub(&q.mul(&t1, k), k);
            (r0, r1) = (r1, r);
            (s0, s1) = (s1, s);
            (t0, t1) = (t1, t);
        }
        match r0.lc() {
            None => Ok((r0, s0, t0)),
            Some(c) => {
                let c = k.inv(c)?;
                Ok((r0.scale(&c, k), s0.scale(&c, k), t0.scale(&c, k)))
            }
        }
    }

    /// Horner evaluation at a point of the coefficient field.
    pub fn eval(&self, x: &Elem, k: &Field) -> Elem {
        self.coeffs.iter().rev().fold(k.zero(), |acc, c| k.add(&k.mul(&acc, x), c))
    }

    /// Evaluation at a point of a field `target` above the coefficient field.
    pub fn eval_in(&self, x: &Elem, target: &Field, k: &Field) -> Result<Elem, AlgebraError> {
        let mut acc = target.zero();
        for c in self.coeffs.iter().rev() {
            acc = target.add(&target.mul(&acc, x), &target.embed_from(k, c)?);
        }
        Ok(acc)
    }

    /// Composition `self(inner)`.
    pub fn compose(&self, inner: &Poly, k: &Field) -> Poly {
        self.coeffs.iter().rev().fold(Poly::zero(), |acc, c| {
            acc.mul(inner, k).add(&Poly::constant(c.clone()), k)
        })
    }

    /// Coefficients mapped into another field.
    pub fn map(&self, f: impl Fn(&Elem) -> Elem) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(f).collect())
    }

    pub fn try_map(&self, f: impl Fn(&Elem) -> Result<Elem, AlgebraError>) -> Result<Poly, AlgebraError> {
        Ok(Poly::from_coeffs(self.coeffs.iter().map(f).collect::<Result<_, _>>()?))
    }

    pub fn derivative(&self, k: &Field) -> Poly {
        self.hasse_schmidt(1, k)
    }

    /// Hasse–Schmidt derivative `∂_s f = Σ C(i,s) c_i X^(i-s)`, binomials reduced in the field.
    pub fn hasse_schmidt(&self, s: usize, k: &Field) -> Poly {
        if s >= self.coeffs.len() {
            return Poly::zero();
        }
        let coeffs = self.coeffs[s..]
            .iter()
            .enumerate()
            .map(|(j, c)| {
                if c.is_zero() {
                    return k.zero();
                }
                let b = k.from_bigint(&binomial((j + s) as u64, s as u64));
                k.mul(&b, c)
            })
            .collect();
        Poly::from_coeffs(coeffs)
    }

    /// `f(X + c)`. The coefficient of `X^s` is `(∂_s f)(c)`.
    pub fn taylor_shift(&self, c: &Elem, k: &Field) -> Poly {
        let lin = Poly::from_coeffs(vec![c.clone(), k.one()]);
        self.compose(&lin, k)
    }

    /// The `q`-adic expansion `self = Σ f_i q^i` with `deg f_i < deg q`.
    pub fn expand(&self, q: &Poly, k: &Field) -> Result<Vec<Poly>, AlgebraError> {
        if q.degree().unwrap_or(0) == 0 {
            return Err(AlgebraError::DivisionByZeroPoly);
        }
        let mut out = Vec::new();
        let mut rest = self.clone();
        while !rest.is_zero() {
            let (quo, r) = rest.div_rem(q, k)?;
            out.push(r);
            rest = quo;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, Field};

    fn qpoly(cs: &[i64]) -> Poly {
        let q = Field::rationals();
        Poly::from_coeffs(cs.iter().map(|&c| q.from_i64(c)).collect())
    }

    #[test]
    fn divmod_and_gcd() {
        let q = Field::rationals();
        let (quo, r) = qpoly(&[-1, 0, 1]).div_rem(&qpoly(&[-1, 1]), &q).unwrap();
        assert_eq!(quo, qpoly(&[1, 1]));
        assert!(r.is_zero());
        assert_eq!(qpoly(&[-1, 0, 1]).gcd(&qpoly(&[-1, 1]), &q).unwrap(), qpoly(&[-1, 1]));
        assert_eq!(qpoly(&[2, 2]).gcd(&qpoly(&[3, 0, 3]), &q).unwrap(), qpoly(&[1]));
        assert_eq!(qpoly(&[1]).div_rem(&Poly::zero(), &q), Err(AlgebraError::DivisionByZeroPoly));
    }

    #[test]
    fn frobenius_cancellation() {
        let k = Field::prime(5).unwrap();
        let xp = Poly::monomial(k.one(), 5, &k);
        let f = xp.sub(&Poly::x(&k), &k);
        assert_eq!(f.add(&Poly::x(&k), &k), xp);
        // (X+1)^5 = X^5 + 1 in characteristic 5
        assert_eq!(xp.taylor_shift(&k.one(), &k), xp.add(&Poly::constant(k.one()), &k));
    }

    #[test]
    fn taylor_shift_examples() {
        let q = Field::rationals();
        assert_eq!(qpoly(&[0, 0, 1]).taylor_shift(&q.one(), &q), qpoly(&[1, 2, 1]));
        assert_eq!(qpoly(&[0, 1]).taylor_shift(&q.zero(), &q), qpoly(&[0, 1]));
    }

    #[test]
    fn hasse_schmidt_examples() {
        let q = Field::rationals();
        let f = qpoly(&[5, -3, 0, 1]);
        assert_eq!(f.hasse_schmidt(1, &q), qpoly(&[-3, 0, 3]));
        assert_eq!(qpoly(&[0, 0, 0, 1]).hasse_schmidt(2, &q), qpoly(&[0, 3]));
        assert_eq!(f.hasse_schmidt(0, &q), f);
        assert!(f.hasse_schmidt(4, &q).is_zero());
        let k = Field::prime(3).unwrap();
        let x3 = Poly::monomial(k.one(), 3, &k);
        assert_eq!(x3.hasse_schmidt(3, &k), Poly::constant(k.one()));
        assert!(x3.hasse_schmidt(1, &k).is_zero());
    }

    #[test]
    fn shifted_coefficients_are_derivative_values() {
        let q = Field::rationals();
        let f = qpoly(&[7, -1, 4, 0, 2]);
        let c = q.from_rat(&rat(3, 2)).unwrap();
        let g = f.taylor_shift(&c, &q);
        for s in 0..=4 {
            assert_eq!(g.coeff(s, &q), f.hasse_schmidt(s, &q).eval(&c, &q));
        }
    }

    #[test]
    fn expansion_reassembles() {
        let q = Field::rationals();
        let f = qpoly(&[1, 2, 3, 4, 5, 6, 7]);
        let phi = qpoly(&[-2, 0, 1]);
        let parts = f.expand(&phi, &q).unwrap();
        let back = parts
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, a| acc.mul(&phi, &q).add(a, &q));
        assert_eq!(back, f);
        assert!(parts.iter().all(|a| a.deg() < 2));
    }
}
