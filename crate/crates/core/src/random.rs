//! Seeded sampling of base elements, polynomials and tower elements.

use alloc::vec::Vec;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{rat, Elem, FieldKind, Poly};
use crate::tower::{BaseField, Tower, ValuationKind};

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Sampler {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Uniform in `0..n`; `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn coin(&mut self, numerator: u32, denominator: u32) -> bool {
        self.rng.gen_ratio(numerator, denominator)
    }

    /// A random element of height at most `height` (degree bound for `t`-adic bases,
    /// `p`-power bound for `p`-adic ones).
    pub fn base_element(&mut self, base: &BaseField, height: u32) -> Elem {
        let k = base.field();
        match base.kind() {
            ValuationKind::PAdic(p) => {
                let bound = (*p as i64).saturating_pow(height.max(1)).min(1 << 20);
                let n = self.rng.gen_range(-bound..=bound);
                let d = self.rng.gen_range(1..=bound);
                k.from_rat(&rat(n, d)).expect("rational")
            }
            ValuationKind::TAdic => {
                let consts = k.base().expect("function field").clone();
                let num_deg = self.below(height as usize + 1);
                let den_deg = self.below(height as usize + 1);
                let num: Vec<Elem> = (0..=num_deg).map(|_| self.constant(&consts)).collect();
                let mut den: Vec<Elem> = (0..den_deg).map(|_| self.constant(&consts)).collect();
                den.push(consts.one());
                k.fraction(Poly::from_coeffs(num), Poly::from_coeffs(den)).expect("monic denominator")
            }
        }
    }

    /// `Σ_{|j| ≤ height} c_j π^j` with constant `c_j`: a Laurent polynomial in the uniformizer.
    pub fn laurent_element(&mut self, base: &BaseField, height: u32) -> Elem {
        let k = base.field();
        let h = height as i64;
        let mut x = k.zero();
        for j in -h..=h {
            let c = match base.kind() {
                ValuationKind::PAdic(p) => k.from_i64(self.rng.gen_range(0..*p as i64)),
                ValuationKind::TAdic => k.embed(&self.constant(k.base().expect("function field"))),
            };
            x = k.add(&x, &k.mul(&c, &base.uniformizer_pow(j)));
        }
        x
    }

    pub fn nonzero_base_element(&mut self, base: &BaseField, height: u32) -> Elem {
        loop {
            let c = self.base_element(base, height);
            if !c.is_zero() {
                return c;
            }
        }
    }

    /// `a + b·u` over `F_p(u)`, uniform over `F_p`.
    fn constant(&mut self, consts: &crate::algebra::Field) -> Elem {
        match consts.kind() {
            FieldKind::Prime(p) => consts.from_i64(self.rng.gen_range(0..*p as i64)),
            FieldKind::Functions { base, .. } => {
                let a = self.constant(base);
                let b = self.constant(base);
                let u = consts.generator().expect("rational function field");
                consts.add(&consts.embed(&a), &consts.mul(&consts.embed(&b), &u))
            }
            _ => consts.from_i64(self.rng.gen_range(-3..=3)),
        }
    }

    /// Random polynomial of exact degree `degree` over the base.
    pub fn base_poly(&mut self, base: &BaseField, degree: usize, height: u32) -> Poly {
        let mut coeffs: Vec<Elem> = (0..degree).map(|_| self.base_element(base, height)).collect();
        coeffs.push(self.nonzero_base_element(base, height));
        Poly::from_coeffs(coeffs)
    }

    /// Random element of the top field with base coordinates of bounded height.
    pub fn tower_element(&mut self, tower: &Tower, height: u32) -> Elem {
        let top = tower.top();
        let mut basis = Vec::from([top.one()]);
        for (i, level) in tower.levels().iter().enumerate() {
            let g = tower.generator(i + 1);
            let d = level.minpoly.degree().expect("nonzero");
            let mut next = Vec::with_capacity(basis.len() * d);
            let mut power = top.one();
            for _ in 0..d {
                next.extend(basis.iter().map(|b| top.mul(b, &power)));
                power = top.mul(&power, &g);
            }
            basis = next;
        }
        let mut x = top.zero();
        for b in &basis {
            if self.coin(1, 3) {
                continue;
            }
            let c = tower.embed_base(&self.base_element(tower.base(), height));
            x = top.add(&x, &top.mul(&c, b));
        }
        x
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> BigInt {
        BigInt::from(self.rng.gen_range(lo..=hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Field;

    #[test]
    fn seeded_streams_repeat() {
        let base = BaseField::t_adic(&Field::functions(&Field::prime(3).unwrap(), "u"), "t").unwrap();
        let draw = |seed| {
            let mut s = Sampler::new(seed);
            (0..20).map(|_| s.base_element(&base, 3)).collect::<Vec<_>>()
        };
        assert_eq!(draw(7), draw(7));
        assert_ne!(draw(7), draw(8));
        let padic = BaseField::p_adic(5).unwrap();
        let mut s = Sampler::new(1);
        assert!((0..50).all(|_| !s.nonzero_base_element(&padic, 2).is_zero()));
    }
}
