use super::{AlgebraError, Elem, Field, Poly};

/// Resultant of `f` and `g`, equal to `lc(f)^deg g · ∏ g(α)` over the roots `α` of `f`.
///
/// Subresultant pseudo-remainder sequence; no division by non-constant quantities
/// beyond the exact subresultant cofactors.
pub fn resultant(f: &Poly, g: &Poly, k: &Field) -> Result<Elem, AlgebraError> {
    if f.is_zero() || g.is_zero() {
        return Ok(k.zero());
    }
    let (mut a, mut b) = (f.clone(), g.clone());
    let mut sign_flip = false;
    if a.deg() < b.deg() {
        if a.deg() % 2 == 1 && b.deg() % 2 == 1 {
            sign_flip = true;
        }
        core::mem::swap(&mut a, &mut b);
    }
    if b.deg() == 0 {
        let r = k.pow(b.lc().unwrap(), a.deg() as i64)?;
        return Ok(if sign_flip { k.neg(&r) } else { r });
    }
    let mut gg = k.one();
    let mut h = k.one();
    loop {
        let delta = (a.deg() - b.deg()) as i64;
        if a.deg() % 2 == 1 && b.deg() % 2 == 1 {
            sign_flip = !sign_flip;
        }
        let r = pseudo_rem(&a, &b, k);
        a = b;
        let denom = k.mul(&gg, &k.pow(&h, delta)?);
        b = r.scale(&k.inv(&denom)?, k);
        gg = a.lc().unwrap().clone();
        h = k.div(&k.pow(&gg, delta)?, &k.pow(&h, delta - 1)?)?;
        if b.deg() <= 0 {
            break;
        }
    }
    if b.is_zero() {
        return Ok(k.zero());
    }
    let da = a.deg() as i64;
    let res = k.div(&k.pow(b.lc().unwrap(), da)?, &k.pow(&h, da - 1)?)?;
    Ok(if sign_flip { k.neg(&res) } else { res })
}

/// `lc(b)^(deg a - deg b + 1) · a mod b`.
fn pseudo_rem(a: &Poly, b: &Poly, k: &Field) -> Poly {
    let e = (a.deg() - b.deg() + 1) as i64;
    let scale = k.pow(b.lc().unwrap(), e).expect("nonnegative exponent");
    a.scale(&scale, k).rem(b, k).expect("nonzero divisor")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::linalg::sylvester_resultant;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    fn poly(k: &Field, cs: &[i64]) -> Poly {
        Poly::from_coeffs(cs.iter().map(|&c| k.from_i64(c)).collect())
    }

    #[test]
    fn small_examples() {
        let q = Field::rationals();
        assert_eq!(resultant(&poly(&q, &[-2, 1]), &poly(&q, &[-3, 1]), &q).unwrap(), q.from_i64(-1));
        assert_eq!(resultant(&poly(&q, &[1, 0, 1]), &poly(&q, &[-1, 0, 1]), &q).unwrap(), q.from_i64(4));
        let f3t = Field::functions(&Field::prime(3).unwrap(), "t");
        let t = f3t.generator().unwrap();
        let f = Poly::from_coeffs(alloc::vec![f3t.neg(&t), f3t.zero(), f3t.one()]);
        let x = Poly::x(&f3t);
        assert_eq!(resultant(&f, &x, &f3t).unwrap(), f3t.neg(&t));
    }

    #[test]
    fn agrees_with_sylvester_determinant() {
        let q = Field::rationals();
        let cases: [(&[i64], &[i64]); 4] = [
            (&[3, -1, 4, 1], &[5, 9, 2]),
            (&[1, 1, 1, 1, 1], &[2, 0, -7, 1]),
            (&[-6, 11, -6, 1], &[-2, 1]),
            (&[4, 0, 0, 0, 0, 2], &[1, 1, 0, 3, 1, 0, 1]),
        ];
        for (a, b) in cases {
            let (f, g) = (poly(&q, a), poly(&q, b));
            assert_eq!(resultant(&f, &g, &q).unwrap(), sylvester_resultant(&f, &g, &q));
            assert_eq!(resultant(&g, &f, &q).unwrap(), sylvester_resultant(&g, &f, &q));
        }
    }

    fn fp_poly(p: u32) -> impl Strategy<Value = Vec<u32>> {
        prop::collection::vec(0..p, 1..=7)
    }

    proptest! {
        #[test]
        fn multiplicative_in_first_argument(
            p in prop::sample::select(alloc::vec![2u32, 3, 5, 7]),
            a in fp_poly(7), b in fp_poly(7), c in fp_poly(7),
        ) {
            let k = Field::prime(p).unwrap();
            let mk = |v: &Vec<u32>| Poly::from_coeffs(v.iter().map(|&x| Elem::Fp(x % p)).collect());
            let (f, g, h) = (mk(&a), mk(&b), mk(&c));
            prop_assume!(f.deg() + g.deg() + h.deg() > 0);
            let lhs = resultant(&f.mul(&g, &k), &h, &k).unwrap();
            let rhs = k.mul(&resultant(&f, &h, &k).unwrap(), &resultant(&g, &h, &k).unwrap());
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(resultant(&f, &h, &k).unwrap(), sylvester_resultant(&f, &h, &k));
        }
    }
}
