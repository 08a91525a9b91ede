//! Small dense linear algebra over a `Field`.

use alloc::vec;
use alloc::vec::Vec;

use super::{Elem, Field, Poly};

/// Determinant by Gaussian elimination.
pub fn determinant(mut m: Vec<Vec<Elem>>, k: &Field) -> Elem {
    let n = m.len();
    let mut det = k.one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return k.zero();
        };
        if piv != col {
            m.swap(piv, col);
            det = k.neg(&det);
        }
        det = k.mul(&det, &m[col][col]);
        let inv = k.inv(&m[col][col]).expect("nonzero pivot");
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = k.mul(&m[r][col], &inv);
            for c in col..n {
                let sub = k.mul(&factor, &m[col][c]);
                m[r][c] = k.sub(&m[r][c], &sub);
            }
        }
    }
    det
}

/// Determinant of a matrix over `k[X]` by fraction-free (Bareiss) elimination.
pub fn polynomial_determinant(mut m: Vec<Vec<Poly>>, k: &Field) -> Poly {
    let n = m.len();
    let mut sign = false;
    let mut prev = Poly::constant(k.one());
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Poly::zero();
        };
        if piv != col {
            m.swap(piv, col);
            sign = !sign;
        }
        for r in col + 1..n {
            for c in col + 1..n {
                let a = m[col][col].mul(&m[r][c], k);
                let b = m[r][col].mul(&m[col][c], k);
                m[r][c] = a.sub(&b, k).div_exact(&prev, k);
            }
            m[r][col] = Poly::zero();
        }
        prev = m[col][col].clone();
    }
    if sign {
        prev.neg(k)
    } else {
        prev
    }
}

/// Resultant as the determinant of the Sylvester matrix.
pub fn sylvester_resultant(f: &Poly, g: &Poly, k: &Field) -> Elem {
    let (m, n) = (f.deg().max(0) as usize, g.deg().max(0) as usize);
    if f.is_zero() || g.is_zero() {
        return k.zero();
    }
    let size = m + n;
    if size == 0 {
        return k.one();
    }
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![k.zero(); size];
        for (j, c) in f.coeffs().iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![k.zero(); size];
        for (j, c) in g.coeffs().iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    determinant(rows, k)
}

/// Incremental detection of the first linear dependency in a sequence of vectors.
pub struct DependencyFinder {
    k: Field,
    /// Reduced rows: (pivot column, vector, combination of the inputs producing it).
    rows: Vec<(usize, Vec<Elem>, Vec<Elem>)>,
    count: usize,
}

impl DependencyFinder {
    pub fn new(k: &Field) -> Self {
        DependencyFinder { k: k.clone(), rows: Vec::new(), count: 0 }
    }

    /// Feeds the next vector. Returns `c` with `Σ c_i v_i = 0` and `c_last = 1`
    /// once the new vector lies in the span of the previous ones.
    pub fn push(&mut self, v: Vec<Elem>) -> Option<Vec<Elem>> {
        let k = &self.k;
        let idx = self.count;
        self.count += 1;
        let mut v = v;
        let mut comb = vec![k.zero(); idx + 1];
        comb[idx] = k.one();
        for (piv, row, rc) in &self.rows {
            if v[*piv].is_zero() {
                continue;
            }
            let f = v[*piv].clone();
            for (a, b) in v.iter_mut().zip(row) {
                if !b.is_zero() {
                    *a = k.sub(a, &k.mul(&f, b));
                }
            }
            for (a, b) in comb.iter_mut().zip(rc) {
                if !b.is_zero() {
                    *a = k.sub(a, &k.mul(&f, b));
                }
            }
        }
        match v.iter().position(|c| !c.is_zero()) {
            None => Some(comb),
            Some(piv) => {
                let inv = k.inv(&v[piv]).expect("nonzero pivot");
                let v: Vec<Elem> = v.iter().map(|c| k.mul(c, &inv)).collect();
                let comb: Vec<Elem> = comb.iter().map(|c| k.mul(c, &inv)).collect();
                // keep earlier rows reduced at the new pivot
                for (_, row, rc) in self.rows.iter_mut() {
                    if row[piv].is_zero() {
                        continue;
                    }
                    let f = row[piv].clone();
                    for (a, b) in row.iter_mut().zip(&v) {
                        if !b.is_zero() {
                            *a = k.sub(a, &k.mul(&f, b));
                        }
                    }
                    rc.resize(comb.len(), k.zero());
                    for (a, b) in rc.iter_mut().zip(&comb) {
                        if !b.is_zero() {
                            *a = k.sub(a, &k.mul(&f, b));
                        }
                    }
                }
                self.rows.push((piv, v, comb));
                None
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_small() {
        let q = Field::rationals();
        let m = |r: [i64; 3]| r.iter().map(|&x| q.from_i64(x)).collect::<Vec<_>>();
        let d = determinant(alloc::vec![m([2, 0, 1]), m([1, 3, 2]), m([1, 1, 2])], &q);
        assert_eq!(d, q.from_i64(6));
    }

    #[test]
    fn bareiss_matches_elimination() {
        let f3 = Field::prime(3).unwrap();
        let f3t = Field::functions(&f3, "t");
        let p = |cs: &[u32]| Poly::from_coeffs(cs.iter().map(|&c| Elem::Fp(c)).collect());
        let rows = alloc::vec![
            alloc::vec![p(&[0, 1]), p(&[1, 0, 2]), p(&[2])],
            alloc::vec![p(&[1, 1]), p(&[0]), p(&[0, 0, 1])],
            alloc::vec![p(&[0, 2, 1]), p(&[1]), p(&[1, 1])],
        ];
        let as_frac: Vec<Vec<Elem>> = rows
            .iter()
            .map(|r| r.iter().map(|x| f3t.fraction(x.clone(), Poly::constant(f3.one())).unwrap()).collect())
            .collect();
        let expect = determinant(as_frac, &f3t);
        let got = f3t.fraction(polynomial_determinant(rows, &f3), Poly::constant(f3.one())).unwrap();
        assert_eq!(got, expect);
    }

    #[test]
    fn finds_first_dependency() {
        let q = Field::rationals();
        let v = |r: [i64; 3]| r.iter().map(|&x| q.from_i64(x)).collect::<Vec<_>>();
        let mut f = DependencyFinder::new(&q);
        assert!(f.push(v([1, 0, 0])).is_none());
        assert!(f.push(v([1, 1, 0])).is_none());
        let c = f.push(v([3, 2, 0])).unwrap();
        // 3e0+2e1 = 1·(1,0,0) + 2·(1,1,0)
        assert_eq!(c, alloc::vec![q.from_i64(-1), q.from_i64(-2), q.one()]);
    }
}
