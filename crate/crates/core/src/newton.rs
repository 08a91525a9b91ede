//! Lower Newton polygons and the root valuations they encode.
//!
//! Sign convention, used by every consumer: for a polynomial `Σ c_i X^i` the
//! points are `(i, v(c_i))`; a side of slope `s` and horizontal length `ℓ`
//! stands for `ℓ` roots of value `-s`. The roots equal to zero are counted
//! separately by the index of the first finite point.

use alloc::vec::Vec;

use num_traits::Zero;

use crate::algebra::{rat_int, Rat};
use crate::value::Value;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum NewtonError {
    #[error("a Newton polygon needs at least two finite points")]
    TooFewPoints,
    #[error("point indices must be distinct")]
    DuplicateIndex,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Side {
    pub slope: Rat,
    pub length: usize,
    /// Index of the left endpoint.
    pub start: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    /// Finite input points sorted by index.
    pub points: Vec<(usize, Rat)>,
    pub vertices: Vec<(usize, Rat)>,
    /// Sides by increasing slope.
    pub sides: Vec<Side>,
}

impl NewtonPolygon {
    /// Height of the polygon above index `i`, for `i` inside its horizontal range.
    pub fn height_at(&self, i: usize) -> Option<Rat> {
        let w = self.vertices.windows(2).find(|w| w[0].0 <= i && i <= w[1].0)?;
        let (a, b) = (&w[0], &w[1]);
        let slope = (&b.1 - &a.1) / rat_int((b.0 - a.0) as i64);
        Some(&a.1 + slope * rat_int((i - a.0) as i64))
    }
}

/// Lower convex hull of the finite points; collinear interior points are dropped.
pub fn lower_hull(points: &[(usize, Value)]) -> Result<NewtonPolygon, NewtonError> {
    let mut pts: Vec<(usize, Rat)> = points
        .iter()
        .filter_map(|(i, v)| v.finite().map(|r| (*i, r.clone())))
        .collect();
    pts.sort_by_key(|p| p.0);
    if pts.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(NewtonError::DuplicateIndex);
    }
    if pts.len() < 2 {
        return Err(NewtonError::TooFewPoints);
    }
    let mut hull: Vec<(usize, Rat)> = Vec::new();
    for p in &pts {
        while hull.len() >= 2 {
            let a = &hull[hull.len() - 2];
            let b = &hull[hull.len() - 1];
            let cross = rat_int((b.0 - a.0) as i64) * (&p.1 - &a.1)
                - (&b.1 - &a.1) * rat_int((p.0 - a.0) as i64);
            if cross <= Rat::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p.clone());
    }
    let sides = hull
        .windows(2)
        .map(|w| {
            let len = w[1].0 - w[0].0;
            Side { slope: (&w[1].1 - &w[0].1) / rat_int(len as i64), length: len, start: w[0].0 }
        })
        .collect();
    Ok(NewtonPolygon { points: pts, vertices: hull, sides })
}

/// Multiset of root values, strictly decreasing, with multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootValuations {
    pub entries: Vec<(Value, usize)>,
}

impl RootValuations {
    pub fn total(&self) -> usize {
        self.entries.iter().map(|e| e.1).sum()
    }

    /// Multiplicity of the root zero.
    pub fn zero_roots(&self) -> usize {
        self.entries.iter().find(|e| e.0 == Value::Infinity).map_or(0, |e| e.1)
    }

    /// Number of roots whose value is at least `gamma`.
    pub fn count_at_least(&self, gamma: &Value) -> usize {
        self.entries.iter().filter(|e| &e.0 >= gamma).map(|e| e.1).sum()
    }
}

/// Root values of `Σ c_i X^i` given the coefficient values `v(c_i)`.
pub fn root_valuations(coeff_values: &[Value]) -> Result<RootValuations, NewtonError> {
    let deg = coeff_values
        .iter()
        .rposition(Value::is_finite)
        .ok_or(NewtonError::TooFewPoints)?;
    if deg == 0 {
        return Err(NewtonError::TooFewPoints);
    }
    let m0 = coeff_values.iter().position(Value::is_finite).unwrap();
    let mut entries = Vec::new();
    if m0 > 0 {
        entries.push((Value::Infinity, m0));
    }
    if m0 < deg {
        let points: Vec<(usize, Value)> = coeff_values[..=deg]
            .iter()
            .enumerate()
            .skip(m0)
            .map(|(i, v)| (i, v.clone()))
            .collect();
        let poly = lower_hull(&points)?;
        entries.extend(poly.sides.iter().map(|s| (Value::Finite(-s.slope.clone()), s.length)));
    }
    Ok(RootValuations { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn hull_examples() {
        let p = lower_hull(&[(0, Value::int(1)), (2, Value::int(0))]).unwrap();
        assert_eq!(p.sides, vec![Side { slope: rat(-1, 2), length: 2, start: 0 }]);
        let p = lower_hull(&[(0, Value::int(-1)), (1, Value::int(0)), (3, Value::int(0))]).unwrap();
        assert_eq!(p.sides, vec![Side { slope: rat(1, 3), length: 3, start: 0 }]);
        let p = lower_hull(&[(0, Value::int(0)), (1, Value::int(0))]).unwrap();
        assert_eq!(p.sides, vec![Side { slope: rat(0, 1), length: 1, start: 0 }]);
        assert_eq!(lower_hull(&[(0, Value::int(0)), (1, Value::Infinity)]), Err(NewtonError::TooFewPoints));
    }

    #[test]
    fn collinear_points_dropped() {
        let p = lower_hull(&[(0, Value::int(2)), (1, Value::int(1)), (2, Value::int(0))]).unwrap();
        assert_eq!(p.vertices.len(), 2);
        assert_eq!(p.sides.len(), 1);
        assert_eq!(p.height_at(1), Some(rat(1, 1)));
    }

    #[test]
    fn root_value_examples() {
        // X^2 - t
        let r = root_valuations(&[Value::int(1), Value::Infinity, Value::int(0)]).unwrap();
        assert_eq!(r.entries, vec![(Value::frac(1, 2), 2)]);
        // X^3 - X - 1/t
        let r = root_valuations(&[Value::int(-1), Value::int(0), Value::Infinity, Value::int(0)]).unwrap();
        assert_eq!(r.entries, vec![(Value::frac(-1, 3), 3)]);
        // X^2·(X - t)
        let r = root_valuations(&[Value::Infinity, Value::Infinity, Value::int(1), Value::int(0)]).unwrap();
        assert_eq!(r.entries, vec![(Value::Infinity, 2), (Value::int(1), 1)]);
        assert_eq!(r.count_at_least(&Value::int(1)), 3);
    }

    proptest! {
        // Expand ∏ (X - c_i) over F_5(t) with known v(c_i) and read the values back.
        #[test]
        fn product_of_linear_factors(exps in prop::collection::vec(-3i64..4, 1..=5)) {
            use crate::algebra::{Field, Poly};
            let k = Field::functions(&Field::prime(5).unwrap(), "t");
            let t = k.generator().unwrap();
            let mut f = Poly::constant(k.one());
            for (i, e) in exps.iter().enumerate() {
                // c = ((i mod 4)+1)·t^e
                let c = k.mul(&k.from_i64((i % 4) as i64 + 1), &k.pow(&t, *e).unwrap());
                f = f.mul(&Poly::linear(&c, &k), &k);
            }
            let vals: Vec<Value> = f
                .coeffs()
                .iter()
                .map(|c| c.as_fraction().and_then(|fr| fr.order_at_zero()).map_or(Value::Infinity, Value::int))
                .collect();
            let r = root_valuations(&vals).unwrap();
            let mut expect: Vec<i64> = exps.clone();
            expect.sort_unstable_by(|a, b| b.cmp(a));
            let mut got: Vec<i64> = Vec::new();
            for (v, m) in &r.entries {
                for _ in 0..*m {
                    got.push(v.finite().unwrap().to_integer().try_into().unwrap());
                }
            }
            prop_assert_eq!(got, expect);
            // Σ value·mult = v(c_0) - v(lc)
            let sum: Rat = r.entries.iter().map(|(v, m)| v.finite().unwrap() * rat_int(*m as i64)).sum();
            prop_assert_eq!(Value::Finite(sum), vals[0].clone() - vals[vals.len() - 1].clone());
        }
    }
}
