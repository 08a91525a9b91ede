//! Ramification ideals of finite Galois extensions, kept as cuts in the value group.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::algebra::{Elem, Rat};
use crate::maclane::DEFAULT_MAX_ITERATIONS;
use crate::invariants::basis_defect;
use crate::random::Sampler;
use crate::tower::{Tower, TowerError};
use crate::value::Value;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RamifyError {
    #[error("the given set is not a subgroup")]
    NotASubgroup,
    #[error("group model must come from a pure generator")]
    GeneratorNotPure,
    #[error("invalid group model: {0}")]
    InvalidModel(String),
    #[error("(b, 0) is not a distinguished pair: {0}")]
    NotDistinguishedPair(String),
    #[error(transparent)]
    Tower(#[from] TowerError),
}

/// Shape of `v(a − K)` in the defect case, or its maximum when attained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CutDescriptor {
    /// `v(a − K) = {γ < endpoint}`.
    Principal(Rat),
    /// `max v(a − K)`.
    Attained(Rat),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Regime {
    Defectless,
    Defect(CutDescriptor),
}

/// The ideal `{x : v(x) ≥ endpoint}` when closed, `{x : v(x) > endpoint}` when open.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CutIdeal {
    pub endpoint: Rat,
    pub closed: bool,
}

impl CutIdeal {
    /// Inclusion of ideals: a lower cut is a larger ideal.
    pub fn contains(&self, other: &CutIdeal) -> bool {
        self.endpoint < other.endpoint || (self.endpoint == other.endpoint && (self.closed || !other.closed))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ideal {
    Unit,
    Cut(CutIdeal),
}

/// Subset of the group as a bitmask over element indices.
pub type Subset = u128;

/// A finite group acting on a generator `a`, with `d(σ) = v(σa − a)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupModel {
    pub elements: Vec<String>,
    pub table: Vec<Vec<usize>>,
    pub distance: Vec<Value>,
    pub value_of_a: Value,
    pub regime: Regime,
    pub pure: bool,
}

impl GroupModel {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn identity(&self) -> Option<usize> {
        (0..self.order()).find(|&e| (0..self.order()).all(|x| self.mul(e, x) == x && self.mul(x, e) == x))
    }

    pub fn inverse(&self, a: usize) -> Option<usize> {
        let e = self.identity()?;
        (0..self.order()).find(|&b| self.mul(a, b) == e)
    }

    /// Group axioms plus `d(id) = ∞`, `d(σ⁻¹) = d(σ)` and the ultrametric inequality.
    pub fn validate(&self) -> Result<(), RamifyError> {
        let n = self.order();
        let bad = |m: &str| Err(RamifyError::InvalidModel(m.into()));
        if n == 0 || n > 128 {
            return bad("group order must lie in 1..=128");
        }
        if self.table.len() != n || self.table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return bad("composition table must be square with entries in range");
        }
        if self.distance.len() != n {
            return bad("one distance per element");
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        return bad("composition is not associative");
                    }
                }
            }
        }
        let Some(e) = self.identity() else { return bad("no identity element") };
        if self.distance[e] != Value::Infinity {
            return bad("identity must have infinite distance");
        }
        for a in 0..n {
            let Some(inv) = self.inverse(a) else { return bad("missing inverse") };
            if self.distance[inv] != self.distance[a] {
                return bad("distance is not inverse-symmetric");
            }
            if a != e && self.distance[a] == Value::Infinity {
                return bad("non-identity element with infinite distance");
            }
            for b in 0..n {
                let lower = self.distance[a].clone().min(self.distance[b].clone());
                if self.distance[self.mul(a, b)] < lower {
                    return bad("distance violates the ultrametric inequality");
                }
            }
        }
        Ok(())
    }

    /// `d(σ^i) ≥ d(σ)` for every element and power.
    pub fn powers_monotone(&self) -> bool {
        let Some(e) = self.identity() else { return false };
        (0..self.order()).all(|s| {
            let mut x = s;
            while x != e {
                if self.distance[x] < self.distance[s] {
                    return false;
                }
                x = self.mul(x, s);
            }
            true
        })
    }

    pub fn is_subgroup(&self, h: Subset) -> bool {
        let n = self.order();
        let Some(e) = self.identity() else { return false };
        if h >> n != 0 || h & (1 << e) == 0 {
            return false;
        }
        let members: Vec<usize> = (0..n).filter(|&i| h & (1 << i) != 0).collect();
        members.iter().all(|&a| members.iter().all(|&b| h & (1 << self.mul(a, b)) != 0))
    }

    /// Smallest subgroup containing `generators` (finite, so closure under products suffices).
    pub fn closure(&self, generators: Subset) -> Subset {
        let e = self.identity().expect("validated model");
        let mut h: Subset = generators | (1 << e);
        let mut queue: VecDeque<usize> = (0..self.order()).filter(|&i| h & (1 << i) != 0).collect();
        while let Some(a) = queue.pop_front() {
            for b in 0..self.order() {
                if h & (1 << b) == 0 {
                    continue;
                }
                for c in [self.mul(a, b), self.mul(b, a)] {
                    if h & (1 << c) == 0 {
                        h |= 1 << c;
                        queue.push_back(c);
                    }
                }
            }
        }
        h
    }

    /// Every subgroup, ordered by size then mask.
    pub fn subgroups(&self) -> Vec<Subset> {
        let trivial = self.closure(0);
        let mut seen = BTreeSet::from([trivial]);
        let mut queue = VecDeque::from([trivial]);
        while let Some(h) = queue.pop_front() {
            for g in 0..self.order() {
                if h & (1 << g) != 0 {
                    continue;
                }
                let next = self.closure(h | (1 << g));
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        let mut out: Vec<Subset> = seen.into_iter().collect();
        out.sort_by_key(|h| (h.count_ones(), *h));
        out
    }

    fn min_distance(&self, h: Subset) -> Option<Value> {
        let e = self.identity()?;
        (0..self.order())
            .filter(|&i| i != e && h & (1 << i) != 0)
            .map(|i| self.distance[i].clone())
            .min()
    }
}

/// The ramification ideal of `H`; `None` for the trivial subgroup.
pub fn ideal_of_subgroup(model: &GroupModel, h: Subset) -> Result<Option<Ideal>, RamifyError> {
    if !model.pure {
        return Err(RamifyError::GeneratorNotPure);
    }
    if !model.is_subgroup(h) {
        return Err(RamifyError::NotASubgroup);
    }
    let Some(min) = model.min_distance(h) else { return Ok(None) };
    let min = min.finite().cloned().ok_or_else(|| RamifyError::InvalidModel("infinite distance".into()))?;
    let zero = Rat::from_integer(0.into());
    Ok(Some(match &model.regime {
        Regime::Defectless => {
            let va = model
                .value_of_a
                .finite()
                .ok_or_else(|| RamifyError::InvalidModel("value of the generator must be finite".into()))?;
            let endpoint = min - va;
            if endpoint <= zero {
                Ideal::Unit
            } else {
                Ideal::Cut(CutIdeal { endpoint, closed: true })
            }
        }
        Regime::Defect(CutDescriptor::Principal(delta)) => {
            let endpoint = min - delta;
            // an open cut below 0 contains units; at 0 it is the maximal ideal
            if endpoint < zero {
                Ideal::Unit
            } else {
                Ideal::Cut(CutIdeal { endpoint, closed: false })
            }
        }
        Regime::Defect(CutDescriptor::Attained(_)) => {
            return Err(RamifyError::InvalidModel("a defect regime needs a principal cut".into()))
        }
    }))
}

/// Number of distinct proper ramification ideals over the nontrivial subgroups.
pub fn count_ram(model: &GroupModel) -> Result<usize, RamifyError> {
    model.validate()?;
    let mut ideals = BTreeSet::new();
    for h in model.subgroups() {
        if let Some(Ideal::Cut(c)) = ideal_of_subgroup(model, h)? {
            ideals.insert(c);
        }
    }
    Ok(ideals.len())
}

/// Distinct minimal distances over the nontrivial subgroups.
pub fn distinct_subgroup_minima(model: &GroupModel) -> usize {
    let e = model.closure(0);
    model
        .subgroups()
        .into_iter()
        .filter(|&h| h != e)
        .filter_map(|h| model.min_distance(h))
        .collect::<BTreeSet<_>>()
        .len()
}

/// Whether `H₁ ⊇ H₂` implies `I_{H₁} ⊇ I_{H₂}` across all subgroup pairs.
pub fn ideals_monotone(model: &GroupModel) -> Result<bool, RamifyError> {
    let subs = model.subgroups();
    let ideals: Vec<Option<Ideal>> = subs.iter().map(|&h| ideal_of_subgroup(model, h)).collect::<Result<_, _>>()?;
    for (i, &h1) in subs.iter().enumerate() {
        for (j, &h2) in subs.iter().enumerate() {
            if h1 & h2 != h2 {
                continue;
            }
            let ok = match (&ideals[i], &ideals[j]) {
                (_, None) | (Some(Ideal::Unit), _) => true,
                (Some(Ideal::Cut(a)), Some(Ideal::Cut(b))) => a.contains(b),
                _ => false,
            };
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// How `(b, 0)` is known to be distinguished.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Distinguished {
    Declared,
    /// Require a depth-one MacLane certificate whose best constant approximation is attained at 0.
    Certify,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BasisCheck {
    Holds { trials: usize },
    /// Coefficients `c_i` with `v(Σ c_i b^i) ≠ min v(c_i b^i)`, and the two values.
    Witness { coeffs: Vec<Elem>, value: Value, minimum: Value },
}

/// Tests that `1, b, …, b^{n−1}` is a valuation basis on random coefficient vectors.
pub fn valuation_basis_check(
    tower: &Tower,
    b: &Elem,
    how: Distinguished,
    trials: usize,
    sampler: &mut Sampler,
) -> Result<BasisCheck, RamifyError> {
    let q = tower.min_poly(b)?;
    let n = q.degree().expect("nonzero");
    if n == 1 {
        return Ok(BasisCheck::Holds { trials: 0 });
    }
    let vb = tower.valuation(b)?;
    if how == Distinguished::Certify {
        let (_, result) = tower
            .maclane(b, DEFAULT_MAX_ITERATIONS)
            .map_err(|e| RamifyError::NotDistinguishedPair(format!("{e}")))?;
        let ext = match result.extensions.as_slice() {
            [ext] if ext.is_defectless() => ext,
            _ => return Err(RamifyError::NotDistinguishedPair("no single defectless branch".into())),
        };
        if ext.depth != 1 {
            return Err(RamifyError::NotDistinguishedPair(format!("depth {}", ext.depth)));
        }
        match &ext.best_linear {
            Some((_, best)) if *best == vb => {}
            _ => return Err(RamifyError::NotDistinguishedPair("max v(b − K) is not attained at 0".into())),
        }
    }
    let k = tower.base().field();
    for _ in 0..trials {
        let mut coeffs: Vec<Elem> = (0..n)
            .map(|_| if sampler.coin(1, 4) { k.zero() } else { sampler.laurent_element(tower.base(), 3) })
            .collect();
        if coeffs.iter().all(Elem::is_zero) {
            let i = sampler.below(n);
            coeffs[i] = k.one();
        }
        let (value, minimum) = basis_defect(tower, &q, b, &vb, &coeffs).map_err(|e| match e {
            crate::invariants::InvariantError::Tower(t) => RamifyError::Tower(t),
            other => RamifyError::InvalidModel(format!("{other}")),
        })?;
        if value != minimum {
            return Ok(BasisCheck::Witness { coeffs, value, minimum });
        }
    }
    Ok(BasisCheck::Holds { trials })
}

/// `v(x^i − 1) ≥ v(x − 1)` for `1 ≤ i ≤ max_power`, on an integral `x`.
pub fn power_lemma_holds(tower: &Tower, x: &Elem, max_power: u32) -> Result<bool, TowerError> {
    let top = tower.top();
    let one = top.one();
    let base = tower.valuation(&top.sub(x, &one))?;
    let mut p = x.clone();
    for _ in 1..=max_power {
        if tower.valuation(&top.sub(&p, &one))? < base {
            return Ok(false);
        }
        p = top.mul(&p, x);
    }
    Ok(true)
}

/// Cyclic group `Z/n` with `d(σ^i) = distance(gcd(i, n))`.
pub fn cyclic_model(n: usize, distance: impl Fn(usize) -> Value, value_of_a: Value, regime: Regime) -> GroupModel {
    let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    let dist = (0..n)
        .map(|i| if i == 0 { Value::Infinity } else { distance(num_integer::gcd(i, n)) })
        .collect();
    GroupModel {
        elements: (0..n).map(|i| format!("s^{i}")).collect(),
        table,
        distance: dist,
        value_of_a,
        regime,
        pure: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use alloc::vec;

    fn elementary_9() -> GroupModel {
        let table = (0..9).map(|a| (0..9).map(|b| ((a % 3 + b % 3) % 3) + 3 * ((a / 3 + b / 3) % 3)).collect()).collect();
        GroupModel {
            elements: (0..9).map(|i| format!("({},{})", i % 3, i / 3)).collect(),
            table,
            distance: (0..9).map(|i| if i == 0 { Value::Infinity } else { Value::zero() }).collect(),
            value_of_a: Value::frac(-1, 9),
            regime: Regime::Defectless,
            pure: true,
        }
    }

    #[test]
    fn elementary_abelian_model() {
        let m = elementary_9();
        m.validate().unwrap();
        // trivial, four of order 3, whole group
        assert_eq!(m.subgroups().len(), 6);
        for h in m.subgroups().into_iter().skip(1) {
            assert_eq!(
                ideal_of_subgroup(&m, h).unwrap(),
                Some(Ideal::Cut(CutIdeal { endpoint: rat(1, 9), closed: true }))
            );
        }
        assert_eq!(ideal_of_subgroup(&m, 1).unwrap(), None);
        assert_eq!(count_ram(&m).unwrap(), 1);
        assert_eq!(ideal_of_subgroup(&m, 0b11), Err(RamifyError::NotASubgroup));
        assert!(m.powers_monotone() && ideals_monotone(&m).unwrap());
        let impure = GroupModel { pure: false, ..m };
        assert_eq!(ideal_of_subgroup(&impure, 1), Err(RamifyError::GeneratorNotPure));
    }

    #[test]
    fn cyclic_models() {
        for p in [2usize, 3, 5] {
            let two = cyclic_model(p * p, |g| Value::int(if g == p { 1 } else { 0 }), Value::frac(-1, (p * p) as i64), Regime::Defectless);
            two.validate().unwrap();
            assert_eq!(two.subgroups().len(), 3);
            assert_eq!(count_ram(&two).unwrap(), 2);
            let one = cyclic_model(p, |_| Value::int(2), Value::frac(-1, p as i64), Regime::Defectless);
            assert_eq!(count_ram(&one).unwrap(), 1);
            let defect = cyclic_model(p, |_| Value::int(1), Value::zero(), Regime::Defect(CutDescriptor::Principal(rat(-1, 2))));
            let whole = defect.subgroups()[1];
            assert_eq!(
                ideal_of_subgroup(&defect, whole).unwrap(),
                Some(Ideal::Cut(CutIdeal { endpoint: rat(3, 2), closed: false }))
            );
        }
    }

    #[test]
    fn unit_ideal_excluded() {
        let m = cyclic_model(3, |_| Value::int(-1), Value::int(-1), Regime::Defectless);
        assert_eq!(ideal_of_subgroup(&m, 0b111).unwrap(), Some(Ideal::Unit));
        assert_eq!(count_ram(&m).unwrap(), 0);
    }

    #[test]
    fn rejects_non_ultrametric() {
        let mut m = cyclic_model(4, |g| Value::int(g as i64), Value::zero(), Regime::Defectless);
        m.distance[2] = Value::int(0);
        assert!(matches!(m.validate(), Err(RamifyError::InvalidModel(_))));
        m.distance = vec![Value::Infinity, Value::int(1), Value::int(2), Value::int(1)];
        m.validate().unwrap();
    }

    #[test]
    fn cut_inclusion() {
        let a = CutIdeal { endpoint: rat(1, 2), closed: true };
        let b = CutIdeal { endpoint: rat(1, 2), closed: false };
        assert!(a.contains(&b) && !b.contains(&a));
        assert!(b.contains(&CutIdeal { endpoint: rat(1, 1), closed: true }));
    }
}
