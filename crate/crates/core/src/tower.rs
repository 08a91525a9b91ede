//! Valued base fields and explicit extension towers over them.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use crate::algebra::linalg::{polynomial_determinant, DependencyFinder};
use crate::algebra::{rat_int, rat_ord, resultant, AlgebraError, Elem, Field, FieldKind, Poly, Rat};
use crate::maclane::{self, MacLaneResult};
use crate::value::Value;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TowerError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("minimal polynomial of `{0}` is not monic")]
    NonMonic(String),
    #[error("minimal polynomial of `{0}` must have degree at least 2")]
    DegreeTooSmall(String),
    #[error("level `{0}` is reducible")]
    Reducible(String),
    #[error("the tower is not certified unibranched: {0}")]
    NotUnibranched(String),
    #[error("element is inseparable over the base")]
    Inseparable,
    #[error("unsupported base: {0}")]
    UnsupportedBase(String),
}

/// How the base valuation is defined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValuationKind {
    /// Order of vanishing at `t = 0` on `k(t)`.
    TAdic,
    /// `p`-adic order on `Q`.
    PAdic(u32),
}

/// The base field with its discrete rank-one valuation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseField {
    field: Field,
    kind: ValuationKind,
}

impl BaseField {
    /// `constants(var)` with the `var`-adic valuation; `constants` is `F_p` or `F_p(u)`.
    pub fn t_adic(constants: &Field, var: &str) -> Result<BaseField, TowerError> {
        let ok = match constants.kind() {
            FieldKind::Prime(_) => true,
            FieldKind::Functions { base, .. } => matches!(base.kind(), FieldKind::Prime(_)),
            _ => false,
        };
        if !ok {
            return Err(TowerError::UnsupportedBase(constants.describe()));
        }
        Ok(BaseField { field: Field::functions(constants, var), kind: ValuationKind::TAdic })
    }

    pub fn p_adic(p: u32) -> Result<BaseField, TowerError> {
        if !crate::algebra::is_prime(p) {
            return Err(AlgebraError::NotPrime(p).into());
        }
        Ok(BaseField { field: Field::rationals(), kind: ValuationKind::PAdic(p) })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn kind(&self) -> &ValuationKind {
        &self.kind
    }

    /// The residue characteristic.
    pub fn residue_char(&self) -> u32 {
        match self.kind {
            ValuationKind::TAdic => self.field.characteristic(),
            ValuationKind::PAdic(p) => p,
        }
    }

    /// Characteristic exponent of the base field.
    pub fn char_exponent(&self) -> u32 {
        self.field.char_exponent()
    }

    /// The residue field: the constants for `t`-adic bases, `F_p` for `p`-adic ones.
    pub fn residue_field(&self) -> Field {
        match self.kind {
            ValuationKind::TAdic => self.field.base().expect("function field").clone(),
            ValuationKind::PAdic(p) => Field::prime(p).expect("prime"),
        }
    }

    pub fn residue_is_finite(&self) -> bool {
        self.residue_field().size().is_some()
    }

    pub fn value(&self, c: &Elem) -> Value {
        if c.is_zero() {
            return Value::Infinity;
        }
        match (&self.kind, c) {
            (ValuationKind::TAdic, Elem::Frac(f)) => Value::int(f.order_at_zero().expect("nonzero")),
            (ValuationKind::PAdic(p), Elem::Q(q)) => Value::int(rat_ord(q, *p)),
            _ => panic!("element outside the base field"),
        }
    }

    /// `π^n` for the uniformizer `π` (`t` or `p`).
    pub fn uniformizer_pow(&self, n: i64) -> Elem {
        match self.kind {
            ValuationKind::TAdic => {
                self.field.pow(&self.field.generator().expect("t"), n).expect("t is a unit")
            }
            ValuationKind::PAdic(p) => {
                let base = Rat::from_integer(BigInt::from(p));
                let r = if n >= 0 {
                    num_traits::pow(base, n as usize)
                } else {
                    num_traits::pow(base.recip(), n.unsigned_abs() as usize)
                };
                Elem::Q(r)
            }
        }
    }

    /// Residue class of an element of value zero.
    pub fn residue(&self, c: &Elem) -> Elem {
        let kappa = self.residue_field();
        match (&self.kind, c) {
            (ValuationKind::TAdic, Elem::Frac(f)) => {
                let n = f.num.coeffs().iter().find(|x| !x.is_zero()).expect("nonzero");
                let d = f.den.coeffs().iter().find(|x| !x.is_zero()).expect("nonzero");
                kappa.div(n, d).expect("nonzero")
            }
            (ValuationKind::PAdic(_), Elem::Q(q)) => kappa.from_rat(q).expect("unit"),
            _ => panic!("element outside the base field"),
        }
    }

    /// Residue of `c / π^v(c)`.
    pub fn normalized_residue(&self, c: &Elem) -> Elem {
        let v = self.value(c);
        let n = v.finite().expect("nonzero").to_integer().to_i64().expect("small");
        let u = self.field.mul(c, &self.uniformizer_pow(-n));
        self.residue(&u)
    }

    /// A fixed lift of a residue class.
    pub fn lift_residue(&self, r: &Elem) -> Elem {
        match (&self.kind, r) {
            (ValuationKind::TAdic, _) => self.field.embed(r),
            (ValuationKind::PAdic(p), Elem::Fp(a)) => {
                let a = *a as i64;
                let p = *p as i64;
                // balanced representative keeps lifts small
                let a = if a > p / 2 { a - p } else { a };
                Elem::Q(rat_int(a))
            }
            _ => panic!("residue outside F_p"),
        }
    }

    pub fn elem_to_string(&self, c: &Elem) -> String {
        self.field.elem_to_string(c)
    }
}

/// One level `name` with its defining polynomial over the previous field.
#[derive(Clone, Debug)]
pub struct TowerLevel {
    pub name: String,
    pub minpoly: Poly,
    pub field: Field,
}

/// Why valuations on the tower may be computed from norms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Unibranched {
    /// A primitive element has a single MacLane branch of full degree.
    Certified,
    /// Asserted by the input.
    Declared,
    /// Refuted: several extensions of the valuation exist.
    Refuted(usize),
    Unknown(String),
}

/// Finite extension chain `K = F_0 ⊂ F_1 ⊂ … ⊂ F_r`.
#[derive(Clone, Debug)]
pub struct Tower {
    base: BaseField,
    levels: Vec<TowerLevel>,
    status: Unibranched,
}

impl Tower {
    /// Builds the tower from `(name, minpoly)` pairs; each polynomial lies over the previous field.
    pub fn new(base: BaseField, defs: Vec<(String, Poly)>) -> Result<Tower, TowerError> {
        let mut levels: Vec<TowerLevel> = Vec::new();
        for (name, minpoly) in defs {
            let below = levels.last().map_or(base.field(), |l| &l.field).clone();
            if !minpoly.is_monic(&below) {
                return Err(TowerError::NonMonic(name));
            }
            if minpoly.degree().unwrap_or(0) < 2 {
                return Err(TowerError::DegreeTooSmall(name));
            }
            let field = Field::extension(&below, minpoly.clone(), &name)?;
            levels.push(TowerLevel { name, minpoly, field });
        }
        Ok(Tower { base, levels, status: Unibranched::Unknown("not examined".to_string()) })
    }

    /// Certifies unibranchedness with MacLane when the residue field is finite,
    /// otherwise records the declaration (if any).
    pub fn certify(mut self, declared: bool, max_iterations: usize) -> Tower {
        self.status = if self.levels.is_empty() {
            Unibranched::Certified
        } else if self.base.residue_is_finite() {
            self.certify_by_maclane(max_iterations)
        } else if declared {
            Unibranched::Declared
        } else {
            Unibranched::Unknown("infinite residue field and no declaration".to_string())
        };
        self
    }

    /// Marks the tower as declared unibranched without any check.
    pub fn declare_unibranched(mut self) -> Tower {
        self.status = Unibranched::Declared;
        self
    }

    fn certify_by_maclane(&self, max_iterations: usize) -> Unibranched {
        let d = self.degree();
        for x in self.primitive_candidates() {
            let Ok(q) = self.min_poly(&x) else { continue };
            if q.degree() != Some(d) {
                continue;
            }
            return match maclane::approximate(&self.base, &q, max_iterations) {
                Ok(res) if res.extensions.len() == 1 && res.extensions[0].is_defectless() => {
                    Unibranched::Certified
                }
                Ok(res) if res.extensions.len() > 1 => Unibranched::Refuted(res.extensions.len()),
                Ok(_) => Unibranched::Unknown("MacLane loop did not close".to_string()),
                Err(e) => Unibranched::Unknown(e.to_string()),
            };
        }
        Unibranched::Unknown("no primitive element found".to_string())
    }

    /// Small combinations of generators tried as primitive elements.
    fn primitive_candidates(&self) -> Vec<Elem> {
        let top = self.top();
        let gens: Vec<Elem> = (1..=self.levels.len()).map(|i| self.generator(i)).collect();
        let mut out = Vec::new();
        let last = gens.last().expect("nonempty").clone();
        out.push(last.clone());
        for c in 1..=3i64 {
            let mut acc = last.clone();
            for (i, g) in gens.iter().rev().skip(1).enumerate() {
                let coef = top.from_i64(c + i as i64);
                acc = top.add(&acc, &top.mul(&coef, g));
            }
            out.push(acc);
        }
        for g in gens.iter().rev().skip(1) {
            out.push(top.add(&last, &top.mul(g, g)));
            out.push(top.add(&last, &top.mul(&last, g)));
        }
        out
    }

    pub fn status(&self) -> &Unibranched {
        &self.status
    }

    pub fn is_unibranched(&self) -> bool {
        matches!(self.status, Unibranched::Certified | Unibranched::Declared)
    }

    fn require_unibranched(&self) -> Result<(), TowerError> {
        match &self.status {
            Unibranched::Certified | Unibranched::Declared => Ok(()),
            Unibranched::Refuted(n) => {
                Err(TowerError::NotUnibranched(alloc::format!("{n} extensions of the valuation")))
            }
            Unibranched::Unknown(why) => Err(TowerError::NotUnibranched(why.clone())),
        }
    }

    pub fn base(&self) -> &BaseField {
        &self.base
    }

    pub fn levels(&self) -> &[TowerLevel] {
        &self.levels
    }

    /// The field at `level` (0 is the base).
    pub fn field_at(&self, level: usize) -> &Field {
        if level == 0 {
            self.base.field()
        } else {
            &self.levels[level - 1].field
        }
    }

    pub fn top(&self) -> &Field {
        self.field_at(self.levels.len())
    }

    /// `[F_r : K]`.
    pub fn degree(&self) -> usize {
        self.levels.iter().map(|l| l.minpoly.degree().unwrap()).product()
    }

    /// The generator of `level` (1-based) as a top-field element.
    pub fn generator(&self, level: usize) -> Elem {
        let g = self.field_at(level).generator().expect("extension");
        self.top().embed_from(self.field_at(level), &g).expect("below the top")
    }

    pub fn level_of(&self, name: &str) -> Option<usize> {
        self.levels.iter().position(|l| l.name == name).map(|i| i + 1)
    }

    /// A base element as a top-field element.
    pub fn embed_base(&self, c: &Elem) -> Elem {
        self.top().embed_from(self.base.field(), c).expect("base embeds")
    }

    /// Coordinates over the base in the monomial basis of the tower.
    pub fn coordinates(&self, x: &Elem) -> Vec<Elem> {
        let mut out = Vec::with_capacity(self.degree());
        self.coords_at(self.levels.len(), x, &mut out);
        out
    }

    fn coords_at(&self, level: usize, x: &Elem, out: &mut Vec<Elem>) {
        if level == 0 {
            out.push(x.clone());
            return;
        }
        let below = self.field_at(level - 1);
        let d = self.levels[level - 1].minpoly.degree().unwrap();
        let p = x.as_poly().expect("extension element");
        for i in 0..d {
            self.coords_at(level - 1, &p.coeff(i, below), out);
        }
    }

    /// True when `x` lies in the base field.
    pub fn base_part(&self, x: &Elem) -> Option<Elem> {
        let c = self.coordinates(x);
        c[1..].iter().all(Elem::is_zero).then(|| c[0].clone())
    }

    /// `N_{F_r/K}(x)` by iterated resultants against each level's modulus.
    pub fn norm(&self, x: &Elem) -> Result<Elem, TowerError> {
        let mut cur = x.clone();
        for level in (1..=self.levels.len()).rev() {
            let below = self.field_at(level - 1);
            let m = &self.levels[level - 1].minpoly;
            let p = cur.as_poly().expect("extension element");
            cur = resultant(m, p, below)?;
        }
        Ok(cur)
    }

    /// Rows are the coordinates of `x·e` over the monomial basis `e`; the
    /// determinant is `N_{F_r/K}(x)` up to sign.
    fn multiplication_matrix(&self, x: &Elem) -> Vec<Vec<Elem>> {
        let top = self.top();
        let mut basis = alloc::vec![top.one()];
        for level in 1..=self.levels.len() {
            let g = self.generator(level);
            let d = self.levels[level - 1].minpoly.degree().unwrap();
            let mut next = Vec::with_capacity(basis.len() * d);
            let mut power = top.one();
            for _ in 0..d {
                next.extend(basis.iter().map(|e| top.mul(e, &power)));
                power = top.mul(&power, &g);
            }
            basis = next;
        }
        basis.iter().map(|e| self.coordinates(&top.mul(x, e))).collect()
    }

    /// Whether `v(x) ≤ bound` can be read off a specialization, over a `t`-adic
    /// base with constants `F_p(u)`: `u ↦ c ∈ F_p` applied to the multiplication
    /// matrix, when every entry has a denominator whose lowest `t`-coefficient
    /// survives. Such entries form a ring on which `v` can only grow under the
    /// substitution. `false` for other bases or when no `c` settles it.
    pub fn valuation_at_most_by_specialization(&self, x: &Elem, bound: &Value) -> bool {
        let k = self.base.field();
        let (ValuationKind::TAdic, FieldKind::Functions { base: consts, .. }) = (self.base.kind(), k.kind()) else {
            return false;
        };
        let FieldKind::Functions { base: prime, .. } = consts.kind() else {
            return false;
        };
        let FieldKind::Prime(p) = prime.kind() else {
            return false;
        };
        if x.is_zero() {
            return *bound == Value::Infinity;
        }
        let matrix = self.multiplication_matrix(x);
        let n = self.degree() as i64;
        let constant = |e: &Elem, c: &Elem| -> Option<Elem> {
            let f = e.as_fraction()?;
            let d = f.den.eval(c, prime);
            (!d.is_zero()).then(|| prime.mul(&f.num.eval(c, prime), &prime.inv(&d).expect("nonzero")))
        };
        let special = |f: &Poly, c: &Elem| -> Option<Poly> {
            Some(Poly::from_coeffs(f.coeffs().iter().map(|a| constant(a, c)).collect::<Option<_>>()?))
        };
        let order = |f: &Poly| f.coeffs().iter().position(|a| !a.is_zero()).unwrap_or(0) as i64;
        // each row is scaled by the product of its specialized denominators
        let row_at = |row: &[Elem], c: &Elem| -> Option<(Vec<Poly>, i64)> {
            let mut nums = Vec::with_capacity(row.len());
            let mut dens = Vec::with_capacity(row.len());
            for e in row {
                let f = e.as_fraction()?;
                let lowest = f.den.coeffs().iter().find(|d| !d.is_zero())?;
                if constant(lowest, c)?.is_zero() {
                    return None;
                }
                nums.push(special(&f.num, c)?);
                dens.push(special(&f.den, c)?);
            }
            let mut scaled = Vec::with_capacity(row.len());
            for (i, num) in nums.iter().enumerate() {
                let mut p = num.clone();
                for (j, d) in dens.iter().enumerate() {
                    if i != j {
                        p = p.mul(d, prime);
                    }
                }
                scaled.push(p);
            }
            Some((scaled, dens.iter().map(order).sum()))
        };
        (0..*p).any(|c| {
            let c = Elem::Fp(c);
            let Some(rows) = matrix.iter().map(|row| row_at(row, &c)).collect::<Option<Vec<_>>>() else {
                return false;
            };
            let shift: i64 = rows.iter().map(|r| r.1).sum();
            let det = polynomial_determinant(rows.into_iter().map(|r| r.0).collect(), prime);
            let value = if det.is_zero() {
                Value::Infinity
            } else {
                Value::Finite(rat_int(order(&det) - shift) / rat_int(n))
            };
            value <= *bound
        })
    }

    /// `v(x) = v(N(x)) / [F_r : K]`.
    pub fn valuation(&self, x: &Elem) -> Result<Value, TowerError> {
        self.require_unibranched()?;
        Ok(self.valuation_unchecked(x)?)
    }

    fn valuation_unchecked(&self, x: &Elem) -> Result<Value, TowerError> {
        if x.is_zero() {
            return Ok(Value::Infinity);
        }
        let n = self.norm(x)?;
        Ok(match self.base.value(&n) {
            Value::Finite(r) => Value::Finite(r / rat_int(self.degree() as i64)),
            Value::Infinity => return Err(TowerError::Reducible(self.levels.last().unwrap().name.clone())),
        })
    }

    /// Monic minimal polynomial of `x` over the base, via the first linear
    /// dependency among the coordinate vectors of `1, x, x², …`.
    pub fn min_poly(&self, x: &Elem) -> Result<Poly, TowerError> {
        let k = self.base.field();
        let top = self.top();
        let mut finder = DependencyFinder::new(k);
        let mut power = top.one();
        for _ in 0..=self.degree() {
            if let Some(c) = finder.push(self.coordinates(&power)) {
                return Ok(Poly::from_coeffs(c));
            }
            power = top.mul(&power, x);
        }
        unreachable!("degree bound guarantees a dependency")
    }

    /// `f(x)` for `f` over the base.
    pub fn evaluate(&self, f: &Poly, x: &Elem) -> Elem {
        f.eval_in(x, self.top(), self.base.field()).expect("base embeds")
    }

    /// `f(X + a)` as a polynomial over the top field.
    pub fn shifted(&self, f: &Poly, a: &Elem) -> Poly {
        let top = self.top();
        f.map(|c| self.embed_base(c)).taylor_shift(a, top)
    }

    /// Values of the coefficients of a polynomial over the top field.
    pub fn coefficient_values(&self, f: &Poly) -> Result<Vec<Value>, TowerError> {
        f.coeffs().iter().map(|c| self.valuation(c)).collect()
    }

    pub fn elem_to_string(&self, x: &Elem) -> String {
        self.top().elem_to_string(x)
    }

    /// MacLane data of the minimal polynomial of `x` (finite residue fields only).
    pub fn maclane(&self, x: &Elem, max_iterations: usize) -> Result<(Poly, MacLaneResult), maclane::MacLaneError> {
        let q = self.min_poly(x).map_err(|e| maclane::MacLaneError::Tower(e.to_string()))?;
        let res = maclane::approximate(&self.base, &q, max_iterations)?;
        Ok((q, res))
    }

    /// Valuation ignoring the certificate; used by falsifiers only.
    pub fn raw_valuation(&self, x: &Elem) -> Result<Value, TowerError> {
        self.valuation_unchecked(x)
    }
}

/// A fact with its provenance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Fact<T> {
    Computed(T),
    Declared(T),
    Unknown,
}

impl<T: Clone> Fact<T> {
    pub fn value(&self) -> Option<T> {
        match self {
            Fact::Computed(x) | Fact::Declared(x) => Some(x.clone()),
            Fact::Unknown => None,
        }
    }

    pub fn or_declared(self, declared: Option<T>) -> Fact<T> {
        match (self, declared) {
            (Fact::Unknown, Some(d)) => Fact::Declared(d),
            (f, _) => f,
        }
    }
}

/// Ostrowski data of `K(x)|K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionInvariants {
    pub degree: usize,
    pub e: Fact<u64>,
    pub f: Fact<u64>,
    pub defect: Fact<u64>,
    pub depth: Fact<usize>,
    pub tame_degree: Fact<u64>,
}

/// Declared values used when the residue field is not finite.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DeclaredInvariants {
    pub depth: Option<usize>,
    pub residue_degree: Option<u64>,
    pub residue_sep_degree: Option<u64>,
    pub tame_degree: Option<u64>,
}

/// Computes `e, f, defect, depth, tame degree` of `K(x)|K`.
pub fn extension_invariants(
    tower: &Tower,
    x: &Elem,
    declared: &DeclaredInvariants,
    max_iterations: usize,
) -> Result<ExtensionInvariants, TowerError> {
    tower.require_unibranched()?;
    let q = tower.min_poly(x)?;
    let n = q.degree().unwrap();
    let p = tower.base().residue_char().max(1) as u64;
    if tower.base().residue_is_finite() {
        let res = maclane::approximate(tower.base(), &q, max_iterations)
            .map_err(|e| TowerError::NotUnibranched(e.to_string()))?;
        if res.extensions.len() != 1 {
            return Err(TowerError::NotUnibranched(alloc::format!(
                "{} extensions of the valuation",
                res.extensions.len()
            )));
        }
        let ext = &res.extensions[0];
        if !ext.is_defectless() {
            return Ok(ExtensionInvariants {
                degree: n,
                e: Fact::Unknown,
                f: Fact::Unknown,
                defect: Fact::Unknown,
                depth: Fact::Unknown.or_declared(declared.depth),
                tame_degree: Fact::Unknown,
            });
        }
        // finite residue fields are perfect, so the residue extension is separable
        let tame = crate::algebra::prime_to_part(ext.e, p) * ext.f;
        return Ok(ExtensionInvariants {
            degree: n,
            e: Fact::Computed(ext.e),
            f: Fact::Computed(ext.f),
            defect: Fact::Computed(1),
            depth: Fact::Computed(ext.depth),
            tame_degree: Fact::Computed(tame),
        });
    }
    // value group of K(x) contains v(x^i) = i·v(x), so e is at least the denominator of v(x)
    let e = match tower.valuation(x)? {
        Value::Finite(r) => r.denom().to_u64().unwrap_or(1),
        Value::Infinity => 1,
    };
    let f = declared.residue_degree;
    let defect = f.and_then(|f| {
        let ef = e * f;
        (ef != 0 && n as u64 % ef == 0).then(|| n as u64 / ef)
    });
    let tame = match (defect, declared.residue_sep_degree) {
        (Some(1), Some(sep)) => Some(crate::algebra::prime_to_part(e, p) * sep),
        _ => None,
    };
    let tame_fact = match tame {
        Some(t) => Fact::Computed(t),
        None => Fact::Unknown.or_declared(declared.tame_degree),
    };
    Ok(ExtensionInvariants {
        degree: n,
        e: Fact::Computed(e),
        f: Fact::Unknown.or_declared(f),
        defect: defect.map_or(Fact::Unknown, Fact::Computed),
        depth: Fact::Unknown.or_declared(declared.depth),
        tame_degree: tame_fact,
    })
}

/// Checks `v(xy) = v(x) + v(y)` and the ultrametric law on a pair; `Err` carries the failing law.
pub fn falsify_pair(tower: &Tower, x: &Elem, y: &Elem) -> Result<(), TowerError> {
    let top = tower.top();
    let vx = tower.raw_valuation(x)?;
    let vy = tower.raw_valuation(y)?;
    let vxy = tower.raw_valuation(&top.mul(x, y))?;
    if vxy != vx.clone() + vy.clone() {
        return Err(TowerError::NotUnibranched("multiplicativity fails".to_string()));
    }
    let vs = tower.raw_valuation(&top.add(x, y))?;
    let lo = vx.clone().min(vy.clone());
    if vs < lo || (vx != vy && vs != lo) {
        return Err(TowerError::NotUnibranched("ultrametric law fails".to_string()));
    }
    Ok(())
}

impl Fact<u64> {
    pub fn is_one(&self) -> bool {
        self.value().is_some_and(|v| v.is_one())
    }
}
