use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::{is_prime, AlgebraError, Poly, Rat};

/// A coefficient field, shared by reference.
///
/// Fields are built from the prime fields by adjoining a transcendental
/// (`Functions`) or by quotienting by a monic polynomial (`Extension`).
#[derive(Clone)]
pub struct Field(Arc<FieldKind>);

#[derive(Debug)]
pub enum FieldKind {
    Rationals,
    Prime(u32),
    /// Rational functions in `var` over `base`.
    Functions { base: Field, var: String },
    /// `base[var] / (modulus)`; the modulus is monic and assumed irreducible.
    Extension { base: Field, modulus: Poly, var: String },
}

/// A reduced rational function: `den` is monic and coprime to `num`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fraction {
    pub num: Poly,
    pub den: Poly,
}

/// A field element in canonical form, so equality is structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Elem {
    Q(Rat),
    Fp(u32),
    Frac(Box<Fraction>),
    /// Residue class represented by its reduced polynomial.
    Ext(Poly),
}

impl Elem {
    pub fn is_zero(&self) -> bool {
        match self {
            Elem::Q(q) => q.is_zero(),
            Elem::Fp(a) => *a == 0,
            Elem::Frac(f) => f.num.is_zero(),
            Elem::Ext(p) => p.is_zero(),
        }
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        match (&*self.0, &*other.0) {
            (FieldKind::Rationals, FieldKind::Rationals) => true,
            (FieldKind::Prime(p), FieldKind::Prime(q)) => p == q,
            (FieldKind::Functions { base: a, var: x }, FieldKind::Functions { base: b, var: y }) => {
                x == y && a == b
            }
            (
                FieldKind::Extension { base: a, modulus: m, var: x },
                FieldKind::Extension { base: b, modulus: n, var: y },
            ) => x == y && m == n && a == b,
            _ => false,
        }
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

impl Field {
    pub fn rationals() -> Field {
        Field(Arc::new(FieldKind::Rationals))
    }

    pub fn prime(p: u32) -> Result<Field, AlgebraError> {
        if !is_prime(p) || p > 1 << 20 {
            return Err(AlgebraError::NotPrime(p));
        }
        Ok(Field(Arc::new(FieldKind::Prime(p))))
    }

    pub fn functions(base: &Field, var: &str) -> Field {
        Field(Arc::new(FieldKind::Functions { base: base.clone(), var: var.to_string() }))
    }

    /// `base[var]/(modulus)`. The modulus must be monic of degree at least 1.
    pub fn extension(base: &Field, modulus: Poly, var: &str) -> Result<Field, AlgebraError> {
        match modulus.lc() {
            Some(c) if base.is_one(c) => {}
            _ => return Err(AlgebraError::FieldMismatch),
        }
        Ok(Field(Arc::new(FieldKind::Extension {
            base: base.clone(),
            modulus,
            var: var.to_string(),
        })))
    }

    pub fn kind(&self) -> &FieldKind {
        &self.0
    }

    pub fn base(&self) -> Option<&Field> {
        match &*self.0 {
            FieldKind::Functions { base, .. } | FieldKind::Extension { base, .. } => Some(base),
            _ => None,
        }
    }

    pub fn var(&self) -> Option<&str> {
        match &*self.0 {
            FieldKind::Functions { var, .. } | FieldKind::Extension { var, .. } => Some(var),
            _ => None,
        }
    }

    pub fn modulus(&self) -> Option<&Poly> {
        match &*self.0 {
            FieldKind::Extension { modulus, .. } => Some(modulus),
            _ => None,
        }
    }

    /// Degree over the base for extensions, 1 otherwise.
    pub fn relative_degree(&self) -> usize {
        self.modulus().and_then(Poly::degree).unwrap_or(1)
    }

    pub fn characteristic(&self) -> u32 {
        match &*self.0 {
            FieldKind::Rationals => 0,
            FieldKind::Prime(p) => *p,
            FieldKind::Functions { base, .. } | FieldKind::Extension { base, .. } => {
                base.characteristic()
            }
        }
    }

    /// The characteristic exponent: `p` in characteristic `p`, 1 in characteristic 0.
    pub fn char_exponent(&self) -> u32 {
        match self.characteristic() {
            0 => 1,
            p => p,
        }
    }

    /// Number of elements when the field is finite.
    pub fn size(&self) -> Option<u64> {
        match &*self.0 {
            FieldKind::Rationals | FieldKind::Functions { .. } => None,
            FieldKind::Prime(p) => Some(*p as u64),
            FieldKind::Extension { base, .. } => {
                let q = base.size()?;
                q.checked_pow(self.relative_degree() as u32)
            }
        }
    }

    /// All elements of a finite field, in a fixed order starting with zero.
    pub fn elements(&self) -> Option<Vec<Elem>> {
        match &*self.0 {
            FieldKind::Prime(p) => Some((0..*p).map(Elem::Fp).collect()),
            FieldKind::Extension { base, .. } => {
                let base_elems = base.elements()?;
                let d = self.relative_degree();
                let mut out = Vec::new();
                let mut digits = alloc::vec![0usize; d];
                loop {
                    let coeffs = digits.iter().map(|&i| base_elems[i].clone()).collect();
                    out.push(Elem::Ext(Poly::from_coeffs(coeffs)));
                    let mut i = 0;
                    loop {
                        if i == d {
                            return Some(out);
                        }
                        digits[i] += 1;
                        if digits[i] < base_elems.len() {
                            break;
                        }
                        digits[i] = 0;
                        i += 1;
                    }
                }
            }
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        match &*self.0 {
            FieldKind::Rationals => "Q".to_string(),
            FieldKind::Prime(p) => format!("F_{p}"),
            FieldKind::Functions { base, var } => format!("{}({var})", base.describe()),
            FieldKind::Extension { base, modulus, var } => {
                format!("{}[{var}]/({})", base.describe(), base.poly_to_string(modulus, var))
            }
        }
    }

    pub fn zero(&self) -> Elem {
        match &*self.0 {
            FieldKind::Rationals => Elem::Q(Rat::zero()),
            FieldKind::Prime(_) => Elem::Fp(0),
            FieldKind::Functions { base, .. } => Elem::Frac(Box::new(Fraction {
                num: Poly::zero(),
                den: Poly::constant(base.one()),
            })),
            FieldKind::Extension { .. } => Elem::Ext(Poly::zero()),
        }
    }

    pub fn one(&self) -> Elem {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Elem {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> Elem {
        match &*self.0 {
            FieldKind::Rationals => Elem::Q(Rat::from_integer(n.clone())),
            FieldKind::Prime(p) => Elem::Fp(n.mod_floor(&BigInt::from(*p)).to_u32().unwrap_or(0)),
            FieldKind::Functions { base, .. } | FieldKind::Extension { base, .. } => {
                self.embed(&base.from_bigint(n))
            }
        }
    }

    /// Image of a rational number; fails when the denominator vanishes in this field.
    pub fn from_rat(&self, q: &Rat) -> Result<Elem, AlgebraError> {
        let n = self.from_bigint(q.numer());
        let d = self.from_bigint(q.denom());
        self.div(&n, &d)
    }

    /// Embeds an element of the immediate base field.
    pub fn embed(&self, c: &Elem) -> Elem {
        match &*self.0 {
            FieldKind::Functions { base, .. } => Elem::Frac(Box::new(Fraction {
                num: Poly::constant(c.clone()),
                den: Poly::constant(base.one()),
            })),
            FieldKind::Extension { .. } => Elem::Ext(Poly::constant(c.clone())),
            _ => c.clone(),
        }
    }

    /// Embeds an element of any field below this one in the construction chain.
    pub fn embed_from(&self, from: &Field, c: &Elem) -> Result<Elem, AlgebraError> {
        if from == self {
            return Ok(c.clone());
        }
        let base = self.base().ok_or(AlgebraError::FieldMismatch)?;
        Ok(self.embed(&base.embed_from(from, c)?))
    }

    /// The adjoined variable or the class of the modulus variable.
    pub fn generator(&self) -> Option<Elem> {
        match &*self.0 {
            FieldKind::Functions { base, .. } => Some(Elem::Frac(Box::new(Fraction {
                num: Poly::x(base),
                den: Poly::constant(base.one()),
            }))),
            FieldKind::Extension { base, .. } => {
                let x = Poly::x(base);
                Some(Elem::Ext(self.reduce(&x)))
            }
            _ => None,
        }
    }

    /// Reduces a polynomial over the base modulo the modulus.
    pub fn reduce(&self, p: &Poly) -> Poly {
        match &*self.0 {
            FieldKind::Extension { base, modulus, .. } => p.rem_monic(modulus, base),
            _ => p.clone(),
        }
    }

    /// Builds the class of a base polynomial in an extension field.
    pub fn class_of(&self, p: &Poly) -> Elem {
        Elem::Ext(self.reduce(p))
    }

    /// Builds the fraction `num/den` in a function field.
    pub fn fraction(&self, num: Poly, den: Poly) -> Result<Elem, AlgebraError> {
        let base = match &*self.0 {
            FieldKind::Functions { base, .. } => base,
            _ => return Err(AlgebraError::FieldMismatch),
        };
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(Elem::Frac(Box::new(normalize_fraction(num, den, base)?)))
    }

    pub fn is_one(&self, a: &Elem) -> bool {
        *a == self.one()
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        match (&*self.0, a, b) {
            (FieldKind::Rationals, Elem::Q(x), Elem::Q(y)) => Elem::Q(x + y),
            (FieldKind::Prime(p), Elem::Fp(x), Elem::Fp(y)) => {
                Elem::Fp(((*x as u64 + *y as u64) % *p as u64) as u32)
            }
            (FieldKind::Functions { base, .. }, Elem::Frac(x), Elem::Frac(y)) => {
                if x.num.is_zero() {
                    return b.clone();
                }
                if y.num.is_zero() {
                    return a.clone();
                }
                let (num, den) = if x.den == y.den {
                    (x.num.add(&y.num, base), x.den.clone())
                } else {
                    (
                        x.num.mul(&y.den, base).add(&y.num.mul(&x.den, base), base),
                        x.den.mul(&y.den, base),
                    )
                };
                Elem::Frac(Box::new(
                    normalize_fraction(num, den, base).expect("nonzero denominator"),
                ))
            }
            (FieldKind::Extension { base, .. }, Elem::Ext(x), Elem::Ext(y)) => {
                Elem::Ext(x.add(y, base))
            }
            _ => panic!("element does not belong to {}", self.describe()),
        }
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        match (&*self.0, a) {
            (FieldKind::Rationals, Elem::Q(x)) => Elem::Q(-x),
            (FieldKind::Prime(p), Elem::Fp(x)) => Elem::Fp(if *x == 0 { 0 } else { p - x }),
            (FieldKind::Functions { base, .. }, Elem::Frac(x)) => Elem::Frac(Box::new(Fraction {
                num: x.num.neg(base),
                den: x.den.clone(),
            })),
            (FieldKind::Extension { base, .. }, Elem::Ext(x)) => Elem::Ext(x.neg(base)),
            _ => panic!("element does not belong to {}", self.describe()),
        }
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        match (&*self.0, a, b) {
            (FieldKind::Rationals, Elem::Q(x), Elem::Q(y)) => Elem::Q(x * y),
            (FieldKind::Prime(p), Elem::Fp(x), Elem::Fp(y)) => {
                Elem::Fp(((*x as u64 * *y as u64) % *p as u64) as u32)
            }
            (FieldKind::Functions { base, .. }, Elem::Frac(x), Elem::Frac(y)) => {
                if x.num.is_zero() || y.num.is_zero() {
                    return self.zero();
                }
                // cross-cancel before multiplying to keep degrees small
                let g1 = x.num.gcd(&y.den, base).expect("nonzero");
                let g2 = y.num.gcd(&x.den, base).expect("nonzero");
                let n1 = x.num.div_exact(&g1, base);
                let d2 = y.den.div_exact(&g1, base);
                let n2 = y.num.div_exact(&g2, base);
                let d1 = x.den.div_exact(&g2, base);
                let num = n1.mul(&n2, base);
                let den = d1.mul(&d2, base);
                let c = base.inv(den.lc().expect("nonzero")).expect("nonzero");
                Elem::Frac(Box::new(Fraction { num: num.scale(&c, base), den: den.scale(&c, base) }))
            }
            (FieldKind::Extension { base, modulus, .. }, Elem::Ext(x), Elem::Ext(y)) => {
                Elem::Ext(x.mul(y, base).rem_monic(modulus, base))
            }
            _ => panic!("element does not belong to {}", self.describe()),
        }
    }

    pub fn inv(&self, a: &Elem) -> Result<Elem, AlgebraError> {
        if a.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(match (&*self.0, a) {
            (FieldKind::Rationals, Elem::Q(x)) => Elem::Q(x.recip()),
            (FieldKind::Prime(p), Elem::Fp(x)) => Elem::Fp(inv_mod(*x, *p)),
            (FieldKind::Functions { base, .. }, Elem::Frac(x)) => {
                let c = base.inv(x.num.lc().expect("nonzero"))?;
                Elem::Frac(Box::new(Fraction {
                    num: x.den.scale(&c, base),
                    den: x.num.scale(&c, base),
                }))
            }
            (FieldKind::Extension { base, modulus, var }, Elem::Ext(x)) => {
                let (g, s, _) = x.ext_gcd(modulus, base)?;
                if g.degree() != Some(0) {
                    return Err(AlgebraError::ZeroDivisor(var.clone()));
                }
                let c = base.inv(&g.coeffs()[0])?;
                Elem::Ext(s.scale(&c, base).rem_monic(modulus, base))
            }
            _ => panic!("element does not belong to {}", self.describe()),
        })
    }

    pub fn div(&self, a: &Elem, b: &Elem) -> Result<Elem, AlgebraError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// `a^n`; negative exponents invert.
    pub fn pow(&self, a: &Elem, n: i64) -> Result<Elem, AlgebraError> {
        let base = if n < 0 { self.inv(a)? } else { a.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = self.one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            e >>= 1;
            if e > 0 {
                sq = self.mul(&sq, &sq);
            }
        }
        Ok(acc)
    }

    pub fn sum<'a>(&self, it: impl IntoIterator<Item = &'a Elem>) -> Elem {
        it.into_iter().fold(self.zero(), |acc, x| self.add(&acc, x))
    }

    /// Canonical textual form, parseable back by the problem-file grammar.
    pub fn elem_to_string(&self, a: &Elem) -> String {
        match (&*self.0, a) {
            (FieldKind::Rationals, Elem::Q(x)) => {
                if x.is_integer() {
                    x.numer().to_string()
                } else {
                    format!("{}/{}", x.numer(), x.denom())
                }
            }
            (FieldKind::Prime(_), Elem::Fp(x)) => x.to_string(),
            (FieldKind::Functions { base, var }, Elem::Frac(x)) => {
                let num = base.poly_to_string(&x.num, var);
                if x.den.degree() == Some(0) {
                    return num;
                }
                let den = base.poly_to_string(&x.den, var);
                format!("{}/{}", wrap(&num), wrap(&den))
            }
            (FieldKind::Extension { base, var, .. }, Elem::Ext(x)) => base.poly_to_string(x, var),
            _ => panic!("element does not belong to {}", self.describe()),
        }
    }

    /// Prints a polynomial with coefficients in this field, highest degree first.
    pub fn poly_to_string(&self, p: &Poly, var: &str) -> String {
        if p.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, c) in p.coeffs().iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mut s = self.elem_to_string(c);
            let negative = s.starts_with('-') && !s[1..].contains([' ', '+', '-', '*', '(']);
            if negative {
                s.remove(0);
            }
            let atomic = !s.contains([' ', '+', '-', '*', '(']);
            let term = match i {
                0 => {
                    if atomic {
                        s
                    } else {
                        wrap(&s)
                    }
                }
                _ => {
                    let mono = if i == 1 { var.to_string() } else { format!("{var}^{i}") };
                    if s == "1" {
                        mono
                    } else if atomic && !s.contains('/') {
                        format!("{s}*{mono}")
                    } else {
                        format!("{}*{mono}", wrap(&s))
                    }
                }
            };
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            out.push_str(&term);
        }
        out
    }
}

fn wrap(s: &str) -> String {
    let atomic = !s.contains([' ', '+', '-', '*', '/']);
    if atomic {
        s.to_string()
    } else {
        format!("({s})")
    }
}

fn inv_mod(x: u32, p: u32) -> u32 {
    let (mut a, mut b) = (x as i64, p as i64);
    let (mut s0, mut s1) = (1i64, 0i64);
    while b != 0 {
        let q = a / b;
        (a, b) = (b, a - q * b);
        (s0, s1) = (s1, s0 - q * s1);
    }
    s0.rem_euclid(p as i64) as u32
}

fn normalize_fraction(num: Poly, den: Poly, base: &Field) -> Result<Fraction, AlgebraError> {
    if num.is_zero() {
        return Ok(Fraction { num, den: Poly::constant(base.one()) });
    }
    let (num, den) = if den.degree() == Some(0) {
        (num, den)
    } else {
        let g = num.gcd(&den, base)?;
        if g.degree() == Some(0) {
            (num, den)
        } else {
            (num.div_exact(&g, base), den.div_exact(&g, base))
        }
    };
    let c = base.inv(den.lc().ok_or(AlgebraError::DivisionByZero)?)?;
    if base.is_one(&c) {
        return Ok(Fraction { num, den });
    }
    Ok(Fraction { num: num.scale(&c, base), den: den.scale(&c, base) })
}

impl Fraction {
    /// Order of vanishing at the variable `= 0`.
    pub fn order_at_zero(&self) -> Option<i64> {
        let n = self.num.coeffs().iter().position(|c| !c.is_zero())? as i64;
        let d = self.den.coeffs().iter().position(|c| !c.is_zero())? as i64;
        Some(n - d)
    }
}

impl Elem {
    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            Elem::Q(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_fraction(&self) -> Option<&Fraction> {
        match self {
            Elem::Frac(f) => Some(f),
            _ => None,
        }
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        match self {
            Elem::Ext(p) => Some(p),
            _ => None,
        }
    }
}
