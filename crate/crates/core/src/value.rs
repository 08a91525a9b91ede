//! Values in the rank-one group `Q ∪ {∞}`.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Neg, Sub};

use num_traits::Zero;

use crate::algebra::{rat_int, Rat};

/// A rational value or infinity (the value of zero).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Finite(Rat),
    Infinity,
}

impl Value {
    pub fn zero() -> Value {
        Value::Finite(Rat::zero())
    }

    pub fn int(n: i64) -> Value {
        Value::Finite(rat_int(n))
    }

    pub fn frac(n: i64, d: i64) -> Value {
        Value::Finite(crate::algebra::rat(n, d))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Value::Finite(_))
    }

    pub fn finite(&self) -> Option<&Rat> {
        match self {
            Value::Finite(r) => Some(r),
            Value::Infinity => None,
        }
    }

    /// Scales a finite value by an integer; `0·∞ = 0`, `n·∞ = ∞` for `n > 0`.
    pub fn times(&self, n: i64) -> Value {
        match self {
            Value::Finite(r) => Value::Finite(r * rat_int(n)),
            Value::Infinity if n == 0 => Value::zero(),
            Value::Infinity => Value::Infinity,
        }
    }

    pub fn min(self, other: Value) -> Value {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Value) -> Value {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl From<Rat> for Value {
    fn from(r: Rat) -> Self {
        Value::Finite(r)
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Finite(a), Value::Finite(b)) => a.cmp(b),
            (Value::Finite(_), Value::Infinity) => Ordering::Less,
            (Value::Infinity, Value::Finite(_)) => Ordering::Greater,
            (Value::Infinity, Value::Infinity) => Ordering::Equal,
        }
    }
}

impl Add for Value {
    type Output = Value;
    fn add(self, rhs: Value) -> Value {
        match (self, rhs) {
            (Value::Finite(a), Value::Finite(b)) => Value::Finite(a + b),
            _ => Value::Infinity,
        }
    }
}

impl<'a> Add<&'a Value> for &'a Value {
    type Output = Value;
    fn add(self, rhs: &Value) -> Value {
        self.clone() + rhs.clone()
    }
}

impl Neg for Value {
    type Output = Value;
    /// Negation of a finite value. Panics on infinity.
    fn neg(self) -> Value {
        match self {
            Value::Finite(a) => Value::Finite(-a),
            Value::Infinity => panic!("negation of an infinite value"),
        }
    }
}

impl Sub for Value {
    type Output = Value;
    /// `a - b` for finite `b`. Panics when `b` is infinite.
    fn sub(self, rhs: Value) -> Value {
        self + (-rhs)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Finite(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Value::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Value::Infinity => write!(f, "inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_laws() {
        let a = Value::frac(-1, 3);
        assert_eq!(a.clone() + Value::Infinity, Value::Infinity);
        assert!(Value::Infinity > Value::int(1_000_000));
        assert_eq!(a.clone().min(Value::Infinity), a);
        assert_eq!(Value::Infinity.times(0), Value::zero());
        assert_eq!(Value::frac(1, 2).times(4), Value::int(2));
    }
}
