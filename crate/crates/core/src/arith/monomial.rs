use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

use super::{variable_name, VariableId};

/// Exponent vector over the variables `q, q1, …`.
///
/// Ordered graded-lexicographically: lower total degree first, and within a
/// degree the larger power of the earlier variable first (`q² < q·q1 < q1²`).
/// This is a monomial order, so it also drives exact division.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(SmallVec<[u32; 8]>);

impl Monomial {
    pub fn one(arity: usize) -> Self {
        Monomial(SmallVec::from_elem(0, arity))
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        Monomial(SmallVec::from_slice(exps))
    }

    pub fn var(arity: usize, v: VariableId, power: u32) -> Self {
        let mut m = Self::one(arity);
        m.0[v] = power;
        m
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exponent(&self, v: VariableId) -> u32 {
        self.0[v]
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` when every exponent of `other` is at most that of `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = SmallVec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if b > a {
                return None;
            }
            out.push(a - b);
        }
        Some(Monomial(out))
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn with_exponent(&self, v: VariableId, e: u32) -> Monomial {
        let mut m = self.clone();
        m.0[v] = e;
        m
    }

    /// Componentwise `≤ orders`, and total degree within `total` if given.
    pub fn within(&self, orders: &[u32], total: Option<u32>) -> bool {
        self.0.iter().zip(orders).all(|(e, o)| e <= o) && total.is_none_or(|t| self.degree() <= t)
    }
}

impl Monomial {
    /// An integer whose order agrees with the monomial order, when the
    /// exponents are small enough to pack.
    pub(crate) fn sort_key(&self) -> Option<u128> {
        if self.0.len() > 8 {
            return None;
        }
        let mut key: u128 = u128::from(self.degree());
        for i in 0..8 {
            let e = self.0.get(i).copied().unwrap_or(0);
            if e > 0xFFF {
                return None;
            }
            key = (key << 12) | u128::from(0xFFF - e);
        }
        Some(key)
    }
}

/// Sorts terms ascending in the monomial order.
pub(crate) fn sort_terms<T>(terms: &mut Vec<(Monomial, T)>) {
    if terms.iter().all(|(m, _)| m.sort_key().is_some()) {
        let mut keyed: Vec<(u128, (Monomial, T))> = terms
            .drain(..)
            .map(|t| (t.0.sort_key().expect("checked"), t))
            .collect();
        keyed.sort_unstable_by_key(|k| k.0);
        terms.extend(keyed.into_iter().map(|k| k.1));
    } else {
        terms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            f.write_str(&variable_name(v))?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}
