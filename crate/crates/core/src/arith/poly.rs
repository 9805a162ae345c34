use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::monomial::{sort_terms, Monomial};
use super::scalar::{int, Scalar};
use super::VariableId;
use crate::error::{Error, Result};

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Terms are kept sorted ascending in the graded order of [`Monomial`] and
/// never carry a zero coefficient, so structural equality is mathematical
/// equality and the text form is canonical. The arity is stored explicitly
/// so that the zero polynomial still knows how many variables it lives in.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Polynomial {
    arity: usize,
    terms: Vec<(Monomial, Scalar)>,
}

fn small(nums: &[BigInt]) -> Option<Vec<i64>> {
    nums.iter().map(ToPrimitive::to_i64).collect()
}

/// Exponents packed 16 bits apiece; multiplying monomials adds keys and
/// preserves their numeric order, as long as no field overflows.
fn pack(m: &Monomial) -> u128 {
    m.exponents()
        .iter()
        .fold(0u128, |k, &e| (k << 16) | u128::from(e))
}

fn unpack(mut key: u128, arity: usize) -> Monomial {
    let mut exps = vec![0u32; arity];
    for e in exps.iter_mut().rev() {
        *e = (key & 0xFFFF) as u32;
        key >>= 16;
    }
    Monomial::from_exponents(&exps)
}

/// Merges two key-sorted lists, adding coefficients of equal keys.
fn merge_sorted(a: &[(u128, i128)], b: &[(u128, i128)]) -> Option<Vec<(u128, i128)>> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let c = a[i].1.checked_add(b[j].1)?;
                if c != 0 {
                    out.push((a[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some(out)
}

fn packed_product(a: &[(u128, i128)], b: &[(u128, i128)]) -> Option<Vec<(u128, i128)>> {
    let mut acc: Vec<(u128, i128)> = Vec::new();
    for &(kb, cb) in b {
        let shifted = a
            .iter()
            .map(|&(ka, ca)| Some((ka + kb, ca.checked_mul(cb)?)))
            .collect::<Option<Vec<_>>>()?;
        acc = merge_sorted(&acc, &shifted)?;
    }
    Some(acc)
}

/// `numerator · Π cofactors` in integer form `(d, terms)` with value
/// `Σ terms / d`; the cofactors must have integer coefficients. Terms come
/// back unsorted.
pub(crate) fn integer_lift(
    numerator: &Polynomial,
    cofactors: &[Polynomial],
) -> (BigInt, Vec<(Monomial, BigInt)>) {
    let arity = numerator.arity;
    let (d, ints) = numerator.integer_form();
    let fits = arity <= 8 && {
        let mut room: Vec<u64> = vec![0; arity];
        for p in std::iter::once(numerator).chain(cofactors) {
            for (v, r) in room.iter_mut().enumerate() {
                *r += u64::from(p.degree_in(v));
            }
        }
        room.iter().all(|&r| r < 0xFFFF)
    };
    if fits {
        let start: Option<Vec<(u128, i128)>> = numerator
            .terms
            .iter()
            .zip(&ints)
            .map(|((m, _), c)| Some((pack(m), c.to_i128()?)))
            .collect();
        let mut cur = start.map(|mut v| {
            v.sort_unstable_by_key(|t| t.0);
            v
        });
        for p in cofactors {
            let Some(a) = cur else { break };
            let b: Option<Vec<(u128, i128)>> = p
                .terms
                .iter()
                .map(|(m, c)| Some((pack(m), c.is_integer().then(|| c.numer().to_i128())??)))
                .collect();
            cur = b.and_then(|mut b| {
                b.sort_unstable_by_key(|t| t.0);
                packed_product(&a, &b)
            });
        }
        if let Some(v) = cur {
            return (
                d,
                v.into_iter()
                    .map(|(k, c)| (unpack(k, arity), BigInt::from(c)))
                    .collect(),
            );
        }
    }
    let mut cur = numerator.clone();
    for p in cofactors {
        cur = &cur * p;
    }
    let (d, ints) = cur.integer_form();
    (
        d,
        cur.terms.iter().map(|(m, _)| m.clone()).zip(ints).collect(),
    )
}

type Rows = Vec<(Monomial, Vec<i128>)>;

/// Synthetic division of every row by `d` (leading coefficient ±1).
/// `Ok(None)` when some row leaves a remainder, `Err` on overflow.
fn divide_rows(
    rows: &[(Monomial, Vec<i128>)],
    d: &[i128],
) -> std::result::Result<Option<Rows>, ()> {
    let deg = d.len() - 1;
    let lead = d[deg];
    let mut out = Vec::with_capacity(rows.len());
    for (base, row) in rows {
        let mut row = row.clone();
        while row.last() == Some(&0) {
            row.pop();
        }
        if row.len() <= deg {
            return Ok(None);
        }
        let qlen = row.len() - deg;
        let mut quo = vec![0i128; qlen];
        for k in (0..qlen).rev() {
            let top = row[k + deg] * lead;
            if top != 0 {
                for (j, &dj) in d.iter().enumerate() {
                    if dj != 0 {
                        let t = top.checked_mul(dj).ok_or(())?;
                        row[k + j] = row[k + j].checked_sub(t).ok_or(())?;
                    }
                }
            }
            quo[k] = top;
        }
        if row[..deg].iter().any(|&c| c != 0) {
            return Ok(None);
        }
        out.push((base.clone(), quo));
    }
    Ok(Some(out))
}

impl Polynomial {
    pub fn zero(arity: usize) -> Self {
        Polynomial {
            arity,
            terms: Vec::new(),
        }
    }

    pub fn one(arity: usize) -> Self {
        Self::constant(arity, Scalar::one())
    }

    pub fn constant(arity: usize, c: Scalar) -> Self {
        Self::monomial(arity, Monomial::one(arity), c)
    }

    pub fn var(arity: usize, v: VariableId) -> Self {
        Self::monomial(arity, Monomial::var(arity, v, 1), Scalar::one())
    }

    pub fn monomial(arity: usize, m: Monomial, c: Scalar) -> Self {
        assert_eq!(m.arity(), arity, "monomial arity");
        if c.is_zero() {
            return Self::zero(arity);
        }
        Polynomial {
            arity,
            terms: vec![(m, c)],
        }
    }

    /// Builds a polynomial from arbitrary terms, merging duplicates.
    pub fn from_terms(arity: usize, terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Self {
        let mut acc: HashMap<Monomial, Scalar> = HashMap::new();
        for (m, c) in terms {
            assert_eq!(m.arity(), arity, "monomial arity");
            *acc.entry(m).or_insert_with(Scalar::zero) += c;
        }
        Self::from_map(arity, acc)
    }

    fn from_map(arity: usize, acc: HashMap<Monomial, Scalar>) -> Self {
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        sort_terms(&mut terms);
        Polynomial { arity, terms }
    }

    fn from_sorted(arity: usize, terms: Vec<(Monomial, Scalar)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(terms.iter().all(|(_, c)| !c.is_zero()));
        Polynomial { arity, terms }
    }

    /// `Σ coeffs[k] · v^k` with small integer coefficients.
    pub fn univariate(arity: usize, v: VariableId, coeffs: &[i64]) -> Self {
        Self::from_terms(
            arity,
            coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| (Monomial::var(arity, v, k as u32), int(c))),
        )
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> &[(Monomial, Scalar)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        match self.terms.binary_search_by(|(t, _)| t.cmp(m)) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => Scalar::zero(),
        }
    }

    pub fn constant_term(&self) -> Scalar {
        match self.terms.first() {
            Some((m, c)) if m.is_one() => c.clone(),
            _ => Scalar::zero(),
        }
    }

    pub fn leading_term(&self) -> Option<&(Monomial, Scalar)> {
        self.terms.last()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.last().map_or(0, |(m, _)| m.degree())
    }

    pub fn degree_in(&self, v: VariableId) -> u32 {
        self.terms
            .iter()
            .map(|(m, _)| m.exponent(v))
            .max()
            .unwrap_or(0)
    }

    pub fn depends_on(&self, v: VariableId) -> bool {
        self.terms.iter().any(|(m, _)| m.exponent(v) > 0)
    }

    fn check_arity(&self, other: &Polynomial) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                left: self.arity,
                right: other.arity,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_arity(other)?;
        Ok(self.merge(other, false))
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_arity(other)?;
        Ok(self.merge(other, true))
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_arity(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn merge(&self, other: &Polynomial, negate_other: bool) -> Polynomial {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let a = &self.terms;
        let b = &other.terms;
        let sign = |c: &Scalar| if negate_other { -c.clone() } else { c.clone() };
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((b[j].0.clone(), sign(&b[j].1)));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if negate_other {
                        &a[i].1 - &b[j].1
                    } else {
                        &a[i].1 + &b[j].1
                    };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(m, c)| (m.clone(), sign(c))));
        Polynomial::from_sorted(self.arity, out)
    }

    fn mul_unchecked(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero(self.arity);
        }
        if other.terms.len() == 1 {
            let (m, c) = &other.terms[0];
            return self.mul_term(m, c);
        }
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return other.mul_term(m, c);
        }
        // Clear denominators so the inner loop is integer arithmetic; the
        // products are reduced once per output term.
        let (da, na) = self.integer_form();
        let (db, nb) = other.integer_form();
        let den = da * db;
        if let (Some(sa), Some(sb)) = (small(&na), small(&nb)) {
            if let Some(acc) = self.mul_small(other, &sa, &sb) {
                return Self::from_integer_map(
                    self.arity,
                    acc.into_iter().map(|(m, c)| (m, BigInt::from(c))),
                    &den,
                );
            }
        }
        let mut acc: HashMap<Monomial, BigInt> =
            HashMap::with_capacity(self.terms.len() * other.terms.len() / 2 + 1);
        for ((ma, _), ca) in self.terms.iter().zip(&na) {
            for ((mb, _), cb) in other.terms.iter().zip(&nb) {
                *acc.entry(ma.mul(mb)).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        Self::from_integer_map(self.arity, acc.into_iter(), &den)
    }

    fn mul_small(
        &self,
        other: &Polynomial,
        sa: &[i64],
        sb: &[i64],
    ) -> Option<HashMap<Monomial, i128>> {
        let mut acc: HashMap<Monomial, i128> =
            HashMap::with_capacity(self.terms.len() * other.terms.len() / 2 + 1);
        for ((ma, _), &ca) in self.terms.iter().zip(sa) {
            for ((mb, _), &cb) in other.terms.iter().zip(sb) {
                let p = i128::from(ca) * i128::from(cb);
                let slot = acc.entry(ma.mul(mb)).or_insert(0);
                *slot = slot.checked_add(p)?;
            }
        }
        Some(acc)
    }

    pub(crate) fn from_integer_map(
        arity: usize,
        acc: impl Iterator<Item = (Monomial, BigInt)>,
        den: &BigInt,
    ) -> Self {
        let mut terms: Vec<_> = acc
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (m, Scalar::new(c, den.clone())))
            .collect();
        sort_terms(&mut terms);
        Polynomial { arity, terms }
    }

    /// `(d, [nᵢ])` with `self = Σ (nᵢ/d)·mᵢ`.
    pub(crate) fn integer_form(&self) -> (BigInt, Vec<BigInt>) {
        let den = self.terms.iter().fold(BigInt::one(), |acc, (_, c)| {
            if c.denom().is_one() || c.denom() == &acc {
                acc
            } else {
                acc.lcm(c.denom())
            }
        });
        let nums = self
            .terms
            .iter()
            .map(|(_, c)| c.numer() * (&den / c.denom()))
            .collect();
        (den, nums)
    }

    /// Multiplication by a single term preserves the term order.
    pub fn mul_term(&self, m: &Monomial, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.arity);
        }
        Polynomial::from_sorted(
            self.arity,
            self.terms.iter().map(|(t, d)| (t.mul(m), d * c)).collect(),
        )
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        self.mul_term(&Monomial::one(self.arity), c)
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut out = Polynomial::one(self.arity);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Returns `c` with `divisor · c = self`, or `None` when no such
    /// polynomial exists.
    pub fn exact_div(&self, divisor: &Polynomial) -> Option<Polynomial> {
        if divisor.is_zero() || divisor.arity != self.arity {
            return None;
        }
        if self.is_zero() {
            return Some(Polynomial::zero(self.arity));
        }
        for v in 0..self.arity {
            if divisor.degree_in(v) > self.degree_in(v) {
                return None;
            }
        }
        if divisor.total_degree() > self.total_degree() {
            return None;
        }
        let (lead_m, lead_c) = divisor.leading_term()?;
        if divisor.terms.len() > 1 {
            let vars: Vec<VariableId> =
                (0..self.arity).filter(|&v| divisor.depends_on(v)).collect();
            if let [v] = vars[..] {
                return self.div_univariate(v, divisor);
            }
        }
        if divisor.terms.len() == 1 {
            let inv = lead_c.recip();
            let mut out = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                out.push((m.checked_div(lead_m)?, c * &inv));
            }
            return Some(Polynomial::from_sorted(self.arity, out));
        }
        let tail = &divisor.terms[..divisor.terms.len() - 1];
        let mut rem: BTreeMap<Monomial, Scalar> = self.terms.iter().cloned().collect();
        let mut quotient = Vec::new();
        while let Some((m, c)) = rem.pop_last() {
            let qm = m.checked_div(lead_m)?;
            let qc = &c / lead_c;
            for (dm, dc) in tail {
                let key = dm.mul(&qm);
                let delta = &qc * dc;
                match rem.entry(key) {
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        *e.get_mut() -= delta;
                        if e.get().is_zero() {
                            e.remove();
                        }
                    }
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(-delta);
                    }
                }
            }
            quotient.push((qm, qc));
        }
        quotient.reverse();
        Some(Polynomial::from_sorted(self.arity, quotient))
    }

    /// Exact division by a polynomial in `v` alone: synthetic division of
    /// each coefficient slice, linear in the number of terms.
    fn div_univariate(&self, v: VariableId, divisor: &Polynomial) -> Option<Polynomial> {
        let deg = divisor.degree_in(v) as usize;
        let mut d = vec![Scalar::zero(); deg + 1];
        for (m, c) in &divisor.terms {
            d[m.exponent(v) as usize] = c.clone();
        }
        if let Some(out) = self.div_univariate_small(v, &d) {
            return out;
        }
        let lead_inv = d[deg].recip();
        let mut slices: HashMap<Monomial, Vec<Scalar>> = HashMap::new();
        for (m, c) in &self.terms {
            let k = m.exponent(v) as usize;
            let row = slices.entry(m.with_exponent(v, 0)).or_default();
            if row.len() <= k {
                row.resize(k + 1, Scalar::zero());
            }
            row[k] = c.clone();
        }
        let mut out = Vec::with_capacity(self.terms.len());
        for (base, mut row) in slices {
            if row.len() <= deg {
                return None;
            }
            let qlen = row.len() - deg;
            let mut quo = vec![Scalar::zero(); qlen];
            for k in (0..qlen).rev() {
                let top = &row[k + deg] * &lead_inv;
                if !top.is_zero() {
                    for (j, dj) in d.iter().enumerate() {
                        if !dj.is_zero() {
                            row[k + j] -= &top * dj;
                        }
                    }
                }
                quo[k] = top;
            }
            if row[..deg].iter().any(|c| !c.is_zero()) {
                return None;
            }
            for (k, c) in quo.into_iter().enumerate() {
                if !c.is_zero() {
                    out.push((base.with_exponent(v, k as u32), c));
                }
            }
        }
        Some(Polynomial::from_terms(self.arity, out))
    }

    /// Integer version of [`div_univariate`](Self::div_univariate) for a
    /// divisor with small integer coefficients and leading coefficient ±1.
    /// `None` means "not applicable", `Some(None)` means "not divisible".
    fn div_univariate_small(&self, v: VariableId, d: &[Scalar]) -> Option<Option<Polynomial>> {
        let d: Vec<i128> = d
            .iter()
            .map(|c| {
                if c.is_integer() {
                    c.to_integer().to_i64().map(i128::from)
                } else {
                    None
                }
            })
            .collect::<Option<_>>()?;
        let deg = d.len() - 1;
        let lead = d[deg];
        if lead.abs() != 1 {
            return None;
        }
        let (den, nums) = self.integer_form();
        let nums = small(&nums)?;
        let mut slices: HashMap<Monomial, Vec<i128>> = HashMap::new();
        for ((m, _), &c) in self.terms.iter().zip(&nums) {
            let k = m.exponent(v) as usize;
            let row = slices.entry(m.with_exponent(v, 0)).or_default();
            if row.len() <= k {
                row.resize(k + 1, 0);
            }
            row[k] = i128::from(c);
        }
        let mut out = Vec::with_capacity(self.terms.len());
        for (base, mut row) in slices {
            if row.len() <= deg {
                return Some(None);
            }
            let qlen = row.len() - deg;
            for k in (0..qlen).rev() {
                let top = row[k + deg] * lead;
                if top != 0 {
                    for (j, &dj) in d.iter().enumerate() {
                        if dj != 0 {
                            row[k + j] = row[k + j].checked_sub(top.checked_mul(dj)?)?;
                        }
                    }
                    out.push((base.with_exponent(v, k as u32), top));
                }
            }
            if row[..deg].iter().any(|&c| c != 0) {
                return Some(None);
            }
        }
        Some(Some(Self::from_integer_map(
            self.arity,
            out.into_iter().map(|(m, c)| (m, BigInt::from(c))),
            &den,
        )))
    }

    /// The single variable a nonconstant polynomial depends on, if any.
    pub fn sole_variable(&self) -> Option<VariableId> {
        let mut vars = (0..self.arity).filter(|&v| self.depends_on(v));
        let v = vars.next()?;
        vars.next().is_none().then_some(v)
    }

    /// Divides out as many copies as possible of each factor, up to its
    /// limit. All factors must be polynomials in `v` alone with small
    /// integer coefficients and leading coefficient ±1; otherwise, or on
    /// overflow, returns `None` and the caller falls back to trial division.
    pub(crate) fn divide_out_univariate(
        &self,
        v: VariableId,
        factors: &[(&Polynomial, u32)],
    ) -> Option<(Polynomial, Vec<u32>)> {
        let divisors: Vec<Vec<i128>> = factors
            .iter()
            .map(|(p, _)| {
                let deg = p.degree_in(v) as usize;
                let mut d = vec![0i128; deg + 1];
                for (m, c) in &p.terms {
                    if !c.is_integer() {
                        return None;
                    }
                    d[m.exponent(v) as usize] = i128::from(c.to_integer().to_i64()?);
                }
                (d[deg].abs() == 1).then_some(d)
            })
            .collect::<Option<_>>()?;
        let (den, nums) = self.integer_form();
        let nums = small(&nums)?;
        let mut index: HashMap<Monomial, usize> = HashMap::new();
        let mut rows: Vec<(Monomial, Vec<i128>)> = Vec::new();
        for ((m, _), &c) in self.terms.iter().zip(&nums) {
            let k = m.exponent(v) as usize;
            let base = m.with_exponent(v, 0);
            let i = *index.entry(base.clone()).or_insert_with(|| {
                rows.push((base, Vec::new()));
                rows.len() - 1
            });
            let row = &mut rows[i].1;
            if row.len() <= k {
                row.resize(k + 1, 0);
            }
            row[k] = i128::from(c);
        }
        let mut removed = vec![0u32; factors.len()];
        for (fi, d) in divisors.iter().enumerate() {
            while removed[fi] < factors[fi].1 {
                match divide_rows(&rows, d) {
                    Ok(Some(q)) => {
                        rows = q;
                        removed[fi] += 1;
                    }
                    Ok(None) => break,
                    Err(()) => return None,
                }
            }
        }
        let mut out = Vec::with_capacity(self.terms.len());
        for (base, row) in rows {
            for (k, c) in row.into_iter().enumerate() {
                if c != 0 {
                    out.push((base.with_exponent(v, k as u32), BigInt::from(c)));
                }
            }
        }
        Some((
            Self::from_integer_map(self.arity, out.into_iter(), &den),
            removed,
        ))
    }

    /// The polynomial with `v := 0`; arity unchanged.
    pub fn substitute_zero(&self, v: VariableId) -> Polynomial {
        Polynomial::from_sorted(
            self.arity,
            self.terms
                .iter()
                .filter(|(m, _)| m.exponent(v) == 0)
                .cloned()
                .collect(),
        )
    }

    /// Coefficient of `v^k`, as a polynomial not involving `v`.
    pub fn coefficient_in(&self, v: VariableId, k: u32) -> Polynomial {
        Polynomial::from_terms(
            self.arity,
            self.terms
                .iter()
                .filter(|(m, _)| m.exponent(v) == k)
                .map(|(m, c)| (m.with_exponent(v, 0), c.clone())),
        )
    }

    /// `self / v^k` when every term is divisible by `v^k`.
    pub fn divide_by_var_power(&self, v: VariableId, k: u32) -> Option<Polynomial> {
        let mut out = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e < k {
                return None;
            }
            out.push((m.with_exponent(v, e - k), c.clone()));
        }
        Some(Polynomial::from_terms(self.arity, out))
    }

    /// `v^deg · self(…, 1/v, …)`; requires `deg ≥ degree_in(v)`.
    pub fn reverse_in(&self, v: VariableId, deg: u32) -> Polynomial {
        assert!(deg >= self.degree_in(v));
        Polynomial::from_terms(
            self.arity,
            self.terms
                .iter()
                .map(|(m, c)| (m.with_exponent(v, deg - m.exponent(v)), c.clone())),
        )
    }

    /// `c · Σ a_m · m'` with `m'ᵥ = offset − mᵥ` for each `(v, offset)`;
    /// every offset must be at least the degree in `v`.
    pub(crate) fn reflect(&self, offsets: &[(VariableId, u32)], c: &Scalar) -> Polynomial {
        let mut terms: Vec<(Monomial, Scalar)> = self
            .terms
            .iter()
            .map(|(m, a)| {
                let mut e = m.exponents().to_vec();
                for &(v, off) in offsets {
                    e[v] = off - e[v];
                }
                (Monomial::from_exponents(&e), a * c)
            })
            .collect();
        sort_terms(&mut terms);
        Polynomial::from_sorted(self.arity, terms)
    }

    /// Substitutes `v := c·v`.
    pub fn scale_variable(&self, v: VariableId, c: &Scalar) -> Polynomial {
        Polynomial::from_terms(
            self.arity,
            self.terms.iter().map(|(m, d)| {
                let mut f = Scalar::one();
                for _ in 0..m.exponent(v) {
                    f *= c;
                }
                (m.clone(), d * f)
            }),
        )
    }

    /// Moves variable `i` to position `map[i]` in a polynomial of arity
    /// `new_arity`. Several variables may be sent to the same target.
    pub fn remap(&self, new_arity: usize, map: &[VariableId]) -> Polynomial {
        assert_eq!(map.len(), self.arity, "remap table length");
        Polynomial::from_terms(
            new_arity,
            self.terms.iter().map(|(m, c)| {
                let mut e = vec![0u32; new_arity];
                for (i, &x) in m.exponents().iter().enumerate() {
                    e[map[i]] += x;
                }
                (Monomial::from_exponents(&e), c.clone())
            }),
        )
    }

    pub fn eval(&self, point: &[Scalar]) -> Result<Scalar> {
        if point.len() != self.arity {
            return Err(Error::ArityMismatch {
                left: self.arity,
                right: point.len(),
            });
        }
        let mut total = Scalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m.exponents()) {
                for _ in 0..e {
                    t *= x;
                }
            }
            total += t;
        }
        Ok(total)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let a = c.abs();
            if m.is_one() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{a}*{m}")?;
            }
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl std::ops::$tr<&Polynomial> for &Polynomial {
            type Output = Polynomial;
            /// Panics on arity mismatch; use the `checked_*` form for
            /// untrusted input.
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                self.$inner(rhs).expect("polynomial arity mismatch")
            }
        }
        impl std::ops::$tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$inner(&rhs).expect("polynomial arity mismatch")
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl std::ops::Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::from_sorted(
            self.arity,
            self.terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        )
    }
}

impl std::ops::Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(arity: usize) -> Polynomial {
        Polynomial::var(arity, 0)
    }

    #[test]
    fn difference_of_squares() {
        let one = Polynomial::one(1);
        let p = &(&one + &q(1)) * &(&one - &q(1));
        assert_eq!(p, Polynomial::univariate(1, 0, &[1, 0, -1]));
    }

    #[test]
    fn cyclotomic_product() {
        // (1 + q1 + q1²)(1 − q1) = 1 − q1³
        let a = Polynomial::univariate(2, 1, &[1, 1, 1]);
        let b = Polynomial::univariate(2, 1, &[1, -1]);
        assert_eq!(&a * &b, Polynomial::univariate(2, 1, &[1, 0, 0, -1]));
    }

    #[test]
    fn exact_division_cases() {
        let a = Polynomial::univariate(1, 0, &[1, 0, -1]);
        let b = Polynomial::univariate(1, 0, &[1, -1]);
        assert_eq!(
            a.exact_div(&b).unwrap(),
            Polynomial::univariate(1, 0, &[1, 1])
        );
        let c = Polynomial::univariate(1, 0, &[1, 1, 1]);
        assert!(a.exact_div(&c).is_none());

        let cube = Polynomial::univariate(2, 1, &[1, 0, 0, -1]);
        let lin = Polynomial::univariate(2, 1, &[1, -1]);
        let quo = cube.exact_div(&lin).unwrap();
        assert_eq!(&quo * &lin, cube);
        assert_eq!(quo, Polynomial::univariate(2, 1, &[1, 1, 1]));
    }

    #[test]
    fn arity_mismatch_is_an_error() {
        assert!(matches!(
            q(1).checked_mul(&q(2)),
            Err(Error::ArityMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn display_is_ascending_graded() {
        let p = Polynomial::from_terms(
            2,
            vec![
                (Monomial::from_exponents(&[1, 1]), int(-2)),
                (Monomial::from_exponents(&[0, 0]), int(-1)),
                (Monomial::from_exponents(&[1, 0]), int(1)),
                (
                    Monomial::from_exponents(&[0, 1]),
                    super::super::scalar::ratio(3, 4),
                ),
            ],
        );
        assert_eq!(p.to_string(), "-1 + q + 3/4*q1 - 2*q*q1");
        assert_eq!(Polynomial::zero(3).to_string(), "0");
    }

    #[test]
    fn reverse_and_remap() {
        // q + 2q² reversed at degree 3: q³·(1/q + 2/q²) = 2q + q²
        let p = Polynomial::univariate(1, 0, &[0, 1, 2]);
        assert_eq!(p.reverse_in(0, 3), Polynomial::univariate(1, 0, &[0, 2, 1]));
        let r = Polynomial::var(2, 1).remap(3, &[0, 2]);
        assert_eq!(r, Polynomial::var(3, 2));
    }
}
