use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::monomial::Monomial;
use super::poly::{integer_lift, Polynomial};
use super::scalar::Scalar;
use super::VariableId;
use crate::error::{Error, Result};

/// One factor `p^e` of a factored denominator.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DenominatorFactor {
    pub polynomial: Polynomial,
    pub exponent: u32,
}

impl DenominatorFactor {
    pub fn new(polynomial: Polynomial, exponent: u32) -> Self {
        DenominatorFactor {
            polynomial,
            exponent,
        }
    }
}

/// `numerator / ∏ pᵢ^{eᵢ}` where every `pᵢ` has constant term exactly 1.
///
/// Denominators stay factored. Every factor has unit constant term, so the
/// function is regular at the origin. After [`normalize`](Self::normalize)
/// no factor divides the numerator, and factors are split over the fixed
/// vocabulary `1 ± v`, `1 + v²`, `1 ± v + v²`. Cancellation is trial
/// division only; there is no multivariate gcd.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RationalFunction {
    numerator: Polynomial,
    denominator: BTreeMap<Polynomial, u32>,
}

/// The irreducible factors every denominator is split over, per variable.
fn vocabulary(arity: usize) -> Vec<Polynomial> {
    let mut out = Vec::with_capacity(5 * arity);
    for v in 0..arity {
        for c in [&[1, -1][..], &[1, 1], &[1, 0, 1], &[1, 1, 1], &[1, -1, 1]] {
            out.push(Polynomial::univariate(arity, v, c));
        }
    }
    out
}

impl RationalFunction {
    pub fn zero(arity: usize) -> Self {
        Self::from_polynomial(Polynomial::zero(arity))
    }

    pub fn one(arity: usize) -> Self {
        Self::from_polynomial(Polynomial::one(arity))
    }

    pub fn constant(arity: usize, c: Scalar) -> Self {
        Self::from_polynomial(Polynomial::constant(arity, c))
    }

    pub fn from_polynomial(p: Polynomial) -> Self {
        RationalFunction {
            numerator: p,
            denominator: BTreeMap::new(),
        }
    }

    /// `numerator / ∏ factors`, normalized. Factors must not vanish at the
    /// origin; each is rescaled to constant term 1.
    pub fn new(
        numerator: Polynomial,
        factors: impl IntoIterator<Item = DenominatorFactor>,
    ) -> Result<Self> {
        let arity = numerator.arity();
        let mut num = numerator;
        let mut den: BTreeMap<Polynomial, u32> = BTreeMap::new();
        for DenominatorFactor {
            polynomial,
            exponent,
        } in factors
        {
            if polynomial.arity() != arity {
                return Err(Error::ArityMismatch {
                    left: arity,
                    right: polynomial.arity(),
                });
            }
            if exponent == 0 {
                continue;
            }
            let c = polynomial.constant_term();
            if c.is_zero() {
                return Err(Error::InvalidInput(format!(
                    "denominator factor {polynomial} vanishes at the origin"
                )));
            }
            let unit = polynomial.scale(&c.recip());
            num = num.scale(&pow_scalar(&c.recip(), exponent));
            if !unit.is_one() {
                *den.entry(unit).or_insert(0) += exponent;
            }
        }
        Ok(RationalFunction {
            numerator: num,
            denominator: den,
        }
        .normalize())
    }

    /// `1 / p` for a polynomial with nonzero constant term.
    pub fn reciprocal_of(p: Polynomial) -> Result<Self> {
        let arity = p.arity();
        Self::new(Polynomial::one(arity), [DenominatorFactor::new(p, 1)])
    }

    pub fn arity(&self) -> usize {
        self.numerator.arity()
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.numerator
    }

    pub fn factors(&self) -> impl Iterator<Item = (&Polynomial, u32)> {
        self.denominator.iter().map(|(p, &e)| (p, e))
    }

    pub fn denominator_factors(&self) -> Vec<DenominatorFactor> {
        self.factors()
            .map(|(p, e)| DenominatorFactor::new(p.clone(), e))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.denominator.is_empty()
    }

    /// The expanded denominator polynomial.
    pub fn denominator_product(&self) -> Polynomial {
        let mut d = Polynomial::one(self.arity());
        for (p, e) in self.factors() {
            d = &d * &p.pow(e);
        }
        d
    }

    pub fn depends_on(&self, v: VariableId) -> bool {
        self.numerator.depends_on(v) || self.denominator.keys().any(|p| p.depends_on(v))
    }

    /// Splits factors over the vocabulary, then cancels any factor that
    /// exactly divides the numerator. Idempotent.
    pub fn normalize(self) -> Self {
        let arity = self.arity();
        let RationalFunction {
            mut numerator,
            denominator,
        } = self;
        if numerator.is_zero() {
            return RationalFunction::zero(arity);
        }
        let vocab = vocabulary(arity);
        let mut den = refine(denominator, &vocab);
        cancel_into(&mut numerator, &mut den);
        RationalFunction {
            numerator,
            denominator: den,
        }
    }

    fn check_arity(&self, other: &RationalFunction) -> Result<()> {
        if self.arity() != other.arity() {
            return Err(Error::ArityMismatch {
                left: self.arity(),
                right: other.arity(),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &RationalFunction) -> Result<RationalFunction> {
        self.check_arity(other)?;
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        let mut den = self.denominator.clone();
        for (p, &e) in &other.denominator {
            let slot = den.entry(p.clone()).or_insert(0);
            *slot = (*slot).max(e);
        }
        let lift = |f: &RationalFunction| {
            let mut n = f.numerator.clone();
            for (p, &e) in &den {
                let have = f.denominator.get(p).copied().unwrap_or(0);
                if e > have {
                    n = &n * &p.pow(e - have);
                }
            }
            n
        };
        let numerator = &lift(self) + &lift(other);
        Ok(RationalFunction {
            numerator,
            denominator: den,
        }
        .normalize())
    }

    /// Sum of many terms over one common denominator, normalized once.
    pub fn sum<'a>(
        arity: usize,
        terms: impl IntoIterator<Item = &'a RationalFunction>,
    ) -> Result<RationalFunction> {
        let terms: Vec<&RationalFunction> = terms.into_iter().filter(|t| !t.is_zero()).collect();
        let mut den: BTreeMap<Polynomial, u32> = BTreeMap::new();
        for t in &terms {
            if t.arity() != arity {
                return Err(Error::ArityMismatch {
                    left: arity,
                    right: t.arity(),
                });
            }
            for (p, &e) in &t.denominator {
                let slot = den.entry(p.clone()).or_insert(0);
                *slot = (*slot).max(e);
            }
        }
        let mut lifted: Vec<(BigInt, Vec<(Monomial, BigInt)>)> = Vec::with_capacity(terms.len());
        lifted.par_extend(terms.par_iter().map(|t| {
            let cofactors: Vec<Polynomial> = den
                .iter()
                .flat_map(|(p, &e)| {
                    let have = t.denominator.get(p).copied().unwrap_or(0);
                    std::iter::repeat_n(p.clone(), e.saturating_sub(have) as usize)
                })
                .collect();
            integer_lift(&t.numerator, &cofactors)
        }));
        let common = lifted.iter().fold(BigInt::one(), |acc, (d, _)| acc.lcm(d));
        let mut acc: HashMap<Monomial, BigInt> = HashMap::new();
        for (d, ints) in lifted {
            let scale = &common / &d;
            for (m, c) in ints {
                *acc.entry(m).or_insert_with(BigInt::zero) += c * &scale;
            }
        }
        let numerator = Polynomial::from_integer_map(arity, acc.into_iter(), &common);
        Ok(RationalFunction {
            numerator,
            denominator: den,
        }
        .normalize())
    }

    pub fn checked_sub(&self, other: &RationalFunction) -> Result<RationalFunction> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &RationalFunction) -> Result<RationalFunction> {
        self.check_arity(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(RationalFunction::zero(self.arity()));
        }
        // Cross-cancel before multiplying so numerators stay small.
        let (mut na, mut da) = (self.numerator.clone(), self.denominator.clone());
        let (mut nb, mut db) = (other.numerator.clone(), other.denominator.clone());
        cancel_into(&mut na, &mut db);
        cancel_into(&mut nb, &mut da);
        for (p, e) in db {
            *da.entry(p).or_insert(0) += e;
        }
        da.retain(|_, e| *e > 0);
        Ok(RationalFunction {
            numerator: &na * &nb,
            denominator: da,
        }
        .normalize())
    }

    pub fn mul_polynomial(&self, p: &Polynomial) -> RationalFunction {
        self * &RationalFunction::from_polynomial(p.clone())
    }

    pub fn scale(&self, c: &Scalar) -> RationalFunction {
        if c.is_zero() {
            return RationalFunction::zero(self.arity());
        }
        RationalFunction {
            numerator: self.numerator.scale(c),
            denominator: self.denominator.clone(),
        }
    }

    /// Multiplicative inverse; needs a numerator with nonzero constant term.
    pub fn recip(&self) -> Result<RationalFunction> {
        let c = self.numerator.constant_term();
        if c.is_zero() {
            return Err(Error::InvalidInput(
                "reciprocal is not regular at the origin".into(),
            ));
        }
        let mut num = Polynomial::one(self.arity());
        for (p, e) in self.factors() {
            num = &num * &p.pow(e);
        }
        RationalFunction::new(num, [DenominatorFactor::new(self.numerator.clone(), 1)])
    }

    pub fn pow(&self, e: u32) -> RationalFunction {
        let mut out = RationalFunction::one(self.arity());
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// `f` with `v := 0`.
    pub fn substitute_zero(&self, v: VariableId) -> RationalFunction {
        let mut den: BTreeMap<Polynomial, u32> = BTreeMap::new();
        for (p, e) in self.factors() {
            let s = p.substitute_zero(v);
            if !s.is_one() {
                *den.entry(s).or_insert(0) += e;
            }
        }
        RationalFunction {
            numerator: self.numerator.substitute_zero(v),
            denominator: den,
        }
        .normalize()
    }

    /// Renames variable `i` to `map[i]` inside arity `new_arity`.
    pub fn remap(&self, new_arity: usize, map: &[VariableId]) -> RationalFunction {
        let mut den: BTreeMap<Polynomial, u32> = BTreeMap::new();
        for (p, e) in self.factors() {
            *den.entry(p.remap(new_arity, map)).or_insert(0) += e;
        }
        RationalFunction {
            numerator: self.numerator.remap(new_arity, map),
            denominator: den,
        }
        .normalize()
    }

    /// `g` with `v·g = f − f|_{v=0}`.
    pub fn extract_regular_part(&self, v: VariableId) -> Result<RationalFunction> {
        let diff = self.checked_sub(&self.substitute_zero(v))?;
        let numerator = diff.numerator.divide_by_var_power(v, 1).ok_or_else(|| {
            Error::InternalConsistency(format!("f - f|_(v=0) not divisible by variable {v}"))
        })?;
        Ok(RationalFunction {
            numerator,
            denominator: diff.denominator,
        }
        .normalize())
    }

    /// `f / v`, when the numerator is divisible by `v`.
    pub fn divide_by_variable(&self, v: VariableId) -> Result<RationalFunction> {
        let numerator = self.numerator.divide_by_var_power(v, 1).ok_or_else(|| {
            Error::InternalConsistency(format!(
                "numerator not divisible by {}",
                super::variable_name(v)
            ))
        })?;
        Ok(RationalFunction {
            numerator,
            denominator: self.denominator.clone(),
        }
        .normalize())
    }

    /// Coefficient of `v^k` in the Taylor expansion, as a rational function
    /// of the remaining variables.
    pub fn coefficient_in(&self, v: VariableId, k: u32) -> Result<RationalFunction> {
        let mut f = self.clone();
        for _ in 0..k {
            if !f.depends_on(v) {
                return Ok(RationalFunction::zero(self.arity()));
            }
            f = f.extract_regular_part(v)?;
        }
        Ok(f.substitute_zero(v))
    }

    /// `f(…, 1/v, …)` brought back to canonical form.
    ///
    /// The substituted function must again be regular at the origin and
    /// vanish at `v = 0`, i.e. the numerator's degree in `v` is below the
    /// denominator's total degree in `v` and every reversed factor keeps a
    /// nonzero constant term.
    pub fn invert_variable(&self, v: VariableId) -> Result<RationalFunction> {
        self.invert_variables(&[v])
    }

    /// Simultaneous inversion `vⱼ → 1/vⱼ` of several variables, under the
    /// same regularity and vanishing conditions in each of them.
    pub fn invert_variables(&self, vars: &[VariableId]) -> Result<RationalFunction> {
        let arity = self.arity();
        let names = || {
            vars.iter()
                .map(|&v| super::variable_name(v))
                .collect::<Vec<_>>()
                .join(",")
        };
        if self.numerator.is_zero() || vars.is_empty() {
            return Ok(self.clone());
        }
        let mut shift = vec![0i64; arity];
        let num_degrees: Vec<u32> = vars.iter().map(|&v| self.numerator.degree_in(v)).collect();
        for (&v, &d) in vars.iter().zip(&num_degrees) {
            shift[v] -= i64::from(d);
        }
        let mut scale = Scalar::one();
        let mut factors = Vec::new();
        for (p, e) in self.factors() {
            let mut r = p.clone();
            for &v in vars {
                let d = r.degree_in(v);
                r = r.reverse_in(v, d);
                shift[v] += i64::from(d) * i64::from(e);
            }
            let c = r.constant_term();
            if c.is_zero() {
                return Err(Error::InversionUnsupported(format!(
                    "factor ({p}) is not regular at the origin after inverting {}",
                    names()
                )));
            }
            scale *= pow_scalar(&c.recip(), e);
            factors.push(DenominatorFactor::new(r.scale(&c.recip()), e));
        }
        for &v in vars {
            if shift[v] < 1 {
                return Err(Error::InversionUnsupported(format!(
                    "result does not vanish at {} = 0 after inversion",
                    super::variable_name(v)
                )));
            }
        }
        // eᵥ ↦ degᵥ − eᵥ + shiftᵥ is injective, so no terms merge.
        let offsets: Vec<(VariableId, u32)> = vars
            .iter()
            .zip(&num_degrees)
            .map(|(&v, &d)| (v, d + shift[v] as u32))
            .collect();
        let num = self.numerator.reflect(&offsets, &scale);
        // Reversal maps each vocabulary factor to itself and preserves
        // divisibility by factors prime to the inverted variables, so a
        // canonical input over the vocabulary stays canonical.
        let vocab = vocabulary(arity);
        if factors.iter().all(|f| vocab.contains(&f.polynomial)) {
            let mut denominator = BTreeMap::new();
            for f in factors {
                *denominator.entry(f.polynomial).or_insert(0) += f.exponent;
            }
            return Ok(RationalFunction {
                numerator: num,
                denominator,
            });
        }
        RationalFunction::new(num, factors)
    }

    pub fn eval_at(&self, point: &[Scalar]) -> Result<Scalar> {
        let mut den = Scalar::one();
        for (p, e) in self.factors() {
            let x = p.eval(point)?;
            if x.is_zero() {
                return Err(Error::Pole);
            }
            den *= pow_scalar(&x, e);
        }
        Ok(self.numerator.eval(point)? / den)
    }
}

/// Removes from `den` every factor power that divides `num`.
fn cancel_into(num: &mut Polynomial, den: &mut BTreeMap<Polynomial, u32>) {
    if num.is_zero() {
        return;
    }
    let mut by_var: BTreeMap<VariableId, Vec<Polynomial>> = BTreeMap::new();
    let mut general = Vec::new();
    for p in den.keys() {
        match p.sole_variable() {
            Some(v) => by_var.entry(v).or_default().push(p.clone()),
            None => general.push(p.clone()),
        }
    }
    for (v, ps) in by_var {
        let limits: Vec<(&Polynomial, u32)> = ps.iter().map(|p| (p, den[p])).collect();
        match num.divide_out_univariate(v, &limits) {
            Some((q, removed)) => {
                *num = q;
                for (p, r) in ps.iter().zip(removed) {
                    *den.get_mut(p).expect("factor present") -= r;
                }
            }
            None => general.extend(ps),
        }
    }
    for p in general {
        let e = den.get_mut(&p).expect("factor present");
        while *e > 0 {
            match num.exact_div(&p) {
                Some(q) => {
                    *num = q;
                    *e -= 1;
                }
                None => break,
            }
        }
    }
    den.retain(|_, e| *e > 0);
}

/// Splits composite factors by trial division against the vocabulary and
/// against each other until nothing changes.
fn refine(den: BTreeMap<Polynomial, u32>, vocab: &[Polynomial]) -> BTreeMap<Polynomial, u32> {
    let mut work: Vec<(Polynomial, u32)> = den.into_iter().collect();
    let mut out: BTreeMap<Polynomial, u32> = BTreeMap::new();
    while let Some((p, e)) = work.pop() {
        if p.is_one() || e == 0 {
            continue;
        }
        if vocab.contains(&p) {
            *out.entry(p).or_insert(0) += e;
            continue;
        }
        let split = vocab
            .iter()
            .chain(out.keys())
            .chain(work.iter().map(|(w, _)| w))
            .filter(|d| *d != &p && d.total_degree() <= p.total_degree())
            .find_map(|d| p.exact_div(d).map(|quo| (d.clone(), quo)));
        match split {
            Some((d, quo)) => {
                work.push((d, e));
                work.push((quo, e));
            }
            None => *out.entry(p).or_insert(0) += e,
        }
    }
    out
}

fn pow_scalar(x: &Scalar, e: u32) -> Scalar {
    let mut out = Scalar::one();
    for _ in 0..e {
        out *= x;
    }
    out
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denominator.is_empty() {
            return write!(f, "{}", self.numerator);
        }
        write!(f, "({})/(", self.numerator)?;
        for (i, (p, e)) in self.factors().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "({p})")?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        f.write_str(")")
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl std::ops::$tr<&RationalFunction> for &RationalFunction {
            type Output = RationalFunction;
            fn $method(self, rhs: &RationalFunction) -> RationalFunction {
                self.$inner(rhs).expect("rational function arity mismatch")
            }
        }
        impl std::ops::$tr<RationalFunction> for RationalFunction {
            type Output = RationalFunction;
            fn $method(self, rhs: RationalFunction) -> RationalFunction {
                (&self)
                    .$inner(&rhs)
                    .expect("rational function arity mismatch")
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl std::ops::Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            numerator: -&self.numerator,
            denominator: self.denominator.clone(),
        }
    }
}

impl std::ops::Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::super::scalar::{int, ratio};
    use super::*;

    fn uni(arity: usize, v: VariableId, c: &[i64]) -> Polynomial {
        Polynomial::univariate(arity, v, c)
    }

    fn over(num: Polynomial, dens: &[Polynomial]) -> RationalFunction {
        RationalFunction::new(
            num,
            dens.iter().map(|d| DenominatorFactor::new(d.clone(), 1)),
        )
        .unwrap()
    }

    #[test]
    fn geometric_minus_one() {
        let f = over(uni(1, 0, &[1]), &[uni(1, 0, &[1, -1])]);
        let g = &f - &RationalFunction::one(1);
        assert_eq!(g, over(uni(1, 0, &[0, 1]), &[uni(1, 0, &[1, -1])]));
    }

    #[test]
    fn inverse_case() {
        let a = over(
            uni(2, 1, &[1, 0, 0, 0, -1]),
            &[uni(2, 1, &[1, 0, 0, 0, 0, 0, -1])],
        );
        let b = a.recip().unwrap();
        assert_eq!(&a * &b, RationalFunction::one(2));
    }

    #[test]
    fn normalize_cancels_and_is_idempotent() {
        let f = over(uni(1, 0, &[1, 0, -1]), &[uni(1, 0, &[1, -1])]);
        assert!(f.is_polynomial());
        assert_eq!(f.numerator(), &uni(1, 0, &[1, 1]));
        assert_eq!(f.clone().normalize(), f);

        // (q − q³)/(1 + q) = q(1 − q)
        let g = over(uni(1, 0, &[0, 1, 0, -1]), &[uni(1, 0, &[1, 1])]);
        assert_eq!(g, RationalFunction::from_polynomial(uni(1, 0, &[0, 1, -1])));
        for x in [ratio(1, 3), ratio(-2, 7), int(5)] {
            let lhs = (&x - &x * &x * &x) / (int(1) + &x);
            assert_eq!(g.eval_at(&[x]).unwrap(), lhs);
        }
    }

    #[test]
    fn denominators_split_over_vocabulary() {
        // 1/(1 − q⁴) and 1/((1 − q)(1 + q)(1 + q²)) are the same value.
        let a = over(uni(1, 0, &[1]), &[uni(1, 0, &[1, 0, 0, 0, -1])]);
        let b = over(
            uni(1, 0, &[1]),
            &[
                uni(1, 0, &[1, -1]),
                uni(1, 0, &[1, 1]),
                uni(1, 0, &[1, 0, 1]),
            ],
        );
        assert_eq!(a, b);
        assert_eq!(a.factors().count(), 3);
    }

    #[test]
    fn regular_part_of_geometric() {
        let f = over(uni(1, 0, &[1]), &[uni(1, 0, &[1, -1])]);
        assert_eq!(f.extract_regular_part(0).unwrap(), f);
        let c = RationalFunction::constant(1, int(5));
        assert!(c.extract_regular_part(0).unwrap().is_zero());
    }

    #[test]
    fn inversion_rules() {
        // q/(1 − q²) ↦ −q/(1 − q²)
        let f = over(uni(1, 0, &[0, 1]), &[uni(1, 0, &[1, 0, -1])]);
        let g = f.invert_variable(0).unwrap();
        assert_eq!(g, -&f);
        let x = ratio(1, 3);
        assert_eq!(
            g.eval_at(std::slice::from_ref(&x)).unwrap(),
            f.eval_at(&[x.recip()]).unwrap()
        );

        // 1/(1 − q·q1) in q alone is outside the duality domain.
        let mixed = RationalFunction::reciprocal_of(Polynomial::from_terms(
            2,
            vec![
                (super::super::Monomial::one(2), int(1)),
                (super::super::Monomial::from_exponents(&[1, 1]), int(-1)),
            ],
        ))
        .unwrap();
        assert!(matches!(
            mixed.invert_variable(0),
            Err(Error::InversionUnsupported(_))
        ));
        // A constant does not vanish at infinity.
        assert!(RationalFunction::one(1).invert_variable(0).is_err());
    }

    #[test]
    fn pole_detection() {
        let f = over(uni(1, 0, &[1]), &[uni(1, 0, &[1, -2])]);
        assert_eq!(f.eval_at(&[ratio(1, 2)]), Err(Error::Pole));
    }

    #[test]
    fn zero_denominator_factor_rejected() {
        let r = RationalFunction::new(
            uni(1, 0, &[1]),
            [DenominatorFactor::new(uni(1, 0, &[0, 1]), 1)],
        );
        assert!(matches!(r, Err(Error::InvalidInput(_))));
    }
}
