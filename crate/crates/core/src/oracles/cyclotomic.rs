//! Exact arithmetic in `ℚ(ζ)` for a primitive cube or fourth root of unity,
//! and fixed-point sums over the strata with `ℤ/3` and `ℤ/4` symmetry.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{Polynomial, RationalFunction, Scalar, VariableId};
use crate::error::{Error, Result};

/// `a + b·ζ` with `ζ` a fixed primitive root of unity of order `base`:
/// `ζ² = −1 − ζ` for `base = 3`, `ζ² = −1` for `base = 4`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CyclotomicNumber {
    base: u32,
    a: Scalar,
    b: Scalar,
}

fn check_base(base: u32) -> Result<()> {
    match base {
        3 | 4 => Ok(()),
        _ => Err(Error::InvalidInput(format!(
            "cyclotomic base must be 3 or 4, got {base}"
        ))),
    }
}

impl CyclotomicNumber {
    pub fn new(base: u32, a: Scalar, b: Scalar) -> Result<Self> {
        check_base(base)?;
        Ok(CyclotomicNumber { base, a, b })
    }

    pub fn rational(base: u32, a: Scalar) -> Result<Self> {
        Self::new(base, a, Scalar::zero())
    }

    pub fn zeta(base: u32) -> Result<Self> {
        Self::new(base, Scalar::zero(), Scalar::one())
    }

    /// `ζᵏ` for any integer `k`.
    pub fn zeta_pow(base: u32, k: i64) -> Result<Self> {
        let z = Self::zeta(base)?;
        let k = k.rem_euclid(i64::from(base));
        let mut out = Self::rational(base, Scalar::one())?;
        for _ in 0..k {
            out = &out * &z;
        }
        Ok(out)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    /// Coordinate along `1`.
    pub fn re(&self) -> &Scalar {
        &self.a
    }

    /// Coordinate along `ζ`.
    pub fn im(&self) -> &Scalar {
        &self.b
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// The image under `ζ ↦ ζ̄ = ζ⁻¹`.
    pub fn conj(&self) -> Self {
        match self.base {
            3 => CyclotomicNumber {
                base: 3,
                a: &self.a - &self.b,
                b: -&self.b,
            },
            _ => CyclotomicNumber {
                base: self.base,
                a: self.a.clone(),
                b: -&self.b,
            },
        }
    }

    /// `x·x̄`, a rational number.
    pub fn norm(&self) -> Scalar {
        let p = self * &self.conj();
        debug_assert!(p.is_rational());
        p.a
    }

    /// `x + x̄`, a rational number.
    pub fn trace(&self) -> Scalar {
        let s = self + &self.conj();
        debug_assert!(s.is_rational());
        s.a
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::InvalidInput("division by zero in ℚ(ζ)".into()));
        }
        let c = self.conj();
        Ok(CyclotomicNumber {
            base: self.base,
            a: c.a / &n,
            b: c.b / n,
        })
    }

    pub fn pow(&self, e: i32) -> Result<Self> {
        let x = if e < 0 { self.inv()? } else { self.clone() };
        let mut out = Self::rational(self.base, Scalar::one())?;
        for _ in 0..e.unsigned_abs() {
            out = &out * &x;
        }
        Ok(out)
    }

    fn same_base(&self, other: &Self) {
        assert_eq!(self.base, other.base, "mixing cyclotomic fields");
    }
}

impl<'a> Add<&'a CyclotomicNumber> for &'a CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn add(self, o: &CyclotomicNumber) -> CyclotomicNumber {
        self.same_base(o);
        CyclotomicNumber {
            base: self.base,
            a: &self.a + &o.a,
            b: &self.b + &o.b,
        }
    }
}

impl<'a> Sub<&'a CyclotomicNumber> for &'a CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn sub(self, o: &CyclotomicNumber) -> CyclotomicNumber {
        self + &-o
    }
}

impl Neg for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        CyclotomicNumber {
            base: self.base,
            a: -&self.a,
            b: -&self.b,
        }
    }
}

impl<'a> Mul<&'a CyclotomicNumber> for &'a CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn mul(self, o: &CyclotomicNumber) -> CyclotomicNumber {
        self.same_base(o);
        let ac = &self.a * &o.a;
        let bd = &self.b * &o.b;
        let cross = &self.a * &o.b + &self.b * &o.a;
        let (a, b) = match self.base {
            3 => (&ac - &bd, cross - bd),
            _ => (ac - bd, cross),
        };
        CyclotomicNumber {
            base: self.base,
            a,
            b,
        }
    }
}

impl fmt::Display for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = if self.base == 3 { "ζ₃" } else { "ζ₄" };
        let one = Scalar::one();
        let im = if self.b == one {
            z.to_string()
        } else if self.b == -one {
            format!("-{z}")
        } else {
            format!("{}{z}", self.b)
        };
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{im}"),
            (false, false) if im.starts_with('-') => write!(f, "{}{im}", self.a),
            (false, false) => write!(f, "{}+{im}", self.a),
        }
    }
}

impl Serialize for CyclotomicNumber {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Polynomial with coefficients in `ℚ(ζ)`, kept as `re + ζ·im`.
#[derive(Clone, Debug)]
struct CyclotomicPolynomial {
    base: u32,
    re: Polynomial,
    im: Polynomial,
}

impl CyclotomicPolynomial {
    fn constant(arity: usize, c: &CyclotomicNumber) -> Self {
        CyclotomicPolynomial {
            base: c.base,
            re: Polynomial::constant(arity, c.a.clone()),
            im: Polynomial::constant(arity, c.b.clone()),
        }
    }

    /// `1 − c·v`.
    fn linear(arity: usize, v: VariableId, c: &CyclotomicNumber) -> Self {
        let var = Polynomial::var(arity, v);
        CyclotomicPolynomial {
            base: c.base,
            re: &Polynomial::one(arity) - &var.scale(&c.a),
            im: -&var.scale(&c.b),
        }
    }

    fn mul(&self, o: &Self) -> Self {
        let ac = &self.re * &o.re;
        let bd = &self.im * &o.im;
        let cross = &(&self.re * &o.im) + &(&self.im * &o.re);
        let (re, im) = match self.base {
            3 => (&ac - &bd, &cross - &bd),
            _ => (&ac - &bd, cross),
        };
        CyclotomicPolynomial {
            base: self.base,
            re,
            im,
        }
    }
}

/// One group element's term `c / ((1 − χ_H q) ∏ⱼ (1 − χⱼ qⱼ))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixedPointSummand {
    pub coefficient: CyclotomicNumber,
    pub hodge: CyclotomicNumber,
    pub insertions: Vec<CyclotomicNumber>,
}

/// Fixed-point data of one stratum: the summands and the group order, by
/// which the sum is divided.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightData {
    pub order: u32,
    pub summands: Vec<FixedPointSummand>,
}

/// `(re, im)` of a summand as rational functions in `q, q₁, …`.
fn summand_parts(s: &FixedPointSummand, base: u32) -> Result<(RationalFunction, RationalFunction)> {
    let arity = s.insertions.len() + 1;
    let mut num = CyclotomicPolynomial::constant(arity, &s.coefficient);
    let mut den = Vec::new();
    let chars = std::iter::once(&s.hodge).chain(&s.insertions);
    for (v, chi) in chars.enumerate() {
        if chi.base != base || s.coefficient.base != base {
            return Err(Error::InvalidInput(
                "summand mixes cyclotomic fields".into(),
            ));
        }
        if chi.is_rational() {
            den.push(&Polynomial::one(arity) - &Polynomial::var(arity, v).scale(&chi.a));
        } else {
            // 1/(1 − χv) = (1 − χ̄v)/(1 − tr(χ)v + N(χ)v²)
            num = num.mul(&CyclotomicPolynomial::linear(arity, v, &chi.conj()));
            let var = Polynomial::var(arity, v);
            let quad = &(&Polynomial::one(arity) - &var.scale(&chi.trace()))
                + &(&var * &var).scale(&chi.norm());
            den.push(quad);
        }
    }
    let over = |p: Polynomial| -> Result<RationalFunction> {
        let mut f = RationalFunction::from_polynomial(p);
        for d in &den {
            f = f.checked_mul(&RationalFunction::reciprocal_of(d.clone())?)?;
        }
        Ok(f)
    };
    Ok((over(num.re)?, over(num.im)?))
}

/// `(1/order) Σ summands`, computed in `ℚ(ζ)(q, q₁, …)`. The total must be
/// rational; a nonzero `ζ`-coordinate is reported as an error.
pub fn cyclotomic_fixed_point_sum(data: &WeightData) -> Result<RationalFunction> {
    check_base(data.order)?;
    let arity = data.summands.first().map_or(1, |s| s.insertions.len() + 1);
    let mut re = Vec::new();
    let mut im = Vec::new();
    for s in &data.summands {
        if s.insertions.len() + 1 != arity {
            return Err(Error::InvalidInput(
                "summands disagree on the number of insertions".into(),
            ));
        }
        let (r, i) = summand_parts(s, data.order)?;
        re.push(r);
        im.push(i);
    }
    let im = RationalFunction::sum(arity, &im)?;
    if !im.is_zero() {
        return Err(Error::InternalConsistency(format!(
            "fixed-point sum is not rational; ζ-coordinate {im}"
        )));
    }
    let scale = Scalar::new(1.into(), data.order.into());
    Ok(RationalFunction::sum(arity, &re)?.scale(&scale))
}

fn z(base: u32, k: i64) -> CyclotomicNumber {
    CyclotomicNumber::zeta_pow(base, k).expect("valid base")
}

fn num(base: u32, a: i64) -> CyclotomicNumber {
    CyclotomicNumber::rational(base, Scalar::from_integer(a.into())).expect("valid base")
}

/// `1 − ζᵏ`.
fn one_minus(base: u32, k: i64) -> CyclotomicNumber {
    &num(base, 1) - &z(base, k)
}

fn quotient(top: CyclotomicNumber, bottom: &[CyclotomicNumber]) -> CyclotomicNumber {
    bottom
        .iter()
        .fold(top, |acc, d| &acc * &d.inv().expect("nonzero"))
}

/// The `ℤ/3` point for three markings: coefficients
/// `(η − 1)³/((1 − η⁻⁴)(1 − η⁻²)²)` and its conjugate, Hodge characters
/// `η², η`, insertion characters `η, η²`.
pub fn z3_three_point_data() -> WeightData {
    let b = 3;
    let eta = z(b, 1);
    let eta2 = z(b, 2);
    let m1 = &eta - &num(b, 1);
    let m2 = &eta2 - &num(b, 1);
    let c1 = quotient(
        m1.pow(3).expect("power"),
        &[one_minus(b, -4), one_minus(b, -2), one_minus(b, -2)],
    );
    let c2 = quotient(
        m2.pow(3).expect("power"),
        &[one_minus(b, -2), one_minus(b, -1), one_minus(b, -1)],
    );
    WeightData {
        order: 3,
        summands: vec![
            FixedPointSummand {
                coefficient: c1,
                hodge: eta2.clone(),
                insertions: vec![eta.clone(); 3],
            },
            FixedPointSummand {
                coefficient: c2,
                hodge: eta,
                insertions: vec![eta2; 3],
            },
        ],
    }
}

/// The `ℤ/3` point for two markings: coefficients
/// `(η − 1)²/((1 − η²)(1 − η))` and its conjugate, Hodge characters `η², η`,
/// insertion characters `η, η²`.
pub fn z3_two_point_data() -> WeightData {
    let b = 3;
    let eta = z(b, 1);
    let eta2 = z(b, 2);
    let c1 = quotient(
        (&eta - &num(b, 1)).pow(2).expect("power"),
        &[one_minus(b, 2), one_minus(b, 1)],
    );
    let c2 = quotient(
        (&eta2 - &num(b, 1)).pow(2).expect("power"),
        &[one_minus(b, 1), one_minus(b, 2)],
    );
    WeightData {
        order: 3,
        summands: vec![
            FixedPointSummand {
                coefficient: c1,
                hodge: eta2.clone(),
                insertions: vec![eta.clone(); 2],
            },
            FixedPointSummand {
                coefficient: c2,
                hodge: eta,
                insertions: vec![eta2; 2],
            },
        ],
    }
}

/// The `ℤ/4` point for two markings with the given Hodge characters:
/// coefficients `(−i − 1)²/(2(1 + i))` and `(i − 1)²/(2(1 − i))`, insertion
/// characters `−i` and `i`.
pub fn z4_two_point_data(hodge: [CyclotomicNumber; 2]) -> WeightData {
    let b = 4;
    let i = z(b, 1);
    let two = num(b, 2);
    let one = num(b, 1);
    let c1 = quotient((&-&i - &one).pow(2).expect("power"), &[&two * &(&one + &i)]);
    let c2 = quotient((&i - &one).pow(2).expect("power"), &[&two * &(&one - &i)]);
    let [h1, h2] = hodge;
    WeightData {
        order: 4,
        summands: vec![
            FixedPointSummand {
                coefficient: c1,
                hodge: h1,
                insertions: vec![-&i; 2],
            },
            FixedPointSummand {
                coefficient: c2,
                hodge: h2,
                insertions: vec![i; 2],
            },
        ],
    }
}

/// The Hodge characters `1` and `−1`, as read off `(1 − q)` and `(1 + q)`.
pub fn z4_literal_hodge() -> [CyclotomicNumber; 2] {
    [num(4, 1), num(4, -1)]
}

/// Candidate Hodge characters `±1, ±ζ, ±ζ̄` without repeats.
pub fn hodge_candidates(base: u32) -> Vec<CyclotomicNumber> {
    let mut out: Vec<CyclotomicNumber> = Vec::new();
    for c in [num(base, 1), z(base, 1), z(base, -1)] {
        for x in [c.clone(), -&c] {
            if !out.contains(&x) {
                out.push(x);
            }
        }
    }
    out
}

/// Hodge characters, one per summand, under which a fixed-point sum hits a
/// target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Assignment {
    pub hodge: Vec<CyclotomicNumber>,
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.hodge.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Replaces the Hodge character of every summand of `data` by each tuple
/// of candidates in turn and keeps those whose (rational) sum equals
/// `target`. Tuples giving an irrational sum are skipped.
pub fn character_search(data: &WeightData, target: &RationalFunction) -> Result<Vec<Assignment>> {
    let cands = hodge_candidates(data.order);
    let k = data.summands.len();
    let mut found = Vec::new();
    let total = cands.len().pow(k as u32);
    for code in 0..total {
        let mut c = code;
        let mut trial = data.clone();
        for s in &mut trial.summands {
            s.hodge = cands[c % cands.len()].clone();
            c /= cands.len();
        }
        let value = match cyclotomic_fixed_point_sum(&trial) {
            Ok(v) => v,
            Err(Error::InternalConsistency(_)) => continue,
            Err(e) => return Err(e),
        };
        if value.arity() == target.arity() && value.checked_sub(target)?.is_zero() {
            found.push(Assignment {
                hodge: trial.summands.into_iter().map(|s| s.hodge).collect(),
            });
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> Scalar {
        Scalar::new(a.into(), b.into())
    }

    #[test]
    fn field_laws() {
        for base in [3, 4] {
            let z = CyclotomicNumber::zeta(base).unwrap();
            assert_eq!(z.pow(base as i32).unwrap(), num(base, 1));
            let x = CyclotomicNumber::new(base, q(2, 3), q(-5, 7)).unwrap();
            assert_eq!(&x * &x.inv().unwrap(), num(base, 1));
            assert!((&x * &x.conj()).is_rational());
            assert_eq!(x.conj().conj(), x);
            assert_eq!(z.conj(), z.inv().unwrap());
        }
        let eta = CyclotomicNumber::zeta(3).unwrap();
        assert_eq!(&(&num(3, 1) + &eta) + &(&eta * &eta), num(3, 0));
        assert!(CyclotomicNumber::zeta(5).is_err());
    }

    #[test]
    fn conjugate_pair_is_rational() {
        for base in [3, 4] {
            let one = num(base, 1);
            let data = WeightData {
                order: base,
                summands: vec![
                    FixedPointSummand {
                        coefficient: z(base, 1),
                        hodge: one.clone(),
                        insertions: vec![one.clone()],
                    },
                    FixedPointSummand {
                        coefficient: z(base, -1),
                        hodge: one.clone(),
                        insertions: vec![one],
                    },
                ],
            };
            let f = cyclotomic_fixed_point_sum(&data).unwrap();
            let trace = z(base, 1).trace() / Scalar::from_integer(base.into());
            assert_eq!(f.eval_at(&[Scalar::zero(), Scalar::zero()]).unwrap(), trace);
        }
    }

    #[test]
    fn lone_irrational_summand_is_rejected() {
        let data = WeightData {
            order: 4,
            summands: vec![FixedPointSummand {
                coefficient: z(4, 1),
                hodge: num(4, 1),
                insertions: vec![],
            }],
        };
        assert!(matches!(
            cyclotomic_fixed_point_sum(&data),
            Err(Error::InternalConsistency(_))
        ));
    }

    #[test]
    fn zero_target_has_no_assignment() {
        let data = z3_three_point_data();
        let zero = RationalFunction::zero(4);
        assert!(character_search(&data, &zero).unwrap().is_empty());
    }

    #[test]
    fn display() {
        assert_eq!(z(3, 1).to_string(), "ζ₃");
        assert_eq!(z(3, 2).to_string(), "-1-ζ₃");
        assert_eq!((-&z(4, 1)).to_string(), "-ζ₄");
        assert_eq!(num(4, 2).to_string(), "2");
    }
}
