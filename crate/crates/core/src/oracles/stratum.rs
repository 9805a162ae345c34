//! First-order integrands on the one-dimensional stratum of `M̄₁,₄` with
//! `ℤ/2` symmetry.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{Polynomial, RationalFunction, Scalar, VariableId};
use crate::formulas::prefactor;

/// Degree-two classes on the stratum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ClassSymbol {
    /// `c₁(L)`, shared by all cotangent lines on the stratum.
    CotangentLine,
    /// `c₁(𝓗)`.
    Hodge,
    /// `c₁(T*M̄)` restricted to the stratum.
    Cotangent,
}

impl fmt::Display for ClassSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassSymbol::CotangentLine => "c1(L)",
            ClassSymbol::Hodge => "c1(H)",
            ClassSymbol::Cotangent => "c1(T*M)",
        })
    }
}

/// `body + Σ jet[s]·s` where any product of two classes vanishes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetValue {
    pub body: RationalFunction,
    pub jet: BTreeMap<ClassSymbol, RationalFunction>,
}

impl JetValue {
    pub fn scalar(body: RationalFunction) -> Self {
        JetValue {
            body,
            jet: BTreeMap::new(),
        }
    }

    /// `1 + c·s`.
    pub fn one_plus(arity: usize, s: ClassSymbol, c: RationalFunction) -> Self {
        let mut jet = BTreeMap::new();
        jet.insert(s, c);
        JetValue {
            body: RationalFunction::one(arity),
            jet,
        }
    }

    pub fn arity(&self) -> usize {
        self.body.arity()
    }

    pub fn mul(&self, other: &JetValue) -> JetValue {
        let mut jet: BTreeMap<ClassSymbol, RationalFunction> = BTreeMap::new();
        for (s, c) in &self.jet {
            jet.insert(*s, c * &other.body);
        }
        for (s, c) in &other.jet {
            let term = &self.body * c;
            let slot = jet
                .entry(*s)
                .or_insert_with(|| RationalFunction::zero(term.arity()));
            *slot = &*slot + &term;
        }
        jet.retain(|_, c| !c.is_zero());
        JetValue {
            body: &self.body * &other.body,
            jet,
        }
    }

    /// `∫ self` over the stratum: the body has degree zero and drops out.
    pub fn integrate(&self, integrals: &StratumIntegrals) -> RationalFunction {
        let mut out = RationalFunction::zero(self.arity());
        for (s, c) in &self.jet {
            let v = integrals.value(*s);
            if !v.is_zero() {
                out = &out + &c.scale(&v);
            }
        }
        out
    }
}

/// `∫ s` over the stratum for each class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumIntegrals {
    pub values: BTreeMap<ClassSymbol, Scalar>,
}

impl StratumIntegrals {
    pub fn uniform(v: Scalar) -> Self {
        let values = [
            ClassSymbol::CotangentLine,
            ClassSymbol::Hodge,
            ClassSymbol::Cotangent,
        ]
        .into_iter()
        .map(|s| (s, v.clone()))
        .collect();
        StratumIntegrals { values }
    }

    /// `∫ c₁(L) = ∫ c₁(𝓗) = ∫ c₁(T*M̄) = 1/2`.
    pub fn standard() -> Self {
        Self::uniform(Scalar::new(1.into(), 2.into()))
    }

    pub fn value(&self, s: ClassSymbol) -> Scalar {
        self.values.get(&s).cloned().unwrap_or_else(Scalar::zero)
    }
}

fn frac_over_one_plus(arity: usize, v: VariableId) -> RationalFunction {
    let num = RationalFunction::from_polynomial(Polynomial::var(arity, v));
    let den = RationalFunction::reciprocal_of(Polynomial::univariate(arity, v, &[1, 1]))
        .expect("unit constant term");
    &num * &den
}

/// The integrand over the stratum for four markings, prefactor removed:
/// `(1 + 2c₁(L) − ½c₁(T*M̄)) · (1 + q/(1+q)·c₁(𝓗))/(1+q) ·
/// ∏ⱼ (1 − qⱼ/(1+qⱼ)·c₁(L))/(1+qⱼ)`.
pub fn four_point_integrand() -> JetValue {
    let n = 4;
    let arity = n + 1;
    let c = |x: i64, y: i64| RationalFunction::constant(arity, Scalar::new(x.into(), y.into()));
    let mut tangent = JetValue::one_plus(arity, ClassSymbol::CotangentLine, c(2, 1));
    tangent.jet.insert(ClassSymbol::Cotangent, c(-1, 2));
    let inv = |v: VariableId| {
        RationalFunction::reciprocal_of(Polynomial::univariate(arity, v, &[1, 1])).expect("unit")
    };
    let hodge = JetValue::one_plus(arity, ClassSymbol::Hodge, frac_over_one_plus(arity, 0))
        .mul(&JetValue::scalar(inv(0)));
    let mut out = tangent.mul(&hodge);
    for j in 1..=n {
        let line = JetValue::one_plus(
            arity,
            ClassSymbol::CotangentLine,
            -frac_over_one_plus(arity, j),
        )
        .mul(&JetValue::scalar(inv(j)));
        out = out.mul(&line);
    }
    out
}

/// `∏ qⱼ/(1 − qⱼ) · ∫ integrand`, the stratum's contribution to `Σ₄`.
pub fn four_point_contribution(integrals: &StratumIntegrals) -> RationalFunction {
    &prefactor(4) * &four_point_integrand().integrate(integrals)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at_origin(f: &RationalFunction) -> Scalar {
        f.eval_at(&vec![Scalar::zero(); f.arity()]).unwrap()
    }

    #[test]
    fn classes_square_to_zero() {
        let a = JetValue::one_plus(1, ClassSymbol::Hodge, RationalFunction::one(1));
        let sq = a.mul(&a);
        assert_eq!(
            sq.jet[&ClassSymbol::Hodge],
            RationalFunction::constant(1, Scalar::from_integer(2.into()))
        );
        assert_eq!(sq.body, RationalFunction::one(1));
    }

    #[test]
    fn bracket_constant_and_hodge_part() {
        let f = four_point_integrand().integrate(&StratumIntegrals::standard());
        assert_eq!(at_origin(&f), Scalar::new(3.into(), 4.into()));
        let j = four_point_integrand();
        let h = &j.jet[&ClassSymbol::Hodge];
        let body = &j.body;
        let ratio = (h * &body.recip().unwrap()).scale(&Scalar::new(1.into(), 2.into()));
        let expected = frac_over_one_plus(5, 0).scale(&Scalar::new(1.into(), 2.into()));
        assert_eq!(ratio, expected);
    }

    #[test]
    fn zero_integrals_give_zero() {
        let zero = StratumIntegrals::uniform(Scalar::zero());
        assert!(four_point_contribution(&zero).is_zero());
    }
}
