//! Closed-form generating functions and the string-equation pushdown.
//!
//! Variable `0` is always the Hodge variable `q` (tracking `𝓗⁻¹`), variable
//! `i ≥ 1` is `qᵢ` (tracking `Lᵢ`). All constructors return canonical
//! rational functions with denominators split over `1 ± v`, `1 + v²`,
//! `1 ± v + v²`.

use num_traits::One;

use crate::arith::{
    parse_polynomial, DenominatorFactor, Polynomial, RationalFunction, Scalar, VariableId,
};
use crate::error::{Error, Result};

fn scalar(a: i64, b: i64) -> Scalar {
    Scalar::new(a.into(), b.into())
}

fn poly(arity: usize, v: VariableId, coeffs: &[i64]) -> Polynomial {
    Polynomial::univariate(arity, v, coeffs)
}

fn over(num: Polynomial, den: Vec<(Polynomial, u32)>) -> RationalFunction {
    RationalFunction::new(
        num,
        den.into_iter().map(|(p, e)| DenominatorFactor::new(p, e)),
    )
    .expect("fixed denominators are units at the origin")
}

fn recip(p: Polynomial) -> RationalFunction {
    over(Polynomial::one(p.arity()), vec![(p, 1)])
}

fn add(a: &RationalFunction, b: &RationalFunction) -> RationalFunction {
    a + b
}

fn mul(a: &RationalFunction, b: &RationalFunction) -> RationalFunction {
    a * b
}

/// `1/((1 − v⁴)(1 − v⁶))` with the denominator in irreducible factors.
fn modular_series(arity: usize, v: VariableId) -> RationalFunction {
    over(Polynomial::one(arity), modular_denominator(arity, v))
}

fn modular_denominator(arity: usize, v: VariableId) -> Vec<(Polynomial, u32)> {
    vec![
        (poly(arity, v, &[1, -1]), 2),
        (poly(arity, v, &[1, 1]), 2),
        (poly(arity, v, &[1, 0, 1]), 1),
        (poly(arity, v, &[1, 1, 1]), 1),
        (poly(arity, v, &[1, -1, 1]), 1),
    ]
}

/// `χ(M̄₁,₁, 1/(1 − vL₁)) = 1/((1 − v⁴)(1 − v⁶))`.
pub fn one_point_l(arity: usize, v: VariableId) -> RationalFunction {
    modular_series(arity, v)
}

/// `χ(M̄₁,₁, 1/(1 − vL₁⁻¹)) = (1 − v⁴ − v⁶)/((1 − v⁴)(1 − v⁶))`.
pub fn one_point_linv(arity: usize, v: VariableId) -> RationalFunction {
    over(
        poly(arity, v, &[1, 0, 0, 0, -1, 0, -1]),
        modular_denominator(arity, v),
    )
}

/// `P₁,₁ = χ(M̄₁,₁, 1/((1 − q𝓗⁻¹)(1 − q₁L₁)))`, arity 2.
pub fn one_point_mixed() -> RationalFunction {
    let q10 = RationalFunction::from_polynomial(Polynomial::univariate(
        2,
        0,
        &[0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1],
    ));
    let bracket = &modular_series(2, 1) - &mul(&q10, &modular_series(2, 0));
    let qq1 = &Polynomial::one(2) - &(&Polynomial::var(2, 0) * &Polynomial::var(2, 1));
    mul(&recip(qq1), &bracket)
}

/// `∏ qᵢ/(1 − qᵢ)` over `i = 1..n`, arity `n + 1`.
pub fn prefactor(n: usize) -> RationalFunction {
    let arity = n + 1;
    let mut num = Polynomial::one(arity);
    for i in 1..=n {
        num = &num * &Polynomial::var(arity, i);
    }
    over(
        num,
        (1..=n).map(|i| (poly(arity, i, &[1, -1]), 1)).collect(),
    )
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "Kawasaki terms need n >= 2, got n = {n}"
        )));
    }
    Ok(())
}

fn factorial(n: usize) -> Scalar {
    (1..=n as i64).fold(Scalar::one(), |acc, k| acc * scalar(k, 1))
}

/// Fundamental-class term `∏ qᵢ/(1 − qᵢ) · (n − 1)!/(24 (1 − q) ∏(1 − qᵢ))`.
pub fn main_term(n: usize) -> Result<RationalFunction> {
    check_n(n)?;
    let arity = n + 1;
    let c = factorial(n - 1) * scalar(1, 24);
    let den = (0..=n).map(|v| (poly(arity, v, &[1, -1]), 1)).collect();
    Ok(mul(
        &prefactor(n),
        &over(Polynomial::constant(arity, c), den),
    ))
}

/// `1/((1 + q)∏(1 + qᵢ)) · (c + w·(q/(1 + q) − Σ qᵢ/(1 + qᵢ)))`.
fn involution_term(n: usize, c: Scalar, w: Scalar) -> RationalFunction {
    let arity = n + 1;
    let frac = |v: VariableId| {
        over(
            Polynomial::var(arity, v),
            vec![(poly(arity, v, &[1, 1]), 1)],
        )
    };
    let mut inner = frac(0);
    for i in 1..=n {
        inner = &inner - &frac(i);
    }
    let bracket = add(&RationalFunction::constant(arity, c), &inner.scale(&w));
    let den = (0..=n).map(|v| (poly(arity, v, &[1, 1]), 1)).collect();
    mul(&over(Polynomial::one(arity), den), &bracket)
}

/// `N / (k ∏_{v=0..n} Φ(v))` for a per-variable cyclotomic factor `Φ`.
fn cyclotomic_term(n: usize, num: Polynomial, k: i64, phi: &[i64]) -> RationalFunction {
    let arity = n + 1;
    let den = (0..=n).map(|v| (poly(arity, v, phi), 1)).collect();
    over(num.scale(&scalar(1, k)), den)
}

fn elementary(arity: usize, vars: &[VariableId], k: usize) -> Polynomial {
    fn rec(arity: usize, vars: &[VariableId], k: usize, acc: Polynomial) -> Polynomial {
        if k == 0 {
            return acc;
        }
        let mut out = Polynomial::zero(arity);
        for (j, &v) in vars.iter().enumerate() {
            let next = &acc * &Polynomial::var(arity, v);
            out = &out + &rec(arity, &vars[j + 1..], k - 1, next);
        }
        out
    }
    rec(arity, vars, k, Polynomial::one(arity))
}

fn sigma4(constant: Scalar) -> RationalFunction {
    mul(&prefactor(4), &involution_term(4, constant, scalar(1, 2)))
}

fn sigma3_members() -> Vec<RationalFunction> {
    let a = 4;
    let q = Polynomial::var(a, 0);
    let one = Polynomial::one(a);
    let vars = [1, 2, 3];
    let e1 = elementary(a, &vars, 1);
    let e2 = elementary(a, &vars, 2);
    let e3 = elementary(a, &vars, 3);
    let two = Polynomial::constant(a, scalar(2, 1));
    let num = &(&(&(&q - &one) - &(&(&two + &q) * &e1)) - &(&(&one + &(&two * &q)) * &e2))
        + &(&(&one - &q) * &e3);
    vec![
        involution_term(3, scalar(-3, 4), scalar(1, 2)),
        cyclotomic_term(3, num, 3, &[1, 1, 1]),
    ]
}

fn sigma2_members() -> Vec<RationalFunction> {
    let num4 = parse_polynomial("1 - q + q1 + q2 + q*q1 + q*q2 - q1*q2 + q*q1*q2", 3)
        .expect("literal polynomial");
    let num3 = parse_polynomial("1 - q + 2*q1 + 2*q2 + q*q1 + q*q2 + q1*q2 - q*q1*q2", 3)
        .expect("literal polynomial");
    vec![
        involution_term(2, scalar(3, 8), scalar(1, 4)),
        cyclotomic_term(2, num4, 4, &[1, 0, 1]),
        cyclotomic_term(2, num3, 3, &[1, 1, 1]),
    ]
}

/// The summands of the bracket in `Σₙ = ∏ qᵢ/(1 − qᵢ) · [ … ]`, in the
/// order they are usually written; empty for `n ≥ 5`.
pub fn sigma_bracket(n: usize) -> Result<Vec<RationalFunction>> {
    check_n(n)?;
    Ok(match n {
        2 => sigma2_members(),
        3 => sigma3_members(),
        4 => vec![involution_term(4, scalar(3, 4), scalar(1, 2))],
        _ => Vec::new(),
    })
}

/// Orbifold correction `Σₙ`; zero for `n ≥ 5`.
pub fn sigma(n: usize) -> Result<RationalFunction> {
    let members = sigma_bracket(n)?;
    let bracket = RationalFunction::sum(n + 1, &members)?;
    Ok(mul(&prefactor(n), &bracket))
}

/// `Σ₄` with its leading constant replaced; used for mutation checks of the
/// stratum oracle.
pub fn sigma4_with_constant(constant: Scalar) -> RationalFunction {
    sigma4(constant)
}

/// `χ(M̄₁,ₙ, 1/(1 − q𝓗⁻¹) ∏(1/(1 − qᵢLᵢ) − 1/(1 − qᵢ)))`.
pub fn kawasaki_subtracted(n: usize) -> Result<RationalFunction> {
    Ok(add(&main_term(n)?, &sigma(n)?))
}

/// `1 + Σ_{i ∈ active} qᵢ/(1 − qᵢ)`.
pub fn string_factor(arity: usize, active: &[VariableId]) -> RationalFunction {
    let mut f = RationalFunction::one(arity);
    for &i in active {
        f = add(
            &f,
            &over(
                Polynomial::var(arity, i),
                vec![(poly(arity, i, &[1, -1]), 1)],
            ),
        );
    }
    f
}

/// One string-equation step: from `P_{n−1,m}` and its `q = 0` slice to
/// `P_{n,m} = (1 + Σ qᵢ/(1 − qᵢ))·prev − (prev − prev|_{q=0})/q`.
pub fn pushdown(
    prev: &RationalFunction,
    prev_at_q0: &RationalFunction,
    active: &[VariableId],
) -> Result<RationalFunction> {
    let arity = prev.arity();
    if prev_at_q0.arity() != arity {
        return Err(Error::ArityMismatch {
            left: arity,
            right: prev_at_q0.arity(),
        });
    }
    if let Some(&v) = active.iter().find(|&&v| v == 0 || v >= arity) {
        return Err(Error::InvalidInput(format!(
            "active variable {v} is not an insertion variable of arity {arity}"
        )));
    }
    let regular = prev.checked_sub(prev_at_q0)?.divide_by_variable(0)?;
    string_factor(arity, active)
        .checked_mul(prev)?
        .checked_sub(&regular)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeff(f: &RationalFunction, exps: &[u32]) -> Scalar {
        f.taylor_expand(exps).coefficient_of(exps)
    }

    #[test]
    fn one_point_coefficients() {
        let f = one_point_l(1, 0);
        let s = f.taylor_expand(&[12]);
        let got: Vec<i64> = (0..=12)
            .map(|d| {
                let c = s.coefficient_of(&[d]);
                i64::try_from(c.to_integer()).unwrap()
            })
            .collect();
        assert_eq!(got, vec![1, 0, 0, 0, 1, 0, 1, 0, 1, 0, 1, 0, 2]);
    }

    #[test]
    fn linv_vanishes_below_ten() {
        let s = one_point_linv(1, 0).taylor_expand(&[10]);
        assert_eq!(s.coefficient_of(&[0]), scalar(1, 1));
        for d in 1..10 {
            assert_eq!(s.coefficient_of(&[d]), scalar(0, 1), "degree {d}");
        }
        assert_eq!(s.coefficient_of(&[10]), scalar(-1, 1));
    }

    #[test]
    fn mixed_slices() {
        let f = one_point_mixed();
        assert_eq!(f.substitute_zero(0), one_point_l(2, 1));
        assert_eq!(f.substitute_zero(1), one_point_linv(2, 0));
        assert_eq!(coeff(&f, &[0, 4]), scalar(1, 1));
    }

    #[test]
    fn main_term_constants() {
        assert_eq!(coeff(&main_term(2).unwrap(), &[0, 1, 1]), scalar(1, 24));
        assert_eq!(
            coeff(&main_term(5).unwrap(), &[0, 1, 1, 1, 1, 1]),
            scalar(1, 1)
        );
        assert!(main_term(1).is_err());
    }

    #[test]
    fn subtracted_constants() {
        let want = [(2, 1), (3, -1), (4, 1), (5, 1)];
        for (n, c) in want {
            let mut e = vec![1u32; n + 1];
            e[0] = 0;
            assert_eq!(
                coeff(&kawasaki_subtracted(n).unwrap(), &e),
                scalar(c, 1),
                "n = {n}"
            );
        }
        assert!(sigma(5).unwrap().is_zero());
    }

    #[test]
    fn sigma_is_symmetric() {
        for n in 2..=4 {
            let s = sigma(n).unwrap();
            let mut map: Vec<VariableId> = (0..=n).collect();
            map.swap(1, n);
            assert_eq!(s.remap(n + 1, &map), s, "n = {n}");
            let mut cyc: Vec<VariableId> = vec![0];
            cyc.extend((2..=n).chain([1]));
            assert_eq!(s.remap(n + 1, &cyc), s, "n = {n}");
        }
    }

    #[test]
    fn pushdown_small_values() {
        let p10 = one_point_linv(1, 0);
        let p20 = pushdown(&p10, &p10.substitute_zero(0), &[]).unwrap();
        let s = p20.taylor_expand(&[1]);
        assert_eq!(s.coefficient_of(&[0]), scalar(1, 1));
        assert_eq!(s.coefficient_of(&[1]), scalar(0, 1));

        let p11 = one_point_mixed();
        let p21 = pushdown(&p11, &p11.substitute_zero(0), &[1]).unwrap();
        assert_eq!(coeff(&p21, &[0, 1]), scalar(0, 1));
        assert!(pushdown(&p11, &p11.substitute_zero(0), &[0]).is_err());
    }

    #[test]
    fn prefactor_at_half() {
        let half = scalar(1, 2);
        let p = prefactor(4);
        assert_eq!(p.eval_at(&vec![half; 5]).unwrap(), scalar(1, 1));
    }
}
