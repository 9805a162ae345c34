//! Independent checks of the closed forms and of the engine.
//!
//! Every check yields a [`CheckRecord`]; [`run_suite`] bundles them into a
//! [`Report`]. The `fast` suite covers the one-point data; `all` adds the
//! stratum and fixed-point re-derivations and the engine sweeps.

mod cyclotomic;
mod identity;
mod stratum;

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use cyclotomic::{
    character_search, cyclotomic_fixed_point_sum, hodge_candidates, z3_three_point_data,
    z3_two_point_data, z4_literal_hodge, z4_two_point_data, Assignment, CyclotomicNumber,
    FixedPointSummand, WeightData,
};
pub use identity::{modular_dim, random_point_identity, Verdict};
pub use stratum::{
    four_point_contribution, four_point_integrand, ClassSymbol, JetValue, StratumIntegrals,
};

use crate::arith::{Polynomial, RationalFunction, Scalar};
use crate::engine::{ChiRequest, Engine, InvariantKey, Mode};
use crate::error::{Error, Result};
use crate::formulas;

const SEED: u64 = 0x5eed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// Outcome of one named check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    pub detail: String,
    /// A point or coefficient exhibiting a mismatch, when there is one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CheckRecord {
    pub fn pass(name: &str, detail: impl Into<String>) -> Self {
        CheckRecord {
            name: name.into(),
            status: Status::Pass,
            detail: detail.into(),
            witness: None,
        }
    }

    pub fn fail(name: &str, detail: impl Into<String>, witness: Option<String>) -> Self {
        CheckRecord {
            name: name.into(),
            status: Status::Fail,
            detail: detail.into(),
            witness,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    fn from_result(name: &str, r: Result<CheckRecord>) -> Self {
        r.unwrap_or_else(|e| CheckRecord::fail(name, format!("error: {e}"), None))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Fast,
    All,
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Suite::Fast),
            "all" => Ok(Suite::All),
            _ => Err(Error::InvalidInput(format!(
                "unknown suite {s:?}; expected fast or all"
            ))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Fast => "fast",
            Suite::All => "all",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub suite: Suite,
    pub checks: Vec<CheckRecord>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckRecord::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

/// Replacements for closed forms, so that a deliberately broken formula can
/// be fed through the suite.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub sigma4: Option<RationalFunction>,
}

fn differ_witness(f: &RationalFunction, g: &RationalFunction) -> Option<String> {
    match random_point_identity(f, g, 5, SEED) {
        Ok(Verdict::Different { point, difference }) => {
            let p: Vec<String> = point.iter().map(ToString::to_string).collect();
            Some(format!(
                "at ({}) the difference is {difference}",
                p.join(", ")
            ))
        }
        _ => None,
    }
}

fn compare(
    name: &str,
    what: &str,
    f: &RationalFunction,
    g: &RationalFunction,
) -> Result<CheckRecord> {
    if f.checked_sub(g)?.is_zero() {
        Ok(CheckRecord::pass(name, format!("{what}: exact equality")))
    } else {
        Ok(CheckRecord::fail(
            name,
            format!("{what}: not equal"),
            differ_witness(f, g),
        ))
    }
}

/// `[q₁ᵈ] 1/((1 − q₁⁴)(1 − q₁⁶)) = #{4a + 6b = d}` for `d ≤ max_degree`.
pub fn check_one_point(max_degree: u32) -> CheckRecord {
    let name = "one_point_denumerant";
    let s = formulas::one_point_l(1, 0).taylor_expand(&[max_degree]);
    for d in 0..=max_degree {
        let got = s.coefficient_of(&[d]);
        let want = Scalar::from_integer(modular_dim(u64::from(d)).into());
        if got != want {
            return CheckRecord::fail(
                name,
                format!("coefficient mismatch below degree {max_degree}"),
                Some(format!("d = {d}: series {got}, lattice count {want}")),
            );
        }
    }
    CheckRecord::pass(name, format!("coefficients agree for d = 0..={max_degree}"))
}

/// `1 − (one-point function with q₁ ↦ 1/q₁)` is the one-point function of
/// `L₁⁻¹`.
pub fn check_duality() -> CheckRecord {
    let name = "duality";
    CheckRecord::from_result(
        name,
        (|| {
            let f = formulas::one_point_l(1, 0);
            let dual = &RationalFunction::one(1) - &f.invert_variable(0)?;
            compare(
                name,
                "1 - inverted one-point function vs L^-1 function",
                &dual,
                &formulas::one_point_linv(1, 0),
            )
        })(),
    )
}

/// The mixed one-point function restricted to `q = 0` and to `q₁ = 0`.
pub fn check_mixed_slices() -> Vec<CheckRecord> {
    let mixed = formulas::one_point_mixed();
    let at_q = mixed.substitute_zero(0);
    let at_q1 = mixed.substitute_zero(1);
    vec![
        CheckRecord::from_result(
            "mixed_slice_hodge",
            compare(
                "mixed_slice_hodge",
                "q = 0 slice vs L function",
                &at_q,
                &formulas::one_point_l(2, 1),
            ),
        ),
        CheckRecord::from_result(
            "mixed_slice_cotangent",
            compare(
                "mixed_slice_cotangent",
                "q1 = 0 slice vs L^-1 function",
                &at_q1,
                &formulas::one_point_linv(2, 0),
            ),
        ),
    ]
}

/// Random evaluation agrees with exact comparison on a list of pairs, one
/// of which is deliberately unequal.
pub fn check_random_points() -> CheckRecord {
    let name = "random_point_agreement";
    CheckRecord::from_result(
        name,
        (|| {
            let one = RationalFunction::one(1);
            let l = formulas::one_point_l(1, 0);
            let linv = formulas::one_point_linv(1, 0);
            let mixed = formulas::one_point_mixed();
            let pairs = [
                (&one - &l.invert_variable(0)?, linv.clone()),
                (mixed.substitute_zero(0), formulas::one_point_l(2, 1)),
                (mixed.substitute_zero(1), formulas::one_point_linv(2, 0)),
                (l.clone(), linv.clone()),
            ];
            for (i, (f, g)) in pairs.iter().enumerate() {
                let exact = f.checked_sub(g)?.is_zero();
                let v = random_point_identity(f, g, 5, SEED + i as u64)?;
                let agrees = match &v {
                    Verdict::Identical { canonical, .. } => exact && *canonical,
                    Verdict::Different { .. } => !exact,
                };
                if !agrees {
                    return Ok(CheckRecord::fail(
                        name,
                        format!("pair {i}: random verdict disagrees with exact comparison"),
                        Some(format!("{v:?}")),
                    ));
                }
            }
            Ok(CheckRecord::pass(
                name,
                format!("{} pairs, 5 points each, verdicts agree", pairs.len()),
            ))
        })(),
    )
}

/// Integrating the first-order integrand over the stratum of `M̄₁,₄`
/// reproduces `target` (normally `Σ₄`).
pub fn check_p1_stratum(target: &RationalFunction) -> CheckRecord {
    let name = "p1_stratum";
    let value = four_point_contribution(&StratumIntegrals::standard());
    CheckRecord::from_result(
        name,
        compare(name, "integrated stratum term vs Σ4", &value, target),
    )
}

/// The member of the `Σₙ` bracket whose denominator contains the order-`k`
/// cyclotomic factor in `q₁`, and its position.
pub fn cyclotomic_member(n: usize, order: u32) -> Result<Option<(usize, RationalFunction)>> {
    let phi: &[i64] = if order == 3 { &[1, 1, 1] } else { &[1, 0, 1] };
    let marker = Polynomial::univariate(n + 1, 1, phi);
    Ok(formulas::sigma_bracket(n)?
        .into_iter()
        .enumerate()
        .find(|(_, m)| m.factors().any(|(p, _)| *p == marker)))
}

fn fixed_point_check(name: &str, n: usize, data: &WeightData) -> Result<CheckRecord> {
    let Some((pos, member)) = cyclotomic_member(n, data.order)? else {
        return Ok(CheckRecord::fail(
            name,
            "no bracket member with the cyclotomic denominator",
            None,
        ));
    };
    let label = format!(
        "ℤ/{} sum vs member {} of the Σ{n} bracket",
        data.order,
        pos + 1
    );
    let value = match cyclotomic_fixed_point_sum(data) {
        Ok(v) => v,
        Err(e) => return Ok(CheckRecord::fail(name, format!("{label}: {e}"), None)),
    };
    let rec = compare(name, &label, &value, &member)?;
    if rec.passed() {
        return Ok(rec);
    }
    let diff = value.checked_sub(&member)?;
    let orders = vec![2; n + 1];
    let s = diff.taylor_expand(&orders);
    let first = s.terms().find(|(_, c)| !c.is_zero()).map(|(m, _)| {
        let got = value.taylor_expand(&orders).coefficient(m);
        let want = member.taylor_expand(&orders).coefficient(m);
        format!(
            "{}: sum gives {got}, member has {want}",
            Polynomial::monomial(n + 1, m.clone(), Scalar::from_integer(1.into()))
        )
    });
    Ok(CheckRecord::fail(name, rec.detail, first.or(rec.witness)))
}

/// The `ℤ/3` fixed-point sum for three markings equals the cyclotomic member
/// of `Σ₃`, and the character search recovers the Hodge characters used.
pub fn check_z3_three_point() -> CheckRecord {
    let name = "z3_three_point";
    CheckRecord::from_result(
        name,
        (|| {
            let data = z3_three_point_data();
            let rec = fixed_point_check(name, 3, &data)?;
            if !rec.passed() {
                return Ok(rec);
            }
            let (_, member) = cyclotomic_member(3, 3)?.expect("member exists");
            let found = character_search(&data, &member)?;
            let used = Assignment {
                hodge: data.summands.iter().map(|s| s.hodge.clone()).collect(),
            };
            if !found.contains(&used) {
                return Ok(CheckRecord::fail(
                    name,
                    "character search does not recover the Hodge characters",
                    Some(format!("found {}", list(&found))),
                ));
            }
            Ok(CheckRecord::pass(
                name,
                format!(
                    "{}; search recovers Hodge characters {}",
                    rec.detail,
                    list(&found)
                ),
            ))
        })(),
    )
}

/// The `ℤ/3` fixed-point sum for two markings equals the member of the `Σ₂`
/// bracket with denominators `1 + v + v²`.
pub fn check_z3_two_point() -> CheckRecord {
    let name = "z3_two_point";
    CheckRecord::from_result(name, fixed_point_check(name, 2, &z3_two_point_data()))
}

/// Resolves the Hodge characters of the `ℤ/4` summands against the member of
/// the `Σ₂` bracket with denominators `1 + v²`.
pub fn check_z4_two_point() -> CheckRecord {
    let name = "z4_two_point";
    CheckRecord::from_result(
        name,
        (|| {
            let literal = z4_two_point_data(z4_literal_hodge());
            let literal_note = match cyclotomic_fixed_point_sum(&literal) {
                Ok(_) => "characters (1, -1) give a rational sum",
                Err(_) => "characters (1, -1) give an irrational sum",
            };
            let Some((pos, member)) = cyclotomic_member(2, 4)? else {
                return Ok(CheckRecord::fail(
                    name,
                    "no bracket member with denominator 1 + v^2",
                    None,
                ));
            };
            let found = character_search(&literal, &member)?;
            let Some(first) = found.first() else {
                return Ok(CheckRecord::fail(
                    name,
                    format!(
                        "{literal_note}; no Hodge characters reproduce member {}",
                        pos + 1
                    ),
                    None,
                ));
            };
            let resolved = z4_two_point_data([first.hodge[0].clone(), first.hodge[1].clone()]);
            let rec = fixed_point_check(name, 2, &resolved)?;
            if !rec.passed() {
                return Ok(rec);
            }
            Ok(CheckRecord::pass(
            name,
            format!(
                "{literal_note}; resolved Hodge characters {} reproduce member {} of the Σ2 bracket",
                list(&found),
                pos + 1
            ),
        ))
        })(),
    )
}

fn list(found: &[Assignment]) -> String {
    if found.is_empty() {
        return "none".into();
    }
    found
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" or ")
}

/// `[q⁰ q₁ ⋯ qₙ]` of the subtracted product against `(n − 1)!/24 + Σₙ(0)`,
/// the bracket evaluated at the origin.
pub fn check_subtracted_constants() -> CheckRecord {
    let name = "subtracted_constants";
    CheckRecord::from_result(
        name,
        (|| {
            let expected = [(2, 1), (3, -1), (4, 1), (5, 1)];
            let mut seen = Vec::new();
            for (n, want) in expected {
                let mut exps = vec![1u32; n + 1];
                exps[0] = 0;
                let series = formulas::kawasaki_subtracted(n)?.taylor_expand(&exps);
                let coeff = series.coefficient_of(&exps);
                let origin = vec![Scalar::zero(); n + 1];
                let fact: i64 = (1..n as i64).product();
                let mut oracle = Scalar::new(fact.into(), 24.into());
                for m in formulas::sigma_bracket(n)? {
                    oracle += m.eval_at(&origin)?;
                }
                let want = Scalar::from_integer(want.into());
                if coeff != oracle || coeff != want {
                    return Ok(CheckRecord::fail(
                        name,
                        format!("n = {n}"),
                        Some(format!(
                            "series {coeff}, evaluation {oracle}, expected {want}"
                        )),
                    ));
                }
                seen.push(format!("n={n}: {coeff}"));
            }
            Ok(CheckRecord::pass(name, seen.join(", ")))
        })(),
    )
}

/// A few values with independent hand derivations.
pub fn check_small_values(engine: &Engine) -> CheckRecord {
    let name = "small_values";
    CheckRecord::from_result(
        name,
        (|| {
            let mut cases: Vec<(ChiRequest, i64)> = vec![
                (ChiRequest::new(1, 0, vec![0]), 1),
                (ChiRequest::new(1, 0, vec![4]), 1),
                (ChiRequest::new(1, 0, vec![6]), 1),
                (ChiRequest::new(1, 0, vec![12]), 2),
                (ChiRequest::new(1, 0, vec![-1]), 0),
                (ChiRequest::new(2, 0, vec![0, 0]), 1),
                (ChiRequest::new(2, 0, vec![1, 0]), 0),
                (ChiRequest::new(2, 0, vec![1, 1]), 0),
            ];
            for n in 1..=5 {
                cases.push((ChiRequest::new(n, 0, vec![0; n]), 1));
            }
            for (req, want) in &cases {
                let got = engine.chi(req)?;
                if got != (*want).into() {
                    return Ok(CheckRecord::fail(
                        name,
                        "value mismatch",
                        Some(format!(
                            "n={} hodge={} exps={:?}: got {got}, expected {want}",
                            req.n, req.hodge_exp, req.exps
                        )),
                    ));
                }
            }
            Ok(CheckRecord::pass(name, format!("{} values", cases.len())))
        })(),
    )
}

/// Every coefficient of total degree `≤ total` of the full generating
/// function is an integer, for `n ≤ max_n`.
pub fn check_integrality(engine: &Engine, max_n: usize, total: u32) -> CheckRecord {
    let name = "integrality";
    CheckRecord::from_result(
        name,
        (|| {
            let mut counts = Vec::new();
            for n in 1..=max_n {
                let orders = vec![total; n + 1];
                let s = engine.full_genfun_series(n, &orders, Some(total))?;
                if let Some((m, c)) = s.terms().find(|(_, c)| !crate::arith::scalar_is_integer(c)) {
                    return Ok(CheckRecord::fail(
                        name,
                        format!("n = {n}"),
                        Some(format!("coefficient of {:?} is {c}", m.exponents())),
                    ));
                }
                counts.push(format!("n={n}: {} terms", s.len()));
            }
            Ok(CheckRecord::pass(
                name,
                format!("total degree <= {total}; {}", counts.join(", ")),
            ))
        })(),
    )
}

fn permutations(v: &[i64]) -> Vec<Vec<i64>> {
    if v.len() <= 1 {
        return vec![v.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..v.len() {
        let mut rest = v.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// `chi` is invariant under permuting the cotangent exponents, for
/// `n ≤ max_n` and exponents in `0..=max_exp`.
pub fn check_symmetry(engine: &Engine, max_n: usize, max_exp: i64) -> CheckRecord {
    let name = "symmetry";
    CheckRecord::from_result(
        name,
        (|| {
            let mut cells = 0;
            for n in 1..=max_n {
                let ranges = vec![0..=max_exp; n];
                let rows = engine.chi_table(n, 0..=0, &ranges, Mode::Auto)?;
                let table: std::collections::HashMap<Vec<i64>, _> =
                    rows.into_iter().map(|r| (r.exps, r.chi)).collect();
                for (exps, chi) in &table {
                    for p in permutations(exps) {
                        if &table[&p] != chi {
                            return Ok(CheckRecord::fail(
                                name,
                                format!("n = {n}"),
                                Some(format!("{exps:?} gives {chi}, {p:?} gives {}", table[&p])),
                            ));
                        }
                    }
                }
                cells += table.len();
            }
            Ok(CheckRecord::pass(
                name,
                format!("{cells} cells, n <= {max_n}, exponents 0..={max_exp}"),
            ))
        })(),
    )
}

/// Exact expansion and the series recursion agree up to total degree
/// `total`, for `n ≤ max_n`.
pub fn check_mode_agreement(engine: &Engine, max_n: usize, total: u32) -> CheckRecord {
    let name = "mode_agreement";
    CheckRecord::from_result(
        name,
        (|| {
            for n in 1..=max_n {
                let orders = vec![total; n + 1];
                let exact = engine
                    .full_genfun(n)?
                    .taylor_expand_bounded(&orders, Some(total));
                let series = engine.full_genfun_series(n, &orders, Some(total))?;
                if exact != series {
                    let bad = exact
                        .terms()
                        .find(|(m, c)| series.coefficient(m) != **c)
                        .map(|(m, c)| {
                            format!(
                                "{:?}: exact {c}, series {}",
                                m.exponents(),
                                series.coefficient(m)
                            )
                        });
                    return Ok(CheckRecord::fail(name, format!("n = {n}"), bad));
                }
            }
            Ok(CheckRecord::pass(
                name,
                format!("n <= {max_n}, total degree <= {total}"),
            ))
        })(),
    )
}

/// `P_{n,n}` at `qₙ = 0` is `P_{n,n−1}`.
pub fn check_specialization(engine: &Engine, max_n: usize) -> CheckRecord {
    let name = "specialization";
    CheckRecord::from_result(
        name,
        (|| {
            for n in 1..=max_n {
                // qₙ no longer occurs, so it can be sent anywhere.
                let map: Vec<usize> = (0..n).chain([0]).collect();
                let full = engine.full_genfun(n)?.substitute_zero(n).remap(n, &map);
                let partial = engine.partial_genfun(InvariantKey::new(n, n - 1)?)?;
                let rec = compare(name, &format!("n = {n}"), &full, &partial)?;
                if !rec.passed() {
                    return Ok(rec);
                }
            }
            Ok(CheckRecord::pass(
                name,
                format!("exact equality for n <= {max_n}"),
            ))
        })(),
    )
}

type Check<'a> = Box<dyn Fn() -> Vec<CheckRecord> + Send + Sync + 'a>;

/// Runs a suite. Checks may run in parallel; the report lists them in a
/// fixed order.
pub fn run_suite(suite: Suite, engine: &Engine, overrides: &Overrides) -> Report {
    let sigma4 = overrides
        .sigma4
        .clone()
        .unwrap_or_else(|| formulas::sigma(4).expect("n = 4 is valid"));
    let ceiling = engine.config().exact_ceiling.min(4);
    let mut checks: Vec<Check<'_>> = vec![
        Box::new(|| vec![check_one_point(200)]),
        Box::new(|| vec![check_duality()]),
        Box::new(check_mixed_slices),
        Box::new(|| vec![check_random_points()]),
    ];
    if suite == Suite::All {
        checks.extend([
            Box::new(move || vec![check_p1_stratum(&sigma4)]) as Check<'_>,
            Box::new(|| vec![check_z3_three_point()]),
            Box::new(|| vec![check_z3_two_point()]),
            Box::new(|| vec![check_z4_two_point()]),
            Box::new(|| vec![check_subtracted_constants()]),
            Box::new(|| vec![check_small_values(engine)]),
            Box::new(|| vec![check_integrality(engine, 5, 10)]),
            Box::new(move || vec![check_symmetry(engine, ceiling, 3)]),
            Box::new(move || vec![check_mode_agreement(engine, ceiling.min(3), 8)]),
            Box::new(move || vec![check_specialization(engine, ceiling)]),
        ]);
    }
    let checks = checks.par_iter().map(|c| c()).collect::<Vec<_>>().concat();
    Report { suite, checks }
}
