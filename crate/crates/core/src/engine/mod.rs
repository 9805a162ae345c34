//! The reduction scheme end to end.
//!
//! `P_{n,m} = χ(M̄₁,ₙ, 1/(1 − q𝓗⁻¹) ∏_{i≤m} 1/(1 − qᵢLᵢ))` is built from the
//! one-point closed forms (`n = 1`), the string equation (`m < n`) and the
//! Kawasaki formula plus inclusion–exclusion (`m = n`). Exact mode keeps
//! rational functions; series mode runs the same recursion on truncated
//! Taylor expansions.
//!
//! Sign convention: `q` counts powers of `𝓗⁻¹`, so a request with
//! `hodge_exp = −d ≤ 0` reads `[q^d]` directly while `hodge_exp > 0`
//! inverts `q`.

mod cache;
mod series;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use cache::{
    clear_cache_file, CacheStats, CachedGenfun, MemoCache, CACHE_FORMAT, ENGINE_VERSION,
};

use crate::arith::{scalar_is_integer, RationalFunction, Scalar, TruncatedSeries, VariableId};
use crate::error::{Error, Result};
use crate::formulas;

/// `(n, m)`: `n` marked points with insertions on `q₁..q_m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InvariantKey {
    pub n: usize,
    pub m: usize,
}

impl InvariantKey {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n == 0 || m > n {
            return Err(Error::InvalidInput(format!(
                "invariant key needs 1 <= n and m <= n, got n = {n}, m = {m}"
            )));
        }
        Ok(InvariantKey { n, m })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Series,
    Auto,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "series" => Ok(Mode::Series),
            "auto" => Ok(Mode::Auto),
            _ => Err(Error::InvalidInput(format!(
                "mode must be exact, series or auto, got {s:?}"
            ))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Series => "series",
            Mode::Auto => "auto",
        })
    }
}

/// `χ(M̄₁,ₙ, 𝓗^{hodge_exp} ⊗ L₁^{exps[0]} ⊗ … ⊗ Lₙ^{exps[n−1]})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChiRequest {
    pub n: usize,
    pub hodge_exp: i64,
    pub exps: Vec<i64>,
    pub mode: Mode,
}

impl ChiRequest {
    pub fn new(n: usize, hodge_exp: i64, exps: Vec<i64>) -> Self {
        ChiRequest {
            n,
            hodge_exp,
            exps,
            mode: Mode::Auto,
        }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInput("n must be at least 1".into()));
        }
        if self.exps.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "expected {} cotangent exponents for n = {}, got {}",
                self.n,
                self.n,
                self.exps.len()
            )));
        }
        let too_big = |x: i64| x.unsigned_abs() > u64::from(u32::MAX);
        if too_big(self.hodge_exp) || self.exps.iter().any(|&d| too_big(d)) {
            return Err(Error::InvalidInput("exponent out of range".into()));
        }
        Ok(())
    }

    /// Series exponent per variable: nonnegative means a direct Taylor
    /// coefficient, negative means the dual coefficient of that order.
    fn targets(&self) -> Vec<i64> {
        std::iter::once(-self.hodge_exp)
            .chain(self.exps.iter().copied())
            .collect()
    }

    fn is_direct(&self) -> bool {
        self.hodge_exp <= 0 && self.exps.iter().all(|&d| d >= 0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    /// Largest `n` for which exact rational functions are built.
    pub exact_ceiling: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { exact_ceiling: 4 }
    }
}

/// One cell of a table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableRow {
    pub n: usize,
    pub hodge: i64,
    pub exps: Vec<i64>,
    pub chi: BigInt,
}

#[derive(Debug, Default)]
pub struct Engine {
    config: EngineConfig,
    cache: MemoCache,
}

type Scratch = HashMap<InvariantKey, Arc<CachedGenfun>>;

fn to_integer(c: Scalar, what: impl fmt::Display) -> Result<BigInt> {
    if !scalar_is_integer(&c) {
        return Err(Error::InternalConsistency(format!(
            "integrality violated: {what} = {c}"
        )));
    }
    Ok(c.to_integer())
}

impl Engine {
    pub fn new(config: EngineConfig) -> Self {
        Engine::with_cache(config, MemoCache::in_memory())
    }

    pub fn with_cache(config: EngineConfig, cache: MemoCache) -> Self {
        Engine { config, cache }
    }

    pub fn config(&self) -> EngineConfig {
        self.config
    }

    pub fn cache(&self) -> &MemoCache {
        &self.cache
    }

    /// Exact or series, after resolving `auto` against the ceiling.
    pub fn resolve_mode(&self, n: usize, mode: Mode) -> Mode {
        match mode {
            Mode::Auto if n <= self.config.exact_ceiling => Mode::Exact,
            Mode::Auto => Mode::Series,
            m => m,
        }
    }

    pub fn partial_genfun(&self, key: InvariantKey) -> Result<RationalFunction> {
        Ok(self.partial_entry(key, &mut Scratch::new())?.value.clone())
    }

    /// `P_{n,m}` with its `q = 0` slice.
    fn partial_entry(&self, key: InvariantKey, scratch: &mut Scratch) -> Result<Arc<CachedGenfun>> {
        if let Some(hit) = self.cache.get(key) {
            return Ok(hit);
        }
        if let Some(hit) = scratch.get(&key) {
            return Ok(hit.clone());
        }
        let value = self.compute_partial(key, scratch)?;
        let at_q0 = value.substitute_zero(0);
        let entry = Arc::new(CachedGenfun { value, at_q0 });
        scratch.insert(key, entry.clone());
        self.cache.insert(key, entry.clone());
        Ok(entry)
    }

    fn compute_partial(
        &self,
        key: InvariantKey,
        scratch: &mut Scratch,
    ) -> Result<RationalFunction> {
        let InvariantKey { n, m } = key;
        if n == 1 {
            return Ok(if m == 0 {
                formulas::one_point_linv(1, 0)
            } else {
                formulas::one_point_mixed()
            });
        }
        if m < n {
            let prev = self.partial_entry(InvariantKey { n: n - 1, m }, scratch)?;
            let active: Vec<VariableId> = (1..=m).collect();
            return formulas::pushdown(&prev.value, &prev.at_q0, &active);
        }
        let arity = n + 1;
        let mut terms = vec![formulas::kawasaki_subtracted(n)?];
        for (subset, sign) in proper_subsets(n) {
            let k = subset.len();
            let p = self.partial_entry(InvariantKey { n, m: k }, scratch)?;
            let mut map = vec![0; k + 1];
            map[1..].copy_from_slice(&subset);
            let geometric = geometric_product(arity, &complement(n, &subset));
            let term = p.value.remap(arity, &map).checked_mul(&geometric)?;
            terms.push(if sign > 0 { term } else { -term });
        }
        RationalFunction::sum(arity, &terms)
    }

    fn check_exact(&self, n: usize) -> Result<()> {
        if n > self.config.exact_ceiling {
            return Err(Error::UseSeriesMode {
                n,
                ceiling: self.config.exact_ceiling,
            });
        }
        Ok(())
    }

    /// `P_{n,n}`, the full generating function in `q, q₁..qₙ`.
    pub fn full_genfun(&self, n: usize) -> Result<RationalFunction> {
        let key = InvariantKey::new(n, n)?;
        self.check_exact(n)?;
        self.partial_genfun(key)
    }

    /// Taylor expansion of `P_{n,n}` up to `orders` (length `n + 1`) and,
    /// optionally, total degree `total`, computed without rational functions
    /// beyond the closed forms.
    pub fn full_genfun_series(
        &self,
        n: usize,
        orders: &[u32],
        total: Option<u32>,
    ) -> Result<TruncatedSeries> {
        InvariantKey::new(n, n)?;
        if orders.len() != n + 1 {
            return Err(Error::InvalidInput(format!(
                "series orders need {} entries for n = {n}, got {}",
                n + 1,
                orders.len()
            )));
        }
        series::full_series(n, orders, total)
    }

    pub fn chi(&self, req: &ChiRequest) -> Result<BigInt> {
        req.validate()?;
        match self.resolve_mode(req.n, req.mode) {
            Mode::Series => self.chi_series(req),
            _ => self.chi_exact(req),
        }
    }

    fn chi_series(&self, req: &ChiRequest) -> Result<BigInt> {
        if !req.is_direct() {
            return Err(Error::InvalidInput(
                "negative cotangent exponents and positive Hodge exponents need exact mode".into(),
            ));
        }
        let orders: Vec<u32> = req.targets().iter().map(|&t| t as u32).collect();
        let s = series::full_series(req.n, &orders, None)?;
        to_integer(s.coefficient_of(&orders), describe(req))
    }

    fn chi_exact(&self, req: &ChiRequest) -> Result<BigInt> {
        self.check_exact(req.n)?;
        let f = self.full_genfun(req.n)?;
        let targets = req.targets();
        if req.is_direct() {
            let orders: Vec<u32> = targets.iter().map(|&t| t as u32).collect();
            let c = f.taylor_expand(&orders).coefficient_of(&orders);
            return to_integer(c, describe(req));
        }
        let mut g = f;
        for (v, &t) in targets.iter().enumerate() {
            if t >= 0 {
                g = g.coefficient_in(v, t as u32)?;
            }
        }
        let dual: Vec<(VariableId, u32)> = targets
            .iter()
            .enumerate()
            .filter(|(_, &t)| t < 0)
            .map(|(v, &t)| (v, (-t) as u32))
            .collect();
        let c = dual_coefficient(&g, &dual)?;
        to_integer(c, describe(req))
    }

    /// All values on the grid `hodge × exps[0] × … × exps[n−1]`, in
    /// lexicographic order of `(hodge, d₁, …, dₙ)`.
    pub fn chi_table(
        &self,
        n: usize,
        hodge: RangeInclusive<i64>,
        exps: &[RangeInclusive<i64>],
        mode: Mode,
    ) -> Result<Vec<TableRow>> {
        let probe = ChiRequest::new(n, 0, vec![0; exps.len()]).with_mode(mode);
        probe.validate()?;
        let mut axes = vec![hodge];
        axes.extend(exps.iter().cloned());
        let cells = grid(&axes);
        if cells.is_empty() {
            return Ok(Vec::new());
        }
        let requests: Vec<ChiRequest> = cells
            .into_iter()
            .map(|c| ChiRequest::new(n, c[0], c[1..].to_vec()).with_mode(mode))
            .collect();
        for r in &requests {
            r.validate()?;
        }
        let row = |r: &ChiRequest, chi| TableRow {
            n,
            hodge: r.hodge_exp,
            exps: r.exps.clone(),
            chi,
        };
        if requests.iter().all(ChiRequest::is_direct) {
            let mut orders = vec![0u32; n + 1];
            for r in &requests {
                for (o, t) in orders.iter_mut().zip(r.targets()) {
                    *o = (*o).max(t as u32);
                }
            }
            let s = match self.resolve_mode(n, mode) {
                Mode::Series => series::full_series(n, &orders, None)?,
                _ => {
                    self.check_exact(n)?;
                    self.full_genfun(n)?.taylor_expand(&orders)
                }
            };
            return requests
                .iter()
                .map(|r| {
                    let e: Vec<u32> = r.targets().iter().map(|&t| t as u32).collect();
                    Ok(row(r, to_integer(s.coefficient_of(&e), describe(r))?))
                })
                .collect();
        }
        if self.resolve_mode(n, mode) != Mode::Exact {
            return requests
                .par_iter()
                .map(|r| Ok(row(r, self.chi(r)?)))
                .collect();
        }
        let f = self.full_genfun(n)?;
        let mut groups: BTreeMap<Vec<bool>, Vec<usize>> = BTreeMap::new();
        for (i, r) in requests.iter().enumerate() {
            let pattern = r.targets().iter().map(|&t| t < 0).collect();
            groups.entry(pattern).or_default().push(i);
        }
        let groups: Vec<(Vec<bool>, Vec<usize>)> = groups.into_iter().collect();
        let values: Vec<Vec<(usize, BigInt)>> = groups
            .par_iter()
            .map(|(pattern, members)| self.chi_group(&f, pattern, members, &requests))
            .collect::<Result<_>>()?;
        let mut chi: Vec<Option<BigInt>> = vec![None; requests.len()];
        for (i, c) in values.into_iter().flatten() {
            chi[i] = Some(c);
        }
        requests
            .iter()
            .zip(chi)
            .map(|(r, c)| Ok(row(r, c.expect("every cell belongs to a group"))))
            .collect()
    }

    /// Values of requests sharing one sign pattern: the inverted variables
    /// are flipped jointly once, and every value is a Taylor coefficient of
    /// that one function. Falls back to one request at a time when the joint
    /// inversion is not regular.
    fn chi_group(
        &self,
        f: &RationalFunction,
        pattern: &[bool],
        members: &[usize],
        requests: &[ChiRequest],
    ) -> Result<Vec<(usize, BigInt)>> {
        let dual: Vec<VariableId> = (0..pattern.len()).filter(|&v| pattern[v]).collect();
        let g = match f.invert_variables(&dual) {
            Ok(g) if dual.len() % 2 == 1 => -g,
            Ok(g) => g,
            Err(Error::InversionUnsupported(_)) => {
                return members
                    .iter()
                    .map(|&i| Ok((i, self.chi(&requests[i])?)))
                    .collect();
            }
            Err(e) => return Err(e),
        };
        let exps = |r: &ChiRequest| -> Vec<u32> {
            r.targets()
                .iter()
                .map(|t| t.unsigned_abs() as u32)
                .collect()
        };
        let mut orders = vec![0u32; pattern.len()];
        for &i in members {
            for (o, e) in orders.iter_mut().zip(exps(&requests[i])) {
                *o = (*o).max(e);
            }
        }
        let s = g.taylor_expand(&orders);
        members
            .iter()
            .map(|&i| {
                let r = &requests[i];
                Ok((i, to_integer(s.coefficient_of(&exps(r)), describe(r))?))
            })
            .collect()
    }
}

fn describe(req: &ChiRequest) -> String {
    format!(
        "chi(n={}, hodge={}, exps={:?})",
        req.n, req.hodge_exp, req.exps
    )
}

/// `[∏ uᵥ^{kᵥ}]` of the dual expansion, all `kᵥ ≥ 1`: per variable the
/// dual generating function is `−F(1/v)` (the `v`-free slice only affects
/// `k = 0`). Variables are inverted one at a time when each step stays
/// regular, otherwise jointly.
pub fn dual_coefficient(f: &RationalFunction, dual: &[(VariableId, u32)]) -> Result<Scalar> {
    match dual_sequential(f, dual) {
        Err(Error::InversionUnsupported(_)) if dual.len() > 1 => dual_joint(f, dual),
        other => other,
    }
}

fn dual_sequential(f: &RationalFunction, dual: &[(VariableId, u32)]) -> Result<Scalar> {
    let mut g = f.clone();
    for &(v, k) in dual {
        g = (-g.invert_variable(v)?).coefficient_in(v, k)?;
    }
    constant_of(&g)
}

fn dual_joint(f: &RationalFunction, dual: &[(VariableId, u32)]) -> Result<Scalar> {
    let vars: Vec<VariableId> = dual.iter().map(|&(v, _)| v).collect();
    let mut g = f.invert_variables(&vars)?;
    if vars.len() % 2 == 1 {
        g = -g;
    }
    for &(v, k) in dual {
        g = g.coefficient_in(v, k)?;
    }
    constant_of(&g)
}

fn constant_of(g: &RationalFunction) -> Result<Scalar> {
    let zero = vec![Scalar::zero(); g.arity()];
    g.eval_at(&zero)
}

/// Proper subsets `U ⊊ {1..n}` with the sign `(−1)^{n−|U|+1}`.
fn proper_subsets(n: usize) -> Vec<(Vec<VariableId>, i32)> {
    (0u32..(1 << n) - 1)
        .map(|mask| {
            let u: Vec<VariableId> = (1..=n).filter(|i| mask & (1 << (i - 1)) != 0).collect();
            let sign = if (n - u.len() + 1).is_multiple_of(2) {
                1
            } else {
                -1
            };
            (u, sign)
        })
        .collect()
}

fn complement(n: usize, subset: &[VariableId]) -> Vec<VariableId> {
    (1..=n).filter(|i| !subset.contains(i)).collect()
}

fn geometric_product(arity: usize, vars: &[VariableId]) -> RationalFunction {
    let mut den = crate::arith::Polynomial::one(arity);
    for &v in vars {
        den = &den * &crate::arith::Polynomial::univariate(arity, v, &[1, -1]);
    }
    RationalFunction::reciprocal_of(den).expect("unit constant term")
}

fn grid(axes: &[RangeInclusive<i64>]) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = vec![Vec::new()];
    for axis in axes {
        let mut next = Vec::new();
        for prefix in &out {
            for x in axis.clone() {
                let mut row = prefix.clone();
                row.push(x);
                next.push(row);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chi(e: &Engine, n: usize, h: i64, exps: &[i64]) -> i64 {
        let r = ChiRequest::new(n, h, exps.to_vec());
        i64::try_from(e.chi(&r).unwrap()).unwrap()
    }

    #[test]
    fn small_values() {
        let e = Engine::default();
        assert_eq!(chi(&e, 1, 0, &[4]), 1);
        assert_eq!(chi(&e, 1, 0, &[-1]), 0);
        assert_eq!(chi(&e, 2, 0, &[0, 0]), 1);
        assert_eq!(chi(&e, 2, 0, &[1, 0]), 0);
        assert_eq!(chi(&e, 2, 0, &[1, 1]), 0);
        assert_eq!(chi(&e, 2, 0, &[2, 0]), 1);
        assert_eq!(chi(&e, 2, -1, &[0, 0]), 0);
    }

    #[test]
    fn subsets_and_signs() {
        let s = proper_subsets(2);
        assert_eq!(s.len(), 3);
        assert_eq!(s[0], (vec![], -1));
        assert_eq!(s[1], (vec![1], 1));
        assert_eq!(grid(&[0..=1, 2..=3]).len(), 4);
        #[allow(clippy::reversed_empty_ranges)]
        let empty = grid(&[0..=1, 3..=2]);
        assert!(empty.is_empty());
    }

    #[test]
    fn exact_ceiling_is_enforced() {
        let e = Engine::new(EngineConfig { exact_ceiling: 2 });
        assert_eq!(
            e.full_genfun(3),
            Err(Error::UseSeriesMode { n: 3, ceiling: 2 })
        );
        assert!(e.chi(&ChiRequest::new(3, 0, vec![0, 0, 0])).is_ok());
    }

    #[test]
    fn request_validation() {
        let e = Engine::default();
        assert!(e.chi(&ChiRequest::new(0, 0, vec![])).is_err());
        assert!(e.chi(&ChiRequest::new(2, 0, vec![1])).is_err());
        let neg = ChiRequest::new(1, 0, vec![-1]).with_mode(Mode::Series);
        assert!(matches!(e.chi(&neg), Err(Error::InvalidInput(_))));
    }
}
