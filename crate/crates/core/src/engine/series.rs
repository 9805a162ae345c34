//! The reduction recursion on truncated Taylor expansions.
//!
//! Each string-equation step loses one order in `q` and one in total degree,
//! so `P_{n−1,m}` is requested one order deeper than `P_{n,m}`. Insertion
//! variables share one order internally; the result is cut down at the end.

use std::collections::HashMap;
use std::sync::Arc;

use super::{complement, proper_subsets};
use crate::arith::{Polynomial, RationalFunction, TruncatedSeries, VariableId};
use crate::error::Result;
use crate::formulas;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct SeriesKey {
    n: usize,
    m: usize,
    q_order: u32,
    insertion_order: u32,
    total: Option<u32>,
}

type Memo = HashMap<SeriesKey, Arc<TruncatedSeries>>;

pub(super) fn full_series(n: usize, orders: &[u32], total: Option<u32>) -> Result<TruncatedSeries> {
    let key = SeriesKey {
        n,
        m: n,
        q_order: orders[0],
        insertion_order: orders[1..].iter().copied().max().unwrap_or(0),
        total,
    };
    let s = partial_series(key, &mut Memo::new())?;
    Ok(s.truncate(orders, total))
}

fn orders_of(key: SeriesKey) -> Vec<u32> {
    let mut o = vec![key.insertion_order; key.m + 1];
    o[0] = key.q_order;
    o
}

/// `s · f` for a rational function `f`, by multiplying with the numerator and
/// dividing by each denominator factor.
fn times(s: &TruncatedSeries, f: &RationalFunction) -> Result<TruncatedSeries> {
    let mut out = s.mul_polynomial(f.numerator());
    for (p, e) in f.factors() {
        for _ in 0..e {
            out = out.div_polynomial(p)?;
        }
    }
    Ok(out)
}

fn partial_series(key: SeriesKey, memo: &mut Memo) -> Result<Arc<TruncatedSeries>> {
    if let Some(hit) = memo.get(&key) {
        return Ok(hit.clone());
    }
    let value = Arc::new(compute(key, memo)?);
    memo.insert(key, value.clone());
    Ok(value)
}

fn compute(key: SeriesKey, memo: &mut Memo) -> Result<TruncatedSeries> {
    let SeriesKey { n, m, total, .. } = key;
    let orders = orders_of(key);
    if n == 1 {
        let base = if m == 0 {
            formulas::one_point_linv(1, 0)
        } else {
            formulas::one_point_mixed()
        };
        return Ok(base.taylor_expand_bounded(&orders, total));
    }
    if m < n {
        let deeper = SeriesKey {
            n: n - 1,
            q_order: key.q_order + 1,
            total: total.map(|t| t + 1),
            ..key
        };
        let prev = partial_series(deeper, memo)?;
        let regular = prev.shift_down(0)?;
        let active: Vec<VariableId> = (1..=m).collect();
        let factor = formulas::string_factor(m + 1, &active);
        let main = times(&prev.truncate(&orders, total), &factor)?;
        return main.checked_sub(&regular);
    }
    let arity = n + 1;
    let mut acc = formulas::kawasaki_subtracted(n)?.taylor_expand_bounded(&orders, total);
    for (subset, sign) in proper_subsets(n) {
        let k = subset.len();
        let p = partial_series(SeriesKey { m: k, ..key }, memo)?;
        let mut map = vec![0; k + 1];
        map[1..].copy_from_slice(&subset);
        let mut term = p.remap(&map, orders.clone(), total)?;
        for v in complement(n, &subset) {
            term = term.div_polynomial(&Polynomial::univariate(arity, v, &[1, -1]))?;
        }
        acc = if sign > 0 {
            acc.checked_add(&term)?
        } else {
            acc.checked_sub(&term)?
        };
    }
    Ok(acc)
}
