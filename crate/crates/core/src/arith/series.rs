use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};

use super::monomial::Monomial;
use super::poly::Polynomial;
use super::ratfn::RationalFunction;
use super::scalar::{scalar_is_integer, Scalar};
use super::VariableId;
use crate::error::{Error, Result};

/// Multivariate Taylor polynomial at the origin, exact for every exponent
/// vector componentwise `≤ orders` (and of total degree `≤ total` when a
/// total bound is set). Nothing beyond the bounds is stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncatedSeries {
    orders: Vec<u32>,
    total: Option<u32>,
    coeffs: BTreeMap<Monomial, Scalar>,
}

/// Every exponent vector inside the bounds, ascending in the graded order.
pub(crate) fn bounded_monomials(orders: &[u32], total: Option<u32>) -> Vec<Monomial> {
    fn rec(i: usize, orders: &[u32], left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == orders.len() {
            out.push(Monomial::from_exponents(cur));
            return;
        }
        for e in 0..=orders[i].min(left) {
            cur.push(e);
            rec(i + 1, orders, left - e, cur, out);
            cur.pop();
        }
    }
    let cap = total.unwrap_or_else(|| orders.iter().sum());
    let mut out = Vec::new();
    rec(
        0,
        orders,
        cap,
        &mut Vec::with_capacity(orders.len()),
        &mut out,
    );
    out.sort_unstable();
    out
}

impl TruncatedSeries {
    pub fn zero(orders: Vec<u32>, total: Option<u32>) -> Self {
        TruncatedSeries {
            orders,
            total,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_polynomial(p: &Polynomial, orders: Vec<u32>, total: Option<u32>) -> Self {
        assert_eq!(p.arity(), orders.len(), "series arity");
        let coeffs = p
            .terms()
            .iter()
            .filter(|(m, _)| m.within(&orders, total))
            .cloned()
            .collect();
        TruncatedSeries {
            orders,
            total,
            coeffs,
        }
    }

    fn from_map(orders: Vec<u32>, total: Option<u32>, map: HashMap<Monomial, Scalar>) -> Self {
        let coeffs = map
            .into_iter()
            .filter(|(m, c)| !c.is_zero() && m.within(&orders, total))
            .collect();
        TruncatedSeries {
            orders,
            total,
            coeffs,
        }
    }

    pub fn arity(&self) -> usize {
        self.orders.len()
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn total(&self) -> Option<u32> {
        self.total
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.coeffs.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.coeffs.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn coefficient_of(&self, exps: &[u32]) -> Scalar {
        self.coefficient(&Monomial::from_exponents(exps))
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.values().all(scalar_is_integer)
    }

    pub fn to_polynomial(&self) -> Polynomial {
        Polynomial::from_terms(
            self.arity(),
            self.coeffs.iter().map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    fn same_bounds(&self, other: &TruncatedSeries) -> Result<()> {
        if self.orders != other.orders || self.total != other.total {
            return Err(Error::InvalidInput(format!(
                "series truncations differ: {:?}/{:?} vs {:?}/{:?}",
                self.orders, self.total, other.orders, other.total
            )));
        }
        Ok(())
    }

    /// Restricts to tighter bounds.
    pub fn truncate(&self, orders: &[u32], total: Option<u32>) -> TruncatedSeries {
        assert_eq!(orders.len(), self.arity());
        TruncatedSeries {
            orders: orders.to_vec(),
            total,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(m, _)| m.within(orders, total))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn checked_add(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.same_bounds(other)?;
        let mut out = self.coeffs.clone();
        for (m, c) in &other.coeffs {
            add_into(&mut out, m, c.clone());
        }
        Ok(TruncatedSeries {
            orders: self.orders.clone(),
            total: self.total,
            coeffs: out,
        })
    }

    pub fn checked_sub(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.checked_add(&other.scale(&-Scalar::one()))
    }

    pub fn scale(&self, c: &Scalar) -> TruncatedSeries {
        if c.is_zero() {
            return TruncatedSeries::zero(self.orders.clone(), self.total);
        }
        TruncatedSeries {
            orders: self.orders.clone(),
            total: self.total,
            coeffs: self
                .coeffs
                .iter()
                .map(|(m, x)| (m.clone(), x * c))
                .collect(),
        }
    }

    pub fn checked_mul(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.same_bounds(other)?;
        let mut acc: HashMap<Monomial, Scalar> = HashMap::new();
        for (ma, ca) in &self.coeffs {
            for (mb, cb) in &other.coeffs {
                if self.total.is_some_and(|t| ma.degree() + mb.degree() > t) {
                    continue;
                }
                let m = ma.mul(mb);
                if m.within(&self.orders, None) {
                    *acc.entry(m).or_insert_with(Scalar::zero) += ca * cb;
                }
            }
        }
        Ok(Self::from_map(self.orders.clone(), self.total, acc))
    }

    /// Product with a (short) polynomial.
    pub fn mul_polynomial(&self, p: &Polynomial) -> TruncatedSeries {
        assert_eq!(p.arity(), self.arity());
        let mut acc: HashMap<Monomial, Scalar> = HashMap::with_capacity(self.coeffs.len());
        for (mp, cp) in p.terms() {
            for (m, c) in &self.coeffs {
                let t = m.mul(mp);
                if t.within(&self.orders, self.total) {
                    *acc.entry(t).or_insert_with(Scalar::zero) += c * cp;
                }
            }
        }
        Self::from_map(self.orders.clone(), self.total, acc)
    }

    /// `self / p` for a polynomial with nonzero constant term, solved
    /// coefficient by coefficient in the graded order.
    pub fn div_polynomial(&self, p: &Polynomial) -> Result<TruncatedSeries> {
        assert_eq!(p.arity(), self.arity());
        let c0 = p.constant_term();
        if c0.is_zero() {
            return Err(Error::InvalidInput(format!(
                "cannot divide a power series by {p}: zero constant term"
            )));
        }
        let inv = c0.recip();
        let rest: Vec<_> = p.terms().iter().filter(|(m, _)| !m.is_one()).collect();
        let mut out: HashMap<Monomial, Scalar> = HashMap::new();
        for m in bounded_monomials(&self.orders, self.total) {
            let mut v = self.coefficient(&m);
            for (t, pt) in &rest {
                if let Some(prev) = m.checked_div(t) {
                    if let Some(s) = out.get(&prev) {
                        v -= s * pt;
                    }
                }
            }
            if !v.is_zero() {
                out.insert(m, v * &inv);
            }
        }
        Ok(Self::from_map(self.orders.clone(), self.total, out))
    }

    /// `1/(1 + p)` for constant-free `p`, as the truncated alternating
    /// geometric series `Σ (−p)^k`.
    pub fn geometric_inverse(p: &Polynomial, orders: Vec<u32>, total: Option<u32>) -> Result<Self> {
        if !p.constant_term().is_zero() {
            return Err(Error::InvalidInput(
                "geometric inverse needs a constant-free p".into(),
            ));
        }
        let neg = TruncatedSeries::from_polynomial(&-p, orders.clone(), total);
        let mut term =
            TruncatedSeries::from_polynomial(&Polynomial::one(orders.len()), orders, total);
        let mut sum = term.clone();
        loop {
            term = term.checked_mul(&neg)?;
            if term.is_empty() {
                return Ok(sum);
            }
            sum = sum.checked_add(&term)?;
        }
    }

    /// The series with `v := 0`.
    pub fn substitute_zero(&self, v: VariableId) -> TruncatedSeries {
        TruncatedSeries {
            orders: self.orders.clone(),
            total: self.total,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(m, _)| m.exponent(v) == 0)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// `v⁻¹(F − F|_{v=0})`, exact to one order less in `v` and in total degree.
    pub fn shift_down(&self, v: VariableId) -> Result<TruncatedSeries> {
        if self.orders[v] == 0 || self.total == Some(0) {
            return Err(Error::InvalidInput(format!(
                "cannot shift variable {v}: no known coefficients beyond order 0"
            )));
        }
        let mut orders = self.orders.clone();
        orders[v] -= 1;
        let total = self.total.map(|t| t - 1);
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(m, _)| m.exponent(v) > 0)
            .map(|(m, c)| (m.with_exponent(v, m.exponent(v) - 1), c.clone()))
            .collect();
        Ok(TruncatedSeries {
            orders,
            total,
            coeffs,
        })
    }

    /// Renames variable `i` to `map[i]` in a series with the given bounds.
    /// The map must be injective and must not ask for more precision than
    /// the source carries.
    pub fn remap(
        &self,
        map: &[VariableId],
        orders: Vec<u32>,
        total: Option<u32>,
    ) -> Result<TruncatedSeries> {
        assert_eq!(map.len(), self.arity());
        for (i, &t) in map.iter().enumerate() {
            if orders[t] > self.orders[i] {
                return Err(Error::InvalidInput(format!(
                    "remap asks order {} from a series exact to {}",
                    orders[t], self.orders[i]
                )));
            }
        }
        if let Some(src) = self.total {
            if total.is_none_or(|t| t > src) {
                return Err(Error::InvalidInput(
                    "remap asks for more total degree".into(),
                ));
            }
        }
        let arity = orders.len();
        let mut acc = HashMap::new();
        for (m, c) in &self.coeffs {
            let mut e = vec![0u32; arity];
            for (i, &x) in m.exponents().iter().enumerate() {
                e[map[i]] += x;
            }
            acc.insert(Monomial::from_exponents(&e), c.clone());
        }
        Ok(Self::from_map(orders, total, acc))
    }
}

fn add_into(map: &mut BTreeMap<Monomial, Scalar>, m: &Monomial, c: Scalar) {
    match map.entry(m.clone()) {
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
        std::collections::btree_map::Entry::Vacant(e) => {
            if !c.is_zero() {
                e.insert(c);
            }
        }
    }
}

impl RationalFunction {
    /// Exact Taylor coefficients at the origin up to `orders`.
    pub fn taylor_expand(&self, orders: &[u32]) -> TruncatedSeries {
        self.taylor_expand_bounded(orders, None)
    }

    /// As [`taylor_expand`](Self::taylor_expand), additionally dropping
    /// everything above total degree `total`.
    pub fn taylor_expand_bounded(&self, orders: &[u32], total: Option<u32>) -> TruncatedSeries {
        assert_eq!(orders.len(), self.arity(), "series arity");
        let mut s = TruncatedSeries::from_polynomial(self.numerator(), orders.to_vec(), total);
        for (p, e) in self.factors() {
            for _ in 0..e {
                s = s
                    .div_polynomial(p)
                    .expect("denominator factors have unit constant term");
            }
        }
        s
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let orders: Vec<String> = self.orders.iter().map(|o| o.to_string()).collect();
        write!(f, "[orders={};total=", orders.join(","))?;
        match self.total {
            Some(t) => write!(f, "{t}] ")?,
            None => f.write_str("none] ")?,
        }
        write!(f, "{}", self.to_polynomial())
    }
}

#[cfg(test)]
mod tests {
    use super::super::ratfn::DenominatorFactor;
    use super::super::scalar::int;
    use super::*;

    #[test]
    fn geometric_in_two_variables() {
        let one_minus = Polynomial::from_terms(
            2,
            vec![
                (Monomial::one(2), int(1)),
                (Monomial::from_exponents(&[1, 1]), int(-1)),
            ],
        );
        let f = RationalFunction::reciprocal_of(one_minus).unwrap();
        let s = f.taylor_expand(&[2, 2]);
        let expected: Vec<_> = vec![[0, 0], [1, 1], [2, 2]];
        assert_eq!(s.len(), 3);
        for e in expected {
            assert_eq!(s.coefficient_of(&e), int(1));
        }
    }

    #[test]
    fn constant_function() {
        let s = RationalFunction::constant(2, int(5)).taylor_expand(&[3, 3]);
        assert_eq!(s.len(), 1);
        assert_eq!(s.coefficient_of(&[0, 0]), int(5));
    }

    #[test]
    fn division_matches_geometric_series() {
        let p = Polynomial::univariate(2, 0, &[0, 1, 1]);
        let p = &p + &Polynomial::var(2, 1);
        let one_plus = &Polynomial::one(2) + &p;
        let f = RationalFunction::new(Polynomial::one(2), [DenominatorFactor::new(one_plus, 2)])
            .unwrap();
        let direct = f.taylor_expand_bounded(&[4, 4], Some(6));
        let g = TruncatedSeries::geometric_inverse(&p, vec![4, 4], Some(6)).unwrap();
        assert_eq!(direct, g.checked_mul(&g).unwrap());
    }

    #[test]
    fn shift_lowers_orders() {
        let f = RationalFunction::reciprocal_of(Polynomial::univariate(1, 0, &[1, -1])).unwrap();
        let s = f.taylor_expand(&[5]).shift_down(0).unwrap();
        assert_eq!(s.orders(), &[4]);
        assert_eq!(s, f.taylor_expand(&[4]));
    }

    #[test]
    fn bounded_monomials_are_sorted_and_counted() {
        let all = bounded_monomials(&[10, 10, 10], Some(4));
        assert_eq!(all.len(), 35); // C(4 + 3, 3)
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }
}
