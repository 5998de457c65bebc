//! Sparse multivariate (Laurent in unit variables) polynomials over Q(i).

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::coeff::GaussRat;
use super::vars::{self, VarId};

/// Exponent vector stored sparsely, sorted by variable id, no zero entries.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(Vec<(VarId, i32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: VarId, e: i32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(v, e)])
        }
    }

    pub fn from_pairs(mut pairs: Vec<(VarId, i32)>) -> Self {
        pairs.sort_by_key(|p| p.0);
        let mut out: Vec<(VarId, i32)> = Vec::with_capacity(pairs.len());
        for (v, e) in pairs {
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 += e,
                _ => out.push((v, e)),
            }
        }
        out.retain(|p| p.1 != 0);
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exps(&self) -> &[(VarId, i32)] {
        &self.0
    }

    pub fn exp(&self, v: VarId) -> i32 {
        self.0
            .binary_search_by_key(&v, |p| p.0)
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn total_degree(&self) -> i64 {
        self.0.iter().map(|p| p.1 as i64).sum()
    }

    fn merge(&self, other: &Monomial, sign: i32) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let take = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => x.0.cmp(&y.0),
                (Some(_), None) => Ordering::Less,
                (None, Some(_)) => Ordering::Greater,
                (None, None) => unreachable!(),
            };
            match take {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((b[j].0, sign * b[j].1));
                    j += 1;
                }
                Ordering::Equal => {
                    let e = a[i].1 + sign * b[j].1;
                    if e != 0 {
                        out.push((a[i].0, e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Monomial(out)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        self.merge(other, 1)
    }

    /// Quotient exponent vector (may be negative).
    pub fn div(&self, other: &Monomial) -> Monomial {
        self.merge(other, -1)
    }

    /// True when every exponent of `other` is at most the matching one here.
    pub fn divisible_by(&self, other: &Monomial) -> bool {
        other.0.iter().all(|&(v, e)| self.exp(v) >= e)
    }

    /// Componentwise minimum over the union of supports (absent = 0).
    pub fn min_with(&self, other: &Monomial) -> Monomial {
        let mut keys: BTreeSet<VarId> = self.0.iter().map(|p| p.0).collect();
        keys.extend(other.0.iter().map(|p| p.0));
        Monomial::from_pairs(
            keys.into_iter()
                .map(|v| (v, self.exp(v).min(other.exp(v))))
                .collect(),
        )
    }

    pub fn without(&self, v: VarId) -> Monomial {
        Monomial(self.0.iter().copied().filter(|p| p.0 != v).collect())
    }

    pub fn filter(&self, keep: impl Fn(VarId) -> bool) -> Monomial {
        Monomial(self.0.iter().copied().filter(|p| keep(p.0)).collect())
    }
}

fn lex_cmp(a: &Monomial, b: &Monomial) -> Ordering {
    let (a, b) = (&a.0, &b.0);
    let (mut i, mut j) = (0, 0);
    loop {
        match (a.get(i), b.get(j)) {
            (None, None) => return Ordering::Equal,
            (Some(x), None) => return x.1.cmp(&0),
            (None, Some(y)) => return 0.cmp(&y.1),
            (Some(x), Some(y)) => match x.0.cmp(&y.0) {
                Ordering::Less => return x.1.cmp(&0),
                Ordering::Greater => return 0.cmp(&y.1),
                Ordering::Equal => {
                    if x.1 != y.1 {
                        return x.1.cmp(&y.1);
                    }
                    i += 1;
                    j += 1;
                }
            },
        }
    }
}

/// Graded lexicographic; lower variable ids dominate.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| lex_cmp(self, other))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, GaussRat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn constant(c: GaussRat) -> Self {
        Poly::term(c, Monomial::one())
    }

    pub fn one() -> Self {
        Poly::constant(GaussRat::one())
    }

    pub fn term(c: GaussRat, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn var(v: VarId) -> Self {
        Poly::term(GaussRat::one(), Monomial::var(v, 1))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.constant_value().is_some_and(|c| c.is_one())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &GaussRat)> {
        self.terms.iter()
    }

    /// Value when the polynomial is a constant (zero included).
    pub fn constant_value(&self) -> Option<GaussRat> {
        match self.terms.len() {
            0 => Some(GaussRat::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.constant_value().is_some()
    }

    pub fn leading(&self) -> Option<(&Monomial, &GaussRat)> {
        self.terms.iter().next_back()
    }

    pub fn lc(&self) -> GaussRat {
        self.leading().map(|t| t.1.clone()).unwrap_or_else(GaussRat::zero)
    }

    fn add_term(&mut self, m: Monomial, c: GaussRat) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let s = &*existing + &c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let (mut big, small) = if self.terms.len() >= o.terms.len() {
            (self.clone(), o)
        } else {
            (o.clone(), self)
        };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &GaussRat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        Poly { terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect() }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        self.terms.keys().flat_map(|m| m.exps().iter().map(|p| p.0)).collect()
    }

    pub fn degree_in(&self, v: VarId) -> i32 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    pub fn min_degree_in(&self, v: VarId) -> i32 {
        self.terms.keys().map(|m| m.exp(v)).min().unwrap_or(0)
    }

    pub fn total_degree(&self) -> i64 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    /// Componentwise minimum exponent over all terms, restricted to `keep`.
    pub fn min_monomial(&self, keep: impl Fn(VarId) -> bool + Copy) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Monomial::one();
        };
        let mut acc = first.filter(keep);
        for m in it {
            acc = acc.min_with(&m.filter(keep));
        }
        acc
    }

    /// Coefficients in `v`: index k holds the coefficient of v^k. Requires
    /// nonnegative exponents in `v`.
    pub fn to_univariate(&self, v: VarId) -> Vec<Poly> {
        let deg = self.degree_in(v).max(0) as usize;
        let mut out = vec![Poly::zero(); deg + 1];
        for (m, c) in &self.terms {
            let e = m.exp(v);
            debug_assert!(e >= 0);
            out[e as usize].add_term(m.without(v), c.clone());
        }
        out
    }

    pub fn from_univariate(coeffs: &[Poly], v: VarId) -> Poly {
        let mut out = Poly::zero();
        for (k, c) in coeffs.iter().enumerate() {
            let mv = Monomial::var(v, k as i32);
            for (m, x) in &c.terms {
                out.add_term(m.mul(&mv), x.clone());
            }
        }
        out
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    /// Both operands must be ordinary (nonnegative-exponent) polynomials.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if let Some(c) = d.constant_value() {
            return Some(self.scale(&c.inv()?));
        }
        let (dm, dc) = d.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        if d.num_terms() == 1 {
            // single-term divisor: divide termwise
            let inv = dc.inv()?;
            let mut out = Poly::zero();
            for (m, c) in &self.terms {
                if !m.divisible_by(&dm) {
                    return None;
                }
                out.add_term(m.div(&dm), c * &inv);
            }
            return Some(out);
        }
        let inv = dc.inv()?;
        let mut rem = self.clone();
        let mut q = Poly::zero();
        while let Some((rm, rc)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            if !rm.divisible_by(&dm) {
                return None;
            }
            let tm = rm.div(&dm);
            let tc = &rc * &inv;
            let t = Poly::term(tc.clone(), tm.clone());
            rem = rem.sub(&d.mul(&t));
            q.add_term(tm, tc);
        }
        Some(q)
    }

    /// Partial derivative; units over `v` contribute `rate * e * u^e`.
    pub fn deriv(&self, v: VarId) -> Poly {
        let units = vars::units_over(v);
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            if e != 0 {
                let nm = m.mul(&Monomial::var(v, -1));
                out.add_term(nm, c * &GaussRat::from_int(e as i64));
            }
            for (u, rate) in &units {
                let eu = m.exp(*u);
                if eu != 0 {
                    let k = GaussRat::from_rational(rate * num_rational::BigRational::from_integer(eu.into()));
                    out.add_term(m.clone(), c * &k);
                }
            }
        }
        out
    }

    pub fn map_coeffs(&self, f: impl Fn(&GaussRat) -> GaussRat) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, GaussRat)>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }
}

fn fmt_monomial(m: &Monomial) -> String {
    m.exps()
        .iter()
        .map(|&(v, e)| {
            let n = vars::name(v);
            if e == 1 {
                n
            } else if e > 0 {
                format!("{n}^{e}")
            } else {
                format!("{n}^({e})")
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg_real = c.is_real() && c.re < num_rational::BigRational::from_integer(0.into());
            let mag = if neg_real { -c } else { c.clone() };
            let sign = if neg_real { "-" } else { "+" };
            if first {
                if neg_real {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            if m.is_one() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", fmt_monomial(m))?;
            } else {
                write!(f, "{mag}*{}", fmt_monomial(m))?;
            }
        }
        Ok(())
    }
}
