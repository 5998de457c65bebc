//! Sections of `TM + T*M` and of `E1(M) = (TM x R) + (T*M x R)`, their
//! pairings, validated frames, span comparison and linear images.

use std::fmt;

use crate::calculus::{same_chart, KForm, KVector};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::scalar::{unit_certify, Certificate, ChartRef, GaussRat, Point, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

fn half() -> Scalar {
    Scalar::from_ratio(1, 2)
}

/// `X + xi` in `TM + T*M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CouSection {
    pub x: KVector,
    pub xi: KForm,
}

/// `(X, f) + (xi, g)` in `E1(M)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct E1Section {
    pub x: KVector,
    pub f: Scalar,
    pub xi: KForm,
    pub g: Scalar,
}

/// Common interface for the two section kinds: flattening to a component
/// vector, rebuilding, and the symmetric pairing.
pub trait Section: Clone + fmt::Display + fmt::Debug + PartialEq {
    fn chart(&self) -> &ChartRef;
    /// Components `[X_0..X_n, xi_0..xi_n]` (plus `f` and `g` after each half
    /// for E1 sections).
    fn comps(&self) -> Vec<Scalar>;
    fn from_comps(chart: &ChartRef, c: &[Scalar]) -> Self;
    fn pair_plus(&self, o: &Self) -> Result<Scalar>;
    /// Rank of a maximal isotropic subbundle on an n-dimensional chart.
    fn full_rank(dim: usize) -> usize;
    /// Number of components in the tangent half.
    fn tangent_len(dim: usize) -> usize;

    fn zero(chart: &ChartRef) -> Self {
        let n = 2 * Self::tangent_len(chart.dim());
        Self::from_comps(chart, &vec![Scalar::zero(); n])
    }

    fn add(&self, o: &Self) -> Self {
        let c: Vec<Scalar> = self.comps().iter().zip(o.comps()).map(|(a, b)| a + &b).collect();
        Self::from_comps(self.chart(), &c)
    }

    fn sub(&self, o: &Self) -> Self {
        let c: Vec<Scalar> = self.comps().iter().zip(o.comps()).map(|(a, b)| a - &b).collect();
        Self::from_comps(self.chart(), &c)
    }

    fn scale(&self, s: &Scalar) -> Self {
        let c: Vec<Scalar> = self.comps().iter().map(|a| s * a).collect();
        Self::from_comps(self.chart(), &c)
    }

    fn is_zero(&self) -> bool {
        self.comps().iter().all(|c| c.is_zero())
    }

    fn eval_at(&self, p: &Point) -> Result<Self> {
        let c: Result<Vec<Scalar>> = self
            .comps()
            .iter()
            .map(|a| {
                a.eval_at(p).map_err(|e| match e {
                    crate::scalar::ScalarError::PointOutsideDomain => Error::PointOutsideDomain(p.to_string()),
                    other => other.into(),
                })
            })
            .collect();
        Ok(Self::from_comps(self.chart(), &c?))
    }
}

impl CouSection {
    pub fn new(x: KVector, xi: KForm) -> Result<Self> {
        same_chart(x.chart(), xi.chart())?;
        if x.degree() != 1 || xi.degree() != 1 {
            return Err(Error::Invalid("sections need a vector field and a 1-form".into()));
        }
        Ok(CouSection { x, xi })
    }

    pub fn pairing(&self, o: &CouSection, sign: Sign) -> Result<Scalar> {
        same_chart(self.chart(), o.chart())?;
        let a = self.xi.eval1(&o.x)?;
        let b = o.xi.eval1(&self.x)?;
        Ok(match sign {
            Sign::Plus => &half() * &(&a + &b),
            Sign::Minus => &half() * &(&a - &b),
        })
    }
}

impl E1Section {
    pub fn new(x: KVector, f: Scalar, xi: KForm, g: Scalar) -> Result<Self> {
        same_chart(x.chart(), xi.chart())?;
        if x.degree() != 1 || xi.degree() != 1 {
            return Err(Error::Invalid("sections need a vector field and a 1-form".into()));
        }
        Ok(E1Section { x, f, xi, g })
    }

    pub fn pairing(&self, o: &E1Section, sign: Sign) -> Result<Scalar> {
        if sign == Sign::Minus {
            return Err(Error::MinusPairingUndefinedForE1);
        }
        self.pair_plus(o)
    }
}

impl Section for CouSection {
    fn chart(&self) -> &ChartRef {
        self.x.chart()
    }

    fn comps(&self) -> Vec<Scalar> {
        let mut c = self.x.components();
        c.extend(self.xi.components());
        c
    }

    fn from_comps(chart: &ChartRef, c: &[Scalar]) -> Self {
        let n = chart.dim();
        CouSection {
            x: KVector::vector(chart, c[..n].to_vec()),
            xi: KForm::one_form(chart, c[n..2 * n].to_vec()),
        }
    }

    fn pair_plus(&self, o: &Self) -> Result<Scalar> {
        self.pairing(o, Sign::Plus)
    }

    fn full_rank(dim: usize) -> usize {
        dim
    }

    fn tangent_len(dim: usize) -> usize {
        dim
    }
}

impl Section for E1Section {
    fn chart(&self) -> &ChartRef {
        self.x.chart()
    }

    fn comps(&self) -> Vec<Scalar> {
        let mut c = self.x.components();
        c.push(self.f.clone());
        c.extend(self.xi.components());
        c.push(self.g.clone());
        c
    }

    fn from_comps(chart: &ChartRef, c: &[Scalar]) -> Self {
        let n = chart.dim();
        E1Section {
            x: KVector::vector(chart, c[..n].to_vec()),
            f: c[n].clone(),
            xi: KForm::one_form(chart, c[n + 1..2 * n + 1].to_vec()),
            g: c[2 * n + 1].clone(),
        }
    }

    fn pair_plus(&self, o: &Self) -> Result<Scalar> {
        same_chart(self.chart(), o.chart())?;
        let a = self.xi.eval1(&o.x)?;
        let b = o.xi.eval1(&self.x)?;
        let c = &self.g * &o.f;
        let d = &o.g * &self.f;
        Ok(&half() * &(&(&a + &b) + &(&c + &d)))
    }

    fn full_rank(dim: usize) -> usize {
        dim + 1
    }

    fn tangent_len(dim: usize) -> usize {
        dim + 1
    }
}

impl fmt::Display for CouSection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] + [{}]", self.x, self.xi)
    }
}

impl fmt::Display for E1Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "([{}], {}) + ([{}], {})", self.x, self.f, self.xi, self.g)
    }
}

/// Either kind of section, for callers that mix kinds at runtime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnySection {
    Cou(CouSection),
    E1(E1Section),
}

pub fn pairing(a: &AnySection, b: &AnySection, sign: Sign) -> Result<Scalar> {
    match (a, b) {
        (AnySection::Cou(a), AnySection::Cou(b)) => a.pairing(b, sign),
        (AnySection::E1(a), AnySection::E1(b)) => a.pairing(b, sign),
        _ => Err(Error::KindMismatch),
    }
}

/// Generators of a maximal isotropic subbundle, with certified rank.
#[derive(Clone, Debug)]
pub struct StructureFrame<S: Section> {
    chart: ChartRef,
    gens: Vec<S>,
    minor_cols: Vec<usize>,
    minor_det: Scalar,
}

impl<S: Section> StructureFrame<S> {
    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }

    pub fn gens(&self) -> &[S] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// Columns of the certified maximal minor and its determinant.
    pub fn minor(&self) -> (&[usize], &Scalar) {
        (&self.minor_cols, &self.minor_det)
    }

    /// Generator matrix, one row per generator.
    pub fn matrix(&self) -> Matrix {
        self.gens.iter().map(|g| g.comps()).collect()
    }

    /// Coefficients `c` with `sum c_i e_i = target`, over the fraction field.
    pub fn solve(&self, target: &S) -> Option<Vec<Scalar>> {
        let a = linalg::transpose(&self.matrix());
        linalg::solve(&a, &target.comps(), Some(&self.chart))
    }

    pub fn combine(&self, coeffs: &[Scalar]) -> S {
        let mut acc = S::zero(&self.chart);
        for (c, g) in coeffs.iter().zip(&self.gens) {
            if !c.is_zero() {
                acc = acc.add(&g.scale(c));
            }
        }
        acc
    }

    /// Membership with certified coefficient denominators.
    pub fn contains(&self, target: &S) -> Membership {
        match self.solve(target) {
            None => Membership::NotInSpan,
            Some(c) => match certify_all(&c, &self.chart) {
                None => Membership::Certified(c),
                Some((factor, witness)) => Membership::Uncertified { coeffs: c, factor, witness },
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    Certified(Vec<Scalar>),
    Uncertified { coeffs: Vec<Scalar>, factor: String, witness: Option<Point> },
    NotInSpan,
}

impl Membership {
    pub fn is_certified(&self) -> bool {
        matches!(self, Membership::Certified(_))
    }
}

/// First refused denominator among `vals`, if any.
pub fn certify_all(vals: &[Scalar], chart: &ChartRef) -> Option<(String, Option<Point>)> {
    for v in vals {
        if v.den().is_one() {
            continue;
        }
        if let Certificate::Refused { factor, witness } = unit_certify(v.den(), chart) {
            return Some((factor.to_string(), witness));
        }
    }
    None
}

/// Checks isotropy and certifies full constant rank.
pub fn validate_frame<S: Section>(chart: &ChartRef, gens: Vec<S>) -> Result<StructureFrame<S>> {
    let expected = S::full_rank(chart.dim());
    if gens.len() != expected {
        return Err(Error::WrongFrameSize { expected, got: gens.len() });
    }
    for g in &gens {
        same_chart(chart, g.chart())?;
    }
    for i in 0..gens.len() {
        for j in i..gens.len() {
            let v = gens[i].pair_plus(&gens[j])?;
            if !v.is_zero() {
                return Err(Error::NotIsotropic { i, j, value: v.to_string() });
            }
        }
    }
    certify_rank(chart, gens)
}

fn certify_rank<S: Section>(chart: &ChartRef, gens: Vec<S>) -> Result<StructureFrame<S>> {
    let m: Matrix = gens.iter().map(|g| g.comps()).collect();
    let red = linalg::rref(&m, Some(chart));
    if red.rank() < gens.len() {
        return Err(Error::RankNotCertified(format!("generic rank {} < {}", red.rank(), gens.len())));
    }
    let det = red.minor_det();
    for part in [det.num(), det.den()] {
        if let Certificate::Refused { factor, witness } = unit_certify(part, chart) {
            let at = witness.map(|w| format!(" (vanishes at {w})")).unwrap_or_default();
            return Err(Error::RankNotCertified(format!(
                "minor on columns {:?} has determinant {det}; factor {factor} not certified{at}",
                red.pivot_cols()
            )));
        }
    }
    Ok(StructureFrame { chart: chart.clone(), gens, minor_cols: red.pivot_cols(), minor_det: det })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanVerdict {
    pub equal: bool,
    /// `(side, index)`: generator `index` of frame `a` (side 0) or `b`
    /// (side 1) that the other frame fails to produce.
    pub witness: Option<(usize, usize)>,
}

/// Whether two frames span the same subbundle, with certified coefficients
/// in both directions.
pub fn span_equal<S: Section>(a: &StructureFrame<S>, b: &StructureFrame<S>) -> Result<SpanVerdict> {
    same_chart(a.chart(), b.chart())?;
    for (side, (x, y)) in [(a, b), (b, a)].into_iter().enumerate() {
        for (i, g) in x.gens().iter().enumerate() {
            if !y.contains(g).is_certified() {
                return Ok(SpanVerdict { equal: false, witness: Some((side, i)) });
            }
        }
    }
    Ok(SpanVerdict { equal: true, witness: None })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

fn const_matrix(p: &[Vec<GaussRat>]) -> Matrix {
    p.iter().map(|r| r.iter().map(|c| Scalar::constant(c.clone())).collect()).collect()
}

/// Basis of the row space of `rows`.
fn row_basis(rows: Matrix) -> Matrix {
    if rows.is_empty() {
        return rows;
    }
    let red = linalg::rref(&rows, None);
    let mut piv: Vec<(usize, usize)> = red.pivots.clone();
    piv.sort_by_key(|p| p.1);
    piv.into_iter().map(|(r, _)| red.rows[r].clone()).collect()
}

/// Image of a Dirac structure under a constant linear map.
///
/// `map` is the matrix of `p` with one row per coordinate of the codomain.
/// Forward: `p : V -> W`, `frame` on `V`, result on `target` (= `W`) is
/// `{pX + eta : X + p*eta in L}`. Backward: `p : W -> V`, `frame` on `V`,
/// result on `target` (= `W`) is `{Y + p*xi : pY + xi in L}`.
pub fn linear_image(
    frame: &StructureFrame<CouSection>,
    map: &[Vec<GaussRat>],
    direction: Direction,
    target: &ChartRef,
) -> Result<StructureFrame<CouSection>> {
    let n = frame.chart().dim();
    let m = target.dim();
    let p = const_matrix(map);
    let k = frame.len();
    let xs: Vec<Vec<Scalar>> = frame.gens().iter().map(|g| g.x.components()).collect();
    let xis: Vec<Vec<Scalar>> = frame.gens().iter().map(|g| g.xi.components()).collect();
    let rows: Matrix = match direction {
        Direction::Forward => {
            if p.len() != m || p.iter().any(|r| r.len() != n) {
                return Err(Error::Invalid(format!("forward map must be {m}x{n}")));
            }
            // unknowns (c_1..c_k, eta_1..eta_m); equations sum c_i xi_i = p^T eta
            let eqs: Matrix = (0..n)
                .map(|a| {
                    let mut row: Vec<Scalar> = (0..k).map(|i| xis[i][a].clone()).collect();
                    row.extend((0..m).map(|b| -&p[b][a]));
                    row
                })
                .collect();
            linalg::kernel(&eqs, k + m)
                .into_iter()
                .map(|v| {
                    let mut out: Vec<Scalar> = (0..m)
                        .map(|b| (0..n).map(|a| &p[b][a] * &(0..k).map(|i| &v[i] * &xs[i][a]).sum()).sum())
                        .collect();
                    out.extend(v[k..].iter().cloned());
                    out
                })
                .collect()
        }
        Direction::Backward => {
            if p.len() != n || p.iter().any(|r| r.len() != m) {
                return Err(Error::Invalid(format!("backward map must be {n}x{m}")));
            }
            // unknowns (c_1..c_k, Y_1..Y_m); equations sum c_i X_i = p Y
            let eqs: Matrix = (0..n)
                .map(|a| {
                    let mut row: Vec<Scalar> = (0..k).map(|i| xs[i][a].clone()).collect();
                    row.extend((0..m).map(|b| -&p[a][b]));
                    row
                })
                .collect();
            linalg::kernel(&eqs, k + m)
                .into_iter()
                .map(|v| {
                    let mut out: Vec<Scalar> = v[k..].to_vec();
                    out.extend(
                        (0..m).map(|b| (0..n).map(|a| &p[a][b] * &(0..k).map(|i| &v[i] * &xis[i][a]).sum()).sum()),
                    );
                    out
                })
                .collect()
        }
    };
    let basis = row_basis(rows);
    let gens = basis.iter().map(|r| CouSection::from_comps(target, r)).collect();
    validate_frame(target, gens)
}

/// Checks `rho_V(L) = (L cap V*)^0` and `rho_V*(L) = (L cap V)^0` for a
/// frame evaluated to constants.
pub fn annihilator_identities(frame: &StructureFrame<CouSection>) -> bool {
    let n = frame.chart().dim();
    let m = frame.matrix();
    let k = m.len();
    // L cap V*: combinations with vanishing tangent part
    let tangent: Matrix = (0..n).map(|a| (0..k).map(|i| m[i][a].clone()).collect()).collect();
    let cotangent: Matrix = (0..n).map(|a| (0..k).map(|i| m[i][n + a].clone()).collect()).collect();
    let check = |zero_block: &Matrix, other: &[usize], proj: &[usize]| -> bool {
        let ker = linalg::kernel(zero_block, k);
        let inter: Matrix = ker
            .iter()
            .map(|c| other.iter().map(|&a| (0..k).map(|i| &c[i] * &m[i][a]).sum()).collect())
            .collect();
        let image: Matrix = m.iter().map(|row| proj.iter().map(|&a| row[a].clone()).collect()).collect();
        // every image vector is annihilated by the intersection
        for v in &image {
            for w in &inter {
                let s: Scalar = v.iter().zip(w).map(|(a, b)| a * b).sum();
                if !s.is_zero() {
                    return false;
                }
            }
        }
        linalg::rank(&image) + linalg::rank(&inter) == n
    };
    let tan_idx: Vec<usize> = (0..n).collect();
    let cot_idx: Vec<usize> = (n..2 * n).collect();
    check(&tangent, &cot_idx, &tan_idx) && check(&cotangent, &tan_idx, &cot_idx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{parse_scalar, Chart};

    fn r2() -> ChartRef {
        Chart::builder("lp_r2").coord("x").coord("y").build().unwrap()
    }

    fn cou(c: &ChartRef, x: &[&str], xi: &[&str]) -> CouSection {
        let p = |e: &&str| parse_scalar(e, c).unwrap();
        CouSection::new(KVector::vector(c, x.iter().map(p).collect()), KForm::one_form(c, xi.iter().map(p).collect()))
            .unwrap()
    }

    #[test]
    fn plus_pairing_value() {
        let c = r2();
        let a = cou(&c, &["1", "0"], &["0", "1"]);
        let b = cou(&c, &["0", "1"], &["1", "0"]);
        assert_eq!(a.pairing(&b, Sign::Plus).unwrap(), Scalar::one());
        assert!(a.pairing(&a, Sign::Minus).unwrap().is_zero());
    }

    #[test]
    fn e1_pairing_and_minus_rejected() {
        let c = r2();
        let z = KVector::zero(&c, 1);
        let zf = KForm::zero(&c, 1);
        let a = E1Section::new(z.clone(), Scalar::one(), zf.clone(), Scalar::zero()).unwrap();
        let b = E1Section::new(z, Scalar::zero(), zf, Scalar::one()).unwrap();
        assert_eq!(a.pair_plus(&b).unwrap(), Scalar::from_ratio(1, 2));
        assert_eq!(a.pairing(&b, Sign::Minus), Err(Error::MinusPairingUndefinedForE1));
        let k = pairing(&AnySection::E1(a), &AnySection::Cou(cou(&c, &["0", "0"], &["0", "0"])), Sign::Plus);
        assert_eq!(k, Err(Error::KindMismatch));
    }

    #[test]
    fn frames() {
        let c = r2();
        let f = validate_frame(&c, vec![cou(&c, &["1", "0"], &["0", "1"]), cou(&c, &["0", "1"], &["-1", "0"])]);
        assert!(f.is_ok());
        let ex = validate_frame(&c, vec![cou(&c, &["1", "0"], &["0", "x^2"]), cou(&c, &["0", "1"], &["-x^2", "0"])]);
        assert!(ex.is_ok());
        let c1 = Chart::builder("lp_r1").coord("x").build().unwrap();
        let bad = validate_frame(&c1, vec![cou(&c1, &["1"], &["1"])]);
        assert!(matches!(bad, Err(Error::NotIsotropic { i: 0, j: 0, .. })));
    }

    #[test]
    fn rank_not_certified_on_degenerate_frame() {
        let c = r2();
        let bad = validate_frame(&c, vec![cou(&c, &["x", "0"], &["0", "0"]), cou(&c, &["0", "1"], &["0", "0"])]);
        assert!(matches!(bad, Err(Error::RankNotCertified(_))));
    }
}
