//! Spectral and operator heights for matrices whose eigenvalues are known
//! exactly.
//!
//! The spectral height is taken as the projective height of the eigenvalue
//! tuple. The class degree `deg([A]_c)` is only bracketed: from below by
//! `deg(λ_1 : ... : λ_n) / n!` and from above by the entry degree of a known
//! representative.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::algebraic::{tuple_degree, IntPolynomial, RadicalMonomial};
use crate::error::{Error, Result};
use crate::exact::{LogLinear, Real};
use crate::heights::{h2_rational, projective_height, weighted_height, ProjectiveTuple, Weight};
use crate::northcott::northcott_bracket;
use crate::tower::{alpha, TowerSpec};

/// Largest degree range scanned when taking a weight's supremum.
const MAX_DEGREE_SCAN: u64 = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum StructuredMatrix {
    /// Dense matrix with rational entries, rows as `"num/den"` strings.
    Rational {
        #[serde(with = "rat_rows")]
        rows: Vec<Vec<BigRational>>,
    },
    /// Diagonal matrix; `null` entries are zero.
    Diagonal { entries: Vec<Option<RadicalMonomial>> },
    /// `1 ⊕ C`, with `C` the companion matrix of `x^(n-1) - α`.
    #[serde(rename = "block")]
    Block { n: usize, alpha: RadicalMonomial },
}

mod rat_rows {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Vec<BigRational>], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|r| r.iter().map(crate::json::rational_string).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigRational>>, D::Error> {
        let v = Vec::<Vec<serde_json::Value>>::deserialize(d)?;
        v.iter()
            .map(|r| {
                r.iter()
                    .map(|x| {
                        let s = match x {
                            serde_json::Value::String(s) => s.clone(),
                            serde_json::Value::Number(n) => n.to_string(),
                            other => return Err(serde::de::Error::custom(format!("bad entry {other}"))),
                        };
                        crate::json::parse_rational(&s).map_err(serde::de::Error::custom)
                    })
                    .collect()
            })
            .collect()
    }
}

/// Eigenvalues in a form whose projective height is exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Spectrum {
    Tuple(ProjectiveTuple),
    /// `2 × 2` rational matrix with complex conjugate eigenvalues. Their
    /// ratio `r` satisfies `a r^2 - b r + a = 0` with `|r| = 1`, so
    /// `h(λ_1 : λ_2) = h(r) = (log a) / 2`.
    ConjugatePair { a: BigInt, b: BigInt },
}

fn rat_i(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

impl StructuredMatrix {
    pub fn rational_i64(rows: &[&[i64]]) -> StructuredMatrix {
        StructuredMatrix::Rational {
            rows: rows.iter().map(|r| r.iter().map(|&x| rat_i(x)).collect()).collect(),
        }
    }

    pub fn diagonal(entries: Vec<RadicalMonomial>) -> StructuredMatrix {
        StructuredMatrix::Diagonal { entries: entries.into_iter().map(Some).collect() }
    }

    pub fn size(&self) -> usize {
        match self {
            StructuredMatrix::Rational { rows } => rows.len(),
            StructuredMatrix::Diagonal { entries } => entries.len(),
            StructuredMatrix::Block { n, .. } => *n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            StructuredMatrix::Rational { rows } => {
                let n = rows.len();
                if n == 0 || rows.iter().any(|r| r.len() != n) {
                    return Err(Error::InvalidInput("rational matrix must be square and nonempty".into()));
                }
            }
            StructuredMatrix::Diagonal { entries } if entries.is_empty() => {
                return Err(Error::InvalidInput("diagonal matrix must be nonempty".into()));
            }
            StructuredMatrix::Block { n, .. } if *n < 2 => {
                return Err(Error::InvalidInput("block matrix needs size at least 2".into()));
            }
            _ => {}
        }
        Ok(())
    }

    /// Nonzero entries as monomials, in row-major order.
    fn nonzero_entries(&self) -> Result<Vec<RadicalMonomial>> {
        Ok(match self {
            StructuredMatrix::Rational { rows } => rows
                .iter()
                .flatten()
                .filter(|x| !x.is_zero())
                .map(RadicalMonomial::from_rational)
                .collect::<Result<_>>()?,
            StructuredMatrix::Diagonal { entries } => entries.iter().flatten().cloned().collect(),
            StructuredMatrix::Block { n, alpha } => {
                // row-major: 1, then the subdiagonal ones, then α in the last column
                let mut v = vec![RadicalMonomial::one()];
                if *n > 2 {
                    v.extend(std::iter::repeat_n(RadicalMonomial::one(), n - 2));
                }
                v.insert(1.min(v.len()), alpha.clone());
                v
            }
        })
    }

    /// Dense form, for shapes whose entries are all rational.
    pub fn rational_rows(&self) -> Option<Vec<Vec<BigRational>>> {
        match self {
            StructuredMatrix::Rational { rows } => Some(rows.clone()),
            StructuredMatrix::Diagonal { entries } => {
                let n = entries.len();
                let mut out = vec![vec![BigRational::zero(); n]; n];
                for (i, e) in entries.iter().enumerate() {
                    if let Some(e) = e {
                        out[i][i] = e.as_rational()?;
                    }
                }
                Some(out)
            }
            StructuredMatrix::Block { .. } => None,
        }
    }

    /// Eigenvalues with multiplicity.
    pub fn spectrum(&self) -> Result<Spectrum> {
        self.validate()?;
        match self {
            StructuredMatrix::Diagonal { entries } => {
                Ok(Spectrum::Tuple(ProjectiveTuple::Radical(entries.clone())))
            }
            StructuredMatrix::Block { n, alpha } => {
                Ok(Spectrum::Tuple(ProjectiveTuple::Radical(block_eigenvalues(*n, alpha)?.into_iter().map(Some).collect())))
            }
            StructuredMatrix::Rational { rows } => rational_spectrum(rows),
        }
    }
}

/// `(1, β, β ζ_(n-1), ..., β ζ_(n-1)^(n-2))` with `β = α^(1/(n-1))`.
pub fn block_eigenvalues(n: usize, alpha: &RadicalMonomial) -> Result<Vec<RadicalMonomial>> {
    let m = (n - 1) as u64;
    let beta = alpha.nth_root(m)?;
    let mut out = vec![RadicalMonomial::one()];
    for j in 0..m {
        out.push(beta.multiply(&RadicalMonomial::root_of_unity(m, j as i64)?));
    }
    Ok(out)
}

/// Characteristic polynomial `det(x I - A)`, lowest degree first, by the
/// Faddeev–LeVerrier recursion.
pub fn characteristic_polynomial(rows: &[Vec<BigRational>]) -> Vec<BigRational> {
    let n = rows.len();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut m = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_(k-1) + c_(n-k+1) I
        let mut next = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = BigRational::zero();
                for l in 0..n {
                    acc += &rows[i][l] * &m[l][j];
                }
                if i == j {
                    acc += &coeffs[n - k + 1];
                }
                next[i][j] = acc;
            }
        }
        let mut tr = BigRational::zero();
        for i in 0..n {
            for l in 0..n {
                tr += &rows[i][l] * &next[l][i];
            }
        }
        coeffs[n - k] = -tr / BigRational::from_integer(BigInt::from(k));
        m = next;
    }
    coeffs
}

fn rational_spectrum(rows: &[Vec<BigRational>]) -> Result<Spectrum> {
    let n = rows.len();
    let cp = characteristic_polynomial(rows);
    if n == 2 {
        let tr = -&cp[1];
        let det = cp[0].clone();
        let disc = &tr * &tr - BigRational::from_integer(4.into()) * &det;
        if disc.is_negative() {
            // r + 1/r = (tr^2 - 2 det) / det
            let s = (&tr * &tr - BigRational::from_integer(2.into()) * &det) / &det;
            return Ok(Spectrum::ConjugatePair { a: s.denom().clone(), b: s.numer().clone() });
        }
    }
    let f = IntPolynomial::from_rational(&cp);
    let mut roots: Vec<BigRational> = Vec::new();
    let mut rest = f.clone();
    for r in f.rational_roots() {
        let lin = IntPolynomial::from_rational(&[-r.clone(), BigRational::one()]);
        while rest.degree() > 0 && lin.divides(&rest) {
            roots.push(r.clone());
            rest = rest.div_primitive(&lin);
        }
    }
    if roots.len() != n {
        return Err(Error::UnsupportedSpectrum(format!(
            "characteristic polynomial {f} does not split over Q"
        )));
    }
    Ok(Spectrum::Tuple(ProjectiveTuple::Rational(roots)))
}

/// `deg(A)`: degree of the field generated by all entry ratios. The zero
/// matrix has degree 1.
pub fn matrix_degree(a: &StructuredMatrix) -> Result<BigUint> {
    a.validate()?;
    let entries = a.nonzero_entries()?;
    let Some(pivot) = entries.first() else {
        return Ok(BigUint::one());
    };
    let inv = pivot.inverse();
    let ratios: Vec<RadicalMonomial> = entries.iter().map(|e| e.multiply(&inv)).collect();
    tuple_degree(&ratios)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassDegreeBracket {
    pub lower: u64,
    pub upper: u64,
    /// Degree of the eigenvalue tuple.
    pub eigen_degree: u64,
}

fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}

fn to_u64(n: BigUint) -> Result<u64> {
    n.to_u64().ok_or_else(|| Error::BudgetExceeded(format!("degree {n} out of range")))
}

/// Projective degree of the eigenvalue tuple.
pub fn eigen_degree(a: &StructuredMatrix) -> Result<BigUint> {
    match a.spectrum()? {
        Spectrum::ConjugatePair { .. } => Ok(BigUint::from(2u32)),
        Spectrum::Tuple(ProjectiveTuple::Rational(_)) => Ok(BigUint::one()),
        Spectrum::Tuple(ProjectiveTuple::Radical(v)) => {
            let nz: Vec<&RadicalMonomial> = v.iter().flatten().collect();
            let Some(p) = nz.first() else {
                return Ok(BigUint::one());
            };
            let inv = p.inverse();
            tuple_degree(&nz.iter().map(|x| x.multiply(&inv)).collect::<Vec<_>>())
        }
    }
}

/// `[⌈deg(λ)/n!⌉, deg(representative)]`. The representative is the matrix
/// itself, or a rational one when the matrix is rational.
pub fn class_degree_bracket(a: &StructuredMatrix) -> Result<ClassDegreeBracket> {
    let n = a.size();
    let ed = eigen_degree(a)?;
    let lower = to_u64(ed.div_ceil(&factorial(n)))?.max(1);
    let upper = if a.rational_rows().is_some() { 1 } else { to_u64(matrix_degree(a)?)? };
    Ok(ClassDegreeBracket { lower: lower.min(upper), upper, eigen_degree: to_u64(ed)? })
}

/// `h_s(A) = h(λ_1 : ... : λ_n)`; zero for nilpotent matrices.
pub fn spectral_height(a: &StructuredMatrix) -> Result<LogLinear> {
    match a.spectrum()? {
        Spectrum::ConjugatePair { a, .. } => {
            Ok(LogLinear::ln_of(a.magnitude()).scale(&BigRational::new(1.into(), 2.into())))
        }
        Spectrum::Tuple(t) => match projective_height(&t) {
            Err(Error::InvalidTuple(_)) => Ok(LogLinear::zero()),
            other => other,
        },
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightedBracket {
    pub lower: Real,
    pub upper: Real,
    pub degrees: ClassDegreeBracket,
    pub spectral_height: LogLinear,
}

fn weight_range(w: &Weight, lo: u64, hi: u64) -> Result<(Real, Real)> {
    let inf = w.inf_over(&BigUint::from(lo), &BigUint::from(hi))?;
    if hi - lo > MAX_DEGREE_SCAN {
        return Err(Error::BudgetExceeded(format!("degree range [{lo}, {hi}] too wide")));
    }
    let mut sup = w.eval_u64(lo)?;
    for k in lo + 1..=hi {
        sup = sup.max(&w.eval_u64(k)?);
    }
    Ok((inf, sup))
}

/// `{ w(k) h_s(A) : k in the class degree bracket }`.
pub fn weighted_spectral_height(a: &StructuredMatrix, w: &Weight) -> Result<WeightedBracket> {
    let hs = spectral_height(a)?;
    let degrees = class_degree_bracket(a)?;
    if hs.is_zero() {
        return Ok(WeightedBracket { lower: Real::zero(), upper: Real::zero(), degrees, spectral_height: hs });
    }
    let (lo, hi) = if degrees.lower == degrees.upper {
        let v = w.eval_u64(degrees.lower)?;
        (v.clone(), v)
    } else {
        weight_range(w, degrees.lower, degrees.upper)?
    };
    let h = Real::from(hs.clone());
    Ok(WeightedBracket { lower: lo.mul(&h), upper: hi.mul(&h), degrees, spectral_height: hs })
}

fn diagonal_entries(d: &StructuredMatrix) -> Result<Vec<Option<RadicalMonomial>>> {
    match d {
        StructuredMatrix::Diagonal { entries } => Ok(entries.clone()),
        StructuredMatrix::Rational { rows } => {
            d.validate()?;
            let mut out = Vec::with_capacity(rows.len());
            for (i, row) in rows.iter().enumerate() {
                if row.iter().enumerate().any(|(j, x)| i != j && !x.is_zero()) {
                    return Err(Error::InvalidInput("matrix is not diagonal".into()));
                }
                out.push(if row[i].is_zero() {
                    None
                } else {
                    Some(RadicalMonomial::from_rational(&row[i])?)
                });
            }
            Ok(out)
        }
        StructuredMatrix::Block { .. } => Err(Error::InvalidInput("matrix is not diagonal".into())),
    }
}

/// `h_op^w` of a diagonal matrix: `w(deg D) · h(a_1 : ... : a_n)`.
pub fn operator_height_diagonal(d: &StructuredMatrix, w: &Weight) -> Result<Real> {
    let entries = diagonal_entries(d)?;
    if entries.iter().all(Option::is_none) {
        return Err(Error::InvalidInput("operator height of the zero matrix".into()));
    }
    let h = projective_height(&ProjectiveTuple::Radical(entries))?;
    if h.is_zero() {
        return Ok(Real::zero());
    }
    Ok(w.eval(&matrix_degree(d)?)?.mul(&Real::from(h)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OperatorLowerBound {
    pub value: LogLinear,
    #[serde(serialize_with = "ser_rat_vec")]
    pub best_probe: Vec<BigRational>,
    pub probes_used: usize,
}

fn ser_rat_vec<S: serde::Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::Serialize as _;
    v.iter().map(crate::json::rational_string).collect::<Vec<_>>().serialize(s)
}

fn apply(rows: &[Vec<BigRational>], x: &[BigRational]) -> Vec<BigRational> {
    rows.iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

/// `max_x (h_2(A x) - h_2(x))` over the probes and the standard basis; a
/// certified lower bound for `h_op(A)`.
pub fn operator_height_lower(a: &StructuredMatrix, probes: &[Vec<BigRational>]) -> Result<OperatorLowerBound> {
    let rows = a
        .rational_rows()
        .ok_or_else(|| Error::InvalidInput("probe bounds need a rational matrix".into()))?;
    let n = rows.len();
    let mut all: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    for p in probes {
        if p.len() != n {
            return Err(Error::InvalidInput(format!("probe has length {} instead of {n}", p.len())));
        }
        if p.iter().all(Zero::is_zero) {
            return Err(Error::InvalidInput("probe vectors must be nonzero".into()));
        }
        all.push(p.clone());
    }
    let mut best: Option<(LogLinear, Vec<BigRational>)> = None;
    for x in &all {
        let ax = apply(&rows, x);
        if ax.iter().all(Zero::is_zero) {
            continue;
        }
        let v = h2_rational(&ProjectiveTuple::Rational(ax))? - h2_rational(&ProjectiveTuple::Rational(x.clone()))?;
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, x.clone()));
        }
    }
    let (value, best_probe) =
        best.ok_or_else(|| Error::InvalidInput("every probe lies in the kernel".into()))?;
    Ok(OperatorLowerBound { value, best_probe, probes_used: all.len() })
}

/// `h_2` of a column of a rational or diagonal matrix.
pub fn column_h2(a: &StructuredMatrix, j: usize) -> Result<Real> {
    let n = a.size();
    if j >= n {
        return Err(Error::InvalidInput(format!("column {j} out of range")));
    }
    let col: Vec<Option<RadicalMonomial>> = match a {
        StructuredMatrix::Diagonal { entries } => {
            (0..n).map(|i| if i == j { entries[j].clone() } else { None }).collect()
        }
        StructuredMatrix::Rational { rows } => rows
            .iter()
            .map(|r| if r[j].is_zero() { Ok(None) } else { RadicalMonomial::from_rational(&r[j]).map(Some) })
            .collect::<Result<_>>()?,
        StructuredMatrix::Block { .. } => {
            return Err(Error::InvalidInput("columns of block matrices are not tabulated".into()))
        }
    };
    if col.iter().all(Option::is_none) {
        return Ok(Real::zero());
    }
    crate::heights::h2_height(&ProjectiveTuple::Radical(col))
}

fn check_weight_for_props(w: &Weight) -> Result<()> {
    let e = w.classify_for_explicit()?;
    if !e.eligible() {
        return Err(Error::WeightIneligible(format!("{w} fails the tower conditions")));
    }
    if !e.limit_class.positive() {
        return Err(Error::WeightIneligible(format!("{w} is not non-decreasing")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralLevel {
    pub i: usize,
    pub d: u64,
    pub spectral_height: LogLinear,
    pub weighted: WeightedBracket,
    /// `h^w(α_i) / (n - 1)`.
    pub rhs: Real,
    /// `weighted.upper <= rhs`, compared exactly.
    pub upper_ok: bool,
    pub equality: bool,
    /// `weighted.upper / rhs` as a float.
    pub ratio: f64,
    /// `l_w(n^2) / (n^2 n!)` times the level's Northcott lower bound.
    pub left_side: Option<Real>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralReport {
    pub n: usize,
    pub left_constant: Option<Real>,
    /// `c / (n - 1)`, where the witness chain accumulates.
    pub chain_target: Real,
    pub levels: Vec<SpectralLevel>,
    pub all_ok: bool,
}

fn left_constant(w: &Weight, n: usize) -> Result<Option<Real>> {
    let nn = (n * n) as u64;
    Ok(match w.l_w(nn)? {
        crate::heights::LimitRatio::Value(v) => {
            let den = BigRational::from_integer(BigInt::from(nn) * BigInt::from(factorial(n)));
            Some(v.mul(&Real::Rat(den.recip())))
        }
        _ => None,
    })
}

/// Witness chain for block matrices `A_i = 1 ⊕ C(x^(n-1) - α_i)` over a tower.
pub fn prop_spectral_check(spec: &TowerSpec, n: usize, levels: usize) -> Result<SpectralReport> {
    check_weight_for_props(&spec.weight)?;
    if n < 2 {
        return Err(Error::InvalidInput("matrix size must be at least 2".into()));
    }
    if levels == 0 || levels > spec.levels.len() {
        return Err(Error::InvalidInput(format!("tower has {} levels", spec.levels.len())));
    }
    let lc = left_constant(&spec.weight, n)?;
    let bracket = northcott_bracket(spec, levels).ok();
    let m = Real::Rat(BigRational::from_integer(((n - 1) as i64).into()));
    let mut out = Vec::new();
    let mut all_ok = true;
    for l in &spec.levels[..levels] {
        let a = alpha(l)?;
        let mat = StructuredMatrix::Block { n, alpha: a.clone() };
        let weighted = weighted_spectral_height(&mat, &spec.weight)?;
        let rhs = weighted_height(&a, &spec.weight)?.div(&m)?;
        let cmp = weighted.upper.compare(&rhs)?;
        let left_side = match (&lc, &bracket) {
            (Some(c), Some(b)) => b.levels[l.i - 1].lower.as_ref().map(|x| c.mul(x)),
            _ => None,
        };
        all_ok &= cmp.is_le();
        out.push(SpectralLevel {
            i: l.i,
            d: l.d,
            spectral_height: weighted.spectral_height.clone(),
            ratio: weighted.upper.approx() / rhs.approx(),
            upper_ok: cmp.is_le(),
            equality: cmp.is_eq(),
            weighted,
            rhs,
            left_side,
        });
    }
    Ok(SpectralReport {
        n,
        left_constant: lc,
        chain_target: Real::from(spec.c.clone()).div(&m)?,
        levels: out,
        all_ok,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OpNorthLevel {
    pub i: usize,
    pub d: u64,
    /// `h_op^w(diag(1, α_i, 1, ..., 1))`.
    pub value: Real,
    /// `h^w(α_i)`.
    pub expected: Real,
    pub matches: bool,
    pub nor_lower: Option<Real>,
    pub nor_upper: Option<Real>,
    /// `nor_lower / 2 <= value`.
    pub half_lower_ok: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OpNorthReport {
    pub n: usize,
    pub levels: Vec<OpNorthLevel>,
    pub all_ok: bool,
}

/// Diagonal witnesses `diag(1, α_i, 1, ..., 1)` for the operator height.
pub fn prop_opnorth_check(spec: &TowerSpec, n: usize, levels: usize) -> Result<OpNorthReport> {
    check_weight_for_props(&spec.weight)?;
    if n < 2 {
        return Err(Error::InvalidInput("matrix size must be at least 2".into()));
    }
    if levels == 0 || levels > spec.levels.len() {
        return Err(Error::InvalidInput(format!("tower has {} levels", spec.levels.len())));
    }
    let bracket = northcott_bracket(spec, levels).ok();
    let mut out = Vec::new();
    let mut all_ok = true;
    for l in &spec.levels[..levels] {
        let a = alpha(l)?;
        let mut entries = vec![RadicalMonomial::one(); n];
        entries[1] = a.clone();
        let value = operator_height_diagonal(&StructuredMatrix::diagonal(entries), &spec.weight)?;
        let expected = weighted_height(&a, &spec.weight)?;
        let matches = value.compare(&expected)?.is_eq();
        let row = bracket.as_ref().map(|b| &b.levels[l.i - 1]);
        let nor_lower = row.and_then(|r| r.lower.clone());
        let half_lower_ok = match &nor_lower {
            Some(x) => Some(x.mul(&Real::rat(1, 2)).compare(&value)?.is_le()),
            None => None,
        };
        all_ok &= matches && half_lower_ok.unwrap_or(true);
        out.push(OpNorthLevel {
            i: l.i,
            d: l.d,
            value,
            expected,
            matches,
            nor_lower,
            nor_upper: row.map(|r| r.upper.clone()),
            half_lower_ok,
        });
    }
    Ok(OpNorthReport { n, levels: out, all_ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::{build_tower, BuildOptions};

    fn half() -> BigRational {
        BigRational::new(1.into(), 2.into())
    }

    #[test]
    fn degrees() {
        let a = StructuredMatrix::rational_i64(&[&[1, 1], &[-1, 1]]);
        assert_eq!(matrix_degree(&a).unwrap(), 1u32.into());
        let s2 = RadicalMonomial::make_radical(2, 1, 2).unwrap();
        let z8 = RadicalMonomial::root_of_unity(8, 1).unwrap();
        let b = StructuredMatrix::diagonal(vec![s2.multiply(&z8), s2.multiply(&z8.inverse())]);
        assert_eq!(matrix_degree(&b).unwrap(), 2u32.into());
        let alpha = RadicalMonomial::make_radical(5, 7, 2).unwrap();
        let blk = StructuredMatrix::Block { n: 3, alpha: alpha.clone() };
        assert_eq!(matrix_degree(&blk).unwrap(), 2u32.into());
        let zero = StructuredMatrix::rational_i64(&[&[0, 0], &[0, 0]]);
        assert_eq!(matrix_degree(&zero).unwrap(), 1u32.into());
    }

    #[test]
    fn class_brackets() {
        let a = StructuredMatrix::rational_i64(&[&[1, 1], &[-1, 1]]);
        let b = class_degree_bracket(&a).unwrap();
        assert_eq!((b.lower, b.upper, b.eigen_degree), (1, 1, 2));
        let id = StructuredMatrix::rational_i64(&[&[1, 0], &[0, 1]]);
        let b = class_degree_bracket(&id).unwrap();
        assert_eq!((b.lower, b.upper), (1, 1));
        let alpha = RadicalMonomial::make_radical(5, 7, 2).unwrap();
        let d = StructuredMatrix::diagonal(vec![RadicalMonomial::one(), alpha]);
        let b = class_degree_bracket(&d).unwrap();
        assert_eq!((b.lower, b.upper), (1, 2));
    }

    #[test]
    fn spectral_values() {
        let a = StructuredMatrix::rational_i64(&[&[1, 1], &[-1, 1]]);
        assert!(spectral_height(&a).unwrap().is_zero());
        let d = StructuredMatrix::rational_i64(&[&[3, 0], &[0, 4]]);
        assert_eq!(spectral_height(&d).unwrap(), LogLinear::ln_u64(4));
        let alpha = RadicalMonomial::make_radical(5, 7, 2).unwrap();
        let blk = StructuredMatrix::Block { n: 3, alpha: alpha.clone() };
        assert_eq!(
            spectral_height(&blk).unwrap(),
            LogLinear::ln_u64(7).scale(&BigRational::new(1.into(), 4.into()))
        );
        for lam in block_eigenvalues(3, &alpha).unwrap().iter().skip(1) {
            assert_eq!(lam.pow(2), alpha);
        }
        let nil = StructuredMatrix::rational_i64(&[&[0, 1], &[0, 0]]);
        assert!(spectral_height(&nil).unwrap().is_zero());
        let irr = StructuredMatrix::rational_i64(&[&[1, 1], &[1, 0]]);
        assert!(matches!(spectral_height(&irr), Err(Error::UnsupportedSpectrum(_))));
    }

    #[test]
    fn weighted_spectral() {
        let d = StructuredMatrix::rational_i64(&[&[3, 0], &[0, 4]]);
        let wb = weighted_spectral_height(&d, &Weight::gamma(1, 2)).unwrap();
        assert_eq!(wb.lower, Real::from(LogLinear::ln_u64(4)));
        assert_eq!(wb.upper, wb.lower);
    }

    #[test]
    fn operator_heights() {
        let d = StructuredMatrix::rational_i64(&[&[3, 0], &[0, 4]]);
        let w1 = Weight::constant(1);
        assert_eq!(operator_height_diagonal(&d, &w1).unwrap(), Real::from(LogLinear::ln_u64(4)));
        let id = StructuredMatrix::rational_i64(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(operator_height_diagonal(&id, &w1).unwrap(), Real::zero());
        let alpha = RadicalMonomial::make_radical(5, 7, 2).unwrap();
        let da = StructuredMatrix::diagonal(vec![RadicalMonomial::one(), alpha]);
        assert_eq!(
            operator_height_diagonal(&da, &w1).unwrap(),
            Real::from(LogLinear::ln_u64(7).scale(&half()))
        );
        let lb = operator_height_lower(&d, &[]).unwrap();
        assert!(lb.value.is_zero());
        let r1 = StructuredMatrix::rational_i64(&[&[3, 0], &[4, 0]]);
        assert_eq!(operator_height_lower(&r1, &[]).unwrap().value, LogLinear::ln_u64(5));
    }

    #[test]
    fn witness_chains_w1() {
        let spec =
            build_tower(&LogLinear::ln_u64(2), 1, &Weight::constant(1), 3, &BuildOptions::default()).unwrap();
        let r = prop_spectral_check(&spec, 3, 3).unwrap();
        assert!(r.all_ok);
        let l3 = &r.levels[2];
        assert!(l3.equality);
        assert_eq!(l3.rhs.as_loglinear().unwrap(), LogLinear::ln_u64(137).scale(&BigRational::new(1.into(), 14.into())));
        let r2 = prop_spectral_check(&spec, 2, 1).unwrap();
        assert_eq!(r2.levels[0].rhs.as_loglinear().unwrap(), LogLinear::ln_u64(7).scale(&half()));
        let o = prop_opnorth_check(&spec, 2, 2).unwrap();
        assert!(o.all_ok);
        assert_eq!(
            o.levels[1].value.as_loglinear().unwrap(),
            LogLinear::ln_u64(41).scale(&BigRational::new(1.into(), 5.into()))
        );
    }
}
