//! Constant exterior forms on ℝⁿ (n ≤ 8) with exact rational coefficients.
//!
//! A form is stored sparsely as a map from monomials `dx_I` (I strictly
//! increasing) to nonzero coefficients, so two forms are equal exactly when
//! their maps are equal. The metric is Euclidean and `dx_1 ∧ … ∧ dx_n` is the
//! positive orientation.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{self, Matrix, Rational};

pub const MAX_DIM: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExteriorError {
    #[error("ambient dimension {0} outside 1..={MAX_DIM}")]
    UnsupportedDimension(usize),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("degree {degree} exceeds ambient dimension {dim}")]
    DegreeOverflow { degree: usize, dim: usize },
    #[error("index {index} outside 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("monomial has {got} indices, expected degree {expected}")]
    WrongDegree { got: usize, expected: usize },
    #[error("interior product of a 0-form")]
    DegreeZero,
    #[error("parse error: {0}")]
    Parse(String),
}

/// A set of coordinate indices, stored as a bitmask (bit `i` is `dx_{i+1}`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(u8);

impl Monomial {
    pub fn from_mask(mask: u8) -> Self {
        Monomial(mask)
    }

    pub fn mask(self) -> u8 {
        self.0
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    /// One-based indices in increasing order.
    pub fn indices(self) -> Vec<usize> {
        (0..MAX_DIM).filter(|i| self.0 & (1 << i) != 0).map(|i| i + 1).collect()
    }

    /// Zero-based positions in increasing order.
    pub fn positions(self) -> Vec<usize> {
        (0..MAX_DIM).filter(|i| self.0 & (1 << i) != 0).collect()
    }

    pub fn contains(self, index: usize) -> bool {
        (1..=MAX_DIM).contains(&index) && self.0 & (1 << (index - 1)) != 0
    }

    /// Sorts arbitrary one-based indices; returns the permutation sign, or
    /// `None` when an index repeats.
    pub fn normalize(indices: &[usize], dim: usize) -> Result<Option<(i32, Monomial)>, ExteriorError> {
        let mut mask = 0u8;
        for &i in indices {
            if i == 0 || i > dim {
                return Err(ExteriorError::IndexOutOfRange { index: i, dim });
            }
        }
        let mut v = indices.to_vec();
        let mut sign = 1;
        // insertion sort, counting transpositions
        for i in 1..v.len() {
            let mut j = i;
            while j > 0 && v[j - 1] > v[j] {
                v.swap(j - 1, j);
                sign = -sign;
                j -= 1;
            }
        }
        for w in v.windows(2) {
            if w[0] == w[1] {
                return Ok(None);
            }
        }
        for &i in &v {
            mask |= 1 << (i - 1);
        }
        Ok(Some((sign, Monomial(mask))))
    }

    /// Sign of `dx_self ∧ dx_other` relative to the sorted monomial, or `None`
    /// when they share an index.
    pub fn wedge_sign(self, other: Monomial) -> Option<i32> {
        if self.0 & other.0 != 0 {
            return None;
        }
        let mut swaps = 0u32;
        for j in other.positions() {
            // indices of self that sit above j must hop over it
            swaps += ((self.0 as u32) >> (j + 1)).count_ones();
        }
        Some(if swaps.is_multiple_of(2) { 1 } else { -1 })
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.indices().cmp(&other.indices()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A square matrix with exact rational entries acting on ℝⁿ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearEndo {
    dim: usize,
    rows: Matrix,
}

impl LinearEndo {
    pub fn new(rows: Matrix) -> Result<Self, ExteriorError> {
        let dim = rows.len();
        if dim == 0 || dim > MAX_DIM {
            return Err(ExteriorError::UnsupportedDimension(dim));
        }
        for r in &rows {
            if r.len() != dim {
                return Err(ExteriorError::DimensionMismatch { left: dim, right: r.len() });
            }
        }
        Ok(LinearEndo { dim, rows })
    }

    pub fn from_integers(rows: &[Vec<i64>]) -> Result<Self, ExteriorError> {
        Self::new(rows.iter().map(|r| r.iter().map(|&x| exact::rat(x)).collect()).collect())
    }

    pub fn identity(dim: usize) -> Self {
        LinearEndo { dim, rows: exact::identity(dim) }
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        let mut rows = exact::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            rows[i][i] = exact::rat(e);
        }
        LinearEndo { dim: entries.len(), rows }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &Matrix {
        &self.rows
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.rows[i][j]
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearEndo) -> LinearEndo {
        LinearEndo { dim: self.dim, rows: exact::mat_mul(&self.rows, &other.rows) }
    }

    pub fn transpose(&self) -> LinearEndo {
        LinearEndo { dim: self.dim, rows: exact::transpose(&self.rows) }
    }

    pub fn determinant(&self) -> Rational {
        exact::determinant(&self.rows)
    }

    pub fn inverse(&self) -> Option<LinearEndo> {
        exact::inverse(&self.rows).map(|rows| LinearEndo { dim: self.dim, rows })
    }

    pub fn is_orthogonal(&self) -> bool {
        exact::mat_mul(&exact::transpose(&self.rows), &self.rows) == exact::identity(self.dim)
    }

    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        self.rows.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| r.iter().map(exact::to_f64).collect()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExteriorForm {
    dim: usize,
    degree: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl ExteriorForm {
    pub fn zero(dim: usize, degree: usize) -> Result<Self, ExteriorError> {
        if dim == 0 || dim > MAX_DIM {
            return Err(ExteriorError::UnsupportedDimension(dim));
        }
        if degree > dim {
            return Err(ExteriorError::DegreeOverflow { degree, dim });
        }
        Ok(ExteriorForm { dim, degree, terms: BTreeMap::new() })
    }

    /// The constant 0-form `c`.
    pub fn scalar(dim: usize, c: Rational) -> Result<Self, ExteriorError> {
        let mut f = Self::zero(dim, 0)?;
        f.accumulate(Monomial(0), c);
        Ok(f)
    }

    /// `dx_i` for a one-based index `i`.
    pub fn basis_one_form(dim: usize, index: usize) -> Result<Self, ExteriorError> {
        Self::monomial(dim, &[index], exact::rat(1))
    }

    /// `c · dx_{i1} ∧ … ∧ dx_{ik}` with indices in any order.
    pub fn monomial(dim: usize, indices: &[usize], c: Rational) -> Result<Self, ExteriorError> {
        let mut f = Self::zero(dim, indices.len())?;
        f.add_term(indices, c)?;
        Ok(f)
    }

    /// Builds a form from `(indices, coefficient)` pairs, sign-normalizing
    /// each index list.
    pub fn from_terms<I>(dim: usize, degree: usize, terms: I) -> Result<Self, ExteriorError>
    where
        I: IntoIterator<Item = (Vec<usize>, Rational)>,
    {
        let mut f = Self::zero(dim, degree)?;
        for (idx, c) in terms {
            f.add_term(&idx, c)?;
        }
        Ok(f)
    }

    /// Integer-coefficient shorthand: `from_int_terms(7, &[(&[1,2,3], 1), …])`.
    pub fn from_int_terms(dim: usize, terms: &[(&[usize], i64)]) -> Result<Self, ExteriorError> {
        let degree = terms.first().map(|(i, _)| i.len()).unwrap_or(0);
        Self::from_terms(dim, degree, terms.iter().map(|(i, c)| (i.to_vec(), exact::rat(*c))))
    }

    fn add_term(&mut self, indices: &[usize], c: Rational) -> Result<(), ExteriorError> {
        if indices.len() != self.degree {
            return Err(ExteriorError::WrongDegree { got: indices.len(), expected: self.degree });
        }
        if let Some((sign, m)) = Monomial::normalize(indices, self.dim)? {
            self.accumulate(m, if sign < 0 { -c } else { c });
        }
        Ok(())
    }

    fn accumulate(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Monomial, &Rational)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn coefficient(&self, indices: &[usize]) -> Rational {
        match Monomial::normalize(indices, self.dim) {
            Ok(Some((sign, m))) => {
                let c = self.terms.get(&m).cloned().unwrap_or_else(Rational::zero);
                if sign < 0 {
                    -c
                } else {
                    c
                }
            }
            _ => Rational::zero(),
        }
    }

    fn check_same_dim(&self, other: &ExteriorForm) -> Result<(), ExteriorError> {
        if self.dim != other.dim {
            return Err(ExteriorError::DimensionMismatch { left: self.dim, right: other.dim });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &ExteriorForm) -> Result<ExteriorForm, ExteriorError> {
        self.check_same_dim(other)?;
        if self.degree != other.degree {
            return Err(ExteriorError::WrongDegree { got: other.degree, expected: self.degree });
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(*m, c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> ExteriorForm {
        let mut out = ExteriorForm { dim: self.dim, degree: self.degree, terms: BTreeMap::new() };
        for (m, a) in &self.terms {
            out.accumulate(*m, a * c);
        }
        out
    }

    pub fn wedge(&self, other: &ExteriorForm) -> Result<ExteriorForm, ExteriorError> {
        self.check_same_dim(other)?;
        let degree = self.degree + other.degree;
        if degree > self.dim {
            return Err(ExteriorError::DegreeOverflow { degree, dim: self.dim });
        }
        let mut out = ExteriorForm::zero(self.dim, degree)?;
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some(sign) = ma.wedge_sign(*mb) {
                    let c = ca * cb;
                    out.accumulate(Monomial(ma.0 | mb.0), if sign < 0 { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    pub fn hodge_star(&self) -> ExteriorForm {
        let full: u8 = if self.dim == 8 { 0xff } else { (1u8 << self.dim) - 1 };
        let mut out = ExteriorForm { dim: self.dim, degree: self.dim - self.degree, terms: BTreeMap::new() };
        for (m, c) in &self.terms {
            let comp = Monomial(full & !m.0);
            // m ∧ ⋆m = vol
            let sign = m.wedge_sign(comp).expect("complement is disjoint");
            out.accumulate(comp, if sign < 0 { -c.clone() } else { c.clone() });
        }
        out
    }

    /// `(L* a)(v_1, …, v_k) = a(L v_1, …, L v_k)`.
    pub fn pullback(&self, map: &LinearEndo) -> Result<ExteriorForm, ExteriorError> {
        if map.dim() != self.dim {
            return Err(ExteriorError::DimensionMismatch { left: self.dim, right: map.dim() });
        }
        // L* dx_i = Σ_j L_ij dx_j
        let rows: Vec<ExteriorForm> = (0..self.dim)
            .map(|i| {
                let mut f = ExteriorForm { dim: self.dim, degree: 1, terms: BTreeMap::new() };
                for j in 0..self.dim {
                    f.accumulate(Monomial(1 << j), map.entry(i, j).clone());
                }
                f
            })
            .collect();
        let mut out = ExteriorForm::zero(self.dim, self.degree)?;
        for (m, c) in &self.terms {
            let mut acc = ExteriorForm::scalar(self.dim, c.clone())?;
            for p in m.positions() {
                acc = acc.wedge(&rows[p])?;
            }
            for (mm, cc) in acc.terms {
                out.accumulate(mm, cc);
            }
        }
        Ok(out)
    }

    /// Contraction `v ⌟ a`, inserting `v` into the first slot.
    pub fn interior_product(&self, v: &[Rational]) -> Result<ExteriorForm, ExteriorError> {
        if v.len() != self.dim {
            return Err(ExteriorError::DimensionMismatch { left: self.dim, right: v.len() });
        }
        if self.degree == 0 {
            return Err(ExteriorError::DegreeZero);
        }
        let mut out = ExteriorForm::zero(self.dim, self.degree - 1)?;
        for (m, c) in &self.terms {
            for (slot, p) in m.positions().into_iter().enumerate() {
                if v[p].is_zero() {
                    continue;
                }
                let val = c * &v[p];
                let rest = Monomial(m.0 & !(1 << p));
                out.accumulate(rest, if slot % 2 == 0 { val } else { -val });
            }
        }
        Ok(out)
    }

    pub fn norm_squared(&self) -> Rational {
        self.terms.values().map(|c| c * c).sum()
    }

    /// Evaluates on `degree` vectors with exact entries.
    pub fn evaluate(&self, vectors: &[Vec<Rational>]) -> Result<Rational, ExteriorError> {
        if vectors.len() != self.degree {
            return Err(ExteriorError::WrongDegree { got: vectors.len(), expected: self.degree });
        }
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let pos = m.positions();
            let minor: Matrix = pos.iter().map(|&p| vectors.iter().map(|v| v[p].clone()).collect()).collect();
            total += c * exact::determinant(&minor);
        }
        Ok(total)
    }

    /// Floating view for numerical code. Each coefficient is rounded to the
    /// nearest `f64`; converting back with [`FloatForm::to_exact`] recovers the
    /// original form whenever every coefficient is a dyadic rational that fits
    /// in 53 bits (all model forms here have coefficients in {±1, ±1/2}).
    pub fn to_float(&self) -> FloatForm {
        FloatForm { dim: self.dim, degree: self.degree, terms: self.terms.iter().map(|(m, c)| (m.positions(), exact::to_f64(c))).collect() }
    }

    /// One term per line: `<sign><num>/<den> dx_<indices>`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (m, c) in &self.terms {
            let sign = if c.is_negative() { '-' } else { '+' };
            let a = c.abs();
            let idx: String = m.indices().iter().map(|i| i.to_string()).collect();
            s.push_str(&format!("{sign}{}/{} dx_{idx}\n", a.numer(), a.denom()));
        }
        s
    }

    pub fn from_text(dim: usize, degree: usize, text: &str) -> Result<Self, ExteriorError> {
        let mut f = Self::zero(dim, degree)?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: &str| ExteriorError::Parse(format!("line {}: {m}: {line:?}", lineno + 1));
            let (coeff, mono) = line.split_once(char::is_whitespace).ok_or_else(|| err("missing monomial"))?;
            if !coeff.starts_with(['+', '-']) {
                return Err(err("coefficient must carry an explicit sign"));
            }
            let c = exact::parse_rational(coeff).ok_or_else(|| err("bad coefficient"))?;
            let digits = mono.trim().strip_prefix("dx_").ok_or_else(|| err("monomial must start with dx_"))?;
            let idx = digits.chars().map(|ch| ch.to_digit(10).map(|d| d as usize).ok_or_else(|| err("bad index"))).collect::<Result<Vec<_>, _>>()?;
            f.add_term(&idx, c)?;
        }
        Ok(f)
    }

    pub fn to_json(&self) -> FormJson {
        FormJson {
            n: self.dim,
            k: self.degree,
            terms: self.terms.iter().map(|(m, c)| TermJson { idx: m.indices(), coeff: exact::format_rational(c) }).collect(),
        }
    }

    pub fn from_json(j: &FormJson) -> Result<Self, ExteriorError> {
        let mut f = Self::zero(j.n, j.k)?;
        for t in &j.terms {
            let c = exact::parse_rational(&t.coeff).ok_or_else(|| ExteriorError::Parse(format!("bad coefficient {:?}", t.coeff)))?;
            f.add_term(&t.idx, c)?;
        }
        Ok(f)
    }
}

impl fmt::Display for ExteriorForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i > 0 {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            } else if neg {
                write!(f, "-")?;
            }
            if !a.is_one() || m.degree() == 0 {
                write!(f, "{a}")?;
            }
            if m.degree() > 0 {
                let idx: String = m.indices().iter().map(|i| i.to_string()).collect();
                write!(f, "dx{idx}")?;
            }
        }
        Ok(())
    }
}

impl Add for &ExteriorForm {
    type Output = ExteriorForm;
    fn add(self, rhs: &ExteriorForm) -> ExteriorForm {
        self.try_add(rhs).expect("adding forms of different shape")
    }
}

impl Sub for &ExteriorForm {
    type Output = ExteriorForm;
    fn sub(self, rhs: &ExteriorForm) -> ExteriorForm {
        self.try_add(&-rhs).expect("subtracting forms of different shape")
    }
}

impl Neg for &ExteriorForm {
    type Output = ExteriorForm;
    fn neg(self) -> ExteriorForm {
        self.scale(&-Rational::one())
    }
}

impl Mul<&ExteriorForm> for &Rational {
    type Output = ExteriorForm;
    fn mul(self, rhs: &ExteriorForm) -> ExteriorForm {
        rhs.scale(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub idx: Vec<usize>,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormJson {
    pub n: usize,
    pub k: usize,
    pub terms: Vec<TermJson>,
}

/// Floating copy of an [`ExteriorForm`] used by plane and grid numerics.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatForm {
    pub dim: usize,
    pub degree: usize,
    /// zero-based positions and coefficient
    pub terms: Vec<(Vec<usize>, f64)>,
}

impl FloatForm {
    /// `a(v_1, …, v_k)` for `k = degree` vectors of length `dim`.
    pub fn evaluate(&self, vectors: &[&[f64]]) -> f64 {
        debug_assert_eq!(vectors.len(), self.degree);
        let k = self.degree;
        let mut minor = [0.0f64; MAX_DIM * MAX_DIM];
        let mut total = 0.0;
        for (pos, c) in &self.terms {
            for (r, &p) in pos.iter().enumerate() {
                for (s, v) in vectors.iter().enumerate() {
                    minor[r * k + s] = v[p];
                }
            }
            total += c * small_det(&mut minor[..k * k], k);
        }
        total
    }

    pub fn to_exact(&self) -> ExteriorForm {
        let mut f = ExteriorForm::zero(self.dim, self.degree).expect("valid shape");
        for (pos, c) in &self.terms {
            let q = Rational::from_float(*c).expect("finite coefficient");
            let idx: Vec<usize> = pos.iter().map(|p| p + 1).collect();
            f.add_term(&idx, q).expect("valid monomial");
        }
        f
    }
}

/// Determinant of a row-major `k × k` block, destroying it.
pub(crate) fn small_det(a: &mut [f64], k: usize) -> f64 {
    match k {
        0 => 1.0,
        1 => a[0],
        2 => a[0] * a[3] - a[1] * a[2],
        3 => a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) + a[2] * (a[3] * a[7] - a[4] * a[6]),
        _ => {
            let mut det = 1.0;
            for c in 0..k {
                let mut p = c;
                for r in c + 1..k {
                    if a[r * k + c].abs() > a[p * k + c].abs() {
                        p = r;
                    }
                }
                if a[p * k + c] == 0.0 {
                    return 0.0;
                }
                if p != c {
                    for j in 0..k {
                        a.swap(p * k + j, c * k + j);
                    }
                    det = -det;
                }
                let piv = a[c * k + c];
                det *= piv;
                for r in c + 1..k {
                    let f = a[r * k + c] / piv;
                    if f != 0.0 {
                        for j in c..k {
                            a[r * k + j] -= f * a[c * k + j];
                        }
                    }
                }
            }
            det
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{frac, rat};
    use crate::structures::{model_form, ModelKind};

    fn dx(dim: usize, idx: &[usize]) -> ExteriorForm {
        ExteriorForm::monomial(dim, idx, rat(1)).unwrap()
    }

    #[test]
    fn wedge_basis() {
        let w = dx(4, &[1]).wedge(&dx(4, &[2])).unwrap();
        assert_eq!(w, dx(4, &[1, 2]));
        let w = dx(4, &[2]).wedge(&dx(4, &[1])).unwrap();
        assert_eq!(w, dx(4, &[1, 2]).scale(&rat(-1)));
        assert!(dx(4, &[1, 2]).wedge(&dx(4, &[1, 2])).unwrap().is_zero());
    }

    #[test]
    fn wedge_errors() {
        assert_eq!(dx(3, &[1, 2]).wedge(&dx(3, &[2, 3])), Err(ExteriorError::DegreeOverflow { degree: 4, dim: 3 }));
        assert_eq!(dx(3, &[1]).wedge(&dx(4, &[2])), Err(ExteriorError::DimensionMismatch { left: 3, right: 4 }));
    }

    #[test]
    fn unsorted_indices_normalize_with_sign() {
        let f = ExteriorForm::monomial(7, &[3, 1, 2], rat(1)).unwrap();
        assert_eq!(f, dx(7, &[1, 2, 3]));
        let g = ExteriorForm::monomial(7, &[2, 1, 3], rat(1)).unwrap();
        assert_eq!(g, dx(7, &[1, 2, 3]).scale(&rat(-1)));
        assert!(ExteriorForm::monomial(7, &[1, 1, 3], rat(1)).unwrap().is_zero());
        assert!(ExteriorForm::monomial(7, &[1, 9, 3], rat(1)).is_err());
    }

    #[test]
    fn star_of_complementary_monomial() {
        assert_eq!(dx(7, &[1, 2, 3]).hodge_star(), dx(7, &[4, 5, 6, 7]));
        // dx2 ∧ dx13 = -dx123, so ⋆dx2 = -dx13 in ℝ³
        assert_eq!(dx(3, &[2]).hodge_star(), dx(3, &[1, 3]).scale(&rat(-1)));
    }

    #[test]
    fn star_star_sign() {
        for n in 1..=8 {
            for k in 0..=n {
                let idx: Vec<usize> = (1..=k).collect();
                let m = dx(n, &idx);
                let sign = if (k * (n - k)) % 2 == 0 { 1 } else { -1 };
                assert_eq!(m.hodge_star().hodge_star(), m.scale(&rat(sign)), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn interior_products() {
        assert_eq!(dx(7, &[1, 2]).interior_product(&unit(7, 1)).unwrap(), dx(7, &[2]));
        assert!(dx(7, &[1, 2]).interior_product(&unit(7, 7)).unwrap().is_zero());
        let phi = model_form(ModelKind::G2Phi);
        let expected = &(&dx(7, &[2, 3]) + &dx(7, &[4, 5])) + &dx(7, &[6, 7]);
        assert_eq!(phi.interior_product(&unit(7, 1)).unwrap(), expected);
        let s = ExteriorForm::scalar(3, rat(2)).unwrap();
        assert_eq!(s.interior_product(&unit(3, 1)), Err(ExteriorError::DegreeZero));
    }

    fn unit(n: usize, i: usize) -> Vec<Rational> {
        (1..=n).map(|j| if j == i { rat(1) } else { rat(0) }).collect()
    }

    #[test]
    fn norms() {
        assert_eq!(dx(4, &[1, 2]).norm_squared(), rat(1));
        assert_eq!(model_form(ModelKind::G2Phi).norm_squared(), rat(7));
        assert_eq!(model_form(ModelKind::Spin7Omega).norm_squared(), rat(14));
    }

    #[test]
    fn pullback_by_swap_and_scale() {
        let swap = LinearEndo::from_integers(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(dx(2, &[1, 2]).pullback(&swap).unwrap(), dx(2, &[1, 2]).scale(&rat(-1)));
        let scale = LinearEndo::diagonal(&[3, 1]);
        assert_eq!(dx(2, &[1]).pullback(&scale).unwrap(), dx(2, &[1]).scale(&rat(3)));
    }

    #[test]
    fn evaluate_matches_definition() {
        let f = dx(3, &[1, 2]);
        let v = vec![vec![rat(1), rat(2), rat(0)], vec![rat(3), rat(4), rat(5)]];
        assert_eq!(f.evaluate(&v).unwrap(), rat(4 - 2 * 3));
        let ff = f.to_float();
        assert_eq!(ff.evaluate(&[&[1.0, 2.0, 0.0], &[3.0, 4.0, 5.0]]), -2.0);
    }

    #[test]
    fn text_format() {
        let f = &dx(7, &[1, 2, 3]) - &dx(7, &[3, 5, 6]).scale(&frac(1, 2));
        let t = f.to_text();
        assert_eq!(t, "+1/1 dx_123\n-1/2 dx_356\n");
        assert_eq!(ExteriorForm::from_text(7, 3, &t).unwrap(), f);
        assert!(ExteriorForm::from_text(7, 3, "1/1 dx_123").is_err());
        assert!(ExteriorForm::from_text(7, 3, "+1/1 dx_12").is_err());
    }

    #[test]
    fn json_format() {
        let phi = model_form(ModelKind::G2Phi);
        let j = serde_json::to_string(&phi.to_json()).unwrap();
        assert!(j.starts_with(r#"{"n":7,"k":3,"terms":[{"idx":[1,2,3],"coeff":"1/1"}"#));
        let back: FormJson = serde_json::from_str(&j).unwrap();
        assert_eq!(ExteriorForm::from_json(&back).unwrap(), phi);
    }

    #[test]
    fn float_round_trip_for_dyadic_coefficients() {
        let f = model_form(ModelKind::KaehlerOmega(2)).wedge(&model_form(ModelKind::KaehlerOmega(2))).unwrap().scale(&frac(1, 2));
        assert_eq!(f.to_float().to_exact(), f);
    }

    #[test]
    fn display() {
        let f = &dx(7, &[1, 2, 3]) - &dx(7, &[2, 5, 7]);
        assert_eq!(f.to_string(), "dx123 - dx257");
        assert_eq!(ExteriorForm::zero(3, 1).unwrap().to_string(), "0");
    }
}
