//! Oriented planes, restriction of constant forms, comass by multi-start
//! ascent, calibrated-plane classification and the Hessian nullity of the
//! calibrated family.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exterior::{ExteriorForm, FloatForm};
use crate::structures::{model_form, ModelKind};

pub const CLASSIFY_TOL: f64 = 1e-9;
pub const NULLITY_CUTOFF: f64 = 1e-6;
pub const MIN_GAP: f64 = 1e3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GrassmannError {
    #[error("form has degree {form} but the plane has dimension {plane}")]
    DegreeMismatch { form: usize, plane: usize },
    #[error("form lives on R^{form} but the plane lives in R^{plane}")]
    AmbientMismatch { form: usize, plane: usize },
    #[error("frame columns are linearly dependent")]
    Degenerate,
    #[error("unsupported (n, k) = ({n}, {k})")]
    Unsupported { n: usize, k: usize },
    #[error("plane is not calibrated (value {value})")]
    NotCalibrated { value: f64 },
    #[error("no clear spectral gap: ratio {gap} below {MIN_GAP}")]
    Ambiguous { gap: f64, eigenvalues: Vec<f64> },
    #[error("plane is not coassociative (|*phi| = {value})")]
    NotCoassociative { value: f64 },
    #[error("normal image is not self-dual (anti-self-dual part {defect})")]
    NotSelfDual { defect: f64 },
    #[error("{0}")]
    Parse(String),
}

/// An ordered orthonormal k-frame in ℝⁿ; column order fixes the orientation.
#[derive(Clone, Debug, PartialEq)]
pub struct OrientedPlane {
    frame: DMatrix<f64>,
}

/// Modified Gram–Schmidt on the columns, keeping their order and signs.
fn gram_schmidt(m: &DMatrix<f64>) -> Result<DMatrix<f64>, GrassmannError> {
    let mut q = m.clone();
    for j in 0..q.ncols() {
        for _ in 0..2 {
            for i in 0..j {
                let d = q.column(i).dot(&q.column(j));
                let ci = q.column(i).clone_owned();
                q.column_mut(j).axpy(-d, &ci, 1.0);
            }
        }
        let norm = q.column(j).norm();
        if !(norm > 1e-12) {
            return Err(GrassmannError::Degenerate);
        }
        q.column_mut(j).scale_mut(1.0 / norm);
    }
    Ok(q)
}

impl OrientedPlane {
    /// Re-orthonormalizes an arbitrary full-rank `n × k` frame.
    pub fn new(frame: DMatrix<f64>) -> Result<Self, GrassmannError> {
        if frame.ncols() == 0 || frame.ncols() > frame.nrows() {
            return Err(GrassmannError::Unsupported { n: frame.nrows(), k: frame.ncols() });
        }
        Ok(OrientedPlane { frame: gram_schmidt(&frame)? })
    }

    pub fn from_columns(n: usize, columns: &[Vec<f64>]) -> Result<Self, GrassmannError> {
        let mut m = DMatrix::zeros(n, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != n {
                return Err(GrassmannError::Parse(format!("column {} has length {} not {n}", j + 1, c.len())));
            }
            for i in 0..n {
                m[(i, j)] = c[i];
            }
        }
        Self::new(m)
    }

    /// `span⁺(e_{i_1}, …, e_{i_k})` with 1-based indices.
    pub fn coordinate(n: usize, indices: &[usize]) -> Self {
        let mut m = DMatrix::zeros(n, indices.len());
        for (j, &i) in indices.iter().enumerate() {
            m[(i - 1, j)] = 1.0;
        }
        Self::new(m).expect("distinct coordinate axes")
    }

    /// Whitespace-separated `n × k` matrix, one row per line.
    pub fn parse(text: &str) -> Result<Self, GrassmannError> {
        let rows: Vec<Vec<f64>> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .enumerate()
            .map(|(r, l)| {
                l.split_whitespace().map(|t| t.parse::<f64>().map_err(|_| GrassmannError::Parse(format!("row {}: bad number {t:?}", r + 1)))).collect()
            })
            .collect::<Result<_, _>>()?;
        let n = rows.len();
        let k = rows.first().map_or(0, Vec::len);
        if n == 0 || k == 0 || rows.iter().any(|r| r.len() != k) {
            return Err(GrassmannError::Parse("frame must be a non-empty rectangular matrix".into()));
        }
        Self::new(DMatrix::from_fn(n, k, |i, j| rows[i][j]))
    }

    pub fn ambient_dim(&self) -> usize {
        self.frame.nrows()
    }

    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn frame(&self) -> &DMatrix<f64> {
        &self.frame
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.frame.column(j).iter().copied().collect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.dim()).map(|j| self.column(j)).collect()
    }

    pub fn swapped(&self, a: usize, b: usize) -> Self {
        let mut f = self.frame.clone();
        f.swap_columns(a, b);
        OrientedPlane { frame: f }
    }

    /// `g · plane` for an n×n matrix `g`.
    pub fn transformed(&self, g: &DMatrix<f64>) -> Result<Self, GrassmannError> {
        Self::new(g * &self.frame)
    }

    /// Same plane, frame right-multiplied by a k×k matrix.
    pub fn reframed(&self, r: &DMatrix<f64>) -> Result<Self, GrassmannError> {
        Self::new(&self.frame * r)
    }

    /// Orthonormal basis of the orthogonal complement as an `n × (n-k)` matrix.
    pub fn complement(&self) -> DMatrix<f64> {
        let n = self.ambient_dim();
        let mut cols: Vec<DVector<f64>> = self.frame.column_iter().map(|c| c.clone_owned()).collect();
        let k = cols.len();
        for i in 0..n {
            let mut v = DVector::zeros(n);
            v[i] = 1.0;
            for _ in 0..2 {
                for c in &cols {
                    let d = c.dot(&v);
                    v.axpy(-d, c, 1.0);
                }
            }
            let norm = v.norm();
            if norm > 1e-6 {
                cols.push(v / norm);
            }
            if cols.len() == n {
                break;
            }
        }
        DMatrix::from_columns(&cols[k..])
    }

    pub fn orthonormality_defect(&self) -> f64 {
        let k = self.dim();
        (self.frame.transpose() * &self.frame - DMatrix::identity(k, k)).abs().max()
    }
}

pub fn random_plane(n: usize, k: usize, rng: &mut ChaCha8Rng) -> OrientedPlane {
    loop {
        let m = DMatrix::from_fn(n, k, |_, _| StandardNormal.sample(rng));
        if let Ok(p) = OrientedPlane::new(m) {
            return p;
        }
    }
}

fn check_shape(form: &FloatForm, plane: &OrientedPlane) -> Result<(), GrassmannError> {
    if form.dim != plane.ambient_dim() {
        return Err(GrassmannError::AmbientMismatch { form: form.dim, plane: plane.ambient_dim() });
    }
    if form.degree != plane.dim() {
        return Err(GrassmannError::DegreeMismatch { form: form.degree, plane: plane.dim() });
    }
    Ok(())
}

fn eval_frame(form: &FloatForm, frame: &DMatrix<f64>) -> f64 {
    let cols: Vec<Vec<f64>> = frame.column_iter().map(|c| c.iter().copied().collect()).collect();
    let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
    form.evaluate(&refs)
}

/// `α` with `form|_V = α · vol_V`.
pub fn restrict_to_plane(form: &ExteriorForm, plane: &OrientedPlane) -> Result<f64, GrassmannError> {
    let f = form.to_float();
    check_shape(&f, plane)?;
    Ok(eval_frame(&f, plane.frame()))
}

/// Euclidean gradient of `F ↦ form(F)` at a frame, as an `n × k` matrix.
fn frame_gradient(form: &FloatForm, frame: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, k) = frame.shape();
    let cols: Vec<Vec<f64>> = frame.column_iter().map(|c| c.iter().copied().collect()).collect();
    let mut g = DMatrix::zeros(n, k);
    let mut e = vec![0.0; n];
    for a in 0..k {
        for i in 0..n {
            e[i] = 1.0;
            let refs: Vec<&[f64]> = (0..k).map(|b| if b == a { e.as_slice() } else { cols[b].as_slice() }).collect();
            g[(i, a)] = form.evaluate(&refs);
            e[i] = 0.0;
        }
    }
    g
}

#[derive(Clone, Debug, Serialize)]
pub struct RestartOutcome {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub gradient_norm: f64,
}

#[derive(Clone, Debug)]
pub struct ComassResult {
    /// Best value found; a lower bound on the true comass.
    pub value: f64,
    pub plane: OrientedPlane,
    pub best_restart: usize,
    pub restarts: Vec<RestartOutcome>,
}

impl ComassResult {
    pub fn converged_restarts(&self) -> usize {
        self.restarts.iter().filter(|r| r.converged).count()
    }
}

pub const MAX_ASCENT_ITERS: usize = 2000;

/// Below `gnorm² ~ ε·|value|` the attainable increase is lost in rounding.
fn stationary(gnorm: f64, value: f64, tol: f64) -> bool {
    gnorm < tol || gnorm * gnorm < 64.0 * f64::EPSILON * value.abs().max(1.0)
}

fn ascend(form: &FloatForm, start: OrientedPlane, tol: f64) -> (OrientedPlane, RestartOutcome) {
    let mut frame = start.frame;
    let mut value = eval_frame(form, &frame);
    let mut step: f64 = 1.0;
    let mut iterations = 0;
    let mut gnorm = f64::INFINITY;
    while iterations < MAX_ASCENT_ITERS {
        let g = frame_gradient(form, &frame);
        // horizontal part: drop the components along the plane itself
        let p = &g - &frame * (frame.transpose() * &g);
        gnorm = p.norm();
        if stationary(gnorm, value, tol) {
            break;
        }
        iterations += 1;
        let mut accepted = false;
        let mut t = (step * 2.0).min(8.0);
        while t > 1e-14 {
            if let Ok(q) = gram_schmidt(&(&frame + &p * t)) {
                let v = eval_frame(form, &q);
                if v >= value + 0.4 * t * gnorm * gnorm {
                    frame = q;
                    value = v;
                    step = t;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let converged = stationary(gnorm, value, tol);
    (OrientedPlane { frame }, RestartOutcome { value, iterations, converged, gradient_norm: gnorm })
}

/// Multi-start projected gradient ascent of the form over oriented planes.
/// Restart `r` draws its start from stream `r` of a seed-keyed ChaCha
/// generator, so the result does not depend on scheduling.
pub fn comass(form: &ExteriorForm, restarts: usize, seed: u64, tol: f64) -> ComassResult {
    assert!(restarts >= 1, "at least one restart");
    assert!(tol > 0.0 && tol < 1.0, "tolerance in (0, 1)");
    let f = form.to_float();
    let (n, k) = (form.dim(), form.degree());
    let runs: Vec<(OrientedPlane, RestartOutcome)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let start = random_plane(n, k, &mut rng);
            ascend(&f, start, tol)
        })
        .collect();
    let mut best = 0;
    for (i, (_, o)) in runs.iter().enumerate() {
        if o.value > runs[best].1.value {
            best = i;
        }
    }
    let plane = runs[best].0.clone();
    ComassResult { value: runs[best].1.value, plane, best_restart: best, restarts: runs.into_iter().map(|(_, o)| o).collect() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PlaneKind {
    Associative,
    Coassociative,
    Cayley,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PlaneClass {
    pub kind: PlaneKind,
    /// Value of the calibrating form on the plane.
    pub value: f64,
}

/// The calibrating form for planes of shape `(n, k)`.
pub fn calibrating_form(n: usize, k: usize) -> Result<(ExteriorForm, PlaneKind), GrassmannError> {
    match (n, k) {
        (7, 3) => Ok((model_form(ModelKind::G2Phi), PlaneKind::Associative)),
        (7, 4) => Ok((model_form(ModelKind::G2StarPhi), PlaneKind::Coassociative)),
        (8, 4) => Ok((model_form(ModelKind::Spin7Omega), PlaneKind::Cayley)),
        _ => Err(GrassmannError::Unsupported { n, k }),
    }
}

pub fn classify_plane(plane: &OrientedPlane, tol: f64) -> Result<PlaneClass, GrassmannError> {
    let (form, kind) = calibrating_form(plane.ambient_dim(), plane.dim())?;
    let value = restrict_to_plane(&form, plane)?;
    let kind = if (value - 1.0).abs() < tol { kind } else { PlaneKind::None };
    Ok(PlaneClass { kind, value })
}

/// `(φ₀ restricts to zero, *φ₀ = ±1)` for a 4-plane in ℝ⁷, computed independently.
pub fn vanishing_iff_coassociative(plane: &OrientedPlane, tol: f64) -> Result<(bool, bool), GrassmannError> {
    if (plane.ambient_dim(), plane.dim()) != (7, 4) {
        return Err(GrassmannError::Unsupported { n: plane.ambient_dim(), k: plane.dim() });
    }
    let phi = model_form(ModelKind::G2Phi).to_float();
    let cols = plane.columns();
    let triples = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]];
    let vanishes = triples.iter().all(|t| phi.evaluate(&[&cols[t[0]], &cols[t[1]], &cols[t[2]]]).abs() < tol);
    let star = restrict_to_plane(&model_form(ModelKind::G2StarPhi), plane)?;
    Ok((vanishes, (star.abs() - 1.0).abs() < tol))
}

#[derive(Clone, Debug, Serialize)]
pub struct NullityReport {
    pub nullity: usize,
    pub grassmannian_dim: usize,
    /// Hessian eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Smallest kept eigenvalue over largest discarded one.
    pub gap: f64,
}

pub const HESSIAN_STEP: f64 = 1e-4;

/// Kernel dimension of the Hessian of `1 - form(V)/vol(V)` at a calibrated plane,
/// taken in the chart `X ↦ span(F + N X)` of `Hom(V, V⊥)`.
pub fn calibrated_family_nullity(form: &ExteriorForm, plane: &OrientedPlane) -> Result<NullityReport, GrassmannError> {
    nullity_with(form, plane, HESSIAN_STEP, NULLITY_CUTOFF)
}

pub fn nullity_with(form: &ExteriorForm, plane: &OrientedPlane, h: f64, cutoff: f64) -> Result<NullityReport, GrassmannError> {
    let f = form.to_float();
    check_shape(&f, plane)?;
    let value = eval_frame(&f, plane.frame());
    if (value - 1.0).abs() > 1e-6 {
        return Err(GrassmannError::NotCalibrated { value });
    }
    let n = plane.ambient_dim();
    let k = plane.dim();
    let normal = plane.complement();
    let m = (n - k) * k;
    let objective = |x: &DVector<f64>| -> f64 {
        let xm = DMatrix::from_column_slice(n - k, k, x.as_slice());
        let fr = plane.frame() + &normal * xm;
        let gram = fr.transpose() * &fr;
        1.0 - eval_frame(&f, &fr) / gram.determinant().sqrt()
    };
    let base = objective(&DVector::zeros(m));
    let mut hess = DMatrix::zeros(m, m);
    let unit = |i: usize| {
        let mut v = DVector::zeros(m);
        v[i] = h;
        v
    };
    for a in 0..m {
        let ea = unit(a);
        hess[(a, a)] = (objective(&(&ea * 2.0)) - 2.0 * base + objective(&(&ea * -2.0))) / (4.0 * h * h);
        for b in a + 1..m {
            let eb = unit(b);
            let v = (objective(&(&ea + &eb)) - objective(&(&ea - &eb)) - objective(&(&eb - &ea)) + objective(&(-&ea - &eb))) / (4.0 * h * h);
            hess[(a, b)] = v;
            hess[(b, a)] = v;
        }
    }
    let mut eig: Vec<f64> = SymmetricEigen::new(hess).eigenvalues.iter().copied().collect();
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let scale = eig.iter().fold(0.0f64, |s, e| s.max(e.abs()));
    let threshold = cutoff * scale.max(f64::MIN_POSITIVE);
    let nullity = eig.iter().filter(|e| e.abs() <= threshold).count();
    let largest_zero = eig.iter().filter(|e| e.abs() <= threshold).fold(0.0f64, |s, e| s.max(e.abs()));
    let smallest_kept = eig.iter().filter(|e| e.abs() > threshold).fold(f64::INFINITY, |s, e| s.min(e.abs()));
    let gap = if largest_zero == 0.0 { f64::INFINITY } else { smallest_kept / largest_zero };
    if gap < MIN_GAP {
        return Err(GrassmannError::Ambiguous { gap, eigenvalues: eig });
    }
    Ok(NullityReport { nullity, grassmannian_dim: m, eigenvalues: eig, gap })
}

/// Components of a 2-form on an oriented 4-plane in the bases
/// `(e12 ± e34, e13 ∓ e24, e14 ± e23)` of Λ²₊ and Λ²₋.
fn split_two_form(a: &[[f64; 4]; 4]) -> ([f64; 3], [f64; 3]) {
    let sd = [(a[0][1] + a[2][3]) / 2.0, (a[0][2] - a[1][3]) / 2.0, (a[0][3] + a[1][2]) / 2.0];
    let asd = [(a[0][1] - a[2][3]) / 2.0, (a[0][2] + a[1][3]) / 2.0, (a[0][3] - a[1][2]) / 2.0];
    (sd, asd)
}

#[derive(Clone, Debug, Serialize)]
pub struct NormalMap {
    /// Column j holds the Λ²₊ components of `(v_j ⌟ φ₀)|_V`.
    pub matrix: [[f64; 3]; 3],
    /// Columns `v_1, v_2, v_3` spanning the normal space.
    pub normal_basis: Vec<Vec<f64>>,
    pub determinant: f64,
    /// Largest Λ²₋ component of the images.
    pub anti_self_dual_part: f64,
    /// Largest Λ²₊ component of the images.
    pub self_dual_part: f64,
}

/// Splits `(v ⌟ φ₀)|_V` into self-dual and anti-self-dual parts for the given normal basis.
pub fn normal_two_form_map(plane: &OrientedPlane, normal_basis: &[Vec<f64>]) -> Result<NormalMap, GrassmannError> {
    if (plane.ambient_dim(), plane.dim()) != (7, 4) {
        return Err(GrassmannError::Unsupported { n: plane.ambient_dim(), k: plane.dim() });
    }
    let phi = model_form(ModelKind::G2Phi).to_float();
    let cols = plane.columns();
    let mut matrix = [[0.0; 3]; 3];
    let mut asd_max: f64 = 0.0;
    let mut sd_max: f64 = 0.0;
    for (j, v) in normal_basis.iter().enumerate().take(3) {
        let mut a = [[0.0; 4]; 4];
        for p in 0..4 {
            for q in p + 1..4 {
                let x = phi.evaluate(&[v, &cols[p], &cols[q]]);
                a[p][q] = x;
                a[q][p] = -x;
            }
        }
        let (sd, asd) = split_two_form(&a);
        for i in 0..3 {
            matrix[i][j] = sd[i];
            asd_max = asd_max.max(asd[i].abs());
            sd_max = sd_max.max(sd[i].abs());
        }
    }
    let det = DMatrix::from_fn(3, 3, |i, j| matrix[i][j]).determinant();
    Ok(NormalMap { matrix, normal_basis: normal_basis.to_vec(), determinant: det, anti_self_dual_part: asd_max, self_dual_part: sd_max })
}

/// The map normal space → Λ²₊V, `v ↦ (v ⌟ φ₀)|_V`, for a coassociative plane.
pub fn normal_selfdual_isomorphism(plane: &OrientedPlane, tol: f64) -> Result<NormalMap, GrassmannError> {
    let star = restrict_to_plane(&model_form(ModelKind::G2StarPhi), plane)?;
    if (star.abs() - 1.0).abs() > tol {
        return Err(GrassmannError::NotCoassociative { value: star });
    }
    let comp = plane.complement();
    let basis: Vec<Vec<f64>> = comp.column_iter().map(|c| c.iter().copied().collect()).collect();
    let map = normal_two_form_map(plane, &basis)?;
    if map.anti_self_dual_part > tol {
        return Err(GrassmannError::NotSelfDual { defect: map.anti_self_dual_part });
    }
    Ok(map)
}

/// The fixed-basis version on `span⁺(e4..e7)` with normals `e1, e2, e3`.
pub fn standard_normal_map() -> NormalMap {
    let plane = OrientedPlane::coordinate(7, &[4, 5, 6, 7]);
    let basis: Vec<Vec<f64>> = (0..3).map(|i| (0..7).map(|r| if r == i { 1.0 } else { 0.0 }).collect()).collect();
    normal_two_form_map(&plane, &basis).expect("(7, 4)")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{random_stabilizer_element, stabilizer_algebra};

    fn phi() -> ExteriorForm {
        model_form(ModelKind::G2Phi)
    }

    #[test]
    fn model_planes() {
        let u = OrientedPlane::coordinate(7, &[1, 2, 3]);
        assert!((restrict_to_plane(&phi(), &u).unwrap() - 1.0).abs() < 1e-15);
        let v = OrientedPlane::coordinate(7, &[4, 5, 6, 7]);
        assert!((restrict_to_plane(&model_form(ModelKind::G2StarPhi), &v).unwrap() - 1.0).abs() < 1e-15);
        let w = OrientedPlane::coordinate(7, &[1, 2, 4]);
        assert_eq!(restrict_to_plane(&phi(), &w).unwrap(), 0.0);
    }

    #[test]
    fn swap_negates() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_plane(7, 3, &mut rng);
        let a = restrict_to_plane(&phi(), &p).unwrap();
        let b = restrict_to_plane(&phi(), &p.swapped(0, 2)).unwrap();
        assert!((a + b).abs() < 1e-14);
    }

    #[test]
    fn degree_mismatch() {
        let p = OrientedPlane::coordinate(7, &[1, 2]);
        assert!(matches!(restrict_to_plane(&phi(), &p), Err(GrassmannError::DegreeMismatch { .. })));
    }

    #[test]
    fn comass_of_simple_forms() {
        let dx12 = ExteriorForm::from_int_terms(4, &[(&[1, 2], 1)]).unwrap();
        assert!((comass(&dx12, 5, 1, 1e-9).value - 1.0).abs() < 1e-8);
        let two = ExteriorForm::from_int_terms(5, &[(&[1, 2, 3], 2)]).unwrap();
        assert!((comass(&two, 5, 1, 1e-9).value - 2.0).abs() < 1e-8);
    }

    #[test]
    fn comass_is_seed_deterministic() {
        let a = comass(&phi(), 8, 42, 1e-8);
        let b = comass(&phi(), 8, 42, 1e-8);
        assert_eq!(a.value, b.value);
        assert_eq!(a.best_restart, b.best_restart);
    }

    #[test]
    fn classification_examples() {
        let u = OrientedPlane::coordinate(7, &[1, 2, 3]);
        assert_eq!(classify_plane(&u, CLASSIFY_TOL).unwrap().kind, PlaneKind::Associative);
        let p = OrientedPlane::coordinate(7, &[1, 2, 3, 4]);
        let c = classify_plane(&p, CLASSIFY_TOL).unwrap();
        assert_eq!(c.kind, PlaneKind::None);
        assert_eq!(c.value, 0.0);
        assert!(matches!(classify_plane(&OrientedPlane::coordinate(6, &[1, 2, 3]), 1e-9), Err(GrassmannError::Unsupported { n: 6, k: 3 })));
        let alg = stabilizer_algebra(&phi());
        let g = random_stabilizer_element(&alg, 11);
        let gu = u.transformed(&g).unwrap();
        assert_eq!(classify_plane(&gu, CLASSIFY_TOL).unwrap().kind, PlaneKind::Associative);
    }

    #[test]
    fn reframing_keeps_class() {
        let u = OrientedPlane::coordinate(7, &[1, 2, 3]);
        let t: f64 = 0.7;
        let r = DMatrix::from_row_slice(3, 3, &[t.cos(), -t.sin(), 0.0, t.sin(), t.cos(), 0.0, 0.0, 0.0, 1.0]);
        let c = classify_plane(&u.reframed(&r).unwrap(), CLASSIFY_TOL).unwrap();
        assert_eq!(c.kind, PlaneKind::Associative);
    }

    #[test]
    fn vanishing_examples() {
        let v = OrientedPlane::coordinate(7, &[4, 5, 6, 7]);
        assert_eq!(vanishing_iff_coassociative(&v, 1e-9).unwrap(), (true, true));
        let w = OrientedPlane::coordinate(7, &[1, 2, 3, 4]);
        assert_eq!(vanishing_iff_coassociative(&w, 1e-9).unwrap(), (false, false));
    }

    #[test]
    fn standard_normal_map_is_diagonal() {
        let m = standard_normal_map();
        assert_eq!(m.matrix, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]]);
        assert_eq!(m.anti_self_dual_part, 0.0);
    }

    #[test]
    fn reversed_plane_gives_anti_self_dual_image() {
        let v = OrientedPlane::coordinate(7, &[4, 5, 6, 7]).swapped(0, 1);
        assert!(matches!(normal_selfdual_isomorphism(&v, 1e-9), Err(GrassmannError::NotSelfDual { .. })));
        let basis: Vec<Vec<f64>> = v.complement().column_iter().map(|c| c.iter().copied().collect()).collect();
        let m = normal_two_form_map(&v, &basis).unwrap();
        assert!(m.self_dual_part < 1e-12 && m.anti_self_dual_part > 0.5);
    }

    #[test]
    fn complement_is_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = random_plane(8, 4, &mut rng);
        let n = p.complement();
        assert_eq!(n.ncols(), 4);
        assert!((n.transpose() * &n - DMatrix::identity(4, 4)).abs().max() < 1e-12);
        assert!((p.frame().transpose() * &n).abs().max() < 1e-12);
    }

    #[test]
    fn parse_frame_file() {
        let p = OrientedPlane::parse("1 0 0\n0 1 0\n0 0 1\n0 0 0\n0 0 0\n0 0 0\n0 0 0\n").unwrap();
        assert_eq!((p.ambient_dim(), p.dim()), (7, 3));
        assert!(OrientedPlane::parse("1 0\n0\n").is_err());
    }
}
