//! Symbolic derivation of the graph equations and their pointwise residuals.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::poly::{poly_det, FloatPoly, Poly};
use super::{quaternion_product_table, GraphKind, Jet1, PdeError, Quaternion};
use crate::exact::{self, rat, Matrix, Rational};
use crate::exterior::ExteriorForm;
use crate::grassmann::{restrict_to_plane, vanishing_iff_coassociative, OrientedPlane};
use crate::structures::{model_form, random_stabilizer_element, stabilizer_algebra, ModelKind};

/// Signs `K = (−x₀, x₁, x₂, x₃, f₀, −f₁, −f₂, f₃)` of the Cayley graph parameterization.
pub const CAYLEY_BASE_SIGNS: [i64; 4] = [-1, 1, 1, 1];
pub const CAYLEY_NORMAL_SIGNS: [i64; 4] = [1, -1, -1, 1];

/// How the real differential is read as quaternions in the Dirac part.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Identification {
    /// `Σ u_a q_a`
    LeftUnit,
    /// `Σ q̄_a u_a`
    RightConjugate,
    /// `Σ u_a q̄_a`
    LeftConjugate,
    /// `Σ q_a u_a`
    RightUnit,
}

impl Identification {
    const ALL: [Identification; 4] = [Identification::LeftUnit, Identification::RightConjugate, Identification::LeftConjugate, Identification::RightUnit];
}

type QPoly = [Poly; 4];

fn qmul_poly(a: &QPoly, b: &QPoly) -> QPoly {
    let mut out: QPoly = Default::default();
    for (p, row) in quaternion_product_table().iter().enumerate() {
        for (q, (r, s)) in row.iter().enumerate() {
            if a[p].is_zero() || b[q].is_zero() {
                continue;
            }
            let t = (&a[p] * &b[q]).scale(&rat(*s));
            out[*r] = &out[*r] + &t;
        }
    }
    out
}

fn qconj_poly(a: &QPoly) -> QPoly {
    [a[0].clone(), -&a[1], -&a[2], -&a[3]]
}

fn unit(i: usize, sign: i64) -> QPoly {
    let mut q: QPoly = Default::default();
    q[i] = Poly::int(sign);
    q
}

/// `(unit, quaternion of jet polynomials)` pairs summed in the Dirac part.
fn dirac_pairs(kind: GraphKind) -> Vec<(QPoly, QPoly)> {
    let t = kind.target_dim();
    let v = |a: usize, c: usize| Poly::var(a * t + c);
    match kind {
        GraphKind::Associative => {
            let units = [unit(1, 1), unit(2, 1), unit(3, -1)];
            (0..3).map(|a| (units[a].clone(), std::array::from_fn(|c| v(a, c)))).collect()
        }
        GraphKind::Coassociative => {
            // ∂f_j read as the gradient quaternion (∂₀f_j, ∂₁f_j, ∂₂f_j, ∂₃f_j)
            let units = [unit(1, 1), unit(2, 1), unit(3, -1)];
            (0..3).map(|j| (units[j].clone(), std::array::from_fn(|a| v(a, j)))).collect()
        }
        GraphKind::Cayley => {
            let units = [unit(0, 1), unit(1, 1), unit(2, 1), unit(3, 1)];
            (0..4).map(|a| (units[a].clone(), std::array::from_fn(|c| v(a, c)))).collect()
        }
    }
}

fn dirac_part(kind: GraphKind, ident: Identification) -> Vec<Poly> {
    let mut total: QPoly = Default::default();
    for (u, q) in dirac_pairs(kind) {
        let term = match ident {
            Identification::LeftUnit => qmul_poly(&u, &q),
            Identification::RightConjugate => qmul_poly(&qconj_poly(&q), &u),
            Identification::LeftConjugate => qmul_poly(&u, &qconj_poly(&q)),
            Identification::RightUnit => qmul_poly(&q, &u),
        };
        for i in 0..4 {
            total[i] = &total[i] + &term[i];
        }
    }
    total.to_vec()
}

fn form_on(form: &ExteriorForm, vectors: &[Vec<Poly>]) -> Poly {
    let f = form.to_float();
    let k = vectors.len();
    let mut total = Poly::zero();
    for (pos, c) in &f.terms {
        let m: Vec<Vec<Poly>> = pos.iter().map(|p| (0..k).map(|s| vectors[s][*p].clone()).collect()).collect();
        let coef = Rational::from_float(*c).expect("finite");
        total = &total + &poly_det(&m).scale(&coef);
    }
    total
}

fn basis_vec(n: usize, i: usize) -> Vec<Poly> {
    (0..n).map(|r| if r == i { Poly::int(1) } else { Poly::zero() }).collect()
}

/// Symbolic graph frame `t_a` in ambient coordinates.
fn symbolic_frame(kind: GraphKind) -> Vec<Vec<Poly>> {
    let t = kind.target_dim();
    let v = |a: usize, c: usize| Poly::var(a * t + c);
    match kind {
        GraphKind::Associative => (0..3)
            .map(|a| {
                let mut e = basis_vec(7, a);
                for c in 0..4 {
                    e[3 + c] = v(a, c);
                }
                e
            })
            .collect(),
        GraphKind::Coassociative => (0..4)
            .map(|a| {
                let mut e = basis_vec(7, 3 + a);
                for j in 0..3 {
                    e[j] = v(a, j);
                }
                e
            })
            .collect(),
        GraphKind::Cayley => (0..4)
            .map(|a| {
                let mut e = basis_vec(8, a).into_iter().map(|p| p.scale(&rat(CAYLEY_BASE_SIGNS[a]))).collect::<Vec<_>>();
                for c in 0..4 {
                    e[4 + c] = v(a, c).scale(&rat(CAYLEY_NORMAL_SIGNS[c]));
                }
                e
            })
            .collect(),
    }
}

/// The four calibration defects whose joint vanishing characterizes the graph plane.
fn symbolic_defects(kind: GraphKind) -> Vec<Poly> {
    let t = symbolic_frame(kind);
    match kind {
        GraphKind::Associative => {
            let star = model_form(ModelKind::G2StarPhi);
            (0..4).map(|m| form_on(&star, &[t[0].clone(), t[1].clone(), t[2].clone(), basis_vec(7, 3 + m)])).collect()
        }
        GraphKind::Coassociative => {
            let phi = model_form(ModelKind::G2Phi);
            [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]].iter().map(|[b, c, d]| form_on(&phi, &[t[*b].clone(), t[*c].clone(), t[*d].clone()])).collect()
        }
        GraphKind::Cayley => {
            let omega = model_form(ModelKind::Spin7Omega);
            (0..4)
                .map(|m| {
                    // ν_m = (−T_b T_nᵀ e_m, e_m) is normal to every t_a
                    let mut nu = basis_vec(8, 4 + m);
                    for b in 0..4 {
                        nu[b] = t[b][4 + m].scale(&rat(-CAYLEY_BASE_SIGNS[b]));
                    }
                    form_on(&omega, &[t[1].clone(), t[2].clone(), t[3].clone(), nu])
                })
                .collect()
        }
    }
}

/// Exact `M` with `M · L = D`, if any.
fn solve_normalization(lin: &[Poly], dirac: &[Poly], nvars: usize) -> Option<Matrix> {
    let l: Matrix = lin.iter().map(|p| (0..nvars).map(|v| p.linear_coefficient(v)).collect()).collect();
    let d: Matrix = dirac.iter().map(|p| (0..nvars).map(|v| p.linear_coefficient(v)).collect()).collect();
    let llt = exact::mat_mul(&l, &exact::transpose(&l));
    let mut m = Vec::with_capacity(4);
    for row in &d {
        let rhs: Vec<Rational> = l.iter().map(|lr| lr.iter().zip(row).map(|(a, b)| a * b).sum()).collect();
        m.push(exact::solve(&llt, &rhs)?);
    }
    (exact::mat_mul(&m, &l) == d).then_some(m)
}

/// `D(∂f) = C(∂f)` with `D` the Dirac part and `C` the derived nonlinear completion.
#[derive(Clone, Debug)]
pub struct CrossProductTable {
    pub kind: GraphKind,
    pub identification: Identification,
    /// Other identifications that are equally consistent.
    pub alternatives: Vec<Identification>,
    /// `M` with `D − C = M · defects`.
    pub normalization: Matrix,
    pub dirac: Vec<Poly>,
    pub cross: Vec<Poly>,
    pub defects: Vec<Poly>,
    dirac_f: FloatPoly,
    cross_f: FloatPoly,
}

impl CrossProductTable {
    /// Degrees occurring in `C`.
    pub fn cross_degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.cross.iter().flat_map(Poly::degrees).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// `D − C − M · defects`, identically zero by construction.
    pub fn symbolic_residue(&self) -> Vec<Poly> {
        (0..4)
            .map(|r| {
                let md = (0..4).fold(Poly::zero(), |acc, m| &acc + &self.defects[m].scale(&self.normalization[r][m]));
                &(&self.dirac[r] - &self.cross[r]) - &md
            })
            .collect()
    }

    pub fn dirac_of(&self, vars: &[f64]) -> Quaternion {
        Quaternion(to4(self.dirac_f.eval(vars)))
    }

    pub fn cross_of(&self, vars: &[f64]) -> Quaternion {
        Quaternion(to4(self.cross_f.eval(vars)))
    }

    pub fn residual_of(&self, vars: &[f64]) -> Quaternion {
        self.dirac_of(vars) - self.cross_of(vars)
    }

    /// Derivative of the residual at `vars` along `dir`.
    pub fn linearized(&self, vars: &[f64], dir: &[f64]) -> Quaternion {
        Quaternion(to4(self.dirac_f.eval(dir))) - Quaternion(to4(self.cross_f.directional(vars, dir)))
    }

    /// `A_a` with `D = Σ_a A_a ∂_a f`, as row-major 4 × target blocks.
    pub fn dirac_blocks(&self) -> Vec<DMatrix<f64>> {
        let t = self.kind.target_dim();
        (0..self.kind.base_dim()).map(|a| DMatrix::from_fn(4, t, |r, c| exact::to_f64(&self.dirac[r].linear_coefficient(a * t + c)))).collect()
    }
}

fn to4(v: Vec<f64>) -> [f64; 4] {
    [v[0], v[1], v[2], v[3]]
}

pub fn derive_kind(kind: GraphKind) -> Result<CrossProductTable, PdeError> {
    let nvars = kind.jet_vars();
    let defects = symbolic_defects(kind);
    if defects.iter().any(|p| !p.part(0).is_zero()) {
        return Err(PdeError::Inconsistent { kind });
    }
    let lin: Vec<Poly> = defects.iter().map(|p| p.part(1)).collect();
    let mut found: Vec<(Identification, Matrix, Vec<Poly>)> = Vec::new();
    for ident in Identification::ALL {
        let dirac = dirac_part(kind, ident);
        if let Some(m) = solve_normalization(&lin, &dirac, nvars) {
            found.push((ident, m, dirac));
        }
    }
    if found.is_empty() {
        return Err(PdeError::Inconsistent { kind });
    }
    let alternatives = found[1..].iter().map(|f| f.0).collect();
    let (identification, normalization, dirac) = found.swap_remove(0);
    let cross: Vec<Poly> = (0..4)
        .map(|r| {
            let nl = (0..4).fold(Poly::zero(), |acc, m| &acc + &(&defects[m] - &lin[m]).scale(&normalization[r][m]));
            -&nl
        })
        .collect();
    if exact::determinant(&normalization).is_zero() {
        return Err(PdeError::Inconsistent { kind });
    }
    Ok(CrossProductTable {
        kind,
        identification,
        alternatives,
        dirac_f: FloatPoly::compile(&dirac),
        cross_f: FloatPoly::compile(&cross),
        normalization,
        dirac,
        cross,
        defects,
    })
}

/// One table per kind, in the order associative, coassociative, Cayley.
pub fn derive_cross_products() -> Result<Vec<CrossProductTable>, PdeError> {
    GraphKind::ALL.iter().map(|k| derive_kind(*k)).collect()
}

static TABLES: OnceLock<Result<Vec<CrossProductTable>, PdeError>> = OnceLock::new();

/// The cached derived table for `kind`.
pub fn cross_product_table(kind: GraphKind) -> Result<&'static CrossProductTable, PdeError> {
    let tables = TABLES.get_or_init(derive_cross_products).as_ref().map_err(Clone::clone)?;
    Ok(tables.iter().find(|t| t.kind == kind).expect("all kinds derived"))
}

pub fn residual(jet: &Jet1) -> Result<Quaternion, PdeError> {
    jet.validate()?;
    Ok(cross_product_table(jet.kind)?.residual_of(&jet.variables()))
}

fn residual_of_kind(kind: GraphKind, jet: &Jet1) -> Result<Quaternion, PdeError> {
    if jet.kind != kind {
        return Err(PdeError::UnsupportedKind(jet.kind));
    }
    residual(jet)
}

pub fn associative_residual(jet: &Jet1) -> Result<Quaternion, PdeError> {
    residual_of_kind(GraphKind::Associative, jet)
}

pub fn coassociative_residual(jet: &Jet1) -> Result<Quaternion, PdeError> {
    residual_of_kind(GraphKind::Coassociative, jet)
}

pub fn cayley_residual(jet: &Jet1) -> Result<Quaternion, PdeError> {
    residual_of_kind(GraphKind::Cayley, jet)
}

/// Tangent frame columns of the graph at a jet.
pub fn graph_frame(kind: GraphKind, vars: &[f64]) -> Vec<Vec<f64>> {
    let t = kind.target_dim();
    let n = kind.ambient_dim();
    (0..kind.base_dim())
        .map(|a| {
            let mut e = vec![0.0; n];
            match kind {
                GraphKind::Associative => {
                    e[a] = 1.0;
                    e[3..7].copy_from_slice(&vars[a * t..a * t + 4]);
                }
                GraphKind::Coassociative => {
                    e[3 + a] = 1.0;
                    e[..3].copy_from_slice(&vars[a * t..a * t + 3]);
                }
                GraphKind::Cayley => {
                    e[a] = CAYLEY_BASE_SIGNS[a] as f64;
                    for c in 0..4 {
                        e[4 + c] = CAYLEY_NORMAL_SIGNS[c] as f64 * vars[a * t + c];
                    }
                }
            }
            e
        })
        .collect()
}

pub fn graph_plane(jet: &Jet1) -> Result<OrientedPlane, PdeError> {
    jet.validate()?;
    let cols = graph_frame(jet.kind, &jet.variables());
    OrientedPlane::from_columns(jet.kind.ambient_dim(), &cols).map_err(|e| PdeError::Input(e.to_string()))
}

/// The jet whose graph plane is `plane`, if the plane is a graph over the base.
pub fn jet_from_plane(kind: GraphKind, plane: &OrientedPlane) -> Option<Jet1> {
    let f = plane.frame();
    let (b, t) = (kind.base_dim(), kind.target_dim());
    let (base_rows, normal_rows): (Vec<usize>, Vec<usize>) = match kind {
        GraphKind::Associative => ((0..3).collect(), (3..7).collect()),
        GraphKind::Coassociative => ((3..7).collect(), (0..3).collect()),
        GraphKind::Cayley => ((0..4).collect(), (4..8).collect()),
    };
    let a = DMatrix::from_fn(b, b, |i, j| f[(base_rows[i], j)]);
    if a.determinant().abs() < 1e-8 {
        return None;
    }
    let mut target = DMatrix::<f64>::identity(b, b);
    if kind == GraphKind::Cayley {
        for i in 0..4 {
            target[(i, i)] = CAYLEY_BASE_SIGNS[i] as f64;
        }
    }
    let x = f * a.try_inverse()? * target;
    let partials = (0..b)
        .map(|col| {
            (0..t)
                .map(|c| {
                    let v = x[(normal_rows[c], col)];
                    if kind == GraphKind::Cayley {
                        v * CAYLEY_NORMAL_SIGNS[c] as f64
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    Jet1::new(kind, partials).ok()
}

/// Independent plane test: calibrated for one of the two orientations.
pub fn plane_calibrated(kind: GraphKind, plane: &OrientedPlane, tol: f64) -> bool {
    match kind {
        GraphKind::Coassociative => vanishing_iff_coassociative(plane, tol).map(|(v, _)| v).unwrap_or(false),
        GraphKind::Associative => restrict_to_plane(&model_form(ModelKind::G2Phi), plane).is_ok_and(|v| (v.abs() - 1.0).abs() < tol),
        GraphKind::Cayley => restrict_to_plane(&model_form(ModelKind::Spin7Omega), plane).is_ok_and(|v| (v.abs() - 1.0).abs() < tol),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LinearizationReport {
    pub kind: GraphKind,
    pub eps: Vec<f64>,
    /// `max ‖ε⁻¹ residual(εβ) − Dirac(β)‖` over the sampled jets.
    pub errors: Vec<f64>,
    pub slope: f64,
    pub expected_slope: f64,
    pub tolerance: f64,
    pub zero_jet_exact: bool,
    pub passed: bool,
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    num / den
}

pub const LINEARIZATION_SAMPLES: usize = 32;

pub fn random_jet(kind: GraphKind, rng: &mut ChaCha8Rng) -> Jet1 {
    let partials = (0..kind.base_dim()).map(|_| (0..kind.target_dim()).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    Jet1::new(kind, partials).expect("shape")
}

/// Expected order: 1 for the associative equation, 2 for the Cayley equation.
pub fn dirac_linearization_check(kind: GraphKind, eps: &[f64], seed: u64) -> Result<LinearizationReport, PdeError> {
    let expected_slope = match kind {
        GraphKind::Associative => 1.0,
        GraphKind::Cayley => 2.0,
        GraphKind::Coassociative => return Err(PdeError::UnsupportedKind(kind)),
    };
    if eps.len() < 2 || eps.iter().any(|e| *e <= 0.0) || eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(PdeError::Input("epsilon sequence must be positive and decreasing".into()));
    }
    let table = cross_product_table(kind)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jets: Vec<Jet1> = (0..LINEARIZATION_SAMPLES).map(|_| random_jet(kind, &mut rng)).collect();
    let errors: Vec<f64> = eps
        .iter()
        .map(|e| {
            jets.iter()
                .map(|j| {
                    let vars = j.variables();
                    let scaled: Vec<f64> = vars.iter().map(|x| x * e).collect();
                    (table.residual_of(&scaled).scale(1.0 / e) - table.dirac_of(&vars)).max_abs()
                })
                .fold(0.0, f64::max)
        })
        .collect();
    let zero = Jet1::zero(kind).variables();
    let zero_jet_exact = eps.iter().all(|e| table.residual_of(&zero.iter().map(|x| x * e).collect::<Vec<_>>()) == Quaternion::default());
    let slope = loglog_slope(eps, &errors);
    let tolerance = 0.2;
    Ok(LinearizationReport {
        kind,
        eps: eps.to_vec(),
        errors,
        slope,
        expected_slope,
        tolerance,
        zero_jet_exact,
        passed: zero_jet_exact && (slope - expected_slope).abs() <= tolerance,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AgreementReport {
    pub kind: GraphKind,
    pub samples: usize,
    /// Jets built from calibrated planes.
    pub calibrated_samples: usize,
    pub disagreements: usize,
    pub max_residual_on_calibrated: f64,
    pub min_residual_off_calibrated: f64,
}

/// Calibrated jets from `g · P₀` for `g` in the stabilizer group, plus perturbed and random jets,
/// each tested by the residual and by the plane oracle.
pub fn residual_oracle_agreement(kind: GraphKind, samples: usize, seed: u64, residual_tol: f64, plane_tol: f64) -> Result<AgreementReport, PdeError> {
    let table = cross_product_table(kind)?;
    let (form, reference) = match kind {
        GraphKind::Associative => (ModelKind::G2Phi, OrientedPlane::coordinate(7, &[1, 2, 3])),
        GraphKind::Coassociative => (ModelKind::G2Phi, OrientedPlane::coordinate(7, &[4, 5, 6, 7])),
        GraphKind::Cayley => (ModelKind::Spin7Omega, OrientedPlane::coordinate(8, &[1, 2, 3, 4])),
    };
    let alg = stabilizer_algebra(&model_form(form));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = AgreementReport {
        kind,
        samples: 0,
        calibrated_samples: 0,
        disagreements: 0,
        max_residual_on_calibrated: 0.0,
        min_residual_off_calibrated: f64::INFINITY,
    };
    let mut draw = 0u64;
    while report.samples < samples {
        let category = report.samples % 3;
        let jet = if category == 2 {
            random_jet(kind, &mut rng)
        } else {
            draw += 1;
            let g = random_stabilizer_element(&alg, seed.wrapping_mul(1_000_003).wrapping_add(draw));
            let plane = reference.transformed(&g).map_err(|e| PdeError::Input(e.to_string()))?;
            let Some(jet) = jet_from_plane(kind, &plane) else { continue };
            if jet.variables().iter().any(|x| x.abs() > 10.0) {
                continue;
            }
            if category == 1 {
                let mut j = jet;
                for p in &mut j.partials {
                    for x in p.iter_mut() {
                        *x += 1e-2 * rng.random_range(-1.0..1.0);
                    }
                }
                j
            } else {
                jet
            }
        };
        let res = table.residual_of(&jet.variables()).max_abs();
        let calibrated = plane_calibrated(kind, &graph_plane(&jet)?, plane_tol);
        if calibrated {
            report.calibrated_samples += 1;
            report.max_residual_on_calibrated = report.max_residual_on_calibrated.max(res);
        } else {
            report.min_residual_off_calibrated = report.min_residual_off_calibrated.min(res);
        }
        if (res < residual_tol) != calibrated {
            report.disagreements += 1;
        }
        report.samples += 1;
    }
    Ok(report)
}

/// Rational jet evaluation of the residual, for exact spot checks.
pub fn exact_residual(table: &CrossProductTable, vars: &[Rational]) -> Vec<Rational> {
    (0..4).map(|r| table.dirac[r].evaluate(vars) - table.cross[r].evaluate(vars)).collect()
}

/// Whether `C` changes sign under swapping two argument blocks.
pub fn is_alternating(table: &CrossProductTable) -> bool {
    let (b, t) = (table.kind.base_dim(), table.kind.target_dim());
    let nv = table.kind.jet_vars();
    (0..b).all(|p| {
        (p + 1..b).all(|q| {
            let images: Vec<Poly> = (0..nv)
                .map(|v| {
                    let (a, c) = (v / t, v % t);
                    let a2 = if a == p {
                        q
                    } else if a == q {
                        p
                    } else {
                        a
                    };
                    Poly::var(a2 * t + c)
                })
                .collect();
            table.cross.iter().all(|c| c.substitute(&images) == -c)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivation_succeeds_with_exact_normalizations() {
        let tables = derive_cross_products().unwrap();
        let diag = |d: [i64; 4]| -> Matrix { (0..4).map(|i| (0..4).map(|j| if i == j { rat(d[i]) } else { rat(0) }).collect()).collect() };
        assert_eq!(tables[0].normalization, diag([1, 1, 1, 1]));
        assert_eq!(tables[1].normalization, diag([-1, 1, -1, 1]));
        assert_eq!(tables[2].normalization, diag([-1, 1, 1, -1]));
        for t in &tables {
            assert!(t.symbolic_residue().iter().all(Poly::is_zero));
            assert_eq!(t.identification, Identification::LeftUnit);
        }
        assert_eq!(tables[1].alternatives, vec![Identification::RightConjugate]);
    }

    #[test]
    fn cross_products_are_cubic() {
        for t in derive_cross_products().unwrap() {
            assert_eq!(t.cross_degrees(), vec![3], "{}", t.kind);
        }
    }

    #[test]
    fn associative_cross_product_is_alternating() {
        assert!(is_alternating(cross_product_table(GraphKind::Associative).unwrap()));
    }

    #[test]
    fn zero_jet_has_zero_residual() {
        for k in GraphKind::ALL {
            assert_eq!(residual(&Jet1::zero(k)).unwrap(), Quaternion::default());
        }
    }

    #[test]
    fn single_derivative_gives_minus_one() {
        let jet = Jet1::new(GraphKind::Associative, vec![vec![0.0, 1.0, 0.0, 0.0], vec![0.0; 4], vec![0.0; 4]]).unwrap();
        let r = associative_residual(&jet).unwrap();
        assert_eq!(r, Quaternion([-1.0, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn residual_matches_plane_oracle() {
        for k in GraphKind::ALL {
            let r = residual_oracle_agreement(k, 90, 11, 1e-10, 1e-9).unwrap();
            assert_eq!(r.disagreements, 0, "{r:?}");
            assert!(r.calibrated_samples >= 30, "{r:?}");
        }
    }

    #[test]
    fn frame_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for k in GraphKind::ALL {
            let jet = random_jet(k, &mut rng);
            let back = jet_from_plane(k, &graph_plane(&jet).unwrap()).unwrap();
            for (a, b) in jet.variables().iter().zip(back.variables()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
