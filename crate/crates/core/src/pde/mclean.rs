//! Linearization of the coassociative condition for graphs over the flat `T⁴`.

use nalgebra::Matrix3;
use rayon::prelude::*;
use serde::Serialize;

use super::cross::loglog_slope;
use super::grid::{band_limited, Derivative, PeriodicField};
use super::PdeError;
use crate::grassmann::standard_normal_map;
use crate::structures::{model_form, ModelKind};

/// Below this `dβ` counts as identically zero and errors are reported absolutely.
pub const ZERO_FIELD: f64 = 1e-12;

const TRIPLES: [[usize; 3]; 4] = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];

/// `(ω_k)_{pq}` for the self-dual basis `(e01 + e23, e02 − e13, e03 + e12)`.
fn self_dual_entry(p: usize, q: usize, k: usize) -> f64 {
    let table: [[(usize, usize, f64); 2]; 3] = [[(0, 1, 1.0), (2, 3, 1.0)], [(0, 2, 1.0), (1, 3, -1.0)], [(0, 3, 1.0), (1, 2, 1.0)]];
    table[k]
        .iter()
        .map(|(a, b, s)| {
            if (p, q) == (*a, *b) {
                *s
            } else if (q, p) == (*a, *b) {
                -*s
            } else {
                0.0
            }
        })
        .sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct McLeanReport {
    pub grid: usize,
    pub eps: Vec<f64>,
    /// `max |ε⁻¹P(εβ) − dβ|` per ε.
    pub errors: Vec<f64>,
    /// `errors / max |dβ|`, or the absolute error when `dβ ≡ 0`.
    /// The error is `O(ε²)` since `φ₀` has no terms quadratic in the normal directions.
    pub relative_errors: Vec<f64>,
    pub slope: Option<f64>,
    pub dbeta_max: f64,
    /// Grid point and triple of the largest deviation at the smallest ε.
    pub worst_point: Vec<usize>,
    pub worst_triple: [usize; 3],
}

impl McLeanReport {
    pub fn final_relative_error(&self) -> f64 {
        *self.relative_errors.last().unwrap_or(&f64::INFINITY)
    }
}

/// A band-limited self-dual 2-form on `T⁴`, as coefficients on `(ω₁, ω₂, ω₃)` with `max |b| = 1`.
pub fn random_self_dual_field(size: usize, seed: u64) -> PeriodicField {
    let f = band_limited(&[size; 4], 3, 2, seed);
    let m = f.max_abs();
    f.scaled(if m > 0.0 { 1.0 / m } else { 0.0 })
}

/// Compares `ε⁻¹ P(εβ)` with `dβ` on the graph of `Φ⁻¹β` over `span(e4..e7)`, derivatives spectral.
pub fn coassoc_deformation_linearization(beta: &PeriodicField, eps: &[f64]) -> Result<McLeanReport, PdeError> {
    if beta.dim() != 4 || beta.components != 3 {
        return Err(PdeError::Input("beta must have 3 self-dual components on a 4-dimensional grid".into()));
    }
    if eps.is_empty() || eps.iter().any(|e| *e <= 0.0) {
        return Err(PdeError::Input("epsilon values must be positive".into()));
    }
    let map = standard_normal_map();
    let phi_m = Matrix3::from_fn(|i, j| map.matrix[i][j]);
    let inv = phi_m.try_inverse().ok_or_else(|| PdeError::Input("normal map is singular".into()))?;
    let mut v = PeriodicField::zeros(&beta.shape, 3);
    v.period = beta.period;
    for p in 0..beta.points() {
        let b = beta.at(p);
        for i in 0..3 {
            v.data[p * 3 + i] = (0..3).map(|k| inv[(i, k)] * b[k]).sum();
        }
    }
    let dv = v.gradient(Derivative::Spectral);
    let db = beta.gradient(Derivative::Spectral);
    let npts = beta.points();
    let dbeta: Vec<[f64; 4]> = (0..npts)
        .map(|p| {
            TRIPLES.map(|[a, b, c]| {
                (0..3)
                    .map(|k| self_dual_entry(b, c, k) * db[a].at(p)[k] - self_dual_entry(a, c, k) * db[b].at(p)[k] + self_dual_entry(a, b, k) * db[c].at(p)[k])
                    .sum()
            })
        })
        .collect();
    let dbeta_max = dbeta.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    let dbeta_vanishes = dbeta_max < ZERO_FIELD;
    let phi = model_form(ModelKind::G2Phi).to_float();
    let mut errors = Vec::new();
    let mut worst = (0usize, 0usize);
    for &e in eps {
        let per_point: Vec<(f64, usize)> = (0..npts)
            .into_par_iter()
            .map(|p| {
                let t: Vec<Vec<f64>> = (0..4)
                    .map(|a| {
                        let mut col = vec![0.0; 7];
                        col[3 + a] = 1.0;
                        for j in 0..3 {
                            col[j] = e * dv[a].at(p)[j];
                        }
                        col
                    })
                    .collect();
                let mut best = (0.0, 0);
                for (q, [a, b, c]) in TRIPLES.iter().enumerate() {
                    let val = phi.evaluate(&[&t[*a], &t[*b], &t[*c]]) / e;
                    let d = (val - dbeta[p][q]).abs();
                    if d > best.0 {
                        best = (d, q);
                    }
                }
                best
            })
            .collect();
        let (p, (err, q)) = per_point.iter().enumerate().fold((0, (0.0, 0)), |acc, (p, x)| if x.0 > acc.1 .0 { (p, *x) } else { acc });
        worst = (p, q);
        errors.push(err);
    }
    let relative_errors: Vec<f64> = errors.iter().map(|x| if dbeta_vanishes { *x } else { x / dbeta_max }).collect();
    let slope = (eps.len() > 1 && errors.iter().all(|x| *x > 0.0)).then(|| loglog_slope(eps, &errors));
    Ok(McLeanReport {
        grid: beta.shape[0],
        eps: eps.to_vec(),
        errors,
        relative_errors,
        slope,
        dbeta_max,
        worst_point: beta.coords(worst.0),
        worst_triple: TRIPLES[worst.1],
    })
}

/// Constant field `ω_k` on the grid.
pub fn constant_self_dual(size: usize, k: usize) -> PeriodicField {
    let mut f = PeriodicField::zeros(&[size; 4], 3);
    for p in 0..f.points() {
        f.data[p * 3 + k] = 1.0;
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_is_self_dual() {
        // ⋆(e_p ∧ e_q) = e_r ∧ e_s for (p, q, r, s) an even permutation
        for k in 0..3 {
            for (p, q, r, s) in [(0, 1, 2, 3), (0, 2, 3, 1), (0, 3, 1, 2)] {
                assert_eq!(self_dual_entry(p, q, k), self_dual_entry(r, s, k));
            }
        }
    }

    #[test]
    fn constant_forms_have_zero_limit() {
        for k in 0..3 {
            let r = coassoc_deformation_linearization(&constant_self_dual(6, k), &[1e-2, 1e-3]).unwrap();
            assert!(r.dbeta_max < ZERO_FIELD);
            assert!(r.relative_errors.iter().all(|e| *e < 1e-12));
        }
    }

    #[test]
    fn zero_field_is_exact() {
        let r = coassoc_deformation_linearization(&PeriodicField::zeros(&[6; 4], 3), &[1e-2]).unwrap();
        assert_eq!(r.errors, vec![0.0]);
    }

    #[test]
    fn random_field_error_is_quadratic() {
        let beta = random_self_dual_field(8, 4);
        let r = coassoc_deformation_linearization(&beta, &[1e-2, 1e-3, 1e-4]).unwrap();
        assert!(r.final_relative_error() < 1e-3, "{r:?}");
        assert!((r.slope.unwrap() - 2.0).abs() < 0.2, "{r:?}");
    }

    #[test]
    fn limit_is_additive() {
        let b1 = random_self_dual_field(6, 1);
        let b2 = random_self_dual_field(6, 2);
        let mut sum = b1.clone();
        sum.axpy(1.0, &b2);
        let r1 = coassoc_deformation_linearization(&b1, &[1e-5]).unwrap();
        let r2 = coassoc_deformation_linearization(&b2, &[1e-5]).unwrap();
        let rs = coassoc_deformation_linearization(&sum, &[1e-5]).unwrap();
        // each limit agrees with the linear dβ, so the sum does as well
        assert!(rs.errors[0] <= 10.0 * (r1.errors[0] + r2.errors[0]) + 1e-9);
    }
}
