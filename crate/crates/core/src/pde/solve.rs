//! Damped Newton–GMRES for the graph equations on a periodic grid.

use nalgebra::{Complex, DMatrix};
use rayon::prelude::*;
use serde::Serialize;

use super::cross::{cross_product_table, graph_frame, plane_calibrated, CrossProductTable};
use super::grid::{band_limited, fft_all, wavenumber, Derivative, PeriodicField};
use super::{GraphKind, PdeError};
use crate::grassmann::{classify_plane, OrientedPlane, PlaneKind};

#[derive(Clone, Debug, Serialize)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub gmres_tol: f64,
    pub gmres_restart: usize,
    pub gmres_max_iter: usize,
    #[serde(skip)]
    pub method: Derivative,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-8, max_iter: 25, gmres_tol: 1e-10, gmres_restart: 40, gmres_max_iter: 400, method: Derivative::FourthOrder }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub residual: f64,
    pub step: f64,
    pub gmres_iterations: usize,
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub field: PeriodicField,
    pub trace: Vec<TraceRow>,
    pub iterations: usize,
    pub residual: f64,
    pub seed: u64,
}

impl SolveOutcome {
    pub fn trace_csv(&self) -> String {
        let mut s = String::from("iteration,residual,step,gmres_iterations\n");
        for r in &self.trace {
            s.push_str(&format!("{},{:e},{},{}\n", r.iteration, r.residual, r.step, r.gmres_iterations));
        }
        s
    }
}

/// Jet variables `∂_a f_c` at every point.
fn jet_vars(field: &PeriodicField, method: Derivative) -> Vec<Vec<f64>> {
    let grad = field.gradient(method);
    let t = field.components;
    (0..field.points())
        .map(|p| {
            let mut v = Vec::with_capacity(grad.len() * t);
            for g in &grad {
                v.extend_from_slice(g.at(p));
            }
            v
        })
        .collect()
}

pub fn residual_field(table: &CrossProductTable, field: &PeriodicField, method: Derivative) -> PeriodicField {
    let vars = jet_vars(field, method);
    let mut out = PeriodicField::zeros(&field.shape, 4);
    out.period = field.period;
    out.data.par_chunks_mut(4).zip(vars.par_iter()).for_each(|(o, v)| o.copy_from_slice(&table.residual_of(v).0));
    out
}

fn linearized_field(table: &CrossProductTable, vars: &[Vec<f64>], dir: &PeriodicField, method: Derivative) -> PeriodicField {
    let dvars = jet_vars(dir, method);
    let mut out = PeriodicField::zeros(&dir.shape, 4);
    out.period = dir.period;
    out.data.par_chunks_mut(4).enumerate().for_each(|(p, o)| o.copy_from_slice(&table.linearized(&vars[p], &dvars[p]).0));
    out
}

/// Pseudo-inverse of the constant-coefficient Dirac part, diagonal in Fourier space.
struct DiracPreconditioner {
    shape: Vec<usize>,
    period: f64,
    inverses: Vec<Option<DMatrix<Complex<f64>>>>,
}

impl DiracPreconditioner {
    fn new(table: &CrossProductTable, shape: &[usize], period: f64, method: Derivative) -> Self {
        let blocks = table.dirac_blocks();
        let probe = PeriodicField::zeros(shape, 1);
        let inverses = (0..probe.points())
            .map(|p| {
                let idx = probe.coords(p);
                let symbols: Vec<f64> = idx
                    .iter()
                    .enumerate()
                    .map(|(a, i)| {
                        let n = shape[a];
                        let k = wavenumber(*i, n) as f64 * std::f64::consts::TAU / period;
                        let h = period / n as f64;
                        match method {
                            Derivative::Spectral => k,
                            Derivative::FourthOrder => (8.0 * (k * h).sin() - (2.0 * k * h).sin()) / (6.0 * h),
                        }
                    })
                    .collect();
                let norm2: f64 = symbols.iter().map(|s| s * s).sum();
                if norm2 < 1e-12 {
                    return None;
                }
                let s = DMatrix::from_fn(4, 4, |r, c| Complex::new(0.0, symbols.iter().zip(&blocks).map(|(sa, b)| sa * b[(r, c)]).sum::<f64>()));
                s.try_inverse()
            })
            .collect();
        DiracPreconditioner { shape: shape.to_vec(), period, inverses }
    }

    fn apply(&self, r: &PeriodicField) -> PeriodicField {
        let n = r.points();
        let mut bufs: Vec<Vec<Complex<f64>>> = (0..4).map(|c| r.component(c).iter().map(|x| Complex::new(*x, 0.0)).collect()).collect();
        for b in &mut bufs {
            fft_all(b, &self.shape, false);
        }
        let mut out_bufs = vec![vec![Complex::new(0.0, 0.0); n]; 4];
        for p in 0..n {
            if let Some(inv) = &self.inverses[p] {
                for row in 0..4 {
                    out_bufs[row][p] = (0..4).map(|c| inv[(row, c)] * bufs[c][p]).sum();
                }
            }
        }
        let mut out = PeriodicField::zeros(&self.shape, 4);
        out.period = self.period;
        for (c, b) in out_bufs.iter_mut().enumerate() {
            fft_all(b, &self.shape, true);
            out.set_component(c, &b.iter().map(|z| z.re).collect::<Vec<_>>());
        }
        out
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Restarted GMRES for `A x = b` from `x = 0`; returns `(x, iterations, relative residual)`.
pub(crate) fn gmres(op: impl Fn(&[f64]) -> Vec<f64>, b: &[f64], tol: f64, restart: usize, max_iter: usize) -> (Vec<f64>, usize, f64) {
    let n = b.len();
    let mut x = vec![0.0; n];
    let bnorm = norm(b);
    if bnorm == 0.0 {
        return (x, 0, 0.0);
    }
    let mut total = 0;
    let mut rel = 1.0;
    while total < max_iter {
        let ax = op(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
        let beta = norm(&r);
        rel = beta / bnorm;
        if rel < tol {
            break;
        }
        let mut v: Vec<Vec<f64>> = vec![r.iter().map(|z| z / beta).collect()];
        let mut h = vec![vec![0.0; restart]; restart + 1];
        let (mut cs, mut sn) = (vec![0.0; restart], vec![0.0; restart]);
        let mut g = vec![0.0; restart + 1];
        g[0] = beta;
        let mut k = 0;
        while k < restart && total < max_iter {
            let mut w = op(&v[k]);
            for j in 0..=k {
                h[j][k] = dot(&w, &v[j]);
                for (wi, vi) in w.iter_mut().zip(&v[j]) {
                    *wi -= h[j][k] * vi;
                }
            }
            h[k + 1][k] = norm(&w);
            for j in 0..k {
                let t = cs[j] * h[j][k] + sn[j] * h[j + 1][k];
                h[j + 1][k] = -sn[j] * h[j][k] + cs[j] * h[j + 1][k];
                h[j][k] = t;
            }
            let d = (h[k][k].powi(2) + h[k + 1][k].powi(2)).sqrt();
            if d == 0.0 {
                break;
            }
            cs[k] = h[k][k] / d;
            sn[k] = h[k + 1][k] / d;
            h[k][k] = d;
            let hk1 = h[k + 1][k];
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            total += 1;
            let next: Vec<f64> = if hk1 > 0.0 { w.iter().map(|z| z / hk1).collect() } else { vec![0.0; n] };
            v.push(next);
            k += 1;
            rel = g[k].abs() / bnorm;
            if rel < tol || hk1 == 0.0 {
                break;
            }
        }
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let s: f64 = (i + 1..k).map(|j| h[i][j] * y[j]).sum();
            y[i] = (g[i] - s) / h[i][i];
        }
        for (i, yi) in y.iter().enumerate() {
            for (xj, vj) in x.iter_mut().zip(&v[i]) {
                *xj += yi * vj;
            }
        }
        if rel < tol {
            break;
        }
    }
    (x, total, rel)
}

/// Smooth initial data: a band-limited field with `max |∂f| = eps`.
pub fn initial_data(kind: GraphKind, size: usize, eps: f64, seed: u64) -> PeriodicField {
    let f = band_limited(&vec![size; kind.base_dim()], kind.target_dim(), 2, seed);
    let c1 = f.gradient(Derivative::Spectral).iter().map(PeriodicField::max_abs).fold(0.0, f64::max);
    f.scaled(if c1 > 0.0 { eps / c1 } else { 0.0 })
}

/// Newton iteration `f ← f + t δ` with `J δ = −R`, `δ` gauge-fixed by the preconditioner's range.
pub fn solve_graph(initial: &PeriodicField, kind: GraphKind, opts: &SolverOptions, seed: u64) -> Result<SolveOutcome, PdeError> {
    if kind == GraphKind::Coassociative {
        return Err(PdeError::UnsupportedKind(kind));
    }
    if initial.components != 4 || initial.dim() != kind.base_dim() {
        return Err(PdeError::Input(format!("{kind} needs a {}-dimensional grid with 4 components", kind.base_dim())));
    }
    initial.check_stencil()?;
    let table = cross_product_table(kind)?;
    let pre = DiracPreconditioner::new(table, &initial.shape, initial.period, opts.method);
    let mut f = initial.clone();
    let mut r = residual_field(table, &f, opts.method);
    let mut rmax = r.max_abs();
    let mut trace = vec![TraceRow { iteration: 0, residual: rmax, step: 0.0, gmres_iterations: 0 }];
    if !rmax.is_finite() {
        return Err(PdeError::Diverged { iteration: 0, residual: rmax });
    }
    let mut it = 0;
    while rmax >= opts.tol {
        if it == opts.max_iter {
            return Err(PdeError::NotConverged { iterations: it, residual: rmax });
        }
        it += 1;
        let vars = jet_vars(&f, opts.method);
        let shaped = |data: &[f64]| {
            let mut v = PeriodicField::zeros(&f.shape, 4);
            v.period = f.period;
            v.data.copy_from_slice(data);
            v
        };
        let op = |y: &[f64]| linearized_field(table, &vars, &pre.apply(&shaped(y)), opts.method).data;
        let rhs: Vec<f64> = r.data.iter().map(|x| -x).collect();
        let (y, gm_iters, _) = gmres(op, &rhs, opts.gmres_tol, opts.gmres_restart, opts.gmres_max_iter);
        let delta = pre.apply(&shaped(&y));
        if !delta.data.iter().all(|x| x.is_finite()) {
            return Err(PdeError::Singular(it));
        }
        let mut t = 1.0;
        loop {
            let mut trial = f.clone();
            trial.axpy(t, &delta);
            let rt = residual_field(table, &trial, opts.method);
            let m = rt.max_abs();
            if m.is_finite() && m <= (1.0 - 1e-4 * t) * rmax {
                f = trial;
                r = rt;
                rmax = m;
                break;
            }
            t *= 0.5;
            if t < 1.0 / 1024.0 {
                return Err(PdeError::Diverged { iteration: it, residual: rmax });
            }
        }
        trace.push(TraceRow { iteration: it, residual: rmax, step: t, gmres_iterations: gm_iters });
    }
    Ok(SolveOutcome { field: f, trace, iterations: it, residual: rmax, seed })
}

/// `(points classified calibrated, total points, worst calibrating value)` for the pointwise graph planes.
pub fn graph_planes_calibrated(field: &PeriodicField, kind: GraphKind, tol: f64, method: Derivative) -> (usize, usize, f64) {
    let vars = jet_vars(field, method);
    let results: Vec<(bool, f64)> = vars
        .par_iter()
        .map(|v| {
            let cols = graph_frame(kind, v);
            let plane = OrientedPlane::from_columns(kind.ambient_dim(), &cols).expect("graph frames are independent");
            match kind {
                GraphKind::Associative => {
                    let c = classify_plane(&plane, tol).expect("(7, 3)");
                    (c.kind == PlaneKind::Associative, c.value)
                }
                _ => {
                    let ok = plane_calibrated(kind, &plane, tol);
                    (ok, if ok { 1.0 } else { 0.0 })
                }
            }
        })
        .collect();
    let ok = results.iter().filter(|r| r.0).count();
    let worst = results.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    (ok, results.len(), worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gmres_solves_a_small_system() {
        let a = [[4.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 2.0]];
        let op = |x: &[f64]| (0..3).map(|i| (0..3).map(|j| a[i][j] * x[j]).sum()).collect();
        let (x, _, rel) = gmres(op, &[1.0, 2.0, 3.0], 1e-12, 3, 30);
        assert!(rel < 1e-12);
        let ax: Vec<f64> = (0..3).map(|i| (0..3).map(|j| a[i][j] * x[j]).sum()).collect();
        for (p, q) in ax.iter().zip([1.0, 2.0, 3.0]) {
            assert!((p - q).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_initial_data_is_a_solution() {
        let f = PeriodicField::cube(3, 8, 4);
        let out = solve_graph(&f, GraphKind::Associative, &SolverOptions::default(), 0).unwrap();
        assert_eq!(out.iterations, 0);
        assert_eq!(out.residual, 0.0);
        assert_eq!(out.field, f);
    }

    #[test]
    fn small_data_converges_on_a_coarse_grid() {
        let f = initial_data(GraphKind::Associative, 8, 1e-2, 1);
        let out = solve_graph(&f, GraphKind::Associative, &SolverOptions::default(), 1).unwrap();
        assert!(out.residual < 1e-8);
        assert!(out.iterations <= 25);
    }
}
