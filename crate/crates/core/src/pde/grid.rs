//! Uniform periodic grids with finite-difference and spectral derivatives.

use std::sync::Arc;

use num::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{Fft, FftPlanner};

use super::PdeError;

/// Support of the 4th-order central stencil.
pub const STENCIL_SUPPORT: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Derivative {
    FourthOrder,
    Spectral,
}

/// Samples of a vector-valued map on the torus `(ℝ/LZ)^d`, row-major with the last axis fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicField {
    pub shape: Vec<usize>,
    pub components: usize,
    pub period: f64,
    /// `data[point * components + c]`
    pub data: Vec<f64>,
}

impl PeriodicField {
    pub fn zeros(shape: &[usize], components: usize) -> Self {
        let n: usize = shape.iter().product();
        PeriodicField { shape: shape.to_vec(), components, period: std::f64::consts::TAU, data: vec![0.0; n * components] }
    }

    pub fn cube(dim: usize, size: usize, components: usize) -> Self {
        PeriodicField::zeros(&vec![size; dim], components)
    }

    pub fn points(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.period / self.shape[axis] as f64
    }

    pub fn at(&self, point: usize) -> &[f64] {
        &self.data[point * self.components..(point + 1) * self.components]
    }

    pub fn component(&self, c: usize) -> Vec<f64> {
        self.data.iter().skip(c).step_by(self.components).copied().collect()
    }

    pub fn set_component(&mut self, c: usize, values: &[f64]) {
        for (p, v) in values.iter().enumerate() {
            self.data[p * self.components + c] = *v;
        }
    }

    /// Multi-index of a flat point index.
    pub fn coords(&self, mut point: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            idx[a] = point % self.shape[a];
            point /= self.shape[a];
        }
        idx
    }

    fn stride(&self, axis: usize) -> usize {
        self.shape[axis + 1..].iter().product()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn mean(&self, c: usize) -> f64 {
        self.component(c).iter().sum::<f64>() / self.points() as f64
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut f = self.clone();
        f.data.iter_mut().for_each(|x| *x *= s);
        f
    }

    pub fn axpy(&mut self, a: f64, other: &PeriodicField) {
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += a * y;
        }
    }

    pub fn check_stencil(&self) -> Result<(), PdeError> {
        match self.shape.iter().find(|n| **n < STENCIL_SUPPORT) {
            Some(n) => Err(PdeError::GridTooSmall { size: *n, support: STENCIL_SUPPORT }),
            None => Ok(()),
        }
    }

    /// `∂/∂x_axis` of every component.
    pub fn derivative(&self, axis: usize, method: Derivative) -> PeriodicField {
        match method {
            Derivative::FourthOrder => self.fd4(axis),
            Derivative::Spectral => self.spectral(axis),
        }
    }

    fn fd4(&self, axis: usize) -> PeriodicField {
        let n = self.shape[axis];
        let stride = self.stride(axis);
        let h = self.spacing(axis);
        let mut out = self.clone();
        let comps = self.components;
        for p in 0..self.points() {
            let i = (p / stride) % n;
            let base = p - i * stride;
            let at = |k: isize| base + ((i as isize + k).rem_euclid(n as isize) as usize) * stride;
            for c in 0..comps {
                let v = |q: usize| self.data[q * comps + c];
                out.data[p * comps + c] = (8.0 * (v(at(1)) - v(at(-1))) - (v(at(2)) - v(at(-2)))) / (12.0 * h);
            }
        }
        out
    }

    fn spectral(&self, axis: usize) -> PeriodicField {
        let mut out = self.clone();
        let n = self.shape[axis];
        let k0 = std::f64::consts::TAU / self.period;
        for c in 0..self.components {
            let mut buf: Vec<Complex<f64>> = self.component(c).iter().map(|x| Complex::new(*x, 0.0)).collect();
            fft_axis(&mut buf, &self.shape, axis, false);
            let stride = self.stride(axis);
            for (p, z) in buf.iter_mut().enumerate() {
                let i = (p / stride) % n;
                let k = wavenumber(i, n) as f64;
                *z *= Complex::new(0.0, k * k0);
            }
            fft_axis(&mut buf, &self.shape, axis, true);
            let vals: Vec<f64> = buf.iter().map(|z| z.re).collect();
            out.set_component(c, &vals);
        }
        out
    }

    /// All first derivatives, indexed by axis.
    pub fn gradient(&self, method: Derivative) -> Vec<PeriodicField> {
        (0..self.dim()).map(|a| self.derivative(a, method)).collect()
    }
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut planner = FftPlanner::new();
    if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    }
}

/// In-place FFT along one axis; the inverse is normalized.
pub(crate) fn fft_axis(buf: &mut [Complex<f64>], shape: &[usize], axis: usize, inverse: bool) {
    let n = shape[axis];
    let stride: usize = shape[axis + 1..].iter().product();
    let fft = plan(n, inverse);
    let mut line = vec![Complex::new(0.0, 0.0); n];
    let total = buf.len();
    for start in 0..total {
        if !(start / stride).is_multiple_of(n) {
            continue;
        }
        for (i, z) in line.iter_mut().enumerate() {
            *z = buf[start + i * stride];
        }
        fft.process(&mut line);
        let s = if inverse { 1.0 / n as f64 } else { 1.0 };
        for (i, z) in line.iter().enumerate() {
            buf[start + i * stride] = *z * s;
        }
    }
}

pub(crate) fn fft_all(buf: &mut [Complex<f64>], shape: &[usize], inverse: bool) {
    for a in 0..shape.len() {
        fft_axis(buf, shape, a, inverse);
    }
}

/// Wavenumber of index `i` on an `n`-point axis, with the Nyquist index mapped to 0.
pub(crate) fn wavenumber(i: usize, n: usize) -> i64 {
    if 2 * i < n {
        i as i64
    } else if 2 * i == n {
        0
    } else {
        i as i64 - n as i64
    }
}

/// Real random field with Fourier modes `|k_a| ≤ kmax` on every axis, mean zero.
pub fn band_limited(shape: &[usize], components: usize, kmax: usize, seed: u64) -> PeriodicField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut field = PeriodicField::zeros(shape, components);
    let n: usize = shape.iter().product();
    for c in 0..components {
        let mut buf = vec![Complex::new(0.0, 0.0); n];
        for (p, z) in buf.iter_mut().enumerate() {
            let idx = field.coords(p);
            let inside = idx.iter().zip(shape).all(|(i, s)| {
                let k = wavenumber(*i, *s);
                k.unsigned_abs() as usize <= kmax && 2 * i != *s
            });
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            if inside && p != 0 {
                *z = Complex::new(re, im);
            }
        }
        fft_all(&mut buf, shape, true);
        let vals: Vec<f64> = buf.iter().map(|z| z.re).collect();
        field.set_component(c, &vals);
    }
    field
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine_field(n: usize) -> PeriodicField {
        let mut f = PeriodicField::cube(3, n, 1);
        for p in 0..f.points() {
            let x = f.coords(p);
            let h = f.spacing(0);
            f.data[p] = (2.0 * x[1] as f64 * h).sin();
        }
        f
    }

    #[test]
    fn derivatives_of_a_sine() {
        let f = sine_field(16);
        let exact = |p: usize| 2.0 * (2.0 * f.coords(p)[1] as f64 * f.spacing(0)).cos();
        let s = f.derivative(1, Derivative::Spectral);
        let d = f.derivative(1, Derivative::FourthOrder);
        let mut es: f64 = 0.0;
        let mut ed: f64 = 0.0;
        for p in 0..f.points() {
            es = es.max((s.data[p] - exact(p)).abs());
            ed = ed.max((d.data[p] - exact(p)).abs());
        }
        assert!(es < 1e-12);
        assert!(ed < 5e-2 && ed > 1e-5, "{ed}");
        assert!(f.derivative(0, Derivative::FourthOrder).max_abs() < 1e-12);
    }

    #[test]
    fn fourth_order_convergence() {
        let err = |n: usize| {
            let f = sine_field(n);
            let d = f.derivative(1, Derivative::FourthOrder);
            (0..f.points()).map(|p| (d.data[p] - 2.0 * (2.0 * f.coords(p)[1] as f64 * f.spacing(0)).cos()).abs()).fold(0.0, f64::max)
        };
        let order = (err(16) / err(32)).log2();
        assert!((order - 4.0).abs() < 0.3, "{order}");
    }

    #[test]
    fn band_limited_is_real_and_mean_free() {
        let f = band_limited(&[8, 8, 8], 2, 2, 3);
        assert!(f.max_abs() > 0.0);
        assert!(f.mean(0).abs() < 1e-12);
        let g = band_limited(&[8, 8, 8], 2, 2, 3);
        assert_eq!(f, g);
        assert!(PeriodicField::cube(3, 4, 1).check_stencil().is_err());
    }
}
