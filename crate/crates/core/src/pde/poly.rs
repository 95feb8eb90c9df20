//! Sparse multivariate polynomials over ℚ, and their compiled float form.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num::{Signed, Zero};

use crate::exact::{rat, to_f64, Rational};

/// Monomials are sorted variable lists with repetition.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly {
    terms: BTreeMap<Vec<usize>, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Poly::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn int(c: i64) -> Self {
        Poly::constant(rat(c))
    }

    pub fn var(v: usize) -> Self {
        let mut p = Poly::zero();
        p.add_term(vec![v], rat(1));
        p
    }

    fn add_term(&mut self, mut mono: Vec<usize>, c: Rational) {
        if c.is_zero() {
            return;
        }
        mono.sort_unstable();
        match self.terms.entry(mono) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        let mut p = Poly::zero();
        for (m, x) in &self.terms {
            p.add_term(m.clone(), x * c);
        }
        p
    }

    /// The homogeneous part of degree `d`.
    pub fn part(&self, d: usize) -> Poly {
        Poly { terms: self.terms.iter().filter(|(m, _)| m.len() == d).map(|(m, c)| (m.clone(), c.clone())).collect() }
    }

    /// Degrees that occur.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.terms.keys().map(Vec::len).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// Coefficient of the linear monomial `x_v`.
    pub fn linear_coefficient(&self, v: usize) -> Rational {
        self.terms.get(&vec![v]).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn evaluate(&self, x: &[Rational]) -> Rational {
        self.terms.iter().map(|(m, c)| m.iter().fold(c.clone(), |acc, v| acc * &x[*v])).sum()
    }

    /// Substitute `x_v ↦ images[v]`.
    pub fn substitute(&self, images: &[Poly]) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            for v in m {
                t = &t * &images[*v];
            }
            out = &out + &t;
        }
        out
    }

    pub fn max_abs_coefficient(&self) -> Rational {
        self.terms.values().map(Signed::abs).max().unwrap_or_else(Rational::zero)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let mut p = self.clone();
        for (m, c) in &o.terms {
            p.add_term(m.clone(), c.clone());
        }
        p
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self + &(-o)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        let mut p = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let mut m = m1.clone();
                m.extend_from_slice(m2);
                p.add_term(m, c1 * c2);
            }
        }
        p
    }
}

/// Determinant of a square matrix of polynomials by cofactor expansion.
pub(crate) fn poly_det(m: &[Vec<Poly>]) -> Poly {
    let n = m.len();
    match n {
        0 => Poly::int(1),
        1 => m[0][0].clone(),
        _ => {
            let mut total = Poly::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Poly>> = m[1..].iter().map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, p)| p.clone()).collect()).collect();
                let t = &m[0][j] * &poly_det(&minor);
                total = if j % 2 == 0 { &total + &t } else { &total - &t };
            }
            total
        }
    }
}

/// A vector-valued polynomial compiled to floats: `out[r] = Σ c · Π x_v`.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatPoly {
    pub outputs: usize,
    pub terms: Vec<(usize, f64, Vec<usize>)>,
}

impl FloatPoly {
    pub fn compile(polys: &[Poly]) -> Self {
        let terms = polys.iter().enumerate().flat_map(|(r, p)| p.terms().map(move |(m, c)| (r, to_f64(c), m.clone()))).collect();
        FloatPoly { outputs: polys.len(), terms }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.outputs];
        for (r, c, m) in &self.terms {
            out[*r] += m.iter().fold(*c, |acc, v| acc * x[*v]);
        }
        out
    }

    /// Directional derivative at `x` along `y`.
    pub fn directional(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.outputs];
        for (r, c, m) in &self.terms {
            for i in 0..m.len() {
                let mut t = *c * y[m[i]];
                for (j, v) in m.iter().enumerate() {
                    if j != i {
                        t *= x[*v];
                    }
                }
                out[*r] += t;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_parts() {
        let x = Poly::var(0);
        let y = Poly::var(1);
        let p = &(&x + &y) * &(&x - &y);
        assert_eq!(p, &(&x * &x) - &(&y * &y));
        assert_eq!(p.degrees(), vec![2]);
        let q = &p + &Poly::int(3);
        assert_eq!(q.part(0), Poly::int(3));
        assert_eq!(q.evaluate(&[rat(2), rat(1)]), rat(6));
    }

    #[test]
    fn determinant_and_derivative() {
        let m = vec![vec![Poly::var(0), Poly::var(1)], vec![Poly::var(2), Poly::var(3)]];
        let d = poly_det(&m);
        assert_eq!(d, &(&Poly::var(0) * &Poly::var(3)) - &(&Poly::var(1) * &Poly::var(2)));
        let f = FloatPoly::compile(&[d]);
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(f.eval(&x), vec![-2.0]);
        // d/dt det(x + t y) at 0 with y = e_0: x_3
        assert_eq!(f.directional(&x, &[1.0, 0.0, 0.0, 0.0]), vec![4.0]);
    }
}
