//! Graph equations for associative, coassociative and Cayley submanifolds of
//! flat models: derived cross products, pointwise residuals, Dirac
//! linearizations, a periodic Newton solver and the flat deformation check.

mod cross;
mod grid;
mod mclean;
mod poly;
mod solve;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cross::{
    associative_residual, cayley_residual, coassociative_residual, cross_product_table, derive_cross_products, dirac_linearization_check, exact_residual,
    graph_plane, is_alternating, jet_from_plane, loglog_slope, plane_calibrated, random_jet, residual, residual_oracle_agreement, AgreementReport,
    CrossProductTable, Identification, LinearizationReport,
};
pub use grid::{band_limited, Derivative, PeriodicField};
pub use mclean::{coassoc_deformation_linearization, constant_self_dual, random_self_dual_field, McLeanReport};
pub use poly::{FloatPoly, Poly};
pub use solve::{graph_planes_calibrated, initial_data, residual_field, solve_graph, SolveOutcome, SolverOptions, TraceRow};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PdeError {
    #[error("elimination inconsistent for {kind}: no quaternionic identification reproduces the linear part")]
    Inconsistent { kind: GraphKind },
    #[error("jet shape: expected {expected_partials} partials of length {expected_len}")]
    JetShape { expected_partials: usize, expected_len: usize },
    #[error("chi + self-intersection = {0} is odd; the index formula is not integral")]
    Parity(i64),
    #[error("newton iteration diverged at iteration {iteration} (residual {residual:e})")]
    Diverged { iteration: usize, residual: f64 },
    #[error("newton iteration did not reach tolerance in {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("singular linearization at iteration {0}")]
    Singular(usize),
    #[error("grid of size {size} is smaller than the stencil support {support}")]
    GridTooSmall { size: usize, support: usize },
    #[error("unsupported kind {0} for this operation")]
    UnsupportedKind(GraphKind),
    #[error("bad input: {0}")]
    Input(String),
}

/// Which graph equation: `ℝ³ → ℍ`, `ℍ → ℝ³` or `ℍ → ℍ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphKind {
    #[serde(alias = "assoc")]
    Associative,
    #[serde(alias = "coassoc")]
    Coassociative,
    Cayley,
}

impl GraphKind {
    pub const ALL: [GraphKind; 3] = [GraphKind::Associative, GraphKind::Coassociative, GraphKind::Cayley];

    /// Number of base coordinates.
    pub fn base_dim(self) -> usize {
        match self {
            GraphKind::Associative => 3,
            _ => 4,
        }
    }

    /// Number of components of the unknown map.
    pub fn target_dim(self) -> usize {
        match self {
            GraphKind::Coassociative => 3,
            _ => 4,
        }
    }

    pub fn ambient_dim(self) -> usize {
        self.base_dim() + self.target_dim()
    }

    /// Number of jet variables `∂_a f_c`.
    pub fn jet_vars(self) -> usize {
        self.base_dim() * self.target_dim()
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "assoc" | "associative" => Some(GraphKind::Associative),
            "coassoc" | "coassociative" => Some(GraphKind::Coassociative),
            "cayley" => Some(GraphKind::Cayley),
            _ => None,
        }
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GraphKind::Associative => "associative",
            GraphKind::Coassociative => "coassociative",
            GraphKind::Cayley => "cayley",
        };
        write!(f, "{s}")
    }
}

/// `a + b i + c j + d k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Quaternion(pub [f64; 4]);

impl Quaternion {
    pub const ONE: Quaternion = Quaternion([1.0, 0.0, 0.0, 0.0]);
    pub const I: Quaternion = Quaternion([0.0, 1.0, 0.0, 0.0]);
    pub const J: Quaternion = Quaternion([0.0, 0.0, 1.0, 0.0]);
    pub const K: Quaternion = Quaternion([0.0, 0.0, 0.0, 1.0]);

    pub fn conj(self) -> Self {
        let [a, b, c, d] = self.0;
        Quaternion([a, -b, -c, -d])
    }

    pub fn norm(self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn scale(self, s: f64) -> Self {
        Quaternion(self.0.map(|x| x * s))
    }
}

/// Integer table of the quaternion product: `e_p e_q = sign · e_r`.
pub(crate) fn quaternion_product_table() -> [[(usize, i64); 4]; 4] {
    [[(0, 1), (1, 1), (2, 1), (3, 1)], [(1, 1), (0, -1), (3, 1), (2, -1)], [(2, 1), (3, -1), (0, -1), (1, 1)], [(3, 1), (2, 1), (1, -1), (0, -1)]]
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, o: Quaternion) -> Quaternion {
        let mut out = [0.0; 4];
        for (p, row) in quaternion_product_table().iter().enumerate() {
            for (q, (r, s)) in row.iter().enumerate() {
                out[*r] += *s as f64 * self.0[p] * o.0[q];
            }
        }
        Quaternion(out)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion(self.0.map(|x| -x))
    }
}

/// First-order jet of a map at a base point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Jet1 {
    pub kind: GraphKind,
    #[serde(default)]
    pub base: Vec<f64>,
    #[serde(default)]
    pub value: Vec<f64>,
    /// `partials[a]` is `∂f/∂x_a`.
    pub partials: Vec<Vec<f64>>,
}

impl Jet1 {
    pub fn new(kind: GraphKind, partials: Vec<Vec<f64>>) -> Result<Self, PdeError> {
        let jet = Jet1 { kind, base: vec![0.0; kind.base_dim()], value: vec![0.0; kind.target_dim()], partials };
        jet.validate()?;
        Ok(jet)
    }

    pub fn zero(kind: GraphKind) -> Self {
        Jet1::new(kind, vec![vec![0.0; kind.target_dim()]; kind.base_dim()]).expect("shape")
    }

    pub fn validate(&self) -> Result<(), PdeError> {
        let (b, t) = (self.kind.base_dim(), self.kind.target_dim());
        let shape_ok = self.partials.len() == b
            && self.partials.iter().all(|p| p.len() == t)
            && (self.base.is_empty() || self.base.len() == b)
            && (self.value.is_empty() || self.value.len() == t);
        if shape_ok {
            Ok(())
        } else {
            Err(PdeError::JetShape { expected_partials: b, expected_len: t })
        }
    }

    /// Jet variables in the order `∂_a f_c ↦ a·target_dim + c`.
    pub fn variables(&self) -> Vec<f64> {
        self.partials.iter().flatten().copied().collect()
    }

    pub fn scaled(&self, eps: f64) -> Self {
        let mut j = self.clone();
        for p in &mut j.partials {
            for x in p.iter_mut() {
                *x *= eps;
            }
        }
        j.value.iter_mut().for_each(|x| *x *= eps);
        j
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyInvariants {
    pub signature: i64,
    pub euler: i64,
    pub self_intersection: i64,
}

/// `τ − χ/2 − [N]·[N]/2`.
pub fn dirac_index(inv: TopologyInvariants) -> Result<i64, PdeError> {
    let s = inv.euler + inv.self_intersection;
    if s.rem_euclid(2) != 0 {
        return Err(PdeError::Parity(s));
    }
    Ok(inv.signature - s / 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quaternion_relations() {
        let (i, j, k) = (Quaternion::I, Quaternion::J, Quaternion::K);
        assert_eq!(i * i, -Quaternion::ONE);
        assert_eq!(j * j, -Quaternion::ONE);
        assert_eq!(k * k, -Quaternion::ONE);
        assert_eq!(i * j, k);
        assert_eq!(j * k, i);
        assert_eq!(k * i, j);
        let a = Quaternion([0.3, -1.2, 2.0, 0.7]);
        let b = Quaternion([1.1, 0.4, -0.5, 2.2]);
        let c = Quaternion([-0.9, 0.1, 0.6, -1.4]);
        assert!(((a * b) * c - a * (b * c)).max_abs() < 1e-14);
        assert!(((a * b).norm() - a.norm() * b.norm()).abs() < 1e-13);
        assert!(((a * b).conj() - b.conj() * a.conj()).max_abs() < 1e-15);
    }

    #[test]
    fn index_examples() {
        let idx = |t, c, s| dirac_index(TopologyInvariants { signature: t, euler: c, self_intersection: s });
        assert_eq!(idx(0, 0, 0), Ok(0));
        assert_eq!(idx(0, 2, 0), Ok(-1));
        assert_eq!(idx(-16, 24, 0), Ok(-28));
        assert_eq!(idx(0, 3, 0), Err(PdeError::Parity(3)));
        assert_eq!(idx(1, 1, 1), Ok(0));
    }

    #[test]
    fn jet_shape_is_checked() {
        assert!(Jet1::new(GraphKind::Associative, vec![vec![0.0; 4]; 3]).is_ok());
        assert!(Jet1::new(GraphKind::Coassociative, vec![vec![0.0; 4]; 3]).is_err());
        assert_eq!(Jet1::zero(GraphKind::Cayley).variables().len(), 16);
    }
}
