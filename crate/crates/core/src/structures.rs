//! The model forms of G₂, Spin(7) and SU(m) geometry, the product-structure
//! identities relating them, and their stabilizer Lie algebras in so(n).
//!
//! Complex coordinates on ℝ²ᵐ are `z_j = x_{2j-1} + i x_{2j}` unless a
//! [`ComplexChart`] says otherwise.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::exact::{self, frac, rat, Matrix, Rational};
use crate::exterior::{ExteriorForm, LinearEndo, Monomial};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    G2Phi,
    G2StarPhi,
    Spin7Omega,
    /// Kähler form on ℂᵐ, m in 2..=4.
    KaehlerOmega(usize),
    ReTheta(usize),
    ImTheta(usize),
    /// `dx_1 ∧ … ∧ dx_n`.
    Volume(usize),
}

const PHI_TERMS: [(&[usize], i64); 7] =
    [(&[1, 2, 3], 1), (&[1, 4, 5], 1), (&[1, 6, 7], 1), (&[2, 4, 6], 1), (&[2, 5, 7], -1), (&[3, 4, 7], -1), (&[3, 5, 6], -1)];

const STAR_PHI_TERMS: [(&[usize], i64); 7] =
    [(&[4, 5, 6, 7], 1), (&[2, 3, 6, 7], 1), (&[2, 3, 4, 5], 1), (&[1, 3, 5, 7], 1), (&[1, 3, 4, 6], -1), (&[1, 2, 5, 6], -1), (&[1, 2, 4, 7], -1)];

const OMEGA_TERMS: [(&[usize], i64); 14] = [
    (&[1, 2, 3, 4], 1),
    (&[1, 2, 5, 6], 1),
    (&[1, 2, 7, 8], 1),
    (&[1, 3, 5, 7], 1),
    (&[1, 3, 6, 8], -1),
    (&[1, 4, 5, 8], -1),
    (&[1, 4, 6, 7], -1),
    (&[2, 3, 5, 8], -1),
    (&[2, 3, 6, 7], -1),
    (&[2, 4, 5, 7], -1),
    (&[2, 4, 6, 8], 1),
    (&[3, 4, 5, 6], 1),
    (&[3, 4, 7, 8], 1),
    (&[5, 6, 7, 8], 1),
];

/// Panics on `m` outside 2..=4 or `n` outside 1..=8.
pub fn model_form(kind: ModelKind) -> ExteriorForm {
    match kind {
        ModelKind::G2Phi => ExteriorForm::from_int_terms(7, &PHI_TERMS),
        ModelKind::G2StarPhi => ExteriorForm::from_int_terms(7, &STAR_PHI_TERMS),
        ModelKind::Spin7Omega => ExteriorForm::from_int_terms(8, &OMEGA_TERMS),
        ModelKind::KaehlerOmega(m) => {
            assert!((2..=4).contains(&m), "complex dimension {m} outside 2..=4");
            Ok(ComplexChart::standard(2 * m, 0, m).kaehler_form())
        }
        ModelKind::ReTheta(m) => {
            assert!((2..=4).contains(&m), "complex dimension {m} outside 2..=4");
            Ok(ComplexChart::standard(2 * m, 0, m).holomorphic_volume().0)
        }
        ModelKind::ImTheta(m) => {
            assert!((2..=4).contains(&m), "complex dimension {m} outside 2..=4");
            Ok(ComplexChart::standard(2 * m, 0, m).holomorphic_volume().1)
        }
        ModelKind::Volume(n) => ExteriorForm::from_terms(n, n, [((1..=n).collect(), rat(1))]),
    }
    .expect("model forms are well formed")
}

/// Complex coordinates `z_j = y_{o+2j-1} + i y_{o+2j}` (j = 1..=m) where
/// `y = P x` for an invertible real change of basis `P` on ℝⁿ.
#[derive(Clone, Debug)]
pub struct ComplexChart {
    basis_change: LinearEndo,
    offset: usize,
    complex_dim: usize,
}

impl ComplexChart {
    pub fn new(basis_change: LinearEndo, offset: usize, complex_dim: usize) -> Self {
        assert!(offset + 2 * complex_dim <= basis_change.dim());
        ComplexChart { basis_change, offset, complex_dim }
    }

    pub fn standard(n: usize, offset: usize, complex_dim: usize) -> Self {
        Self::new(LinearEndo::identity(n), offset, complex_dim)
    }

    /// `(w_1, …, w_4) = (-x_1 + i x_3, x_2 + i x_4, -x_5 + i x_7, x_6 + i x_8)` on ℝ⁸.
    pub fn swapped_w() -> Self {
        let rows = vec![
            vec![-1, 0, 0, 0, 0, 0, 0, 0],
            vec![0, 0, 1, 0, 0, 0, 0, 0],
            vec![0, 1, 0, 0, 0, 0, 0, 0],
            vec![0, 0, 0, 1, 0, 0, 0, 0],
            vec![0, 0, 0, 0, -1, 0, 0, 0],
            vec![0, 0, 0, 0, 0, 0, 1, 0],
            vec![0, 0, 0, 0, 0, 1, 0, 0],
            vec![0, 0, 0, 0, 0, 0, 0, 1],
        ];
        Self::new(LinearEndo::from_integers(&rows).expect("8x8"), 0, 4)
    }

    pub fn dim(&self) -> usize {
        self.basis_change.dim()
    }

    pub fn complex_dim(&self) -> usize {
        self.complex_dim
    }

    pub fn basis_change(&self) -> &LinearEndo {
        &self.basis_change
    }

    fn dy(&self, index: usize) -> ExteriorForm {
        ExteriorForm::basis_one_form(self.dim(), index).expect("index in range")
    }

    fn pulled(&self, f: ExteriorForm) -> ExteriorForm {
        f.pullback(&self.basis_change).expect("same dimension")
    }

    /// `ω = (i/2) Σ dz_j ∧ dz̄_j = Σ dRe z_j ∧ dIm z_j`.
    pub fn kaehler_form(&self) -> ExteriorForm {
        let mut w = ExteriorForm::zero(self.dim(), 2).expect("n >= 2");
        for j in 0..self.complex_dim {
            let a = self.offset + 2 * j + 1;
            let t = self.dy(a).wedge(&self.dy(a + 1)).expect("degree fits");
            w = &w + &t;
        }
        self.pulled(w)
    }

    /// `(Re θ, Im θ)` for `θ = dz_1 ∧ … ∧ dz_m`.
    pub fn holomorphic_volume(&self) -> (ExteriorForm, ExteriorForm) {
        let n = self.dim();
        let mut re = ExteriorForm::scalar(n, rat(1)).expect("n >= 1");
        let mut im = ExteriorForm::zero(n, 0).expect("n >= 1");
        for j in 0..self.complex_dim {
            let a = self.offset + 2 * j + 1;
            let (c, d) = (self.dy(a), self.dy(a + 1));
            let new_re = &re.wedge(&c).unwrap() - &im.wedge(&d).unwrap();
            let new_im = &re.wedge(&d).unwrap() + &im.wedge(&c).unwrap();
            re = new_re;
            im = new_im;
        }
        (self.pulled(re), self.pulled(im))
    }
}

/// One exact form identity and whether it came out as expected.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub anchor: String,
    /// `false` marks a negative control that must come out unequal.
    pub expect_equal: bool,
    pub equal: bool,
    pub lhs: String,
    pub rhs: String,
}

impl IdentityCheck {
    pub fn new(name: &str, anchor: &str, expect_equal: bool, lhs: &ExteriorForm, rhs: &ExteriorForm) -> Self {
        IdentityCheck { name: name.to_string(), anchor: anchor.to_string(), expect_equal, equal: lhs == rhs, lhs: lhs.to_string(), rhs: rhs.to_string() }
    }

    pub fn passed(&self) -> bool {
        self.equal == self.expect_equal
    }
}

fn dx(n: usize, idx: &[usize]) -> ExteriorForm {
    ExteriorForm::monomial(n, idx, rat(1)).expect("valid monomial")
}

/// φ on ℝ³ × ℂ² built from a Calabi–Yau 2-fold on coordinates x₄..x₇.
pub fn three_plus_four_phi() -> ExteriorForm {
    let chart = ComplexChart::standard(7, 3, 2);
    let omega = chart.kaehler_form();
    let (re, im) = chart.holomorphic_volume();
    let terms = [dx(7, &[1, 2, 3]), dx(7, &[1]).wedge(&omega).unwrap(), dx(7, &[2]).wedge(&re).unwrap(), -&dx(7, &[3]).wedge(&im).unwrap()];
    terms.iter().skip(1).fold(terms[0].clone(), |a, b| &a + b)
}

/// The claimed Hodge dual of [`three_plus_four_phi`].
pub fn three_plus_four_star_phi() -> ExteriorForm {
    let chart = ComplexChart::standard(7, 3, 2);
    let omega = chart.kaehler_form();
    let (re, im) = chart.holomorphic_volume();
    let terms = [
        omega.wedge(&omega).unwrap().scale(&frac(1, 2)),
        dx(7, &[2, 3]).wedge(&omega).unwrap(),
        -&dx(7, &[1, 3]).wedge(&re).unwrap(),
        -&dx(7, &[1, 2]).wedge(&im).unwrap(),
    ];
    terms.iter().skip(1).fold(terms[0].clone(), |a, b| &a + b)
}

/// `½ ω∧ω + Re θ` in the given 4-dimensional complex chart.
pub fn spin7_from_su4(chart: &ComplexChart) -> ExteriorForm {
    let omega = chart.kaehler_form();
    let (re, _) = chart.holomorphic_volume();
    &omega.wedge(&omega).unwrap().scale(&frac(1, 2)) + &re
}

pub fn verify_product_structures() -> Vec<IdentityCheck> {
    let phi = model_form(ModelKind::G2Phi);
    let star_phi = model_form(ModelKind::G2StarPhi);
    let omega0 = model_form(ModelKind::Spin7Omega);

    // ℝ ⊕ ℂ³ with z = (x2 + i x3, x4 + i x5, x6 + i x7)
    let c3 = ComplexChart::standard(7, 1, 3);
    let w3 = c3.kaehler_form();
    let (re3, im3) = c3.holomorphic_volume();
    let dx1 = dx(7, &[1]);
    let su3_phi = &dx1.wedge(&w3).unwrap() + &re3;
    let su3_star = &w3.wedge(&w3).unwrap().scale(&frac(1, 2)) - &dx1.wedge(&im3).unwrap();
    let flipped = &dx1.wedge(&w3).unwrap() - &re3;

    let z_chart = ComplexChart::standard(8, 0, 4);
    let w_chart = ComplexChart::swapped_w();

    let mut checks = vec![
        IdentityCheck::new("hodge star of the G2 3-form", "star(phi0) equals the listed 7-term 4-form", true, &phi.hodge_star(), &star_phi),
        IdentityCheck::new("SU(3) inside G2: 3-form", "phi0 = dx1 ^ omega0 + Re theta0 on R + C^3", true, &su3_phi, &phi),
        IdentityCheck::new("SU(3) inside G2: 4-form", "star phi0 = 1/2 omega0^omega0 - dx1 ^ Im theta0 on R + C^3", true, &su3_star, &star_phi),
        IdentityCheck::new("SU(2) inside G2: 3-form", "phi = dx123 + dx1^omega + dx2^Re theta - dx3^Im theta on R^3 x C^2", true, &three_plus_four_phi(), &phi),
        IdentityCheck::new(
            "SU(2) inside G2: Hodge dual",
            "star(phi) = 1/2 omega^omega + dx23^omega - dx13^Re theta - dx12^Im theta",
            true,
            &three_plus_four_phi().hodge_star(),
            &three_plus_four_star_phi(),
        ),
        IdentityCheck::new(
            "SU(4) inside Spin(7), z-coordinates",
            "Omega0 = 1/2 omega0^omega0 + Re theta0 with z = (x1+ix2, x3+ix4, x5+ix6, x7+ix8)",
            true,
            &spin7_from_su4(&z_chart),
            &omega0,
        ),
        IdentityCheck::new(
            "SU(4) inside Spin(7), w-coordinates",
            "Omega0 = 1/2 omega0^omega0 + Re theta0 with w = (-x1+ix3, x2+ix4, -x5+ix7, x6+ix8)",
            true,
            &spin7_from_su4(&w_chart),
            &omega0,
        ),
        IdentityCheck::new("negative control: sign-flipped Re theta", "dx1 ^ omega0 - Re theta0 must differ from phi0", false, &flipped, &phi),
    ];
    // the metric is unchanged by the w-chart iff its change of basis is orthogonal
    let orth = w_chart.basis_change().is_orthogonal();
    checks.push(IdentityCheck {
        name: "w-coordinates preserve g0".into(),
        anchor: "g0 = |dw1|^2 + ... + |dw4|^2".into(),
        expect_equal: true,
        equal: orth,
        lhs: format!("orthogonal change of basis: {orth}"),
        rhs: "true".into(),
    });
    checks
}

/// `L_A(a) = -Σ_slots a(…, A·, …)`, the derivative at t = 0 of the action of
/// `exp(tA)` on forms.
pub fn infinitesimal_action(form: &ExteriorForm, a: &Matrix) -> ExteriorForm {
    let n = form.dim();
    let mut out = ExteriorForm::zero(n, form.degree()).expect("same shape");
    for (m, c) in form.terms() {
        let pos = m.positions();
        for slot in 0..pos.len() {
            for j in 0..n {
                let coeff = &a[pos[slot]][j];
                if coeff.is_zero() {
                    continue;
                }
                let mut idx: Vec<usize> = pos.iter().map(|p| p + 1).collect();
                idx[slot] = j + 1;
                let t = ExteriorForm::monomial(n, &idx, -(c * coeff)).expect("valid");
                out = &out + &t;
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct StabilizerAlgebra {
    pub form: ExteriorForm,
    pub dimension: usize,
    /// Antisymmetric n×n matrices spanning the algebra.
    pub basis: Vec<Matrix>,
}

fn elementary_antisymmetric(n: usize, i: usize, j: usize) -> Matrix {
    let mut e = exact::zeros(n, n);
    e[i][j] = rat(1);
    e[j][i] = rat(-1);
    e
}

/// Exact kernel of `A ↦ L_A(form)` on antisymmetric matrices.
pub fn stabilizer_algebra(form: &ExteriorForm) -> StabilizerAlgebra {
    let n = form.dim();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let images: Vec<ExteriorForm> = pairs.iter().map(|&(i, j)| infinitesimal_action(form, &elementary_antisymmetric(n, i, j))).collect();
    let mut rows_by_monomial: BTreeMap<Monomial, Vec<Rational>> = BTreeMap::new();
    for (col, img) in images.iter().enumerate() {
        for (m, c) in img.terms() {
            rows_by_monomial.entry(m).or_insert_with(|| vec![Rational::zero(); pairs.len()])[col] = c.clone();
        }
    }
    let system: Matrix = rows_by_monomial.into_values().collect();
    let kernel = exact::nullspace(&system, pairs.len());
    let basis = kernel
        .iter()
        .map(|v| {
            let mut a = exact::zeros(n, n);
            for (coef, &(i, j)) in v.iter().zip(&pairs) {
                a[i][j] += coef;
                a[j][i] -= coef;
            }
            a
        })
        .collect::<Vec<_>>();
    StabilizerAlgebra { form: form.clone(), dimension: basis.len(), basis }
}

pub fn to_dmatrix(a: &Matrix) -> DMatrix<f64> {
    let n = a.len();
    let m = if n == 0 { 0 } else { a[0].len() };
    DMatrix::from_fn(n, m, |i, j| exact::to_f64(&a[i][j]))
}

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
pub fn matrix_exp(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = a.abs().row_sum().max();
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let b = a * scale;
    let mut result = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    for k in 1..40 {
        term = &term * &b / k as f64;
        result += &term;
        if term.abs().max() <= 1e-14 * result.abs().max() {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// `exp(Σ c_i B_i)` for exact coefficients `c_i` on the algebra basis.
pub fn exp_of_combination(alg: &StabilizerAlgebra, coeffs: &[Rational]) -> DMatrix<f64> {
    let n = alg.form.dim();
    let mut a = exact::zeros(n, n);
    for (c, b) in coeffs.iter().zip(&alg.basis) {
        if c.is_zero() {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                a[i][j] += c * &b[i][j];
            }
        }
    }
    matrix_exp(&to_dmatrix(&a))
}

/// A group element `exp(Σ c_i B_i)` with random coefficients `c_i ∈ [-2, 2] ∩ ℤ/16`.
pub fn random_stabilizer_element(alg: &StabilizerAlgebra, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<Rational> = alg.basis.iter().map(|_| frac(rng.random_range(-32..=32), 16)).collect();
    exp_of_combination(alg, &coeffs)
}

/// Whether an exact matrix is antisymmetric and annihilates `form`.
pub fn annihilates(form: &ExteriorForm, a: &Matrix) -> bool {
    let n = a.len();
    let antisym = (0..n).all(|i| (0..n).all(|j| a[i][j] == -a[j][i].clone()));
    antisym && infinitesimal_action(form, a).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::One;

    #[test]
    fn phi_signs() {
        let phi = model_form(ModelKind::G2Phi);
        let signs: Vec<i64> = phi.terms().map(|(_, c)| if *c > Rational::zero() { 1 } else { -1 }).collect();
        assert_eq!(phi.len(), 7);
        assert_eq!(signs, vec![1, 1, 1, 1, -1, -1, -1]);
    }

    #[test]
    fn omega_first_term() {
        let om = model_form(ModelKind::Spin7Omega);
        assert_eq!(om.len(), 14);
        let (m, c) = om.terms().next().unwrap();
        assert_eq!(m.indices(), vec![1, 2, 3, 4]);
        assert!(c.is_one());
    }

    #[test]
    fn kaehler_three() {
        let w = model_form(ModelKind::KaehlerOmega(3));
        let expected = ExteriorForm::from_int_terms(6, &[(&[1, 2], 1), (&[3, 4], 1), (&[5, 6], 1)]).unwrap();
        assert_eq!(w, expected);
    }

    #[test]
    fn theta_two() {
        // (dx1 + i dx2)(dx3 + i dx4) = dx13 - dx24 + i(dx14 + dx23)
        let re = model_form(ModelKind::ReTheta(2));
        let im = model_form(ModelKind::ImTheta(2));
        assert_eq!(re, ExteriorForm::from_int_terms(4, &[(&[1, 3], 1), (&[2, 4], -1)]).unwrap());
        assert_eq!(im, ExteriorForm::from_int_terms(4, &[(&[1, 4], 1), (&[2, 3], 1)]).unwrap());
    }

    #[test]
    fn every_product_identity_holds() {
        for c in verify_product_structures() {
            assert!(c.passed(), "{}: {} vs {}", c.name, c.lhs, c.rhs);
        }
    }

    #[test]
    fn control_is_really_unequal() {
        let checks = verify_product_structures();
        let control = checks.iter().find(|c| !c.expect_equal).unwrap();
        assert!(!control.equal);
    }

    #[test]
    fn stabilizer_dimensions() {
        assert_eq!(stabilizer_algebra(&model_form(ModelKind::G2Phi)).dimension, 14);
        assert_eq!(stabilizer_algebra(&model_form(ModelKind::Spin7Omega)).dimension, 21);
        assert_eq!(stabilizer_algebra(&model_form(ModelKind::Volume(3))).dimension, 3);
    }

    #[test]
    fn g2_algebra_also_kills_star_phi() {
        let alg = stabilizer_algebra(&model_form(ModelKind::G2Phi));
        let star = model_form(ModelKind::G2StarPhi);
        for b in &alg.basis {
            assert!(annihilates(&alg.form, b));
            assert!(annihilates(&star, b));
        }
    }

    #[test]
    fn zero_combination_is_identity() {
        let alg = stabilizer_algebra(&model_form(ModelKind::G2Phi));
        let g = exp_of_combination(&alg, &vec![Rational::zero(); alg.dimension]);
        assert_eq!(g, DMatrix::identity(7, 7));
    }

    #[test]
    fn random_spin7_element_is_orthogonal() {
        let alg = stabilizer_algebra(&model_form(ModelKind::Spin7Omega));
        for seed in 0..5 {
            let g = random_stabilizer_element(&alg, seed);
            let err = (g.transpose() * &g - DMatrix::identity(8, 8)).abs().max();
            assert!(err < 1e-10, "seed {seed}: {err}");
        }
    }

    #[test]
    fn random_g2_element_preserves_phi() {
        let alg = stabilizer_algebra(&model_form(ModelKind::G2Phi));
        let phi = model_form(ModelKind::G2Phi).to_float();
        let g = random_stabilizer_element(&alg, 7);
        // compare (g* phi)(e_a, e_b, e_c) with phi(e_a, e_b, e_c) on all basis triples
        let cols: Vec<Vec<f64>> = (0..7).map(|j| g.column(j).iter().copied().collect()).collect();
        let mut worst: f64 = 0.0;
        for a in 0..7 {
            for b in a + 1..7 {
                for c in b + 1..7 {
                    let pulled = phi.evaluate(&[&cols[a], &cols[b], &cols[c]]);
                    let e = |i: usize| (0..7).map(|k| if k == i { 1.0 } else { 0.0 }).collect::<Vec<f64>>();
                    let orig = phi.evaluate(&[&e(a), &e(b), &e(c)]);
                    worst = worst.max((pulled - orig).abs());
                }
            }
        }
        assert!(worst < 1e-10, "{worst}");
    }

    #[test]
    fn matrix_exp_of_rotation_generator() {
        let t = 0.3f64;
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -t, t, 0.0]);
        let e = matrix_exp(&a);
        assert!((e[(0, 0)] - t.cos()).abs() < 1e-15);
        assert!((e[(1, 0)] - t.sin()).abs() < 1e-15);
    }
}
