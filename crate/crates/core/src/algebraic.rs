//! Exact arithmetic in a cyclotomic field ℚ(ζ_N), weighted projective points,
//! the degree-12 hypersurface in ℂP⁵_{1,1,1,1,4,4} with its real structure,
//! and coordinate checks for the order-8 subgroup of Spin(7).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num::integer::{gcd, lcm};
use num::{Complex, One, Zero};
use thiserror::Error;

use crate::exact::{self, rat, Matrix, Rational};
use crate::exterior::LinearEndo;
use crate::orbifold::{generate_group, preserves_form, FormAction, GroupConfig};
use crate::report::Check;
use crate::structures::{model_form, spin7_from_su4, ComplexChart, ModelKind};

pub const DEFAULT_CONDUCTOR: u32 = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraicError {
    #[error("root of unity needs conductor {needed}, field has {have}")]
    ConductorTooSmall { needed: u64, have: u32 },
    #[error("weights differ")]
    WeightMismatch,
    #[error("scaling ratio is not a root of unity and has no rational root")]
    UnsupportedRatio,
    #[error("elements come from different fields")]
    FieldMismatch,
    #[error("conductor must be at least 1")]
    BadConductor,
}

fn poly_trim(p: &mut Vec<Rational>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Remainder of `a` modulo a monic `m`.
fn poly_rem(a: &[Rational], m: &[Rational]) -> Vec<Rational> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let d = m.len() - 1;
    while r.len() > d {
        let lead = r.last().unwrap().clone();
        let shift = r.len() - 1 - d;
        for (i, c) in m.iter().enumerate() {
            r[shift + i] -= &lead * c;
        }
        poly_trim(&mut r);
    }
    r
}

/// Exact quotient `a / m` for monic `m` dividing `a`.
fn poly_div(a: &[Rational], m: &[Rational]) -> Vec<Rational> {
    let mut r = a.to_vec();
    let d = m.len() - 1;
    let mut q = vec![Rational::zero(); r.len().saturating_sub(d)];
    while r.len() > d {
        let lead = r.last().unwrap().clone();
        let shift = r.len() - 1 - d;
        q[shift] = lead.clone();
        for (i, c) in m.iter().enumerate() {
            r[shift + i] -= &lead * c;
        }
        poly_trim(&mut r);
    }
    q
}

/// The cyclotomic polynomial `Φ_n` by division of `xⁿ - 1`.
pub fn cyclotomic_polynomial(n: u32) -> Vec<Rational> {
    let mut p = vec![Rational::zero(); n as usize + 1];
    p[0] = rat(-1);
    p[n as usize] = rat(1);
    for d in 1..n {
        if n.is_multiple_of(d) {
            p = poly_div(&p, &cyclotomic_polynomial(d));
        }
    }
    p
}

#[derive(Debug, PartialEq, Eq)]
pub struct CyclotomicField {
    conductor: u32,
    modulus: Vec<Rational>,
}

impl CyclotomicField {
    pub fn new(conductor: u32) -> Result<Arc<Self>, AlgebraicError> {
        if conductor == 0 {
            return Err(AlgebraicError::BadConductor);
        }
        Ok(Arc::new(CyclotomicField { conductor, modulus: cyclotomic_polynomial(conductor) }))
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }
}

/// An element of ℚ(ζ_N) in the power basis `1, ζ, …, ζ^{φ(N)-1}`.
#[derive(Clone, Debug)]
pub struct CyclotomicNumber {
    field: Arc<CyclotomicField>,
    coeffs: Vec<Rational>,
}

impl PartialEq for CyclotomicNumber {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.coeffs == other.coeffs
    }
}

impl CyclotomicNumber {
    fn reduce(field: &Arc<CyclotomicField>, p: &[Rational]) -> Self {
        CyclotomicNumber { field: field.clone(), coeffs: poly_rem(p, &field.modulus) }
    }

    pub fn from_rational(field: &Arc<CyclotomicField>, q: Rational) -> Self {
        Self::reduce(field, &[q])
    }

    pub fn from_int(field: &Arc<CyclotomicField>, n: i64) -> Self {
        Self::from_rational(field, rat(n))
    }

    /// `ζ^k` for any integer `k`.
    pub fn zeta_pow(field: &Arc<CyclotomicField>, k: i64) -> Self {
        let n = field.conductor as i64;
        let e = k.rem_euclid(n) as usize;
        let mut p = vec![Rational::zero(); e + 1];
        p[e] = Rational::one();
        Self::reduce(field, &p)
    }

    pub fn field(&self) -> &Arc<CyclotomicField> {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Complex conjugation `ζ ↦ ζ^{N-1}`.
    pub fn conj(&self) -> Self {
        let n = self.field.conductor as usize;
        let mut p = vec![Rational::zero(); n];
        for (k, c) in self.coeffs.iter().enumerate() {
            p[(n - k) % n] += c;
        }
        Self::reduce(&self.field, &p)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::from_int(&self.field, 1);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Multiplicative inverse by solving the linear system of multiplication.
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let d = self.field.degree();
        let mut m: Matrix = exact::zeros(d, d);
        for j in 0..d {
            let mut e = vec![Rational::zero(); j + 1];
            e[j] = Rational::one();
            let col = &Self::reduce(&self.field, &e) * self;
            for (i, c) in col.coeffs.iter().enumerate() {
                m[i][j] = c.clone();
            }
        }
        let mut rhs = vec![Rational::zero(); d];
        rhs[0] = Rational::one();
        let x = exact::solve(&m, &rhs)?;
        Some(Self::reduce(&self.field, &x))
    }

    /// Smallest `k` in `0..N` with `self = ζ^k`, if any.
    pub fn root_of_unity_exponent(&self) -> Option<u32> {
        (0..self.field.conductor).find(|&k| *self == Self::zeta_pow(&self.field, k as i64))
    }

    /// The value as a floating complex number.
    pub fn to_complex(&self) -> Complex<f64> {
        let n = self.field.conductor as f64;
        self.coeffs.iter().enumerate().map(|(k, c)| Complex::from_polar(exact::to_f64(c), 2.0 * std::f64::consts::PI * k as f64 / n)).sum()
    }
}

impl fmt::Display for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if let Some(k) = self.root_of_unity_exponent() {
            return match k {
                0 => write!(f, "1"),
                _ => write!(f, "z{}^{k}", self.field.conductor),
            };
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| if k == 0 { c.to_string() } else { format!("({c})z{}^{k}", self.field.conductor) })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Add for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn add(self, o: &CyclotomicNumber) -> CyclotomicNumber {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut p = vec![Rational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            p[i] += c;
        }
        for (i, c) in o.coeffs.iter().enumerate() {
            p[i] += c;
        }
        poly_trim(&mut p);
        CyclotomicNumber { field: self.field.clone(), coeffs: p }
    }
}

impl Neg for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        CyclotomicNumber { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Sub for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn sub(self, o: &CyclotomicNumber) -> CyclotomicNumber {
        self + &(-o)
    }
}

impl Mul for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn mul(self, o: &CyclotomicNumber) -> CyclotomicNumber {
        CyclotomicNumber::reduce(&self.field, &poly_mul(&self.coeffs, &o.coeffs))
    }
}

/// A point `[z_0, …, z_m]` of a weighted projective space.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedPoint {
    pub weights: Vec<u32>,
    pub coords: Vec<CyclotomicNumber>,
}

impl WeightedPoint {
    pub fn new(weights: &[u32], coords: Vec<CyclotomicNumber>) -> Self {
        assert_eq!(weights.len(), coords.len());
        assert!(coords.iter().any(|c| !c.is_zero()), "the zero vector is not a point");
        WeightedPoint { weights: weights.to_vec(), coords }
    }

    /// `(u^{a_0} z_0, …, u^{a_m} z_m)`.
    pub fn scaled(&self, u: &CyclotomicNumber) -> Self {
        let coords = self.coords.iter().zip(&self.weights).map(|(z, a)| &u.pow(*a) * z).collect();
        WeightedPoint { weights: self.weights.clone(), coords }
    }
}

impl fmt::Display for WeightedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// All `u` in the field with `u^a = r`, or the conductor needed to contain them.
pub fn roots_in_field(r: &CyclotomicNumber, a: u32) -> Result<Vec<CyclotomicNumber>, AlgebraicError> {
    let field = r.field().clone();
    let n = field.conductor();
    let unity: Vec<CyclotomicNumber> = (0..n).map(|k| CyclotomicNumber::zeta_pow(&field, k as i64)).collect();
    if let Some(j) = r.root_of_unity_exponent() {
        // u = e^{2πi(j + nN)/(aN)}; all have order dividing a·ord(r)
        let ord_r = n / gcd(j, n).max(1);
        let ord_r = if j == 0 { 1 } else { ord_r };
        let needed = lcm(u64::from(n), u64::from(a) * u64::from(ord_r));
        if needed != u64::from(n) && (u64::from(n) % needed != 0) {
            return Err(AlgebraicError::ConductorTooSmall { needed, have: n });
        }
        return Ok((0..n).filter(|k| (u64::from(*k) * u64::from(a)) % u64::from(n) == u64::from(j)).map(|k| unity[k as usize].clone()).collect());
    }
    // rational ratio with an exact rational a-th root
    if r.coefficients().len() == 1 {
        let q = &r.coefficients()[0];
        let root =
            (1..=64i64).flat_map(|den| (-256i64..=256).map(move |num| Rational::new(num.into(), den.into()))).find(|c| num::pow(c.clone(), a as usize) == *q);
        if let Some(rho) = root {
            if !n.is_multiple_of(a) {
                return Err(AlgebraicError::ConductorTooSmall { needed: lcm(u64::from(n), u64::from(a)), have: n });
            }
            let rho = CyclotomicNumber::from_rational(&field, rho);
            return Ok(unity.iter().filter(|w| w.pow(a).is_one()).map(|w| &rho * w).collect());
        }
    }
    Err(AlgebraicError::UnsupportedRatio)
}

/// Whether some `u ∈ ℂ*` scales `p` to `q`.
pub fn wps_equal(p: &WeightedPoint, q: &WeightedPoint) -> Result<bool, AlgebraicError> {
    if p.weights != q.weights {
        return Err(AlgebraicError::WeightMismatch);
    }
    if p.coords.iter().zip(&q.coords).any(|(a, b)| a.is_zero() != b.is_zero()) {
        return Ok(false);
    }
    let i = p.coords.iter().position(|c| !c.is_zero()).expect("nonzero point");
    let ratio = &q.coords[i] * &p.coords[i].inverse().expect("nonzero");
    let candidates = roots_in_field(&ratio, p.weights[i])?;
    Ok(candidates.iter().any(|u| p.scaled(u) == *q))
}

/// The scalings `u` (roots of unity in the field) fixing `p`.
pub fn stabilizer(p: &WeightedPoint) -> Vec<CyclotomicNumber> {
    let field = p.coords[0].field().clone();
    (0..field.conductor()).map(|k| CyclotomicNumber::zeta_pow(&field, k as i64)).filter(|u| p.scaled(u) == *p).collect()
}

/// `z ↦ (s_i conj(z_{π(i)}))_i`, an antiholomorphic monomial map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AntiMonomialMap {
    pub perm: Vec<usize>,
    pub signs: Vec<i64>,
}

impl AntiMonomialMap {
    pub fn apply(&self, p: &WeightedPoint) -> WeightedPoint {
        let coords = (0..p.coords.len())
            .map(|i| {
                let z = p.coords[self.perm[i]].conj();
                if self.signs[i] < 0 {
                    -&z
                } else {
                    z
                }
            })
            .collect();
        WeightedPoint { weights: p.weights.clone(), coords }
    }

    /// The square, a holomorphic diagonal sign map `z ↦ (c_i z_{ρ(i)})`.
    pub fn square(&self) -> (Vec<usize>, Vec<i64>) {
        let n = self.perm.len();
        let perm = (0..n).map(|i| self.perm[self.perm[i]]).collect();
        let signs = (0..n).map(|i| self.signs[i] * self.signs[self.perm[i]]).collect();
        (perm, signs)
    }
}

/// `Σ c_E z^E` with exact rational coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    pub terms: Vec<(Rational, Vec<u32>)>,
}

impl Polynomial {
    pub fn evaluate(&self, z: &[CyclotomicNumber]) -> CyclotomicNumber {
        let field = z[0].field().clone();
        let mut total = CyclotomicNumber::from_int(&field, 0);
        for (c, e) in &self.terms {
            let mut t = CyclotomicNumber::from_rational(&field, c.clone());
            for (zi, ei) in z.iter().zip(e) {
                t = &t * &zi.pow(*ei);
            }
            total = &total + &t;
        }
        total
    }

    /// Weighted degree if homogeneous.
    pub fn weighted_degree(&self, weights: &[u32]) -> Option<u32> {
        let degs: Vec<u32> = self.terms.iter().map(|(_, e)| e.iter().zip(weights).map(|(a, b)| a * b).sum()).collect();
        degs.first().copied().filter(|d| degs.iter().all(|x| x == d))
    }

    /// Coefficients of `P(σ z)` viewed as a polynomial in `conj(z)`, with terms sorted.
    pub fn substitute_anti(&self, s: &AntiMonomialMap) -> Polynomial {
        let n = s.perm.len();
        let mut terms: Vec<(Rational, Vec<u32>)> = self
            .terms
            .iter()
            .map(|(c, e)| {
                let mut sign = 1i64;
                let mut new_e = vec![0u32; n];
                for i in 0..n {
                    if e[i] % 2 == 1 && s.signs[i] < 0 {
                        sign = -sign;
                    }
                    new_e[s.perm[i]] += e[i];
                }
                (c * rat(sign), new_e)
            })
            .collect();
        terms.sort_by(|a, b| a.1.cmp(&b.1));
        Polynomial { terms }
    }

    pub fn sorted(&self) -> Polynomial {
        let mut t = self.terms.clone();
        t.sort_by(|a, b| a.1.cmp(&b.1));
        Polynomial { terms: t }
    }
}

pub fn canonical_degree(degree: u32, weights: &[u32]) -> i64 {
    i64::from(degree) - weights.iter().map(|w| i64::from(*w)).sum::<i64>()
}

pub const Y_WEIGHTS: [u32; 6] = [1, 1, 1, 1, 4, 4];

pub fn hypersurface_y() -> Polynomial {
    let exps = [12, 12, 12, 12, 3, 3];
    Polynomial { terms: (0..6).map(|i| (rat(1), (0..6).map(|j| if i == j { exps[i] } else { 0 }).collect())).collect() }
}

/// `[z_0, …, z_5] ↦ [z̄_1, -z̄_0, z̄_3, -z̄_2, z̄_5, z̄_4]`.
pub fn real_structure_y() -> AntiMonomialMap {
    AntiMonomialMap { perm: vec![1, 0, 3, 2, 5, 4], signs: vec![1, -1, 1, -1, 1, 1] }
}

fn point(field: &Arc<CyclotomicField>, coords: &[Option<i64>]) -> WeightedPoint {
    let c = coords
        .iter()
        .map(|z| match z {
            Some(k) => CyclotomicNumber::zeta_pow(field, *k),
            None => CyclotomicNumber::from_int(field, 0),
        })
        .collect();
    WeightedPoint::new(&Y_WEIGHTS, c)
}

pub fn verify_example_y(conductor: u32) -> Result<Vec<Check>, AlgebraicError> {
    let field = CyclotomicField::new(conductor)?;
    let n = conductor as i64;
    if n % 6 != 0 {
        return Err(AlgebraicError::ConductorTooSmall { needed: lcm(u64::from(conductor), 6), have: conductor });
    }
    let y = hypersurface_y();
    let sigma = real_structure_y();
    let mut checks = Vec::new();

    // σ² is the diagonal map (-1,-1,-1,-1,1,1), which is scaling by u = -1
    let (perm2, signs2) = sigma.square();
    let minus_one = CyclotomicNumber::from_int(&field, -1);
    let u_action: Vec<i64> = Y_WEIGHTS.iter().map(|a| if a % 2 == 1 { -1 } else { 1 }).collect();
    let sq_ok = perm2 == (0..6).collect::<Vec<_>>() && signs2 == u_action;
    let samples = [
        point(&field, &[Some(0), Some(n / 2), None, None, None, None]),
        point(&field, &[Some(1), Some(n / 2 + 1), Some(3), None, None, None]),
        point(&field, &[Some(0), None, None, None, Some(2), Some(5)]),
    ];
    let mut pts_ok = true;
    for p in &samples {
        let pp = sigma.apply(&sigma.apply(p));
        pts_ok &= pp == p.scaled(&minus_one) && wps_equal(&pp, p)?;
    }
    checks.push(Check::new(
        "sigma squared is the identity",
        "sigma^2 = 1 on CP^5_{1,1,1,1,4,4}: sigma^2 = diag(-1,-1,-1,-1,1,1) = action of u = -1",
        sq_ok && pts_ok,
        "sigma^2 = scaling by u = -1",
        format!("sigma^2 signs {signs2:?}, sample points {}", if pts_ok { "agree" } else { "disagree" }),
    ));

    // σ maps Y to Y: P(σz) = conj(P(z)) term by term, plus point evaluations
    let symbolic = y.substitute_anti(&sigma) == y.sorted();
    let on_y = [
        point(&field, &[Some(0), Some(n / 2), None, None, None, None]),
        point(&field, &[None, None, Some(0), Some(n / 2), None, None]),
        point(&field, &[None, None, None, None, Some(0), Some(n / 2)]),
        point(&field, &[Some(0), Some(n / 24), None, None, None, None]),
    ];
    let mut eval_ok = true;
    for p in &on_y {
        let lies = y.evaluate(&p.coords).is_zero();
        let image = y.evaluate(&sigma.apply(p).coords).is_zero();
        eval_ok &= lies == image;
    }
    checks.push(Check::new(
        "sigma preserves Y",
        "Y = {z0^12 + z1^12 + z2^12 + z3^12 + z4^3 + z5^3 = 0} is sigma-invariant",
        symbolic && eval_ok,
        "P(sigma z) = conj P(z)",
        format!("symbolic {symbolic}, sample evaluation {eval_ok}"),
    ));

    // the locus z0 = ... = z3 = 0 on Y: normalise z4 = 1, then z5^3 = -1
    let t_roots = roots_in_field(&minus_one, 3)?;
    let mut classes: Vec<WeightedPoint> = Vec::new();
    for t in &t_roots {
        let mut c: Vec<CyclotomicNumber> = (0..4).map(|_| CyclotomicNumber::from_int(&field, 0)).collect();
        c.push(CyclotomicNumber::from_int(&field, 1));
        c.push(t.clone());
        let p = WeightedPoint::new(&Y_WEIGHTS, c);
        assert!(y.evaluate(&p.coords).is_zero());
        let mut fresh = true;
        for q in &classes {
            fresh &= !wps_equal(q, &p)?;
        }
        if fresh {
            classes.push(p);
        }
    }
    let expected_pts = [
        point(&field, &[None, None, None, None, Some(0), Some(n / 2)]),
        point(&field, &[None, None, None, None, Some(0), Some(n / 6)]),
        point(&field, &[None, None, None, None, Some(0), Some(-n / 6)]),
    ];
    let mut matched = classes.len() == 3;
    for e in &expected_pts {
        let mut hit = false;
        for c in &classes {
            hit |= wps_equal(c, e)?;
        }
        matched &= hit;
    }
    checks.push(Check::new(
        "singular points of Y",
        "z0 = .. = z3 = 0 on Y is {p1, p2, p3} = {[0,0,0,0,1,-1], [0,0,0,0,1,e^{i pi/3}], [0,0,0,0,1,e^{-i pi/3}]}",
        matched && t_roots.len() == 3,
        "3 points p1, p2, p3",
        format!(
            "{} roots of t^3 = -1 in the field, {} classes: {}",
            t_roots.len(),
            classes.len(),
            classes.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
        ),
    ));

    let mut fixed_ok = true;
    for e in &expected_pts {
        fixed_ok &= wps_equal(&sigma.apply(e), e)?;
    }
    let control = &on_y[3];
    let control_fixed = wps_equal(&sigma.apply(control), control)?;
    checks.push(Check::new(
        "sigma fixes the singular points",
        "sigma(p_j) = p_j for j = 1, 2, 3; full fixed-set equality on Y is not checked",
        fixed_ok && !control_fixed,
        "p1, p2, p3 fixed; sample [1, z24, 0, 0, 0, 0] moved",
        format!("p_j fixed: {fixed_ok}; sample fixed: {control_fixed}"),
    ));

    let cd = canonical_degree(12, &Y_WEIGHTS);
    let quintic = canonical_degree(5, &[1, 1, 1, 1, 1]);
    let sextic = canonical_degree(6, &[1, 1, 1, 1]);
    checks.push(Check::new(
        "trivial canonical bundle",
        "degree minus sum of weights vanishes for Y (controls: quintic 3-fold 0, sextic in CP^3 2)",
        cd == 0 && quintic == 0 && sextic == 2 && y.weighted_degree(&Y_WEIGHTS) == Some(12),
        "0 (controls 0, 2)",
        format!("{cd} (controls {quintic}, {sextic})"),
    ));

    let mut local_ok = true;
    let mut orders = Vec::new();
    let i_unit = CyclotomicNumber::zeta_pow(&field, n / 4);
    for p in &expected_pts {
        let stab = stabilizer(p);
        orders.push(stab.len());
        let cyclic = stab.contains(&i_unit) && i_unit.pow(2) == minus_one;
        // the transverse coordinates z0..z3 all have weight 1, so u acts as the scalar u
        let scalar = Y_WEIGHTS[..4].iter().all(|a| *a == 1);
        local_ok &= stab.len() == 4 && cyclic && scalar;
    }
    checks.push(Check::new(
        "local model at the singular points",
        "each p_j is modelled on C^4/<i>",
        local_ok,
        "stabilizer {1, i, -1, -i} acting by scalars on z0..z3",
        format!("stabilizer orders {orders:?}"),
    ));
    Ok(checks)
}

pub type CMatrix = Vec<Vec<Complex<Rational>>>;

fn cz(re: i64, im: i64) -> Complex<Rational> {
    Complex::new(rat(re), rat(im))
}

/// Complex coordinates `z_j = y_{2j-1} + i y_{2j}` of `x` where `y = P x`.
fn to_complex(chart: &ComplexChart, x: &[Rational]) -> Vec<Complex<Rational>> {
    let y = chart.basis_change().apply(x);
    (0..chart.complex_dim()).map(|j| Complex::new(y[2 * j].clone(), y[2 * j + 1].clone())).collect()
}

fn from_complex(chart: &ComplexChart, z: &[Complex<Rational>]) -> Vec<Rational> {
    let y: Vec<Rational> = z.iter().flat_map(|c| [c.re.clone(), c.im.clone()]).collect();
    chart.basis_change().inverse().expect("invertible chart").apply(&y)
}

/// `(B, C)` with `T(z) = B z + C z̄` for a real-linear map `T` in the chart.
pub fn complex_decomposition(map: &LinearEndo, chart: &ComplexChart) -> (CMatrix, CMatrix) {
    let m = chart.complex_dim();
    let mut b = vec![vec![cz(0, 0); m]; m];
    let mut c = vec![vec![cz(0, 0); m]; m];
    let half = Complex::new(Rational::new(1.into(), 2.into()), Rational::zero());
    for k in 0..m {
        let mut e = vec![cz(0, 0); m];
        e[k] = cz(1, 0);
        let te = to_complex(chart, &map.apply(&from_complex(chart, &e)));
        e[k] = cz(0, 1);
        let tie = to_complex(chart, &map.apply(&from_complex(chart, &e)));
        for r in 0..m {
            let i_tie = cz(0, 1) * tie[r].clone();
            b[r][k] = half.clone() * (te[r].clone() - i_tie.clone());
            c[r][k] = half.clone() * (te[r].clone() + i_tie);
        }
    }
    (b, c)
}

fn cdet(m: &CMatrix) -> Complex<Rational> {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut total = cz(0, 0);
    for j in 0..n {
        let minor: CMatrix = m[1..].iter().map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect()).collect();
        let term = m[0][j].clone() * cdet(&minor);
        total = if j % 2 == 0 { total + term } else { total - term };
    }
    total
}

fn scalar_i(m: usize) -> CMatrix {
    (0..m).map(|r| (0..m).map(|c| if r == c { cz(0, 1) } else { cz(0, 0) }).collect()).collect()
}

/// The antilinear block pattern `(z̄_2, -z̄_1, z̄_4, -z̄_3)`.
fn quaternionic_j() -> CMatrix {
    let mut m = vec![vec![cz(0, 0); 4]; 4];
    m[0][1] = cz(1, 0);
    m[1][0] = cz(-1, 0);
    m[2][3] = cz(1, 0);
    m[3][2] = cz(-1, 0);
    m
}

fn is_zero_c(m: &CMatrix) -> bool {
    m.iter().all(|r| r.iter().all(|x| x.re.is_zero() && x.im.is_zero()))
}

pub fn spin7_group_checks() -> Vec<Check> {
    let cfg = GroupConfig::parse(crate::shipped::SEC42).expect("shipped config parses");
    let group = generate_group(&cfg.generators, 64).expect("finite");
    let omega = model_form(ModelKind::Spin7Omega);
    let mut checks = Vec::new();
    let actions: Vec<FormAction> = cfg.generators.iter().map(|g| preserves_form(&g.map, &omega).unwrap()).collect();
    checks.push(Check::new(
        "alpha and beta preserve Omega0",
        "alpha, beta lie in Spin(7)",
        actions.iter().all(|a| *a == FormAction::Preserves),
        "[Preserves, Preserves]",
        format!("{actions:?}"),
    ));
    let w = |s: &str| group.evaluate_word(s, &[]).unwrap();
    let rel = [
        ("alpha^4 = 1", w("aaaa").is_identity()),
        ("beta^4 = 1", w("bbbb").is_identity()),
        ("alpha^2 = beta^2", w("aa") == w("bb")),
        ("alpha beta = beta alpha^3", w("ab") == w("baaa")),
    ];
    let rel_ok = rel.iter().all(|(_, b)| *b) && group.order() == 8 && !group.is_abelian();
    checks.push(Check::new(
        "group relations",
        "G = <alpha, beta> has order 8, is nonabelian, alpha^4 = beta^4 = 1, alpha^2 = beta^2, alpha beta = beta alpha^3",
        rel_ok,
        "order 8, nonabelian, all relations hold",
        format!("order {}, abelian {}, {}", group.order(), group.is_abelian(), rel.iter().map(|(n, b)| format!("{n}: {b}")).collect::<Vec<_>>().join(", ")),
    ));
    let mut free_count = 0;
    for (_, g) in group.nonidentity() {
        let a = g.linear_part();
        let m: Matrix = (0..8).map(|i| (0..8).map(|j| a.entry(i, j) - rat(i64::from(i == j))).collect()).collect();
        if exact::rank(&m) == 8 {
            free_count += 1;
        }
    }
    checks.push(Check::new(
        "free action on R^8 minus 0",
        "every nonidentity element of G has ker(g - 1) = 0",
        free_count == 7,
        "7 of 7",
        format!("{free_count} of {}", group.order() - 1),
    ));
    let alpha = cfg.generators[0].map.linear_part();
    let beta = cfg.generators[1].map.linear_part();
    let zc = ComplexChart::standard(8, 0, 4);
    let wc = ComplexChart::swapped_w();
    let shape = |map: &LinearEndo, chart: &ComplexChart, holomorphic: bool| -> (bool, String) {
        let (b, c) = complex_decomposition(map, chart);
        if holomorphic {
            let ok = is_zero_c(&c) && b == scalar_i(4) && cdet(&b) == cz(1, 0);
            (ok, format!("holomorphic {}, B = iI {}, det B = {}", is_zero_c(&c), b == scalar_i(4), cdet(&b)))
        } else {
            let ok = is_zero_c(&b) && c == quaternionic_j();
            (ok, format!("antiholomorphic {}, pattern (z2b, -z1b, z4b, -z3b) {}", is_zero_c(&b), c == quaternionic_j()))
        }
    };
    let (a_ok, a_txt) = shape(&alpha, &zc, true);
    let (b_ok, b_txt) = shape(&beta, &zc, false);
    checks.push(Check::new(
        "z-coordinates: alpha = i, beta antiholomorphic",
        "with z = (x1+ix2, .., x7+ix8): alpha(z) = iz with det 1 (alpha in SU(4)), beta(z) = (z2b, -z1b, z4b, -z3b)",
        a_ok && b_ok,
        "alpha holomorphic scalar i with det 1; beta of the stated antiholomorphic shape",
        format!("alpha: {a_txt}; beta: {b_txt}"),
    ));
    let (a_ok, a_txt) = shape(&alpha, &wc, false);
    let (b_ok, b_txt) = shape(&beta, &wc, true);
    checks.push(Check::new(
        "w-coordinates: roles of alpha and beta swap",
        "with w = (-x1+ix3, x2+ix4, -x5+ix7, x6+ix8): alpha(w) = (w2b, -w1b, w4b, -w3b), beta(w) = iw",
        a_ok && b_ok,
        "alpha antiholomorphic of the stated shape; beta holomorphic scalar i",
        format!("alpha: {a_txt}; beta: {b_txt}"),
    ));
    let z_omega = spin7_from_su4(&zc) == omega;
    let w_omega = spin7_from_su4(&wc) == omega;
    let metric = wc.basis_change().is_orthogonal() && zc.basis_change().is_orthogonal();
    checks.push(Check::new(
        "g0 and Omega0 in both coordinate systems",
        "g0 = |dz|^2 = |dw|^2 and Omega0 = 1/2 omega0^omega0 + Re theta0 in z and in w",
        z_omega && w_omega && metric,
        "all hold",
        format!("Omega0 in z {z_omega}, in w {w_omega}, metric {metric}"),
    ));
    checks
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f24() -> Arc<CyclotomicField> {
        CyclotomicField::new(24).unwrap()
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![rat(-1), rat(1)]);
        assert_eq!(cyclotomic_polynomial(4), vec![rat(1), rat(0), rat(1)]);
        // Φ_24 = x^8 - x^4 + 1
        let p = cyclotomic_polynomial(24);
        assert_eq!(p.len(), 9);
        assert_eq!((p[0].clone(), p[4].clone(), p[8].clone()), (rat(1), rat(-1), rat(1)));
    }

    #[test]
    fn field_arithmetic() {
        let f = f24();
        let z = CyclotomicNumber::zeta_pow(&f, 1);
        assert!(z.pow(24).is_one());
        assert!(!z.pow(12).is_one());
        assert_eq!(z.pow(12), CyclotomicNumber::from_int(&f, -1));
        assert_eq!(z.conj(), CyclotomicNumber::zeta_pow(&f, 23));
        assert_eq!(z.conj().conj(), z);
        let x = &(&z + &CyclotomicNumber::from_int(&f, 3)) * &z.pow(5);
        assert!((&x * &x.inverse().unwrap()).is_one());
        let c = z.to_complex();
        assert!((c.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn wps_examples() {
        let f = f24();
        let zero = CyclotomicNumber::from_int(&f, 0);
        let one = CyclotomicNumber::from_int(&f, 1);
        let m1 = CyclotomicNumber::from_int(&f, -1);
        let mk = |v: [&CyclotomicNumber; 6]| WeightedPoint::new(&Y_WEIGHTS, v.iter().map(|c| (*c).clone()).collect());
        let p = mk([&zero, &zero, &zero, &zero, &one, &m1]);
        let q = mk([&zero, &zero, &zero, &zero, &m1, &one]);
        assert!(wps_equal(&p, &q).unwrap());
        assert!(wps_equal(&p, &p).unwrap());
        let a = mk([&one, &zero, &zero, &zero, &zero, &zero]);
        let b = mk([&zero, &one, &zero, &zero, &zero, &zero]);
        assert!(!wps_equal(&a, &b).unwrap());
    }

    #[test]
    fn conductor_error_names_requirement() {
        let f = CyclotomicField::new(4).unwrap();
        let m1 = CyclotomicNumber::from_int(&f, -1);
        assert_eq!(roots_in_field(&m1, 4).unwrap_err(), AlgebraicError::ConductorTooSmall { needed: 8, have: 4 });
        assert_eq!(roots_in_field(&m1, 2).unwrap().len(), 2);
    }

    #[test]
    fn accepted_roots_have_unit_modulus() {
        let f = f24();
        let r = CyclotomicNumber::zeta_pow(&f, 12);
        for u in roots_in_field(&r, 4).unwrap() {
            assert!((u.to_complex().norm() - 1.0).abs() < 1e-14);
            assert_eq!(u.pow(4), r);
        }
    }

    #[test]
    fn example_y_checks_pass() {
        for c in verify_example_y(24).unwrap() {
            assert!(c.passed(), "{c:?}");
        }
    }

    #[test]
    fn spin7_checks_pass() {
        for c in spin7_group_checks() {
            assert!(c.passed(), "{c:?}");
        }
    }
}
