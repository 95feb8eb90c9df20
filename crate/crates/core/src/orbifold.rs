//! Finite groups of affine isometries of Tⁿ = ℝⁿ/ℤⁿ with signed-permutation
//! linear parts: closure, action on constant forms, exact fixed loci,
//! singular sets, involution loci and invariant-form Betti numbers.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{self, format_rational, frac, mod_one, parse_rational, rat, Matrix, Rational};
use crate::exterior::{ExteriorForm, LinearEndo, Monomial};
use crate::intmat::{self, smith, IntMatrix};
use crate::structures::{model_form, ModelKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OrbifoldError {
    #[error("linear part is not a signed permutation matrix: {0}")]
    NotSignedPermutation(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("group closure not reached within {0} elements")]
    ClosureNotReached(usize),
    #[error("unknown symbol {0:?} in word")]
    UnknownSymbol(char),
    #[error("involution does not commute with {0}")]
    NotCommuting(String),
    #[error("map is not an involution")]
    NotInvolution,
    #[error("involution lies in the group (as {0})")]
    InGroup(String),
    #[error("config: {0}")]
    Config(String),
}

/// `x ↦ A x + t (mod ℤⁿ)` with `A` a signed permutation matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineIsometry {
    matrix: IntMatrix,
    translation: Vec<Rational>,
}

impl AffineIsometry {
    pub fn new(matrix: IntMatrix, translation: Vec<Rational>) -> Result<Self, OrbifoldError> {
        let n = matrix.len();
        if translation.len() != n || matrix.iter().any(|r| r.len() != n) {
            return Err(OrbifoldError::Dimension(format!("matrix is {n}x? with translation of length {}", translation.len())));
        }
        for (i, row) in matrix.iter().enumerate() {
            let nonzero: Vec<_> = row.iter().filter(|x| **x != 0).collect();
            if nonzero.len() != 1 || nonzero[0].abs() != 1 {
                return Err(OrbifoldError::NotSignedPermutation(format!("row {}", i + 1)));
            }
        }
        for j in 0..n {
            if matrix.iter().filter(|r| r[j] != 0).count() != 1 {
                return Err(OrbifoldError::NotSignedPermutation(format!("column {}", j + 1)));
            }
        }
        let translation = translation.iter().map(mod_one).collect();
        Ok(AffineIsometry { matrix, translation })
    }

    pub fn identity(n: usize) -> Self {
        AffineIsometry { matrix: intmat::int_identity(n), translation: vec![Rational::zero(); n] }
    }

    /// `x ↦ (s_1 x_1 + t_1, …)` for a diagonal sign pattern.
    pub fn diagonal(signs: &[i64], translation: &[Rational]) -> Result<Self, OrbifoldError> {
        let n = signs.len();
        let m = (0..n).map(|i| (0..n).map(|j| if i == j { signs[i] } else { 0 }).collect()).collect();
        Self::new(m, translation.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn translation(&self) -> &[Rational] {
        &self.translation
    }

    pub fn linear_part(&self) -> LinearEndo {
        LinearEndo::from_integers(&self.matrix).expect("square")
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineIsometry) -> AffineIsometry {
        let a = intmat::int_mul(&self.matrix, &other.matrix);
        let t: Vec<Rational> = intmat::apply_int(&self.matrix, &other.translation).iter().zip(&self.translation).map(|(x, y)| mod_one(&(x + y))).collect();
        AffineIsometry { matrix: a, translation: t }
    }

    pub fn inverse(&self) -> AffineIsometry {
        let n = self.dim();
        let at: IntMatrix = (0..n).map(|i| (0..n).map(|j| self.matrix[j][i]).collect()).collect();
        let t = intmat::apply_int(&at, &self.translation).iter().map(|x| mod_one(&-x)).collect();
        AffineIsometry { matrix: at, translation: t }
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == intmat::int_identity(self.dim()) && self.translation.iter().all(Zero::is_zero)
    }

    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        intmat::apply_int(&self.matrix, x).iter().zip(&self.translation).map(|(a, b)| a + b).collect()
    }

    /// Cycles of the underlying permutation with their sign products.
    fn signed_cycles(&self) -> Vec<(Vec<usize>, i64)> {
        let n = self.dim();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut sign = 1;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                cycle.push(j);
                // A e_j = s e_i where row i has its entry in column j
                let i = (0..n).find(|&i| self.matrix[i][j] != 0).expect("permutation");
                sign *= self.matrix[i][j];
                j = i;
            }
            out.push((cycle, sign));
        }
        out
    }

    /// Eigenvalues of the linear part as fractions of a full turn in `[0, 1)`.
    pub fn eigen_phases(&self) -> Vec<Rational> {
        let mut phases = Vec::new();
        for (cycle, sign) in self.signed_cycles() {
            let l = cycle.len() as i64;
            let shift = if sign < 0 { frac(1, 2) } else { Rational::zero() };
            for k in 0..l {
                phases.push(mod_one(&((rat(k) + &shift) / rat(l))));
            }
        }
        phases.sort();
        phases
    }

    pub fn order(&self) -> usize {
        let mut g = self.clone();
        let mut k = 1;
        while !g.is_identity() {
            g = g.compose(self);
            k += 1;
        }
        k
    }
}

impl fmt::Display for AffineIsometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.dim();
        let parts: Vec<String> = (0..n)
            .map(|i| {
                let j = (0..n).find(|&j| self.matrix[i][j] != 0).unwrap();
                let var = format!("{}x{}", if self.matrix[i][j] < 0 { "-" } else { "" }, j + 1);
                let t = &self.translation[i];
                if t.is_zero() {
                    var
                } else {
                    format!("{t}{}{}", if var.starts_with('-') { "" } else { "+" }, var)
                }
            })
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormAction {
    Preserves,
    Negates,
    Other,
}

impl FormAction {
    pub fn sign(self) -> Option<i32> {
        match self {
            FormAction::Preserves => Some(1),
            FormAction::Negates => Some(-1),
            FormAction::Other => None,
        }
    }
}

/// Translations act trivially on constant forms, so only `A` matters.
pub fn preserves_form(g: &AffineIsometry, form: &ExteriorForm) -> Result<FormAction, OrbifoldError> {
    if g.dim() != form.dim() {
        return Err(OrbifoldError::Dimension(format!("map on R^{} vs form on R^{}", g.dim(), form.dim())));
    }
    let pulled = form.pullback(&g.linear_part()).expect("same dimension");
    Ok(if &pulled == form {
        FormAction::Preserves
    } else if pulled == -form {
        FormAction::Negates
    } else {
        FormAction::Other
    })
}

#[derive(Clone, Debug)]
pub struct Generator {
    pub name: String,
    pub symbol: char,
    pub map: AffineIsometry,
}

#[derive(Clone, Debug)]
pub struct GroupTable {
    pub generators: Vec<Generator>,
    pub elements: Vec<AffineIsometry>,
    /// Shortest word in generator symbols for each element; `1` for the identity.
    pub words: Vec<String>,
}

impl GroupTable {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn is_abelian(&self) -> bool {
        self.elements.iter().all(|a| self.elements.iter().all(|b| a.compose(b) == b.compose(a)))
    }

    pub fn index_of(&self, g: &AffineIsometry) -> Option<usize> {
        self.elements.iter().position(|e| e == g)
    }

    pub fn nonidentity(&self) -> impl Iterator<Item = (usize, &AffineIsometry)> {
        self.elements.iter().enumerate().filter(|(_, g)| !g.is_identity())
    }

    /// Evaluates a word such as `ab` as `a ∘ b`; `1` or the empty word is the identity.
    pub fn evaluate_word(&self, word: &str, extra: &[Generator]) -> Result<AffineIsometry, OrbifoldError> {
        let mut g = AffineIsometry::identity(self.dim());
        for c in word.trim().chars().filter(|c| *c != '1' && !c.is_whitespace()) {
            let gen = self.generators.iter().chain(extra).find(|x| x.symbol == c).ok_or(OrbifoldError::UnknownSymbol(c))?;
            g = g.compose(&gen.map);
        }
        Ok(g)
    }

    pub fn word(&self, i: usize) -> &str {
        &self.words[i]
    }

    pub fn element_orders(&self) -> Vec<usize> {
        self.elements.iter().map(AffineIsometry::order).collect()
    }
}

/// Breadth-first closure under right multiplication by generators.
pub fn generate_group(gens: &[Generator], max_order: usize) -> Result<GroupTable, OrbifoldError> {
    let n = gens.first().map_or(0, |g| g.map.dim());
    if n == 0 {
        return Err(OrbifoldError::Dimension("no generators".into()));
    }
    if let Some(g) = gens.iter().find(|g| g.map.dim() != n) {
        return Err(OrbifoldError::Dimension(format!("generator {} has dimension {}", g.name, g.map.dim())));
    }
    let mut elements = vec![AffineIsometry::identity(n)];
    let mut words = vec![String::from("1")];
    let mut index: BTreeMap<AffineIsometry, usize> = BTreeMap::new();
    index.insert(elements[0].clone(), 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in gens {
            let h = elements[i].compose(&g.map);
            if index.contains_key(&h) {
                continue;
            }
            if elements.len() >= max_order {
                return Err(OrbifoldError::ClosureNotReached(max_order));
            }
            let w = if i == 0 { g.symbol.to_string() } else { format!("{}{}", words[i], g.symbol) };
            index.insert(h.clone(), elements.len());
            queue.push_back(elements.len());
            elements.push(h);
            words.push(w);
        }
    }
    Ok(GroupTable { generators: gens.to_vec(), elements, words })
}

/// An affine subtorus `point + span(directions)` of Tⁿ.
#[derive(Clone, Debug, Serialize)]
pub struct Component {
    pub dimension: usize,
    #[serde(serialize_with = "ser_rationals")]
    pub point: Vec<Rational>,
    /// Integer basis of the (saturated) direction lattice.
    pub directions: Vec<Vec<i64>>,
}

fn ser_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(format_rational))
}

impl Component {
    fn same_directions(&self, other: &Component) -> bool {
        let n = self.point.len();
        let mut both = self.directions.clone();
        both.extend(other.directions.iter().cloned());
        self.dimension == other.dimension && intmat::column_rank(&both, n) == self.dimension
    }

    /// Exact set equality on the torus.
    pub fn same_as(&self, other: &Component) -> bool {
        if !self.same_directions(other) {
            return false;
        }
        let diff: Vec<Rational> = self.point.iter().zip(&other.point).map(|(a, b)| a - b).collect();
        intmat::in_span_plus_lattice(&self.directions, self.point.len(), &diff)
    }

    pub fn intersects(&self, other: &Component) -> bool {
        let mut both = self.directions.clone();
        both.extend(other.directions.iter().cloned());
        let diff: Vec<Rational> = self.point.iter().zip(&other.point).map(|(a, b)| a - b).collect();
        intmat::in_span_plus_lattice(&both, self.point.len(), &diff)
    }

    /// Whether a point of the torus lies on this component.
    pub fn contains(&self, x: &[Rational]) -> bool {
        self.membership().contains(x)
    }

    /// Precomputed form of [`Component::contains`] for repeated queries.
    pub fn membership(&self) -> Membership {
        let n = self.point.len();
        let (u, rank) = if self.directions.is_empty() {
            (intmat::int_identity(n), 0)
        } else {
            let m: IntMatrix = (0..n).map(|i| self.directions.iter().map(|c| c[i]).collect()).collect();
            let s = smith(&m);
            let r = s.rank();
            (s.u, r)
        };
        Membership { u, rank, point: self.point.clone() }
    }

    pub fn image(&self, g: &AffineIsometry) -> Component {
        Component {
            dimension: self.dimension,
            point: g.apply(&self.point).iter().map(mod_one).collect(),
            directions: self
                .directions
                .iter()
                .map(|d| {
                    let v: Vec<Rational> = d.iter().map(|x| rat(*x)).collect();
                    intmat::apply_int(g.matrix(), &v).iter().map(|x| x.to_integer().try_into().unwrap()).collect()
                })
                .collect(),
        }
    }

    /// Whether `g` fixes every point of the component.
    pub fn fixed_pointwise_by(&self, g: &AffineIsometry) -> bool {
        let moved = g.apply(&self.point);
        let diff: Vec<Rational> = moved.iter().zip(&self.point).map(|(a, b)| a - b).collect();
        diff.iter().all(|c| c.is_integer())
            && self.directions.iter().all(|d| {
                let v: Vec<Rational> = d.iter().map(|x| rat(*x)).collect();
                intmat::apply_int(g.matrix(), &v) == v
            })
    }
}

pub struct Membership {
    u: IntMatrix,
    rank: usize,
    point: Vec<Rational>,
}

impl Membership {
    pub fn contains(&self, x: &[Rational]) -> bool {
        let diff: Vec<Rational> = self.point.iter().zip(x).map(|(a, b)| a - b).collect();
        intmat::apply_int(&self.u, &diff)[self.rank..].iter().all(|c| c.is_integer())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedSet {
    pub components: Vec<Component>,
    /// `|d_i|` for the nonzero diagonal entries of the Smith form of `A - I`.
    pub elementary_divisors: Vec<i64>,
}

impl FixedSet {
    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn count(&self) -> usize {
        self.components.len()
    }

    pub fn dimension(&self) -> Option<usize> {
        self.components.first().map(|c| c.dimension)
    }
}

/// Solves `(A - I) x ≡ -t (mod ℤⁿ)` through `U (A - I) V = D`.
pub fn fixed_set(g: &AffineIsometry) -> FixedSet {
    let n = g.dim();
    let m: IntMatrix = (0..n).map(|i| (0..n).map(|j| g.matrix()[i][j] - i64::from(i == j)).collect()).collect();
    let s = smith(&m);
    let diag = s.diagonal();
    let neg_t: Vec<Rational> = g.translation().iter().map(|x| -x).collect();
    let c = intmat::apply_int(&s.u, &neg_t);
    let divisors: Vec<i64> = diag.iter().filter(|d| **d != 0).map(|d| d.abs()).collect();
    if (0..n).any(|i| diag[i] == 0 && !c[i].is_integer()) {
        return FixedSet { components: Vec::new(), elementary_divisors: divisors };
    }
    let free: Vec<usize> = (0..n).filter(|&i| diag[i] == 0).collect();
    let directions: Vec<Vec<i64>> = free.iter().map(|&i| (0..n).map(|r| s.v[r][i]).collect()).collect();
    // enumerate y_i = (c_i + k_i)/d_i for each constrained slot
    let mut ys: Vec<Vec<Rational>> = vec![vec![Rational::zero(); n]];
    for i in 0..n {
        if diag[i] == 0 {
            continue;
        }
        let d = rat(diag[i]);
        let mut next = Vec::new();
        for y in &ys {
            for k in 0..diag[i].abs() {
                let mut y2 = y.clone();
                y2[i] = (&c[i] + rat(k)) / &d;
                next.push(y2);
            }
        }
        ys = next;
    }
    let components = ys
        .into_iter()
        .map(|y| Component { dimension: free.len(), point: intmat::apply_int(&s.v, &y).iter().map(mod_one).collect(), directions: directions.clone() })
        .collect();
    FixedSet { components, elementary_divisors: divisors }
}

#[derive(Clone, Debug, Serialize)]
pub struct NormalModel {
    pub codimension: usize,
    pub stabilizer_order: usize,
    /// Normal eigen-phases (fractions of a turn) of each nonidentity stabilizer element.
    pub phases: Vec<Vec<String>>,
    pub label: String,
}

/// Linear action of the pointwise stabilizer on the normal directions.
fn normal_model(comp: &Component, stabilizer: &[&AffineIsometry]) -> NormalModel {
    let n = comp.point.len();
    let codim = n - comp.dimension;
    let mut phases = Vec::new();
    for h in stabilizer.iter().filter(|h| !h.is_identity()) {
        let mut p = h.eigen_phases();
        for _ in 0..comp.dimension {
            if let Some(pos) = p.iter().position(Zero::is_zero) {
                p.remove(pos);
            }
        }
        phases.push(p);
    }
    let order = stabilizer.len();
    let half = frac(1, 2);
    let quarter = frac(1, 4);
    let label = if order == 2 && codim.is_multiple_of(2) && phases.iter().all(|p| p.iter().all(|x| *x == half)) {
        format!("C^{}/{{±1}}", codim / 2)
    } else if order == 4 && codim.is_multiple_of(2) && phases.iter().any(|p| p.iter().filter(|x| **x == quarter).count() == codim / 2) {
        format!("C^{}/<i>", codim / 2)
    } else if order == 1 {
        "smooth".to_string()
    } else {
        format!("R^{codim}/G (|G| = {order})")
    };
    NormalModel { codimension: codim, stabilizer_order: order, phases: phases.iter().map(|p| p.iter().map(|x| x.to_string()).collect()).collect(), label }
}

#[derive(Clone, Debug, Serialize)]
pub struct QuotientComponent {
    pub dimension: usize,
    /// Word of the element whose fixed set first produced the component.
    pub source: String,
    pub upstairs_count: usize,
    pub representative: Component,
    pub normal_model: NormalModel,
}

#[derive(Clone, Debug, Serialize)]
pub struct SingularSet {
    pub components: Vec<QuotientComponent>,
    /// Upstairs component count per nonidentity element word.
    pub upstairs: Vec<(String, usize, Option<usize>)>,
    pub disjoint: bool,
    /// Pairs of intersecting distinct upstairs components, by source word.
    pub overlaps: Vec<(String, String)>,
}

impl SingularSet {
    pub fn count_by_source(&self, word: &str) -> usize {
        self.components.iter().filter(|c| c.source == word).count()
    }
}

/// Distinct components with the index of the element that produced them.
fn collect_components(sources: impl Iterator<Item = (usize, FixedSet)>) -> Vec<(usize, Component)> {
    let mut out: Vec<(usize, Component)> = Vec::new();
    for (src, fs) in sources {
        for c in fs.components {
            if !out.iter().any(|(_, d)| d.same_as(&c)) {
                out.push((src, c));
            }
        }
    }
    out
}

/// Groups components into orbits; returns orbit representatives (indices) and sizes.
fn orbits(comps: &[Component], group: &GroupTable) -> Vec<Vec<usize>> {
    let mut assigned = vec![false; comps.len()];
    let mut out = Vec::new();
    for i in 0..comps.len() {
        if assigned[i] {
            continue;
        }
        let mut orbit = Vec::new();
        for g in &group.elements {
            let img = comps[i].image(g);
            if let Some(j) = comps.iter().position(|c| c.same_as(&img)) {
                if !assigned[j] {
                    assigned[j] = true;
                    orbit.push(j);
                }
            }
        }
        out.push(orbit);
    }
    out
}

pub fn singular_set(group: &GroupTable) -> SingularSet {
    let fixed: Vec<(usize, FixedSet)> = group.nonidentity().map(|(i, g)| (i, fixed_set(g))).collect();
    let upstairs = fixed.iter().map(|(i, fs)| (group.word(*i).to_string(), fs.count(), fs.dimension())).collect();
    let comps = collect_components(fixed.into_iter());
    let plain: Vec<Component> = comps.iter().map(|(_, c)| c.clone()).collect();
    let mut overlaps = Vec::new();
    for i in 0..plain.len() {
        for j in i + 1..plain.len() {
            if plain[i].intersects(&plain[j]) {
                overlaps.push((group.word(comps[i].0).to_string(), group.word(comps[j].0).to_string()));
            }
        }
    }
    let components = orbits(&plain, group)
        .into_iter()
        .map(|orbit| {
            let rep = &plain[orbit[0]];
            let stab: Vec<&AffineIsometry> = group.elements.iter().filter(|g| rep.fixed_pointwise_by(g)).collect();
            QuotientComponent {
                dimension: rep.dimension,
                source: group.word(comps[orbit[0]].0).to_string(),
                upstairs_count: orbit.len(),
                representative: rep.clone(),
                normal_model: normal_model(rep, &stab),
            }
        })
        .collect();
    SingularSet { components, upstairs, disjoint: overlaps.is_empty(), overlaps }
}

#[derive(Clone, Debug, Serialize)]
pub struct LocusPiece {
    /// Word `sδ` naming the element whose fixed set this is.
    pub element: String,
    pub count: usize,
    pub dimension: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvolutionLocus {
    pub pieces: Vec<LocusPiece>,
    /// Image components in the quotient: `(dimension, orbit size)`.
    pub quotient: Vec<(usize, usize)>,
    pub free_on_components: bool,
    pub meets_singular_set: bool,
}

impl InvolutionLocus {
    /// Quotient component count by dimension.
    pub fn quotient_counts(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for (d, _) in &self.quotient {
            *m.entry(*d).or_insert(0) += 1;
        }
        m
    }
}

pub fn involution_locus(sigma: &Generator, group: &GroupTable) -> Result<InvolutionLocus, OrbifoldError> {
    let s = &sigma.map;
    if !s.compose(s).is_identity() {
        return Err(OrbifoldError::NotInvolution);
    }
    if let Some(i) = group.index_of(s) {
        return Err(OrbifoldError::InGroup(group.word(i).to_string()));
    }
    for (i, g) in group.elements.iter().enumerate() {
        if s.compose(g) != g.compose(s) {
            return Err(OrbifoldError::NotCommuting(group.word(i).to_string()));
        }
    }
    let fixed: Vec<(usize, FixedSet)> = group.elements.iter().enumerate().map(|(i, d)| (i, fixed_set(&s.compose(d)))).collect();
    let pieces = fixed
        .iter()
        .map(|(i, fs)| LocusPiece {
            element: if *i == 0 { sigma.symbol.to_string() } else { format!("{}{}", sigma.symbol, group.word(*i)) },
            count: fs.count(),
            dimension: fs.dimension(),
        })
        .collect();
    let comps: Vec<Component> = collect_components(fixed.into_iter()).into_iter().map(|(_, c)| c).collect();
    let orbs = orbits(&comps, group);
    let free = orbs.iter().all(|o| o.len() == group.order());
    let singular: Vec<Component> = group.nonidentity().flat_map(|(_, g)| fixed_set(g).components).collect();
    let meets = comps.iter().any(|c| singular.iter().any(|t| c.intersects(t)));
    Ok(InvolutionLocus {
        pieces,
        quotient: orbs.iter().map(|o| (comps[o[0]].dimension, o.len())).collect(),
        free_on_components: free,
        meets_singular_set: meets,
    })
}

fn monomials(n: usize, k: usize) -> Vec<Monomial> {
    (0u16..(1 << n)).map(|m| Monomial::from_mask(m as u8)).filter(|m| m.degree() == k).collect()
}

/// `b^k` = rank of the average of the pullbacks on `Λᵏ(ℝⁿ)*`.
pub fn orbifold_betti(group: &GroupTable) -> Vec<usize> {
    let n = group.dim();
    (0..=n)
        .map(|k| {
            let basis = monomials(n, k);
            let idx: BTreeMap<Monomial, usize> = basis.iter().enumerate().map(|(i, m)| (*m, i)).collect();
            let mut avg: Matrix = exact::zeros(basis.len(), basis.len());
            for g in &group.elements {
                let lin = g.linear_part();
                for (col, m) in basis.iter().enumerate() {
                    let f = ExteriorForm::monomial(n, &m.indices(), Rational::one()).expect("valid");
                    for (mm, c) in f.pullback(&lin).expect("dim").terms() {
                        avg[idx[&mm]][col] += c;
                    }
                }
            }
            exact::rank(&avg)
        })
        .collect()
}

/// Betti numbers for groups with diagonal linear parts, by counting monomials
/// on which every element acts with sign `+1`.
pub fn monomial_character_betti(group: &GroupTable) -> Option<Vec<usize>> {
    let n = group.dim();
    let mut signs = Vec::new();
    for g in &group.elements {
        let m = g.matrix();
        if (0..n).any(|i| (0..n).any(|j| i != j && m[i][j] != 0)) {
            return None;
        }
        signs.push((0..n).map(|i| m[i][i]).collect::<Vec<i64>>());
    }
    Some((0..=n).map(|k| monomials(n, k).iter().filter(|m| signs.iter().all(|s| m.positions().iter().map(|&p| s[p]).product::<i64>() == 1)).count()).collect())
}

#[derive(Debug, Deserialize)]
struct MapConfig {
    name: String,
    symbol: Option<String>,
    matrix: Vec<Vec<i64>>,
    #[serde(default)]
    translation: Vec<toml::Value>,
}

#[derive(Debug, Deserialize)]
struct RawConfig {
    name: Option<String>,
    dim: usize,
    form: Option<String>,
    #[serde(default)]
    generator: Vec<MapConfig>,
    involution: Option<MapConfig>,
}

/// Group action read from a TOML config.
#[derive(Clone, Debug)]
pub struct GroupConfig {
    pub name: String,
    pub dim: usize,
    pub form: Option<ModelKind>,
    pub generators: Vec<Generator>,
    pub involution: Option<Generator>,
}

pub fn parse_form_name(name: &str) -> Option<ModelKind> {
    match name {
        "g2-phi" => Some(ModelKind::G2Phi),
        "g2-star-phi" => Some(ModelKind::G2StarPhi),
        "spin7-omega" => Some(ModelKind::Spin7Omega),
        _ => None,
    }
}

fn parse_translation(v: &toml::Value, field: &str) -> Result<Rational, OrbifoldError> {
    match v {
        toml::Value::Integer(i) => Ok(rat(*i)),
        toml::Value::String(s) => parse_rational(s).ok_or_else(|| OrbifoldError::Config(format!("{field}: cannot parse {s:?} as a rational"))),
        other => Err(OrbifoldError::Config(format!("{field}: expected integer or \"p/q\" string, got {other}"))),
    }
}

fn build_generator(m: &MapConfig, dim: usize, default_symbol: char, field: &str) -> Result<Generator, OrbifoldError> {
    if m.matrix.len() != dim || m.matrix.iter().any(|r| r.len() != dim) {
        return Err(OrbifoldError::Config(format!("{field}.matrix: expected {dim}x{dim}")));
    }
    let translation = if m.translation.is_empty() {
        vec![Rational::zero(); dim]
    } else {
        if m.translation.len() != dim {
            return Err(OrbifoldError::Config(format!("{field}.translation: expected {dim} entries, got {}", m.translation.len())));
        }
        m.translation.iter().map(|v| parse_translation(v, &format!("{field}.translation"))).collect::<Result<_, _>>()?
    };
    let symbol = match &m.symbol {
        Some(s) if s.chars().count() == 1 => s.chars().next().unwrap(),
        Some(s) => return Err(OrbifoldError::Config(format!("{field}.symbol: {s:?} must be one character"))),
        None => default_symbol,
    };
    if symbol == '1' {
        return Err(OrbifoldError::Config(format!("{field}.symbol: '1' is reserved for the identity")));
    }
    let map = AffineIsometry::new(m.matrix.clone(), translation).map_err(|e| OrbifoldError::Config(format!("{field}: {e}")))?;
    Ok(Generator { name: m.name.clone(), symbol, map })
}

impl GroupConfig {
    pub fn parse(text: &str) -> Result<Self, OrbifoldError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| OrbifoldError::Config(e.to_string()))?;
        if !(1..=8).contains(&raw.dim) {
            return Err(OrbifoldError::Config(format!("dim: {} outside 1..=8", raw.dim)));
        }
        let form = match &raw.form {
            Some(f) => Some(parse_form_name(f).ok_or_else(|| OrbifoldError::Config(format!("form: unknown form {f:?}")))?),
            None => None,
        };
        let generators = raw
            .generator
            .iter()
            .enumerate()
            .map(|(i, g)| build_generator(g, raw.dim, (b'a' + i as u8) as char, &format!("generator[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        if generators.is_empty() {
            return Err(OrbifoldError::Config("generator: at least one generator required".into()));
        }
        let involution = match &raw.involution {
            Some(m) => Some(build_generator(m, raw.dim, 's', "involution")?),
            None => None,
        };
        let mut symbols: Vec<char> = generators.iter().map(|g| g.symbol).chain(involution.iter().map(|g| g.symbol)).collect();
        symbols.sort();
        if symbols.windows(2).any(|w| w[0] == w[1]) {
            return Err(OrbifoldError::Config("symbol: generator symbols must be distinct".into()));
        }
        Ok(GroupConfig { name: raw.name.unwrap_or_default(), dim: raw.dim, form, generators, involution })
    }

    pub fn group(&self) -> Result<GroupTable, OrbifoldError> {
        generate_group(&self.generators, 4096)
    }

    pub fn form(&self) -> Option<ExteriorForm> {
        self.form.map(model_form)
    }

    /// Evaluates a word in the generator and involution symbols.
    pub fn element(&self, group: &GroupTable, word: &str) -> Result<AffineIsometry, OrbifoldError> {
        group.evaluate_word(word, self.involution.as_slice())
    }
}

/// Brute-force list of the fixed points of `g` on the grid `(ℤ/den)ⁿ`, in
/// integer arithmetic; `None` when a translation is not a multiple of `1/den`.
pub fn grid_fixed_points(g: &AffineIsometry, den: i64) -> Option<Vec<Vec<Rational>>> {
    let n = g.dim();
    let shift: Vec<i64> = g
        .translation()
        .iter()
        .map(|t| {
            let s = t * rat(den);
            s.is_integer().then(|| i64::try_from(s.to_integer()).unwrap())
        })
        .collect::<Option<_>>()?;
    let total = (den as usize).pow(n as u32);
    let mut out = Vec::new();
    let mut k = vec![0i64; n];
    for code in 0..total {
        let mut c = code;
        for slot in k.iter_mut() {
            *slot = (c % den as usize) as i64;
            c /= den as usize;
        }
        let fixed = (0..n).all(|i| {
            let y: i64 = (0..n).map(|j| g.matrix()[i][j] * k[j]).sum::<i64>() + shift[i];
            (y - k[i]).rem_euclid(den) == 0
        });
        if fixed {
            out.push(k.iter().map(|v| frac(*v, den)).collect());
        }
    }
    Some(out)
}

pub fn abs_max(v: &[Rational]) -> Rational {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(Rational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> Rational {
        frac(1, 2)
    }

    fn z() -> Rational {
        Rational::zero()
    }

    pub(crate) fn gamma() -> Vec<Generator> {
        let alpha = AffineIsometry::diagonal(&[1, 1, 1, -1, -1, -1, -1], &vec![z(); 7]).unwrap();
        let beta = AffineIsometry::diagonal(&[1, -1, -1, 1, 1, -1, -1], &[z(), z(), z(), z(), z(), half(), z()]).unwrap();
        let gamma = AffineIsometry::diagonal(&[-1, 1, -1, 1, -1, 1, -1], &[z(), z(), z(), z(), half(), z(), half()]).unwrap();
        vec![
            Generator { name: "alpha".into(), symbol: 'a', map: alpha },
            Generator { name: "beta".into(), symbol: 'b', map: beta },
            Generator { name: "gamma".into(), symbol: 'c', map: gamma },
        ]
    }

    #[test]
    fn rejects_non_permutation() {
        assert!(AffineIsometry::new(vec![vec![1, 1], vec![0, 1]], vec![z(), z()]).is_err());
        assert!(AffineIsometry::new(vec![vec![2, 0], vec![0, 1]], vec![z(), z()]).is_err());
    }

    #[test]
    fn composition_rule() {
        let a = AffineIsometry::new(vec![vec![0, -1], vec![1, 0]], vec![half(), z()]).unwrap();
        let b = AffineIsometry::new(vec![vec![1, 0], vec![0, -1]], vec![z(), frac(1, 4)]).unwrap();
        let x = vec![frac(1, 3), frac(1, 5)];
        let lhs = a.compose(&b).apply(&x);
        let rhs = a.apply(&b.apply(&x));
        for (p, q) in lhs.iter().zip(&rhs) {
            assert!((p - q).is_integer());
        }
        assert!(a.compose(&a.inverse()).is_identity());
    }

    #[test]
    fn gamma_group() {
        let g = generate_group(&gamma(), 64).unwrap();
        assert_eq!(g.order(), 8);
        assert!(g.is_abelian());
        assert!(g.element_orders().iter().filter(|o| **o != 1).all(|o| *o == 2));
        let phi = model_form(ModelKind::G2Phi);
        for e in &g.elements {
            assert_eq!(preserves_form(e, &phi).unwrap(), FormAction::Preserves);
        }
    }

    #[test]
    fn closure_cap() {
        assert_eq!(generate_group(&gamma(), 4).unwrap_err(), OrbifoldError::ClosureNotReached(4));
    }

    #[test]
    fn fixed_sets_of_gamma() {
        let g = generate_group(&gamma(), 64).unwrap();
        for w in ["a", "b", "c"] {
            let fs = fixed_set(&g.evaluate_word(w, &[]).unwrap());
            assert_eq!((fs.count(), fs.dimension()), (16, Some(3)), "{w}");
        }
        for w in ["bc", "ca", "ab", "abc"] {
            assert!(fixed_set(&g.evaluate_word(w, &[]).unwrap()).is_empty(), "{w}");
        }
        let id = fixed_set(&AffineIsometry::identity(7));
        assert_eq!((id.count(), id.dimension()), (1, Some(7)));
    }

    #[test]
    fn representatives_are_fixed() {
        let g = generate_group(&gamma(), 64).unwrap();
        for (_, e) in g.nonidentity() {
            for c in fixed_set(e).components {
                let y = e.apply(&c.point);
                assert!(y.iter().zip(&c.point).all(|(a, b)| (a - b).is_integer()));
                assert!(c.fixed_pointwise_by(e));
            }
        }
    }

    #[test]
    fn fixed_set_matches_grid_search() {
        let g = generate_group(&gamma(), 64).unwrap();
        for (_, e) in g.nonidentity() {
            let fs = fixed_set(e);
            let pts = grid_fixed_points(e, 4).unwrap();
            let tests: Vec<Membership> = fs.components.iter().map(Component::membership).collect();
            let mut hits = vec![0usize; fs.count()];
            for p in &pts {
                let on: Vec<usize> = (0..fs.count()).filter(|&i| tests[i].contains(p)).collect();
                assert_eq!(on.len(), 1);
                hits[on[0]] += 1;
            }
            assert!(hits.iter().all(|h| *h == hits[0] && *h > 0) || fs.is_empty());
        }
    }

    #[test]
    fn singular_set_of_gamma() {
        let g = generate_group(&gamma(), 64).unwrap();
        let s = singular_set(&g);
        assert_eq!(s.components.len(), 12);
        assert!(s.disjoint);
        for w in ["a", "b", "c"] {
            assert_eq!(s.count_by_source(w), 4);
        }
        for c in &s.components {
            assert_eq!(c.dimension, 3);
            assert_eq!(c.upstairs_count, 4);
            assert_eq!(c.normal_model.label, "C^2/{±1}");
        }
    }

    #[test]
    fn trivial_and_single_generator() {
        let t = generate_group(&[Generator { name: "id".into(), symbol: 'e', map: AffineIsometry::identity(7) }], 4).unwrap();
        assert_eq!(t.order(), 1);
        assert!(singular_set(&t).components.is_empty());
        assert_eq!(orbifold_betti(&t), vec![1, 7, 21, 35, 35, 21, 7, 1]);
        let a = generate_group(&gamma()[..1], 8).unwrap();
        assert_eq!(singular_set(&a).components.len(), 16);
    }

    #[test]
    fn betti_of_gamma() {
        let g = generate_group(&gamma(), 64).unwrap();
        let b = orbifold_betti(&g);
        assert_eq!(&b[1..4], &[0, 0, 7]);
        assert_eq!(Some(b), monomial_character_betti(&g));
    }

    #[test]
    fn eigen_phases_of_rotation() {
        let a = AffineIsometry::new(vec![vec![0, -1], vec![1, 0]], vec![z(), z()]).unwrap();
        assert_eq!(a.eigen_phases(), vec![frac(1, 4), frac(3, 4)]);
        assert_eq!(a.order(), 4);
    }

    #[test]
    fn config_errors_name_the_field() {
        let bad = "dim = 2\n[[generator]]\nname = \"a\"\nmatrix = [[1, 0], [0, 1]]\ntranslation = [\"1/0\", 0]\n";
        let e = GroupConfig::parse(bad).unwrap_err();
        assert!(e.to_string().contains("generator[0].translation"), "{e}");
        let bad = "dim = 2\n[[generator]]\nname = \"a\"\nmatrix = [[1, 1], [0, 1]]\n";
        assert!(GroupConfig::parse(bad).unwrap_err().to_string().contains("generator[0]"));
    }
}
