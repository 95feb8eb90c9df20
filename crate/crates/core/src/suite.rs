//! The thirteen acceptance criteria as named checks.

use std::collections::BTreeMap;
use std::time::Instant;

use crate::algebraic::{spin7_group_checks, verify_example_y, DEFAULT_CONDUCTOR};
use crate::grassmann::{calibrated_family_nullity, comass, restrict_to_plane, OrientedPlane};
use crate::orbifold::{fixed_set, involution_locus, monomial_character_betti, orbifold_betti, singular_set, GroupConfig};
use crate::pde::{
    coassoc_deformation_linearization, constant_self_dual, dirac_index, dirac_linearization_check, graph_planes_calibrated, initial_data,
    random_self_dual_field, residual_oracle_agreement, solve_graph, Derivative, GraphKind, PdeError, SolverOptions, TopologyInvariants,
};
use crate::report::Check;
use crate::shipped;
use crate::structures::{model_form, stabilizer_algebra, verify_product_structures, ModelKind};

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub seed: u64,
    pub restarts: usize,
    pub jets: usize,
    pub solve_grid: usize,
    pub mclean_grid: usize,
    pub conductor: u32,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { seed: 1, restarts: 200, jets: 1000, solve_grid: 16, mclean_grid: 12, conductor: DEFAULT_CONDUCTOR }
    }
}

pub const CRITERIA: [(usize, &str); 13] = [
    (1, "exact Hodge duals and product structures"),
    (2, "stabilizer dimensions"),
    (3, "T^7 orbifold fixed sets and singular set"),
    (4, "involution fixed loci on T^7/Gamma"),
    (5, "Spin(7) subgroup and weighted hypersurface"),
    (6, "orbifold Betti numbers by two methods"),
    (7, "comass of the model forms"),
    (8, "nullity of calibrated families"),
    (9, "residual versus plane oracle"),
    (10, "Dirac linearization slopes"),
    (11, "flat coassociative linearization"),
    (12, "periodic Newton solve of the associative graph equation"),
    (13, "Dirac index arithmetic"),
];

/// Wall-clock limits in seconds, where the criterion states one.
fn runtime_limit(id: usize) -> Option<f64> {
    match id {
        1 => Some(1.0),
        2 => Some(5.0),
        3 => Some(1.0),
        4 => Some(2.0),
        5 => Some(5.0),
        7 => Some(300.0),
        8 => Some(60.0),
        11 => Some(600.0),
        _ => None,
    }
}

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: usize,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub elapsed_ms: f64,
}

impl CriterionResult {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

pub fn run_criterion(id: usize, opts: &SuiteOptions) -> CriterionResult {
    let title = CRITERIA.iter().find(|c| c.0 == id).map_or("unknown", |c| c.1);
    let start = Instant::now();
    let mut checks = match id {
        1 => c1_structures(),
        2 => c2_stabilizers(),
        3 => c3_orbifold(),
        4 => c4_involutions(),
        5 => c5_spin7_and_wps(opts),
        6 => c6_betti(),
        7 => c7_comass(opts),
        8 => c8_nullity(),
        9 => c9_oracle(opts),
        10 => c10_slopes(opts),
        11 => c11_mclean(opts),
        12 => c12_solve(opts),
        13 => c13_index(),
        _ => vec![Check::new("criterion exists", "", false, "1..=13", id)],
    };
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    if let Some(limit) = runtime_limit(id) {
        checks.push(Check::new(
            format!("criterion {id} runtime"),
            "stated runtime budget",
            elapsed_ms / 1e3 < limit,
            format!("< {limit} s"),
            format!("{:.3} s", elapsed_ms / 1e3),
        ));
    }
    for c in &mut checks {
        c.name = format!("[{id}] {}", c.name);
    }
    CriterionResult { id, title, checks, elapsed_ms }
}

pub fn run_all(opts: &SuiteOptions) -> Vec<CriterionResult> {
    CRITERIA.iter().map(|(id, _)| run_criterion(*id, opts)).collect()
}

fn c1_structures() -> Vec<Check> {
    verify_product_structures().iter().map(Check::from).collect()
}

fn c2_stabilizers() -> Vec<Check> {
    [
        (ModelKind::G2Phi, 14, "the stabilizer of phi0 in GL(7) is G2, of dimension 14"),
        (ModelKind::Spin7Omega, 21, "the stabilizer of Omega0 in GL(8) is Spin(7), of dimension 21"),
    ]
    .iter()
    .map(|(k, d, anchor)| Check::equal(format!("dim stabilizer of {k:?}"), *anchor, d, stabilizer_algebra(&model_form(*k)).dimension))
    .collect()
}

fn config(text: &str) -> GroupConfig {
    GroupConfig::parse(text).expect("bundled configuration parses")
}

fn c3_orbifold() -> Vec<Check> {
    let cfg = config(shipped::EX31);
    let group = cfg.group().expect("finite group");
    let mut checks = Vec::new();
    for w in ["a", "b", "c"] {
        let fs = fixed_set(&cfg.element(&group, w).expect("word"));
        checks.push(Check::equal(
            format!("fixed set of {w}"),
            "alpha, beta, gamma each fix 16 copies of T^3",
            "16 x T^3",
            format!("{} x T^{}", fs.count(), fs.dimension().map_or("-".into(), |d| d.to_string())),
        ));
    }
    for w in ["bc", "ca", "ab", "abc"] {
        let fs = fixed_set(&cfg.element(&group, w).expect("word"));
        checks.push(Check::equal(
            format!("fixed set of {w}"),
            "beta gamma, gamma alpha, alpha beta, alpha beta gamma act freely",
            "empty",
            if fs.is_empty() { "empty".into() } else { format!("{} components", fs.count()) },
        ));
    }
    let s = singular_set(&group);
    let labels: Vec<&str> = s.components.iter().map(|c| c.normal_model.label.as_str()).collect();
    checks.push(Check::equal(
        "singular set components",
        "the singular set of T^7/Gamma is 12 disjoint copies of T^3",
        "12 x T^3, disjoint",
        format!("{} x T^3, {}", s.components.len(), if s.disjoint { "disjoint" } else { "overlapping" }),
    ));
    checks.push(Check::new(
        "normal model",
        "each singular T^3 has a neighbourhood modelled on T^3 x C^2/{+-1}",
        !labels.is_empty() && labels.iter().all(|l| *l == "C^2/{±1}") && s.components.iter().all(|c| c.dimension == 3),
        "C^2/{±1} for all",
        format!("{:?}", labels.iter().collect::<std::collections::BTreeSet<_>>()),
    ));
    checks
}

fn c4_involutions() -> Vec<Check> {
    let mut checks = Vec::new();
    let cfg = config(shipped::EX54_SIGMA);
    let group = cfg.group().expect("finite group");
    let sigma = cfg.involution.clone().expect("involution");
    let locus = involution_locus(&sigma, &group).expect("involution locus");
    let upstairs: usize = locus.pieces.iter().filter(|p| p.dimension == Some(3)).map(|p| p.count).sum();
    checks.push(Check::equal("sigma fixes 16 T^3 upstairs", "sigma = (x1, x2, x3, 1/2 - x4, -x5, -x6, -x7) fixes 16 copies of T^3 in T^7", 16, upstairs));
    checks.push(Check::equal("image in T^7/Gamma", "the fixed T^3s map to 2 copies of T^3 in T^7/Gamma", "{3: 2}", format!("{:?}", locus.quotient_counts())));
    checks.push(Check::new(
        "disjoint from singular set",
        "the fixed locus of sigma does not meet the singular set of T^7/Gamma",
        !locus.meets_singular_set,
        "disjoint",
        if locus.meets_singular_set { "meets" } else { "disjoint" },
    ));
    checks.push(Check::new(
        "Gamma free on the 16",
        "Gamma acts freely on the 16 fixed T^3",
        locus.free_on_components,
        "free",
        if locus.free_on_components { "free" } else { "not free" },
    ));

    let cfg = config(shipped::EX55_SIGMA);
    let group = cfg.group().expect("finite group");
    let sigma = cfg.involution.clone().expect("involution");
    let locus = involution_locus(&sigma, &group).expect("involution locus");
    let mut by_elem: BTreeMap<String, (usize, Option<usize>)> = BTreeMap::new();
    for p in &locus.pieces {
        by_elem.insert(p.element.clone(), (p.count, p.dimension));
    }
    let s_fix = by_elem.get("s").copied().unwrap_or((0, None));
    let sab_fix = by_elem
        .iter()
        .find(|(w, _)| {
            let mut c: Vec<char> = w.chars().collect();
            c.sort_unstable();
            c == ['a', 'b', 's']
        })
        .map(|(_, v)| *v)
        .unwrap_or((0, None));
    checks.push(Check::equal(
        "sigma fixes 8 T^4",
        "sigma = (1/2 - x1, x2, x3, x4, x5, 1/2 - x6, 1/2 - x7) fixes 8 copies of T^4",
        "(8, Some(4))",
        format!("{s_fix:?}"),
    ));
    checks.push(Check::equal("sigma alpha beta fixes 128 points", "sigma alpha beta fixes 128 points", "(128, Some(0))", format!("{sab_fix:?}")));
    checks.push(Check::equal(
        "quotient locus",
        "the fixed locus in T^7/Gamma is one T^4 and 16 points",
        "{0: 16, 4: 1}",
        format!("{:?}", locus.quotient_counts()),
    ));
    checks
}

fn c5_spin7_and_wps(opts: &SuiteOptions) -> Vec<Check> {
    let mut checks = spin7_group_checks();
    match verify_example_y(opts.conductor) {
        Ok(c) => checks.extend(c),
        Err(e) => checks.push(Check::new("weighted hypersurface checks", "arithmetic in Q(zeta_N)", false, "field large enough", e)),
    }
    checks
}

fn c6_betti() -> Vec<Check> {
    let group = config(shipped::EX31).group().expect("finite group");
    let inv = orbifold_betti(&group);
    let chr = monomial_character_betti(&group);
    let b123 = format!("({}, {}, {})", inv[1], inv[2], inv[3]);
    vec![
        Check::equal("invariant rank", "b1, b2, b3 of T^7/Gamma are 0, 0, 7", "(0, 0, 7)", b123),
        Check::new(
            "character enumeration agrees",
            "brute-force monomial characters give the same Betti numbers",
            chr.as_ref() == Some(&inv),
            format!("{inv:?}"),
            format!("{chr:?}"),
        ),
    ]
}

fn c7_comass(opts: &SuiteOptions) -> Vec<Check> {
    let mut checks = Vec::new();
    for (k, anchor) in [
        (ModelKind::G2Phi, "phi0 is a calibration: comass 1"),
        (ModelKind::G2StarPhi, "star phi0 is a calibration: comass 1"),
        (ModelKind::Spin7Omega, "Omega0 is a calibration: comass 1"),
    ] {
        let r = comass(&model_form(k), opts.restarts, opts.seed, 1e-10);
        checks.push(Check::new(
            format!("comass of {k:?}"),
            anchor,
            (r.value - 1.0).abs() < 1e-4,
            "1 within 1e-4",
            format!("{:.12} ({} restarts, {} converged)", r.value, opts.restarts, r.converged_restarts()),
        ));
    }
    for (k, plane, anchor) in [
        (ModelKind::G2Phi, OrientedPlane::coordinate(7, &[1, 2, 3]), "phi0 calibrates U = span(e1, e2, e3)"),
        (ModelKind::G2StarPhi, OrientedPlane::coordinate(7, &[4, 5, 6, 7]), "star phi0 calibrates V = span(e4, .., e7)"),
        (ModelKind::Spin7Omega, OrientedPlane::coordinate(8, &[1, 2, 3, 4]), "Omega0 calibrates span(e1, .., e4)"),
    ] {
        let v = restrict_to_plane(&model_form(k), &plane).unwrap_or(f64::NAN);
        checks.push(Check::new(format!("model plane value for {k:?}"), anchor, (v - 1.0).abs() < 1e-12, "1 within 1e-12", format!("{v}")));
    }
    checks
}

fn c8_nullity() -> Vec<Check> {
    [
        (ModelKind::G2Phi, OrientedPlane::coordinate(7, &[1, 2, 3]), 8, "associative 3-planes form an 8-dimensional family"),
        (ModelKind::G2StarPhi, OrientedPlane::coordinate(7, &[4, 5, 6, 7]), 8, "coassociative 4-planes form an 8-dimensional family"),
        (ModelKind::Spin7Omega, OrientedPlane::coordinate(8, &[1, 2, 3, 4]), 12, "Cayley 4-planes form a 12-dimensional family"),
    ]
    .into_iter()
    .flat_map(|(k, plane, expected, anchor)| match calibrated_family_nullity(&model_form(k), &plane) {
        Ok(r) => vec![
            Check::equal(format!("nullity for {k:?}"), anchor, expected, r.nullity),
            Check::new(format!("eigenvalue gap for {k:?}"), anchor, r.gap >= 1e3, ">= 1e3", format!("{:.3e}", r.gap)),
        ],
        Err(e) => vec![Check::new(format!("nullity for {k:?}"), anchor, false, expected, e)],
    })
    .collect()
}

fn c9_oracle(opts: &SuiteOptions) -> Vec<Check> {
    GraphKind::ALL
        .iter()
        .map(|k| match residual_oracle_agreement(*k, opts.jets, opts.seed, 1e-10, 1e-9) {
            Ok(r) => Check::new(
                format!("{k} residual vs plane oracle"),
                "the graph equation holds exactly when the graph tangent plane is calibrated",
                r.disagreements == 0 && r.calibrated_samples > 0,
                "0 disagreements",
                format!(
                    "{} disagreements in {} jets ({} calibrated, max residual there {:.1e})",
                    r.disagreements, r.samples, r.calibrated_samples, r.max_residual_on_calibrated
                ),
            ),
            Err(e) => Check::new(format!("{k} residual vs plane oracle"), "derived cross product", false, "derivation succeeds", e),
        })
        .collect()
}

pub const SLOPE_EPS: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

fn c10_slopes(opts: &SuiteOptions) -> Vec<Check> {
    [
        (GraphKind::Associative, "the associative graph equation linearizes to the Dirac equation on R^3"),
        (GraphKind::Cayley, "the Cayley graph equation linearizes to the positive Dirac equation on R^4"),
    ]
    .iter()
    .map(|(k, anchor)| match dirac_linearization_check(*k, &SLOPE_EPS, opts.seed) {
        Ok(r) => Check::new(
            format!("{k} linearization slope"),
            *anchor,
            r.passed,
            format!("{:.1} +- {:.1}", r.expected_slope, r.tolerance),
            format!("{:.4}", r.slope),
        ),
        Err(e) => Check::new(format!("{k} linearization slope"), *anchor, false, "computed", e),
    })
    .collect()
}

pub const MCLEAN_EPS: [f64; 3] = [1e-2, 1e-3, 1e-4];

fn c11_mclean(opts: &SuiteOptions) -> Vec<Check> {
    let mut checks = Vec::new();
    let anchor = "dP(0)(beta) = d beta for graphs over the flat coassociative T^4";
    for s in 0..5 {
        let beta = random_self_dual_field(opts.mclean_grid, opts.seed.wrapping_add(s));
        match coassoc_deformation_linearization(&beta, &MCLEAN_EPS) {
            Ok(r) => checks.push(Check::new(
                format!("random self-dual field {s}"),
                anchor,
                r.final_relative_error() < 1e-3,
                "relative error < 1e-3 at eps = 1e-4",
                format!("{:.3e} on {}^4 (worst at {:?})", r.final_relative_error(), r.grid, r.worst_point),
            )),
            Err(e) => checks.push(Check::new(format!("random self-dual field {s}"), anchor, false, "computed", e)),
        }
    }
    for k in 0..3 {
        let r = coassoc_deformation_linearization(&constant_self_dual(opts.mclean_grid, k), &MCLEAN_EPS);
        let worst = r.as_ref().map(|r| r.errors.iter().fold(0.0f64, |m, x| m.max(*x))).unwrap_or(f64::NAN);
        checks.push(Check::new(
            format!("constant self-dual form {}", k + 1),
            "constant self-dual forms give the 3-dimensional family of flat coassociative T^4",
            worst < 1e-12,
            "limit 0",
            format!("{worst:.1e}"),
        ));
    }
    checks
}

fn c12_solve(opts: &SuiteOptions) -> Vec<Check> {
    let anchor = "small-data solutions of the associative graph equation on T^3";
    let init = initial_data(GraphKind::Associative, opts.solve_grid, 1e-2, opts.seed);
    let sopts = SolverOptions::default();
    match solve_graph(&init, GraphKind::Associative, &sopts, opts.seed) {
        Ok(out) => {
            let (ok, total, worst) = graph_planes_calibrated(&out.field, GraphKind::Associative, 1e-7, Derivative::FourthOrder);
            vec![
                Check::new(
                    "newton converges",
                    anchor,
                    out.residual < 1e-8 && out.iterations <= 25,
                    "residual < 1e-8 in <= 25 iterations",
                    format!("{:.2e} after {} iterations", out.residual, out.iterations),
                ),
                Check::new(
                    "graph planes associative",
                    anchor,
                    ok == total,
                    format!("{total} of {total}"),
                    format!("{ok} of {total} (min phi0 value {worst:.12})"),
                ),
            ]
        }
        Err(e) => vec![Check::new("newton converges", anchor, false, "convergence", e)],
    }
}

fn c13_index() -> Vec<Check> {
    let anchor = "ind D_N = tau - chi/2 - [N].[N]/2";
    let mut checks: Vec<Check> = [("T^4", 0, 0, 0, 0), ("S^4", 0, 2, 0, -1), ("K3", -16, 24, 0, -28)]
        .iter()
        .map(|(name, t, c, s, e)| {
            let got = dirac_index(TopologyInvariants { signature: *t, euler: *c, self_intersection: *s });
            Check::new(format!("index of {name}"), anchor, got == Ok(*e), e, format!("{got:?}"))
        })
        .collect();
    let odd = dirac_index(TopologyInvariants { signature: 0, euler: 3, self_intersection: 0 });
    checks.push(Check::new("parity guard", anchor, matches!(odd, Err(PdeError::Parity(3))), "parity error", format!("{odd:?}")));
    checks
}
