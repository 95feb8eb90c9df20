use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use holonomy_core::algebraic::{spin7_group_checks, verify_example_y, DEFAULT_CONDUCTOR};
use holonomy_core::grassmann::{classify_plane, comass, OrientedPlane};
use holonomy_core::orbifold::{fixed_set, monomial_character_betti, orbifold_betti, parse_form_name, singular_set, GroupConfig};
use holonomy_core::pde::{
    coassoc_deformation_linearization, constant_self_dual, dirac_index, graph_plane, initial_data, plane_calibrated, random_self_dual_field, residual,
    solve_graph, GraphKind, Jet1, PdeError, SolverOptions, TopologyInvariants,
};
use holonomy_core::report::{Check, Report};
use holonomy_core::shipped;
use holonomy_core::structures::{model_form, verify_product_structures};
use holonomy_core::suite::{run_all, SuiteOptions};

#[derive(Parser, Debug)]
#[command(name = "holonomy", version, about = "Calibrated geometry and exceptional holonomy checks")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    restarts: Option<usize>,
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[arg(long, global = true)]
    conductor: Option<u32>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact identities between the model forms
    Verify {
        #[command(subcommand)]
        what: VerifyCommand,
    },
    /// Comass of a model form by Grassmannian ascent
    Comass {
        #[arg(long)]
        form: String,
    },
    Plane {
        #[command(subcommand)]
        what: PlaneCommand,
    },
    Orbifold {
        #[command(subcommand)]
        what: OrbifoldCommand,
    },
    Wps {
        #[command(subcommand)]
        what: WpsCommand,
    },
    Pde {
        #[command(subcommand)]
        what: PdeCommand,
    },
    Report {
        #[command(subcommand)]
        what: ReportCommand,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyCommand {
    Structures,
}

#[derive(Subcommand, Debug)]
enum PlaneCommand {
    /// Classify an oriented plane given as an n x k frame
    Classify {
        #[arg(long)]
        frame: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum OrbifoldCommand {
    /// Singular set of T^n/G
    Analyze { config: String },
    /// Fixed set of one group element
    Fixed {
        config: String,
        #[arg(long)]
        element: String,
    },
    /// Betti numbers of T^n/G
    Betti { config: String },
}

#[derive(Subcommand, Debug)]
enum WpsCommand {
    CheckExample,
}

#[derive(Subcommand, Debug)]
enum PdeCommand {
    /// Residual of the graph equation on a first-order jet
    Residual {
        #[arg(long, value_parser = parse_kind)]
        kind: GraphKind,
        #[arg(long)]
        jet: PathBuf,
    },
    /// Newton solve on the periodic grid
    Solve {
        #[arg(long, value_parser = parse_kind, default_value = "assoc")]
        kind: GraphKind,
        #[arg(long, default_value_t = 1e-2)]
        eps: f64,
        #[arg(long, default_value_t = 25)]
        max_iter: usize,
        /// Write the convergence trace as CSV
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Linearization of the coassociative condition over flat T^4
    Mclean {
        #[arg(long, default_value = "1e-2:1e-4")]
        eps_sweep: String,
        #[arg(long, default_value_t = 5)]
        fields: usize,
    },
    /// Index of the twisted Dirac operator
    Index {
        #[arg(long, allow_hyphen_values = true)]
        tau: i64,
        #[arg(long, allow_hyphen_values = true)]
        chi: i64,
        #[arg(long = "self-int", allow_hyphen_values = true)]
        self_int: i64,
    },
}

#[derive(Subcommand, Debug)]
enum ReportCommand {
    All,
}

fn parse_kind(s: &str) -> Result<GraphKind, String> {
    GraphKind::parse(s).ok_or_else(|| format!("unknown kind {s:?}; expected assoc, coassoc or cayley"))
}

fn load_config(arg: &str) -> Result<GroupConfig> {
    let text = match shipped::lookup(arg) {
        Some(t) => t.to_string(),
        None => std::fs::read_to_string(arg).with_context(|| format!("config: cannot read {arg}"))?,
    };
    GroupConfig::parse(&text).map_err(|e| anyhow!("config {arg}: {e}"))
}

/// Decade grid `a:b` from `a` down or up to `b`, or a comma list.
fn parse_sweep(s: &str) -> Result<Vec<f64>> {
    let vals: Vec<f64> = if let Some((a, b)) = s.split_once(':') {
        let (a, b): (f64, f64) = (a.trim().parse().context("eps-sweep: start")?, b.trim().parse().context("eps-sweep: end")?);
        if a <= 0.0 || b <= 0.0 {
            bail!("eps-sweep: values must be positive");
        }
        let steps = (a / b).log10().abs().round() as i32;
        let dir = if b < a { -1.0 } else { 1.0 };
        (0..=steps).map(|i| a * 10f64.powf(dir * f64::from(i))).collect()
    } else {
        s.split(',').map(|t| t.trim().parse::<f64>().with_context(|| format!("eps-sweep: bad number {t:?}"))).collect::<Result<_>>()?
    };
    if vals.is_empty() || vals.iter().any(|x| !x.is_finite() || *x <= 0.0) {
        bail!("eps-sweep: values must be positive");
    }
    Ok(vals)
}

fn read_jet(path: &Path, kind: GraphKind) -> Result<Jet1> {
    let text = std::fs::read_to_string(path).with_context(|| format!("jet: cannot read {}", path.display()))?;
    let mut value: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("jet: {} is not JSON", path.display()))?;
    let obj = value.as_object_mut().ok_or_else(|| anyhow!("jet: expected a JSON object"))?;
    obj.insert("kind".into(), json!(kind));
    let jet: Jet1 = serde_json::from_value(value).context("jet: expected fields value and partials")?;
    jet.validate().map_err(|e| anyhow!("jet.partials: {e}"))?;
    Ok(jet)
}

fn run(cli: &Cli, argv: Vec<String>) -> Result<Report> {
    let g = &cli.global;
    let seed = g.seed.unwrap_or(1);
    let mut report = Report::new(argv);
    match &cli.command {
        Command::Verify { what: VerifyCommand::Structures } => {
            report.checks = verify_product_structures().iter().map(Check::from).collect();
        }
        Command::Comass { form } => {
            let kind = parse_form_name(form).ok_or_else(|| anyhow!("--form: unknown form {form:?}; expected g2-phi, g2-star-phi or spin7-omega"))?;
            let restarts = g.restarts.unwrap_or(200);
            if restarts == 0 {
                bail!("--restarts: must be positive");
            }
            let tol = g.tol.unwrap_or(1e-10);
            let r = comass(&model_form(kind), restarts, seed, tol);
            report.checks.push(Check::new(
                format!("comass of {form}"),
                "the model form is a calibration: comass 1",
                (r.value - 1.0).abs() < 1e-4,
                "1 within 1e-4",
                format!("{:.12}", r.value),
            ));
            report.data = json!({
                "value": r.value,
                "restarts": restarts,
                "converged_restarts": r.converged_restarts(),
                "best_restart": r.best_restart,
                "plane": r.plane.columns(),
            });
        }
        Command::Plane { what: PlaneCommand::Classify { frame } } => {
            let text = std::fs::read_to_string(frame).with_context(|| format!("--frame: cannot read {}", frame.display()))?;
            let plane = OrientedPlane::parse(&text).map_err(|e| anyhow!("--frame: {e}"))?;
            let class = classify_plane(&plane, g.tol.unwrap_or(1e-9)).map_err(|e| anyhow!("--frame: {e}"))?;
            report.checks.push(Check::new(
                "plane classified",
                "a plane is calibrated iff the calibrating form restricts to its volume form",
                true,
                "classification",
                format!("{:?} (value {:.12})", class.kind, class.value),
            ));
            report.data = json!(class);
        }
        Command::Orbifold { what } => orbifold(what, &mut report)?,
        Command::Wps { what: WpsCommand::CheckExample } => {
            report.checks = spin7_group_checks();
            let c = verify_example_y(g.conductor.unwrap_or(DEFAULT_CONDUCTOR)).map_err(|e| anyhow!("--conductor: {e}"))?;
            report.checks.extend(c);
        }
        Command::Pde { what } => pde(what, g, seed, &mut report)?,
        Command::Report { what: ReportCommand::All } => {
            let mut opts = SuiteOptions { seed, ..SuiteOptions::default() };
            if let Some(r) = g.restarts {
                opts.restarts = r;
            }
            if let Some(n) = g.grid {
                opts.solve_grid = n;
            }
            if let Some(c) = g.conductor {
                opts.conductor = c;
            }
            let results = run_all(&opts);
            report.data = json!(results.iter().map(|r| json!({"id": r.id, "title": r.title, "passed": r.passed()})).collect::<Vec<_>>());
            report.checks = results.into_iter().flat_map(|r| r.checks).collect();
        }
    }
    Ok(report)
}

fn orbifold(what: &OrbifoldCommand, report: &mut Report) -> Result<()> {
    match what {
        OrbifoldCommand::Analyze { config } => {
            let cfg = load_config(config)?;
            let group = cfg.group().map_err(|e| anyhow!("config {config}: {e}"))?;
            let s = singular_set(&group);
            let mut shapes: std::collections::BTreeMap<String, usize> = std::collections::BTreeMap::new();
            for c in &s.components {
                *shapes.entry(format!("T^{} x {}", c.dimension, c.normal_model.label)).or_insert(0) += 1;
            }
            let summary: Vec<String> = shapes.iter().map(|(k, n)| format!("{n} x ({k})")).collect();
            report.checks.push(Check::new(
                "group generated",
                "the generators generate a finite group",
                true,
                "finite",
                format!("order {}, {}", group.order(), if group.is_abelian() { "abelian" } else { "nonabelian" }),
            ));
            report.checks.push(Check::new(
                "singular set",
                "singular set of the quotient",
                true,
                "components",
                if summary.is_empty() { "empty".into() } else { summary.join(", ") },
            ));
            report.checks.push(Check::new(
                "components disjoint",
                "singular components from distinct elements do not meet",
                s.disjoint,
                "disjoint",
                if s.disjoint { "disjoint".to_string() } else { format!("{} overlaps", s.overlaps.len()) },
            ));
            if let Some(form) = cfg.form() {
                let ok = group.nonidentity().all(|(_, h)| holonomy_core::orbifold::preserves_form(h, &form).is_ok_and(|a| a.sign() == Some(1)));
                report.checks.push(Check::new(
                    "form preserved",
                    "every element preserves the model form",
                    ok,
                    "preserved",
                    if ok { "preserved" } else { "not preserved" },
                ));
            }
            report.data = json!({ "name": cfg.name, "order": group.order(), "singular_set": s });
        }
        OrbifoldCommand::Fixed { config, element } => {
            let cfg = load_config(config)?;
            let group = cfg.group().map_err(|e| anyhow!("config {config}: {e}"))?;
            let g = cfg.element(&group, element).map_err(|e| anyhow!("--element: {e}"))?;
            let fs = fixed_set(&g);
            let shape = match fs.dimension() {
                Some(d) => format!("{} x T^{d}", fs.count()),
                None => "empty".into(),
            };
            report.checks.push(Check::new(format!("fixed set of {element}"), "fixed set of an affine isometry of the torus", true, "components", shape));
            report.data = json!(fs);
        }
        OrbifoldCommand::Betti { config } => {
            let cfg = load_config(config)?;
            let group = cfg.group().map_err(|e| anyhow!("config {config}: {e}"))?;
            let inv = orbifold_betti(&group);
            let chr = monomial_character_betti(&group);
            report.checks.push(Check::new(
                "invariant forms and character count agree",
                "b_k of T^n/G is the dimension of the G-invariant constant k-forms",
                chr.as_ref().is_none_or(|c| *c == inv),
                format!("{inv:?}"),
                chr.as_ref().map_or("character count unavailable".to_string(), |c| format!("{c:?}")),
            ));
            report.data = json!({ "betti": inv });
        }
    }
    Ok(())
}

fn pde(what: &PdeCommand, g: &Global, seed: u64, report: &mut Report) -> Result<()> {
    match what {
        PdeCommand::Residual { kind, jet } => {
            let jet = read_jet(jet, *kind)?;
            let tol = g.tol.unwrap_or(1e-10);
            let r = residual(&jet).map_err(|e| anyhow!("{e}"))?;
            let plane = graph_plane(&jet).map_err(|e| anyhow!("{e}"))?;
            let calibrated = plane_calibrated(*kind, &plane, 1e-9);
            let vanishes = r.max_abs() < tol;
            report.checks.push(Check::new(
                "residual agrees with plane oracle",
                "the graph equation holds iff the graph tangent plane is calibrated",
                vanishes == calibrated,
                format!("residual zero iff calibrated ({})", if calibrated { "calibrated" } else { "not calibrated" }),
                format!("{:?}", r.0),
            ));
            report.data = json!({ "kind": kind, "residual": r.0, "calibrated": calibrated });
        }
        PdeCommand::Solve { kind, eps, max_iter, trace } => {
            if *kind != GraphKind::Associative {
                bail!("--kind: only assoc is supported by the periodic solver");
            }
            let grid = g.grid.unwrap_or(16);
            if grid < 5 {
                bail!("--grid: {grid} is below the stencil support 5");
            }
            let opts = SolverOptions { tol: g.tol.unwrap_or(1e-8), max_iter: *max_iter, ..SolverOptions::default() };
            let init = initial_data(*kind, grid, *eps, seed);
            let anchor = "small-data solutions of the associative graph equation on T^3";
            match solve_graph(&init, *kind, &opts, seed) {
                Ok(out) => {
                    if let Some(p) = trace {
                        std::fs::write(p, out.trace_csv()).with_context(|| format!("--trace: cannot write {}", p.display()))?;
                    }
                    report.checks.push(Check::new(
                        "newton converges",
                        anchor,
                        true,
                        format!("residual < {:e}", opts.tol),
                        format!("{:.2e} after {} iterations", out.residual, out.iterations),
                    ));
                    report.data = json!({ "grid": grid, "eps": eps, "iterations": out.iterations, "residual": out.residual, "trace": out.trace });
                }
                Err(e @ (PdeError::Diverged { .. } | PdeError::NotConverged { .. } | PdeError::Singular(_))) => {
                    report.checks.push(Check::new("newton converges", anchor, false, format!("residual < {:e}", opts.tol), e));
                }
                Err(e) => bail!("{e}"),
            }
        }
        PdeCommand::Mclean { eps_sweep, fields } => {
            let eps = parse_sweep(eps_sweep)?;
            let grid = g.grid.unwrap_or(12);
            let tol = g.tol.unwrap_or(1e-3);
            let anchor = "dP(0)(beta) = d beta for graphs over the flat coassociative T^4";
            let mut data = Vec::new();
            for s in 0..*fields as u64 {
                let r = coassoc_deformation_linearization(&random_self_dual_field(grid, seed.wrapping_add(s)), &eps).map_err(|e| anyhow!("{e}"))?;
                report.checks.push(Check::new(
                    format!("random self-dual field {s}"),
                    anchor,
                    r.final_relative_error() < tol,
                    format!("relative error < {tol:e}"),
                    format!("{:.3e}", r.final_relative_error()),
                ));
                data.push(json!(r));
            }
            for k in 0..3 {
                let r = coassoc_deformation_linearization(&constant_self_dual(grid, k), &eps).map_err(|e| anyhow!("{e}"))?;
                let worst = r.errors.iter().fold(0.0f64, |m, x| m.max(*x));
                report.checks.push(Check::new(
                    format!("constant self-dual form {}", k + 1),
                    "constant self-dual forms give flat coassociative T^4",
                    worst < 1e-12,
                    "limit 0",
                    format!("{worst:.1e}"),
                ));
                data.push(json!(r));
            }
            report.data = json!(data);
        }
        PdeCommand::Index { tau, chi, self_int } => {
            let inv = TopologyInvariants { signature: *tau, euler: *chi, self_intersection: *self_int };
            let index = dirac_index(inv).map_err(|e| anyhow!("--chi/--self-int: {e}"))?;
            report.checks.push(Check::new("index", "ind D_N = tau - chi/2 - [N].[N]/2", true, "integer", index));
            report.data = json!({ "index": index });
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let mut report = match run(&cli, argv.into_iter().skip(1).collect()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    report.timing_ms = start.elapsed().as_secs_f64() * 1e3;
    match cli.global.format {
        Format::Text => print!("{}", report.to_text()),
        Format::Json => println!("{}", serde_json::to_string_pretty(&report).expect("report serializes")),
    }
    ExitCode::from(if report.all_passed() { 0 } else { 1 })
}
