use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use syz::affine_base::{double, exchange_structures, describe, BasePair, DoubledBase, Structure};
use syz::catalog::{self, Example};
use syz::rational::{parse_q, Q};
use syz::report::{canonical_json, to_value};
use syz::slag_numeric::{self as slag, Jacobian, LeafScenario, QuadDifferential};
use syz::superpotential::{critical_points, toric_superpotential, LaurentElement};
use syz::svg::Scene;
use syz::tropical::{rays_for_base, rays_for_doubled, seam_census};
use syz::wallcross::{continue_superpotential, WallScenario};
use syz::Error;

#[derive(Parser)]
#[command(name = "syz", version, about = "Affine bases, superpotentials, wall-crossing and special Lagrangian numerics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the artifact into this directory instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Pass threshold for numeric checks.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Energy truncation order for wall-crossing, as `p/q`.
    #[arg(long, global = true)]
    truncation: Option<String>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Svg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Role {
    Symplectic,
    Complex,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a built-in example as JSON.
    Build { name: String },
    /// Total monodromy and boundary monodromy of every chart.
    Monodromy { input: String },
    /// Swap symplectic and complex roles.
    Exchange { input: String },
    /// Double a disc pair or an interval along its boundary.
    Double { input: String },
    /// Rays, alignments and seam counts of a doubled base.
    Census {
        input: String,
        #[arg(long, value_enum, default_value = "both")]
        structure: Role,
        /// Include every traced ray in the report.
        #[arg(long)]
        rays: bool,
    },
    /// Superpotential of a toric polytope or the continued one of a wall scenario.
    Superpotential { input: String },
    /// Critical points of the superpotential at a numeric value of q.
    Critical {
        input: String,
        #[arg(long, default_value_t = (-1.0f64).exp())]
        q_value: f64,
    },
    /// Walls of a scenario with their functions.
    Walls { input: String },
    /// Check the gluing identities of a wall scenario.
    VerifyGluing { input: String },
    /// Integrate leaves of a quadratic differential from a scenario file.
    Trace { input: String },
    /// Periods between the first two leaves of a scenario file.
    Periods { input: String },
    /// Residuals of the hypersurface local model.
    Localmodel {
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Coefficients of q(v), low degree first; complex values as `re:im`.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        q: Vec<String>,
        #[arg(long, default_value_t = 0.0)]
        a: f64,
        #[arg(long, default_value_t = 0.3)]
        b: f64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Draw an example as SVG.
    Render {
        input: String,
        #[arg(long, value_enum, default_value = "complex")]
        structure: Role,
    },
}

enum Artifact {
    Json(Value),
    Svg(String),
}

struct Outcome {
    name: String,
    artifact: Artifact,
    pass: bool,
    warnings: Vec<String>,
}

impl Outcome {
    fn ok(name: &str, v: Value) -> Self {
        Outcome { name: name.into(), artifact: Artifact::Json(v), pass: true, warnings: vec![] }
    }

    fn checked(name: &str, v: Value, pass: bool) -> Self {
        Outcome { name: name.into(), artifact: Artifact::Json(v), pass, warnings: vec![] }
    }
}

fn input_error(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn read_file(path: &str) -> syz::Result<String> {
    fs::read_to_string(path).map_err(|e| input_error(format!("{path}: {e}")))
}

fn load(input: &str) -> syz::Result<Example> {
    if catalog::NAMES.contains(&input) {
        return catalog::load(input);
    }
    let text = read_file(input)?;
    let e: Example = serde_json::from_str(&text).map_err(|e| input_error(format!("{input}: {e}")))?;
    e.validate()?;
    Ok(e)
}

fn leaf_scenario(input: &str) -> syz::Result<LeafScenario> {
    serde_json::from_str(&read_file(input)?).map_err(|e| input_error(format!("{input}: {e}")))
}

fn scenario(input: &str) -> syz::Result<WallScenario> {
    match load(input)? {
        Example::Scenario(s) => Ok(s),
        e => Err(input_error(format!("{input} is a {} example, not a wall scenario", e.kind()))),
    }
}

fn example_json(e: &Example) -> syz::Result<Value> {
    to_value(e)
}

fn superpotential_json(w: &LaurentElement, names: Option<&[String]>) -> syz::Result<Value> {
    let display = match names {
        Some(n) if n.len() == w.nvars() => w.display_with(&n.iter().map(String::as_str).collect::<Vec<_>>()),
        _ => w.to_string(),
    };
    Ok(json!({ "display": display, "element": to_value(w)? }))
}

fn chamber_names(s: &WallScenario, last: bool) -> Option<&[String]> {
    let c = if last { s.chambers.last() } else { s.chambers.first() };
    c.map(|c| c.variables.as_slice())
}

fn disc_monodromy(label: &str, b: &syz::affine_base::AffineBase) -> syz::Result<Value> {
    let r = b.check_total_monodromy()?;
    let boundary = b.boundary_monodromy()?;
    Ok(json!({
        "chart": label,
        "boundary_monodromy": describe(&boundary),
        "boundary_matrix": to_value(&boundary.linear)?,
        "boundary_trivial": boundary.is_identity(),
        "total_product": to_value(&r)?,
    }))
}

fn sphere_monodromy(label: &str, d: &DoubledBase) -> syz::Result<Value> {
    Ok(json!({ "chart": label, "total_product": to_value(&d.check_total_monodromy()?)? }))
}

fn monodromy(e: &Example) -> syz::Result<Outcome> {
    let charts = match e {
        Example::Pair(p) => vec![disc_monodromy("symplectic", &p.symplectic_base)?, disc_monodromy("complex", &p.complex_base)?],
        Example::Doubled(d) => vec![sphere_monodromy(role_name(d.half.structure), d)?],
        Example::DoubledPair(p) => vec![sphere_monodromy("symplectic", &p.symplectic_base)?, sphere_monodromy("complex", &p.complex_base)?],
        Example::Toric { base: Some(b), .. } if b.dimension == 2 => vec![disc_monodromy(role_name(b.structure), b)?],
        other => return Err(Error::Topology(format!("no monodromy to check on a {} example", other.kind()))),
    };
    let pass = charts.iter().all(|c| c["total_product"]["holds"] == json!(true));
    Ok(Outcome::checked("monodromy", json!({ "charts": charts, "pass": pass }), pass))
}

fn role_name(s: Structure) -> &'static str {
    match s {
        Structure::Symplectic => "symplectic",
        Structure::Complex => "complex",
    }
}

fn doubled_pair(e: Example) -> syz::Result<Example> {
    match e {
        Example::Pair(p) => Ok(Example::DoubledPair(BasePair::new(double(&p.symplectic_base, vec![])?, double(&p.complex_base, vec![])?))),
        Example::Toric { base: Some(b), .. } => Ok(Example::Doubled(double(&b, vec![])?)),
        other => Err(Error::Topology(format!("cannot double a {} example", other.kind()))),
    }
}

fn census(e: &Example, role: Role, with_rays: bool) -> syz::Result<Outcome> {
    let bases: Vec<&DoubledBase> = match e {
        Example::Doubled(d) => vec![d],
        Example::DoubledPair(p) => match role {
            Role::Symplectic => vec![&p.symplectic_base],
            Role::Complex => vec![&p.complex_base],
            Role::Both => vec![&p.symplectic_base, &p.complex_base],
        },
        other => return Err(Error::Topology(format!("census needs a doubled base, got a {} example", other.kind()))),
    };
    let mut out = vec![];
    for d in bases {
        let c = seam_census(d, None)?;
        let mut v = to_value(&c)?;
        if !with_rays {
            if let Some(m) = v.as_object_mut() {
                m.remove("rays");
            }
        }
        out.push(v);
    }
    Ok(Outcome::ok("census", json!({ "censuses": out })))
}

fn superpotential(e: &Example, trunc: Option<&Q>) -> syz::Result<Outcome> {
    match e {
        Example::Toric { polytope, .. } => Ok(Outcome::ok("superpotential", superpotential_json(&toric_superpotential(polytope)?, None)?)),
        Example::Scenario(s) => {
            let c = s.continuation.as_ref().ok_or_else(|| input_error("scenario has no continuation"))?;
            let order = s.truncation(trunc);
            let there = continue_superpotential(&c.superpotential, &s.walls, &c.path, order.as_ref())?;
            Ok(Outcome::ok("superpotential", json!({ "start": superpotential_json(&c.superpotential, chamber_names(s, false))?, "continued": superpotential_json(&there, chamber_names(s, true))? })))
        }
        other => Err(Error::Topology(format!("no superpotential for a {} example", other.kind()))),
    }
}

fn tolerance_or(t: Option<f64>, d: f64) -> syz::Result<f64> {
    match t {
        Some(x) if x.is_nan() || x <= 0.0 => Err(input_error("tolerance must be positive")),
        Some(x) => Ok(x),
        None => Ok(d),
    }
}

fn trace_all(sc: &LeafScenario, tol: f64) -> syz::Result<(QuadDifferential, Vec<slag::Trajectory>, Vec<Value>, bool)> {
    let theta = sc.differential()?;
    let mut leaves = vec![];
    let mut reports = vec![];
    let mut pass = true;
    for s in &sc.starts {
        let t = slag::trace_leaf(&theta, *s, sc.step, sc.max_steps)?;
        let phase = slag::phase_deviation(&theta, &t);
        let ok = t.closed && phase < tol;
        pass &= ok;
        let mut v = to_value(&t)?;
        if let Some(m) = v.as_object_mut() {
            m.insert("phase_deviation".into(), json!(phase));
            m.insert("pass".into(), json!(ok));
        }
        reports.push(v);
        leaves.push(t);
    }
    Ok((theta, leaves, reports, pass))
}

fn parse_complex(s: &str) -> syz::Result<num::complex::Complex64> {
    let bad = || input_error(format!("bad coefficient {s:?}"));
    let (re, im) = match s.split_once(':') {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => (s.trim().parse().map_err(|_| bad())?, 0.0),
    };
    Ok(num::complex::Complex64::new(re, im))
}

fn render(e: &Example, role: Role) -> syz::Result<Scene> {
    let pick = |p: &BasePair| match role {
        Role::Symplectic => p.symplectic_base.clone(),
        _ => p.complex_base.clone(),
    };
    Ok(match e {
        Example::Pair(p) if p.symplectic_base.dimension == 2 => {
            let b = pick(p);
            Scene::from_base(&b, &rays_for_base(&b, None)?)
        }
        Example::Toric { base: Some(b), .. } if b.dimension == 2 => Scene::from_base(b, &rays_for_base(b, None)?),
        Example::Doubled(d) => Scene::from_doubled(d, &rays_for_doubled(d, None)?),
        Example::DoubledPair(p) => {
            let d = if role == Role::Symplectic { &p.symplectic_base } else { &p.complex_base };
            Scene::from_doubled(d, &rays_for_doubled(d, None)?)
        }
        Example::Scenario(s) => Scene::from_scenario(s),
        _ => Scene::default(),
    })
}

fn run(cli: &Cli) -> syz::Result<Outcome> {
    let trunc = cli.truncation.as_deref().map(parse_q).transpose()?;
    match &cli.command {
        Command::Build { name } => Ok(Outcome::ok(name, example_json(&catalog::load(name)?)?)),
        Command::Monodromy { input } => monodromy(&load(input)?),
        Command::Exchange { input } => {
            let e = match load(input)? {
                Example::Pair(p) => Example::Pair(exchange_structures(&p)?),
                Example::DoubledPair(p) => Example::DoubledPair(exchange_structures(&p)?),
                other => return Err(Error::Topology(format!("cannot exchange on a {} example", other.kind()))),
            };
            Ok(Outcome::ok("exchange", example_json(&e)?))
        }
        Command::Double { input } => Ok(Outcome::ok("double", example_json(&doubled_pair(load(input)?)?)?)),
        Command::Census { input, structure, rays } => census(&load(input)?, *structure, *rays),
        Command::Superpotential { input } => superpotential(&load(input)?, trunc.as_ref()),
        Command::Critical { input, q_value } => {
            let w = match load(input)? {
                Example::Toric { polytope, .. } => toric_superpotential(&polytope)?,
                other => return Err(Error::Topology(format!("no superpotential for a {} example", other.kind()))),
            };
            let tol = tolerance_or(cli.tolerance, syz::superpotential::CRITICAL_RESIDUAL)?;
            let r = critical_points(&w, *q_value)?;
            let pass = r.points.iter().all(|p| p.residual < tol);
            let mut o = Outcome::checked("critical", json!({ "superpotential": w.to_string(), "q_value": q_value, "report": to_value(&r)?, "pass": pass }), pass);
            o.warnings.extend(r.warning.iter().cloned());
            Ok(o)
        }
        Command::Walls { input } => {
            let s = scenario(input)?;
            let walls: Vec<Value> = s.walls.iter().map(|w| Ok(json!({ "wall": to_value(w)?, "function": superpotential_json(&w.function, chamber_names(&s, false))?["display"] }))).collect::<syz::Result<_>>()?;
            let rel: Vec<String> = s.relations.iter().map(|r| r.to_string()).collect();
            Ok(Outcome::ok("walls", json!({ "walls": walls, "relations": rel, "truncation": s.truncation(trunc.as_ref()).map(|q| syz::rational::format_q(&q)) })))
        }
        Command::VerifyGluing { input } => {
            let s = scenario(input)?;
            let ids = s.verify(trunc.as_ref())?;
            let pass = ids.iter().all(|i| i.pass);
            Ok(Outcome::checked("verify-gluing", json!({ "identities": to_value(&ids)?, "pass": pass }), pass))
        }
        Command::Trace { input } => {
            let sc = leaf_scenario(input)?;
            let tol = tolerance_or(cli.tolerance, 1e-6)?;
            let (_, leaves, reports, pass) = trace_all(&sc, tol)?;
            if cli.format == Format::Svg {
                let scene = Scene { rays: leaves.iter().map(|t| t.points.windows(2).map(|w| [(w[0][0], w[0][1]), (w[1][0], w[1][1])]).collect()).collect(), ..Scene::default() };
                let d = scene.render();
                return Ok(Outcome { name: "trace".into(), artifact: Artifact::Svg(d.svg), pass, warnings: d.warnings });
            }
            Ok(Outcome::checked("trace", json!({ "leaves": reports, "pass": pass }), pass))
        }
        Command::Periods { input } => {
            let sc = leaf_scenario(input)?;
            if sc.starts.len() < 2 {
                return Err(input_error("periods need two starts, inner then outer"));
            }
            let (theta, leaves, _, _) = trace_all(&sc, f64::INFINITY)?;
            let cfg = sc.periods.clone().unwrap_or_default();
            let p = slag::period_pair(&theta, &cfg, &leaves[0], &leaves[1])?;
            Ok(Outcome::ok("periods", json!({ "base": to_value(&p)?, "double_cover": to_value(&p.doubled())?, "config": to_value(&cfg)? })))
        }
        Command::Localmodel { epsilon, q, a, b, samples } => {
            let coeffs = q.iter().map(|s| parse_complex(s)).collect::<syz::Result<Vec<_>>>()?;
            let tol = tolerance_or(cli.tolerance, slag::LOCAL_TOL)?;
            let mut r = slag::local_model_check(*epsilon, &coeffs, *a, *b, *samples, cli.seed, Jacobian::Analytic)?;
            r.pass = [r.max_constraint, r.max_tangent, r.max_omega, r.max_im_omega, r.max_xi_tangency, r.max_xi_contraction, r.max_xi_omega].iter().all(|x| *x < tol);
            let pass = r.pass;
            Ok(Outcome::checked("localmodel", to_value(&r)?, pass))
        }
        Command::Render { input, structure } => {
            let d = render(&load(input)?, *structure)?.render();
            Ok(Outcome { name: "render".into(), artifact: Artifact::Svg(d.svg), pass: true, warnings: d.warnings })
        }
    }
}

fn file_stem(name: &str) -> String {
    Path::new(name).file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| name.into())
}

fn emit(cli: &Cli, o: &Outcome) -> syz::Result<()> {
    let (text, ext) = match &o.artifact {
        Artifact::Json(v) => (canonical_json(v)?, "json"),
        Artifact::Svg(s) => (s.clone(), "svg"),
    };
    match &cli.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| input_error(format!("{}: {e}", dir.display())))?;
            let path = dir.join(format!("{}.{ext}", file_stem(&o.name)));
            fs::write(&path, text).map_err(|e| input_error(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn fail(e: &Error) -> ExitCode {
    let v = json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
    eprintln!("{}", serde_json::to_string(&v).unwrap_or_default());
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    for w in &outcome.warnings {
        eprintln!("{}", json!({ "warning": w }));
    }
    if let Err(e) = emit(&cli, &outcome) {
        return fail(&e);
    }
    if outcome.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
