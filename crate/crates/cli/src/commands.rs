//! Subcommand implementations.

use std::process::ExitCode;

use serde::Serialize;

use adsdeform_core::bhtz::{
    causal_character, component_id, in_horizon, in_singularity, mass_momentum, CausalClass,
    KillingPair, TwistedCoords,
};
use adsdeform_core::grid::{Grid2, SampledFn};
use adsdeform_core::lie::GroupElement;
use adsdeform_core::poisson::{bfield_calibrate, bfield_residual, BFieldProfile};
use adsdeform_core::starprod::{
    assoc_defect, cutoff, gaussian_bump, star, trace_defect, StarConfig,
};
use adsdeform_core::symsym::SymPoint;
use adsdeform_core::torus::{first_order_check, star_theta, DeformationMatrix, TrigPolynomial};
use adsdeform_core::udf::{AnElement, BhtzAction};
use adsdeform_core::verify::{render_check, run_suite, suite_names};
use adsdeform_core::{bhtz, Cx};

use crate::args::{ArgError, Args};
use crate::config::{ConfigError, RunConfig};
use crate::emit::{self, EmitError};
use crate::pool;

#[derive(Debug)]
pub enum CliError {
    Args(ArgError),
    Config(ConfigError),
    Io(EmitError),
    Numeric(String),
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Args(_) | CliError::Config(_) => 2,
            CliError::Verification(_) | CliError::Numeric(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Args(e) => write!(f, "{e}"),
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Numeric(e) => write!(f, "{e}"),
            CliError::Verification(e) => write!(f, "{e}"),
        }
    }
}

impl From<ArgError> for CliError {
    fn from(e: ArgError) -> Self {
        CliError::Args(e)
    }
}
impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}
impl From<EmitError> for CliError {
    fn from(e: EmitError) -> Self {
        CliError::Io(e)
    }
}

pub fn dispatch(argv: &[String]) -> Result<ExitCode, CliError> {
    if argv.is_empty() || argv[0] == "help" || argv[0] == "--help" {
        print_help();
        return Ok(ExitCode::SUCCESS);
    }
    let args = Args::parse(argv)?;
    match args.subcommand.as_str() {
        "verify" => cmd_verify(&args),
        "classify" => cmd_classify(&args),
        "bfield" => cmd_bfield(&args),
        "torus" => cmd_torus(&args),
        "symsym" => cmd_symsym(&args),
        "bhtz-product" => cmd_bhtz_product(&args),
        "spectral" => cmd_spectral(&args),
        other => Err(CliError::Args(ArgError(format!(
            "unknown subcommand `{other}`; try `adsdeform help`"
        )))),
    }
}

fn print_help() {
    println!(
        "adsdeform — BTZ causal structure and non-formal deformation products

USAGE: adsdeform <SUBCOMMAND> [--flag value ...]

SUBCOMMANDS
  verify        run invariant suites
                --suite all|group|metric|causal|bfield|torus|symsym|star|udf|spectral
                --seed N (default 20260808)   --out FILE (JSON report)
  classify      causal scan of the quotient geometry
                --mass M (1.0) --spin J (0.0) --grid PxNxA (16x8x8)
                --phi-range R (6.28) --n-range R (2.0) --a-range R (2.0)
                --out FILE (CSV)
  bfield        B-field profile and admissibility residual
                --range-lo A0 (-3) --range-hi A1 (3) --samples N (61) --out FILE
  torus         quantum torus products of a mode list
                --theta T (0.3) --modes FILE (JSON {{\"modes\": [[m1,m2],...]}})
                --out FILE
  symsym        symmetric-space star product on the default window
                --theta T (0.3) --grid N (24) --window H (2.0)
                --fn-a SPEC --fn-b SPEC --fn-c SPEC --out FILE
  bhtz-product  deformed product on a BTZ fiber
                --kind spinless|rotating --mass M (1.0) --alpha A (0.3)
                --theta T (0.3) --grid N (32) --window H (4.0)
                --fn-a SPEC --fn-b SPEC --out FILE
  spectral      spinor-module checks
                --check dirac|derivation|module --theta T (0.3) --out FILE

Function SPECs: gauss:ca=0.2,cl=0.1,r=0.8  or  cutoff:r=1.4,edge=0.45
Environment: ADSDEFORM_THREADS caps worker parallelism.
Exit codes: 0 ok, 2 config error, 3 verification failure, 4 I/O error."
    );
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct VerifyCheck {
    name: String,
    defect: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct VerifySuite {
    suite: String,
    pass: bool,
    checks: Vec<VerifyCheck>,
}

fn cmd_verify(args: &Args) -> Result<ExitCode, CliError> {
    let which = args.get_str("suite", "all");
    let seed = args.get_u64("seed", 20260808)?;
    let names: Vec<&str> = if which == "all" {
        suite_names().to_vec()
    } else {
        let name = suite_names()
            .into_iter()
            .find(|n| *n == which)
            .ok_or_else(|| ArgError(format!("unknown suite `{which}`")))?;
        vec![name]
    };
    let mut suites = Vec::new();
    let mut all_pass = true;
    for name in names {
        let rep = run_suite(name, seed).expect("registered suite");
        for c in &rep.checks {
            println!("{}", render_check(&rep.suite, c));
        }
        all_pass &= rep.pass();
        suites.push(VerifySuite {
            suite: rep.suite.clone(),
            pass: rep.pass(),
            checks: rep
                .checks
                .iter()
                .map(|c| VerifyCheck {
                    name: c.name.clone(),
                    defect: c.defect,
                    tolerance: c.tolerance,
                    pass: c.pass,
                })
                .collect(),
        });
    }
    let config = RunConfig {
        seed,
        ..Default::default()
    };
    let body = emit::to_json(&emit::artifact(&config, &suites));
    if let Some(path) = args.get("out") {
        emit::write_out(Some(path), &body)?;
    }
    if all_pass {
        println!("verify: all checks passed");
        Ok(ExitCode::SUCCESS)
    } else {
        Err(CliError::Verification("one or more checks failed".into()))
    }
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

fn cmd_classify(args: &Args) -> Result<ExitCode, CliError> {
    let mass = args.get_f64("mass", 1.0)?;
    let spin = args.get_f64("spin", 0.0)?;
    let spec = args.get_str("grid", "16x8x8");
    let dims: Vec<usize> = spec
        .split('x')
        .map(|s| s.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| ArgError(format!("--grid: cannot parse `{spec}` as PxNxA")))?;
    if dims.len() != 3 || dims.iter().any(|&d| d < 2) {
        return Err(CliError::Args(ArgError(format!(
            "--grid must be three counts >= 2, got `{spec}`"
        ))));
    }
    let config = RunConfig {
        mass,
        spin,
        ..Default::default()
    };
    config.validate()?;
    let phi_r = args.get_f64("phi-range", 6.28)?;
    let n_r = args.get_f64("n-range", 2.0)?;
    let a_r = args.get_f64("a-range", 2.0)?;

    // Killing pair with the requested mass and angular momentum
    let bl = 0.5 * (mass + spin);
    let br = 0.5 * (mass - spin);
    let xi = KillingPair::new(
        bhtz::h_unit().scale(bl.sqrt()),
        bhtz::h_unit().scale(-br.sqrt()),
    );
    let (m_chk, j_chk, generic) = mass_momentum(&xi);
    if !generic {
        return Err(CliError::Config(ConfigError::BadMassSpin { mass, spin }));
    }

    let (np, nn, na) = (dims[0], dims[1], dims[2]);
    let total = np * nn * na;
    let rows = pool::indexed_map(total, config.threads, |idx| {
        let ip = idx / (nn * na);
        let inn = (idx / na) % nn;
        let ia = idx % na;
        let phi = -phi_r + 2.0 * phi_r * ip as f64 / (np - 1) as f64;
        let n = -n_r + 2.0 * n_r * inn as f64 / (nn - 1) as f64;
        let a = -a_r + 2.0 * a_r * ia as f64 / (na - 1) as f64;
        let x = GroupElement::new(phi, n, a);
        let class = match causal_character(&xi, x) {
            Ok(CausalClass::SpacelikeRegion) => "spacelike",
            Ok(CausalClass::NullSet) => "null",
            Ok(CausalClass::TimelikeRegion) => "timelike",
            Ok(CausalClass::FixedPoint) => "fixed",
            Err(_) => "error",
        };
        let hor = in_horizon(x);
        let sing = in_singularity(x);
        let comp = match component_id(&xi, x) {
            Ok(k) => k.to_string(),
            Err(_) => String::new(),
        };
        format!("{phi},{n},{a},{class},{hor},{sing},{comp}")
    });

    let mut body = emit::csv_header(&config, "phi,n,a,causal,horizon,singularity,component");
    body.push_str(&format!("# mass {m_chk} spin {j_chk}\n"));
    for row in rows {
        body.push_str(&row);
        body.push('\n');
    }
    emit::write_out(args.get("out"), body.trim_end())?;
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// bfield
// ---------------------------------------------------------------------------

fn cmd_bfield(args: &Args) -> Result<ExitCode, CliError> {
    let a0 = args.get_f64("range-lo", -3.0)?;
    let a1 = args.get_f64("range-hi", 3.0)?;
    let n = args.get_usize("samples", 61)?;
    if n < 2 || !(a1 > a0) {
        return Err(CliError::Args(ArgError("need samples >= 2 and range-hi > range-lo".into())));
    }
    let config = RunConfig::default();
    let profile = BFieldProfile { c: args.get_f64("offset", 0.0)? };
    let cal = bfield_calibrate(&profile);
    let mut body = emit::csv_header(&config, "a,f,residual");
    for i in 0..n {
        let a_lie = a0 + (a1 - a0) * i as f64 / (n - 1) as f64;
        let tc = TwistedCoords {
            a: 0.5 * a_lie,
            coset: adsdeform_core::bhtz::CosetKN { phi: 0.4, n: 0.3 },
        };
        let res = bfield_residual(&profile, cal, &tc);
        body.push_str(&format!("{a_lie},{},{res}\n", profile.eval(a_lie)));
    }
    emit::write_out(args.get("out"), body.trim_end())?;
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// torus
// ---------------------------------------------------------------------------

#[derive(serde::Deserialize)]
struct ModesFile {
    modes: Vec<Vec<i64>>,
}

#[derive(Serialize)]
struct TorusProduct {
    left: Vec<i64>,
    right: Vec<i64>,
    output_mode: Vec<i64>,
    phase: [f64; 2],
}

#[derive(Serialize)]
struct TorusPayload {
    theta: f64,
    kappa: f64,
    products: Vec<TorusProduct>,
    first_order_ratio: [f64; 2],
}

fn cmd_torus(args: &Args) -> Result<ExitCode, CliError> {
    let theta = args.get_f64("theta", 0.3)?;
    let config = RunConfig {
        theta,
        ..Default::default()
    };
    config.validate()?;
    let modes: ModesFile = match args.get("modes") {
        Some(path) => {
            let body = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(EmitError::Io(e)))?;
            serde_json::from_str(&body)
                .map_err(|e| CliError::Args(ArgError(format!("--modes: {e}"))))?
        }
        None => ModesFile {
            modes: vec![vec![1, 0], vec![0, 1], vec![2, -1]],
        },
    };
    let j = DeformationMatrix::standard2();
    let mut products = Vec::new();
    for m in &modes.modes {
        for n in &modes.modes {
            let (phase, out) = adsdeform_core::torus::mode_product(m, n, theta, &j)
                .map_err(|e| CliError::Numeric(e.to_string()))?;
            products.push(TorusProduct {
                left: m.clone(),
                right: n.clone(),
                output_mode: out,
                phase: emit::cx(phase),
            });
        }
    }
    // first-order calibration on the first non-central pair
    let mut ratio = Cx::new(0.0, 0.0);
    'outer: for m in &modes.modes {
        for n in &modes.modes {
            if j.pairing(m, n) != 0.0 {
                let a = TrigPolynomial::monomial(m.clone(), Cx::new(1.0, 0.0));
                let b = TrigPolynomial::monomial(n.clone(), Cx::new(1.0, 0.0));
                let fit = first_order_check(&a, &b, &j)
                    .map_err(|e| CliError::Numeric(e.to_string()))?;
                ratio = fit.ratio;
                break 'outer;
            }
        }
    }
    // sanity: the product table must be associative on the listed modes
    let mut worst = 0.0f64;
    for m in &modes.modes {
        for n in &modes.modes {
            for p in &modes.modes {
                let em = TrigPolynomial::monomial(m.clone(), Cx::new(1.0, 0.0));
                let en = TrigPolynomial::monomial(n.clone(), Cx::new(1.0, 0.0));
                let ep = TrigPolynomial::monomial(p.clone(), Cx::new(1.0, 0.0));
                let l = star_theta(&star_theta(&em, &en, theta, &j).unwrap(), &ep, theta, &j)
                    .unwrap();
                let r = star_theta(&em, &star_theta(&en, &ep, theta, &j).unwrap(), theta, &j)
                    .unwrap();
                worst = worst.max(l.sup_coef_diff(&r));
            }
        }
    }
    if worst > adsdeform_core::tol::TORUS_EXACT {
        return Err(CliError::Verification(format!(
            "mode associativity defect {worst:e} above tolerance"
        )));
    }
    let payload = TorusPayload {
        theta,
        kappa: adsdeform_core::torus::KAPPA,
        products,
        first_order_ratio: emit::cx(ratio),
    };
    let body = emit::to_json(&emit::artifact(&config, payload));
    emit::write_out(args.get("out"), &body)?;
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// symsym / bhtz-product shared pieces
// ---------------------------------------------------------------------------

fn parse_fn_spec(spec: &str, grid: Grid2) -> Result<SampledFn, CliError> {
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let mut kv = std::collections::BTreeMap::new();
    for part in rest.split(',').filter(|s| !s.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| ArgError(format!("bad function spec fragment `{part}`")))?;
        let val: f64 = v
            .parse()
            .map_err(|_| ArgError(format!("bad number `{v}` in function spec")))?;
        kv.insert(k.to_string(), val);
    }
    let get = |k: &str, d: f64| kv.get(k).copied().unwrap_or(d);
    match kind {
        "gauss" => Ok(gaussian_bump(
            grid,
            get("ca", 0.0),
            get("cl", 0.0),
            get("r", 0.8),
        )),
        "cutoff" => Ok(cutoff(grid, get("r", 1.4), get("edge", 0.45))),
        other => Err(CliError::Args(ArgError(format!(
            "unknown function kind `{other}` (gauss or cutoff)"
        )))),
    }
}

#[derive(Serialize)]
struct GridMeta {
    n: usize,
    lo: f64,
    hi: f64,
}

#[derive(Serialize)]
struct ProductPayload {
    grid: GridMeta,
    theta: f64,
    samples: Vec<[f64; 2]>,
    trace_defect: f64,
    assoc_defect: f64,
    invariance_defect: f64,
    phase_warning: bool,
    max_cell_phase: f64,
    structure_l_affinity: f64,
    structure_separability: f64,
}

fn cmd_symsym(args: &Args) -> Result<ExitCode, CliError> {
    let theta = args.get_f64("theta", 0.3)?;
    let n = args.get_usize("grid", 24)?;
    let half = args.get_f64("window", 2.0)?;
    let config = RunConfig {
        theta,
        grid: n,
        window: half,
        ..Default::default()
    };
    config.validate()?;
    let grid = Grid2::square(n, -half, half);
    let u = parse_fn_spec(&args.get_str("fn-a", "gauss:ca=0.2,cl=0.1,r=0.8"), grid)?;
    let v = parse_fn_spec(&args.get_str("fn-b", "gauss:ca=-0.15,cl=-0.25,r=0.8"), grid)?;
    let w = parse_fn_spec(&args.get_str("fn-c", "gauss:ca=0.0,cl=0.3,r=0.8"), grid)?;
    let cfg = StarConfig {
        gl_order: config.gl_order,
        ..Default::default()
    };
    let (prod, report) = star(&u, &v, theta, &cfg).map_err(|e| CliError::Numeric(e.to_string()))?;
    let tdef = trace_defect(&u, &v, theta, &cfg).map_err(|e| CliError::Numeric(e.to_string()))?;
    let adef =
        assoc_defect(&u, &v, &w, theta, &cfg).map_err(|e| CliError::Numeric(e.to_string()))?;
    // diagonal invariance of the kernel data over a deterministic sample
    let idef = {
        let mut rng = adsdeform_core::rng::Rng::new(config.seed);
        let mut worst = 0.0f64;
        for _ in 0..50 {
            let rp = |r: &mut adsdeform_core::rng::Rng| {
                SymPoint::new(r.range(-1.5, 1.5), r.range(-1.5, 1.5))
            };
            let (x, y, z, wp) = (rp(&mut rng), rp(&mut rng), rp(&mut rng), rp(&mut rng));
            let s0 = adsdeform_core::symsym::phase_s(x, y, z);
            let s1 = adsdeform_core::symsym::phase_s(
                adsdeform_core::symsym::symmetry(wp, x),
                adsdeform_core::symsym::symmetry(wp, y),
                adsdeform_core::symsym::symmetry(wp, z),
            );
            worst = worst.max((s0 - s1).abs() / (1.0 + s0.abs()));
            let a0 = adsdeform_core::symsym::amplitude_a(x, y, z).value;
            let a1 = adsdeform_core::symsym::amplitude_a(
                adsdeform_core::symsym::symmetry(wp, x),
                adsdeform_core::symsym::symmetry(wp, y),
                adsdeform_core::symsym::symmetry(wp, z),
            )
            .value;
            worst = worst.max((a0 - a1).abs() / (1.0 + a0));
        }
        worst
    };
    let payload = ProductPayload {
        grid: GridMeta {
            n,
            lo: -half,
            hi: half,
        },
        theta,
        samples: prod.vals.iter().map(|z| emit::cx(*z)).collect(),
        trace_defect: tdef,
        assoc_defect: adef,
        invariance_defect: idef,
        phase_warning: report.phase_warning,
        max_cell_phase: report.max_cell_phase,
        structure_l_affinity: report.structure.l_affinity_defect,
        structure_separability: report.structure.cyclic_separability_defect,
    };
    let body = emit::to_json(&emit::artifact(&config, payload));
    emit::write_out(args.get("out"), &body)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct BhtzPayload {
    kind: String,
    grid: GridMeta,
    theta: f64,
    samples: Vec<[f64; 2]>,
    fiber_trace_defect: f64,
    covariance_defect: f64,
    kernel_left_invariance: f64,
}

fn cmd_bhtz_product(args: &Args) -> Result<ExitCode, CliError> {
    let theta = args.get_f64("theta", 0.3)?;
    let n = args.get_usize("grid", 32)?;
    let half = args.get_f64("window", 4.0)?;
    let kind = args.get_str("kind", "spinless");
    let mass = args.get_f64("mass", 1.0)?;
    let alpha = args.get_f64("alpha", 0.3)?;
    let config = RunConfig {
        theta,
        grid: n,
        window: half,
        mass,
        alpha: if kind == "rotating" { alpha } else { 0.0 },
        ..Default::default()
    };
    config.validate()?;
    let action = match kind.as_str() {
        "spinless" => BhtzAction::Spinless {
            mass,
            orbit_sign: 1,
            transversal: args.get_f64("transversal", 0.25)?,
        },
        "rotating" => BhtzAction::Rotating {
            alpha,
            k_fiber: args.get_f64("k-fiber", 0.0)?,
        },
        other => {
            return Err(CliError::Args(ArgError(format!(
                "--kind must be spinless or rotating, got `{other}`"
            ))))
        }
    };
    let grid = Grid2::square(n, -half, half);
    let fa = parse_fn_spec(&args.get_str("fn-a", "gauss:ca=0.2,cl=0.1,r=1.0"), grid)?;
    let fb = parse_fn_spec(&args.get_str("fn-b", "gauss:ca=-0.1,cl=-0.2,r=1.0"), grid)?;
    // wrap the window samples as fiber functions through the chart
    let da = adsdeform_core::grid::Dft2::new(&fa);
    let db = adsdeform_core::grid::Dft2::new(&fb);
    let f = move |x: GroupElement| -> Cx {
        match adsdeform_core::udf::fiber_model_coords(&action, x) {
            Some((tm, mu)) => da.eval(tm, mu),
            None => Cx::new(0.0, 0.0),
        }
    };
    let g = move |x: GroupElement| -> Cx {
        match adsdeform_core::udf::fiber_model_coords(&action, x) {
            Some((tm, mu)) => db.eval(tm, mu),
            None => Cx::new(0.0, 0.0),
        }
    };
    let cfg = StarConfig::default();
    let (prod, _) = action
        .fiber_star(grid, &f, &g, theta, &cfg)
        .map_err(|e| CliError::Numeric(e.to_string()))?;
    let pf = action.pull_to_window(grid, &f);
    let pg = action.pull_to_window(grid, &g);
    let tr_lhs = prod.integral();
    let tr_rhs = pf.pointwise_mul(&pg).integral();
    let fiber_trace = (tr_lhs - tr_rhs).norm() / tr_rhs.norm().max(1e-300);
    let cov = adsdeform_core::udf::covariance_defect(
        action,
        grid,
        theta,
        &cfg,
        AnElement::new(-0.2, 0.3),
    )
    .map_err(|e| CliError::Numeric(e.to_string()))?;
    let payload = BhtzPayload {
        kind: kind.clone(),
        grid: GridMeta {
            n,
            lo: -half,
            hi: half,
        },
        theta,
        samples: prod.vals.iter().map(|z| emit::cx(*z)).collect(),
        fiber_trace_defect: fiber_trace,
        covariance_defect: cov,
        kernel_left_invariance: adsdeform_core::udf::kernel_left_invariance_defect(
            theta, 100, config.seed,
        ),
    };
    let body = emit::to_json(&emit::artifact(&config, payload));
    emit::write_out(args.get("out"), &body)?;
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// spectral
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct SpectralPayload {
    check: String,
    theta: f64,
    defects: Vec<(String, f64)>,
    grids: Vec<usize>,
    convergence_slope: Option<f64>,
}

fn cmd_spectral(args: &Args) -> Result<ExitCode, CliError> {
    let theta = args.get_f64("theta", 0.3)?;
    let which = args.get_str("check", "module");
    let config = RunConfig {
        theta,
        ..Default::default()
    };
    config.validate()?;
    let cfg = StarConfig::default();
    let mut defects: Vec<(String, f64)> = Vec::new();
    let mut grids = Vec::new();
    let mut slope = None;
    match which.as_str() {
        "derivation" => {
            let g = Grid2::square(28, -3.0, 3.0);
            let u = gaussian_bump(g, 0.2, 0.1, 1.4);
            let v = gaussian_bump(g, -0.15, -0.2, 1.4);
            for f in [
                adsdeform_core::spinor::WindowField::Boost,
                adsdeform_core::spinor::WindowField::ShearPlus,
                adsdeform_core::spinor::WindowField::ControlDl,
                adsdeform_core::spinor::WindowField::ControlScaling,
            ] {
                let d = adsdeform_core::spinor::derivation_defect(f, &u, &v, theta, &cfg)
                    .map_err(|e| CliError::Numeric(e.to_string()))?;
                defects.push((format!("{f:?}"), d));
            }
            grids.push(28);
        }
        "module" => {
            let g = Grid2::square(28, -3.0, 3.0);
            let psi = adsdeform_core::spinor::WindowSpinor::sample(g, |a, l| {
                let s: f64 = 0.5;
                let e = (-0.5 * ((a - 0.2) * (a - 0.2) + l * l) / (s * s)).exp();
                [Cx::new(e, 0.0), Cx::new(0.5 * e, -0.2 * e)]
            });
            let a = gaussian_bump(g, 0.2, 0.1, 1.4);
            let b = gaussian_bump(g, -0.1, -0.2, 1.4);
            let lhs = adsdeform_core::spinor::star_right_scalar(
                &adsdeform_core::spinor::star_right_scalar(&psi, &a, theta, &cfg)
                    .map_err(|e| CliError::Numeric(e.to_string()))?,
                &b,
                theta,
                &cfg,
            )
            .map_err(|e| CliError::Numeric(e.to_string()))?;
            let (ab, _) = star(&a, &b, theta, &cfg).map_err(|e| CliError::Numeric(e.to_string()))?;
            let rhs = adsdeform_core::spinor::star_right_scalar(&psi, &ab, theta, &cfg)
                .map_err(|e| CliError::Numeric(e.to_string()))?;
            defects.push((
                "module associativity".into(),
                lhs.sup_diff(&rhs) / rhs.sup_norm(),
            ));
            grids.push(28);
        }
        "dirac" => {
            let mut ds = Vec::new();
            for n in [18usize, 28] {
                let window = Grid2::square(n, -3.0, 3.0);
                let dom = adsdeform_core::spinor::SpinDomain::new(1.0, 1, 7, 0.1, 0.4, window)
                    .map_err(|e| CliError::Numeric(e.to_string()))?;
                let mut psi = adsdeform_core::spinor::Spinor3 { slices: Vec::new() };
                let mut aa = adsdeform_core::spinor::Scalar3 { slices: Vec::new() };
                for iw in 0..dom.n_w {
                    let wv = dom.w_at(iw);
                    let envelope = (-0.5 * (wv - 0.25) * (wv - 0.25) / (0.15 * 0.15)).exp();
                    psi.slices
                        .push(adsdeform_core::spinor::WindowSpinor::sample(window, |x, y| {
                            let s: f64 = 0.5;
                            let e = envelope
                                * (-0.5 * ((x - 0.1) * (x - 0.1) + y * y) / (s * s)).exp();
                            [Cx::new(e, 0.0), Cx::new(0.4 * e, 0.2 * e)]
                        }));
                    aa.slices.push(SampledFn::sample(window, |x, y| {
                        let s: f64 = 0.5;
                        let e = (0.7 + 0.3 * (3.0 * wv).sin())
                            * (-0.5 * ((x + 0.1) * (x + 0.1) + (y - 0.15) * (y - 0.15)) / (s * s))
                                .exp();
                        Cx::new(e, 0.0)
                    }));
                }
                let d =
                    adsdeform_core::spinor::dirac_commutator_defect(&dom, &psi, &aa, theta, &cfg)
                        .map_err(|e| CliError::Numeric(e.to_string()))?;
                defects.push((format!("dirac commutator (grid {n})"), d));
                grids.push(n);
                ds.push(d);
            }
            if ds.len() == 2 && ds[1] > 0.0 {
                slope = Some((ds[0] / ds[1]).ln() / (28f64 / 18f64).ln());
            }
        }
        other => {
            return Err(CliError::Args(ArgError(format!(
                "--check must be dirac, derivation or module, got `{other}`"
            ))))
        }
    }
    let payload = SpectralPayload {
        check: which,
        theta,
        defects,
        grids,
        convergence_slope: slope,
    };
    let body = emit::to_json(&emit::artifact(&config, payload));
    emit::write_out(args.get("out"), &body)?;
    Ok(ExitCode::SUCCESS)
}

// symmetric-space point helper referenced by docs and tests
#[allow(dead_code)]
fn origin() -> SymPoint {
    SymPoint::new(0.0, 0.0)
}
