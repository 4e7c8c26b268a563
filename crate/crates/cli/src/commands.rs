use crate::grid::Grid;
use crate::output::{Artifact, Cell, Table};
use clap::{Args, ValueEnum};
use num_complex::Complex64;
use pearceylab::biorth::BiorthSystem;
use pearceylab::equilibrium::{endpoint_b, exponent_fit, EquilibriumInputs, EquilibriumProfile};
use pearceylab::integrable::{elementary_suite, l0_structure, residual_hierarchy, ElementaryCase, LaxJet, ResidualReport};
use pearceylab::kernels_finite::{cross_check, kernel_K, kernel_Khat, kernel_cd, trace_k, ExtKernel};
use pearceylab::kernels_limit::pearcey::{folded_minus_value, folded_plus_value, pearcey_kernel_ev};
use pearceylab::kernels_limit::{c1_pearcey, limit_report, multicrit_value, LimitSide, PearceyEvaluator, SystemCache, Which};
use pearceylab::model::{
    c_identity_residual, dashed_curve, multicrit_params, pearcey_params, solve_c, ModelParams, ParamDoc,
};
use pearceylab::numerics::airy::{airy_parametrix, det, jump_matrix, mat_mul, max_diff, normalization_defect, normalization_defect_inner, Side};
use pearceylab::{Error, Result};
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Curve {
    Explicit,
    Dashed,
    Pearcey,
    Multicritical,
}

/// Model parameters, either explicit or through one of the critical curves.
#[derive(Args, Clone, Debug)]
pub struct ParamArgs {
    /// Parameter source; inferred from the other flags when omitted.
    #[arg(long, value_enum)]
    pub curve: Option<Curve>,
    #[arg(long, default_value_t = 4)]
    pub n: u32,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub gamma: f64,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub tau: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub sigma: f64,
    /// JSON parameter document (overrides the individual flags).
    #[arg(long)]
    pub params: Option<String>,
}

impl ParamArgs {
    fn curve(&self) -> Result<Curve> {
        if let Some(c) = self.curve {
            return Ok(c);
        }
        match (self.t, self.a, self.c) {
            (Some(_), Some(_), None) => Ok(Curve::Explicit),
            (None, None, Some(_)) => Ok(Curve::Dashed),
            _ => Err(Error::Config("give either --t and --a, or --c, or --curve".into())),
        }
    }

    fn need_c(&self) -> Result<f64> {
        self.c.ok_or_else(|| Error::Config("this curve needs --c".into()))
    }

    pub fn resolve(&self) -> Result<ModelParams> {
        if let Some(doc) = &self.params {
            return ParamDoc::from_json(doc)?.resolve();
        }
        let (t, a) = match self.curve()? {
            Curve::Explicit => match (self.t, self.a) {
                (Some(t), Some(a)) => (t, a),
                _ => return Err(Error::Config("explicit parameters need --t and --a".into())),
            },
            Curve::Dashed => dashed_curve(self.need_c()?)?,
            Curve::Pearcey => pearcey_params(self.need_c()?, self.tau, self.n)?,
            Curve::Multicritical => {
                let (t, a, _) = multicrit_params(self.sigma, self.tau, self.n)?;
                (t, a)
            }
        };
        ModelParams::new(self.n, self.alpha, t, a, self.gamma)
    }

    /// Inputs for the equilibrium problem, keeping `c` exact when it is known.
    pub fn equilibrium(&self) -> Result<EquilibriumInputs> {
        if self.params.is_some() {
            let p = self.resolve()?;
            return EquilibriumInputs::from_t_a(p.t, p.a);
        }
        match self.curve()? {
            Curve::Dashed => EquilibriumInputs::from_c_a(self.need_c()?, dashed_curve(self.need_c()?)?.1),
            Curve::Pearcey => EquilibriumInputs::pearcey(self.need_c()?, self.tau, self.n),
            Curve::Multicritical => EquilibriumInputs::multicritical(self.sigma, self.tau, self.n),
            Curve::Explicit => {
                let p = self.resolve()?;
                EquilibriumInputs::from_t_a(p.t, p.a)
            }
        }
    }
}

fn value_name(v: impl ValueEnum) -> String {
    v.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default()
}

fn param_meta(t: &mut Table, p: &ModelParams) {
    t.meta("n", p.n);
    t.meta_f64("alpha", p.alpha);
    t.meta_f64("t", p.t);
    t.meta_f64("a", p.a);
    t.meta_f64("gamma", p.gamma);
}

#[derive(Args, Clone, Debug)]
pub struct BiorthArgs {
    #[command(flatten)]
    pub p: ParamArgs,
    /// Highest degree; defaults to n.
    #[arg(long)]
    pub deg: Option<usize>,
}

pub fn biorth(args: &BiorthArgs, bits: Option<u32>) -> Result<Artifact> {
    let p = args.p.resolve()?;
    let deg = args.deg.unwrap_or(p.n as usize);
    let sys = BiorthSystem::build_with_bits(p, deg, bits)?;
    let (off, diag) = sys.quadrature_residual(deg)?;
    let mut t = Table::new(&["k", "h", "h_quadrature", "rel_err", "sign"]);
    let signs = sys.sign_pattern();
    for (k, hq) in diag.iter().enumerate() {
        let h = sys.h(k).to_f64();
        t.push(vec![k.into(), h.into(), (*hq).into(), ((hq - h).abs() / h.abs()).into(), Cell::Int(signs[k] as i64)]);
    }
    param_meta(&mut t, &p);
    t.meta("deg", deg);
    t.meta("bits", sys.prec());
    t.meta_f64("residual_report", sys.residual_report);
    t.meta_f64("quadrature_offdiag_residual", off);
    Ok(Artifact::Table(t))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Plain,
    Symmetrized,
    External,
    CrossCheck,
}

#[derive(Args, Clone, Debug)]
pub struct KernelArgs {
    #[command(flatten)]
    pub p: ParamArgs,
    #[arg(long, value_enum, default_value = "symmetrized")]
    pub variant: VariantArg,
    /// Kernel order; defaults to n.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub grid: String,
    /// Skip the trace check row.
    #[arg(long)]
    pub no_trace: bool,
}

pub fn kernel(args: &KernelArgs, bits: Option<u32>) -> Result<Artifact> {
    let p = args.p.resolve()?;
    let m = args.m.unwrap_or(p.n as usize);
    let pts = Grid::parse(&args.grid)?.pairs();
    let mut t;
    let trace;
    match args.variant {
        VariantArg::External => {
            let ext = ExtKernel::with_bits(m, p, bits)?;
            let vals: Vec<f64> = pts.par_iter().map(|&(x, y)| ext.eval(x, y)).collect::<Result<_>>()?;
            t = Table::new(&["x", "y", "value"]);
            for (&(x, y), v) in pts.iter().zip(vals) {
                t.push(vec![x.into(), y.into(), v.into()]);
            }
            trace = (!args.no_trace).then(|| ext.trace().map(|v| (v, 2.0 * m as f64))).transpose()?;
        }
        VariantArg::Plain => {
            let sys = BiorthSystem::build_with_bits(p, m, bits)?;
            let vals: Vec<f64> = pts.par_iter().map(|&(x, y)| kernel_K(&sys, m, x, y)).collect::<Result<_>>()?;
            t = Table::new(&["x", "y", "value"]);
            for (&(x, y), v) in pts.iter().zip(vals) {
                t.push(vec![x.into(), y.into(), v.into()]);
            }
            trace = (!args.no_trace).then(|| trace_k(&sys, m).map(|v| (v, m as f64))).transpose()?;
        }
        VariantArg::Symmetrized => {
            // One extra degree so the CD form can serve as the error estimate.
            let sys = BiorthSystem::build_with_bits(p, m + 1, bits)?;
            let vals: Vec<(f64, f64)> = pts
                .par_iter()
                .map(|&(x, y)| {
                    let d = kernel_Khat(&sys, m, x, y)?;
                    Ok((d, kernel_cd(&sys, m, x, y).map(|c| (c - d).abs()).unwrap_or(f64::NAN)))
                })
                .collect::<Result<_>>()?;
            t = Table::new(&["x", "y", "value", "err_estimate"]);
            for (&(x, y), (v, e)) in pts.iter().zip(vals) {
                t.push(vec![x.into(), y.into(), v.into(), e.into()]);
            }
            trace = (!args.no_trace).then(|| trace_k(&sys, m).map(|v| (v, m as f64))).transpose()?;
        }
        VariantArg::CrossCheck => {
            let sys = BiorthSystem::build_with_bits(p, m + 1, bits)?;
            let rows = cross_check(&sys, m, &pts)?;
            t = Table::new(&["x", "y", "K_direct", "K_cd", "K_matrix", "abs_diff_cd", "abs_diff_matrix"]);
            for r in rows {
                t.push(vec![
                    r.x.into(),
                    r.y.into(),
                    r.K_direct.into(),
                    r.K_cd.into(),
                    r.K_matrix.into(),
                    r.abs_diff_cd.into(),
                    r.abs_diff_matrix.into(),
                ]);
            }
            trace = None;
        }
    }
    param_meta(&mut t, &p);
    t.meta("m", m);
    t.meta("variant", value_name(args.variant));
    if let Some((v, want)) = trace {
        t.meta_f64("trace", v);
        t.meta_f64("trace_expected", want);
        t.meta_f64("trace_abs_err", (v - want).abs());
    }
    Ok(Artifact::Table(t))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PearceyWhat {
    Functions,
    Kernel,
    FoldedPlus,
    FoldedMinus,
}

#[derive(Args, Clone, Debug)]
pub struct PearceyArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub tau: f64,
    #[arg(long, value_enum, default_value = "kernel")]
    pub what: PearceyWhat,
    #[arg(long)]
    pub grid: String,
}

pub fn pearcey(args: &PearceyArgs) -> Result<Artifact> {
    let grid = Grid::parse(&args.grid)?;
    let mut t;
    match args.what {
        PearceyWhat::Functions => {
            let ev = PearceyEvaluator::shared(args.tau)?;
            let xs = grid.values()?;
            t = Table::new(&[
                "x", "p", "p_err", "p1", "p1_err", "p2", "p2_err", "q", "q_err", "q1", "q1_err", "q2", "q2_err",
            ]);
            let rows: Vec<Vec<f64>> = xs
                .par_iter()
                .map(|&x| {
                    let mut r = vec![x];
                    for w in [Which::P, Which::Q] {
                        for d in 0..=2 {
                            let v = ev.eval(w, x, d)?;
                            r.extend([v.value, v.err]);
                        }
                    }
                    Ok(r)
                })
                .collect::<Result<_>>()?;
            for r in rows {
                t.push(r.into_iter().map(Into::into).collect());
            }
        }
        what => {
            let ev = PearceyEvaluator::shared(if what == PearceyWhat::Kernel { args.tau } else { 2.0 * args.tau })?;
            let pts = grid.pairs();
            let vals: Vec<(f64, f64)> = pts
                .par_iter()
                .map(|&(x, y)| {
                    let k = match what {
                        PearceyWhat::Kernel => pearcey_kernel_ev(&ev, x, y)?,
                        PearceyWhat::FoldedPlus => folded_plus_value(x, y, args.tau)?,
                        _ => folded_minus_value(x, y, args.tau)?,
                    };
                    Ok((k.value, k.err_estimate))
                })
                .collect::<Result<_>>()?;
            t = Table::new(&["x", "y", "value", "err_estimate"]);
            for (&(x, y), (v, e)) in pts.iter().zip(vals) {
                t.push(vec![x.into(), y.into(), v.into(), e.into()]);
            }
        }
    }
    t.meta_f64("tau", args.tau);
    t.meta("what", value_name(args.what));
    Ok(Artifact::Table(t))
}

#[derive(Args, Clone, Debug)]
pub struct DensityArgs {
    #[command(flatten)]
    pub p: ParamArgs,
    /// Interior sample points, uniform on (0, b).
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Window `lo:hi` for the log-log fit of the vanishing exponent at 0.
    #[arg(long, default_value = "1e-6:1e-3")]
    pub fit_window: String,
    /// Alias for --output.
    #[arg(long)]
    pub export: Option<std::path::PathBuf>,
}

pub fn density(args: &DensityArgs) -> Result<Artifact> {
    if args.samples == 0 {
        return Err(Error::Config("--samples must be positive".into()));
    }
    let inp = args.p.equilibrium()?;
    let prof = EquilibriumProfile::new(&inp, args.samples)?;
    let (mass, mass_err) = inp.mass()?;
    let mut t = Table::new(&["x", "psi", "series_truncation", "abs_diff"]);
    for r in prof.rows() {
        t.push(vec![r.x.into(), r.psi.into(), r.series_truncation.into(), r.abs_diff.into()]);
    }
    t.meta_f64("c", inp.c);
    t.meta_f64("t", inp.t);
    t.meta_f64("a", inp.a);
    t.meta_f64("b", inp.b());
    t.meta_f64("mass", mass);
    t.meta_f64("mass_err", mass_err);
    let (lo, hi) = args
        .fit_window
        .split_once(':')
        .and_then(|(l, h)| Some((l.parse::<f64>().ok()?, h.parse::<f64>().ok()?)))
        .ok_or_else(|| Error::Config(format!("--fit-window expects lo:hi, got '{}'", args.fit_window)))?;
    // A sign change inside the window is reported, not fatal.
    match exponent_fit(&inp, (lo, hi)) {
        Ok(e) => t.meta_f64("exponent_fit", e),
        Err(e) => t.meta("exponent_fit", format!("unavailable ({e})")),
    }
    Ok(Artifact::Table(t))
}

#[derive(Args, Clone, Debug)]
pub struct PhaseArgs {
    /// c values along the dashed curve.
    #[arg(long, default_value = "lin:0.05:0.75:15")]
    pub grid: String,
    /// Locate a single (t, a) instead.
    #[arg(long, allow_hyphen_values = true, requires = "a")]
    pub t: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "t")]
    pub a: Option<f64>,
}

pub fn phase(args: &PhaseArgs) -> Result<Artifact> {
    let cs = match (args.t, args.a) {
        (Some(t), Some(a)) => vec![(solve_c(t, a)?, Some((t, a)))],
        _ => Grid::parse(&args.grid)?.values()?.into_iter().map(|c| (c, None)).collect(),
    };
    let c_mc = 3f64.powf(-0.25);
    let mut tab = Table::new(&["c", "t", "a", "c_identity_residual", "b", "c1", "regime"]);
    for (c, ta) in cs {
        let (t, a) = match ta {
            Some(ta) => ta,
            None => dashed_curve(c)?,
        };
        let on_curve = dashed_curve(c).is_ok_and(|(td, ad)| (td - t).abs().max((ad - a).abs()) <= 1e-9);
        let regime = if !on_curve {
            "off-critical"
        } else if (c - c_mc).abs() < 1e-12 {
            "multicritical"
        } else {
            "pearcey"
        };
        tab.push(vec![
            c.into(),
            t.into(),
            a.into(),
            c_identity_residual(c, t, a).into(),
            endpoint_b(c).into(),
            c1_pearcey(c).into(),
            regime.into(),
        ]);
    }
    tab.meta_f64("c_multicritical", c_mc);
    Ok(Artifact::Table(tab))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RegimeArg {
    Pearcey,
    Multicritical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Symmetrized,
    External,
}

#[derive(Args, Clone, Debug)]
pub struct LimitArgs {
    #[arg(long, value_enum, default_value = "pearcey")]
    pub regime: RegimeArg,
    /// Comma-separated n values.
    #[arg(long, default_value = "8,16,32")]
    pub n_list: String,
    #[arg(long, default_value_t = 0.5)]
    pub c: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub tau: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub sigma: f64,
    #[arg(long, default_value = "vals:0.5,1,1.5")]
    pub grid: String,
    #[arg(long, value_enum, default_value = "symmetrized")]
    pub side: SideArg,
}

#[derive(Serialize)]
struct MulticriticalReport {
    regime: RegimeArg,
    n: Vec<u32>,
    grid: Vec<(f64, f64)>,
    /// `values[i][j]`: n = n[i] at grid point j.
    values: Vec<Vec<f64>>,
    /// Max over the grid of `|value_{n_i} - value_{n_{i+1}}|`.
    max_drift: Vec<f64>,
    trend: bool,
}

pub fn parse_n_list(s: &str) -> Result<Vec<u32>> {
    let ns: Vec<u32> = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse().map_err(|_| Error::Config(format!("--n-list: bad entry '{t}'"))))
        .collect::<Result<_>>()?;
    if ns.is_empty() {
        return Err(Error::Config("--n-list is empty".into()));
    }
    if ns.contains(&0) {
        return Err(Error::Config("--n-list entries must be positive".into()));
    }
    Ok(ns)
}

pub fn limitcheck(args: &LimitArgs, bits: Option<u32>) -> Result<Artifact> {
    let ns = parse_n_list(&args.n_list)?;
    let grid = Grid::parse(&args.grid)?.pairs();
    let cache = SystemCache::with_bits(bits);
    match args.regime {
        RegimeArg::Pearcey => {
            let side = match args.side {
                SideArg::Symmetrized => LimitSide::Symmetrized,
                SideArg::External => LimitSide::External,
            };
            Artifact::json(&limit_report(&ns, args.c, args.tau, &grid, side, &cache)?)
        }
        RegimeArg::Multicritical => {
            let values: Vec<Vec<f64>> = ns
                .iter()
                .map(|&n| {
                    grid.par_iter()
                        .map(|&(x, y)| multicrit_value(n, args.sigma, args.tau, x, y, &cache))
                        .collect::<Result<Vec<f64>>>()
                })
                .collect::<Result<_>>()?;
            let max_drift: Vec<f64> = values
                .windows(2)
                .map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .collect();
            let trend = max_drift.windows(2).all(|w| w[1] < w[0]);
            Artifact::json(&MulticriticalReport { regime: args.regime, n: ns, grid, values, max_drift, trend })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Elementary,
    ZeroCurvature,
    L0,
    All,
}

#[derive(Args, Clone, Debug)]
pub struct OdeArgs {
    #[arg(long, value_enum, default_value = "elementary")]
    pub suite: Suite,
    /// τ-grid size on [-5, 5] for the elementary suite.
    #[arg(long, default_value_t = 1001)]
    pub points: usize,
    /// Random polynomial jets for the zero-curvature suite.
    #[arg(long, default_value_t = 100)]
    pub jets: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Serialize)]
struct OdeReport {
    tolerance: f64,
    pass: bool,
    reports: Vec<ResidualReport>,
}

fn zero_curvature_reports(jets: usize, seed: u64) -> Result<Vec<ResidualReport>> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut taus = Vec::with_capacity(jets);
    let (mut zs, mut zr, mut bq) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..jets {
        let mut coef = || -> Vec<f64> { (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect() };
        let (cu, cv) = (coef(), coef());
        let tau = rng.gen_range(-1.0..1.0);
        let sigma = rng.gen_range(-1.0..1.0);
        let jet = LaxJet::from_polynomials(tau, sigma, 0.0, &cu, &cv)?;
        let h = residual_hierarchy(&jet, None);
        // Relative to the jet scale.
        zs = zs.max(h.max_zero_curvature_sigma / jet.scale());
        zr = zr.max(h.max_zero_curvature_rho / jet.scale());
        bq = bq.max(h.boussinesq.abs() / jet.scale());
        taus.push(tau);
    }
    let mk = |id: &str, v: f64| ResidualReport { equation_id: id.into(), max_abs_residual: v, grid: taus.clone() };
    Ok(vec![mk("zero_curvature_sigma", zs), mk("zero_curvature_rho", zr), mk("boussinesq", bq)])
}

fn l0_reports() -> Result<Vec<ResidualReport>> {
    let taus = vec![-2.0, -1.0, 0.0, 0.5, 2.0];
    let mut out = Vec::new();
    for case in ElementaryCase::ALL {
        let tag = if case == ElementaryCase::Plus { "plus" } else { "minus" };
        let st: Vec<_> = taus.iter().map(|&t| l0_structure(case, t)).collect::<Result<_>>()?;
        out.push(ResidualReport {
            equation_id: format!("l0_eigenvalues/{tag}"),
            max_abs_residual: st.iter().map(|s| s.max_eigenvalue_err).fold(0.0, f64::max),
            grid: taus.clone(),
        });
        // Second singular value of the shifted matrix; zero for rank one.
        out.push(ResidualReport {
            equation_id: format!("l0_rank_one/{tag}"),
            max_abs_residual: st.iter().map(|s| s.singular_values[1]).fold(0.0, f64::max),
            grid: taus.clone(),
        });
    }
    Ok(out)
}

pub fn ode_check(args: &OdeArgs) -> Result<Artifact> {
    if args.points < 2 {
        return Err(Error::Config("--points must be at least 2".into()));
    }
    let grid: Vec<f64> = (0..args.points).map(|i| -5.0 + 10.0 * i as f64 / (args.points - 1) as f64).collect();
    let mut reports = Vec::new();
    let all = args.suite == Suite::All;
    if all || args.suite == Suite::Elementary {
        for case in ElementaryCase::ALL {
            reports.extend(elementary_suite(case, &grid)?);
        }
    }
    if all || args.suite == Suite::ZeroCurvature {
        reports.extend(zero_curvature_reports(args.jets, args.seed)?);
    }
    if all || args.suite == Suite::L0 {
        reports.extend(l0_reports()?);
    }
    let tolerance = 1e-12;
    let pass = reports.iter().all(|r| r.max_abs_residual <= tolerance);
    Artifact::json(&OdeReport { tolerance, pass, reports })
}

#[derive(Args, Clone, Debug)]
pub struct AiryArgs {
    /// |ζ| for the normalization check.
    #[arg(long, default_value_t = 20.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 20)]
    pub points_per_ray: usize,
}

#[derive(Serialize)]
struct RayCheck {
    arg: f64,
    max_jump_defect: f64,
}

#[derive(Serialize)]
struct AiryReport {
    max_det_defect: f64,
    rays: Vec<RayCheck>,
    radius: f64,
    normalization_defect: f64,
    normalization_defect_inner: f64,
}

pub fn airy_check(args: &AiryArgs) -> Result<Artifact> {
    if !(args.radius > 0.0) || args.points_per_ray == 0 {
        return Err(Error::Config("--radius and --points-per-ray must be positive".into()));
    }
    let mut det_err = 0.0f64;
    for k in 0..24 {
        let th = 2.0 * PI * (k as f64 + 0.5) / 24.0;
        for r in [0.3, 1.0, 3.0] {
            let z = Complex64::from_polar(r, th);
            det_err = det_err.max((det(&airy_parametrix(z, Side::Interior)?) - 1.0).norm());
        }
    }
    let mut rays = Vec::new();
    for arg in [0.0, 2.0 * PI / 3.0, PI, -2.0 * PI / 3.0] {
        let j = jump_matrix(arg)?;
        let mut worst = 0.0f64;
        for i in 1..=args.points_per_ray {
            let z = Complex64::from_polar(5.0 * i as f64 / args.points_per_ray as f64, arg);
            let p = airy_parametrix(z, Side::Plus)?;
            let m = airy_parametrix(z, Side::Minus)?;
            let scale = p.iter().flatten().fold(1.0f64, |a, x| a.max(x.norm()));
            worst = worst.max(max_diff(&p, &mat_mul(&m, &j)) / scale);
        }
        rays.push(RayCheck { arg, max_jump_defect: worst });
    }
    let z = Complex64::from_polar(args.radius, PI / 3.0);
    Artifact::json(&AiryReport {
        max_det_defect: det_err,
        rays,
        radius: args.radius,
        normalization_defect: normalization_defect(z)?,
        normalization_defect_inner: normalization_defect_inner(z)?,
    })
}
