use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::json;

use mspt_core::estimate::{
    check_sample_budget, linear_fit, mixing_time, string_curve, translated_string_curve, DEFAULT_TWO_COPY_MAX_QUBITS,
};
use mspt_core::exact::{correlator, Charges, DenseOperator, LindbladModel, Quantity, Superoperator, DEFAULT_TOL};
use mspt_core::freefermion::{analytic_row, collapse_spread, lindblad_gap, AnalyticQuantity, AnalyticRow, Coupling, FermionParams};
use mspt_core::rdpert::{first_order_steady, string_derivative, DerivativeRow, Perturbation};
use mspt_core::{Boundary, Error, EstimateResult, Initial, Pauli1, PauliOperator, StringKind, TrajectoryConfig, TwoCopyQuantity};

use crate::{CliError, Run};

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
pub enum InitialArg {
    Plus,
    Decorated,
}

impl InitialArg {
    fn initial(self) -> Initial {
        match self {
            InitialArg::Plus => Initial::Plus,
            InitialArg::Decorated => Initial::DecoratedSample,
        }
    }
}

fn boundary_label(b: &Boundary) -> &'static str {
    b.label()
}

mod ser {
    use mspt_core::{Boundary, StringKind, TwoCopyQuantity};
    use serde::Serializer;

    pub fn boundary<S: Serializer>(b: &Boundary, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(super::boundary_label(b))
    }

    pub fn kind<S: Serializer>(k: &StringKind, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{k:?}"))
    }

    pub fn two_copy<S: Serializer>(q: &TwoCopyQuantity, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(q.name())
    }
}

#[derive(Debug, Args, Serialize)]
pub struct MixTimeArgs {
    /// Chain sizes 2N.
    #[arg(long = "qubits", value_delimiter = ',', num_args = 1.., default_value = "60,80,100,140,200")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 0.95)]
    pub eta: f64,
    /// |m − n| in qubits.
    #[arg(long, default_value_t = 28)]
    pub string_len: usize,
    /// Odd start site; defaults to 2⌊N/2⌋ − 21.
    #[arg(long)]
    pub start: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Step budget per size in sweeps; defaults to 4·2N.
    #[arg(long)]
    pub max_sweeps: Option<u64>,
    #[arg(long, default_value = "obc")]
    #[serde(serialize_with = "ser::boundary")]
    pub boundary: Boundary,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Serialize)]
struct MixRow {
    n_qubits: usize,
    n: usize,
    m: usize,
    eta: f64,
    samples: usize,
    steps: Option<u64>,
    mean_at_stop: f64,
    stderr_at_stop: f64,
    status: String,
    slope: Option<f64>,
}

pub fn mix_time(a: &MixTimeArgs, run: &mut Run) -> Result<(), CliError> {
    let mut rows = Vec::new();
    let mut first_error = None;
    for &nq in &a.sizes {
        let n = match a.start {
            Some(n) => n,
            None => (2 * (nq / 4))
                .checked_sub(21)
                .filter(|&n| n >= 1)
                .ok_or_else(|| CliError::Usage(format!("2N={nq} is too small for the default start site; pass --start")))?,
        };
        let m = n + a.string_len;
        let sweeps = a.max_sweeps.unwrap_or(4 * nq as u64);
        let mut c = TrajectoryConfig::new(nq, 0.0, sweeps * nq as u64, a.seed);
        c.boundary = a.boundary;
        c.observe_every = (nq as u64 / 2).max(1);
        let mut row = MixRow {
            n_qubits: nq,
            n,
            m,
            eta: a.eta,
            samples: a.samples,
            steps: None,
            mean_at_stop: f64::NAN,
            stderr_at_stop: f64::NAN,
            status: "ok".into(),
            slope: None,
        };
        match mixing_time(&c, n, m, a.eta, a.samples) {
            Ok(mt) => {
                let last = mt.curve.last().expect("reached threshold has a curve point");
                row.steps = Some(mt.steps);
                row.mean_at_stop = last.mean;
                row.stderr_at_stop = last.stderr;
            }
            Err(e @ Error::NotReached { last, .. }) => {
                row.status = "not_reached".into();
                row.mean_at_stop = last;
                first_error.get_or_insert(e);
            }
            Err(e) => return Err(e.into()),
        }
        rows.push(row);
    }
    let reached: Vec<(f64, f64)> =
        rows.iter().filter_map(|r| r.steps.map(|s| ((r.n_qubits as f64).ln(), (s.max(1) as f64).ln()))).collect();
    let slope = if reached.len() >= 3 {
        let (xs, ys): (Vec<f64>, Vec<f64>) = reached.into_iter().unzip();
        Some(linear_fit(&xs, &ys)?.slope)
    } else {
        None
    };
    for r in &mut rows {
        r.slope = slope;
    }
    run.write_csv(&rows)?;
    run.set_extra(json!({ "slope": slope }));
    match first_error {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

#[derive(Debug, Args, Serialize)]
pub struct StringScanArgs {
    #[arg(long, default_value_t = 16)]
    pub qubits: usize,
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub lambda_list: Vec<f64>,
    /// strong, weak, trivial-strong or trivial-weak.
    #[arg(long, default_value = "strong")]
    #[serde(serialize_with = "ser::kind")]
    pub kind: StringKind,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub m_list: Vec<usize>,
    #[arg(long, default_value_t = 64)]
    pub trajectories: u64,
    #[arg(long, default_value_t = 200)]
    pub sweeps: u64,
    #[arg(long, default_value_t = 100)]
    pub burn_in_sweeps: u64,
    #[arg(long, default_value = "pbc")]
    #[serde(serialize_with = "ser::boundary")]
    pub boundary: Boundary,
    #[arg(long, value_enum, default_value = "decorated")]
    pub initial: InitialArg,
    /// Average every observation over ring translates (PBC only); `m − n` sets the lengths.
    #[arg(long)]
    pub translate: bool,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

fn trajectory_config(qubits: usize, lambda: f64, sweeps: u64, burn_in_sweeps: u64, boundary: Boundary, seed: u64) -> TrajectoryConfig {
    let mut c = TrajectoryConfig::new(qubits, lambda, (burn_in_sweeps + sweeps) * qubits as u64, seed);
    c.burn_in = burn_in_sweeps * qubits as u64;
    c.boundary = boundary;
    c
}

/// Log-linear fit over the leading rows resolved at 3σ.
fn decay_fit(rows: &[EstimateResult]) -> serde_json::Value {
    let resolved: Vec<&EstimateResult> = rows.iter().take_while(|r| r.mean > 3.0 * r.stderr && r.mean > 0.0).collect();
    if resolved.len() < 3 {
        return json!({ "points": resolved.len() });
    }
    let xs: Vec<f64> = resolved.iter().map(|r| (r.m - r.n) as f64).collect();
    let ys: Vec<f64> = resolved.iter().map(|r| r.mean.ln()).collect();
    match linear_fit(&xs, &ys) {
        Ok(f) => json!({ "points": f.points, "slope": f.slope, "r2": f.r2 }),
        Err(_) => json!({ "points": resolved.len() }),
    }
}

pub fn string_scan(a: &StringScanArgs, run: &mut Run) -> Result<(), CliError> {
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for &lambda in &a.lambda_list {
        let c = trajectory_config(a.qubits, lambda, a.sweeps, a.burn_in_sweeps, a.boundary, a.seed);
        let block = if a.translate {
            let lengths: Vec<usize> = a
                .m_list
                .iter()
                .map(|&m| m.checked_sub(a.n).filter(|&l| l > 0).ok_or_else(|| CliError::Usage(format!("m={m} must exceed n={}", a.n))))
                .collect::<Result<_, _>>()?;
            translated_string_curve(&c, a.kind, &lengths, a.trajectories, &a.initial.initial())?
        } else {
            string_curve(&c, a.kind, a.n, &a.m_list, a.trajectories, &a.initial.initial())?
        };
        let mut fit = decay_fit(&block);
        fit["lambda"] = json!(lambda);
        fits.push(fit);
        rows.extend(block);
    }
    run.write_csv(&rows)?;
    run.set_extra(json!({ "fits": fits }));
    Ok(())
}

#[derive(Debug, Args, Serialize)]
pub struct TwoCopyArgs {
    /// purity, A_II, B_II, C_II_S, C_II_W, trivial_C_II_S or trivial_C_II_W.
    #[arg(long)]
    #[serde(serialize_with = "ser::two_copy")]
    pub quantity: TwoCopyQuantity,
    #[arg(long, default_value_t = 14)]
    pub qubits: usize,
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub lambda_list: Vec<f64>,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "8")]
    pub m_list: Vec<usize>,
    /// Trajectory pairs.
    #[arg(long, default_value_t = 64)]
    pub trajectories: u64,
    #[arg(long, default_value_t = 300)]
    pub sweeps: u64,
    #[arg(long, default_value_t = 100)]
    pub burn_in_sweeps: u64,
    /// Steps between snapshots.
    #[arg(long, default_value_t = 1)]
    pub observe_every: u64,
    #[arg(long, default_value = "pbc")]
    #[serde(serialize_with = "ser::boundary")]
    pub boundary: Boundary,
    #[arg(long, value_enum, default_value = "plus")]
    pub initial: InitialArg,
    /// Run even when the chain exceeds the sample-budget cap.
    #[arg(long)]
    pub force: bool,
    /// Seed of the first stream; the second uses `seed + 1`.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

pub fn two_copy(a: &TwoCopyArgs, run: &mut Run) -> Result<(), CliError> {
    check_sample_budget(a.qubits, DEFAULT_TWO_COPY_MAX_QUBITS, a.force)?;
    let mut rows = Vec::new();
    for &lambda in &a.lambda_list {
        let mk = |seed| {
            let mut c = trajectory_config(a.qubits, lambda, a.sweeps, a.burn_in_sweeps, a.boundary, seed);
            c.observe_every = a.observe_every;
            c
        };
        let (ca, cb) = (mk(a.seed), mk(a.seed.wrapping_add(1)));
        for &m in &a.m_list {
            rows.push(mspt_core::estimate::two_copy((&ca, &cb), a.quantity, a.n, m, a.trajectories, &a.initial.initial())?);
        }
    }
    run.write_csv(&rows)?;
    Ok(())
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
pub enum ModelArg {
    Parent,
    DualParent,
    Interpolated,
    General,
    Trace,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, PartialEq)]
pub enum Report {
    Steady,
    Conserved,
    Correlators,
    Spectrum,
}

#[derive(Debug, Args, Serialize)]
pub struct EdArgs {
    /// Declarative model file; overrides --model.
    #[arg(long)]
    pub model_config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "parent")]
    pub model: ModelArg,
    #[arg(long, default_value_t = 6)]
    pub qubits: usize,
    #[arg(long, default_value = "pbc")]
    #[serde(serialize_with = "ser::boundary")]
    pub boundary: Boundary,
    /// λ of the interpolated model.
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    /// (λ₀, λ₁, λ₂) of the general model.
    #[arg(long, value_delimiter = ',', num_args = 3, default_value = "0,0,0")]
    pub general: Vec<f64>,
    /// Adds γ_ZZ · Σ D[Z₂ⱼZ₂ⱼ₊₂].
    #[arg(long, default_value_t = 0.0)]
    pub gamma_zz: f64,
    /// Restrict to one sector, e.g. "+1,+1,+1" ("*" for a broken symmetry).
    #[arg(long)]
    pub sector: Option<String>,
    #[arg(long, value_enum, default_value = "steady")]
    pub report: Report,
    /// Odd endpoints for strong strings; even quantities use (n+1, m+1).
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 5)]
    pub m: usize,
}

fn parse_charges(text: &str) -> Result<Charges, CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let one = |s: &str| -> Result<Option<i8>, CliError> {
        match s {
            "+1" | "1" | "+" => Ok(Some(1)),
            "-1" | "-" => Ok(Some(-1)),
            "*" => Ok(None),
            other => Err(CliError::Usage(format!("bad charge '{other}' in --sector"))),
        }
    };
    if parts.len() != 3 {
        return Err(CliError::Usage(format!("--sector needs three charges, got '{text}'")));
    }
    Ok(Charges { s_ket: one(parts[0])?, s_bra: one(parts[1])?, w: one(parts[2])? })
}

fn build_model(a: &EdArgs) -> Result<LindbladModel, CliError> {
    let mut model = if let Some(path) = &a.model_config {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        LindbladModel::parse(&text)?
    } else {
        match a.model {
            ModelArg::Parent => LindbladModel::parent(a.qubits, a.boundary)?,
            ModelArg::DualParent => LindbladModel::dual_parent(a.qubits, a.boundary)?,
            ModelArg::Interpolated => LindbladModel::interpolated(a.qubits, a.boundary, a.lambda)?,
            ModelArg::General => LindbladModel::general(a.qubits, a.boundary, a.general[0], a.general[1], a.general[2])?,
            ModelArg::Trace => LindbladModel::trace_lindbladian(a.qubits, a.boundary)?,
        }
    };
    if a.gamma_zz > 0.0 {
        model.push_family(mspt_core::exact::JumpKind::Lzz, a.gamma_zz)?;
    }
    Ok(model)
}

#[derive(Serialize)]
struct SteadyRow {
    sector: String,
    dimension: usize,
}

#[derive(Serialize)]
struct ConservedRow {
    sector: String,
    index: usize,
    pauli: String,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct CorrelatorRow {
    sector: String,
    quantity: String,
    n: usize,
    m: usize,
    value: f64,
}

/// All Pauli strings with coefficient above `tol` in `op = Σ c_P P`.
fn pauli_decomposition(op: &DenseOperator, tol: f64) -> Result<Vec<(PauliOperator, num_complex::Complex64)>, CliError> {
    let nq = op.n_qubits;
    let dim = op.dim() as f64;
    let letters = [Pauli1::I, Pauli1::X, Pauli1::Y, Pauli1::Z];
    let mut out = Vec::new();
    for code in 0..4usize.pow(nq as u32) {
        let sites: Vec<(usize, Pauli1)> = (0..nq).map(|q| (q + 1, letters[(code >> (2 * q)) & 3])).collect();
        let p = PauliOperator::from_sites(nq, &sites)?;
        let c = op.trace_with_pauli(&p) / dim;
        if c.norm() > tol {
            out.push((p, c));
        }
    }
    Ok(out)
}

pub fn ed(a: &EdArgs, run: &mut Run) -> Result<(), CliError> {
    let model = build_model(a)?;
    let sup = Superoperator::build(&model)?;
    let filter = a.sector.as_deref().map(parse_charges).transpose()?;
    let keep = |c: &Charges| filter.map_or(true, |f| f == *c);
    match a.report {
        Report::Spectrum => {
            let mut sectors = Vec::new();
            for ch in sup.sectors().into_iter().filter(|c| keep(c)) {
                let ev: Vec<[f64; 2]> = sup.sector_spectrum(&ch)?.iter().map(|z| [z.re, z.im]).collect();
                sectors.push(json!({ "sector": ch.to_string(), "eigenvalues": ev }));
            }
            run.write_json(".spectrum.json", &json!({ "n_qubits": model.n_qubits, "sectors": sectors }))?;
        }
        Report::Steady => {
            let ss = sup.steady_space(DEFAULT_TOL)?;
            let mut rows: Vec<SteadyRow> =
                ss.census().into_iter().filter(|(c, _)| keep(c)).map(|(c, d)| SteadyRow { sector: c.to_string(), dimension: d }).collect();
            rows.sort_by(|x, y| x.sector.cmp(&y.sector));
            run.write_csv(&rows)?;
        }
        Report::Conserved => {
            let ss = sup.steady_space(DEFAULT_TOL)?;
            let mut rows = Vec::new();
            let mut counter = std::collections::HashMap::new();
            for (ch, op) in ss.conserved_operators().into_iter().filter(|(c, _)| keep(c)) {
                let index = counter.entry(ch.to_string()).or_insert(0usize);
                for (p, c) in pauli_decomposition(&op, 1e-9)? {
                    rows.push(ConservedRow { sector: ch.to_string(), index: *index, pauli: p.to_string(), re: c.re, im: c.im });
                }
                *index += 1;
            }
            run.write_csv(&rows)?;
        }
        Report::Correlators => {
            let ss = sup.steady_space(DEFAULT_TOL)?;
            let mut rows = Vec::new();
            let mut census = ss.census();
            census.sort_by_key(|(c, _)| c.to_string());
            for (ch, dim) in census.into_iter().filter(|(c, _)| keep(c)) {
                if dim != 1 {
                    continue;
                }
                let rho = ss.unique_state(&ch)?;
                for q in Quantity::ALL {
                    let (n, m) = if q.odd_endpoints() { (a.n, a.m) } else { (a.n + 1, a.m + 1) };
                    rows.push(CorrelatorRow { sector: ch.to_string(), quantity: q.name().into(), n, m, value: correlator(&rho, q, n, m)? });
                }
            }
            if rows.is_empty() {
                return Err(Error::InvalidArgument("no sector with a unique steady state matches".into()).into());
            }
            run.write_csv(&rows)?;
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, PartialEq)]
pub enum AnalyticKind {
    C2s,
    B2,
    Gap,
    Collapse,
}

#[derive(Debug, Args, Serialize)]
pub struct AnalyticArgs {
    #[arg(long, value_enum)]
    pub quantity: AnalyticKind,
    /// lambda or gamma_zz.
    #[arg(long, default_value = "lambda")]
    pub coupling: String,
    #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "0")]
    pub values: Vec<f64>,
    /// String lengths (C2S, B2) or sizes N (gap, collapse).
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub grid: Vec<usize>,
    /// Largest λ·2N of the collapse table.
    #[arg(long, default_value_t = 4.0)]
    pub x_max: f64,
    #[arg(long, default_value_t = 64)]
    pub points: usize,
}

pub fn analytic(a: &AnalyticArgs, run: &mut Run) -> Result<(), CliError> {
    let mut rows = Vec::new();
    if a.quantity == AnalyticKind::Collapse {
        rows.push(AnalyticRow {
            quantity: "collapse_spread".into(),
            coupling: "x_max".into(),
            value: a.x_max,
            length: a.points,
            result: collapse_spread(&a.grid, a.x_max, a.points)?,
        });
        run.write_csv(&rows)?;
        return Ok(());
    }
    for &v in &a.values {
        let coupling = Coupling::parse(&a.coupling, v).map_err(|e| CliError::Usage(e.to_string()))?;
        for &g in &a.grid {
            rows.push(match a.quantity {
                AnalyticKind::C2s => analytic_row(AnalyticQuantity::C2S, coupling, g)?,
                AnalyticKind::B2 => analytic_row(AnalyticQuantity::B2, coupling, g)?,
                AnalyticKind::Gap => AnalyticRow {
                    quantity: "gap".into(),
                    coupling: coupling.name().into(),
                    value: v,
                    length: g,
                    result: lindblad_gap(&FermionParams::new(g, coupling))?,
                },
                AnalyticKind::Collapse => unreachable!("handled above"),
            });
        }
    }
    run.write_csv(&rows)?;
    Ok(())
}

#[derive(Debug, Args, Serialize)]
pub struct RdArgs {
    /// Number of even sites N.
    #[arg(long)]
    pub sites: usize,
    #[arg(long, default_value = "pbc")]
    #[serde(serialize_with = "ser::boundary")]
    pub boundary: Boundary,
    /// Custom creation channels `i:j:rate` (1-based even-site labels); default is the adjacent-pair perturbation.
    #[arg(long = "create", value_delimiter = ',')]
    pub create: Vec<String>,
    /// Odd string endpoints `n:m`.
    #[arg(long = "string", value_delimiter = ',', num_args = 1.., default_value = "1:5")]
    pub strings: Vec<String>,
}

fn parse_ints<const K: usize>(text: &str, what: &str) -> Result<[String; K], CliError> {
    let parts: Vec<String> = text.split(':').map(|s| s.trim().to_string()).collect();
    parts.try_into().map_err(|_| CliError::Usage(format!("{what} expects {K} ':'-separated fields, got '{text}'")))
}

fn num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T, CliError> {
    s.parse().map_err(|_| CliError::Usage(format!("{what}: cannot parse '{s}'")))
}

pub fn rd(a: &RdArgs, run: &mut Run) -> Result<(), CliError> {
    let pert = if a.create.is_empty() {
        Perturbation::AdjacentPair
    } else {
        let mut rates = Vec::new();
        for c in &a.create {
            let [i, j, r] = parse_ints::<3>(c, "--create")?;
            rates.push(((num(&i, "--create")?, num(&j, "--create")?), num(&r, "--create")?));
        }
        Perturbation::Custom(rates)
    };
    let fo = first_order_steady(a.sites, a.boundary, &pert)?;
    let mut rows = Vec::new();
    for s in &a.strings {
        let [n, m] = parse_ints::<2>(s, "--string")?;
        let (n, m): (usize, usize) = (num(&n, "--string")?, num(&m, "--string")?);
        rows.push(DerivativeRow {
            n_even: a.sites,
            boundary: a.boundary.label().into(),
            pert: pert.name().into(),
            n,
            m,
            derivative: string_derivative(&fo, n, m)?,
        });
    }
    run.write_csv(&rows)?;
    Ok(())
}

#[derive(Debug, Args, Serialize)]
pub struct DefectsArgs {
    #[arg(long, default_value_t = 100)]
    pub qubits: usize,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value_t = 200)]
    pub sweeps: u64,
    /// Sweeps between recorded rows.
    #[arg(long, default_value_t = 1)]
    pub every: u64,
    #[arg(long, default_value = "pbc")]
    #[serde(serialize_with = "ser::boundary")]
    pub boundary: Boundary,
    #[arg(long, value_enum, default_value = "decorated")]
    pub initial: InitialArg,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

pub fn defects(a: &DefectsArgs, run: &mut Run) -> Result<(), CliError> {
    let mut c = TrajectoryConfig::new(a.qubits, a.lambda, a.sweeps * a.qubits as u64, a.seed);
    c.boundary = a.boundary;
    c.observe_every = a.every.max(1) * a.qubits as u64;
    let rows = mspt_core::estimate::defect_record(&c, &a.initial.initial())?;
    run.write_csv(&rows)?;
    Ok(())
}
