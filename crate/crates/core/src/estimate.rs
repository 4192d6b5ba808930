//! Monte Carlo estimators over trajectory ensembles.

use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{trajectory_snapshots, Channel, Initial, TrajectoryConfig};
use crate::error::{Error, Result};
use crate::pauli::{string_operator, Pauli1, PauliOperator, StringKind};
use crate::stab::StabilizerState;

/// Default largest chain accepted by two-copy estimators without `force`.
pub const DEFAULT_TWO_COPY_MAX_QUBITS: usize = 14;

/// One row of estimator output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub quantity: String,
    pub n_qubits: usize,
    pub boundary: String,
    pub lambda: f64,
    pub n: usize,
    pub m: usize,
    pub t: Option<u64>,
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: u64,
    pub seed: u64,
}

/// Neumaier-compensated running moments. Merging is associative up to rounding.
#[derive(Clone, Copy, Debug, Default)]
pub struct Moments {
    count: u64,
    sum: f64,
    comp: f64,
    sum_sq: f64,
    comp_sq: f64,
}

fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        neumaier(&mut self.sum, &mut self.comp, x);
        neumaier(&mut self.sum_sq, &mut self.comp_sq, x * x);
    }

    pub fn merge(&mut self, other: &Moments) {
        self.count += other.count;
        neumaier(&mut self.sum, &mut self.comp, other.sum);
        neumaier(&mut self.sum, &mut self.comp, other.comp);
        neumaier(&mut self.sum_sq, &mut self.comp_sq, other.sum_sq);
        neumaier(&mut self.sum_sq, &mut self.comp_sq, other.comp_sq);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            return f64::NAN;
        }
        (self.sum + self.comp) / self.count as f64
    }

    /// Sample variance with the `n − 1` denominator.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        let mean = self.mean();
        (((self.sum_sq + self.comp_sq) - n * mean * mean) / (n - 1.0)).max(0.0)
    }

    pub fn stderr(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        (self.variance() / self.count as f64).sqrt()
    }
}

/// Ordinary least-squares line `y = slope·x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub slope_stderr: f64,
    pub points: usize,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidArgument(format!("fit inputs differ in length: {} vs {}", xs.len(), ys.len())));
    }
    let k = xs.len();
    if k < 3 {
        return Err(Error::InvalidArgument(format!("fewer than 3 usable points ({k})")));
    }
    let nf = k as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    let slope_stderr = (sse / (nf - 2.0) / sxx).sqrt();
    Ok(LinearFit { slope, intercept, r2, slope_stderr, points: k })
}

/// Ensemble average of one observable at an observation time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub t: u64,
    pub mean: f64,
    pub stderr: f64,
}

/// Runs `samples` trajectories in lockstep and records the ensemble mean of
/// `observable` at every observation time until `stop` returns true or the
/// step budget runs out.
pub fn ensemble_curve(
    config: &TrajectoryConfig,
    initial: &Initial,
    samples: usize,
    observable: &PauliOperator,
    stop: impl Fn(&CurvePoint) -> bool,
) -> Result<Vec<CurvePoint>> {
    config.validate()?;
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let channel = Channel::new(config.n_qubits, config.boundary)?;
    let mut ensemble: Vec<(StabilizerState, ChaCha8Rng)> = (0..samples as u64)
        .map(|i| {
            let mut rng = config.rng(i);
            let s = initial.prepare(config.n_qubits, config.boundary, &mut rng)?;
            Ok((s, rng))
        })
        .collect::<Result<_>>()?;
    let measure = |ens: &[(StabilizerState, ChaCha8Rng)], t: u64| -> CurvePoint {
        let vals: Vec<f64> = ens.par_iter().map(|(s, _)| s.expectation_unchecked(observable) as f64).collect();
        let mut m = Moments::default();
        vals.iter().for_each(|&v| m.push(v));
        CurvePoint { t, mean: m.mean(), stderr: m.stderr() }
    };
    let mut out = Vec::new();
    let mut t = 0u64;
    if config.observes(0) {
        let p = measure(&ensemble, 0);
        out.push(p);
        if stop(&p) {
            return Ok(out);
        }
    }
    while t < config.steps {
        // Advance to the next observation time or the end of the budget.
        let next = if t < config.burn_in {
            config.burn_in
        } else {
            t + config.observe_every - (t - config.burn_in) % config.observe_every
        }
        .min(config.steps);
        let advance = next - t;
        let lambda = config.lambda;
        ensemble.par_iter_mut().for_each(|(s, rng)| {
            for _ in 0..advance {
                channel.step_lambda(s, lambda, rng);
            }
        });
        t = next;
        if config.observes(t) {
            let p = measure(&ensemble, t);
            out.push(p);
            if stop(&p) {
                break;
            }
        }
    }
    Ok(out)
}

fn check_string(kind: StringKind, n: usize, m: usize, n_qubits: usize, boundary: crate::Boundary) -> Result<PauliOperator> {
    string_operator(kind, n, m, n_qubits, boundary == crate::Boundary::Periodic)
}

fn string_quantity(kind: StringKind) -> &'static str {
    match kind {
        StringKind::Strong => "C_I_S",
        StringKind::Weak => "C_I_W",
        StringKind::TrivialStrong => "trivial_C_I_S",
        StringKind::TrivialWeak => "trivial_C_I_W",
    }
}

/// Runs `trajectories` trajectories, feeding every observation of `observer`
/// into one accumulator per output slot.
fn per_trajectory_moments(
    config: &TrajectoryConfig,
    trajectories: u64,
    initial: &Initial,
    observer: &dyn crate::channel::Observer,
    slots: usize,
) -> Result<Vec<Vec<Moments>>> {
    (0..trajectories)
        .into_par_iter()
        .map(|i| {
            let recs = crate::channel::run_trajectory(config, i, initial, &[observer])?;
            let mut ms = vec![Moments::default(); slots];
            for r in &recs {
                for (k, v) in r.values[0].iter().enumerate() {
                    ms[k].push(*v);
                }
            }
            Ok(ms)
        })
        .collect()
}

/// One row per slot; errors from batch means over trajectories, or from the
/// raw observations when there is a single trajectory.
fn rows_from_moments(
    config: &TrajectoryConfig,
    kind: StringKind,
    endpoints: &[(usize, usize)],
    per_traj: &[Vec<Moments>],
) -> Result<Vec<EstimateResult>> {
    let trajectories = per_traj.len() as u64;
    let mut out = Vec::new();
    for (k, &(n, m)) in endpoints.iter().enumerate() {
        let (mean, stderr, count) = if trajectories >= 2 {
            let mut batch = Moments::default();
            for ms in per_traj {
                batch.push(ms[k].mean());
            }
            (batch.mean(), batch.stderr(), trajectories)
        } else {
            let ms = &per_traj[0][k];
            (ms.mean(), ms.stderr(), ms.count())
        };
        if mean.is_nan() {
            return Err(Error::InvalidArgument("no observation times inside the step budget".into()));
        }
        out.push(EstimateResult {
            quantity: string_quantity(kind).to_string(),
            n_qubits: config.n_qubits,
            boundary: config.boundary.label().to_string(),
            lambda: config.lambda,
            n,
            m,
            t: None,
            mean,
            stderr,
            n_samples: count,
            seed: config.seed,
        });
    }
    Ok(out)
}

fn check_curve_inputs(config: &TrajectoryConfig, points: usize, trajectories: u64) -> Result<()> {
    config.validate()?;
    if points == 0 {
        return Err(Error::InvalidArgument("empty list of string endpoints".into()));
    }
    if trajectories == 0 {
        return Err(Error::InvalidArgument("need at least one trajectory".into()));
    }
    Ok(())
}

/// Time-averaged string expectation for each `m`, with trajectory batch means for the error.
pub fn string_curve(
    config: &TrajectoryConfig,
    kind: StringKind,
    n: usize,
    m_list: &[usize],
    trajectories: u64,
    initial: &Initial,
) -> Result<Vec<EstimateResult>> {
    check_curve_inputs(config, m_list.len(), trajectories)?;
    let strings: Vec<PauliOperator> =
        m_list.iter().map(|&m| check_string(kind, n, m, config.n_qubits, config.boundary)).collect::<Result<_>>()?;
    let obs = crate::channel::PauliObserver::new(strings, config.n_qubits)?;
    let per_traj = per_trajectory_moments(config, trajectories, initial, &obs, m_list.len())?;
    let endpoints: Vec<(usize, usize)> = m_list.iter().map(|&m| (n, m)).collect();
    rows_from_moments(config, kind, &endpoints, &per_traj)
}

/// Like [`string_curve`] on a ring, but every observation is first averaged
/// over all translates of the string. Rows report `n` as the first admissible
/// start site and `m = n + length`.
pub fn translated_string_curve(
    config: &TrajectoryConfig,
    kind: StringKind,
    lengths: &[usize],
    trajectories: u64,
    initial: &Initial,
) -> Result<Vec<EstimateResult>> {
    check_curve_inputs(config, lengths.len(), trajectories)?;
    if config.boundary != crate::Boundary::Periodic {
        return Err(Error::InvalidArgument("translation averaging needs periodic boundaries".into()));
    }
    let nq = config.n_qubits;
    let first = match kind {
        StringKind::Strong | StringKind::TrivialStrong => 1,
        StringKind::Weak | StringKind::TrivialWeak => 2,
    };
    let families: Vec<Vec<PauliOperator>> = lengths
        .iter()
        .map(|&len| {
            if len == 0 || len >= nq {
                return Err(Error::InvalidArgument(format!("string length {len} outside 1..{nq}")));
            }
            (first..=nq).step_by(2).map(|n| string_operator(kind, n, n + len, nq, true)).collect()
        })
        .collect::<Result<_>>()?;
    let observer = |s: &StabilizerState| -> Vec<f64> {
        families
            .iter()
            .map(|ops| ops.iter().map(|p| s.expectation_unchecked(p) as f64).sum::<f64>() / ops.len() as f64)
            .collect()
    };
    let per_traj = per_trajectory_moments(config, trajectories, initial, &observer, lengths.len())?;
    let endpoints: Vec<(usize, usize)> = lengths.iter().map(|&len| (first, first + len)).collect();
    rows_from_moments(config, kind, &endpoints, &per_traj)
}

/// Mixing-time result: first observation step with mean `C_I^S ≥ η`, and the curve up to it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixingTime {
    pub steps: u64,
    pub curve: Vec<CurvePoint>,
}

/// First observation step at which the ensemble-averaged strong string from
/// `|+⟩^{⊗2N}` reaches `eta` under the unperturbed channel.
pub fn mixing_time(config: &TrajectoryConfig, n: usize, m: usize, eta: f64, samples: usize) -> Result<MixingTime> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidArgument(format!("threshold {eta} outside (0,1)")));
    }
    if config.lambda != 0.0 {
        return Err(Error::InvalidArgument("mixing time is defined for lambda = 0".into()));
    }
    let s = check_string(StringKind::Strong, n, m, config.n_qubits, config.boundary)?;
    let curve = ensemble_curve(config, &Initial::Plus, samples, &s, |p| p.mean >= eta)?;
    match curve.last() {
        Some(p) if p.mean >= eta => Ok(MixingTime { steps: p.t, curve }),
        last => Err(Error::NotReached { eta, steps: config.steps, last: last.map_or(f64::NAN, |p| p.mean) }),
    }
}

/// Fit diagnostics of an exponential decay.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    pub tau: f64,
    pub fit: LinearFit,
    pub curve: Vec<CurvePoint>,
}

/// `τ = −1/slope` of `ln(mean)` against `t`, over points with `lo ≤ mean ≤ hi`.
pub fn fit_decay(curve: &[CurvePoint], window: (f64, f64)) -> Result<DecayFit> {
    let (lo, hi) = window;
    // Only the first passage counts: a noisy plateau can wander back into the window later.
    let pts: Vec<&CurvePoint> =
        curve.iter().take_while(|p| p.mean >= lo).filter(|p| p.mean > 0.0 && p.mean <= hi).collect();
    if pts.len() < 3 && !curve.is_empty() && curve.iter().all(|p| p.mean > hi) {
        return Err(Error::NoDecay(format!("mean never dropped below {hi}")));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.t as f64).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.mean.ln()).collect();
    let fit = linear_fit(&xs, &ys)?;
    if !(fit.slope < -2.0 * fit.slope_stderr) || fit.slope >= 0.0 {
        return Err(Error::NoDecay(format!("slope {:.3e} ± {:.3e}", fit.slope, fit.slope_stderr)));
    }
    Ok(DecayFit { tau: -1.0 / fit.slope, fit, curve: curve.to_vec() })
}

/// Decay time of the strong string starting from decorated samples.
pub fn decay_time(config: &TrajectoryConfig, n: usize, m: usize, window: (f64, f64), samples: usize) -> Result<DecayFit> {
    let s = check_string(StringKind::Strong, n, m, config.n_qubits, config.boundary)?;
    let lo = window.0;
    let curve = ensemble_curve(config, &Initial::DecoratedSample, samples, &s, |p| p.mean < lo * 0.5)?;
    fit_decay(&curve, window)
}

/// Two-copy quantities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TwoCopyQuantity {
    Purity,
    AII,
    BII,
    CIIS,
    CIIW,
    TrivialCIIS,
    TrivialCIIW,
}

impl TwoCopyQuantity {
    pub const ALL: [TwoCopyQuantity; 7] = [
        TwoCopyQuantity::Purity,
        TwoCopyQuantity::AII,
        TwoCopyQuantity::BII,
        TwoCopyQuantity::CIIS,
        TwoCopyQuantity::CIIW,
        TwoCopyQuantity::TrivialCIIS,
        TwoCopyQuantity::TrivialCIIW,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TwoCopyQuantity::Purity => "purity",
            TwoCopyQuantity::AII => "A_II",
            TwoCopyQuantity::BII => "B_II",
            TwoCopyQuantity::CIIS => "C_II_S",
            TwoCopyQuantity::CIIW => "C_II_W",
            TwoCopyQuantity::TrivialCIIS => "trivial_C_II_S",
            TwoCopyQuantity::TrivialCIIW => "trivial_C_II_W",
        }
    }
}

impl fmt::Display for TwoCopyQuantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TwoCopyQuantity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        TwoCopyQuantity::ALL
            .iter()
            .copied()
            .find(|q| q.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown two-copy quantity '{s}'")))
    }
}

/// Refuses chains whose Rényi-2 estimates would need exponentially many samples.
pub fn check_sample_budget(n_qubits: usize, max_qubits: usize, force: bool) -> Result<()> {
    if n_qubits > max_qubits && !force {
        return Err(Error::SizeCap { what: "two-copy estimator (purity ~ 2^-N needs ~2^N samples)", max: max_qubits, got: n_qubits });
    }
    Ok(())
}

/// Pairs of sandwich arguments `(A, Bᵀ)` whose means feed one quantity.
fn two_copy_terms(q: TwoCopyQuantity, n: usize, m: usize, nq: usize, wrap: bool) -> Result<Vec<(PauliOperator, PauliOperator)>> {
    let id = PauliOperator::identity(nq);
    let even = |s: usize| -> Result<()> {
        if s % 2 == 1 {
            return Err(Error::Parity(format!("{q} needs even sites, got {s}")));
        }
        Ok(())
    };
    Ok(match q {
        TwoCopyQuantity::Purity => vec![],
        TwoCopyQuantity::CIIS => vec![(string_operator(StringKind::Strong, n, m, nq, wrap)?, id)],
        TwoCopyQuantity::TrivialCIIS => vec![(string_operator(StringKind::TrivialStrong, n, m, nq, wrap)?, id)],
        TwoCopyQuantity::CIIW | TwoCopyQuantity::TrivialCIIW => {
            let kind = if q == TwoCopyQuantity::CIIW { StringKind::Weak } else { StringKind::TrivialWeak };
            let s = string_operator(kind, n, m, nq, wrap)?;
            let st = s.transpose();
            vec![(s, st)]
        }
        TwoCopyQuantity::AII | TwoCopyQuantity::BII => {
            even(n)?;
            even(m)?;
            let zn = PauliOperator::single(nq, n, Pauli1::Z)?;
            let zm = PauliOperator::single(nq, m, Pauli1::Z)?;
            let zz = zn.multiply(&zm)?;
            if q == TwoCopyQuantity::AII {
                vec![(zz, id.clone()), (zn, id.clone()), (zm, id)]
            } else {
                vec![(zz.clone(), zz.transpose()), (zn.clone(), zn.transpose()), (zm.clone(), zm.transpose())]
            }
        }
    })
}

/// Combines term means (last entry is the purity) into the quantity.
fn assemble(q: TwoCopyQuantity, means: &[f64]) -> f64 {
    let p = *means.last().expect("purity present");
    match q {
        TwoCopyQuantity::Purity => p,
        TwoCopyQuantity::CIIS | TwoCopyQuantity::TrivialCIIS | TwoCopyQuantity::CIIW | TwoCopyQuantity::TrivialCIIW => means[0] / p,
        TwoCopyQuantity::AII | TwoCopyQuantity::BII => means[0] / p - (means[1] / p) * (means[2] / p),
    }
}

/// Rényi-2 estimator from pairs of independent trajectory streams.
///
/// Trajectory `i` of stream A is paired with trajectory `i` of stream B, and
/// their snapshots are matched by observation time. Errors come from a
/// jackknife over trajectory pairs, which keeps snapshot correlations inside
/// one block.
pub fn two_copy(
    configs: (&TrajectoryConfig, &TrajectoryConfig),
    quantity: TwoCopyQuantity,
    n: usize,
    m: usize,
    trajectories: u64,
    initial: &Initial,
) -> Result<EstimateResult> {
    let (ca, cb) = configs;
    ca.validate()?;
    cb.validate()?;
    if ca.n_qubits != cb.n_qubits || ca.boundary != cb.boundary || ca.lambda != cb.lambda {
        return Err(Error::InvalidArgument("two-copy streams must share n_qubits, boundary and lambda".into()));
    }
    if ca.seed == cb.seed {
        return Err(Error::InvalidArgument("two-copy streams need distinct seeds".into()));
    }
    if trajectories < 2 {
        return Err(Error::InvalidArgument("jackknife needs at least two trajectory pairs".into()));
    }
    let nq = ca.n_qubits;
    let terms = two_copy_terms(quantity, n, m, nq, ca.boundary == crate::Boundary::Periodic)?;
    let k = terms.len() + 1;
    let blocks: Vec<(Vec<f64>, u64)> = (0..trajectories)
        .into_par_iter()
        .map(|i| {
            let a = trajectory_snapshots(ca, i, initial)?;
            let b = trajectory_snapshots(cb, i, initial)?;
            let mut sums = vec![Moments::default(); k];
            let mut pairs = 0u64;
            for ((_, u), (_, v)) in a.iter().zip(&b) {
                for (slot, (op_a, op_bt)) in sums.iter_mut().zip(&terms) {
                    slot.push(StabilizerState::sandwich(u, op_a, op_bt, v)?.re());
                }
                sums[k - 1].push(StabilizerState::overlap_sq(u, v)?);
                pairs += 1;
            }
            Ok((sums.iter().map(|s| s.mean()).collect(), pairs))
        })
        .collect::<Result<_>>()?;
    let total_pairs: u64 = blocks.iter().map(|b| b.1).sum();
    if total_pairs == 0 {
        return Err(Error::InvalidArgument("no observation times inside the step budget".into()));
    }
    // Pair-weighted block means.
    let weighted = |skip: Option<usize>| -> Vec<f64> {
        let mut acc = vec![0.0; k];
        let mut w = 0.0;
        for (i, (means, pairs)) in blocks.iter().enumerate() {
            if Some(i) == skip || *pairs == 0 {
                continue;
            }
            for (a, v) in acc.iter_mut().zip(means) {
                *a += v * *pairs as f64;
            }
            w += *pairs as f64;
        }
        acc.iter().map(|a| a / w).collect()
    };
    let full = weighted(None);
    let mut purity = Moments::default();
    for (means, _) in &blocks {
        purity.push(means[k - 1]);
    }
    if quantity != TwoCopyQuantity::Purity && full[k - 1].abs() <= 2.0 * purity.stderr() {
        return Err(Error::IllConditioned { mean: full[k - 1], stderr: purity.stderr() });
    }
    let estimate = assemble(quantity, &full);
    let b = blocks.len();
    let loo: Vec<f64> = (0..b).map(|i| assemble(quantity, &weighted(Some(i)))).collect();
    let loo_mean = loo.iter().sum::<f64>() / b as f64;
    let var = loo.iter().map(|x| (x - loo_mean).powi(2)).sum::<f64>() * (b as f64 - 1.0) / b as f64;
    Ok(EstimateResult {
        quantity: quantity.name().to_string(),
        n_qubits: nq,
        boundary: ca.boundary.label().to_string(),
        lambda: ca.lambda,
        n,
        m,
        t: None,
        mean: estimate,
        stderr: var.sqrt(),
        n_samples: total_pairs,
        seed: ca.seed,
    })
}

/// Defect map of one trajectory at one observation time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectRow {
    pub t: u64,
    /// `⟨X_i⟩` for even `i = 2, 4, …`; one `;`-separated cell in CSV.
    #[serde(serialize_with = "crate::io::join_signs", deserialize_with = "crate::io::split_signs")]
    pub x_even: Vec<i8>,
    /// Number of even sites with `⟨X_i⟩ = −1`, divided by `2N`.
    pub density: f64,
}

/// Records `⟨X_even⟩` and the defect density along trajectory 0.
pub fn defect_record(config: &TrajectoryConfig, initial: &Initial) -> Result<Vec<DefectRow>> {
    let nq = config.n_qubits;
    let xs: Vec<PauliOperator> = (2..=nq).step_by(2).map(|j| PauliOperator::single(nq, j, Pauli1::X)).collect::<Result<_>>()?;
    let obs = crate::channel::PauliObserver::new(xs, nq)?;
    let recs = crate::channel::run_trajectory(config, 0, initial, &[&obs])?;
    Ok(recs
        .into_iter()
        .map(|r| {
            let x_even: Vec<i8> = r.values[0].iter().map(|&v| v as i8).collect();
            let defects = x_even.iter().filter(|&&v| v == -1).count();
            DefectRow { t: r.t, x_even, density: defects as f64 / nq as f64 }
        })
        .collect())
}
