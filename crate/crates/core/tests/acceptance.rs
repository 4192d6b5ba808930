//! One PASS/FAIL line per acceptance criterion.
//!
//! Exits 0 unless `ACCEPTANCE_STRICT=1` is set and some line fails.
//! `ACCEPTANCE_ONLY=<substring>` restricts the run to matching criterion names.

mod common;

use std::time::Instant;

use common::{random_gate, random_hermitian_pauli, StateVector};
use mspt_core::channel::trajectory_snapshots;
use mspt_core::estimate::{linear_fit, mixing_time, translated_string_curve, two_copy, Moments};
use mspt_core::exact::{
    build_state, charge_sector, correlator, trace_channel, Charges, DenseOperator, JumpKind, LindbladModel, Quantity,
    SectorLabel, StateKind, Superoperator, C64, DEFAULT_TOL,
};
use mspt_core::freefermion::{lindblad_gap, Coupling, FermionParams};
use mspt_core::rdpert::{
    first_order_steady, population_flip_renyi2, population_steady, population_string_renyi2,
    string_derivative, Perturbation,
};
use mspt_core::{
    linalg, Boundary, Dyadic, Initial, Pauli1, PauliOperator, Result, StabilizerState, StringKind, TrajectoryConfig,
    TwoCopyQuantity,
};
use ndarray_linalg::Eig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CENSUS_TOL_SECONDS: f64 = 30.0;
const FIXED_POINT_RESIDUAL: f64 = 1e-12;
const PATTERN_TOL: f64 = 1e-10;
const CLOSED_FORM_TOL: f64 = 1e-8;
const GAP_TOL: f64 = 1e-8;
const GAP_EXPONENT: (f64, f64) = (2.0, 0.02);
const MIXING_ETA: f64 = 0.95;
const MIXING_LENGTH: usize = 28;
const MIXING_SAMPLES: usize = 1000;
const MIXING_SIZES: [usize; 5] = [60, 80, 100, 140, 200];
const MIXING_SLOPE: (f64, f64) = (2.0, 0.3);
const SSB_SIGMAS: f64 = 5.0;
const FLAT_SIGMAS: f64 = 2.0;
const DECAY_R2: f64 = 0.98;
const PURITY_PAIRS: u64 = 100_000;
const PURITY_SIGMAS: f64 = 3.0;
const ORACLE_INSTANCES: usize = 1000;
const RDPERT_TOL: f64 = 1e-4;
const RDPERT_LAMBDA: f64 = 1e-3;
const WEAK_DEFECT_TOL: f64 = 1e-8;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { pass, detail: detail.into() })
}

fn steady(model: &LindbladModel) -> Result<mspt_core::exact::SteadySpace> {
    Superoperator::build(model)?.steady_space(DEFAULT_TOL)
}

fn census() -> Result<Outcome> {
    let start = Instant::now();
    let pbc = steady(&LindbladModel::parent(6, Boundary::Periodic)?)?.census();
    let want = [Charges::new(1, 1, 1), Charges::new(-1, -1, 1)];
    let pbc_ok = pbc.len() == 2 && want.iter().all(|w| pbc.iter().any(|(c, k)| c == w && *k == 1));

    let mut model = LindbladModel::parent(6, Boundary::Open)?;
    let obc = steady(&model)?.census();
    let mut labels: Vec<String> = obc.iter().map(|(c, _)| c.to_string()).collect();
    labels.sort();
    labels.dedup();
    let obc_ok = obc.len() == 8 && labels.len() == 8 && obc.iter().all(|(_, k)| *k == 1);

    model.push(JumpKind::X, 6, 1.0)?;
    let one_edge = steady(&model)?.dimension();
    model.push(JumpKind::X, 1, 1.0)?;
    let two_edges = steady(&model)?.dimension();
    let secs = start.elapsed().as_secs_f64();
    outcome(
        pbc_ok && obc_ok && one_edge == 4 && two_edges == 2 && secs < CENSUS_TOL_SECONDS,
        format!("PBC {} states, OBC {} states in {} sectors, +X_6 → {one_edge}, +X_1 → {two_edges}, {secs:.1}s", pbc.len(), obc.len(), labels.len()),
    )
}

fn fixed_points() -> Result<Outcome> {
    let mut worst_residual = 0.0f64;
    let mut worst_pattern = 0.0f64;
    for nq in [6usize, 8] {
        for b in [Boundary::Periodic, Boundary::Open] {
            let sup = Superoperator::build(&LindbladModel::parent(nq, b)?)?;
            let rc = build_state(StateKind::RhoC, nq, b)?;
            worst_residual = worst_residual.max(sup.apply_to(&rc)?.max_abs());
        }
        let half = nq / 2;
        let rc = build_state(StateKind::RhoC, nq, Boundary::Periodic)?;
        let rm = build_state(StateKind::RhoMinus, nq, Boundary::Periodic)?;
        for (a, b) in [(1usize, 3usize), (1, 5), (3, nq - 1)] {
            let (w1, w2) = (a + 1, b + 1);
            let mut dev = |x: f64, want: f64| worst_pattern = worst_pattern.max((x - want).abs());
            dev(correlator(&rc, Quantity::CIS, a, b)?, 1.0);
            dev(correlator(&rc, Quantity::CIIS, a, b)?, 1.0);
            dev(correlator(&rc, Quantity::CIIW, w1, w2)?, 1.0);
            dev(correlator(&rc, Quantity::TrivialCIS, a, b)?, 0.0);
            dev(correlator(&rc, Quantity::TrivialCIIS, a, b)?, 0.0);
            dev(correlator(&rc, Quantity::TrivialCIIW, w1, w2)?, 0.0);
            for q in [Quantity::AI, Quantity::AII, Quantity::BII] {
                dev(correlator(&rc, q, w1, w2)?, 0.0);
            }
            let d = (b - a) / 2;
            dev(correlator(&rm, Quantity::CIS, a, b)?, (half as f64 - 2.0 * d as f64) / half as f64);
            dev(correlator(&rm, Quantity::CIIW, w1, w2)?, 1.0);
        }
    }
    outcome(
        worst_residual <= FIXED_POINT_RESIDUAL && worst_pattern <= PATTERN_TOL,
        format!("max |L ρ_C| = {worst_residual:.1e}, max pattern deviation = {worst_pattern:.1e}"),
    )
}

fn closed_forms() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for gamma in [0.1, 0.5, 2.0] {
        let mut model = LindbladModel::parent(6, Boundary::Periodic)?;
        model.push_family(JumpKind::Lzz, gamma)?;
        let rho = steady(&model)?.unique_state(&Charges::new(1, 1, 1))?;
        let r = 1.0 / (1.0 + 2.0 * gamma);
        let c1 = correlator(&rho, Quantity::CIIS, 1, 3)?;
        let c2 = correlator(&rho, Quantity::CIIS, 1, 5)?;
        let b = correlator(&rho, Quantity::BII, 2, 4)?;
        for (x, want) in [(c1, r), (c2, r * r), (b, 1.0 - r * r)] {
            worst = worst.max((x - want).abs());
        }
        parts.push(format!("γ={gamma}: C_II^S(1)={c1:.6} vs {r:.6}, B_II={b:.6} vs {:.6}", 1.0 - r * r));
    }
    outcome(worst <= CLOSED_FORM_TOL, format!("2N=6 max deviation {worst:.3e}; {}", parts.join("; ")))
}

/// Large-ring limit of the same closed forms, from the population solver.
fn closed_forms_large_ring() -> Result<String> {
    let gamma = 0.5;
    let r = 1.0 / (1.0 + 2.0 * gamma);
    let p = population_steady(12, Boundary::Periodic, 1.0, gamma)?;
    Ok(format!(
        "N=12 population solver at γ={gamma}: C_II^S(1)={:.5} vs {r}, C_II^S(2)={:.5} vs {}, B_II={:.5} vs {}",
        population_string_renyi2(&p, 3, 3),
        population_string_renyi2(&p, 3, 4),
        r * r,
        population_flip_renyi2(&p, 3, 4),
        1.0 - r * r
    ))
}

/// `Π_i (1 ∓ X_{2i})/2`, with occupied even sites taking `X = −1`.
fn population_op(nq: usize, occupied: impl Fn(usize) -> bool) -> Result<DenseOperator> {
    let half = C64::new(0.5, 0.0);
    let mut op = DenseOperator::identity(nq);
    for i in 1..=nq / 2 {
        let x = PauliOperator::single(nq, 2 * i, Pauli1::X)?;
        let s = if occupied(i) { -1.0 } else { 1.0 };
        op = op.add(&op.pauli_left(&x).scaled(C64::new(s, 0.0))).scaled(half);
    }
    Ok(op)
}

/// The dual parent superoperator restricted to the population sector.
fn ed_population_matrix(nq: usize) -> Result<ndarray::Array2<f64>> {
    let sup = Superoperator::build(&LindbladModel::dual_parent(nq, Boundary::Periodic)?)?;
    let ops: Vec<DenseOperator> =
        (0..1usize << (nq / 2)).map(|c| population_op(nq, |i| c >> (i - 1) & 1 == 1)).collect::<Result<_>>()?;
    let (m, leak) = sup.restrict(&ops)?;
    if leak > 1e-10 {
        return Err(mspt_core::Error::Numerical(format!("population sector leaks {leak}")));
    }
    Ok(m)
}

fn slowest_nonzero_rate(m: &ndarray::Array2<f64>) -> Result<f64> {
    let (ev, _) = m.mapv(|x| C64::new(x, 0.0)).eig().map_err(|e| mspt_core::Error::Numerical(e.to_string()))?;
    Ok(ev.iter().map(|z| -z.re).filter(|&r| r > 1e-9).fold(f64::INFINITY, f64::min))
}

fn gap_scaling() -> Result<Outcome> {
    let gap = |n: usize| lindblad_gap(&FermionParams::new(n, Coupling::Lambda(0.0)));
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for n in [2usize, 3, 4] {
        let ed = slowest_nonzero_rate(&ed_population_matrix(2 * n)?)?;
        let g = gap(n)?;
        worst = worst.max((ed - g).abs());
        parts.push(format!("N={n}: ED {ed:.6} vs {g:.6}"));
    }
    let sizes: Vec<usize> = (3..=8).map(|k| 1 << k).collect();
    let xs: Vec<f64> = sizes.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = sizes.iter().map(|&n| gap(n).map(f64::ln)).collect::<Result<_>>()?;
    let exponent = -linear_fit(&xs, &ys)?.slope;
    let exp_ok = (exponent - GAP_EXPONENT.0).abs() <= GAP_EXPONENT.1;
    outcome(
        worst <= GAP_TOL && exp_ok,
        format!("{}; exponent {exponent:.4} ({})", parts.join(", "), if exp_ok { "ok" } else { "off" }),
    )
}

fn mixing_scaling() -> Result<Outcome> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut parts = Vec::new();
    for (k, &nq) in MIXING_SIZES.iter().enumerate() {
        let mut c = TrajectoryConfig::new(nq, 0.0, 4_000 * (nq as u64).pow(2), 1000 + k as u64);
        c.boundary = Boundary::Open;
        c.observe_every = nq as u64 / 2;
        let n = 2 * (nq / 4) - 21;
        let mt = mixing_time(&c, n, n + MIXING_LENGTH, MIXING_ETA, MIXING_SAMPLES)?;
        xs.push((nq as f64).ln());
        ys.push((mt.steps as f64).ln());
        parts.push(format!("2N={nq}: {} steps", mt.steps));
    }
    let slope = linear_fit(&xs, &ys)?.slope;
    outcome((slope - MIXING_SLOPE.0).abs() <= MIXING_SLOPE.1, format!("slope {slope:.3}; {}", parts.join(", ")))
}

/// Per-step snapshots after a burn-in; purity at 2N=14 is ~3·10⁻⁴, so Rényi-2 ratios need millions of pairs.
fn ssb_config(nq: usize, lambda: f64, seed: u64) -> TrajectoryConfig {
    let mut c = TrajectoryConfig::new(nq, lambda, 300 * nq as u64, seed);
    c.burn_in = 100 * nq as u64;
    c.observe_every = 1;
    c
}

/// `⟨Z_nZ_m⟩ − ⟨Z_n⟩⟨Z_m⟩` averaged over trajectory snapshots.
fn clifford_a_i(c: &TrajectoryConfig, n: usize, m: usize, trajectories: u64) -> Result<f64> {
    let nq = c.n_qubits;
    let zn = PauliOperator::single(nq, n, Pauli1::Z)?;
    let zm = PauliOperator::single(nq, m, Pauli1::Z)?;
    let zz = zn.multiply(&zm)?;
    let (mut a, mut b, mut ab) = (Moments::default(), Moments::default(), Moments::default());
    for i in 0..trajectories {
        for (_, s) in trajectory_snapshots(c, i, &Initial::Plus)? {
            a.push(s.expectation(&zn)? as f64);
            b.push(s.expectation(&zm)? as f64);
            ab.push(s.expectation(&zz)? as f64);
        }
    }
    Ok(ab.mean() - a.mean() * b.mean())
}

fn sw_ssb() -> Result<Outcome> {
    let nq = 14;
    let (traj, zero_traj) = (480, 16);
    let endpoints = [(2usize, 4usize), (2, 8), (2, 12)];
    let mut ok = true;
    let mut parts = Vec::new();
    for (k, lambda) in [0.2, 0.5, 0.8].into_iter().enumerate() {
        let (a, b) = (ssb_config(nq, lambda, 200 + 2 * k as u64), ssb_config(nq, lambda, 201 + 2 * k as u64));
        let mut bs = Vec::new();
        let mut zeros = true;
        for &(n, m) in &endpoints {
            zeros &= clifford_a_i(&a, n, m, zero_traj)? == 0.0;
            zeros &= two_copy((&a, &b), TwoCopyQuantity::AII, n, m, traj, &Initial::Plus)?.mean == 0.0;
            bs.push(two_copy((&a, &b), TwoCopyQuantity::BII, n, m, traj, &Initial::Plus)?);
        }
        let resolved = bs.iter().all(|e| e.mean > SSB_SIGMAS * e.stderr);
        let flat = bs.iter().all(|e| (e.mean - bs[0].mean).abs() <= FLAT_SIGMAS * (e.stderr.powi(2) + bs[0].stderr.powi(2)).sqrt());
        ok &= zeros && resolved && flat;
        let vals: Vec<String> = bs.iter().map(|e| format!("{:.4}±{:.4}", e.mean, e.stderr)).collect();
        parts.push(format!("λ={lambda}: A≡0 {zeros}, B_II [{}]", vals.join(" ")));
    }
    for (k, lambda) in [0.0, 1.0].into_iter().enumerate() {
        let (a, b) = (ssb_config(nq, lambda, 300 + 2 * k as u64), ssb_config(nq, lambda, 301 + 2 * k as u64));
        let e = two_copy((&a, &b), TwoCopyQuantity::BII, 2, 8, zero_traj, &Initial::Plus)?;
        ok &= e.mean.abs() <= FLAT_SIGMAS * e.stderr;
        parts.push(format!("λ={lambda}: B_II {:.4}±{:.4}", e.mean, e.stderr));
    }

    let mut c = TrajectoryConfig::new(100, 0.5, 200 * 100, 400);
    c.burn_in = 100 * 100;
    let rows = translated_string_curve(&c, StringKind::Strong, &[2, 4, 6, 8, 10], 200, &Initial::Plus)?;
    let resolved: Vec<_> = rows.iter().take_while(|r| r.mean > 3.0 * r.stderr).collect();
    let xs: Vec<f64> = resolved.iter().map(|r| (r.m - r.n) as f64).collect();
    let ys: Vec<f64> = resolved.iter().map(|r| r.mean.ln()).collect();
    let r2 = if resolved.len() >= 3 { linear_fit(&xs, &ys)?.r2 } else { f64::NAN };
    ok &= r2 > DECAY_R2;
    let vals: Vec<String> = rows.iter().map(|r| format!("{:.5}±{:.5}", r.mean, r.stderr)).collect();
    parts.push(format!("C_I^S 2N=100 [{}] R²={r2:.4} over {} points", vals.join(" "), resolved.len()));
    outcome(ok, parts.join("; "))
}

fn purity() -> Result<Outcome> {
    let nq = 10;
    let mut a = TrajectoryConfig::new(nq, 0.0, 0, 500);
    let mut b = TrajectoryConfig::new(nq, 0.0, 0, 501);
    // Snapshots one sweep apart are correlated; the jackknife over trajectories accounts for it.
    for c in [&mut a, &mut b] {
        c.steps = 400 * nq as u64;
    }
    let per_traj = a.steps / a.observe_every + 1;
    let traj = PURITY_PAIRS.div_ceil(per_traj);
    let e = two_copy((&a, &b), TwoCopyQuantity::Purity, 1, 3, traj, &Initial::DecoratedSample)?;
    let want = 2f64.powi(-(nq as i32 / 2));
    outcome(
        e.n_samples >= PURITY_PAIRS && (e.mean - want).abs() <= PURITY_SIGMAS * e.stderr,
        format!("{:.6} ± {:.6} vs {want} over {} pairs", e.mean, e.stderr, e.n_samples),
    )
}

fn prepared(n: usize, rng: &mut ChaCha8Rng) -> Result<(StabilizerState, StateVector)> {
    let mut t = StabilizerState::zero_state(n);
    let mut sv = StateVector::zero(n);
    for _ in 0..(3 * n * n + 6) {
        let g = random_gate(n, rng);
        t.apply_gate(g)?;
        sv.apply(g);
    }
    Ok((t, sv))
}

fn algorithm_one_oracle() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(600);
    let (mut mismatches, mut nonzero) = (0usize, 0usize);
    for trial in 0..ORACLE_INSTANCES {
        let n = 1 + trial % 6;
        let (u, su) = prepared(n, &mut rng)?;
        let (v, sv) = if trial % 2 == 0 {
            prepared(n, &mut rng)?
        } else {
            let (mut v, mut sv) = (u.clone(), su.clone());
            for _ in 0..rng.gen_range(0..4) {
                let g = random_gate(n, &mut rng);
                v.apply_gate(g)?;
                sv.apply(g);
            }
            (v, sv)
        };
        let a = random_hermitian_pauli(n, &mut rng);
        let b = random_hermitian_pauli(n, &mut rng);
        let dense = su.inner(&sv.pauli(&a)) * sv.inner(&su.pauli(&b));
        let d = StabilizerState::sandwich(&u, &a, &b, &v)?;
        // Dense amplitudes at n ≤ 6 are sums of dyadic terms, so a float match to 1e-12 pins the dyadic value.
        let same = match d {
            Dyadic::Zero => dense.norm() < 1e-12,
            Dyadic::Unit { .. } => {
                nonzero += 1;
                (d.to_complex() - dense).norm() < 1e-12
            }
        };
        mismatches += usize::from(!same);
    }
    outcome(mismatches == 0, format!("{ORACLE_INSTANCES} instances, {nonzero} nonzero, {mismatches} mismatches"))
}

fn dual_trivial_string(lambda: f64) -> Result<f64> {
    let mut m = LindbladModel::dual_parent(6, Boundary::Periodic)?;
    if lambda > 0.0 {
        m.push_family(JumpKind::Lzz, lambda)?;
    }
    let ss = steady(&m)?;
    let rt = build_state(StateKind::RhoTilde, 6, Boundary::Periodic)?;
    let SectorLabel::Pure(ch) = charge_sector(&rt, 1e-10)? else {
        return Err(mspt_core::Error::Numerical("ρ̃ has mixed charges".into()));
    };
    correlator(&ss.unique_state(&ch)?, Quantity::TrivialCIS, 1, 5)
}

fn perturbation_theory() -> Result<Outcome> {
    let fo = first_order_steady(3, Boundary::Periodic, &Perturbation::AdjacentPair)?;
    let rd = string_derivative(&fo, 1, 5)?;
    let h = RDPERT_LAMBDA;
    let c0 = dual_trivial_string(0.0)?;
    let d_h = (dual_trivial_string(h)? - c0) / h;
    let d_half = (dual_trivial_string(h / 2.0)? - c0) / (h / 2.0);
    let richardson = 2.0 * d_half - d_h;
    outcome(
        (rd - richardson).abs() <= RDPERT_TOL,
        format!("rdpert {rd:.6}, extrapolated ED difference {richardson:.6}, forward difference {d_h:.6}"),
    )
}

fn trace_channel_destruction() -> Result<Outcome> {
    let nq = 6;
    let rc = build_state(StateKind::RhoC, nq, Boundary::Periodic)?;
    let sigma = trace_channel(&rc)?;
    let c = correlator(&sigma, Quantity::CIS, 1, 5)?;
    let sup = Superoperator::build(&LindbladModel::trace_lindbladian(nq, Boundary::Periodic)?)?;
    let mut ok = c == 0.0;
    let mut parts = vec![format!("C_I^S(σ) = {c}")];
    for t in [1.0f64, 2.0, 4.0] {
        let d = sup.evolve(&rc, t)?.sub(&sigma).trace_norm_hermitian()?;
        let bound = (nq / 2) as f64 * (-t).exp();
        ok &= d <= bound;
        parts.push(format!("t={t}: {d:.4e} ≤ {bound:.4e}"));
    }
    outcome(ok, parts.join(", "))
}

fn weak_defects() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for l0 in [0.25, 0.5, 0.75] {
        let rho = steady(&LindbladModel::general(6, Boundary::Periodic, l0, l0, 0.0)?)?.unique_state(&Charges::new(1, 1, 1))?;
        worst = worst.max((correlator(&rho, Quantity::CIS, 1, 5)? - 1.0).abs());
        worst = worst.max((correlator(&rho, Quantity::CIIS, 1, 5)? - 1.0).abs());
        worst = worst.max(correlator(&rho, Quantity::BII, 2, 4)?.abs());
    }
    outcome(worst <= WEAK_DEFECT_TOL, format!("max deviation {worst:.2e}"))
}

type Criterion = fn() -> Result<Outcome>;

fn main() {
    let only = std::env::var("ACCEPTANCE_ONLY").ok();
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if let Err(e) = linalg::self_check() {
        println!("FAIL linalg-backend: {e}");
        std::process::exit(1);
    }
    let criteria: [(&str, Criterion); 11] = [
        ("steady-state-census", census),
        ("fixed-point-identities", fixed_points),
        ("closed-form-zz-noise", closed_forms),
        ("gap-scaling", gap_scaling),
        ("mixing-time-scaling", mixing_scaling),
        ("sw-ssb-signatures", sw_ssb),
        ("purity", purity),
        ("algorithm-1-oracle", algorithm_one_oracle),
        ("perturbation-theory", perturbation_theory),
        ("trace-channel", trace_channel_destruction),
        ("weak-defects", weak_defects),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        if only.as_deref().is_some_and(|o| !name.contains(o)) {
            continue;
        }
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!("{} {name}: {detail} [{:.1}s]", if pass { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64());
        if name == "closed-form-zz-noise" {
            match closed_forms_large_ring() {
                Ok(s) => println!("INFO {name}: {s}"),
                Err(e) => println!("INFO {name}: error: {e}"),
            }
        }
    }
    println!("acceptance: {failed} failing");
    if strict && failed > 0 {
        std::process::exit(1);
    }
}
