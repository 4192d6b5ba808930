//! Exact diagonalization against the classical population solvers.

use mspt_core::exact::{
    build_state, charge_sector, correlator, Charges, DenseOperator, JumpKind, LindbladModel, Quantity, SectorLabel,
    StateKind, Superoperator, C64, DEFAULT_TOL,
};
use mspt_core::freefermion::{lindblad_gap, Coupling, FermionParams};
use mspt_core::rdpert::{
    build_p0, first_order_steady, population_flip_renyi2, population_generator, population_steady,
    population_string_renyi2, string_derivative, PairState, Perturbation,
};
use mspt_core::{Boundary, Pauli1, PauliOperator};
use ndarray_linalg::Eig;

/// `Π_even (1 ∓ X_{2i})/2` with occupied sites (1-based particle labels) taking `X = −1`.
fn population_op(n_qubits: usize, occupied: impl Fn(usize) -> bool) -> DenseOperator {
    let half = C64::new(0.5, 0.0);
    let mut op = DenseOperator::identity(n_qubits);
    for i in 1..=n_qubits / 2 {
        let x = PauliOperator::single(n_qubits, 2 * i, Pauli1::X).unwrap();
        let s = if occupied(i) { -1.0 } else { 1.0 };
        op = op.add(&op.pauli_left(&x).scaled(C64::new(s, 0.0))).scaled(half);
    }
    op
}

fn dual_population_matrix(n_qubits: usize, boundary: Boundary) -> (ndarray::Array2<f64>, f64) {
    let model = LindbladModel::dual_parent(n_qubits, boundary).unwrap();
    let sup = Superoperator::build(&model).unwrap();
    let ops: Vec<DenseOperator> =
        (0..1usize << (n_qubits / 2)).map(|c| population_op(n_qubits, |i| c >> (i - 1) & 1 == 1)).collect();
    sup.restrict(&ops).unwrap()
}

#[test]
fn dual_model_population_sector_is_the_classical_generator() {
    for boundary in [Boundary::Periodic, Boundary::Open] {
        for nq in [4, 6] {
            let (m, residual) = dual_population_matrix(nq, boundary);
            assert!(residual < 1e-12, "{boundary:?} {nq}: sector leaks {residual}");
            let g = population_generator(nq / 2, boundary, 1.0, 0.0).unwrap();
            let diff = (&m - &g).iter().fold(0.0f64, |a, x| a.max(x.abs()));
            assert!(diff < 1e-12, "{boundary:?} 2N={nq}: max diff {diff}");
        }
    }
}

#[test]
fn pair_sector_generator_matches_dual_restriction() {
    for boundary in [Boundary::Periodic, Boundary::Open] {
        let nq = 8;
        let n = nq / 2;
        let p0 = build_p0(n, boundary).unwrap();
        let model = LindbladModel::dual_parent(nq, boundary).unwrap();
        let sup = Superoperator::build(&model).unwrap();
        let ops: Vec<DenseOperator> = (0..p0.index.len())
            .map(|k| match p0.index.state(k).unwrap() {
                PairState::Vacuum => population_op(nq, |_| false),
                PairState::Pair(a, b) => population_op(nq, |i| i == a || i == b),
            })
            .collect();
        // The pair sector is closed only together with the vacuum; restriction residual measures that.
        let (m, residual) = sup.restrict(&ops).unwrap();
        assert!(residual < 1e-12, "{boundary:?}: leak {residual}");
        let diff = (&m - &p0.matrix).iter().fold(0.0f64, |a, x| a.max(x.abs()));
        assert!(diff < 1e-12, "{boundary:?}: {diff}");
    }
}

fn slowest_nonzero_rate(m: &ndarray::Array2<f64>) -> f64 {
    let c = m.mapv(|x| C64::new(x, 0.0));
    let (ev, _) = c.eig().unwrap();
    ev.iter().map(|z| -z.re).filter(|&r| r > 1e-9).fold(f64::INFINITY, f64::min)
}

#[test]
fn ed_population_gap_is_twice_the_single_particle_gap() {
    for nq in [4, 6, 8] {
        let n = nq / 2;
        let (m, _) = dual_population_matrix(nq, Boundary::Periodic);
        let gap = slowest_nonzero_rate(&m);
        let single = lindblad_gap(&FermionParams::new(n, Coupling::Lambda(0.0))).unwrap();
        let exact = 2.0 * (1.0 - (std::f64::consts::PI / n as f64).cos());
        assert!((gap - exact).abs() < 1e-8, "N={n}: ED {gap} vs {exact}");
        assert!((gap - 2.0 * single).abs() < 1e-8);
    }
}

fn primal_zz_steady(gamma: f64) -> DenseOperator {
    let mut m = LindbladModel::parent(6, Boundary::Periodic).unwrap();
    m.push_family(JumpKind::Lzz, gamma).unwrap();
    let sup = Superoperator::build(&m).unwrap();
    let ss = sup.steady_space(DEFAULT_TOL).unwrap();
    ss.unique_state(&Charges::new(1, 1, 1)).unwrap()
}

#[test]
fn ed_with_zz_noise_equals_population_solver() {
    for gamma in [0.1, 0.5, 2.0] {
        let rho = primal_zz_steady(gamma);
        let p = population_steady(3, Boundary::Periodic, 1.0, gamma).unwrap();
        let pairs = [
            (correlator(&rho, Quantity::CIIS, 1, 3).unwrap(), population_string_renyi2(&p, 1, 1)),
            (correlator(&rho, Quantity::CIIS, 1, 5).unwrap(), population_string_renyi2(&p, 1, 2)),
            (correlator(&rho, Quantity::BII, 2, 4).unwrap(), population_flip_renyi2(&p, 1, 2)),
        ];
        for (ed, pop) in pairs {
            assert!((ed - pop).abs() < 1e-8, "γ={gamma}: ED {ed} vs population {pop}");
        }
    }
}

#[test]
fn ed_at_six_qubits_is_not_the_large_ring_limit() {
    let rho = primal_zz_steady(0.5);
    let c = correlator(&rho, Quantity::CIIS, 1, 3).unwrap();
    let b = correlator(&rho, Quantity::BII, 2, 4).unwrap();
    assert!((c - 2.0 / 3.0).abs() < 1e-8);
    assert!((b - 2.0 / 3.0).abs() < 1e-8);
}

#[test]
fn population_solver_converges_to_closed_forms() {
    let gamma = 0.5;
    let p = population_steady(12, Boundary::Periodic, 1.0, gamma).unwrap();
    let r = 1.0 / (1.0 + 2.0 * gamma);
    let c1 = population_string_renyi2(&p, 3, 3);
    let c2 = population_string_renyi2(&p, 3, 4);
    let b = population_flip_renyi2(&p, 3, 4);
    assert!((c1 - r).abs() < 2e-3, "{c1}");
    assert!((c2 - r * r).abs() < 2e-3, "{c2}");
    assert!((b - (1.0 - r * r)).abs() < 2e-3, "{b}");
}

fn dual_trivial_string(lambda: f64) -> f64 {
    let mut m = LindbladModel::dual_parent(6, Boundary::Periodic).unwrap();
    if lambda > 0.0 {
        m.push_family(JumpKind::Lzz, lambda).unwrap();
    }
    let sup = Superoperator::build(&m).unwrap();
    let ss = sup.steady_space(DEFAULT_TOL).unwrap();
    let rt = build_state(StateKind::RhoTilde, 6, Boundary::Periodic).unwrap();
    let SectorLabel::Pure(ch) = charge_sector(&rt, 1e-10).unwrap() else { panic!("ρ̃ has mixed charges") };
    correlator(&ss.unique_state(&ch).unwrap(), Quantity::TrivialCIS, 1, 5).unwrap()
}

#[test]
fn first_order_derivative_matches_extrapolated_finite_difference() {
    let fo = first_order_steady(3, Boundary::Periodic, &Perturbation::AdjacentPair).unwrap();
    let rd = string_derivative(&fo, 1, 5).unwrap();
    let h = 1e-3;
    let c0 = dual_trivial_string(0.0);
    assert!((c0 - 1.0).abs() < 1e-10);
    let d_h = (dual_trivial_string(h) - c0) / h;
    let d_half = (dual_trivial_string(h / 2.0) - c0) / (h / 2.0);
    let richardson = 2.0 * d_half - d_h;
    assert!((rd - richardson).abs() < 1e-4, "rd {rd} vs Richardson {richardson}");
}
