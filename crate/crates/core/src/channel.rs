//! Measurement-feedback channels and the trajectory engine.
//!
//! Sites are 1-based. An elementary step picks a frame and a site, then
//! applies the corresponding channel element to a pure stabilizer state.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Boundary, Pauli1, PauliOperator};
use crate::stab::StabilizerState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Frame {
    Primal,
    Dual,
}

/// How odd-site elements are realized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OddRealization {
    /// Apply one of two cluster-check unitaries with probability ½ each.
    #[default]
    Unitary,
    /// Measure `Z_j`, then apply the cluster check unconditionally.
    Kraus,
}

#[derive(Clone, Debug)]
enum Element {
    /// Measure `check`; on −1 apply `feedback`.
    Measure { check: PauliOperator, feedback: PauliOperator },
    /// Apply `a` or `b` with probability ½.
    Twirl { a: PauliOperator, b: PauliOperator, measured: PauliOperator },
}

/// Precompiled channel elements for one chain.
#[derive(Clone, Debug)]
pub struct Channel {
    n_qubits: usize,
    boundary: Boundary,
    odd: OddRealization,
    sites: Vec<usize>,
    primal: Vec<Option<Element>>,
    dual: Vec<Option<Element>>,
}

fn ops(n: usize, f: &[(isize, Pauli1)], site: usize) -> PauliOperator {
    let factors: Vec<(usize, Pauli1)> = f
        .iter()
        .map(|&(o, k)| (((site as isize - 1 + o).rem_euclid(n as isize)) as usize + 1, k))
        .collect();
    PauliOperator::from_sites(n, &factors).expect("sites folded into range")
}

impl Channel {
    pub fn new(n_qubits: usize, boundary: Boundary) -> Result<Self> {
        Self::with_odd_realization(n_qubits, boundary, OddRealization::Unitary)
    }

    pub fn with_odd_realization(n_qubits: usize, boundary: Boundary, odd: OddRealization) -> Result<Self> {
        if n_qubits < 4 || n_qubits % 2 == 1 {
            return Err(Error::Parity(format!("channels need an even chain of at least 4 qubits, got {n_qubits}")));
        }
        let n = n_qubits;
        let mut primal = vec![None];
        let mut dual = vec![None];
        let mut sites = Vec::new();
        for j in 1..=n {
            // Both frames use the support of the primal element: j−1..=j+1.
            let admissible = boundary == Boundary::Periodic || (j >= 2 && j < n);
            if !admissible {
                primal.push(None);
                dual.push(None);
                continue;
            }
            sites.push(j);
            let zxz = ops(n, &[(-1, Pauli1::Z), (0, Pauli1::X), (1, Pauli1::Z)], j);
            let zyz = ops(n, &[(-1, Pauli1::Z), (0, Pauli1::Y), (1, Pauli1::Z)], j);
            let zj = ops(n, &[(0, Pauli1::Z)], j);
            if j % 2 == 0 {
                primal.push(Some(Element::Measure { check: zxz, feedback: ops(n, &[(1, Pauli1::X)], j) }));
                dual.push(Some(Element::Measure {
                    check: ops(n, &[(0, Pauli1::X)], j),
                    feedback: ops(n, &[(0, Pauli1::Z), (1, Pauli1::X), (2, Pauli1::Z)], j),
                }));
            } else {
                primal.push(Some(Element::Twirl { a: zxz, b: zyz, measured: zj.clone() }));
                dual.push(Some(Element::Twirl {
                    a: ops(n, &[(0, Pauli1::X)], j),
                    b: ops(n, &[(0, Pauli1::Y)], j),
                    measured: zj,
                }));
            }
        }
        Ok(Channel { n_qubits, boundary, odd, sites, primal, dual })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Sites whose element is kept under the boundary condition.
    pub fn admissible_sites(&self) -> &[usize] {
        &self.sites
    }

    /// Applies one channel element. Dropped boundary elements act as the identity.
    pub fn step_site<R: Rng + ?Sized>(&self, state: &mut StabilizerState, site: usize, frame: Frame, rng: &mut R) -> Result<()> {
        if site == 0 || site > self.n_qubits {
            return Err(Error::OutOfRange { site, n_qubits: self.n_qubits });
        }
        if state.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch { left: self.n_qubits, right: state.n_qubits() });
        }
        self.step_unchecked(state, site, frame, rng);
        Ok(())
    }

    fn step_unchecked<R: Rng + ?Sized>(&self, state: &mut StabilizerState, site: usize, frame: Frame, rng: &mut R) {
        let table = match frame {
            Frame::Primal => &self.primal,
            Frame::Dual => &self.dual,
        };
        match &table[site] {
            None => {}
            Some(Element::Measure { check, feedback }) => {
                let (outcome, _) = state.measure_unchecked(check, rng, None);
                if outcome < 0 {
                    state.apply_pauli_unchecked(feedback);
                }
            }
            Some(Element::Twirl { a, b, measured }) => match self.odd {
                OddRealization::Unitary => {
                    let u = if rng.gen::<bool>() { a } else { b };
                    state.apply_pauli_unchecked(u);
                }
                OddRealization::Kraus => {
                    state.measure_unchecked(measured, rng, None);
                    state.apply_pauli_unchecked(a);
                }
            },
        }
    }

    /// Draws a frame (dual with probability `lambda`) and a uniform admissible site.
    pub fn step_lambda<R: Rng + ?Sized>(&self, state: &mut StabilizerState, lambda: f64, rng: &mut R) -> Frame {
        let frame = if rng.gen::<f64>() < lambda { Frame::Dual } else { Frame::Primal };
        let site = self.sites[rng.gen_range(0..self.sites.len())];
        self.step_unchecked(state, site, frame, rng);
        frame
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryConfig {
    pub n_qubits: usize,
    pub boundary: Boundary,
    pub lambda: f64,
    pub steps: u64,
    pub burn_in: u64,
    pub seed: u64,
    pub observe_every: u64,
}

impl TrajectoryConfig {
    /// Defaults: PBC, no burn-in, one observation per sweep of `n_qubits` steps.
    pub fn new(n_qubits: usize, lambda: f64, steps: u64, seed: u64) -> Self {
        TrajectoryConfig {
            n_qubits,
            boundary: Boundary::Periodic,
            lambda,
            steps,
            burn_in: 0,
            seed,
            observe_every: n_qubits as u64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits % 2 == 1 || self.n_qubits < 4 {
            return Err(Error::Parity(format!("n_qubits must be even and >= 4, got {}", self.n_qubits)));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::InvalidArgument(format!("lambda {} outside [0,1]", self.lambda)));
        }
        if self.observe_every == 0 {
            return Err(Error::InvalidArgument("observe_every must be positive".into()));
        }
        Ok(())
    }

    /// Independent generator for one trajectory.
    pub fn rng(&self, trajectory: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trajectory);
        rng
    }

    /// Whether step count `t` is an observation time.
    pub fn observes(&self, t: u64) -> bool {
        t >= self.burn_in && (t - self.burn_in) % self.observe_every == 0
    }
}

#[derive(Clone, Debug)]
pub enum Initial {
    Plus,
    DecoratedSample,
    Custom(StabilizerState),
}

impl Initial {
    pub fn prepare<R: Rng + ?Sized>(&self, n_qubits: usize, boundary: Boundary, rng: &mut R) -> Result<StabilizerState> {
        match self {
            Initial::Plus => Ok(StabilizerState::plus_state(n_qubits)),
            Initial::DecoratedSample => StabilizerState::sample_decorated_state(n_qubits, boundary, rng),
            Initial::Custom(s) => {
                if s.n_qubits() != n_qubits {
                    return Err(Error::DimensionMismatch { left: n_qubits, right: s.n_qubits() });
                }
                Ok(s.clone())
            }
        }
    }
}

/// Read-only probe evaluated at observation times.
pub trait Observer: Sync {
    fn observe(&self, state: &StabilizerState) -> Vec<f64>;
}

/// Expectation values of a fixed list of Pauli operators.
#[derive(Clone, Debug)]
pub struct PauliObserver {
    ops: Vec<PauliOperator>,
}

impl PauliObserver {
    pub fn new(ops: Vec<PauliOperator>, n_qubits: usize) -> Result<Self> {
        for p in &ops {
            if p.n_qubits() != n_qubits {
                return Err(Error::DimensionMismatch { left: n_qubits, right: p.n_qubits() });
            }
            if !p.is_hermitian() {
                return Err(Error::NotHermitian(p.to_string()));
            }
        }
        Ok(PauliObserver { ops })
    }
}

impl Observer for PauliObserver {
    fn observe(&self, state: &StabilizerState) -> Vec<f64> {
        self.ops.iter().map(|p| state.expectation_unchecked(p) as f64).collect()
    }
}

impl<F: Fn(&StabilizerState) -> Vec<f64> + Sync> Observer for F {
    fn observe(&self, state: &StabilizerState) -> Vec<f64> {
        self(state)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub t: u64,
    /// One vector per observer.
    pub values: Vec<Vec<f64>>,
}

/// Runs trajectory number `trajectory` and returns the observation records.
pub fn run_trajectory(
    config: &TrajectoryConfig,
    trajectory: u64,
    initial: &Initial,
    observers: &[&dyn Observer],
) -> Result<Vec<Record>> {
    config.validate()?;
    let channel = Channel::new(config.n_qubits, config.boundary)?;
    let mut rng = config.rng(trajectory);
    let mut state = initial.prepare(config.n_qubits, config.boundary, &mut rng)?;
    let mut out = Vec::new();
    let mut record = |t: u64, s: &StabilizerState| {
        out.push(Record { t, values: observers.iter().map(|o| o.observe(s)).collect() });
    };
    if config.observes(0) {
        record(0, &state);
    }
    for t in 1..=config.steps {
        channel.step_lambda(&mut state, config.lambda, &mut rng);
        if config.observes(t) {
            record(t, &state);
        }
    }
    Ok(out)
}

/// Runs a trajectory and returns its final state together with every observed state.
pub fn trajectory_snapshots(config: &TrajectoryConfig, trajectory: u64, initial: &Initial) -> Result<Vec<(u64, StabilizerState)>> {
    config.validate()?;
    let channel = Channel::new(config.n_qubits, config.boundary)?;
    let mut rng = config.rng(trajectory);
    let mut state = initial.prepare(config.n_qubits, config.boundary, &mut rng)?;
    let mut out = Vec::new();
    if config.observes(0) {
        out.push((0, state.clone()));
    }
    for t in 1..=config.steps {
        channel.step_lambda(&mut state, config.lambda, &mut rng);
        if config.observes(t) {
            out.push((t, state.clone()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{symmetry_operator, SymmetryKind};

    #[test]
    fn obc_sites_follow_primal_support() {
        let c = Channel::new(8, Boundary::Open).unwrap();
        assert_eq!(c.admissible_sites(), &[2, 3, 4, 5, 6, 7]);
        let c = Channel::new(8, Boundary::Periodic).unwrap();
        assert_eq!(c.admissible_sites().len(), 8);
    }

    #[test]
    fn fixed_points_of_elements() {
        let n = 8;
        let c = Channel::new(n, Boundary::Periodic).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let dec = StabilizerState::sample_decorated_state(n, Boundary::Periodic, &mut rng).unwrap();
        let mut s = dec.clone();
        for j in (2..=n).step_by(2) {
            c.step_site(&mut s, j, Frame::Primal, &mut rng).unwrap();
        }
        assert!(s.equivalent(&dec));
        let plus = StabilizerState::plus_state(n);
        let mut s = plus.clone();
        for j in (2..=n).step_by(2) {
            c.step_site(&mut s, j, Frame::Dual, &mut rng).unwrap();
        }
        assert!(s.equivalent(&plus));
        assert!(c.step_site(&mut s, 0, Frame::Dual, &mut rng).is_err());
        assert!(c.step_site(&mut s, n + 1, Frame::Dual, &mut rng).is_err());
    }

    #[test]
    fn strong_charge_is_conserved() {
        let n = 10;
        let sym = symmetry_operator(SymmetryKind::S, n).unwrap();
        for lambda in [0.0, 0.3, 1.0] {
            let cfg = TrajectoryConfig { observe_every: 1, ..TrajectoryConfig::new(n, lambda, 400, 11) };
            let obs = PauliObserver::new(vec![sym.clone()], n).unwrap();
            let recs = run_trajectory(&cfg, 0, &Initial::DecoratedSample, &[&obs]).unwrap();
            assert_eq!(recs.len(), 401);
            assert!(recs.iter().all(|r| r.values[0][0] == 1.0));
        }
    }

    #[test]
    fn zero_steps_gives_initial_record() {
        let cfg = TrajectoryConfig::new(6, 0.2, 0, 1);
        let obs = |s: &StabilizerState| vec![s.n_qubits() as f64];
        let recs = run_trajectory(&cfg, 0, &Initial::Plus, &[&obs]).unwrap();
        assert_eq!(recs, vec![Record { t: 0, values: vec![vec![6.0]] }]);
    }

    #[test]
    fn primal_odd_twice_with_same_pick_is_identity() {
        let n = 6;
        let c = Channel::new(n, Boundary::Periodic).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let start = StabilizerState::random_clifford(n, &mut rng);
        // A mock generator returning the same word twice yields the same pick.
        let mut mock = rand::rngs::mock::StepRng::new(7, 0);
        let mut s = start.clone();
        c.step_site(&mut s, 3, Frame::Primal, &mut mock).unwrap();
        c.step_site(&mut s, 3, Frame::Primal, &mut mock).unwrap();
        assert!(s.equivalent(&start));
    }
}
