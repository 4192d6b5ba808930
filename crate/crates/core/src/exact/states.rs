//! Dense density matrices of the reference states and the open-chain edge family.

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::exact::dense::{DenseOperator, OperatorKind, MAX_DENSITY_QUBITS, C64};
use crate::exact::superop::u_cz_sign;
use crate::pauli::{Boundary, Pauli1, PauliOperator};
use crate::stab::StabilizerState;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateKind {
    RhoC,
    RhoMinus,
    RhoTilde,
    /// `ρ_{αβ}` with virtual boundary labels `α, β ∈ {0, 1}`.
    Edge(u8, u8),
    /// `Z_{2N} ρ_{αβ}`.
    EdgePrime(u8, u8),
}

impl fmt::Display for StateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateKind::RhoC => f.write_str("rho_C"),
            StateKind::RhoMinus => f.write_str("rho_minus"),
            StateKind::RhoTilde => f.write_str("rho_tilde"),
            StateKind::Edge(a, b) => write!(f, "edge{a}{b}"),
            StateKind::EdgePrime(a, b) => write!(f, "edge_prime{a}{b}"),
        }
    }
}

impl FromStr for StateKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bits = |t: &str| -> Result<(u8, u8)> {
            let b: Vec<u8> = t.bytes().map(|c| c.wrapping_sub(b'0')).collect();
            match b.as_slice() {
                [a, c] if *a < 2 && *c < 2 => Ok((*a, *c)),
                _ => Err(Error::Parse(format!("bad edge labels in '{s}'"))),
            }
        };
        match s {
            "rho_C" | "rho_c" => Ok(StateKind::RhoC),
            "rho_minus" => Ok(StateKind::RhoMinus),
            "rho_tilde" => Ok(StateKind::RhoTilde),
            _ if s.starts_with("edge_prime") => bits(&s[10..]).map(|(a, b)| StateKind::EdgePrime(a, b)),
            _ if s.starts_with("edge") => bits(&s[4..]).map(|(a, b)| StateKind::Edge(a, b)),
            _ => Err(Error::Parse(format!("unknown state '{s}'"))),
        }
    }
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_DENSITY_QUBITS {
        return Err(Error::SizeCap { what: "dense density matrix", max: MAX_DENSITY_QUBITS, got: n });
    }
    if n < 2 || n % 2 == 1 {
        return Err(Error::Parity(format!("states need an even qubit count, got {n}")));
    }
    Ok(())
}

/// Builds one of the reference states.
pub fn build_state(kind: StateKind, n_qubits: usize, boundary: Boundary) -> Result<DenseOperator> {
    check_size(n_qubits)?;
    match kind {
        StateKind::RhoTilde => Ok(rho_tilde(n_qubits)),
        StateKind::RhoC => Ok(rho_c(n_qubits)),
        StateKind::RhoMinus => {
            let rc = rho_c(n_qubits);
            let n_even = n_qubits / 2;
            let mut acc = DenseOperator::zeros(n_qubits, OperatorKind::Density);
            for j in (2..=n_qubits).step_by(2) {
                let z = PauliOperator::single(n_qubits, j, Pauli1::Z)?;
                acc = acc.add(&rc.pauli_conj(&z));
            }
            let mut out = acc.scaled(C64::new(1.0 / n_even as f64, 0.0));
            out.kind = OperatorKind::Density;
            Ok(out)
        }
        StateKind::Edge(a, b) | StateKind::EdgePrime(a, b) => {
            if boundary != Boundary::Open {
                return Err(Error::InvalidArgument("edge states exist only under open boundaries".into()));
            }
            let e = edge_state(n_qubits, a, b)?;
            if matches!(kind, StateKind::EdgePrime(..)) {
                let z = PauliOperator::single(n_qubits, n_qubits, Pauli1::Z)?;
                return Ok(e.pauli_left(&z));
            }
            Ok(e)
        }
    }
}

/// `|ψ⟩⟨ψ| = Π_g (1 + g)/2` over the stabilizer generators of a pure state.
pub fn stabilizer_projector(state: &StabilizerState) -> Result<DenseOperator> {
    let n = state.n_qubits();
    if n > MAX_DENSITY_QUBITS {
        return Err(Error::SizeCap { what: "dense density matrix", max: MAX_DENSITY_QUBITS, got: n });
    }
    let half = C64::new(0.5, 0.0);
    let mut out = DenseOperator::identity(n);
    for g in state.stabilizers() {
        out = out.add(&out.pauli_left(&g)).scaled(half);
    }
    out.kind = OperatorKind::Density;
    Ok(out)
}

/// `⊗_odd 1/2 ⊗_even |+⟩⟨+|`.
fn rho_tilde(n: usize) -> DenseOperator {
    let d = 1usize << n;
    let odd_mask: usize = (0..n).step_by(2).map(|q| 1usize << (n - 1 - q)).sum();
    let w = 1.0 / d as f64;
    let mut out = DenseOperator::zeros(n, OperatorKind::Density);
    for a in 0..d {
        for b in 0..d {
            if (a ^ b) & odd_mask == 0 {
                out.data[(a, b)] = C64::new(w, 0.0);
            }
        }
    }
    out
}

/// `U_CZ ρ̃ U_CZ†` with the diagonal ring circuit.
fn rho_c(n: usize) -> DenseOperator {
    let mut out = rho_tilde(n);
    let d = 1usize << n;
    let signs: Vec<f64> = (0..d).map(|b| u_cz_sign(b, n)).collect();
    for ((a, b), v) in out.data.indexed_iter_mut() {
        *v *= signs[a] * signs[b];
    }
    out
}

/// Virtual-space tensor of an odd site: `A^{z,z'} = Π_z δ_{z,z'}`.
pub fn odd_tensor(z: i8, zp: i8) -> Array2<f64> {
    let mut m = Array2::zeros((2, 2));
    if z == zp {
        let k = if z > 0 { 0 } else { 1 };
        m[(k, k)] = 1.0;
    }
    m
}

/// Virtual-space tensor of an even site: `B^{x,x'} = X^{(1−x)/2} δ_{x,x'}`.
pub fn even_tensor(x: i8, xp: i8) -> Array2<f64> {
    if x != xp {
        return Array2::zeros((2, 2));
    }
    if x > 0 {
        Array2::eye(2)
    } else {
        ndarray::arr2(&[[0.0, 1.0], [1.0, 0.0]])
    }
}

/// `ρ_{αβ} = ⟨v_α| A B A B ⋯ |v_β⟩ / 2^N`, diagonal in the mixed Z/X basis.
fn edge_state(n: usize, alpha: u8, beta: u8) -> Result<DenseOperator> {
    if alpha > 1 || beta > 1 {
        return Err(Error::InvalidArgument(format!("edge labels must be 0 or 1, got ({alpha},{beta})")));
    }
    let d = 1usize << n;
    let n_even = n / 2;
    let mut diag = DenseOperator::zeros(n, OperatorKind::Density);
    let norm = 1.0 / (1u64 << n_even) as f64;
    for cfg in 0..d {
        // Bit 0 of the physical index is the eigenvalue +1 of Z (odd) or X (even).
        let mut v = alpha;
        let mut alive = true;
        for q in 0..n {
            let bit = ((cfg >> (n - 1 - q)) & 1) as u8;
            if q % 2 == 0 {
                if v != bit {
                    alive = false;
                    break;
                }
            } else {
                v ^= bit;
            }
        }
        if alive && v == beta {
            diag.data[(cfg, cfg)] = C64::new(norm, 0.0);
        }
    }
    let evens: Vec<usize> = (1..n).step_by(2).collect();
    let mut out = diag.hadamard_conj(&evens);
    out.kind = OperatorKind::Density;
    Ok(out)
}
