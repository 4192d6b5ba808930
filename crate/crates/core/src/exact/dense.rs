//! Dense operators on `2^n`-dimensional Hilbert spaces and fast Pauli actions.
//!
//! Basis index bit `n-1-q` holds qubit `q` (0-based), so site 1 is the most
//! significant bit and Kronecker products read left to right.

use ndarray::Array2;
use ndarray_linalg::EigValsh;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::PauliOperator;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Largest chain for which dense density matrices are built.
pub const MAX_DENSITY_QUBITS: usize = 12;

pub(crate) fn i_pow(k: u8) -> C64 {
    match k & 3 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// A Pauli string compiled to basis-index masks: `P|b⟩ = coeff(b) |b ^ flip⟩`.
#[derive(Clone, Copy, Debug)]
pub struct PauliAction {
    pub flip: usize,
    pub zmask: usize,
    pub phase: u8,
}

impl PauliAction {
    pub fn new(p: &PauliOperator) -> Self {
        let n = p.n_qubits();
        let (mut flip, mut zmask) = (0usize, 0usize);
        for q in 0..n {
            let (x, z) = p.bits(q);
            let bit = 1usize << (n - 1 - q);
            if x {
                flip |= bit;
            }
            if z {
                zmask |= bit;
            }
        }
        PauliAction { flip, zmask, phase: p.phase_exp() }
    }

    /// Amplitude picked up by basis state `b`.
    #[inline]
    pub fn coeff(&self, b: usize) -> C64 {
        // X^x Z^z |b⟩ = (-1)^{z·b} |b ⊕ x⟩
        let sign = ((self.zmask & b).count_ones() & 1) as u8;
        i_pow(self.phase + 2 * sign)
    }

    #[inline]
    pub fn apply(&self, b: usize) -> (usize, C64) {
        (b ^ self.flip, self.coeff(b))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorKind {
    Density,
    Operator,
}

/// Dense complex matrix on `n_qubits` qubits.
#[derive(Clone, Debug)]
pub struct DenseOperator {
    pub kind: OperatorKind,
    pub n_qubits: usize,
    pub data: Array2<C64>,
}

impl DenseOperator {
    pub fn zeros(n_qubits: usize, kind: OperatorKind) -> Self {
        let d = 1usize << n_qubits;
        DenseOperator { kind, n_qubits, data: Array2::zeros((d, d)) }
    }

    pub fn identity(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        DenseOperator { kind: OperatorKind::Operator, n_qubits, data: Array2::eye(d) }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn from_pauli(p: &PauliOperator) -> Self {
        let n = p.n_qubits();
        let act = PauliAction::new(p);
        let mut out = DenseOperator::zeros(n, OperatorKind::Operator);
        for b in 0..(1usize << n) {
            let (b2, c) = act.apply(b);
            out.data[(b2, b)] = c;
        }
        out
    }

    pub fn trace(&self) -> C64 {
        self.data.diag().sum()
    }

    /// `P · self`.
    pub fn pauli_left(&self, p: &PauliOperator) -> DenseOperator {
        let act = PauliAction::new(p);
        let mut out = self.data.clone();
        for i in 0..self.dim() {
            let (i2, c) = act.apply(i);
            let src = self.data.row(i);
            out.row_mut(i2).zip_mut_with(&src, |o, s| *o = c * s);
        }
        DenseOperator { kind: OperatorKind::Operator, n_qubits: self.n_qubits, data: out }
    }

    /// `self · P`.
    pub fn pauli_right(&self, p: &PauliOperator) -> DenseOperator {
        let act = PauliAction::new(p);
        let mut out = self.data.clone();
        // (ρP)_{i,j} = ρ_{i, j⊕x} · coeff(j)
        for j in 0..self.dim() {
            let c = act.coeff(j);
            let src = self.data.column(j ^ act.flip);
            out.column_mut(j).zip_mut_with(&src, |o, s| *o = s * c);
        }
        DenseOperator { kind: OperatorKind::Operator, n_qubits: self.n_qubits, data: out }
    }

    /// `P · self · P†`.
    pub fn pauli_conj(&self, p: &PauliOperator) -> DenseOperator {
        let mut out = self.pauli_left(p).pauli_right(&p.adjoint());
        out.kind = self.kind;
        out
    }

    /// `Tr(self · P)`.
    pub fn trace_with_pauli(&self, p: &PauliOperator) -> C64 {
        let act = PauliAction::new(p);
        let mut acc = ZERO;
        for i in 0..self.dim() {
            // (ρP)_{ii} = ρ_{i, i⊕x} · coeff(i)
            acc += self.data[(i, i ^ act.flip)] * act.coeff(i);
        }
        acc
    }

    pub fn scaled(&self, c: C64) -> DenseOperator {
        DenseOperator { kind: self.kind, n_qubits: self.n_qubits, data: self.data.mapv(|v| v * c) }
    }

    pub fn add(&self, other: &DenseOperator) -> DenseOperator {
        DenseOperator { kind: self.kind, n_qubits: self.n_qubits, data: &self.data + &other.data }
    }

    pub fn sub(&self, other: &DenseOperator) -> DenseOperator {
        DenseOperator { kind: OperatorKind::Operator, n_qubits: self.n_qubits, data: &self.data - &other.data }
    }

    pub fn adjoint(&self) -> DenseOperator {
        DenseOperator { kind: self.kind, n_qubits: self.n_qubits, data: self.data.t().mapv(|v| v.conj()) }
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.norm()))
    }

    pub fn max_abs_diff(&self, other: &DenseOperator) -> f64 {
        self.data.iter().zip(other.data.iter()).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()))
    }

    /// `Tr(self† · other)`.
    pub fn hs_inner(&self, other: &DenseOperator) -> C64 {
        self.data.iter().zip(other.data.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn hermitian_part(&self) -> DenseOperator {
        let a = self.adjoint();
        DenseOperator { kind: self.kind, n_qubits: self.n_qubits, data: (&self.data + &a.data).mapv(|v| v * 0.5) }
    }

    /// Trace norm of a Hermitian operator.
    pub fn trace_norm_hermitian(&self) -> Result<f64> {
        let h = self.hermitian_part();
        let ev = h.data.eigvalsh(ndarray_linalg::UPLO::Upper).map_err(|e| Error::Numerical(e.to_string()))?;
        Ok(ev.iter().map(|v| v.abs()).sum())
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let h = self.hermitian_part();
        let ev = h.data.eigvalsh(ndarray_linalg::UPLO::Upper).map_err(|e| Error::Numerical(e.to_string()))?;
        Ok(ev.iter().cloned().fold(f64::INFINITY, f64::min))
    }

    /// Applies a Hadamard to each listed 0-based qubit, on both sides.
    pub fn hadamard_conj(&self, qubits: &[usize]) -> DenseOperator {
        let n = self.n_qubits;
        let mut data = self.data.clone();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for &q in qubits {
            let bit = 1usize << (n - 1 - q);
            let d = data.nrows();
            for i in 0..d {
                if i & bit != 0 {
                    continue;
                }
                let j = i | bit;
                for c in 0..d {
                    let (a, b) = (data[(i, c)], data[(j, c)]);
                    data[(i, c)] = (a + b) * r;
                    data[(j, c)] = (a - b) * r;
                }
            }
            for i in 0..d {
                if i & bit != 0 {
                    continue;
                }
                let j = i | bit;
                for rr in 0..d {
                    let (a, b) = (data[(rr, i)], data[(rr, j)]);
                    data[(rr, i)] = (a + b) * r;
                    data[(rr, j)] = (a - b) * r;
                }
            }
        }
        DenseOperator { kind: self.kind, n_qubits: n, data }
    }
}
