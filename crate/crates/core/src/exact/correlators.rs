//! String order parameters and connected correlators of dense density matrices.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exact::dense::{DenseOperator, OperatorKind, C64};
use crate::pauli::{string_operator, Pauli1, PauliOperator, StringKind};

/// Correlator families evaluated on a density matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantity {
    CIS,
    TrivialCIS,
    AI,
    CIIS,
    CIIW,
    AII,
    BII,
    TrivialCIIS,
    TrivialCIIW,
}

impl Quantity {
    pub const ALL: [Quantity; 9] = [
        Quantity::CIS,
        Quantity::TrivialCIS,
        Quantity::AI,
        Quantity::CIIS,
        Quantity::CIIW,
        Quantity::AII,
        Quantity::BII,
        Quantity::TrivialCIIS,
        Quantity::TrivialCIIW,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::CIS => "C_I_S",
            Quantity::TrivialCIS => "trivial_C_I_S",
            Quantity::AI => "A_I",
            Quantity::CIIS => "C_II_S",
            Quantity::CIIW => "C_II_W",
            Quantity::AII => "A_II",
            Quantity::BII => "B_II",
            Quantity::TrivialCIIS => "trivial_C_II_S",
            Quantity::TrivialCIIW => "trivial_C_II_W",
        }
    }

    /// Endpoints must be odd (`true`) or even (`false`).
    pub fn odd_endpoints(self) -> bool {
        matches!(self, Quantity::CIS | Quantity::TrivialCIS | Quantity::CIIS | Quantity::TrivialCIIS)
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Quantity::ALL
            .iter()
            .copied()
            .find(|q| q.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown quantity '{s}'")))
    }
}

/// `Tr(ρM) / Tr ρ`.
pub fn renyi1(rho: &DenseOperator, m: &PauliOperator) -> Result<f64> {
    let tr = rho.trace();
    if tr.norm() < 1e-14 {
        return Err(Error::InvalidArgument("zero-trace input to a Rényi-1 average".into()));
    }
    Ok((rho.trace_with_pauli(m) / tr).re)
}

/// `⟨⟨A ⊗ B⟩⟩ = Tr(ρ† A ρ Bᵀ) / Tr(ρ†ρ)`, with `A` on the ket and `B` on the bra.
pub fn renyi2(rho: &DenseOperator, a: &PauliOperator, b: &PauliOperator) -> Result<f64> {
    let purity = rho.hs_inner(rho).re;
    if purity < 1e-300 {
        return Err(Error::InvalidArgument("zero purity".into()));
    }
    let img = rho.pauli_left(a).pauli_right(&b.transpose());
    Ok((rho.hs_inner(&img) / C64::new(purity, 0.0)).re)
}

fn z(n_qubits: usize, site: usize) -> Result<PauliOperator> {
    PauliOperator::single(n_qubits, site, Pauli1::Z)
}

/// Evaluates one correlator at endpoints `1 ≤ n < m ≤ n_qubits`.
pub fn correlator(rho: &DenseOperator, quantity: Quantity, n: usize, m: usize) -> Result<f64> {
    let nq = rho.n_qubits;
    let id = PauliOperator::identity(nq);
    let even = |s: usize| -> Result<()> {
        if s % 2 == 1 {
            return Err(Error::Parity(format!("{quantity} needs even sites, got {s}")));
        }
        Ok(())
    };
    match quantity {
        Quantity::CIS => renyi1(rho, &string_operator(StringKind::Strong, n, m, nq, false)?),
        Quantity::TrivialCIS => renyi1(rho, &string_operator(StringKind::TrivialStrong, n, m, nq, false)?),
        Quantity::CIIS => renyi2(rho, &string_operator(StringKind::Strong, n, m, nq, false)?, &id),
        Quantity::TrivialCIIS => renyi2(rho, &string_operator(StringKind::TrivialStrong, n, m, nq, false)?, &id),
        Quantity::CIIW => {
            let s = string_operator(StringKind::Weak, n, m, nq, false)?;
            renyi2(rho, &s, &s)
        }
        Quantity::TrivialCIIW => {
            let s = string_operator(StringKind::TrivialWeak, n, m, nq, false)?;
            renyi2(rho, &s, &s)
        }
        Quantity::AI => {
            even(n)?;
            even(m)?;
            let (zn, zm) = (z(nq, n)?, z(nq, m)?);
            Ok(renyi1(rho, &zn.multiply(&zm)?)? - renyi1(rho, &zn)? * renyi1(rho, &zm)?)
        }
        Quantity::AII => {
            even(n)?;
            even(m)?;
            let (zn, zm) = (z(nq, n)?, z(nq, m)?);
            Ok(renyi2(rho, &zn.multiply(&zm)?, &id)? - renyi2(rho, &zn, &id)? * renyi2(rho, &zm, &id)?)
        }
        Quantity::BII => {
            even(n)?;
            even(m)?;
            let (zn, zm) = (z(nq, n)?, z(nq, m)?);
            let zz = zn.multiply(&zm)?;
            Ok(renyi2(rho, &zz, &zz)? - renyi2(rho, &zn, &zn)? * renyi2(rho, &zm, &zm)?)
        }
    }
}

/// Replaces every odd site by the maximally mixed state.
pub fn trace_channel(rho: &DenseOperator) -> Result<DenseOperator> {
    let n = rho.n_qubits;
    let mut out = rho.clone();
    for site in (1..=n).step_by(2) {
        let mut acc = out.clone();
        for k in [Pauli1::X, Pauli1::Y, Pauli1::Z] {
            acc = acc.add(&out.pauli_conj(&PauliOperator::single(n, site, k)?));
        }
        out = acc.scaled(C64::new(0.25, 0.0));
    }
    out.kind = OperatorKind::Density;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::states::{build_state, StateKind};
    use crate::pauli::Boundary;

    #[test]
    fn rho_c_pattern() {
        let n = 6;
        let r = build_state(StateKind::RhoC, n, Boundary::Periodic).unwrap();
        for q in [Quantity::CIS, Quantity::CIIS] {
            assert!((correlator(&r, q, 1, 5).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!((correlator(&r, Quantity::CIIW, 2, 6).unwrap() - 1.0).abs() < 1e-12);
        for q in [Quantity::TrivialCIS, Quantity::TrivialCIIS] {
            assert!(correlator(&r, q, 1, 5).unwrap().abs() < 1e-12);
        }
        assert!(correlator(&r, Quantity::TrivialCIIW, 2, 6).unwrap().abs() < 1e-12);
        for q in [Quantity::AI, Quantity::AII, Quantity::BII] {
            assert!(correlator(&r, q, 2, 4).unwrap().abs() < 1e-12);
        }
        assert!(matches!(correlator(&r, Quantity::AI, 1, 4), Err(Error::Parity(_))));
        assert!(matches!(correlator(&r, Quantity::CIS, 2, 4), Err(Error::Parity(_))));
    }

    #[test]
    fn trace_channel_is_idempotent() {
        let n = 4;
        let r = build_state(StateKind::RhoC, n, Boundary::Periodic).unwrap();
        let t = trace_channel(&r).unwrap();
        assert!(trace_channel(&t).unwrap().max_abs_diff(&t) < 1e-14);
        let rt = build_state(StateKind::RhoTilde, n, Boundary::Periodic).unwrap();
        assert!(trace_channel(&rt).unwrap().max_abs_diff(&rt) < 1e-14);
        assert_eq!(correlator(&t, Quantity::CIS, 1, 3).unwrap(), 0.0);
    }
}
