//! Closed forms of the non-Hermitian free-fermion solution of the dual
//! population dynamics: dispersion, gap, pairing amplitudes, two-point
//! functions and the Rényi-2 correlators they imply.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Perturbation strength, either directly or through the `ZZ`-dephasing rate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Coupling {
    Lambda(f64),
    /// `γ_ZZ` added on top of the unperturbed model; equivalent to `λ = γ/(1+γ)`.
    GammaZz(f64),
}

impl Coupling {
    pub fn value(self) -> f64 {
        match self {
            Coupling::Lambda(v) | Coupling::GammaZz(v) => v,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Coupling::Lambda(_) => "lambda",
            Coupling::GammaZz(_) => "gamma_zz",
        }
    }

    /// Effective `λ` of the interpolated generator.
    pub fn lambda(self) -> Result<f64> {
        let v = self.value();
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::InvalidArgument(format!("{} must be finite and >= 0, got {v}", self.name())));
        }
        Ok(match self {
            Coupling::Lambda(l) => l,
            Coupling::GammaZz(g) => g / (1.0 + g),
        })
    }

    pub fn parse(name: &str, value: f64) -> Result<Self> {
        match name {
            "lambda" => Ok(Coupling::Lambda(value)),
            "gamma_zz" | "gamma" => Ok(Coupling::GammaZz(value)),
            _ => Err(Error::Parse(format!("unknown coupling '{name}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FermionParams {
    /// Number of even sites `N`.
    pub n_even: usize,
    pub coupling: Coupling,
    pub eta_right: f64,
    pub eta_left: f64,
}

impl FermionParams {
    /// Unidirectional (rightward) hopping.
    pub fn new(n_even: usize, coupling: Coupling) -> Self {
        FermionParams { n_even, coupling, eta_right: 1.0, eta_left: 0.0 }
    }

    pub fn with_eta(mut self, eta_right: f64, eta_left: f64) -> Self {
        self.eta_right = eta_right;
        self.eta_left = eta_left;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_even < 2 {
            return Err(Error::InvalidArgument(format!("need N >= 2 even sites, got {}", self.n_even)));
        }
        if self.eta_right < 0.0 || self.eta_left < 0.0 || (self.eta_right + self.eta_left - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "hopping weights must be >= 0 and sum to 1, got ({}, {})",
                self.eta_right, self.eta_left
            )));
        }
        self.coupling.lambda().map(|_| ())
    }

    pub fn lambda(&self) -> Result<f64> {
        self.coupling.lambda()
    }
}

/// `ℰ_{k,+}`.
pub fn dispersion(k: f64, params: &FermionParams) -> Result<Complex64> {
    params.validate()?;
    let l = params.lambda()?;
    let im = -(params.eta_right - params.eta_left) * (1.0 - l) * k.sin();
    let re = 1.0 + l - k.cos() + l * k.cos();
    Ok(Complex64::new(re, im))
}

/// Closed-form Lindbladian gap `1 − cos(π/N) + λ(2 + cos(π/N))`.
pub fn lindblad_gap(params: &FermionParams) -> Result<f64> {
    params.validate()?;
    let l = params.lambda()?;
    let c = (PI / params.n_even as f64).cos();
    Ok(1.0 - c + l * (2.0 + c))
}

/// `min_k Re ℰ_{k,+}` over the antiperiodic grid, evaluated numerically.
///
/// Agrees with [`lindblad_gap`] at `λ = 0`; for `λ > 0` the true minimum is
/// `1 − cos(π/N) + λ(1 + cos(π/N))`.
pub fn grid_gap(params: &FermionParams) -> Result<f64> {
    let mut min = f64::INFINITY;
    for k in momentum_grid(params.n_even)? {
        min = min.min(dispersion(k, params)?.re);
    }
    Ok(min)
}

/// Momenta `±(2m−1)π/N`, `m = 1..N/2`. Odd `N` is rejected.
pub fn momentum_grid(n_even: usize) -> Result<Vec<f64>> {
    if n_even < 2 || n_even % 2 == 1 {
        return Err(Error::Parity(format!("momentum grid needs an even number of even sites, got {n_even}")));
    }
    let n = n_even as f64;
    Ok((1..=n_even / 2)
        .flat_map(|m| {
            let k = (2 * m - 1) as f64 * PI / n;
            [k, -k]
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairingMethod {
    ClosedForm,
    MomentumSum,
}

/// Steady-state pairing amplitude `C_{jl}` of the Gaussian state `exp(½ Σ C f†f†)|vac)`.
pub fn pairing_coeff(j: usize, l: usize, params: &FermionParams, method: PairingMethod) -> Result<f64> {
    params.validate()?;
    let n = params.n_even;
    for s in [j, l] {
        if s == 0 || s > n {
            return Err(Error::OutOfRange { site: s, n_qubits: n });
        }
    }
    let lam = params.lambda()?;
    match method {
        PairingMethod::ClosedForm => {
            let d = if j == l { 1.0 } else { 0.0 };
            let sgn = (j as f64 - l as f64).signum() * if j == l { 0.0 } else { 1.0 };
            Ok(lam * (d - 1.0) * sgn)
        }
        PairingMethod::MomentumSum => {
            let d = j as f64 - l as f64;
            let sum: Complex64 = momentum_grid(n)?
                .into_iter()
                .map(|k| {
                    Complex64::new(0.0, lam * (k / 2.0).cos() / (k / 2.0).sin()) * Complex64::from_polar(1.0, k * d)
                })
                .sum();
            Ok(sum.re / n as f64)
        }
    }
}

/// `(ρ|(f†_n − f_n)(f_m + f†_m)|ρ)/(ρ|ρ)` in the steady state.
pub fn fermion_two_point(n: usize, m: usize, params: &FermionParams) -> Result<f64> {
    params.validate()?;
    for s in [n, m] {
        if s == 0 || s > params.n_even {
            return Err(Error::OutOfRange { site: s, n_qubits: params.n_even });
        }
    }
    let l = params.lambda()?;
    Ok(if n > m {
        0.0
    } else if n == m {
        (l - 1.0) / (l + 1.0)
    } else {
        4.0 * l / (1.0 + l).powi(2) * ((1.0 - l) / (1.0 + l)).powi((m - n - 1) as i32)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AnalyticQuantity {
    /// Rényi-2 strong-string order parameter.
    C2S,
    /// Rényi-2 connected `ZZ` correlator.
    B2,
}

impl AnalyticQuantity {
    pub fn name(self) -> &'static str {
        match self {
            AnalyticQuantity::C2S => "C2S",
            AnalyticQuantity::B2 => "B2",
        }
    }
}

impl fmt::Display for AnalyticQuantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AnalyticQuantity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "C2S" | "c2s" | "C_II_S" => Ok(AnalyticQuantity::C2S),
            "B2" | "b2" | "B_II" => Ok(AnalyticQuantity::B2),
            _ => Err(Error::Parse(format!("unknown analytic quantity '{s}'"))),
        }
    }
}

/// Closed-form Rényi-2 correlator.
///
/// `length` counts even sites spanned by the string, so the strong string
/// between odd sites `n < m` has `length = (m − n)/2`. `B2` ignores it.
pub fn analytic_correlator(quantity: AnalyticQuantity, coupling: Coupling, length: usize) -> Result<f64> {
    let l = coupling.lambda()?;
    Ok(match quantity {
        AnalyticQuantity::C2S => ((1.0 - l) / (1.0 + l)).powi(length as i32),
        AnalyticQuantity::B2 => 4.0 * l / (1.0 + l).powi(2),
    })
}

/// One CSV row of analytic output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticRow {
    pub quantity: String,
    pub coupling: String,
    pub value: f64,
    pub length: usize,
    pub result: f64,
}

pub fn analytic_row(quantity: AnalyticQuantity, coupling: Coupling, length: usize) -> Result<AnalyticRow> {
    Ok(AnalyticRow {
        quantity: quantity.name().into(),
        coupling: coupling.name().into(),
        value: coupling.value(),
        length,
        result: analytic_correlator(quantity, coupling, length)?,
    })
}

/// Largest spread of `C2S(λ = x/2N, length = N)` across `sizes` at fixed
/// `x = λ·2N`, maximized over `points` values of `x` in `(0, x_max]`.
pub fn collapse_spread(sizes: &[usize], x_max: f64, points: usize) -> Result<f64> {
    if sizes.is_empty() || points == 0 {
        return Err(Error::InvalidArgument("empty collapse grid".into()));
    }
    let mut worst: f64 = 0.0;
    for p in 1..=points {
        let x = x_max * p as f64 / points as f64;
        let vals: Vec<f64> = sizes
            .iter()
            .map(|&n| analytic_correlator(AnalyticQuantity::C2S, Coupling::Lambda(x / (2 * n) as f64), n))
            .collect::<Result<_>>()?;
        let hi = vals.iter().copied().fold(f64::MIN, f64::max);
        let lo = vals.iter().copied().fold(f64::MAX, f64::min);
        worst = worst.max(hi - lo);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, l: f64) -> FermionParams {
        FermionParams::new(n, Coupling::Lambda(l))
    }

    #[test]
    fn dispersion_values() {
        for l in [0.0, 0.3, 1.0] {
            let e = dispersion(0.0, &p(8, l).with_eta(0.3, 0.7)).unwrap();
            assert!((e - Complex64::new(2.0 * l, 0.0)).norm() < 1e-15);
        }
        assert!((dispersion(PI, &p(8, 0.0)).unwrap() - Complex64::new(2.0, 0.0)).norm() < 1e-15);
        assert!((dispersion(PI / 2.0, &p(8, 0.0)).unwrap() - Complex64::new(1.0, -1.0)).norm() < 1e-15);
        // Unperturbed unidirectional case: (1 − cos k) − i sin k.
        for k in [0.1, 1.3, -2.2] {
            let e = dispersion(k, &p(8, 0.0)).unwrap();
            assert!((e - Complex64::new(1.0 - f64::cos(k), -f64::sin(k))).norm() < 1e-15);
        }
    }

    #[test]
    fn gap_values() {
        assert!((lindblad_gap(&p(2, 0.0)).unwrap() - 1.0).abs() < 1e-15);
        assert!((lindblad_gap(&p(1 << 20, 1.0)).unwrap() - 3.0).abs() < 1e-10);
        for n in [4, 6, 10] {
            assert!((grid_gap(&p(n, 0.0)).unwrap() - lindblad_gap(&p(n, 0.0)).unwrap()).abs() < 1e-12);
            let c = (PI / n as f64).cos();
            let g = grid_gap(&p(n, 0.4)).unwrap();
            assert!((g - (1.0 - c + 0.4 * (1.0 + c))).abs() < 1e-12);
        }
    }

    #[test]
    fn pairing_closed_form_and_sum_agree() {
        assert!((pairing_coeff(2, 5, &p(8, 0.3), PairingMethod::MomentumSum).unwrap() - 0.3).abs() < 1e-12);
        for n in [2, 4, 8, 12] {
            for j in 1..=n {
                for l in 1..=n {
                    let q = p(n, 0.7);
                    let a = pairing_coeff(j, l, &q, PairingMethod::ClosedForm).unwrap();
                    let b = pairing_coeff(j, l, &q, PairingMethod::MomentumSum).unwrap();
                    assert!((a - b).abs() < 1e-12, "N={n} ({j},{l}): {a} vs {b}");
                }
            }
        }
        assert_eq!(pairing_coeff(3, 3, &p(8, 0.5), PairingMethod::ClosedForm).unwrap(), 0.0);
        assert!(pairing_coeff(1, 2, &p(7, 0.5), PairingMethod::MomentumSum).is_err());
    }

    #[test]
    fn two_point_cases() {
        assert_eq!(fermion_two_point(4, 2, &p(6, 0.4)).unwrap(), 0.0);
        assert_eq!(fermion_two_point(2, 2, &p(6, 0.0)).unwrap(), -1.0);
        assert_eq!(fermion_two_point(2, 3, &p(6, 1.0)).unwrap(), 1.0);
        assert_eq!(fermion_two_point(2, 4, &p(6, 1.0)).unwrap(), 0.0);
    }

    #[test]
    fn analytic_values() {
        for len in [0, 3, 10] {
            assert_eq!(analytic_correlator(AnalyticQuantity::C2S, Coupling::Lambda(0.0), len).unwrap(), 1.0);
        }
        assert!((analytic_correlator(AnalyticQuantity::B2, Coupling::Lambda(0.5), 7).unwrap() - 8.0 / 9.0).abs() < 1e-15);
        assert!((analytic_correlator(AnalyticQuantity::C2S, Coupling::GammaZz(0.5), 2).unwrap() - 0.25).abs() < 1e-15);
        for g in [0.1, 0.5, 2.0] {
            let b = analytic_correlator(AnalyticQuantity::B2, Coupling::GammaZz(g), 0).unwrap();
            assert!((b - (1.0 - (1.0 + 2.0 * g).powi(-2))).abs() < 1e-14);
        }
        assert!(analytic_correlator(AnalyticQuantity::B2, Coupling::Lambda(-0.1), 0).is_err());
    }

    #[test]
    fn scaling_collapse() {
        let sizes: Vec<usize> = (4..=64).collect();
        assert!(collapse_spread(&sizes, 4.0, 200).unwrap() < 1e-2);
    }
}
