//! Signed Pauli strings in symplectic form.
//!
//! An operator is stored as `i^phase · X^x · Z^z`, where the product runs over
//! qubits and each qubit factor is written X first, then Z. With this
//! convention `Y = i·X·Z`, so a lone `Y` has `phase = 1`.
//!
//! Public constructors take 1-based site labels; masks are 0-based.

use std::fmt;

use crate::error::{Error, Result};

/// Boundary condition of the chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Boundary {
    Periodic,
    Open,
}

impl Boundary {
    pub fn label(self) -> &'static str {
        match self {
            Boundary::Periodic => "pbc",
            Boundary::Open => "obc",
        }
    }
}

impl std::str::FromStr for Boundary {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pbc" | "periodic" => Ok(Boundary::Periodic),
            "obc" | "open" => Ok(Boundary::Open),
            other => Err(Error::Parse(format!("unknown boundary '{other}'"))),
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli1 {
    I,
    X,
    Y,
    Z,
}

impl Pauli1 {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli1::I => (false, false),
            Pauli1::X => (true, false),
            Pauli1::Y => (true, true),
            Pauli1::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli1::I,
            (true, false) => Pauli1::X,
            (true, true) => Pauli1::Y,
            (false, true) => Pauli1::Z,
        }
    }
}

#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PauliOperator {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

impl PauliOperator {
    pub fn identity(n_qubits: usize) -> Self {
        let w = words_for(n_qubits);
        PauliOperator { n: n_qubits, x: vec![0; w], z: vec![0; w], phase: 0 }
    }

    /// Builds a Hermitian product of single-qubit Paulis with sign +1.
    /// Sites are 1-based; repeated sites multiply in the given order.
    pub fn from_sites(n_qubits: usize, factors: &[(usize, Pauli1)]) -> Result<Self> {
        let mut p = PauliOperator::identity(n_qubits);
        for &(site, kind) in factors {
            let q = check_site(site, n_qubits)?;
            let mut f = PauliOperator::identity(n_qubits);
            let (x, z) = kind.bits();
            f.set_bits(q, x, z);
            if kind == Pauli1::Y {
                f.phase = 1;
            }
            p = p.mul_unchecked(&f);
        }
        Ok(p)
    }

    /// Single-site Pauli, 1-based site.
    pub fn single(n_qubits: usize, site: usize, kind: Pauli1) -> Result<Self> {
        PauliOperator::from_sites(n_qubits, &[(site, kind)])
    }

    /// Builds from raw masks and phase exponent. Mask lengths must match `n_qubits`.
    pub fn from_masks(n_qubits: usize, x: Vec<u64>, z: Vec<u64>, phase: u8) -> Result<Self> {
        let w = words_for(n_qubits);
        if x.len() != w || z.len() != w {
            return Err(Error::InvalidArgument(format!("mask length must be {w} words")));
        }
        let p = PauliOperator { n: n_qubits, x, z, phase: phase & 3 };
        if p.has_stray_bits() {
            return Err(Error::InvalidArgument("mask bits beyond n_qubits".into()));
        }
        Ok(p)
    }

    fn has_stray_bits(&self) -> bool {
        let rem = self.n % 64;
        if rem == 0 || self.x.is_empty() {
            return false;
        }
        let mask = !((1u64 << rem) - 1);
        let last = self.x.len() - 1;
        (self.x[last] | self.z[last]) & mask != 0
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn phase_exp(&self) -> u8 {
        self.phase
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub(crate) fn set_bits(&mut self, q: usize, x: bool, z: bool) {
        let (w, b) = (q / 64, q % 64);
        self.x[w] = (self.x[w] & !(1 << b)) | ((x as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((z as u64) << b);
    }

    /// Bits at 0-based qubit `q`.
    pub fn bits(&self, q: usize) -> (bool, bool) {
        let (w, b) = (q / 64, q % 64);
        ((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    /// Letter at 1-based `site`.
    pub fn get(&self, site: usize) -> Pauli1 {
        let (x, z) = self.bits(site - 1);
        Pauli1::from_bits(x, z)
    }

    /// Number of qubits carrying both X and Z, i.e. the count of Y letters.
    pub fn y_count(&self) -> u32 {
        self.x.iter().zip(&self.z).map(|(a, b)| (a & b).count_ones()).sum()
    }

    pub fn weight(&self) -> u32 {
        self.x.iter().zip(&self.z).map(|(a, b)| (a | b).count_ones()).sum()
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x.iter().all(|&w| w == 0) && self.z.iter().all(|&w| w == 0)
    }

    pub fn is_hermitian(&self) -> bool {
        (self.phase as u32 + self.y_count()) % 2 == 0
    }

    /// Sign of a Hermitian operator relative to the plain product of letters.
    pub fn sign(&self) -> Option<i8> {
        if !self.is_hermitian() {
            return None;
        }
        let rel = (self.phase as u32 + 4 - self.y_count() % 4) % 4;
        Some(if rel == 0 { 1 } else { -1 })
    }

    /// Coefficient exponent `k` such that the operator is `i^k` times the plain product of letters.
    pub fn coefficient_exp(&self) -> u8 {
        ((self.phase as u32 + 4 - self.y_count() % 4) % 4) as u8
    }

    pub fn negated(&self) -> Self {
        let mut p = self.clone();
        p.phase = (p.phase + 2) & 3;
        p
    }

    pub fn times_i_pow(&self, k: u8) -> Self {
        let mut p = self.clone();
        p.phase = (p.phase + k) & 3;
        p
    }

    /// Same letters with coefficient +1.
    pub fn unsigned(&self) -> Self {
        let mut p = self.clone();
        p.phase = (self.y_count() % 4) as u8;
        p
    }

    /// Matrix transpose: `Y^T = -Y`, X and Z are symmetric.
    pub fn transpose(&self) -> Self {
        let mut p = self.clone();
        p.phase = ((p.phase as u32 + 2 * self.y_count()) % 4) as u8;
        p
    }

    /// Hermitian adjoint.
    pub fn adjoint(&self) -> Self {
        // (i^p X^x Z^z)^† = i^{-p} Z^z X^x = i^{-p} (-1)^{x.z} X^x Z^z
        let mut p = self.clone();
        p.phase = ((4 - self.phase as u32 + 2 * self.y_count()) % 4) as u8;
        p
    }

    pub(crate) fn mul_unchecked(&self, other: &PauliOperator) -> PauliOperator {
        let mut cross = 0u32;
        let mut x = Vec::with_capacity(self.x.len());
        let mut z = Vec::with_capacity(self.z.len());
        for k in 0..self.x.len() {
            cross += (self.z[k] & other.x[k]).count_ones();
            x.push(self.x[k] ^ other.x[k]);
            z.push(self.z[k] ^ other.z[k]);
        }
        let phase = ((self.phase as u32 + other.phase as u32 + 2 * cross) % 4) as u8;
        PauliOperator { n: self.n, x, z, phase }
    }

    pub(crate) fn anticommutes_unchecked(&self, other: &PauliOperator) -> bool {
        let mut acc = 0u64;
        for k in 0..self.x.len() {
            acc ^= (self.x[k] & other.z[k]) ^ (self.z[k] & other.x[k]);
        }
        acc.count_ones() % 2 == 1
    }

    /// Exact product `self · other`.
    pub fn multiply(&self, other: &PauliOperator) -> Result<PauliOperator> {
        same_size(self, other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn commutes(&self, other: &PauliOperator) -> Result<bool> {
        same_size(self, other)?;
        Ok(!self.anticommutes_unchecked(other))
    }

    /// Parses the text form `±[i] P@s P@s …`, e.g. `+Z@1 X@2 Z@3` or `-i Y@4`.
    pub fn parse(text: &str, n_qubits: usize) -> Result<Self> {
        let t = text.trim();
        let (neg, rest) = match t.chars().next() {
            Some('+') => (false, &t[1..]),
            Some('-') => (true, &t[1..]),
            _ => (false, t),
        };
        let rest = rest.trim_start();
        let (imag, rest) = match rest.strip_prefix('i') {
            Some(r) if r.is_empty() || r.starts_with(char::is_whitespace) => (true, r),
            _ => (false, rest),
        };
        let mut factors = Vec::new();
        for tok in rest.split_whitespace() {
            if tok == "I" {
                continue;
            }
            let (letter, site) = tok
                .split_once('@')
                .ok_or_else(|| Error::Parse(format!("expected P@site, got '{tok}'")))?;
            let kind = match letter {
                "X" => Pauli1::X,
                "Y" => Pauli1::Y,
                "Z" => Pauli1::Z,
                "I" => Pauli1::I,
                _ => return Err(Error::Parse(format!("unknown Pauli letter '{letter}'"))),
            };
            let site: usize = site.parse().map_err(|_| Error::Parse(format!("bad site in '{tok}'")))?;
            factors.push((site, kind));
        }
        let mut p = PauliOperator::from_sites(n_qubits, &factors)?;
        let k = (neg as u8) * 2 + imag as u8;
        p.phase = (p.phase + k) & 3;
        Ok(p)
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = self.coefficient_exp();
        f.write_str(match k {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        })?;
        let mut first = k % 2 == 0;
        for q in 0..self.n {
            let letter = match self.bits(q) {
                (false, false) => continue,
                (true, false) => 'X',
                (true, true) => 'Y',
                (false, true) => 'Z',
            };
            if first {
                first = false;
            } else {
                f.write_str(" ")?;
            }
            write!(f, "{letter}@{}", q + 1)?;
        }
        if self.is_identity_up_to_phase() {
            if k % 2 == 1 {
                f.write_str(" ")?;
            }
            f.write_str("I")?;
        }
        Ok(())
    }
}

fn same_size(a: &PauliOperator, b: &PauliOperator) -> Result<()> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch { left: a.n, right: b.n });
    }
    Ok(())
}

fn check_site(site: usize, n_qubits: usize) -> Result<usize> {
    if site == 0 || site > n_qubits {
        return Err(Error::OutOfRange { site, n_qubits });
    }
    Ok(site - 1)
}

/// Global symmetry generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetryKind {
    /// Product of X over even sites.
    S,
    /// Product of X over odd sites.
    W,
}

pub fn symmetry_operator(kind: SymmetryKind, n_qubits: usize) -> Result<PauliOperator> {
    if n_qubits == 0 || n_qubits % 2 == 1 {
        return Err(Error::Parity(format!("symmetry operators need an even qubit count, got {n_qubits}")));
    }
    let start = match kind {
        SymmetryKind::S => 2,
        SymmetryKind::W => 1,
    };
    let sites: Vec<_> = (start..=n_qubits).step_by(2).map(|s| (s, Pauli1::X)).collect();
    PauliOperator::from_sites(n_qubits, &sites)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StringKind {
    Strong,
    Weak,
    TrivialStrong,
    TrivialWeak,
}

impl StringKind {
    fn endpoint_parity(self) -> usize {
        match self {
            StringKind::Strong | StringKind::TrivialStrong => 1,
            StringKind::Weak | StringKind::TrivialWeak => 0,
        }
    }

    fn has_endpoints(self) -> bool {
        matches!(self, StringKind::Strong | StringKind::Weak)
    }
}

impl std::str::FromStr for StringKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "strong" => Ok(StringKind::Strong),
            "weak" => Ok(StringKind::Weak),
            "trivial-strong" => Ok(StringKind::TrivialStrong),
            "trivial-weak" => Ok(StringKind::TrivialWeak),
            other => Err(Error::Parse(format!("unknown string kind '{other}'"))),
        }
    }
}

/// String operator between 1-based endpoints `n < m`.
///
/// Strong strings sit on odd endpoints with X on the even sites in between;
/// weak strings are the same pattern shifted by one site. With `wrap` set,
/// `m` may exceed `n_qubits` and sites are taken modulo the ring.
pub fn string_operator(kind: StringKind, n: usize, m: usize, n_qubits: usize, wrap: bool) -> Result<PauliOperator> {
    let par = kind.endpoint_parity();
    if n % 2 != par || m % 2 != par {
        let want = if par == 1 { "odd" } else { "even" };
        return Err(Error::Parity(format!("{kind:?} string needs {want} endpoints, got ({n}, {m})")));
    }
    if n == 0 || n >= m {
        return Err(Error::InvalidArgument(format!("string endpoints must satisfy 1 <= n < m, got ({n}, {m})")));
    }
    if n > n_qubits {
        return Err(Error::OutOfRange { site: n, n_qubits });
    }
    if m > n_qubits && !(wrap && m - n < n_qubits) {
        return Err(Error::OutOfRange { site: m, n_qubits });
    }
    let fold = |s: usize| (s - 1) % n_qubits + 1;
    let mut factors = Vec::new();
    if kind.has_endpoints() {
        factors.push((fold(n), Pauli1::Z));
    }
    let mut s = n + 1;
    while s < m {
        factors.push((fold(s), Pauli1::X));
        s += 2;
    }
    if kind.has_endpoints() {
        factors.push((fold(m), Pauli1::Z));
    }
    PauliOperator::from_sites(n_qubits, &factors)
}
