//! Jump operators and declarative Lindblad models.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exact::dense::{DenseOperator, C64};
use crate::pauli::{Boundary, Pauli1, PauliOperator};

/// Linear combination of Pauli strings.
#[derive(Clone, Debug, Default)]
pub struct PauliSum {
    pub terms: Vec<(C64, PauliOperator)>,
}

impl PauliSum {
    pub fn single(p: PauliOperator) -> Self {
        PauliSum { terms: vec![(C64::new(1.0, 0.0), p)] }
    }

    pub fn n_qubits(&self) -> Option<usize> {
        self.terms.first().map(|(_, p)| p.n_qubits())
    }

    /// Coefficients are folded so every Pauli carries phase 0 and equal strings merge.
    pub fn simplified(&self) -> PauliSum {
        let mut out: Vec<(C64, PauliOperator)> = Vec::new();
        for (c, p) in &self.terms {
            let bare = p.times_i_pow((4 - p.phase_exp()) & 3);
            let c = *c * crate::exact::dense::i_pow(p.phase_exp());
            match out.iter_mut().find(|(_, q)| *q == bare) {
                Some(slot) => slot.0 += c,
                None => out.push((c, bare)),
            }
        }
        out.retain(|(c, _)| c.norm() > 1e-15);
        PauliSum { terms: out }
    }

    pub fn mul(&self, other: &PauliSum) -> PauliSum {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, p) in &self.terms {
            for (b, q) in &other.terms {
                terms.push((a * b, p.mul_unchecked(q)));
            }
        }
        PauliSum { terms }.simplified()
    }

    pub fn adjoint(&self) -> PauliSum {
        PauliSum { terms: self.terms.iter().map(|(c, p)| (c.conj(), p.adjoint())).collect() }.simplified()
    }

    pub fn conj_by_u_cz(&self) -> PauliSum {
        PauliSum { terms: self.terms.iter().map(|(c, p)| (*c, conj_u_cz(p))).collect() }.simplified()
    }

    pub fn to_dense(&self, n_qubits: usize) -> DenseOperator {
        let mut out = DenseOperator::zeros(n_qubits, crate::exact::dense::OperatorKind::Operator);
        for (c, p) in &self.terms {
            out = out.add(&DenseOperator::from_pauli(p).scaled(*c));
        }
        out
    }
}

/// `U_CZ P U_CZ†` over the full ring of bonds.
pub fn conj_u_cz(p: &PauliOperator) -> PauliOperator {
    let n = p.n_qubits();
    let mut out = PauliOperator::identity(n);
    // Conjugate letter by letter: X_j -> Z_{j-1} X_j Z_{j+1}, Z_j -> Z_j.
    let mut factors: Vec<PauliOperator> = Vec::new();
    for q in 0..n {
        let (x, z) = p.bits(q);
        if x {
            let mut f = PauliOperator::identity(n);
            f.set_bits(q, true, false);
            if n > 1 {
                // At n = 2 both neighbours coincide and the Z factors cancel.
                for nb in [(q + n - 1) % n, (q + 1) % n] {
                    if nb != q {
                        let zf = PauliOperator::single(n, nb + 1, Pauli1::Z).expect("in range");
                        f = zf.mul_unchecked(&f);
                    }
                }
            }
            factors.push(f);
        }
        if z {
            let mut f = PauliOperator::identity(n);
            f.set_bits(q, false, true);
            factors.push(f);
        }
    }
    for f in &factors {
        out = out.mul_unchecked(f);
    }
    // X^x Z^z expansion above is ordered per qubit, so the phase carries over unchanged.
    out.times_i_pow(p.phase_exp())
}

/// Families of jump operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum JumpKind {
    /// `½ X_{j+1}(1 − Z_{j−1} X_j Z_{j+1})`, even `j`.
    L0,
    /// `Z_j`, odd `j`.
    L1,
    /// `Z_{j−1} X_j Z_{j+1}`, odd `j`.
    L2,
    /// `½ Z_j X_{j+1} Z_{j+2}(1 − X_j)`, even `j`.
    L0Dual,
    /// `X_j`, odd `j`.
    L2Dual,
    /// `X_j`, odd `j`.
    Lx,
    /// `|−⟩⟨+|_j ⊗ |−⟩⟨+|_{j+2}`, even `j`.
    Lmp,
    /// `X_j X_{j+1}`, any `j`.
    Lxx,
    /// `Z_j Z_{j+2}`, even `j`.
    Lzz,
    /// Single-site Pauli at any site.
    X,
    Y,
    Z,
}

/// How L2 is treated at site 1 under open boundaries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObcL2Range {
    /// Drop any term whose support leaves the chain.
    Discard,
    /// Keep `L2` at site 1 with the missing `Z_0` factor removed.
    Truncate,
}

impl JumpKind {
    pub const ALL: [JumpKind; 12] = [
        JumpKind::L0,
        JumpKind::L1,
        JumpKind::L2,
        JumpKind::L0Dual,
        JumpKind::L2Dual,
        JumpKind::Lx,
        JumpKind::Lmp,
        JumpKind::Lxx,
        JumpKind::Lzz,
        JumpKind::X,
        JumpKind::Y,
        JumpKind::Z,
    ];

    pub fn name(self) -> &'static str {
        match self {
            JumpKind::L0 => "L0",
            JumpKind::L1 => "L1",
            JumpKind::L2 => "L2",
            JumpKind::L0Dual => "L0_dual",
            JumpKind::L2Dual => "L2_dual",
            JumpKind::Lx => "Lx",
            JumpKind::Lmp => "Lmp",
            JumpKind::Lxx => "Lxx",
            JumpKind::Lzz => "Lzz",
            JumpKind::X => "X",
            JumpKind::Y => "Y",
            JumpKind::Z => "Z",
        }
    }

    /// Required site parity: `Some(1)` odd, `Some(0)` even, `None` any.
    fn parity(self) -> Option<usize> {
        match self {
            JumpKind::L0 | JumpKind::L0Dual | JumpKind::Lmp | JumpKind::Lzz => Some(0),
            JumpKind::L1 | JumpKind::L2 | JumpKind::L2Dual | JumpKind::Lx => Some(1),
            JumpKind::Lxx | JumpKind::X | JumpKind::Y | JumpKind::Z => None,
        }
    }

    /// Signed offsets of the support relative to `j` (for boundary filtering).
    fn reach(self) -> (isize, isize) {
        match self {
            JumpKind::L0 => (-1, 1),
            JumpKind::L2 | JumpKind::L2Dual => (-1, 1),
            JumpKind::L0Dual | JumpKind::Lmp | JumpKind::Lzz => (0, 2),
            JumpKind::Lxx => (0, 1),
            _ => (0, 0),
        }
    }

    /// Whether the term at `site` exists under `boundary`.
    pub fn admissible(self, site: usize, n_qubits: usize, boundary: Boundary, l2: ObcL2Range) -> bool {
        if site == 0 || site > n_qubits {
            return false;
        }
        if let Some(par) = self.parity() {
            if site % 2 != par {
                return false;
            }
        }
        if boundary == Boundary::Periodic {
            return true;
        }
        let (lo, hi) = self.reach();
        let s = site as isize;
        if matches!(self, JumpKind::L2 | JumpKind::L2Dual) && site == 1 && l2 == ObcL2Range::Truncate {
            return true;
        }
        s + lo >= 1 && s + hi <= n_qubits as isize
    }

    /// All admissible sites of this family.
    pub fn sites(self, n_qubits: usize, boundary: Boundary, l2: ObcL2Range) -> Vec<usize> {
        (1..=n_qubits).filter(|&s| self.admissible(s, n_qubits, boundary, l2)).collect()
    }

    /// The jump operator as a Pauli sum.
    pub fn operator(self, site: usize, n_qubits: usize, boundary: Boundary, l2: ObcL2Range) -> Result<PauliSum> {
        if site == 0 || site > n_qubits {
            return Err(Error::OutOfRange { site, n_qubits });
        }
        if let Some(par) = self.parity() {
            if site % 2 != par {
                let want = if par == 1 { "odd" } else { "even" };
                return Err(Error::Parity(format!("{} needs an {want} site, got {site}", self.name())));
            }
        }
        if !self.admissible(site, n_qubits, boundary, l2) {
            return Err(Error::DiscardedTerm(format!("{}@{site}", self.name())));
        }
        let n = n_qubits;
        let wrap = |off: isize| -> usize { ((site as isize - 1 + off).rem_euclid(n as isize) + 1) as usize };
        let op = |f: &[(isize, Pauli1)]| -> PauliOperator {
            let sites: Vec<_> = f.iter().filter(|(o, _)| {
                // Truncation of L2 at site 1 drops the factor that would sit on site 0.
                !(boundary == Boundary::Open && (site as isize + o) < 1)
            }).map(|&(o, k)| (wrap(o), k)).collect();
            PauliOperator::from_sites(n, &sites).expect("sites in range")
        };
        let half = C64::new(0.5, 0.0);
        let sum = match self {
            JumpKind::L0 => {
                let a = op(&[(1, Pauli1::X)]);
                let b = a.mul_unchecked(&op(&[(-1, Pauli1::Z), (0, Pauli1::X), (1, Pauli1::Z)]));
                PauliSum { terms: vec![(half, a), (-half, b)] }
            }
            JumpKind::L1 | JumpKind::Z => PauliSum::single(op(&[(0, Pauli1::Z)])),
            JumpKind::L2 => PauliSum::single(op(&[(-1, Pauli1::Z), (0, Pauli1::X), (1, Pauli1::Z)])),
            JumpKind::L0Dual => {
                let a = op(&[(0, Pauli1::Z), (1, Pauli1::X), (2, Pauli1::Z)]);
                let b = a.mul_unchecked(&op(&[(0, Pauli1::X)]));
                PauliSum { terms: vec![(half, a), (-half, b)] }
            }
            JumpKind::L2Dual | JumpKind::Lx | JumpKind::X => PauliSum::single(op(&[(0, Pauli1::X)])),
            JumpKind::Y => PauliSum::single(op(&[(0, Pauli1::Y)])),
            JumpKind::Lmp => {
                // |−⟩⟨+| = ½(Z + iY) on each of the two sites.
                let i = C64::new(0.0, 1.0);
                let one = |o: isize| PauliSum {
                    terms: vec![(half, op(&[(o, Pauli1::Z)])), (half * i, op(&[(o, Pauli1::Y)]))],
                };
                one(0).mul(&one(2))
            }
            JumpKind::Lxx => PauliSum::single(op(&[(0, Pauli1::X), (1, Pauli1::X)])),
            JumpKind::Lzz => PauliSum::single(op(&[(0, Pauli1::Z), (2, Pauli1::Z)])),
        };
        Ok(sum.simplified())
    }
}

impl fmt::Display for JumpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for JumpKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        JumpKind::ALL
            .iter()
            .copied()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown jump kind '{s}'")))
    }
}

/// Dense matrix of a single jump operator.
pub fn jump_matrix(kind: JumpKind, site: usize, n_qubits: usize, boundary: Boundary) -> Result<DenseOperator> {
    Ok(kind.operator(site, n_qubits, boundary, ObcL2Range::Discard)?.to_dense(n_qubits))
}

#[derive(Clone, Debug, PartialEq)]
pub struct JumpTerm {
    pub kind: JumpKind,
    pub site: usize,
    pub rate: f64,
}

#[derive(Clone, Debug)]
pub struct LindbladModel {
    pub n_qubits: usize,
    pub boundary: Boundary,
    pub l2_range: ObcL2Range,
    pub terms: Vec<JumpTerm>,
    pub hamiltonian: Vec<(f64, PauliOperator)>,
}

impl LindbladModel {
    pub fn new(n_qubits: usize, boundary: Boundary) -> Result<Self> {
        if n_qubits < 2 || n_qubits % 2 == 1 {
            return Err(Error::Parity(format!("models need an even qubit count, got {n_qubits}")));
        }
        Ok(LindbladModel { n_qubits, boundary, l2_range: ObcL2Range::Discard, terms: Vec::new(), hamiltonian: Vec::new() })
    }

    /// Adds one term after validating rate, parity and support.
    pub fn push(&mut self, kind: JumpKind, site: usize, rate: f64) -> Result<&mut Self> {
        if !(rate >= 0.0) {
            return Err(Error::InvalidArgument(format!("negative rate {rate} for {kind}@{site}")));
        }
        kind.operator(site, self.n_qubits, self.boundary, self.l2_range)?;
        if rate > 0.0 {
            self.terms.push(JumpTerm { kind, site, rate });
        }
        Ok(self)
    }

    /// Adds `rate · D[L_j]` for every admissible site of the family.
    pub fn push_family(&mut self, kind: JumpKind, rate: f64) -> Result<&mut Self> {
        for s in kind.sites(self.n_qubits, self.boundary, self.l2_range) {
            self.push(kind, s, rate)?;
        }
        Ok(self)
    }

    pub fn push_hamiltonian(&mut self, coeff: f64, p: PauliOperator) -> Result<&mut Self> {
        if p.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch { left: self.n_qubits, right: p.n_qubits() });
        }
        if !p.is_hermitian() {
            return Err(Error::NotHermitian(p.to_string()));
        }
        self.hamiltonian.push((coeff, p));
        Ok(self)
    }

    /// Parent model of the decohered cluster state.
    pub fn parent(n_qubits: usize, boundary: Boundary) -> Result<Self> {
        LindbladModel::general(n_qubits, boundary, 0.0, 0.0, 0.0)
    }

    /// The `U_CZ`-conjugated parent model.
    pub fn dual_parent(n_qubits: usize, boundary: Boundary) -> Result<Self> {
        LindbladModel::general(n_qubits, boundary, 1.0, 1.0, 1.0)
    }

    /// `Σ_k (1−λ_k) 𝓛_k + λ_k 𝓛̃_k` over the three jump families.
    pub fn general(n_qubits: usize, boundary: Boundary, l0: f64, l1: f64, l2: f64) -> Result<Self> {
        for l in [l0, l1, l2] {
            if !(0.0..=1.0).contains(&l) {
                return Err(Error::InvalidArgument(format!("interpolation weight {l} outside [0,1]")));
            }
        }
        let mut m = LindbladModel::new(n_qubits, boundary)?;
        m.push_family(JumpKind::L0, 1.0 - l0)?;
        m.push_family(JumpKind::L0Dual, l0)?;
        // L1 is invariant under the duality, so its weights add up to one.
        let _ = l1;
        m.push_family(JumpKind::L1, 1.0)?;
        m.push_family(JumpKind::L2, 1.0 - l2)?;
        m.push_family(JumpKind::L2Dual, l2)?;
        Ok(m)
    }

    /// Interpolation `(1−λ) 𝓛_C + λ 𝓛̃_C`.
    pub fn interpolated(n_qubits: usize, boundary: Boundary, lambda: f64) -> Result<Self> {
        LindbladModel::general(n_qubits, boundary, lambda, lambda, lambda)
    }

    /// `Σ_{odd j} (𝒯_j − 1)` with `𝒯_j` the single-site trace-and-replace channel.
    pub fn trace_lindbladian(n_qubits: usize, boundary: Boundary) -> Result<Self> {
        let mut m = LindbladModel::new(n_qubits, boundary)?;
        for s in (1..=n_qubits).step_by(2) {
            for k in [JumpKind::X, JumpKind::Y, JumpKind::Z] {
                m.push(k, s, 0.25)?;
            }
        }
        Ok(m)
    }

    /// Every jump operator with its rate.
    pub fn jump_operators(&self) -> Result<Vec<(f64, PauliSum)>> {
        self.terms
            .iter()
            .map(|t| Ok((t.rate, t.kind.operator(t.site, self.n_qubits, self.boundary, self.l2_range)?)))
            .collect()
    }

    /// Parses the declarative text format.
    ///
    /// ```text
    /// qubits 6
    /// boundary obc
    /// convention discard
    /// L0 * 1.0        # whole family
    /// Lzz 2 0.5
    /// ham 0.3 +Z@2 Z@4
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let mut qubits = None;
        let mut boundary = Boundary::Periodic;
        let mut l2 = ObcL2Range::Discard;
        let mut body = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let head = it.next().unwrap_or_default();
            let bad = |msg: &str| Error::Parse(format!("line {}: {msg}", lineno + 1));
            match head {
                "qubits" => {
                    qubits = Some(it.next().and_then(|v| v.parse::<usize>().ok()).ok_or_else(|| bad("qubits needs an integer"))?);
                }
                "boundary" => boundary = it.next().ok_or_else(|| bad("boundary needs a value"))?.parse()?,
                "convention" => {
                    l2 = match it.next() {
                        Some("discard") => ObcL2Range::Discard,
                        Some("truncate") => ObcL2Range::Truncate,
                        _ => return Err(bad("convention is discard or truncate")),
                    }
                }
                _ => body.push((lineno + 1, line.to_string())),
            }
        }
        let n = qubits.ok_or_else(|| Error::Parse("missing 'qubits' header".into()))?;
        let mut m = LindbladModel::new(n, boundary)?;
        m.l2_range = l2;
        for (lineno, line) in body {
            let bad = |msg: String| Error::Parse(format!("line {lineno}: {msg}"));
            let mut it = line.split_whitespace();
            let head = it.next().unwrap_or_default();
            if head == "ham" {
                let coeff: f64 = it.next().and_then(|v| v.parse().ok()).ok_or_else(|| bad("ham needs a coefficient".into()))?;
                let rest: Vec<&str> = it.collect();
                let p = PauliOperator::parse(&rest.join(" "), n)?;
                m.push_hamiltonian(coeff, p)?;
                continue;
            }
            let kind: JumpKind = head.parse()?;
            let site = it.next().ok_or_else(|| bad("missing site".into()))?;
            let rate: f64 = match it.next() {
                Some(r) => r.parse().map_err(|_| bad(format!("bad rate '{r}'")))?,
                None => 1.0,
            };
            if site == "*" {
                m.push_family(kind, rate)?;
            } else {
                let s: usize = site.parse().map_err(|_| bad(format!("bad site '{site}'")))?;
                m.push(kind, s, rate)?;
            }
        }
        Ok(m)
    }
}
