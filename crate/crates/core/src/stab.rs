//! Bit-packed stabilizer tableau with destabilizers.
//!
//! Rows `0..n` are destabilizers and rows `n..2n` stabilizers. Each row is
//! stored as `[x words | z words]` with the same `i^phase X^x Z^z` convention
//! as [`PauliOperator`]. Gate methods take 0-based qubit indices.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::pauli::{words_for, Boundary, PauliOperator};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StabilizerState {
    n: usize,
    w: usize,
    rows: Vec<u64>,
    phase: Vec<u8>,
}

/// Value `i^phase · 2^(-log2_denom)` or exactly zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dyadic {
    Zero,
    Unit { phase: u8, log2_denom: u32 },
}

impl Dyadic {
    pub fn to_complex(self) -> Complex64 {
        match self {
            Dyadic::Zero => Complex64::new(0.0, 0.0),
            Dyadic::Unit { phase, log2_denom } => {
                let mag = (-(log2_denom as f64)).exp2();
                match phase & 3 {
                    0 => Complex64::new(mag, 0.0),
                    1 => Complex64::new(0.0, mag),
                    2 => Complex64::new(-mag, 0.0),
                    _ => Complex64::new(0.0, -mag),
                }
            }
        }
    }

    pub fn re(self) -> f64 {
        self.to_complex().re
    }

    pub fn im(self) -> f64 {
        self.to_complex().im
    }

    pub fn is_zero(self) -> bool {
        matches!(self, Dyadic::Zero)
    }
}

impl StabilizerState {
    /// `|0…0⟩`: stabilizers `Z_j`, destabilizers `X_j`.
    pub fn zero_state(n_qubits: usize) -> Self {
        assert!(n_qubits >= 1, "need at least one qubit");
        let w = words_for(n_qubits);
        let mut s = StabilizerState { n: n_qubits, w, rows: vec![0; 2 * n_qubits * 2 * w], phase: vec![0; 2 * n_qubits] };
        for q in 0..n_qubits {
            s.set_row_bit(q, q, true, false);
            s.set_row_bit(n_qubits + q, q, false, true);
        }
        s
    }

    /// `|+…+⟩`: stabilizers `X_j`, destabilizers `Z_j`.
    pub fn plus_state(n_qubits: usize) -> Self {
        let mut s = StabilizerState::zero_state(n_qubits);
        for q in 0..n_qubits {
            s.h(q);
        }
        s
    }

    /// Draws a decorated domain-wall state with uniform random `z_i`.
    ///
    /// Odd site `2i-1` carries `z_i Z`, even site `2i` carries `z_i z_{i+1} X`
    /// with the ring closure `z_{N+1} = z_1`. The ring closure is used for both
    /// boundary conditions: it is the configuration left invariant by the
    /// open-chain channel.
    pub fn sample_decorated_state<R: Rng + ?Sized>(n_qubits: usize, boundary: Boundary, rng: &mut R) -> Result<Self> {
        if n_qubits < 2 || n_qubits % 2 == 1 {
            return Err(Error::Parity(format!("decorated states need an even qubit count, got {n_qubits}")));
        }
        let _ = boundary;
        let zs: Vec<bool> = (0..n_qubits / 2).map(|_| rng.gen()).collect();
        Ok(StabilizerState::decorated_state(&zs))
    }

    /// Decorated state for a fixed configuration; `flip[i]` means `z_{i+1} = -1`.
    pub fn decorated_state(flip: &[bool]) -> Self {
        let n = 2 * flip.len();
        let mut s = StabilizerState::plus_state(n);
        for (i, &f) in flip.iter().enumerate() {
            s.h(2 * i);
            if f {
                s.x(2 * i);
            }
        }
        s.u_cz();
        s
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    fn stride(&self) -> usize {
        2 * self.w
    }

    #[inline]
    fn row(&self, r: usize) -> &[u64] {
        let s = self.stride();
        &self.rows[r * s..(r + 1) * s]
    }

    fn set_row_bit(&mut self, r: usize, q: usize, x: bool, z: bool) {
        let s = self.stride();
        let (wd, b) = (q / 64, q % 64);
        let base = r * s;
        let xm = &mut self.rows[base + wd];
        *xm = (*xm & !(1 << b)) | ((x as u64) << b);
        let zm = &mut self.rows[base + self.w + wd];
        *zm = (*zm & !(1 << b)) | ((z as u64) << b);
    }

    fn row_operator(&self, r: usize) -> PauliOperator {
        let row = self.row(r);
        PauliOperator::from_masks(self.n, row[..self.w].to_vec(), row[self.w..].to_vec(), self.phase[r])
            .expect("tableau rows have valid masks")
    }

    pub fn stabilizers(&self) -> Vec<PauliOperator> {
        (self.n..2 * self.n).map(|r| self.row_operator(r)).collect()
    }

    pub fn destabilizers(&self) -> Vec<PauliOperator> {
        (0..self.n).map(|r| self.row_operator(r)).collect()
    }

    #[inline]
    fn anticommutes_row(&self, r: usize, p: &PauliOperator) -> bool {
        let row = self.row(r);
        let (px, pz) = (p.x_words(), p.z_words());
        let mut acc = 0u64;
        for k in 0..self.w {
            let (px, pz) = (px[k], pz[k]);
            if px | pz == 0 {
                continue;
            }
            acc ^= (row[k] & pz) ^ (row[self.w + k] & px);
        }
        acc.count_ones() & 1 == 1
    }

    /// `row[target] ← row[target] · row[src]`.
    fn row_mul(&mut self, target: usize, src: usize) {
        let s = self.stride();
        let w = self.w;
        let (t0, s0) = (target * s, src * s);
        let mut cross = 0u32;
        for k in 0..w {
            let sx = self.rows[s0 + k];
            let sz = self.rows[s0 + w + k];
            cross += (self.rows[t0 + w + k] & sx).count_ones();
            self.rows[t0 + k] ^= sx;
            self.rows[t0 + w + k] ^= sz;
        }
        self.phase[target] = ((self.phase[target] as u32 + self.phase[src] as u32 + 2 * cross) & 3) as u8;
    }

    fn copy_row(&mut self, target: usize, src: usize) {
        let s = self.stride();
        self.rows.copy_within(src * s..(src + 1) * s, target * s);
        self.phase[target] = self.phase[src];
    }

    fn write_row(&mut self, r: usize, p: &PauliOperator, phase: u8) {
        let s = self.stride();
        let w = self.w;
        self.rows[r * s..r * s + w].copy_from_slice(p.x_words());
        self.rows[r * s + w..(r + 1) * s].copy_from_slice(p.z_words());
        self.phase[r] = phase & 3;
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::OutOfRange { site: q + 1, n_qubits: self.n });
        }
        Ok(())
    }

    fn check_size(&self, p: &PauliOperator) -> Result<()> {
        if p.n_qubits() != self.n {
            return Err(Error::DimensionMismatch { left: self.n, right: p.n_qubits() });
        }
        Ok(())
    }

    /// Flips the phase of every row whose bit selection `(x_sel & x) ^ (z_sel & z)` has odd parity on qubit `q`.
    fn flip_where(&mut self, q: usize, on_x: bool, on_z: bool) {
        let s = self.stride();
        let (wd, b) = (q / 64, q % 64);
        for r in 0..2 * self.n {
            let xb = (self.rows[r * s + wd] >> b) & 1;
            let zb = (self.rows[r * s + self.w + wd] >> b) & 1;
            let hit = (on_x as u64 & xb) ^ (on_z as u64 & zb);
            self.phase[r] ^= (hit as u8) << 1;
        }
    }

    /// Pauli X on qubit `q`.
    pub fn x(&mut self, q: usize) -> &mut Self {
        self.flip_where(q, false, true);
        self
    }

    /// Pauli Y on qubit `q`.
    pub fn y(&mut self, q: usize) -> &mut Self {
        self.flip_where(q, true, true);
        self
    }

    /// Pauli Z on qubit `q`.
    pub fn z(&mut self, q: usize) -> &mut Self {
        self.flip_where(q, true, false);
        self
    }

    /// Hadamard on qubit `q`.
    pub fn h(&mut self, q: usize) -> &mut Self {
        let s = self.stride();
        let (wd, b) = (q / 64, q % 64);
        for r in 0..2 * self.n {
            let xi = r * s + wd;
            let zi = r * s + self.w + wd;
            let xb = (self.rows[xi] >> b) & 1;
            let zb = (self.rows[zi] >> b) & 1;
            self.phase[r] = (self.phase[r] + 2 * (xb & zb) as u8) & 3;
            self.rows[xi] = (self.rows[xi] & !(1 << b)) | (zb << b);
            self.rows[zi] = (self.rows[zi] & !(1 << b)) | (xb << b);
        }
        self
    }

    /// Phase gate `diag(1, i)` on qubit `q`.
    pub fn s(&mut self, q: usize) -> &mut Self {
        let s = self.stride();
        let (wd, b) = (q / 64, q % 64);
        for r in 0..2 * self.n {
            let xb = (self.rows[r * s + wd] >> b) & 1;
            self.phase[r] = (self.phase[r] + xb as u8) & 3;
            self.rows[r * s + self.w + wd] ^= xb << b;
        }
        self
    }

    /// Controlled-Z between distinct qubits `a` and `b`.
    pub fn cz(&mut self, a: usize, b: usize) -> &mut Self {
        assert_ne!(a, b, "CZ needs distinct qubits");
        let s = self.stride();
        let (wa, ba) = (a / 64, a % 64);
        let (wb, bb) = (b / 64, b % 64);
        for r in 0..2 * self.n {
            let xa = (self.rows[r * s + wa] >> ba) & 1;
            let xb = (self.rows[r * s + wb] >> bb) & 1;
            self.phase[r] = (self.phase[r] + 2 * (xa & xb) as u8) & 3;
            self.rows[r * s + self.w + wb] ^= xa << bb;
            self.rows[r * s + self.w + wa] ^= xb << ba;
        }
        self
    }

    /// Checked variants of the single- and two-qubit gates.
    pub fn apply_gate(&mut self, gate: Gate) -> Result<&mut Self> {
        match gate {
            Gate::X(q) => {
                self.check_qubit(q)?;
                Ok(self.x(q))
            }
            Gate::Y(q) => {
                self.check_qubit(q)?;
                Ok(self.y(q))
            }
            Gate::Z(q) => {
                self.check_qubit(q)?;
                Ok(self.z(q))
            }
            Gate::H(q) => {
                self.check_qubit(q)?;
                Ok(self.h(q))
            }
            Gate::S(q) => {
                self.check_qubit(q)?;
                Ok(self.s(q))
            }
            Gate::Cz(a, b) => {
                self.check_qubit(a)?;
                self.check_qubit(b)?;
                if a == b {
                    return Err(Error::InvalidArgument("CZ on a single qubit".into()));
                }
                Ok(self.cz(a, b))
            }
            Gate::UCz => Ok(self.u_cz()),
        }
    }

    /// `U_CZ = ∏_j CZ_{j,j+1}` over all ring bonds, mapping `X_j ↦ Z_{j-1} X_j Z_{j+1}`.
    pub fn u_cz(&mut self) -> &mut Self {
        let n = self.n;
        if n < 2 {
            return self;
        }
        for j in 0..n {
            self.cz(j, (j + 1) % n);
        }
        self
    }

    /// Conjugates the state by a Pauli operator (applies it as a unitary).
    pub fn apply_pauli(&mut self, p: &PauliOperator) -> Result<&mut Self> {
        self.check_size(p)?;
        self.apply_pauli_unchecked(p);
        Ok(self)
    }

    pub(crate) fn apply_pauli_unchecked(&mut self, p: &PauliOperator) {
        for r in 0..2 * self.n {
            if self.anticommutes_row(r, p) {
                self.phase[r] ^= 2;
            }
        }
    }

    fn first_anticommuting_stabilizer(&self, p: &PauliOperator) -> Option<usize> {
        (self.n..2 * self.n).find(|&r| self.anticommutes_row(r, p))
    }

    /// Sign of `p` within the stabilizer group, assuming it commutes with every stabilizer.
    fn deterministic_sign(&self, p: &PauliOperator) -> i8 {
        let w = self.w;
        let mut ax = vec![0u64; w];
        let mut az = vec![0u64; w];
        let mut ph = 0u32;
        for d in 0..self.n {
            if !self.anticommutes_row(d, p) {
                continue;
            }
            let row = self.row(self.n + d);
            let mut cross = 0u32;
            for k in 0..w {
                cross += (az[k] & row[k]).count_ones();
                ax[k] ^= row[k];
                az[k] ^= row[w + k];
            }
            ph += self.phase[self.n + d] as u32 + 2 * cross;
        }
        debug_assert!(ax == p.x_words() && az == p.z_words(), "commuting Pauli must lie in the stabilizer group");
        if (ph + 4 - p.phase_exp() as u32) % 4 == 0 {
            1
        } else {
            -1
        }
    }

    fn check_hermitian(p: &PauliOperator) -> Result<()> {
        if !p.is_hermitian() {
            return Err(Error::NotHermitian(p.to_string()));
        }
        Ok(())
    }

    /// Measures the Hermitian Pauli `p`.
    ///
    /// Returns `(outcome, was_random)`. When the outcome is random and `forced`
    /// is given, that outcome is selected (postselection); a `forced` value is
    /// ignored for deterministic outcomes.
    pub fn measure<R: Rng + ?Sized>(&mut self, p: &PauliOperator, rng: &mut R, forced: Option<i8>) -> Result<(i8, bool)> {
        self.check_size(p)?;
        Self::check_hermitian(p)?;
        Ok(self.measure_unchecked(p, rng, forced))
    }

    pub(crate) fn measure_unchecked<R: Rng + ?Sized>(&mut self, p: &PauliOperator, rng: &mut R, forced: Option<i8>) -> (i8, bool) {
        let Some(piv) = self.first_anticommuting_stabilizer(p) else {
            return (self.deterministic_sign(p), false);
        };
        for r in 0..2 * self.n {
            if r != piv && self.anticommutes_row(r, p) {
                self.row_mul(r, piv);
            }
        }
        self.copy_row(piv - self.n, piv);
        let outcome = match forced {
            Some(f) => {
                if f >= 0 {
                    1
                } else {
                    -1
                }
            }
            None => {
                if rng.gen::<bool>() {
                    1
                } else {
                    -1
                }
            }
        };
        let phase = p.phase_exp() + if outcome == 1 { 0 } else { 2 };
        self.write_row(piv, p, phase);
        (outcome, true)
    }

    /// `±1` if `±p` is in the stabilizer group, otherwise 0.
    pub fn expectation(&self, p: &PauliOperator) -> Result<i8> {
        self.check_size(p)?;
        Self::check_hermitian(p)?;
        Ok(self.expectation_unchecked(p))
    }

    pub(crate) fn expectation_unchecked(&self, p: &PauliOperator) -> i8 {
        if self.first_anticommuting_stabilizer(p).is_some() {
            0
        } else {
            self.deterministic_sign(p)
        }
    }

    /// Checks commutation, pairing, Hermiticity and independence of the tableau.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        let ops: Vec<_> = (0..2 * n).map(|r| self.row_operator(r)).collect();
        for i in 0..n {
            let s = &ops[n + i];
            if !s.is_hermitian() {
                return Err(Error::Numerical(format!("stabilizer {i} not Hermitian")));
            }
            for j in 0..n {
                if s.anticommutes_unchecked(&ops[n + j]) {
                    return Err(Error::Numerical(format!("stabilizers {i},{j} anticommute")));
                }
                let anti = ops[j].anticommutes_unchecked(s);
                if anti != (i == j) {
                    return Err(Error::Numerical(format!("destabilizer {j} / stabilizer {i} pairing broken")));
                }
            }
        }
        // Symplectic pairing above already implies independence of both halves.
        Ok(())
    }

    /// `⟨u|A|v⟩⟨v|B|u⟩` for Hermitian Paulis `A`, `B`.
    ///
    /// With `ũ = B|u⟩` and `P = B·A` this equals `⟨ũ|P Π_v|ũ⟩`, where `Π_v`
    /// projects onto `v`. Postselecting a copy of `ũ` onto the generators of
    /// `v` gives `p = |⟨ũ|v⟩|²`; the remaining factor is `⟨ũ|P h₀|ũ⟩` for any
    /// `h₀` in the stabilizer group of `v` that makes `P h₀` commute with the
    /// stabilizers of `ũ`.
    pub fn sandwich(u: &StabilizerState, a: &PauliOperator, b: &PauliOperator, v: &StabilizerState) -> Result<Dyadic> {
        if u.n != v.n {
            return Err(Error::DimensionMismatch { left: u.n, right: v.n });
        }
        u.check_size(a)?;
        u.check_size(b)?;
        Self::check_hermitian(a)?;
        Self::check_hermitian(b)?;

        let mut ut = u.clone();
        ut.apply_pauli_unchecked(b);
        let p_op = b.mul_unchecked(a);

        let Some(halvings) = postselection_halvings(&ut, v) else {
            return Ok(Dyadic::Zero);
        };

        let gens: Vec<PauliOperator> = (v.n..2 * v.n).map(|r| v.row_operator(r)).collect();
        let Some(coeffs) = solve_commuting_completion(&ut, &p_op, &gens) else {
            return Ok(Dyadic::Zero);
        };
        let mut q = p_op;
        for (g, take) in gens.iter().zip(coeffs) {
            if take {
                q = q.mul_unchecked(g);
            }
        }
        let herm = q.unsigned();
        let k = q.coefficient_exp();
        let s = ut.expectation_unchecked(&herm);
        debug_assert!(s != 0);
        let phase = (k + if s < 0 { 2 } else { 0 }) & 3;
        Ok(Dyadic::Unit { phase, log2_denom: halvings })
    }

    /// A pseudo-random stabilizer state from `4n² + 4` random H, S, CZ and X gates.
    pub fn random_clifford<R: Rng + ?Sized>(n: usize, rng: &mut R) -> StabilizerState {
        let mut s = StabilizerState::zero_state(n);
        for _ in 0..(4 * n * n + 4) {
            match rng.gen_range(0..4) {
                0 => {
                    s.h(rng.gen_range(0..n));
                }
                1 => {
                    s.s(rng.gen_range(0..n));
                }
                2 if n > 1 => {
                    let a = rng.gen_range(0..n);
                    let b = (a + rng.gen_range(1..n)) % n;
                    s.cz(a, b);
                }
                _ => {
                    s.x(rng.gen_range(0..n));
                }
            }
        }
        s
    }

    /// Whether both tableaus describe the same state (stabilizer groups with signs agree).
    pub fn equivalent(&self, other: &StabilizerState) -> bool {
        self.n == other.n && (self.n..2 * self.n).all(|r| other.expectation_unchecked(&self.row_operator(r)) == 1)
    }

    /// `|⟨u|v⟩|²`.
    pub fn overlap_sq(u: &StabilizerState, v: &StabilizerState) -> Result<f64> {
        let id = PauliOperator::identity(u.n);
        Ok(Self::sandwich(u, &id, &id, v)?.re())
    }
}

/// Runs the postselection loop on a copy of `u` over the generators of `v`.
/// Returns the number of halvings, or `None` on a deterministic mismatch.
fn postselection_halvings(u: &StabilizerState, v: &StabilizerState) -> Option<u32> {
    let mut w = u.clone();
    let mut halvings = 0;
    let mut rng = rand::rngs::mock::StepRng::new(0, 0);
    for r in v.n..2 * v.n {
        let h = v.row_operator(r);
        match w.expectation_unchecked(&h) {
            -1 => return None,
            1 => {}
            _ => {
                halvings += 1;
                w.measure_unchecked(&h, &mut rng, Some(1));
            }
        }
    }
    Some(halvings)
}

/// Finds `a` with `P · ∏ g_i^{a_i}` commuting with every stabilizer of `u`.
fn solve_commuting_completion(u: &StabilizerState, p: &PauliOperator, gens: &[PauliOperator]) -> Option<Vec<bool>> {
    let n = u.n;
    let k = gens.len();
    let wk = words_for(k + 1);
    // Row j: bits i < k hold [g_i anticommutes with stabilizer j], bit k holds it for P.
    let mut mat = vec![vec![0u64; wk]; n];
    for (j, row) in mat.iter_mut().enumerate() {
        for (i, g) in gens.iter().enumerate() {
            if u.anticommutes_row(n + j, g) {
                row[i / 64] |= 1 << (i % 64);
            }
        }
        if u.anticommutes_row(n + j, p) {
            row[k / 64] |= 1 << (k % 64);
        }
    }
    let bit = |row: &Vec<u64>, i: usize| (row[i / 64] >> (i % 64)) & 1 == 1;
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..k {
        let Some(sel) = (r..n).find(|&j| bit(&mat[j], c)) else {
            continue;
        };
        mat.swap(r, sel);
        for j in 0..n {
            if j != r && bit(&mat[j], c) {
                let src = mat[r].clone();
                for (d, s) in mat[j].iter_mut().zip(&src) {
                    *d ^= s;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == n {
            break;
        }
    }
    if (r..n).any(|j| bit(&mat[j], k)) {
        return None;
    }
    let mut a = vec![false; k];
    for (row, &c) in pivots.iter().enumerate() {
        a[c] = bit(&mat[row], k);
    }
    Some(a)
}

/// Gates accepted by [`StabilizerState::apply_gate`]; indices are 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    X(usize),
    Y(usize),
    Z(usize),
    H(usize),
    S(usize),
    Cz(usize, usize),
    UCz,
}

impl fmt::Display for StabilizerState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in self.n..2 * self.n {
            writeln!(f, "{}", self.row_operator(r))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{string_operator, symmetry_operator, StringKind, SymmetryKind};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(t: &str, n: usize) -> PauliOperator {
        PauliOperator::parse(t, n).unwrap()
    }

    #[test]
    fn plus_state_basics() {
        let s = StabilizerState::plus_state(2);
        assert_eq!(s.stabilizers(), vec![p("X@1", 2), p("X@2", 2)]);
        let s4 = StabilizerState::plus_state(4);
        assert_eq!(s4.expectation(&p("Z@1", 4)).unwrap(), 0);
        assert_eq!(s4.expectation(&p("X@2 X@4", 4)).unwrap(), 1);
        assert_eq!(s4.expectation(&p("-X@1", 4)).unwrap(), -1);
        assert_eq!(s4.expectation(&p("Z@2", 4)).unwrap(), 0);
        s4.validate().unwrap();
    }

    #[test]
    fn decorated_state_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 8;
        let clean = StabilizerState::decorated_state(&[false; 4]);
        assert_eq!(clean.stabilizers()[..4].len(), 4);
        let mut stabs = clean.stabilizers();
        stabs.sort_by_key(|s| s.to_string());
        let mut want: Vec<_> = (1..=n).map(|s| p(&format!("{}@{s}", if s % 2 == 1 { "Z" } else { "X" }), n)).collect();
        want.sort_by_key(|s| s.to_string());
        // Generators may differ by products; compare stabilizer groups through expectations.
        for g in &want {
            assert_eq!(clean.expectation(g).unwrap(), 1);
        }
        let s_op = symmetry_operator(SymmetryKind::S, n).unwrap();
        for _ in 0..20 {
            let st = StabilizerState::sample_decorated_state(n, Boundary::Periodic, &mut rng).unwrap();
            st.validate().unwrap();
            assert_eq!(st.expectation(&s_op).unwrap(), 1);
            for j in (2..=n).step_by(2) {
                let check = p(&format!("Z@{} X@{} Z@{}", j - 1, j, j % n + 1), n);
                assert_eq!(st.expectation(&check).unwrap(), 1);
            }
            let mut dual = st.clone();
            dual.u_cz();
            for j in (2..=n).step_by(2) {
                assert_eq!(dual.expectation(&p(&format!("X@{j}"), n)).unwrap(), 1);
            }
        }
        assert!(StabilizerState::sample_decorated_state(5, Boundary::Open, &mut rng).is_err());
    }

    #[test]
    fn strong_string_on_clean_decorated_state() {
        let st = StabilizerState::decorated_state(&[false; 3]);
        let s = string_operator(StringKind::Strong, 1, 5, 6, false).unwrap();
        assert_eq!(st.expectation(&s).unwrap(), 1);
    }

    #[test]
    fn gate_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let base = StabilizerState::random_clifford(5, &mut rng);
        let mut s = base.clone();
        s.cz(0, 1).cz(0, 1);
        assert_eq!(s, base);
        let mut s = base.clone();
        s.h(2).h(2);
        assert_eq!(s, base);
        let mut s = base.clone();
        s.s(3).s(3).s(3).s(3);
        assert_eq!(s, base);
        let mut plus = StabilizerState::plus_state(4);
        plus.z(2);
        assert_eq!(plus.expectation(&p("X@3", 4)).unwrap(), -1);
    }

    #[test]
    fn u_cz_maps_x_to_cluster_check() {
        let n = 6;
        for j in 1..=n {
            let mut s = StabilizerState::zero_state(n);
            s.h(j - 1);
            s.u_cz();
            let l = if j == 1 { n } else { j - 1 };
            let r = j % n + 1;
            let check = p(&format!("Z@{l} X@{j} Z@{r}"), n);
            assert_eq!(s.expectation(&check).unwrap(), 1);
            assert_eq!(s.expectation(&p(&format!("Z@{l}"), n)).unwrap(), 1);
        }
    }

    #[test]
    fn measurement_contract() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let z1 = p("Z@1", 1);
        let x1 = p("X@1", 1);
        let mut plus_count = 0;
        let draws = 10_000;
        for _ in 0..draws {
            let mut s = StabilizerState::plus_state(1);
            let (o, random) = s.measure(&z1, &mut rng, None).unwrap();
            assert!(random);
            assert_eq!(s.expectation(&z1).unwrap(), o);
            plus_count += (o == 1) as usize;
        }
        let sigma = (draws as f64 * 0.25).sqrt();
        assert!((plus_count as f64 - draws as f64 / 2.0).abs() < 3.0 * sigma);

        let mut s = StabilizerState::plus_state(1);
        assert_eq!(s.measure(&x1, &mut rng, None).unwrap(), (1, false));
        let (o, random) = s.measure(&z1, &mut rng, Some(-1)).unwrap();
        assert_eq!((o, random), (-1, true));
        assert_eq!(s.expectation(&z1.negated()).unwrap(), 1);
        assert!(s.measure(&p("+i X@1", 1), &mut rng, None).is_err());
    }

    #[test]
    fn sandwich_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = StabilizerState::random_clifford(4, &mut rng);
        let id = PauliOperator::identity(4);
        assert_eq!(StabilizerState::sandwich(&u, &id, &id, &u).unwrap().re(), 1.0);

        // Both copies are |++⟩ and Z1Z2|++⟩ is orthogonal to |++⟩.
        let pp = StabilizerState::plus_state(2);
        let zz = p("Z@1 Z@2", 2);
        assert_eq!(StabilizerState::sandwich(&pp, &zz, &zz, &pp).unwrap(), Dyadic::Zero);

        let plus = StabilizerState::plus_state(1);
        let zero = StabilizerState::zero_state(1);
        let id1 = PauliOperator::identity(1);
        assert_eq!(StabilizerState::sandwich(&plus, &id1, &id1, &zero).unwrap().re(), 0.5);
        // Postselection alone would give 0 here; the true value is ⟨0|Z|+⟩⟨+|0⟩ = 1/2.
        assert_eq!(StabilizerState::sandwich(&zero, &p("Z@1", 1), &id1, &plus).unwrap().re(), 0.5);
        assert_eq!(StabilizerState::overlap_sq(&StabilizerState::plus_state(5), &StabilizerState::zero_state(5)).unwrap(), 1.0 / 32.0);
        let mut one = StabilizerState::zero_state(3);
        one.x(1);
        assert_eq!(StabilizerState::overlap_sq(&one, &StabilizerState::zero_state(3)).unwrap(), 0.0);
    }
}
