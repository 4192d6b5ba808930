//! Vectorized Lindbladian in the interleaved ordering `s₁ s₁′ s₂ s₂′ …`.
//!
//! Qubit `q` (0-based) of the ket sits at bit `2(n−1−q)+1` of the vector index
//! and the matching bra qubit at bit `2(n−1−q)`, so `|ρ⟩⟩ = Σ ρ_{ab} |a, b⟩⟩`
//! keeps each physical site's two legs adjacent.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, JobSvd, SVDDC};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::dense::{DenseOperator, OperatorKind, PauliAction, C64, ZERO};
use crate::exact::model::LindbladModel;
use crate::pauli::{symmetry_operator, PauliOperator, SymmetryKind};

/// Largest chain for which the superoperator is assembled.
pub const MAX_SUPEROP_QUBITS: usize = 8;
/// Largest chain for which sector kernels and spectra are computed densely.
pub const MAX_KERNEL_QUBITS: usize = 6;
/// Largest chain for time evolution.
pub const MAX_EVOLVE_QUBITS: usize = 6;

/// Default kernel threshold on singular values.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Index maps between `(a, b)` pairs and interleaved vector indices.
#[derive(Clone, Debug)]
pub struct Interleave {
    n: usize,
    spread: Vec<usize>,
}

impl Interleave {
    pub fn new(n: usize) -> Self {
        let spread = (0..1usize << n)
            .map(|a| (0..n).fold(0usize, |acc, i| acc | (((a >> i) & 1) << (2 * i))))
            .collect();
        Interleave { n, spread }
    }

    #[inline]
    pub fn index(&self, a: usize, b: usize) -> usize {
        (self.spread[a] << 1) | self.spread[b]
    }

    #[inline]
    pub fn split(&self, idx: usize) -> (usize, usize) {
        let (mut a, mut b) = (0, 0);
        for i in 0..self.n {
            b |= ((idx >> (2 * i)) & 1) << i;
            a |= ((idx >> (2 * i + 1)) & 1) << i;
        }
        (a, b)
    }

    pub fn vectorize(&self, rho: &DenseOperator) -> Array1<C64> {
        let d = 1usize << self.n;
        let mut v = Array1::zeros(d * d);
        for a in 0..d {
            for b in 0..d {
                v[self.index(a, b)] = rho.data[(a, b)];
            }
        }
        v
    }

    pub fn unvectorize(&self, v: &Array1<C64>, kind: OperatorKind) -> DenseOperator {
        let d = 1usize << self.n;
        let mut out = DenseOperator::zeros(self.n, kind);
        for a in 0..d {
            for b in 0..d {
                out.data[(a, b)] = v[self.index(a, b)];
            }
        }
        out
    }
}

struct CompiledJump {
    rate: f64,
    terms: Vec<(C64, PauliAction)>,
    k_terms: Vec<(C64, PauliAction)>,
}

/// Sparse column-compressed superoperator.
#[derive(Clone, Debug)]
pub struct Superoperator {
    pub n_qubits: usize,
    pub layout: Interleave,
    col_ptr: Vec<usize>,
    row_idx: Vec<u32>,
    vals: Vec<C64>,
    /// Bit-flip masks (interleaved) of the symmetries the model preserves, with labels.
    symmetries: Vec<(Symmetry, usize)>,
}

/// The three commuting involutions that label charge sectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    /// `ρ ↦ Sρ`.
    SKet,
    /// `ρ ↦ ρS`.
    SBra,
    /// `ρ ↦ WρW`.
    WBoth,
}

/// Charges `(s_ket, s_bra, w)`; entries of a symmetry the model breaks are `None`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Charges {
    pub s_ket: Option<i8>,
    pub s_bra: Option<i8>,
    pub w: Option<i8>,
}

impl Charges {
    pub fn new(s_ket: i8, s_bra: i8, w: i8) -> Self {
        Charges { s_ket: Some(s_ket), s_bra: Some(s_bra), w: Some(w) }
    }

    fn get(&self, s: Symmetry) -> Option<i8> {
        match s {
            Symmetry::SKet => self.s_ket,
            Symmetry::SBra => self.s_bra,
            Symmetry::WBoth => self.w,
        }
    }
}

impl std::fmt::Display for Charges {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let c = |v: Option<i8>| match v {
            Some(1) => "+1".to_string(),
            Some(-1) => "-1".to_string(),
            _ => "*".to_string(),
        };
        write!(f, "({},{},{})", c(self.s_ket), c(self.s_bra), c(self.w))
    }
}

/// Result of [`charge_sector`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SectorLabel {
    Pure(Charges),
    Mixed,
}

fn compile_pauli(c: C64, p: &PauliOperator) -> (C64, PauliAction) {
    (c, PauliAction::new(p))
}

fn symmetry_masks(n: usize, layout: &Interleave) -> Result<[(Symmetry, usize); 3]> {
    let s = PauliAction::new(&symmetry_operator(SymmetryKind::S, n)?).flip;
    let w = PauliAction::new(&symmetry_operator(SymmetryKind::W, n)?).flip;
    Ok([
        (Symmetry::SKet, layout.index(s, 0)),
        (Symmetry::SBra, layout.index(0, s)),
        (Symmetry::WBoth, layout.index(w, w)),
    ])
}

impl Superoperator {
    /// Assembles the vectorized generator of `model`.
    pub fn build(model: &LindbladModel) -> Result<Self> {
        let n = model.n_qubits;
        if n > MAX_SUPEROP_QUBITS {
            return Err(Error::SizeCap { what: "superoperator", max: MAX_SUPEROP_QUBITS, got: n });
        }
        let layout = Interleave::new(n);
        let mut jumps = Vec::new();
        for (rate, l) in model.jump_operators()? {
            let k = l.adjoint().mul(&l);
            jumps.push(CompiledJump {
                rate,
                terms: l.terms.iter().map(|(c, p)| compile_pauli(*c, p)).collect(),
                k_terms: k.terms.iter().map(|(c, p)| compile_pauli(*c, p)).collect(),
            });
        }
        let ham: Vec<(f64, PauliAction)> = model.hamiltonian.iter().map(|(h, p)| (*h, PauliAction::new(p))).collect();

        let dim = 1usize << (2 * n);
        let columns: Vec<Vec<(u32, C64)>> = (0..dim)
            .into_par_iter()
            .map(|col| {
                let (a, b) = layout.split(col);
                let mut e: Vec<(u32, C64)> = Vec::new();
                let mut push = |a2: usize, b2: usize, v: C64| e.push((layout.index(a2, b2) as u32, v));
                for j in &jumps {
                    for (cp, pp) in &j.terms {
                        let (a2, ka) = pp.apply(a);
                        let left = cp * ka * j.rate;
                        for (cq, pq) in &j.terms {
                            // (ρ P_q†)_{a, b⊕x} = ρ_{ab} · conj(α_q(b))
                            let (b2, kb) = pq.apply(b);
                            push(a2, b2, left * (cq * kb).conj());
                        }
                    }
                    for (ck, pk) in &j.k_terms {
                        let (a2, ka) = pk.apply(a);
                        push(a2, b, -0.5 * j.rate * ck * ka);
                        // (ρK)_{a, b⊕x} = ρ_{ab} · c α(b⊕x)
                        let b2 = b ^ pk.flip;
                        push(a, b2, -0.5 * j.rate * ck * pk.coeff(b2));
                    }
                }
                for (h, ph) in &ham {
                    let (a2, ka) = ph.apply(a);
                    push(a2, b, C64::new(0.0, -*h) * ka);
                    let b2 = b ^ ph.flip;
                    push(a, b2, C64::new(0.0, *h) * ph.coeff(b2));
                }
                e.sort_unstable_by_key(|x| x.0);
                let mut merged: Vec<(u32, C64)> = Vec::with_capacity(e.len());
                for (r, v) in e {
                    match merged.last_mut() {
                        Some(last) if last.0 == r => last.1 += v,
                        _ => merged.push((r, v)),
                    }
                }
                merged.retain(|(_, v)| v.norm() > 1e-15);
                merged
            })
            .collect();

        let nnz = columns.iter().map(Vec::len).sum();
        let mut col_ptr = Vec::with_capacity(dim + 1);
        let mut row_idx = Vec::with_capacity(nnz);
        let mut vals = Vec::with_capacity(nnz);
        col_ptr.push(0);
        for c in columns {
            for (r, v) in c {
                row_idx.push(r);
                vals.push(v);
            }
            col_ptr.push(row_idx.len());
        }

        let symmetries = preserved_symmetries(model, &layout)?;
        Ok(Superoperator { n_qubits: n, layout, col_ptr, row_idx, vals, symmetries })
    }

    pub fn dim(&self) -> usize {
        self.col_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Symmetries used for the sector decomposition.
    pub fn symmetries(&self) -> Vec<Symmetry> {
        self.symmetries.iter().map(|s| s.0).collect()
    }

    /// Entry `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> C64 {
        let (lo, hi) = (self.col_ptr[col], self.col_ptr[col + 1]);
        match self.row_idx[lo..hi].binary_search(&(row as u32)) {
            Ok(k) => self.vals[lo + k],
            Err(_) => ZERO,
        }
    }

    /// `𝕃 v`.
    pub fn apply(&self, v: &Array1<C64>) -> Array1<C64> {
        let mut out = Array1::zeros(self.dim());
        for (col, &x) in v.iter().enumerate() {
            if x == ZERO {
                continue;
            }
            for k in self.col_ptr[col]..self.col_ptr[col + 1] {
                out[self.row_idx[k] as usize] += self.vals[k] * x;
            }
        }
        out
    }

    /// `𝕃† v`.
    pub fn apply_adjoint(&self, v: &Array1<C64>) -> Array1<C64> {
        let mut out = Array1::zeros(self.dim());
        for col in 0..self.dim() {
            let mut acc = ZERO;
            for k in self.col_ptr[col]..self.col_ptr[col + 1] {
                acc += self.vals[k].conj() * v[self.row_idx[k] as usize];
            }
            out[col] = acc;
        }
        out
    }

    /// `𝕃(ρ)` as an operator.
    pub fn apply_to(&self, rho: &DenseOperator) -> Result<DenseOperator> {
        if rho.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch { left: self.n_qubits, right: rho.n_qubits });
        }
        let v = self.apply(&self.layout.vectorize(rho));
        Ok(self.layout.unvectorize(&v, OperatorKind::Operator))
    }

    /// Dense copy; only sensible for a handful of qubits.
    pub fn to_dense(&self) -> Result<Array2<C64>> {
        if self.n_qubits > 4 {
            return Err(Error::SizeCap { what: "dense superoperator copy", max: 4, got: self.n_qubits });
        }
        let d = self.dim();
        let mut m = Array2::zeros((d, d));
        for col in 0..d {
            for k in self.col_ptr[col]..self.col_ptr[col + 1] {
                m[(self.row_idx[k] as usize, col)] = self.vals[k];
            }
        }
        Ok(m)
    }

    /// Largest absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.dim())
            .map(|c| self.vals[self.col_ptr[c]..self.col_ptr[c + 1]].iter().map(|v| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// All sector labels, in a fixed order.
    pub fn sectors(&self) -> Vec<Charges> {
        let k = self.symmetries.len();
        (0..1usize << k)
            .map(|bits| {
                let mut c = Charges { s_ket: None, s_bra: None, w: None };
                for (i, (s, _)) in self.symmetries.iter().enumerate() {
                    let v = if (bits >> i) & 1 == 1 { -1 } else { 1 };
                    match s {
                        Symmetry::SKet => c.s_ket = Some(v),
                        Symmetry::SBra => c.s_bra = Some(v),
                        Symmetry::WBoth => c.w = Some(v),
                    }
                }
                c
            })
            .collect()
    }

    fn group(&self) -> Vec<usize> {
        let mut g = vec![0usize];
        for (_, m) in &self.symmetries {
            let ext: Vec<usize> = g.iter().map(|x| x ^ m).collect();
            g.extend(ext);
        }
        g
    }

    fn character(&self, charges: &Charges, element: usize) -> f64 {
        // The generator masks act on disjoint bits, so membership is a subset test.
        let mut sign = 1.0;
        let mut rest = element;
        for (s, m) in &self.symmetries {
            if rest & m == *m {
                rest ^= m;
                if charges.get(*s) == Some(-1) {
                    sign = -sign;
                }
            }
        }
        debug_assert_eq!(rest, 0);
        sign
    }

    /// Orthonormal sector basis: one vector per orbit representative.
    fn sector_basis(&self, charges: &Charges) -> (Vec<usize>, Vec<(usize, f64)>) {
        let group = self.group();
        let norm = (group.len() as f64).sqrt().recip();
        let reps: Vec<usize> = (0..self.dim()).filter(|&i| group.iter().all(|&g| i ^ g >= i)).collect();
        let mut chars = Vec::with_capacity(group.len());
        for &g in &group {
            chars.push((g, self.character(charges, g) * norm));
        }
        (reps, chars)
    }

    /// `𝕃` restricted to one charge sector, in the orbit basis.
    pub fn sector_block(&self, charges: &Charges) -> Result<(Array2<C64>, Vec<Array1<C64>>)> {
        if self.n_qubits > MAX_KERNEL_QUBITS {
            return Err(Error::SizeCap { what: "sector block", max: MAX_KERNEL_QUBITS, got: self.n_qubits });
        }
        let (reps, chars) = self.sector_basis(charges);
        let group = self.group();
        let pos: std::collections::HashMap<usize, usize> = reps.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let d = reps.len();
        let mut block = Array2::<C64>::zeros((d, d));
        let rep_of = |idx: usize| -> (usize, usize) {
            let r = group.iter().map(|g| idx ^ g).min().expect("group nonempty");
            (r, idx ^ r)
        };
        let chi: std::collections::HashMap<usize, f64> = chars.iter().copied().collect();
        for (j, &r) in reps.iter().enumerate() {
            for &(g, cg) in &chars {
                let col = r ^ g;
                for k in self.col_ptr[col]..self.col_ptr[col + 1] {
                    let row = self.row_idx[k] as usize;
                    let (r2, g2) = rep_of(row);
                    if let Some(&i) = pos.get(&r2) {
                        block[(i, j)] += self.vals[k] * cg * chi[&g2];
                    }
                }
            }
        }
        let basis = reps
            .iter()
            .map(|&r| {
                let mut v = Array1::zeros(self.dim());
                for &(g, cg) in &chars {
                    v[r ^ g] = C64::new(cg, 0.0);
                }
                v
            })
            .collect();
        Ok((block, basis))
    }

    /// Right and left kernels of every sector.
    pub fn steady_space(&self, tol: f64) -> Result<SteadySpace> {
        let mut sectors = Vec::new();
        for charges in self.sectors() {
            let (block, basis) = self.sector_block(&charges)?;
            let (u, s, vt) = block.svddc(JobSvd::All).map_err(|e| Error::Numerical(e.to_string()))?;
            let (u, vt) = (u.expect("requested"), vt.expect("requested"));
            let kept: Vec<usize> = (0..s.len()).filter(|&i| s[i] < tol).collect();
            if let Some(&amb) = s.iter().find(|&&v| v >= tol && v < 10.0 * tol) {
                let smallest_kept = kept.iter().map(|&i| s[i]).fold(0.0, f64::max);
                return Err(Error::AmbiguousKernel { kept: smallest_kept, rejected: amb, tol });
            }
            let lift = |coeffs: ndarray::ArrayView1<C64>| -> Array1<C64> {
                let mut v = Array1::zeros(self.dim());
                for (c, b) in coeffs.iter().zip(&basis) {
                    if c.norm() > 0.0 {
                        v.scaled_add(*c, b);
                    }
                }
                v
            };
            let right = kept.iter().map(|&i| lift(vt.row(i).mapv(|v| v.conj()).view())).collect();
            let left = kept.iter().map(|&i| lift(u.column(i))).collect();
            sectors.push(SectorKernel { charges, right, left, smallest_nonzero: s.iter().cloned().filter(|&v| v >= tol).fold(f64::INFINITY, f64::min) });
        }
        Ok(SteadySpace { n_qubits: self.n_qubits, layout: self.layout.clone(), sectors })
    }

    /// Eigenvalues of one sector block.
    pub fn sector_spectrum(&self, charges: &Charges) -> Result<Vec<C64>> {
        let (block, _) = self.sector_block(charges)?;
        let (ev, _) = block.eig().map_err(|e| Error::Numerical(e.to_string()))?;
        let mut ev = ev.to_vec();
        ev.sort_by(|a, b| b.re.partial_cmp(&a.re).unwrap_or(std::cmp::Ordering::Equal));
        Ok(ev)
    }

    /// Projection of `𝕃` onto the span of the given operators (assumed mutually orthogonal).
    ///
    /// Returns `M` with `𝕃 e_j ≈ Σ_i M_ij e_i` and the largest residual norm outside the span.
    pub fn restrict(&self, ops: &[DenseOperator]) -> Result<(Array2<f64>, f64)> {
        let vs: Vec<Array1<C64>> = ops.iter().map(|o| self.layout.vectorize(o)).collect();
        let norms: Vec<f64> = vs.iter().map(|v| v.iter().map(|x| x.norm_sqr()).sum()).collect();
        let k = vs.len();
        let mut m = Array2::zeros((k, k));
        let mut worst: f64 = 0.0;
        for j in 0..k {
            let mut w = self.apply(&vs[j]);
            for i in 0..k {
                let c: C64 = vs[i].iter().zip(w.iter()).map(|(a, b)| a.conj() * b).sum::<C64>() / norms[i];
                m[(i, j)] = c.re;
                w.scaled_add(-c, &vs[i]);
            }
            worst = worst.max(w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt());
        }
        Ok((m, worst))
    }

    /// `e^{𝕃t} ρ` by truncated Taylor series over norm-bounded substeps.
    pub fn evolve(&self, rho: &DenseOperator, t: f64) -> Result<DenseOperator> {
        if self.n_qubits > MAX_EVOLVE_QUBITS {
            return Err(Error::SizeCap { what: "evolve", max: MAX_EVOLVE_QUBITS, got: self.n_qubits });
        }
        if !(t >= 0.0) {
            return Err(Error::InvalidArgument(format!("negative time {t}")));
        }
        let mut v = self.layout.vectorize(rho);
        let steps = (t * self.norm1()).ceil().max(1.0) as usize;
        let h = t / steps as f64;
        for _ in 0..steps {
            let mut term = v.clone();
            let mut acc = v.clone();
            for k in 1..60 {
                term = self.apply(&term).mapv(|x| x * (h / k as f64));
                acc += &term;
                if term.iter().map(|x| x.norm()).fold(0.0, f64::max) < 1e-18 {
                    break;
                }
            }
            v = acc;
        }
        Ok(self.layout.unvectorize(&v, rho.kind))
    }
}

fn preserved_symmetries(model: &LindbladModel, layout: &Interleave) -> Result<Vec<(Symmetry, usize)>> {
    let n = model.n_qubits;
    if n % 2 == 1 {
        return Ok(Vec::new());
    }
    let s = symmetry_operator(SymmetryKind::S, n)?;
    let w = symmetry_operator(SymmetryKind::W, n)?;
    let jumps = model.jump_operators()?;
    // Strong symmetry: every jump commutes with S exactly, and so does H.
    let strong_s = jumps.iter().all(|(_, l)| l.terms.iter().all(|(_, p)| !p.anticommutes_unchecked(&s)))
        && model.hamiltonian.iter().all(|(_, p)| !p.anticommutes_unchecked(&s));
    // Weak symmetry: each jump maps to ± itself, with one sign per jump.
    let weak_w = jumps.iter().all(|(_, l)| {
        let signs: Vec<bool> = l.terms.iter().map(|(_, p)| p.anticommutes_unchecked(&w)).collect();
        signs.windows(2).all(|x| x[0] == x[1])
    }) && model.hamiltonian.iter().all(|(_, p)| !p.anticommutes_unchecked(&w));
    let masks = symmetry_masks(n, layout)?;
    let mut out = Vec::new();
    if strong_s {
        out.push(masks[0]);
        out.push(masks[1]);
    }
    if weak_w {
        out.push(masks[2]);
    }
    Ok(out)
}

/// Kernel data of one charge sector.
#[derive(Clone, Debug)]
pub struct SectorKernel {
    pub charges: Charges,
    pub right: Vec<Array1<C64>>,
    pub left: Vec<Array1<C64>>,
    /// Smallest singular value above the threshold.
    pub smallest_nonzero: f64,
}

#[derive(Clone, Debug)]
pub struct SteadySpace {
    pub n_qubits: usize,
    layout: Interleave,
    pub sectors: Vec<SectorKernel>,
}

impl SteadySpace {
    pub fn dimension(&self) -> usize {
        self.sectors.iter().map(|s| s.right.len()).sum()
    }

    pub fn left_dimension(&self) -> usize {
        self.sectors.iter().map(|s| s.left.len()).sum()
    }

    /// `(charges, multiplicity)` of every sector with a nonzero kernel.
    pub fn census(&self) -> Vec<(Charges, usize)> {
        self.sectors.iter().filter(|s| !s.right.is_empty()).map(|s| (s.charges, s.right.len())).collect()
    }

    pub fn sector(&self, charges: &Charges) -> Option<&SectorKernel> {
        self.sectors.iter().find(|s| s.charges == *charges)
    }

    /// Right kernel vectors of a sector as operators; trace-normalized when the trace is nonzero.
    pub fn steady_operators(&self, charges: &Charges) -> Vec<DenseOperator> {
        let Some(sec) = self.sector(charges) else { return Vec::new() };
        sec.right
            .iter()
            .map(|v| {
                let op = self.layout.unvectorize(v, OperatorKind::Operator);
                let tr = op.trace();
                if tr.norm() > 1e-10 {
                    let mut d = op.scaled(tr.inv());
                    d.kind = OperatorKind::Density;
                    d
                } else {
                    op
                }
            })
            .collect()
    }

    /// The unique trace-one steady state of a sector.
    pub fn unique_state(&self, charges: &Charges) -> Result<DenseOperator> {
        let ops = self.steady_operators(charges);
        if ops.len() != 1 {
            return Err(Error::InvalidArgument(format!("sector {charges} has {} steady states, expected 1", ops.len())));
        }
        Ok(ops.into_iter().next().expect("one element"))
    }

    /// Left kernel vectors as operators `O` with `d/dt Tr(O† ρ) = 0`.
    pub fn conserved_operators(&self) -> Vec<(Charges, DenseOperator)> {
        self.sectors
            .iter()
            .flat_map(|s| s.left.iter().map(move |v| (s.charges, self.layout.unvectorize(v, OperatorKind::Operator))))
            .collect()
    }

    /// Norm of the component of `op` outside the left kernel, relative to `‖op‖`.
    pub fn left_residual(&self, op: &DenseOperator) -> f64 {
        let mut v = self.layout.vectorize(op);
        let total: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for s in &self.sectors {
            for l in &s.left {
                let c: C64 = l.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                v.scaled_add(-c, l);
            }
        }
        v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt() / total.max(f64::MIN_POSITIVE)
    }
}

/// Eigenvalue triple of a vectorized state under the three involutions.
pub fn charge_sector(rho: &DenseOperator, tol: f64) -> Result<SectorLabel> {
    let n = rho.n_qubits;
    let s = symmetry_operator(SymmetryKind::S, n)?;
    let w = symmetry_operator(SymmetryKind::W, n)?;
    let scale = rho.max_abs().max(f64::MIN_POSITIVE);
    let eig = |img: &DenseOperator| -> Option<i8> {
        if img.max_abs_diff(rho) <= tol * scale {
            Some(1)
        } else if img.add(rho).max_abs() <= tol * scale {
            Some(-1)
        } else {
            None
        }
    };
    let sk = eig(&rho.pauli_left(&s));
    let sb = eig(&rho.pauli_right(&s));
    let ww = eig(&rho.pauli_conj(&w));
    Ok(match (sk, sb, ww) {
        (Some(a), Some(b), Some(c)) => SectorLabel::Pure(Charges::new(a, b, c)),
        _ => SectorLabel::Mixed,
    })
}

/// Diagonal `U_CZ` phase of basis state `b` on a ring of `n` qubits.
pub(crate) fn u_cz_sign(b: usize, n: usize) -> f64 {
    let bit = |q: usize| (b >> (n - 1 - q)) & 1;
    let mut s = 0;
    for q in 0..n {
        // At n = 2 the wrap bond repeats the only bond, matching the tableau circuit.
        s += bit(q) * bit((q + 1) % n);
    }
    if s % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Entry-wise check that `(U⊗U*) 𝕃 (U⊗U*)† = other` for the diagonal `U_CZ`.
pub fn u_cz_conjugate_diff(a: &Superoperator, b: &Superoperator) -> f64 {
    let n = a.n_qubits;
    let sign = |idx: usize| {
        let (x, y) = a.layout.split(idx);
        u_cz_sign(x, n) * u_cz_sign(y, n)
    };
    let mut worst: f64 = 0.0;
    for col in 0..a.dim() {
        for k in a.col_ptr[col]..a.col_ptr[col + 1] {
            let row = a.row_idx[k] as usize;
            let v = a.vals[k] * sign(row) * sign(col);
            worst = worst.max((v - b.get(row, col)).norm());
        }
        for k in b.col_ptr[col]..b.col_ptr[col + 1] {
            let row = b.row_idx[k] as usize;
            if a.get(row, col) == ZERO {
                worst = worst.max(b.vals[k].norm());
            }
        }
    }
    worst
}
