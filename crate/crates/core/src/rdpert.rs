//! Classical reaction-diffusion generators on the vacuum plus two-particle
//! sector, and first-order perturbation theory for the dual string order.
//!
//! Particles live on the `N` even sites of the original chain; particle site
//! `i` corresponds to qubit `2i`.

use std::collections::HashMap;

use ndarray::{Array1, Array2};
use ndarray_linalg::{Solve, SVD};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::Boundary;

/// Residual bound accepted from the pseudoinverse solve.
pub const SOLVE_TOL: f64 = 1e-8;

/// Ordering `[vac, (1,2), (1,3), …, (N−1,N)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairSectorIndex {
    n: usize,
    pairs: Vec<(usize, usize)>,
    lookup: HashMap<(usize, usize), usize>,
}

/// A basis state of the sector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PairState {
    Vacuum,
    Pair(usize, usize),
}

impl PairSectorIndex {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("need N >= 2 even sites, got {n}")));
        }
        let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
        let lookup = pairs.iter().enumerate().map(|(k, &p)| (p, k + 1)).collect();
        Ok(PairSectorIndex { n, pairs, lookup })
    }

    pub fn n_sites(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.pairs.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of a state; pairs may be given in either order.
    pub fn index(&self, s: PairState) -> Option<usize> {
        match s {
            PairState::Vacuum => Some(0),
            PairState::Pair(a, b) => self.lookup.get(&(a.min(b), a.max(b))).copied(),
        }
    }

    pub fn state(&self, idx: usize) -> Option<PairState> {
        match idx {
            0 => Some(PairState::Vacuum),
            k => self.pairs.get(k - 1).map(|&(i, j)| PairState::Pair(i, j)),
        }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}

/// Column-stochastic rate matrix: `ċ = M c`.
#[derive(Clone, Debug)]
pub struct ClassicalGenerator {
    pub index: PairSectorIndex,
    pub boundary: Boundary,
    pub matrix: Array2<f64>,
}

impl ClassicalGenerator {
    fn empty(index: PairSectorIndex, boundary: Boundary) -> Self {
        let d = index.len();
        ClassicalGenerator { index, boundary, matrix: Array2::zeros((d, d)) }
    }

    /// Adds `from → to` with `rate`, balancing the diagonal.
    fn add_rate(&mut self, from: usize, to: usize, rate: f64) {
        self.matrix[(to, from)] += rate;
        self.matrix[(from, from)] -= rate;
    }

    /// Largest absolute column sum.
    pub fn max_column_sum(&self) -> f64 {
        self.matrix.columns().into_iter().map(|c| c.sum().abs()).fold(0.0, f64::max)
    }
}

/// Unperturbed hopping-annihilation generator: each particle hops one site to
/// the right at rate 1 and annihilates with a particle it lands on.
pub fn build_p0(n: usize, boundary: Boundary) -> Result<ClassicalGenerator> {
    let index = PairSectorIndex::new(n)?;
    let mut g = ClassicalGenerator::empty(index.clone(), boundary);
    for (k, &(i, j)) in index.pairs().iter().enumerate() {
        let from = k + 1;
        // Left particle.
        let to = if i + 1 == j { PairState::Vacuum } else { PairState::Pair(i + 1, j) };
        g.add_rate(from, index.index(to).expect("in sector"), 1.0);
        // Right particle.
        let target = if j < n {
            Some(j + 1)
        } else if boundary == Boundary::Periodic {
            Some(1)
        } else {
            None
        };
        if let Some(t) = target {
            let to = if t == i { PairState::Vacuum } else { PairState::Pair(i, t) };
            g.add_rate(from, index.index(to).expect("in sector"), 1.0);
        }
    }
    Ok(g)
}

/// Perturbation acting on the vacuum.
#[derive(Clone, Debug, PartialEq)]
pub enum Perturbation {
    /// Pair creation on every bond `(k, k+1)` and the reverse annihilation, rate 1.
    AdjacentPair,
    /// Creation rates `vac → (i, j)`.
    Custom(Vec<((usize, usize), f64)>),
}

impl Perturbation {
    pub fn name(&self) -> &'static str {
        match self {
            Perturbation::AdjacentPair => "adjacent_pair",
            Perturbation::Custom(_) => "custom",
        }
    }
}

fn bonds(n: usize, boundary: Boundary) -> Vec<(usize, usize)> {
    let mut b: Vec<(usize, usize)> = (1..n).map(|k| (k, k + 1)).collect();
    if boundary == Boundary::Periodic && n > 2 {
        b.push((n, 1));
    }
    b
}

/// Perturbation generator restricted to transitions out of (and back into) the vacuum.
pub fn build_pp(n: usize, boundary: Boundary, pert: &Perturbation) -> Result<ClassicalGenerator> {
    let index = PairSectorIndex::new(n)?;
    let mut g = ClassicalGenerator::empty(index.clone(), boundary);
    match pert {
        Perturbation::AdjacentPair => {
            for (a, b) in bonds(n, boundary) {
                let k = index.index(PairState::Pair(a, b)).expect("bond in sector");
                g.add_rate(0, k, 1.0);
                g.add_rate(k, 0, 1.0);
            }
        }
        Perturbation::Custom(rates) => {
            for &((a, b), r) in rates {
                if r < 0.0 || !r.is_finite() {
                    return Err(Error::InvalidArgument(format!("negative or non-finite rate {r}")));
                }
                let k = if a != b && a >= 1 && b >= 1 { index.index(PairState::Pair(a, b)) } else { None };
                let k = k.ok_or_else(|| Error::InvalidArgument(format!("({a},{b}) leaves the vacuum-plus-pair sector")))?;
                g.add_rate(0, k, r);
            }
        }
    }
    Ok(g)
}

/// Moore-Penrose pseudoinverse via SVD with a relative cutoff.
fn pinv(a: &Array2<f64>) -> Result<Array2<f64>> {
    let (u, s, vt) = a.svd(true, true).map_err(|e| Error::Numerical(e.to_string()))?;
    let (u, vt) = (u.expect("u requested"), vt.expect("vt requested"));
    let cutoff = s.iter().copied().fold(0.0, f64::max) * 1e-12 * a.nrows() as f64;
    let mut out = Array2::zeros((a.ncols(), a.nrows()));
    for (k, &sk) in s.iter().enumerate() {
        if sk > cutoff {
            let v = vt.row(k);
            let w = u.column(k);
            for r in 0..a.ncols() {
                for c in 0..a.nrows() {
                    out[(r, c)] += v[r] * w[c] / sk;
                }
            }
        }
    }
    Ok(out)
}

/// Steady state to first order, `c(λ) = R₀ + λ R₁` with `Σ R₁ = 0`.
#[derive(Clone, Debug)]
pub struct FirstOrder {
    pub index: PairSectorIndex,
    pub r0: Array1<f64>,
    pub r1: Array1<f64>,
}

impl FirstOrder {
    pub fn coefficients(&self, lambda: f64) -> Array1<f64> {
        &self.r0 + &(&self.r1 * lambda)
    }

    /// Pair coefficient `c_{i,j}` per unit `λ`.
    pub fn pair(&self, i: usize, j: usize) -> f64 {
        self.index.index(PairState::Pair(i, j)).map_or(0.0, |k| self.r1[k])
    }
}

/// Solves `𝒫₀ R₁ = −𝒫_p R₀` with `R₀ = |vac)`.
pub fn first_order_steady(n: usize, boundary: Boundary, pert: &Perturbation) -> Result<FirstOrder> {
    let p0 = build_p0(n, boundary)?;
    let pp = build_pp(n, boundary, pert)?;
    let d = p0.index.len();
    let mut r0 = Array1::zeros(d);
    r0[0] = 1.0;
    let rhs = -pp.matrix.dot(&r0);
    let mut r1 = pinv(&p0.matrix)?.dot(&rhs);
    // Kernel freedom along the vacuum fixes the normalization.
    let total = r1.sum();
    r1[0] -= total;
    let resid = (&p0.matrix.dot(&r1) - &rhs).iter().map(|x| x.abs()).fold(0.0, f64::max);
    if resid > SOLVE_TOL {
        return Err(Error::Numerical(format!("pseudoinverse residual {resid:.3e}")));
    }
    Ok(FirstOrder { index: p0.index, r0, r1 })
}

/// Pairs with exactly one particle strictly between odd sites `n < m`.
fn crossing(n: usize, m: usize, i: usize, j: usize) -> bool {
    let (a, b) = (2 * i, 2 * j);
    (n < a && a < m && m < b) || (a < n && n < b && b < m)
}

fn check_odd(n: usize, m: usize) -> Result<()> {
    if n % 2 == 0 || m % 2 == 0 || n >= m {
        return Err(Error::Parity(format!("string endpoints must be odd with n < m, got ({n}, {m})")));
    }
    Ok(())
}

/// `1 − 2 Σ_ζ c_{i,j}` for normalized coefficients over the sector.
pub fn string_first_order(index: &PairSectorIndex, c: &Array1<f64>, n: usize, m: usize) -> Result<f64> {
    check_odd(n, m)?;
    if c.len() != index.len() {
        return Err(Error::DimensionMismatch { left: index.len(), right: c.len() });
    }
    let s: f64 = index.pairs().iter().enumerate().filter(|(_, &(i, j))| crossing(n, m, i, j)).map(|(k, _)| c[k + 1]).sum();
    Ok(1.0 - 2.0 * s)
}

/// `dC̃_I/dλ` at `λ = 0`.
pub fn string_derivative(fo: &FirstOrder, n: usize, m: usize) -> Result<f64> {
    check_odd(n, m)?;
    Ok(-2.0 * fo.index.pairs().iter().enumerate().filter(|(_, &(i, j))| crossing(n, m, i, j)).map(|(k, _)| fo.r1[k + 1]).sum::<f64>())
}

/// Largest `N` accepted by the full population-sector helpers.
pub const MAX_POPULATION_SITES: usize = 14;

/// Generator on all `2^N` occupation patterns (bit `i−1` set means a particle
/// on site `i`): rightward hopping with annihilation at rate `hop`, plus
/// simultaneous occupation flips of neighbouring sites at rate `zz`.
pub fn population_generator(n: usize, boundary: Boundary, hop: f64, zz: f64) -> Result<Array2<f64>> {
    if !(2..=MAX_POPULATION_SITES).contains(&n) {
        return Err(Error::SizeCap { what: "population sector", max: MAX_POPULATION_SITES, got: n });
    }
    let d = 1usize << n;
    let mut m = Array2::zeros((d, d));
    let mut add = |from: usize, to: usize, r: f64| {
        m[(to, from)] += r;
        m[(from, from)] -= r;
    };
    // Neighbour pairs in bit positions; the ring at N = 2 has two bonds on the same pair.
    let mut links: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    if boundary == Boundary::Periodic {
        links.push((n - 1, 0));
    }
    for c in 0..d {
        for &(a, b) in &links {
            if c >> a & 1 == 1 {
                add(c, c ^ (1 << a) ^ (1 << b), hop);
            }
            add(c, c ^ (1 << a) ^ (1 << b), zz);
        }
    }
    Ok(m)
}

/// Normalized steady distribution of [`population_generator`] in the even-parity sector.
pub fn population_steady(n: usize, boundary: Boundary, hop: f64, zz: f64) -> Result<Array1<f64>> {
    let m = population_generator(n, boundary, hop, zz)?;
    let even: Vec<usize> = (0..m.nrows()).filter(|c| c.count_ones() % 2 == 0).collect();
    let k = even.len();
    // Swap one balance equation for the normalization row; the kernel is one-dimensional when this is regular.
    let block = Array2::from_shape_fn((k, k), |(r, c)| if r == 0 { 1.0 } else { m[(even[r], even[c])] });
    let mut rhs = Array1::zeros(k);
    rhs[0] = 1.0;
    let v = block.solve_into(rhs).map_err(|e| Error::Numerical(format!("population steady state: {e}")))?;
    let residual = (0..k)
        .map(|r| (0..k).map(|c| m[(even[r], even[c])] * v[c]).sum::<f64>().abs())
        .fold(0.0, f64::max);
    if !residual.is_finite() || residual > 1e-9 {
        return Err(Error::Numerical(format!("population steady state residual {residual:e}")));
    }
    let mut p = Array1::zeros(m.nrows());
    for (r, &c) in even.iter().enumerate() {
        p[c] = v[r];
    }
    Ok(p)
}

/// Rényi-2 average of the parity string `Π_{i=lo}^{hi}(1 − 2n_i)` in a population state.
pub fn population_string_renyi2(p: &Array1<f64>, lo: usize, hi: usize) -> f64 {
    let mask: usize = (lo..=hi).map(|i| 1usize << (i - 1)).sum();
    let norm: f64 = p.iter().map(|x| x * x).sum();
    p.iter().enumerate().map(|(c, x)| if (c & mask).count_ones() % 2 == 0 { x * x } else { -x * x }).sum::<f64>() / norm
}

/// Rényi-2 average of a joint occupation flip of sites `i` and `j`.
pub fn population_flip_renyi2(p: &Array1<f64>, i: usize, j: usize) -> f64 {
    let f = (1usize << (i - 1)) ^ (1usize << (j - 1));
    let norm: f64 = p.iter().map(|x| x * x).sum();
    p.iter().enumerate().map(|(c, x)| x * p[c ^ f]).sum::<f64>() / norm
}

/// One CSV row of perturbation-theory output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeRow {
    pub n_even: usize,
    pub boundary: String,
    pub pert: String,
    pub n: usize,
    pub m: usize,
    pub derivative: f64,
}
