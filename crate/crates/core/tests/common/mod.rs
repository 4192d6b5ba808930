//! Naive statevector simulator used as an independent oracle.
#![allow(dead_code)]

use mspt_core::{Gate, Pauli1, PauliOperator};
use num_complex::Complex64 as C;
use rand::Rng;

/// Qubit `q` (0-based) is bit `q` of the basis index.
#[derive(Clone, Debug)]
pub struct StateVector {
    pub n: usize,
    pub amp: Vec<C>,
}

fn letter_matrix(p: Pauli1) -> [[C; 2]; 2] {
    let (o, l, i) = (C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 1.0));
    match p {
        Pauli1::I => [[l, o], [o, l]],
        Pauli1::X => [[o, l], [l, o]],
        Pauli1::Y => [[o, -i], [i, o]],
        Pauli1::Z => [[l, o], [o, -l]],
    }
}

impl StateVector {
    pub fn zero(n: usize) -> Self {
        let mut amp = vec![C::new(0.0, 0.0); 1 << n];
        amp[0] = C::new(1.0, 0.0);
        StateVector { n, amp }
    }

    fn apply_1q(&mut self, q: usize, m: [[C; 2]; 2]) {
        let bit = 1 << q;
        for b in 0..self.amp.len() {
            if b & bit == 0 {
                let (a0, a1) = (self.amp[b], self.amp[b | bit]);
                self.amp[b] = m[0][0] * a0 + m[0][1] * a1;
                self.amp[b | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn cz(&mut self, a: usize, b: usize) {
        let mask = (1 << a) | (1 << b);
        for (k, x) in self.amp.iter_mut().enumerate() {
            if k & mask == mask {
                *x = -*x;
            }
        }
    }

    pub fn apply(&mut self, g: Gate) {
        let (o, l, i) = (C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 1.0));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match g {
            Gate::X(q) => self.apply_1q(q, letter_matrix(Pauli1::X)),
            Gate::Y(q) => self.apply_1q(q, letter_matrix(Pauli1::Y)),
            Gate::Z(q) => self.apply_1q(q, letter_matrix(Pauli1::Z)),
            Gate::H(q) => self.apply_1q(q, [[C::new(h, 0.0), C::new(h, 0.0)], [C::new(h, 0.0), C::new(-h, 0.0)]]),
            Gate::S(q) => self.apply_1q(q, [[l, o], [o, i]]),
            Gate::Cz(a, b) => self.cz(a, b),
            Gate::UCz => {
                if self.n >= 2 {
                    for q in 0..self.n {
                        self.cz(q, (q + 1) % self.n);
                    }
                }
            }
        }
    }

    /// `P|ψ⟩` built letter by letter from the printed coefficient and letters.
    pub fn pauli(&self, p: &PauliOperator) -> StateVector {
        let mut out = self.clone();
        for q in 0..self.n {
            let letter = p.get(q + 1);
            if letter != Pauli1::I {
                out.apply_1q(q, letter_matrix(letter));
            }
        }
        let coeff = C::new(0.0, 1.0).powu(p.coefficient_exp() as u32);
        out.amp.iter_mut().for_each(|a| *a *= coeff);
        out
    }

    pub fn inner(&self, other: &StateVector) -> C {
        self.amp.iter().zip(&other.amp).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn expectation(&self, p: &PauliOperator) -> C {
        self.inner(&self.pauli(p))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `(1 + sP)/2 |ψ⟩`, renormalized.
    pub fn project(&self, p: &PauliOperator, s: i8) -> StateVector {
        let pp = self.pauli(p);
        let mut out = self.clone();
        for (a, b) in out.amp.iter_mut().zip(&pp.amp) {
            *a = (*a + *b * s as f64) * 0.5;
        }
        let norm = out.norm_sqr().sqrt();
        out.amp.iter_mut().for_each(|a| *a /= norm);
        out
    }
}

pub fn random_gate<R: Rng>(n: usize, rng: &mut R) -> Gate {
    let q = rng.gen_range(0..n);
    match rng.gen_range(0..6) {
        0 => Gate::X(q),
        1 => Gate::Y(q),
        2 => Gate::Z(q),
        3 | 4 if n > 1 => {
            let b = (q + rng.gen_range(1..n)) % n;
            Gate::Cz(q, b)
        }
        3 => Gate::H(q),
        4 => Gate::S(q),
        _ => {
            if rng.gen_bool(0.5) {
                Gate::H(q)
            } else {
                Gate::S(q)
            }
        }
    }
}

pub fn random_hermitian_pauli<R: Rng>(n: usize, rng: &mut R) -> PauliOperator {
    let letters = [Pauli1::I, Pauli1::X, Pauli1::Y, Pauli1::Z];
    let sites: Vec<(usize, Pauli1)> = (1..=n).map(|s| (s, letters[rng.gen_range(0..4)])).collect();
    let p = PauliOperator::from_sites(n, &sites).unwrap();
    if rng.gen_bool(0.5) {
        p.negated()
    } else {
        p
    }
}
