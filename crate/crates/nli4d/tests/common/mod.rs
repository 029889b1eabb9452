//! Shared test oracles.
#![allow(dead_code)]

use nli4d::nli_model::*;
use num_complex::Complex64;

/// Lattice oracle. Frequencies sit on the midpoint lattice of the
/// normalized band, f = (k + 1/2)/n - 1/2 with n odd, i.e. integer
/// multiples of 1/n including 0, so every block constraint has lattice
/// solutions and mu is evaluated directly at the integer pump product.
/// A partition of the six slots
///   0: a(k1)  1: a*(k3)  2: a(k2)  3: a*(k1')  4: a(k3')  5: a*(k2')
/// constrains every block's signed frequency sum to an integer; the class
/// integral is the lattice sum of mu(k1,k2,k) conj(mu(k1',k2',k)) over the
/// solutions, times n^-(6 - blocks).
pub struct Lattice {
    pub n: usize,
    mu: Vec<Complex64>,
}

const SIGN: [i64; 6] = [1, -1, 1, -1, 1, -1];

impl Lattice {
    pub fn new(link: &LinkSpec, n: usize) -> Self {
        let k = NormalizedKernel::new(link);
        let m = (n - 1) * (n - 1);
        let n2 = (n * n) as f64;
        let mu = (0..=2 * m).map(|i| k.eval((i as f64 - m as f64) / n2)).collect();
        Self { n, mu }
    }

    fn mu(&self, u: i64, v: i64) -> Complex64 {
        let m = ((self.n - 1) * (self.n - 1)) as i64;
        self.mu[(u * v + m) as usize]
    }

    /// Doubled frequency 2 n f = 2k + 1 - n.
    fn g(&self, k: i64) -> i64 {
        2 * k + 1 - self.n as i64
    }

    /// Kernel sums of one triple for observed frequency k, bucketed by the
    /// signed sums (mod 2n) its slots contribute to the coupling blocks (all
    /// but the last block, whose constraint is implied).
    fn buckets(&self, k: i64, blocks: &[Vec<usize>], second: bool, out: &mut [Complex64]) {
        let n = self.n as i64;
        let two_n = 2 * n;
        out.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        let base = if second { 3 } else { 0 };
        let coupling = &blocks[..blocks.len() - 1];
        for k1 in 0..n {
            for k2 in 0..n {
                let k3 = k1 + k2 - k;
                if !(0..n).contains(&k3) {
                    continue;
                }
                let fr = [k1, k3, k2];
                let mut idx = 0usize;
                for b in coupling {
                    let s: i64 = b
                        .iter()
                        .filter(|&&slot| (base..base + 3).contains(&slot))
                        .map(|&slot| SIGN[slot] * self.g(fr[slot - base]))
                        .sum();
                    idx = idx * two_n as usize + s.rem_euclid(two_n) as usize;
                }
                out[idx] += self.mu(k1 - k, k2 - k);
            }
        }
    }

    pub fn class_integral(&self, blocks: &[Vec<usize>]) -> Complex64 {
        let two_n = 2 * self.n;
        let r = blocks.len() - 1;
        let size = two_n.pow(r as u32);
        let mut a = vec![Complex64::new(0.0, 0.0); size];
        let mut b = vec![Complex64::new(0.0, 0.0); size];
        let neg = |d: usize| (two_n - d) % two_n;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..self.n as i64 {
            self.buckets(k, blocks, false, &mut a);
            self.buckets(k, blocks, true, &mut b);
            for (i, av) in a.iter().enumerate() {
                if av.re == 0.0 && av.im == 0.0 {
                    continue;
                }
                // the second triple must cancel every coupling sum
                let j = match r {
                    0 => 0,
                    1 => neg(i),
                    _ => neg(i / two_n) * two_n + neg(i % two_n),
                };
                acc += av * b[j].conj();
            }
        }
        acc / (self.n as f64).powi(6 - blocks.len() as i32)
    }

    /// zeta_0: every first-triple term; zeta_1: pumps with f1 + f2 = 0.
    pub fn zetas(&self) -> [Complex64; 2] {
        let n = self.n as i64;
        let mut z = [Complex64::new(0.0, 0.0); 2];
        for k in 0..n {
            for k1 in 0..n {
                for k2 in 0..n {
                    let k3 = k1 + k2 - k;
                    if !(0..n).contains(&k3) {
                        continue;
                    }
                    let m = self.mu(k1 - k, k2 - k);
                    z[0] += m;
                    if (self.g(k1) + self.g(k2)).rem_euclid(2 * n) == 0 {
                        z[1] += m;
                    }
                }
            }
        }
        let nf = self.n as f64;
        [z[0] / nf.powi(3), z[1] / nf.powi(2)]
    }
}

pub fn rep_blocks(i: usize) -> Vec<Vec<usize>> {
    CLASS_REPS[i].iter().map(|b| b.to_vec()).collect()
}
