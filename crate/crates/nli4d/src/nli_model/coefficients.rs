//! Modulation coefficients from joint cumulants.
//!
//! The x-polarization NLI field is a trilinear form in (a_p, a_p*, a_x)
//! summed over p in {x, y}. Its variance, expanded over set partitions of
//! the six symbol slots
//!
//! ```text
//! slot:   0     1      2     3      4     5
//!         a_p   a_p*   a_x   a_q*   a_q   a_x*
//! ```
//!
//! groups into eleven kernel classes. Each partition contributes the
//! product of the joint cumulants of its blocks; the class coefficient is
//! the sum over its member partitions and over p, q. Partitions with a
//! singleton block (zero-mean formats), with a block {0,1}, {1,2}, {3,4} or
//! {4,5} (a constant phase rotation, absorbed by the receiver gain) and the
//! split {0,1,2}{3,4,5} (squared mean field) are excluded.

use crate::constellation::{ConstellationError, MomentSet, Pol};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

type Partition = Vec<Vec<usize>>;

/// Class representatives, in chi_bar order.
pub const CLASS_REPS: [&[&[usize]]; 11] = [
    &[&[0, 3], &[1, 4], &[2, 5]],
    &[&[0, 2], &[1, 4], &[3, 5]],
    &[&[0, 3], &[1, 5], &[2, 4]],
    &[&[0, 1, 3], &[2, 4, 5]],
    &[&[0, 1, 4], &[2, 3, 5]],
    &[&[0, 2, 4], &[1, 3, 5]],
    &[&[0, 1, 2, 4], &[3, 5]],
    &[&[0, 1, 3, 4], &[2, 5]],
    &[&[0, 1, 3, 5], &[2, 4]],
    &[&[0, 2, 3, 5], &[1, 4]],
    &[&[0, 1, 2, 3, 4, 5]],
];

/// Classes whose kernel integrals appear together with their conjugates.
pub const PAIRED: [bool; 11] = [false, false, false, false, true, false, true, false, true, false, false];

pub(crate) fn set_partitions(items: &[usize]) -> Vec<Partition> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let (first, rest) = (items[0], &items[1..]);
    let mut out = Vec::new();
    for p in set_partitions(rest) {
        for i in 0..p.len() {
            let mut q = p.clone();
            q[i].insert(0, first);
            out.push(q);
        }
        let mut q = p.clone();
        q.insert(0, vec![first]);
        out.push(q);
    }
    out
}

fn canonical(p: &[Vec<usize>]) -> Partition {
    // kernel symmetric in slots 0<->2 and, independently, 3<->5
    let maps: [[usize; 6]; 4] = [[0, 1, 2, 3, 4, 5], [2, 1, 0, 3, 4, 5], [0, 1, 2, 5, 4, 3], [2, 1, 0, 5, 4, 3]];
    maps.iter()
        .map(|m| {
            let mut q: Partition = p
                .iter()
                .map(|b| {
                    let mut v: Vec<usize> = b.iter().map(|&i| m[i]).collect();
                    v.sort();
                    v
                })
                .collect();
            q.sort();
            q
        })
        .min()
        .unwrap()
}

fn conjugate(p: &[Vec<usize>]) -> Partition {
    p.iter().map(|b| b.iter().map(|&i| (i + 3) % 6).collect()).collect()
}

fn excluded(p: &[Vec<usize>]) -> bool {
    p.iter().any(|b| {
        let mut s = b.clone();
        s.sort();
        s.len() == 1 || matches!(s.as_slice(), [0, 1] | [1, 2] | [3, 4] | [4, 5])
    }) || p.iter().any(|b| b.len() == 3 && (b.iter().all(|&i| i < 3) || b.iter().all(|&i| i >= 3)))
}

/// Member partitions of each class, tagged with whether their integral is
/// the conjugate of the representative's.
pub fn class_members() -> &'static [Vec<(Partition, bool)>; 11] {
    static CELL: OnceLock<[Vec<(Partition, bool)>; 11]> = OnceLock::new();
    CELL.get_or_init(|| {
        let reps: Vec<Partition> =
            CLASS_REPS.iter().map(|r| canonical(&r.iter().map(|b| b.to_vec()).collect::<Vec<_>>())).collect();
        let mut out: [Vec<(Partition, bool)>; 11] = Default::default();
        for p in set_partitions(&[0, 1, 2, 3, 4, 5]) {
            if excluded(&p) {
                continue;
            }
            let c = canonical(&p);
            let cc = canonical(&conjugate(&p));
            let hit = reps.iter().position(|r| *r == c).map(|k| (k, false));
            let hit = hit.or_else(|| reps.iter().position(|r| *r == cc).map(|k| (k, true)));
            let (k, conj) = hit.expect("partition outside the eleven classes");
            out[k].push((p, conj));
        }
        out
    })
}

/// One symbol variable: polarization and conjugation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Var {
    pub pol: Pol,
    pub conj: bool,
}

fn moment_of(m: &MomentSet, vars: &[Var]) -> Result<Complex64, ConstellationError> {
    let mut s = [0u8; 4];
    for v in vars {
        let k = match (v.pol, v.conj) {
            (Pol::X, false) => 0,
            (Pol::X, true) => 1,
            (Pol::Y, false) => 2,
            (Pol::Y, true) => 3,
        };
        s[k] += 1;
    }
    m.get(s[0], s[1], s[2], s[3])
}

/// Joint cumulant of the listed variables.
pub(crate) fn cumulant(m: &MomentSet, vars: &[Var]) -> Result<Complex64, ConstellationError> {
    let idx: Vec<usize> = (0..vars.len()).collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for p in set_partitions(&idx) {
        let k = p.len();
        let coef = (1..k).map(|i| i as f64).product::<f64>() * if k % 2 == 0 { -1.0 } else { 1.0 };
        let mut t = Complex64::new(coef, 0.0);
        for b in &p {
            let sub: Vec<Var> = b.iter().map(|&i| vars[i]).collect();
            t *= moment_of(m, &sub)?;
        }
        acc += t;
    }
    Ok(acc)
}

fn slot_vars(p: Pol, q: Pol, target: Pol) -> [Var; 6] {
    [
        Var { pol: p, conj: false },
        Var { pol: p, conj: true },
        Var { pol: target, conj: false },
        Var { pol: q, conj: true },
        Var { pol: q, conj: false },
        Var { pol: target, conj: true },
    ]
}

/// Phi_1..3, Psi_1..4, Lambda_1..6, Xi_1 for one polarization, plus the
/// data-aided pair Omega_0, Omega_1 and that polarization's power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulationCoefficients {
    pub target: Pol,
    pub phi: [Complex64; 3],
    pub psi: [Complex64; 4],
    pub lambda: [Complex64; 6],
    pub xi: Complex64,
    pub omega: [Complex64; 2],
    pub power: f64,
    /// Per class: summed weight of members using chi_bar and of members using conj(chi_bar).
    pub class_weights: [(Complex64, Complex64); 11],
}

impl ModulationCoefficients {
    /// All 14 coefficients in the order Phi, Psi, Lambda, Xi.
    pub fn as_array(&self) -> [Complex64; 14] {
        let mut a = [Complex64::new(0.0, 0.0); 14];
        a[..3].copy_from_slice(&self.phi);
        a[3..7].copy_from_slice(&self.psi);
        a[7..13].copy_from_slice(&self.lambda);
        a[13] = self.xi;
        a
    }
}

/// Coefficients for the x polarization from a normalized format's moments.
/// For y, pass `m.swapped()` or use [`compute_modulation_coefficients_for`].
pub fn compute_modulation_coefficients(m: &MomentSet) -> Result<ModulationCoefficients, ConstellationError> {
    compute_modulation_coefficients_for(m, Pol::X)
}

pub fn compute_modulation_coefficients_for(m: &MomentSet, target: Pol) -> Result<ModulationCoefficients, ConstellationError> {
    let z = Complex64::new(0.0, 0.0);
    let mut cw = [(z, z); 11];
    // target first, so that the swapped format repeats the same arithmetic
    let pols = [target, target.other()];
    let mut cache: std::collections::HashMap<Vec<(u8, bool)>, Complex64> = Default::default();
    for (k, members) in class_members().iter().enumerate() {
        for (part, conj) in members {
            let mut w = z;
            for &p in &pols {
                for &q in &pols {
                    let vars = slot_vars(p, q, target);
                    let mut t = Complex64::new(1.0, 0.0);
                    for b in part {
                        let sub: Vec<Var> = b.iter().map(|&i| vars[i]).collect();
                        let key: Vec<(u8, bool)> = sub.iter().map(|v| (v.pol as u8, v.conj)).collect();
                        let c = match cache.get(&key) {
                            Some(c) => *c,
                            None => {
                                let c = cumulant(m, &sub)?;
                                cache.insert(key, c);
                                c
                            }
                        };
                        t *= c;
                    }
                    w += t;
                }
            }
            if *conj {
                cw[k].1 += w;
            } else {
                cw[k].0 += w;
            }
        }
    }
    let single = |k: usize| cw[k].0 + cw[k].1;
    let half = |c: Complex64| c * 0.5;
    let t = Var { pol: target, conj: false };
    let tc = Var { pol: target, conj: true };
    let mut omega = [z; 2];
    for &p in &pols {
        let a = Var { pol: p, conj: false };
        let ac = Var { pol: p, conj: true };
        omega[0] += cumulant(m, &[a, ac, t, tc])?;
        omega[1] += cumulant(m, &[a, t])? * cumulant(m, &[ac, tc])?;
    }
    let power = moment_of(m, &[t, tc])?.re;
    Ok(ModulationCoefficients {
        target,
        phi: [single(0), single(1), single(2)],
        psi: [single(3), half(cw[4].0), half(cw[4].1), single(5)],
        lambda: [half(cw[6].0), half(cw[6].1), single(7), half(cw[8].0), half(cw[8].1), single(9)],
        xi: single(10),
        omega,
        power,
        class_weights: cw,
    })
}
