use super::{normalize_energy, Constellation4D, ConstellationError};
use num_complex::Complex64;
use std::f64::consts::PI;

fn square_qam(m: usize) -> Result<Vec<Complex64>, ConstellationError> {
    let side = (m as f64).sqrt().round() as usize;
    if side * side != m || side < 2 || side % 2 != 0 {
        return Err(ConstellationError::Argument(format!("{m}-QAM is not a square even-side QAM")));
    }
    let lv: Vec<f64> = (0..side).map(|i| (2 * i) as f64 - (side - 1) as f64).collect();
    Ok(lv.iter().flat_map(|&re| lv.iter().map(move |&im| Complex64::new(re, im))).collect())
}

/// PM-QAM: Cartesian product of a square QAM with itself, unit 4D energy.
pub fn generate_pm_qam(m_per_pol: usize) -> Result<Constellation4D, ConstellationError> {
    let q = square_qam(m_per_pol)?;
    let name = if m_per_pol == 4 { "PM-QPSK".to_string() } else { format!("PM-{m_per_pol}QAM") };
    let pairs: Vec<_> = q.iter().flat_map(|&x| q.iter().map(move |&y| (x, y))).collect();
    normalize_energy(&Constellation4D::from_complex_pairs(name, &pairs)?)
}

/// PM-BPSK: real binary symbols in both polarizations (improper marginals).
pub fn generate_pm_bpsk() -> Constellation4D {
    let b = [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)];
    let pairs: Vec<_> = b.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).collect();
    normalize_energy(&Constellation4D::from_complex_pairs("PM-BPSK", &pairs).unwrap()).unwrap()
}

/// Four points (s, s^2) with s in QPSK; non-zero third-order cross moments.
pub fn generate_squared_phase() -> Constellation4D {
    let pairs: Vec<_> = (0..4)
        .map(|k| {
            let s = Complex64::from_polar(1.0, PI / 2.0 * k as f64);
            (s, s * s)
        })
        .collect();
    normalize_energy(&Constellation4D::from_complex_pairs("QPSK-squared", &pairs).unwrap()).unwrap()
}

/// 4D-2A8PSK family: each polarization carries 8-PSK on one of two rings,
/// the two polarizations always on different rings. Ring pattern (1, r)
/// uses phases k*pi/4; pattern (r, 1) uses phases k*pi/4 + pi/8.
/// 7 bits: all 128 points; 6 bits: phase indices with even sum;
/// 5 bits: phase-index sum divisible by 4.
pub fn generate_2a8psk(bits: u32, ring_ratio: f64) -> Result<Constellation4D, ConstellationError> {
    if !(ring_ratio > 0.0 && ring_ratio <= 1.0) {
        return Err(ConstellationError::Argument(format!("ring ratio {ring_ratio} outside (0, 1]")));
    }
    let modulus = match bits {
        7 => 1,
        6 => 2,
        5 => 4,
        _ => return Err(ConstellationError::Argument(format!("2A8PSK variant {bits}b not in 5..=7"))),
    };
    let mut pairs = Vec::with_capacity(1 << bits);
    for pattern in 0..2 {
        let (ra, rb) = if pattern == 0 { (1.0, ring_ratio) } else { (ring_ratio, 1.0) };
        let off = pattern as f64 * PI / 8.0;
        for i1 in 0..8 {
            for i2 in 0..8 {
                if (i1 + i2) % modulus != 0 {
                    continue;
                }
                pairs.push((
                    Complex64::from_polar(ra, PI / 4.0 * i1 as f64 + off),
                    Complex64::from_polar(rb, PI / 4.0 * i2 as f64 + off),
                ));
            }
        }
    }
    normalize_energy(&Constellation4D::from_complex_pairs(format!("4D-2A8PSK-{bits}b"), &pairs)?)
}

fn even_permutation(p: &[usize; 4]) -> bool {
    let mut inv = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    inv % 2 == 0
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut seen = [false; 4];
                    p.iter().for_each(|&i| seen[i] = true);
                    if seen.iter().all(|&s| s) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// The 600 vertices of the regular 120-cell (radius sqrt(8)), unit 4D energy.
pub fn generate_120cell() -> Constellation4D {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let s5 = 5f64.sqrt();
    let all_perms: [[f64; 4]; 4] = [
        [0.0, 0.0, 2.0, 2.0],
        [1.0, 1.0, 1.0, s5],
        [phi.powi(-2), phi, phi, phi],
        [1.0 / phi, 1.0 / phi, 1.0 / phi, phi * phi],
    ];
    let even_perms: [[f64; 4]; 3] = [
        [0.0, phi.powi(-2), 1.0, phi * phi],
        [0.0, 1.0 / phi, phi, s5],
        [1.0 / phi, 1.0, phi, 2.0],
    ];
    let perms = permutations4();
    let mut pts: Vec<[f64; 4]> = Vec::new();
    let mut push = |base: &[f64; 4], p: &[usize; 4]| {
        for signs in 0..16u32 {
            let mut v = [0.0; 4];
            let mut ok = true;
            for k in 0..4 {
                let val = base[p[k]];
                let neg = signs >> k & 1 == 1;
                if neg && val == 0.0 {
                    ok = false;
                }
                v[k] = if neg { -val } else { val };
            }
            if ok && !pts.contains(&v) {
                pts.push(v);
            }
        }
    };
    for base in &all_perms {
        for p in &perms {
            push(base, p);
        }
    }
    for base in &even_perms {
        for p in perms.iter().filter(|p| even_permutation(p)) {
            push(base, p);
        }
    }
    pts.sort_by(|a, b| a.iter().zip(b).map(|(u, v)| u.total_cmp(v)).find(|o| o.is_ne()).unwrap());
    normalize_energy(&Constellation4D::new("120cell4_600", pts).unwrap()).unwrap()
}

/// Binary dihedral (dicyclic) group of order 4n as unit quaternions
/// q = a + b i + c j + d k, stored as the 4-tuple (a, b, c, d):
/// e^{i pi k / n} and j e^{i pi k / n}, k = 0..2n.
pub fn generate_dicyclic(order: usize) -> Result<Constellation4D, ConstellationError> {
    if order < 8 || order % 4 != 0 {
        return Err(ConstellationError::Argument(format!("dicyclic group order {order} must be a multiple of 4, >= 8")));
    }
    let n = order / 4;
    let mut pts = Vec::with_capacity(order);
    for k in 0..2 * n {
        let t = PI * k as f64 / n as f64;
        pts.push([t.cos(), t.sin(), 0.0, 0.0]);
    }
    for k in 0..2 * n {
        let t = PI * k as f64 / n as f64;
        // j (cos t + i sin t) = cos t j - sin t k
        pts.push([0.0, 0.0, t.cos(), -t.sin()]);
    }
    // clean -0.0 and round-off so that exact symmetries hold in the stored file
    for p in pts.iter_mut() {
        for v in p.iter_mut() {
            if v.abs() < 1e-15 {
                *v = 0.0;
            }
        }
    }
    Constellation4D::new(format!("dicyclic4_{order}"), pts)
}
