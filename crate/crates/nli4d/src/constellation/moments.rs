use super::{Constellation2D, Constellation4D, ConstellationError, NORM_TOL};
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Highest total order a+b+c+d stored in a [`MomentSet`].
pub const MAX_ORDER: u8 = 6;

/// Compensated (Neumaier) summation of complex terms.
#[derive(Default, Clone, Copy)]
pub(crate) struct Neumaier {
    s: Complex64,
    c: Complex64,
}

impl Neumaier {
    fn step(s: f64, c: &mut f64, v: f64) -> f64 {
        let t = s + v;
        if s.abs() >= v.abs() {
            *c += (s - t) + v;
        } else {
            *c += (v - t) + s;
        }
        t
    }

    pub(crate) fn add(&mut self, v: Complex64) {
        self.s.re = Self::step(self.s.re, &mut self.c.re, v.re);
        self.s.im = Self::step(self.s.im, &mut self.c.im, v.im);
    }

    pub(crate) fn sum(&self) -> Complex64 {
        self.s + self.c
    }
}

/// Joint moments E[s_x^a conj(s_x)^b s_y^c conj(s_y)^d] for a+b+c+d <= 6.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSet {
    map: BTreeMap<[u8; 4], Complex64>,
}

fn signatures() -> impl Iterator<Item = [u8; 4]> {
    let n = MAX_ORDER;
    (0..=n).flat_map(move |a| {
        (0..=n - a).flat_map(move |b| {
            (0..=n - a - b).flat_map(move |c| (0..=n - a - b - c).map(move |d| [a, b, c, d]))
        })
    })
}

impl MomentSet {
    /// Build from an analytic moment function.
    pub fn from_fn(f: impl Fn(u8, u8, u8, u8) -> Complex64) -> Self {
        Self { map: signatures().map(|s| (s, f(s[0], s[1], s[2], s[3]))).collect() }
    }

    /// Moments of a pair of independent polarizations with the given marginals.
    pub fn product(mx: impl Fn(u8, u8) -> Complex64, my: impl Fn(u8, u8) -> Complex64) -> Self {
        Self::from_fn(|a, b, c, d| mx(a, b) * my(c, d))
    }

    /// Moments of two independent circular complex Gaussians with powers px, py.
    pub fn gaussian(px: f64, py: f64) -> Self {
        fn g(p: f64) -> impl Fn(u8, u8) -> Complex64 {
            move |a, b| {
                if a != b {
                    Complex64::new(0.0, 0.0)
                } else {
                    let k = a as u32;
                    let fact: f64 = (1..=k).map(|i| i as f64).product();
                    Complex64::new(fact * p.powi(k as i32), 0.0)
                }
            }
        }
        Self::product(g(px), g(py))
    }

    pub fn get(&self, a: u8, b: u8, c: u8, d: u8) -> Result<Complex64, ConstellationError> {
        self.map.get(&[a, b, c, d]).copied().ok_or_else(|| {
            ConstellationError::Argument(format!("moment signature ({a},{b},{c},{d}) not available"))
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u8; 4], &Complex64)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// E[|s_x|^(2k)], k <= 3.
    pub fn abs_x(&self, k: u8) -> f64 {
        self.map[&[k, k, 0, 0]].re
    }

    /// E[|s_y|^(2k)], k <= 3.
    pub fn abs_y(&self, k: u8) -> f64 {
        self.map[&[0, 0, k, k]].re
    }

    pub fn power_x(&self) -> f64 {
        self.abs_x(1)
    }

    pub fn power_y(&self) -> f64 {
        self.abs_y(1)
    }

    /// E[|s_x|^2 |s_y|^2].
    pub fn cross_power(&self) -> f64 {
        self.map[&[1, 1, 1, 1]].re
    }

    /// Signatures remapped (a,b,c,d) -> (c,d,a,b): moments of the swapped format.
    pub fn swapped(&self) -> Self {
        Self { map: self.map.iter().map(|(s, v)| ([s[2], s[3], s[0], s[1]], *v)).collect() }
    }

    /// Moments of the product of this set's x and y marginals.
    pub fn marginal_product(&self) -> Self {
        Self::product(|a, b| self.map[&[a, b, 0, 0]], |c, d| self.map[&[0, 0, c, d]])
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.map
            .iter()
            .map(|(s, v)| (v - other.map.get(s).copied().unwrap_or(Complex64::new(f64::NAN, 0.0))).norm())
            .fold(0.0, f64::max)
    }
}

/// Exact moments over the equiprobable points, summed in stored order.
pub fn compute_moments(c: &Constellation4D) -> Result<MomentSet, ConstellationError> {
    let e = c.mean_energy();
    if (e - 1.0).abs() > NORM_TOL {
        return Err(ConstellationError::NotNormalized(e));
    }
    let pts = c.complex_points();
    let n = pts.len() as f64;
    // powers[i][k] = (z^k, conj(z)^k) for both pols
    let pw: Vec<[[Complex64; 7]; 4]> = pts
        .iter()
        .map(|&(x, y)| {
            let mut t = [[Complex64::new(1.0, 0.0); 7]; 4];
            for (j, z) in [x, x.conj(), y, y.conj()].into_iter().enumerate() {
                for k in 1..7 {
                    t[j][k] = t[j][k - 1] * z;
                }
            }
            t
        })
        .collect();
    let map = signatures()
        .map(|s| {
            let mut acc = Neumaier::default();
            for t in &pw {
                let xs = t[0][s[0] as usize] * t[1][s[1] as usize];
                let ys = t[2][s[2] as usize] * t[3][s[3] as usize];
                acc.add(xs * ys);
            }
            (s, acc.sum() / n)
        })
        .collect();
    Ok(MomentSet { map })
}

impl Constellation2D {
    /// Moment function of this marginal, usable with [`MomentSet::product`].
    pub fn moment_fn(&self) -> impl Fn(u8, u8) -> Complex64 + '_ {
        move |a, b| self.moment(a as u32, b as u32)
    }
}
