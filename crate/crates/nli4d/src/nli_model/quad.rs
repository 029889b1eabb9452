use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use std::num::NonZeroUsize;

/// Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn new(order: usize) -> Self {
        let gl = GaussLegendre::new(NonZeroUsize::new(order.max(1)).unwrap());
        let (nodes, weights) = gl.as_node_weight_pairs().iter().copied().unzip();
        Self { nodes, weights }
    }

    /// Append nodes/weights for [a, b] split into `panels` equal panels.
    pub fn push_interval(&self, a: f64, b: f64, panels: usize, out: &mut Vec<(f64, f64)>) {
        if !(b > a) {
            return;
        }
        let panels = panels.max(1);
        let w = (b - a) / panels as f64;
        for i in 0..panels {
            let lo = a + w * i as f64;
            let h = 0.5 * w;
            let m = lo + h;
            for (x, wt) in self.nodes.iter().zip(&self.weights) {
                out.push((m + h * x, h * wt));
            }
        }
    }

    /// Nodes over [a, b] with the given interior breakpoints; panel count of
    /// each piece proportional to its length (`density` panels per unit, at least one).
    pub fn nodes(&self, a: f64, b: f64, breaks: &[f64], density: f64) -> Vec<(f64, f64)> {
        let mut pts: Vec<f64> = breaks.iter().copied().filter(|&t| t > a && t < b).collect();
        pts.push(a);
        pts.push(b);
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|x, y| (*x - *y).abs() < 1e-14);
        let mut out = Vec::new();
        for w in pts.windows(2) {
            let n = ((w[1] - w[0]) * density).ceil() as usize;
            self.push_interval(w[0], w[1], n, &mut out);
        }
        out
    }

    pub fn integrate(&self, a: f64, b: f64, breaks: &[f64], density: f64, f: impl FnMut(f64) -> Complex64) -> Complex64 {
        let mut f = f;
        self.nodes(a, b, breaks, density).into_iter().map(|(x, w)| f(x) * w).sum()
    }
}
