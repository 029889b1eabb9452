use super::link::LinkSpec;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Single-span FWM efficiency times the phased-array factor, as a function
/// of the total phase mismatch per span `theta = dbeta * L` [rad].
/// Units: metres.
pub fn kernel_of_theta(alpha: f64, span_len: f64, spans: u32, theta: f64) -> Complex64 {
    // single span: int_0^L exp((-alpha + j dbeta) z) dz = L (1 - e^{-z}) / z, z = alpha L - j theta
    let z = Complex64::new(alpha * span_len, -theta);
    let single = if z.norm() < 1e-4 {
        span_len * (Complex64::new(1.0, 0.0) - z / 2.0 + z * z / 6.0 - z * z * z / 24.0)
    } else {
        span_len * (Complex64::new(1.0, 0.0) - (-z).exp()) / z
    };
    let mut array = Complex64::new(0.0, 0.0);
    for n in 0..spans {
        array += Complex64::from_polar(1.0, n as f64 * theta);
    }
    single * array
}

/// Kernel at physical frequencies f1, f2 (pumps) and f (observed), in Hz.
pub fn link_kernel(f1: f64, f2: f64, f: f64, link: &LinkSpec) -> Complex64 {
    let dbeta = 4.0 * PI * PI * link.beta2() * (f1 - f) * (f2 - f);
    kernel_of_theta(link.alpha(), link.span_length(), link.span_count, dbeta * link.span_length())
}

/// Kernel as a function of the normalized product p = (x1 - x)(x2 - x), x = f / Rs.
#[derive(Debug, Clone, Copy)]
pub struct NormalizedKernel {
    pub alpha: f64,
    pub span_len: f64,
    pub spans: u32,
    pub kappa: f64,
}

impl NormalizedKernel {
    pub fn new(link: &LinkSpec) -> Self {
        Self { alpha: link.alpha(), span_len: link.span_length(), spans: link.span_count, kappa: link.kappa() }
    }

    pub fn eval(&self, p: f64) -> Complex64 {
        kernel_of_theta(self.alpha, self.span_len, self.spans, self.kappa * p)
    }
}

/// Uniform table of mu(p) and of its running integral M(p) = int_0^p mu
/// on [-pmax, pmax]; cubic Hermite interpolation of M using mu as slope.
#[derive(Debug, Clone)]
pub struct KernelTable {
    pub kernel: NormalizedKernel,
    pmax: f64,
    dp: f64,
    mu: Vec<Complex64>,
    cum: Vec<Complex64>,
}

impl KernelTable {
    pub fn new(kernel: NormalizedKernel, pmax: f64, intervals: usize) -> Self {
        let n = intervals.max(2);
        let dp = 2.0 * pmax / n as f64;
        let mu: Vec<Complex64> = (0..=n).map(|i| kernel.eval(-pmax + dp * i as f64)).collect();
        // Simpson on each interval with a midpoint sample
        let mut cum = vec![Complex64::new(0.0, 0.0); n + 1];
        for i in 0..n {
            let mid = kernel.eval(-pmax + dp * (i as f64 + 0.5));
            cum[i + 1] = cum[i] + (mu[i] + 4.0 * mid + mu[i + 1]) * (dp / 6.0);
        }
        let mut t = Self { kernel, pmax, dp, mu, cum };
        let c0 = t.cumulative(0.0);
        t.cum.iter_mut().for_each(|c| *c -= c0);
        t
    }

    pub fn pmax(&self) -> f64 {
        self.pmax
    }

    #[inline]
    fn locate(&self, p: f64) -> (usize, f64) {
        let s = ((p + self.pmax) / self.dp).clamp(0.0, (self.mu.len() - 1) as f64 - 1e-9);
        let i = s.floor() as usize;
        (i.min(self.mu.len() - 2), s - i as f64)
    }

    /// Linear interpolation of mu.
    #[inline]
    pub fn mu(&self, p: f64) -> Complex64 {
        debug_assert!(p.abs() <= self.pmax * (1.0 + 1e-12), "p={p} outside table");
        let (i, t) = self.locate(p);
        self.mu[i] * (1.0 - t) + self.mu[i + 1] * t
    }

    /// M(p) = int_0^p mu.
    #[inline]
    pub fn cumulative(&self, p: f64) -> Complex64 {
        let (i, t) = self.locate(p);
        let (y0, y1) = (self.cum[i], self.cum[i + 1]);
        let (d0, d1) = (self.mu[i] * self.dp, self.mu[i + 1] * self.dp);
        let t2 = t * t;
        let t3 = t2 * t;
        y0 * (2.0 * t3 - 3.0 * t2 + 1.0) + d0 * (t3 - 2.0 * t2 + t) + y1 * (-2.0 * t3 + 3.0 * t2) + d1 * (t3 - t2)
    }

    /// int_{p0}^{p1} mu(p) dp.
    #[inline]
    pub fn segment(&self, p0: f64, p1: f64) -> Complex64 {
        self.cumulative(p1) - self.cumulative(p0)
    }
}
