//! Single-channel dual-polarization Manakov split-step simulation with
//! nonlinearity as the only impairment, and the data-aided SNR -> eta
//! estimator built on top of it.
//!
//! The time grid is periodic (N symbols x sps samples). Symbols are drawn
//! i.i.d. uniform from the constellation with a ChaCha20 counter-based
//! generator, shaped by a root-raised-cosine filter in the frequency domain,
//! propagated span by span, then dispersion-compensated, matched-filtered
//! and sampled.

use crate::constellation::{Constellation4D, Pol};
use crate::nli_model::{EtaEstimate, LinkSpec, Method};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

/// Name of the pseudo-random generator used for symbol draws.
pub const RNG_NAME: &str = "ChaCha20Rng";

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    Config(String),
    #[error("non-finite sample in span {span} after {steps} steps")]
    NonFinite { span: u32, steps: usize },
    #[error("{0:?} polarization received error-free; eta undefined")]
    Undefined(Pol),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub link: LinkSpec,
    pub num_symbols: usize,
    pub samples_per_symbol: usize,
    /// Maximum nonlinear phase rotation per step [rad].
    pub phi_nl_max: f64,
    /// Step cap [km].
    pub max_step_km: f64,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(link: LinkSpec) -> Self {
        Self { link, num_symbols: 1 << 17, samples_per_symbol: 3, phi_nl_max: 1e-3, max_step_km: 1.0, seed: 1 }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.link.validate().map_err(|e| SimError::Config(e.to_string()))?;
        if self.num_symbols < 1 << 14 || !self.num_symbols.is_power_of_two() {
            return Err(SimError::Config(format!("num_symbols {} must be a power of two >= 2^14", self.num_symbols)));
        }
        if self.samples_per_symbol < 1 {
            return Err(SimError::Config("samples_per_symbol must be >= 1".into()));
        }
        if self.samples_per_symbol as f64 <= 1.0 + self.link.rolloff {
            return Err(SimError::Config(format!(
                "RRC band {:.3} Rs does not fit the {} Rs grid",
                1.0 + self.link.rolloff,
                self.samples_per_symbol
            )));
        }
        if !(self.phi_nl_max > 0.0) || !(self.max_step_km > 0.0) {
            return Err(SimError::Config("phi_nl_max and max_step_km must be positive".into()));
        }
        Ok(())
    }

    pub fn num_samples(&self) -> usize {
        self.num_symbols * self.samples_per_symbol
    }

    pub fn sample_rate(&self) -> f64 {
        self.link.symbol_rate * self.samples_per_symbol as f64
    }

    /// Digest of the simulation settings; the link has its own digest.
    pub fn digest(&self) -> String {
        let s = serde_json::to_string(&(
            self.num_symbols,
            self.samples_per_symbol,
            self.phi_nl_max,
            self.max_step_km,
            self.seed,
            RNG_NAME,
        ))
        .expect("serializable");
        hex::encode(&Sha256::digest(s.as_bytes())[..12])
    }
}

/// Periodic two-polarization waveform.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalGrid {
    pub x: Vec<Complex64>,
    pub y: Vec<Complex64>,
    pub sample_rate: f64,
}

impl SignalGrid {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn mean_power(&self) -> f64 {
        let s: f64 = self.x.iter().chain(self.y.iter()).map(|v| v.norm_sqr()).sum();
        s / self.len() as f64
    }

    pub fn energy(&self) -> f64 {
        self.x.iter().chain(self.y.iter()).map(|v| v.norm_sqr()).sum()
    }

    fn check(&self) -> Result<(), SimError> {
        if self.x.len() != self.y.len() {
            return Err(SimError::Shape(format!("x has {} samples, y has {}", self.x.len(), self.y.len())));
        }
        Ok(())
    }

    /// Raw dump: little-endian f64, per sample (re x, im x, re y, im y),
    /// plus a `<path>.txt` sidecar describing the layout.
    pub fn dump(&self, path: &Path) -> Result<(), SimError> {
        let io = |e| SimError::Io { path: path.display().to_string(), source: e };
        let mut f = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
        for (a, b) in self.x.iter().zip(&self.y) {
            for v in [a.re, a.im, b.re, b.im] {
                f.write_all(&v.to_le_bytes()).map_err(io)?;
            }
        }
        f.flush().map_err(io)?;
        let side = path.with_extension("txt");
        let txt = format!(
            "samples = {}\nsample_rate_hz = {:e}\nlayout = f64le re_x im_x re_y im_y\nunits = sqrt(W)\n",
            self.len(),
            self.sample_rate
        );
        std::fs::write(&side, txt).map_err(|e| SimError::Io { path: side.display().to_string(), source: e })
    }
}

/// Transmitted symbols in sqrt(W) units.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolRecord {
    pub constellation: String,
    pub m: usize,
    pub x: Vec<Complex64>,
    pub y: Vec<Complex64>,
    /// Indices of the drawn points (empty for externally supplied symbols).
    pub indices: Vec<usize>,
}

impl SymbolRecord {
    pub fn from_symbols(constellation: impl Into<String>, m: usize, x: Vec<Complex64>, y: Vec<Complex64>) -> Self {
        Self { constellation: constellation.into(), m, x, y, indices: Vec::new() }
    }

    pub fn power(&self, pol: Pol) -> f64 {
        let v = match pol {
            Pol::X => &self.x,
            Pol::Y => &self.y,
        };
        v.iter().map(|a| a.norm_sqr()).sum::<f64>() / v.len() as f64
    }
}

fn freq(i: usize, n: usize, fs: f64) -> f64 {
    let k = if i < n.div_ceil(2) { i as f64 } else { i as f64 - n as f64 };
    k * fs / n as f64
}

/// Raised-cosine spectrum (the RRC filter is its square root).
pub fn raised_cosine(f: f64, rs: f64, rolloff: f64) -> f64 {
    let af = f.abs();
    let f1 = (1.0 - rolloff) * rs / 2.0;
    let f2 = (1.0 + rolloff) * rs / 2.0;
    // brick wall: the edge bin is shared by both aliases, half each
    if rolloff == 0.0 && (af - f1).abs() <= 1e-9 * rs {
        return 0.5;
    }
    if af <= f1 {
        1.0
    } else if af >= f2 {
        0.0
    } else {
        0.5 * (1.0 + (std::f64::consts::PI / (rolloff * rs) * (af - f1)).cos())
    }
}

struct Ffts {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Ffts {
    fn new(n: usize) -> Self {
        let mut p = FftPlanner::new();
        Self { n, fwd: p.plan_fft_forward(n), inv: p.plan_fft_inverse(n) }
    }

    fn forward(&self, v: &mut [Complex64]) {
        self.fwd.process(v);
    }

    /// Normalized inverse.
    fn inverse(&self, v: &mut [Complex64]) {
        self.inv.process(v);
        let s = 1.0 / self.n as f64;
        v.iter_mut().for_each(|z| *z *= s);
    }
}

/// Draw symbols, scale them to the launch power exactly, and shape.
pub fn synthesize_tx(c: &Constellation4D, cfg: &SimConfig) -> Result<(SignalGrid, SymbolRecord), SimError> {
    cfg.validate()?;
    if !c.is_normalized() {
        return Err(SimError::Config(format!("{} is not normalized", c.name)));
    }
    let pts = c.complex_points();
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let ns = cfg.num_symbols;
    let indices: Vec<usize> = (0..ns).map(|_| rng.gen_range(0..pts.len())).collect();
    let e: f64 = indices.iter().map(|&i| pts[i].0.norm_sqr() + pts[i].1.norm_sqr()).sum::<f64>() / ns as f64;
    let k = (cfg.link.launch_power() / e).sqrt();
    let x: Vec<Complex64> = indices.iter().map(|&i| pts[i].0 * k).collect();
    let y: Vec<Complex64> = indices.iter().map(|&i| pts[i].1 * k).collect();
    let rec = SymbolRecord { constellation: c.name.clone(), m: c.len(), x, y, indices };
    let grid = shape(&rec, cfg);
    Ok((grid, rec))
}

fn shape(rec: &SymbolRecord, cfg: &SimConfig) -> SignalGrid {
    let (ns, sps) = (cfg.num_symbols, cfg.samples_per_symbol);
    let n = ns * sps;
    let fs = cfg.sample_rate();
    let sym = Ffts::new(ns);
    let big = Ffts::new(n);
    let filt: Vec<f64> = (0..n)
        .map(|i| sps as f64 * raised_cosine(freq(i, n, fs), cfg.link.symbol_rate, cfg.link.rolloff).sqrt())
        .collect();
    let mut out = [Vec::new(), Vec::new()];
    for (p, src) in [&rec.x, &rec.y].into_iter().enumerate() {
        let mut a = src.clone();
        sym.forward(&mut a);
        let mut u: Vec<Complex64> = (0..n).map(|i| a[i % ns] * filt[i]).collect();
        big.inverse(&mut u);
        out[p] = u;
    }
    let [x, y] = out;
    SignalGrid { x, y, sample_rate: fs }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PropagationStats {
    pub steps_per_span: Vec<usize>,
    /// Mean power after each amplifier [W].
    pub span_power: Vec<f64>,
    pub min_step_m: f64,
}

fn linear_operator(cfg: &SimConfig, h: f64, n: usize) -> Vec<Complex64> {
    let (a, b2) = (cfg.link.alpha(), cfg.link.beta2());
    let fs = cfg.sample_rate();
    (0..n)
        .map(|i| {
            let w = 2.0 * std::f64::consts::PI * freq(i, n, fs);
            (Complex64::new(-a / 2.0, -b2 / 2.0 * w * w) * h).exp()
        })
        .collect()
}

/// Symmetric split-step propagation over all spans with lumped gain.
pub fn propagate(sig: &SignalGrid, cfg: &SimConfig) -> Result<SignalGrid, SimError> {
    propagate_with_stats(sig, cfg).map(|r| r.0)
}

pub fn propagate_with_stats(sig: &SignalGrid, cfg: &SimConfig) -> Result<(SignalGrid, PropagationStats), SimError> {
    cfg.validate()?;
    sig.check()?;
    let n = sig.len();
    if n != cfg.num_samples() {
        return Err(SimError::Shape(format!("grid has {n} samples, config expects {}", cfg.num_samples())));
    }
    let ffts = Ffts::new(n);
    let g = 8.0 / 9.0 * cfg.link.gamma_si();
    let span = cfg.link.span_length();
    let hmax = cfg.max_step_km * 1e3;
    let mut u = [sig.x.clone(), sig.y.clone()];
    let mut stats = PropagationStats { min_step_m: f64::INFINITY, ..Default::default() };
    let mut cache: Vec<(u64, Vec<Complex64>)> = Vec::new();
    let mut op = |h: f64| -> Vec<Complex64> {
        if let Some((_, v)) = cache.iter().find(|(k, _)| *k == h.to_bits()) {
            return v.clone();
        }
        let v = linear_operator(cfg, h, n);
        if cache.len() > 3 {
            cache.remove(0);
        }
        cache.push((h.to_bits(), v.clone()));
        v
    };
    let apply = |u: &mut [Vec<Complex64>; 2], lin: &[Complex64]| {
        for p in u.iter_mut() {
            ffts.forward(p);
            p.iter_mut().zip(lin).for_each(|(a, b)| *a *= b);
            ffts.inverse(p);
        }
    };
    for s in 0..cfg.link.span_count {
        let mut z = 0.0;
        let mut pending = 0.0;
        let mut steps = 0;
        while span - z > 1e-6 {
            let peak = u[0].iter().zip(&u[1]).map(|(a, b)| a.norm_sqr() + b.norm_sqr()).fold(0.0, f64::max);
            let hnl = if g > 0.0 && peak > 0.0 { cfg.phi_nl_max / (g * peak) } else { f64::INFINITY };
            let h = hmax.min(hnl).min(span - z);
            stats.min_step_m = stats.min_step_m.min(h);
            let lin = op(pending + h / 2.0);
            apply(&mut u, &lin);
            if g > 0.0 {
                for i in 0..n {
                    let ph = g * (u[0][i].norm_sqr() + u[1][i].norm_sqr()) * h;
                    let r = Complex64::from_polar(1.0, ph);
                    u[0][i] *= r;
                    u[1][i] *= r;
                }
            }
            pending = h / 2.0;
            z += h;
            steps += 1;
        }
        let lin = op(pending);
        apply(&mut u, &lin);
        // restore the exact launch power lost over the traversed length
        let gain = (cfg.link.alpha() * z / 2.0).exp();
        for p in u.iter_mut() {
            p.iter_mut().for_each(|a| *a *= gain);
        }
        if u.iter().flatten().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(SimError::NonFinite { span: s, steps });
        }
        stats.steps_per_span.push(steps);
        let pw = u.iter().flatten().map(|a| a.norm_sqr()).sum::<f64>() / n as f64;
        stats.span_power.push(pw);
    }
    let [x, y] = u;
    Ok((SignalGrid { x, y, sample_rate: sig.sample_rate }, stats))
}

/// Received symbols after CD compensation, matched filtering, sampling and
/// the per-polarization least-squares gain.
#[derive(Debug, Clone, PartialEq)]
pub struct RxRecord {
    pub x: Vec<Complex64>,
    pub y: Vec<Complex64>,
    pub gain: [Complex64; 2],
}

pub fn rx_dsp(sig: &SignalGrid, cfg: &SimConfig, tx: &SymbolRecord) -> Result<RxRecord, SimError> {
    sig.check()?;
    let (ns, sps) = (cfg.num_symbols, cfg.samples_per_symbol);
    let n = ns * sps;
    if sig.len() != n || tx.x.len() != ns || tx.y.len() != ns {
        return Err(SimError::Shape(format!("grid {} / symbols {} vs config {}x{}", sig.len(), tx.x.len(), ns, sps)));
    }
    let fs = cfg.sample_rate();
    let ltot = cfg.link.span_length() * cfg.link.span_count as f64;
    let b2 = cfg.link.beta2();
    let eq: Vec<Complex64> = (0..n)
        .map(|i| {
            let f = freq(i, n, fs);
            let w = 2.0 * std::f64::consts::PI * f;
            Complex64::from_polar(raised_cosine(f, cfg.link.symbol_rate, cfg.link.rolloff).sqrt(), b2 / 2.0 * w * w * ltot)
        })
        .collect();
    let big = Ffts::new(n);
    let sym = Ffts::new(ns);
    let mut out = [Vec::new(), Vec::new()];
    let mut gain = [Complex64::new(1.0, 0.0); 2];
    for (p, (src, refs)) in [(&sig.x, &tx.x), (&sig.y, &tx.y)].into_iter().enumerate() {
        let mut v = src.clone();
        big.forward(&mut v);
        // sampling every sps-th point folds the spectrum onto ns bins
        let mut folded = vec![Complex64::new(0.0, 0.0); ns];
        for (i, (a, e)) in v.iter().zip(&eq).enumerate() {
            folded[i % ns] += a * e;
        }
        sym.inverse(&mut folded);
        let s = 1.0 / sps as f64;
        folded.iter_mut().for_each(|z| *z *= s);
        let g = ls_gain(&folded, refs);
        if g.norm() > 0.0 {
            folded.iter_mut().for_each(|z| *z /= g);
        }
        gain[p] = g;
        out[p] = folded;
    }
    let [x, y] = out;
    Ok(RxRecord { x, y, gain })
}

fn ls_gain(rx: &[Complex64], tx: &[Complex64]) -> Complex64 {
    let num: Complex64 = rx.iter().zip(tx).map(|(r, t)| r * t.conj()).sum();
    let den: f64 = tx.iter().map(|t| t.norm_sqr()).sum();
    num / den
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnrReport {
    pub constellation: String,
    pub m: usize,
    /// Linear SNRs; `f64::INFINITY` when the error power is exactly zero.
    pub snr_x: f64,
    pub snr_y: f64,
    /// Transmitted per-polarization powers [W].
    pub p_x: f64,
    pub p_y: f64,
    /// Residual complex gain fitted during estimation.
    pub gain: [Complex64; 2],
    pub error_free: [bool; 2],
}

impl SnrReport {
    pub fn snr_db(&self, pol: Pol) -> f64 {
        10.0 * match pol {
            Pol::X => self.snr_x,
            Pol::Y => self.snr_y,
        }
        .log10()
    }
}

/// Data-aided SNR of one sequence: E|a|^2 / E|g^-1 r - a|^2 with the LS gain g.
pub fn snr_data_aided(rx: &[Complex64], tx: &[Complex64]) -> Result<(f64, Complex64), SimError> {
    if rx.len() != tx.len() || rx.is_empty() {
        return Err(SimError::Shape(format!("{} received vs {} transmitted symbols", rx.len(), tx.len())));
    }
    let g = ls_gain(rx, tx);
    let sig: f64 = tx.iter().map(|t| t.norm_sqr()).sum();
    let err: f64 = rx.iter().zip(tx).map(|(r, t)| (r / g - t).norm_sqr()).sum();
    Ok((if err == 0.0 { f64::INFINITY } else { sig / err }, g))
}

pub fn estimate_snr(rx: &RxRecord, tx: &SymbolRecord) -> Result<SnrReport, SimError> {
    let (sx, gx) = snr_data_aided(&rx.x, &tx.x)?;
    let (sy, gy) = snr_data_aided(&rx.y, &tx.y)?;
    Ok(SnrReport {
        constellation: tx.constellation.clone(),
        m: tx.m,
        snr_x: sx,
        snr_y: sy,
        p_x: tx.power(Pol::X),
        p_y: tx.power(Pol::Y),
        gain: [gx, gy],
        error_free: [sx.is_infinite(), sy.is_infinite()],
    })
}

/// eta_pol = P_pol / (SNR_pol P^3), P the link launch power.
pub fn eta_from_snr(r: &SnrReport, link: &LinkSpec) -> Result<EtaEstimate, SimError> {
    if r.error_free[0] || !r.snr_x.is_finite() {
        return Err(SimError::Undefined(Pol::X));
    }
    if r.error_free[1] || !r.snr_y.is_finite() {
        return Err(SimError::Undefined(Pol::Y));
    }
    let p3 = link.launch_power().powi(3);
    Ok(EtaEstimate {
        eta_x: r.p_x / (r.snr_x * p3),
        eta_y: r.p_y / (r.snr_y * p3),
        method: Method::Ssfm,
        constellation: r.constellation.clone(),
        m: r.m,
        link_digest: link.digest(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SsfmRun {
    pub eta: EtaEstimate,
    pub snr: SnrReport,
    pub stats: PropagationStats,
}

/// Whole chain: synthesize, propagate, receive, estimate.
pub fn run_ssfm(c: &Constellation4D, cfg: &SimConfig) -> Result<SsfmRun, SimError> {
    let (tx, rec) = synthesize_tx(c, cfg)?;
    let (rx_grid, stats) = propagate_with_stats(&tx, cfg)?;
    let rx = rx_dsp(&rx_grid, cfg, &rec)?;
    let snr = estimate_snr(&rx, &rec)?;
    let eta = eta_from_snr(&snr, &cfg.link)?;
    Ok(SsfmRun { eta, snr, stats })
}
