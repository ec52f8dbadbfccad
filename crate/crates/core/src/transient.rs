//! Pulsed-excitation luminescence transients: synthetic photon-counting
//! histograms and single-exponential lifetime extraction.
//!
//! Times are in µs throughout. The decay model is
//! `μ(t) = B + A·exp(-t/τ)` evaluated at bin centres, with `B` in counts
//! per bin and `A` the expected signal counts per bin at `t = 0`.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{Matrix3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, FitError, IterationRecord, Result};

const UNIFORM_EDGE_TOLERANCE: f64 = 1e-12;
/// Centre spacing tolerance, relative to bin width, when reading CSV.
const CSV_SPACING_TOLERANCE: f64 = 1e-9;

pub const MIN_BINS: usize = 10;
pub const MIN_EXCESS_COUNTS: f64 = 100.0;
pub const MAX_ITERATIONS: usize = 100;
pub const STEP_TOLERANCE: f64 = 1e-10;
/// Amplitude significance (A/σ_A) below which a decay is not considered detected.
pub const DETECTION_THRESHOLD: f64 = 5.0;

/// Generator inputs recorded on synthetic histograms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticMetadata {
    pub lifetime: f64,
    pub amplitude: f64,
    pub background: f64,
    pub seed: u64,
}

/// Photon counts binned by delay after the excitation pulse.
///
/// Counts are stored as `f64` so that expected (noiseless) curves can be
/// fitted directly; simulated and measured histograms hold whole numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct TransientHistogram {
    bin_edges: Vec<f64>,
    counts: Vec<f64>,
    metadata: Option<SyntheticMetadata>,
}

impl TransientHistogram {
    pub fn new(bin_edges: Vec<f64>, counts: Vec<f64>) -> Result<Self> {
        if bin_edges.len() < 2 {
            return Err(Error::Histogram("at least one bin is required".into()));
        }
        if counts.len() + 1 != bin_edges.len() {
            return Err(Error::Histogram(format!(
                "{} edges do not bound {} bins",
                bin_edges.len(),
                counts.len()
            )));
        }
        if bin_edges.iter().any(|e| !e.is_finite()) {
            return Err(Error::Histogram("bin edges must be finite".into()));
        }
        let n = counts.len();
        let width = (bin_edges[n] - bin_edges[0]) / n as f64;
        if !(width > 0.0) {
            return Err(Error::Histogram(
                "bin edges must be strictly increasing".into(),
            ));
        }
        for (i, pair) in bin_edges.windows(2).enumerate() {
            let w = pair[1] - pair[0];
            if !(w > 0.0) {
                return Err(Error::Histogram(format!(
                    "bin edges not increasing at bin {i}"
                )));
            }
            if (w - width).abs() > UNIFORM_EDGE_TOLERANCE * width.max(bin_edges[i + 1].abs()) {
                return Err(Error::Histogram(format!(
                    "bin {i} has width {w}, expected uniform width {width}"
                )));
            }
        }
        if let Some(i) = counts.iter().position(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::Histogram(format!(
                "bin {i} has invalid count {}",
                counts[i]
            )));
        }
        Ok(Self {
            bin_edges,
            counts,
            metadata: None,
        })
    }

    /// Uniform bins of width `t_max / n_bins` starting at zero.
    pub fn uniform(t_max: f64, counts: Vec<f64>) -> Result<Self> {
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(domain(format!("t_max must be positive, got {t_max}")));
        }
        let n = counts.len();
        let edges = (0..=n).map(|i| t_max * i as f64 / n as f64).collect();
        Self::new(edges, counts)
    }

    pub fn bin_edges(&self) -> &[f64] {
        &self.bin_edges
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn metadata(&self) -> Option<&SyntheticMetadata> {
        self.metadata.as_ref()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn bin_width(&self) -> f64 {
        (self.bin_edges[self.len()] - self.bin_edges[0]) / self.len() as f64
    }

    pub fn bin_centers(&self) -> impl Iterator<Item = f64> + '_ {
        self.bin_edges.windows(2).map(|w| 0.5 * (w[0] + w[1]))
    }

    /// Writes `t_us,counts` rows, one per bin centre.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::Histogram(e.to_string());
        w.write_record(["t_us", "counts"]).map_err(io)?;
        for (t, c) in self.bin_centers().zip(&self.counts) {
            w.write_record([t.to_string(), c.to_string()]).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Histogram(e.to_string()))
    }

    /// Reads `t_us,counts` rows and reconstructs uniform bin edges from the
    /// centres.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            t_us: f64,
            counts: f64,
        }
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::Histogram(e.to_string()))?;
        if headers != vec!["t_us", "counts"] {
            return Err(Error::Histogram(format!(
                "expected header `t_us,counts`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut centers = Vec::new();
        let mut counts = Vec::new();
        for (i, row) in rdr.deserialize::<Row>().enumerate() {
            let row = row.map_err(|e| Error::Histogram(format!("row {}: {e}", i + 1)))?;
            centers.push(row.t_us);
            counts.push(row.counts);
        }
        if centers.len() < 2 {
            return Err(Error::Histogram(
                "at least two rows are needed to infer the bin width".into(),
            ));
        }
        let n = centers.len();
        let width = (centers[n - 1] - centers[0]) / (n - 1) as f64;
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::Histogram(
                "bin centres must be strictly increasing".into(),
            ));
        }
        for (i, pair) in centers.windows(2).enumerate() {
            if ((pair[1] - pair[0]) - width).abs() > CSV_SPACING_TOLERANCE * width {
                return Err(Error::Histogram(format!(
                    "non-uniform spacing between rows {} and {}",
                    i + 1,
                    i + 2
                )));
            }
        }
        let start = centers[0] - 0.5 * width;
        let edges = (0..=n).map(|i| start + width * i as f64).collect();
        Self::new(edges, counts)
    }

    pub fn read_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Histogram(format!("{}: {e}", path.display())))?;
        Self::read_csv(std::io::BufReader::new(file))
    }

    pub fn write_csv_path(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path)
            .map_err(|e| Error::Histogram(format!("{}: {e}", path.display())))?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

/// Decay curve `B + A·exp(-t/τ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransientParams {
    pub lifetime: f64,
    pub amplitude: f64,
    pub background: f64,
}

impl TransientParams {
    pub fn mean(&self, t: f64) -> f64 {
        self.background + self.amplitude * (-t / self.lifetime).exp()
    }

    fn validate(&self) -> Result<()> {
        if !(self.lifetime.is_finite() && self.lifetime > 0.0) {
            return Err(domain(format!(
                "lifetime must be positive, got {} µs",
                self.lifetime
            )));
        }
        for (name, v) in [
            ("amplitude", self.amplitude),
            ("background", self.background),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(domain(format!("{name} must be non-negative, got {v}")));
            }
        }
        Ok(())
    }

    /// Noiseless histogram: each bin holds its expected count.
    pub fn expected_histogram(&self, n_bins: usize, t_max: f64) -> Result<TransientHistogram> {
        self.validate()?;
        check_binning(n_bins, t_max)?;
        let counts = (0..n_bins)
            .map(|i| self.mean(t_max * (i as f64 + 0.5) / n_bins as f64))
            .collect();
        TransientHistogram::uniform(t_max, counts)
    }
}

fn check_binning(n_bins: usize, t_max: f64) -> Result<()> {
    if n_bins < MIN_BINS {
        return Err(domain(format!(
            "at least {MIN_BINS} bins are required, got {n_bins}"
        )));
    }
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(domain(format!("t_max must be positive, got {t_max} µs")));
    }
    Ok(())
}

/// Poisson-sampled decay histogram on `n_bins` uniform bins over `[0, t_max]`.
pub fn simulate_transient(
    params: TransientParams,
    n_bins: usize,
    t_max: f64,
    seed: u64,
) -> Result<TransientHistogram> {
    let expected = params.expected_histogram(n_bins, t_max)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = Vec::with_capacity(n_bins);
    for &mean in expected.counts() {
        let c = if mean > 0.0 {
            Poisson::new(mean)
                .map_err(|e| domain(format!("bin mean {mean}: {e}")))?
                .sample(&mut rng)
        } else {
            0.0
        };
        counts.push(c);
    }
    let mut hist = TransientHistogram::uniform(t_max, counts)?;
    hist.metadata = Some(SyntheticMetadata {
        lifetime: params.lifetime,
        amplitude: params.amplitude,
        background: params.background,
        seed,
    });
    Ok(hist)
}

/// Result of a single-exponential fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LifetimeFit {
    /// τ in µs.
    pub lifetime: f64,
    /// 1σ from the Fisher information at the optimum.
    pub lifetime_uncertainty: f64,
    pub amplitude: f64,
    pub amplitude_uncertainty: f64,
    pub background: f64,
    pub background_uncertainty: f64,
    /// Pearson χ² per degree of freedom.
    pub fit_quality: f64,
    /// Poisson deviance at the optimum.
    pub deviance: f64,
    pub bins_used: usize,
    pub iterations: usize,
}

/// Closed time range `[start, end]` in µs selecting bins by centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitWindow {
    pub start: f64,
    pub end: f64,
}

impl FitWindow {
    pub fn new(start: f64, end: f64) -> Result<Self> {
        if !(start.is_finite() && end.is_finite() && start < end) {
            return Err(domain(format!(
                "fit window [{start}, {end}] is empty or not finite"
            )));
        }
        Ok(Self { start, end })
    }
}

struct Data {
    t: Vec<f64>,
    y: Vec<f64>,
}

impl Data {
    fn means(&self, p: &Vector3<f64>) -> Option<Vec<f64>> {
        let (a, tau, b) = (p[0], p[1], p[2]);
        if !(tau > 0.0) {
            return None;
        }
        let mu: Vec<f64> = self.t.iter().map(|t| b + a * (-t / tau).exp()).collect();
        mu.iter().all(|m| *m > 0.0 && m.is_finite()).then_some(mu)
    }

    fn deviance(&self, mu: &[f64]) -> f64 {
        self.y
            .iter()
            .zip(mu)
            .map(|(&y, &m)| {
                let log_term = if y > 0.0 { y * (y / m).ln() } else { 0.0 };
                2.0 * (log_term - (y - m))
            })
            .sum()
    }

    /// Expected Fisher information and score of the Poisson log-likelihood.
    fn fisher_and_score(&self, p: &Vector3<f64>, mu: &[f64]) -> (Matrix3<f64>, Vector3<f64>) {
        let (a, tau) = (p[0], p[1]);
        let mut fisher = Matrix3::zeros();
        let mut score = Vector3::zeros();
        for ((&t, &y), &m) in self.t.iter().zip(&self.y).zip(mu) {
            let e = (-t / tau).exp();
            let j = Vector3::new(e, a * t * e / (tau * tau), 1.0);
            fisher += j * j.transpose() / m;
            score += j * ((y - m) / m);
        }
        (fisher, score)
    }
}

fn relative_step(step: &Vector3<f64>, p: &Vector3<f64>) -> f64 {
    let scales = [p[0].abs(), p[1].abs(), p[2].abs().max(1e-6 * p[0].abs())];
    (0..3)
        .map(|j| {
            if scales[j] > 0.0 {
                step[j].abs() / scales[j]
            } else {
                step[j].abs()
            }
        })
        .fold(0.0, f64::max)
}

/// Log-linear start: background from the last tenth of the window, then a
/// weighted line through `ln(y - B)`.
fn initial_guess(data: &Data) -> Vector3<f64> {
    let n = data.t.len();
    let tail = (n / 10).max(1);
    let background = data.y[n - tail..].iter().sum::<f64>() / tail as f64;
    let span = data.t[n - 1] - data.t[0];

    let (mut sw, mut st, mut sz, mut stt, mut stz) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&t, &y) in data.t.iter().zip(&data.y) {
        let excess = y - background;
        if excess <= 0.0 || y <= 0.0 {
            continue;
        }
        // var(ln(y - B)) ≈ y/(y - B)²
        let w = excess * excess / y;
        let z = excess.ln();
        sw += w;
        st += w * t;
        sz += w * z;
        stt += w * t * t;
        stz += w * t * z;
    }
    let det = sw * stt - st * st;
    let slope = if det > 0.0 {
        (sw * stz - st * sz) / det
    } else {
        f64::NAN
    };
    let (lifetime, amplitude) = if slope < 0.0 && slope.is_finite() {
        let intercept = (sz - slope * st) / sw;
        (-1.0 / slope, intercept.exp())
    } else {
        (span / 3.0, (data.y[0] - background).max(1.0))
    };
    Vector3::new(amplitude, lifetime, background.max(1e-3 * amplitude))
}

/// Fits `B + A·exp(-t/τ)` to the bins whose centres lie in `window` by
/// maximizing the Poisson likelihood with damped Gauss-Newton (Fisher
/// scoring) steps.
pub fn fit_lifetime(hist: &TransientHistogram, window: Option<FitWindow>) -> Result<LifetimeFit> {
    let (mut t, mut y) = (Vec::new(), Vec::new());
    for (tc, &c) in hist.bin_centers().zip(hist.counts()) {
        if window.is_none_or(|w| (w.start..=w.end).contains(&tc)) {
            t.push(tc);
            y.push(c);
        }
    }
    if t.len() < MIN_BINS {
        return Err(FitError::Precondition(format!(
            "{} bins in the fit window, at least {MIN_BINS} needed",
            t.len()
        ))
        .into());
    }
    let data = Data { t, y };
    let n = data.t.len();
    let tail = (n / 10).max(1);
    let background = data.y[n - tail..].iter().sum::<f64>() / tail as f64;
    let excess: f64 = data.y.iter().map(|y| y - background).sum();
    if !(excess > MIN_EXCESS_COUNTS) {
        return Err(FitError::Precondition(format!(
            "only {excess:.1} counts above the tail background, more than {MIN_EXCESS_COUNTS} needed"
        ))
        .into());
    }

    let mut p = initial_guess(&data);
    let mut mu = data
        .means(&p)
        .ok_or_else(|| FitError::Unidentifiable("initial guess gives non-positive means".into()))?;
    let mut deviance = data.deviance(&mu);
    let mut damping = 1e-3;
    let mut trace = Vec::new();
    let mut converged = false;

    for iteration in 1..=MAX_ITERATIONS {
        let (fisher, score) = data.fisher_and_score(&p, &mu);
        let mut last_step = f64::INFINITY;
        // inner loop raises damping until the deviance decreases
        loop {
            let mut lhs = fisher;
            for j in 0..3 {
                lhs[(j, j)] *= 1.0 + damping;
            }
            let Some(step) = lhs.cholesky().map(|c| c.solve(&score)) else {
                damping *= 10.0;
                if damping > 1e16 {
                    break;
                }
                continue;
            };
            last_step = relative_step(&step, &p);
            let trial = p + step;
            if let Some(trial_mu) = data.means(&trial) {
                let trial_dev = data.deviance(&trial_mu);
                if trial_dev <= deviance {
                    p = trial;
                    mu = trial_mu;
                    deviance = trial_dev;
                    damping = (damping / 10.0).max(1e-12);
                    break;
                }
            }
            if last_step < STEP_TOLERANCE {
                // at the optimum rounding can make any step look uphill
                break;
            }
            damping *= 10.0;
            if damping > 1e16 {
                break;
            }
        }
        trace.push(IterationRecord {
            iteration,
            amplitude: p[0],
            lifetime: p[1],
            background: p[2],
            deviance,
            damping,
            relative_step: last_step,
        });
        if last_step < STEP_TOLERANCE {
            converged = true;
            break;
        }
        if damping > 1e16 {
            break;
        }
    }
    if !converged {
        return Err(FitError::NotConverged { trace }.into());
    }

    let (amplitude, lifetime, background) = (p[0], p[1], p[2]);
    let (fisher, _) = data.fisher_and_score(&p, &mu);
    let cov = fisher.try_inverse().ok_or_else(|| {
        FitError::Unidentifiable("singular Fisher information at the optimum".into())
    })?;
    let sigma = Vector3::new(cov[(0, 0)], cov[(1, 1)], cov[(2, 2)]).map(|v| v.max(0.0).sqrt());
    let span = data.t[n - 1] - data.t[0];

    if !(sigma.iter().all(|s| s.is_finite()) && lifetime.is_finite()) {
        return Err(
            FitError::Unidentifiable("non-finite parameters or uncertainties".into()).into(),
        );
    }
    if amplitude <= 0.0 || amplitude < DETECTION_THRESHOLD * sigma[0] {
        return Err(FitError::Unidentifiable(format!(
            "decay amplitude {amplitude:.3e} ± {:.3e} is not significant",
            sigma[0]
        ))
        .into());
    }
    if sigma[1] >= lifetime || sigma[1] >= span {
        return Err(FitError::Unidentifiable(format!(
            "lifetime {lifetime:.4e} ± {:.4e} µs spans the window",
            sigma[1]
        ))
        .into());
    }

    let pearson: f64 = data
        .y
        .iter()
        .zip(&mu)
        .map(|(y, m)| (y - m) * (y - m) / m)
        .sum();
    Ok(LifetimeFit {
        lifetime,
        lifetime_uncertainty: sigma[1],
        amplitude,
        amplitude_uncertainty: sigma[0],
        background,
        background_uncertainty: sigma[2],
        fit_quality: pearson / (n - 3) as f64,
        deviance,
        bins_used: n,
        iterations: trace.len(),
    })
}
