//! Sweep engine: spectra versus two-photon detuning and peak outputs versus
//! absorber depth.
//!
//! Grid points are evaluated independently on a rayon pool of the requested
//! size and collected in grid order, so results do not depend on the number
//! of workers.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, ValidationErrors, Violation};
use crate::model::{EitMedium, FieldPair};
use crate::propagation::{build_coupling_matrix, eit_reference, transfer_matrix, Method};
use crate::scenario::{Scenario, StokesNorm};
use crate::susceptibility::{normalized_lineshape, AbsorberResponse};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    TwoPhotonDetuning,
    AbsorberDepth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    Linear,
    Logarithmic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub scale: Scale,
    /// Detuning points per depth in an absorber-depth sweep.
    pub inner_points: usize,
}

pub const DEFAULT_POINTS: usize = 401;
/// Half-width of the default detuning window in units of the EIT width.
pub const WINDOW_EIT_WIDTHS: f64 = 20.0;

impl SweepSpec {
    /// ±20 EIT widths, 401 linear points; ±γ_ge when the EIT width vanishes.
    pub fn default_detuning(eit: &EitMedium) -> Self {
        let w = eit.eit_width();
        let half = if w.is_finite() && w > 0.0 { WINDOW_EIT_WIDTHS * w } else { eit.gamma_ge };
        SweepSpec {
            axis: Axis::TwoPhotonDetuning,
            start: -half,
            stop: half,
            points: DEFAULT_POINTS,
            scale: Scale::Linear,
            inner_points: DEFAULT_POINTS,
        }
    }

    /// D_abs from 0.01 to 100, 60 logarithmic points.
    pub fn default_depth(_eit: &EitMedium) -> Self {
        SweepSpec {
            axis: Axis::AbsorberDepth,
            start: 0.01,
            stop: 100.0,
            points: 60,
            scale: Scale::Logarithmic,
            inner_points: DEFAULT_POINTS,
        }
    }

    pub fn check(&self) -> ValidationErrors {
        let mut errs = ValidationErrors::default();
        if !self.start.is_finite() {
            errs.push(Violation::new("start", self.start, "must be finite"));
        }
        if !self.stop.is_finite() {
            errs.push(Violation::new("stop", self.stop, "must be finite"));
        }
        if self.start.is_finite() && self.stop.is_finite() && self.start >= self.stop {
            errs.push(Violation::new("start", self.start, format!("must be less than stop = {}", self.stop)));
        }
        if self.points < 2 {
            errs.push(Violation::new("points", self.points as f64, "must be at least 2"));
        }
        if self.inner_points < 3 {
            errs.push(Violation::new("inner_points", self.inner_points as f64, "must be at least 3"));
        }
        if self.scale == Scale::Logarithmic && !(self.start > 0.0) {
            errs.push(Violation::new("start", self.start, "must be positive on a logarithmic scale"));
        }
        if self.axis == Axis::AbsorberDepth && self.start < 0.0 {
            errs.push(Violation::new("start", self.start, "must be non-negative for absorber depths"));
        }
        errs
    }

    /// Grid values. A linear window symmetric about zero yields an exactly
    /// antisymmetric grid.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.points;
        let last = (n - 1) as f64;
        match self.scale {
            Scale::Linear => (0..n).map(|i| (self.start * (n - 1 - i) as f64 + self.stop * i as f64) / last).collect(),
            Scale::Logarithmic => {
                let (a, b) = (self.start.ln(), self.stop.ln());
                (0..n)
                    .map(|i| match i {
                        0 => self.start,
                        _ if i == n - 1 => self.stop,
                        _ => ((a * (n - 1 - i) as f64 + b * i as f64) / last).exp(),
                    })
                    .collect()
            }
        }
    }
}

/// One grid point of a sweep. Intensities are relative to the input signal
/// intensity unless curve-maximum normalisation was requested.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRecord {
    /// Detuning (MHz) or absorber depth, depending on the axis.
    pub x: f64,
    pub probe_transmission: f64,
    pub stokes_output: f64,
    /// |Λ|² at this detuning; for depth sweeps, at the probe peak.
    pub absorber_profile: f64,
    pub eit_reference: f64,
    pub flagged: bool,
}

impl SpectrumRecord {
    fn flagged(x: f64) -> Self {
        SpectrumRecord {
            x,
            probe_transmission: 0.0,
            stokes_output: 0.0,
            absorber_profile: 0.0,
            eit_reference: 0.0,
            flagged: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlaggedPoint {
    pub index: usize,
    pub x: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    pub axis: Axis,
    pub records: Vec<SpectrumRecord>,
    pub flagged: Vec<FlaggedPoint>,
}

/// Everything needed to evaluate one detuning.
#[derive(Debug, Clone, Copy)]
struct PointModel {
    eit: EitMedium,
    response: AbsorberResponse,
    input: FieldPair,
}

impl PointModel {
    fn new(scenario: &Scenario, d_abs: Option<f64>) -> Result<Self> {
        let response = match &scenario.absorber {
            Some(a) => {
                AbsorberResponse::from_absorber(a, d_abs.or(scenario.options.d_abs), scenario.options.lineshape())?
            }
            None => {
                let d = d_abs.or(scenario.options.d_abs).unwrap_or(0.0);
                if d > 0.0 {
                    return Err(Error::Domain(
                        "an absorber depth was requested but the scenario has no absorber section".into(),
                    ));
                }
                AbsorberResponse::none()
            }
        };
        Ok(PointModel {
            eit: scenario.eit,
            response,
            input: FieldPair::real(scenario.options.signal_input, scenario.options.stokes_seed),
        })
    }

    fn evaluate(&self, delta: f64) -> Result<SpectrumRecord> {
        let lambda = normalized_lineshape(&self.response, delta);
        let loss = lambda * self.response.depth_abs;
        let cm = build_coupling_matrix(&self.eit, loss, delta)?;
        let out = transfer_matrix(&cm, Method::MatrixExponential)?.apply(self.input);
        let norm = self.input.a_s.norm_sqr();
        let profile = if self.response.depth_abs > 0.0 { lambda.norm_sqr() } else { 0.0 };
        let rec = SpectrumRecord {
            x: delta,
            probe_transmission: out.a_s.norm_sqr() / norm,
            stokes_output: out.a_i_dag.norm_sqr() / norm,
            absorber_profile: profile,
            eit_reference: eit_reference(&self.eit, delta)?,
            flagged: false,
        };
        let finite = [rec.probe_transmission, rec.stokes_output, rec.absorber_profile, rec.eit_reference]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Singular { context: format!("non-finite output at delta = {delta} MHz") });
        }
        Ok(rec)
    }
}

/// Worker count to use: `0` means the machine's available parallelism.
pub fn workers(requested: usize) -> usize {
    if requested > 0 {
        requested
    } else {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    }
}

fn run_parallel<T, F>(xs: &[f64], workers: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64) -> T + Sync + Send,
{
    let n = self::workers(workers);
    if n == 1 {
        return Ok(xs.iter().map(|&x| f(x)).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| Error::Domain(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| xs.par_iter().map(|&x| f(x)).collect()))
}

fn ensure_axis(spec: &SweepSpec, axis: Axis) -> Result<()> {
    let mut errs = spec.check();
    if spec.axis != axis {
        errs.push(Violation::bare("sweep.axis", format!("must be {axis:?} for this sweep")));
    }
    errs.into_result().map_err(Error::from)
}

fn collect(axis: Axis, xs: &[f64], results: Vec<Result<SpectrumRecord>>) -> SweepOutput {
    let mut records = Vec::with_capacity(results.len());
    let mut flagged = Vec::new();
    for (i, (x, r)) in xs.iter().zip(results).enumerate() {
        match r {
            Ok(rec) => records.push(rec),
            Err(e) => {
                records.push(SpectrumRecord::flagged(*x));
                flagged.push(FlaggedPoint { index: i, x: *x, reason: e.to_string() });
            }
        }
    }
    SweepOutput { axis, records, flagged }
}

fn normalise_stokes(records: &mut [SpectrumRecord], norm: StokesNorm) {
    if norm != StokesNorm::CurveMax {
        return;
    }
    let max = records.iter().filter(|r| !r.flagged).map(|r| r.stokes_output).fold(0.0, f64::max);
    if max > 0.0 {
        for r in records.iter_mut().filter(|r| !r.flagged) {
            r.stokes_output /= max;
        }
    }
}

/// Probe and Stokes spectra over the detuning grid of `spec`.
pub fn sweep_detuning(scenario: &Scenario, spec: &SweepSpec, workers: usize) -> Result<SweepOutput> {
    ensure_axis(spec, Axis::TwoPhotonDetuning)?;
    let model = PointModel::new(scenario, None)?;
    let xs = spec.grid();
    let results = run_parallel(&xs, workers, |d| model.evaluate(d))?;
    let mut out = collect(Axis::TwoPhotonDetuning, &xs, results);
    normalise_stokes(&mut out.records, scenario.options.stokes_normalization);
    Ok(out)
}

/// Detuning-maximised outputs for one absorber depth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakOutputs {
    pub d_abs: f64,
    pub probe_peak: f64,
    pub stokes_peak: f64,
    /// Pure-EIT transmission maximised over the same grid.
    pub eit_reference: f64,
    /// Detuning of the probe peak, MHz.
    pub probe_peak_at: f64,
}

/// Peak probe and Stokes outputs over the scenario's default detuning window
/// sampled at `inner_points`.
pub fn peak_outputs(scenario: &Scenario, d_abs: f64, inner_points: usize) -> Result<PeakOutputs> {
    let model = PointModel::new(scenario, Some(d_abs))?;
    let window = SweepSpec { points: inner_points, ..SweepSpec::default_detuning(&scenario.eit) };
    ensure_axis(&window, Axis::TwoPhotonDetuning)?;
    let xs = window.grid();
    let mut probe = Vec::with_capacity(xs.len());
    let mut stokes = Vec::with_capacity(xs.len());
    let mut eit = Vec::with_capacity(xs.len());
    for &d in &xs {
        let r = model.evaluate(d)?;
        probe.push(r.probe_transmission);
        stokes.push(r.stokes_output);
        eit.push(r.eit_reference);
    }
    let (at, probe_peak) = refine_peak(&xs, &probe);
    Ok(PeakOutputs {
        d_abs,
        probe_peak,
        stokes_peak: refine_peak(&xs, &stokes).1,
        eit_reference: refine_peak(&xs, &eit).1,
        probe_peak_at: at,
    })
}

/// Peak outputs for every absorber depth on the grid of `spec`.
pub fn sweep_absorber_depth(scenario: &Scenario, spec: &SweepSpec, workers: usize) -> Result<SweepOutput> {
    ensure_axis(spec, Axis::AbsorberDepth)?;
    // Surface configuration errors once rather than flagging every point.
    PointModel::new(scenario, Some(spec.start))?;
    let xs = spec.grid();
    let inner = spec.inner_points;
    let results = run_parallel(&xs, workers, |d| {
        let p = peak_outputs(scenario, d, inner)?;
        let model = PointModel::new(scenario, Some(d))?;
        let lambda = normalized_lineshape(&model.response, p.probe_peak_at);
        Ok(SpectrumRecord {
            x: d,
            probe_transmission: p.probe_peak,
            stokes_output: p.stokes_peak,
            absorber_profile: if d > 0.0 { lambda.norm_sqr() } else { 0.0 },
            eit_reference: p.eit_reference,
            flagged: false,
        })
    })?;
    let mut out = collect(Axis::AbsorberDepth, &xs, results);
    normalise_stokes(&mut out.records, scenario.options.stokes_normalization);
    Ok(out)
}

/// Grid maximum refined by the vertex of the parabola through it and its
/// neighbours (uniform spacing assumed). Returns `(x, y)`; boundary maxima
/// are returned unrefined. NaN entries are ignored.
pub fn refine_peak(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let mut best = None::<usize>;
    for (i, y) in ys.iter().enumerate() {
        if y.is_nan() {
            continue;
        }
        if best.is_none_or(|b| *y > ys[b]) {
            best = Some(i);
        }
    }
    let Some(i) = best else {
        return (f64::NAN, f64::NAN);
    };
    if i == 0 || i + 1 >= ys.len() {
        return (xs[i], ys[i]);
    }
    let (y0, y1, y2) = (ys[i - 1], ys[i], ys[i + 1]);
    let curv = y0 - 2.0 * y1 + y2;
    if !(curv < 0.0) {
        return (xs[i], y1);
    }
    let p = 0.5 * (y0 - y2) / curv;
    let h = 0.5 * (xs[i + 1] - xs[i - 1]);
    (xs[i] + p * h, y1 - 0.25 * (y0 - y2) * p)
}

/// Mirror-image L¹ asymmetry of the probe curve,
/// `Σ w_i |p(δ_i) - p(-δ_i)| / (2 Σ w_i p(δ_i))` with trapezoid weights.
/// Zero for a symmetric curve, one for a curve supported on one side.
pub fn asymmetry_metric(spectrum: &[SpectrumRecord]) -> Result<f64> {
    let n = spectrum.len();
    if n < 2 {
        return Err(Error::Domain("asymmetry needs at least two points".into()));
    }
    let scale = spectrum.iter().map(|r| r.x.abs()).fold(0.0, f64::max);
    for i in 0..n {
        let (a, b) = (spectrum[i].x, spectrum[n - 1 - i].x);
        if (a + b).abs() > 1e-9 * scale {
            return Err(Error::Domain(format!(
                "detuning grid is not symmetric about zero ({a} has no mirror partner, found {b})"
            )));
        }
    }
    let weight = |i: usize| {
        let left = if i > 0 { spectrum[i].x - spectrum[i - 1].x } else { 0.0 };
        let right = if i + 1 < n { spectrum[i + 1].x - spectrum[i].x } else { 0.0 };
        0.5 * (left + right)
    };
    let (mut diff, mut mass) = (0.0, 0.0);
    for i in 0..n {
        let w = weight(i);
        let p = spectrum[i].probe_transmission;
        diff += w * (p - spectrum[n - 1 - i].probe_transmission).abs();
        mass += w * p;
    }
    if mass == 0.0 {
        return Ok(0.0);
    }
    Ok((diff / (2.0 * mass)).clamp(0.0, 1.0))
}

/// Number of local maxima whose prominence is at least `min_prominence`
/// times the global maximum.
pub fn count_peaks(ys: &[f64], min_prominence: f64) -> usize {
    let n = ys.len();
    let top = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if n == 0 || !top.is_finite() {
        return 0;
    }
    let threshold = min_prominence * top.abs();
    let mut count = 0;
    let mut i = 0;
    while i < n {
        // Treat a plateau as one candidate spanning [i, j].
        let mut j = i;
        while j + 1 < n && ys[j + 1] == ys[i] {
            j += 1;
        }
        let rises = i == 0 || ys[i - 1] < ys[i];
        let falls = j + 1 == n || ys[j + 1] < ys[i];
        if rises && falls && (i > 0 || j + 1 < n) {
            let h = ys[i];
            let mut left_min = h;
            let mut k = i;
            while k > 0 && ys[k - 1] <= h {
                k -= 1;
                left_min = left_min.min(ys[k]);
            }
            let mut right_min = h;
            let mut k = j;
            while k + 1 < n && ys[k + 1] <= h {
                k += 1;
                right_min = right_min.min(ys[k]);
            }
            let prominence = h - left_min.max(right_min);
            if prominence >= threshold {
                count += 1;
            }
        }
        i = j + 1;
    }
    count
}

/// Peak count of a probe spectrum at 1% prominence.
pub fn probe_peak_count(spectrum: &[SpectrumRecord]) -> usize {
    let ys: Vec<f64> = spectrum.iter().map(|r| r.probe_transmission).collect();
    count_peaks(&ys, 0.01)
}
