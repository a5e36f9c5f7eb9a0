//! Zero-side machinery: ingestion of zero-ordinate tables, spike detection
//! and matching in scan output, Landau's zero sum, and the indicator
//! kernel whose limit shape explains the spike profile.
//!
//! Zeros are never computed here — they are external inputs (or fixtures
//! validated elsewhere against the prime side), and every function treats
//! the table as ground truth to compare against.

use crate::digamma::digamma;
use crate::error::{Error, Result};
use crate::indicator::{EpsilonMode, Grid, IndicatorSample, OscillatorBank, Target};
use crate::primes::{von_mangoldt, Cutoff, ResidueFilter};
use crate::sum::{cexpm1_over, ChunkedComplexSum};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::path::Path;

/// An ingested table of zero ordinates, strictly ascending and positive.
#[derive(Clone, Debug)]
pub struct ZeroTable {
    ordinates: Vec<f64>,
    source: String,
    target: Target,
}

/// On-disk layout of a zero table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroFormat {
    /// One decimal ordinate per line; `#` starts a comment line.
    Plain,
    /// A single `gamma` column with that exact header.
    Csv,
}

impl ZeroTable {
    /// Validate and wrap a list of ordinates.
    pub fn new(
        ordinates: Vec<f64>,
        source: impl Into<String>,
        target: Target,
    ) -> Result<ZeroTable> {
        for (i, &g) in ordinates.iter().enumerate() {
            if !g.is_finite() || g <= 0.0 {
                return Err(Error::InvalidRequest {
                    reason: format!("zero ordinate #{} must be positive, got {g}", i + 1),
                });
            }
            if i > 0 && g <= ordinates[i - 1] {
                return Err(Error::InvalidRequest {
                    reason: format!("zero ordinates must be strictly ascending at #{}", i + 1),
                });
            }
        }
        Ok(ZeroTable {
            ordinates,
            source: source.into(),
            target,
        })
    }

    pub fn empty(target: Target) -> ZeroTable {
        ZeroTable {
            ordinates: Vec::new(),
            source: String::from("empty"),
            target,
        }
    }

    pub fn ordinates(&self) -> &[f64] {
        &self.ordinates
    }

    pub fn len(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn target(&self) -> &Target {
        &self.target
    }

    pub fn with_target(mut self, target: Target) -> ZeroTable {
        self.target = target;
        self
    }

    /// Nearest table entry to `y`, if any.
    pub fn nearest(&self, y: f64) -> Option<f64> {
        if self.ordinates.is_empty() {
            return None;
        }
        let i = self.ordinates.partition_point(|&g| g < y);
        let mut best = None;
        for j in [i.wrapping_sub(1), i] {
            if let Some(&g) = self.ordinates.get(j) {
                match best {
                    None => best = Some(g),
                    Some(b) if (y - g).abs() < (y - b).abs() => best = Some(g),
                    _ => {}
                }
            }
        }
        best
    }
}

/// Parse a table from text.  `origin` only labels error messages and the
/// table's source field.
pub fn parse_zeros(text: &str, origin: &Path, format: ZeroFormat) -> Result<ZeroTable> {
    let mut ordinates = Vec::new();
    let mut saw_header = false;
    let mut prev: Option<f64> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = idx + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if format == ZeroFormat::Csv && !saw_header {
            if line != "gamma" {
                return Err(Error::ZeroTableParse {
                    path: origin.to_path_buf(),
                    line: lineno,
                    reason: format!("expected header `gamma`, got `{line}`"),
                });
            }
            saw_header = true;
            continue;
        }
        let g: f64 = line.parse().map_err(|_| Error::ZeroTableParse {
            path: origin.to_path_buf(),
            line: lineno,
            reason: format!("expected a decimal ordinate, got `{line}`"),
        })?;
        if !g.is_finite() || g <= 0.0 {
            return Err(Error::ZeroTableParse {
                path: origin.to_path_buf(),
                line: lineno,
                reason: format!("ordinate must be positive and finite, got {g}"),
            });
        }
        if let Some(p) = prev {
            if g <= p {
                return Err(Error::ZeroTableParse {
                    path: origin.to_path_buf(),
                    line: lineno,
                    reason: format!("ordinates must be strictly ascending ({g} after {p})"),
                });
            }
        }
        prev = Some(g);
        ordinates.push(g);
    }
    Ok(ZeroTable {
        ordinates,
        source: origin.display().to_string(),
        target: Target::Zeta,
    })
}

/// Load a zero table from disk in the stated format.
pub fn load_zeros(path: &Path, format: ZeroFormat) -> Result<ZeroTable> {
    let text = std::fs::read_to_string(path)?;
    parse_zeros(&text, path, format)
}

/// Load with the format sniffed from the first data line: a `gamma` header
/// means csv, a decimal means plain.
pub fn load_zeros_auto(path: &Path) -> Result<ZeroTable> {
    let text = std::fs::read_to_string(path)?;
    let format = match text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
    {
        Some("gamma") => ZeroFormat::Csv,
        _ => ZeroFormat::Plain,
    };
    parse_zeros(&text, path, format)
}

/// A detected dip in a scan, refined below grid resolution and matched
/// against a zero table.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct SpikeMatch {
    pub detected_y: f64,
    pub matched_gamma: Option<f64>,
    /// detected_y - matched_gamma, when matched.
    pub offset: Option<f64>,
    /// Dip depth (positive) at the refined vertex.
    pub depth: f64,
    /// Predicted depth at the spike's grid sample.
    pub predicted: f64,
}

/// Find local minima at least `depth_fraction` of the predicted depth deep,
/// refine each by a 3-point parabola, and match each against the nearest
/// table entry within 1.5 grid steps.
pub fn detect_spikes(
    samples: &[IndicatorSample],
    table: &ZeroTable,
    depth_fraction: f64,
) -> Result<Vec<SpikeMatch>> {
    if !(depth_fraction > 0.0 && depth_fraction <= 1.0) {
        return Err(Error::InvalidRequest {
            reason: format!("depth fraction must lie in (0, 1], got {depth_fraction}"),
        });
    }
    if samples.len() < 3 {
        return Ok(Vec::new());
    }
    let step = samples[1].y - samples[0].y;
    if step <= 0.0 {
        return Err(Error::InvalidRequest {
            reason: String::from("scan grid must be increasing"),
        });
    }
    for w in samples.windows(2) {
        if ((w[1].y - w[0].y) - step).abs() > 1e-6 * step.max(1.0) {
            return Err(Error::InvalidRequest {
                reason: String::from("spike detection needs a uniform scan grid"),
            });
        }
    }
    let window = 1.5 * step;
    let mut out = Vec::new();
    for i in 1..samples.len() - 1 {
        let (lo, mid, hi) = (samples[i - 1].total, samples[i].total, samples[i + 1].total);
        if !(mid < lo && mid <= hi) {
            continue;
        }
        if mid > -depth_fraction * samples[i].predicted_depth {
            continue;
        }
        // Parabola through (-1, lo), (0, mid), (1, hi).
        let a = 0.5 * (lo + hi) - mid;
        let b = 0.5 * (hi - lo);
        let (dt, vertex) = if a > 0.0 {
            let dt = (-b / (2.0 * a)).clamp(-1.0, 1.0);
            (dt, mid + b * dt + a * dt * dt)
        } else {
            (0.0, mid)
        };
        let detected_y = samples[i].y + dt * step;
        let (matched_gamma, offset) = match table.nearest(detected_y) {
            Some(g) if (detected_y - g).abs() <= window => (Some(g), Some(detected_y - g)),
            _ => (None, None),
        };
        out.push(SpikeMatch {
            detected_y,
            matched_gamma,
            offset,
            depth: -vertex,
            predicted: samples[i].predicted_depth,
        });
    }
    Ok(out)
}

/// Landau's zero sum at one point.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct LandauSum {
    pub x: f64,
    pub t: f64,
    pub re: f64,
    pub im: f64,
    /// -(T/2 pi) Lambda(x): where the real part should concentrate.
    pub predicted_re: f64,
    /// Ordinates included (a boundary ordinate counts fully here but is
    /// summed at half weight).
    pub count: usize,
    /// True when T exceeds the table, so the sum is silently incomplete.
    pub truncated: bool,
}

/// Von Mangoldt at a real argument: nonzero only within 1e-9 of an integer
/// prime power.
pub fn von_mangoldt_real(x: f64) -> f64 {
    if x.is_nan() || x <= 1.0 {
        return 0.0;
    }
    let n = x.round();
    if (x - n).abs() <= 1e-9 && n >= 2.0 && n <= u64::MAX as f64 {
        von_mangoldt(n as u64)
    } else {
        0.0
    }
}

/// Sum x^{1/2 + i gamma} over table ordinates 0 < gamma <= T, with the
/// boundary ordinate halved when T lands exactly on one.
pub fn landau_sum(x: f64, t: f64, table: &ZeroTable) -> Result<LandauSum> {
    if !x.is_finite() || x <= 1.0 {
        return Err(Error::InvalidRequest {
            reason: format!("landau sum needs x > 1, got {x}"),
        });
    }
    if table.is_empty() {
        return Err(Error::MissingZeroTable {
            needed_for: String::from("the landau sum"),
        });
    }
    let lx = x.ln();
    let amp = x.sqrt();
    let mut acc = ChunkedComplexSum::new();
    let mut count = 0usize;
    for &g in table.ordinates() {
        if g > t {
            break;
        }
        count += 1;
        let w = if g == t { 0.5 } else { 1.0 };
        let (s, c) = (g * lx).sin_cos();
        acc.add(Complex64::new(amp * w * c, amp * w * s));
    }
    let value = acc.value();
    Ok(LandauSum {
        x,
        t,
        re: value.re,
        im: value.im,
        predicted_re: -(t / (2.0 * PI)) * von_mangoldt_real(x),
        count,
        truncated: t > *table.ordinates().last().unwrap(),
    })
}

/// The indicator kernel [e^{(-eps + i delta) x} - 1]/(-eps + i delta): the
/// shape each zero contributes to the indicator at signed offset delta.  At
/// eps = 0 the real part is sin(delta x)/delta and the imaginary part
/// (1 - cos(delta x))/delta, with the removable value x at the origin.
pub fn indicator_kernel(delta: f64, x: f64, eps: f64) -> Complex64 {
    debug_assert!(x > 0.0);
    let s = Complex64::new(-eps, delta);
    x * cexpm1_over(x * s)
}

/// One zero-side comparison point: the Landau sum at fixed T as x varies.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct ZeroSidePoint {
    pub x: f64,
    pub re: f64,
    pub im: f64,
    pub predicted_re: f64,
}

/// Landau sum traced over a list of x values (empty in, empty out).
pub fn zero_side_trace(table: &ZeroTable, t: f64, xs: &[f64]) -> Result<Vec<ZeroSidePoint>> {
    xs.iter()
        .map(|&x| {
            let l = landau_sum(x, t, table)?;
            Ok(ZeroSidePoint {
                x,
                re: l.re,
                im: l.im,
                predicted_re: l.predicted_re,
            })
        })
        .collect()
}

/// One prime-side comparison point: the complex zeta indicator before
/// taking real parts.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct PrimeSidePoint {
    pub y: f64,
    pub re: f64,
    pub im: f64,
}

/// The complex indicator sum over a grid: prime sum minus main term minus
/// the complex smooth term (1/2) psi((1/2 - iy)/2) - (1/2) log pi.
pub fn prime_side_trace(
    cutoff: &Cutoff,
    mode: EpsilonMode,
    grid: &Grid,
) -> Result<Vec<PrimeSidePoint>> {
    mode.validate()?;
    let eps = mode.epsilon(cutoff);
    let bank = OscillatorBank::build(cutoff, eps, &ResidueFilter::none(), None);
    let sums = bank.scan(grid);
    let mut out = Vec::with_capacity(grid.len());
    for (i, y) in grid.points().enumerate() {
        let main = crate::indicator::main_term(cutoff, eps, y)?;
        let smooth = 0.5 * digamma(Complex64::new(0.25, -y / 2.0))? - 0.5 * PI.ln();
        let v = sums[i] - main - smooth;
        out.push(PrimeSidePoint {
            y,
            re: v.re,
            im: v.im,
        });
    }
    Ok(out)
}

/// Prime-side residual of the origin identity compared against the
/// zero-side prediction -sum_{gamma <= gamma_max} sin(gamma x)/gamma.
pub fn origin_zero_side(table: &ZeroTable, x: f64, gamma_max: f64) -> f64 {
    let mut acc = 0.0;
    for &g in table.ordinates() {
        if g > gamma_max {
            break;
        }
        acc += (g * x).sin() / g;
    }
    -acc
}
