//! The unsmoothed zero indicators, evaluated pointwise and over grids.
//!
//! The indicator for a target L-function at ordinate y is
//!
//! ```text
//! total(y) = prime_sum_re - main_term_re - smooth_term
//! ```
//!
//! where the prime sum runs over p^n <= limit with weights
//! chi(p^n) (log p) p^{-n(1/2+eps)} e^{-i y n log p}, the main term
//! e^{x(1/2-eps-iy)}/(1/2-eps-iy) is present only for zeta (the pole of
//! zeta at s = 1), and the smooth term is the archimedean density from
//! `digamma::smooth_density`. Away from zero ordinates the total stays
//! O(small); at a zero it dips by roughly `predicted_depth`.
//!
//! Scans evaluate the oscillatory sum with a per-term phase recurrence that
//! is restarted from scratch every `PHASE_BLOCK` grid points, which caps the
//! recurrence drift at PHASE_BLOCK * eps_machine per coefficient and makes
//! blocks independent, so results are bit-identical for any thread count.

use crate::characters::{character_group, DirichletCharacter};
use crate::digamma::{digamma, smooth_density, SmoothParity, SmoothTermSpec};
use crate::error::{Error, Result};
use crate::primes::{prime_powers, Cutoff, ResidueFilter};
use crate::sum::{cexpm1_over, ChunkedComplexSum, Compensated};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Grid points between phase-recurrence restarts in `OscillatorBank::scan`.
pub const PHASE_BLOCK: usize = 512;

/// Hard cap on scan grid size.
pub const MAX_GRID_POINTS: u64 = 100_000_000;

/// Smallest cutoff for which the zeta indicator is defined (x > 1 needed by
/// the main-term normalization; the theorem itself asks for x > e).
pub const MIN_ZETA_LIMIT: u64 = 3;

pub(crate) fn cis(theta: f64) -> Complex64 {
    let (s, c) = theta.sin_cos();
    Complex64::new(c, s)
}

/// Choice of the offset eps in the indicator exponent 1/2 + eps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EpsilonMode {
    /// eps = 0: the dropped-offset mode used for all figure reproduction.
    Zero,
    /// eps_x = 3 log x / x, the theorem-exact offset for cutoff x = log limit.
    Paper,
    /// A fixed nonnegative offset.
    Fixed(f64),
}

impl EpsilonMode {
    pub fn validate(&self) -> Result<()> {
        if let EpsilonMode::Fixed(e) = self {
            if !e.is_finite() || *e < 0.0 {
                return Err(Error::InvalidEpsilon {
                    given: format!("{e}"),
                });
            }
        }
        Ok(())
    }

    pub fn epsilon(&self, cutoff: &Cutoff) -> f64 {
        match self {
            EpsilonMode::Zero => 0.0,
            EpsilonMode::Paper => 3.0 * cutoff.x().ln() / cutoff.x(),
            EpsilonMode::Fixed(e) => *e,
        }
    }

    /// Spike depth the indicator should reach at a zero ordinate:
    /// (1 - e^{-eps x})/eps, which degenerates to x at eps = 0.
    pub fn predicted_depth(&self, cutoff: &Cutoff) -> f64 {
        let eps = self.epsilon(cutoff);
        if eps == 0.0 {
            cutoff.x()
        } else {
            -(-eps * cutoff.x()).exp_m1() / eps
        }
    }
}

impl std::fmt::Display for EpsilonMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EpsilonMode::Zero => write!(f, "zero"),
            EpsilonMode::Paper => write!(f, "paper"),
            EpsilonMode::Fixed(e) => write!(f, "{e}"),
        }
    }
}

/// A uniform ordinate grid y_i = start + i * step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    start: f64,
    step: f64,
    count: usize,
}

impl Grid {
    pub fn from_bounds(start: f64, stop: f64, step: f64) -> Result<Grid> {
        if !start.is_finite() || !stop.is_finite() || !step.is_finite() {
            return Err(Error::InvalidGrid {
                reason: "bounds and step must be finite".into(),
            });
        }
        if step <= 0.0 {
            return Err(Error::InvalidGrid {
                reason: format!("step must be positive, got {step}"),
            });
        }
        if stop < start {
            return Err(Error::InvalidGrid {
                reason: format!("stop {stop} below start {start}"),
            });
        }
        // The 1e-9 nudge keeps an intended endpoint that lands a hair under
        // an integer step count due to rounding.
        let steps = ((stop - start) / step + 1e-9).floor();
        let count = steps as u64 + 1;
        if count > MAX_GRID_POINTS {
            return Err(Error::GridTooLarge {
                points: count,
                max: MAX_GRID_POINTS,
            });
        }
        Ok(Grid {
            start,
            step,
            count: count as usize,
        })
    }

    /// Explicit start/step/count form, for stitching segmented scans.
    pub fn from_parts(start: f64, step: f64, count: usize) -> Result<Grid> {
        if !start.is_finite() || !step.is_finite() || step <= 0.0 {
            return Err(Error::InvalidGrid {
                reason: format!("need finite start and positive step, got {start}, {step}"),
            });
        }
        if count as u64 > MAX_GRID_POINTS {
            return Err(Error::GridTooLarge {
                points: count as u64,
                max: MAX_GRID_POINTS,
            });
        }
        Ok(Grid { start, step, count })
    }

    pub fn singleton(y: f64) -> Grid {
        Grid {
            start: y,
            step: 1.0,
            count: 1,
        }
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// i-th point, recomputed from the origin so no error accumulates.
    pub fn point(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.point(i))
    }
}

/// What the scan is aimed at.
#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    Zeta,
    Character { modulus: u64, label: usize },
}

impl std::fmt::Display for Target {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Target::Zeta => write!(f, "zeta"),
            Target::Character { modulus, label } => write!(f, "char:{modulus}:{label}"),
        }
    }
}

/// One evaluated indicator point with its term breakdown.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct IndicatorSample {
    pub y: f64,
    pub prime_sum_re: f64,
    pub main_term_re: f64,
    pub smooth_term: f64,
    pub total: f64,
    pub predicted_depth: f64,
}

/// A full scan specification; everything needed to reproduce the output.
#[derive(Clone, Debug)]
pub struct ScanRequest {
    pub cutoff: Cutoff,
    pub mode: EpsilonMode,
    pub target: Target,
    pub grid: Grid,
}

/// The Dirichlet-polynomial side baked into scan-ready arrays: one
/// (frequency, complex coefficient) pair per prime power.
pub(crate) struct OscillatorBank {
    freqs: Vec<f64>,
    coeffs: Vec<Complex64>,
}

impl OscillatorBank {
    /// Precompute coefficients chi(p^n) (log p) p^{-n(1/2+eps)}, dropping
    /// vanished ones; `filter` restricts to residue classes first.
    pub(crate) fn build(
        cutoff: &Cutoff,
        eps: f64,
        filter: &ResidueFilter,
        twist: Option<&DirichletCharacter>,
    ) -> OscillatorBank {
        let mut freqs = Vec::new();
        let mut coeffs = Vec::new();
        let stream = prime_powers(cutoff, filter).expect("cutoff was validated at construction");
        for term in stream {
            let amp =
                cutoff.boundary_scale(term.value) * term.weight * (-(0.5 + eps) * term.freq).exp();
            let coeff = match twist {
                None => Complex64::new(amp, 0.0),
                Some(chi) => match chi.rotation(term.value as i64) {
                    Some(rot) => rot.to_complex() * amp,
                    None => continue,
                },
            };
            freqs.push(term.freq);
            coeffs.push(coeff);
        }
        OscillatorBank { freqs, coeffs }
    }

    /// Direct evaluation of sum_k coeff_k e^{-i y freq_k}.
    pub(crate) fn eval(&self, y: f64) -> Complex64 {
        let mut acc = ChunkedComplexSum::new();
        for (f, c) in self.freqs.iter().zip(&self.coeffs) {
            acc.add(c * cis(-y * f));
        }
        acc.value()
    }

    /// Grid scan with blockwise phase recurrence; bit-identical for any
    /// rayon thread count because each block is self-contained.
    pub(crate) fn scan(&self, grid: &Grid) -> Vec<Complex64> {
        let n = grid.len();
        if n == 0 {
            return Vec::new();
        }
        let rot: Vec<Complex64> = self.freqs.iter().map(|f| cis(-grid.step() * f)).collect();
        let nblocks = n.div_ceil(PHASE_BLOCK);
        let blocks: Vec<Vec<Complex64>> = (0..nblocks)
            .into_par_iter()
            .map(|b| {
                let i0 = b * PHASE_BLOCK;
                let y0 = grid.point(i0);
                let count = PHASE_BLOCK.min(n - i0);
                let mut phases: Vec<Complex64> = self
                    .freqs
                    .iter()
                    .zip(&self.coeffs)
                    .map(|(f, c)| c * cis(-y0 * f))
                    .collect();
                let mut out = Vec::with_capacity(count);
                for step in 0..count {
                    let mut acc = ChunkedComplexSum::new();
                    for p in &phases {
                        acc.add(*p);
                    }
                    out.push(acc.value());
                    if step + 1 < count {
                        for (p, r) in phases.iter_mut().zip(&rot) {
                            *p *= r;
                        }
                    }
                }
                out
            })
            .collect();
        blocks.concat()
    }
}

/// The pole term of the zeta indicator, e^{x(1/2-eps-iy)}/(1/2-eps-iy).
pub fn main_term(cutoff: &Cutoff, eps: f64, y: f64) -> Result<Complex64> {
    let s = Complex64::new(0.5 - eps, -y);
    if s == Complex64::new(0.0, 0.0) {
        return Err(Error::InvalidRequest {
            reason: "main term is singular at eps = 1/2, y = 0".into(),
        });
    }
    Ok((cutoff.x() * s).exp() / s)
}

/// The exponential noise N of the decomposition's principal row:
/// [X^{1/2-eps-iy} - 1]/(1/2-eps-iy) - [X^{-1/2-eps-iy} - 1]/(1/2+eps+iy).
/// Both pieces are removable-singularity kernels, so this is total.
pub fn exponential_noise(cutoff: &Cutoff, eps: f64, y: f64) -> Complex64 {
    let term = |s: Complex64| cutoff.x() * cexpm1_over(cutoff.x() * s);
    term(Complex64::new(0.5 - eps, -y)) + term(Complex64::new(-0.5 - eps, -y))
}

fn zeta_smooth_spec() -> SmoothTermSpec {
    SmoothTermSpec::new(SmoothParity::Even, 1).expect("modulus 1 is valid")
}

fn require_zeta_cutoff(cutoff: &Cutoff) -> Result<()> {
    if cutoff.limit() < MIN_ZETA_LIMIT {
        return Err(Error::InvalidCutoff {
            limit: cutoff.limit(),
            min: MIN_ZETA_LIMIT,
        });
    }
    Ok(())
}

/// Scan the zeta indicator over a grid.
pub fn zeta_scan(cutoff: &Cutoff, mode: EpsilonMode, grid: &Grid) -> Result<Vec<IndicatorSample>> {
    require_zeta_cutoff(cutoff)?;
    mode.validate()?;
    let eps = mode.epsilon(cutoff);
    let depth = mode.predicted_depth(cutoff);
    let bank = OscillatorBank::build(cutoff, eps, &ResidueFilter::none(), None);
    let prime = bank.scan(grid);
    let spec = zeta_smooth_spec();
    let mut out = Vec::with_capacity(grid.len());
    for (i, ps) in prime.into_iter().enumerate() {
        let y = grid.point(i);
        let main_re = main_term(cutoff, eps, y)?.re;
        let smooth = smooth_density(y, &spec);
        out.push(IndicatorSample {
            y,
            prime_sum_re: ps.re,
            main_term_re: main_re,
            smooth_term: smooth,
            total: ps.re - main_re - smooth,
            predicted_depth: depth,
        });
    }
    Ok(out)
}

/// Scan the indicator of L(s, chi) for a primitive chi over a grid.
/// There is no main term: the sample's `main_term_re` is identically 0, so
/// for the character mod 1 the totals differ from `zeta_scan` exactly by
/// the main term.
pub fn dirichlet_scan(
    cutoff: &Cutoff,
    mode: EpsilonMode,
    grid: &Grid,
    chi: &DirichletCharacter,
) -> Result<Vec<IndicatorSample>> {
    if !chi.is_primitive() {
        return Err(Error::NonPrimitive {
            modulus: chi.modulus(),
            label: chi.label(),
            conductor: chi.conductor(),
        });
    }
    mode.validate()?;
    let eps = mode.epsilon(cutoff);
    let depth = mode.predicted_depth(cutoff);
    let bank = OscillatorBank::build(cutoff, eps, &ResidueFilter::none(), Some(chi));
    let prime = bank.scan(grid);
    let spec = SmoothTermSpec::new(SmoothParity::from_parity(chi.parity()), chi.modulus())?;
    let mut out = Vec::with_capacity(grid.len());
    for (i, ps) in prime.into_iter().enumerate() {
        let y = grid.point(i);
        let smooth = smooth_density(y, &spec);
        out.push(IndicatorSample {
            y,
            prime_sum_re: ps.re,
            main_term_re: 0.0,
            smooth_term: smooth,
            total: ps.re - smooth,
            predicted_depth: depth,
        });
    }
    Ok(out)
}

/// Single-point zeta indicator (builds its own term table; use `zeta_scan`
/// for grids).
pub fn zeta_indicator(y: f64, cutoff: &Cutoff, mode: EpsilonMode) -> Result<IndicatorSample> {
    Ok(zeta_scan(cutoff, mode, &Grid::singleton(y))?[0])
}

/// Single-point Dirichlet indicator for a primitive character.
pub fn dirichlet_indicator(
    y: f64,
    cutoff: &Cutoff,
    mode: EpsilonMode,
    chi: &DirichletCharacter,
) -> Result<IndicatorSample> {
    Ok(dirichlet_scan(cutoff, mode, &Grid::singleton(y), chi)?[0])
}

/// Resolve a scan target to an optional character (None = zeta).
pub fn resolve_target(target: &Target) -> Result<Option<DirichletCharacter>> {
    match target {
        Target::Zeta => Ok(None),
        Target::Character { modulus, label } => {
            let table = character_group(*modulus)?;
            Ok(Some(table.character(*label)?.clone()))
        }
    }
}

/// Run a full scan request.
pub fn scan(request: &ScanRequest) -> Result<Vec<IndicatorSample>> {
    match resolve_target(&request.target)? {
        None => zeta_scan(&request.cutoff, request.mode, &request.grid),
        Some(chi) => dirichlet_scan(&request.cutoff, request.mode, &request.grid, &chi),
    }
}

/// Indicator at fixed y for an ascending schedule of cutoffs, consuming the
/// prime stream once. In `Paper` mode the offset (hence every amplitude)
/// changes with the cutoff, so the sum is re-evaluated from the stored raw
/// terms; in `Zero`/`Fixed` modes terms are folded in incrementally.
pub fn pointwise_trace(
    y: f64,
    target: &Target,
    mode: EpsilonMode,
    schedule: &[u64],
    halve_boundary: bool,
) -> Result<Vec<IndicatorSample>> {
    mode.validate()?;
    if schedule.is_empty() {
        return Ok(Vec::new());
    }
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidRequest {
            reason: "cutoff schedule must be strictly ascending".into(),
        });
    }
    let chi = resolve_target(target)?;
    let is_zeta = chi.is_none();
    let min_limit = if is_zeta { MIN_ZETA_LIMIT } else { 2 };
    if schedule[0] < min_limit {
        return Err(Error::InvalidCutoff {
            limit: schedule[0],
            min: min_limit,
        });
    }

    let max_cutoff = Cutoff::new(*schedule.last().unwrap())?;
    // Raw terms: (value, freq, chi(value) * log p), accumulated once.
    let mut raw: Vec<(u64, f64, Complex64)> = Vec::new();
    let mut stream = prime_powers(&max_cutoff, &ResidueFilter::none())?;
    let mut pending: Option<(u64, f64, Complex64)> = None;

    // Fixed-eps incremental state.
    let fixed_eps = match mode {
        EpsilonMode::Paper => None,
        _ => Some(mode.epsilon(&max_cutoff)),
    };
    let mut running = ChunkedComplexSum::new();

    let smooth = match &chi {
        None => smooth_density(y, &zeta_smooth_spec()),
        Some(c) => smooth_density(
            y,
            &SmoothTermSpec::new(SmoothParity::from_parity(c.parity()), c.modulus())?,
        ),
    };

    let mut out = Vec::with_capacity(schedule.len());
    for &limit in schedule {
        let mut cutoff = Cutoff::new(limit)?;
        if halve_boundary {
            cutoff = cutoff.with_halved_boundary();
        }
        let eps = mode.epsilon(&cutoff);

        // Pull stream terms up to this cutoff; boundary terms (value ==
        // limit) are absorbed at half weight into the emitted value and at
        // full weight into the running state afterwards.
        let mut boundary: Vec<(f64, Complex64)> = Vec::new();
        loop {
            let term = match pending.take() {
                Some(t) => Some(t),
                None => stream.next().map(|t| {
                    let w = match &chi {
                        None => Complex64::new(t.weight, 0.0),
                        Some(c) => match c.rotation(t.value as i64) {
                            Some(rot) => rot.to_complex() * t.weight,
                            None => Complex64::new(0.0, 0.0),
                        },
                    };
                    (t.value, t.freq, w)
                }),
            };
            let Some((value, freq, w)) = term else { break };
            if value > limit {
                pending = Some((value, freq, w));
                break;
            }
            if w == Complex64::new(0.0, 0.0) {
                continue;
            }
            raw.push((value, freq, w));
            if let Some(e) = fixed_eps {
                let phase = w * (-(0.5 + e) * freq).exp() * cis(-y * freq);
                if value == limit {
                    boundary.push((freq, phase));
                } else {
                    running.add(phase);
                }
            }
        }

        let prime_sum = match fixed_eps {
            Some(_) => {
                let mut acc = running.clone();
                for &(_, phase) in &boundary {
                    acc.add(phase * cutoff.boundary_scale(limit));
                }
                // Fold boundary terms into the running state at full weight
                // for the next, larger cutoff.
                for (_, phase) in boundary {
                    running.add(phase);
                }
                acc.value()
            }
            None => {
                let mut acc = ChunkedComplexSum::new();
                for &(value, freq, w) in &raw {
                    let amp = cutoff.boundary_scale(value) * (-(0.5 + eps) * freq).exp();
                    acc.add(w * amp * cis(-y * freq));
                }
                acc.value()
            }
        };

        let main_re = if is_zeta {
            main_term(&cutoff, eps, y)?.re
        } else {
            0.0
        };
        out.push(IndicatorSample {
            y,
            prime_sum_re: prime_sum.re,
            main_term_re: main_re,
            smooth_term: smooth,
            total: prime_sum.re - main_re - smooth,
            predicted_depth: mode.predicted_depth(&cutoff),
        });
    }
    Ok(out)
}

/// The y = 0 identity: sum over p^n <= limit of (log p)/p^{n/2} minus
/// 4 sinh(x/2) + (1/2) psi(1/4) - (log pi)/2. The result should stay far
/// below the trivial O(x^2) bound; it equals the zeta indicator total at
/// y = 0, eps = 0, plus 2 e^{-x/2}.
pub fn origin_identity(cutoff: &Cutoff) -> Result<f64> {
    require_zeta_cutoff(cutoff)?;
    let mut acc = Compensated::new();
    for term in prime_powers(cutoff, &ResidueFilter::none())? {
        let w = cutoff.boundary_scale(term.value) * term.weight;
        acc.add(w / (term.value as f64).sqrt());
    }
    let psi_quarter = digamma(Complex64::new(0.25, 0.0))?.re;
    Ok(acc.value() - 4.0 * (cutoff.x() / 2.0).sinh() - 0.5 * psi_quarter + 0.5 * PI.ln())
}
