//! Figure-reproduction drivers: each produces the plot-ready CSV panels for
//! one figure plus a JSON manifest of the exact parameters, so an offline
//! plotting tool can regenerate the picture without touching the engine.

use crate::characters::{character_group, Rotation};
use crate::decomp::class_scan;
use crate::error::{Error, Result};
use crate::indicator::IndicatorSample;
use crate::indicator::{pointwise_trace, scan, EpsilonMode, Grid, ScanRequest, Target};
use crate::output::{fmt_f64, fmt_opt_f64, to_json_text, TableDoc};
use crate::primes::Cutoff;
use crate::zeros::{detect_spikes, prime_side_trace, zero_side_trace, SpikeMatch, ZeroTable};
use std::path::{Path, PathBuf};

/// Published first ordinate of zeta, the trace anchor for fig1.
const GAMMA_1: f64 = 14.134_725_141_734_693;

/// First positive ordinate of the mod-5 character with chi(2) = i, as
/// located by this engine's own scans (fixture `chi5_zeros_20.txt`).
const CHI5_GAMMA_1: f64 = 6.171_542;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

impl std::fmt::Display for FigureId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            FigureId::Fig1 => "fig1",
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
        };
        write!(f, "{name}")
    }
}

#[derive(Clone, Debug)]
pub struct FigureRequest {
    pub id: FigureId,
    pub limit: u64,
    pub mode: EpsilonMode,
    pub zeros: Option<ZeroTable>,
    pub out_dir: PathBuf,
}

impl FigureRequest {
    fn echo(&self) -> String {
        format!(
            "zeroscan figure --id {} --limit {} --eps {}",
            self.id, self.limit, self.mode
        )
    }
}

/// Produce every panel for the requested figure; returns the written paths
/// (the manifest last).
pub fn reproduce(req: &FigureRequest) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(&req.out_dir)?;
    match req.id {
        FigureId::Fig1 => fig1(req),
        FigureId::Fig2 => fig2(req),
        FigureId::Fig3 => fig3(req),
        FigureId::Fig4 => fig4(req),
        FigureId::Fig5 => fig5(req),
    }
}

fn require_zeros<'a>(req: &'a FigureRequest, what: &str) -> Result<&'a ZeroTable> {
    req.zeros.as_ref().ok_or_else(|| Error::MissingZeroTable {
        needed_for: format!("{what}; pass --zeros <ordinate table>"),
    })
}

fn write_doc(dir: &Path, name: &str, doc: &TableDoc) -> Result<PathBuf> {
    let path = dir.join(name);
    std::fs::write(&path, doc.to_csv())?;
    Ok(path)
}

fn scan_doc(req: &FigureRequest, samples: &[IndicatorSample], role: &str) -> TableDoc {
    let mut doc = TableDoc::new(&[
        "y",
        "total",
        "prime_sum_re",
        "main_term_re",
        "smooth_term",
        "predicted_depth",
    ]);
    doc.comment(req.echo());
    doc.comment(role);
    for s in samples {
        doc.push_row(vec![
            fmt_f64(s.y),
            fmt_f64(s.total),
            fmt_f64(s.prime_sum_re),
            fmt_f64(s.main_term_re),
            fmt_f64(s.smooth_term),
            fmt_f64(s.predicted_depth),
        ]);
    }
    doc
}

fn crosses_doc(req: &FigureRequest, spikes: &[SpikeMatch], role: &str) -> TableDoc {
    let mut doc = TableDoc::new(&[
        "detected_y",
        "matched_gamma",
        "offset",
        "depth",
        "predicted",
    ]);
    doc.comment(req.echo());
    doc.comment(role);
    for s in spikes {
        doc.push_row(vec![
            fmt_f64(s.detected_y),
            fmt_opt_f64(s.matched_gamma),
            fmt_opt_f64(s.offset),
            fmt_f64(s.depth),
            fmt_f64(s.predicted),
        ]);
    }
    doc
}

/// Pointwise traces at fixed ordinates over an ascending cutoff schedule,
/// flattened into one table keyed by the trace ordinate.
fn trace_doc(
    req: &FigureRequest,
    target: &Target,
    trace_ys: &[f64],
    schedule: &[u64],
    role: &str,
) -> Result<TableDoc> {
    let mut doc = TableDoc::new(&[
        "trace_y",
        "limit",
        "x",
        "total",
        "prime_sum_re",
        "predicted_depth",
    ]);
    doc.comment(req.echo());
    doc.comment(role);
    for &y in trace_ys {
        let samples = pointwise_trace(y, target, req.mode, schedule, false)?;
        for (&limit, s) in schedule.iter().zip(&samples) {
            doc.push_row(vec![
                fmt_f64(y),
                limit.to_string(),
                fmt_f64(Cutoff::new(limit)?.x()),
                fmt_f64(s.total),
                fmt_f64(s.prime_sum_re),
                fmt_f64(s.predicted_depth),
            ]);
        }
    }
    Ok(doc)
}

/// Ascending log-spaced cutoffs from `lo` to `hi` inclusive.
pub fn log_schedule(lo: u64, hi: u64, n: usize) -> Vec<u64> {
    assert!(lo >= 2 && hi >= lo && n >= 2);
    let (llo, lhi) = ((lo as f64).ln(), (hi as f64).ln());
    let mut out: Vec<u64> = (0..n)
        .map(|i| {
            let x = llo + (lhi - llo) * i as f64 / (n - 1) as f64;
            x.exp().round() as u64
        })
        .collect();
    out[0] = lo;
    *out.last_mut().unwrap() = hi;
    out.dedup();
    out
}

fn run_scan(
    req: &FigureRequest,
    target: &Target,
    start: f64,
    stop: f64,
    step: f64,
) -> Result<Vec<IndicatorSample>> {
    scan(&ScanRequest {
        cutoff: Cutoff::new(req.limit)?,
        mode: req.mode,
        target: target.clone(),
        grid: Grid::from_bounds(start, stop, step)?,
    })
}

fn write_manifest(
    req: &FigureRequest,
    body: serde_json::Value,
    files: &[PathBuf],
) -> Result<PathBuf> {
    let names: Vec<String> = files
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    let manifest = serde_json::json!({
        "figure": req.id.to_string(),
        "command": req.echo(),
        "limit": req.limit,
        "eps": req.mode.to_string(),
        "panels": body,
        "files": names,
    });
    let path = req.out_dir.join(format!("{}_manifest.json", req.id));
    std::fs::write(&path, to_json_text(&manifest))?;
    Ok(path)
}

/// Zeta indicator around the origin: one scan over [-2, 54] and pointwise
/// traces at the first ordinate, the origin, and y = 8.
fn fig1(req: &FigureRequest) -> Result<Vec<PathBuf>> {
    let samples = run_scan(req, &Target::Zeta, -2.0, 54.0, 0.01)?;
    let mut files = vec![write_doc(
        &req.out_dir,
        "fig1_scan.csv",
        &scan_doc(
            req,
            &samples,
            "panel: zeta indicator, y in [-2, 54], step 0.01",
        ),
    )?];

    let schedule = log_schedule(100, req.limit, 48);
    let trace_ys = [GAMMA_1, 0.0, 8.0];
    files.push(write_doc(
        &req.out_dir,
        "fig1_traces.csv",
        &trace_doc(
            req,
            &Target::Zeta,
            &trace_ys,
            &schedule,
            "panel: indicator vs cutoff at the first ordinate, the origin, y = 8",
        )?,
    )?);

    if let Some(table) = &req.zeros {
        let spikes = detect_spikes(&samples, table, 0.5)?;
        files.push(write_doc(
            &req.out_dir,
            "fig1_crosses.csv",
            &crosses_doc(
                req,
                &spikes,
                "panel: detected dips matched to the zero table",
            ),
        )?);
    }

    let manifest = write_manifest(
        req,
        serde_json::json!({
            "scan": {"target": "zeta", "y_min": -2.0, "y_max": 54.0, "step": 0.01},
            "traces": {"ordinates": trace_ys, "cutoffs": schedule},
            "crosses": req.zeros.is_some(),
        }),
        &files,
    )?;
    files.push(manifest);
    Ok(files)
}

/// Zeta indicator high up: the window [1e6, 1e6 + 10], with cross marks
/// from a supplied table of ordinates near that height.
fn fig2(req: &FigureRequest) -> Result<Vec<PathBuf>> {
    let table = require_zeros(req, "fig2 cross marks need zero ordinates near 1e6")?;
    let samples = run_scan(req, &Target::Zeta, 1.0e6, 1.0e6 + 10.0, 0.005)?;
    let mut files = vec![write_doc(
        &req.out_dir,
        "fig2_scan.csv",
        &scan_doc(
            req,
            &samples,
            "panel: zeta indicator, y in [1e6, 1e6+10], step 0.005",
        ),
    )?];
    let spikes = detect_spikes(&samples, table, 0.5)?;
    files.push(write_doc(
        &req.out_dir,
        "fig2_crosses.csv",
        &crosses_doc(req, &spikes, "panel: detected dips vs supplied ordinates"),
    )?);
    let manifest = write_manifest(
        req,
        serde_json::json!({
            "scan": {"target": "zeta", "y_min": 1.0e6, "y_max": 1.0e6 + 10.0, "step": 0.005},
            "zeros": table.source(),
        }),
        &files,
    )?;
    files.push(manifest);
    Ok(files)
}

/// Dirichlet indicator for the mod-5 character with chi(2) = i over
/// [-25, 25], plus traces at its first ordinate, the origin, and y = 10.
fn fig3(req: &FigureRequest) -> Result<Vec<PathBuf>> {
    let group = character_group(5)?;
    let found = group.find_by_rotation(2, Rotation::new(1, 4));
    let chi = found.first().ok_or_else(|| Error::InvalidRequest {
        reason: String::from("no character mod 5 with chi(2) = i"),
    })?;
    let target = Target::Character {
        modulus: 5,
        label: chi.label(),
    };

    let samples = run_scan(req, &target, -25.0, 25.0, 0.01)?;
    let mut files = vec![write_doc(
        &req.out_dir,
        "fig3_scan.csv",
        &scan_doc(
            req,
            &samples,
            "panel: L(s, chi mod 5) indicator, y in [-25, 25], step 0.01",
        ),
    )?];

    let gamma_chi = req
        .zeros
        .as_ref()
        .and_then(|t| t.ordinates().iter().copied().find(|&g| g > 0.0))
        .unwrap_or(CHI5_GAMMA_1);
    let schedule = log_schedule(100, req.limit, 48);
    let trace_ys = [gamma_chi, 0.0, 10.0];
    files.push(write_doc(
        &req.out_dir,
        "fig3_traces.csv",
        &trace_doc(
            req,
            &target,
            &trace_ys,
            &schedule,
            "panel: indicator vs cutoff at the first ordinate, the origin, y = 10",
        )?,
    )?);

    if let Some(table) = &req.zeros {
        let spikes = detect_spikes(&samples, table, 0.5)?;
        files.push(write_doc(
            &req.out_dir,
            "fig3_crosses.csv",
            &crosses_doc(
                req,
                &spikes,
                "panel: detected dips matched to the zero table",
            ),
        )?);
    }

    let manifest = write_manifest(
        req,
        serde_json::json!({
            "character": {"modulus": 5, "label": chi.label(), "chi_of_2": "i"},
            "scan": {"y_min": -25.0, "y_max": 25.0, "step": 0.01},
            "traces": {"ordinates": trace_ys, "cutoffs": schedule},
            "crosses": req.zeros.is_some(),
        }),
        &files,
    )?;
    files.push(manifest);
    Ok(files)
}

/// Quadratic decomposition mod 4: the two residue-class indicators over
/// [-2, 32] with exact compensation.
fn fig4(req: &FigureRequest) -> Result<Vec<PathBuf>> {
    let cutoff = Cutoff::new(req.limit)?;
    let grid = Grid::from_bounds(-2.0, 32.0, 0.01)?;
    let mut files = Vec::new();
    for class in [1u64, 3] {
        let samples = class_scan(&cutoff, req.mode, 4, class, &grid, true)?;
        let mut doc = TableDoc::new(&[
            "y",
            "total",
            "class_sum_re",
            "noise_share",
            "smooth_even",
            "smooth_odd",
            "compensation",
        ]);
        doc.comment(req.echo());
        doc.comment(format!(
            "panel: class {class} mod 4 indicator, exact compensation, y in [-2, 32], step 0.01"
        ));
        for s in &samples {
            doc.push_row(vec![
                fmt_f64(s.y),
                fmt_f64(s.total),
                fmt_f64(s.class_sum_re),
                fmt_f64(s.noise_share),
                fmt_f64(s.smooth_even),
                fmt_f64(s.smooth_odd),
                fmt_f64(s.compensation),
            ]);
        }
        files.push(write_doc(
            &req.out_dir,
            &format!("fig4_class{class}.csv"),
            &doc,
        )?);
    }
    let manifest = write_manifest(
        req,
        serde_json::json!({
            "modulus": 4,
            "classes": [1, 3],
            "scan": {"y_min": -2.0, "y_max": 32.0, "step": 0.01},
            "compensation": "exact",
        }),
        &files,
    )?;
    files.push(manifest);
    Ok(files)
}

/// Real vs imaginary parts: the Landau sum at T = 500 over x near 2
/// (zero side) against the complex indicator over an ordinate grid
/// (prime side).
fn fig5(req: &FigureRequest) -> Result<Vec<PathBuf>> {
    let table = require_zeros(req, "fig5 needs zero ordinates up to T = 500")?;
    let t = 500.0;

    let xs: Vec<f64> = (0..=600).map(|i| 1.7 + i as f64 * 0.001).collect();
    let zero_side = zero_side_trace(table, t, &xs)?;
    let mut zdoc = TableDoc::new(&["x", "re", "im", "predicted_re"]);
    zdoc.comment(req.echo());
    zdoc.comment("panel: Landau sum at T = 500 over x in [1.7, 2.3]");
    for p in &zero_side {
        zdoc.push_row(vec![
            fmt_f64(p.x),
            fmt_f64(p.re),
            fmt_f64(p.im),
            fmt_f64(p.predicted_re),
        ]);
    }
    let mut files = vec![write_doc(&req.out_dir, "fig5_zero_side.csv", &zdoc)?];

    let cutoff = Cutoff::new(req.limit)?;
    let grid = Grid::from_bounds(0.0, 30.0, 0.01)?;
    let prime_side = prime_side_trace(&cutoff, req.mode, &grid)?;
    let mut pdoc = TableDoc::new(&["y", "re", "im"]);
    pdoc.comment(req.echo());
    pdoc.comment("panel: complex zeta indicator over y in [0, 30]");
    for p in &prime_side {
        pdoc.push_row(vec![fmt_f64(p.y), fmt_f64(p.re), fmt_f64(p.im)]);
    }
    files.push(write_doc(&req.out_dir, "fig5_prime_side.csv", &pdoc)?);

    let manifest = write_manifest(
        req,
        serde_json::json!({
            "zero_side": {"t": t, "x_min": 1.7, "x_max": 2.3, "step": 0.001, "zeros": table.source()},
            "prime_side": {"y_min": 0.0, "y_max": 30.0, "step": 0.01},
        }),
        &files,
    )?;
    files.push(manifest);
    Ok(files)
}
