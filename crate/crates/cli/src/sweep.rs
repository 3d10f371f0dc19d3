//! Phase-diagram sweeps over (U, mu) or (U, nu) grids.

use std::io::Write;

use hhf_core::free_energy::{FreeEnergy, PhaseRecord};
use hhf_core::{Error, ModelPoint, Result};
use rayon::prelude::*;
use serde::Serialize;

use crate::classify::{invert_nu, NuOutcome};
use crate::fmt::{g17, json_g17, opt_g17, Grid};
use crate::Format;

pub const SWEEP_HEADER: [&str; 11] = [
    "U",
    "mu",
    "nu",
    "phase",
    "f_p",
    "f_f",
    "f_af",
    "m_winner",
    "n_f_solutions",
    "n_af_solutions",
    "error",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coordinate {
    Mu,
    Nu,
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub u_range: Grid,
    /// mu or nu values, depending on `coordinate`. Bounds may refer to U/2.
    pub second_range: Grid,
    pub coordinate: Coordinate,
    pub output_format: Format,
    /// Worker threads; 0 picks the rayon default.
    pub parallelism: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let dom = |e: String| Error::Domain(e);
        self.u_range.validate(0.0).map_err(dom)?;
        for u in self.u_range.values(0.0) {
            if !(u > 0.0 && u.is_finite()) {
                return Err(Error::Domain(format!("U must be positive, got {u}")));
            }
            self.second_range.validate(u).map_err(dom)?;
        }
        Ok(())
    }

    /// Grid points in U-major order.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for u in self.u_range.values(0.0) {
            for x in self.second_range.values(u) {
                out.push((u, x));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "U")]
    pub u: f64,
    pub mu: Option<f64>,
    pub nu: Option<f64>,
    pub phase: String,
    pub f_p: Option<f64>,
    pub f_f: Option<f64>,
    pub f_af: Option<f64>,
    pub m_winner: Option<f64>,
    pub n_f_solutions: Option<usize>,
    pub n_af_solutions: Option<usize>,
    pub error: String,
}

impl SweepRow {
    fn from_record(r: &PhaseRecord, mu: f64, nu: f64, phase: &str) -> Self {
        Self {
            u: r.at.u,
            mu: Some(mu),
            nu: Some(nu),
            phase: phase.to_string(),
            f_p: Some(r.f_p),
            f_f: r.f_f,
            f_af: r.f_af,
            m_winner: Some(r.winner_magnetization),
            n_f_solutions: Some(r.solution_inventory.n_f()),
            n_af_solutions: Some(r.solution_inventory.n_af()),
            error: String::new(),
        }
    }

    fn failed(u: f64, mu: Option<f64>, nu: Option<f64>, e: Error) -> Self {
        Self {
            u,
            mu,
            nu,
            phase: String::new(),
            f_p: None,
            f_f: None,
            f_af: None,
            m_winner: None,
            n_f_solutions: None,
            n_af_solutions: None,
            error: e.to_string(),
        }
    }

    pub fn is_err(&self) -> bool {
        !self.error.is_empty()
    }

    fn csv_fields(&self) -> [String; 11] {
        let n = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
        [
            g17(self.u),
            opt_g17(self.mu),
            opt_g17(self.nu),
            self.phase.clone(),
            opt_g17(self.f_p),
            opt_g17(self.f_f),
            opt_g17(self.f_af),
            opt_g17(self.m_winner),
            n(self.n_f_solutions),
            n(self.n_af_solutions),
            self.error.clone(),
        ]
    }
}

fn eval_point(fe: &FreeEnergy, coord: Coordinate, u: f64, x: f64) -> SweepRow {
    match coord {
        Coordinate::Mu => {
            let r = ModelPoint::new(u, x).and_then(|at| fe.classify(at));
            match r {
                Ok(r) => SweepRow::from_record(&r, x, r.winner_doping, r.phase.as_str()),
                Err(e) => SweepRow::failed(u, Some(x), None, e),
            }
        }
        Coordinate::Nu => match invert_nu(fe, u, x) {
            Ok(NuOutcome::Pure { mu, record }) => SweepRow::from_record(&record, mu, x, record.phase.as_str()),
            Ok(NuOutcome::Mixed { report, record }) => SweepRow::from_record(&record, report.mu_star, x, "MIXED"),
            Err(e) => SweepRow::failed(u, None, Some(x), e),
        },
    }
}

/// Runs `f` on a pool with `parallelism` threads (0 = rayon default).
pub fn with_pool<T: Send>(parallelism: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

pub fn sweep_rows(fe: &FreeEnergy, spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let pts = spec.points();
    let coord = spec.coordinate;
    with_pool(spec.parallelism, || pts.par_iter().map(|&(u, x)| eval_point(fe, coord, u, x)).collect())
}

pub fn write_sweep<W: Write>(rows: &[SweepRow], format: Format, out: W) -> std::io::Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(SWEEP_HEADER)?;
            for r in rows {
                w.write_record(r.csv_fields())?;
            }
            w.flush()
        }
        Format::Json => {
            let v = json_g17(serde_json::to_value(rows).map_err(std::io::Error::other)?);
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, &v).map_err(std::io::Error::other)?;
            writeln!(out)
        }
    }
}

/// Evaluates and writes the sweep; returns the number of failed points.
pub fn cmd_sweep<W: Write>(fe: &FreeEnergy, spec: &SweepSpec, out: W) -> Result<usize> {
    let rows = sweep_rows(fe, spec)?;
    write_sweep(&rows, spec.output_format, out).map_err(|e| Error::Internal(format!("write failed: {e}")))?;
    Ok(rows.iter().filter(|r| r.is_err()).count())
}
