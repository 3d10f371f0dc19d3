//! DOS tables, boundary traces and numeric-vs-asymptotic comparisons.

use std::f64::consts::PI;
use std::io::Write;

use hhf_core::asymptotics::{
    f_af_large_u, f_af_small_u, f_at_mu_ii, mu_i_app, mu_ii_app, mu_iii_app, nu_i_f, nu_ii_f, nu_ii_p, nu_iii_p,
    small_u_scale, SeriesValue,
};
use hhf_core::boundary::{Boundary, BoundaryKind, BoundaryPoint};
use hhf_core::dos::{n0, series_near0, series_near4};
use hhf_core::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

use crate::fmt::{g17, json_g17, opt_g17};
use crate::sweep::with_pool;
use crate::Format;

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Internal(format!("write failed: {e}"))
}

fn write_table<W: Write, T: Serialize>(
    header: &[&str],
    rows: &[Vec<String>],
    json: &T,
    format: Format,
    mut out: W,
) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(header).map_err(io_err)?;
            for r in rows {
                w.write_record(r).map_err(io_err)?;
            }
            w.flush().map_err(io_err)
        }
        Format::Json => {
            let v = json_g17(serde_json::to_value(json).map_err(io_err)?);
            serde_json::to_writer_pretty(&mut out, &v).map_err(io_err)?;
            writeln!(out).map_err(io_err)
        }
    }
}

// Where the truncated expansions are worth printing.
const NEAR0_WINDOW: f64 = 1.0;
const NEAR4_WINDOW: f64 = 3.0;

pub const DOS_HEADER: [&str; 4] = ["eps", "n0", "series_near0", "series_near4"];

#[derive(Debug, Clone, Serialize)]
pub struct DosRow {
    pub eps: f64,
    pub n0: f64,
    pub series_near0: Option<f64>,
    pub series_near4: Option<f64>,
}

pub fn dos_rows(eps: &[f64]) -> Result<Vec<DosRow>> {
    if let Some(e) = eps.iter().find(|e| **e == 0.0 || !e.is_finite()) {
        return Err(Error::Domain(format!("DOS grid must avoid 0 and be finite, got {e}")));
    }
    Ok(eps
        .iter()
        .map(|&e| {
            let a = e.abs();
            DosRow {
                eps: e,
                n0: n0(e),
                series_near0: (a <= NEAR0_WINDOW).then(|| series_near0(e)),
                series_near4: (NEAR4_WINDOW..=4.0).contains(&a).then(|| series_near4(e)),
            }
        })
        .collect())
}

pub fn cmd_dos<W: Write>(eps: &[f64], format: Format, out: W) -> Result<()> {
    let rows = dos_rows(eps)?;
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![g17(r.eps), g17(r.n0), opt_g17(r.series_near0), opt_g17(r.series_near4)])
        .collect();
    write_table(&DOS_HEADER, &table, &rows, format, out)
}

pub fn mu_app(kind: BoundaryKind, u: f64) -> Result<SeriesValue> {
    match kind {
        BoundaryKind::AF_F => mu_i_app(u),
        BoundaryKind::F_P => mu_ii_app(u),
        BoundaryKind::AF_P => mu_iii_app(u),
    }
}

/// Crossing tolerance used when none is given. The F/P free energies differ
/// only at order (4 pi - U)^4, so that interface needs a much tighter bracket.
pub fn default_tol(kind: BoundaryKind) -> f64 {
    match kind {
        BoundaryKind::F_P => 1e-15,
        _ => 1e-11,
    }
}

pub fn crossings(b: &Boundary, kind: BoundaryKind, grid: &[f64], tol: f64, parallelism: usize) -> Result<Vec<Result<BoundaryPoint>>> {
    with_pool(parallelism, || grid.par_iter().map(|&u| b.crossing_tol(u, kind, tol)).collect())
}

pub const BOUNDARY_HEADER: [&str; 8] = ["U", "mu_star", "nu_low", "nu_high", "f_crossing", "mu_app", "abs_err", "error"];

#[derive(Debug, Clone, Serialize)]
pub struct BoundaryRow {
    #[serde(rename = "U")]
    pub u: f64,
    pub mu_star: Option<f64>,
    pub nu_low: Option<f64>,
    pub nu_high: Option<f64>,
    pub f_crossing: Option<f64>,
    pub mu_app: Option<f64>,
    pub abs_err: Option<f64>,
    pub exploratory: Option<bool>,
    pub error: String,
}

pub fn boundary_rows(b: &Boundary, kind: BoundaryKind, grid: &[f64], tol: f64, parallelism: usize) -> Result<Vec<BoundaryRow>> {
    let res = crossings(b, kind, grid, tol, parallelism)?;
    Ok(grid
        .iter()
        .zip(res)
        .map(|(&u, r)| {
            let app = mu_app(kind, u).ok().map(|s| s.value);
            match r {
                Ok(p) => BoundaryRow {
                    u,
                    mu_star: Some(p.mu_star),
                    nu_low: Some(p.doping_low),
                    nu_high: Some(p.doping_high),
                    f_crossing: Some(p.f_at_crossing),
                    mu_app: app,
                    abs_err: app.map(|a| (p.mu_star - a).abs()),
                    exploratory: Some(p.exploratory),
                    error: String::new(),
                },
                Err(e) => BoundaryRow {
                    u,
                    mu_star: None,
                    nu_low: None,
                    nu_high: None,
                    f_crossing: None,
                    mu_app: app,
                    abs_err: None,
                    exploratory: None,
                    error: e.to_string(),
                },
            }
        })
        .collect())
}

/// Writes the trace; returns the number of failed points.
pub fn cmd_boundary<W: Write>(
    b: &Boundary,
    kind: BoundaryKind,
    grid: &[f64],
    tol: f64,
    parallelism: usize,
    format: Format,
    out: W,
) -> Result<usize> {
    let rows = boundary_rows(b, kind, grid, tol, parallelism)?;
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                g17(r.u),
                opt_g17(r.mu_star),
                opt_g17(r.nu_low),
                opt_g17(r.nu_high),
                opt_g17(r.f_crossing),
                opt_g17(r.mu_app),
                opt_g17(r.abs_err),
                r.error.clone(),
            ]
        })
        .collect();
    write_table(&BOUNDARY_HEADER, &table, &rows, format, out)?;
    Ok(rows.iter().filter(|r| !r.error.is_empty()).count())
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    #[serde(rename = "U")]
    pub u: f64,
    pub quantity: String,
    pub numeric: Option<f64>,
    pub asymptotic: Option<f64>,
    pub abs_err: Option<f64>,
    pub nominal_order: String,
    pub error: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceFit {
    /// The small parameter the error is regressed against.
    pub parameter: String,
    /// Log-log slope of |mu* - mu_app| against the parameter.
    pub slope: Option<f64>,
    /// Fitted constant in |mu* - mu_app| <= C U^{5/2} e^{-2pi/sqrt(U)}
    /// (AF/P only), and the per-U values it is fitted from.
    pub fitted_c: Option<f64>,
    pub c_values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub kind: BoundaryKind,
    pub rows: Vec<ReportRow>,
    pub fit: ConvergenceFit,
}

pub const COMPARE_HEADER: [&str; 7] = ["U", "quantity", "numeric", "asymptotic", "abs_err", "nominal_order", "error"];

/// Least-squares slope of y on x.
pub fn ls_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    if n < 2 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn row(u: f64, q: &str, numeric: f64, asym: Result<SeriesValue>) -> ReportRow {
    match asym {
        Ok(s) => ReportRow {
            u,
            quantity: q.into(),
            numeric: Some(numeric),
            asymptotic: Some(s.value),
            abs_err: Some((numeric - s.value).abs()),
            nominal_order: s.nominal_error_order,
            error: String::new(),
        },
        Err(e) => ReportRow {
            u,
            quantity: q.into(),
            numeric: Some(numeric),
            asymptotic: None,
            abs_err: None,
            nominal_order: String::new(),
            error: e.to_string(),
        },
    }
}

fn exact(v: f64, order: &str) -> Result<SeriesValue> {
    Ok(SeriesValue {
        value: v,
        nominal_error_order: order.into(),
    })
}

pub fn compare(b: &Boundary, kind: BoundaryKind, grid: &[f64], tol: f64, parallelism: usize) -> Result<CompareReport> {
    let res = crossings(b, kind, grid, tol, parallelism)?;
    let mut rows = Vec::new();
    let (mut xs, mut ys, mut cs) = (Vec::new(), Vec::new(), Vec::new());
    let (mut cx, mut cy) = (Vec::new(), Vec::new());
    for (&u, r) in grid.iter().zip(res) {
        let p = match r {
            Ok(p) => p,
            Err(e) => {
                rows.push(ReportRow {
                    u,
                    quantity: "mu_star".into(),
                    numeric: None,
                    asymptotic: None,
                    abs_err: None,
                    nominal_order: String::new(),
                    error: e.to_string(),
                });
                continue;
            }
        };
        let mu = row(u, "mu_star", p.mu_star, mu_app(kind, u));
        if let Some(err) = mu.abs_err {
            match kind {
                BoundaryKind::AF_F => {
                    xs.push(u.ln());
                    ys.push(err.ln());
                }
                BoundaryKind::F_P => {
                    xs.push((4.0 * PI - u).ln());
                    ys.push(err.ln());
                }
                BoundaryKind::AF_P => {
                    let scale = u.powf(2.5) * small_u_scale(u);
                    cs.push(err / scale);
                    cx.push(scale);
                    cy.push(err);
                }
            }
        }
        rows.push(mu);
        match kind {
            BoundaryKind::AF_F => {
                rows.push(row(u, "doping_low", p.doping_low, exact(0.0, "exact")));
                rows.push(row(u, "doping_high", p.doping_high, nu_i_f(u)));
                rows.push(row(u, "f_crossing", p.f_at_crossing, f_af_large_u(u)));
            }
            BoundaryKind::F_P => {
                rows.push(row(u, "doping_low", p.doping_low, nu_ii_f(u)));
                rows.push(row(u, "doping_high", p.doping_high, nu_ii_p(u)));
                rows.push(row(u, "f_crossing", p.f_at_crossing, f_at_mu_ii(u)));
            }
            BoundaryKind::AF_P => {
                rows.push(row(u, "doping_low", p.doping_low, exact(0.0, "exact")));
                rows.push(row(u, "doping_high", p.doping_high, nu_iii_p(u)));
                rows.push(row(u, "f_crossing", p.f_at_crossing, f_af_small_u(u)));
            }
        }
    }
    let fit = match kind {
        BoundaryKind::AF_F => ConvergenceFit {
            parameter: "U".into(),
            slope: ls_slope(&xs, &ys),
            fitted_c: None,
            c_values: vec![],
        },
        BoundaryKind::F_P => ConvergenceFit {
            parameter: "4pi-U".into(),
            slope: ls_slope(&xs, &ys),
            fitted_c: None,
            c_values: vec![],
        },
        BoundaryKind::AF_P => {
            let sxx: f64 = cx.iter().map(|x| x * x).sum();
            let sxy: f64 = cx.iter().zip(&cy).map(|(x, y)| x * y).sum();
            ConvergenceFit {
                parameter: "U".into(),
                slope: None,
                fitted_c: (sxx > 0.0).then(|| sxy / sxx),
                c_values: cs,
            }
        }
    };
    Ok(CompareReport { kind, rows, fit })
}

/// Writes the comparison; the fit follows the per-U rows as summary rows
/// with an empty U. Returns the number of failed points.
pub fn cmd_compare<W: Write>(
    b: &Boundary,
    kind: BoundaryKind,
    grid: &[f64],
    tol: f64,
    parallelism: usize,
    format: Format,
    out: W,
) -> Result<usize> {
    let rep = compare(b, kind, grid, tol, parallelism)?;
    let mut table: Vec<Vec<String>> = rep
        .rows
        .iter()
        .map(|r| {
            vec![
                g17(r.u),
                r.quantity.clone(),
                opt_g17(r.numeric),
                opt_g17(r.asymptotic),
                opt_g17(r.abs_err),
                r.nominal_order.clone(),
                r.error.clone(),
            ]
        })
        .collect();
    let summary = |q: String, v: Option<f64>| vec![String::new(), q, opt_g17(v), String::new(), String::new(), String::new(), String::new()];
    if let Some(s) = rep.fit.slope {
        table.push(summary(format!("loglog_slope_vs_{}", rep.fit.parameter), Some(s)));
    }
    if let Some(c) = rep.fit.fitted_c {
        table.push(summary("fitted_C".into(), Some(c)));
    }
    write_table(&COMPARE_HEADER, &table, &rep, format, out)?;
    Ok(rep.rows.iter().filter(|r| !r.error.is_empty()).count())
}
