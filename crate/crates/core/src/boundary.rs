//! Phase boundaries: the chemical potential where two free energies cross,
//! and the doping jump across it.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{mu_i_app, mu_ii_app, small_u_scale};
use crate::error::{Error, Result};
use crate::free_energy::{energy_difference, FreeEnergy, PhaseLabel};
use crate::meanfield::{ModelPoint, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[allow(non_camel_case_types)]
pub enum BoundaryKind {
    AF_F,
    F_P,
    AF_P,
}

impl BoundaryKind {
    /// (phase below the crossing, phase above it).
    pub fn phases(&self) -> (PhaseLabel, PhaseLabel) {
        match self {
            BoundaryKind::AF_F => (PhaseLabel::AF, PhaseLabel::F),
            BoundaryKind::F_P => (PhaseLabel::F, PhaseLabel::P),
            BoundaryKind::AF_P => (PhaseLabel::AF, PhaseLabel::P),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            BoundaryKind::AF_F => "AF_F",
            BoundaryKind::F_P => "F_P",
            BoundaryKind::AF_P => "AF_P",
        }
    }

    /// Default range of U where the crossing is known to exist.
    pub fn default_window(&self) -> (f64, f64) {
        match self {
            BoundaryKind::AF_F => (12.0, f64::INFINITY),
            BoundaryKind::F_P => (9.0, 4.0 * PI),
            BoundaryKind::AF_P => (0.0, 7.0),
        }
    }

    pub fn in_window(&self, u: f64) -> bool {
        let (lo, hi) = self.default_window();
        match self {
            BoundaryKind::F_P => u >= lo && u < hi,
            BoundaryKind::AF_P => u > lo && u <= hi,
            BoundaryKind::AF_F => u >= lo,
        }
    }
}

impl std::str::FromStr for BoundaryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "AF_F" => Ok(BoundaryKind::AF_F),
            "F_P" => Ok(BoundaryKind::F_P),
            "AF_P" => Ok(BoundaryKind::AF_P),
            _ => Err(Error::Domain(format!("unknown boundary kind {s:?}"))),
        }
    }
}

impl std::fmt::Display for BoundaryKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    #[serde(rename = "U")]
    pub u: f64,
    pub mu_star: f64,
    pub kind: BoundaryKind,
    /// Doping of the lower phase just below mu_star.
    pub doping_low: f64,
    /// Doping of the upper phase just above mu_star.
    pub doping_high: f64,
    pub f_at_crossing: f64,
    pub bisection_width: f64,
    /// U lies outside the kind's window.
    pub exploratory: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceFailure {
    #[serde(rename = "U")]
    pub u: f64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveTrace {
    pub kind: BoundaryKind,
    pub u_grid: Vec<f64>,
    pub points: Vec<BoundaryPoint>,
    pub failures: Vec<TraceFailure>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryConfig {
    pub tol: f64,
    /// Permit U outside the kind's window; such points are flagged.
    pub allow_exploratory: bool,
}

impl Default for BoundaryConfig {
    fn default() -> Self {
        Self {
            tol: 1e-11,
            allow_exploratory: false,
        }
    }
}

pub struct Boundary {
    pub fe: FreeEnergy,
    pub cfg: BoundaryConfig,
}

impl Default for Boundary {
    fn default() -> Self {
        Self::new(SolverConfig::default(), BoundaryConfig::default())
    }
}

impl Boundary {
    pub fn new(solver: SolverConfig, cfg: BoundaryConfig) -> Self {
        Self {
            fe: FreeEnergy::new(solver),
            cfg,
        }
    }

    /// F_a - F_b at (U, mu), with F_a the phase below the crossing.
    pub fn difference(&self, u: f64, kind: BoundaryKind, mu: f64) -> Result<f64> {
        let (a, b) = kind.phases();
        let at = ModelPoint { u, mu };
        let (sa, sb) = (self.fe.phase_energy(at, a)?, self.fe.phase_energy(at, b)?);
        if mu < 0.0 {
            return Ok(sa.f - sb.f);
        }
        Ok(energy_difference(&sa, &sb, u))
    }

    /// Default bracket from the expansions, clipped to where both phases exist.
    pub fn default_bracket(&self, u: f64, kind: BoundaryKind) -> Result<(f64, f64)> {
        Ok(match kind {
            BoundaryKind::AF_F => {
                let c = mu_i_app(u)?.value;
                let w = 2.0 * (2.0 * PI / u).sqrt();
                ((c - w).max(0.0), (c + w).min(0.5 * u - 1e-3))
            }
            BoundaryKind::F_P => {
                // F solutions exist only in a thin band around mu_II,0.
                let h = 4.0 * PI - u;
                let c = mu_ii_app(u)?.value;
                (c - 0.1 * h.powi(3), c + 0.1 * h.powi(3))
            }
            BoundaryKind::AF_P => {
                let e = small_u_scale(u);
                (16.1 * e, 31.9 * e)
            }
        })
    }

    pub fn find_crossing(&self, u: f64, kind: BoundaryKind, bracket: (f64, f64), tol: f64) -> Result<BoundaryPoint> {
        let exploratory = !kind.in_window(u);
        if exploratory && !self.cfg.allow_exploratory {
            let (lo, hi) = kind.default_window();
            return Err(Error::Domain(format!("U = {u} outside the {kind} window [{lo}, {hi}]")));
        }
        if !(tol > 0.0) {
            return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
        }
        let (mut lo, mut hi) = bracket;
        if !(lo < hi) {
            return Err(Error::Domain(format!("empty bracket [{lo}, {hi}]")));
        }
        let d = |mu: f64| self.difference(u, kind, mu);
        let mut dlo = d(lo)?;
        let mut dhi = d(hi)?;
        if dlo.signum() == dhi.signum() && dlo != 0.0 && dhi != 0.0 {
            return Err(Error::NoSignChange { lo, hi });
        }
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let dm = d(mid)?;
            if dm == 0.0 {
                lo = mid;
                hi = mid;
                dlo = 0.0;
                dhi = 0.0;
                break;
            }
            if dm.signum() == dlo.signum() {
                lo = mid;
                dlo = dm;
            } else {
                hi = mid;
                dhi = dm;
            }
        }
        let width = hi - lo;
        let mut mu_star = 0.5 * (lo + hi);
        if dhi != dlo {
            let s = lo - dlo * (hi - lo) / (dhi - dlo);
            if s >= lo && s <= hi {
                mu_star = s;
            }
        }
        let (a, b) = kind.phases();
        let f_at = self.fe.phase_energy(ModelPoint { u, mu: mu_star }, a)?.f;
        let off = 10.0 * tol;
        let doping_low = self.fe.phase_energy(ModelPoint { u, mu: mu_star - off }, a)?.d0;
        let doping_high = self.fe.phase_energy(ModelPoint { u, mu: mu_star + off }, b)?.d0;
        Ok(BoundaryPoint {
            u,
            mu_star,
            kind,
            doping_low,
            doping_high,
            f_at_crossing: f_at,
            bisection_width: width,
            exploratory,
        })
    }

    /// Crossing with the default bracket and tolerance. If a phase is
    /// missing at a bracket end the bracket is shrunk about its centre.
    pub fn crossing(&self, u: f64, kind: BoundaryKind) -> Result<BoundaryPoint> {
        self.crossing_tol(u, kind, self.cfg.tol)
    }

    pub fn crossing_tol(&self, u: f64, kind: BoundaryKind, tol: f64) -> Result<BoundaryPoint> {
        let (lo, hi) = self.default_bracket(u, kind)?;
        let (c, w) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        let mut last = None;
        for shrink in [1.0, 0.3, 0.1, 0.03, 0.01] {
            match self.find_crossing(u, kind, (c - shrink * w, c + shrink * w), tol) {
                Err(e @ (Error::Undefined(_) | Error::NoSignChange { .. })) => last = Some(e),
                r => return r,
            }
        }
        Err(last.unwrap())
    }

    /// Crossings over a grid of U. Points are evaluated in parallel and
    /// reported in grid order; failures are collected, not fatal.
    pub fn trace(&self, kind: BoundaryKind, u_grid: &[f64], tol: f64) -> CurveTrace {
        let results: Vec<Result<BoundaryPoint>> = u_grid
            .par_iter()
            .map(|&u| self.crossing_tol(u, kind, tol))
            .collect();
        let mut points = Vec::new();
        let mut failures = Vec::new();
        for (&u, r) in u_grid.iter().zip(results) {
            match r {
                Ok(p) => points.push(p),
                Err(e) => failures.push(TraceFailure { u, error: e.to_string() }),
            }
        }
        CurveTrace {
            kind,
            u_grid: u_grid.to_vec(),
            points,
            failures,
        }
    }
}

/// The doping interval no pure phase attains at this crossing.
pub fn mixed_gap(bp: &BoundaryPoint) -> (f64, f64) {
    (bp.doping_low, bp.doping_high)
}

pub fn find_crossing(u: f64, kind: BoundaryKind, bracket: (f64, f64), tol: f64) -> Result<BoundaryPoint> {
    Boundary::default().find_crossing(u, kind, bracket, tol)
}

pub fn trace(kind: BoundaryKind, u_grid: &[f64], tol: f64) -> CurveTrace {
    Boundary::default().trace(kind, u_grid, tol)
}
