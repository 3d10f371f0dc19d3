//! Hartree-Fock functions, free energies and phase classification.
//!
//! Every Heaviside integral int N0(e) (c + e) theta(c + e) de is evaluated as
//! `linear_tail(-c, -c)`, which clamps the lower limit to the band.

use serde::{Deserialize, Serialize};

use crate::dos::{Dos, BAND};
use crate::error::{Error, Result};
use crate::meanfield::{AFBranch, AFSolution, FBranch, FSolution, MeanField, ModelPoint, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhaseLabel {
    P,
    F,
    AF,
}

impl PhaseLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            PhaseLabel::P => "P",
            PhaseLabel::F => "F",
            PhaseLabel::AF => "AF",
        }
    }
}

impl std::fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Number of solutions found on each branch.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionInventory {
    pub p: usize,
    pub f_interior: usize,
    pub f_saturated: usize,
    pub af_half_filled: usize,
    pub af_doped: usize,
}

impl SolutionInventory {
    pub fn n_f(&self) -> usize {
        self.f_interior + self.f_saturated
    }

    pub fn n_af(&self) -> usize {
        self.af_half_filled + self.af_doped
    }
}

/// Free energy of one phase at its minimizing solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateEnergy {
    pub f: f64,
    pub d0: f64,
    /// 0 for P, m0 for F, m1 for AF.
    pub m: f64,
    /// The Heaviside-integral part of the Hartree-Fock function, so that
    /// f = U/4 (m^2 - d0^2) + U/2 d0 - mu - theta at |mu|.
    #[serde(skip)]
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub at: ModelPoint,
    pub f_p: f64,
    pub f_f: Option<f64>,
    pub f_af: Option<f64>,
    pub phase: PhaseLabel,
    pub winner_doping: f64,
    pub winner_magnetization: f64,
    /// Another phase lies within the tie tolerance of the winner.
    pub tie: bool,
    pub p: StateEnergy,
    pub f: Option<StateEnergy>,
    pub af: Option<StateEnergy>,
    pub solution_inventory: SolutionInventory,
}

impl PhaseRecord {
    pub fn state(&self, label: PhaseLabel) -> Option<StateEnergy> {
        match label {
            PhaseLabel::P => Some(self.p),
            PhaseLabel::F => self.f,
            PhaseLabel::AF => self.af,
        }
    }
}

/// Free energies closer than this are treated as tied.
pub const TIE_TOL: f64 = 1e-13;

/// U/4 (m^2 - d0^2) + U/2 d0 - mu, common to all three Hartree-Fock functions.
fn poly(d0: f64, m: f64, at: ModelPoint) -> f64 {
    0.25 * at.u * (m * m - d0 * d0) + 0.5 * at.u * d0 - at.mu
}

fn assemble(d0: f64, m: f64, theta: f64, at: ModelPoint) -> StateEnergy {
    StateEnergy {
        f: poly(d0, m, at) - theta,
        d0,
        m,
        theta,
    }
}

/// F_a - F_b for two states at the same point, grouped so that the large
/// common parts cancel exactly. Both states must be evaluated at mu >= 0.
pub fn energy_difference(a: &StateEnergy, b: &StateEnergy, u: f64) -> f64 {
    let dd = a.d0 - b.d0;
    0.25 * u * (a.m - b.m) * (a.m + b.m) - 0.25 * u * dd * (a.d0 + b.d0) + 0.5 * u * dd - (a.theta - b.theta)
}

/// int_R N0(e) (c + e) theta(c + e) de.
fn theta_lin(dos: &Dos, c: f64) -> Result<f64> {
    dos.linear_tail(-c, -c)
}

/// int_R N0(e) (c + r) theta(c + r) + (c - r) theta(c - r) de, r = sqrt(D^2 + e^2).
fn theta_af(dos: &Dos, c: f64, delta: f64) -> Result<f64> {
    let full = 2.0 * dos.kernel_sqrt(0.0, delta)?;
    if c >= 0.0 {
        // c + r > 0 everywhere; c - r > 0 on |e| < b.
        let mut v = c + full;
        if c > delta {
            let b = ((c - delta) * (c + delta)).sqrt().min(BAND);
            let inner = full - 2.0 * dos.kernel_sqrt(b, delta)?;
            v += 2.0 * c * (0.5 - dos.tail_mass(b)?) - inner;
        }
        Ok(v)
    } else if -c <= delta {
        Ok(c + full)
    } else {
        let b = ((-c - delta) * (-c + delta)).sqrt();
        if b >= BAND {
            return Ok(0.0);
        }
        Ok(2.0 * (c * dos.tail_mass(b)? + dos.kernel_sqrt(b, delta)?))
    }
}

pub struct FreeEnergy {
    pub mf: MeanField,
}

impl Default for FreeEnergy {
    fn default() -> Self {
        Self::new(SolverConfig::default())
    }
}

impl FreeEnergy {
    pub fn new(cfg: SolverConfig) -> Self {
        Self { mf: MeanField::new(cfg) }
    }

    fn dos(&self) -> &Dos {
        &self.mf.dos
    }

    pub fn grand_potential_p(&self, d0: f64, at: ModelPoint) -> Result<f64> {
        Ok(poly(d0, 0.0, at) - self.theta_p(d0, at)?)
    }

    fn theta_p(&self, d0: f64, at: ModelPoint) -> Result<f64> {
        Ok(2.0 * theta_lin(self.dos(), 0.5 * at.u * d0 - at.mu)?)
    }

    pub fn grand_potential_f_raw(&self, d0: f64, m0: f64, at: ModelPoint) -> Result<f64> {
        Ok(poly(d0, m0, at) - self.theta_f(d0, m0, at)?)
    }

    fn theta_f(&self, d0: f64, m0: f64, at: ModelPoint) -> Result<f64> {
        let u = at.u;
        let lo = 0.5 * u * (d0 - m0) - at.mu;
        let hi = 0.5 * u * (d0 + m0) - at.mu;
        Ok(theta_lin(self.dos(), lo)? + theta_lin(self.dos(), hi)?)
    }

    pub fn grand_potential_f(&self, sol: &FSolution, at: ModelPoint) -> Result<f64> {
        self.grand_potential_f_raw(sol.d0, sol.m0, at)
    }

    pub fn grand_potential_af_raw(&self, d0: f64, m1: f64, at: ModelPoint) -> Result<f64> {
        Ok(poly(d0, m1, at) - self.theta_af(d0, m1, at)?)
    }

    fn theta_af(&self, d0: f64, m1: f64, at: ModelPoint) -> Result<f64> {
        let delta = 0.5 * at.u * m1;
        if delta == 0.0 {
            return self.theta_p(d0, at);
        }
        theta_af(self.dos(), 0.5 * at.u * d0 - at.mu, delta)
    }

    pub fn grand_potential_af(&self, sol: &AFSolution, at: ModelPoint) -> Result<f64> {
        self.grand_potential_af_raw(sol.d0, sol.m1, at)
    }

    /// Free energies of the three phases (F and AF absent without solutions)
    /// and the inventory. Evaluated at |mu|; dopings carry the sign of mu.
    pub fn states(&self, at: ModelPoint) -> Result<(StateEnergy, Option<StateEnergy>, Option<StateEnergy>, SolutionInventory)> {
        at.validate()?;
        let flip = at.mu < 0.0;
        let p_at = ModelPoint { u: at.u, mu: at.mu.abs() };
        let sign = if flip { -1.0 } else { 1.0 };

        let ps = self.mf.solve_p(p_at)?;
        let mut p = assemble(ps.d0, 0.0, self.theta_p(ps.d0, p_at)?, p_at);
        p.d0 *= sign;
        let fs = self.mf.solve_f_all(p_at)?;
        let afs = self.mf.solve_af_all(p_at)?;
        let mut inv = SolutionInventory {
            p: 1,
            ..Default::default()
        };
        let mut f: Option<StateEnergy> = None;
        for s in &fs {
            match s.branch {
                FBranch::Interior => inv.f_interior += 1,
                FBranch::Saturated => inv.f_saturated += 1,
            }
            let mut g = assemble(s.d0, s.m0, self.theta_f(s.d0, s.m0, p_at)?, p_at);
            g.d0 *= sign;
            if f.is_none_or(|cur| g.f < cur.f) {
                f = Some(g);
            }
        }
        let mut af: Option<StateEnergy> = None;
        for s in &afs {
            match s.branch {
                AFBranch::HalfFilled => inv.af_half_filled += 1,
                AFBranch::Doped => inv.af_doped += 1,
            }
            let mut g = assemble(s.d0, s.m1, self.theta_af(s.d0, s.m1, p_at)?, p_at);
            g.d0 *= sign;
            if af.is_none_or(|cur| g.f < cur.f) {
                af = Some(g);
            }
        }
        Ok((p, f, af, inv))
    }

    pub fn classify(&self, at: ModelPoint) -> Result<PhaseRecord> {
        let (p, f, af, inv) = self.states(at)?;
        // Priority order for ties: P, AF, F.
        let cands = [(PhaseLabel::P, Some(p)), (PhaseLabel::AF, af), (PhaseLabel::F, f)];
        let fmin = cands.iter().filter_map(|(_, s)| s.map(|s| s.f)).fold(f64::INFINITY, f64::min);
        let close: Vec<_> = cands
            .iter()
            .filter_map(|(l, s)| s.filter(|s| s.f - fmin <= TIE_TOL).map(|s| (*l, s)))
            .collect();
        let (phase, win) = close[0];
        Ok(PhaseRecord {
            at,
            f_p: p.f,
            f_f: f.map(|s| s.f),
            f_af: af.map(|s| s.f),
            phase,
            winner_doping: win.d0,
            winner_magnetization: win.m,
            tie: close.len() > 1,
            p,
            f,
            af,
            solution_inventory: inv,
        })
    }

    /// Free energy of one phase, or an error if it has no solution at `at`.
    pub fn phase_energy(&self, at: ModelPoint, label: PhaseLabel) -> Result<StateEnergy> {
        at.validate()?;
        let p_at = ModelPoint { u: at.u, mu: at.mu.abs() };
        let sign = if at.mu < 0.0 { -1.0 } else { 1.0 };
        let st = match label {
            PhaseLabel::P => {
                let s = self.mf.solve_p(p_at)?;
                Some(assemble(s.d0, 0.0, self.theta_p(s.d0, p_at)?, p_at))
            }
            PhaseLabel::F => {
                let mut best: Option<StateEnergy> = None;
                for s in self.mf.solve_f_all(p_at)? {
                    let g = assemble(s.d0, s.m0, self.theta_f(s.d0, s.m0, p_at)?, p_at);
                    if best.is_none_or(|b| g.f < b.f) {
                        best = Some(g);
                    }
                }
                best
            }
            PhaseLabel::AF => {
                let mut best: Option<StateEnergy> = None;
                for s in self.mf.solve_af_all(p_at)? {
                    let g = assemble(s.d0, s.m1, self.theta_af(s.d0, s.m1, p_at)?, p_at);
                    if best.is_none_or(|b| g.f < b.f) {
                        best = Some(g);
                    }
                }
                best
            }
        };
        let mut st = st.ok_or_else(|| Error::Undefined(format!("no {label} solution at U = {}, mu = {}", at.u, at.mu)))?;
        st.d0 *= sign;
        Ok(st)
    }

    /// The solver's doping of `label` at `at` and the central difference
    /// -(F(mu + h) - F(mu - h)) / 2h.
    pub fn doping_consistency(&self, at: ModelPoint, label: PhaseLabel, h: f64) -> Result<(f64, f64)> {
        if !(h > 0.0) {
            return Err(Error::Domain(format!("step must be positive, got {h}")));
        }
        let edge = 4.0 + 0.5 * at.u;
        for k in [-edge, 0.0, edge] {
            if at.mu - h <= k && k <= at.mu + h {
                return Err(Error::Undefined(format!("stencil [{}, {}] straddles the kink at mu = {k}", at.mu - h, at.mu + h)));
            }
        }
        let direct = self.phase_energy(at, label)?.d0;
        let up = self.phase_energy(ModelPoint { mu: at.mu + h, ..at }, label)?.f;
        let dn = self.phase_energy(ModelPoint { mu: at.mu - h, ..at }, label)?.f;
        Ok((direct, -(up - dn) / (2.0 * h)))
    }
}

pub fn grand_potential_p(d0: f64, at: ModelPoint) -> Result<f64> {
    FreeEnergy::default().grand_potential_p(d0, at)
}

pub fn grand_potential_f(sol: &FSolution, at: ModelPoint) -> Result<f64> {
    FreeEnergy::default().grand_potential_f(sol, at)
}

pub fn grand_potential_af(sol: &AFSolution, at: ModelPoint) -> Result<f64> {
    FreeEnergy::default().grand_potential_af(sol, at)
}

pub fn classify(at: ModelPoint, cfg: &SolverConfig) -> Result<PhaseRecord> {
    FreeEnergy::new(*cfg).classify(at)
}

pub fn doping_consistency(at: ModelPoint, label: PhaseLabel, h: f64) -> Result<(f64, f64)> {
    FreeEnergy::default().doping_consistency(at, label, h)
}
