//! Single-point classification, including the doping-to-mu inversion that
//! exposes mixed regions.

use hhf_core::asymptotics::{in_sector, Sector, SectorParams};
use hhf_core::boundary::BoundaryKind;
use hhf_core::free_energy::{FreeEnergy, PhaseLabel, PhaseRecord};
use hhf_core::{Error, ModelPoint, Result};
use serde::Serialize;

/// Winner dopings closer than this to the target count as attained.
pub const NU_MATCH: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct MixedReport {
    #[serde(rename = "U")]
    pub u: f64,
    pub nu: f64,
    pub mu_star: f64,
    /// None when the two sides do not form one of the three known interfaces.
    pub kind: Option<BoundaryKind>,
    pub phase_low: PhaseLabel,
    pub phase_high: PhaseLabel,
    pub doping_low: f64,
    pub doping_high: f64,
    pub f_at_crossing: f64,
    pub bisection_width: f64,
    pub exploratory: bool,
}

#[derive(Debug, Clone)]
pub enum NuOutcome {
    Pure { mu: f64, record: PhaseRecord },
    Mixed { report: MixedReport, record: PhaseRecord },
}

fn winner_f(r: &PhaseRecord) -> f64 {
    match r.phase {
        PhaseLabel::P => r.f_p,
        PhaseLabel::F => r.f_f.unwrap_or(f64::NAN),
        PhaseLabel::AF => r.f_af.unwrap_or(f64::NAN),
    }
}

fn kind_of(lo: PhaseLabel, hi: PhaseLabel) -> Option<BoundaryKind> {
    match (lo, hi) {
        (PhaseLabel::AF, PhaseLabel::F) => Some(BoundaryKind::AF_F),
        (PhaseLabel::F, PhaseLabel::P) => Some(BoundaryKind::F_P),
        (PhaseLabel::AF, PhaseLabel::P) => Some(BoundaryKind::AF_P),
        _ => None,
    }
}

/// Finds mu whose winning state has doping `nu`, bisecting on the winner's
/// doping (nondecreasing in mu). A jump across `nu` is a mixed region.
pub fn invert_nu(fe: &FreeEnergy, u: f64, nu: f64) -> Result<NuOutcome> {
    if !(-1.0..=1.0).contains(&nu) {
        return Err(Error::Domain(format!("doping must lie in [-1, 1], got {nu}")));
    }
    let target = nu.abs();
    let sign = if nu < 0.0 { -1.0 } else { 1.0 };
    let edge = 0.5 * u + 4.0;
    let at = |mu: f64| ModelPoint::new(u, mu);
    if target == 0.0 || target == 1.0 {
        let mu = sign * target * edge;
        return Ok(NuOutcome::Pure { mu, record: fe.classify(at(mu)?)? });
    }
    let (mut lo, mut hi) = (0.0, edge);
    let mut rlo = fe.classify(at(lo)?)?;
    let mut rhi = fe.classify(at(hi)?)?;
    for _ in 0..200 {
        if hi - lo <= 1e-13 * hi.max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let r = fe.classify(at(mid)?)?;
        if r.winner_doping < target {
            lo = mid;
            rlo = r;
        } else {
            hi = mid;
            rhi = r;
        }
    }
    let (dlo, dhi) = (rlo.winner_doping, rhi.winner_doping);
    if (dhi - target).abs() <= NU_MATCH || (dlo - target).abs() <= NU_MATCH {
        let (mu, rec) = if (dhi - target).abs() <= (dlo - target).abs() { (hi, rhi) } else { (lo, rlo) };
        if sign > 0.0 {
            return Ok(NuOutcome::Pure { mu, record: rec });
        }
        return Ok(NuOutcome::Pure { mu: -mu, record: fe.classify(at(-mu)?)? });
    }
    let mid = 0.5 * (lo + hi);
    let f_at = winner_f(&rlo);
    let report = if sign > 0.0 {
        let kind = kind_of(rlo.phase, rhi.phase);
        MixedReport {
            u,
            nu,
            mu_star: mid,
            kind,
            phase_low: rlo.phase,
            phase_high: rhi.phase,
            doping_low: dlo,
            doping_high: dhi,
            f_at_crossing: f_at,
            bisection_width: hi - lo,
            exploratory: kind.is_none_or(|k| !k.in_window(u)),
        }
    } else {
        let kind = kind_of(rhi.phase, rlo.phase);
        MixedReport {
            u,
            nu,
            mu_star: -mid,
            kind,
            phase_low: rhi.phase,
            phase_high: rlo.phase,
            doping_low: -dhi,
            doping_high: -dlo,
            f_at_crossing: f_at,
            bisection_width: hi - lo,
            exploratory: kind.is_none_or(|k| !k.in_window(u)),
        }
    };
    let record = fe.classify(at(report.mu_star)?)?;
    Ok(NuOutcome::Mixed { report, record })
}

#[derive(Debug, Clone, Copy)]
pub struct SectorFlags {
    pub delta: f64,
    pub m_bound: f64,
}

impl SectorFlags {
    pub fn memberships(&self, at: ModelPoint) -> [(Sector, bool); 3] {
        [Sector::I, Sector::II, Sector::III].map(|s| {
            let p = SectorParams {
                delta: self.delta,
                m_bound: self.m_bound,
                ..SectorParams::illustration(s)
            };
            (s, p.validate(s).is_ok() && in_sector(at, s, &p))
        })
    }
}

/// Field/value pairs describing a classified point.
pub fn record_fields(rec: &PhaseRecord, sectors: &SectorFlags) -> Vec<(&'static str, Value)> {
    use Value::*;
    let inv = &rec.solution_inventory;
    let mut out = vec![
        ("U", Num(rec.at.u)),
        ("mu", Num(rec.at.mu)),
        ("phase", Str(rec.phase.as_str().into())),
        ("tie", Bool(rec.tie)),
        ("f_p", Num(rec.f_p)),
        ("f_f", Opt(rec.f_f)),
        ("f_af", Opt(rec.f_af)),
        ("d0_p", Num(rec.p.d0)),
        ("d0_f", Opt(rec.f.map(|s| s.d0))),
        ("d0_af", Opt(rec.af.map(|s| s.d0))),
        ("m0_f", Opt(rec.f.map(|s| s.m))),
        ("m1_af", Opt(rec.af.map(|s| s.m))),
        ("winner_doping", Num(rec.winner_doping)),
        ("winner_magnetization", Num(rec.winner_magnetization)),
        ("n_p_solutions", Int(inv.p)),
        ("n_f_interior", Int(inv.f_interior)),
        ("n_f_saturated", Int(inv.f_saturated)),
        ("n_af_half_filled", Int(inv.af_half_filled)),
        ("n_af_doped", Int(inv.af_doped)),
    ];
    for (s, inside) in sectors.memberships(rec.at) {
        let name = match s {
            Sector::I => "sector_I",
            Sector::II => "sector_II",
            Sector::III => "sector_III",
        };
        out.push((name, Bool(inside)));
    }
    out
}

pub fn mixed_fields(m: &MixedReport) -> Vec<(&'static str, Value)> {
    use Value::*;
    vec![
        ("U", Num(m.u)),
        ("nu", Num(m.nu)),
        ("phase", Str("MIXED".into())),
        ("kind", Str(m.kind.map_or(String::new(), |k| k.as_str().into()))),
        ("mu_star", Num(m.mu_star)),
        ("phase_low", Str(m.phase_low.as_str().into())),
        ("phase_high", Str(m.phase_high.as_str().into())),
        ("doping_low", Num(m.doping_low)),
        ("doping_high", Num(m.doping_high)),
        ("f_at_crossing", Num(m.f_at_crossing)),
        ("bisection_width", Num(m.bisection_width)),
        ("exploratory", Bool(m.exploratory)),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Opt(Option<f64>),
    Int(usize),
    Bool(bool),
    Str(String),
}

impl Value {
    pub fn render(&self) -> String {
        match self {
            Value::Num(x) => crate::fmt::g17(*x),
            Value::Opt(x) => crate::fmt::opt_g17(*x),
            Value::Int(n) => n.to_string(),
            Value::Bool(b) => b.to_string(),
            Value::Str(s) => s.clone(),
        }
    }

    pub fn json(&self) -> serde_json::Value {
        match self {
            Value::Num(x) => serde_json::json!(x),
            Value::Opt(x) => serde_json::json!(x),
            Value::Int(n) => serde_json::json!(n),
            Value::Bool(b) => serde_json::json!(b),
            Value::Str(s) => serde_json::json!(s),
        }
    }
}
