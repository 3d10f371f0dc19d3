//! Solutions of the paramagnetic (P), ferromagnetic (F) and antiferromagnetic
//! (AF) mean-field equations at a point (U, mu).
//!
//! Everything is solved at mu >= 0; negative mu goes through particle-hole
//! symmetry (d0 -> -d0, magnetizations unchanged).
//!
//! F: with u = U(d0 - m0)/2 and v = U(d0 + m0)/2 the equations read
//! v = G(u), u = G(v), G(x) = U int_0^{mu-x} N0 (signed, clamped at +-U/2).
//! Roots of u - G(G(u)) below the fixed point of G are the F solutions with
//! m0 > 0; the fixed point itself is the P solution.
//!
//! AF: the half-filled branch is the gap equation. Doped solutions are
//! parametrized by the Fermi point b+ and correspond to sign changes of
//! Xi(b) = Delta1(b) - Delta2(b).

use serde::{Deserialize, Serialize};

use crate::dos::{Dos, BAND};
use crate::error::{Error, Result};
use crate::quad::QuadratureConfig;
use crate::roots::brent_with;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelPoint {
    #[serde(rename = "U")]
    pub u: f64,
    pub mu: f64,
}

impl ModelPoint {
    pub fn new(u: f64, mu: f64) -> Result<Self> {
        let p = Self { u, mu };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.u > 0.0 && self.u.is_finite()) {
            return Err(Error::Domain(format!("U must be positive and finite, got {}", self.u)));
        }
        if !self.mu.is_finite() {
            return Err(Error::Domain(format!("mu must be finite, got {}", self.mu)));
        }
        Ok(())
    }

    fn mirrored(&self) -> (Self, bool) {
        if self.mu < 0.0 {
            (Self { u: self.u, mu: -self.mu }, true)
        } else {
            (*self, false)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub x_tol: f64,
    pub residual_tol: f64,
    pub scan_points: usize,
    pub quad: QuadratureConfig,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            x_tol: 1e-12,
            residual_tol: 1e-10,
            scan_points: 512,
            quad: QuadratureConfig::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.x_tol > 0.0 && self.residual_tol > 0.0 && self.scan_points >= 2) {
            return Err(Error::Domain(format!("invalid solver config {self:?}")));
        }
        self.quad.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PSolution {
    pub d0: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FBranch {
    Interior,
    Saturated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FSolution {
    pub d0: f64,
    pub m0: f64,
    pub branch: FBranch,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AFBranch {
    HalfFilled,
    Doped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AFSolution {
    pub d0: f64,
    pub m1: f64,
    pub delta: f64,
    pub b_plus: Option<f64>,
    pub branch: AFBranch,
    pub residual: f64,
}

/// Mean-field solver bound to a configuration.
#[derive(Debug, Clone, Copy, Default)]
pub struct MeanField {
    pub cfg: SolverConfig,
    pub dos: Dos,
}

/// Data shared by the doped-AF evaluations at one U.
#[derive(Debug, Clone, Copy)]
pub struct AfScale {
    pub u: f64,
    pub gap: f64,
    pub b_max: f64,
}

impl MeanField {
    pub fn new(cfg: SolverConfig) -> Self {
        Self {
            cfg,
            dos: Dos::new(cfg.quad),
        }
    }

    pub fn g_map(&self, x: f64, at: ModelPoint) -> Result<f64> {
        Ok(at.u * self.dos.signed_mass(at.mu - x)?)
    }

    pub fn solve_p(&self, at: ModelPoint) -> Result<PSolution> {
        at.validate()?;
        let (p, flip) = at.mirrored();
        let u = p.u;
        let res = |d: f64| -> Result<f64> { Ok(d - 2.0 * self.dos.signed_mass(p.mu - 0.5 * u * d)?) };
        let lo = res(-1.0)?;
        let hi = res(1.0)?;
        let d0 = if lo >= 0.0 {
            -1.0
        } else if hi <= 0.0 {
            1.0
        } else {
            brent_with(res, -1.0, 1.0, lo, hi, 1e-17)?
        };
        let residual = res(d0)?.abs();
        if residual > self.cfg.residual_tol {
            return Err(Error::Internal(format!("P residual {residual:e} at {at:?}")));
        }
        Ok(PSolution {
            d0: if flip { -d0 } else { d0 },
            residual,
        })
    }

    fn f_residual(&self, p: ModelPoint, d0: f64, m0: f64) -> Result<f64> {
        let su = self.dos.signed_mass(p.mu - 0.5 * p.u * (d0 - m0))?;
        let sv = self.dos.signed_mass(p.mu - 0.5 * p.u * (d0 + m0))?;
        Ok((d0 - su - sv).abs().max((m0 - su + sv).abs()))
    }

    /// Every F solution with m0 > 0, ordered by increasing m0.
    pub fn solve_f_all(&self, at: ModelPoint) -> Result<Vec<FSolution>> {
        at.validate()?;
        let (p, flip) = at.mirrored();
        let u = p.u;
        let half = 0.5 * u;
        let d0p = self.solve_p(p)?.d0;
        let ustar = half * d0p;
        let g = |x: f64| self.g_map(x, p);
        let phi = |x: f64| -> Result<f64> { Ok(x - g(g(x)?)?) };

        let mut sols = Vec::new();

        // Saturated branch: G is flat at U/2 on x <= mu - 4.
        let m_sat = self.dos.mass_above(p.mu - half)?;
        let u_sat = half * (1.0 - 2.0 * m_sat);
        let sat_ok = m_sat > 0.0 && 4.0 + u_sat <= p.mu;
        if sat_ok {
            sols.push(FSolution {
                d0: 1.0 - m_sat,
                m0: m_sat,
                branch: FBranch::Saturated,
                residual: self.f_residual(p, 1.0 - m_sat, m_sat)?,
            });
        }

        // Interior roots on [-U/2, u*), uniform nodes plus a geometric
        // cluster towards u* where roots bifurcate off the P solution.
        let width = ustar + half;
        let n = self.cfg.scan_points;
        let mut nodes: Vec<f64> = (0..n).map(|i| -half + width * i as f64 / n as f64).collect();
        for k in 1..=30 {
            nodes.push(ustar - width * 2f64.powi(-k));
        }
        nodes.sort_by(|a, b| a.total_cmp(b));
        nodes.dedup();
        let vals = nodes.iter().map(|&x| phi(x)).collect::<Result<Vec<_>>>()?;
        let xtol = self.cfg.x_tol * u.max(1.0);
        let merge_tol = 1e3 * xtol;
        let polish = 1e-16 * u.max(1.0);
        for i in 0..nodes.len() {
            let root = if vals[i] == 0.0 {
                Some(nodes[i])
            } else if i + 1 < nodes.len() && vals[i] * vals[i + 1] < 0.0 {
                Some(brent_with(phi, nodes[i], nodes[i + 1], vals[i], vals[i + 1], polish)?)
            } else {
                None
            };
            let Some(r) = root else { continue };
            if p.mu - r >= 4.0 || (sat_ok && (r - u_sat).abs() <= merge_tol) {
                // Flat part of G: this is the saturated solution, handled above.
                continue;
            }
            let v = g(r)?;
            // Roots this close to the fixed point are the P solution seen
            // through rounding noise in u - G(G(u)).
            if v - r <= merge_tol {
                continue;
            }
            let d0 = (r + v) / u;
            let m0 = (v - r) / u;
            if sols.iter().any(|s: &FSolution| (s.m0 - m0).abs() <= merge_tol / u && (s.d0 - d0).abs() <= merge_tol / u) {
                continue;
            }
            sols.push(FSolution {
                d0,
                m0,
                branch: FBranch::Interior,
                residual: self.f_residual(p, d0, m0)?,
            });
        }
        sols.sort_by(|a, b| a.m0.total_cmp(&b.m0));
        if flip {
            for s in &mut sols {
                s.d0 = -s.d0;
            }
        }
        Ok(sols)
    }

    /// Solves int_b^4 N0 / sqrt(D^2 + e^2) = 1/U for D in (lo, hi) by Newton
    /// with a bisection safeguard. Requires the residual to be positive at
    /// `lo` and nonpositive at `hi`.
    fn solve_gap(&self, b: f64, u: f64, mut lo: f64, mut hi: f64, guess: f64) -> Result<f64> {
        let target = 1.0 / u;
        let mut x = if guess > lo && guess < hi { guess } else { 0.5 * (lo + hi) };
        for _ in 0..200 {
            let (k, k32) = self.dos.kernel_inv_sqrt_pair(b, x)?;
            let f = k - target;
            if f > 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let slope = x * k32;
            let mut next = if slope > 0.0 { x + f / slope } else { f64::NAN };
            if !(next > lo && next < hi) {
                next = if lo > 0.0 && hi / lo > 4.0 {
                    (lo * hi).sqrt()
                } else {
                    0.5 * (lo + hi)
                };
            }
            if (next - x).abs() <= 4.0 * f64::EPSILON * x || hi - lo <= 4.0 * f64::EPSILON * hi {
                return Ok(next);
            }
            x = next;
        }
        Err(Error::Internal(format!("gap solve did not converge at b = {b}, U = {u}")))
    }

    /// The half-filled gap: the Delta > 0 with int_0^4 N0 / sqrt(Delta^2 + e^2) = 1/U.
    pub fn gap_delta(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u.is_finite()) {
            return Err(Error::Domain(format!("gap_delta needs U > 0, got {u}")));
        }
        let small = 32.0 * (-2.0 * std::f64::consts::PI / u.sqrt()).exp();
        let mut lo = (0.5 * small).max(1e-300);
        while lo > 1e-300 && self.dos.kernel_inv_sqrt(0.0, lo)? <= 1.0 / u {
            lo = (lo * 1e-3).max(1e-300);
        }
        let guess = if u > 8.0 { 0.5 * u - 4.0 / u } else { small };
        self.solve_gap(0.0, u, lo, u, guess)
    }

    /// The b in (0, 4) with int_b^4 N0 / e = 1/U.
    pub fn b_plus_max(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u.is_finite()) {
            return Err(Error::Domain(format!("b_plus_max needs U > 0, got {u}")));
        }
        let target = 1.0 / u;
        let f = |t: f64| -> Result<f64> { Ok(self.dos.inv_eps_tail(t.exp())? - target) };
        // Two-term small-b form of the integral gives a safe lower end.
        let two_pi = 2.0 * std::f64::consts::PI;
        let t_lo = ((16.0f64).ln() - two_pi * (target + 1.0 / 24.0).sqrt() - 1.0).max(-700.0);
        let t_hi = BAND.ln();
        let (flo, fhi) = (f(t_lo)?, f(t_hi)?);
        Ok(brent_with(f, t_lo, t_hi, flo, fhi, 1e-15)?.exp())
    }

    pub fn af_scale(&self, u: f64) -> Result<AfScale> {
        Ok(AfScale {
            u,
            gap: self.gap_delta(u)?,
            b_max: self.b_plus_max(u)?,
        })
    }

    /// Delta1(b) given a starting guess.
    pub fn delta1_at(&self, sc: &AfScale, b: f64, guess: Option<f64>) -> Result<f64> {
        if !(b >= 0.0 && b <= sc.b_max) {
            return Err(Error::Domain(format!("delta1 needs 0 <= b <= {}, got {b}", sc.b_max)));
        }
        if b == 0.0 {
            return Ok(sc.gap);
        }
        if b == sc.b_max {
            return Ok(0.0);
        }
        let g = guess.unwrap_or(sc.gap * (1.0 - b / sc.b_max).sqrt());
        self.solve_gap(b, sc.u, 0.0, sc.gap, g)
    }

    pub fn delta1(&self, b: f64, u: f64) -> Result<f64> {
        let sc = self.af_scale(u)?;
        self.delta1_at(&sc, b, None)
    }

    pub fn delta1_prime_at(&self, sc: &AfScale, b: f64) -> Result<f64> {
        if !(b > 0.0 && b < sc.b_max) {
            return Err(Error::Domain(format!("delta1_prime needs 0 < b < {}, got {b}", sc.b_max)));
        }
        let d = self.delta1_at(sc, b, None)?;
        let p = -crate::dos::n0(b) * d / (d * d + b * b).sqrt();
        let q = d * d * self.dos.kernel_inv_32(b, d)?;
        Ok(p / q)
    }

    pub fn delta1_prime(&self, b: f64, u: f64) -> Result<f64> {
        let sc = self.af_scale(u)?;
        self.delta1_prime_at(&sc, b)
    }

    /// mu - U/2 + U int_b^4 N0, the value of sqrt(Delta^2 + b^2) forced by
    /// the density equation on the doped branch.
    fn doped_s(&self, b: f64, at: ModelPoint) -> Result<f64> {
        Ok(at.mu - 0.5 * at.u + at.u * self.dos.tail_mass(b)?)
    }

    fn delta2(&self, b: f64, at: ModelPoint) -> Result<f64> {
        let s = self.doped_s(b, at)?;
        if s < b {
            return Err(Error::Radicand { b });
        }
        Ok(((s - b) * (s + b)).sqrt())
    }

    pub fn xi_at(&self, sc: &AfScale, b: f64, at: ModelPoint, guess: Option<f64>) -> Result<(f64, f64)> {
        let d2 = self.delta2(b, at)?;
        let d1 = self.delta1_at(sc, b, guess)?;
        Ok((d1 - d2, d1))
    }

    pub fn xi(&self, b: f64, at: ModelPoint) -> Result<f64> {
        at.validate()?;
        let sc = self.af_scale(at.u)?;
        Ok(self.xi_at(&sc, b, at, None)?.0)
    }

    /// Every AF solution with m1 > 0: the half-filled one (if Delta(U) >= mu)
    /// followed by doped ones in increasing b+.
    pub fn solve_af_all(&self, at: ModelPoint) -> Result<Vec<AFSolution>> {
        at.validate()?;
        let (p, flip) = at.mirrored();
        let u = p.u;
        let mut sols = Vec::new();
        // No AF solution exists for mu >= U/2.
        if p.mu >= 0.5 * u {
            return Ok(sols);
        }
        let sc = self.af_scale(u)?;
        if sc.gap >= p.mu {
            let k = self.dos.kernel_inv_sqrt(0.0, sc.gap)?;
            sols.push(AFSolution {
                d0: 0.0,
                m1: 2.0 * sc.gap / u,
                delta: sc.gap,
                b_plus: None,
                branch: AFBranch::HalfFilled,
                residual: (k - 1.0 / u).abs(),
            });
        }
        for b in self.doped_roots(&sc, p)? {
            sols.push(self.doped_solution(&sc, p, b)?);
        }
        if flip {
            for s in &mut sols {
                s.d0 = -s.d0;
            }
        }
        Ok(sols)
    }

    /// Upper end of the doped scan: b_max, or the point where Delta2 vanishes
    /// if that comes first.
    fn doped_domain(&self, sc: &AfScale, p: ModelPoint) -> Result<f64> {
        let h = |b: f64| -> Result<f64> { Ok(self.doped_s(b, p)? - b) };
        let h0 = h(0.0)?;
        if h0 <= 0.0 {
            return Ok(0.0);
        }
        let hm = h(sc.b_max)?;
        if hm >= 0.0 {
            return Ok(sc.b_max);
        }
        // Take the feasible side of the bracket.
        let b = brent_with(h, 0.0, sc.b_max, h0, hm, 1e-16 * sc.b_max)?;
        let mut b = b;
        while b > 0.0 && h(b)? < 0.0 {
            b = b * (1.0 - 4.0 * f64::EPSILON) - f64::MIN_POSITIVE;
        }
        Ok(b.max(0.0))
    }

    fn doped_roots(&self, sc: &AfScale, p: ModelPoint) -> Result<Vec<f64>> {
        let b_hi = self.doped_domain(sc, p)?;
        if b_hi <= 0.0 {
            return Ok(Vec::new());
        }
        let n = self.cfg.scan_points;
        let b_lo = b_hi * 1e-10;
        let ratio = (b_hi / b_lo).ln();
        let mut nodes = vec![0.0];
        nodes.extend((0..n).map(|i| b_lo * (ratio * i as f64 / (n - 1) as f64).exp()));
        *nodes.last_mut().unwrap() = b_hi;
        let mut vals = Vec::with_capacity(nodes.len());
        let mut guess = None;
        for &b in &nodes {
            let (x, d1) = self.xi_at(sc, b, p, guess)?;
            guess = Some(d1);
            vals.push(x);
        }
        let mut roots = Vec::new();
        let xtol = 1e-16 * sc.b_max;
        // Endpoints are excluded: b = 0 is the half-filled state and the upper
        // end has Delta1 = 0 or Delta2 = 0.
        for i in 0..nodes.len() - 1 {
            let (a, b) = (nodes[i], nodes[i + 1]);
            let (fa, fb) = (vals[i], vals[i + 1]);
            if i > 0 && fa == 0.0 {
                roots.push(a);
                continue;
            }
            if fa * fb < 0.0 {
                let mut warm = None;
                let f = |x: f64| -> Result<f64> {
                    let (v, d1) = self.xi_at(sc, x, p, warm)?;
                    warm = Some(d1);
                    Ok(v)
                };
                let r = brent_with(f, a, b, fa, fb, xtol)?;
                if r > 0.0 && r < b_hi {
                    roots.push(r);
                }
            }
        }
        Ok(roots)
    }

    fn doped_solution(&self, sc: &AfScale, p: ModelPoint, b: f64) -> Result<AFSolution> {
        let u = p.u;
        let delta = self.delta1_at(sc, b, None)?;
        let tail = self.dos.tail_mass(b)?;
        let d0 = 1.0 - 2.0 * tail;
        let r_gap = (self.dos.kernel_inv_sqrt(b, delta)? - 1.0 / u).abs();
        let r_mu = (0.5 * u * d0 - p.mu + (delta * delta + b * b).sqrt()).abs();
        Ok(AFSolution {
            d0,
            m1: 2.0 * delta / u,
            delta,
            b_plus: Some(b),
            branch: AFBranch::Doped,
            residual: r_gap.max(r_mu),
        })
    }
}

pub fn g_map(x: f64, at: ModelPoint) -> Result<f64> {
    MeanField::default().g_map(x, at)
}

pub fn solve_p(at: ModelPoint, cfg: &SolverConfig) -> Result<PSolution> {
    MeanField::new(*cfg).solve_p(at)
}

pub fn solve_f_all(at: ModelPoint, cfg: &SolverConfig) -> Result<Vec<FSolution>> {
    MeanField::new(*cfg).solve_f_all(at)
}

pub fn solve_af_all(at: ModelPoint, cfg: &SolverConfig) -> Result<Vec<AFSolution>> {
    MeanField::new(*cfg).solve_af_all(at)
}

pub fn gap_delta(u: f64) -> Result<f64> {
    MeanField::default().gap_delta(u)
}

pub fn delta1(b: f64, u: f64) -> Result<f64> {
    MeanField::default().delta1(b, u)
}

pub fn delta1_prime(b: f64, u: f64) -> Result<f64> {
    MeanField::default().delta1_prime(b, u)
}

pub fn b_plus_max(u: f64) -> Result<f64> {
    MeanField::default().b_plus_max(u)
}

pub fn xi(b: f64, at: ModelPoint) -> Result<f64> {
    MeanField::default().xi(b, at)
}
