//! Square-lattice density of states and the N0-weighted integrals used by the
//! mean-field equations.
//!
//! N0(e) = K(sqrt(1 - (e/4)^2)) / (2 pi^2) on |e| < 4. With k' = |e|/4 this is
//! 1 / (4 pi AGM(1, |e|/4)). Near e = 0 we also use the convergent expansion
//!
//! N0(e) = 1/(2 pi^2) sum_n c_n (e/4)^(2n) [ln(16/e) - d_n],
//!
//! with c_n = ((2n-1)!!/(2n)!!)^2 and d_n = 2 sum_{j<=n} (1/(2j-1) - 1/(2j)),
//! which integrates termwise in closed form against 1, e and 1/e.

use std::f64::consts::PI;

use crate::elliptic::agm;
use crate::error::{Error, Result};
use crate::quad::{gk_adaptive, tanh_sinh_left, QuadratureConfig};

/// Band edge.
pub const BAND: f64 = 4.0;

/// int_0^4 e N0(e) de.
pub const LINEAR_HALF: f64 = 8.0 / (PI * PI);

// Below this the log series is used for the closed-form integrals.
const SERIES_CUT: f64 = 1.0;

// inv_eps_tail switches to its two-term asymptotic form below this.
const INV_EPS_SERIES_CUT: f64 = 1e-8;

/// N0(eps). Even; zero for |eps| > 4; the left limit 1/(4 pi) at |eps| = 4;
/// `f64::INFINITY` at eps = 0.
pub fn n0(eps: f64) -> f64 {
    let e = eps.abs();
    if e > BAND {
        0.0
    } else if e == 0.0 {
        f64::INFINITY
    } else {
        1.0 / (4.0 * PI * agm(1.0, e / BAND))
    }
}

/// Taylor coefficients of N0 in powers of (4 - eps), j = 0..6.
pub const NEAR4_COEFFS: [(f64, f64); 7] = [
    (1.0, 4.0),
    (1.0, 32.0),
    (5.0, 1024.0),
    (7.0, 8192.0),
    (169.0, 1_048_576.0),
    (269.0, 8_388_608.0),
    (1781.0, 268_435_456.0),
];

/// Seven-term expansion of N0 about the band edge, in powers of (4 - eps).
pub fn series_near4(eps: f64) -> f64 {
    let x = BAND - eps.abs();
    let mut acc = 0.0;
    for &(num, den) in NEAR4_COEFFS.iter().rev() {
        acc = acc * x + num / (den * PI);
    }
    acc
}

/// Six-term small-|eps| expansion of N0 (through eps^10 ln eps).
pub fn series_near0(eps: f64) -> f64 {
    let e = eps.abs();
    let l = (16.0 / e).ln();
    let e2 = e * e;
    let terms = [
        l / 2.0,
        e2 * (l - 1.0) / 128.0,
        3.0 * e2.powi(2) * (6.0 * l - 7.0) / 2f64.powi(16),
        5.0 / 3.0 * e2.powi(3) * (30.0 * l - 37.0) / 2f64.powi(22),
        35.0 / 3.0 * e2.powi(4) * (420.0 * l - 533.0) / 2f64.powi(33),
        63.0 / 5.0 * e2.powi(5) * (1260.0 * l - 1627.0) / 2f64.powi(39),
    ];
    terms.iter().sum::<f64>() / (PI * PI)
}

/// Iterates (c_n 4^{-2n}, d_n) for n = 0, 1, 2, ...
fn log_series_coeffs() -> impl Iterator<Item = (usize, f64, f64)> {
    let mut n = 0usize;
    let mut r = 1.0f64; // (2n-1)!!/(2n)!!
    let mut d = 0.0f64;
    std::iter::from_fn(move || {
        if n > 0 {
            let nf = n as f64;
            r *= (2.0 * nf - 1.0) / (2.0 * nf);
            d += 2.0 * (1.0 / (2.0 * nf - 1.0) - 1.0 / (2.0 * nf));
        }
        let item = (n, r * r / 16f64.powi(n as i32), d);
        n += 1;
        Some(item)
    })
}

/// int_0^y e^p N0(e) de for 0 <= y <= SERIES_CUT and p in {0, 1}.
fn power_series_integral(y: f64, p: i32) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    let ly = (16.0 / y).ln();
    let mut sum = 0.0;
    for (n, c, d) in log_series_coeffs() {
        let q = (2 * n as i32 + p + 1) as f64;
        let term = c * y.powf(q) / q * (ly + 1.0 / q - d);
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() || n > 60 {
            break;
        }
    }
    sum / (2.0 * PI * PI)
}

/// int_b^y N0(e)/e de for 0 < b <= y <= SERIES_CUT.
fn inv_eps_series_integral(b: f64, y: f64) -> f64 {
    let prim = |x: f64, n: usize, d: f64| {
        let q = (2 * n) as f64;
        x.powf(q) / q * ((16.0 / x).ln() + 1.0 / q - d)
    };
    let lb = (16.0 / b).ln();
    let ly = (16.0 / y).ln();
    let mut sum = 0.5 * (lb * lb - ly * ly);
    for (n, c, d) in log_series_coeffs().skip(1) {
        let term = c * (prim(y, n, d) - prim(b, n, d));
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() || n > 60 {
            break;
        }
    }
    sum / (2.0 * PI * PI)
}

/// Evaluator bound to a quadrature configuration.
#[derive(Debug, Clone, Copy, Default)]
pub struct Dos {
    pub cfg: QuadratureConfig,
}

impl Dos {
    pub fn new(cfg: QuadratureConfig) -> Self {
        Self { cfg }
    }

    /// Smooth-region integral of N0 * g over [a, b] with 1 <= a (no log).
    fn smooth<const N: usize>(&self, g: impl Fn(f64) -> [f64; N], a: f64, b: f64) -> Result<[f64; N]> {
        if b <= a {
            return Ok([0.0; N]);
        }
        let f = |e: f64| {
            let w = n0(e);
            g(e).map(|v| v * w)
        };
        gk_adaptive(&f, &[a, b], &self.cfg)
    }

    /// int_a^b N0(e) g(e) de for 0 <= a < b <= 4, with g smooth on the scale
    /// `scale` (if any). Panels are dyadic towards 0 so that every panel sees
    /// a smooth integrand; a panel ending at 0 uses tanh-sinh.
    pub fn weighted<const N: usize>(
        &self,
        g: impl Fn(f64) -> [f64; N],
        a: f64,
        b: f64,
        scale: Option<f64>,
    ) -> Result<[f64; N]> {
        if !(a >= 0.0 && b <= BAND) {
            return Err(Error::Domain(format!("weighted integral on [{a}, {b}]")));
        }
        if b <= a {
            return Ok([0.0; N]);
        }
        let scale = scale.filter(|s| *s > 0.0);
        let floor = if a > 0.0 {
            a
        } else {
            b.min(scale.unwrap_or(b)) * 2f64.powi(-12)
        };
        let mut pts = vec![b];
        let mut p = b;
        while p * 0.5 > floor {
            p *= 0.5;
            pts.push(p);
        }
        pts.push(floor);
        if let Some(s) = scale {
            if s > floor && s < b {
                pts.push(s);
            }
        }
        pts.sort_by(|x, y| x.total_cmp(y));
        pts.dedup();
        let f = |e: f64| {
            let w = n0(e);
            g(e).map(|v| v * w)
        };
        let mut out = gk_adaptive(&f, &pts, &self.cfg)?;
        if a == 0.0 {
            let head = tanh_sinh_left(&f, floor, 1e-3 * self.cfg.abs_tol)?;
            for k in 0..N {
                out[k] += head[k];
            }
        }
        Ok(out)
    }

    /// int_0^y N0 for 0 <= y <= 4.
    fn head(&self, y: f64) -> Result<f64> {
        let y = y.clamp(0.0, BAND);
        let mut v = power_series_integral(y.min(SERIES_CUT), 0);
        if y > SERIES_CUT {
            v += self.smooth(|_| [1.0], SERIES_CUT, y)?[0];
        }
        Ok(v)
    }

    /// int_x^4 N0, with x clamped to [0, 4].
    pub fn tail_mass(&self, x: f64) -> Result<f64> {
        let x = x.clamp(0.0, BAND);
        if x >= SERIES_CUT {
            Ok(self.smooth(|_| [1.0], x, BAND)?[0])
        } else {
            Ok(0.5 - self.head(x)?)
        }
    }

    /// Signed cumulative int_0^y N0 for any real y; equals +-1/2 beyond the band.
    pub fn signed_mass(&self, y: f64) -> Result<f64> {
        let h = if y.abs() >= SERIES_CUT {
            0.5 - self.tail_mass(y.abs())?
        } else {
            self.head(y.abs())?
        };
        Ok(h.copysign(y))
    }

    /// int_x^infinity N0 for any real x.
    pub fn mass_above(&self, x: f64) -> Result<f64> {
        if x >= 0.0 {
            self.tail_mass(x)
        } else {
            Ok(0.5 + self.head(-x)?)
        }
    }

    /// int_x^4 e N0(e) de for |x| <= 4 (odd integrand, so depends on |x| only).
    fn linear_moment_tail(&self, x: f64) -> Result<f64> {
        let y = x.abs().min(BAND);
        if y >= SERIES_CUT {
            Ok(self.smooth(|e| [e], y, BAND)?[0])
        } else {
            Ok(LINEAR_HALF - power_series_integral(y, 1))
        }
    }

    /// int_x^4 N0(e) (e - shift) de. x below -4 is clamped to -4; x >= 4 gives 0.
    pub fn linear_tail(&self, x: f64, shift: f64) -> Result<f64> {
        if x >= BAND {
            return Ok(0.0);
        }
        let x = x.max(-BAND);
        Ok(self.linear_moment_tail(x)? - shift * self.mass_above(x)?)
    }

    /// int_R e^j N0 for j <= 6.
    pub fn moment(&self, j: u32) -> Result<f64> {
        if j > 6 {
            return Err(Error::Domain(format!("moment order {j} > 6")));
        }
        if j % 2 == 1 {
            return Ok(0.0);
        }
        let half = self.weighted(|e| [e.powi(j as i32)], 0.0, BAND, None)?[0];
        Ok(2.0 * half)
    }

    /// int_b^4 N0 / sqrt(delta^2 + e^2).
    pub fn kernel_inv_sqrt(&self, b: f64, delta: f64) -> Result<f64> {
        check_kernel_args(b, delta)?;
        if b == 0.0 && delta == 0.0 {
            return Err(Error::Divergent("kernel_inv_sqrt at b = 0, delta = 0"));
        }
        if delta == 0.0 {
            return self.inv_eps_tail(b);
        }
        let d2 = delta * delta;
        Ok(self.weighted(|e| [1.0 / (d2 + e * e).sqrt()], b, BAND, Some(delta))?[0])
    }

    /// int_b^4 N0 sqrt(delta^2 + e^2).
    pub fn kernel_sqrt(&self, b: f64, delta: f64) -> Result<f64> {
        check_kernel_args(b, delta)?;
        if delta == 0.0 {
            return self.linear_tail(b, 0.0);
        }
        let d2 = delta * delta;
        Ok(self.weighted(|e| [(d2 + e * e).sqrt()], b, BAND, Some(delta))?[0])
    }

    /// int_b^4 N0 / (delta^2 + e^2)^{3/2}.
    pub fn kernel_inv_32(&self, b: f64, delta: f64) -> Result<f64> {
        check_kernel_args(b, delta)?;
        if b == 0.0 && delta == 0.0 {
            return Err(Error::Divergent("kernel_inv_32 at b = 0, delta = 0"));
        }
        let d2 = delta * delta;
        Ok(self.weighted(
            |e| {
                let r2 = d2 + e * e;
                [1.0 / (r2 * r2.sqrt())]
            },
            b,
            BAND,
            (delta > 0.0).then_some(delta),
        )?[0])
    }

    /// (kernel_inv_sqrt, kernel_inv_32) from one pass; delta > 0.
    pub fn kernel_inv_sqrt_pair(&self, b: f64, delta: f64) -> Result<(f64, f64)> {
        check_kernel_args(b, delta)?;
        if delta <= 0.0 {
            return Err(Error::Domain("kernel pair needs delta > 0".into()));
        }
        let d2 = delta * delta;
        let r = self.weighted(
            |e| {
                let r2 = d2 + e * e;
                let ir = 1.0 / r2.sqrt();
                [ir, ir / r2]
            },
            b,
            BAND,
            Some(delta),
        )?;
        Ok((r[0], r[1]))
    }

    /// int_b^4 N0 / e for b > 0.
    pub fn inv_eps_tail(&self, b: f64) -> Result<f64> {
        if !(b > 0.0) {
            return Err(Error::Domain(format!("inv_eps_tail needs b > 0, got {b}")));
        }
        if b >= BAND {
            return Ok(0.0);
        }
        if b < INV_EPS_SERIES_CUT {
            let l = (16.0 / b).ln();
            return Ok(l * l / (4.0 * PI * PI) - 1.0 / 24.0);
        }
        if b >= SERIES_CUT {
            return Ok(self.smooth(|e| [1.0 / e], b, BAND)?[0]);
        }
        Ok(inv_eps_series_integral(b, SERIES_CUT) + self.smooth(|e| [1.0 / e], SERIES_CUT, BAND)?[0])
    }
}

fn check_kernel_args(b: f64, delta: f64) -> Result<()> {
    if !(0.0..=BAND).contains(&b) {
        return Err(Error::Domain(format!("kernel lower limit {b} outside [0, 4]")));
    }
    if !(delta >= 0.0) {
        return Err(Error::Domain(format!("negative gap {delta}")));
    }
    Ok(())
}

pub fn tail_mass(x: f64) -> Result<f64> {
    Dos::default().tail_mass(x)
}

pub fn linear_tail(x: f64, shift: f64) -> Result<f64> {
    Dos::default().linear_tail(x, shift)
}

pub fn moment(j: u32) -> Result<f64> {
    Dos::default().moment(j)
}

pub fn kernel_inv_sqrt(b: f64, delta: f64) -> Result<f64> {
    Dos::default().kernel_inv_sqrt(b, delta)
}

pub fn kernel_sqrt(b: f64, delta: f64) -> Result<f64> {
    Dos::default().kernel_sqrt(b, delta)
}

pub fn kernel_inv_32(b: f64, delta: f64) -> Result<f64> {
    Dos::default().kernel_inv_32(b, delta)
}

pub fn inv_eps_tail(b: f64) -> Result<f64> {
    Dos::default().inv_eps_tail(b)
}
