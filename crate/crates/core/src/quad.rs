//! Quadrature rules: globally adaptive Gauss-Kronrod (7/15) over a set of
//! panels, and tanh-sinh for panels that touch an endpoint singularity.
//!
//! Integrands are vector valued (`[f64; N]`) so that related integrals, e.g.
//! a kernel and its derivative, share one pass of function evaluations.

use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 200,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.max_subdivisions > 0) {
            return Err(Error::Domain(format!("invalid quadrature config {self:?}")));
        }
        Ok(())
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// 7-point Gauss weights for nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One Gauss-Kronrod 15 panel. Returns the Kronrod estimate and a
/// QUADPACK-style error estimate per component.
pub fn gk15<const N: usize, F>(f: &F, a: f64, b: f64) -> ([f64; N], [f64; N])
where
    F: Fn(f64) -> [f64; N],
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = [0.0; N];
    let mut rg = [0.0; N];
    let mut fv1 = [[0.0; N]; 7];
    let mut fv2 = [[0.0; N]; 7];
    for k in 0..N {
        rk[k] = fc[k] * WGK[7];
        rg[k] = fc[k] * WG[3];
    }
    for j in 0..7 {
        let x = h * XGK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        for k in 0..N {
            rk[k] += WGK[j] * (f1[k] + f2[k]);
            if j % 2 == 1 {
                rg[k] += WG[j / 2] * (f1[k] + f2[k]);
            }
        }
        fv1[j] = f1;
        fv2[j] = f2;
    }
    let mut err = [0.0; N];
    for k in 0..N {
        let mean = 0.5 * rk[k];
        let mut asc = WGK[7] * (fc[k] - mean).abs();
        for j in 0..7 {
            asc += WGK[j] * ((fv1[j][k] - mean).abs() + (fv2[j][k] - mean).abs());
        }
        asc *= h.abs();
        let mut e = ((rk[k] - rg[k]) * h).abs();
        if asc != 0.0 && e != 0.0 {
            e = asc * (200.0 * e / asc).powf(1.5).min(1.0);
        }
        err[k] = e.max(50.0 * f64::EPSILON * (rk[k] * h).abs());
        rk[k] *= h;
    }
    (rk, err)
}

struct Panel<const N: usize> {
    a: f64,
    b: f64,
    val: [f64; N],
    key: f64,
}

impl<const N: usize> PartialEq for Panel<N> {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}
impl<const N: usize> Eq for Panel<N> {}
impl<const N: usize> PartialOrd for Panel<N> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Panel<N> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key.total_cmp(&other.key)
    }
}

fn sum_abs<const N: usize>(v: &[f64; N]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

/// Globally adaptive GK15 over consecutive panels `[pts[i], pts[i+1]]`.
///
/// The stopping rule is the summed error estimate against
/// `max(abs_tol, rel_tol * |I|)`, measured on the sum of component magnitudes.
/// `max_subdivisions` counts bisections beyond the initial panels.
pub fn gk_adaptive<const N: usize, F>(f: &F, pts: &[f64], cfg: &QuadratureConfig) -> Result<[f64; N]>
where
    F: Fn(f64) -> [f64; N],
{
    let mut heap = BinaryHeap::with_capacity(pts.len() + 2 * cfg.max_subdivisions);
    let mut total = [0.0; N];
    let mut total_err = 0.0;
    for w in pts.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (val, err) = gk15(f, w[0], w[1]);
        for k in 0..N {
            total[k] += val[k];
        }
        let key = sum_abs(&err);
        total_err += key;
        heap.push(Panel { a: w[0], b: w[1], val, key });
    }
    let mut splits = 0;
    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * sum_abs(&total));
        if total_err <= tol {
            return Ok(total);
        }
        if splits >= cfg.max_subdivisions {
            return Err(Error::Accuracy {
                estimate: total[0],
                error: total_err,
            });
        }
        let Some(worst) = heap.pop() else {
            return Ok(total);
        };
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            // Panel is at floating-point resolution; accept it as is.
            heap.push(Panel { key: 0.0, ..worst });
            total_err = heap.iter().map(|p| p.key).sum();
            splits += 1;
            continue;
        }
        let (v1, e1) = gk15(f, worst.a, m);
        let (v2, e2) = gk15(f, m, worst.b);
        for k in 0..N {
            total[k] += v1[k] + v2[k] - worst.val[k];
        }
        let k1 = sum_abs(&e1);
        let k2 = sum_abs(&e2);
        total_err += k1 + k2 - worst.key;
        heap.push(Panel { a: worst.a, b: m, val: v1, key: k1 });
        heap.push(Panel { a: m, b: worst.b, val: v2, key: k2 });
        splits += 1;
        if splits % 32 == 0 {
            // Resum to keep running totals from drifting.
            total = [0.0; N];
            total_err = 0.0;
            for p in heap.iter() {
                for k in 0..N {
                    total[k] += p.val[k];
                }
                total_err += p.key;
            }
        }
    }
}

/// Tanh-sinh quadrature on `[0, s]`, tolerant of an integrable singularity at
/// the left endpoint. Nodes are generated so that small abscissae keep full
/// relative precision; a node that underflows to exactly 0 is skipped.
pub fn tanh_sinh_left<const N: usize, F>(f: &F, s: f64, tol: f64) -> Result<[f64; N]>
where
    F: Fn(f64) -> [f64; N],
{
    use std::f64::consts::FRAC_PI_2;
    let node = |t: f64| -> (f64, f64) {
        let u = FRAC_PI_2 * t.sinh();
        let e = (-2.0 * u.abs()).exp();
        // x/s = 1/(1+exp(-2u)); written to avoid cancellation for u << 0.
        let frac = if u >= 0.0 { 1.0 / (1.0 + e) } else { e / (1.0 + e) };
        let sech2 = 4.0 * e / ((1.0 + e) * (1.0 + e));
        (s * frac, 0.5 * s * FRAC_PI_2 * t.cosh() * sech2)
    };
    let tmax = 4.0;
    let mut h = 1.0;
    let mut sum = [0.0; N];
    let add = |sum: &mut [f64; N], t: f64| {
        let (x, w) = node(t);
        if x <= 0.0 || x >= s || w == 0.0 {
            return;
        }
        let fx = f(x);
        for k in 0..N {
            sum[k] += w * fx[k];
        }
    };
    let mut t = -tmax;
    while t <= tmax + 1e-12 {
        add(&mut sum, t);
        t += h;
    }
    let mut prev: [f64; N] = sum.map(|v| v * h);
    for _ in 0..10 {
        let mut t = -tmax + 0.5 * h;
        while t < tmax {
            add(&mut sum, t);
            t += h;
        }
        h *= 0.5;
        let cur = sum.map(|v| v * h);
        let diff: f64 = cur.iter().zip(prev.iter()).map(|(a, b)| (a - b).abs()).sum();
        if diff <= tol.max(1e-15 * sum_abs(&cur)) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Accuracy {
        estimate: prev[0],
        error: f64::NAN,
    })
}
