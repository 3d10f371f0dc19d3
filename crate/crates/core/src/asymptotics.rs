//! Closed-form expansions of the phase boundaries, dopings, magnetizations and
//! free energies near the edges of the phase diagram, and the sector
//! predicates that delimit where they are proven.
//!
//! Coefficients are stored exactly as sums of monomials
//! `num/den * pi^(pi2/2) * 2^(two2/2) * ln(2)^l` and evaluated on use.
//! Expansion variables: `1/U` (large U), `h = 4 pi - U` (U just below 4 pi),
//! and `U` with an overall factor `exp(-2 pi / sqrt(U))` (small U).

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::meanfield::ModelPoint;

/// `num/den * pi^(pi2/2) * 2^(two2/2) * ln(2)^l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mono {
    pub num: i64,
    pub den: i64,
    pub pi2: i32,
    pub two2: i32,
    pub l: i32,
}

const fn m(num: i64, den: i64, pi2: i32, two2: i32, l: i32) -> Mono {
    Mono { num, den, pi2, two2, l }
}

impl Mono {
    pub fn value(&self) -> f64 {
        let half_pow = |base: f64, k: i32| {
            let r = base.powi(k.div_euclid(2));
            if k.rem_euclid(2) == 1 {
                r * base.sqrt()
            } else {
                r
            }
        };
        self.num as f64 / self.den as f64 * half_pow(PI, self.pi2) * half_pow(2.0, self.two2) * LN_2.powi(self.l)
    }
}

/// One term `coeff * x^(pow2/2)` of a series in the variable x.
#[derive(Debug, Clone, Copy)]
pub struct Term {
    pub coeff: &'static [Mono],
    pub pow2: i32,
}

const fn t(pow2: i32, coeff: &'static [Mono]) -> Term {
    Term { coeff, pow2 }
}

pub fn coeff_value(c: &[Mono]) -> f64 {
    c.iter().map(Mono::value).sum()
}

fn eval_series(terms: &[Term], x: f64) -> f64 {
    let sx = x.sqrt();
    terms
        .iter()
        .map(|t| {
            let p = x.powi(t.pow2.div_euclid(2)) * if t.pow2.rem_euclid(2) == 1 { sx } else { 1.0 };
            coeff_value(t.coeff) * p
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    pub nominal_error_order: String,
}

impl SeriesValue {
    fn new(value: f64, order: &str) -> Self {
        Self {
            value,
            nominal_error_order: order.to_string(),
        }
    }
}

// Large U, variable 1/U.
pub const MU_I: &[Term] = &[
    t(-2, &[m(1, 2, 0, 0, 0)]),
    t(0, &[m(-4, 1, 0, 0, 0)]),
    t(1, &[m(4, 1, 1, 1, 0)]),
    t(2, &[m(-2, 3, 2, 0, 0)]),
    t(3, &[m(-5, 36, 3, -1, 0)]),
    t(4, &[m(-11, 270, 4, 0, 0)]),
    t(5, &[m(-691_200, 34_560, 1, -1, 0), m(-1163, 34_560, 5, -1, 0)]),
    t(6, &[m(10, 3, 2, 0, 0), m(-18_071, 1_088_640, 6, 0, 0)]),
    t(7, &[m(51_840_000, 49_766_400, 3, -1, 0), m(-907_207, 49_766_400, 7, -1, 0)]),
    t(8, &[m(11, 27, 4, 0, 0), m(-561_913, 52_254_720, 8, 0, 0)]),
];

pub const NU_I_F: &[Term] = &[
    t(1, &[m(1, 1, -1, 1, 0)]),
    t(2, &[m(1, 3, 0, 0, 0)]),
    t(3, &[m(31, 144, 1, -1, 0)]),
    t(4, &[m(203, 2160, 2, 0, 0)]),
    t(5, &[m(13_573, 138_240, 3, -1, 0), m(-691_200, 138_240, -1, -1, 0)]),
    t(6, &[m(979, 17_010, 4, 0, 0), m(-5, 3, 0, 0, 0)]),
];

pub const F_AF_LARGE_U: &[Term] = &[
    t(-2, &[m(-1, 4, 0, 0, 0)]),
    t(2, &[m(-4, 1, 0, 0, 0)]),
    t(6, &[m(20, 1, 0, 0, 0)]),
];

pub const F_P_AT_MU_I: &[Term] = &[
    t(-2, &[m(-1, 4, 0, 0, 0)]),
    t(0, &[m(4, 1, 0, 0, 0)]),
    t(1, &[m(-4, 1, 1, 1, 0)]),
    t(2, &[m(2, 3, 2, 0, 0), m(-64, 1, 0, 0, 0)]),
    t(3, &[m(4608, 36, 1, -1, 0), m(5, 36, 3, -1, 0)]),
];

pub const M1_AF_LARGE_U: &[Term] = &[
    t(0, &[m(1, 1, 0, 0, 0)]),
    t(4, &[m(-8, 1, 0, 0, 0)]),
    t(8, &[m(88, 1, 0, 0, 0)]),
];

pub const DELTA_LARGE_U: &[Term] = &[
    t(-2, &[m(1, 2, 0, 0, 0)]),
    t(2, &[m(-4, 1, 0, 0, 0)]),
    t(6, &[m(44, 1, 0, 0, 0)]),
];

// U just below 4 pi, variable h = 4 pi - U.
pub const MU_II: &[Term] = &[
    t(0, &[m(4, 1, 0, 0, 0), m(2, 1, 2, 0, 0)]),
    t(2, &[m(-8, 2, -2, 0, 0), m(-1, 2, 0, 0, 0)]),
    t(4, &[m(7, 12, -4, 0, 0)]),
    t(6, &[m(17, 288, -6, 0, 0)]),
    t(8, &[m(1861, 138_240, -8, 0, 0)]),
    t(10, &[m(15_181, 3_317_760, -10, 0, 0)]),
    t(12, &[m(469_909, 247_726_080, -12, 0, 0)]),
];

pub const MU_II_0: &[Term] = &[
    t(0, &[m(4, 1, 0, 0, 0), m(2, 1, 2, 0, 0)]),
    t(2, &[m(-8, 2, -2, 0, 0), m(-1, 2, 0, 0, 0)]),
    t(4, &[m(7, 12, -4, 0, 0)]),
];

pub const NU_II_F: &[Term] = &[
    t(0, &[m(1, 1, 0, 0, 0)]),
    t(2, &[m(-1, 1, -4, 0, 0)]),
    t(4, &[m(-5, 48, -6, 0, 0)]),
    t(6, &[m(-19, 1152, -8, 0, 0)]),
    t(8, &[m(-2039, 552_960, -10, 0, 0)]),
    t(10, &[m(-3691, 2_654_208, -12, 0, 0)]),
    t(12, &[m(-2_369_993, 2_972_712_960, -14, 0, 0)]),
];

pub const NU_II_P: &[Term] = &[
    t(0, &[m(1, 1, 0, 0, 0)]),
    t(2, &[m(-1, 1, -4, 0, 0)]),
    t(4, &[m(-1, 24, -6, 0, 0)]),
    t(6, &[m(1, 144, -8, 0, 0)]),
    t(8, &[m(2851, 552_960, -10, 0, 0)]),
    t(10, &[m(15_839, 6_635_520, -12, 0, 0)]),
    t(12, &[m(207_463, 198_180_864, -14, 0, 0)]),
];

pub const F_AT_MU_II: &[Term] = &[
    t(0, &[m(-4, 1, 0, 0, 0), m(-1, 1, 2, 0, 0)]),
    t(2, &[m(1, 4, 0, 0, 0), m(4, 1, -2, 0, 0)]),
    t(4, &[m(-24, 12, -6, 0, 0), m(-7, 12, -4, 0, 0)]),
    t(6, &[m(72, 288, -8, 0, 0), m(-17, 288, -6, 0, 0)]),
    t(8, &[m(8040, 138_240, -10, 0, 0), m(-1861, 138_240, -8, 0, 0)]),
    t(10, &[m(50_952, 3_317_760, -12, 0, 0), m(-15_181, 3_317_760, -10, 0, 0)]),
    t(12, &[m(3_734_192, 743_178_240, -14, 0, 0), m(-1_409_727, 743_178_240, -12, 0, 0)]),
];

// Small U, variable U, times exp(-2 pi / sqrt(U)).
pub const MU_III: &[Term] = &[
    t(0, &[m(16, 1, 0, 1, 0)]),
    t(1, &[m(4, 1, -2, 1, 0), m(2, 1, -2, 1, 1)]),
    t(2, &[m(12, 4, -4, -1, 0), m(-20, 4, -4, -1, 1), m(3, 4, -4, -1, 2)]),
    t(3, &[m(56, 32, -6, -1, 0), m(76, 32, -6, -1, 1), m(-30, 32, -6, -1, 2), m(5, 32, -6, -1, 3)]),
    t(
        4,
        &[
            m(-7920, 3072, -8, -1, 0),
            m(-1056, 3072, -8, -1, 1),
            m(696, 3072, -8, -1, 2),
            m(-680, 3072, -8, -1, 3),
            m(105, 3072, -8, -1, 4),
        ],
    ),
];

/// Truncated at sqrt(U) with that last term halved.
pub const NU_III_P: &[Term] = &[
    t(-1, &[m(32, 1, -2, 1, 0)]),
    t(0, &[m(-8, 1, -4, 1, 0), m(-4, 1, -4, 1, 1)]),
    t(1, &[m(44, 4, -6, -1, 0), m(20, 4, -6, -1, 1), m(-1, 4, -6, -1, 2)]),
];

pub const D0P_III: &[Term] = &[
    t(-1, &[m(32, 1, -2, 1, 0)]),
    t(0, &[m(-8, 1, -4, 1, 0), m(-4, 1, -4, 1, 1)]),
    t(1, &[m(44, 2, -6, -1, 0), m(20, 2, -6, -1, 1), m(-1, 2, -6, -1, 2)]),
    t(2, &[m(-440, 16, -8, -1, 0), m(-124, 16, -8, -1, 1), m(-18, 16, -8, -1, 2), m(-1, 16, -8, -1, 3)]),
    t(
        3,
        &[
            m(43_536, 1536, -10, -1, 0),
            m(16_416, 1536, -10, -1, 1),
            m(5208, 1536, -10, -1, 2),
            m(-184, 1536, -10, -1, 3),
            m(-15, 1536, -10, -1, 4),
        ],
    ),
];

fn require_pos(name: &str, u: f64) -> Result<()> {
    if !(u > 0.0 && u.is_finite()) {
        return Err(Error::Domain(format!("{name} needs U > 0, got {u}")));
    }
    Ok(())
}

fn below_4pi(name: &str, u: f64) -> Result<f64> {
    require_pos(name, u)?;
    let h = 4.0 * PI - u;
    if h < 0.0 {
        return Err(Error::Domain(format!("{name} needs U <= 4 pi, got {u}")));
    }
    Ok(h)
}

/// exp(-2 pi / sqrt(U)).
pub fn small_u_scale(u: f64) -> f64 {
    (-2.0 * PI / u.sqrt()).exp()
}

pub fn mu_i_app(u: f64) -> Result<SeriesValue> {
    require_pos("mu_I_app", u)?;
    Ok(SeriesValue::new(eval_series(MU_I, 1.0 / u), "O(U^{-9/2})"))
}

pub fn mu_ii_app(u: f64) -> Result<SeriesValue> {
    let h = below_4pi("mu_II_app", u)?;
    Ok(SeriesValue::new(eval_series(MU_II, h), "O((4pi-U)^7)"))
}

pub fn mu_iii_app(u: f64) -> Result<SeriesValue> {
    require_pos("mu_III_app", u)?;
    Ok(SeriesValue::new(eval_series(MU_III, u) * small_u_scale(u), "O(U^{5/2} e^{-2pi/sqrt(U)})"))
}

pub fn nu_i_f(u: f64) -> Result<SeriesValue> {
    require_pos("nu_I_F", u)?;
    Ok(SeriesValue::new(eval_series(NU_I_F, 1.0 / u), "O(U^{-7/2})"))
}

pub fn nu_ii_f(u: f64) -> Result<SeriesValue> {
    let h = below_4pi("nu_II_F", u)?;
    Ok(SeriesValue::new(eval_series(NU_II_F, h), "O((4pi-U)^7)"))
}

pub fn nu_ii_p(u: f64) -> Result<SeriesValue> {
    let h = below_4pi("nu_II_P", u)?;
    Ok(SeriesValue::new(eval_series(NU_II_P, h), "O((4pi-U)^7)"))
}

pub fn nu_iii_p(u: f64) -> Result<SeriesValue> {
    require_pos("nu_III_P", u)?;
    Ok(SeriesValue::new(eval_series(NU_III_P, u) * small_u_scale(u), "O(sqrt(U) e^{-2pi/sqrt(U)})"))
}

/// P doping at the AF/P crossing, untruncated through U^{3/2}.
pub fn d0p_sector_iii(u: f64) -> Result<SeriesValue> {
    require_pos("d0P_sector_III", u)?;
    Ok(SeriesValue::new(eval_series(D0P_III, u) * small_u_scale(u), "O(U^2 e^{-2pi/sqrt(U)})"))
}

pub fn m1_af_large_u(u: f64) -> Result<SeriesValue> {
    require_pos("m1_af_large_U", u)?;
    Ok(SeriesValue::new(eval_series(M1_AF_LARGE_U, 1.0 / u), "O(U^{-6})"))
}

pub fn delta_large_u(u: f64) -> Result<SeriesValue> {
    require_pos("delta_large_U", u)?;
    Ok(SeriesValue::new(eval_series(DELTA_LARGE_U, 1.0 / u), "O(U^{-5})"))
}

pub fn delta_small_u(u: f64) -> Result<SeriesValue> {
    require_pos("delta_small_U", u)?;
    Ok(SeriesValue::new(32.0 * small_u_scale(u), "relative O(e^{-4pi/sqrt(U)}/sqrt(U))"))
}

pub fn f_af_large_u(u: f64) -> Result<SeriesValue> {
    require_pos("f_af_large_U", u)?;
    Ok(SeriesValue::new(eval_series(F_AF_LARGE_U, 1.0 / u), "O(U^{-5})"))
}

pub fn f_af_small_u(u: f64) -> Result<SeriesValue> {
    require_pos("f_af_small_U", u)?;
    let e2 = small_u_scale(u).powi(2);
    let v = -16.0 / (PI * PI) - 512.0 * e2 / (PI * u.sqrt()) - 128.0 * e2 / (PI * PI);
    Ok(SeriesValue::new(v, "O(e^{-8pi/sqrt(U)}/U)"))
}

/// (F_AF = F_F, F_P) at the AF/F crossing.
pub fn f_at_mu_i(u: f64) -> Result<(SeriesValue, SeriesValue)> {
    require_pos("f_at_mu_I", u)?;
    Ok((
        SeriesValue::new(eval_series(F_AF_LARGE_U, 1.0 / u), "O(U^{-5})"),
        SeriesValue::new(eval_series(F_P_AT_MU_I, 1.0 / u), "O(U^{-2})"),
    ))
}

pub fn f_at_mu_ii(u: f64) -> Result<SeriesValue> {
    let h = below_4pi("f_at_mu_II", u)?;
    Ok(SeriesValue::new(eval_series(F_AT_MU_II, h), "O((4pi-U)^7)"))
}

pub fn mu_ii_0(u: f64) -> f64 {
    eval_series(MU_II_0, 4.0 * PI - u)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sector {
    I,
    II,
    III,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorParams {
    pub delta: f64,
    pub u0: f64,
    pub m_bound: f64,
}

impl SectorParams {
    /// The illustration values: delta = 0.001, M = 1, U0 = 9 for I and II
    /// and U0 = 7 for III.
    pub fn illustration(which: Sector) -> Self {
        Self {
            delta: 1e-3,
            u0: if which == Sector::III { 7.0 } else { 9.0 },
            m_bound: 1.0,
        }
    }

    pub fn validate(&self, which: Sector) -> Result<()> {
        let ok = self.delta > 0.0
            && self.m_bound > 0.0
            && match which {
                Sector::I => self.u0 >= 2.0 * self.delta,
                Sector::II => self.u0 > 0.0 && self.u0 < 4.0 * PI,
                Sector::III => self.delta < 8.0 && self.u0 > 0.0,
            };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("invalid sector parameters {self:?} for {which:?}")))
        }
    }
}

pub fn in_sector(at: ModelPoint, which: Sector, p: &SectorParams) -> bool {
    let (u, mu) = (at.u, at.mu);
    match which {
        Sector::I => u >= p.u0 && mu >= 0.0 && mu <= 0.5 * u - p.delta,
        Sector::II => u >= p.u0 && u < 4.0 * PI && (mu - mu_ii_0(u)).abs() <= p.m_bound * (4.0 * PI - u).powi(3),
        Sector::III => {
            let e = small_u_scale(u);
            u > 0.0 && u <= p.u0 && mu >= (16.0 + p.delta) * e && mu <= (32.0 - p.delta) * e
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 8.0 * f64::EPSILON * b.abs()
    }

    #[test]
    fn mono_half_powers() {
        assert!(close(m(4, 1, 1, 1, 0).value(), 4.0 * (2.0 * PI).sqrt()));
        assert!(close(m(-5, 36, 3, -1, 0).value(), -5.0 * PI.powf(1.5) / (36.0 * SQRT_2)));
        assert!(close(m(1, 1, -1, 1, 0).value(), (2.0 / PI).sqrt()));
    }

    #[test]
    fn constant_terms() {
        assert!((mu_ii_app(4.0 * PI).unwrap().value - (4.0 + 2.0 * PI)).abs() < 1e-14);
        assert_eq!(nu_ii_f(4.0 * PI).unwrap().value, 1.0);
        assert_eq!(nu_ii_p(4.0 * PI).unwrap().value, 1.0);
        assert!((f_at_mu_ii(4.0 * PI).unwrap().value + 4.0 + PI).abs() < 1e-14);
    }

    #[test]
    fn domains() {
        assert!(mu_ii_app(13.0).is_err());
        assert!(mu_i_app(0.0).is_err());
        assert!(nu_iii_p(-1.0).is_err());
    }
}
