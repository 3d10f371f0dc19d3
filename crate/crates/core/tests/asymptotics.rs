use std::f64::consts::{LN_2, PI, SQRT_2};

use hhf_core::asymptotics::*;
use hhf_core::{Error, ModelPoint};

// Each expansion written out again as a plain formula, so a wrong monomial
// in the coefficient tables shows up as a mismatch.

fn mu_i(u: f64) -> f64 {
    let s = u.sqrt();
    let sp = (PI / 2.0).sqrt();
    u / 2.0 - 4.0 + 4.0 * (2.0 * PI).sqrt() / s - 2.0 * PI / (3.0 * u)
        - 5.0 * PI.powf(1.5) / (36.0 * SQRT_2 * u * s)
        - 11.0 * PI * PI / (270.0 * u * u)
        - sp * (691_200.0 + 1163.0 * PI * PI) / (34_560.0 * u * u * s)
        + (10.0 * PI / 3.0 - 18_071.0 * PI.powi(3) / 1_088_640.0) / u.powi(3)
        + PI.powf(1.5) * (51_840_000.0 - 907_207.0 * PI * PI) / (49_766_400.0 * SQRT_2 * u.powi(3) * s)
        + (11.0 * PI * PI / 27.0 - 561_913.0 * PI.powi(4) / 52_254_720.0) / u.powi(4)
}

fn mu_ii(u: f64) -> f64 {
    let h = 4.0 * PI - u;
    4.0 + 2.0 * PI - (8.0 + PI) / (2.0 * PI) * h + 7.0 / (12.0 * PI * PI) * h * h
        + 17.0 / (288.0 * PI.powi(3)) * h.powi(3)
        + 1861.0 / (138_240.0 * PI.powi(4)) * h.powi(4)
        + 15_181.0 / (3_317_760.0 * PI.powi(5)) * h.powi(5)
        + 469_909.0 / (247_726_080.0 * PI.powi(6)) * h.powi(6)
}

fn mu_iii(u: f64) -> f64 {
    let l = LN_2;
    let s = u.sqrt();
    (16.0 * SQRT_2 + 2.0 * SQRT_2 * (2.0 + l) / PI * s
        + (l - 6.0) * (8f64.ln() - 2.0) / (4.0 * SQRT_2 * PI * PI) * u
        + (56.0 + l * (76.0 + 5.0 * (l - 6.0) * l)) / (32.0 * SQRT_2 * PI.powi(3)) * u * s
        + (l - 6.0) * (1320.0 + l * (396.0 + 5.0 * l * (21.0 * l - 10.0))) / (3072.0 * SQRT_2 * PI.powi(4)) * u * u)
        * (-2.0 * PI / s).exp()
}

fn nu_i(u: f64) -> f64 {
    let s = u.sqrt();
    (2.0 / PI).sqrt() / s + 1.0 / (3.0 * u) + 31.0 * (PI / 2.0).sqrt() / (144.0 * u * s)
        + 203.0 * PI / (2160.0 * u * u)
        + (13_573.0 * PI * PI - 691_200.0) / (138_240.0 * (2.0 * PI).sqrt() * u * u * s)
        + (979.0 * PI * PI / 17_010.0 - 5.0 / 3.0) / u.powi(3)
}

fn nu_ii_f_ref(u: f64) -> f64 {
    let h = 4.0 * PI - u;
    1.0 - h / (PI * PI) - 5.0 / (48.0 * PI.powi(3)) * h * h - 19.0 / (1152.0 * PI.powi(4)) * h.powi(3)
        - 2039.0 / (552_960.0 * PI.powi(5)) * h.powi(4)
        - 3691.0 / (2_654_208.0 * PI.powi(6)) * h.powi(5)
        - 2_369_993.0 / (2_972_712_960.0 * PI.powi(7)) * h.powi(6)
}

fn nu_ii_p_ref(u: f64) -> f64 {
    let h = 4.0 * PI - u;
    1.0 - h / (PI * PI) - h * h / (24.0 * PI.powi(3)) + h.powi(3) / (144.0 * PI.powi(4))
        + 2851.0 / (552_960.0 * PI.powi(5)) * h.powi(4)
        + 15_839.0 / (6_635_520.0 * PI.powi(6)) * h.powi(5)
        + 207_463.0 / (198_180_864.0 * PI.powi(7)) * h.powi(6)
}

fn nu_iii(u: f64) -> f64 {
    let l = LN_2;
    let s = u.sqrt();
    (32.0 * SQRT_2 / (PI * s) - 4.0 * SQRT_2 * (2.0 + l) / (PI * PI)
        + 0.5 * (22.0 - l) * (2.0 + l) / (2.0 * SQRT_2 * PI.powi(3)) * s)
        * (-2.0 * PI / s).exp()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn coefficient_tables_match_closed_forms() {
    for u in [9.0, 20.0, 40.0, 200.0] {
        assert!(rel(mu_i_app(u).unwrap().value, mu_i(u)) < 1e-14, "mu_I U={u}");
        assert!(rel(nu_i_f(u).unwrap().value, nu_i(u)) < 1e-13, "nu_I U={u}");
    }
    for h in [0.02, 0.3, 1.0, 3.0] {
        let u = 4.0 * PI - h;
        assert!(rel(mu_ii_app(u).unwrap().value, mu_ii(u)) < 1e-14, "mu_II h={h}");
        assert!(rel(nu_ii_f(u).unwrap().value, nu_ii_f_ref(u)) < 1e-14, "nu_II^F h={h}");
        assert!(rel(nu_ii_p(u).unwrap().value, nu_ii_p_ref(u)) < 1e-14, "nu_II^P h={h}");
    }
    for u in [0.5, 2.0, 4.0, 7.0] {
        assert!(rel(mu_iii_app(u).unwrap().value, mu_iii(u)) < 1e-13, "mu_III U={u}");
        assert!(rel(nu_iii_p(u).unwrap().value, nu_iii(u)) < 1e-13, "nu_III U={u}");
    }
}

#[test]
fn individual_coefficients() {
    assert!((coeff_value(MU_I[3].coeff) + 2.0 * PI / 3.0).abs() < 1e-15);
    assert_eq!(MU_I[3].pow2, 2);
    let c4 = coeff_value(NU_II_P[4].coeff);
    assert!(rel(c4, 2851.0 / (552_960.0 * PI.powi(5))) < 1e-15);
    assert!(rel(coeff_value(MU_II[1].coeff), -(8.0 + PI) / (2.0 * PI)) < 1e-15);
}

#[test]
fn sector_ii_dopings_are_ordered() {
    for h in [0.1, 0.5, 1.0] {
        let u = 4.0 * PI - h;
        let (f, p) = (nu_ii_f(u).unwrap().value, nu_ii_p(u).unwrap().value);
        assert!(f < p && p < 1.0, "h={h}: {f} {p}");
    }
}

#[test]
fn large_u_af_series() {
    let u: f64 = 40.0;
    assert!((m1_af_large_u(u).unwrap().value - (1.0 - 8.0 / (u * u) + 88.0 / u.powi(4))).abs() < 1e-15);
    assert!((delta_large_u(u).unwrap().value - (u / 2.0 - 4.0 / u + 44.0 / u.powi(3))).abs() < 1e-14);
    assert!((f_af_large_u(u).unwrap().value - (-u / 4.0 - 4.0 / u + 20.0 / u.powi(3))).abs() < 1e-14);
}

#[test]
fn quoted_values() {
    assert!((mu_i_app(40.0).unwrap().value - 17.5282).abs() < 1e-4);
    assert!((nu_i_f(40.0).unwrap().value - 0.135565).abs() < 1e-5);
    assert!((mu_ii_app(4.0 * PI).unwrap().value - (4.0 + 2.0 * PI)).abs() < 1e-14);
    assert!((mu_ii_0(4.0 * PI) - (4.0 + 2.0 * PI)).abs() < 1e-14);
    assert!(small_u_scale(4.0) > 0.0 && small_u_scale(4.0) < 0.05);
}

#[test]
fn domains_are_enforced() {
    assert!(matches!(mu_i_app(-1.0), Err(Error::Domain(_))));
    assert!(matches!(mu_ii_app(4.0 * PI + 0.1), Err(Error::Domain(_))));
    assert!(matches!(nu_ii_f(13.0), Err(Error::Domain(_))));
    assert!(matches!(mu_iii_app(0.0), Err(Error::Domain(_))));
    assert!(mu_iii_app(f64::NAN).is_err());
}

#[test]
fn sector_membership() {
    let p1 = SectorParams::illustration(Sector::I);
    assert!(in_sector(ModelPoint::new(40.0, 10.0).unwrap(), Sector::I, &p1));
    assert!(!in_sector(ModelPoint::new(40.0, 19.9995).unwrap(), Sector::I, &p1));
    assert!(!in_sector(ModelPoint::new(8.0, 1.0).unwrap(), Sector::I, &p1));

    let p2 = SectorParams::illustration(Sector::II);
    let u = 4.0 * PI - 0.5;
    assert!(in_sector(ModelPoint::new(u, mu_ii_0(u)).unwrap(), Sector::II, &p2));
    assert!(!in_sector(ModelPoint::new(u, mu_ii_0(u) + 0.2).unwrap(), Sector::II, &p2));

    let p3 = SectorParams::illustration(Sector::III);
    let e = small_u_scale(2.0);
    assert!(in_sector(ModelPoint::new(2.0, 24.0 * e).unwrap(), Sector::III, &p3));
    assert!(!in_sector(ModelPoint::new(2.0, 10.0 * e).unwrap(), Sector::III, &p3));

    assert!(SectorParams { delta: -1.0, u0: 9.0, m_bound: 1.0 }.validate(Sector::I).is_err());
    assert!(SectorParams { delta: 1e-3, u0: 13.0, m_bound: 1.0 }.validate(Sector::II).is_err());
    assert!(SectorParams { delta: 9.0, u0: 7.0, m_bound: 1.0 }.validate(Sector::III).is_err());
    assert!(p3.validate(Sector::III).is_ok());
}
