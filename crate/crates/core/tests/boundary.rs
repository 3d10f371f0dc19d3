use std::f64::consts::PI;

use hhf_core::asymptotics::{mu_i_app, mu_ii_app, mu_iii_app, nu_i_f, nu_ii_f, nu_ii_p, nu_iii_p};
use hhf_core::boundary::{mixed_gap, Boundary, BoundaryConfig, BoundaryKind};
use hhf_core::free_energy::PhaseLabel;
use hhf_core::{Error, ModelPoint, SolverConfig};

#[test]
fn kind_parsing_and_windows() {
    assert_eq!("af-f".parse::<BoundaryKind>().unwrap(), BoundaryKind::AF_F);
    assert_eq!("F_P".parse::<BoundaryKind>().unwrap(), BoundaryKind::F_P);
    assert!("X".parse::<BoundaryKind>().is_err());
    assert!(BoundaryKind::F_P.in_window(12.0) && !BoundaryKind::F_P.in_window(4.0 * PI));
    assert!(BoundaryKind::AF_P.in_window(7.0) && !BoundaryKind::AF_P.in_window(8.0));
    assert!(BoundaryKind::AF_F.in_window(12.0) && !BoundaryKind::AF_F.in_window(11.0));
    assert_eq!(BoundaryKind::AF_P.phases(), (PhaseLabel::AF, PhaseLabel::P));
}

#[test]
fn out_of_window_needs_exploratory() {
    let b = Boundary::default();
    assert!(matches!(b.crossing(5.0, BoundaryKind::AF_F), Err(Error::Domain(_))));
    let bx = Boundary::new(
        SolverConfig::default(),
        BoundaryConfig {
            allow_exploratory: true,
            ..Default::default()
        },
    );
    let p = bx.crossing(11.5, BoundaryKind::AF_F).unwrap();
    assert!(p.exploratory);
}

#[test]
fn af_f_crossing_near_expansion() {
    let b = Boundary::default();
    let p = b.crossing(40.0, BoundaryKind::AF_F).unwrap();
    assert!(!p.exploratory && p.bisection_width <= 1e-11);
    assert!((p.mu_star - mu_i_app(40.0).unwrap().value).abs() < 1e-3);
    // Both free energies agree at the crossing, and the sign flips across it.
    assert!(b.difference(40.0, BoundaryKind::AF_F, p.mu_star - 1e-6).unwrap() < 0.0);
    assert!(b.difference(40.0, BoundaryKind::AF_F, p.mu_star + 1e-6).unwrap() > 0.0);
    let (lo, hi) = mixed_gap(&p);
    assert!(lo.abs() < 1e-12);
    assert!(hi > lo && (hi - nu_i_f(40.0).unwrap().value).abs() < 2e-3);
}

#[test]
fn f_p_crossing_near_expansion() {
    let b = Boundary::default();
    let u = 4.0 * PI - 0.5;
    let p = b.crossing_tol(u, BoundaryKind::F_P, 1e-15).unwrap();
    assert!((p.mu_star - mu_ii_app(u).unwrap().value).abs() < 1e-6);
    assert!((p.doping_low - nu_ii_f(u).unwrap().value).abs() < 1e-5);
    assert!((p.doping_high - nu_ii_p(u).unwrap().value).abs() < 1e-5);
    assert!(p.doping_high > p.doping_low);
}

#[test]
fn af_p_crossing_near_expansion() {
    let b = Boundary::default();
    let p = b.crossing(4.0, BoundaryKind::AF_P).unwrap();
    let app = mu_iii_app(4.0).unwrap().value;
    assert!(((p.mu_star - app) / app).abs() < 0.05, "{} vs {app}", p.mu_star);
    assert!(p.doping_low.abs() < 1e-12);
    assert!(((p.doping_high - nu_iii_p(4.0).unwrap().value) / p.doping_high).abs() < 0.3);
}

#[test]
fn explicit_bracket_without_sign_change() {
    let b = Boundary::default();
    let r = b.find_crossing(40.0, BoundaryKind::AF_F, (2.0, 3.0), 1e-11);
    assert!(matches!(r, Err(Error::NoSignChange { .. })));
}

#[test]
fn trace_keeps_grid_order_and_reports_failures() {
    let b = Boundary::default();
    let grid = [40.0, 20.0, 5.0, 30.0];
    let t = b.trace(BoundaryKind::AF_F, &grid, 1e-11);
    let us: Vec<f64> = t.points.iter().map(|p| p.u).collect();
    assert_eq!(us, vec![40.0, 20.0, 30.0]);
    assert_eq!(t.failures.len(), 1);
    assert_eq!(t.failures[0].u, 5.0);
    assert_eq!(t.u_grid, grid.to_vec());
    // mu_star grows with U along the AF_F curve.
    assert!(t.points[1].mu_star < t.points[2].mu_star && t.points[2].mu_star < t.points[0].mu_star);
    let again = b.trace(BoundaryKind::AF_F, &grid, 1e-11);
    assert_eq!(t, again);
}

#[test]
fn crossing_point_classifies_either_side() {
    let b = Boundary::default();
    let p = b.crossing(30.0, BoundaryKind::AF_F).unwrap();
    let lo = b.fe.classify(ModelPoint::new(30.0, p.mu_star - 1e-4).unwrap()).unwrap();
    let hi = b.fe.classify(ModelPoint::new(30.0, p.mu_star + 1e-4).unwrap()).unwrap();
    assert_eq!((lo.phase, hi.phase), (PhaseLabel::AF, PhaseLabel::F));
}
