//! Scenario execution: each kind has fixed default parameters, a fixed column
//! schema, and a row producer.

use std::f64::consts::TAU;

use rayon::prelude::*;

use gapscale_core::asym::{
    nu_for_omega, one_arc_toeplitz_asymptotic, one_gap_asymptotic, transition_asymptotic, transition_asymptotic_at,
    transition_params, two_arc_toeplitz_asymptotic, two_gap_geometry, two_gap_oscillation, TransitionParams,
    TransitionVariant,
};
use gapscale_core::fredholm::{default_nodes, log_gap_probability, IntervalSet};
use gapscale_core::legendre_limit::{default_probes, kernel_limit};
use gapscale_core::scaling::{ScalingContext, Side};
use gapscale_core::toeplitz::{diff_identity_check, log_toeplitz_det_szego, ArcSet};
use gapscale_core::{AsymptoticBreakdown, Complex64};

use crate::error::{CliError, CliResult};
use crate::report::{Report, Row};
use crate::scenario::{AsymVariant, Kind, Params, Suite};

/// Resolved numeric parameters after defaults are applied.
#[derive(Debug, Clone, Copy)]
struct P {
    s: f64,
    alpha: f64,
    beta: f64,
    nu: f64,
    n: usize,
    nodes: Option<usize>,
    k: Option<usize>,
}

/// Default parameters for each kind.
pub fn defaults(kind: Kind) -> Params {
    let base = Params {
        s: Some(8.0),
        alpha: Some(-1.0),
        beta: Some(1.0),
        nu: Some(1e-3),
        n: Some(1024),
        nodes: None,
        k: None,
    };
    let with = |s: f64, nu: f64, n: usize| Params {
        s: Some(s),
        nu: Some(nu),
        n: Some(n),
        ..base
    };
    match kind {
        Kind::Fredholm | Kind::Toeplitz => base,
        Kind::Asym(AsymVariant::TransitionLargeK) => with(40.0, 1e-3, 1024),
        Kind::Asym(AsymVariant::TwoArc) => with(4.0, 1e-3, 2048),
        Kind::Asym(AsymVariant::TwoGap) => with(10.0, 0.3, 1024),
        Kind::Asym(_) => base,
        Kind::Verify(Suite::Appendix) => with(2.0, 0.1, 256),
        Kind::Verify(Suite::Geometry) | Kind::Verify(Suite::ThetaRegime) => with(10.0, 0.3, 1024),
        Kind::Verify(Suite::Legendre) => Params {
            k: Some(1),
            ..with(8.0, 1e-3, 2048)
        },
        Kind::Verify(Suite::Scaling) => with(8.0, 5e-4, 100_000),
        Kind::Verify(Suite::Diffid) => Params { n: None, ..base },
        Kind::Verify(_) => base,
    }
}

fn resolve(kind: Kind, given: Params) -> CliResult<P> {
    let p = defaults(kind).overridden_by(given);
    let need =
        |v: Option<f64>, name: &str| v.ok_or_else(|| CliError::Config(format!("parameter '{name}' is required")));
    Ok(P {
        s: need(p.s, "s")?,
        alpha: need(p.alpha, "alpha")?,
        beta: need(p.beta, "beta")?,
        nu: need(p.nu, "nu")?,
        n: p.n.unwrap_or(0),
        nodes: p.nodes,
        k: p.k,
    })
}

fn cols(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn with_tail(head: &[&str], terms: &[&str], tail: &[&str]) -> Vec<String> {
    head.iter().chain(terms).chain(tail).map(|s| s.to_string()).collect()
}

const TRANSITION_INPUTS: [&str; 8] = ["s", "alpha", "beta", "nu", "gamma", "omega", "k", "x"];
const VERIFY_TAIL: [&str; 3] = ["residual", "limit", "pass"];

/// Column schema of each kind; rows are checked against it.
pub fn schema(kind: Kind) -> Vec<String> {
    match kind {
        Kind::Fredholm => cols(&["s", "alpha", "beta", "nu", "nodes", "log_p", "p"]),
        Kind::Toeplitz => cols(&["s", "alpha", "beta", "nu", "n", "log_d", "min_rho"]),
        Kind::Asym(v) => match v {
            AsymVariant::OneGap => with_tail(
                &["s", "alpha", "beta"],
                &["quadratic", "log_s", "log_half_length", "widom_dyson"],
                &["total", "warnings"],
            ),
            AsymVariant::OneArc => with_tail(
                &["s", "alpha", "beta", "n", "theta1", "theta2"],
                &["quadratic", "log_n_sin", "widom_dyson"],
                &["total", "warnings"],
            ),
            AsymVariant::Transition => with_tail(
                &TRANSITION_INPUTS,
                &["one_gap", "omega_gain", "c_k", "delta_k"],
                &["total", "warnings"],
            ),
            AsymVariant::TransitionLargeK => with_tail(
                &TRANSITION_INPUTS,
                &[
                    "quadratic",
                    "log_s",
                    "log_log",
                    "x_squared",
                    "boundary",
                    "geometry",
                    "constant",
                ],
                &["total", "warnings"],
            ),
            AsymVariant::TwoArc => with_tail(
                &["s", "alpha", "beta", "nu", "n", "gamma", "omega", "k", "x"],
                &["one_arc", "omega_gain", "c_k", "delta_k"],
                &["total", "warnings"],
            ),
            AsymVariant::TwoGap => cols(&[
                "s",
                "alpha",
                "beta",
                "nu",
                "q1",
                "q0",
                "g1",
                "v",
                "tau_im",
                "quadratic",
                "log_theta",
                "partial_total",
            ]),
        },
        Kind::Verify(suite) => {
            let head: &[&str] = match suite {
                Suite::OneGap => &["s", "alpha", "beta", "log_p", "formula"],
                Suite::Transition => &["s", "alpha", "beta", "nu", "k", "x", "log_p", "formula"],
                Suite::Continuity => &["k", "s", "gamma_nu", "below", "above"],
                Suite::OneArc => &["s", "alpha", "beta", "n", "log_d", "formula"],
                Suite::Appendix => &["s", "alpha", "beta", "nu", "n", "log_d", "log_p"],
                Suite::Diffid => &["n", "theta0", "theta1", "theta2", "lhs", "rhs"],
                Suite::Geometry => &["alpha", "beta", "nu", "q1", "q0", "g1", "v", "tau_im"],
                Suite::ThetaRegime => &["alpha", "beta", "nu", "g1", "v", "tau_im", "rms_theta", "rms_bare"],
                Suite::Legendre => &["s", "alpha", "beta", "k", "n", "nu", "target_max", "trace", "min_rho"],
                Suite::Scaling => &[
                    "s",
                    "n",
                    "u0",
                    "u1",
                    "u2",
                    "omega",
                    "omega_leading",
                    "relative_deviation",
                    "identity_error",
                ],
                Suite::All => &["suite"],
            };
            with_tail(head, &[], &VERIFY_TAIL)
        }
    }
}

fn symmetric_set(p: &P) -> CliResult<IntervalSet> {
    Ok(if p.nu == 0.0 {
        IntervalSet::single(p.alpha, p.beta)?
    } else {
        IntervalSet::symmetric_cut(p.alpha, p.beta, p.nu)?
    })
}

fn push_terms(row: &mut Row, b: &AsymptoticBreakdown) {
    for (name, value) in &b.terms {
        row.push(name, *value);
    }
    row.push("total", b.total);
    row.push("warnings", b.warnings.join("; "));
}

fn transition_inputs(t: &TransitionParams) -> Row {
    Row::new()
        .with("s", t.s)
        .with("alpha", t.alpha)
        .with("beta", t.beta)
        .with("nu", t.nu)
        .with("gamma", t.gamma)
        .with("omega", t.omega)
        .with("k", t.k)
        .with("x", t.x)
}

fn verdict(mut row: Row, residual: f64, limit: f64, pass: bool) -> Row {
    row.push("residual", residual);
    row.push("limit", limit);
    row.push("pass", pass && residual.is_finite());
    row
}

fn fredholm_row(p: &P) -> CliResult<Row> {
    let set = symmetric_set(p)?;
    let nodes = p.nodes.unwrap_or_else(|| {
        set.intervals()
            .iter()
            .map(|&(a, b)| default_nodes(p.s, b - a))
            .max()
            .unwrap_or(1)
    });
    let log_p = log_gap_probability(p.s, &set, Some(nodes))?;
    Ok(Row::new()
        .with("s", p.s)
        .with("alpha", p.alpha)
        .with("beta", p.beta)
        .with("nu", p.nu)
        .with("nodes", nodes)
        .with("log_p", log_p)
        .with("p", log_p.exp()))
}

fn toeplitz_row(p: &P) -> CliResult<Row> {
    let arcs = ArcSet::complement_of_scaled(&symmetric_set(p)?, 2.0 * p.s / p.n as f64)?;
    let data = log_toeplitz_det_szego(&arcs, p.n)?;
    Ok(Row::new()
        .with("s", p.s)
        .with("alpha", p.alpha)
        .with("beta", p.beta)
        .with("nu", p.nu)
        .with("n", p.n)
        .with("log_d", data.log_det())
        .with("min_rho", data.min_rho()))
}

fn asym_row(v: AsymVariant, p: &P) -> CliResult<Row> {
    let nf = p.n as f64;
    match v {
        AsymVariant::OneGap => {
            let mut row = Row::new().with("s", p.s).with("alpha", p.alpha).with("beta", p.beta);
            push_terms(&mut row, &one_gap_asymptotic(p.s, p.alpha, p.beta)?);
            Ok(row)
        }
        AsymVariant::OneArc => {
            let (t1, t2) = (2.0 * p.s * p.beta / nf, 2.0 * p.s * p.alpha / nf);
            let mut row = Row::new()
                .with("s", p.s)
                .with("alpha", p.alpha)
                .with("beta", p.beta)
                .with("n", p.n)
                .with("theta1", t1)
                .with("theta2", t2);
            push_terms(&mut row, &one_arc_toeplitz_asymptotic(p.n, t1, t2)?);
            Ok(row)
        }
        AsymVariant::Transition | AsymVariant::TransitionLargeK => {
            let t = transition_params(p.s, p.alpha, p.beta, p.nu)?;
            let variant = if v == AsymVariant::Transition {
                TransitionVariant::BoundedK
            } else {
                TransitionVariant::LargeK
            };
            let mut row = transition_inputs(&t);
            push_terms(&mut row, &transition_asymptotic_at(&t, variant)?);
            Ok(row)
        }
        AsymVariant::TwoArc => {
            let t = transition_params(p.s, p.alpha, p.beta, p.nu)?;
            let mut row = Row::new()
                .with("s", p.s)
                .with("alpha", p.alpha)
                .with("beta", p.beta)
                .with("nu", p.nu)
                .with("n", p.n)
                .with("gamma", t.gamma)
                .with("omega", t.omega)
                .with("k", t.k)
                .with("x", t.x);
            push_terms(&mut row, &two_arc_toeplitz_asymptotic(p.n, p.s, p.alpha, p.beta, p.nu)?);
            Ok(row)
        }
        AsymVariant::TwoGap => {
            let g = two_gap_geometry(p.alpha, -p.nu, p.nu, p.beta)?;
            let quadratic = -g.g1 * p.s * p.s;
            let log_theta = two_gap_oscillation(p.s, &g)?;
            Ok(Row::new()
                .with("s", p.s)
                .with("alpha", p.alpha)
                .with("beta", p.beta)
                .with("nu", p.nu)
                .with("q1", g.q1)
                .with("q0", g.q0)
                .with("g1", g.g1)
                .with("v", g.v)
                .with("tau_im", g.tau.im)
                .with("quadratic", quadratic)
                .with("log_theta", log_theta)
                .with("partial_total", quadratic + log_theta))
        }
    }
}

/// RMS residual of a least-squares fit `y ~ c1 log s + c2`.
fn log_fit_rms(s: &[f64], y: &[f64]) -> f64 {
    let n = s.len() as f64;
    let l: Vec<f64> = s.iter().map(|v| v.ln()).collect();
    let (ml, my) = (l.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = l.iter().zip(y).map(|(a, b)| (a - ml) * (b - my)).sum();
    let sxx: f64 = l.iter().map(|a| (a - ml).powi(2)).sum();
    let c1 = sxy / sxx;
    let c2 = my - c1 * ml;
    (l.iter().zip(y).map(|(a, b)| (b - c1 * a - c2).powi(2)).sum::<f64>() / n).sqrt()
}

fn scaling_identity_error(ctx: &ScalingContext) -> f64 {
    let (t1, t2) = (ctx.theta1, ctx.theta2);
    let i = Complex64::new(0.0, 1.0);
    let mut worst: f64 = 0.0;
    let mut note = |v: Complex64| worst = worst.max(v.norm());
    for j in 1..=100 {
        let f = j as f64 / 101.0;
        let z = Complex64::from_polar(1.0, t1 + f * (TAU + t2 - t1));
        note(ctx.g1_side(z, Side::Plus) + ctx.g1_side(z, Side::Minus) - z.ln());
        note(ctx.h_side(z, Side::Plus) + ctx.h_side(z, Side::Minus));
        let z = Complex64::from_polar(1.0, f * t2);
        note(ctx.h_side(z, Side::Plus) - ctx.h_side(z, Side::Minus) - TAU * i);
        let z = Complex64::from_polar(1.0, f * t1);
        note(ctx.h_side(z, Side::Plus) - ctx.h_side(z, Side::Minus));
    }
    note(ctx.g1_side(ctx.b1, Side::Plus) - 0.5 * t1 * i);
    note(ctx.g1_side(ctx.b2, Side::Plus) - 0.5 * t2 * i);
    note(ctx.h(ctx.b1).unwrap_or(Complex64::new(f64::NAN, 0.0)));
    note(ctx.h_side(ctx.b2, Side::Plus) - std::f64::consts::PI * i);
    note(ctx.h_side(ctx.b2, Side::Minus) + std::f64::consts::PI * i);
    worst
}

fn verify_rows(suite: Suite, p: &P, given: Params) -> CliResult<Vec<Row>> {
    match suite {
        Suite::OneGap => {
            let set = IntervalSet::single(p.alpha, p.beta)?;
            let log_p = log_gap_probability(p.s, &set, p.nodes)?;
            let formula = one_gap_asymptotic(p.s, p.alpha, p.beta)?.total;
            let r = (log_p - formula).abs();
            let row = Row::new()
                .with("s", p.s)
                .with("alpha", p.alpha)
                .with("beta", p.beta)
                .with("log_p", log_p)
                .with("formula", formula);
            Ok(vec![verdict(row, r, 0.02, r <= 0.02)])
        }
        Suite::Transition => {
            let t = transition_params(p.s, p.alpha, p.beta, p.nu)?;
            let log_p = log_gap_probability(p.s, &symmetric_set(p)?, p.nodes)?;
            let formula = transition_asymptotic(p.s, p.alpha, p.beta, p.nu, TransitionVariant::BoundedK)?.total;
            let r = (log_p - formula).abs();
            let row = Row::new()
                .with("s", p.s)
                .with("alpha", p.alpha)
                .with("beta", p.beta)
                .with("nu", p.nu)
                .with("k", t.k)
                .with("x", t.x)
                .with("log_p", log_p)
                .with("formula", formula);
            Ok(vec![verdict(row, r, 0.1, r <= 0.1)])
        }
        Suite::Continuity => {
            // gamma nu = 1e-6 keeps the O((gamma nu)^2) split mismatch below the limit
            let ks: Vec<usize> = match p.k {
                Some(k) => vec![k],
                None => (1..=10).collect(),
            };
            let sab = (p.alpha * p.beta).abs().sqrt();
            ks.into_iter()
                .map(|k| {
                    let omega = k as f64 + 0.5;
                    let s = omega * 1e6f64.ln() / sab;
                    let t = transition_params(s, p.alpha, p.beta, nu_for_omega(s, p.alpha, p.beta, omega))?;
                    let below = transition_asymptotic_at(&t.with_split(k, 0.5)?, TransitionVariant::BoundedK)?.total;
                    let above =
                        transition_asymptotic_at(&t.with_split(k + 1, -0.5)?, TransitionVariant::BoundedK)?.total;
                    let r = (below - above).abs();
                    let row = Row::new()
                        .with("k", k)
                        .with("s", s)
                        .with("gamma_nu", t.gamma_nu())
                        .with("below", below)
                        .with("above", above);
                    Ok(verdict(row, r, 1e-9, r <= 1e-9))
                })
                .collect()
        }
        Suite::OneArc => {
            let nf = p.n as f64;
            let (t1, t2) = (2.0 * p.s * p.beta / nf, 2.0 * p.s * p.alpha / nf);
            let arcs = ArcSet::new(vec![(t1, TAU + t2)])?;
            let log_d = log_toeplitz_det_szego(&arcs, p.n)?.log_det();
            let formula = one_arc_toeplitz_asymptotic(p.n, t1, t2)?.total;
            let r = (log_d - formula).abs();
            let row = Row::new()
                .with("s", p.s)
                .with("alpha", p.alpha)
                .with("beta", p.beta)
                .with("n", p.n)
                .with("log_d", log_d)
                .with("formula", formula);
            Ok(vec![verdict(row, r, 0.02, r <= 0.02)])
        }
        Suite::Appendix => {
            let set = symmetric_set(p)?;
            let arcs = ArcSet::complement_of_scaled(&set, 2.0 * p.s / p.n as f64)?;
            let log_d = log_toeplitz_det_szego(&arcs, p.n)?.log_det();
            let log_p = log_gap_probability(p.s, &set, p.nodes)?;
            let r = (log_d.exp() - log_p.exp()).abs();
            let row = Row::new()
                .with("s", p.s)
                .with("alpha", p.alpha)
                .with("beta", p.beta)
                .with("nu", p.nu)
                .with("n", p.n)
                .with("log_d", log_d)
                .with("log_p", log_p);
            Ok(vec![verdict(row, r, 1e-3, r <= 1e-3)])
        }
        Suite::Diffid => {
            let (t1, t2) = (2.0 * p.beta, 2.0 * p.alpha);
            let ns: Vec<usize> = match given.n {
                Some(n) => vec![n],
                None => vec![8, 16, 24],
            };
            let top = 0.9 * t1.min(-t2);
            let mut rows = Vec::new();
            for n in ns {
                for i in 0..12 {
                    let t0 = 0.05 + (top - 0.05) * i as f64 / 11.0;
                    let d = diff_identity_check(n, t0, t1, t2)?;
                    let r = d.relative_residual();
                    let row = Row::new()
                        .with("n", n)
                        .with("theta0", t0)
                        .with("theta1", t1)
                        .with("theta2", t2)
                        .with("lhs", d.lhs)
                        .with("rhs", d.rhs);
                    rows.push(verdict(row, r, 1e-4, r <= 1e-4));
                }
            }
            Ok(rows)
        }
        Suite::Geometry => {
            let g = two_gap_geometry(p.alpha, -p.nu, p.nu, p.beta)?;
            let [i1, i2] = g.defining_integrals(67)?;
            let r = i1.abs().max(i2.abs()).max(g.residue_at_infinity().abs());
            let row = Row::new()
                .with("alpha", p.alpha)
                .with("beta", p.beta)
                .with("nu", p.nu)
                .with("q1", g.q1)
                .with("q0", g.q0)
                .with("g1", g.g1)
                .with("v", g.v)
                .with("tau_im", g.tau.im);
            Ok(vec![verdict(row, r, 1e-10, r <= 1e-10)])
        }
        Suite::ThetaRegime => {
            let g = two_gap_geometry(p.alpha, -p.nu, p.nu, p.beta)?;
            let set = symmetric_set(p)?;
            let s: Vec<f64> = (0..25).map(|i| 8.0 + 6.0 * i as f64 / 24.0).collect();
            let mut with_theta = Vec::new();
            let mut bare = Vec::new();
            for &si in &s {
                let base = log_gap_probability(si, &set, p.nodes)? + g.g1 * si * si;
                with_theta.push(base - two_gap_oscillation(si, &g)?);
                bare.push(base);
            }
            let (rms, rms_bare) = (log_fit_rms(&s, &with_theta), log_fit_rms(&s, &bare));
            let row = Row::new()
                .with("alpha", p.alpha)
                .with("beta", p.beta)
                .with("nu", p.nu)
                .with("g1", g.g1)
                .with("v", g.v)
                .with("tau_im", g.tau.im)
                .with("rms_theta", rms)
                .with("rms_bare", rms_bare);
            Ok(vec![verdict(row, rms, 0.05, rms <= 0.05 && rms_bare >= 3.0 * rms)])
        }
        Suite::Legendre => {
            let k = p.k.unwrap_or(1);
            let r = kernel_limit(p.s, p.alpha, p.beta, k, p.n, &default_probes())?;
            let limit = 0.2 * r.target_max;
            let row = Row::new()
                .with("s", p.s)
                .with("alpha", p.alpha)
                .with("beta", p.beta)
                .with("k", k)
                .with("n", p.n)
                .with("nu", r.nu)
                .with("target_max", r.target_max)
                .with("trace", r.trace)
                .with("min_rho", r.min_rho);
            let pass = r.residual <= limit && (r.trace - k as f64).abs() <= 0.1;
            Ok(vec![verdict(row, r.residual, limit, pass)])
        }
        Suite::Scaling => {
            // closing-gap angles theta_j = s u_j / n with u = (2 nu, 2 beta, 2 alpha)
            let (u0, u1, u2) = (2.0 * p.nu, 2.0 * p.beta, 2.0 * p.alpha);
            let ctx = ScalingContext::from_u(p.s, p.n as f64, u0, u1, u2)?.solve_omega()?;
            let omega = ctx.omega.expect("solved");
            let lead = ctx.omega_leading();
            let deviation = (omega - lead) / lead;
            let residual = (ctx.zeta_gap(omega) - 4.0).abs();
            let identity = scaling_identity_error(&ScalingContext::new(0.3, 2.0, -2.0)?)
                .max(scaling_identity_error(&ScalingContext::new(0.2, 1.4, -2.3)?));
            let row = Row::new()
                .with("s", p.s)
                .with("n", p.n)
                .with("u0", u0)
                .with("u1", u1)
                .with("u2", u2)
                .with("omega", omega)
                .with("omega_leading", lead)
                .with("relative_deviation", deviation)
                .with("identity_error", identity);
            let pass = residual <= 1e-12 && identity <= 1e-10 && deviation.abs() <= 0.1;
            Ok(vec![verdict(row, residual, 1e-12, pass)])
        }
        Suite::All => Suite::EACH
            .iter()
            .map(|&each| {
                let rows = rows_for(Kind::Verify(each), given)?;
                let worst = rows
                    .iter()
                    .filter_map(|r| match r.get("residual") {
                        Some(crate::report::Value::Num(v)) => Some(*v),
                        _ => None,
                    })
                    .fold(0.0, f64::max);
                let limit = match rows.first().and_then(|r| r.get("limit")) {
                    Some(crate::report::Value::Num(v)) => *v,
                    _ => f64::NAN,
                };
                let name = Kind::Verify(each).to_string();
                let row = Row::new().with("suite", name.trim_start_matches("verify-"));
                Ok(verdict(row, worst, limit, rows.iter().all(Row::passed)))
            })
            .collect(),
    }
}

/// Rows for one scenario evaluation.
pub fn rows_for(kind: Kind, given: Params) -> CliResult<Vec<Row>> {
    let p = resolve(kind, given)?;
    match kind {
        Kind::Fredholm => Ok(vec![fredholm_row(&p)?]),
        Kind::Toeplitz => Ok(vec![toeplitz_row(&p)?]),
        Kind::Asym(v) => Ok(vec![asym_row(v, &p)?]),
        Kind::Verify(suite) => verify_rows(suite, &p, given),
    }
}

/// Single scenario as a report.
pub fn run(kind: Kind, params: Params) -> CliResult<Report> {
    let mut report = Report::new(schema(kind));
    for row in rows_for(kind, params)? {
        report.push(row)?;
    }
    Ok(report)
}

/// Worker count: `GAPSCALE_THREADS` if set and positive, else all cores.
pub fn thread_count() -> usize {
    std::env::var("GAPSCALE_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// One evaluation per value, run in parallel, rows emitted in input order.
pub fn sweep(kind: Kind, params: Params, axis: &str, values: &[f64]) -> CliResult<Report> {
    let points: Vec<Params> = values
        .iter()
        .map(|&v| params.with_axis(axis, v))
        .collect::<CliResult<_>>()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(thread_count()).build()?;
    let results: Vec<CliResult<Vec<Row>>> = pool.install(|| points.par_iter().map(|&pt| rows_for(kind, pt)).collect());
    let mut report = Report::new(schema(kind));
    for rows in results {
        for row in rows? {
            report.push(row)?;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Value;

    fn cheap_kinds() -> Vec<Kind> {
        let mut kinds = vec![Kind::Fredholm];
        for v in [
            AsymVariant::OneGap,
            AsymVariant::OneArc,
            AsymVariant::Transition,
            AsymVariant::TransitionLargeK,
            AsymVariant::TwoArc,
            AsymVariant::TwoGap,
        ] {
            kinds.push(Kind::Asym(v));
        }
        for s in [
            Suite::OneGap,
            Suite::Transition,
            Suite::Continuity,
            Suite::Diffid,
            Suite::Geometry,
            Suite::Scaling,
        ] {
            kinds.push(Kind::Verify(s));
        }
        kinds
    }

    #[test]
    fn rows_match_schemas() {
        for kind in cheap_kinds() {
            let report = run(kind, Params::default()).unwrap();
            assert!(!report.rows.is_empty(), "{kind}");
        }
        let small = Params {
            n: Some(256),
            ..Params::default()
        };
        run(Kind::Toeplitz, small).unwrap();
    }

    #[test]
    fn transition_preset_row() {
        let report = run(Kind::Asym(AsymVariant::Transition), Params::default()).unwrap();
        let row = &report.rows[0];
        assert_eq!(row.get("k"), Some(&Value::Int(1)));
        match row.get("x") {
            Some(Value::Num(x)) => assert!((x + 0.0354).abs() < 1e-4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fredholm_at_zero_s() {
        let p = Params {
            s: Some(0.0),
            ..Params::default()
        };
        let report = run(Kind::Fredholm, p).unwrap();
        assert_eq!(report.rows[0].get("log_p"), Some(&Value::Num(0.0)));
    }

    #[test]
    fn default_verify_suites_pass() {
        for s in [
            Suite::OneGap,
            Suite::Diffid,
            Suite::Geometry,
            Suite::Continuity,
            Suite::Scaling,
        ] {
            assert!(!run(Kind::Verify(s), Params::default()).unwrap().any_breach(), "{s:?}");
        }
    }

    #[test]
    fn sweep_preserves_order_and_handles_empty() {
        let kind = Kind::Verify(Suite::OneGap);
        let r = sweep(kind, Params::default(), "s", &[12.0, 4.0, 8.0]).unwrap();
        let s: Vec<f64> = r
            .rows
            .iter()
            .map(|row| match row.get("s") {
                Some(Value::Num(v)) => *v,
                _ => panic!(),
            })
            .collect();
        assert_eq!(s, vec![12.0, 4.0, 8.0]);
        let empty = sweep(kind, Params::default(), "s", &[]).unwrap();
        assert!(empty.rows.is_empty());
        assert_eq!(empty.columns, schema(kind));
    }
}
