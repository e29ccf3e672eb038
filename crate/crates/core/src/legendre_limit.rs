//! Near a closing gap, the conditioned Christoffel-Darboux kernel rescaled by
//! the gap width tends to twice the rank-`k` Legendre kernel on `[-2, 2]`.
//! This module measures that convergence and checks the projection identities
//! of the limit kernel.

use serde::Serialize;

use crate::asym::gamma_of;
use crate::error::{GapError, Result};
use crate::quad::gauss_legendre;
use crate::specfun::k_leg;
use crate::toeplitz::{cd_kernel, log_toeplitz_det_szego, ArcSet};

/// Nodes for the trace integral over `(-1, 1)`.
const TRACE_NODES: usize = 40;

/// Off-diagonal 5x5 probe grid plus two diagonal probes.
pub fn default_probes() -> Vec<(f64, f64)> {
    let xs = [-0.8, -0.4, 0.0, 0.4, 0.8];
    let ys = [-0.7, -0.3, 0.1, 0.5, 0.9];
    let mut probes: Vec<(f64, f64)> = xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect();
    probes.extend([(0.25, 0.25), (-0.6, -0.6)]);
    probes
}

/// Half-width `nu = exp(-s sqrt|alpha beta| / k) / gamma` that puts the
/// regime exactly at `omega = k`.
pub fn nu_at_integer(s: f64, alpha: f64, beta: f64, k: usize) -> f64 {
    (-s * (alpha * beta).abs().sqrt() / k as f64).exp() / gamma_of(alpha, beta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelLimit {
    pub nu: f64,
    /// `max |nu H_n(nu x1, nu x2) - 2 K_Leg(2 x1, 2 x2)|` over the probes.
    pub residual: f64,
    /// `max |2 K_Leg(2 x1, 2 x2)|` over the probes, for relative reading.
    pub target_max: f64,
    /// `nu int_{-1}^{1} H_n(nu x, nu x) dx`, which tends to `k`.
    pub trace: f64,
    /// Smallest recursion normalization; tiny values mean lost digits.
    pub min_rho: f64,
}

/// Rescaled kernel against the Legendre limit on the Toeplitz model with `n`.
pub fn kernel_limit(s: f64, alpha: f64, beta: f64, k: usize, n: usize, probes: &[(f64, f64)]) -> Result<KernelLimit> {
    if k == 0 {
        return Err(GapError::Domain("the Legendre limit needs k >= 1".into()));
    }
    if probes.iter().any(|&(x, y)| x.abs() >= 1.0 || y.abs() >= 1.0) {
        return Err(GapError::Domain("probe points must lie in (-1, 1)^2".into()));
    }
    let nu = nu_at_integer(s, alpha, beta, k);
    let arc = 2.0 * s * nu / n as f64;
    if arc < 1e-12 {
        return Err(GapError::Domain(format!(
            "inner arc half-width {arc:e} is not resolvable; raise n or lower s"
        )));
    }
    let arcs = ArcSet::closing_gap(s, alpha, beta, nu, n)?;
    let data = log_toeplitz_det_szego(&arcs, n)?;
    let mut residual: f64 = 0.0;
    let mut target_max: f64 = 0.0;
    for &(x1, x2) in probes {
        let approx = nu * cd_kernel(&data, s, nu * x1, nu * x2);
        let target = 2.0 * k_leg(k, 2.0 * x1, 2.0 * x2);
        residual = residual.max((approx - target).abs());
        target_max = target_max.max(target.abs());
    }
    let rule = gauss_legendre(TRACE_NODES, -1.0, 1.0)?;
    let trace = nu * rule.apply(|x| cd_kernel(&data, s, nu * x, nu * x));
    Ok(KernelLimit {
        nu,
        residual,
        target_max,
        trace,
        min_rho: data.min_rho(),
    })
}

/// Probe-grid residual of [`kernel_limit`].
pub fn kernel_limit_residual(s: f64, alpha: f64, beta: f64, k: usize, n: usize, probes: &[(f64, f64)]) -> Result<f64> {
    Ok(kernel_limit(s, alpha, beta, k, n, probes)?.residual)
}

fn det_small(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
    }
}

/// Expected number of unordered `order`-tuples for the rank-`rank` Legendre
/// kernel: `(1/order!) int det(K_Leg(x_i, x_j)) dx` over `(-2, 2)^order`.
pub fn tuple_expectation_of_order(rank: usize, order: usize) -> Result<f64> {
    if rank == 0 || order == 0 {
        return Err(GapError::Domain("rank and order must be positive".into()));
    }
    if order > 3 {
        return Err(GapError::DimensionCap { k: order });
    }
    // det entries are polynomials of degree <= 2(rank - 1) per variable
    let rule = gauss_legendre(rank + 2, -2.0, 2.0)?;
    let m = rule.len();
    let mut idx = vec![0usize; order];
    let mut total = 0.0;
    loop {
        let pts: Vec<f64> = idx.iter().map(|&i| rule.nodes[i]).collect();
        let w: f64 = idx.iter().map(|&i| rule.weights[i]).product();
        let mat: Vec<Vec<f64>> = pts
            .iter()
            .map(|&a| pts.iter().map(|&b| k_leg(rank, a, b)).collect())
            .collect();
        total += w * det_small(&mat);
        // odometer over the tensor grid
        let mut d = 0;
        while d < order {
            idx[d] += 1;
            if idx[d] < m {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
        if d == order {
            break;
        }
    }
    let factorial: f64 = (1..=order).map(|j| j as f64).product();
    Ok(total / factorial)
}

/// Expected number of `k`-tuples for the rank-`k` kernel; equals 1.
pub fn tuple_expectation(k: usize) -> Result<f64> {
    tuple_expectation_of_order(k, k)
}

/// `int K_Leg(x, t) K_Leg(t, y) dt - K_Leg(x, y)` over `(-2, 2)`.
pub fn reproducing_defect(k: usize, x: f64, y: f64) -> Result<f64> {
    let rule = gauss_legendre(k + 2, -2.0, 2.0)?;
    Ok(rule.apply(|t| k_leg(k, x, t) * k_leg(k, t, y)) - k_leg(k, x, y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probe_grid_shape() {
        let p = default_probes();
        assert_eq!(p.len(), 27);
        assert_eq!(p.iter().filter(|(x, y)| x == y).count(), 2);
    }

    #[test]
    fn nu_for_preset() {
        let nu = nu_at_integer(8.0, -1.0, 1.0, 1);
        assert!((nu - 4.0 * (-8.0f64).exp()).abs() < 1e-15);
        assert!((nu - 1.34e-3).abs() < 1e-5);
    }

    #[test]
    fn rank_one_target_is_constant() {
        for (x, y) in default_probes() {
            assert!((2.0 * k_leg(1, 2.0 * x, 2.0 * y) - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn tuple_identities() {
        assert!((tuple_expectation(1).unwrap() - 1.0).abs() < 1e-10);
        assert!((tuple_expectation(2).unwrap() - 1.0).abs() < 1e-8);
        assert!((tuple_expectation(3).unwrap() - 1.0).abs() < 1e-8);
        assert!(tuple_expectation_of_order(1, 2).unwrap().abs() < 1e-8);
        assert!(tuple_expectation_of_order(2, 3).unwrap().abs() < 1e-8);
        assert!(matches!(tuple_expectation(4), Err(GapError::DimensionCap { k: 4 })));
    }

    #[test]
    fn legendre_kernel_reproduces() {
        for k in 1..6 {
            for (x, y) in [(0.3, -1.2), (1.9, 0.0), (-0.7, -0.7)] {
                assert!(reproducing_defect(k, x, y).unwrap().abs() < 1e-9);
            }
        }
    }

    #[test]
    fn limit_at_desk_scale() {
        let probes = default_probes();
        let r = kernel_limit(8.0, -1.0, 1.0, 1, 2048, &probes).unwrap();
        assert!(r.residual < 0.2 * r.target_max, "{r:?}");
        assert!((r.trace - 1.0).abs() < 0.1);
        let r6 = kernel_limit_residual(6.0, -1.0, 1.0, 1, 2048, &probes).unwrap();
        assert!(r.residual < r6);
    }
}
