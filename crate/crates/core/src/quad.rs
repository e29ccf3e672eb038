//! Gauss-Legendre rules, composite rules over interval unions, and
//! endpoint-singular rules for integrands with inverse square-root blowup.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{GapError, Result};
use crate::fredholm::IntervalSet;

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITER: usize = 100;

/// Nodes and weights mapped onto `(a, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub interval: (f64, f64),
}

impl QuadRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

type Reference = Arc<(Vec<f64>, Vec<f64>)>;

fn cache() -> &'static Mutex<HashMap<usize, Reference>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Reference>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Legendre P_m and P_m' at x by the three-term recurrence.
fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let mf = m as f64;
    let dp = mf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Reference rule on [-1, 1], ascending nodes.
fn reference_rule(m: usize) -> Result<Reference> {
    if let Some(r) = cache().lock().unwrap().get(&m) {
        return Ok(Arc::clone(r));
    }
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    if m == 1 {
        weights[0] = 2.0;
    } else {
        let mf = m as f64;
        let half = m.div_ceil(2);
        for i in 0..half {
            // Tricomi's asymptotic guess for the (i+1)-th largest root.
            let theta = std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5);
            let mut x = (1.0 - (mf - 1.0) / (8.0 * mf * mf * mf)) * theta.cos();
            let mut converged = false;
            let mut dp = 0.0;
            for _ in 0..NEWTON_MAX_ITER {
                let (p, d) = legendre_with_derivative(m, x);
                let dx = p / d;
                x -= dx;
                dp = d;
                if dx.abs() <= NEWTON_TOL {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(GapError::NonConvergence { m });
            }
            let (_, d) = legendre_with_derivative(m, x);
            dp = if d.is_finite() { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[m - 1 - i] = x;
            nodes[i] = -x;
            weights[m - 1 - i] = w;
            weights[i] = w;
        }
        if m % 2 == 1 {
            nodes[m / 2] = 0.0;
        }
    }
    let rule = Arc::new((nodes, weights));
    cache().lock().unwrap().insert(m, Arc::clone(&rule));
    Ok(rule)
}

/// The `m`-point Gauss-Legendre rule mapped affinely onto `(a, b)`.
pub fn gauss_legendre(m: usize, a: f64, b: f64) -> Result<QuadRule> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(GapError::InvalidInterval { a, b });
    }
    if m == 0 {
        return Err(GapError::Domain("quadrature needs at least one node".into()));
    }
    let reference = reference_rule(m)?;
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    Ok(QuadRule {
        nodes: reference.0.iter().map(|&x| c + h * x).collect(),
        weights: reference.1.iter().map(|&w| h * w).collect(),
        interval: (a, b),
    })
}

/// Composite rule: `m` Gauss-Legendre nodes on each interval of the set.
pub fn composite_rule(set: &IntervalSet, m: usize) -> Result<Vec<QuadRule>> {
    set.intervals().iter().map(|&(a, b)| gauss_legendre(m, a, b)).collect()
}

fn checked(x: f64, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(GapError::Evaluation { x })
    }
}

/// Integral of `f` over every interval of `set`, `m` nodes per interval.
pub fn integrate<F: Fn(f64) -> f64>(f: F, set: &IntervalSet, m: usize) -> Result<f64> {
    let mut total = 0.0;
    for rule in composite_rule(set, m)? {
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            total += w * checked(x, f(x))?;
        }
    }
    Ok(total)
}

/// Which endpoints carry the inverse square-root factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularEnds {
    /// Integrand `f(x) / sqrt((x - a)(b - x))`.
    Both,
    /// Integrand `f(x) / sqrt(x - a)`.
    Left,
    /// Integrand `f(x) / sqrt(b - x)`.
    Right,
}

/// Integral of `f` against the inverse square-root weight selected by `ends`.
///
/// The singularity is removed analytically (`x = c + h sin t` for both ends,
/// `x = a + (b - a) u^2` for one end) before applying an `m`-point rule.
pub fn integrate_inv_sqrt<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, m: usize, ends: SingularEnds) -> Result<f64> {
    integrate_inv_sqrt_graded(f, a, b, m, ends, 0)
}

/// As [`integrate_inv_sqrt`], but the substituted variable is split into
/// panels graded geometrically toward each singular end.
///
/// Needed when the smooth factor itself varies on a tiny scale near an
/// endpoint, as happens for two intervals separated by a very small gap.
pub fn integrate_inv_sqrt_graded<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    m: usize,
    ends: SingularEnds,
    levels: usize,
) -> Result<f64> {
    if !(a < b) {
        return Err(GapError::InvalidInterval { a, b });
    }
    let (c, h, len) = (0.5 * (a + b), 0.5 * (b - a), b - a);
    // Map the substituted variable to (x, jacobian-times-weight-factor).
    let transform = |t: f64| -> (f64, f64) {
        match ends {
            // dx / sqrt((x-a)(b-x)) = dt
            SingularEnds::Both => (c + h * t.sin(), 1.0),
            // x = a + len u^2, dx / sqrt(x-a) = 2 sqrt(len) du
            SingularEnds::Left => (a + len * t * t, 2.0 * len.sqrt()),
            SingularEnds::Right => (b - len * t * t, 2.0 * len.sqrt()),
        }
    };
    let (lo, hi) = match ends {
        SingularEnds::Both => (-FRAC_PI_2, FRAC_PI_2),
        _ => (0.0, 1.0),
    };
    // One-sided substitutions put the singular end at u = 0.
    let breaks = graded_breaks(lo, hi, levels, true, ends == SingularEnds::Both);
    let mut total = 0.0;
    for pair in breaks.windows(2) {
        let rule = gauss_legendre(m, pair[0], pair[1])?;
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            let (x, jac) = transform(t);
            total += w * jac * checked(x, f(x))?;
        }
    }
    Ok(total)
}

/// Integral of `f(x, x - a, b - x) / sqrt((x - a)(b - x))` over `(a, b)`.
///
/// The endpoint distances are computed from the substituted variable without
/// cancellation, so `f` can resolve factors like `1 / sqrt(x - a + d)` with `d`
/// far below `b - a`. Panels are graded toward both ends as in
/// [`integrate_inv_sqrt_graded`].
pub fn integrate_inv_sqrt_endpoints<F: Fn(f64, f64, f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    m: usize,
    levels: usize,
) -> Result<f64> {
    if !(a < b) {
        return Err(GapError::InvalidInterval { a, b });
    }
    let h = 0.5 * (b - a);
    let breaks = graded_breaks(-FRAC_PI_2, FRAC_PI_2, levels, true, true);
    let mut total = 0.0;
    for pair in breaks.windows(2) {
        let rule = gauss_legendre(m, pair[0], pair[1])?;
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            // 1 + sin t = 2 sin^2(pi/4 + t/2), 1 - sin t = 2 sin^2(pi/4 - t/2)
            let from_a = 2.0 * h * (FRAC_PI_4 + 0.5 * t).sin().powi(2);
            let to_b = 2.0 * h * (FRAC_PI_4 - 0.5 * t).sin().powi(2);
            let x = if from_a <= to_b { a + from_a } else { b - to_b };
            total += w * checked(x, f(x, from_a, to_b))?;
        }
    }
    Ok(total)
}

/// Number of grading levels that resolve a feature of width `scale` at the
/// end of an interval of length `len` under the sine substitution.
pub fn grading_levels(scale: f64, len: f64) -> usize {
    if scale >= len {
        return 0;
    }
    // distances near an end shrink like t^2 in the substituted variable
    let ratio = (scale / len).sqrt();
    (ratio.ln() / 0.15f64.ln()).ceil().max(0.0) as usize + 2
}

/// Breakpoints on `(lo, hi)`, refined geometrically (ratio 0.15) toward the
/// requested ends.
fn graded_breaks(lo: f64, hi: f64, levels: usize, at_lo: bool, at_hi: bool) -> Vec<f64> {
    const RATIO: f64 = 0.15;
    if levels == 0 {
        return vec![lo, hi];
    }
    let mid = 0.5 * (lo + hi);
    let mut left = vec![lo];
    if at_lo {
        let span = mid - lo;
        left.extend((1..=levels).rev().map(|k| lo + span * RATIO.powi(k as i32)));
    }
    let mut right = vec![mid];
    if at_hi {
        let span = hi - mid;
        right.extend((1..=levels).map(|k| hi - span * RATIO.powi(k as i32)));
    }
    right.push(hi);
    left.extend(right);
    // deep grading can round breakpoints onto each other
    left.dedup();
    left
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn one_point_rule_is_midpoint() {
        let r = gauss_legendre(1, -1.0, 1.0).unwrap();
        assert_eq!(r.nodes, vec![0.0]);
        assert_eq!(r.weights, vec![2.0]);
    }

    #[test]
    fn two_point_rule() {
        let r = gauss_legendre(2, -1.0, 1.0).unwrap();
        assert_relative_eq!(r.nodes[0], -0.5773502691896258, epsilon = 1e-15);
        assert_relative_eq!(r.nodes[1], 0.5773502691896258, epsilon = 1e-15);
        assert_relative_eq!(r.weights[0], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn weights_sum_to_length() {
        let r = gauss_legendre(8, 0.0, 3.0).unwrap();
        assert_relative_eq!(r.weights.iter().sum::<f64>(), 3.0, max_relative = 1e-13);
    }

    #[test]
    fn large_rules_stay_accurate() {
        for m in [500, 3000, 9001] {
            let r = gauss_legendre(m, 0.0, PI).unwrap();
            assert!(r.nodes.windows(2).all(|p| p[0] < p[1]));
            assert_relative_eq!(r.apply(f64::sin), 2.0, max_relative = 1e-12);
            assert_relative_eq!(r.weights.iter().sum::<f64>(), PI, max_relative = 1e-13);
        }
    }

    #[test]
    fn rejects_reversed_interval() {
        assert!(matches!(
            gauss_legendre(4, 1.0, 1.0),
            Err(GapError::InvalidInterval { .. })
        ));
    }

    #[test]
    fn composite_examples() {
        let two = IntervalSet::new(vec![(0.0, 1.0), (2.0, 3.0)]).unwrap();
        assert_relative_eq!(integrate(|_| 1.0, &two, 3).unwrap(), 2.0, epsilon = 1e-14);
        let sym = IntervalSet::single(-1.0, 1.0).unwrap();
        assert_relative_eq!(integrate(|x| x * x, &sym, 4).unwrap(), 2.0 / 3.0, epsilon = 1e-14);
        let half = IntervalSet::single(0.0, PI).unwrap();
        assert_relative_eq!(integrate(f64::sin, &half, 20).unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn nan_integrand_is_reported() {
        let set = IntervalSet::single(0.0, 1.0).unwrap();
        assert!(matches!(
            integrate(|x| if x > 0.5 { f64::NAN } else { x }, &set, 4),
            Err(GapError::Evaluation { .. })
        ));
    }

    #[test]
    fn inverse_sqrt_examples() {
        let both = integrate_inv_sqrt(|_| 1.0, -1.0, 1.0, 10, SingularEnds::Both).unwrap();
        assert_relative_eq!(both, PI, epsilon = 1e-12);
        let odd = integrate_inv_sqrt(|x| x, -1.0, 1.0, 10, SingularEnds::Both).unwrap();
        assert!(odd.abs() < 1e-13);
        let left = integrate_inv_sqrt(|_| 1.0, 0.0, 1.0, 10, SingularEnds::Left).unwrap();
        assert_relative_eq!(left, 2.0, epsilon = 1e-12);
        let right = integrate_inv_sqrt(|_| 1.0, 0.0, 4.0, 10, SingularEnds::Right).unwrap();
        assert_relative_eq!(right, 4.0, epsilon = 1e-12);
    }

    #[test]
    fn graded_rule_resolves_nearby_singularity() {
        // 1/sqrt(x + 1e-8) on (0, 1) with the inverse-sqrt weight at 0:
        // integral of 1/sqrt(x (x + d)) = 2 asinh(sqrt(1/d)).
        let d: f64 = 1e-8;
        let exact = 2.0 * (1.0 / d).sqrt().asinh();
        let plain = integrate_inv_sqrt(|x| 1.0 / (x + d).sqrt(), 0.0, 1.0, 20, SingularEnds::Left).unwrap();
        let graded = integrate_inv_sqrt_graded(|x| 1.0 / (x + d).sqrt(), 0.0, 1.0, 20, SingularEnds::Left, 14).unwrap();
        assert!((plain - exact).abs() > 1e-3);
        assert_relative_eq!(graded, exact, max_relative = 1e-12);
    }

    #[test]
    fn endpoint_rule_resolves_close_pole() {
        // 1/sqrt((x + d)(1 - x) x) on (0, 1) against the exact elliptic-free
        // comparison by heavy grading of the plain rule.
        let d = 1e-9;
        let fine = integrate_inv_sqrt_endpoints(|_, xa, _| 1.0 / (xa + d).sqrt(), 0.0, 1.0, 20, 20).unwrap();
        let coarse =
            integrate_inv_sqrt_endpoints(|_, xa, _| 1.0 / (xa + d).sqrt(), 0.0, 1.0, 20, grading_levels(d, 1.0))
                .unwrap();
        assert_relative_eq!(fine, coarse, max_relative = 1e-12);
        let plain = integrate_inv_sqrt(|x| x * x, -1.0, 1.0, 20, SingularEnds::Both).unwrap();
        let ends = integrate_inv_sqrt_endpoints(|x, _, _| x * x, -1.0, 1.0, 20, 0).unwrap();
        assert_relative_eq!(plain, PI / 2.0, epsilon = 1e-14);
        assert_relative_eq!(ends, PI / 2.0, epsilon = 1e-14);
    }
}
