//! Scalar functions of the two-arc steepest-descent setup: the arc map `g1`,
//! the logarithmic function `h`, the local variable `zeta`, and the constant
//! `Omega` fixed by `zeta(a) - zeta(conj a) = 4`.
//!
//! The arcs are `J1 = (-theta0, theta0)`, `J2 = (theta1, theta2 + 2 pi)`, and the
//! gaps `Sigma1 = (0, theta1)`, `Sigma2 = (theta2, 0)` (taken with `theta0 = 0`).
//! Boundary values use the counter-clockwise orientation, so the `+` side of
//! the circle is the inside of the disc.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{GapError, Result};

/// Default proportionality constant for the radius of the conformal disc.
pub const DEFAULT_DISC_FACTOR: f64 = 0.25;

/// Normal offset used to approximate one-sided limits.
const SIDE_OFFSET: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Inside the unit disc.
    Plus,
    /// Outside the unit disc.
    Minus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingContext {
    pub theta0: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub a: Complex64,
    pub b1: Complex64,
    pub b2: Complex64,
    /// `s / n`; angles are `theta_j = (s / n) u_j`.
    pub scale: f64,
    pub disc_factor: f64,
    pub omega: Option<f64>,
    sqrt_b1: Complex64,
    sqrt_b2: Complex64,
    /// Direction of the ray that the Mobius map sends `J2` onto.
    cut_angle: f64,
    /// Fixes `r(z) ~ +z` at infinity.
    sign: f64,
    r_at_one: Complex64,
}

impl ScalingContext {
    /// Context from the three angles directly (`s / n = 1`).
    pub fn new(theta0: f64, theta1: f64, theta2: f64) -> Result<Self> {
        Self::with_scale(theta0, theta1, theta2, 1.0)
    }

    /// Context from `theta_j = s u_j / n`.
    pub fn from_u(s: f64, n: f64, u0: f64, u1: f64, u2: f64) -> Result<Self> {
        if !(s > 0.0 && n > 0.0) {
            return Err(GapError::Domain(format!("need s, n > 0, got s = {s}, n = {n}")));
        }
        let k = s / n;
        Self::with_scale(k * u0, k * u1, k * u2, k)
    }

    fn with_scale(theta0: f64, theta1: f64, theta2: f64, scale: f64) -> Result<Self> {
        if !(-PI < theta2 && theta2 < 0.0 && 0.0 < theta0 && theta0 < theta1 && theta1 < PI) {
            return Err(GapError::Domain(format!(
                "need -pi < theta2 < 0 < theta0 < theta1 < pi, got ({theta0}, {theta1}, {theta2})"
            )));
        }
        let b1 = Complex64::from_polar(1.0, theta1);
        let b2 = Complex64::from_polar(1.0, theta2);
        let minus_one = Complex64::new(-1.0, 0.0);
        let cut_angle = ((minus_one - b1) / (minus_one - b2)).arg();
        let mut ctx = Self {
            theta0,
            theta1,
            theta2,
            a: Complex64::from_polar(1.0, theta0),
            b1,
            b2,
            scale,
            disc_factor: DEFAULT_DISC_FACTOR,
            omega: None,
            sqrt_b1: Complex64::from_polar(1.0, theta1 / 2.0),
            sqrt_b2: Complex64::from_polar(1.0, theta2 / 2.0),
            cut_angle,
            sign: 1.0,
            r_at_one: Complex64::new(0.0, 0.0),
        };
        let far = Complex64::new(1e8, 0.0);
        if (ctx.r_unsigned(far) / far).re < 0.0 {
            ctx.sign = -1.0;
        }
        ctx.r_at_one = ctx.r(Complex64::new(1.0, 0.0));
        Ok(ctx)
    }

    pub fn with_disc_factor(mut self, factor: f64) -> Self {
        self.disc_factor = factor;
        self
    }

    pub fn u(&self) -> (f64, f64, f64) {
        (
            self.theta0 / self.scale,
            self.theta1 / self.scale,
            self.theta2 / self.scale,
        )
    }

    /// Square root whose cut is the ray at `cut_angle`.
    fn sqrt_cut(&self, w: Complex64) -> Complex64 {
        let rot = Complex64::from_polar(1.0, self.cut_angle + PI);
        Complex64::from_polar(1.0, 0.5 * (self.cut_angle + PI)) * (w / rot).sqrt()
    }

    /// `sqrt((z - b1)(z - b2))` with the cut on `J2`, up to an overall sign.
    ///
    /// Written as `(z - b2) sqrt(m(z))` with `m(z) = (z - b1)/(z - b2)`, which
    /// maps `J2` onto a ray from the origin; the algebraically equal form
    /// `(z - b1) / sqrt(m(z))` is used near `b2` where `m` blows up.
    fn r_unsigned(&self, z: Complex64) -> Complex64 {
        if z == self.b2 {
            return Complex64::new(0.0, 0.0);
        }
        let m = (z - self.b1) / (z - self.b2);
        if (z - self.b2).norm() >= (z - self.b1).norm() {
            (z - self.b2) * self.sqrt_cut(m)
        } else {
            (z - self.b1) / self.sqrt_cut(m)
        }
    }

    /// `r(z) = ((z - b1)(z - b2))^{1/2}`, cut on `J2`, `r(z) ~ z` at infinity.
    pub fn r(&self, z: Complex64) -> Complex64 {
        self.sign * self.r_unsigned(z)
    }

    fn on_unit_circle(z: Complex64) -> bool {
        (z.norm() - 1.0).abs() < 1e-14
    }

    fn in_j2(&self, z: Complex64) -> bool {
        let t = z.arg();
        Self::on_unit_circle(z) && (t > self.theta1 || t < self.theta2)
    }

    fn in_sigma2(&self, z: Complex64) -> bool {
        let t = z.arg();
        Self::on_unit_circle(z) && self.theta2 < t && t < 0.0
    }

    fn branch_error(z: Complex64) -> GapError {
        GapError::Branch { re: z.re, im: z.im }
    }

    /// Outside the disc `g1` is continued as `log z - g1~(z)` so that, like
    /// `log z`, its only cut off `J2` is `(-inf, -1]`; the principal logarithm
    /// of the inner formula would add a spurious cut for asymmetric arcs.
    fn g1_raw(&self, z: Complex64) -> Complex64 {
        if z.norm() <= 1.0 {
            ((z + self.sqrt_b1 * self.sqrt_b2 + self.r(z)) / (self.sqrt_b1 + self.sqrt_b2)).ln()
        } else {
            z.ln() - self.g1_other_branch(z)
        }
    }

    /// `g1(z)`; points on `J2` need [`Self::g1_side`].
    pub fn g1(&self, z: Complex64) -> Result<Complex64> {
        if self.in_j2(z) {
            return Err(Self::branch_error(z));
        }
        Ok(self.g1_raw(z))
    }

    /// `g1` built with the opposite square-root branch; `e^{g1} e^{g1~} = z`.
    pub fn g1_other_branch(&self, z: Complex64) -> Complex64 {
        ((z + self.sqrt_b1 * self.sqrt_b2 - self.r(z)) / (self.sqrt_b1 + self.sqrt_b2)).ln()
    }

    /// `Q = e^h` in closed form; analytic away from `J2`, with a simple zero at 1.
    pub fn q(&self, z: Complex64) -> Complex64 {
        let (b1, b2) = (self.b1, self.b2);
        let half_sum = 0.5 * (b1 + b2);
        let num = 0.5 * (b2 - b1) * (z - 1.0);
        let den = z * (1.0 - half_sum) + b1 * b2 - half_sum + self.r(z) * self.r_at_one;
        num / den
    }

    /// `h(z) = log Q(z)`; cut on `Sigma2 U J2`, logarithmic singularity at 1.
    pub fn h(&self, z: Complex64) -> Result<Complex64> {
        if (z - 1.0).norm() < 1e-12 || self.in_j2(z) || self.in_sigma2(z) {
            return Err(Self::branch_error(z));
        }
        Ok(self.q(z).ln())
    }

    /// `h(infinity) = log((b2 - b1) / ((1 - b1)^{1/2} + (1 - b2)^{1/2})^2)`.
    pub fn h_infinity(&self) -> Complex64 {
        let root = (1.0 - self.b1).sqrt() + (1.0 - self.b2).sqrt();
        ((self.b2 - self.b1) / (root * root)).ln()
    }

    fn side_point(z: Complex64, side: Side, delta: f64) -> Complex64 {
        match side {
            Side::Plus => z * (1.0 - delta),
            Side::Minus => z * (1.0 + delta),
        }
    }

    /// Richardson-extrapolated one-sided limit of `f` at `z` on the circle.
    fn one_sided<F: Fn(Complex64) -> Complex64>(z: Complex64, side: Side, f: F) -> Complex64 {
        let d = SIDE_OFFSET;
        2.0 * f(Self::side_point(z, side, 0.5 * d)) - f(Self::side_point(z, side, d))
    }

    pub fn g1_side(&self, z: Complex64, side: Side) -> Complex64 {
        if z == self.b1 || z == self.b2 {
            return self.g1_raw(z);
        }
        Self::one_sided(z, side, |w| self.g1_raw(w))
    }

    /// One-sided `h`. At the endpoint `b2`, `Q(b2) = -1` exactly and the side
    /// only selects the branch of the logarithm.
    pub fn h_side(&self, z: Complex64, side: Side) -> Complex64 {
        if (z - self.b2).norm() < 1e-14 {
            let q = self.q(self.b2);
            let probe = self.q(Self::side_point(self.b2, side, SIDE_OFFSET));
            let arg = if probe.im >= 0.0 { PI } else { -PI };
            return Complex64::new(q.norm().ln(), arg);
        }
        Self::one_sided(z, side, |w| self.q(w).ln())
    }

    /// `log z` branch paired with `g1`: principal.
    fn log_z(z: Complex64) -> Complex64 {
        z.ln()
    }

    /// `zeta(z) = Q(z) exp((2 pi / Omega)(g1(z) - log(z) / 2))` for any `Omega`.
    /// Writing `e^h` as `Q` removes the `Sigma2` cut of `h`.
    pub fn zeta_with(&self, z: Complex64, omega: f64) -> Complex64 {
        self.q(z) * ((TAU / omega) * (self.g1_raw(z) - 0.5 * Self::log_z(z))).exp()
    }

    /// Radius of the conformal disc around 1: `factor * (s/n) / log(1/u0)`.
    pub fn disc_radius(&self) -> f64 {
        let u0 = self.theta0 / self.scale;
        self.disc_factor * self.scale / (1.0 / u0).ln()
    }

    /// `zeta(z)` for `z` in the conformal disc; needs a solved `Omega`.
    pub fn zeta_map(&self, z: Complex64) -> Result<Complex64> {
        let omega = self
            .omega
            .ok_or_else(|| GapError::Domain("Omega has not been solved".into()))?;
        if (z - 1.0).norm() >= self.disc_radius() {
            return Err(GapError::Domain(format!(
                "|z - 1| = {} is outside the disc of radius {}",
                (z - 1.0).norm(),
                self.disc_radius()
            )));
        }
        Ok(self.zeta_with(z, omega))
    }

    /// `zeta(a) - zeta(conj a)`, real up to rounding.
    pub fn zeta_gap(&self, omega: f64) -> f64 {
        (self.zeta_with(self.a, omega) - self.zeta_with(self.a.conj(), omega)).re
    }

    /// Leading-order `Omega = pi s sqrt|u1 u2| / (n log(8 / ((1/u1 - 1/u2) u0)))`.
    pub fn omega_leading(&self) -> f64 {
        let (u0, u1, u2) = self.u();
        PI * self.scale * (u1 * u2).abs().sqrt() / (8.0 / ((1.0 / u1 - 1.0 / u2) * u0)).ln()
    }

    /// Bisection for `zeta(a) - zeta(conj a) = 4` on `[Omega^/10, 10 Omega^]`.
    pub fn solve_omega(&self) -> Result<ScalingContext> {
        let guess = self.omega_leading();
        let (mut lo, mut hi) = (guess / 10.0, guess * 10.0);
        let (f_lo, f_hi) = (self.zeta_gap(lo), self.zeta_gap(hi));
        if !(f_lo > 4.0 && f_hi < 4.0) {
            return Err(GapError::BracketFailure { lo, hi, f_lo, f_hi });
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.zeta_gap(mid) > 4.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let best = if (self.zeta_gap(lo) - 4.0).abs() <= (self.zeta_gap(hi) - 4.0).abs() {
            lo
        } else {
            hi
        };
        let mut solved = self.clone();
        solved.omega = Some(best);
        Ok(solved)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ctx() -> ScalingContext {
        ScalingContext::new(0.3, 2.0, -2.0).unwrap()
    }

    fn on_circle(t: f64) -> Complex64 {
        Complex64::from_polar(1.0, t)
    }

    #[test]
    fn rejects_bad_angles() {
        assert!(ScalingContext::new(0.3, 0.2, -2.0).is_err());
        assert!(ScalingContext::new(0.3, 2.0, 0.1).is_err());
    }

    #[test]
    fn r_behaves_like_z_at_infinity() {
        let c = ctx();
        let z = Complex64::new(-3e6, 2e6);
        assert!((c.r(z) / z - 1.0).norm() < 1e-6);
        let r2 = c.r(Complex64::new(0.2, 0.4)).powi(2);
        let direct = (Complex64::new(0.2, 0.4) - c.b1) * (Complex64::new(0.2, 0.4) - c.b2);
        assert!((r2 - direct).norm() < 1e-14);
    }

    #[test]
    fn g1_special_values() {
        let c = ctx();
        assert!((c.g1_side(c.b1, Side::Plus) - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        assert!((c.g1_side(c.b2, Side::Plus) - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        let z = Complex64::from_polar(1e6, 0.7);
        let lim = c.g1(z).unwrap() - z.ln() + ((c.sqrt_b1 + c.sqrt_b2) / 2.0).ln();
        assert!(lim.norm() < 1e-6);
        assert!(c.g1(on_circle(2.5)).is_err());
    }

    #[test]
    fn g1_maps_outside_unit_disc() {
        let c = ctx();
        for (re, im) in [(0.1, 0.2), (-0.5, -0.1), (3.0, 1.0), (0.99, 0.0)] {
            let z = Complex64::new(re, im);
            assert!(c.g1(z).unwrap().re > 0.0);
        }
    }

    #[test]
    fn g1_jump_on_j2() {
        let c = ctx();
        for k in 1..100 {
            let t = 2.0 + (TAU - 4.0) * k as f64 / 100.0;
            let z = on_circle(t);
            let sum = c.g1_side(z, Side::Plus) + c.g1_side(z, Side::Minus);
            assert!((sum - z.ln()).norm() < 1e-10, "t = {t}: {sum}");
        }
    }

    #[test]
    fn g1_arc_form() {
        let c = ctx();
        let (t1, t2) = (c.theta1, c.theta2);
        for t in [-1.5f64, -0.4, 0.5, 1.9] {
            let form = Complex64::from_polar(1.0, t / 2.0)
                * ((0.5 * (t - 0.5 * (t1 + t2))).cos()
                    + ((0.5 * (t - t1)).sin() * (0.5 * (t - t2)).sin()).abs().sqrt())
                / (0.25 * (t1 - t2)).cos();
            assert!((c.g1(on_circle(t)).unwrap().exp() - form).norm() < 1e-13);
        }
    }

    #[test]
    fn branch_product_is_z() {
        let c = ctx();
        for (re, im) in [(0.3, 0.1), (-2.0, 0.5), (1.5, -1.5)] {
            let z = Complex64::new(re, im);
            let prod = (c.g1(z).unwrap() + c.g1_other_branch(z)).exp();
            assert!((prod - z).norm() < 1e-12);
        }
    }

    #[test]
    fn h_values_and_jumps() {
        let c = ctx();
        assert!(c.h(c.b1).unwrap().norm() < 1e-11);
        let plus = c.h_side(c.b2, Side::Plus);
        let minus = c.h_side(c.b2, Side::Minus);
        assert!((plus - Complex64::new(0.0, PI)).norm() < 1e-10);
        assert!((minus + Complex64::new(0.0, PI)).norm() < 1e-10);
        for k in 1..100 {
            let t = 2.0 + (TAU - 4.0) * k as f64 / 100.0;
            let z = on_circle(t);
            assert!((c.h_side(z, Side::Plus) + c.h_side(z, Side::Minus)).norm() < 1e-10);
        }
        for k in 1..100 {
            let t2 = -2.0 * k as f64 / 100.0;
            let z = on_circle(t2);
            let jump = c.h_side(z, Side::Plus) - c.h_side(z, Side::Minus);
            assert!((jump - Complex64::new(0.0, TAU)).norm() < 1e-10);
            let t1 = 2.0 * k as f64 / 100.0;
            let z = on_circle(t1);
            assert!((c.h_side(z, Side::Plus) - c.h_side(z, Side::Minus)).norm() < 1e-10);
        }
        assert!(c.h(Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn h_at_infinity_and_arc_form() {
        let c = ctx();
        // h(z) - h(infinity) = O(1/z)
        let far = Complex64::from_polar(1e8, 0.3);
        assert!((c.h(far).unwrap() - c.h_infinity()).norm() < 1e-7);
        let (t1, t2) = (c.theta1, c.theta2);
        for t in [-1.5f64, -0.5, 0.5, 1.5] {
            let num = (0.5 * (t1 - t2)).sin() * (0.5 * t).sin();
            let root = ((0.5 * (t - t1)).sin() * (0.5 * (t - t2)).sin() * (0.5 * t1).sin() * (0.5 * t2).sin())
                .abs()
                .sqrt();
            let den = (0.5 * (t - t1 - t2)).cos() - (0.5 * (t1 - t2)).cos() * (0.5 * t).cos() + 2.0 * root;
            assert!((c.q(on_circle(t)) - num / den).norm() < 1e-13);
        }
    }

    #[test]
    fn omega_solve_preset() {
        let c = ScalingContext::from_u(8.0, 1e5, 1e-3, 2.0, -2.0).unwrap();
        let solved = c.solve_omega().unwrap();
        let omega = solved.omega.unwrap();
        assert!((solved.zeta_gap(omega) - 4.0).abs() < 1e-12);
        let lead = c.omega_leading();
        assert_relative_eq!(lead, 5.593_010_085_399_94e-5, max_relative = 1e-12);
        assert!(((omega - lead) / lead).abs() < 0.1);
        let samples: Vec<f64> = [0.2, 0.5, 1.0, 2.0, 5.0].iter().map(|f| c.zeta_gap(lead * f)).collect();
        assert!(samples.windows(2).all(|p| p[1] < p[0]));
    }

    #[test]
    fn zeta_is_real_on_j1_and_continuous_at_one() {
        let c = ScalingContext::from_u(8.0, 1e5, 1e-3, 2.0, -2.0)
            .unwrap()
            .solve_omega()
            .unwrap();
        let mut last = f64::NEG_INFINITY;
        for k in -9..=9 {
            let t = c.theta0 * k as f64 / 10.0;
            let z = c.zeta_map(on_circle(t)).unwrap();
            // 2 pi / Omega ~ 1e5 amplifies rounding in the exponent
            assert!(z.im.abs() <= 1e-8 * z.norm().max(1.0));
            assert!(z.re > last);
            last = z.re;
        }
        // zeta is analytic through 1: one-sided difference quotients agree
        let eps = 1e-13;
        let left = c.zeta_map(on_circle(-eps)).unwrap() / -eps;
        let right = c.zeta_map(on_circle(eps)).unwrap() / eps;
        assert!((left - right).norm() < 1e-6 * right.norm());
        assert!(c.zeta_map(Complex64::new(1.5, 0.0)).is_err());
    }
}
