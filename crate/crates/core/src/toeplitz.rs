//! Toeplitz determinants whose symbol is the indicator of a union of arcs,
//! together with the orthonormal polynomials of the arc measure.
//!
//! Two independent determinant paths are provided. The Cholesky path factors
//! the Hermitian Toeplitz matrix built from the closed-form Fourier
//! coefficients. The Szego path runs the polynomial recurrence on a
//! Gauss-Legendre discretization of the arc measure; the quadrature is exact
//! for every inner product the recurrence needs, and tracking node values
//! instead of moments keeps it accurate when the prediction errors underflow
//! far below machine epsilon (long arcs, large n), where moment-based
//! Levinson recursions lose every digit.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GapError, Result};
use crate::fredholm::{log_gap_probability, IntervalSet};
use crate::quad::gauss_legendre;

/// Reflection coefficients this close to the unit circle halt the recursion.
pub const REFLECTION_GUARD: f64 = 1e-12;

/// Extra Gauss-Legendre nodes per arc beyond the band limit.
const NODE_MARGIN: usize = 40;

/// Disjoint open arcs `(start, end)` of the unit circle, by angle.
///
/// Each start is normalized into `[-pi, pi)` and `start < end <= start + 2 pi`,
/// so an arc may cross the negative real axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcSet {
    arcs: Vec<(f64, f64)>,
}

fn wrap_start(a: f64) -> f64 {
    (a + PI).rem_euclid(TAU) - PI
}

impl ArcSet {
    pub fn new(arcs: Vec<(f64, f64)>) -> Result<Self> {
        if arcs.is_empty() {
            return Err(GapError::InvalidSet("arc set is empty".into()));
        }
        let mut normalized = Vec::with_capacity(arcs.len());
        for (a, b) in arcs {
            if !(a < b) || !(b - a <= TAU) || !a.is_finite() || !b.is_finite() {
                return Err(GapError::InvalidInterval { a, b });
            }
            let start = wrap_start(a);
            normalized.push((start, start + (b - a)));
        }
        normalized.sort_by(|p, q| p.0.total_cmp(&q.0));
        let total: f64 = normalized.iter().map(|(a, b)| b - a).sum();
        if total > TAU * (1.0 + 1e-15) {
            return Err(GapError::InvalidSet(format!("arcs cover {total} > 2 pi radians")));
        }
        for w in normalized.windows(2) {
            if w[0].1 > w[1].0 {
                return Err(GapError::InvalidSet("arcs overlap".into()));
            }
        }
        let (first, last) = (normalized[0], normalized[normalized.len() - 1]);
        if normalized.len() > 1 && last.1 > first.0 + TAU {
            return Err(GapError::InvalidSet("arcs overlap across the cut".into()));
        }
        Ok(Self { arcs: normalized })
    }

    pub fn full_circle() -> Self {
        Self { arcs: vec![(-PI, PI)] }
    }

    /// Complement of `scale * A` on the circle.
    pub fn complement_of_scaled(set: &IntervalSet, scale: f64) -> Result<Self> {
        let excluded = ArcSet::new(set.intervals().iter().map(|&(a, b)| (scale * a, scale * b)).collect())?;
        excluded.complement()
    }

    /// The Toeplitz setting of a closing gap: `J1 = (-2 s nu / n, 2 s nu / n)`
    /// and `J2 = (2 s beta / n, 2 pi + 2 s alpha / n)`.
    pub fn closing_gap(s: f64, alpha: f64, beta: f64, nu: f64, n: usize) -> Result<Self> {
        let set = IntervalSet::symmetric_cut(alpha, beta, nu)?;
        Self::complement_of_scaled(&set, 2.0 * s / n as f64)
    }

    pub fn arcs(&self) -> &[(f64, f64)] {
        &self.arcs
    }

    pub fn measure(&self) -> f64 {
        self.arcs.iter().map(|(a, b)| b - a).sum()
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.arcs.iter().any(|&(a, b)| {
            let t = a + (theta - a).rem_euclid(TAU);
            a < t && t < b
        })
    }

    pub fn complement(&self) -> Result<Self> {
        let mut gaps = Vec::new();
        for (i, &(_, end)) in self.arcs.iter().enumerate() {
            let next = if i + 1 < self.arcs.len() {
                self.arcs[i + 1].0
            } else {
                self.arcs[0].0 + TAU
            };
            if next > end {
                gaps.push((end, next));
            }
        }
        if gaps.is_empty() {
            return Err(GapError::InvalidSet("complement of the full circle is empty".into()));
        }
        ArcSet::new(gaps)
    }

    /// `f_k = int_J e^{-ik theta} d theta / 2 pi` in closed form.
    pub fn coefficient(&self, k: i64) -> Complex64 {
        if k == 0 {
            return Complex64::new(self.measure() / TAU, 0.0);
        }
        let kf = k as f64;
        let denom = Complex64::new(0.0, TAU * kf);
        self.arcs
            .iter()
            .map(|&(a, b)| (Complex64::from_polar(1.0, -kf * a) - Complex64::from_polar(1.0, -kf * b)) / denom)
            .sum()
    }

    /// Gauss-Legendre discretization of `d theta / 2 pi` on the arcs, exact
    /// (to rounding) for trigonometric polynomials of degree `<= 2 degree + 1`.
    pub fn measure_rule(&self, degree: usize) -> Result<(Vec<Complex64>, Vec<f64>)> {
        let mut z = Vec::new();
        let mut w = Vec::new();
        for &(a, b) in &self.arcs {
            let len = b - a;
            let m = ((2 * degree + 2) as f64 * len / 2.0).ceil() as usize + NODE_MARGIN;
            let rule = gauss_legendre(m, a, b)?;
            z.extend(rule.nodes.iter().map(|&t| Complex64::from_polar(1.0, t)));
            w.extend(rule.weights.iter().map(|&x| x / TAU));
        }
        Ok((z, w))
    }
}

/// `f_k` for a single `k`; see [`ArcSet::coefficient`].
pub fn symbol_coefficients(arcs: &ArcSet, k: i64) -> Complex64 {
    arcs.coefficient(k)
}

/// `log D_n` by complex Cholesky factorization of the Toeplitz matrix.
pub fn log_toeplitz_det_chol(arcs: &ArcSet, n: usize) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    let f: Vec<Complex64> = (0..n as i64).map(|k| arcs.coefficient(k)).collect();
    let entry = |j: usize, k: usize| -> Complex64 {
        if j >= k {
            f[j - k]
        } else {
            f[k - j].conj()
        }
    };
    // Lower-triangular factor, row-major.
    let mut l = vec![Complex64::new(0.0, 0.0); n * n];
    let mut log_det = 0.0;
    let mut smallest = f64::INFINITY;
    for j in 0..n {
        let mut d = entry(j, j).re;
        for p in 0..j {
            d -= l[j * n + p].norm_sqr();
        }
        if !(d > 0.0) {
            return Err(GapError::PivotFailure {
                index: j,
                pivot: d,
                smallest,
            });
        }
        smallest = smallest.min(d);
        log_det += d.ln();
        let ljj = d.sqrt();
        l[j * n + j] = Complex64::new(ljj, 0.0);
        for i in (j + 1)..n {
            let mut v = entry(i, j);
            for p in 0..j {
                v -= l[i * n + p] * l[j * n + p].conj();
            }
            l[i * n + j] = v / ljj;
        }
    }
    Ok(log_det)
}

/// Values of `phi_j`, `phi_j^*` and their derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyValue {
    pub phi: Complex64,
    pub dphi: Complex64,
    pub phi_star: Complex64,
    pub dphi_star: Complex64,
}

/// Output of the Szego recursion up to degree `n`.
///
/// The recurrence used throughout is
/// `phi_{j+1} = (z phi_j - a_j phi_j^*) / rho_j` and
/// `phi_{j+1}^* = (phi_j^* - conj(a_j) z phi_j) / rho_j`,
/// with `a_j = <z phi_j, phi_j^*>` and `rho_j` the norm of the numerator.
#[derive(Debug, Clone)]
pub struct SzegoData {
    pub n: usize,
    pub arcs: ArcSet,
    pub f0: f64,
    reflection: Vec<Complex64>,
    rho: Vec<f64>,
    log_e: Vec<f64>,
}

/// Run the Szego recursion for `J`, producing everything up to `phi_n`.
pub fn log_toeplitz_det_szego(arcs: &ArcSet, n: usize) -> Result<SzegoData> {
    let f0 = arcs.measure() / TAU;
    let (z, w) = arcs.measure_rule(n)?;
    let norm = |v: &[Complex64]| -> f64 { v.iter().zip(&w).map(|(x, &wi)| wi * x.norm_sqr()).sum() };

    let mut phi = vec![Complex64::new(1.0 / f0.sqrt(), 0.0); z.len()];
    let mut phi_star = phi.clone();
    let mut zphi = vec![Complex64::new(0.0, 0.0); z.len()];
    let mut reflection = Vec::with_capacity(n);
    let mut rho = Vec::with_capacity(n);
    let mut log_e = Vec::with_capacity(n + 1);
    log_e.push(f0.ln());

    for j in 0..n {
        let mut a = Complex64::new(0.0, 0.0);
        for i in 0..z.len() {
            zphi[i] = z[i] * phi[i];
            a += w[i] * zphi[i] * phi_star[i].conj();
        }
        let modulus = a.norm();
        if modulus >= 1.0 - REFLECTION_GUARD {
            return Err(GapError::RecursionBreakdown { step: j, modulus });
        }
        for i in 0..z.len() {
            let ps = phi_star[i];
            phi[i] = zphi[i] - a * ps;
            phi_star[i] = ps - a.conj() * zphi[i];
        }
        // Normalizing by the measured norms (not sqrt(1 - |a|^2)) stops
        // rounding drift from compounding over thousands of steps.
        let nu = norm(&phi);
        let nv = norm(&phi_star);
        let (su, sv) = (nu.sqrt(), nv.sqrt());
        phi.iter_mut().for_each(|p| *p /= su);
        phi_star.iter_mut().for_each(|p| *p /= sv);
        reflection.push(a);
        rho.push(su);
        log_e.push(log_e[j] + nu.ln());
    }
    Ok(SzegoData {
        n,
        arcs: arcs.clone(),
        f0,
        reflection,
        rho,
        log_e,
    })
}

impl SzegoData {
    pub fn reflection_coefficients(&self) -> &[Complex64] {
        &self.reflection
    }

    /// `log D_j` for `j <= n + 1` (with `D_0 = 1`).
    /// Smallest normalization factor `rho_j = sqrt(1 - |a_j|^2)`; values near
    /// zero signal an ill-conditioned recursion.
    pub fn min_rho(&self) -> f64 {
        self.rho.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn log_det_at(&self, j: usize) -> f64 {
        self.log_e[..j].iter().sum()
    }

    /// `log D_n`.
    pub fn log_det(&self) -> f64 {
        self.log_det_at(self.n)
    }

    /// `log D_1, ..., log D_n`.
    pub fn log_dets(&self) -> Vec<f64> {
        self.log_e[..self.n]
            .iter()
            .scan(0.0, |acc, &v| {
                *acc += v;
                Some(*acc)
            })
            .collect()
    }

    /// Leading coefficient `chi_j = (D_j / D_{j+1})^{1/2}`, for `j <= n`.
    pub fn chi(&self, j: usize) -> f64 {
        (-0.5 * self.log_e[j]).exp()
    }

    /// `phi_j(z)` and `phi_j^*(z)` by the forward recurrence.
    pub fn eval(&self, j: usize, z: Complex64) -> (Complex64, Complex64) {
        let v = self.eval_with_derivative(j, z);
        (v.phi, v.phi_star)
    }

    /// Values and exact derivatives from the differentiated recurrence.
    pub fn eval_with_derivative(&self, j: usize, z: Complex64) -> PolyValue {
        assert!(j <= self.n, "degree {j} exceeds recursion depth {}", self.n);
        let zero = Complex64::new(0.0, 0.0);
        let mut p = Complex64::new(1.0 / self.f0.sqrt(), 0.0);
        let mut ps = p;
        let (mut dp, mut dps) = (zero, zero);
        for k in 0..j {
            let (a, r) = (self.reflection[k], self.rho[k]);
            let zp = z * p;
            let dzp = p + z * dp;
            let np = (zp - a * ps) / r;
            let nps = (ps - a.conj() * zp) / r;
            dp = (dzp - a * dps) / r;
            dps = (dps - a.conj() * dzp) / r;
            p = np;
            ps = nps;
        }
        PolyValue {
            phi: p,
            dphi: dp,
            phi_star: ps,
            dphi_star: dps,
        }
    }

    /// Monomial coefficients of `phi_j`, lowest degree first. Costs `O(j^2)`;
    /// only meaningful for moderate `j` since the coefficients grow rapidly.
    pub fn coefficients(&self, j: usize) -> Vec<Complex64> {
        assert!(j <= self.n, "degree {j} exceeds recursion depth {}", self.n);
        let zero = Complex64::new(0.0, 0.0);
        let mut p = vec![Complex64::new(1.0 / self.f0.sqrt(), 0.0)];
        let mut ps = p.clone();
        for k in 0..j {
            let (a, r) = (self.reflection[k], self.rho[k]);
            let mut zp = vec![zero];
            zp.extend_from_slice(&p);
            ps.push(zero);
            p = zp.iter().zip(&ps).map(|(&x, &y)| (x - a * y) / r).collect();
            ps = ps.iter().zip(&zp).map(|(&y, &x)| (y - a.conj() * x) / r).collect();
        }
        p
    }

    /// Sum of `phi_j(z) conj(phi_j(w))` over `j < n`, term by term.
    pub fn kernel_sum(&self, z: Complex64, w: Complex64) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        let start = Complex64::new(1.0 / self.f0.sqrt(), 0.0);
        let (mut pz, mut psz, mut pw, mut psw) = (start, start, start, start);
        for k in 0..self.n {
            total += pz * pw.conj();
            let (a, r) = (self.reflection[k], self.rho[k]);
            let (zp, wp) = (z * pz, w * pw);
            pz = (zp - a * psz) / r;
            psz = (psz - a.conj() * zp) / r;
            pw = (wp - a * psw) / r;
            psw = (psw - a.conj() * wp) / r;
        }
        total
    }

    /// The same sum from the two-term Christoffel-Darboux form.
    pub fn kernel_closed_form(&self, z: Complex64, w: Complex64) -> Complex64 {
        let (pz, psz) = self.eval(self.n, z);
        let (pw, psw) = self.eval(self.n, w);
        (psz * psw.conj() - pz * pw.conj()) / (1.0 - z * w.conj())
    }

    /// `F(z) = n |phi_n|^2 - 2 Re(z conj(phi_n) phi_n')`; on the circle
    /// `-F(z)` is the diagonal of the kernel.
    pub fn f_function(&self, z: Complex64) -> f64 {
        let v = self.eval_with_derivative(self.n, z);
        self.n as f64 * v.phi.norm_sqr() - 2.0 * (z * v.phi.conj() * v.dphi).re
    }

    /// Inner product `<phi_i, phi_j>` on `J` with an independent, finer rule.
    pub fn inner_product(&self, i: usize, j: usize) -> Result<Complex64> {
        let (z, w) = self.arcs.measure_rule(self.n.max(i).max(j) + 16)?;
        Ok(z.iter()
            .zip(&w)
            .map(|(&zz, &ww)| ww * self.eval(i, zz).0 * self.eval(j, zz).0.conj())
            .sum())
    }
}

/// Horner evaluation of a coefficient vector, lowest degree first.
pub fn horner(coefficients: &[Complex64], z: Complex64) -> Complex64 {
    coefficients
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// `phi_j(z)`; see [`SzegoData::eval`].
pub fn orthonormal_poly_eval(data: &SzegoData, j: usize, z: Complex64) -> Complex64 {
    data.eval(j, z).0
}

/// Rescaled Christoffel-Darboux kernel `H_n(y1, y2)` at
/// `z_j = exp(2 i s y_j / n)`, multiplied by the unimodular gauge factor
/// `exp(-i (n - 1)(t1 - t2) / 2)` that makes it real and symmetric for any
/// arc set. Determinants built from it are unaffected by the gauge.
pub fn cd_kernel(data: &SzegoData, s: f64, y1: f64, y2: f64) -> f64 {
    cd_kernel_complex(data, s, y1, y2).re
}

/// As [`cd_kernel`] but keeping the (rounding-level) imaginary part.
pub fn cd_kernel_complex(data: &SzegoData, s: f64, y1: f64, y2: f64) -> Complex64 {
    let nf = data.n as f64;
    let (t1, t2) = (2.0 * s * y1 / nf, 2.0 * s * y2 / nf);
    let (z1, z2) = (Complex64::from_polar(1.0, t1), Complex64::from_polar(1.0, t2));
    let scale = s / (PI * nf);
    if t1 == t2 {
        return Complex64::new(-scale * data.f_function(z1), 0.0);
    }
    let gauge = Complex64::from_polar(1.0, -(nf - 1.0) * (t1 - t2) / 2.0);
    let sum = if (t1 - t2).abs() < 1e-6 {
        data.kernel_sum(z1, z2)
    } else {
        data.kernel_closed_form(z1, z2)
    };
    scale * gauge * sum
}

/// Both sides of the differential identity for `J = (-theta0, theta0) U (theta1, theta2 + 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiffIdentity {
    /// Central difference of `log D_n` in `theta0`.
    pub lhs: f64,
    /// `-(F(a) + F(conj a)) / (2 pi)` with `a = exp(i theta0)`.
    pub rhs: f64,
}

impl DiffIdentity {
    pub fn relative_residual(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.rhs.abs()
    }
}

pub const DIFF_STEP: f64 = 1e-5;

pub fn two_arc_set(theta0: f64, theta1: f64, theta2: f64) -> Result<ArcSet> {
    if !(-PI < theta2 && theta2 < 0.0 && 0.0 < theta0 && theta0 < theta1 && theta1 < PI) {
        return Err(GapError::Domain(format!(
            "need -pi < theta2 < 0 < theta0 < theta1 < pi, got ({theta0}, {theta1}, {theta2})"
        )));
    }
    ArcSet::new(vec![(-theta0, theta0), (theta1, theta2 + TAU)])
}

pub fn diff_identity_check(n: usize, theta0: f64, theta1: f64, theta2: f64) -> Result<DiffIdentity> {
    let h = DIFF_STEP;
    if theta0 <= 10.0 * h || theta0 >= theta1 - 10.0 * h {
        return Err(GapError::Domain(format!(
            "theta0 = {theta0} is within 10 steps of the ends of (0, {theta1})"
        )));
    }
    let plus = log_toeplitz_det_szego(&two_arc_set(theta0 + h, theta1, theta2)?, n)?;
    let minus = log_toeplitz_det_szego(&two_arc_set(theta0 - h, theta1, theta2)?, n)?;
    let lhs = (plus.log_det() - minus.log_det()) / (2.0 * h);
    let centre = log_toeplitz_det_szego(&two_arc_set(theta0, theta1, theta2)?, n)?;
    let a = Complex64::from_polar(1.0, theta0);
    let rhs = -(centre.f_function(a) + centre.f_function(a.conj())) / TAU;
    Ok(DiffIdentity { lhs, rhs })
}

/// `|D_n(J^(n)) - det(I - K_s)_A|` where `J^(n)` is the complement of `(2s/n) A`.
pub fn fredholm_limit_gap(s: f64, set: &IntervalSet, n: usize) -> Result<f64> {
    let reach = set
        .intervals()
        .iter()
        .map(|&(a, b)| a.abs().max(b.abs()))
        .fold(0.0, f64::max);
    if !(2.0 * s * reach / (n as f64) < PI) {
        return Err(GapError::Domain(format!(
            "2 s max|A| / n = {} must be below pi",
            2.0 * s * reach / n as f64
        )));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    let arcs = ArcSet::complement_of_scaled(set, 2.0 * s / n as f64)?;
    let toeplitz = log_toeplitz_det_szego(&arcs, n)?.log_det();
    let fredholm = log_gap_probability(s, set, None)?;
    Ok((toeplitz.exp() - fredholm.exp()).abs())
}
