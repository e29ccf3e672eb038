//! Special functions: Barnes G at integers, the Widom-Dyson constant,
//! the third Jacobi theta function, and orthonormal Legendre polynomials.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::error::{GapError, Result};

/// Derivative of the Riemann zeta function at -1.
pub const ZETA_PRIME_MINUS_ONE: f64 = -0.165_421_143_700_450_93;

pub fn zeta_prime_minus_one() -> f64 {
    ZETA_PRIME_MINUS_ONE
}

/// Constant term of the single-interval gap expansion: `log(2)/12 + 3 zeta'(-1)`.
pub fn widom_dyson_constant() -> f64 {
    LN_2 / 12.0 + 3.0 * ZETA_PRIME_MINUS_ONE
}

/// `log G(k)` for positive integers, as a sum of log-factorials.
pub fn log_barnes_g(k: i64) -> Result<f64> {
    if k <= 0 {
        return Err(GapError::Domain(format!("Barnes G needs k >= 1, got {k}")));
    }
    // G(k) = prod_{j=1}^{k-2} j!
    let mut log_fact = 0.0;
    let mut total = 0.0;
    for j in 1..=(k - 2).max(0) {
        log_fact += (j as f64).ln();
        total += log_fact;
    }
    Ok(total)
}

/// Leading coefficient of the degree-`j` Legendre polynomial orthonormal
/// on `[-2, 2]`, with the convention `kappa_{-1} = 0`.
pub fn kappa_unit(j: i64) -> f64 {
    if j < 0 {
        0.0
    } else {
        LegendreBasis::new(-2.0, 2.0).kappa(j as usize)
    }
}

/// `c(k) = log(2^{2k^2-k} pi^{-k} G(k+1)^4 / G(2k+1))`, evaluated in log space.
pub fn c_of_k(k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let kf = k as f64;
    let g1 = log_barnes_g(k as i64 + 1).expect("k + 1 >= 1");
    let g2 = log_barnes_g(2 * k as i64 + 1).expect("2k + 1 >= 1");
    (2.0 * kf * kf - kf) * LN_2 - kf * PI.ln() + 4.0 * g1 - g2
}

/// The same constant as `-sum_{j<k} log(2 pi kappa_j^2)`.
pub fn c_of_k_from_kappa(k: usize) -> f64 {
    (0..k).map(|j| -(2.0 * PI * kappa_unit(j as i64).powi(2)).ln()).sum()
}

/// Correction term `delta_k(x)` of the transition regime.
pub fn delta_k(k: usize, x: f64, gamma_nu: f64) -> Result<f64> {
    if !(gamma_nu > 0.0 && gamma_nu < 1.0) {
        return Err(GapError::Domain(format!("gamma*nu must lie in (0, 1), got {gamma_nu}")));
    }
    let k = k as i64;
    let lower = 2.0 * PI * kappa_unit(k - 1).powi(2) * gamma_nu.powf(1.0 + 2.0 * x);
    let upper = gamma_nu.powf(1.0 - 2.0 * x) / (2.0 * PI * kappa_unit(k).powi(2));
    Ok(lower.ln_1p() + upper.ln_1p())
}

/// Number of theta-series terms on each side: smallest `M >= 8` whose tail
/// bound `2 exp(-pi Im(tau) M^2 + 2 pi |Im z| M)` is below 1e-15.
pub fn theta_truncation(z: Complex64, tau: Complex64) -> usize {
    let (b, c) = (PI * tau.im, 2.0 * PI * z.im.abs());
    let mut m = 8usize;
    while (2.0f64.ln() - b * (m * m) as f64 + c * m as f64) > 1e-15f64.ln() {
        m += 1;
    }
    m
}

/// Jacobi theta function `sum_m exp(2 pi i z m + pi i tau m^2)`.
pub fn theta3(z: Complex64, tau: Complex64) -> Result<Complex64> {
    if !(tau.im > 0.0) {
        return Err(GapError::Domain(format!("theta needs Im tau > 0, got {tau}")));
    }
    let i = Complex64::i();
    let m_max = theta_truncation(z, tau);
    let mut sum = Complex64::new(1.0, 0.0);
    for m in 1..=m_max {
        let mf = m as f64;
        let q = (i * PI * tau * mf * mf).exp();
        let w = 2.0 * PI * mf * z * i;
        sum += q * (w.exp() + (-w).exp());
    }
    Ok(sum)
}

/// Leading coefficients `(kappa_k, mu_k, nu_k)` of a Legendre polynomial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeadingCoefficients {
    pub kappa: f64,
    pub mu: f64,
    pub nu: f64,
}

/// Legendre polynomials orthonormal on `(eta1, eta2)` with positive leading
/// coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegendreBasis {
    pub eta1: f64,
    pub eta2: f64,
}

impl LegendreBasis {
    pub fn new(eta1: f64, eta2: f64) -> Self {
        assert!(eta1 < eta2, "Legendre basis needs eta1 < eta2");
        Self { eta1, eta2 }
    }

    fn width(&self) -> f64 {
        self.eta2 - self.eta1
    }

    /// `log binom(2k, k)` via a running product, exact enough for k in the thousands.
    fn log_central_binomial(k: usize) -> f64 {
        (1..=k).map(|j| ((k + j) as f64 / j as f64).ln()).sum()
    }

    /// Closed-form leading coefficient, in log space to survive large k.
    pub fn kappa(&self, k: usize) -> f64 {
        let kf = k as f64;
        (-(kf + 0.5) * self.width().ln() + 0.5 * (2.0 * kf + 1.0).ln() + Self::log_central_binomial(k)).exp()
    }

    pub fn coefficients(&self, k: usize) -> LeadingCoefficients {
        let kappa = self.kappa(k);
        let kf = k as f64;
        let sum = self.eta1 + self.eta2;
        let mu = if k >= 1 { -kappa * 0.5 * kf * sum } else { 0.0 };
        let nu = if k >= 2 {
            // binom(2k-2, k-2) = binom(2k, k) * k (k - 1) / (2k (2k - 1))
            let ratio = kf * (kf - 1.0) / (2.0 * kf * (2.0 * kf - 1.0));
            let squares = self.eta1 * self.eta1 + self.eta2 * self.eta2;
            kappa * ratio * 0.5 * kf * (kf * sum * sum - squares)
        } else {
            0.0
        };
        LeadingCoefficients { kappa, mu, nu }
    }

    /// Values and x-derivatives of `L_0..=L_k` at `x`.
    pub fn eval_all(&self, k: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
        let w = self.width();
        let t = (2.0 * x - self.eta1 - self.eta2) / w;
        let mut p = vec![0.0; k + 1];
        let mut dp = vec![0.0; k + 1];
        p[0] = 1.0;
        if k >= 1 {
            p[1] = t;
            dp[1] = 1.0;
        }
        for j in 1..k {
            let jf = j as f64;
            p[j + 1] = ((2.0 * jf + 1.0) * t * p[j] - jf * p[j - 1]) / (jf + 1.0);
            // P'_{j+1} = P'_{j-1} + (2j + 1) P_j
            dp[j + 1] = dp[j - 1] + (2.0 * jf + 1.0) * p[j];
        }
        for j in 0..=k {
            let scale = ((2 * j + 1) as f64 / w).sqrt();
            p[j] *= scale;
            dp[j] *= scale * 2.0 / w;
        }
        (p, dp)
    }

    pub fn eval(&self, k: usize, x: f64) -> f64 {
        self.eval_all(k, x).0[k]
    }

    pub fn eval_with_derivative(&self, k: usize, x: f64) -> (f64, f64) {
        let (p, dp) = self.eval_all(k, x);
        (p[k], dp[k])
    }

    /// The explicit binomial series; only usable for small k.
    pub fn eval_series(&self, k: usize, x: f64) -> f64 {
        let w = self.width();
        let u = (x - self.eta2) / w;
        let mut term = 1.0;
        let mut sum = 1.0;
        for j in 1..=k {
            let jf = j as f64;
            // binom(k,j) binom(k+j,j) from the previous term
            term *= (k as f64 - jf + 1.0) * (k as f64 + jf) / (jf * jf) * u;
            sum += term;
        }
        ((2 * k + 1) as f64 / w).sqrt() * sum
    }
}

/// Rank-`k` Christoffel-Darboux kernel of the Legendre basis on `[-2, 2]`.
pub fn k_leg(k: usize, x: f64, y: f64) -> f64 {
    assert!(k >= 1, "the Legendre kernel needs k >= 1");
    let basis = LegendreBasis::new(-2.0, 2.0);
    let ratio = basis.kappa(k - 1) / basis.kappa(k);
    let (px, dpx) = basis.eval_all(k, x);
    if (x - y).abs() < 1e-5 {
        if x == y {
            return ratio * (dpx[k] * px[k - 1] - px[k] * dpx[k - 1]);
        }
        // Direct sum avoids cancellation in the two-term form.
        let py = basis.eval_all(k - 1, y).0;
        return px[..k].iter().zip(&py).map(|(a, b)| a * b).sum();
    }
    let py = basis.eval_all(k, y).0;
    ratio * (px[k] * py[k - 1] - px[k - 1] * py[k]) / (x - y)
}
