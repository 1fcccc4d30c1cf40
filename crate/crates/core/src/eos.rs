//! Equation of state of the normal (thermal) Bose fluid.
//!
//! The equilibrium distribution is the bosonian `M / (1 - M)` with
//! `M = beta exp(-|v|^2 / 2T)`. Its moments are polylogarithms of the
//! fugacity:
//!
//! ```text
//! F0(beta) = (2 pi)^{N/2}     Li_{N/2}(beta)       rho_n = T^{N/2} F0
//! F2(beta) = N (2 pi)^{N/2}   Li_{N/2+1}(beta)     p     = T^{N/2+1} F2 / N
//! S(beta)  = (1/2 + 1/N) F2 / F0 - ln beta
//! ```
//!
//! `S` is strictly decreasing in `beta`, so constant entropy freezes
//! `beta = beta0` and gives the pressure law `p = c_N rho_n^{(N+2)/N}`.

use std::f64::consts::PI;

use thiserror::Error;

use crate::quadrature;

pub const DEFAULT_DIMENSION: u32 = 3;
pub const DEFAULT_SERIES_TOL: f64 = 1e-14;

/// Above this fugacity the series is capped at [`SERIES_CAP`] terms and the
/// geometric tail bound is added.
const CAPPED_REGION: f64 = 0.99;
const SERIES_CAP: usize = 1_000_000;

const QUAD_ABS_TOL: f64 = 1e-10;
const QUAD_MAX_INTERVALS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EosError {
    #[error("fugacity must lie in (0, 1), got {0}")]
    InvalidFugacity(f64),
    #[error("dimension must be at least 1")]
    InvalidDimension,
    #[error("moment order must be 0 or 2, got {0}")]
    InvalidOrder(u32),
    #[error("temperature must be positive, got {0}")]
    InvalidTemperature(f64),
    #[error("quadrature did not reach tolerance (error estimate {error:e})")]
    QuadratureNotConverged { error: f64 },
}

/// Fugacity, strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FugacityBeta(f64);

impl FugacityBeta {
    pub fn new(beta: f64) -> Result<Self, EosError> {
        if beta > 0.0 && beta < 1.0 {
            Ok(Self(beta))
        } else {
            Err(EosError::InvalidFugacity(beta))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

/// `Li_s(beta) = sum_{k >= 1} beta^k / k^s` for `0 <= beta < 1`.
///
/// Summation stops once the next (decreasing) term drops below
/// `tol * sum`. `Li_0` and `Li_1` use their closed forms.
pub fn polylog(s: f64, beta: f64, tol: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&beta), "polylog needs 0 <= beta < 1");
    if beta == 0.0 {
        return 0.0;
    }
    if s == 0.0 {
        return beta / (1.0 - beta);
    }
    if s == 1.0 {
        return -(-beta).ln_1p();
    }
    let cap = if beta > CAPPED_REGION { SERIES_CAP } else { usize::MAX };
    let mut sum = 0.0;
    let mut power = beta;
    let mut term = beta;
    let mut k = 1usize;
    loop {
        sum += term;
        k += 1;
        power *= beta;
        let next = power / (k as f64).powf(s);
        if next < tol * sum && next <= term {
            return sum;
        }
        if k > cap {
            // Terms decrease at least geometrically with ratio beta.
            return sum + next / (1.0 - beta);
        }
        term = next;
    }
}

fn half_dim(n: u32) -> f64 {
    0.5 * n as f64
}

fn gaussian_norm(n: u32) -> f64 {
    (2.0 * PI).powf(half_dim(n))
}

pub fn f0(beta: FugacityBeta, n: u32) -> f64 {
    f0_with_tol(beta, n, DEFAULT_SERIES_TOL)
}

pub fn f2(beta: FugacityBeta, n: u32) -> f64 {
    f2_with_tol(beta, n, DEFAULT_SERIES_TOL)
}

pub fn f0_with_tol(beta: FugacityBeta, n: u32, tol: f64) -> f64 {
    gaussian_norm(n) * polylog(half_dim(n), beta.0, tol)
}

pub fn f2_with_tol(beta: FugacityBeta, n: u32, tol: f64) -> f64 {
    n as f64 * gaussian_norm(n) * polylog(half_dim(n) + 1.0, beta.0, tol)
}

/// Entropy per unit normal mass as a function of fugacity alone.
pub fn entropy_s(beta: FugacityBeta, n: u32) -> f64 {
    let s = half_dim(n);
    let b = beta.0;
    let ratio = polylog(s + 1.0, b, DEFAULT_SERIES_TOL) / polylog(s, b, DEFAULT_SERIES_TOL);
    (s + 1.0) * ratio - b.ln()
}

/// `dS/dbeta`, from `d Li_s / d beta = Li_{s-1} / beta`:
///
/// `S' = [ (N/2 + 1) (1 - Li_{s+1} Li_{s-1} / Li_s^2) - 1 ] / beta`, `s = N/2`.
///
/// Needs `N >= 2`; for `N = 1` the index `s - 1` is negative.
pub fn entropy_s_prime(beta: FugacityBeta, n: u32) -> f64 {
    assert!(n >= 2, "entropy derivative needs dimension >= 2");
    let s = half_dim(n);
    let b = beta.0;
    let tol = DEFAULT_SERIES_TOL;
    let lo = polylog(s - 1.0, b, tol);
    let mid = polylog(s, b, tol);
    let hi = polylog(s + 1.0, b, tol);
    ((s + 1.0) * (1.0 - hi * lo / (mid * mid)) - 1.0) / b
}

/// Cauchy-product coefficients `(c_n, c~_n)` from the monotonicity argument:
///
/// ```text
/// c_n  = sum_{k=0}^n 1 / ((k+1)^{N/2}   (n-k+1)^{N/2})
/// c~_n = sum_{k=0}^n 1 / ((k+1)^{N/2+1} (n-k+1)^{N/2-1})
/// ```
pub fn series_coefficients(order: usize, n: u32) -> (f64, f64) {
    let s = half_dim(n);
    (0..=order).fold((0.0, 0.0), |(c, ct), k| {
        let a = (k + 1) as f64;
        let b = (order - k + 1) as f64;
        (c + 1.0 / (a.powf(s) * b.powf(s)), ct + 1.0 / (a.powf(s + 1.0) * b.powf(s - 1.0)))
    })
}

/// Isentropic constant `c_N = F2(beta0) / (N F0(beta0)^{1 + 2/N})`.
pub fn c_tilde_from_beta0(beta0: FugacityBeta, n: u32) -> f64 {
    let nf = n as f64;
    f2(beta0, n) / (nf * f0(beta0, n).powf(1.0 + 2.0 / nf))
}

/// Surface area of the unit sphere in R^N.
fn sphere_area(n: u32) -> f64 {
    // Gamma(N/2) by recurrence from Gamma(1) = 1 or Gamma(1/2) = sqrt(pi).
    let mut gamma = if n % 2 == 0 { 1.0 } else { PI.sqrt() };
    let mut x = if n % 2 == 0 { 1.0 } else { 0.5 };
    while x < half_dim(n) {
        gamma *= x;
        x += 1.0;
    }
    2.0 * PI.powf(half_dim(n)) / gamma
}

/// `int_{R^N} |v|^order beta e^{-|v|^2/2T} / (1 - beta e^{-|v|^2/2T}) dv`
/// by radial adaptive quadrature.
///
/// Order 0 is `rho_n = T^{N/2} F0`, order 2 is `N p = T^{N/2+1} F2`.
pub fn bosonian_moment(order: u32, beta: FugacityBeta, t: f64, n: u32) -> Result<f64, EosError> {
    if order != 0 && order != 2 {
        return Err(EosError::InvalidOrder(order));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(EosError::InvalidTemperature(t));
    }
    if n == 0 {
        return Err(EosError::InvalidDimension);
    }
    let b = beta.0;
    let area = sphere_area(n);
    let power = (n - 1 + order) as i32;
    let integrand = |v: f64| {
        let m = b * (-0.5 * v * v / t).exp();
        area * v.powi(power) * m / (1.0 - m)
    };
    // exp(-80) kills any polynomial prefactor of moderate degree.
    let radius = (160.0 * t).sqrt();
    let magnitude = b / (1.0 - b) * (2.0 * PI * t).powf(half_dim(n)) * (n as f64 * t).powi(order as i32 / 2);
    let tol = QUAD_ABS_TOL.min(1e-12 * magnitude);
    let est = quadrature::integrate(integrand, 0.0, radius, tol, QUAD_MAX_INTERVALS);
    if est.converged {
        Ok(est.value)
    } else {
        Err(EosError::QuadratureNotConverged { error: est.error })
    }
}

/// One row of the tabulated equation of state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EosRow {
    pub beta: f64,
    pub f0: f64,
    pub f2: f64,
    pub s: f64,
    pub s_prime: f64,
}

/// Equation of state frozen at a reference fugacity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EosTable {
    dimension: u32,
    beta0: FugacityBeta,
    c_tilde_n: f64,
    series_tol: f64,
}

impl EosTable {
    pub fn new(dimension: u32, beta0: FugacityBeta, series_tol: f64) -> Result<Self, EosError> {
        if dimension == 0 {
            return Err(EosError::InvalidDimension);
        }
        let nf = dimension as f64;
        let c_tilde_n = f2_with_tol(beta0, dimension, series_tol)
            / (nf * f0_with_tol(beta0, dimension, series_tol).powf(1.0 + 2.0 / nf));
        Ok(Self { dimension, beta0, c_tilde_n, series_tol })
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn beta0(&self) -> FugacityBeta {
        self.beta0
    }

    pub fn c_tilde_n(&self) -> f64 {
        self.c_tilde_n
    }

    pub fn series_tol(&self) -> f64 {
        self.series_tol
    }

    /// `p = c_N rho_n^{(N+2)/N}`.
    pub fn pressure(&self, rho_n: f64) -> f64 {
        let nf = self.dimension as f64;
        self.c_tilde_n * rho_n.powf((nf + 2.0) / nf)
    }
}

pub fn eos_row(beta: FugacityBeta, n: u32) -> EosRow {
    EosRow {
        beta: beta.0,
        f0: f0(beta, n),
        f2: f2(beta, n),
        s: entropy_s(beta, n),
        s_prime: entropy_s_prime(beta, n),
    }
}

/// `count` rows evenly spaced on `[beta_min, beta_max]`; a single row sits at
/// `beta_min`.
pub fn tabulate(
    beta_min: FugacityBeta,
    beta_max: FugacityBeta,
    count: usize,
    n: u32,
) -> Vec<EosRow> {
    let (lo, hi) = (beta_min.0, beta_max.0);
    (0..count)
        .map(|i| {
            let b = if count == 1 { lo } else { lo + (hi - lo) * i as f64 / (count - 1) as f64 };
            eos_row(FugacityBeta(b.clamp(lo, hi)), n)
        })
        .collect()
}
