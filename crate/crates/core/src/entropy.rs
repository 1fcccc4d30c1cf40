//! Energy as entropy: `E(U)`, its flux `G(U)`, the Hessian test in primitive
//! variables and the admissible set.

use nalgebra::{Matrix4, Vector4};

use crate::hyperbolicity::{char_poly, check_conditions};
use crate::state::{pow53, ModelParams, PrimitiveState};

pub fn entropy_e(u: &PrimitiveState, p: &ModelParams) -> f64 {
    let r = u.rho_n + 0.5 * u.rho_s;
    0.5 * u.rho_n * u.u_n * u.u_n
        + 0.5 * u.rho_s * u.u_s * u.u_s
        + 0.9 * p.c() * pow53(u.rho_n)
        + p.alpha() * r * r
}

pub fn entropy_g(u: &PrimitiveState, p: &ModelParams) -> f64 {
    let r = u.rho_n + 0.5 * u.rho_s;
    0.5 * u.rho_n * u.u_n.powi(3)
        + 0.5 * u.rho_s * u.u_s.powi(3)
        + 1.5 * p.c() * pow53(u.rho_n) * u.u_n
        + p.alpha() * r * (2.0 * u.rho_n * u.u_n + u.rho_s * u.u_s)
}

/// Hessian of `E` with respect to `(rho_n, rho_s, u_n, u_s)`.
pub fn entropy_hessian(u: &PrimitiveState, p: &ModelParams) -> Matrix4<f64> {
    let a = p.alpha();
    #[rustfmt::skip]
    let h = Matrix4::new(
        p.c() / u.rho_n.cbrt() + 2.0 * a, a, u.u_n, 0.0,
        a, 0.5 * a, 0.0, u.u_s,
        u.u_n, 0.0, u.rho_n, 0.0,
        0.0, u.u_s, 0.0, u.rho_s,
    );
    h
}

/// `X^T (d^2 E) X` from the explicit Hessian.
pub fn hessian_quadratic_form(u: &PrimitiveState, x: &Vector4<f64>, p: &ModelParams) -> f64 {
    x.dot(&(entropy_hessian(u, p) * x))
}

/// The same quadratic form after completing squares in `x4`, `x3`, `x2`.
/// Undefined (`None`) when `alpha rho_s = 2 u_s^2` or a density vanishes.
pub fn hessian_quadratic_form_completed(
    u: &PrimitiveState,
    x: &Vector4<f64>,
    p: &ModelParams,
) -> Option<f64> {
    let a = p.alpha();
    let PrimitiveState { rho_n, rho_s, u_n, u_s } = *u;
    let pivot = a * rho_s - 2.0 * u_s * u_s;
    if pivot == 0.0 || rho_n <= 0.0 || rho_s <= 0.0 {
        return None;
    }
    let (x1, x2, x3, x4) = (x[0], x[1], x[2], x[3]);
    let sq = |v: f64| v * v;
    Some(
        rho_s * sq(x4 + u_s / rho_s * x2)
            + rho_n * sq(x3 + u_n / rho_n * x1)
            + (0.5 * a - u_s * u_s / rho_s) * sq(x2 + 2.0 * a * rho_s / pivot * x1)
            + (p.c() / rho_n.cbrt() + 2.0 * a - u_n * u_n / rho_n - 2.0 * a * a * rho_s / pivot)
                * sq(x1),
    )
}

/// Pivots of the completed-square form; both positive means `d^2 E` is
/// positive definite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvexityConditions {
    /// `u_s^2 < alpha rho_s / 2`
    pub us_small: bool,
    /// `P_A(0) > 0`
    pub pa0_positive: bool,
}

impl ConvexityConditions {
    pub fn both(&self) -> bool {
        self.us_small && self.pa0_positive
    }
}

pub fn convexity_conditions(u: &PrimitiveState, p: &ModelParams) -> ConvexityConditions {
    ConvexityConditions {
        us_small: u.u_s * u.u_s < 0.5 * p.alpha() * u.rho_s,
        pa0_positive: char_poly(u, p).eval(0.0) > 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyReport {
    pub e: f64,
    pub g: f64,
    pub hessian_conditions: ConvexityConditions,
    /// Smallest `X^T (d^2 E) X` over the probe directions.
    pub min_quadratic_form: f64,
}

pub fn entropy_report(u: &PrimitiveState, p: &ModelParams, probes: &[Vector4<f64>]) -> EntropyReport {
    let h = entropy_hessian(u, p);
    let min_quadratic_form = probes
        .iter()
        .map(|x| x.dot(&(h * x)))
        .fold(f64::INFINITY, f64::min);
    EntropyReport {
        e: entropy_e(u, p),
        g: entropy_g(u, p),
        hessian_conditions: convexity_conditions(u, p),
        min_quadratic_form,
    }
}

/// Membership in the set on which smooth solutions are known to exist:
/// positive densities, one of the hyperbolicity conditions, both convexity
/// conditions, and `u_n != u_s`.
pub fn in_admissible_set(u: &PrimitiveState, p: &ModelParams) -> bool {
    u.rho_n > 0.0
        && u.rho_s > 0.0
        && check_conditions(u, p).any()
        && convexity_conditions(u, p).both()
        && u.u_n != u.u_s
}

/// `sigma [E] - [G]` across a discontinuity moving at `sigma`; nonnegative
/// for a discontinuity that dissipates `E`.
pub fn shock_entropy_dissipation(
    u_minus: &PrimitiveState,
    u_plus: &PrimitiveState,
    sigma: f64,
    p: &ModelParams,
) -> f64 {
    sigma * (entropy_e(u_plus, p) - entropy_e(u_minus, p))
        - (entropy_g(u_plus, p) - entropy_g(u_minus, p))
}
