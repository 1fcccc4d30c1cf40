//! Spectrum of the quasilinear matrix `A(U)`.
//!
//! The characteristic polynomial factors as
//! `P(l) = ((l - u_n)^2 - a_n) ((l - u_s)^2 - a_s) - k` with
//! `a_n = c rho_n^{2/3} + 2 alpha rho_n`, `a_s = alpha rho_s / 2`,
//! `k = alpha^2 rho_n rho_s`. Roots are isolated by sign changes of `P` at a
//! handful of distinguished abscissae and refined by safeguarded Newton.

use nalgebra::{Matrix4, Vector4};
use thiserror::Error;

use crate::state::{pow23, ModelParams, PrimitiveState};

/// Bracket refinement stops at `ROOT_TOL * (1 + |lambda|)`.
pub const ROOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum HyperbolicityError {
    #[error("{lambda} is not an eigenvalue (relative residual {residual:e})")]
    NotAnEigenvalue { lambda: f64, residual: f64 },
    #[error("{lambda} is a multiple root (|P'| = {derivative:e})")]
    DegenerateRoot { lambda: f64, derivative: f64 },
}

/// Factored characteristic polynomial of `A(U)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharPoly {
    pub u_n: f64,
    pub u_s: f64,
    pub a_n: f64,
    pub a_s: f64,
    pub coupling: f64,
}

impl CharPoly {
    #[inline]
    pub fn eval(&self, l: f64) -> f64 {
        let dn = l - self.u_n;
        let ds = l - self.u_s;
        (dn * dn - self.a_n) * (ds * ds - self.a_s) - self.coupling
    }

    #[inline]
    pub fn derivative(&self, l: f64) -> f64 {
        let dn = l - self.u_n;
        let ds = l - self.u_s;
        2.0 * dn * (ds * ds - self.a_s) + 2.0 * ds * (dn * dn - self.a_n)
    }

    /// Magnitude of the individual terms of `P(l)`, used to make residual
    /// tests scale-free.
    pub fn scale_at(&self, l: f64) -> f64 {
        let dn = l - self.u_n;
        let ds = l - self.u_s;
        (dn * dn + self.a_n) * (ds * ds + self.a_s) + self.coupling
    }

    /// Monic coefficients `[c0, c1, c2, c3]` of `l^4 + c3 l^3 + c2 l^2 + c1 l + c0`.
    pub fn coefficients(&self) -> [f64; 4] {
        let (a1, a0) = (-2.0 * self.u_n, self.u_n * self.u_n - self.a_n);
        let (b1, b0) = (-2.0 * self.u_s, self.u_s * self.u_s - self.a_s);
        [a0 * b0 - self.coupling, a1 * b0 + a0 * b1, a0 + b0 + a1 * b1, a1 + b1]
    }

    fn midpoint(&self) -> f64 {
        0.5 * (self.u_n + self.u_s)
    }

    /// Half-width of an interval around the velocity midpoint outside of
    /// which `P > 0`.
    fn outer_radius(&self) -> f64 {
        (self.u_n - self.u_s).abs()
            + self.a_n.sqrt()
            + self.a_s.sqrt()
            + self.coupling.sqrt().sqrt()
            + 1.0
    }
}

pub fn char_poly(u: &PrimitiveState, p: &ModelParams) -> CharPoly {
    let rho_n = u.rho_n.max(0.0);
    let rho_s = u.rho_s.max(0.0);
    let alpha = p.alpha();
    CharPoly {
        u_n: u.u_n,
        u_s: u.u_s,
        a_n: p.c() * pow23(rho_n) + 2.0 * alpha * rho_n,
        a_s: 0.5 * alpha * rho_s,
        coupling: alpha * alpha * rho_n * rho_s,
    }
}

/// The quasilinear matrix in primitive variables.
pub fn quasilinear_matrix(u: &PrimitiveState, p: &ModelParams) -> Matrix4<f64> {
    let a = p.alpha();
    let cbrt = u.rho_n.cbrt();
    #[rustfmt::skip]
    let m = Matrix4::new(
        u.u_n, 0.0, u.rho_n, 0.0,
        0.0, u.u_s, 0.0, u.rho_s,
        p.c() / cbrt + 2.0 * a, a, u.u_n, 0.0,
        a, 0.5 * a, 0.0, u.u_s,
    );
    m
}

/// Sufficient conditions for strict hyperbolicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conditions {
    /// `(u_n - u_s)^2 < c rho_n^{2/3}`
    pub cond1: bool,
    /// `(u_n - u_s)^2 < c (alpha/2) rho_s rho_n^{2/3} / (c rho_n^{2/3} + 2 alpha rho_n)`
    pub cond2: bool,
    /// `rho_n <= (c / 2 alpha)^3`
    pub cond3: bool,
}

impl Conditions {
    pub fn any(&self) -> bool {
        self.cond1 || self.cond2 || self.cond3
    }
}

pub fn check_conditions(u: &PrimitiveState, p: &ModelParams) -> Conditions {
    let c = p.c();
    let alpha = p.alpha();
    let du2 = (u.u_n - u.u_s).powi(2);
    let r23 = pow23(u.rho_n);
    let a_n = c * r23 + 2.0 * alpha * u.rho_n;
    Conditions {
        cond1: du2 < c * r23,
        cond2: du2 < c * 0.5 * alpha * u.rho_s * r23 / a_n,
        cond3: u.rho_n <= (c / (2.0 * alpha)).powi(3),
    }
}

/// Roots of the characteristic polynomial in ascending order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum {
    pub lambdas: [f64; 4],
    /// Isolating brackets; present exactly when `certified`.
    pub brackets: Option<[(f64, f64); 4]>,
    /// Four sign changes of `P` were found, so the roots are real and simple.
    pub certified: bool,
}

impl Spectrum {
    pub fn spread(&self) -> f64 {
        self.lambdas[3] - self.lambdas[0]
    }

    pub fn min_separation(&self) -> f64 {
        self.lambdas.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }
}

/// Refine a root of `poly` inside `[lo, hi]`, where `P(lo)` and `P(hi)` have
/// opposite signs (or one is zero). Newton steps are taken when they stay
/// inside the current bracket, bisection otherwise.
fn refine(poly: &CharPoly, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = poly.eval(lo);
    if f_lo == 0.0 {
        return lo;
    }
    if poly.eval(hi) == 0.0 {
        return hi;
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = poly.eval(x);
        if fx == 0.0 {
            return x;
        }
        if (fx < 0.0) == (f_lo < 0.0) {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
        }
        if hi - lo <= ROOT_TOL * (1.0 + x.abs()) {
            break;
        }
        let d = poly.derivative(x);
        let newton = x - fx / d;
        x = if d != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (x - lo).min(hi - x) <= 0.0 {
            x = 0.5 * (lo + hi);
        }
    }
    // One final polish; keep it only if it stays bracketed.
    let d = poly.derivative(x);
    if d != 0.0 {
        let polished = x - poly.eval(x) / d;
        if polished >= lo && polished <= hi {
            return polished;
        }
    }
    x
}

/// Real parts of the companion-matrix eigenvalues, sorted.
pub fn companion_roots(coeffs: [f64; 4]) -> [f64; 4] {
    let [c0, c1, c2, c3] = coeffs;
    #[rustfmt::skip]
    let companion = Matrix4::new(
        0.0, 0.0, 0.0, -c0,
        1.0, 0.0, 0.0, -c1,
        0.0, 1.0, 0.0, -c2,
        0.0, 0.0, 1.0, -c3,
    );
    let eig = companion.complex_eigenvalues();
    let mut re = [eig[0].re, eig[1].re, eig[2].re, eig[3].re];
    re.sort_by(f64::total_cmp);
    re
}

/// All four eigenvalues of `A(U)`.
pub fn eigenvalues(u: &PrimitiveState, p: &ModelParams) -> Spectrum {
    spectrum_of(&char_poly(u, p))
}

pub fn spectrum_of(poly: &CharPoly) -> Spectrum {
    let mid = poly.midpoint();
    let radius = poly.outer_radius();
    let (rn, rs) = (poly.a_n.sqrt(), poly.a_s.sqrt());
    let mut probes = [
        mid - radius,
        poly.u_s - rs,
        poly.u_n - rn,
        poly.u_s,
        poly.u_n,
        mid,
        poly.u_s + rs,
        poly.u_n + rn,
        mid + radius,
    ];
    probes.sort_by(f64::total_cmp);
    let mut abscissae = probes.to_vec();
    abscissae.dedup();

    let mut brackets = [(0.0, 0.0); 4];
    let mut found = 0;
    let mut prev: Option<(f64, f64)> = None;
    for &x in &abscissae {
        let fx = poly.eval(x);
        if fx == 0.0 {
            // An exact root: record it and continue the sign sequence from
            // just past it, where P takes the sign of P'.
            if found < 4 {
                brackets[found] = (x, x);
            }
            found += 1;
            let past = x + 1e-9 * (1.0 + x.abs());
            let fp = poly.eval(past);
            prev = (fp != 0.0 && (fp > 0.0) == (poly.derivative(x) > 0.0)).then_some((past, fp));
            continue;
        }
        if let Some((px, pf)) = prev {
            if (pf < 0.0) != (fx < 0.0) {
                if found < 4 {
                    brackets[found] = (px, x);
                }
                found += 1;
            }
        }
        prev = Some((x, fx));
    }

    if found == 4 {
        let mut lambdas = [0.0; 4];
        for (l, &(lo, hi)) in lambdas.iter_mut().zip(&brackets) {
            *l = if lo == hi { lo } else { refine(poly, lo, hi) };
        }
        let strictly_increasing = lambdas.windows(2).all(|w| w[0] < w[1]);
        if strictly_increasing {
            return Spectrum { lambdas, brackets: Some(brackets), certified: true };
        }
    }
    Spectrum { lambdas: companion_roots(poly.coefficients()), brackets: None, certified: false }
}

/// Which of the three interlacing patterns the sorted roots obey.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interlacing {
    /// `l1 < u_s - sqrt(a_s) < l2 < u_s < l3 < u_s + sqrt(a_s) < l4`
    pub about_superfluid: bool,
    /// The same pattern about `u_n` with `sqrt(a_n)`.
    pub about_normal: bool,
    /// `l1 < min(u) <= l2 < (u_n + u_s) / 2 < l3 <= max(u) < l4`
    pub about_midpoint: bool,
}

impl Interlacing {
    pub fn any(&self) -> bool {
        self.about_superfluid || self.about_normal || self.about_midpoint
    }
}

const INTERLACE_TOL: f64 = 1e-10;

pub fn interlacing(lambdas: &[f64; 4], u: &PrimitiveState, p: &ModelParams) -> Interlacing {
    let poly = char_poly(u, p);
    let lt = |a: f64, b: f64| a < b + INTERLACE_TOL * (1.0 + b.abs());
    let chain = |pts: [f64; 7]| pts.windows(2).all(|w| lt(w[0], w[1]));
    let [l1, l2, l3, l4] = *lambdas;
    let about = |v: f64, r: f64| chain([l1, v - r, l2, v, l3, v + r, l4]);
    let (lo, hi) = (u.u_n.min(u.u_s), u.u_n.max(u.u_s));
    Interlacing {
        about_superfluid: about(u.u_s, poly.a_s.sqrt()),
        about_normal: about(u.u_n, poly.a_n.sqrt()),
        about_midpoint: lo < hi && chain([l1, lo, l2, poly.midpoint(), l3, hi, l4]),
    }
}

/// Smallest and largest real roots. Each lies in a half-line on which `P` is
/// monotone and convex, so Newton from outside converges monotonically;
/// bracketed refinement is the fallback.
pub fn extremal_eigenvalues(u: &PrimitiveState, p: &ModelParams) -> (f64, f64) {
    let poly = char_poly(u, p);
    let (rn, rs) = (poly.a_n.sqrt(), poly.a_s.sqrt());
    let left = (poly.u_s - rs).min(poly.u_n - rn);
    let right = (poly.u_s + rs).max(poly.u_n + rn);
    if poly.coupling == 0.0 {
        return (left, right);
    }
    let mid = poly.midpoint();
    let radius = poly.outer_radius();
    // Past `right + k^{1/4}` both factors exceed `sqrt(k)`, so P >= 0 there.
    let q = poly.coupling.sqrt().sqrt();
    let lo = outer_newton(&poly, left - q, left).unwrap_or_else(|| refine(&poly, mid - radius, left));
    let hi = outer_newton(&poly, right + q, right).unwrap_or_else(|| refine(&poly, right, mid + radius));
    (lo, hi)
}

/// Newton from `start` towards the outermost root beyond `bound`. Beyond the
/// outermost root `P` is positive and, for a hyperbolic state, convex, so
/// the iterates approach the root monotonically. `None` if they do not.
fn outer_newton(poly: &CharPoly, start: f64, bound: f64) -> Option<f64> {
    let side = (start - bound).signum();
    let mut x = start;
    for _ in 0..100 {
        let f = poly.eval(x);
        if f <= 0.0 {
            return (f.abs() <= 1e-12 * poly.scale_at(x)).then_some(x);
        }
        let d = poly.derivative(x);
        if d * side <= 0.0 {
            return None;
        }
        let next = x - f / d;
        if (next - bound) * side <= 0.0 {
            return None;
        }
        if (x - next).abs() <= ROOT_TOL * (1.0 + x.abs()) {
            return Some(next);
        }
        x = next;
    }
    None
}

/// `max |lambda|` over the spectrum.
pub fn spectral_radius(u: &PrimitiveState, p: &ModelParams) -> f64 {
    let (lo, hi) = extremal_eigenvalues(u, p);
    lo.abs().max(hi.abs())
}

fn check_root(poly: &CharPoly, lambda: f64) -> Result<(), HyperbolicityError> {
    let residual = poly.eval(lambda).abs() / poly.scale_at(lambda);
    if residual > 1e-8 {
        return Err(HyperbolicityError::NotAnEigenvalue { lambda, residual });
    }
    Ok(())
}

/// Unnormalized right eigenvector
/// `((l-u_s)^2 - a_s, alpha rho_s, (l-u_n)((l-u_s)^2 - a_s)/rho_n, alpha (l-u_s))`.
pub fn raw_eigenvector(lambda: f64, u: &PrimitiveState, p: &ModelParams) -> Vector4<f64> {
    let a = p.alpha();
    let ds = lambda - u.u_s;
    let b = ds * ds - 0.5 * a * u.rho_s;
    Vector4::new(b, a * u.rho_s, (lambda - u.u_n) * b / u.rho_n, a * ds)
}

/// Right eigenvector of `A(U)` for `lambda`, scaled so that its
/// largest-magnitude entry is `+1`.
pub fn eigenvector(
    lambda: f64,
    u: &PrimitiveState,
    p: &ModelParams,
) -> Result<Vector4<f64>, HyperbolicityError> {
    let poly = char_poly(u, p);
    check_root(&poly, lambda)?;
    let x = raw_eigenvector(lambda, u, p);
    if x[0] == 0.0 && poly.coupling > 0.0 {
        // (l - u_s)^2 = a_s gives P(l) = -coupling, never a root.
        return Err(HyperbolicityError::NotAnEigenvalue { lambda, residual: 1.0 });
    }
    let pivot = x.iter().copied().max_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap_or(1.0);
    Ok(x / pivot)
}

/// `|A X - lambda X| / (|A| |X|)`.
pub fn eigen_residual(lambda: f64, x: &Vector4<f64>, u: &PrimitiveState, p: &ModelParams) -> f64 {
    let a = quasilinear_matrix(u, p);
    (a * x - lambda * x).norm() / (a.norm() * x.norm())
}

/// Gradient of a simple eigenvalue with respect to `(rho_n, rho_s, u_n, u_s)`
/// by implicit differentiation of `P(l; U) = 0`: `grad l = -grad_U P / P'(l)`.
pub fn eigenvalue_gradient(
    lambda: f64,
    u: &PrimitiveState,
    p: &ModelParams,
) -> Result<Vector4<f64>, HyperbolicityError> {
    let poly = char_poly(u, p);
    let dp = poly.derivative(lambda);
    if dp.abs() < 1e-12 * poly.scale_at(lambda) / (1.0 + lambda.abs()) {
        return Err(HyperbolicityError::DegenerateRoot { lambda, derivative: dp });
    }
    Ok(-poly_gradient(lambda, u, p) / dp)
}

/// `grad_U P(lambda; U)` at fixed `lambda`.
fn poly_gradient(lambda: f64, u: &PrimitiveState, p: &ModelParams) -> Vector4<f64> {
    let poly = char_poly(u, p);
    let a = p.alpha();
    let dn = lambda - u.u_n;
    let ds = lambda - u.u_s;
    let n_factor = dn * dn - poly.a_n;
    let s_factor = ds * ds - poly.a_s;
    let da_n = 2.0 / 3.0 * p.c() / u.rho_n.cbrt() + 2.0 * a;
    Vector4::new(
        -da_n * s_factor - a * a * u.rho_s,
        -0.5 * a * n_factor - a * a * u.rho_n,
        -2.0 * dn * s_factor,
        -2.0 * ds * n_factor,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearityReport {
    /// `grad_U lambda . X` with the unnormalized eigenvector.
    pub value: f64,
    /// `(lambda - u_n)^2 > a_n`, which forces `value < 0`.
    pub sign_condition: bool,
    pub certified_nonzero: bool,
}

/// Genuine-nonlinearity coefficient of the characteristic field `lambda`.
///
/// With `X` the unnormalized eigenvector, `grad_U P . X` is a sum of terms
/// each of which is nonpositive when `(lambda - u_n)^2 > a_n` (then also
/// `(lambda - u_s)^2 > a_s` because their product equals the coupling), so
/// the field is certified genuinely nonlinear under that condition.
pub fn genuine_nonlinearity(
    lambda: f64,
    u: &PrimitiveState,
    p: &ModelParams,
) -> Result<NonlinearityReport, HyperbolicityError> {
    let poly = char_poly(u, p);
    let grad = eigenvalue_gradient(lambda, u, p)?;
    let x = raw_eigenvector(lambda, u, p);
    let value = grad.dot(&x);
    let dn = lambda - u.u_n;
    let sign_condition = dn * dn - poly.a_n > 0.0;
    let scale = grad.norm() * x.norm();
    Ok(NonlinearityReport {
        value,
        sign_condition,
        certified_nonzero: sign_condition || value.abs() > 1e-8 * scale,
    })
}
