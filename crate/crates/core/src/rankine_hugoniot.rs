//! Rankine-Hugoniot conditions and shock curves.
//!
//! In the frame of the shock (`w = u - sigma`) the jump conditions read
//! `J(U+, sigma) = J(U-, sigma)` with
//!
//! ```text
//! J1 = rho_n w_n
//! J2 = rho_s w_s
//! J3 = rho_n w_n^2 + rho_s w_s^2 + c~ rho_n^{5/3} + alpha/4 (2 rho_n + rho_s)^2
//! J4 = 1/2 rho_n w_n^3 + 1/2 rho_s w_s^3 + 5/2 c~ rho_n^{5/3} w_n
//!      + alpha/2 (2 rho_n + rho_s)(2 rho_n w_n + rho_s w_s)
//! ```
//!
//! `J(U, sigma)` is a triangular recombination of `H(U) - sigma F(U)`, so the
//! two forms have the same zero set.
//!
//! `D_U J(U-, sigma) = D_U F (A - sigma)` is singular exactly when `sigma` is
//! an eigenvalue of `A(U-)`. Away from those speeds the only nearby solution
//! is `U+ = U-`; nontrivial shock branches bifurcate from the trivial one at
//! `sigma = lambda_k(U-)`. Curves are therefore seeded at such a speed and
//! continued in `sigma` by Newton's method.

use nalgebra::{Matrix4, Vector4};
use thiserror::Error;

use crate::entropy::{entropy_e, entropy_g, shock_entropy_dissipation};
use crate::hyperbolicity::{eigenvalue_gradient, eigenvalues, eigenvector, HyperbolicityError};
use crate::state::{flux, pow23, pow53, to_conserved, ModelParams, PrimitiveState};

/// Default Newton tolerance on `|J(U+) - J(U-)|`, relative to `1 + |J(U-)|`.
pub const CURVE_TOL: f64 = 1e-10;
const MAX_NEWTON_ITERS: usize = 50;
const MAX_HALVINGS: usize = 8;
const MIN_DENSITY: f64 = 1e-10;
const MAX_SUBSTEP_HALVINGS: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum RhError {
    #[error("density is not positive (rho_n = {rho_n:e}, rho_s = {rho_s:e})")]
    NonpositiveDensity { rho_n: f64, rho_s: f64 },
    #[error("sigma0 = {sigma0} is not a characteristic speed of the left state (nearest eigenvalue {nearest}); only the trivial solution exists nearby")]
    NoShockBranch { sigma0: f64, nearest: f64 },
    #[error("seed eigenvalue {lambda} is not simple or the spectrum is not certified")]
    SeedJacobianSingular { lambda: f64 },
    #[error("n_steps and sigma_span must be positive")]
    InvalidRequest,
    #[error(transparent)]
    Spectrum(#[from] HyperbolicityError),
}

/// `H(U+) - H(U-) - sigma (F(U+) - F(U-))`.
pub fn rh_residual(
    u_minus: &PrimitiveState,
    u_plus: &PrimitiveState,
    sigma: f64,
    p: &ModelParams,
) -> [f64; 4] {
    let dh = (flux(u_plus, p) - flux(u_minus, p)).to_array();
    let df = (to_conserved(u_plus, p) - to_conserved(u_minus, p)).to_array();
    [0, 1, 2, 3].map(|i| dh[i] - sigma * df[i])
}

/// Jump relations written with the mass fluxes `M = rho w` of the left
/// state and specific volumes `tau = 1 / rho`:
///
/// ```text
/// [rho_n w_n], [rho_s w_s],
/// M_n^2 [tau_n] + M_s^2 [tau_s] + c~ [rho_n^{5/3}] + alpha/4 [(2 rho_n + rho_s)^2],
/// M_n^3 [tau_n^2] + M_s^3 [tau_s^2] + 5 c~ M_n [rho_n^{2/3}] + alpha (2 M_n + M_s) [2 rho_n + rho_s]
/// ```
pub fn rh_reduced_residual(
    u_minus: &PrimitiveState,
    u_plus: &PrimitiveState,
    sigma: f64,
    p: &ModelParams,
) -> Result<[f64; 4], RhError> {
    for u in [u_minus, u_plus] {
        if !(u.rho_n > 0.0 && u.rho_s > 0.0) {
            return Err(RhError::NonpositiveDensity { rho_n: u.rho_n, rho_s: u.rho_s });
        }
    }
    let (a, ct) = (p.alpha(), p.c_tilde());
    let mass_n = u_minus.rho_n * (u_minus.u_n - sigma);
    let mass_s = u_minus.rho_s * (u_minus.u_s - sigma);
    let jump = |f: &dyn Fn(&PrimitiveState) -> f64| f(u_plus) - f(u_minus);
    let d_tau_n = jump(&|u| 1.0 / u.rho_n);
    let d_tau_s = jump(&|u| 1.0 / u.rho_s);
    let d_tau_n2 = jump(&|u| 1.0 / (u.rho_n * u.rho_n));
    let d_tau_s2 = jump(&|u| 1.0 / (u.rho_s * u.rho_s));
    let d_p53 = jump(&|u| pow53(u.rho_n));
    let d_p23 = jump(&|u| pow23(u.rho_n));
    let d_sum = jump(&|u| 2.0 * u.rho_n + u.rho_s);
    let d_sum2 = jump(&|u| (2.0 * u.rho_n + u.rho_s).powi(2));
    Ok([
        jump(&|u| u.rho_n * (u.u_n - sigma)),
        jump(&|u| u.rho_s * (u.u_s - sigma)),
        mass_n * mass_n * d_tau_n + mass_s * mass_s * d_tau_s + ct * d_p53 + 0.25 * a * d_sum2,
        mass_n.powi(3) * d_tau_n2
            + mass_s.powi(3) * d_tau_s2
            + 5.0 * ct * mass_n * d_p23
            + a * (2.0 * mass_n + mass_s) * d_sum,
    ])
}

/// The comoving jump function `J(U, sigma)`.
pub fn jump_function(u: &PrimitiveState, sigma: f64, p: &ModelParams) -> Vector4<f64> {
    let (a, ct) = (p.alpha(), p.c_tilde());
    let wn = u.u_n - sigma;
    let ws = u.u_s - sigma;
    let sum = 2.0 * u.rho_n + u.rho_s;
    let p53 = pow53(u.rho_n);
    Vector4::new(
        u.rho_n * wn,
        u.rho_s * ws,
        u.rho_n * wn * wn + u.rho_s * ws * ws + ct * p53 + 0.25 * a * sum * sum,
        0.5 * u.rho_n * wn.powi(3)
            + 0.5 * u.rho_s * ws.powi(3)
            + 2.5 * ct * p53 * wn
            + 0.5 * a * sum * (2.0 * u.rho_n * wn + u.rho_s * ws),
    )
}

/// `D_U J(U, sigma)` with `U = (rho_n, rho_s, u_n, u_s)`.
pub fn jacobian_j(u: &PrimitiveState, sigma: f64, p: &ModelParams) -> Matrix4<f64> {
    let (a, ct) = (p.alpha(), p.c_tilde());
    let PrimitiveState { rho_n, rho_s, .. } = *u;
    let wn = u.u_n - sigma;
    let ws = u.u_s - sigma;
    let sum = 2.0 * rho_n + rho_s;
    let q = 2.0 * rho_n * wn + rho_s * ws;
    let r23 = pow23(rho_n);
    let r53 = pow53(rho_n);
    #[rustfmt::skip]
    let m = Matrix4::new(
        wn, 0.0, rho_n, 0.0,
        0.0, ws, 0.0, rho_s,
        wn * wn + 5.0 / 3.0 * ct * r23 + a * sum,
        ws * ws + 0.5 * a * sum,
        2.0 * rho_n * wn,
        2.0 * rho_s * ws,
        0.5 * wn.powi(3) + 25.0 / 6.0 * ct * r23 * wn + a * q + a * sum * wn,
        0.5 * ws.powi(3) + 0.5 * a * (q + sum * ws),
        1.5 * rho_n * wn * wn + 2.5 * ct * r53 + a * sum * rho_n,
        1.5 * rho_s * ws * ws + 0.5 * a * sum * rho_s,
    );
    m
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShockPoint {
    pub sigma: f64,
    pub u_plus: PrimitiveState,
    pub residual_norm: f64,
    pub dissipation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    IncreasingSigma,
    DecreasingSigma,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::IncreasingSigma => 1.0,
            Direction::DecreasingSigma => -1.0,
        }
    }
}

/// Why continuation stopped before the requested span.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    NewtonFailed { sigma: f64 },
    DensityLoss { sigma: f64 },
    CollapsedToTrivial { sigma: f64 },
    /// The curve turns back in `sigma` where `sigma` becomes a characteristic
    /// speed of `U+` (a sonic shock); `sigma` is the last speed reached.
    SonicFold { sigma: f64 },
    /// The curve reaches `u_n = u_s`, where the map to conserved variables
    /// degenerates and `det D_U J = j_F P_A(sigma)` vanishes.
    BranchSwitch { sigma: f64 },
}

fn near_branch_switch(u: &PrimitiveState) -> bool {
    (u.u_n - u.u_s).abs() < 1e-2 * (1.0 + u.u_n.abs() + u.u_s.abs())
}

fn is_sonic(sigma: f64, u_plus: &PrimitiveState, p: &ModelParams) -> bool {
    eigenvalues(u_plus, p)
        .lambdas
        .iter()
        .any(|l| (l - sigma).abs() < 1e-2 * (1.0 + sigma.abs()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShockCurve {
    pub u_minus: PrimitiveState,
    pub sigma0: f64,
    /// Characteristic family (1-based) the curve bifurcates from.
    pub family: usize,
    pub direction: Direction,
    pub points: Vec<ShockPoint>,
    /// 2-norm condition number of `D_U J(U-, sigma0)`; very large at a
    /// bifurcation point.
    pub seed_condition: f64,
    pub truncated: Option<Truncation>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOptions {
    /// Amplitude of the first predictor when the bifurcation tangent is
    /// degenerate (linearly degenerate field).
    pub kick: f64,
    pub tol: f64,
    /// Seed speed must lie within this distance (relative to `1 + |sigma0|`)
    /// of an eigenvalue of the left state.
    pub branch_tol: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self { kick: 1e-3, tol: CURVE_TOL, branch_tol: 1e-8 }
    }
}

fn residual_scale(u_minus: &PrimitiveState, sigma: f64, p: &ModelParams) -> f64 {
    1.0 + jump_function(u_minus, sigma, p).norm()
}

enum NewtonOutcome {
    Converged(PrimitiveState, f64),
    Failed,
    DensityLoss,
}

fn newton_solve(
    target: &Vector4<f64>,
    start: PrimitiveState,
    sigma: f64,
    p: &ModelParams,
    tol: f64,
) -> NewtonOutcome {
    let residual = |u: &PrimitiveState| jump_function(u, sigma, p) - target;
    let mut u = start;
    let mut r = residual(&u);
    for _ in 0..MAX_NEWTON_ITERS {
        let norm = r.norm();
        if norm <= tol {
            let (u, norm) = polish(u, norm, sigma, target, p);
            return NewtonOutcome::Converged(u, norm);
        }
        let Some(step) = jacobian_j(&u, sigma, p).lu().solve(&r) else {
            return NewtonOutcome::Failed;
        };
        let base = Vector4::from(u.to_array());
        let mut damping = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial = PrimitiveState::from_array((base - damping * step).into());
            if trial.rho_n > MIN_DENSITY && trial.rho_s > MIN_DENSITY {
                let tr = residual(&trial);
                if tr.norm() < norm {
                    accepted = Some((trial, tr));
                    break;
                }
            }
            damping *= 0.5;
        }
        match accepted {
            Some((trial, tr)) => {
                u = trial;
                r = tr;
            }
            None if u.rho_n <= MIN_DENSITY || u.rho_s <= MIN_DENSITY => {
                return NewtonOutcome::DensityLoss
            }
            None => return NewtonOutcome::Failed,
        }
    }
    let norm = r.norm();
    if norm <= tol {
        let (u, norm) = polish(u, norm, sigma, target, p);
        NewtonOutcome::Converged(u, norm)
    } else {
        NewtonOutcome::Failed
    }
}

/// One extra Newton step, kept only if it is small and lowers the residual.
fn polish(
    u: PrimitiveState,
    norm: f64,
    sigma: f64,
    target: &Vector4<f64>,
    p: &ModelParams,
) -> (PrimitiveState, f64) {
    let r = jump_function(&u, sigma, p) - target;
    let Some(step) = jacobian_j(&u, sigma, p).lu().solve(&r) else {
        return (u, norm);
    };
    let x = Vector4::from(u.to_array());
    if step.norm() > 1e-6 * (1.0 + x.norm()) {
        return (u, norm);
    }
    let next = PrimitiveState::from_array((x - step).into());
    let next_norm = (jump_function(&next, sigma, p) - target).norm();
    if next_norm < norm && next.rho_n > MIN_DENSITY && next.rho_s > MIN_DENSITY {
        (next, next_norm)
    } else {
        (u, norm)
    }
}

fn point(u_minus: &PrimitiveState, u_plus: PrimitiveState, sigma: f64, residual_norm: f64, p: &ModelParams) -> ShockPoint {
    ShockPoint {
        sigma,
        u_plus,
        residual_norm,
        dissipation: shock_entropy_dissipation(u_minus, &u_plus, sigma, p),
    }
}

/// Trace the shock curve through `(U-, sigma0)`, where `sigma0` is a simple
/// eigenvalue of `A(U-)`, at speeds `sigma0 +- k sigma_span / n_steps`.
///
/// The first point is the trivial solution. The first nontrivial predictor
/// follows the bifurcation tangent `U- + s r`, `s = 2 (sigma - lambda) /
/// (grad lambda . r)`; later predictors extrapolate linearly from the last
/// two points. A failed step is retried with successively halved substeps.
/// Continuation stops at a sonic fold, at `u_n = u_s`, at an unrecoverable Newton failure,
/// loss of positivity, or collapse onto the trivial branch, and records why.
pub fn trace_shock_curve(
    u_minus: &PrimitiveState,
    sigma0: f64,
    sigma_span: f64,
    n_steps: usize,
    direction: Direction,
    p: &ModelParams,
    opts: &TraceOptions,
) -> Result<ShockCurve, RhError> {
    if n_steps == 0 || !(sigma_span > 0.0) {
        return Err(RhError::InvalidRequest);
    }
    if !(u_minus.rho_n > 0.0 && u_minus.rho_s > 0.0) {
        return Err(RhError::NonpositiveDensity { rho_n: u_minus.rho_n, rho_s: u_minus.rho_s });
    }
    let spectrum = eigenvalues(u_minus, p);
    let (family_idx, lambda) = spectrum
        .lambdas
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| (a.1 - sigma0).abs().total_cmp(&(b.1 - sigma0).abs()))
        .expect("four eigenvalues");
    if (lambda - sigma0).abs() > opts.branch_tol * (1.0 + sigma0.abs()) {
        return Err(RhError::NoShockBranch { sigma0, nearest: lambda });
    }
    if !spectrum.certified {
        return Err(RhError::SeedJacobianSingular { lambda });
    }
    let r = eigenvector(lambda, u_minus, p)?;
    let g = eigenvalue_gradient(lambda, u_minus, p)?.dot(&r);
    let seed_condition = {
        let svd = jacobian_j(u_minus, sigma0, p).svd(false, false);
        let s = svd.singular_values;
        s.max() / s.min()
    };

    let mut curve = ShockCurve {
        u_minus: *u_minus,
        sigma0,
        family: family_idx + 1,
        direction,
        points: vec![point(u_minus, *u_minus, sigma0, 0.0, p)],
        seed_condition,
        truncated: None,
    };

    let h = direction.sign() * sigma_span / n_steps as f64;
    let base = Vector4::from(u_minus.to_array());
    // Converged (sigma, U+) pairs including unrecorded substeps, used for
    // the secant predictor.
    let mut trail: Vec<(f64, PrimitiveState)> = vec![(sigma0, *u_minus)];
    'grid: for k in 1..=n_steps {
        let sigma_k = sigma0 + k as f64 * h;
        let mut halvings = 0;
        while trail.last().map(|t| t.0) != Some(sigma_k) {
            let (sigma_last, u_last) = *trail.last().expect("nonempty");
            let step = h / (1u32 << halvings) as f64;
            let sigma = if (sigma_k - sigma_last).abs() <= step.abs() * (1.0 + 1e-6) {
                sigma_k
            } else {
                sigma_last + step
            };
            let predictor = if trail.len() == 1 {
                let s = if g.abs() > 1e-10 {
                    2.0 * (sigma - lambda) / g
                } else {
                    opts.kick * direction.sign()
                };
                PrimitiveState::from_array((base + s * r).into())
            } else {
                let (sigma_prev, u_prev) = trail[trail.len() - 2];
                let t = (sigma - sigma_last) / (sigma_last - sigma_prev);
                u_last + t * (u_last - u_prev)
            };
            let target = jump_function(u_minus, sigma, p);
            let tol = opts.tol * residual_scale(u_minus, sigma, p);
            let failure = match newton_solve(&target, predictor, sigma, p, tol) {
                NewtonOutcome::Converged(u_plus, res) => {
                    // A corrector that drifts back toward U- has found the
                    // trivial branch.
                    let lift = predictor.max_abs_diff(u_minus);
                    if u_plus.max_abs_diff(&predictor) <= 0.5 * lift {
                        trail.push((sigma, u_plus));
                        if sigma == sigma_k {
                            curve.points.push(point(u_minus, u_plus, sigma, res, p));
                        }
                        continue;
                    }
                    Truncation::CollapsedToTrivial { sigma }
                }
                NewtonOutcome::DensityLoss => Truncation::DensityLoss { sigma },
                NewtonOutcome::Failed => Truncation::NewtonFailed { sigma },
            };
            halvings += 1;
            if halvings > MAX_SUBSTEP_HALVINGS || trail.len() == 1 {
                curve.truncated = Some(match failure {
                    Truncation::NewtonFailed { .. } if is_sonic(sigma_last, &u_last, p) => {
                        Truncation::SonicFold { sigma: sigma_last }
                    }
                    Truncation::NewtonFailed { .. } if near_branch_switch(&u_last) => {
                        Truncation::BranchSwitch { sigma: sigma_last }
                    }
                    other => other,
                });
                break 'grid;
            }
        }
    }
    Ok(curve)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShockClassification {
    /// 1-based family `k` with `lambda_k(U+) <= sigma <= lambda_k(U-)`, if
    /// exactly one family qualifies.
    pub family: Option<usize>,
    pub lax_ok: bool,
    pub dissipation_ok: bool,
}

const LAX_SLACK: f64 = 1e-8;

pub fn classify_shock(pt: &ShockPoint, u_minus: &PrimitiveState, p: &ModelParams) -> ShockClassification {
    let left = eigenvalues(u_minus, p).lambdas;
    let right = eigenvalues(&pt.u_plus, p).lambdas;
    let sigma = pt.sigma;
    let matches: Vec<usize> = (0..4)
        .filter(|&k| right[k] <= sigma + LAX_SLACK && sigma <= left[k] + LAX_SLACK)
        .collect();
    let family = if matches.len() == 1 { Some(matches[0] + 1) } else { None };
    let scale = sigma.abs() * (entropy_e(&pt.u_plus, p).abs() + entropy_e(u_minus, p).abs())
        + entropy_g(&pt.u_plus, p).abs()
        + entropy_g(u_minus, p).abs();
    ShockClassification {
        family,
        lax_ok: family.is_some(),
        dissipation_ok: pt.dissipation >= -1e-12 * scale,
    }
}
