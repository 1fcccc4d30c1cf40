//! State types for the isentropic two-fluid system and the map between
//! primitive variables `(rho_n, rho_s, u_n, u_s)` and conserved variables
//! `(rho_n, rho_s, m, e)`.
//!
//! The conserved map is two-to-one away from `u_n = u_s`: for a given
//! conserved vector the relative velocity `u_n - u_s` is only determined up
//! to sign. [`Branch`] selects the sign.

use nalgebra::Matrix4;
use thiserror::Error;

/// Densities below this are treated as vacuum by [`to_primitive`].
pub const VACUUM_DENSITY: f64 = 1e-14;

/// Relative width of the band `[-tol * (|e| + m^2 / 2 rho), 0]` in which a
/// negative discriminant is rounded to zero.
pub const DISCRIMINANT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum StateError {
    #[error("conserved vector is outside the image of the primitive map (discriminant {discriminant:e})")]
    NegativeDiscriminant { discriminant: f64 },
    #[error("density is not positive (rho_n = {rho_n:e}, rho_s = {rho_s:e})")]
    NonpositiveDensity { rho_n: f64, rho_s: f64 },
    #[error("invalid model parameters: {0}")]
    InvalidParams(&'static str),
}

/// Model constants. Only `alpha` and `c_tilde` are stored; `c = 5/3 c_tilde`
/// is derived on demand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    alpha: f64,
    c_tilde: f64,
}

impl ModelParams {
    pub fn new(alpha: f64, c_tilde: f64) -> Result<Self, StateError> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(StateError::InvalidParams("alpha must be positive and finite"));
        }
        if !(c_tilde > 0.0 && c_tilde.is_finite()) {
            return Err(StateError::InvalidParams("c_tilde must be positive and finite"));
        }
        Ok(Self { alpha, c_tilde })
    }

    /// Build from `c` instead of `c_tilde`.
    pub fn from_c(alpha: f64, c: f64) -> Result<Self, StateError> {
        Self::new(alpha, 0.6 * c)
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn c_tilde(&self) -> f64 {
        self.c_tilde
    }

    /// `c = (5/3) c_tilde`, the constant appearing in the quasilinear matrix.
    #[inline]
    pub fn c(&self) -> f64 {
        5.0 / 3.0 * self.c_tilde
    }

    /// Normal-fluid pressure `c_tilde rho_n^{5/3}`.
    #[inline]
    pub fn pressure(&self, rho_n: f64) -> f64 {
        self.c_tilde * pow53(rho_n)
    }

    /// Potential part of the energy density,
    /// `3/2 c_tilde rho_n^{5/3} + alpha (rho_n + rho_s/2)^2`.
    #[inline]
    pub fn internal_energy(&self, rho_n: f64, rho_s: f64) -> f64 {
        let r = rho_n + 0.5 * rho_s;
        1.5 * self.c_tilde * pow53(rho_n) + self.alpha * r * r
    }
}

#[inline]
pub(crate) fn pow53(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.cbrt().powi(2)
    }
}

#[inline]
pub(crate) fn pow23(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x.cbrt().powi(2)
    }
}

/// Primitive unknowns of the one-dimensional system.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PrimitiveState {
    pub rho_n: f64,
    pub rho_s: f64,
    pub u_n: f64,
    pub u_s: f64,
}

impl PrimitiveState {
    pub const fn new(rho_n: f64, rho_s: f64, u_n: f64, u_s: f64) -> Self {
        Self { rho_n, rho_s, u_n, u_s }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.rho_n, self.rho_s, self.u_n, self.u_s]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    /// The branch this state lies on. `u_n == u_s` maps to `NormalFaster`;
    /// the conversion ignores the branch on that set anyway.
    pub fn branch(&self) -> Branch {
        if self.u_n < self.u_s {
            Branch::SuperFaster
        } else {
            Branch::NormalFaster
        }
    }

    /// Shift both velocities by `a`.
    pub fn boosted(self, a: f64) -> Self {
        Self { u_n: self.u_n + a, u_s: self.u_s + a, ..self }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Conserved unknowns: densities, total momentum and total energy.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConservedState {
    pub rho_n: f64,
    pub rho_s: f64,
    pub m: f64,
    pub e: f64,
}

impl ConservedState {
    pub const fn new(rho_n: f64, rho_s: f64, m: f64, e: f64) -> Self {
        Self { rho_n, rho_s, m, e }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.rho_n, self.rho_s, self.m, self.e]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }
}

macro_rules! impl_vec4_ops {
    ($t:ty) => {
        impl std::ops::Add for $t {
            type Output = Self;
            fn add(self, o: Self) -> Self {
                let (a, b) = (self.to_array(), o.to_array());
                Self::from_array([a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]])
            }
        }
        impl std::ops::Sub for $t {
            type Output = Self;
            fn sub(self, o: Self) -> Self {
                let (a, b) = (self.to_array(), o.to_array());
                Self::from_array([a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]])
            }
        }
        impl std::ops::Mul<$t> for f64 {
            type Output = $t;
            fn mul(self, u: $t) -> $t {
                let a = u.to_array();
                <$t>::from_array([self * a[0], self * a[1], self * a[2], self * a[3]])
            }
        }
    };
}

impl_vec4_ops!(ConservedState);
impl_vec4_ops!(PrimitiveState);

/// Which of the two open sets the primitive state belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `u_n > u_s`
    NormalFaster,
    /// `u_n < u_s`
    SuperFaster,
}

impl Branch {
    #[inline]
    fn sign(self) -> f64 {
        match self {
            Branch::NormalFaster => 1.0,
            Branch::SuperFaster => -1.0,
        }
    }
}

pub fn to_conserved(u: &PrimitiveState, p: &ModelParams) -> ConservedState {
    let kinetic = 0.5 * u.rho_n * u.u_n * u.u_n + 0.5 * u.rho_s * u.u_s * u.u_s;
    ConservedState {
        rho_n: u.rho_n,
        rho_s: u.rho_s,
        m: u.rho_n * u.u_n + u.rho_s * u.u_s,
        e: kinetic + p.internal_energy(u.rho_n, u.rho_s),
    }
}

/// Invert [`to_conserved`] on the branch `b`.
///
/// Writes the velocities as barycentric velocity `v = m / (rho_n + rho_s)`
/// plus relative velocity `w = u_n - u_s`. The kinetic energy splits as
/// `rho v^2 / 2 + (rho_n rho_s / rho) w^2 / 2`, so `w^2` is read off
/// directly and the branch picks its sign.
pub fn to_primitive(
    w: &ConservedState,
    b: Branch,
    p: &ModelParams,
) -> Result<PrimitiveState, StateError> {
    let (rho_n, rho_s) = (w.rho_n, w.rho_s);
    if !(rho_n >= VACUUM_DENSITY && rho_s >= VACUUM_DENSITY) {
        return Err(StateError::NonpositiveDensity { rho_n, rho_s });
    }
    let rho = rho_n + rho_s;
    let e_kin = w.e - p.internal_energy(rho_n, rho_s);
    let bulk = 0.5 * w.m * w.m / rho;
    let disc = e_kin - bulk;
    let rel = if disc >= 0.0 {
        (2.0 * disc * rho / (rho_n * rho_s)).sqrt()
    } else if disc >= -DISCRIMINANT_TOL * (w.e.abs() + bulk) {
        0.0
    } else {
        return Err(StateError::NegativeDiscriminant { discriminant: disc });
    };
    let rel = b.sign() * rel;
    let v = w.m / rho;
    Ok(PrimitiveState {
        rho_n,
        rho_s,
        u_n: v + rho_s / rho * rel,
        u_s: v - rho_n / rho * rel,
    })
}

/// x-flux of the conservative system.
pub fn flux(u: &PrimitiveState, p: &ModelParams) -> ConservedState {
    let PrimitiveState { rho_n, rho_s, u_n, u_s } = *u;
    let (alpha, c_tilde) = (p.alpha, p.c_tilde);
    let p53 = pow53(rho_n);
    let sum = 2.0 * rho_n + rho_s;
    ConservedState {
        rho_n: rho_n * u_n,
        rho_s: rho_s * u_s,
        m: rho_n * u_n * u_n + rho_s * u_s * u_s + c_tilde * p53 + 0.25 * alpha * sum * sum,
        e: 0.5 * rho_n * u_n.powi(3)
            + 0.5 * rho_s * u_s.powi(3)
            + 2.5 * c_tilde * p53 * u_n
            + alpha * (rho_n + 0.5 * rho_s) * (2.0 * rho_n * u_n + rho_s * u_s),
    }
}

/// Jacobian of [`to_conserved`] with respect to `(rho_n, rho_s, u_n, u_s)`,
/// together with its determinant `rho_n rho_s (u_s - u_n)`.
pub fn jacobian_f(u: &PrimitiveState, p: &ModelParams) -> (Matrix4<f64>, f64) {
    let PrimitiveState { rho_n, rho_s, u_n, u_s } = *u;
    let r = rho_n + 0.5 * rho_s;
    let a = p.alpha;
    #[rustfmt::skip]
    let j = Matrix4::new(
        1.0, 0.0, 0.0, 0.0,
        0.0, 1.0, 0.0, 0.0,
        u_n, u_s, rho_n, rho_s,
        0.5 * u_n * u_n + 2.5 * p.c_tilde * pow23(rho_n) + 2.0 * a * r,
        0.5 * u_s * u_s + a * r,
        rho_n * u_n,
        rho_s * u_s,
    );
    // Block lower-triangular: the determinant is the trailing 2x2 minor.
    let det = rho_n * rho_s * u_s - rho_s * rho_n * u_n;
    (j, det)
}
