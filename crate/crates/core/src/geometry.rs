//! Scaled path lengths and geodesics on flat spacetime.
//!
//! The spacetime is flat; only the number structures vary from point to
//! point. A path `p : [0, 1] -> R^4` therefore has the scaled length
//!
//! ```text
//! L(p)_x = exp(-alpha(x)) * integral_0^1 exp(alpha(p(s))) sqrt(p' h p') ds
//! ```
//!
//! referred to the fiber at `x`; the factor under the integral drags every
//! line element to a common structure before the lengths are added.
//! Stationary paths of the unreferenced integral satisfy
//!
//! ```text
//! dv/dtau = h^{mu nu} A_nu - (A . v) v^mu,      A = grad alpha,
//! ```
//!
//! so with a constant field they are straight lines. Three independent
//! routes to these curves live here: a fixed-step RK4 initial value solver,
//! a shooting method for boundary values, and a direct minimizer of the
//! discretized length functional. The latter two never share intermediate
//! results, which makes them useful as cross-checks of one another.

use crate::arithmetic::ScaledNumber;
use crate::expr::{parse_expr, Expr, ParseError};
use crate::field::{FieldError, FieldSpec, MetricTag, Point};
use crate::scalar::{real, Real};
use thiserror::Error;

/// Variable table for path expressions.
pub const PATH_VAR: [&str; 1] = ["s"];

/// Radicand below this is a domain error; within `[-TOL, 0]` it is rounded
/// up to zero as harmless noise on a null segment.
const SPACELIKE_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("spacelike segment: p' h p' = {radicand:e} for s in [{s_lo}, {s_hi}]")]
    SpacelikeSegment {
        s_lo: f64,
        s_hi: f64,
        radicand: f64,
    },
    #[error("geodesic state became non-finite at tau = {tau}")]
    NonFiniteState { tau: f64 },
    #[error("a path needs at least 2 knots, got {0}")]
    TooFewKnots(usize),
    #[error("knot parameters must strictly increase")]
    NonMonotonicKnots,
    #[error("shooting did not meet the endpoint tolerance within {0} iterations")]
    ShootingFailed(usize),
    #[error("non-finite value in a path computation")]
    NonFinite,
    #[error("invalid parameter: {0}")]
    BadParameter(String),
}

/// Path given by four closed-form coordinate functions of `s`.
#[derive(Debug, Clone)]
pub struct AnalyticPath<T: Real> {
    comps: [Expr<T>; 4],
    vel: [Expr<T>; 4],
}

impl<T: Real> AnalyticPath<T> {
    pub fn new(comps: [Expr<T>; 4]) -> Self {
        let comps = comps.map(|c| c.simplified());
        let vel = [
            comps[0].diff(0).simplified(),
            comps[1].diff(0).simplified(),
            comps[2].diff(0).simplified(),
            comps[3].diff(0).simplified(),
        ];
        AnalyticPath { comps, vel }
    }

    pub fn parse(sources: &[String; 4]) -> Result<Self, ParseError> {
        Ok(Self::new([
            parse_expr(&sources[0], &PATH_VAR)?,
            parse_expr(&sources[1], &PATH_VAR)?,
            parse_expr(&sources[2], &PATH_VAR)?,
            parse_expr(&sources[3], &PATH_VAR)?,
        ]))
    }

    pub fn position(&self, s: T) -> [T; 4] {
        let at = [s];
        [
            self.comps[0].eval(&at),
            self.comps[1].eval(&at),
            self.comps[2].eval(&at),
            self.comps[3].eval(&at),
        ]
    }

    pub fn velocity(&self, s: T) -> [T; 4] {
        let at = [s];
        [
            self.vel[0].eval(&at),
            self.vel[1].eval(&at),
            self.vel[2].eval(&at),
            self.vel[3].eval(&at),
        ]
    }
}

/// Piecewise linear path through knots at strictly increasing parameters.
#[derive(Debug, Clone)]
pub struct Polyline<T: Real> {
    s: Vec<T>,
    pts: Vec<Point<T>>,
}

impl<T: Real> Polyline<T> {
    pub fn new(s: Vec<T>, pts: Vec<Point<T>>) -> Result<Self, GeometryError> {
        if pts.len() < 2 {
            return Err(GeometryError::TooFewKnots(pts.len()));
        }
        if s.len() != pts.len() {
            return Err(GeometryError::BadParameter(format!(
                "{} parameters for {} knots",
                s.len(),
                pts.len()
            )));
        }
        for w in s.windows(2) {
            if !(w[1] > w[0]) {
                return Err(GeometryError::NonMonotonicKnots);
            }
        }
        Ok(Polyline { s, pts })
    }

    /// Knots at evenly spaced parameters on `[0, 1]`.
    pub fn uniform(pts: Vec<Point<T>>) -> Result<Self, GeometryError> {
        if pts.len() < 2 {
            return Err(GeometryError::TooFewKnots(pts.len()));
        }
        let n = pts.len();
        let s = (0..n)
            .map(|i| real::<T>(i as f64) / real((n - 1) as f64))
            .collect();
        Polyline::new(s, pts)
    }

    pub fn knots(&self) -> &[Point<T>] {
        &self.pts
    }

    pub fn params(&self) -> &[T] {
        &self.s
    }

    pub fn segments(&self) -> usize {
        self.pts.len() - 1
    }
}

/// A path for the length functional: closed form or piecewise linear.
#[derive(Debug, Clone)]
pub enum Path<T: Real> {
    Analytic(AnalyticPath<T>),
    Polyline(Polyline<T>),
}

impl<T: Real> Path<T> {
    pub fn start(&self) -> [T; 4] {
        match self {
            Path::Analytic(p) => p.position(T::zero()),
            Path::Polyline(p) => p.pts[0].coords(),
        }
    }

    pub fn end(&self) -> [T; 4] {
        match self {
            Path::Analytic(p) => p.position(T::one()),
            Path::Polyline(p) => p.pts[p.pts.len() - 1].coords(),
        }
    }
}

/// Scaled length of the path, referred to the fiber at `x`.
///
/// `resolution` is the total midpoint-rule sample budget across the
/// parameter range; polyline segments receive at least one sample each. A
/// segment whose radicand drops below `-1e-12` is reported as a domain
/// error with its parameter interval.
pub fn path_length<T: Real>(
    spec: &FieldSpec<T>,
    path: &Path<T>,
    x: &Point<T>,
    metric: MetricTag,
    resolution: usize,
) -> Result<ScaledNumber<T>, GeometryError> {
    if resolution == 0 {
        return Err(GeometryError::BadParameter(
            "resolution must be at least 1".into(),
        ));
    }
    let tol = real::<T>(-SPACELIKE_TOL);
    let mut total = T::zero();
    match path {
        Path::Analytic(p) => {
            let n = resolution;
            let h = T::one() / real(n as f64);
            for j in 0..n {
                let s = (real::<T>(j as f64) + real(0.5)) * h;
                let v = p.velocity(s);
                let q = metric.quad(&v);
                if q < tol {
                    return Err(GeometryError::SpacelikeSegment {
                        s_lo: j as f64 / n as f64,
                        s_hi: (j + 1) as f64 / n as f64,
                        radicand: q.to_f64().unwrap_or(f64::NAN),
                    });
                }
                let pos = Point::new_unchecked(p.position(s));
                total = total + spec.alpha(&pos).exp() * q.max(T::zero()).sqrt() * h;
            }
        }
        Path::Polyline(p) => {
            let span = p.s[p.s.len() - 1] - p.s[0];
            for i in 0..p.segments() {
                let ds = p.s[i + 1] - p.s[i];
                let a = p.pts[i].coords();
                let b = p.pts[i + 1].coords();
                let v = [
                    (b[0] - a[0]) / ds,
                    (b[1] - a[1]) / ds,
                    (b[2] - a[2]) / ds,
                    (b[3] - a[3]) / ds,
                ];
                let q = metric.quad(&v);
                if q < tol {
                    return Err(GeometryError::SpacelikeSegment {
                        s_lo: p.s[i].to_f64().unwrap_or(f64::NAN),
                        s_hi: p.s[i + 1].to_f64().unwrap_or(f64::NAN),
                        radicand: q.to_f64().unwrap_or(f64::NAN),
                    });
                }
                let speed = q.max(T::zero()).sqrt();
                // Distribute the sample budget by parameter share.
                let share = (ds / span).to_f64().unwrap_or(0.0) * resolution as f64;
                let m = (share.round() as usize).max(1);
                let hs = ds / real(m as f64);
                for k in 0..m {
                    let t = (real::<T>(k as f64) + real(0.5)) * hs;
                    let frac = (p.s[i] + t - p.s[i]) / ds; // t / ds
                    let pos = Point::new_unchecked([
                        a[0] + frac * (b[0] - a[0]),
                        a[1] + frac * (b[1] - a[1]),
                        a[2] + frac * (b[2] - a[2]),
                        a[3] + frac * (b[3] - a[3]),
                    ]);
                    total = total + spec.alpha(&pos).exp() * speed * hs;
                }
            }
        }
    }
    if !total.is_finite() {
        return Err(GeometryError::NonFinite);
    }
    let gx = spec.g_checked(x)?;
    let tag = crate::arithmetic::StructureTag::new(gx).expect("g is positive");
    Ok(tag.number(total / gx))
}

/// Geodesic solution: parameters, positions and velocities at the RK4
/// nodes.
#[derive(Debug, Clone)]
pub struct GeodesicTrajectory<T: Real> {
    pub tau: Vec<T>,
    pub positions: Vec<Point<T>>,
    pub velocities: Vec<[T; 4]>,
}

impl<T: Real> GeodesicTrajectory<T> {
    pub fn endpoint(&self) -> Point<T> {
        self.positions[self.positions.len() - 1]
    }

    /// The trajectory as a polyline over `s = tau / tau_max`.
    pub fn to_polyline(&self) -> Polyline<T> {
        let span = self.tau[self.tau.len() - 1] - self.tau[0];
        let s = self
            .tau
            .iter()
            .map(|t| (*t - self.tau[0]) / span)
            .collect();
        Polyline::new(s, self.positions.clone()).expect("trajectory knots are valid")
    }
}

fn geodesic_rhs<T: Real>(
    spec: &FieldSpec<T>,
    metric: MetricTag,
    p: &[T; 4],
    v: &[T; 4],
) -> ([T; 4], [T; 4]) {
    let point = Point::new_unchecked(*p);
    let a = spec.grad_alpha(&point);
    let raised = metric.raise(&a);
    let mut av = T::zero();
    for i in 0..4 {
        av = av + a[i] * v[i];
    }
    let mut acc = [T::zero(); 4];
    for i in 0..4 {
        acc[i] = raised[i] - av * v[i];
    }
    (*v, acc)
}

/// Integrates the geodesic equation from `y0` with initial velocity `v0`
/// over `tau in [0, tau_max]` using fixed-step RK4.
pub fn solve_geodesic<T: Real>(
    spec: &FieldSpec<T>,
    y0: &Point<T>,
    v0: [T; 4],
    tau_max: T,
    steps: usize,
    metric: MetricTag,
) -> Result<GeodesicTrajectory<T>, GeometryError> {
    if steps < 2 {
        return Err(GeometryError::BadParameter(
            "steps must be at least 2".into(),
        ));
    }
    if !(tau_max > T::zero()) || !tau_max.is_finite() {
        return Err(GeometryError::BadParameter(
            "tau must be positive and finite".into(),
        ));
    }
    if v0.iter().any(|c| !c.is_finite()) {
        return Err(GeometryError::BadParameter(
            "initial velocity must be finite".into(),
        ));
    }
    let h = tau_max / real(steps as f64);
    let half = h * real(0.5);
    let sixth = h / real(6.0);
    let mut p = y0.coords();
    let mut v = v0;
    let mut tau = T::zero();

    let mut out = GeodesicTrajectory {
        tau: Vec::with_capacity(steps + 1),
        positions: Vec::with_capacity(steps + 1),
        velocities: Vec::with_capacity(steps + 1),
    };
    out.tau.push(tau);
    out.positions.push(*y0);
    out.velocities.push(v);

    let add = |x: &[T; 4], d: &[T; 4], w: T| {
        [
            x[0] + d[0] * w,
            x[1] + d[1] * w,
            x[2] + d[2] * w,
            x[3] + d[3] * w,
        ]
    };
    for k in 0..steps {
        let (k1p, k1v) = geodesic_rhs(spec, metric, &p, &v);
        let (k2p, k2v) = geodesic_rhs(spec, metric, &add(&p, &k1p, half), &add(&v, &k1v, half));
        let (k3p, k3v) = geodesic_rhs(spec, metric, &add(&p, &k2p, half), &add(&v, &k2v, half));
        let (k4p, k4v) = geodesic_rhs(spec, metric, &add(&p, &k3p, h), &add(&v, &k3v, h));
        for i in 0..4 {
            p[i] = p[i] + (k1p[i] + (k2p[i] + k3p[i]) * real(2.0) + k4p[i]) * sixth;
            v[i] = v[i] + (k1v[i] + (k2v[i] + k3v[i]) * real(2.0) + k4v[i]) * sixth;
        }
        tau = tau + h;
        let finite = p.iter().all(|c| c.is_finite()) && v.iter().all(|c| c.is_finite());
        if !finite {
            return Err(GeometryError::NonFiniteState {
                tau: tau.to_f64().unwrap_or(f64::NAN),
            });
        }
        out.tau.push(tau);
        out.positions.push(Point::new_unchecked(p));
        out.velocities.push(v);
        let _ = k;
    }
    Ok(out)
}

/// Gaussian elimination with partial pivoting for the 4x4 Newton systems.
fn solve4<T: Real>(mut m: [[T; 4]; 4], mut rhs: [T; 4]) -> Option<[T; 4]> {
    for col in 0..4 {
        let mut pivot = col;
        for row in col + 1..4 {
            if m[row][col].abs() > m[pivot][col].abs() {
                pivot = row;
            }
        }
        if m[pivot][col].abs() < real(1e-300) {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..4 {
            let f = m[row][col] / m[col][col];
            for k in col..4 {
                m[row][k] = m[row][k] - f * m[col][k];
            }
            rhs[row] = rhs[row] - f * rhs[col];
        }
    }
    let mut x = [T::zero(); 4];
    for col in (0..4).rev() {
        let mut acc = rhs[col];
        for k in col + 1..4 {
            acc = acc - m[col][k] * x[k];
        }
        x[col] = acc / m[col][col];
    }
    if x.iter().all(|c| c.is_finite()) {
        Some(x)
    } else {
        None
    }
}

/// Finds the geodesic from `y` to `z` by Newton iteration on the initial
/// velocity (damped, finite-difference Jacobian). The returned trajectory
/// reaches `z` at `tau = 1` within `tol` in the maximum norm.
pub fn shoot_geodesic<T: Real>(
    spec: &FieldSpec<T>,
    y: &Point<T>,
    z: &Point<T>,
    metric: MetricTag,
    steps: usize,
    tol: T,
    max_iter: usize,
) -> Result<GeodesicTrajectory<T>, GeometryError> {
    if !(tol > T::zero()) {
        return Err(GeometryError::BadParameter("tol must be positive".into()));
    }
    let target = z.coords();
    let start = y.coords();
    let mut v = [
        target[0] - start[0],
        target[1] - start[1],
        target[2] - start[2],
        target[3] - start[3],
    ];
    let residual = |v: &[T; 4]| -> Result<([T; 4], T), GeometryError> {
        let traj = solve_geodesic(spec, y, *v, T::one(), steps, metric)?;
        let e = traj.endpoint().coords();
        let g = [
            e[0] - target[0],
            e[1] - target[1],
            e[2] - target[2],
            e[3] - target[3],
        ];
        let norm = g
            .iter()
            .fold(T::zero(), |acc, c| acc.max(c.abs()));
        Ok((g, norm))
    };

    let (mut g, mut gnorm) = residual(&v)?;
    for _ in 0..max_iter {
        if gnorm <= tol {
            return solve_geodesic(spec, y, v, T::one(), steps, metric);
        }
        // Forward-difference Jacobian, one extra flow per column.
        let mut jac = [[T::zero(); 4]; 4];
        for j in 0..4 {
            let delta = real::<T>(1e-6) * (T::one() + v[j].abs());
            let mut vj = v;
            vj[j] = vj[j] + delta;
            let (gj, _) = residual(&vj)?;
            for i in 0..4 {
                jac[i][j] = (gj[i] - g[i]) / delta;
            }
        }
        let rhs = [-g[0], -g[1], -g[2], -g[3]];
        let step = solve4(jac, rhs).ok_or(GeometryError::ShootingFailed(max_iter))?;
        // Damped update: halve until the residual decreases.
        let mut lambda = T::one();
        let mut accepted = false;
        for _ in 0..30 {
            let trial = [
                v[0] + step[0] * lambda,
                v[1] + step[1] * lambda,
                v[2] + step[2] * lambda,
                v[3] + step[3] * lambda,
            ];
            match residual(&trial) {
                Ok((gt, nt)) if nt < gnorm => {
                    v = trial;
                    g = gt;
                    gnorm = nt;
                    accepted = true;
                    break;
                }
                _ => lambda = lambda * real(0.5),
            }
        }
        if !accepted {
            return Err(GeometryError::ShootingFailed(max_iter));
        }
    }
    if gnorm <= tol {
        solve_geodesic(spec, y, v, T::one(), steps, metric)
    } else {
        Err(GeometryError::ShootingFailed(max_iter))
    }
}

/// Result of the direct minimization of the discrete length functional.
#[derive(Debug, Clone)]
pub struct MinimizeOutcome<T: Real> {
    pub path: Polyline<T>,
    /// Final value of the discrete unreferenced length integral.
    pub energy: T,
    pub converged: bool,
    pub iterations: usize,
}

/// Discrete length `sum_i exp(alpha(midpoint_i)) * |delta_i|_h`; `None`
/// when a segment is spacelike beyond tolerance or the value is not finite.
fn discrete_energy<T: Real>(
    spec: &FieldSpec<T>,
    metric: MetricTag,
    knots: &[[T; 4]],
) -> Option<T> {
    let tol = real::<T>(-SPACELIKE_TOL);
    let mut total = T::zero();
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let d = [b[0] - a[0], b[1] - a[1], b[2] - a[2], b[3] - a[3]];
        let q = metric.quad(&d);
        if q < tol {
            return None;
        }
        let mid = Point::new_unchecked([
            (a[0] + b[0]) * real(0.5),
            (a[1] + b[1]) * real(0.5),
            (a[2] + b[2]) * real(0.5),
            (a[3] + b[3]) * real(0.5),
        ]);
        total = total + spec.alpha(&mid).exp() * q.max(T::zero()).sqrt();
    }
    if total.is_finite() {
        Some(total)
    } else {
        None
    }
}

/// Analytic gradient of [`discrete_energy`] with respect to the interior
/// knots. Collapsed segments contribute no direction (subgradient choice).
fn energy_gradient<T: Real>(
    spec: &FieldSpec<T>,
    metric: MetricTag,
    knots: &[[T; 4]],
    grad: &mut [[T; 4]],
) {
    let n = knots.len();
    for g in grad.iter_mut() {
        *g = [T::zero(); 4];
    }
    let half = real::<T>(0.5);
    for i in 0..n - 1 {
        let (a, b) = (knots[i], knots[i + 1]);
        let d = [b[0] - a[0], b[1] - a[1], b[2] - a[2], b[3] - a[3]];
        let q = metric.quad(&d).max(T::zero());
        let len = q.sqrt();
        let mid = Point::new_unchecked([
            (a[0] + b[0]) * half,
            (a[1] + b[1]) * half,
            (a[2] + b[2]) * half,
            (a[3] + b[3]) * half,
        ]);
        let weight = spec.alpha(&mid).exp();
        let a_mid = spec.grad_alpha(&mid);
        let lowered = metric.lower(&d);
        for k in 0..4 {
            // d(weight)/d(knot) through the midpoint, same for both ends.
            let w_term = weight * a_mid[k] * len * half;
            // d(len)/d(knot): +lowered/len at the right end, - at the left.
            let l_term = if len > real(1e-300) {
                weight * lowered[k] / len
            } else {
                T::zero()
            };
            if i > 0 {
                grad[i - 1][k] = grad[i - 1][k] + w_term - l_term;
            }
            if i + 1 < n - 1 {
                grad[i][k] = grad[i][k] + w_term + l_term;
            }
        }
    }
}

/// Minimizes the discrete length functional over paths from `y` to `z`
/// with `interior_knots` movable knots, by gradient descent with a
/// backtracking line search from the straight-line seed. Deterministic.
///
/// Non-convergence within `max_iter` returns the best iterate with
/// `converged = false` rather than an error.
pub fn minimize_path<T: Real>(
    spec: &FieldSpec<T>,
    y: &Point<T>,
    z: &Point<T>,
    metric: MetricTag,
    interior_knots: usize,
    max_iter: usize,
) -> Result<MinimizeOutcome<T>, GeometryError> {
    if interior_knots < 3 {
        return Err(GeometryError::BadParameter(
            "at least 3 interior knots are required".into(),
        ));
    }
    let n = interior_knots + 2;
    let a = y.coords();
    let b = z.coords();
    let mut knots: Vec<[T; 4]> = (0..n)
        .map(|k| {
            let t = real::<T>(k as f64) / real((n - 1) as f64);
            [
                a[0] + t * (b[0] - a[0]),
                a[1] + t * (b[1] - a[1]),
                a[2] + t * (b[2] - a[2]),
                a[3] + t * (b[3] - a[3]),
            ]
        })
        .collect();

    let mut energy = discrete_energy(spec, metric, &knots).ok_or_else(|| {
        GeometryError::SpacelikeSegment {
            s_lo: 0.0,
            s_hi: 1.0,
            radicand: metric
                .quad(&[b[0] - a[0], b[1] - a[1], b[2] - a[2], b[3] - a[3]])
                .to_f64()
                .unwrap_or(f64::NAN),
        }
    })?;

    let grad_tol = real::<T>(1e-9);
    let mut grad = vec![[T::zero(); 4]; interior_knots];
    let mut step = real::<T>(0.1);
    let mut converged = false;
    let mut iterations = 0usize;
    let mut trial = knots.clone();
    for it in 0..max_iter {
        iterations = it + 1;
        energy_gradient(spec, metric, &knots, &mut grad);
        let gmax = grad
            .iter()
            .flatten()
            .fold(T::zero(), |acc, c| acc.max(c.abs()));
        if gmax < grad_tol {
            converged = true;
            break;
        }
        // One descent trial per iteration; shrink on failure, grow gently
        // on success so the search adapts to the local scale.
        for (t, (k, g)) in trial[1..n - 1]
            .iter_mut()
            .zip(knots[1..n - 1].iter().zip(grad.iter()))
        {
            for c in 0..4 {
                t[c] = k[c] - step * g[c];
            }
        }
        match discrete_energy(spec, metric, &trial) {
            Some(e) if e < energy => {
                for (k, t) in knots[1..n - 1].iter_mut().zip(&trial[1..n - 1]) {
                    *k = *t;
                }
                energy = e;
                step = step * real(1.1);
            }
            _ => {
                step = step * real(0.5);
                if step < real(1e-16) {
                    break;
                }
            }
        }
    }

    let pts = knots
        .into_iter()
        .map(|c| Point::new(c).map_err(GeometryError::Field))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MinimizeOutcome {
        path: Polyline::uniform(pts)?,
        energy,
        converged,
        iterations,
    })
}
