//! Numerics for one-dimensional special Lagrangians of a quadratic
//! differential `Θ = p(z) dz²`, their periods, and the hypersurface
//! model `z² = u² − ε q(v)`.
//!
//! Leaves of phase `φ` solve `ż = e^{iφ} / √p(z)`, so `p ż² = e^{2iφ}`.
//!
//! ```
//! use syz::slag_numeric::{trace_leaf, QuadDifferential};
//! let theta = QuadDifferential::new(vec![[1.0, 0.0]], vec![[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]], std::f64::consts::FRAC_PI_2).unwrap();
//! let leaf = trace_leaf(&theta, [2.0, 0.0], 0.01, 10_000).unwrap();
//! assert!(leaf.closed);
//! ```

use std::f64::consts::{PI, TAU};

use num::complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CLOSE_TOL: f64 = 1e-6;
pub const ROOT_SEPARATION: f64 = 1e-10;

fn c(v: [f64; 2]) -> C {
    C::new(v[0], v[1])
}

fn arr(z: C) -> [f64; 2] {
    [z.re, z.im]
}

/// Coefficients in increasing degree.
pub fn poly_eval(coeffs: &[C], z: C) -> C {
    coeffs.iter().rev().fold(C::new(0.0, 0.0), |acc, a| acc * z + a)
}

fn poly_deriv(coeffs: &[C]) -> Vec<C> {
    coeffs.iter().enumerate().skip(1).map(|(k, a)| a * k as f64).collect()
}

fn trim(coeffs: &[C]) -> Vec<C> {
    let mut v = coeffs.to_vec();
    while v.len() > 1 && v.last().is_some_and(|a| a.norm() == 0.0) {
        v.pop();
    }
    v
}

/// All complex roots by Durand-Kerner iteration, polished by Newton.
pub fn poly_roots(coeffs: &[C]) -> Vec<C> {
    let p = trim(coeffs);
    let n = p.len() - 1;
    if n == 0 {
        return vec![];
    }
    let lead = p[n];
    let monic: Vec<C> = p.iter().map(|a| a / lead).collect();
    let bound = 1.0 + monic[..n].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let mut z: Vec<C> = (0..n).map(|k| C::from_polar(bound * 0.9, 0.4 + TAU * k as f64 / n as f64)).collect();
    for _ in 0..2000 {
        let mut delta: f64 = 0.0;
        for i in 0..n {
            let mut den = C::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            if den.norm() == 0.0 {
                den = C::new(1e-14, 0.0);
            }
            let step = poly_eval(&monic, z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    let d = poly_deriv(&monic);
    for r in z.iter_mut() {
        for _ in 0..3 {
            let dp = poly_eval(&d, *r);
            if dp.norm() < 1e-300 {
                break;
            }
            let s = poly_eval(&monic, *r) / dp;
            if !s.re.is_finite() || !s.im.is_finite() {
                break;
            }
            *r -= s;
        }
    }
    z
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadDifferential {
    #[serde(rename = "p_num")]
    pub numerator: Vec<[f64; 2]>,
    #[serde(rename = "p_den")]
    pub denominator: Vec<[f64; 2]>,
    pub phase: f64,
}

impl QuadDifferential {
    pub fn new(numerator: Vec<[f64; 2]>, denominator: Vec<[f64; 2]>, phase: f64) -> Result<Self> {
        let q = QuadDifferential { numerator, denominator, phase };
        q.validate()?;
        Ok(q)
    }

    /// `1/z²`
    pub fn log_circle(phase: f64) -> Self {
        QuadDifferential { numerator: vec![[1.0, 0.0]], denominator: vec![[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]], phase }
    }

    /// `1/(z² − a²)`
    pub fn ellipse(a: f64, phase: f64) -> Self {
        QuadDifferential { numerator: vec![[1.0, 0.0]], denominator: vec![[-a * a, 0.0], [0.0, 0.0], [1.0, 0.0]], phase }
    }

    /// `z² / ((z−a)(z−b)(z−c)(z−d))`
    pub fn four_pole(r: [f64; 4], phase: f64) -> Self {
        let mut den = vec![C::new(1.0, 0.0)];
        for x in r {
            let mut next = vec![C::new(0.0, 0.0); den.len() + 1];
            for (k, a) in den.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= a * x;
            }
            den = next;
        }
        QuadDifferential { numerator: vec![[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]], denominator: den.into_iter().map(arr).collect(), phase }
    }

    fn num(&self) -> Vec<C> {
        self.numerator.iter().map(|v| c(*v)).collect()
    }

    fn den(&self) -> Vec<C> {
        self.denominator.iter().map(|v| c(*v)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let (n, d) = (trim(&self.num()), trim(&self.den()));
        if n.iter().all(|a| a.norm() == 0.0) || d.iter().all(|a| a.norm() == 0.0) {
            return Err(Error::Domain("numerator and denominator must be nonzero".into()));
        }
        if !self.phase.is_finite() {
            return Err(Error::Domain("phase must be finite".into()));
        }
        for a in poly_roots(&n) {
            for b in poly_roots(&d) {
                if (a - b).norm() < ROOT_SEPARATION {
                    return Err(Error::Domain(format!("numerator and denominator share the root {a}")));
                }
            }
        }
        Ok(())
    }

    pub fn p(&self, z: C) -> C {
        poly_eval(&self.num(), z) / poly_eval(&self.den(), z)
    }

    /// Zeros and poles of `p`.
    pub fn critical_set(&self) -> Vec<C> {
        let mut v = poly_roots(&self.num());
        v.extend(poly_roots(&self.den()));
        v
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchFlip {
    pub step: usize,
    pub at: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    Closed,
    MaxSteps,
    SingularApproach { root: [f64; 2], distance: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub points: Vec<[f64; 2]>,
    pub closed: bool,
    pub closure_gap: f64,
    /// Flow time to closure; equals `∫ |√p dz|` along the leaf.
    pub period: Option<f64>,
    pub step: f64,
    pub branch_log: Vec<BranchFlip>,
    pub termination: Termination,
    #[serde(skip)]
    start_branch: C,
}

impl Trajectory {
    pub fn coords(&self) -> Vec<C> {
        self.points.iter().map(|p| c(*p)).collect()
    }
}

struct Flow {
    rot: C,
    num: Vec<C>,
    den: Vec<C>,
}

impl Flow {
    fn new(theta: &QuadDifferential, phase: f64) -> Self {
        Flow { rot: C::from_polar(1.0, phase), num: theta.num(), den: theta.den() }
    }

    fn sqrt_near(&self, z: C, prev: C) -> C {
        let s = (poly_eval(&self.num, z) / poly_eval(&self.den, z)).sqrt();
        if (s - prev).norm() <= (s + prev).norm() {
            s
        } else {
            -s
        }
    }

    fn vel(&self, z: C, prev: C) -> C {
        self.rot / self.sqrt_near(z, prev)
    }

    fn rk4(&self, z: C, s: C, h: f64) -> C {
        let k1 = self.vel(z, s);
        let k2 = self.vel(z + k1 * (h / 2.0), s);
        let k3 = self.vel(z + k2 * (h / 2.0), s);
        let k4 = self.vel(z + k3 * h, s);
        z + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
    }
}

/// RK4 integration of a leaf until it closes, nears a zero or pole, or runs out of steps.
pub fn trace_leaf(theta: &QuadDifferential, start: [f64; 2], step: f64, max_steps: usize) -> Result<Trajectory> {
    trace_leaf_with_phase(theta, theta.phase, start, step, max_steps)
}

fn trace_leaf_with_phase(theta: &QuadDifferential, phase: f64, start: [f64; 2], step: f64, max_steps: usize) -> Result<Trajectory> {
    theta.validate()?;
    if step.is_nan() || step <= 0.0 || step.is_infinite() {
        return Err(Error::Domain("step must be positive".into()));
    }
    let z0 = c(start);
    let p0 = theta.p(z0);
    if !p0.re.is_finite() || !p0.im.is_finite() || p0.norm() == 0.0 {
        return Err(Error::Domain(format!("p({z0}) must be finite and nonzero")));
    }
    let flow = Flow::new(theta, phase);
    let crit = theta.critical_set();
    let s0 = p0.sqrt();
    let v0 = flow.rot / s0;
    let g = |z: C| ((z - z0) * v0.conj()).re;
    let near_start = 5.0 * step * v0.norm();

    let mut z = z0;
    let mut s = s0;
    let mut principal = true;
    let mut points = vec![arr(z0)];
    let mut branch_log = vec![];
    let mut left = false;
    for k in 0..max_steps {
        if let Some((r, dist)) = crit.iter().map(|r| (*r, (z - r).norm())).min_by(|a, b| a.1.total_cmp(&b.1)) {
            if dist < 10.0 * step {
                return Ok(Trajectory {
                    points, closed: false, closure_gap: f64::NAN, period: None, step, branch_log,
                    termination: Termination::SingularApproach { root: arr(r), distance: dist }, start_branch: s0,
                });
            }
        }
        let zn = flow.rk4(z, s, step);
        if !zn.re.is_finite() || !zn.im.is_finite() {
            return Err(Error::Domain("leaf integration diverged".into()));
        }
        let sn = flow.sqrt_near(zn, s);
        let is_principal = (sn - theta.p(zn).sqrt()).norm() < 1e-12 * sn.norm().max(1.0);
        if is_principal != principal {
            branch_log.push(BranchFlip { step: k + 1, at: arr(zn) });
            principal = is_principal;
        }
        if (zn - z0).norm() > 2.0 * near_start {
            left = true;
        }
        if left && g(z) < 0.0 && g(zn) >= 0.0 && (zn - z0).norm() < near_start {
            // land on the normal line through the start
            let (mut lo, mut hi) = (0.0, step);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if g(flow.rk4(z, s, mid)) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-16 * step.max(1.0) {
                    break;
                }
            }
            let h = 0.5 * (lo + hi);
            let zc = flow.rk4(z, s, h);
            let sc = flow.sqrt_near(zc, s);
            if (sc - s0).norm() < (sc + s0).norm() {
                let gap = (zc - z0).norm();
                points.push(arr(zc));
                return Ok(Trajectory {
                    points, closed: gap < CLOSE_TOL, closure_gap: gap, period: Some(k as f64 * step + h), step, branch_log,
                    termination: Termination::Closed, start_branch: s0,
                });
            }
        }
        z = zn;
        s = sn;
        points.push(arr(z));
    }
    Ok(Trajectory { points, closed: false, closure_gap: f64::NAN, period: None, step, branch_log, termination: Termination::MaxSteps, start_branch: s0 })
}

/// `max |arg(p ż²) − 2φ|` using a five-point derivative of the samples,
/// independent of the integrator's own velocity.
pub fn phase_deviation(theta: &QuadDifferential, t: &Trajectory) -> f64 {
    let z = t.coords();
    let h = t.step;
    let n = if t.termination == Termination::Closed { z.len() - 1 } else { z.len() };
    let mut worst: f64 = 0.0;
    for k in 2..n.saturating_sub(2) {
        let dz = (-z[k + 2] + z[k + 1] * 8.0 - z[k - 1] * 8.0 + z[k - 2]) / (12.0 * h);
        let w = theta.p(z[k]) * dz * dz;
        let mut d = w.arg() - 2.0 * theta.phase;
        d = (d + PI).rem_euclid(TAU) - PI;
        worst = worst.max(d.abs());
    }
    worst
}

/// `(mean, standard deviation)` of `|z − a| + |z + a|` over the samples.
pub fn focal_sum_stats(t: &Trajectory, a: f64) -> (f64, f64) {
    let fa = C::new(a, 0.0);
    let v: Vec<f64> = t.coords().iter().map(|z| (z - fa).norm() + (z + fa).norm()).collect();
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / v.len() as f64;
    (mean, var.sqrt())
}

pub fn max_radial_deviation(t: &Trajectory, r: f64) -> f64 {
    t.coords().iter().map(|z| (z.norm() - r).abs()).fold(0.0, f64::max)
}

/// Winding number of a closed polyline around `w`.
pub fn winding_number(t: &Trajectory, w: [f64; 2]) -> i64 {
    let w = c(w);
    let z = t.coords();
    let mut total = 0.0;
    for k in 0..z.len() {
        let a = z[k] - w;
        let b = z[(k + 1) % z.len()] - w;
        total += (b / a).arg();
    }
    (total / TAU).round() as i64
}

/// Closed leaf re-sampled with exactly `n` equal steps over one period.
fn resample(theta: &QuadDifferential, t: &Trajectory, n: usize) -> Result<Vec<(C, C)>> {
    let period = t.period.filter(|_| t.closed).ok_or_else(|| Error::Geometry("leaf is not closed".into()))?;
    let flow = Flow::new(theta, theta.phase);
    let h = period / n as f64;
    let mut z = c(t.points[0]);
    let mut s = t.start_branch;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push((z, flow.vel(z, s)));
        z = flow.rk4(z, s, h);
        s = flow.sqrt_near(z, s);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Density {
    /// `A / (π (1 + |z|²)²)`, total area `A` on the sphere.
    FubiniStudy { total_area: f64 },
    Uniform { value: f64 },
}

impl Density {
    pub fn at(&self, x: f64, y: f64) -> f64 {
        match self {
            Density::FubiniStudy { total_area } => total_area / (PI * (1.0 + x * x + y * y).powi(2)),
            Density::Uniform { value } => *value,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodConfig {
    pub density: Density,
    /// Scale applied to `Ω` before integrating.
    #[serde(default = "one")]
    pub normalization: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for PeriodConfig {
    fn default() -> Self {
        PeriodConfig { density: Density::FubiniStudy { total_area: 1.0 }, normalization: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Periods {
    pub symplectic_length: f64,
    pub complex_length: f64,
}

impl Periods {
    /// Periods of the branched double cover: the cover is formal, so both double.
    pub fn doubled(self) -> Periods {
        Periods { symplectic_length: 2.0 * self.symplectic_length, complex_length: 2.0 * self.complex_length }
    }
}

/// Gauss-Legendre 8-point nodes and weights on [-1, 1].
const GL8: [(f64, f64); 8] = [
    (-0.9602898564975363, 0.10122853629037626),
    (-0.7966664774136267, 0.22238103445337448),
    (-0.525532409916329, 0.31370664587788727),
    (-0.18343464249564984, 0.362683783378362),
    (0.18343464249564984, 0.362683783378362),
    (0.525532409916329, 0.31370664587788727),
    (0.7966664774136267, 0.22238103445337448),
    (0.9602898564975363, 0.10122853629037626),
];

/// Composite Gauss-Legendre with doubling until two estimates agree to `tol`.
pub fn integrate(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let rule = |f: &mut dyn FnMut(f64) -> f64, m: usize| {
        let h = (b - a) / m as f64;
        let mut acc = 0.0;
        for i in 0..m {
            let (mid, half) = (a + (i as f64 + 0.5) * h, 0.5 * h);
            for (x, w) in GL8 {
                acc += w * half * f(mid + half * x);
            }
        }
        acc
    };
    let mut m = 4;
    let mut prev = rule(f, m);
    for _ in 0..14 {
        m *= 2;
        let cur = rule(f, m);
        if (cur - prev).abs() <= tol * cur.abs().max(1.0) {
            return cur;
        }
        prev = cur;
    }
    prev
}

/// `∬ ρ dA` over the inside of a closed leaf, via Green's theorem with
/// `G(x, y) = ∫_0^x ρ(s, y) ds` and the trapezoid rule over one period.
fn enclosed_mass(theta: &QuadDifferential, t: &Trajectory, density: &Density) -> Result<f64> {
    let samples = resample(theta, t, 2048)?;
    let period = t.period.expect("closed");
    let h = period / samples.len() as f64;
    let mut acc = 0.0;
    for (z, v) in samples {
        let (x, y) = (z.re, z.im);
        let g = integrate(&mut |s| density.at(s, y), 0.0, x, 1e-13);
        acc += g * v.im * h;
    }
    Ok(acc.abs())
}

fn identical(a: &Trajectory, b: &Trajectory) -> bool {
    a.points.len() == b.points.len() && a.points.iter().zip(&b.points).all(|(p, q)| p == q)
}

pub fn period_pair(theta: &QuadDifferential, cfg: &PeriodConfig, inner: &Trajectory, outer: &Trajectory) -> Result<Periods> {
    if !inner.closed || !outer.closed {
        return Err(Error::Geometry("both leaves must be closed".into()));
    }
    if identical(inner, outer) {
        return Ok(Periods { symplectic_length: 0.0, complex_length: 0.0 });
    }
    let probe = |t: &Trajectory, pts: &[[f64; 2]]| pts.iter().step_by(7).map(|p| winding_number(t, *p)).collect::<Vec<_>>();
    if probe(outer, &inner.points).contains(&0) || probe(inner, &outer.points).iter().any(|w| *w != 0) {
        return Err(Error::Geometry("leaves intersect or are not nested".into()));
    }
    let symplectic = enclosed_mass(theta, outer, &cfg.density)? - enclosed_mass(theta, inner, &cfg.density)?;

    // transverse segment from the inner start to the nearest outer sample
    let a = c(inner.points[0]);
    let b = outer.coords().into_iter().min_by(|x, y| (x - a).norm().total_cmp(&(y - a).norm())).expect("nonempty");
    let mut prev = inner.start_branch;
    let rot = C::from_polar(1.0, -theta.phase);
    let dz = b - a;
    // branch continuation needs monotone evaluation order, so integrate piecewise
    let pieces = 512;
    let mut complex = 0.0;
    for i in 0..pieces {
        let (t0, t1) = (i as f64 / pieces as f64, (i + 1) as f64 / pieces as f64);
        let mut f = |t: f64| {
            let z = a + dz * t;
            let s = Flow::new(theta, theta.phase).sqrt_near(z, prev);
            (rot * s * dz).im * cfg.normalization
        };
        complex += integrate(&mut f, t0, t1, 1e-12);
        prev = Flow::new(theta, theta.phase).sqrt_near(a + dz * t1, prev);
    }
    Ok(Periods { symplectic_length: symplectic, complex_length: complex.abs() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeafScenario {
    pub p_num: Vec<[f64; 2]>,
    pub p_den: Vec<[f64; 2]>,
    pub phase: f64,
    pub starts: Vec<[f64; 2]>,
    pub step: f64,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periods: Option<PeriodConfig>,
}

fn default_max_steps() -> usize {
    200_000
}

impl LeafScenario {
    pub fn differential(&self) -> Result<QuadDifferential> {
        QuadDifferential::new(self.p_num.clone(), self.p_den.clone(), self.phase)
    }
}

// ---------------------------------------------------------------------------
// z² = u² − ε q(v) in C³ with coordinates (z, u, v)

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Jacobian {
    Analytic,
    /// Central differences with the given step.
    FiniteDifference(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointCheck {
    pub point: [[f64; 2]; 3],
    pub singular: bool,
    pub constraint: f64,
    /// Largest exact linearized constraint on the computed tangent basis.
    pub tangent: f64,
    pub omega: f64,
    pub im_omega: f64,
    pub xi_tangency: f64,
    pub xi_contraction: f64,
    pub xi_omega: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalModelReport {
    pub epsilon: f64,
    pub a: f64,
    pub b: f64,
    pub samples: usize,
    pub singular_samples: usize,
    pub max_constraint: f64,
    pub max_tangent: f64,
    pub max_omega: f64,
    pub max_im_omega: f64,
    pub max_xi_tangency: f64,
    pub max_xi_contraction: f64,
    pub max_xi_omega: f64,
    pub pass: bool,
    pub checks: Vec<PointCheck>,
}

pub const LOCAL_TOL: f64 = 1e-8;

struct Model<'a> {
    eps: f64,
    q: &'a [C],
    a: f64,
    b: f64,
}

type V6 = [f64; 6];

fn to6(p: &[C; 3]) -> V6 {
    [p[0].re, p[0].im, p[1].re, p[1].im, p[2].re, p[2].im]
}

fn from6(x: &V6) -> [C; 3] {
    [C::new(x[0], x[1]), C::new(x[2], x[3]), C::new(x[4], x[5])]
}

fn dot(a: &V6, b: &V6) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Model<'_> {
    /// Real constraints of the leaf.
    fn f(&self, x: &V6) -> [f64; 4] {
        let [z, u, v] = from6(x);
        let g = z * z - u * u + poly_eval(self.q, v) * self.eps;
        [g.re, g.im, v.re - self.a, (u * z.conj()).re - self.b]
    }

    fn rows(&self, x: &V6, mode: Jacobian) -> [V6; 4] {
        match mode {
            Jacobian::Analytic => {
                let [z, u, v] = from6(x);
                let dq = poly_eval(&poly_deriv(self.q), v) * self.eps;
                // dG = 2z dz − 2u du + ε q'(v) dv against real directions
                let coef = [z * 2.0, -u * 2.0, dq];
                let mut re = [0.0; 6];
                let mut im = [0.0; 6];
                for k in 0..3 {
                    re[2 * k] = coef[k].re;
                    re[2 * k + 1] = -coef[k].im;
                    im[2 * k] = coef[k].im;
                    im[2 * k + 1] = coef[k].re;
                }
                let rv = [0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
                // Re(u z̄) = ur zr + ui zi
                let rb = [u.re, u.im, z.re, z.im, 0.0, 0.0];
                [re, im, rv, rb]
            }
            Jacobian::FiniteDifference(h) => {
                let mut out = [[0.0; 6]; 4];
                for j in 0..6 {
                    let (mut xp, mut xm) = (*x, *x);
                    xp[j] += h;
                    xm[j] -= h;
                    let (fp, fm) = (self.f(&xp), self.f(&xm));
                    for i in 0..4 {
                        out[i][j] = (fp[i] - fm[i]) / (2.0 * h);
                    }
                }
                out
            }
        }
    }
}

/// Orthonormal basis of the orthogonal complement of `rows` in R⁶.
fn kernel(rows: &[V6]) -> Vec<V6> {
    let mut basis: Vec<V6> = vec![];
    for r in rows {
        let mut w = *r;
        for b in &basis {
            let d = dot(&w, b);
            for k in 0..6 {
                w[k] -= d * b[k];
            }
        }
        let n = dot(&w, &w).sqrt();
        if n > 1e-12 {
            basis.push(w.map(|x| x / n));
        }
    }
    let rank = basis.len();
    let mut cands: Vec<V6> = (0..6)
        .map(|j| {
            let mut e = [0.0; 6];
            e[j] = 1.0;
            e
        })
        .collect();
    let mut out = vec![];
    while basis.len() < 6 && !cands.is_empty() {
        let proj: Vec<(usize, V6, f64)> = cands
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let mut w = *e;
                for b in &basis {
                    let d = dot(&w, b);
                    for k in 0..6 {
                        w[k] -= d * b[k];
                    }
                }
                (i, w, dot(&w, &w).sqrt())
            })
            .collect();
        let (i, w, n) = proj.into_iter().max_by(|a, b| a.2.total_cmp(&b.2)).expect("nonempty");
        cands.remove(i);
        if n < 1e-12 {
            break;
        }
        let u = w.map(|x| x / n);
        basis.push(u);
        out.push(u);
    }
    debug_assert_eq!(out.len(), 6 - rank);
    out
}

fn omega0(x: &V6, y: &V6) -> f64 {
    let (a, b) = (from6(x), from6(y));
    (0..3).map(|k| (a[k].conj() * b[k]).im).sum()
}

/// `Ω̃ = z⁻¹ du∧dv`, written as `u⁻¹ dz∧dv` where `|z| < |u|` (equal on `Y`).
fn omega_tilde(p: &[C; 3], x: &V6, y: &V6) -> C {
    let (a, b) = (from6(x), from6(y));
    let [z, u, _] = *p;
    if z.norm() >= u.norm() {
        (a[1] * b[2] - b[1] * a[2]) / z
    } else {
        (a[0] * b[2] - b[0] * a[2]) / u
    }
}

/// Solve `Re(u z̄) = b` on the branch `u − z = r e^{iθ}`.
fn solve_sample(m: &Model, v: C, theta: f64) -> Option<[C; 3]> {
    let cst = poly_eval(m.q, v) * m.eps;
    let point = |r: f64| {
        let w = C::from_polar(r, theta);
        let u = (w + cst / w) / 2.0;
        let z = (cst / w - w) / 2.0;
        [z, u, v]
    };
    let f = |r: f64| {
        let [z, u, _] = point(r);
        (u * z.conj()).re - m.b
    };
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    if f(lo.exp()) < 0.0 || f(hi.exp()) > 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid.exp()) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(point((0.5 * (lo + hi)).exp()))
}

/// Pointwise residuals at a point of the leaf `L̃_{a,b}`.
pub fn check_point(eps: f64, q: &[C], a: f64, b: f64, p: [C; 3], mode: Jacobian) -> PointCheck {
    let m = Model { eps, q, a, b };
    let x = to6(&p);
    let singular = p[0].norm() < 1e-8 && p[1].norm() < 1e-8;
    let f = m.f(&x);
    let constraint = f.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let point = [arr(p[0]), arr(p[1]), arr(p[2])];
    if singular {
        return PointCheck { point, singular, constraint, tangent: f64::NAN, omega: f64::NAN, im_omega: f64::NAN, xi_tangency: f64::NAN, xi_contraction: f64::NAN, xi_omega: f64::NAN };
    }
    let rows = m.rows(&x, mode);
    let tl = kernel(&rows);
    let ty = kernel(&rows[..2]);
    let exact = m.rows(&x, Jacobian::Analytic);
    let tangent = tl.iter().flat_map(|e| exact.iter().map(|r| dot(r, e).abs())).fold(0.0, f64::max);
    let (e1, e2) = (tl[0], tl[1]);
    let omega = omega0(&e1, &e2).abs();
    let im_omega = omega_tilde(&p, &e1, &e2).im.abs();
    let [z, u, _] = p;
    let xi = to6(&[C::i() * u, C::i() * z, C::new(0.0, 0.0)]);
    let xn = dot(&xi, &xi).sqrt();
    let mut res = xi;
    for e in &tl {
        let d = dot(&xi, e);
        for k in 0..6 {
            res[k] -= d * e[k];
        }
    }
    let xi_tangency = dot(&res, &res).sqrt() / xn.max(1e-300);
    let xi_contraction = ty
        .iter()
        .map(|w| (omega_tilde(&p, &xi, w).im - from6(w)[2].re).abs())
        .fold(0.0, f64::max);
    let xi_omega = tl.iter().map(|e| omega0(&xi, e).abs()).fold(0.0, f64::max) / xn.max(1e-300);
    PointCheck { point, singular, constraint, tangent, omega, im_omega, xi_tangency, xi_contraction, xi_omega }
}

pub fn local_model_check(eps: f64, q: &[C], a: f64, b: f64, samples: usize, seed: u64, mode: Jacobian) -> Result<LocalModelReport> {
    if eps == 0.0 || !eps.is_finite() {
        return Err(Error::Domain("ε must be nonzero".into()));
    }
    if q.is_empty() {
        return Err(Error::Domain("q must be a nonempty polynomial".into()));
    }
    let m = Model { eps, q, a, b };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = vec![];
    // the leaf through a node (0, 0, v0) with q(v0) = 0
    if b.abs() < 1e-12 {
        for v0 in poly_roots(q) {
            if (v0.re - a).abs() < 1e-12 {
                let o = C::new(0.0, 0.0);
                checks.push(check_point(eps, q, a, b, [o, o, C::new(a, v0.im)], mode));
            }
        }
    }
    let nodes = checks.len();
    let mut attempts = 0;
    while checks.len() < samples + nodes {
        attempts += 1;
        if attempts > samples * 100 + 100 {
            return Err(Error::Domain("could not place samples on the leaf".into()));
        }
        let v = C::new(a, rng.gen_range(-1.0..1.0));
        let th = rng.gen_range(0.0..TAU);
        if let Some(p) = solve_sample(&m, v, th) {
            checks.push(check_point(eps, q, a, b, p, mode));
        }
    }
    Ok(summarize(eps, a, b, checks))
}

pub fn summarize(eps: f64, a: f64, b: f64, checks: Vec<PointCheck>) -> LocalModelReport {
    let regular: Vec<&PointCheck> = checks.iter().filter(|c| !c.singular).collect();
    let mx = |f: fn(&PointCheck) -> f64| regular.iter().map(|c| f(c)).fold(0.0, f64::max);
    let mtan = mx(|c| c.tangent);
    let (mc, mo, mi, mt, mxc, mxo) = (mx(|c| c.constraint), mx(|c| c.omega), mx(|c| c.im_omega), mx(|c| c.xi_tangency), mx(|c| c.xi_contraction), mx(|c| c.xi_omega));
    let pass = [mc, mtan, mo, mi, mt, mxc, mxo].iter().all(|v| *v < LOCAL_TOL);
    LocalModelReport {
        epsilon: eps, a, b, samples: checks.len(), singular_samples: checks.len() - regular.len(),
        max_constraint: mc, max_tangent: mtan, max_omega: mo, max_im_omega: mi, max_xi_tangency: mt, max_xi_contraction: mxc, max_xi_omega: mxo,
        pass, checks,
    }
}

/// `(z, u, v) ↦ (−z, u, v)`
pub fn involution(p: [C; 3]) -> [C; 3] {
    [-p[0], p[1], p[2]]
}

/// Places a single sample on the leaf (used by the involution check).
pub fn sample_point(eps: f64, q: &[C], a: f64, b: f64, im_v: f64, theta: f64) -> Option<[C; 3]> {
    solve_sample(&Model { eps, q, a, b }, C::new(a, im_v), theta)
}
