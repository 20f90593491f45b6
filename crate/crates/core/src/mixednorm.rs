//! Mixed-norm `B^N_ω(p,q)` and variable-exponent Luxemburg norms by
//! quadrature, and the finite-degree index in those norms.
//!
//! Both norms are evaluated on one polar grid: Gauss nodes for the radial
//! measure times an angular rule on the sphere. With `N > 0` an optional
//! group carries `m[0] |f(0)|` so that `p = q = 2` reproduces the Hilbert norm.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lsq;
use crate::poly::{MultiIndex, Polynomial};
use crate::spaces::{Preset, SpaceSpec};

/// Radial measure `μ` on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialMeasure {
    /// `δ_1`, the Hardy-type boundary measure.
    PointMass,
    /// `(β+1) r^β dr`; exact for integer `β` up to the node count.
    PowerWeight { beta: f64 },
    /// Explicit nodes `(r, weight)`.
    Nodes { nodes: Vec<(f64, f64)> },
}

impl RadialMeasure {
    /// Quadrature nodes `(r_k, μ_k)`.
    pub fn nodes(&self, count: usize) -> Result<Vec<(f64, f64)>> {
        match self {
            RadialMeasure::PointMass => Ok(vec![(1.0, 1.0)]),
            RadialMeasure::PowerWeight { beta } => {
                if !(*beta > -1.0 && beta.is_finite()) {
                    return Err(Error::arg(format!("power weight needs β > −1, got {beta}")));
                }
                Ok(gauss_legendre_unit(count)?
                    .into_iter()
                    .map(|(r, w)| (r, w * (beta + 1.0) * r.powf(*beta)))
                    .collect())
            }
            RadialMeasure::Nodes { nodes } => {
                if nodes.is_empty() {
                    return Err(Error::arg("radial node list is empty"));
                }
                for &(r, w) in nodes {
                    if !((0.0..=1.0).contains(&r) && w > 0.0 && w.is_finite()) {
                        return Err(Error::arg(format!("bad radial node ({r}, {w})")));
                    }
                }
                Ok(nodes.clone())
            }
        }
    }

    /// The measure behind a Besov preset; Drury–Arveson has none.
    pub fn for_space(spec: &SpaceSpec) -> Result<Self> {
        match spec.preset_name() {
            Some(Preset::Hardy(_)) => Ok(RadialMeasure::PointMass),
            Some(Preset::Bergman(_)) | Some(Preset::DirichletType(_)) => Ok(RadialMeasure::PowerWeight { beta: 1.0 }),
            _ => Err(Error::arg("only the hardy, bergman and dirichlet_type presets carry a radial measure")),
        }
    }
}

/// Gauss–Legendre rule on `[0, 1]` from the Jacobi matrix eigenproblem.
pub fn gauss_legendre_unit(n: usize) -> Result<Vec<(f64, f64)>> {
    if n == 0 {
        return Err(Error::arg("need at least one quadrature node"));
    }
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let kf = k as f64;
        let b = kf / (4.0 * kf * kf - 1.0).sqrt();
        jac[(k, k - 1)] = b;
        jac[(k - 1, k)] = b;
    }
    let eig = SymmetricEigen::new(jac);
    let mut nodes: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let x = eig.eigenvalues[i];
            let v0 = eig.eigenvectors[(0, i)];
            ((x + 1.0) / 2.0, v0 * v0)
        })
        .collect();
    nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(nodes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AngularScheme {
    /// `M` equispaced angles; `d = 1` only.
    Trapezoid { m: usize },
    /// `M` seeded uniform sphere points, any `d`.
    MonteCarlo { m: usize, seed: u64 },
}

impl AngularScheme {
    fn points(&self, d: usize) -> Result<Vec<Vec<Complex64>>> {
        match *self {
            AngularScheme::Trapezoid { m } => {
                if d != 1 {
                    return Err(Error::arg("the trapezoid rule is for d = 1; use monte_carlo"));
                }
                if m == 0 {
                    return Err(Error::arg("need at least one angle"));
                }
                Ok((0..m)
                    .map(|j| vec![Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64)])
                    .collect())
            }
            AngularScheme::MonteCarlo { m, seed } => {
                if m == 0 {
                    return Err(Error::arg("need at least one sample"));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Ok((0..m)
                    .map(|_| {
                        let mut z: Vec<Complex64> = (0..d)
                            .map(|_| {
                                let re: f64 = StandardNormal.sample(&mut rng);
                                let im: f64 = StandardNormal.sample(&mut rng);
                                Complex64::new(re, im)
                            })
                            .collect();
                        let r = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                        z.iter_mut().for_each(|c| *c /= r);
                        z
                    })
                    .collect())
            }
        }
    }

    fn resolution(&self) -> usize {
        match *self {
            AngularScheme::Trapezoid { m } | AngularScheme::MonteCarlo { m, .. } => m,
        }
    }
}

fn default_radial_nodes() -> usize {
    48
}

fn default_true() -> bool {
    true
}

/// `B^N_ω(p, q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MixedSpec {
    pub d: usize,
    #[serde(rename = "N")]
    pub order: u32,
    pub p: f64,
    pub q: f64,
    pub radial: RadialMeasure,
    #[serde(default = "default_radial_nodes")]
    pub radial_nodes: usize,
    pub angular: AngularScheme,
    /// Adds `m[0] |f(0)|^q` when `N > 0`.
    #[serde(default = "default_true")]
    pub constant_term: bool,
}

impl MixedSpec {
    /// Mixed norm on the radial measure of a Besov preset, trapezoid in `d = 1`.
    pub fn from_space(spec: &SpaceSpec, p: f64, q: f64, angular: AngularScheme) -> Result<Self> {
        let s = MixedSpec {
            d: spec.d(),
            order: spec.order(),
            p,
            q,
            radial: RadialMeasure::for_space(spec)?,
            radial_nodes: default_radial_nodes(),
            angular,
            constant_term: true,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::arg("dimension must be at least 1"));
        }
        for (name, v) in [("p", self.p), ("q", self.q)] {
            if !(v >= 1.0 && v.is_finite()) {
                return Err(Error::arg(format!("{name} must lie in [1, ∞), got {v}")));
            }
        }
        self.radial.nodes(self.radial_nodes)?;
        self.angular.points(self.d).map(|_| ())
    }

    fn grid(&self) -> Result<Grid> {
        self.validate()?;
        Grid::new(self.d, self.order, &self.radial, self.radial_nodes, &self.angular, self.constant_term, |_| 0.0)
    }
}

/// Radial exponent `p(z) = a + b |z|^c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFamily {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl ExponentFamily {
    pub fn constant(p: f64) -> Self {
        ExponentFamily { a: p, b: 0.0, c: 1.0 }
    }

    pub fn at(&self, r: f64) -> f64 {
        self.a + self.b * r.powf(self.c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.b.is_finite() && self.c.is_finite()) {
            return Err(Error::arg("exponent parameters must be finite"));
        }
        if self.a.min(self.a + self.b) < 1.0 {
            return Err(Error::arg(format!(
                "exponent must stay ≥ 1 on [0, 1]: a = {}, b = {}",
                self.a, self.b
            )));
        }
        if self.b != 0.0 && self.c < 1.0 {
            return Err(Error::arg(format!("c must be ≥ 1 for a Lipschitz exponent, got {}", self.c)));
        }
        Ok(())
    }
}

fn default_bisection_tol() -> f64 {
    1e-14
}

/// Variable-exponent Besov norm with radial exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VarExpSpec {
    pub d: usize,
    #[serde(rename = "N")]
    pub order: u32,
    pub exponent: ExponentFamily,
    pub radial: RadialMeasure,
    #[serde(default = "default_radial_nodes")]
    pub radial_nodes: usize,
    pub angular: AngularScheme,
    /// Relative bracket width at which bisection stops.
    #[serde(default = "default_bisection_tol")]
    pub bisection_tol: f64,
    /// Adds `m[0] |f(0)/λ|^{p(0)}` to the modular when `N > 0`.
    #[serde(default = "default_true")]
    pub constant_term: bool,
}

impl VarExpSpec {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::arg("dimension must be at least 1"));
        }
        self.exponent.validate()?;
        if !(self.bisection_tol > 0.0 && self.bisection_tol < 1.0) {
            return Err(Error::arg(format!("bisection tolerance must lie in (0, 1), got {}", self.bisection_tol)));
        }
        self.radial.nodes(self.radial_nodes)?;
        self.angular.points(self.d).map(|_| ())
    }

    fn grid(&self) -> Result<Grid> {
        self.validate()?;
        let e = self.exponent;
        Grid::new(self.d, self.order, &self.radial, self.radial_nodes, &self.angular, self.constant_term, move |r| {
            e.at(r)
        })
    }
}

/// A radius with its outer weight and the slice of grid points on it.
#[derive(Debug, Clone)]
struct Group {
    outer: f64,
    exponent: f64,
    start: usize,
    end: usize,
    constant: bool,
}

/// Polar quadrature grid; point values are `R^N h(z)`, or `h(0)` in the
/// constant group.
#[derive(Debug, Clone)]
struct Grid {
    d: usize,
    order: u32,
    points: Vec<Vec<Complex64>>,
    inner: Vec<f64>,
    groups: Vec<Group>,
    angular_resolution: usize,
}

impl Grid {
    fn new(
        d: usize,
        order: u32,
        radial: &RadialMeasure,
        radial_nodes: usize,
        angular: &AngularScheme,
        constant_term: bool,
        exponent: impl Fn(f64) -> f64,
    ) -> Result<Grid> {
        let nodes = radial.nodes(radial_nodes)?;
        let sphere = angular.points(d)?;
        let m = sphere.len() as f64;
        let mut g = Grid {
            d,
            order,
            points: Vec::new(),
            inner: Vec::new(),
            groups: Vec::new(),
            angular_resolution: angular.resolution(),
        };
        for &(r, mu) in &nodes {
            let start = g.points.len();
            for w in &sphere {
                g.points.push(w.iter().map(|c| c * r).collect());
                g.inner.push(1.0 / m);
            }
            g.groups.push(Group {
                outer: mu,
                exponent: exponent(r),
                start,
                end: g.points.len(),
                constant: false,
            });
        }
        if order > 0 && constant_term {
            let mass: f64 = nodes.iter().map(|n| n.1).sum();
            let start = g.points.len();
            g.points.push(vec![Complex64::new(0.0, 0.0); d]);
            g.inner.push(1.0);
            g.groups.push(Group {
                outer: mass,
                exponent: exponent(0.0),
                start,
                end: start + 1,
                constant: true,
            });
        }
        Ok(g)
    }

    fn values(&self, h: &Polynomial) -> Result<Vec<Complex64>> {
        if h.dim() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: h.dim(),
            });
        }
        if 8 * h.degree() > self.angular_resolution && self.d == 1 {
            log::warn!(
                "angular resolution {} is below 8·deg = {}",
                self.angular_resolution,
                8 * h.degree()
            );
        }
        let rh = h.radial_derivative(self.order);
        let mut out = vec![Complex64::new(0.0, 0.0); self.points.len()];
        for g in &self.groups {
            let src = if g.constant { h } else { &rh };
            for i in g.start..g.end {
                out[i] = src.evaluate(&self.points[i])?;
            }
        }
        Ok(out)
    }

    /// `(Σ_g μ_g (Σ_j ω_j |v_j|^p)^{q/p})^{1/q}`.
    fn mixed(&self, v: &[Complex64], p: f64, q: f64) -> f64 {
        let total: f64 = self
            .groups
            .iter()
            .map(|g| {
                let s: f64 = (g.start..g.end).map(|i| self.inner[i] * v[i].norm().powf(p)).sum();
                g.outer * s.powf(q / p)
            })
            .sum();
        total.powf(1.0 / q)
    }

    fn modular(&self, v: &[Complex64], lambda: f64) -> f64 {
        self.groups
            .iter()
            .map(|g| {
                let s: f64 = (g.start..g.end)
                    .map(|i| self.inner[i] * (v[i].norm() / lambda).powf(g.exponent))
                    .sum();
                g.outer * s
            })
            .sum()
    }

    /// Least `λ` with `modular(v, λ) ≤ 1`.
    fn luxemburg(&self, v: &[Complex64], rel_tol: f64) -> Result<f64> {
        if v.iter().all(|x| x.norm() == 0.0) {
            return Ok(0.0);
        }
        let l2 = self.mixed(v, 2.0, 2.0);
        let mut lo = if l2 > 0.0 { l2 } else { 1.0 };
        let mut hi = lo;
        let mut guard = 0;
        while self.modular(v, hi) > 1.0 {
            hi *= 2.0;
            guard += 1;
            if guard > 2100 {
                return Err(Error::Numeric("could not bracket the Luxemburg norm from above".into()));
            }
        }
        while self.modular(v, lo) <= 1.0 {
            lo /= 2.0;
            guard += 1;
            if guard > 4200 {
                return Err(Error::Numeric("could not bracket the Luxemburg norm from below".into()));
            }
        }
        for _ in 0..200 {
            if hi - lo <= rel_tol * hi {
                return Ok(hi);
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return Ok(hi);
            }
            if self.modular(v, mid) > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Err(Error::Numeric("Luxemburg bisection did not converge in 200 steps".into()))
    }
}

/// Quadrature value of the mixed norm.
pub fn mixed_norm(spec: &MixedSpec, f: &Polynomial) -> Result<f64> {
    Ok(mixed_norm_estimate(spec, f)?.value)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NormEstimate {
    pub value: f64,
    /// Linearized standard error of the Monte Carlo angular averages; 0 for
    /// the trapezoid rule.
    pub std_error: f64,
}

pub fn mixed_norm_estimate(spec: &MixedSpec, f: &Polynomial) -> Result<NormEstimate> {
    let grid = spec.grid()?;
    let v = grid.values(f)?;
    let value = grid.mixed(&v, spec.p, spec.q);
    let std_error = match spec.angular {
        AngularScheme::Trapezoid { .. } => 0.0,
        AngularScheme::MonteCarlo { .. } if value == 0.0 => 0.0,
        AngularScheme::MonteCarlo { .. } => {
            let (p, q) = (spec.p, spec.q);
            // dV/dS_g = μ_g (1/p) S_g^{q/p−1} V^{1−q}, summed with |·| against se(S_g)
            grid.groups
                .iter()
                .filter(|g| !g.constant)
                .map(|g| {
                    let xs: Vec<f64> = (g.start..g.end).map(|i| v[i].norm().powf(p)).collect();
                    let n = xs.len() as f64;
                    let mean = xs.iter().sum::<f64>() / n;
                    let var = if n > 1.0 {
                        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
                    } else {
                        0.0
                    };
                    let se = (var / n).sqrt();
                    let deriv = if mean > 0.0 {
                        g.outer / p * mean.powf(q / p - 1.0) * value.powf(1.0 - q)
                    } else {
                        0.0
                    };
                    deriv.abs() * se
                })
                .sum()
        }
    };
    Ok(NormEstimate { value, std_error })
}

/// Quadrature of `∫ |R^N f / λ|^{p(z)} dω` (plus the constant term).
pub fn modular(spec: &VarExpSpec, f: &Polynomial, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::arg(format!("λ must be positive, got {lambda}")));
    }
    let grid = spec.grid()?;
    Ok(grid.modular(&grid.values(f)?, lambda))
}

/// `inf{λ > 0 : modular(f, λ) ≤ 1}` by bracketing and bisection.
pub fn luxemburg_norm(spec: &VarExpSpec, f: &Polynomial) -> Result<f64> {
    let grid = spec.grid()?;
    grid.luxemburg(&grid.values(f)?, spec.bisection_tol)
}

/// Either norm, for [`mixed_index`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "norm", rename_all = "snake_case")]
pub enum IndexNorm {
    Mixed(MixedSpec),
    VarExp(VarExpSpec),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MixedIndexResult {
    pub n: usize,
    pub objective: f64,
    pub phi: Polynomial,
    pub iterations: usize,
    pub converged: bool,
    /// Objective at the `p = q = 2` starting point.
    pub warm_start_objective: f64,
}

const IRLS_MAX_ITER: usize = 500;
const IRLS_DECREASE: f64 = 1e-10;

/// `min ‖1 − φ f‖` over `deg φ ≤ n` by iteratively reweighted least squares
/// with backtracking on the true objective.
pub fn mixed_index(norm: &IndexNorm, f: &Polynomial, n: usize) -> Result<MixedIndexResult> {
    if f.is_zero() {
        return Err(Error::DegenerateInput("f is the zero polynomial".into()));
    }
    let (grid, rel_tol) = match norm {
        IndexNorm::Mixed(s) => (s.grid()?, 0.0),
        IndexNorm::VarExp(s) => (s.grid()?, s.bisection_tol),
    };
    let d = grid.d;
    if f.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: f.dim(),
        });
    }
    let basis = MultiIndex::up_to_degree(d, n);
    let rows = grid.points.len();
    let mut a = DMatrix::<Complex64>::zeros(rows, basis.len());
    for (j, beta) in basis.iter().enumerate() {
        let col = grid.values(&Polynomial::monomial(beta.clone(), Complex64::new(1.0, 0.0)).multiply(f)?)?;
        for (i, v) in col.into_iter().enumerate() {
            a[(i, j)] = v;
        }
    }
    let b = DVector::from_vec(grid.values(&Polynomial::one(d))?);

    let objective = |c: &DVector<Complex64>| -> Result<f64> {
        let v = &b - &a * c;
        match norm {
            IndexNorm::Mixed(s) => Ok(grid.mixed(v.as_slice(), s.p, s.q)),
            IndexNorm::VarExp(_) => grid.luxemburg(v.as_slice(), rel_tol),
        }
    };
    let hilbert: Vec<f64> = grid
        .groups
        .iter()
        .flat_map(|g| (g.start..g.end).map(move |i| (g.outer, i)))
        .map(|(mu, i)| mu * grid.inner[i])
        .collect();
    let weighted_solve = |w: &[f64]| -> Result<DVector<Complex64>> {
        let mut aw = a.clone();
        let mut bw = b.clone();
        for i in 0..rows {
            let s = Complex64::new(w[i].sqrt(), 0.0);
            aw.row_mut(i).scale_mut(w[i].sqrt());
            bw[i] *= s;
        }
        Ok(DVector::from_vec(lsq::solve_dense(&aw, &bw)?.coeffs))
    };

    let mut c = weighted_solve(&hilbert)?;
    let mut value = objective(&c)?;
    let warm = value;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < IRLS_MAX_ITER {
        iterations += 1;
        let v = &b - &a * &c;
        let w = irls_weights(&grid, norm, v.as_slice(), value);
        let cand = weighted_solve(&w)?;
        let dir = &cand - &c;
        if dir.norm() <= 1e-13 * (1.0 + c.norm()) {
            converged = true;
            break;
        }
        let mut t = 1.0;
        let mut accepted = None;
        while t >= 1.0 / 1024.0 {
            let trial = &c + &dir * Complex64::new(t, 0.0);
            let tv = objective(&trial)?;
            if tv < value {
                accepted = Some((trial, tv));
                break;
            }
            t /= 2.0;
        }
        match accepted {
            Some((trial, tv)) => {
                let drop = value - tv;
                c = trial;
                value = tv;
                if drop < IRLS_DECREASE {
                    converged = true;
                    break;
                }
            }
            None => {
                // no descent along the reweighted direction: at the optimum up
                // to objective rounding, or stalled
                converged = dir.norm() <= 1e-6 * (1.0 + c.norm());
                break;
            }
        }
    }
    let phi = Polynomial::from_terms(d, basis.into_iter().zip(c.iter().copied()))?;
    Ok(MixedIndexResult {
        n,
        objective: value,
        phi,
        iterations,
        converged,
        warm_start_objective: warm,
    })
}

/// Weights whose weighted least-squares stationarity matches that of the
/// objective at `v`.
fn irls_weights(grid: &Grid, norm: &IndexNorm, v: &[Complex64], value: f64) -> Vec<f64> {
    let vmax = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let floor = 1e-9 * vmax + f64::MIN_POSITIVE;
    let mut w = vec![0.0; v.len()];
    for g in &grid.groups {
        match norm {
            IndexNorm::Mixed(s) => {
                let (p, q) = (s.p, s.q);
                let sum: f64 = (g.start..g.end).map(|i| grid.inner[i] * v[i].norm().powf(p)).sum();
                let outer = g.outer * sum.max(floor.powf(p)).powf(q / p - 1.0);
                for i in g.start..g.end {
                    w[i] = outer * grid.inner[i] * v[i].norm().max(floor).powf(p - 2.0);
                }
            }
            IndexNorm::VarExp(_) => {
                let lambda = value.max(f64::MIN_POSITIVE);
                let p = g.exponent;
                for i in g.start..g.end {
                    w[i] = g.outer * grid.inner[i] * p * (v[i].norm().max(floor) / lambda).powf(p - 2.0);
                }
            }
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclicity::subspace_distance;

    fn p(c: &[f64]) -> Polynomial {
        Polynomial::univariate(c)
    }

    fn mixed1(radial: RadialMeasure, order: u32, pp: f64, qq: f64) -> MixedSpec {
        MixedSpec {
            d: 1,
            order,
            p: pp,
            q: qq,
            radial,
            radial_nodes: 48,
            angular: AngularScheme::Trapezoid { m: 256 },
            constant_term: true,
        }
    }

    fn var1(radial: RadialMeasure, order: u32, e: ExponentFamily) -> VarExpSpec {
        VarExpSpec {
            d: 1,
            order,
            exponent: e,
            radial,
            radial_nodes: 48,
            angular: AngularScheme::Trapezoid { m: 256 },
            bisection_tol: 1e-14,
            constant_term: true,
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = gauss_legendre_unit(10).unwrap();
        for k in 0..20 {
            let s: f64 = rule.iter().map(|(x, w)| w * x.powi(k)).sum();
            assert!((s - 1.0 / (k as f64 + 1.0)).abs() < 1e-14, "k = {k}");
        }
        assert!(rule.iter().all(|&(x, w)| x > 0.0 && x < 1.0 && w > 0.0));
    }

    #[test]
    fn mixed_norm_examples() {
        let hardy = mixed1(RadialMeasure::PointMass, 0, 2.0, 2.0);
        assert_eq!(mixed_norm(&hardy, &Polynomial::zero(1)).unwrap(), 0.0);
        for k in [0, 1, 5] {
            let mut c = vec![0.0; k + 1];
            c[k] = 1.0;
            assert!((mixed_norm(&hardy, &p(&c)).unwrap() - 1.0).abs() < 1e-14);
        }
        let bergman = SpaceSpec::preset(Preset::Bergman(1)).unwrap();
        let ms = MixedSpec::from_space(&bergman, 2.0, 2.0, AngularScheme::Trapezoid { m: 256 }).unwrap();
        let f = p(&[1.0, -1.0]);
        assert!((mixed_norm(&ms, &f).unwrap() - bergman.norm(&f).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn dirichlet_type_uses_constant_term() {
        let spec = SpaceSpec::preset(Preset::DirichletType(1)).unwrap();
        let f = p(&[0.5, -1.0, 0.25]);
        let with = MixedSpec::from_space(&spec, 2.0, 2.0, AngularScheme::Trapezoid { m: 128 }).unwrap();
        assert!((mixed_norm(&with, &f).unwrap() - spec.norm(&f).unwrap()).abs() < 1e-10);
        let without = MixedSpec {
            constant_term: false,
            ..with
        };
        let seminorm = mixed_norm(&without, &f).unwrap();
        assert!((seminorm.powi(2) + 0.25 - spec.norm_sq(&f).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn mixed_lp_closed_form() {
        // |1 − z| on the circle: ∫ |1−e^{iθ}| dθ/2π = 4/π
        let s = mixed1(RadialMeasure::PointMass, 0, 1.0, 1.0);
        let v = mixed_norm(&s, &p(&[1.0, -1.0])).unwrap();
        assert!((v - 4.0 / PI).abs() < 1e-4);
        let s4 = mixed1(RadialMeasure::PointMass, 0, 4.0, 3.0);
        // ∫ |1 − e^{iθ}|^4 dθ/2π = 6
        let v = mixed_norm(&s4, &p(&[1.0, -1.0])).unwrap();
        assert!((v - 6f64.powf(0.25)).abs() < 1e-12);
    }

    #[test]
    fn modular_examples() {
        let bergman = RadialMeasure::PowerWeight { beta: 1.0 };
        let s = var1(bergman.clone(), 0, ExponentFamily::constant(3.0));
        assert_eq!(modular(&s, &Polynomial::zero(1), 0.5).unwrap(), 0.0);
        let f = p(&[1.0, -0.5, 0.2]);
        let lp = mixed_norm(&mixed1(bergman, 0, 3.0, 3.0), &f).unwrap();
        assert!((modular(&s, &f, lp).unwrap() - 1.0).abs() < 1e-8);
        assert!(modular(&s, &f, 2.0 * lp).unwrap() < modular(&s, &f, lp).unwrap());
        assert!(modular(&s, &f, 0.0).is_err());
    }

    #[test]
    fn luxemburg_examples() {
        let bergman = RadialMeasure::PowerWeight { beta: 1.0 };
        let f = p(&[1.0, -0.5, 0.2]);
        let s = var1(bergman.clone(), 0, ExponentFamily::constant(3.0));
        assert_eq!(luxemburg_norm(&s, &Polynomial::zero(1)).unwrap(), 0.0);
        let lp = mixed_norm(&mixed1(bergman.clone(), 0, 3.0, 3.0), &f).unwrap();
        assert!((luxemburg_norm(&s, &f).unwrap() - lp).abs() < 1e-8);

        let var = var1(bergman, 1, ExponentFamily { a: 1.5, b: 1.0, c: 2.0 });
        let l = luxemburg_norm(&var, &f).unwrap();
        assert!((modular(&var, &f, l).unwrap() - 1.0).abs() < 1e-6);
        let c = Complex64::new(-2.0, 1.5);
        let lc = luxemburg_norm(&var, &f.scale(c)).unwrap();
        assert!((lc - c.norm() * l).abs() < 1e-8 * lc);
    }

    #[test]
    fn exponent_validation() {
        assert!(ExponentFamily { a: 0.5, b: 1.0, c: 1.0 }.validate().is_err());
        assert!(ExponentFamily { a: 2.0, b: -1.5, c: 1.0 }.validate().is_err());
        assert!(ExponentFamily { a: 2.0, b: 1.0, c: 0.5 }.validate().is_err());
        assert!(ExponentFamily { a: 2.0, b: -1.0, c: 2.0 }.validate().is_ok());
        let bad = mixed1(RadialMeasure::PointMass, 0, 0.5, 2.0);
        assert!(mixed_norm(&bad, &p(&[1.0])).is_err());
    }

    #[test]
    fn index_examples() {
        let hardy = IndexNorm::Mixed(mixed1(RadialMeasure::PointMass, 0, 2.0, 2.0));
        let r = mixed_index(&hardy, &p(&[1.0]), 3).unwrap();
        assert!(r.objective < 1e-14);
        assert!((r.phi.coeff(&MultiIndex::zero(1)) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let r = mixed_index(&hardy, &p(&[0.0, 1.0]), 4).unwrap();
        assert!((r.objective - 1.0).abs() < 1e-12);
        let r = mixed_index(&hardy, &p(&[1.0, -1.0]), 5).unwrap();
        assert!((r.objective - (1.0f64 / 7.0).sqrt()).abs() < 1e-7);
        assert!(r.converged);
        assert!(mixed_index(&hardy, &Polynomial::zero(1), 2).is_err());
    }

    #[test]
    fn index_matches_hilbert_solver_in_bergman() {
        let spec = SpaceSpec::preset(Preset::Bergman(1)).unwrap();
        let norm = IndexNorm::Mixed(MixedSpec::from_space(&spec, 2.0, 2.0, AngularScheme::Trapezoid { m: 128 }).unwrap());
        let f = p(&[1.0, -1.0]);
        for n in [0, 3, 6] {
            let mi = mixed_index(&norm, &f, n).unwrap();
            let h = subspace_distance(&spec, &Polynomial::one(1), &f, n).unwrap();
            assert!((mi.objective - h.residual).abs() < 1e-7);
        }
    }

    #[test]
    fn non_hilbert_index_is_monotone_and_improves_on_warm_start() {
        let f = p(&[1.0, -0.9, 0.3]);
        let norms = [
            IndexNorm::Mixed(mixed1(RadialMeasure::PowerWeight { beta: 1.0 }, 0, 1.5, 3.0)),
            IndexNorm::Mixed(mixed1(RadialMeasure::PointMass, 0, 4.0, 4.0)),
            IndexNorm::VarExp(var1(
                RadialMeasure::PowerWeight { beta: 1.0 },
                0,
                ExponentFamily { a: 1.5, b: 1.5, c: 1.0 },
            )),
        ];
        for norm in &norms {
            let mut prev = f64::INFINITY;
            for n in 0..=4 {
                let r = mixed_index(norm, &f, n).unwrap();
                assert!(r.objective <= r.warm_start_objective + 1e-15);
                assert!(r.objective <= prev + 1e-8, "{norm:?} n={n}");
                assert!(r.objective >= 0.0);
                assert!(r.converged, "{norm:?} n={n} it={}", r.iterations);
                prev = r.objective;
            }
        }
    }

    #[test]
    fn ball_monte_carlo_has_error_estimate() {
        let s = MixedSpec {
            d: 2,
            order: 0,
            p: 2.0,
            q: 2.0,
            radial: RadialMeasure::PointMass,
            radial_nodes: 1,
            angular: AngularScheme::MonteCarlo { m: 20000, seed: 3 },
            constant_term: true,
        };
        let f = Polynomial::variable(2, 0);
        let e = mixed_norm_estimate(&s, &f).unwrap();
        // ‖z_1‖² = 1/2 in H²(𝔹_2)
        assert!((e.value - 0.5f64.sqrt()).abs() < 5.0 * e.std_error + 1e-3);
        assert!(e.std_error > 0.0 && e.std_error < 0.01);
        assert_eq!(mixed_norm_estimate(&s, &f).unwrap().value, e.value);
        let trap = MixedSpec {
            angular: AngularScheme::Trapezoid { m: 16 },
            ..s
        };
        assert!(mixed_norm(&trap, &f).is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = mixed1(RadialMeasure::PowerWeight { beta: 1.0 }, 1, 2.0, 3.0);
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"N\":1"));
        assert_eq!(serde_json::from_str::<MixedSpec>(&text).unwrap(), s);
        let n = IndexNorm::VarExp(var1(RadialMeasure::PointMass, 0, ExponentFamily::constant(2.0)));
        let text = serde_json::to_string(&n).unwrap();
        assert_eq!(serde_json::from_str::<IndexNorm>(&text).unwrap(), n);
    }
}
