//! Boundary zero sets and their size: sampling, discrete equilibrium
//! measures, neighbourhood measure, box counting, and a heuristic report
//! that sets these next to the index sweep.
//!
//! Points of `∂𝔹_d ⊂ ℂ^d` are stored as real vectors of length `2d`,
//! `(Re z_1, Im z_1, …, Re z_d, Im z_d)`.

use std::collections::{HashMap, HashSet};
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cyclicity::{index_sweep, SweepReport, Verdict, DEFAULT_CYCLIC_TOL};
use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::spaces::SpaceSpec;

const UNIT_TOL: f64 = 1e-12;
const DEDUP_DIST: f64 = 1e-9;

/// `|f|` threshold used by [`sample_zero_set`] when none is given.
pub fn default_zero_tol(d: usize) -> f64 {
    if d == 1 {
        1e-9
    } else {
        1e-4
    }
}

/// Sampled points of a subset of the unit sphere.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundaryCloud {
    d: usize,
    points: Vec<Vec<f64>>,
    source_tol: f64,
}

impl BoundaryCloud {
    pub fn new(d: usize, points: Vec<Vec<f64>>, source_tol: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::arg("dimension must be at least 1"));
        }
        for p in &points {
            if p.len() != 2 * d {
                return Err(Error::DimensionMismatch {
                    expected: 2 * d,
                    found: p.len(),
                });
            }
            let r = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            if (r - 1.0).abs() > UNIT_TOL {
                return Err(Error::arg(format!("cloud point off the unit sphere (|x| = {r})")));
            }
        }
        Ok(BoundaryCloud { d, points, source_tol })
    }

    pub fn empty(d: usize) -> Self {
        BoundaryCloud {
            d,
            points: Vec::new(),
            source_tol: 0.0,
        }
    }

    pub fn from_complex(d: usize, points: &[Vec<Complex64>], source_tol: f64) -> Result<Self> {
        let real = points
            .iter()
            .map(|z| z.iter().flat_map(|c| [c.re, c.im]).collect())
            .collect();
        BoundaryCloud::new(d, real, source_tol)
    }

    /// `n` equispaced points `e^{2πik/n}` on the circle.
    pub fn circle(n: usize) -> Self {
        let points = (0..n)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / n as f64;
                vec![t.cos(), t.sin()]
            })
            .collect();
        BoundaryCloud {
            d: 1,
            points,
            source_tol: 0.0,
        }
    }

    /// `n ≥ 2` equispaced points on the arc `{e^{it} : 0 ≤ t ≤ theta}`, endpoints included.
    pub fn arc(theta: f64, n: usize) -> Self {
        let points = (0..n)
            .map(|k| {
                let t = theta * k as f64 / (n.max(2) - 1) as f64;
                vec![t.cos(), t.sin()]
            })
            .collect();
        BoundaryCloud {
            d: 1,
            points,
            source_tol: 0.0,
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn source_tol(&self) -> f64 {
        self.source_tol
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn union(&self, other: &BoundaryCloud) -> Result<BoundaryCloud> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: other.d,
            });
        }
        let mut points = self.points.clone();
        points.extend(other.points.iter().cloned());
        Ok(BoundaryCloud {
            d: self.d,
            points,
            source_tol: self.source_tol.max(other.source_tol),
        })
    }

    /// Drops points within `1e-9` of an earlier one.
    pub fn dedup(&self) -> BoundaryCloud {
        let mut kept: Vec<Vec<f64>> = Vec::new();
        for p in &self.points {
            if !kept.iter().any(|q| dist(p, q) < DEDUP_DIST) {
                kept.push(p.clone());
            }
        }
        BoundaryCloud {
            d: self.d,
            points: kept,
            source_tol: self.source_tol,
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CloudWire {
    Points(Vec<Vec<f64>>),
    #[serde(rename_all = "camelCase")]
    Full {
        d: usize,
        points: Vec<Vec<f64>>,
        #[serde(default)]
        source_tol: f64,
    },
}

impl<'de> Deserialize<'de> for BoundaryCloud {
    /// A bare array infers `d` from the coordinate count (`d = 1` when empty).
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let (d, points, tol) = match CloudWire::deserialize(de)? {
            CloudWire::Points(p) => (p.first().map_or(1, |x| (x.len() / 2).max(1)), p, 0.0),
            CloudWire::Full { d, points, source_tol } => (d, points, source_tol),
        };
        BoundaryCloud::new(d, points, tol).map_err(serde::de::Error::custom)
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn to_complex(x: &[f64]) -> Vec<Complex64> {
    x.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect()
}

fn normalize(z: &mut [Complex64]) {
    let r = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for c in z.iter_mut() {
        *c /= r;
    }
}

/// Samples `Z_∂(f) = {z ∈ ∂𝔹_d : f(z) = 0}`.
///
/// For `d = 1` the circle is scanned on `resolution` angles and every local
/// minimum of `|f|` is refined by golden section and a Newton polish; `seed`
/// is unused. For `d ≥ 2`, `resolution` uniform random sphere points are
/// each moved by 10 projected Gauss–Newton steps and kept when `|f| < tol`.
pub fn sample_zero_set(f: &Polynomial, resolution: usize, tol: f64, seed: u64) -> Result<BoundaryCloud> {
    if f.is_zero() {
        return Err(Error::DegenerateInput("f is the zero polynomial".into()));
    }
    if resolution < 3 {
        return Err(Error::arg("resolution must be at least 3"));
    }
    if !(tol > 0.0) {
        return Err(Error::arg(format!("tolerance must be positive, got {tol}")));
    }
    let d = f.dim();
    let raw: Vec<Vec<Complex64>> = if d == 1 {
        circle_zeros(f, resolution, tol)?
    } else {
        sphere_zeros(f, resolution, tol, seed)?
    };
    let mut cloud = BoundaryCloud::from_complex(d, &raw, tol)?;
    cloud = cloud.dedup();
    Ok(cloud)
}

fn circle_zeros(f: &Polynomial, resolution: usize, tol: f64) -> Result<Vec<Vec<Complex64>>> {
    let at = |t: f64| -> f64 { f.evaluate(&[Complex64::from_polar(1.0, t)]).map(|v| v.norm()).unwrap_or(f64::NAN) };
    let h = 2.0 * PI / resolution as f64;
    let vals: Vec<f64> = (0..resolution).map(|i| at(i as f64 * h)).collect();
    let df = f.partial(0);
    let mut out = Vec::new();
    for i in 0..resolution {
        let prev = vals[(i + resolution - 1) % resolution];
        let next = vals[(i + 1) % resolution];
        if !(vals[i] <= prev && vals[i] < next) {
            continue;
        }
        let t = golden_min(&at, (i as f64 - 1.0) * h, (i as f64 + 1.0) * h);
        let mut best = Complex64::from_polar(1.0, t);
        let mut best_val = at(t);
        // Newton in the plane, kept only if it lands back on the circle
        let mut z = best;
        for _ in 0..50 {
            let fz = f.evaluate(&[z])?;
            let dz = df.evaluate(&[z])?;
            if fz.norm() == 0.0 || dz.norm() == 0.0 {
                break;
            }
            z -= fz / dz;
        }
        if (z.norm() - 1.0).abs() < 1e-6 {
            let p = z / z.norm();
            let v = f.evaluate(&[p])?.norm();
            if v < best_val {
                best = p;
                best_val = v;
            }
        }
        if best_val < tol {
            out.push(vec![best]);
        }
    }
    Ok(out)
}

fn golden_min(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut e = a + r * (b - a);
    let (mut gc, mut ge) = (g(c), g(e));
    while b - a > 1e-14 {
        if gc < ge {
            b = e;
            e = c;
            ge = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = e;
            gc = ge;
            e = a + r * (b - a);
            ge = g(e);
        }
    }
    0.5 * (a + b)
}

fn sphere_zeros(f: &Polynomial, resolution: usize, tol: f64, seed: u64) -> Result<Vec<Vec<Complex64>>> {
    let d = f.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<Vec<Complex64>> = (0..resolution)
        .map(|_| {
            let mut z: Vec<Complex64> = (0..d)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re, im)
                })
                .collect();
            normalize(&mut z);
            z
        })
        .collect();
    let grads: Vec<Polynomial> = (0..d).map(|j| f.partial(j)).collect();
    let refined: Vec<Option<Vec<Complex64>>> = starts
        .into_par_iter()
        .map(|mut z| {
            for _ in 0..10 {
                if !sphere_newton_step(f, &grads, &mut z) {
                    break;
                }
            }
            let v = f.evaluate(&z).ok()?.norm();
            (v < tol).then_some(z)
        })
        .collect();
    Ok(refined.into_iter().flatten().collect())
}

/// Minimum-norm real step solving the linearized `f = 0` tangentially to
/// the sphere, followed by renormalization. Returns `false` once stalled.
fn sphere_newton_step(f: &Polynomial, grads: &[Polynomial], z: &mut [Complex64]) -> bool {
    let d = z.len();
    let (Ok(fz), Ok(a)) = (
        f.evaluate(z),
        grads.iter().map(|g| g.evaluate(z)).collect::<Result<Vec<_>>>(),
    ) else {
        return false;
    };
    if fz.norm() == 0.0 {
        return false;
    }
    // unknowns (Re h_1..Re h_d, Im h_1..Im h_d)
    let mut jac = DMatrix::<f64>::zeros(3, 2 * d);
    for j in 0..d {
        jac[(0, j)] = a[j].re;
        jac[(0, d + j)] = -a[j].im;
        jac[(1, j)] = a[j].im;
        jac[(1, d + j)] = a[j].re;
        jac[(2, j)] = z[j].re;
        jac[(2, d + j)] = z[j].im;
    }
    let rhs = DVector::from_vec(vec![-fz.re, -fz.im, 0.0]);
    let Ok(h) = jac.svd(true, true).solve(&rhs, 1e-12) else {
        return false;
    };
    for j in 0..d {
        z[j] += Complex64::new(h[j], h[d + j]);
    }
    normalize(z);
    true
}

/// How the `i = j` terms of the discrete energy are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelfEnergy {
    /// `K(x_i, x_i) = 0`.
    Excluded,
    /// `K(x_i, x_i) = K(r_i)`, the kernel at the effective self-distance of
    /// a uniform segment whose length is the nearest-neighbour spacing.
    Cell,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EquilibriumResult {
    pub weights: Vec<f64>,
    /// `None` when infinite (fewer than two distinct points).
    pub energy: Option<f64>,
    pub capacity: f64,
    pub alpha: f64,
    pub iterations: usize,
    pub kkt_gap: f64,
    pub converged: bool,
    /// Fewer than two distinct points; capacity 0 by convention.
    pub degenerate: bool,
    pub distinct_points: usize,
    pub self_energy: SelfEnergy,
}

/// Riesz (`α > 0`) or logarithmic (`α = 0`) kernel at distance `r`.
fn kernel(alpha: f64, r: f64) -> f64 {
    if alpha == 0.0 {
        -r.ln()
    } else {
        r.powf(-alpha)
    }
}

/// Effective self-distance factor of a unit segment under the kernel:
/// `K(κ h)` equals the mean of `K` over a segment of length `h`.
fn cell_factor(alpha: f64) -> f64 {
    if alpha == 0.0 {
        (-1.5f64).exp()
    } else if alpha < 1.0 {
        ((1.0 - alpha) * (2.0 - alpha) / 2.0).powf(1.0 / alpha)
    } else {
        0.5
    }
}

/// Minimizes `Σ_{i,j} w_i w_j K(x_i, x_j)` over the probability simplex by
/// away-step conditional gradient with exact line search, from uniform weights.
pub fn riesz_equilibrium(cloud: &BoundaryCloud, alpha: f64, max_iter: usize, tol: f64) -> Result<EquilibriumResult> {
    riesz_equilibrium_with(cloud, alpha, max_iter, tol, SelfEnergy::Cell)
}

pub fn riesz_equilibrium_with(
    cloud: &BoundaryCloud,
    alpha: f64,
    max_iter: usize,
    tol: f64,
    self_energy: SelfEnergy,
) -> Result<EquilibriumResult> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::arg(format!("alpha must be nonnegative, got {alpha}")));
    }
    if !(tol > 0.0) {
        return Err(Error::arg(format!("tolerance must be positive, got {tol}")));
    }
    let cloud = cloud.dedup();
    let n = cloud.len();
    if n < 2 {
        return Ok(EquilibriumResult {
            weights: vec![1.0; n],
            energy: None,
            capacity: 0.0,
            alpha,
            iterations: 0,
            kkt_gap: 0.0,
            converged: true,
            degenerate: true,
            distinct_points: n,
            self_energy,
        });
    }
    let pts = cloud.points();
    let diag: Vec<f64> = match self_energy {
        SelfEnergy::Excluded => vec![0.0; n],
        SelfEnergy::Cell => {
            let kappa = cell_factor(alpha);
            (0..n)
                .into_par_iter()
                .map(|i| {
                    let h = (0..n)
                        .filter(|&j| j != i)
                        .map(|j| dist(&pts[i], &pts[j]))
                        .fold(f64::INFINITY, f64::min);
                    kernel(alpha, kappa * h)
                })
                .collect()
        }
    };
    let column = |j: usize| -> Vec<f64> {
        (0..n)
            .map(|i| if i == j { diag[i] } else { kernel(alpha, dist(&pts[i], &pts[j])) })
            .collect()
    };
    // dense kernel while it fits comfortably, columns on demand otherwise
    let dense: Option<Vec<Vec<f64>>> = (n <= 2048).then(|| (0..n).into_par_iter().map(column).collect());
    let col = |j: usize| -> std::borrow::Cow<'_, [f64]> {
        match &dense {
            Some(k) => std::borrow::Cow::Borrowed(&k[j][..]),
            None => std::borrow::Cow::Owned(column(j)),
        }
    };

    let mut w = vec![1.0 / n as f64; n];
    // g = K w, rows summed in a fixed order so results do not depend on threads
    let mut g: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| (0..n).map(|j| col(j)[i]).sum::<f64>() / n as f64)
        .collect();
    let mut energy: f64 = w.iter().zip(&g).map(|(a, b)| a * b).sum();
    let mut gap = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iter {
        let s = argmin(&g, |_| true);
        let a = argmax(&g, |i| w[i] > 0.0);
        let gap_fw = energy - g[s];
        let gap_away = g[a] - energy;
        gap = 2.0 * gap_fw;
        if gap <= tol {
            break;
        }
        iterations += 1;
        if gap_fw >= gap_away {
            // direction e_s − w
            let curv = diag[s] - 2.0 * g[s] + energy;
            let step = if curv <= 0.0 { 1.0 } else { (gap_fw / curv).min(1.0) };
            let ks = col(s);
            for i in 0..n {
                w[i] *= 1.0 - step;
                g[i] = (1.0 - step) * g[i] + step * ks[i];
            }
            w[s] += step;
        } else {
            // direction w − e_a
            let max_step = if w[a] < 1.0 { w[a] / (1.0 - w[a]) } else { f64::INFINITY };
            let curv = energy - 2.0 * g[a] + diag[a];
            let step = if curv <= 0.0 { max_step } else { (gap_away / curv).min(max_step) };
            let ka = col(a);
            for i in 0..n {
                w[i] *= 1.0 + step;
                g[i] = (1.0 + step) * g[i] - step * ka[i];
            }
            w[a] -= step;
            if step == max_step || w[a] < 0.0 {
                w[a] = 0.0;
            }
        }
        energy = w.iter().zip(&g).map(|(a, b)| a * b).sum();
    }
    let capacity = if alpha == 0.0 { (-energy).exp() } else { 1.0 / energy };
    Ok(EquilibriumResult {
        weights: w,
        energy: Some(energy),
        capacity,
        alpha,
        iterations,
        kkt_gap: gap,
        converged: gap <= tol,
        degenerate: false,
        distinct_points: n,
        self_energy,
    })
}

fn argmin(v: &[f64], ok: impl Fn(usize) -> bool) -> usize {
    let mut best = usize::MAX;
    for i in 0..v.len() {
        if ok(i) && (best == usize::MAX || v[i] < v[best]) {
            best = i;
        }
    }
    best
}

fn argmax(v: &[f64], ok: impl Fn(usize) -> bool) -> usize {
    let mut best = usize::MAX;
    for i in 0..v.len() {
        if ok(i) && (best == usize::MAX || v[i] > v[best]) {
            best = i;
        }
    }
    best
}

/// Sample count used by [`paper_capacity`].
pub const PAPER_CAPACITY_SAMPLES: usize = 1 << 16;

/// Normalized surface measure of the `eps_nbhd`-neighbourhood of the cloud.
///
/// `alpha` is accepted for interface symmetry with the Riesz capacity and
/// does not enter the value.
pub fn paper_capacity(cloud: &BoundaryCloud, alpha: f64, eps_nbhd: f64) -> Result<f64> {
    paper_capacity_with_samples(cloud, alpha, eps_nbhd, PAPER_CAPACITY_SAMPLES)
}

pub fn paper_capacity_with_samples(cloud: &BoundaryCloud, alpha: f64, eps_nbhd: f64, samples: usize) -> Result<f64> {
    if !(eps_nbhd > 0.0) {
        return Err(Error::arg(format!("neighbourhood radius must be positive, got {eps_nbhd}")));
    }
    if !(alpha >= 0.0) {
        return Err(Error::arg(format!("alpha must be nonnegative, got {alpha}")));
    }
    if samples == 0 {
        return Err(Error::arg("need at least one sample"));
    }
    if cloud.is_empty() {
        return Ok(0.0);
    }
    let grid = CellGrid::new(cloud.points(), eps_nbhd);
    let d = cloud.d();
    let hits: usize = (0..samples)
        .into_par_iter()
        .filter(|&k| grid.within(&quasi_uniform_sphere(d, k, samples), eps_nbhd))
        .count();
    Ok(hits as f64 / samples as f64)
}

/// The `k`-th of `n` quasi-uniform sphere points: equispaced angles for
/// `d = 1`, Halton points pushed through Box–Muller otherwise.
pub fn quasi_uniform_sphere(d: usize, k: usize, n: usize) -> Vec<f64> {
    if d == 1 {
        let t = 2.0 * PI * (k as f64 + 0.5) / n as f64;
        return vec![t.cos(), t.sin()];
    }
    let mut x = Vec::with_capacity(2 * d);
    for j in 0..d {
        let u1 = halton(k + 1, PRIMES[2 * j]);
        let u2 = halton(k + 1, PRIMES[2 * j + 1]);
        let r = (-2.0 * u1.ln()).sqrt();
        x.push(r * (2.0 * PI * u2).cos());
        x.push(r * (2.0 * PI * u2).sin());
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter().map(|v| v / norm).collect()
}

const PRIMES: [usize; 32] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107,
    109, 113, 127, 131,
];

fn halton(mut i: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Uniform hash grid for fixed-radius neighbour queries.
struct CellGrid<'a> {
    cell: f64,
    cells: HashMap<Vec<i64>, Vec<&'a [f64]>>,
    dim: usize,
}

impl<'a> CellGrid<'a> {
    fn new(points: &'a [Vec<f64>], cell: f64) -> Self {
        let mut cells: HashMap<Vec<i64>, Vec<&[f64]>> = HashMap::new();
        for p in points {
            cells.entry(Self::key(p, cell)).or_default().push(p);
        }
        CellGrid {
            cell,
            cells,
            dim: points.first().map_or(0, Vec::len),
        }
    }

    fn key(p: &[f64], cell: f64) -> Vec<i64> {
        p.iter().map(|x| (x / cell).floor() as i64).collect()
    }

    fn within(&self, x: &[f64], r: f64) -> bool {
        let base = Self::key(x, self.cell);
        let mut offset = vec![-1i64; self.dim];
        loop {
            let k: Vec<i64> = base.iter().zip(&offset).map(|(b, o)| b + o).collect();
            if let Some(ps) = self.cells.get(&k) {
                if ps.iter().any(|p| dist(p, x) <= r) {
                    return true;
                }
            }
            // odometer over {-1, 0, 1}^dim
            let mut i = 0;
            loop {
                if i == self.dim {
                    return false;
                }
                offset[i] += 1;
                if offset[i] <= 1 {
                    break;
                }
                offset[i] = -1;
                i += 1;
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BoxDimension {
    pub dimension: f64,
    pub r_squared: f64,
    pub scales: Vec<u32>,
    pub counts: Vec<usize>,
}

/// Slope of `log N(j)` against `j log 2`, `N(j)` the number of occupied
/// cubes of side `2^{-j}`, fitted over `j_min..=j_max`.
pub fn box_dimension(cloud: &BoundaryCloud, j_min: u32, j_max: u32) -> Result<BoxDimension> {
    if cloud.is_empty() {
        return Err(Error::DegenerateInput("box counting needs a nonempty cloud".into()));
    }
    if !(j_min >= 1 && j_max > j_min) {
        return Err(Error::arg(format!("need 1 ≤ jMin < jMax, got {j_min}, {j_max}")));
    }
    let scales: Vec<u32> = (j_min..=j_max).collect();
    let counts: Vec<usize> = scales
        .iter()
        .map(|&j| {
            let s = f64::from(j).exp2();
            let boxes: HashSet<Vec<i64>> = cloud
                .points()
                .iter()
                .map(|p| p.iter().map(|x| (x * s).floor() as i64).collect())
                .collect();
            boxes.len()
        })
        .collect();
    let xs: Vec<f64> = scales.iter().map(|&j| f64::from(j) * 2f64.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(BoxDimension {
        dimension: slope,
        r_squared,
        scales,
        counts,
    })
}

/// Searches the open ball for a zero of `f`: a deterministic grid that
/// contains the origin, then Newton from the eight smallest grid values.
/// Zeros within `1e-6` of the sphere are not reported.
pub fn interior_zero_probe(f: &Polynomial) -> Result<Option<Vec<Complex64>>> {
    let d = f.dim();
    let mut grid: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); d]];
    if d == 1 {
        for k in 1..32 {
            let r = k as f64 / 32.0;
            for a in 0..64 {
                grid.push(vec![Complex64::from_polar(r, 2.0 * PI * a as f64 / 64.0)]);
            }
        }
    } else {
        let n = 4096;
        for k in 0..n {
            let x = quasi_uniform_sphere(d, k, n);
            let r = halton(k + 1, PRIMES[2 * d % PRIMES.len()]).powf(1.0 / (2 * d) as f64) * (1.0 - 1e-3);
            grid.push(to_complex(&x).into_iter().map(|c| c * r).collect());
        }
    }
    let mut scored: Vec<(f64, usize)> = grid
        .iter()
        .enumerate()
        .map(|(i, z)| f.evaluate(z).map(|v| (v.norm(), i)))
        .collect::<Result<_>>()?;
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let grads: Vec<Polynomial> = (0..d).map(|j| f.partial(j)).collect();
    let inside = |z: &[Complex64]| z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt() < 1.0 - 1e-6;
    for &(_, i) in scored.iter().take(8) {
        let mut z = grid[i].clone();
        for _ in 0..60 {
            let fz = f.evaluate(&z)?;
            if fz.norm() < 1e-14 {
                break;
            }
            let a: Vec<Complex64> = grads.iter().map(|g| g.evaluate(&z)).collect::<Result<_>>()?;
            let an: f64 = a.iter().map(|c| c.norm_sqr()).sum();
            if an == 0.0 {
                break;
            }
            // minimum-norm complex step for the linearization
            for (zj, aj) in z.iter_mut().zip(&a) {
                *zj -= fz * aj.conj() / an;
            }
        }
        if f.evaluate(&z)?.norm() < 1e-10 && inside(&z) {
            return Ok(Some(z));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObstructionVerdict {
    #[serde(rename = "obstruction detected")]
    ObstructionDetected,
    #[serde(rename = "consistent with cyclicity")]
    ConsistentWithCyclicity,
    #[serde(rename = "tension")]
    Tension,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ObstructionParams {
    pub n_max: usize,
    pub alpha: f64,
    pub capacity_threshold: f64,
    pub resolution: usize,
    pub zero_tol: Option<f64>,
    pub seed: u64,
    pub eps_nbhd: f64,
    pub j_min: u32,
    pub j_max: u32,
    pub sweep_tol: f64,
    pub max_iter: usize,
    pub equilibrium_tol: f64,
}

impl Default for ObstructionParams {
    fn default() -> Self {
        ObstructionParams {
            n_max: 20,
            alpha: 0.0,
            capacity_threshold: 1e-3,
            resolution: 4096,
            zero_tol: None,
            seed: 0,
            eps_nbhd: 0.01,
            j_min: 2,
            j_max: 8,
            sweep_tol: DEFAULT_CYCLIC_TOL,
            max_iter: 200_000,
            equilibrium_tol: 1e-8,
        }
    }
}

/// Heuristic comparison of zero-set geometry with the index sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ObstructionReport {
    pub sweep: SweepReport,
    pub cloud_size: usize,
    pub cloud: BoundaryCloud,
    pub riesz_capacity: f64,
    pub capacity_degenerate: bool,
    pub paper_capacity: f64,
    pub box_dimension: Option<BoxDimension>,
    pub interior_zero: Option<Vec<Complex64>>,
    pub verdict: ObstructionVerdict,
}

/// Verdicts: "obstruction detected" when the sweep plateaus and either the
/// capacity exceeds the threshold or an interior zero was found;
/// "consistent with cyclicity" when the capacity is below the threshold,
/// no interior zero was found, and the sweep is cyclic or decreasing;
/// "tension" otherwise.
pub fn obstruction_report(spec: &SpaceSpec, f: &Polynomial, params: &ObstructionParams) -> Result<ObstructionReport> {
    let d = spec.d();
    if f.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: f.dim(),
        });
    }
    let sweep = index_sweep(spec, f, params.n_max, params.sweep_tol)?;
    let tol = params.zero_tol.unwrap_or_else(|| default_zero_tol(d));
    let cloud = sample_zero_set(f, params.resolution, tol, params.seed)?;
    let eq = riesz_equilibrium(&cloud, params.alpha, params.max_iter, params.equilibrium_tol)?;
    let paper = paper_capacity(&cloud, params.alpha.max(f64::MIN_POSITIVE), params.eps_nbhd)?;
    let dimension = if cloud.is_empty() {
        None
    } else {
        Some(box_dimension(&cloud, params.j_min, params.j_max)?)
    };
    let interior = interior_zero_probe(f)?;
    let big = eq.capacity > params.capacity_threshold;
    let verdict = if sweep.verdict == Verdict::Plateau && (big || interior.is_some()) {
        ObstructionVerdict::ObstructionDetected
    } else if !big
        && interior.is_none()
        && (sweep.verdict == Verdict::NumericallyCyclic || sweep.is_decreasing())
    {
        ObstructionVerdict::ConsistentWithCyclicity
    } else {
        ObstructionVerdict::Tension
    };
    Ok(ObstructionReport {
        sweep,
        cloud_size: cloud.len(),
        cloud,
        riesz_capacity: eq.capacity,
        capacity_degenerate: eq.degenerate,
        paper_capacity: paper,
        box_dimension: dimension,
        interior_zero: interior,
        verdict,
    })
}
