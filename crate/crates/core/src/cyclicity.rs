//! Finite-degree cyclicity indices.
//!
//! For a degree budget `n` the index of `f` relative to a target `g` is
//!
//! ```text
//! C_n(g; f) = min { ‖g − φ f‖ : deg φ ≤ n }
//! ```
//!
//! which is an exact least-squares problem in any diagonal space. The
//! minimizers are the optimal polynomial approximants; `C_n(1; f)`
//! decreases to zero exactly when `f` is cyclic. Values at finite `n` are
//! upper bounds for the infimum over all multipliers; nothing here
//! certifies the limit.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lsq::{self, SolveMethod};
use crate::poly::{mult_operator_section, MultiIndex, Polynomial};
use crate::spaces::{MomentSequence, SpaceSpec, WeightLaw};

/// Default threshold below which a sweep is called numerically cyclic.
pub const DEFAULT_CYCLIC_TOL: f64 = 1e-3;
/// Number of trailing degrees inspected for a plateau.
pub const PLATEAU_WINDOW: usize = 5;
/// Maximum spread of the trailing window for a plateau.
pub const PLATEAU_VARIATION: f64 = 1e-6;

/// Optimal multiplier at a fixed degree budget.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ApproximantResult {
    pub n: usize,
    pub phi: Polynomial,
    pub residual: f64,
    pub gram_condition: f64,
    pub solve_method: SolveMethod,
    /// `‖g‖²`.
    pub target_norm_sq: f64,
    /// `Re⟨g, φ* f⟩`; the normal equations give `residual² = ‖g‖² − explained`.
    pub explained: f64,
}

fn check_dim(spec: &SpaceSpec, p: &Polynomial) -> Result<()> {
    if p.dim() != spec.d() {
        return Err(Error::DimensionMismatch {
            expected: spec.d(),
            found: p.dim(),
        });
    }
    Ok(())
}

/// Distance from `g` to `{φ f : deg φ ≤ n}`.
pub fn subspace_distance(
    spec: &SpaceSpec,
    g: &Polynomial,
    f: &Polynomial,
    n: usize,
) -> Result<ApproximantResult> {
    check_dim(spec, g)?;
    check_dim(spec, f)?;
    if f.is_zero() {
        return Err(Error::DegenerateInput("f is the zero polynomial".into()));
    }
    let top = (n + f.degree()).max(g.degree());
    if top > spec.max_degree() {
        return Err(Error::Range {
            degree: top,
            max: spec.max_degree(),
        });
    }
    let basis = MultiIndex::up_to_degree(spec.d(), n);
    let columns: Vec<Vec<(MultiIndex, Complex64)>> = basis
        .iter()
        .map(|beta| f.terms().map(|(a, c)| (a.checked_add(beta), *c)).collect())
        .collect();
    let target: Vec<(MultiIndex, Complex64)> = g.terms().map(|(a, c)| (a.clone(), *c)).collect();
    let sol = lsq::solve(&target, &columns, |a| spec.monomial_norm_sq(a))?;
    let phi = Polynomial::from_terms(spec.d(), basis.into_iter().zip(sol.coeffs.iter().copied()))?;
    Ok(ApproximantResult {
        n,
        phi,
        residual: sol.residual,
        gram_condition: sol.gram_condition,
        solve_method: sol.method,
        target_norm_sq: sol.target_norm_sq,
        explained: sol.explained,
    })
}

/// `C_n(f) = min ‖1 − φ f‖` over `deg φ ≤ n`.
pub fn cyclicity_index(spec: &SpaceSpec, f: &Polynomial, n: usize) -> Result<ApproximantResult> {
    subspace_distance(spec, &Polynomial::one(spec.d()), f, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    None,
    /// `a + b / log(n + 2)`
    InverseLog,
    /// `a + b / (n + 2)^c`
    InversePoly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    NumericallyCyclic,
    Plateau,
    Inconclusive,
}

/// One extrapolation model fitted to the tail of a sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Fit {
    pub model: FitModel,
    pub a: f64,
    pub b: f64,
    /// Exponent `c` for [`FitModel::InversePoly`].
    pub exponent: Option<f64>,
    pub rss: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepReport {
    pub degrees: Vec<usize>,
    pub residuals: Vec<f64>,
    pub gram_conditions: Vec<f64>,
    pub solve_methods: Vec<SolveMethod>,
    pub fits: Vec<Fit>,
    pub fit_model: FitModel,
    pub fitted_limit: Option<f64>,
    pub verdict: Verdict,
    pub tol: f64,
    pub plateau_window: usize,
    pub plateau_variation: f64,
}

impl SweepReport {
    pub fn fit(&self, model: FitModel) -> Option<&Fit> {
        self.fits.iter().find(|f| f.model == model)
    }

    /// Residuals strictly decrease across the trailing plateau window.
    pub fn is_decreasing(&self) -> bool {
        let r = &self.residuals;
        let start = r.len().saturating_sub(PLATEAU_WINDOW);
        r.len() >= 2 && r[start..].windows(2).all(|w| w[1] < w[0])
    }

    /// CSV with columns `degree,residual,gramCondition,solveMethod`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("degree,residual,gramCondition,solveMethod\n");
        for i in 0..self.degrees.len() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                self.degrees[i],
                fmt_float(self.residuals[i]),
                fmt_float(self.gram_conditions[i]),
                self.solve_methods[i]
            ));
        }
        out
    }
}

/// Shortest round-trip representation, matching the JSON output.
pub fn fmt_float(x: f64) -> String {
    serde_json::to_string(&x).unwrap_or_else(|_| x.to_string())
}

/// `C_n(f)` for `n = 0..=n_max`, a verdict, and tail extrapolations.
///
/// Degrees are solved in parallel; results are ordered by degree.
pub fn index_sweep(spec: &SpaceSpec, f: &Polynomial, n_max: usize, tol: f64) -> Result<SweepReport> {
    if !(tol > 0.0) {
        return Err(Error::arg("tolerance must be positive"));
    }
    let results: Vec<ApproximantResult> = (0..=n_max)
        .into_par_iter()
        .map(|n| cyclicity_index(spec, f, n))
        .collect::<Result<_>>()?;
    let degrees: Vec<usize> = (0..=n_max).collect();
    let residuals: Vec<f64> = results.iter().map(|r| r.residual).collect();
    let verdict = classify(&residuals, tol);
    let fits = fit_tail(&degrees, &residuals);
    let best = fits
        .iter()
        .min_by(|a, b| a.rss.total_cmp(&b.rss))
        .cloned();
    Ok(SweepReport {
        gram_conditions: results.iter().map(|r| r.gram_condition).collect(),
        solve_methods: results.iter().map(|r| r.solve_method).collect(),
        degrees,
        residuals,
        fit_model: best.as_ref().map_or(FitModel::None, |b| b.model),
        fitted_limit: best.map(|b| b.a.max(0.0)),
        fits,
        verdict,
        tol,
        plateau_window: PLATEAU_WINDOW,
        plateau_variation: PLATEAU_VARIATION,
    })
}

fn classify(residuals: &[f64], tol: f64) -> Verdict {
    let Some(&last) = residuals.last() else {
        return Verdict::Inconclusive;
    };
    if last < tol {
        return Verdict::NumericallyCyclic;
    }
    if residuals.len() >= PLATEAU_WINDOW {
        let tail = &residuals[residuals.len() - PLATEAU_WINDOW..];
        let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
        if hi - lo < PLATEAU_VARIATION {
            return Verdict::Plateau;
        }
    }
    Verdict::Inconclusive
}

/// Linear least squares for `y ≈ a + b x`; returns `(a, b, rss)`.
fn affine_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(u, v)| (u - mx) * (v - my)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mx;
    let rss = x.iter().zip(y).map(|(u, v)| (v - a - b * u).powi(2)).sum();
    (a, b, rss)
}

/// Fits both extrapolation models on the last half of the sweep.
pub fn fit_tail(degrees: &[usize], residuals: &[f64]) -> Vec<Fit> {
    let start = degrees.len() / 2;
    let n: Vec<f64> = degrees[start..].iter().map(|&k| k as f64 + 2.0).collect();
    let y = &residuals[start..];
    if n.len() < 3 {
        return Vec::new();
    }
    let xs: Vec<f64> = n.iter().map(|v| 1.0 / v.ln()).collect();
    let (a, b, rss) = affine_fit(&xs, y);
    let log_fit = Fit {
        model: FitModel::InverseLog,
        a,
        b,
        exponent: None,
        rss,
    };

    let poly_at = |c: f64| {
        let xs: Vec<f64> = n.iter().map(|v| v.powf(-c)).collect();
        affine_fit(&xs, y)
    };
    let mut best_c = 0.05;
    let mut best_rss = f64::INFINITY;
    for i in 1..=120 {
        let c = 0.05 * i as f64;
        let (_, _, rss) = poly_at(c);
        if rss < best_rss {
            best_rss = rss;
            best_c = c;
        }
    }
    // golden-section refinement around the grid minimum
    let (mut lo, mut hi) = ((best_c - 0.05).max(1e-3), best_c + 0.05);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..60 {
        let c1 = hi - phi * (hi - lo);
        let c2 = lo + phi * (hi - lo);
        if poly_at(c1).2 <= poly_at(c2).2 {
            hi = c2;
        } else {
            lo = c1;
        }
    }
    let refined = 0.5 * (lo + hi);
    let c = if poly_at(refined).2 <= best_rss { refined } else { best_c };
    let (a, b, rss) = poly_at(c);
    vec![
        log_fit,
        Fit {
            model: FitModel::InversePoly,
            a,
            b,
            exponent: Some(c),
            rss,
        },
    ]
}

/// Finite-section lower bound for `‖φ‖_Mult`, reported with its section sizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MultiplierNormBound {
    pub lower_bound: f64,
    pub n_in: usize,
    pub n_out: usize,
}

/// Top singular value of the section with `n_out = n_in + deg φ`.
pub fn multiplier_norm_lower(spec: &SpaceSpec, phi: &Polynomial, n_in: usize) -> Result<MultiplierNormBound> {
    let n_out = n_in + phi.degree();
    let m = mult_operator_section(spec, phi, n_in, n_out)?;
    Ok(MultiplierNormBound {
        lower_bound: lsq::top_singular_value(&m),
        n_in,
        n_out,
    })
}

/// Realized form of `‖1 − φ g‖ ≤ ε + M δ` for the optimal `φ` of `f`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PerturbationReport {
    pub n: usize,
    /// `‖1 − φ* f‖`.
    pub epsilon: f64,
    /// `‖f − g‖`.
    pub delta: f64,
    /// Section lower bound for `‖φ*‖_Mult`.
    pub multiplier_norm: MultiplierNormBound,
    /// `‖φ*(f − g)‖ / ‖f − g‖` (zero when `f = g`).
    pub realized_ratio: f64,
    /// `‖1 − φ* g‖`.
    pub perturbed_residual: f64,
    /// `ε + ratio·δ`.
    pub realized_bound: f64,
    /// `ε + M δ` with the section bound for `M`.
    pub section_bound: f64,
    pub slack: f64,
    pub holds: bool,
}

pub fn check_perturbation_bound(
    spec: &SpaceSpec,
    f: &Polynomial,
    g: &Polynomial,
    n: usize,
) -> Result<PerturbationReport> {
    check_dim(spec, g)?;
    if g.is_zero() {
        return Err(Error::DegenerateInput("g is the zero polynomial".into()));
    }
    if g.degree() + n > spec.max_degree() {
        return Err(Error::Range {
            degree: g.degree() + n,
            max: spec.max_degree(),
        });
    }
    let opt = cyclicity_index(spec, f, n)?;
    let phi = &opt.phi;
    let one = Polynomial::one(spec.d());
    let epsilon = spec.norm(&(&one - &(phi * f)))?;
    let diff = f - g;
    let delta = spec.norm(&diff)?;
    let realized_ratio = if delta > 0.0 {
        spec.norm(&(phi * &diff))? / delta
    } else {
        0.0
    };
    let perturbed_residual = spec.norm(&(&one - &(phi * g)))?;
    let n_in = spec.max_degree() - phi.degree();
    let multiplier_norm = multiplier_norm_lower(spec, phi, n_in)?;
    let realized_bound = epsilon + realized_ratio * delta;
    let slack = realized_bound - perturbed_residual;
    Ok(PerturbationReport {
        n,
        epsilon,
        delta,
        section_bound: epsilon + multiplier_norm.lower_bound * delta,
        multiplier_norm,
        realized_ratio,
        perturbed_residual,
        realized_bound,
        slack,
        holds: slack >= 0.0,
    })
}

/// A moment-perturbed copy of a Besov space.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PerturbedSpace {
    pub spec: SpaceSpec,
    pub requested_epsilon: f64,
    /// `max_j |m'[j]/m[j] − 1|` after the monotone repair.
    pub realized_epsilon: f64,
    pub seed: u64,
}

/// Multiplies each moment by an independent factor in `[1−ε, 1+ε]`, then
/// restores monotonicity with a running minimum.
///
/// The running minimum keeps every ratio inside `[1−ε, 1+ε]`: `m'[j]` is
/// some `m[i]u_i` with `i ≤ j`, and `m[i] ≥ m[j]`.
pub fn perturb_weights(spec: &SpaceSpec, epsilon: f64, seed: u64) -> Result<PerturbedSpace> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::arg(format!("epsilon must lie in [0, 1), got {epsilon}")));
    }
    let WeightLaw::DiagonalBesov(moments) = spec.law() else {
        return Err(Error::arg("weight perturbation needs a diagonal Besov space"));
    };
    let m = moments.as_slice();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perturbed = Vec::with_capacity(m.len());
    let mut running = f64::INFINITY;
    for &mj in m {
        let u = if epsilon > 0.0 {
            rng.random_range(1.0 - epsilon..=1.0 + epsilon)
        } else {
            1.0
        };
        running = running.min(mj * u);
        perturbed.push(running);
    }
    let realized_epsilon = m
        .iter()
        .zip(&perturbed)
        .map(|(a, b)| (b / a - 1.0).abs())
        .fold(0.0, f64::max);
    let new_spec = SpaceSpec::diagonal_besov(
        spec.d(),
        spec.order(),
        MomentSequence::new(perturbed)?,
        spec.max_degree(),
    )?;
    Ok(PerturbedSpace {
        spec: new_spec,
        requested_epsilon: epsilon,
        realized_epsilon,
        seed,
    })
}

/// Comparison of indices across two comparable weights.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WeightStabilityReport {
    pub n: usize,
    /// `max |c'_α / c_α − 1|` over the monomials involved.
    pub epsilon: f64,
    pub index_original: f64,
    pub index_perturbed: f64,
    /// `‖1 − φ_ω f‖_{ω'}` for the `ω`-optimal multiplier.
    pub cross_residual: f64,
    pub bound: f64,
    pub ratio: f64,
    pub holds: bool,
}

/// Checks `C_{n,ω'}(f) ≤ sqrt(1+ε)·C_{n,ω}(f) + 1e-10`.
pub fn check_weight_stability(
    spec: &SpaceSpec,
    perturbed: &SpaceSpec,
    f: &Polynomial,
    n: usize,
) -> Result<WeightStabilityReport> {
    if spec.d() != perturbed.d() {
        return Err(Error::DimensionMismatch {
            expected: spec.d(),
            found: perturbed.d(),
        });
    }
    let orig = cyclicity_index(spec, f, n)?;
    let pert = cyclicity_index(perturbed, f, n)?;
    let top = n + f.degree();
    let mut epsilon: f64 = 0.0;
    for alpha in MultiIndex::up_to_degree(spec.d(), top) {
        let r = perturbed.monomial_norm_sq(&alpha)? / spec.monomial_norm_sq(&alpha)?;
        epsilon = epsilon.max((r - 1.0).abs());
    }
    let one = Polynomial::one(spec.d());
    let cross_residual = perturbed.norm(&(&one - &(&orig.phi * f)))?;
    let bound = (1.0 + epsilon).sqrt() * orig.residual + 1e-10;
    let ratio = if orig.residual > 0.0 {
        pert.residual / orig.residual
    } else {
        f64::NAN
    };
    Ok(WeightStabilityReport {
        n,
        epsilon,
        index_original: orig.residual,
        index_perturbed: pert.residual,
        cross_residual,
        bound,
        ratio,
        holds: pert.residual <= bound,
    })
}

/// `dist(φ^k, [φ^{k+1}])` at degree budget `n`.
pub fn check_class_cn(spec: &SpaceSpec, phi: &Polynomial, k: u32, n: usize) -> Result<f64> {
    let need = (k as usize + 1) * phi.degree() + n;
    if need > spec.max_degree() {
        return Err(Error::Range {
            degree: need,
            max: spec.max_degree(),
        });
    }
    let g = phi.pow(k);
    let f = phi.pow(k + 1);
    Ok(subspace_distance(spec, &g, &f, n)?.residual)
}
