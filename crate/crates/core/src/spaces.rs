//! Radially weighted Besov spaces and the Drury–Arveson space in
//! diagonal form.
//!
//! Monomials are orthogonal in every space handled here, so a space is
//! fully described by its monomial weights `c_α = ‖z^α‖²`. For a radial
//! measure `dω = dμ(r) dσ(w)` with `σ` the normalized surface measure,
//!
//! ```text
//! ‖z^α‖² = |α|^{2N} · m[2|α|] · (d−1)! α! / (d−1+|α|)!      (|α| > 0)
//! ‖1‖²   = m[0]
//! ```
//!
//! where `m[j] = ∫ r^j dμ(r)`. The Drury–Arveson weights are `α!/|α|!`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{MultiIndex, Polynomial};

/// Largest `n` for which `n!` is finite in `f64`.
const MAX_FACTORIAL: usize = 170;

/// Moments `m[j] = ∫₀¹ r^j dμ(r)` of a radial measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct MomentSequence(Vec<f64>);

impl MomentSequence {
    /// Validates positivity and monotonicity.
    pub fn new(m: Vec<f64>) -> Result<Self> {
        if m.is_empty() {
            return Err(Error::arg("moment sequence is empty"));
        }
        for (j, &v) in m.iter().enumerate() {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::arg(format!("moment m[{j}] = {v} must be positive")));
            }
            if j > 0 && v > m[j - 1] {
                return Err(Error::arg(format!(
                    "moments must be nonincreasing: m[{j}] = {v} > m[{}] = {}",
                    j - 1,
                    m[j - 1]
                )));
            }
        }
        Ok(MomentSequence(m))
    }

    /// Point mass at `r = 1`: every moment equals one.
    pub fn point_mass(len: usize) -> Self {
        MomentSequence(vec![1.0; len])
    }

    /// `dμ = (β+1) r^β dr`, so `m[j] = (β+1)/(j+β+1)`.
    pub fn power_weight(beta: f64, len: usize) -> Self {
        MomentSequence((0..len).map(|j| (beta + 1.0) / (j as f64 + beta + 1.0)).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<'de> Deserialize<'de> for MomentSequence {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(de)?;
        MomentSequence::new(v).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeightLaw {
    DiagonalBesov(MomentSequence),
    DruryArveson,
    CustomDiagonal(BTreeMap<MultiIndex, f64>),
}

/// Named spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// `H²(𝔹_d)`: point mass at the boundary, `N = 0`.
    Hardy(usize),
    /// `dμ = 2r dr`, `N = 0`.
    Bergman(usize),
    /// `dμ = 2r dr`, `N = 1`.
    DirichletType(usize),
    DruryArveson(usize),
}

impl Preset {
    pub fn d(self) -> usize {
        match self {
            Preset::Hardy(d) | Preset::Bergman(d) | Preset::DirichletType(d) | Preset::DruryArveson(d) => d,
        }
    }

    pub fn build(self) -> Result<SpaceSpec> {
        let d = self.d();
        self.build_with_degree(default_max_degree(d))
    }

    pub fn build_with_degree(self, max_degree: usize) -> Result<SpaceSpec> {
        let d = self.d();
        let len = 2 * max_degree + 1;
        let mut spec = match self {
            Preset::Hardy(_) => {
                SpaceSpec::diagonal_besov(d, 0, MomentSequence::point_mass(len), max_degree)?
            }
            Preset::Bergman(_) => {
                SpaceSpec::diagonal_besov(d, 0, MomentSequence::power_weight(1.0, len), max_degree)?
            }
            Preset::DirichletType(_) => {
                SpaceSpec::diagonal_besov(d, 1, MomentSequence::power_weight(1.0, len), max_degree)?
            }
            Preset::DruryArveson(_) => SpaceSpec::drury_arveson(d, max_degree)?,
        };
        spec.preset = Some(self);
        Ok(spec)
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::Hardy(d) => write!(f, "hardy({d})"),
            Preset::Bergman(d) => write!(f, "bergman({d})"),
            Preset::DirichletType(d) => write!(f, "dirichlet_type({d})"),
            Preset::DruryArveson(d) => write!(f, "drury_arveson({d})"),
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    /// Parses `hardy(2)`, `bergman(1)`, `dirichlet_type(1)`, `drury_arveson(3)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, rest) = s
            .split_once('(')
            .ok_or_else(|| Error::arg(format!("preset `{s}` must look like name(d)")))?;
        let d: usize = rest
            .strip_suffix(')')
            .and_then(|x| x.trim().parse().ok())
            .ok_or_else(|| Error::arg(format!("preset `{s}` has no valid dimension")))?;
        if d == 0 {
            return Err(Error::arg("dimension must be at least 1"));
        }
        match name.trim() {
            "hardy" => Ok(Preset::Hardy(d)),
            "bergman" => Ok(Preset::Bergman(d)),
            "dirichlet_type" | "dirichlet" => Ok(Preset::DirichletType(d)),
            "drury_arveson" => Ok(Preset::DruryArveson(d)),
            other => Err(Error::arg(format!("unknown preset `{other}`"))),
        }
    }
}

pub fn default_max_degree(d: usize) -> usize {
    if d == 1 {
        64
    } else {
        20
    }
}

fn factorials() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut f = vec![1.0; MAX_FACTORIAL + 1];
        for k in 1..=MAX_FACTORIAL {
            f[k] = f[k - 1] * k as f64;
        }
        f
    })
}

/// `∫_{∂𝔹_d} |w^α|² dσ(w) = (d−1)! α! / (d−1+|α|)!` for normalized `σ`.
pub fn sphere_moment(d: usize, alpha: &MultiIndex) -> Result<f64> {
    if d == 0 {
        return Err(Error::arg("dimension must be at least 1"));
    }
    if alpha.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: alpha.dim(),
        });
    }
    let k = alpha.degree();
    if d - 1 + k > MAX_FACTORIAL {
        return Err(Error::Range {
            degree: k,
            max: MAX_FACTORIAL + 1 - d,
        });
    }
    Ok(sphere_moment_with(factorials(), d, alpha))
}

fn sphere_moment_with(fact: &[f64], d: usize, alpha: &MultiIndex) -> f64 {
    let k = alpha.degree();
    let alpha_fact: f64 = alpha.exponents().iter().map(|&e| fact[e as usize]).product();
    fact[d - 1] * alpha_fact / fact[d - 1 + k]
}

/// A diagonalized Hilbert function space on `𝔹_d`.
///
/// Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceSpec {
    d: usize,
    order: u32,
    law: WeightLaw,
    max_degree: usize,
    preset: Option<Preset>,
    /// `k^{2N} m[2k]` for `k ≥ 1`, `m[0]` at `k = 0` (Besov only).
    radial: Vec<f64>,
}

impl SpaceSpec {
    /// `B^N_ω` for a radial measure given by its moments.
    ///
    /// Needs `m[0..=2·max_degree]`.
    pub fn diagonal_besov(
        d: usize,
        order: u32,
        moments: MomentSequence,
        max_degree: usize,
    ) -> Result<Self> {
        check_shape(d, max_degree)?;
        if moments.len() < 2 * max_degree + 1 {
            return Err(Error::arg(format!(
                "need {} moments for max degree {max_degree}, got {}",
                2 * max_degree + 1,
                moments.len()
            )));
        }
        let m = moments.as_slice();
        let radial = (0..=max_degree)
            .map(|k| {
                if k == 0 {
                    m[0]
                } else {
                    (k as f64).powi(2 * order as i32) * m[2 * k]
                }
            })
            .collect();
        Ok(SpaceSpec {
            d,
            order,
            law: WeightLaw::DiagonalBesov(moments),
            max_degree,
            preset: None,
            radial,
        })
    }

    pub fn drury_arveson(d: usize, max_degree: usize) -> Result<Self> {
        check_shape(d, max_degree)?;
        Ok(SpaceSpec {
            d,
            order: 0,
            law: WeightLaw::DruryArveson,
            max_degree,
            preset: None,
            radial: Vec::new(),
        })
    }

    /// Explicit weights; every multi-index of degree `≤ max_degree` must be present.
    pub fn custom_diagonal(
        d: usize,
        weights: BTreeMap<MultiIndex, f64>,
        max_degree: usize,
    ) -> Result<Self> {
        check_shape(d, max_degree)?;
        for (alpha, &w) in &weights {
            if alpha.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: alpha.dim(),
                });
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::arg(format!("weight at {alpha:?} must be positive, got {w}")));
            }
        }
        for alpha in MultiIndex::up_to_degree(d, max_degree) {
            if !weights.contains_key(&alpha) {
                return Err(Error::arg(format!("missing weight for {alpha:?}")));
            }
        }
        Ok(SpaceSpec {
            d,
            order: 0,
            law: WeightLaw::CustomDiagonal(weights),
            max_degree,
            preset: None,
            radial: Vec::new(),
        })
    }

    pub fn preset(p: Preset) -> Result<Self> {
        p.build()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Radial derivative order `N`.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn law(&self) -> &WeightLaw {
        &self.law
    }

    pub fn preset_name(&self) -> Option<Preset> {
        self.preset
    }

    pub fn moments(&self) -> Option<&MomentSequence> {
        match &self.law {
            WeightLaw::DiagonalBesov(m) => Some(m),
            _ => None,
        }
    }

    /// `c_α = ‖z^α‖²`.
    pub fn monomial_norm_sq(&self, alpha: &MultiIndex) -> Result<f64> {
        if alpha.dim() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: alpha.dim(),
            });
        }
        let k = alpha.degree();
        if k > self.max_degree {
            return Err(Error::Range {
                degree: k,
                max: self.max_degree,
            });
        }
        Ok(match &self.law {
            WeightLaw::DiagonalBesov(_) => {
                if k == 0 {
                    self.radial[0]
                } else {
                    self.radial[k] * sphere_moment_with(factorials(), self.d, alpha)
                }
            }
            WeightLaw::DruryArveson => {
                let fact = factorials();
                let num: f64 = alpha.exponents().iter().map(|&e| fact[e as usize]).product();
                num / fact[k]
            }
            WeightLaw::CustomDiagonal(w) => w[alpha],
        })
    }

    fn check_poly(&self, f: &Polynomial) -> Result<()> {
        if f.dim() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: f.dim(),
            });
        }
        if f.degree() > self.max_degree {
            return Err(Error::Range {
                degree: f.degree(),
                max: self.max_degree,
            });
        }
        Ok(())
    }

    /// `⟨f, g⟩ = Σ c_α f̂(α) conj(ĝ(α))`.
    pub fn inner_product(&self, f: &Polynomial, g: &Polynomial) -> Result<Complex64> {
        self.check_poly(f)?;
        self.check_poly(g)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (alpha, fc) in f.terms() {
            let gc = g.coeff(alpha);
            if gc != Complex64::new(0.0, 0.0) {
                acc += fc * gc.conj() * self.monomial_norm_sq(alpha)?;
            }
        }
        Ok(acc)
    }

    pub fn norm_sq(&self, f: &Polynomial) -> Result<f64> {
        self.check_poly(f)?;
        let mut acc = 0.0;
        for (alpha, c) in f.terms() {
            acc += c.norm_sqr() * self.monomial_norm_sq(alpha)?;
        }
        Ok(acc)
    }

    pub fn norm(&self, f: &Polynomial) -> Result<f64> {
        self.norm_sq(f).map(f64::sqrt)
    }
}

fn check_shape(d: usize, max_degree: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::arg("dimension must be at least 1"));
    }
    if d - 1 + max_degree > MAX_FACTORIAL {
        return Err(Error::arg(format!(
            "max degree {max_degree} too large for d = {d}"
        )));
    }
    Ok(())
}

/// JSON form `{kind, d, N, moments|weights, maxDegree}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct SpaceWire {
    kind: String,
    d: usize,
    #[serde(rename = "N", default)]
    order: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    moments: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<WeightEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    preset: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct WeightEntry {
    exponents: Vec<u32>,
    weight: f64,
}

impl Serialize for SpaceSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (kind, moments, weights) = match &self.law {
            WeightLaw::DiagonalBesov(m) => ("diagonal_besov", Some(m.as_slice().to_vec()), None),
            WeightLaw::DruryArveson => ("drury_arveson", None, None),
            WeightLaw::CustomDiagonal(w) => (
                "custom_diagonal",
                None,
                Some(
                    w.iter()
                        .map(|(a, &weight)| WeightEntry {
                            exponents: a.exponents().to_vec(),
                            weight,
                        })
                        .collect(),
                ),
            ),
        };
        SpaceWire {
            kind: kind.to_string(),
            d: self.d,
            order: self.order,
            moments,
            weights,
            max_degree: Some(self.max_degree),
            preset: self.preset.map(|p| p.to_string()),
        }
        .serialize(s)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SpaceInput {
    Name(String),
    Full(SpaceWire),
}

impl TryFrom<SpaceWire> for SpaceSpec {
    type Error = Error;

    fn try_from(w: SpaceWire) -> Result<Self> {
        let max_degree = w.max_degree.unwrap_or_else(|| default_max_degree(w.d));
        let mut spec = match w.kind.as_str() {
            "diagonal_besov" => {
                let m = w
                    .moments
                    .ok_or_else(|| Error::arg("diagonal_besov needs `moments`"))?;
                SpaceSpec::diagonal_besov(w.d, w.order, MomentSequence::new(m)?, max_degree)?
            }
            "drury_arveson" => SpaceSpec::drury_arveson(w.d, max_degree)?,
            "custom_diagonal" => {
                let entries = w
                    .weights
                    .ok_or_else(|| Error::arg("custom_diagonal needs `weights`"))?;
                let map = entries
                    .into_iter()
                    .map(|e| (MultiIndex::new(e.exponents), e.weight))
                    .collect();
                SpaceSpec::custom_diagonal(w.d, map, max_degree)?
            }
            other => return Err(Error::arg(format!("unknown space kind `{other}`"))),
        };
        spec.preset = match w.preset {
            Some(name) => {
                let p: Preset = name.parse()?;
                let mut reference = p.build_with_degree(max_degree)?;
                reference.preset = None;
                (reference == spec).then_some(p)
            }
            None => None,
        };
        Ok(spec)
    }
}

impl<'de> Deserialize<'de> for SpaceSpec {
    /// Accepts a preset name such as `"hardy(1)"` or the full object form.
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        match SpaceInput::deserialize(de)? {
            SpaceInput::Name(s) => s
                .parse::<Preset>()
                .and_then(Preset::build)
                .map_err(serde::de::Error::custom),
            SpaceInput::Full(w) => SpaceSpec::try_from(w).map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// Monte Carlo estimate of `∫|w^α|² dσ` using normalized Gaussian vectors.
    fn sphere_moment_mc(d: usize, alpha: &[u32], samples: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut acc = 0.0;
        for _ in 0..samples {
            let v: Vec<f64> = (0..2 * d).map(|_| rng.sample(StandardNormal)).collect();
            let r2: f64 = v.iter().map(|x| x * x).sum();
            let mut term = 1.0;
            for j in 0..d {
                let m2 = (v[2 * j] * v[2 * j] + v[2 * j + 1] * v[2 * j + 1]) / r2;
                term *= m2.powi(alpha[j] as i32);
            }
            acc += term;
        }
        acc / samples as f64
    }

    #[test]
    fn sphere_moment_examples() {
        for k in 0..10 {
            assert_eq!(sphere_moment(1, &mi(&[k])).unwrap(), 1.0);
        }
        let a = sphere_moment(2, &mi(&[1, 0])).unwrap();
        let b = sphere_moment(2, &mi(&[1, 1])).unwrap();
        assert!((a - 0.5).abs() < 1e-15);
        assert!((b - 1.0 / 6.0).abs() < 1e-15);

        let mc_a = sphere_moment_mc(2, &[1, 0], 400_000, 7);
        let mc_b = sphere_moment_mc(2, &[1, 1], 400_000, 8);
        assert!((mc_a - a).abs() < 3e-3, "{mc_a}");
        assert!((mc_b - b).abs() < 3e-3, "{mc_b}");
    }

    #[test]
    fn sphere_moment_symmetric_and_checked() {
        let a = sphere_moment(3, &mi(&[3, 1, 0])).unwrap();
        let b = sphere_moment(3, &mi(&[0, 3, 1])).unwrap();
        assert_eq!(a, b);
        assert!(matches!(
            sphere_moment(2, &mi(&[1])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn monomial_norm_examples() {
        let da = Preset::DruryArveson(2).build().unwrap();
        assert_eq!(da.monomial_norm_sq(&mi(&[1, 1])).unwrap(), 0.5);
        for d in 1..=4 {
            let s = Preset::DruryArveson(d).build().unwrap();
            assert_eq!(s.monomial_norm_sq(&MultiIndex::zero(d)).unwrap(), 1.0);
        }
        let h = Preset::Hardy(1).build().unwrap();
        assert_eq!(h.monomial_norm_sq(&mi(&[5])).unwrap(), 1.0);
        assert!(matches!(
            h.monomial_norm_sq(&mi(&[65])),
            Err(Error::Range { .. })
        ));
    }

    #[test]
    fn dirichlet_type_weights() {
        let s = Preset::DirichletType(1).build().unwrap();
        assert_eq!(s.monomial_norm_sq(&mi(&[0])).unwrap(), 1.0);
        // k² · 2/(2k+2)
        assert!((s.monomial_norm_sq(&mi(&[3])).unwrap() - 9.0 * 2.0 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn drury_arveson_weights_match_factorials() {
        fn fact(n: u32) -> f64 {
            (1..=n).map(f64::from).product()
        }
        for d in 2..=4 {
            let s = Preset::DruryArveson(d).build().unwrap();
            for alpha in MultiIndex::up_to_degree(d, 10) {
                let expect = alpha.exponents().iter().map(|&e| fact(e)).product::<f64>()
                    / fact(alpha.degree() as u32);
                let got = s.monomial_norm_sq(&alpha).unwrap();
                assert!((got - expect).abs() <= 1e-14 * expect, "{alpha:?}");
            }
        }
    }

    #[test]
    fn inner_product_examples() {
        let h = Preset::Hardy(1).build().unwrap();
        let z = Polynomial::variable(1, 0);
        let one = Polynomial::one(1);
        assert_eq!(h.inner_product(&z, &one).unwrap(), c(0.0));
        let f = Polynomial::univariate(&[1.0, -1.0]);
        assert_eq!(h.inner_product(&f, &f).unwrap(), c(2.0));
        assert_eq!(h.norm(&f).unwrap(), 2f64.sqrt());
        assert_eq!(h.norm(&Polynomial::zero(1)).unwrap(), 0.0);

        let da = Preset::DruryArveson(2).build().unwrap();
        let m = Polynomial::monomial(mi(&[1, 1]), c(1.0));
        assert_eq!(da.inner_product(&m, &m).unwrap(), c(0.5));

        let b = Preset::Bergman(1).build().unwrap();
        assert!((b.norm(&z).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn inner_product_degree_overflow() {
        let h = Preset::Hardy(1).build().unwrap();
        let big = Polynomial::monomial(mi(&[70]), c(1.0));
        assert!(matches!(
            h.inner_product(&big, &big),
            Err(Error::Range { .. })
        ));
    }

    #[test]
    fn preset_moments_are_monotone() {
        for p in [
            Preset::Hardy(1),
            Preset::Bergman(2),
            Preset::DirichletType(1),
        ] {
            let s = p.build().unwrap();
            let m = s.moments().unwrap().as_slice();
            assert!(m.iter().all(|&v| v > 0.0));
            assert!(m.windows(2).all(|w| w[1] <= w[0]));
        }
    }

    #[test]
    fn moment_validation() {
        assert!(MomentSequence::new(vec![]).is_err());
        assert!(MomentSequence::new(vec![1.0, 0.0]).is_err());
        assert!(MomentSequence::new(vec![1.0, 2.0]).is_err());
        assert!(MomentSequence::new(vec![1.0, 0.5, 0.5]).is_ok());
        let short = MomentSequence::new(vec![1.0; 5]).unwrap();
        assert!(SpaceSpec::diagonal_besov(1, 0, short, 10).is_err());
    }

    #[test]
    fn custom_diagonal_requires_full_table() {
        let mut w = BTreeMap::new();
        for a in MultiIndex::up_to_degree(2, 3) {
            w.insert(a, 2.0);
        }
        let s = SpaceSpec::custom_diagonal(2, w.clone(), 3).unwrap();
        assert_eq!(s.monomial_norm_sq(&mi(&[2, 1])).unwrap(), 2.0);
        w.remove(&mi(&[0, 3]));
        assert!(SpaceSpec::custom_diagonal(2, w, 3).is_err());
    }

    #[test]
    fn preset_names_parse() {
        assert_eq!("hardy(1)".parse::<Preset>().unwrap(), Preset::Hardy(1));
        assert_eq!(
            " drury_arveson( 3 )".parse::<Preset>().unwrap(),
            Preset::DruryArveson(3)
        );
        assert!("hardy".parse::<Preset>().is_err());
        assert!("hardy(0)".parse::<Preset>().is_err());
        assert!("sobolev(2)".parse::<Preset>().is_err());
        for p in [Preset::Bergman(2), Preset::DirichletType(1)] {
            assert_eq!(p.to_string().parse::<Preset>().unwrap(), p);
        }
    }

    #[test]
    fn json_forms() {
        let s: SpaceSpec = serde_json::from_str("\"bergman(2)\"").unwrap();
        assert_eq!(s, Preset::Bergman(2).build().unwrap());
        let text = serde_json::to_string(&s).unwrap();
        let back: SpaceSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.preset_name(), Some(Preset::Bergman(2)));

        let inline: SpaceSpec = serde_json::from_str(
            r#"{"kind": "diagonal_besov", "d": 1, "N": 1, "moments": [1, 0.5, 0.25, 0.2, 0.1], "maxDegree": 2}"#,
        )
        .unwrap();
        assert_eq!(inline.order(), 1);
        assert_eq!(inline.monomial_norm_sq(&mi(&[2])).unwrap(), 4.0 * 0.1);

        let da: SpaceSpec =
            serde_json::from_str(r#"{"kind": "drury_arveson", "d": 3}"#).unwrap();
        assert_eq!(da.max_degree(), 20);
        assert!(serde_json::from_str::<SpaceSpec>(r#"{"kind": "nope", "d": 1}"#).is_err());
    }
}
