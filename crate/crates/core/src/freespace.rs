//! Free (non-commutative) function spaces indexed by words.
//!
//! A free polynomial is `F = Σ a_w Z^w` over words `w` in the letters
//! `1..=d`. Norms are diagonal in the word basis with a weight that
//! depends only on word length, so the same least-squares machinery as in
//! the commutative case computes free distances.
//!
//! The letter-counting map [`abelianize`] is the compression onto the
//! Drury–Arveson space: it is a unital homomorphism and a contraction from
//! the free Hardy space, which is what [`compression_check`] exercises.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::cyclicity::subspace_distance;
use crate::error::{Error, Result};
use crate::lsq::{self, SolveMethod};
use crate::poly::{MultiIndex, Polynomial};
use crate::spaces::{SpaceSpec, WeightLaw};

/// A word in the free semigroup on `d` letters; letters are `1..=d`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<u8>) -> Self {
        Word(letters)
    }

    pub fn letter(j: u8) -> Self {
        Word(vec![j])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Letter multiplicities as a multi-index of dimension `d`.
    pub fn letter_counts(&self, d: usize) -> MultiIndex {
        let mut e = vec![0u32; d];
        for &l in &self.0 {
            e[(l - 1) as usize] += 1;
        }
        MultiIndex::new(e)
    }

    fn check(&self, d: usize) -> Result<()> {
        match self.0.iter().find(|&&l| l == 0 || l as usize > d) {
            Some(l) => Err(Error::arg(format!("letter {l} outside 1..={d}"))),
            None => Ok(()),
        }
    }

    /// All words of length exactly `k`, lexicographic.
    pub fn of_length(d: usize, k: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        for _ in 0..k {
            out = out
                .iter()
                .flat_map(|w| {
                    (1..=d as u8).map(move |l| {
                        let mut v = w.0.clone();
                        v.push(l);
                        Word(v)
                    })
                })
                .collect();
        }
        out
    }

    /// All words of length at most `n`, length first then lexicographic.
    pub fn up_to_length(d: usize, n: usize) -> Vec<Word> {
        (0..=n).flat_map(|k| Word::of_length(d, k)).collect()
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "∅");
        }
        let s: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// `Σ a_w Z^w` with finitely many nonzero coefficients.
#[derive(Clone, PartialEq)]
pub struct FreePolynomial {
    d: usize,
    coeffs: BTreeMap<Word, Complex64>,
}

impl FreePolynomial {
    pub fn zero(d: usize) -> Self {
        FreePolynomial {
            d,
            coeffs: BTreeMap::new(),
        }
    }

    /// The unit `I = Z^∅`.
    pub fn identity(d: usize) -> Self {
        FreePolynomial::monomial(d, Word::empty(), Complex64::new(1.0, 0.0))
    }

    pub fn monomial(d: usize, w: Word, c: Complex64) -> Self {
        let mut p = FreePolynomial::zero(d);
        p.add_term(w, c);
        p
    }

    /// The generator `Z_j`, letters `1..=d`.
    pub fn generator(d: usize, j: u8) -> Self {
        FreePolynomial::monomial(d, Word::letter(j), Complex64::new(1.0, 0.0))
    }

    pub fn from_terms<I>(d: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Word, Complex64)>,
    {
        let mut p = FreePolynomial::zero(d);
        for (w, c) in terms {
            w.check(d)?;
            p.add_term(w, c);
        }
        Ok(p)
    }

    pub fn add_term(&mut self, w: Word, c: Complex64) {
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(w) {
            Entry::Vacant(v) => {
                if c != Complex64::new(0.0, 0.0) {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == Complex64::new(0.0, 0.0) {
                    o.remove();
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Longest word in the support; 0 for the zero polynomial.
    pub fn max_length(&self) -> usize {
        self.coeffs.keys().map(Word::len).max().unwrap_or(0)
    }

    pub fn coeff(&self, w: &Word) -> Complex64 {
        self.coeffs.get(w).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn check_dim(&self, other: &FreePolynomial) -> Result<()> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: other.d,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &FreePolynomial) -> Result<FreePolynomial> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (w, c) in &other.coeffs {
            out.add_term(w.clone(), *c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &FreePolynomial) -> Result<FreePolynomial> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (w, c) in &other.coeffs {
            out.add_term(w.clone(), -*c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: Complex64) -> FreePolynomial {
        let mut out = FreePolynomial::zero(self.d);
        for (w, v) in &self.coeffs {
            out.add_term(w.clone(), v * c);
        }
        out
    }

    /// Drops every word longer than `max_length`.
    pub fn truncate(&self, max_length: usize) -> FreePolynomial {
        FreePolynomial {
            d: self.d,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(w, _)| w.len() <= max_length)
                .map(|(w, c)| (w.clone(), *c))
                .collect(),
        }
    }
}

/// Concatenation convolution: the coefficient of `w` is `Σ_{uv=w} a_u b_v`.
pub fn free_multiply(f: &FreePolynomial, g: &FreePolynomial) -> Result<FreePolynomial> {
    f.check_dim(g)?;
    let mut acc: BTreeMap<Word, Complex64> = BTreeMap::new();
    for (u, a) in &f.coeffs {
        for (v, b) in &g.coeffs {
            *acc.entry(u.concat(v)).or_insert(Complex64::new(0.0, 0.0)) += a * b;
        }
    }
    acc.retain(|_, c| *c != Complex64::new(0.0, 0.0));
    Ok(FreePolynomial { d: f.d, coeffs: acc })
}

/// Letter-counting map `Z^w ↦ z^{count(w)}`.
pub fn abelianize(f: &FreePolynomial) -> Polynomial {
    let mut p = Polynomial::zero(f.d);
    for (w, c) in &f.coeffs {
        p.add_term(w.letter_counts(f.d), *c);
    }
    p
}

/// Truncated inverse series of `Ψ` through words of length `max_length`.
pub fn free_invert(psi: &FreePolynomial, max_length: usize) -> Result<FreePolynomial> {
    let a0 = psi.coeff(&Word::empty());
    if a0 == Complex64::new(0.0, 0.0) {
        return Err(Error::SingularInversion(
            "coefficient of the empty word vanishes".into(),
        ));
    }
    let higher: Vec<(&Word, &Complex64)> = psi.coeffs.iter().filter(|(w, _)| !w.is_empty()).collect();
    let mut theta = FreePolynomial::identity(psi.d).scale(Complex64::new(1.0, 0.0) / a0);
    for k in 1..=max_length {
        for w in Word::of_length(psi.d, k) {
            // (Ψ·Θ)_w = a_∅ θ_w + Σ_{u ≠ ∅ prefix of w} a_u θ_{w minus u}
            let mut s = Complex64::new(0.0, 0.0);
            for (u, au) in &higher {
                if u.len() > k {
                    break;
                }
                if w.letters().starts_with(u.letters()) {
                    let rest = Word(w.letters()[u.len()..].to_vec());
                    s += **au * theta.coeff(&rest);
                }
            }
            if s != Complex64::new(0.0, 0.0) {
                theta.add_term(w, -s / a0);
            }
        }
    }
    Ok(theta)
}

/// `Σ a_w Z^w` with `Z^w = Z_{w_1}⋯Z_{w_k}` and `Z^∅ = I`.
pub fn evaluate_on_tuple(f: &FreePolynomial, z: &[DMatrix<Complex64>]) -> Result<DMatrix<Complex64>> {
    if z.len() != f.d {
        return Err(Error::DimensionMismatch {
            expected: f.d,
            found: z.len(),
        });
    }
    let size = z.first().map_or(0, |m| m.nrows());
    for m in z {
        if m.nrows() != size || m.ncols() != size {
            return Err(Error::arg("tuple matrices must be square and of equal size"));
        }
    }
    let mut out = DMatrix::<Complex64>::zeros(size, size);
    // words are sorted length-first, so every proper prefix is already cached
    let mut prefix: BTreeMap<Word, DMatrix<Complex64>> = BTreeMap::new();
    prefix.insert(Word::empty(), DMatrix::identity(size, size));
    for (w, c) in &f.coeffs {
        let m = word_power(&mut prefix, w, z);
        out += m * *c;
    }
    Ok(out)
}

fn word_power(
    cache: &mut BTreeMap<Word, DMatrix<Complex64>>,
    w: &Word,
    z: &[DMatrix<Complex64>],
) -> DMatrix<Complex64> {
    if let Some(m) = cache.get(w) {
        return m.clone();
    }
    let head = Word(w.letters()[..w.len() - 1].to_vec());
    let last = *w.letters().last().expect("nonempty word");
    let m = word_power(cache, &head, z) * &z[(last - 1) as usize];
    cache.insert(w.clone(), m.clone());
    m
}

/// Operator norm of the row block `[Z_1 … Z_d]`.
pub fn row_norm(z: &[DMatrix<Complex64>]) -> f64 {
    let Some(first) = z.first() else {
        return 0.0;
    };
    let mut s = DMatrix::<Complex64>::zeros(first.nrows(), first.nrows());
    for m in z {
        s += m * m.adjoint();
    }
    // ‖[Z_1 … Z_d]‖² = ‖Σ Z_j Z_j*‖
    lsq::top_singular_value(&s).sqrt()
}

/// Complex Gaussian tuple scaled so the row block has norm exactly `rho`.
pub fn sample_row_contraction(d: usize, size: usize, rho: f64, seed: u64) -> Result<Vec<DMatrix<Complex64>>> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::arg(format!("rho must lie in [0, 1), got {rho}")));
    }
    if d == 0 || size == 0 {
        return Err(Error::arg("need d ≥ 1 and size ≥ 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z: Vec<DMatrix<Complex64>> = (0..d)
        .map(|_| {
            DMatrix::from_fn(size, size, |_, _| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re, im)
            })
        })
        .collect();
    let norm = row_norm(&z);
    let factor = if norm > 0.0 { rho / norm } else { 0.0 };
    for m in &mut z {
        *m *= Complex64::new(factor, 0.0);
    }
    Ok(z)
}

/// Diagonal free space with weight `ω(|w|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeSpaceSpec {
    d: usize,
    weights: Vec<f64>,
    kind: FreeKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FreeKind {
    /// `ω ≡ 1`.
    Hardy,
    /// `ω(k) = (k+1)^{2s}`.
    Besov { s: f64 },
    Custom,
}

pub const DEFAULT_MAX_LENGTH: usize = 12;

impl FreeSpaceSpec {
    pub fn free_hardy(d: usize, max_length: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::arg("dimension must be at least 1"));
        }
        Ok(FreeSpaceSpec {
            d,
            weights: vec![1.0; max_length + 1],
            kind: FreeKind::Hardy,
        })
    }

    pub fn free_besov(d: usize, s: f64, max_length: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::arg("dimension must be at least 1"));
        }
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::arg(format!("smoothness s must be nonnegative, got {s}")));
        }
        Ok(FreeSpaceSpec {
            d,
            weights: (0..=max_length).map(|k| ((k + 1) as f64).powf(2.0 * s)).collect(),
            kind: FreeKind::Besov { s },
        })
    }

    /// Weights `ω(0..=maxLength)` given explicitly.
    pub fn weighted(d: usize, weights: Vec<f64>) -> Result<Self> {
        if d == 0 || weights.is_empty() {
            return Err(Error::arg("need d ≥ 1 and at least one weight"));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::arg(format!("weights must be positive, got {w}")));
        }
        Ok(FreeSpaceSpec {
            d,
            weights,
            kind: FreeKind::Custom,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn max_length(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn kind(&self) -> FreeKind {
        self.kind
    }

    pub fn weight(&self, length: usize) -> Result<f64> {
        self.weights.get(length).copied().ok_or(Error::Range {
            degree: length,
            max: self.max_length(),
        })
    }

    fn check(&self, f: &FreePolynomial) -> Result<()> {
        if f.d != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: f.d,
            });
        }
        if f.max_length() > self.max_length() {
            return Err(Error::Range {
                degree: f.max_length(),
                max: self.max_length(),
            });
        }
        Ok(())
    }
}

impl FromStr for FreeSpaceSpec {
    type Err = Error;

    /// `free_hardy(d)` or `free_besov(d, s)` with the default maximum length.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, rest) = s
            .split_once('(')
            .ok_or_else(|| Error::arg(format!("free space `{s}` must look like name(args)")))?;
        let args: Vec<&str> = rest
            .strip_suffix(')')
            .ok_or_else(|| Error::arg(format!("free space `{s}` is missing `)`")))?
            .split(',')
            .map(str::trim)
            .collect();
        let d: usize = args[0]
            .parse()
            .map_err(|_| Error::arg(format!("bad dimension in `{s}`")))?;
        match (name.trim(), args.len()) {
            ("free_hardy", 1) => FreeSpaceSpec::free_hardy(d, DEFAULT_MAX_LENGTH),
            ("free_besov", 2) => {
                let sm: f64 = args[1]
                    .parse()
                    .map_err(|_| Error::arg(format!("bad smoothness in `{s}`")))?;
                FreeSpaceSpec::free_besov(d, sm, DEFAULT_MAX_LENGTH)
            }
            _ => Err(Error::arg(format!("unknown free space `{s}`"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct FreeSpaceWire {
    kind: String,
    d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_length: Option<usize>,
}

impl Serialize for FreeSpaceSpec {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let (kind, s, weights) = match self.kind {
            FreeKind::Hardy => ("free_hardy", None, None),
            FreeKind::Besov { s } => ("free_besov", Some(s), None),
            FreeKind::Custom => ("free_weighted", None, Some(self.weights.clone())),
        };
        FreeSpaceWire {
            kind: kind.into(),
            d: self.d,
            s,
            weights,
            max_length: Some(self.max_length()),
        }
        .serialize(ser)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FreeSpaceInput {
    Name(String),
    Full(FreeSpaceWire),
}

impl<'de> Deserialize<'de> for FreeSpaceSpec {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let built = match FreeSpaceInput::deserialize(de)? {
            FreeSpaceInput::Name(s) => s.parse(),
            FreeSpaceInput::Full(w) => {
                let len = w.max_length.unwrap_or(DEFAULT_MAX_LENGTH);
                match w.kind.as_str() {
                    "free_hardy" => FreeSpaceSpec::free_hardy(w.d, len),
                    "free_besov" => FreeSpaceSpec::free_besov(w.d, w.s.unwrap_or(0.0), len),
                    "free_weighted" => match w.weights {
                        Some(ws) => FreeSpaceSpec::weighted(w.d, ws),
                        None => Err(Error::arg("free_weighted needs `weights`")),
                    },
                    other => Err(Error::arg(format!("unknown free space kind `{other}`"))),
                }
            }
        };
        built.map_err(serde::de::Error::custom)
    }
}

/// `sqrt(Σ ω(|w|) |a_w|²)`.
pub fn free_norm(spec: &FreeSpaceSpec, f: &FreePolynomial) -> Result<f64> {
    spec.check(f)?;
    let mut acc = 0.0;
    for (w, c) in &f.coeffs {
        acc += spec.weight(w.len())? * c.norm_sqr();
    }
    Ok(acc.sqrt())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FreeApproximantResult {
    pub n: usize,
    pub phi: FreePolynomial,
    pub residual: f64,
    pub gram_condition: f64,
    pub solve_method: SolveMethod,
    pub target_norm_sq: f64,
    pub explained: f64,
}

/// `min ‖g − Φ·G‖` over `Φ` supported on words of length `≤ n`.
pub fn free_subspace_distance(
    spec: &FreeSpaceSpec,
    g: &FreePolynomial,
    big_g: &FreePolynomial,
    n: usize,
) -> Result<FreeApproximantResult> {
    spec.check(g)?;
    if big_g.d != spec.d {
        return Err(Error::DimensionMismatch {
            expected: spec.d,
            found: big_g.d,
        });
    }
    if big_g.is_zero() {
        return Err(Error::DegenerateInput("G is the zero polynomial".into()));
    }
    if n + big_g.max_length() > spec.max_length() {
        return Err(Error::Range {
            degree: n + big_g.max_length(),
            max: spec.max_length(),
        });
    }
    let basis = Word::up_to_length(spec.d, n);
    let columns: Vec<Vec<(Word, Complex64)>> = basis
        .iter()
        .map(|w| big_g.terms().map(|(v, c)| (w.concat(v), *c)).collect())
        .collect();
    let target: Vec<(Word, Complex64)> = g.terms().map(|(w, c)| (w.clone(), *c)).collect();
    let sol = lsq::solve(&target, &columns, |w| spec.weight(w.len()))?;
    let phi = FreePolynomial::from_terms(spec.d, basis.into_iter().zip(sol.coeffs.iter().copied()))?;
    Ok(FreeApproximantResult {
        n,
        phi,
        residual: sol.residual,
        gram_condition: sol.gram_condition,
        solve_method: sol.method,
        target_norm_sq: sol.target_norm_sq,
        explained: sol.explained,
    })
}

/// Free cyclicity index at degree budget `n`: `min ‖I − Φ·G‖`.
pub fn free_cyclicity_index(spec: &FreeSpaceSpec, big_g: &FreePolynomial, n: usize) -> Result<FreeApproximantResult> {
    free_subspace_distance(spec, &FreePolynomial::identity(spec.d), big_g, n)
}

/// Top singular value of the section of left multiplication by `Θ`,
/// columns `|w| ≤ n_in`, in the orthonormalized word basis.
pub fn free_multiplier_norm_lower(spec: &FreeSpaceSpec, theta: &FreePolynomial, n_in: usize) -> Result<f64> {
    spec.check(theta)?;
    if n_in + theta.max_length() > spec.max_length() {
        return Err(Error::Range {
            degree: n_in + theta.max_length(),
            max: spec.max_length(),
        });
    }
    let cols = Word::up_to_length(spec.d, n_in);
    let mut rows: BTreeMap<Word, usize> = BTreeMap::new();
    for w in &cols {
        for (u, _) in theta.terms() {
            rows.entry(u.concat(w)).or_insert(0);
        }
    }
    for (i, slot) in rows.values_mut().enumerate() {
        *slot = i;
    }
    let mut m = DMatrix::<Complex64>::zeros(rows.len(), cols.len());
    for (j, w) in cols.iter().enumerate() {
        let nw = spec.weight(w.len())?.sqrt();
        for (u, c) in theta.terms() {
            let uw = u.concat(w);
            let nuw = spec.weight(uw.len())?.sqrt();
            m[(rows[&uw], j)] += c * (nuw / nw);
        }
    }
    Ok(lsq::top_singular_value(&m))
}

/// Finite form of `𝒞(π(G)) ≤ 𝒞_free(G)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CompressionReport {
    pub n: usize,
    pub free_residual: f64,
    pub commutative_residual: f64,
    pub abelianized: Polynomial,
    pub margin: f64,
    pub holds: bool,
}

/// Compares the free index of `G` in the free Hardy space with the index
/// of its abelianization in Drury–Arveson at the same budget.
pub fn compression_check(
    spec_free: &FreeSpaceSpec,
    spec_comm: &SpaceSpec,
    big_g: &FreePolynomial,
    n: usize,
) -> Result<CompressionReport> {
    if spec_free.kind != FreeKind::Hardy {
        return Err(Error::arg("compression check pairs the free Hardy space"));
    }
    if !matches!(spec_comm.law(), WeightLaw::DruryArveson) {
        return Err(Error::arg("compression check pairs the Drury–Arveson space"));
    }
    if spec_free.d != spec_comm.d() {
        return Err(Error::DimensionMismatch {
            expected: spec_free.d,
            found: spec_comm.d(),
        });
    }
    let free = free_cyclicity_index(spec_free, big_g, n)?;
    let abelianized = abelianize(big_g);
    let comm = subspace_distance(spec_comm, &Polynomial::one(spec_comm.d()), &abelianized, n)?;
    let margin = free.residual - comm.residual;
    Ok(CompressionReport {
        n,
        free_residual: free.residual,
        commutative_residual: comm.residual,
        abelianized,
        margin,
        holds: margin >= -1e-10,
    })
}

/// Sampled hypothesis and conclusion of the free one-function corona problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CoronaReport {
    pub rho: f64,
    pub samples: usize,
    pub matrix_size: usize,
    pub seed: u64,
    /// `min σ(Ψ(Z))` per sampled tuple.
    pub min_singular_values: Vec<f64>,
    pub min_singular_value: f64,
    /// `min σ(Ψ(Z)) ≥ 1` at every sample.
    pub bounded_below: bool,
    /// `max ‖Θ_L(Z) Ψ(Z) − I‖` at the longest truncation.
    pub inverse_defect: f64,
    /// `max ‖Θ_L(Z)‖` over the samples.
    pub inverse_tuple_norm: f64,
    pub lengths: Vec<usize>,
    /// Section lower bounds for the multiplier norm of each truncated inverse.
    pub inverse_section_norms: Vec<f64>,
    pub section_n_in: usize,
    /// Last two section norms differ by less than `1e-3`.
    pub stabilized: bool,
}

pub struct CoronaParams {
    pub rho: f64,
    pub samples: usize,
    pub matrix_size: usize,
    pub seed: u64,
    pub max_length: usize,
    pub section_n_in: usize,
}

impl Default for CoronaParams {
    fn default() -> Self {
        CoronaParams {
            rho: 0.9,
            samples: 100,
            matrix_size: 8,
            seed: 0,
            max_length: 8,
            section_n_in: 3,
        }
    }
}

/// Samples row contractions, reports `min σ(Ψ(Z))`, and tracks the section
/// norms of the truncated inverse series of `Ψ` in `spec`.
pub fn corona_check(spec: &FreeSpaceSpec, psi: &FreePolynomial, params: &CoronaParams) -> Result<CoronaReport> {
    spec.check(psi)?;
    let d = spec.d;
    let mut min_svs = Vec::with_capacity(params.samples);
    let theta_full = free_invert(psi, params.max_length)?;
    let mut defect: f64 = 0.0;
    let mut inv_norm: f64 = 0.0;
    for i in 0..params.samples {
        let z = sample_row_contraction(d, params.matrix_size, params.rho, params.seed.wrapping_add(i as u64))?;
        let pz = evaluate_on_tuple(psi, &z)?;
        min_svs.push(lsq::min_singular_value(&pz));
        let tz = evaluate_on_tuple(&theta_full, &z)?;
        let id = DMatrix::<Complex64>::identity(params.matrix_size, params.matrix_size);
        inv_norm = inv_norm.max(lsq::top_singular_value(&tz));
        defect = defect.max(lsq::top_singular_value(&(tz * &pz - id)));
    }
    let min_sv = min_svs.iter().copied().fold(f64::INFINITY, f64::min);
    let lengths: Vec<usize> = (0..=params.max_length).collect();
    let mut norms = Vec::with_capacity(lengths.len());
    for &len in &lengths {
        let theta = theta_full.truncate(len);
        norms.push(free_multiplier_norm_lower(spec, &theta, params.section_n_in)?);
    }
    let stabilized = norms.len() >= 2 && (norms[norms.len() - 1] - norms[norms.len() - 2]).abs() < 1e-3;
    Ok(CoronaReport {
        rho: params.rho,
        samples: params.samples,
        matrix_size: params.matrix_size,
        seed: params.seed,
        min_singular_value: min_sv,
        bounded_below: min_sv >= 1.0,
        min_singular_values: min_svs,
        inverse_defect: defect,
        inverse_tuple_norm: inv_norm,
        lengths,
        inverse_section_norms: norms,
        section_n_in: params.section_n_in,
        stabilized,
    })
}

/// Wire form of one free term.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FreeTerm {
    pub letters: Vec<u8>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl Serialize for FreePolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<FreeTerm> = self
            .coeffs
            .iter()
            .map(|(w, c)| FreeTerm {
                letters: w.0.clone(),
                re: c.re,
                im: c.im,
            })
            .collect();
        terms.serialize(s)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FreeWire {
    Terms(Vec<FreeTerm>),
    Explicit { d: usize, terms: Vec<FreeTerm> },
}

impl<'de> Deserialize<'de> for FreePolynomial {
    /// The letter alphabet is inferred from the largest letter unless `d` is given.
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let (d, terms) = match FreeWire::deserialize(de)? {
            FreeWire::Terms(t) => {
                let d = t.iter().flat_map(|x| x.letters.iter()).copied().max().unwrap_or(1) as usize;
                (d.max(1), t)
            }
            FreeWire::Explicit { d, terms } => (d, terms),
        };
        FreePolynomial::from_terms(
            d,
            terms
                .into_iter()
                .map(|t| (Word(t.letters), Complex64::new(t.re, t.im))),
        )
        .map_err(serde::de::Error::custom)
    }
}

impl fmt::Debug for FreePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(|(w, c)| format!("({c})·Z^{w:?}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn w(l: &[u8]) -> Word {
        Word::new(l.to_vec())
    }

    #[test]
    fn word_order_is_length_then_lex() {
        let words = Word::up_to_length(2, 2);
        assert_eq!(
            words,
            vec![w(&[]), w(&[1]), w(&[2]), w(&[1, 1]), w(&[1, 2]), w(&[2, 1]), w(&[2, 2])]
        );
        let mut s = words.clone();
        s.sort();
        assert_eq!(s, words);
    }

    #[test]
    fn multiply_is_not_commutative() {
        let z1 = FreePolynomial::generator(2, 1);
        let z2 = FreePolynomial::generator(2, 2);
        let a = free_multiply(&z1, &z2).unwrap();
        let b = free_multiply(&z2, &z1).unwrap();
        assert_eq!(a.coeff(&w(&[1, 2])), c(1.0));
        assert_eq!(b.coeff(&w(&[2, 1])), c(1.0));
        assert_ne!(a, b);
        let id = FreePolynomial::identity(2);
        assert_eq!(free_multiply(&id, &a).unwrap(), a);
    }

    #[test]
    fn multiply_difference_of_squares() {
        let id = FreePolynomial::identity(1);
        let z = FreePolynomial::generator(1, 1);
        let p = free_multiply(&id.checked_sub(&z).unwrap(), &id.checked_add(&z).unwrap()).unwrap();
        let expect = id.checked_sub(&FreePolynomial::monomial(1, w(&[1, 1]), c(1.0))).unwrap();
        assert_eq!(p, expect);
        assert!(free_multiply(&id, &FreePolynomial::identity(2)).is_err());
    }

    #[test]
    fn norm_examples() {
        let h = FreeSpaceSpec::free_hardy(2, 6).unwrap();
        assert_eq!(free_norm(&h, &FreePolynomial::identity(2)).unwrap(), 1.0);
        let s = FreePolynomial::generator(2, 1)
            .checked_add(&FreePolynomial::generator(2, 2))
            .unwrap();
        assert_eq!(free_norm(&h, &s).unwrap(), 2f64.sqrt());
        let b = FreeSpaceSpec::free_besov(2, 1.0, 6).unwrap();
        assert_eq!(free_norm(&b, &FreePolynomial::generator(2, 1)).unwrap(), 2.0);
        let long = FreePolynomial::monomial(2, w(&[1; 7]), c(1.0));
        assert!(matches!(free_norm(&h, &long), Err(Error::Range { .. })));
    }

    #[test]
    fn free_distance_examples() {
        let h = FreeSpaceSpec::free_hardy(1, 8).unwrap();
        let id = FreePolynomial::identity(1);
        assert_eq!(free_cyclicity_index(&h, &id, 0).unwrap().residual, 0.0);
        let z = FreePolynomial::generator(1, 1);
        for n in [0, 4] {
            assert!((free_cyclicity_index(&h, &z, n).unwrap().residual - 1.0).abs() < 1e-14);
        }
        let g = id.checked_sub(&z).unwrap();
        let r = free_cyclicity_index(&h, &g, 0).unwrap();
        assert!((r.residual - 0.5f64.sqrt()).abs() < 1e-14);
        assert!(free_cyclicity_index(&h, &FreePolynomial::zero(1), 1).is_err());
    }

    #[test]
    fn free_residual_is_monotone() {
        let h = FreeSpaceSpec::free_hardy(2, 8).unwrap();
        let g = FreePolynomial::from_terms(
            2,
            vec![(w(&[]), c(1.0)), (w(&[1]), c(-0.5)), (w(&[2, 1]), c(0.4))],
        )
        .unwrap();
        let mut prev = f64::INFINITY;
        for n in 0..=5 {
            let r = free_cyclicity_index(&h, &g, n).unwrap().residual;
            assert!(r <= prev + 1e-12);
            prev = r;
        }
    }

    #[test]
    fn abelianize_examples() {
        let f = FreePolynomial::from_terms(2, vec![(w(&[1, 2]), c(1.0)), (w(&[2, 1]), c(1.0))]).unwrap();
        let p = abelianize(&f);
        assert_eq!(p.len(), 1);
        assert_eq!(p.coeff(&MultiIndex::new(vec![1, 1])), c(2.0));
        assert_eq!(abelianize(&FreePolynomial::identity(3)), Polynomial::one(3));
        let g = FreePolynomial::monomial(2, w(&[1, 1, 2]), c(1.0));
        assert_eq!(abelianize(&g).coeff(&MultiIndex::new(vec![2, 1])), c(1.0));
    }

    #[test]
    fn invert_examples() {
        let id = FreePolynomial::identity(2);
        assert_eq!(free_invert(&id, 4).unwrap(), id);
        let psi = id.scale(c(2.0)).checked_sub(&FreePolynomial::generator(2, 1)).unwrap();
        let theta = free_invert(&psi, 2).unwrap();
        let expect = FreePolynomial::from_terms(
            2,
            vec![(w(&[]), c(0.5)), (w(&[1]), c(0.25)), (w(&[1, 1]), c(0.125))],
        )
        .unwrap();
        assert_eq!(theta, expect);
        assert!(matches!(
            free_invert(&FreePolynomial::generator(2, 1), 3),
            Err(Error::SingularInversion(_))
        ));
    }

    #[test]
    fn invert_noncommutative_series() {
        let psi = FreePolynomial::from_terms(
            2,
            vec![(w(&[]), c(1.0)), (w(&[1]), c(1.0)), (w(&[2, 1]), c(-2.0)), (w(&[1, 2]), c(3.0))],
        )
        .unwrap();
        let theta = free_invert(&psi, 5).unwrap();
        let prod = free_multiply(&psi, &theta).unwrap().truncate(5);
        assert_eq!(prod, FreePolynomial::identity(2));
    }

    #[test]
    fn evaluate_examples() {
        let half = DMatrix::<Complex64>::identity(3, 3) * c(0.5);
        let z = vec![half.clone(), half.clone()];
        let id = evaluate_on_tuple(&FreePolynomial::identity(2), &z).unwrap();
        assert_eq!(id, DMatrix::identity(3, 3));
        let f = FreePolynomial::monomial(2, w(&[1, 2]), c(1.0));
        assert_eq!(evaluate_on_tuple(&f, &z).unwrap(), DMatrix::identity(3, 3) * c(0.25));

        let comm = FreePolynomial::from_terms(2, vec![(w(&[1, 2]), c(1.0)), (w(&[2, 1]), c(-1.0))]).unwrap();
        let a = DMatrix::from_fn(3, 3, |i, j| if i == j { c(i as f64 + 1.0) } else { c(0.0) });
        let b = DMatrix::from_fn(3, 3, |i, j| if i == j { c(2.0 - i as f64) } else { c(0.0) });
        let v = evaluate_on_tuple(&comm, &[a, b]).unwrap();
        assert!(v.iter().all(|x| x.norm() == 0.0));

        assert!(evaluate_on_tuple(&f, std::slice::from_ref(&half)).is_err());
        let small = DMatrix::<Complex64>::identity(2, 2);
        assert!(evaluate_on_tuple(&f, &[half, small]).is_err());
    }

    #[test]
    fn row_contraction_sampling() {
        let z = sample_row_contraction(1, 1, 0.7, 3).unwrap();
        assert!((z[0][(0, 0)].norm() - 0.7).abs() < 1e-12);
        for seed in 0..5 {
            let z = sample_row_contraction(3, 6, 0.9, seed).unwrap();
            assert!((row_norm(&z) - 0.9).abs() < 1e-12);
        }
        let zero = sample_row_contraction(2, 4, 0.0, 1).unwrap();
        assert!(zero.iter().all(|m| m.iter().all(|x| x.norm() == 0.0)));
        assert_eq!(
            sample_row_contraction(2, 4, 0.5, 9).unwrap(),
            sample_row_contraction(2, 4, 0.5, 9).unwrap()
        );
        assert!(sample_row_contraction(2, 4, 1.0, 9).is_err());
    }

    #[test]
    fn compression_examples() {
        let hf = FreeSpaceSpec::free_hardy(2, 10).unwrap();
        let da = SpaceSpec::drury_arveson(2, 20).unwrap();
        let r = compression_check(&hf, &da, &FreePolynomial::identity(2), 3).unwrap();
        assert_eq!((r.free_residual, r.commutative_residual), (0.0, 0.0));
        let r = compression_check(&hf, &da, &FreePolynomial::generator(2, 1), 3).unwrap();
        assert!((r.free_residual - 1.0).abs() < 1e-14);
        assert!((r.commutative_residual - 1.0).abs() < 1e-14);
        assert!(r.holds);

        let g = FreePolynomial::identity(2)
            .checked_sub(
                &FreePolynomial::generator(2, 1)
                    .checked_add(&FreePolynomial::generator(2, 2))
                    .unwrap()
                    .scale(c(0.5)),
            )
            .unwrap();
        // n = 0: both sides minimize |1-c|^2 + |c|^2 ‖(Z1+Z2)/2‖^2 by hand
        let r0 = compression_check(&hf, &da, &g, 0).unwrap();
        // free: ‖(Z1+Z2)/2‖² = 1/2, min (1-c)² + c²/2 = 1/3
        assert!((r0.free_residual.powi(2) - 1.0 / 3.0).abs() < 1e-14);
        // DA: ‖(z1+z2)/2‖² = 1/2 as well
        assert!((r0.commutative_residual.powi(2) - 1.0 / 3.0).abs() < 1e-14);
        let r6 = compression_check(&hf, &da, &g, 6).unwrap();
        assert!(r6.holds, "{r6:?}");
        assert!(r6.free_residual <= r0.free_residual);

        let besov = FreeSpaceSpec::free_besov(2, 1.0, 10).unwrap();
        assert!(compression_check(&besov, &da, &g, 1).is_err());
    }

    #[test]
    fn corona_witness_for_shifted_generator() {
        let spec = FreeSpaceSpec::free_hardy(2, 12).unwrap();
        let psi = FreePolynomial::identity(2)
            .scale(c(2.0))
            .checked_sub(&FreePolynomial::generator(2, 1))
            .unwrap();
        let params = CoronaParams {
            samples: 20,
            max_length: 9,
            ..CoronaParams::default()
        };
        let rep = corona_check(&spec, &psi, &params).unwrap();
        assert!(rep.min_singular_value >= 2.0 - 0.9);
        assert!(rep.bounded_below);
        assert!(rep.stabilized, "{:?}", rep.inverse_section_norms);
        assert!(rep.inverse_section_norms.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        assert!(*rep.inverse_section_norms.last().unwrap() <= 1.0 + 1e-12);
        assert!(rep.inverse_defect < 1e-2);
        let envelope = 1.0 / (2.0 - 0.9 * 2f64.sqrt());
        assert!(rep.inverse_tuple_norm <= envelope);
    }

    #[test]
    fn json_round_trip() {
        let f = FreePolynomial::from_terms(3, vec![(w(&[3, 1]), Complex64::new(0.5, -2.0)), (w(&[]), c(1.0))]).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"[{"letters":[],"re":1.0,"im":0.0},{"letters":[3,1],"re":0.5,"im":-2.0}]"#);
        let back: FreePolynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);

        let spec: FreeSpaceSpec = serde_json::from_str("\"free_besov(2, 0.5)\"").unwrap();
        assert_eq!(spec.kind(), FreeKind::Besov { s: 0.5 });
        let again: FreeSpaceSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(again, spec);
    }
}
