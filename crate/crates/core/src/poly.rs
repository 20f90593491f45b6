//! Sparse commutative polynomials over multi-indices.
//!
//! Every matrix built from monomials in this crate uses the graded
//! lexicographic order of [`MultiIndex`]: total degree first, then the
//! exponent vectors compared lexicographically with larger leading
//! exponents first, so `z1` precedes `z2` and `z1^2` precedes `z1 z2`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::SpaceSpec;

/// Exponent vector `α ∈ ℕ₀^d`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(d: usize) -> Self {
        MultiIndex(vec![0; d])
    }

    /// The index of the coordinate function `z_j` (zero-based `j`).
    pub fn unit(d: usize, j: usize) -> Self {
        let mut e = vec![0; d];
        e[j] = 1;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn checked_add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other` when `other ≤ self` componentwise.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    /// All multi-indices of total degree exactly `k`, in canonical order.
    pub fn of_degree(d: usize, k: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut current = vec![0u32; d];
        fill_degree(&mut current, 0, k as u32, &mut out);
        out
    }

    /// All multi-indices of total degree at most `n`, in canonical order.
    pub fn up_to_degree(d: usize, n: usize) -> Vec<MultiIndex> {
        (0..=n).flat_map(|k| MultiIndex::of_degree(d, k)).collect()
    }
}

fn fill_degree(current: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    let d = current.len();
    if d == 0 {
        if remaining == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return;
    }
    if pos == d - 1 {
        current[pos] = remaining;
        out.push(MultiIndex(current.clone()));
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e;
        fill_degree(current, pos + 1, remaining - e, out);
    }
    current[pos] = 0;
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Sparse polynomial in `d` commuting variables with complex coefficients.
///
/// Zero coefficients are never stored.
#[derive(Clone, PartialEq)]
pub struct Polynomial {
    d: usize,
    coeffs: BTreeMap<MultiIndex, Complex64>,
}

impl Polynomial {
    pub fn zero(d: usize) -> Self {
        Polynomial {
            d,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(d: usize) -> Self {
        Polynomial::constant(d, Complex64::new(1.0, 0.0))
    }

    pub fn constant(d: usize, c: Complex64) -> Self {
        Polynomial::monomial(MultiIndex::zero(d), c)
    }

    pub fn monomial(alpha: MultiIndex, c: Complex64) -> Self {
        let mut p = Polynomial::zero(alpha.dim());
        p.add_term(alpha, c);
        p
    }

    /// The coordinate function `z_j`, zero-based.
    pub fn variable(d: usize, j: usize) -> Self {
        Polynomial::monomial(MultiIndex::unit(d, j), Complex64::new(1.0, 0.0))
    }

    /// Builds a polynomial from terms, summing repeated indices.
    pub fn from_terms<I>(d: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Complex64)>,
    {
        let mut p = Polynomial::zero(d);
        for (alpha, c) in terms {
            if alpha.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: alpha.dim(),
                });
            }
            p.add_term(alpha, c);
        }
        Ok(p)
    }

    /// Real-coefficient univariate polynomial `Σ c_k z^k`.
    pub fn univariate(coeffs: &[f64]) -> Self {
        let mut p = Polynomial::zero(1);
        for (k, &c) in coeffs.iter().enumerate() {
            p.add_term(MultiIndex::new(vec![k as u32]), Complex64::new(c, 0.0));
        }
        p
    }

    pub fn add_term(&mut self, alpha: MultiIndex, c: Complex64) {
        use std::collections::btree_map::Entry;
        debug_assert_eq!(alpha.dim(), self.d);
        match self.coeffs.entry(alpha) {
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

    /// Total degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Complex64 {
        self.coeffs
            .get(alpha)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn constant_term(&self) -> Complex64 {
        self.coeff(&MultiIndex::zero(self.d))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn check_dim(&self, other: &Polynomial) -> Result<()> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: other.d,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (alpha, c) in &other.coeffs {
            out.add_term(alpha.clone(), *c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (alpha, c) in &other.coeffs {
            out.add_term(alpha.clone(), -*c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: Complex64) -> Polynomial {
        let mut out = Polynomial::zero(self.d);
        if c == Complex64::new(0.0, 0.0) {
            return out;
        }
        for (alpha, v) in &self.coeffs {
            out.add_term(alpha.clone(), v * c);
        }
        out
    }

    /// Coefficient convolution `p·q`.
    pub fn multiply(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_dim(other)?;
        let mut acc: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                *acc.entry(a.checked_add(b))
                    .or_insert(Complex64::new(0.0, 0.0)) += ca * cb;
            }
        }
        acc.retain(|_, v| *v != Complex64::new(0.0, 0.0));
        Ok(Polynomial {
            d: self.d,
            coeffs: acc,
        })
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut out = Polynomial::one(self.d);
        for _ in 0..k {
            out = out.multiply(self).expect("same dimension");
        }
        out
    }

    /// `R^N p` with `R = Σ z_j ∂_j`, which scales the coefficient at `α` by `|α|^N`.
    pub fn radial_derivative(&self, n: u32) -> Polynomial {
        let mut out = Polynomial::zero(self.d);
        for (alpha, c) in &self.coeffs {
            let factor = (alpha.degree() as f64).powi(n as i32);
            out.add_term(alpha.clone(), c * factor);
        }
        out
    }

    /// Drops every term of total degree above `max_degree`.
    pub fn truncate(&self, max_degree: usize) -> Polynomial {
        Polynomial {
            d: self.d,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(a, _)| a.degree() <= max_degree)
                .map(|(a, c)| (a.clone(), *c))
                .collect(),
        }
    }

    pub fn evaluate(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: z.len(),
            });
        }
        let max_deg = self.degree();
        let powers: Vec<Vec<Complex64>> = z
            .iter()
            .map(|&zj| {
                let mut p = Vec::with_capacity(max_deg + 1);
                let mut acc = Complex64::new(1.0, 0.0);
                for _ in 0..=max_deg {
                    p.push(acc);
                    acc *= zj;
                }
                p
            })
            .collect();
        let mut sum = Complex64::new(0.0, 0.0);
        for (alpha, c) in &self.coeffs {
            let mut term = *c;
            for (j, &e) in alpha.exponents().iter().enumerate() {
                term *= powers[j][e as usize];
            }
            sum += term;
        }
        Ok(sum)
    }

    /// Complex gradient `(∂_1 p, …, ∂_d p)` at `z`.
    pub fn gradient(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        (0..self.d)
            .map(|j| self.partial(j).evaluate(z))
            .collect()
    }

    /// `∂p/∂z_j`, zero-based `j`.
    pub fn partial(&self, j: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.d);
        for (alpha, c) in &self.coeffs {
            let e = alpha.exponents()[j];
            if e == 0 {
                continue;
            }
            let mut beta = alpha.exponents().to_vec();
            beta[j] -= 1;
            out.add_term(MultiIndex::new(beta), c * f64::from(e));
        }
        out
    }

    /// Truncated power series of `1/p` through total degree `max_degree`.
    ///
    /// The returned `q` satisfies `(p·q − 1)` has no term of degree `≤ max_degree`.
    pub fn invert_power_series(&self, max_degree: usize) -> Result<Polynomial> {
        let p0 = self.constant_term();
        if p0 == Complex64::new(0.0, 0.0) {
            return Err(Error::SingularInversion(
                "constant term vanishes".to_string(),
            ));
        }
        let mut q = Polynomial::zero(self.d);
        q.add_term(MultiIndex::zero(self.d), Complex64::new(1.0, 0.0) / p0);
        let higher: Vec<(&MultiIndex, &Complex64)> =
            self.coeffs.iter().filter(|(a, _)| !a.is_zero()).collect();
        for k in 1..=max_degree {
            for gamma in MultiIndex::of_degree(self.d, k) {
                let mut s = Complex64::new(0.0, 0.0);
                for (beta, pb) in &higher {
                    if beta.degree() > k {
                        break;
                    }
                    if let Some(rest) = gamma.checked_sub(beta) {
                        s += **pb * q.coeff(&rest);
                    }
                }
                if s != Complex64::new(0.0, 0.0) {
                    q.add_term(gamma, -s / p0);
                }
            }
        }
        Ok(q)
    }
}

/// Dense finite section of the multiplication operator `M_φ` in the
/// orthonormalized monomial basis of `spec`.
///
/// Rows run over `|α| ≤ n_out`, columns over `|β| ≤ n_in`, both in
/// canonical order; entry `(α, β)` is `φ̂(α−β)·‖z^α‖/‖z^β‖`.
pub fn mult_operator_section(
    spec: &SpaceSpec,
    phi: &Polynomial,
    n_in: usize,
    n_out: usize,
) -> Result<DMatrix<Complex64>> {
    if phi.dim() != spec.d() {
        return Err(Error::DimensionMismatch {
            expected: spec.d(),
            found: phi.dim(),
        });
    }
    if n_in + phi.degree() > n_out {
        return Err(Error::arg(format!(
            "n_out = {n_out} must be at least n_in + deg φ = {}",
            n_in + phi.degree()
        )));
    }
    if n_out > spec.max_degree() {
        return Err(Error::Range {
            degree: n_out,
            max: spec.max_degree(),
        });
    }
    let rows = MultiIndex::up_to_degree(spec.d(), n_out);
    let cols = MultiIndex::up_to_degree(spec.d(), n_in);
    let row_pos: std::collections::HashMap<&MultiIndex, usize> =
        rows.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let mut m = DMatrix::zeros(rows.len(), cols.len());
    for (j, beta) in cols.iter().enumerate() {
        let nb = spec.monomial_norm_sq(beta)?.sqrt();
        for (gamma, c) in phi.terms() {
            let alpha = beta.checked_add(gamma);
            let na = spec.monomial_norm_sq(&alpha)?.sqrt();
            m[(row_pos[&alpha], j)] = c * (na / nb);
        }
    }
    Ok(m)
}

impl Add for &Polynomial {
    type Output = Polynomial;
    /// Panics on dimension mismatch; see [`Polynomial::checked_add`].
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.checked_add(rhs).expect("polynomial dimension mismatch")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.checked_sub(rhs).expect("polynomial dimension mismatch")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.multiply(rhs).expect("polynomial dimension mismatch")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(a, c)| format!("({c})·z^{a:?}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Wire form of one polynomial term.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyTerm {
    pub exponents: Vec<u32>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<PolyTerm> = self
            .coeffs
            .iter()
            .map(|(a, c)| PolyTerm {
                exponents: a.exponents().to_vec(),
                re: c.re,
                im: c.im,
            })
            .collect();
        terms.serialize(s)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PolyWire {
    Terms(Vec<PolyTerm>),
    Explicit { d: usize, terms: Vec<PolyTerm> },
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let (d, terms) = match PolyWire::deserialize(de)? {
            PolyWire::Terms(t) => {
                let d = t.first().map(|t| t.exponents.len()).ok_or_else(|| {
                    serde::de::Error::custom(
                        "empty term list; use {\"d\": .., \"terms\": []} for the zero polynomial",
                    )
                })?;
                (d, t)
            }
            PolyWire::Explicit { d, terms } => (d, terms),
        };
        Polynomial::from_terms(
            d,
            terms
                .into_iter()
                .map(|t| (MultiIndex::new(t.exponents), Complex64::new(t.re, t.im))),
        )
        .map_err(serde::de::Error::custom)
    }
}
