//! Weighted sequence spaces on ℕ at finite truncation.
//!
//! A Köthe-type matrix `λ_{nk}` (decreasing in the level `k`, with
//! `1/n² < λ_{nk} ≤ 1`) generates a weighted inductive limit of `l∞` spaces.
//! Its projective hull carries the seminorms `p_λ̄(x) = sup_n λ̄(n)|x_n|`
//! where `λ̄` runs through the associated system: the strictly positive
//! weights dominated, for every level `k`, by a constant multiple of the
//! `k`-th matrix row. Everything here is materialized on the truncation
//! `n ≤ n_max`, `k ≤ k_max`; associated-system membership is carried as an
//! explicit witness vector `c_k` so it stays testable.

use num_complex::Complex64;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

/// Errors from sequence-space construction and normalization.
#[derive(Debug, Error, PartialEq)]
pub enum SeqSpaceError {
    #[error("empty truncation: n_max and k_max must both be at least 1")]
    EmptyTruncation,
    #[error("weight is missing associated-system witnesses")]
    MissingWitnesses,
    #[error("weight value at n = {n} must be strictly positive, got {value}")]
    NonPositiveWeight { n: usize, value: f64 },
    #[error("index {index} outside truncation 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("weight is not normalized to 1/n² ≤ λ̄(n) ≤ 1")]
    NotNormalized,
}

/// Inverse of the anti-diagonal enumeration of ℕ² (both sides 1-based).
///
/// Position `n` maps to the pair `(m, j)` with `m + j = d + 1` on the `d`-th
/// anti-diagonal, `m` ascending within a diagonal. The enumeration guarantees
/// `n ≥ j`, which is what keeps the matrix entries above the `1/n²` floor.
pub fn diag_unpair(n: usize) -> (usize, usize) {
    assert!(n >= 1, "diag_unpair is 1-based");
    let z = n - 1;
    // Largest i with i(i+1)/2 <= z; float sqrt then exact correction.
    let mut i = (((8.0 * z as f64 + 1.0).sqrt() - 1.0) / 2.0).floor() as usize;
    while i * (i + 1) / 2 > z {
        i -= 1;
    }
    while (i + 1) * (i + 2) / 2 <= z {
        i += 1;
    }
    let m = z - i * (i + 1) / 2 + 1;
    let j = i + 2 - m;
    (m, j)
}

/// The truncated Köthe-type matrix `λ_{nk}`, materialized for
/// `n ≤ n_max, k ≤ k_max`, together with the pure generator rule.
#[derive(Debug, Clone)]
pub struct KoetheMatrix {
    n_max: usize,
    k_max: usize,
    entries: Vec<f64>,
}

impl KoetheMatrix {
    /// The diagonally re-indexed Köthe–Grothendieck matrix: with
    /// `(m, j) = diag_unpair(n)`, the entry is `1/j` when `m ≤ k` and `1`
    /// otherwise. Entries are non-increasing in `k` and satisfy
    /// `1/n² < λ_{nk} ≤ 1` because the enumeration forces `n ≥ j`.
    pub fn default_matrix(n_max: usize, k_max: usize) -> Result<Self, SeqSpaceError> {
        if n_max < 1 || k_max < 1 {
            return Err(SeqSpaceError::EmptyTruncation);
        }
        let mut entries = Vec::with_capacity(n_max * k_max);
        for n in 1..=n_max {
            for k in 1..=k_max {
                entries.push(Self::generator_entry(n, k));
            }
        }
        Ok(Self { n_max, k_max, entries })
    }

    /// The generator rule, valid for any `(n, k)` beyond the truncation.
    pub fn generator_entry(n: usize, k: usize) -> f64 {
        let (m, j) = diag_unpair(n);
        if m <= k {
            1.0 / j as f64
        } else {
            1.0
        }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// `λ_{nk}` from the materialized truncation. 1-based on both axes.
    pub fn entry(&self, n: usize, k: usize) -> f64 {
        assert!(n >= 1 && n <= self.n_max, "row {n} outside 1..={}", self.n_max);
        assert!(k >= 1 && k <= self.k_max, "level {k} outside 1..={}", self.k_max);
        self.entries[(n - 1) * self.k_max + (k - 1)]
    }

    /// Row `k` as a weight on the truncation (used to seed normalizations).
    pub fn level_weight(&self, k: usize) -> Vec<f64> {
        (1..=self.n_max).map(|n| self.entry(n, k)).collect()
    }

    /// Checks the two defining invariants on the materialized truncation.
    /// The floor is strict for n ≥ 2; at n = 1 it reads `1/n² = 1`, so only
    /// equality is possible there.
    pub fn validate(&self) -> Result<(), SeqSpaceError> {
        for n in 1..=self.n_max {
            let floor = 1.0 / (n as f64 * n as f64);
            for k in 1..=self.k_max {
                let v = self.entry(n, k);
                let above_floor = if n == 1 { v >= floor } else { v > floor };
                if !(above_floor && v <= 1.0) {
                    return Err(SeqSpaceError::NonPositiveWeight { n, value: v });
                }
                if k > 1 && self.entry(n, k) > self.entry(n, k - 1) {
                    return Err(SeqSpaceError::NonPositiveWeight { n, value: v });
                }
            }
        }
        Ok(())
    }

    /// JSON document `{n_max, k_max, entries: [[n, k, value], ...]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = (1..=self.n_max)
            .flat_map(|n| {
                (1..=self.k_max).map(move |k| (n, k))
            })
            .map(|(n, k)| serde_json::json!([n, k, self.entry(n, k)]))
            .collect();
        serde_json::json!({
            "n_max": self.n_max,
            "k_max": self.k_max,
            "entries": entries,
        })
    }
}

/// An element `λ̄` of the associated weight system, materialized on the
/// truncation, optionally with explicit domination witnesses `c_k`
/// (`λ̄ ≤ c_k λ_k` on the truncation) and a normalization flag asserting
/// `1/n² ≤ λ̄(n) ≤ 1`.
#[derive(Debug, Clone, Serialize)]
pub struct SeqWeight {
    values: Vec<f64>,
    witnesses: Option<Vec<f64>>,
    normalized: bool,
}

impl SeqWeight {
    /// A bare weight from strictly positive values (`values[n-1] = λ̄(n)`).
    pub fn new(values: Vec<f64>) -> Result<Self, SeqSpaceError> {
        if values.is_empty() {
            return Err(SeqSpaceError::EmptyTruncation);
        }
        for (i, &v) in values.iter().enumerate() {
            if !(v > 0.0) || !v.is_finite() {
                return Err(SeqSpaceError::NonPositiveWeight { n: i + 1, value: v });
            }
        }
        let normalized = values
            .iter()
            .enumerate()
            .all(|(i, &v)| {
                let n = (i + 1) as f64;
                v >= 1.0 / (n * n) && v <= 1.0
            });
        Ok(Self { values, witnesses: None, normalized })
    }

    /// Same, but scans the matrix for the minimal witnesses
    /// `c_k = max_n λ̄(n)/λ_{nk}` on the truncation.
    pub fn with_witnesses(values: Vec<f64>, matrix: &KoetheMatrix) -> Result<Self, SeqSpaceError> {
        let mut w = Self::new(values)?;
        if w.values.len() > matrix.n_max() {
            return Err(SeqSpaceError::IndexOutOfRange {
                index: w.values.len(),
                max: matrix.n_max(),
            });
        }
        let witnesses = (1..=matrix.k_max())
            .map(|k| {
                (1..=w.values.len())
                    .map(|n| w.get(n) / matrix.entry(n, k))
                    .fold(0.0_f64, f64::max)
            })
            .collect();
        w.witnesses = Some(witnesses);
        Ok(w)
    }

    pub fn n_max(&self) -> usize {
        self.values.len()
    }

    /// `λ̄(n)`, 1-based.
    pub fn get(&self, n: usize) -> f64 {
        assert!(n >= 1 && n <= self.values.len(), "index {n} outside truncation");
        self.values[n - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn witnesses(&self) -> Option<&[f64]> {
        self.witnesses.as_deref()
    }

    /// Whether `1/n² ≤ λ̄(n) ≤ 1` holds on the whole truncation.
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Pointwise scaling by `c > 0`. Witnesses scale along; the
    /// normalization flag is re-derived.
    pub fn scale(&self, c: f64) -> Result<Self, SeqSpaceError> {
        let mut out = Self::new(self.values.iter().map(|v| v * c).collect())?;
        out.witnesses = self
            .witnesses
            .as_ref()
            .map(|ws| ws.iter().map(|w| w * c).collect());
        Ok(out)
    }

    /// JSON document `{n_max, values: [...]}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "n_max": self.values.len(), "values": self.values })
    }
}

/// Replaces `μ̄` by a normalized weight of the associated system dominating
/// it: with witnesses `c_k` and `d_k = max(c_k, 1)`, returns
/// `λ̄ = min(min_{k ≤ k_max} d_k λ_k, λ_1)` together with the smallest `C`
/// with `μ̄ ≤ C λ̄` on the truncation. The output satisfies
/// `1/n² < λ̄(n) ≤ 1` and carries fresh scan witnesses.
pub fn normalize_seq_weight(
    mu: &SeqWeight,
    matrix: &KoetheMatrix,
) -> Result<(SeqWeight, f64), SeqSpaceError> {
    let witnesses = mu.witnesses().ok_or(SeqSpaceError::MissingWitnesses)?;
    if witnesses.len() != matrix.k_max() {
        return Err(SeqSpaceError::MissingWitnesses);
    }
    if mu.n_max() == 0 || matrix.n_max() == 0 {
        return Err(SeqSpaceError::EmptyTruncation);
    }
    let n_top = mu.n_max().min(matrix.n_max());
    let d: Vec<f64> = witnesses.iter().map(|&c| c.max(1.0)).collect();
    let mut values = Vec::with_capacity(n_top);
    for n in 1..=n_top {
        let inf_k = (1..=matrix.k_max())
            .map(|k| d[k - 1] * matrix.entry(n, k))
            .fold(f64::INFINITY, f64::min);
        values.push(inf_k.min(matrix.entry(n, 1)));
    }
    let lam = SeqWeight::with_witnesses(values, matrix)?;
    if !lam.is_normalized() {
        return Err(SeqSpaceError::NotNormalized);
    }
    let c_out = (1..=n_top)
        .map(|n| mu.get(n) / lam.get(n))
        .fold(0.0_f64, f64::max);
    Ok((lam, c_out))
}

/// A finitely supported complex sequence: a truncated element of the
/// projective hull.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FiniteSeq {
    coeffs: BTreeMap<usize, Complex64>,
}

impl FiniteSeq {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The unit vector `δ_n`.
    pub fn unit(n: usize) -> Self {
        let mut s = Self::zero();
        s.set(n, Complex64::new(1.0, 0.0));
        s
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, Complex64)>>(pairs: I) -> Self {
        let mut s = Self::zero();
        for (n, v) in pairs {
            s.set(n, v);
        }
        s
    }

    /// Sets `a_n`; zero values are dropped from the support.
    pub fn set(&mut self, n: usize, v: Complex64) {
        assert!(n >= 1, "sequence indices are 1-based");
        if v == Complex64::new(0.0, 0.0) {
            self.coeffs.remove(&n);
        } else {
            self.coeffs.insert(n, v);
        }
    }

    pub fn get(&self, n: usize) -> Complex64 {
        self.coeffs.get(&n).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.coeffs.iter().map(|(&n, &v)| (n, v))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_index(&self) -> usize {
        self.coeffs.keys().next_back().copied().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (n, v) in other.iter() {
            out.set(n, out.get(n) + v);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (n, v) in other.iter() {
            out.set(n, out.get(n) - v);
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_pairs(self.iter().map(|(n, v)| (n, v * c)))
    }

    /// The weighted sup-seminorm `p_λ̄(a) = sup_n λ̄(n)|a_n|`; `0` for the
    /// empty support. The weight must cover the support.
    pub fn seminorm(&self, lam: &SeqWeight) -> f64 {
        self.iter()
            .map(|(n, v)| {
                assert!(
                    n <= lam.n_max(),
                    "support index {n} beyond weight truncation {}",
                    lam.n_max()
                );
                lam.get(n) * v.norm()
            })
            .fold(0.0, f64::max)
    }
}


#[cfg(test)]
mod prop_tests {
    use super::*;
    use proptest::prelude::*;

    fn small_seq() -> impl Strategy<Value = FiniteSeq> {
        proptest::collection::vec((1usize..=12, -5.0f64..5.0, -5.0f64..5.0), 0..8).prop_map(
            |triples| {
                FiniteSeq::from_pairs(
                    triples
                        .into_iter()
                        .map(|(n, re, im)| (n, Complex64::new(re, im))),
                )
            },
        )
    }

    fn weight() -> impl Strategy<Value = SeqWeight> {
        proptest::collection::vec(0.01f64..1.0, 12..=12)
            .prop_map(|v| SeqWeight::new(v).unwrap())
    }

    proptest! {
        #[test]
        fn seminorm_absolute_homogeneity(a in small_seq(), lam in weight(),
                                         re in -3.0f64..3.0, im in -3.0f64..3.0) {
            let c = Complex64::new(re, im);
            let lhs = a.scale(c).seminorm(&lam);
            let rhs = c.norm() * a.seminorm(&lam);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
        }

        #[test]
        fn seminorm_triangle_inequality(a in small_seq(), b in small_seq(), lam in weight()) {
            let lhs = a.add(&b).seminorm(&lam);
            let rhs = a.seminorm(&lam) + b.seminorm(&lam);
            prop_assert!(lhs <= rhs + 1e-12);
        }
    }
}
