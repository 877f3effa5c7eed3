//! Angular weights on the half-annulus and product weights on `G₁ × ℂ`.
//!
//! The weight system `W = (w_k)` is radial-free: `w_k(re^{iθ}) = ŵ_k(θ)`
//! where `ŵ_k` equals the matrix entry `λ_{nk}` on the plateau interval
//! `I_n`, equals 1 at the shoulder `s_n = θ_n + 2⁻⁴n⁻²` and at `0` and `π`,
//! and interpolates affinely in between. Anchors accumulate at `θ = 0`, so a
//! cut `n_cut` is materialized and the weight is the constant 1 below the
//! deepest shoulder.
//!
//! The normalizer takes any anchor-based `w̄'` and produces a dominating
//! weight that is ≤ 1, constant on every disc `D_n`, and bounded below by
//! the `1/n²` floor weight; the disc constants form an associated-system
//! sequence weight. All suprema are exact anchor scans, and the min/max
//! combinations are carried out in exact piecewise-affine arithmetic
//! (merged breakpoints plus crossing insertion).
//!
//! Product weights `v_k(z₁, z₂) = w_k(z₁) · u_k(z₁, |z₂|)` use the
//! boundary-distance factor on `t ≤ k`, the plain power `(1+t)^{-(k-1)/(2k)}`
//! on `t ≥ k+1`, and an affine bridge in between; for fixed `z₁` the
//! supremum over `t` is attained at `t = 0` or `t = k+1`.

use crate::geometry::{AngularFamilies, HalfAnnulus};
use crate::seq_space::{KoetheMatrix, SeqWeight};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum WeightError {
    #[error("weight must be normalized (1/n² ≤ λ̄(n) ≤ 1) to build the canonical angular weight")]
    NotNormalized,
    #[error("plateau cut {n_cut} exceeds the available truncation {max}")]
    PlateauCutTooLarge { n_cut: usize, max: usize },
    #[error("anchor list is empty or not strictly increasing")]
    BadAnchors,
    #[error("point {0} lies outside the open half-annulus")]
    OutsideDomain(Complex64),
    #[error(transparent)]
    SeqSpace(#[from] crate::seq_space::SeqSpaceError),
}

/// A continuous piecewise-affine weight of the angle, given by anchors
/// `(θ, value)` with strictly increasing `θ` spanning `[0, π]`.
///
/// `w(re^{iθ}) = ŵ(θ)`; evaluation never looks at the radius.
#[derive(Debug, Clone)]
pub struct AngularWeight {
    anchors: Vec<(f64, f64)>,
    /// Set for plateau/shoulder weights built from interval families; keys
    /// the O(1) segment lookup by `n ≈ 1/(2θ)`.
    n_cut: Option<usize>,
}

impl AngularWeight {
    /// A weight from a raw anchor list (must start at `θ = 0`, end at
    /// `θ = π`, be strictly increasing in `θ`, and carry positive values).
    pub fn from_anchors(anchors: Vec<(f64, f64)>) -> Result<Self, WeightError> {
        if anchors.len() < 2
            || anchors[0].0 != 0.0
            || anchors[anchors.len() - 1].0 != std::f64::consts::PI
        {
            return Err(WeightError::BadAnchors);
        }
        for w in anchors.windows(2) {
            if !(w[0].0 < w[1].0) {
                return Err(WeightError::BadAnchors);
            }
        }
        if anchors.iter().any(|&(_, v)| !(v > 0.0) || !v.is_finite()) {
            return Err(WeightError::BadAnchors);
        }
        Ok(Self { anchors, n_cut: None })
    }

    fn from_plateaus(
        families: &AngularFamilies,
        n_cut: usize,
        plateau: impl Fn(usize) -> f64,
    ) -> Self {
        let mut anchors = Vec::with_capacity(3 * n_cut + 3);
        anchors.push((0.0, 1.0));
        anchors.push((families.shoulder(n_cut + 1), 1.0));
        for n in (1..=n_cut).rev() {
            let p = plateau(n);
            anchors.push((families.i_lo(n), p));
            anchors.push((families.i_hi(n), p));
            anchors.push((families.shoulder(n), 1.0));
        }
        anchors.push((std::f64::consts::PI, 1.0));
        Self { anchors, n_cut: Some(n_cut) }
    }

    pub fn anchors(&self) -> &[(f64, f64)] {
        &self.anchors
    }

    pub fn n_cut(&self) -> Option<usize> {
        self.n_cut
    }

    /// `ŵ(θ)` for `θ ∈ [0, π]`. Constant on plateaus, affine between
    /// anchors; anchor points evaluate to their stored value exactly.
    pub fn value_at_angle(&self, theta: f64) -> f64 {
        assert!(
            (0.0..=std::f64::consts::PI).contains(&theta),
            "angle {theta} outside [0, π]"
        );
        // First anchor with θ_a > theta; the containing segment ends there.
        let hi = self.anchors.partition_point(|&(t, _)| t <= theta);
        if hi == 0 {
            return self.anchors[0].1;
        }
        if hi == self.anchors.len() {
            return self.anchors[hi - 1].1;
        }
        let (t0, v0) = self.anchors[hi - 1];
        let (t1, v1) = self.anchors[hi];
        v0 + (theta - t0) * (v1 - v0) / (t1 - t0)
    }

    /// `w(z) = ŵ(arg z)`.
    pub fn value_at(&self, z: Complex64) -> f64 {
        self.value_at_angle(z.arg())
    }

    /// Exact supremum over the closed plateau interval `I_n`: the maximum of
    /// the endpoint values and of every anchor value inside.
    pub fn sup_on_plateau_interval(&self, families: &AngularFamilies, n: usize) -> f64 {
        let (lo, hi) = (families.i_lo(n), families.i_hi(n));
        let mut sup = self.value_at_angle(lo).max(self.value_at_angle(hi));
        for &(t, v) in &self.anchors {
            if t > lo && t < hi {
                sup = sup.max(v);
            }
        }
        sup
    }

    /// JSON document `{anchors: [[θ, value], ...]}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "anchors": self.anchors.iter().map(|&(t, v)| serde_json::json!([t, v])).collect::<Vec<_>>(),
        })
    }
}

/// The weight `w_k`: plateau value `λ_{nk}` on `I_n` for `n ≤ n_cut`, 1 at
/// shoulders and at `0`, `π`, affine in between, constant 1 below the cut.
pub fn make_wk(
    k: usize,
    matrix: &KoetheMatrix,
    families: &AngularFamilies,
    n_cut: usize,
) -> Result<AngularWeight, WeightError> {
    if n_cut > matrix.n_max() || n_cut > families.n_max() {
        return Err(WeightError::PlateauCutTooLarge {
            n_cut,
            max: matrix.n_max().min(families.n_max()),
        });
    }
    Ok(AngularWeight::from_plateaus(families, n_cut, |n| matrix.entry(n, k)))
}

/// The canonical associated weight: same anchor scheme as `w_k` with the
/// plateau values replaced by `λ̄(n)`. Requires a normalized weight.
pub fn make_canonical_wbar(
    lam: &SeqWeight,
    families: &AngularFamilies,
    n_cut: usize,
) -> Result<AngularWeight, WeightError> {
    if !lam.is_normalized() {
        return Err(WeightError::NotNormalized);
    }
    if n_cut > lam.n_max() || n_cut > families.n_max() {
        return Err(WeightError::PlateauCutTooLarge {
            n_cut,
            max: lam.n_max().min(families.n_max()),
        });
    }
    Ok(AngularWeight::from_plateaus(families, n_cut, |n| lam.get(n)))
}

// ---------------------------------------------------------------------------
// Exact piecewise-affine combination
// ---------------------------------------------------------------------------

/// Pointwise `max` (or `min`) of two anchor weights, with crossings inserted
/// so the result is again exactly piecewise affine.
fn combine(a: &AngularWeight, b: &AngularWeight, take_max: bool) -> AngularWeight {
    let mut grid: Vec<f64> = a
        .anchors
        .iter()
        .chain(b.anchors.iter())
        .map(|&(t, _)| t)
        .collect();
    grid.sort_by(|x, y| x.partial_cmp(y).unwrap());
    grid.dedup();

    let pick = |x: f64, y: f64| if take_max { x.max(y) } else { x.min(y) };
    let mut anchors: Vec<(f64, f64)> = Vec::with_capacity(grid.len() + 8);
    for w in grid.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let (a0, a1) = (a.value_at_angle(t0), a.value_at_angle(t1));
        let (b0, b1) = (b.value_at_angle(t0), b.value_at_angle(t1));
        anchors.push((t0, pick(a0, b0)));
        let d0 = a0 - b0;
        let d1 = a1 - b1;
        if d0 * d1 < 0.0 {
            let t_star = t0 + (t1 - t0) * d0 / (d0 - d1);
            if t_star > t0 && t_star < t1 {
                let v = a.value_at_angle(t_star);
                anchors.push((t_star, v));
            }
        }
    }
    let t_end = *grid.last().unwrap();
    anchors.push((t_end, pick(a.value_at_angle(t_end), b.value_at_angle(t_end))));
    AngularWeight { anchors, n_cut: None }
}

/// Output of the dominating-weight normalization.
#[derive(Debug, Clone)]
pub struct DominatingWeightOutput {
    /// The dominating weight `w̄ = min(w₁, max(w̄⁽¹⁾, w̄'))`.
    pub wbar: AngularWeight,
    /// Largest constant with `C · w̄' ≤ w̄` on `[0, π]` (exact anchor scan).
    pub c: f64,
    /// The disc constants `λ̄(n) = w̄|_{D_n}`, an associated-system weight
    /// with `λ̄(n) ≥ 1/n²`.
    pub lam_out: SeqWeight,
}

/// Builds from `w̄'` a weight `w̄` with the three normalizer properties:
/// `C·w̄' ≤ w̄ ≤ 1` for an explicit `C`, domination of the `1/n²` floor
/// weight, and constancy on every disc `D_n` with plateau values forming an
/// associated-system weight.
///
/// `ϱ(n) = max(1/n², sup_{I_n} w̄')` is exact because `w̄'` is anchor-based.
pub fn dominating_normalize(
    wprime: &AngularWeight,
    families: &AngularFamilies,
    matrix: &KoetheMatrix,
    w1: &AngularWeight,
    n_cut: usize,
) -> Result<DominatingWeightOutput, WeightError> {
    if n_cut > matrix.n_max() || n_cut > families.n_max() {
        return Err(WeightError::PlateauCutTooLarge {
            n_cut,
            max: matrix.n_max().min(families.n_max()),
        });
    }
    let rho: Vec<f64> = (1..=n_cut)
        .map(|n| {
            let floor = 1.0 / (n * n) as f64;
            floor.max(wprime.sup_on_plateau_interval(families, n))
        })
        .collect();
    let w1bar = AngularWeight::from_plateaus(families, n_cut, |n| rho[n - 1]);
    let inner = combine(&w1bar, wprime, true);
    let wbar = combine(w1, &inner, false);

    // Ratio of two affine pieces is monotone between breakpoints, so the
    // exact C is the minimum of w̄/w̄' over the union of anchor angles.
    let mut c = f64::INFINITY;
    for &(t, _) in wbar.anchors.iter().chain(wprime.anchors.iter()) {
        c = c.min(wbar.value_at_angle(t) / wprime.value_at_angle(t));
    }

    let lam_values: Vec<f64> = (1..=n_cut).map(|n| wbar.value_at_angle(families.theta(n))).collect();
    let lam_out = SeqWeight::with_witnesses(lam_values, matrix)?;
    Ok(DominatingWeightOutput { wbar, c, lam_out })
}

/// The floor weight `w̄''`: same anchor scheme with plateau values `1/n²`.
pub fn floor_weight(families: &AngularFamilies, n_cut: usize) -> AngularWeight {
    AngularWeight::from_plateaus(families, n_cut, |n| 1.0 / (n * n) as f64)
}

// ---------------------------------------------------------------------------
// Product weights on G₁ × ℂ
// ---------------------------------------------------------------------------

/// `u_k(z₁, t)` expressed through the boundary distance `d = d(z₁)`:
/// `(1 + 1/d + t)^{-α}` for `t ≤ k`, `(1 + t)^{-α}` for `t ≥ k+1`, affine on
/// `(k, k+1)`, with `α = (k-1)/(2k)`. `u_1 ≡ 1`.
pub fn u_k_from_distance(k: usize, d: f64, t: f64) -> f64 {
    assert!(k >= 1 && d > 0.0 && t >= 0.0);
    let alpha = (k as f64 - 1.0) / (2.0 * k as f64);
    let kf = k as f64;
    if t >= kf + 1.0 {
        (1.0 + t).powf(-alpha)
    } else if t <= kf {
        (1.0 + 1.0 / d + t).powf(-alpha)
    } else {
        let lo = (1.0 + 1.0 / d + kf).powf(-alpha);
        let hi = (2.0 + kf).powf(-alpha);
        lo + (t - kf) * (hi - lo)
    }
}

/// `u_k(z₁, t)` with the distance computed from the geometry; rejects
/// `z₁ ∉ G₁`.
pub fn u_k(k: usize, z1: Complex64, t: f64) -> Result<f64, WeightError> {
    let d = HalfAnnulus::boundary_distance(z1).map_err(|_| WeightError::OutsideDomain(z1))?;
    Ok(u_k_from_distance(k, d, t))
}

/// The norm constant `C_k = (k+2)^{(k-1)/(2k)}` relating `p_{w_k}` to
/// `p_{v_k}` through the restriction map.
pub fn restriction_constant(k: usize) -> f64 {
    ((k + 2) as f64).powf((k as f64 - 1.0) / (2.0 * k as f64))
}

/// The product weight `v_k(z₁, z₂) = w_k(z₁) u_k(z₁, |z₂|)`.
#[derive(Debug, Clone)]
pub struct ProductWeight {
    base: AngularWeight,
    k: usize,
}

impl ProductWeight {
    pub fn new(base: AngularWeight, k: usize) -> Self {
        assert!(k >= 1);
        Self { base, k }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn base(&self) -> &AngularWeight {
        &self.base
    }

    pub fn value_at(&self, z1: Complex64, z2_abs: f64) -> Result<f64, WeightError> {
        Ok(self.base.value_at(z1) * u_k(self.k, z1, z2_abs)?)
    }

    /// `sup_{t ≥ 0} u_k(z₁, t)`, attained at `t = 0` or `t = k+1` by the
    /// decreasing / affine-rising / decreasing shape.
    pub fn factor_sup(&self, z1: Complex64) -> Result<f64, WeightError> {
        let d = HalfAnnulus::boundary_distance(z1).map_err(|_| WeightError::OutsideDomain(z1))?;
        let alpha = (self.k as f64 - 1.0) / (2.0 * self.k as f64);
        let at_zero = (1.0 + 1.0 / d).powf(-alpha);
        let at_bridge = ((self.k + 2) as f64).powf(-alpha);
        Ok(at_zero.max(at_bridge))
    }
}

/// A finite combination `v̄ = min_i s_i · v_{k_i}` of scaled product
/// weights, as produced by associated-system constructions on `G₁ × ℂ`.
#[derive(Debug, Clone)]
pub struct ProductWeightCombo {
    parts: Vec<(f64, ProductWeight)>,
}

impl ProductWeightCombo {
    pub fn new(parts: Vec<(f64, ProductWeight)>) -> Self {
        assert!(!parts.is_empty());
        assert!(parts.iter().all(|&(s, _)| s > 0.0));
        Self { parts }
    }

    pub fn value_at(&self, z1: Complex64, z2_abs: f64) -> Result<f64, WeightError> {
        let mut v = f64::INFINITY;
        for (s, pw) in &self.parts {
            v = v.min(s * pw.value_at(z1, z2_abs)?);
        }
        Ok(v)
    }

    /// The weight transfer `w̄(z₁) = sup_{z₂} v̄(z₁, z₂)`, computed exactly
    /// from the monotonicity structure: between consecutive breakpoints
    /// `{0, k_i, k_i+1}` every constituent is monotone, so the supremum of
    /// the min sits at a breakpoint or at the unique crossing of the rising
    /// and falling envelopes (found by bisection).
    pub fn transfer_sup(&self, z1: Complex64) -> Result<f64, WeightError> {
        let d = HalfAnnulus::boundary_distance(z1).map_err(|_| WeightError::OutsideDomain(z1))?;
        let gains: Vec<f64> = self
            .parts
            .iter()
            .map(|(s, pw)| s * pw.base.value_at(z1))
            .collect();
        let eval = |t: f64| -> f64 {
            self.parts
                .iter()
                .zip(&gains)
                .map(|((_, pw), &g)| g * u_k_from_distance(pw.k, d, t))
                .fold(f64::INFINITY, f64::min)
        };

        let mut breaks: Vec<f64> = vec![0.0];
        for (_, pw) in &self.parts {
            breaks.push(pw.k as f64);
            breaks.push(pw.k as f64 + 1.0);
        }
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup();

        let mut sup = eval(0.0);
        for w in breaks.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            sup = sup.max(eval(lo)).max(eval(hi));
            // Rising envelope: constituents on their affine bridge.
            let rising: Vec<usize> = (0..self.parts.len())
                .filter(|&i| {
                    let kf = self.parts[i].1.k as f64;
                    lo >= kf && hi <= kf + 1.0
                })
                .collect();
            if rising.is_empty() || rising.len() == self.parts.len() {
                continue;
            }
            let env = |t: f64, idx: &[usize]| -> f64 {
                idx.iter()
                    .map(|&i| gains[i] * u_k_from_distance(self.parts[i].1.k, d, t))
                    .fold(f64::INFINITY, f64::min)
            };
            let falling: Vec<usize> =
                (0..self.parts.len()).filter(|i| !rising.contains(i)).collect();
            let f = |t: f64| env(t, &rising) - env(t, &falling);
            let (mut a, mut b) = (lo, hi);
            if f(a) * f(b) < 0.0 {
                for _ in 0..100 {
                    let m = 0.5 * (a + b);
                    if f(a) * f(m) <= 0.0 {
                        b = m;
                    } else {
                        a = m;
                    }
                }
                sup = sup.max(eval(0.5 * (a + b)));
            }
        }
        // Beyond the last breakpoint every constituent decreases to 0.
        Ok(sup)
    }
}
