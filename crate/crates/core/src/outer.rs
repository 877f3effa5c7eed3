//! The outer-function family `e_n` with prescribed boundary modulus.
//!
//! The boundary data is the piecewise-constant profile
//! `φ_n(θ) = 1` on `J_n`, `ε_n 2^{-m-4}` on `J_m` (`m ≠ n`), `ε_n`
//! elsewhere, and
//!
//! ```text
//! e_n(z) = exp(h_n(z)),   h_n(z) = (1/2π) ∫₀^{2π} (e^{iθ}+z)/(e^{iθ}-z) · log φ_n(θ) dθ.
//! ```
//!
//! Since `log φ_n` is the constant `log ε_n` plus jumps supported on the
//! intervals `J_m`, the integral splits into a full-circle term (exactly
//! `log ε_n`) and per-interval segment integrals with the closed-form
//! antiderivative `F(θ) = θ - 2i·log(1 - z e^{-iθ})`. The principal branch
//! is safe: `Re(1 - z e^{-iθ}) ≥ 1 - |z| > 0` keeps the path in the right
//! half-plane. The only approximation is the truncation of the interval
//! family at `m_cut`, and that error carries a rigorous bound
//! (`Σ_{m>m_cut} (m+4)·ln 2 · 2ε_m · (2/δ_min)/2π` with `δ_min` the exact
//! distance from `z` to the arc holding the discarded intervals).
//!
//! Numerical care, in two places. First, the kernel logarithm is evaluated
//! through `δ = 1 - |z|` instead of `|z|`, so boundary approach is exact in
//! `δ` down to arbitrarily small values. Second, angles may be addressed
//! relative to a stored interval endpoint ([`RelAngle`]): the deep intervals
//! are only a few thousand ulps wide, and quadrature nodes inside them are
//! representable only as offsets.
//!
//! Boundary values: the modulus of `e_n*` is `φ_n(θ)` exactly; the phase is
//! computed two independent ways: radial Richardson extrapolation of
//! `Im h_n((1-δ)e^{iθ})`, and the closed-form principal-value sum at `δ = 0`
//! (the `-2π` correction of the containing segment is real, so the phase
//! needs no special casing). Each route serves as the other's oracle.

use crate::geometry::AngularFamilies;
use num_complex::Complex64;
use std::f64::consts::{LN_2, PI, TAU};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OuterError {
    #[error("point {0} must lie strictly inside the unit disc")]
    NotInsideDisc(Complex64),
    #[error("cannot bound the truncation tail: the point touches the residual arc")]
    TailUnbounded,
    #[error("m_cut = {m_cut} must cover the target index n = {n}")]
    MCutTooSmall { m_cut: usize, n: usize },
    #[error("m_cut = {m_cut} exceeds the materialized intervals (cap {cap})")]
    MCutBeyondCap { m_cut: usize, cap: usize },
    #[error("phase has a logarithmic singularity at interval jumps; θ = {theta} is too close (distance {dist:e})")]
    PhaseAtJump { theta: f64, dist: f64 },
    #[error("boundary index n = {0} is not materialized")]
    IndexBeyondCap(usize),
}

/// An angle `θ = base + offset`, kept split so that angular distances to the
/// endpoint `base` survive at full precision even when `offset` is far below
/// one ulp of `base`.
#[derive(Debug, Clone, Copy)]
pub struct RelAngle {
    pub base: f64,
    pub offset: f64,
}

impl RelAngle {
    pub fn plain(theta: f64) -> Self {
        Self { base: theta, offset: 0.0 }
    }

    pub fn theta(self) -> f64 {
        self.base + self.offset
    }

    /// `θ - x`, exact when `x == base`.
    pub fn delta_to(self, x: f64) -> f64 {
        (self.base - x) + self.offset
    }
}

/// `log(1 - r e^{iu})` with `r = 1 - delta`, principal branch.
///
/// Components are assembled without cancellation:
/// `Re w = 2 sin²(u/2) + δ cos u`, `Im w = -(1-δ) sin u`; `Re w ≥ 0` keeps
/// `atan2` on the principal branch.
fn log_one_minus_re(delta: f64, u: f64) -> Complex64 {
    let s = (0.5 * u).sin();
    let re = 2.0 * s * s + delta * u.cos();
    let im = -(1.0 - delta) * u.sin();
    Complex64::new((re * re + im * im).ln() * 0.5, im.atan2(re))
}

/// `∫_a^b (e^{iθ}+z)/(e^{iθ}-z) dθ` in closed form via the branch-safe
/// antiderivative `F(θ) = θ - 2i·log(1 - z e^{-iθ})`.
pub fn herglotz_segment(z: Complex64, a: f64, b: f64) -> Result<Complex64, OuterError> {
    if z.norm() >= 1.0 {
        return Err(OuterError::NotInsideDisc(z));
    }
    assert!((0.0..=TAU + 1e-12).contains(&a) && a < b && b <= TAU + 1e-12);
    let delta = 1.0 - z.norm();
    let t = z.arg();
    Ok(segment_from_deltas(delta, t - a, t - b, b - a))
}

/// Segment value from precomputed angular distances `u_a = θ_z - a`,
/// `u_b = θ_z - b` and the exact width `b - a`:
/// `S = (b-a) - 2i·(log w(b) - log w(a))`.
fn segment_from_deltas(delta: f64, u_a: f64, u_b: f64, width: f64) -> Complex64 {
    let lg = log_one_minus_re(delta, u_b) - log_one_minus_re(delta, u_a);
    Complex64::new(width + 2.0 * lg.im, -2.0 * lg.re)
}

/// The exponent value `h_n(z)` with its truncation certificate.
#[derive(Debug, Clone, Copy)]
pub struct OuterExponent {
    /// `h_n(z) = log e_n(z)` for the materialized profile.
    pub value: Complex64,
    /// Rigorous bound on the error from the intervals beyond `m_cut`.
    pub tail_bound: f64,
    pub m_cut: usize,
}

/// Where an angle sits relative to the materialized interval family.
#[derive(Debug, Clone, Copy)]
pub struct AngleLocation {
    /// Containing interval `J_m`, if the angle lies strictly inside one.
    pub interval: Option<usize>,
    /// Distance to the nearest materialized jump.
    pub jump_dist: f64,
}

/// Phase computation route for boundary values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum PhaseMethod {
    /// Richardson extrapolation of `Im h_n((1-δ)e^{iθ})` along `δ → 0`.
    Radial,
    /// Closed-form principal-value sum at `δ = 0`.
    Pv,
}

/// Boundary value of `e_n*` at an admissible angle: modulus exact from the
/// profile, phase computed with a recorded error bound.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryValue {
    pub modulus: f64,
    pub phase: f64,
    pub err: f64,
}

/// The family `e_1, e_2, …` over a shared interval structure, materialized
/// up to `m_cap` boundary intervals.
#[derive(Debug, Clone)]
pub struct OuterFamily {
    families: AngularFamilies,
    m_cap: usize,
    j_lo: Vec<f64>,
    j_width: Vec<f64>,
    eps: Vec<f64>,
    log_eps: Vec<f64>,
    /// `tail_sum[m] = Σ_{m' > m} (m'+4)·ln2 · 2ε_{m'}`.
    tail_sum: Vec<f64>,
}

/// Ratio between the distance to the nearest jump and the first radial
/// extrapolation node.
const RADIAL_RATIO: f64 = 256.0;
const RADIAL_NODES: usize = 5;

impl OuterFamily {
    pub fn new(families: AngularFamilies, m_cap: usize) -> Result<Self, OuterError> {
        if !(1..=900).contains(&m_cap) {
            return Err(OuterError::MCutBeyondCap { m_cut: m_cap, cap: 900 });
        }
        let j_lo: Vec<f64> = (1..=m_cap).map(|m| families.j_lo(m)).collect();
        let j_width: Vec<f64> = (1..=m_cap).map(|m| families.j_width(m)).collect();
        let eps: Vec<f64> = (1..=m_cap).map(|m| families.eps(m)).collect();
        let log_eps: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
        // Cumulative tail sums; summands fall off faster than 1/2 per step,
        // so a few hundred extra terms exhaust f64.
        let mut tail_sum = vec![0.0; m_cap + 1];
        let mut deep = 0.0;
        let mut mm = m_cap + 1;
        loop {
            let term = ((mm + 4) as f64) * LN_2 * 2.0 * crate::geometry::default_eps(mm);
            if term == 0.0 || mm > m_cap + 1200 {
                break;
            }
            deep += term;
            mm += 1;
        }
        tail_sum[m_cap] = deep;
        for m in (0..m_cap).rev() {
            tail_sum[m] = tail_sum[m + 1] + ((m + 1 + 4) as f64) * LN_2 * j_width[m];
        }
        Ok(Self { families, m_cap, j_lo, j_width, eps, log_eps, tail_sum })
    }

    pub fn families(&self) -> &AngularFamilies {
        &self.families
    }

    pub fn m_cap(&self) -> usize {
        self.m_cap
    }

    pub fn eps(&self, n: usize) -> f64 {
        self.eps[n - 1]
    }

    /// Left endpoint of `J_n`, the base for offset-addressed nodes.
    pub fn j_lo(&self, n: usize) -> f64 {
        self.j_lo[n - 1]
    }

    /// Exact interval width `2ε_n` used in quadrature normalization.
    pub fn j_width(&self, n: usize) -> f64 {
        self.j_width[n - 1]
    }

    /// Locates an angle against the materialized intervals: containing
    /// interval (strict interior) and distance to the nearest jump. The
    /// candidate intervals come from `m ≈ 1/(2θ)` bracketing.
    pub fn locate(&self, angle: RelAngle) -> AngleLocation {
        let theta = angle.theta();
        let guess = if theta > 0.0 {
            (0.5 / theta).round() as i64
        } else {
            self.m_cap as i64
        };
        let lo = (guess - 2).max(1) as usize;
        let hi = ((guess + 2).max(1) as usize).min(self.m_cap);
        let mut interval = None;
        let mut jump_dist = f64::INFINITY;
        for m in lo..=hi.max(lo) {
            let u_l = angle.delta_to(self.j_lo[m - 1]);
            let u_r = u_l - self.j_width[m - 1];
            if u_l > 0.0 && u_r < 0.0 {
                interval = Some(m);
            }
            jump_dist = jump_dist.min(u_l.abs()).min(u_r.abs());
        }
        AngleLocation { interval, jump_dist }
    }

    /// The boundary profile value `φ_n(θ)`, exact.
    pub fn profile_value(&self, n: usize, angle: RelAngle) -> Result<f64, OuterError> {
        if n > self.m_cap {
            return Err(OuterError::IndexBeyondCap(n));
        }
        Ok(match self.locate(angle).interval {
            Some(m) if m == n => 1.0,
            Some(m) => self.eps[n - 1] * (-((m + 4) as f64)).exp2(),
            None => self.eps[n - 1],
        })
    }

    /// Jump coefficient of `log φ_n` on `J_m` relative to the base level
    /// `log ε_n`.
    fn jump_coeff(&self, n: usize, m: usize) -> f64 {
        if m == n {
            -self.log_eps[n - 1]
        } else {
            -((m + 4) as f64) * LN_2
        }
    }

    /// One pass of segment integrals over every `J_m`, `m ≤ m_cut`,
    /// parameterized by `δ = 1 - |z|` and the angle of `z`.
    fn segment_pass(&self, delta: f64, angle: RelAngle, m_cut: usize) -> Vec<Complex64> {
        (0..m_cut)
            .map(|i| {
                let u_l = angle.delta_to(self.j_lo[i]);
                let u_r = u_l - self.j_width[i];
                segment_from_deltas(delta, u_l, u_r, self.j_width[i])
            })
            .collect()
    }

    /// Distance from `z` to the arc `{e^{iθ} : 0 ≤ θ ≤ θ_{m_cut+1} + ε}`
    /// that carries every discarded interval.
    fn residual_arc_distance(&self, z: Complex64, m_cut: usize) -> f64 {
        let alpha = self.families.theta(m_cut + 1) + crate::geometry::default_eps(m_cut + 1);
        let phi = z.arg().clamp(0.0, alpha);
        (z - Complex64::from_polar(1.0, phi)).norm()
    }

    fn tail_bound_at(&self, z: Complex64, m_cut: usize) -> Result<f64, OuterError> {
        let d = self.residual_arc_distance(z, m_cut);
        if !(d > 0.0) {
            return Err(OuterError::TailUnbounded);
        }
        Ok(self.tail_sum[m_cut] * (2.0 / d) / TAU)
    }

    /// `h_n(z)` for `|z| < 1` with the truncation certificate.
    pub fn exponent(
        &self,
        n: usize,
        z: Complex64,
        m_cut: usize,
    ) -> Result<OuterExponent, OuterError> {
        Ok(self.exponents_all(z, m_cut, &[n])?.pop().unwrap())
    }

    /// `h_n(z)` for every requested `n` from a single segment pass.
    pub fn exponents_all(
        &self,
        z: Complex64,
        m_cut: usize,
        ns: &[usize],
    ) -> Result<Vec<OuterExponent>, OuterError> {
        if z.norm() >= 1.0 {
            return Err(OuterError::NotInsideDisc(z));
        }
        if m_cut > self.m_cap {
            return Err(OuterError::MCutBeyondCap { m_cut, cap: self.m_cap });
        }
        for &n in ns {
            if m_cut < n {
                return Err(OuterError::MCutTooSmall { m_cut, n });
            }
        }
        let tail = self.tail_bound_at(z, m_cut)?;
        let delta = 1.0 - z.norm();
        let segs = self.segment_pass(delta, RelAngle::plain(z.arg()), m_cut);
        Ok(ns
            .iter()
            .map(|&n| {
                // The full-circle base integrates to exactly 2π.
                let mut h = Complex64::new(self.log_eps[n - 1], 0.0);
                for (i, s) in segs.iter().enumerate() {
                    h += self.jump_coeff(n, i + 1) / TAU * s;
                }
                OuterExponent { value: h, tail_bound: tail, m_cut }
            })
            .collect())
    }

    /// `h_n(z)` raising `m_cut` until the tail certificate drops below
    /// `tail_target` (or the materialization cap is reached).
    pub fn exponent_adaptive(
        &self,
        n: usize,
        z: Complex64,
        tail_target: f64,
    ) -> Result<OuterExponent, OuterError> {
        let mut m_cut = n.max(40).min(self.m_cap);
        loop {
            let e = self.exponent(n, z, m_cut)?;
            if e.tail_bound < tail_target || m_cut == self.m_cap {
                return Ok(e);
            }
            m_cut = (m_cut + 16).min(self.m_cap);
        }
    }

    /// `e_n(z) = exp(h_n(z))` with a propagated absolute error bound.
    pub fn eval(
        &self,
        n: usize,
        z: Complex64,
        m_cut: usize,
    ) -> Result<(Complex64, f64), OuterError> {
        let h = self.exponent(n, z, m_cut)?;
        let e = h.value.exp();
        Ok((e, e.norm() * h.tail_bound.exp_m1()))
    }

    // -- boundary values ----------------------------------------------------

    /// `Im h_n*(e^{iθ})` for every `n ≤ n_top` by the principal-value route.
    ///
    /// At `δ = 0` the containing segment needs a `-2π` correction, but that
    /// correction is real, so the imaginary part is the plain segment sum.
    /// Valid for any angle off the jump set.
    pub fn phases_pv(
        &self,
        angle: RelAngle,
        n_top: usize,
        m_cut: usize,
    ) -> Result<Vec<(f64, f64)>, OuterError> {
        let loc = self.locate(angle);
        if loc.jump_dist == 0.0 {
            return Err(OuterError::PhaseAtJump { theta: angle.theta(), dist: 0.0 });
        }
        let z = Complex64::from_polar(1.0, angle.theta());
        let tail = self.tail_bound_at(z, m_cut)?;
        let segs = self.segment_pass(0.0, angle, m_cut);
        Ok((1..=n_top)
            .map(|n| {
                let mut im = 0.0;
                for (i, s) in segs.iter().enumerate() {
                    im += self.jump_coeff(n, i + 1) / TAU * s.im;
                }
                (im, tail)
            })
            .collect())
    }

    /// `Im h_n*(e^{iθ})` for every `n ≤ n_top` by radial extrapolation:
    /// Neville extrapolation of `Im h_n((1-δ)e^{iθ})` to `δ = 0` along
    /// `δ_i = d/(256·2^i)` with `d` the distance to the nearest jump. The
    /// reported error is the last extrapolation correction plus the tail.
    pub fn phases_radial(
        &self,
        angle: RelAngle,
        n_top: usize,
        m_cut: usize,
    ) -> Result<Vec<(f64, f64)>, OuterError> {
        let loc = self.locate(angle);
        let d = loc.jump_dist;
        if !(d > 0.0) {
            return Err(OuterError::PhaseAtJump { theta: angle.theta(), dist: d });
        }
        let delta0 = d / RADIAL_RATIO;
        let deltas: Vec<f64> =
            (0..RADIAL_NODES).map(|i| delta0 * (-(i as f64)).exp2()).collect();
        let mut samples: Vec<Vec<f64>> = Vec::with_capacity(RADIAL_NODES);
        for &delta in &deltas {
            let segs = self.segment_pass(delta, angle, m_cut);
            let row: Vec<f64> = (1..=n_top)
                .map(|n| {
                    let mut im = 0.0;
                    for (i, s) in segs.iter().enumerate() {
                        im += self.jump_coeff(n, i + 1) / TAU * s.im;
                    }
                    im
                })
                .collect();
            samples.push(row);
        }
        let z_inner = Complex64::from_polar(1.0 - delta0, angle.theta());
        let tail = self.tail_bound_at(z_inner, m_cut)?;
        Ok((0..n_top)
            .map(|j| {
                let ys: Vec<f64> = samples.iter().map(|row| row[j]).collect();
                let (value, extrap_err) = neville_to_zero(&deltas, &ys);
                (value, extrap_err + tail)
            })
            .collect())
    }

    /// Boundary value of `e_n*`: exact modulus, phase by the chosen route.
    pub fn boundary_value(
        &self,
        n: usize,
        angle: RelAngle,
        method: PhaseMethod,
    ) -> Result<BoundaryValue, OuterError> {
        if n > self.m_cap {
            return Err(OuterError::IndexBeyondCap(n));
        }
        let modulus = self.profile_value(n, angle)?;
        let m_cut = self.default_m_cut(n);
        let (phase, err) = match method {
            PhaseMethod::Pv => self.phases_pv(angle, n, m_cut)?[n - 1],
            PhaseMethod::Radial => self.phases_radial(angle, n, m_cut)?[n - 1],
        };
        Ok(BoundaryValue { modulus, phase, err })
    }

    pub fn default_m_cut(&self, n: usize) -> usize {
        n.max(40).min(self.m_cap)
    }

    /// Radial modulus limit `lim_{δ→0} |e_n((1-δ)e^{iθ})|`, extrapolated the
    /// same way as the phases, with the raw radial log-moduli returned for
    /// Cauchy diagnostics.
    pub fn radial_modulus_limit(
        &self,
        n: usize,
        angle: RelAngle,
        m_cut: usize,
    ) -> Result<(f64, f64, Vec<f64>), OuterError> {
        let loc = self.locate(angle);
        let d = loc.jump_dist;
        if !(d > 0.0) {
            return Err(OuterError::PhaseAtJump { theta: angle.theta(), dist: d });
        }
        let delta0 = d / RADIAL_RATIO;
        let deltas: Vec<f64> =
            (0..RADIAL_NODES).map(|i| delta0 * (-(i as f64)).exp2()).collect();
        let mut res = Vec::with_capacity(RADIAL_NODES);
        for &delta in &deltas {
            let segs = self.segment_pass(delta, angle, m_cut);
            let mut re = self.log_eps[n - 1];
            for (i, s) in segs.iter().enumerate() {
                re += self.jump_coeff(n, i + 1) / TAU * s.re;
            }
            res.push(re);
        }
        let (log_limit, extrap_err) = neville_to_zero(&deltas, &res);
        let z_inner = Complex64::from_polar(1.0 - delta0, angle.theta());
        let tail = self.tail_bound_at(z_inner, m_cut)?;
        Ok((log_limit.exp(), (extrap_err + tail).max(f64::MIN_POSITIVE), res))
    }
}

/// Polynomial (Neville) extrapolation of `(x_i, y_i)` to `x = 0`; returns
/// the value and the magnitude of the last correction column.
fn neville_to_zero(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len();
    assert!(n >= 2);
    let mut t = ys.to_vec();
    let mut prev_head = t[0];
    let mut corr = f64::INFINITY;
    for k in 1..n {
        for i in 0..n - k {
            t[i] = (xs[i] * t[i + 1] - xs[i + k] * t[i]) / (xs[i] - xs[i + k]);
        }
        corr = (t[0] - prev_head).abs();
        prev_head = t[0];
    }
    (t[0], corr)
}

/// Report of the complement-region modulus check for one `n`: the sampled
/// maximum of `Re h_n + tail` against `log 2^{-4-n}`, plus the pure
/// arithmetic implication from the epsilon schedule.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CnBoundReport {
    pub n: usize,
    pub samples: usize,
    /// `max_z (Re h_n(z) + tail)` over the complement samples (log domain).
    pub max_log_modulus: f64,
    /// `-(4+n)·ln 2`.
    pub log_bound: f64,
    pub numeric_pass: bool,
    /// `π⁻¹ ε_n 2¹² n⁴ + ε_n`.
    pub arithmetic_lhs: f64,
    /// `2^{-4-n}`.
    pub arithmetic_bound: f64,
    pub arithmetic_pass: bool,
}

/// Checks `|e_n| ≤ 2^{-4-n}` on complement samples (log domain, tail
/// included) and the schedule arithmetic `π⁻¹ε_n2¹²n⁴ + ε_n ≤ 2^{-4-n}`.
pub fn modulus_bound_check(
    outer: &OuterFamily,
    n: usize,
    samples: &[Complex64],
    m_cut: usize,
) -> Result<CnBoundReport, OuterError> {
    let mut max_log = f64::NEG_INFINITY;
    for &z in samples {
        let e = outer.exponent(n, z, m_cut)?;
        max_log = max_log.max(e.value.re + e.tail_bound);
    }
    let log_bound = -((4 + n) as f64) * LN_2;
    let eps = outer.eps(n);
    let nf = n as f64;
    let lhs = eps * 4096.0 * nf.powi(4) / PI + eps;
    let bound = (-(4.0 + nf)).exp2();
    Ok(CnBoundReport {
        n,
        samples: samples.len(),
        max_log_modulus: max_log,
        log_bound,
        numeric_pass: max_log <= log_bound,
        arithmetic_lhs: lhs,
        arithmetic_bound: bound,
        arithmetic_pass: lhs <= bound,
    })
}

/// Report of the radial-limit check at one admissible angle.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RadialLimitReport {
    pub theta: f64,
    pub limit: f64,
    pub target: f64,
    pub rel_err: f64,
    /// The log-modulus differences along the δ-sequence keep shrinking.
    pub cauchy: bool,
    pub pass: bool,
}

/// Verifies `|e_n((1-δ)e^{iθ})| → φ_n(θ)` at an admissible angle within the
/// given relative tolerance.
pub fn radial_convergence_check(
    outer: &OuterFamily,
    n: usize,
    angle: RelAngle,
    rel_tol: f64,
) -> Result<RadialLimitReport, OuterError> {
    let m_cut = outer.default_m_cut(n);
    let (limit, _err, log_samples) = outer.radial_modulus_limit(n, angle, m_cut)?;
    let target = outer.profile_value(n, angle)?;
    let rel_err = (limit - target).abs() / target;
    let diffs: Vec<f64> = log_samples.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let mut cauchy = true;
    for w in diffs.windows(2) {
        if w[1] > 0.75 * w[0] + 1e-13 {
            cauchy = false;
        }
    }
    Ok(RadialLimitReport {
        theta: angle.theta(),
        limit,
        target,
        rel_err,
        cauchy,
        pass: rel_err <= rel_tol && cauchy,
    })
}

/// A thin view of the boundary profile `φ_n`.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryProfile<'a> {
    outer: &'a OuterFamily,
    n: usize,
}

impl<'a> BoundaryProfile<'a> {
    pub fn new(outer: &'a OuterFamily, n: usize) -> Result<Self, OuterError> {
        if n > outer.m_cap() {
            return Err(OuterError::IndexBeyondCap(n));
        }
        Ok(Self { outer, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self, theta: f64) -> f64 {
        self.outer.profile_value(self.n, RelAngle::plain(theta)).unwrap()
    }
}

/// Admissible test angles for boundary checks of `e_n`: interval centers,
/// gap midpoints and generic far angles, all clear of the jump keep-out.
pub fn admissible_angles(outer: &OuterFamily, n: usize, count: usize) -> Vec<RelAngle> {
    let fam = outer.families();
    let mut out: Vec<RelAngle> = Vec::with_capacity(count);
    out.push(RelAngle { base: outer.j_lo(n), offset: outer.eps(n) });
    for m in 1..=8usize {
        if m != n && out.len() < count {
            out.push(RelAngle { base: outer.j_lo(m), offset: outer.eps(m) });
        }
    }
    for m in 1..8usize {
        if out.len() < count {
            out.push(RelAngle::plain(0.5 * (fam.j_hi(m + 1) + fam.j_lo(m))));
        }
    }
    let far = [0.7, 1.0, 1.4, 1.9, 2.3, 2.7, 3.0, PI - 0.05, 0.6, 0.85];
    for t in far {
        if out.len() < count {
            out.push(RelAngle::plain(t));
        }
    }
    out.truncate(count);
    out
}
