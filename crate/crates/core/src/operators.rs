//! The coefficient maps between the sequence space and the function space,
//! at finite truncation.
//!
//! `ψ` sends a finitely supported sequence `a` to the span element
//! `Σ a_n e_n`; `φ` extracts coefficients by integrating boundary values
//! against the unimodular conjugating factors:
//!
//! ```text
//! φ(f)_n = (2ε_n)⁻¹ ∫_{J_n} f*(e^{iθ}) χ_n(θ) dθ,   χ_n = e^{-i arg e_n*}.
//! ```
//!
//! On the truncated span this reduces to the matrix of `φψ`, whose diagonal
//! is exactly 1 and whose off-diagonal entries are bounded by
//! `ε_j 2^{-n-4}`; the perturbation `B = φψ - id` then contracts every
//! normalized sup-seminorm by 1/128, which feeds the alternating Neumann
//! series and the projection onto the embedded copy of the sequence space.
//!
//! Quadrature on `J_n` uses an open mesh geometrically graded toward both
//! endpoints (the conjugate phases have logarithmic singularities just
//! outside the interval) with a 16-point Gauss-Legendre rule per cell,
//! entirely in offset coordinates relative to the left endpoint. Boundary
//! phases of the integrand come from the radial route; the conjugating
//! factor uses the principal-value route, so the diagonal identity is a
//! genuine two-method residual rather than an algebraic cancellation.
//! Positivity of the quadrature weights makes the off-diagonal modulus
//! bound automatic: the integrand modulus is exactly `ε_j 2^{-n-4}` on the
//! whole interval.

use crate::geometry::HalfAnnulus;
use crate::outer::{OuterError, OuterFamily, RelAngle};
use crate::seq_space::{FiniteSeq, SeqWeight};
use crate::weights::{restriction_constant, u_k_from_distance, AngularWeight};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OperatorError {
    #[error(transparent)]
    Outer(#[from] OuterError),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
    #[error("support index {index} beyond the operator truncation {n_top}")]
    SupportBeyondTruncation { index: usize, n_top: usize },
    #[error("phase/quadrature error floor {floor:e} exceeds the requested tolerance {requested:e}")]
    ToleranceUnreachable { requested: f64, floor: f64 },
    #[error("Neumann inversion needs a certified contraction factor below one, got {0}")]
    NoContractionCertificate(f64),
    #[error("quadrature plan needs at least one grading level")]
    EmptyQuadPlan,
}

// 16-point Gauss-Legendre rule on [-1, 1] (positive abscissas; the rule is
// symmetric).
const GL16_X: [f64; 8] = [
    0.095_012_509_837_637_44,
    0.281_603_550_779_258_9,
    0.458_016_777_657_227_4,
    0.617_876_244_402_643_8,
    0.755_404_408_355_003,
    0.865_631_202_387_831_8,
    0.944_575_023_073_232_6,
    0.989_400_934_991_649_9,
];
const GL16_W: [f64; 8] = [
    0.189_450_610_455_068_5,
    0.182_603_415_044_923_6,
    0.169_156_519_395_002_5,
    0.149_595_988_816_576_7,
    0.124_628_971_255_533_9,
    0.095_158_511_682_492_8,
    0.062_253_523_938_647_9,
    0.027_152_459_411_754_09,
];

/// Open graded quadrature plan for the boundary intervals: `levels`
/// geometric halvings toward each endpoint, 16 Gauss-Legendre points per
/// cell.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct QuadPlan {
    pub levels: usize,
}

impl QuadPlan {
    pub fn new(levels: usize) -> Result<Self, OperatorError> {
        if levels == 0 {
            return Err(OperatorError::EmptyQuadPlan);
        }
        Ok(Self { levels })
    }

    /// Nodes and weights over `J_n` in offset coordinates from the left
    /// endpoint. Offsets are pure binary scalings of the interval width, so
    /// they stay exact however deep the grading goes.
    pub fn nodes(&self, outer: &OuterFamily, n: usize) -> Vec<(RelAngle, f64)> {
        let width = outer.j_width(n);
        let half = 0.5 * width;
        let base = outer.j_lo(n);
        let q = self.levels;
        let mut cells: Vec<(f64, f64)> = Vec::with_capacity(2 * (q + 1));
        // Left half: innermost cell touches the endpoint, then geometric
        // doubling up to the midpoint.
        let mut lo = 0.0;
        for l in (0..=q).rev() {
            let hi = half * (-(l as f64)).exp2();
            cells.push((lo, hi));
            lo = hi;
        }
        // Right half, mirrored.
        let mut hi = width;
        for l in (0..=q).rev() {
            let lo = width - half * (-(l as f64)).exp2();
            cells.push((lo, hi));
            hi = lo;
        }
        let mut out = Vec::with_capacity(cells.len() * 16);
        for (a, b) in cells {
            let mid = 0.5 * (a + b);
            let rad = 0.5 * (b - a);
            for i in 0..8 {
                out.push((RelAngle { base, offset: mid - rad * GL16_X[i] }, rad * GL16_W[i]));
                out.push((RelAngle { base, offset: mid + rad * GL16_X[i] }, rad * GL16_W[i]));
            }
        }
        out
    }
}

/// A finite span `Σ a_n e_n` of the outer family.
#[derive(Debug, Clone)]
pub struct SpanElement {
    coeffs: FiniteSeq,
}

impl SpanElement {
    pub fn new(coeffs: FiniteSeq) -> Self {
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &FiniteSeq {
        &self.coeffs
    }

    /// Evaluates `Σ a_n e_n(z)` with the summed truncation-error bound.
    pub fn eval(
        &self,
        outer: &OuterFamily,
        z: Complex64,
        m_cut: usize,
    ) -> Result<(Complex64, f64), OperatorError> {
        let ns: Vec<usize> = self.coeffs.support().collect();
        if ns.is_empty() {
            return Ok((Complex64::new(0.0, 0.0), 0.0));
        }
        let hs = outer.exponents_all(z, m_cut, &ns)?;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        for (h, n) in hs.iter().zip(&ns) {
            let e = h.value.exp();
            let a = self.coeffs.get(*n);
            sum += a * e;
            err += a.norm() * e.norm() * h.tail_bound.exp_m1();
        }
        Ok((sum, err))
    }
}

/// The conjugating factor `χ_n(θ) = e^{-i arg e_n*(e^{iθ})}` with its phase
/// error bound, from the principal-value route.
pub fn chi_n(
    outer: &OuterFamily,
    n: usize,
    angle: RelAngle,
) -> Result<(Complex64, f64), OperatorError> {
    let m_cut = outer.default_m_cut(n);
    let (phase, err) = outer.phases_pv(angle, n, m_cut)?[n - 1];
    Ok((Complex64::from_polar(1.0, -phase), err))
}

/// The truncated matrix of `φψ` with per-entry error bounds (quadrature
/// refinement difference plus propagated phase error).
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    n_top: usize,
    entries: Vec<Complex64>,
    errs: Vec<f64>,
}

/// One quadrature pass over row `n`: values of
/// `(2ε_n)⁻¹ ∫_{J_n} e_j* χ_n dθ` for `j = 1..=n_top`, with propagated
/// phase errors.
pub fn row_values(
    outer: &OuterFamily,
    n: usize,
    n_top: usize,
    plan: QuadPlan,
    m_cut: usize,
) -> Result<Vec<(Complex64, f64)>, OperatorError> {
    let nodes = plan.nodes(outer, n);
    let mut acc = vec![Complex64::new(0.0, 0.0); n_top];
    let mut perr = vec![0.0_f64; n_top];
    for (angle, wt) in nodes {
        let rad = outer.phases_radial(angle, n_top, m_cut)?;
        let (chi, chi_err) = {
            let (phase, err) = outer.phases_pv(angle, n, m_cut)?[n - 1];
            (Complex64::from_polar(1.0, -phase), err)
        };
        for j in 1..=n_top {
            let modulus = if j == n {
                1.0
            } else {
                outer.eps(j) * (-((n + 4) as f64)).exp2()
            };
            let (phase_j, err_j) = rad[j - 1];
            acc[j - 1] += wt * modulus * Complex64::from_polar(1.0, phase_j) * chi;
            perr[j - 1] += wt * modulus * (err_j + chi_err);
        }
    }
    let width = outer.j_width(n);
    Ok((0..n_top).map(|j| (acc[j] / width, perr[j] / width)).collect())
}

impl OperatorMatrix {
    /// Assembles the `n_top × n_top` matrix; the recorded error per entry is
    /// the difference between the `levels` and `levels-1` quadratures plus
    /// the propagated phase error of the finer run.
    pub fn assemble(
        outer: &OuterFamily,
        n_top: usize,
        plan: QuadPlan,
        m_cut: usize,
    ) -> Result<Self, OperatorError> {
        assert!(n_top >= 1 && n_top <= outer.m_cap());
        let coarse_plan = QuadPlan::new(plan.levels.saturating_sub(1).max(1))?;
        let mut entries = Vec::with_capacity(n_top * n_top);
        let mut errs = Vec::with_capacity(n_top * n_top);
        for n in 1..=n_top {
            let fine = row_values(outer, n, n_top, plan, m_cut)?;
            let coarse = row_values(outer, n, n_top, coarse_plan, m_cut)?;
            for j in 0..n_top {
                entries.push(fine[j].0);
                errs.push((fine[j].0 - coarse[j].0).norm() + fine[j].1);
            }
        }
        Ok(Self { n_top, entries, errs })
    }

    /// An exact identity matrix (the degenerate `B = 0` case).
    pub fn identity(n_top: usize) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); n_top * n_top];
        for n in 0..n_top {
            entries[n * n_top + n] = Complex64::new(1.0, 0.0);
        }
        Self { n_top, entries, errs: vec![0.0; n_top * n_top] }
    }

    pub fn n_top(&self) -> usize {
        self.n_top
    }

    /// `(φψ)_{nj}`, 1-based.
    pub fn entry(&self, n: usize, j: usize) -> Complex64 {
        self.entries[(n - 1) * self.n_top + (j - 1)]
    }

    pub fn err(&self, n: usize, j: usize) -> f64 {
        self.errs[(n - 1) * self.n_top + (j - 1)]
    }

    /// `B_{nj} = (φψ)_{nj} - δ_{nj}`.
    pub fn b_entry(&self, n: usize, j: usize) -> Complex64 {
        let mut e = self.entry(n, j);
        if n == j {
            e -= 1.0;
        }
        e
    }

    pub fn diag_residual(&self, n: usize) -> f64 {
        self.b_entry(n, n).norm()
    }

    pub fn max_diag_residual(&self) -> f64 {
        (1..=self.n_top).map(|n| self.diag_residual(n)).fold(0.0, f64::max)
    }

    /// Largest `|(φψ)_{nj}| / (ε_j 2^{-n-4})` over `j ≠ n`.
    pub fn max_offdiag_ratio(&self, outer: &OuterFamily) -> f64 {
        let mut worst: f64 = 0.0;
        for n in 1..=self.n_top {
            for j in 1..=self.n_top {
                if j != n {
                    let bound = outer.eps(j) * (-((n + 4) as f64)).exp2();
                    worst = worst.max(self.entry(n, j).norm() / bound);
                }
            }
        }
        worst
    }

    /// `Ba` for a sequence supported in the truncation.
    pub fn apply_b(&self, a: &FiniteSeq) -> Result<FiniteSeq, OperatorError> {
        if a.max_index() > self.n_top {
            return Err(OperatorError::SupportBeyondTruncation {
                index: a.max_index(),
                n_top: self.n_top,
            });
        }
        let mut out = FiniteSeq::zero();
        for n in 1..=self.n_top {
            let mut v = Complex64::new(0.0, 0.0);
            for (j, aj) in a.iter() {
                v += self.b_entry(n, j) * aj;
            }
            out.set(n, v);
        }
        Ok(out)
    }

    /// `(φψ)a = a + Ba`.
    pub fn apply_phi_psi(&self, a: &FiniteSeq) -> Result<FiniteSeq, OperatorError> {
        Ok(a.add(&self.apply_b(a)?))
    }

    /// Entries as `(n, j, re, im, err)` in deterministic order.
    pub fn dump_rows(&self) -> Vec<(usize, usize, f64, f64, f64)> {
        let mut rows = Vec::with_capacity(self.n_top * self.n_top);
        for n in 1..=self.n_top {
            for j in 1..=self.n_top {
                let e = self.entry(n, j);
                rows.push((n, j, e.re, e.im, self.err(n, j)));
            }
        }
        rows
    }

    /// JSON document with entries, error bounds and the certificate values.
    pub fn to_json(&self, outer: &OuterFamily) -> serde_json::Value {
        serde_json::json!({
            "n_top": self.n_top,
            "entries": self.dump_rows().iter().map(|&(n, j, re, im, err)| {
                serde_json::json!([n, j, re, im, err])
            }).collect::<Vec<_>>(),
            "max_diag_residual": self.max_diag_residual(),
            "max_offdiag_ratio": self.max_offdiag_ratio(outer),
        })
    }
}

/// `φ(f)` for a span element, through the assembled rows (φ is linear on
/// the span). Fails if the propagated per-coordinate error exceeds `tol`.
pub fn phi_apply(
    matrix: &OperatorMatrix,
    f: &SpanElement,
    tol: f64,
) -> Result<FiniteSeq, OperatorError> {
    let a = f.coeffs();
    if a.max_index() > matrix.n_top() {
        return Err(OperatorError::SupportBeyondTruncation {
            index: a.max_index(),
            n_top: matrix.n_top(),
        });
    }
    let mut out = FiniteSeq::zero();
    for n in 1..=matrix.n_top() {
        let mut v = Complex64::new(0.0, 0.0);
        let mut e = 0.0;
        for (j, aj) in a.iter() {
            v += matrix.entry(n, j) * aj;
            e += matrix.err(n, j) * aj.norm();
        }
        if e > tol {
            return Err(OperatorError::ToleranceUnreachable { requested: tol, floor: e });
        }
        out.set(n, v);
    }
    Ok(out)
}

/// Draws a coefficient vector with `p_λ̄(a) = 1`: per coordinate a uniform
/// point of the unit disc scaled by `1/λ̄(n)`, then normalized.
pub fn random_unit_seq(rng: &mut ChaCha8Rng, lam: &SeqWeight, n_top: usize) -> FiniteSeq {
    loop {
        let mut a = FiniteSeq::zero();
        for n in 1..=n_top {
            let r: f64 = rng.random::<f64>().sqrt();
            let phi: f64 = std::f64::consts::TAU * rng.random::<f64>();
            a.set(n, Complex64::from_polar(r / lam.get(n), phi));
        }
        let p = a.seminorm(lam);
        if p > 1e-3 {
            return a.scale(Complex64::new(1.0 / p, 0.0));
        }
    }
}

/// Aggregate certificate for the contraction of `B = φψ - id`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ContractionReport {
    pub trials: usize,
    /// Largest observed `p_λ̄(Ba) / p_λ̄(a)`.
    pub max_ratio: f64,
    pub ratio_bound: f64,
    /// Largest observed `Σ_j |a_j| ε_j / p_λ̄(a)`.
    pub max_ingredient: f64,
    pub ingredient_bound: f64,
    pub max_offdiag_ratio: f64,
    pub offdiag_bound: f64,
    pub max_diag_residual: f64,
    pub pass: bool,
}

/// Runs `trials` random unit-seminorm vectors through `B` and checks the
/// 1/128 contraction, the `Σ|a_j|ε_j ≤ p_λ̄(a)/8` ingredient and the
/// entrywise off-diagonal bound.
pub fn contraction_check(
    matrix: &OperatorMatrix,
    outer: &OuterFamily,
    lam: &SeqWeight,
    trials: usize,
    seed: u64,
    slack: f64,
) -> Result<ContractionReport, OperatorError> {
    assert!(lam.is_normalized(), "contraction seminorms use normalized weights");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_top = matrix.n_top();
    let mut max_ratio: f64 = 0.0;
    let mut max_ingredient: f64 = 0.0;
    for _ in 0..trials {
        let a = random_unit_seq(&mut rng, lam, n_top);
        let p = a.seminorm(lam);
        let ba = matrix.apply_b(&a)?;
        max_ratio = max_ratio.max(ba.seminorm(lam) / p);
        let ingredient: f64 = a.iter().map(|(j, v)| v.norm() * outer.eps(j)).sum();
        max_ingredient = max_ingredient.max(ingredient / p);
    }
    // Scaled unit vectors hit the per-coordinate extremes.
    for j in 1..=n_top {
        let a = FiniteSeq::unit(j).scale(Complex64::new(1.0 / lam.get(j), 0.0));
        let p = a.seminorm(lam);
        let ba = matrix.apply_b(&a)?;
        max_ratio = max_ratio.max(ba.seminorm(lam) / p);
        max_ingredient = max_ingredient.max(outer.eps(j) / lam.get(j) / p);
    }
    let ratio_bound = (1.0 / 128.0) * (1.0 + slack);
    let ingredient_bound = 1.0 / 8.0;
    let max_offdiag_ratio = matrix.max_offdiag_ratio(outer);
    let offdiag_bound = 1.0 + 1e-6;
    let max_diag_residual = matrix.max_diag_residual();
    let pass = max_ratio <= ratio_bound
        && max_ingredient <= ingredient_bound
        && max_offdiag_ratio <= offdiag_bound;
    Ok(ContractionReport {
        trials,
        max_ratio,
        ratio_bound,
        max_ingredient,
        ingredient_bound,
        max_offdiag_ratio,
        offdiag_bound,
        max_diag_residual,
        pass,
    })
}

/// `Aa = Σ_{m=0}^{M} (-1)^m B^m a` with `M` chosen from the certified
/// contraction factor so the series tail is below `tol`.
pub fn neumann_invert(
    matrix: &OperatorMatrix,
    a: &FiniteSeq,
    lam: &SeqWeight,
    delta: f64,
    tol: f64,
) -> Result<(FiniteSeq, usize), OperatorError> {
    if !(delta < 1.0) || delta < 0.0 {
        return Err(OperatorError::NoContractionCertificate(delta));
    }
    let p = a.seminorm(lam);
    if p == 0.0 {
        return Ok((FiniteSeq::zero(), 0));
    }
    // Smallest M with δ^{M+1} p/(1-δ) < tol.
    let mut m_terms = 0usize;
    let mut tail = delta * p / (1.0 - delta);
    while tail >= tol && m_terms < 200 {
        m_terms += 1;
        tail *= delta;
    }
    let mut acc = a.clone();
    let mut power = a.clone();
    let mut sign = -1.0;
    for _ in 1..=m_terms {
        power = matrix.apply_b(&power)?;
        acc = acc.add(&power.scale(Complex64::new(sign, 0.0)));
        sign = -sign;
    }
    Ok((acc, m_terms))
}

/// Residual of the inversion: `p_λ̄(φψ(Aa) - a)` and the series length.
pub fn neumann_residual(
    matrix: &OperatorMatrix,
    a: &FiniteSeq,
    lam: &SeqWeight,
    delta: f64,
    tol: f64,
) -> Result<(f64, usize), OperatorError> {
    let (aa, terms) = neumann_invert(matrix, a, lam, delta, tol)?;
    let back = matrix.apply_phi_psi(&aa)?;
    Ok((back.sub(a).seminorm(lam), terms))
}

/// Projection diagnostics at the coefficient level: for `f = ψ(c)` the
/// composite `P = (ψA)φ` acts on coefficients as `c ↦ A(φψ)c`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ProjectionReport {
    pub trials: usize,
    /// Largest `p(Pc - c)` over the battery (P is the identity on the
    /// embedded image).
    pub max_image_residual: f64,
    /// Largest idempotence residual `p(P(Pc) - Pc)`.
    pub max_idem_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

pub fn projection_check(
    matrix: &OperatorMatrix,
    lam: &SeqWeight,
    trials: usize,
    seed: u64,
    delta: f64,
    tol: f64,
) -> Result<ProjectionReport, OperatorError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_top = matrix.n_top();
    let p_coef = |c: &FiniteSeq| -> Result<FiniteSeq, OperatorError> {
        let phi_f = matrix.apply_phi_psi(c)?;
        Ok(neumann_invert(matrix, &phi_f, lam, delta, tol * 1e-2)?.0)
    };
    let mut max_image: f64 = 0.0;
    let mut max_idem: f64 = 0.0;
    let mut battery: Vec<FiniteSeq> = (1..=n_top).map(FiniteSeq::unit).collect();
    for _ in 0..trials {
        battery.push(random_unit_seq(&mut rng, lam, n_top));
    }
    battery.push(FiniteSeq::zero());
    for c in &battery {
        let pc = p_coef(c)?;
        max_image = max_image.max(pc.sub(c).seminorm(lam));
        let ppc = p_coef(&pc)?;
        max_idem = max_idem.max(ppc.sub(&pc).seminorm(lam));
    }
    Ok(ProjectionReport {
        trials,
        max_image_residual: max_image,
        max_idem_residual: max_idem,
        tol,
        pass: max_image <= tol && max_idem <= tol,
    })
}

/// Sampled continuity certificate for `ψ`: `p_w̄(Σ a_n e_n) ≤ 3 p_λ̄(a)`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct PsiNormReport {
    pub measured: f64,
    pub bound: f64,
    pub err_allowance: f64,
    pub samples: usize,
    pub pass: bool,
}

/// Evaluates the span on the sample battery (which must cover every disc
/// and the common region) against the canonical weight of `λ̄`.
pub fn psi_seminorm_check(
    outer: &OuterFamily,
    a: &FiniteSeq,
    lam: &SeqWeight,
    wbar: &AngularWeight,
    samples: &[Complex64],
    m_cut: usize,
) -> Result<PsiNormReport, OperatorError> {
    let f = SpanElement::new(a.clone());
    let mut measured: f64 = 0.0;
    let mut err: f64 = 0.0;
    for &z in samples {
        let (v, e) = f.eval(outer, z, m_cut)?;
        let w = wbar.value_at(z);
        measured = measured.max(w * v.norm());
        err = err.max(w * e);
    }
    let bound = 3.0 * a.seminorm(lam);
    Ok(PsiNormReport {
        measured,
        bound,
        err_allowance: err,
        samples: samples.len(),
        pass: measured <= bound + err,
    })
}

/// Sampled continuity certificate for `φ` on a span element:
/// `p_λ̄(φ(f)) ≤ sup_z w̄(z)|f(z)|`, returned as (lhs, rhs).
///
/// The supremum side is realized where it actually lives: the radial-limit
/// values `λ̄(n)|f*(e^{iθ})|` on the boundary intervals (the canonical
/// weight equals `λ̄(n)` on the sector over `J_n`), evaluated at the same
/// graded nodes the coefficient integrals use, plus interior bulk samples.
/// The span element is of boundary size only within `~ε_n` of the circle,
/// which interior f64 samples cannot reach for deep `n`.
#[allow(clippy::too_many_arguments)]
pub fn phi_continuity_check(
    outer: &OuterFamily,
    matrix: &OperatorMatrix,
    f: &SpanElement,
    lam: &SeqWeight,
    wbar: &AngularWeight,
    samples: &[Complex64],
    plan: QuadPlan,
    m_cut: usize,
) -> Result<(f64, f64), OperatorError> {
    let coords = phi_apply(matrix, f, 1.0)?;
    let lhs = coords.seminorm(lam);
    let mut rhs: f64 = 0.0;
    for &z in samples {
        let (v, e) = f.eval(outer, z, m_cut)?;
        rhs = rhs.max(wbar.value_at(z) * (v.norm() + e));
    }
    let support: Vec<usize> = f.coeffs().support().collect();
    let j_top = support.iter().copied().max().unwrap_or(0);
    for n in 1..=matrix.n_top() {
        for (angle, _) in plan.nodes(outer, n) {
            let phases = outer.phases_pv(angle, j_top, m_cut)?;
            let mut fstar = Complex64::new(0.0, 0.0);
            for &j in &support {
                let modulus = outer.profile_value(j, angle)?;
                fstar += f.coeffs().get(j)
                    * Complex64::from_polar(modulus, phases[j - 1].0);
            }
            rhs = rhs.max(lam.get(n) * fstar.norm());
        }
    }
    Ok((lhs, rhs))
}

/// The two restriction estimates for the constant extension `f = ḡ` on
/// `G₁ × ℂ`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RestrictionReport {
    pub k: usize,
    pub c_k: f64,
    /// `sup w_k |g|` over the z₁ samples.
    pub p_wk: f64,
    /// `sup v_k |ḡ|` over the product grid.
    pub p_vk: f64,
    /// `p_wk ≤ C_k · p_vk`.
    pub restriction_pass: bool,
    /// `p_vk ≤ p_wk` (from `0 ≤ u_k ≤ 1`).
    pub domination_pass: bool,
}

/// Evaluates both sup-norms on a shared `z₁` sample set and a `|z₂|` grid
/// that includes the bridge point `k+1` (where `C_k u_k = 1`).
pub fn restriction_check(
    outer: &OuterFamily,
    k: usize,
    g: &SpanElement,
    wk: &AngularWeight,
    z1_samples: &[Complex64],
    z2_radii: &[f64],
    m_cut: usize,
) -> Result<RestrictionReport, OperatorError> {
    assert!(
        z2_radii.iter().any(|&t| t == (k + 1) as f64),
        "z₂ grid must include |z₂| = k+1"
    );
    let c_k = restriction_constant(k);
    let mut p_wk: f64 = 0.0;
    let mut p_vk: f64 = 0.0;
    for &z1 in z1_samples {
        let (v, _) = g.eval(outer, z1, m_cut)?;
        let gmod = v.norm();
        let w = wk.value_at(z1);
        p_wk = p_wk.max(w * gmod);
        let d = HalfAnnulus::boundary_distance(z1)?;
        for &t in z2_radii {
            p_vk = p_vk.max(w * u_k_from_distance(k, d, t) * gmod);
        }
    }
    Ok(RestrictionReport {
        k,
        c_k,
        p_wk,
        p_vk,
        restriction_pass: p_wk <= c_k * p_vk * (1.0 + 1e-12),
        domination_pass: p_vk <= p_wk * (1.0 + 1e-12),
    })
}
