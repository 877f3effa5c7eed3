//! The verification battery: every quantitative inequality of the
//! construction, run in dependency order and aggregated into a
//! deterministic machine-readable report.
//!
//! Each check record carries a stable anchor string, the measured quantity,
//! the required bound, the margin and a pass flag. Records are labeled
//! `certified` when the computation is closed-form with a bounded tail, and
//! `sampled` when the verdict rests on the density of a sample battery
//! (sup/inf estimates, quadrature-backed values). Reports are byte-stable
//! for a fixed configuration and seed: no timestamps, ordered maps, fixed
//! check order.

use crate::geometry::{
    default_eps, sample_common_region, sample_near_disc_boundary, sample_region,
    sector_max_deviation, AngularFamilies, HalfAnnulus, Region, SamplePlan,
};
use crate::operators::{
    contraction_check, neumann_residual, phi_continuity_check, projection_check,
    random_unit_seq, OperatorMatrix, QuadPlan, SpanElement,
};
use crate::outer::{
    admissible_angles, modulus_bound_check, radial_convergence_check, OuterFamily,
    PhaseMethod,
};
use crate::seq_space::{normalize_seq_weight, FiniteSeq, KoetheMatrix, SeqWeight};
use crate::weights::{
    floor_weight, dominating_normalize, make_canonical_wbar, make_wk,
    u_k_from_distance,
};
use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BatteryError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
    #[error(transparent)]
    Weights(#[from] crate::weights::WeightError),
    #[error(transparent)]
    Outer(#[from] crate::outer::OuterError),
    #[error(transparent)]
    Operators(#[from] crate::operators::OperatorError),
    #[error(transparent)]
    SeqSpace(#[from] crate::seq_space::SeqSpaceError),
}

/// Resolved configuration of a battery run. Everything that influences a
/// report lives here; the report embeds the struct plus its hash.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyConfig {
    /// Largest weight/geometry index materialized for plateau families.
    pub n_max: usize,
    /// Operator truncation (quadrature-backed checks).
    pub trunc_n: usize,
    /// Deepest matrix level for the weight system.
    pub k_max: usize,
    /// Outer-function interval truncation (raised adaptively per point when
    /// the tail certificate demands it).
    pub m_cut: usize,
    /// Grading levels of the interval quadrature.
    pub quad_levels: usize,
    /// Complement samples per index.
    pub cn_samples: usize,
    /// Extra complement samples within 1e-3 of each disc boundary.
    pub cn_near_samples: usize,
    /// Admissible boundary angles per index.
    pub boundary_angles: usize,
    /// Total sample budget of the span-continuity battery.
    pub psi_samples: usize,
    /// Samples per disc / per weight for the normalizer certificates.
    pub normalizer_samples: usize,
    /// Random probe vectors for operator checks.
    pub trials: usize,
    pub seed: u64,
    /// Per-check tolerance overrides; unset keys use the defaults.
    pub tolerances: BTreeMap<String, f64>,
    /// Output directory for reports and dumps. Not part of the serialized
    /// config or its hash: it does not influence any computed value, and
    /// reports must stay byte-identical wherever they are written.
    #[serde(skip)]
    pub out_dir: String,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            n_max: 12,
            trunc_n: 8,
            k_max: 5,
            m_cut: 40,
            quad_levels: 6,
            cn_samples: 1000,
            cn_near_samples: 200,
            boundary_angles: 20,
            psi_samples: 100_000,
            normalizer_samples: 10_000,
            trials: 100,
            seed: 17,
            tolerances: BTreeMap::new(),
            out_dir: "wlim-out".to_string(),
        }
    }
}

impl VerifyConfig {
    /// Default tolerance per check anchor.
    pub fn default_tol(anchor: &str) -> f64 {
        match anchor {
            "poisson_normalization" => 1e-10,
            "boundary_modulus_limit" => 1e-6,
            "phase_two_route_agreement" => 1e-9,
            "diagonal_identity" => 1e-6,
            "off_diagonal_slack" => 1e-6,
            "contraction_slack" => 1e-3,
            "neumann_residual" => 1e-9,
            "projection_residual" => 1e-6,
            "boundary_distance_agreement" => 1e-6,
            "dominating_weight_slack" => 1e-9,
            _ => 1e-9,
        }
    }

    pub fn tol(&self, anchor: &str) -> f64 {
        self.tolerances
            .get(anchor)
            .copied()
            .unwrap_or_else(|| Self::default_tol(anchor))
    }

    pub fn validate(&self) -> Result<(), BatteryError> {
        let positive = [
            ("n_max", self.n_max),
            ("trunc_n", self.trunc_n),
            ("k_max", self.k_max),
            ("m_cut", self.m_cut),
            ("quad_levels", self.quad_levels),
            ("cn_samples", self.cn_samples),
            ("cn_near_samples", self.cn_near_samples),
            ("boundary_angles", self.boundary_angles),
            ("psi_samples", self.psi_samples),
            ("normalizer_samples", self.normalizer_samples),
            ("trials", self.trials),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(BatteryError::InvalidConfig(format!("{name} must be positive")));
            }
        }
        if self.trunc_n > self.n_max {
            return Err(BatteryError::InvalidConfig(
                "trunc_n cannot exceed n_max".into(),
            ));
        }
        if self.m_cut < self.n_max || self.m_cut > 900 {
            return Err(BatteryError::InvalidConfig(
                "m_cut must lie between n_max and 900".into(),
            ));
        }
        for (k, &v) in &self.tolerances {
            if !v.is_finite() || !(0.0..1.0).contains(&v) {
                return Err(BatteryError::InvalidConfig(format!(
                    "tolerance {k}={v} outside [0, 1)"
                )));
            }
        }
        Ok(())
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// FNV-1a hash of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        let mut h: u64 = 0xcbf29ce484222325;
        for b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        format!("{h:016x}")
    }
}

/// Epistemic status of a check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckBasis {
    /// Closed form with rigorously bounded truncation error.
    Certified,
    /// Verdict rests on sample density or estimated quadrature error.
    Sampled,
}

/// One verified inequality: `measured ≤ bound` with `margin = bound -
/// measured`.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    /// Stable identifier of the inequality (or "plumbing").
    pub anchor: String,
    pub basis: CheckBasis,
    pub measured: f64,
    pub bound: f64,
    pub margin: f64,
    pub pass: bool,
    pub detail: String,
}

impl CheckRecord {
    fn le(anchor: &str, basis: CheckBasis, measured: f64, bound: f64, detail: String) -> Self {
        Self {
            anchor: anchor.to_string(),
            basis,
            measured,
            bound,
            margin: bound - measured,
            pass: measured <= bound,
            detail,
        }
    }

    fn unreachable(anchor: &str, basis: CheckBasis, floor: f64, requested: f64) -> Self {
        Self {
            anchor: anchor.to_string(),
            basis,
            measured: floor,
            bound: requested,
            margin: requested - floor,
            pass: false,
            detail: format!(
                "tolerance unreachable: method error floor {floor:e} exceeds requested {requested:e}"
            ),
        }
    }
}

/// Aggregated battery output.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub config: VerifyConfig,
    pub config_hash: String,
    pub checks: Vec<CheckRecord>,
    pub passed: usize,
    pub failed: usize,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

struct Env {
    config: VerifyConfig,
    families: AngularFamilies,
    outer: OuterFamily,
    matrix: KoetheMatrix,
}

impl Env {
    fn new(config: VerifyConfig) -> Result<Self, BatteryError> {
        config.validate()?;
        let families = AngularFamilies::new(config.m_cut)?;
        let outer = OuterFamily::new(families.clone(), config.m_cut)?;
        let matrix = KoetheMatrix::default_matrix(config.n_max.max(50), config.k_max)?;
        Ok(Self { config, families, outer, matrix })
    }

    /// The normalized weight battery: canonical shapes plus normalizer
    /// outputs, truncated to the operator range.
    fn lam_battery(&self) -> Result<Vec<SeqWeight>, BatteryError> {
        let n = self.config.trunc_n;
        let mut out = vec![
            SeqWeight::new(vec![1.0; n])?,
            SeqWeight::new((1..=n).map(|i| 1.0 / i as f64).collect())?,
            SeqWeight::new((1..=n).map(|i| (i as f64).powf(-1.5)).collect())?,
        ];
        let mu = SeqWeight::with_witnesses(
            self.matrix.level_weight(1)[..self.matrix.n_max()].to_vec(),
            &self.matrix,
        )?;
        let (lam4, _) = normalize_seq_weight(&mu, &self.matrix)?;
        out.push(SeqWeight::new(lam4.values()[..n].to_vec())?);
        let w1 = make_wk(1, &self.matrix, &self.families, self.config.n_max)?;
        let w2 = make_wk(2, &self.matrix, &self.families, self.config.n_max)?;
        let dom_out = dominating_normalize(&w2, &self.families, &self.matrix, &w1, self.config.n_max)?;
        out.push(SeqWeight::new(dom_out.lam_out.values()[..n].to_vec())?);
        for lam in &out {
            assert!(lam.is_normalized());
        }
        Ok(out)
    }

    /// The span-continuity sample battery: common region, every disc, and
    /// the boundary-hugging disc points where the span actually attains its
    /// size (radii within fractions of `ε_m` of the circle; the f64 floor
    /// keeps the deepest indices partial, which only lowers the measured
    /// sup).
    fn psi_battery(&self) -> Result<Vec<Complex64>, BatteryError> {
        let total = self.config.psi_samples;
        let per_disc = (total * 2 / 5) / self.config.trunc_n;
        let common = total - per_disc * self.config.trunc_n;
        let mut samples = sample_common_region(
            &self.families,
            SamplePlan::new(common, self.config.seed ^ 0xA5A5),
            0.05,
        )?;
        for m in 1..=self.config.trunc_n {
            samples.extend(sample_region(
                &self.families,
                Region::Disc { n: m },
                SamplePlan::new(per_disc, self.config.seed ^ (m as u64)),
            )?);
            samples.extend(deep_disc_points(&self.families, m));
        }
        Ok(samples)
    }
}

/// Deterministic points of `D_m` exponentially close to the unit circle at
/// angles inside `J_m`, where `|e_m|` approaches its boundary value 1.
pub(crate) fn deep_disc_points(families: &AngularFamilies, m: usize) -> Vec<Complex64> {
    let eps = families.eps(m);
    let mut out = Vec::new();
    for theta in [
        families.theta(m),
        families.theta(m) - 0.5 * eps,
        families.theta(m) + 0.5 * eps,
    ] {
        for scale in [0.125, 2.0_f64.powi(-6), 2.0_f64.powi(-10)] {
            let delta = (eps * scale).max(1e-13);
            out.push(Complex64::from_polar(1.0 - delta, theta));
        }
    }
    out
}

/// Runs the full battery in dependency order: geometry, weights, outer
/// bounds, operator certificates, product-weight estimates.
pub fn run_battery(config: &VerifyConfig) -> Result<VerificationReport, BatteryError> {
    let env = Env::new(config.clone())?;
    let mut checks = Vec::new();

    geometry_checks(&env, &mut checks)?;
    weight_checks(&env, &mut checks)?;
    outer_checks(&env, &mut checks)?;
    operator_checks(&env, &mut checks)?;
    product_weight_checks(&env, &mut checks)?;

    let passed = checks.iter().filter(|c| c.pass).count();
    let failed = checks.len() - passed;
    Ok(VerificationReport {
        config_hash: env.config.hash(),
        config: env.config,
        checks,
        passed,
        failed,
    })
}

fn geometry_checks(env: &Env, checks: &mut Vec<CheckRecord>) -> Result<(), BatteryError> {
    let f = &env.families;
    let cfg = &env.config;

    // Interval anchors stay strictly ordered and nested.
    let mut worst: f64 = f64::NEG_INFINITY;
    for n in 1..=cfg.n_max {
        worst = worst.max(f.shoulder(n + 1) - f.i_lo(n));
        worst = worst.max(f.i_lo(n) - f.j_lo(n));
        worst = worst.max(f.j_hi(n) - f.i_hi(n));
        worst = worst.max(f.i_hi(n) - f.shoulder(n));
    }
    worst = worst.max(f.shoulder(1) - PI);
    checks.push(CheckRecord::le(
        "anchor_ordering",
        CheckBasis::Certified,
        worst,
        0.0,
        format!("largest ordering slack over n ≤ {} (negative = strict)", cfg.n_max),
    ));

    // ε_n sits at exactly half the admissibility bound.
    let ratio = (1..=cfg.n_max)
        .map(|n| f.eps(n) / ((-(n as f64) - 16.0).exp2() * (n as f64).powi(-6)))
        .fold(0.0_f64, f64::max);
    checks.push(CheckRecord::le(
        "eps_schedule",
        CheckBasis::Certified,
        ratio,
        0.5,
        "ε_n / (2^{-n-16} n^{-6}), maximal over n".to_string(),
    ));

    // Disc-in-sector inclusion via the asin deviation bound.
    let sector = (1..=cfg.n_max)
        .map(|n| sector_max_deviation(n) / f.i_halfwidth(n))
        .fold(0.0_f64, f64::max);
    checks.push(CheckRecord::le(
        "sector_inclusion",
        CheckBasis::Certified,
        sector,
        1.0,
        "max angular deviation of D_n relative to the plateau half-width".to_string(),
    ));

    // Kernel distance: |e^{iθ} - z| > 1/(2⁶n²) on J_n × C_n.
    let mut kernel_ratio: f64 = 0.0;
    for n in 1..=cfg.trunc_n {
        let est = crate::geometry::min_kernel_distance(
            f,
            n,
            SamplePlan::new(256, cfg.seed ^ 0xBEEF ^ n as u64),
        )?;
        kernel_ratio = kernel_ratio.max(est.bound / est.estimate);
    }
    checks.push(CheckRecord::le(
        "kernel_distance",
        CheckBasis::Sampled,
        kernel_ratio,
        1.0,
        format!("bound/estimate over n ≤ {}", cfg.trunc_n),
    ));

    // Exact boundary distance against a dense boundary scan.
    let mut boundary: Vec<Complex64> = Vec::with_capacity(100_000);
    let m = 25_000;
    for i in 0..m {
        let t = PI * i as f64 / (m - 1) as f64;
        boundary.push(Complex64::from_polar(0.5, t));
        boundary.push(Complex64::from_polar(1.0, t));
        let x = 0.5 + 0.5 * i as f64 / (m - 1) as f64;
        boundary.push(Complex64::new(x, 0.0));
        boundary.push(Complex64::new(-x, 0.0));
    }
    let pts = sample_region(f, Region::All, SamplePlan::new(100, cfg.seed ^ 0xD157))?;
    let mut worst_gap: f64 = 0.0;
    for z in pts {
        let exact = HalfAnnulus::boundary_distance(z)?;
        let brute = boundary.iter().map(|b| (z - b).norm()).fold(f64::INFINITY, f64::min);
        worst_gap = worst_gap.max((exact - brute).abs());
    }
    checks.push(CheckRecord::le(
        "plumbing.boundary_distance_agreement",
        CheckBasis::Sampled,
        worst_gap,
        env.config.tol("boundary_distance_agreement"),
        "max |exact - brute| over 100 interior points, 10⁵ boundary points".to_string(),
    ));
    Ok(())
}

fn weight_checks(env: &Env, checks: &mut Vec<CheckRecord>) -> Result<(), BatteryError> {
    let cfg = &env.config;
    let f = &env.families;
    let mat = &env.matrix;

    let wks: Vec<_> = (1..=cfg.k_max)
        .map(|k| make_wk(k, mat, f, cfg.n_max))
        .collect::<Result<_, _>>()?;

    // Plateau, shoulder and endpoint values are hit exactly.
    let mut exactness: f64 = 0.0;
    for (k, w) in wks.iter().enumerate() {
        for n in 1..=cfg.n_max {
            exactness = exactness.max((w.value_at_angle(f.theta(n)) - mat.entry(n, k + 1)).abs());
            exactness = exactness.max((w.value_at_angle(f.shoulder(n)) - 1.0).abs());
        }
        exactness = exactness.max((w.value_at_angle(0.0) - 1.0).abs());
        exactness = exactness.max((w.value_at_angle(PI) - 1.0).abs());
    }
    checks.push(CheckRecord::le(
        "plateau_shoulder_exactness",
        CheckBasis::Certified,
        exactness,
        0.0,
        "anchor values reproduce matrix entries and unit shoulders exactly".to_string(),
    ));

    // Decreasing weight system, both angular and product factors.
    let mut mono: f64 = f64::NEG_INFINITY;
    for i in 0..2000 {
        let t = PI * (i as f64 + 0.5) / 2000.0;
        for k in 1..cfg.k_max {
            mono = mono.max(wks[k].value_at_angle(t) - wks[k - 1].value_at_angle(t));
        }
    }
    let z_probe = Complex64::from_polar(0.8, 1.3);
    let d_probe = HalfAnnulus::boundary_distance(z_probe)?;
    for k in 1..cfg.k_max {
        for t in [0.0, 0.7, (k + 1) as f64, 20.0] {
            mono = mono.max(
                wks[k].value_at(z_probe) * u_k_from_distance(k + 1, d_probe, t)
                    - wks[k - 1].value_at(z_probe) * u_k_from_distance(k, d_probe, t),
            );
        }
    }
    checks.push(CheckRecord::le(
        "weight_monotonicity",
        CheckBasis::Sampled,
        mono,
        1e-15,
        "max over grid of w_{k+1} - w_k and v_{k+1} - v_k".to_string(),
    ));

    // Dominating-weight certificates on w_2, w_5 and canonical weights.
    let w1 = &wks[0];
    let lam_c = SeqWeight::new((1..=cfg.n_max).map(|i| (i as f64).powf(-1.5)).collect())?;
    let inputs = [
        wks[1].clone(),
        wks[cfg.k_max - 1].clone(),
        make_canonical_wbar(&lam_c, f, cfg.n_max)?,
    ];
    let floor = floor_weight(f, cfg.n_max);
    let mut dom_slack: f64 = f64::NEG_INFINITY;
    let mut floor_slack: f64 = f64::NEG_INFINITY;
    let mut disc_dev: f64 = 0.0;
    let per_input = (cfg.normalizer_samples / inputs.len()).max(100);
    for (idx, wp) in inputs.iter().enumerate() {
        let out = dominating_normalize(wp, f, mat, w1, cfg.n_max)?;
        for i in 0..per_input {
            let t = PI * (i as f64 + 0.5) / per_input as f64;
            let v = out.wbar.value_at_angle(t);
            dom_slack = dom_slack.max(out.c * wp.value_at_angle(t) - v).max(v - 1.0);
            floor_slack = floor_slack.max(floor.value_at_angle(t) - v);
        }
        for n in 1..=cfg.n_max {
            floor_slack = floor_slack.max(1.0 / (n * n) as f64 - out.lam_out.get(n));
            let plan = SamplePlan::new(200, cfg.seed ^ (0x1E00 + 64 * idx as u64 + n as u64));
            for z in sample_region(f, Region::Disc { n }, plan)? {
                disc_dev = disc_dev.max((out.wbar.value_at(z) - out.lam_out.get(n)).abs());
            }
        }
    }
    let normalizer_tol = cfg.tol("dominating_weight_slack");
    checks.push(CheckRecord::le(
        "dominating_weight_domination",
        CheckBasis::Sampled,
        dom_slack,
        normalizer_tol,
        "max of C·w̄' - w̄ and w̄ - 1 over the angle grid, all inputs".to_string(),
    ));
    checks.push(CheckRecord::le(
        "dominating_weight_floor",
        CheckBasis::Sampled,
        floor_slack,
        normalizer_tol,
        "max of w̄'' - w̄ on the grid and 1/n² - λ̄(n) on the discs".to_string(),
    ));
    checks.push(CheckRecord::le(
        "dominating_weight_disc_constancy",
        CheckBasis::Sampled,
        disc_dev,
        0.0,
        "max |w̄(z) - λ̄(n)| over disc samples (exact plateau arithmetic)".to_string(),
    ));
    Ok(())
}

fn outer_checks(env: &Env, checks: &mut Vec<CheckRecord>) -> Result<(), BatteryError> {
    let cfg = &env.config;
    let of = &env.outer;

    // Poisson normalization through the segment antiderivative, exercised
    // as a four-segment split.
    let mut rel: f64 = 0.0;
    let mut seq = crate::geometry::R2::new(cfg.seed ^ 0x9017);
    for _ in 0..1000 {
        let (t1, t2) = seq.next_pair();
        let z = Complex64::from_polar(0.99 * t1.sqrt(), TAU * t2 - PI);
        let mut s = Complex64::new(0.0, 0.0);
        for q in 0..4 {
            s += crate::outer::herglotz_segment(z, TAU * q as f64 / 4.0, TAU * (q + 1) as f64 / 4.0)?;
        }
        rel = rel.max((s.re - TAU).abs() / TAU);
    }
    checks.push(CheckRecord::le(
        "poisson_normalization",
        CheckBasis::Certified,
        rel,
        cfg.tol("poisson_normalization"),
        "max relative deviation of Re ∮ from 2π over 10³ random points".to_string(),
    ));

    // Modulus ceiling |e_n| ≤ 1 in log domain: Re h_n ≤ tail bound.
    let pts = sample_region(&env.families, Region::All, SamplePlan::new(1000, cfg.seed ^ 0xCE17))?;
    let mut ceiling: f64 = f64::NEG_INFINITY;
    for n in 1..=cfg.n_max {
        for &z in &pts {
            let h = of.exponent_adaptive(n, z, 1e-10)?;
            ceiling = ceiling.max(h.value.re - h.tail_bound);
        }
    }
    checks.push(CheckRecord::le(
        "outer_modulus_ceiling",
        CheckBasis::Certified,
        ceiling,
        0.0,
        format!("max (Re h_n - tail) over n ≤ {}, 10³ samples each", cfg.n_max),
    ));

    // Complement bound, numeric and arithmetic.
    let mut cn_gap: f64 = f64::NEG_INFINITY;
    let mut arith_ratio: f64 = 0.0;
    for n in 1..=cfg.trunc_n {
        let mut pts = sample_region(
            &env.families,
            Region::Complement { n },
            SamplePlan::new(cfg.cn_samples, cfg.seed ^ (0xC0 + n as u64)),
        )?;
        pts.extend(sample_near_disc_boundary(
            &env.families,
            n,
            SamplePlan::new(cfg.cn_near_samples, cfg.seed ^ (0xC8 + n as u64)),
            1e-3,
        )?);
        let rep = modulus_bound_check(of, n, &pts, cfg.m_cut)?;
        cn_gap = cn_gap.max(rep.max_log_modulus - rep.log_bound);
        arith_ratio = arith_ratio.max(rep.arithmetic_lhs / rep.arithmetic_bound);
    }
    checks.push(CheckRecord::le(
        "cn_modulus_bound",
        CheckBasis::Sampled,
        cn_gap,
        0.0,
        format!(
            "max log-domain excess of |e_n| over 2^{{-4-n}} on C_n, n ≤ {}, incl. near-boundary shells",
            cfg.trunc_n
        ),
    ));
    for n in (cfg.trunc_n + 1)..=cfg.n_max {
        let eps = default_eps(n);
        let lhs = eps * 4096.0 * (n as f64).powi(4) / PI + eps;
        arith_ratio = arith_ratio.max(lhs / (-(4.0 + n as f64)).exp2());
    }
    checks.push(CheckRecord::le(
        "cn_bound_arithmetic",
        CheckBasis::Certified,
        arith_ratio,
        1.0,
        format!("(π⁻¹ε_n2¹²n⁴ + ε_n) / 2^{{-4-n}}, maximal over n ≤ {}", cfg.n_max),
    ));

    // Boundary modulus by radial extrapolation.
    let tol_bm = cfg.tol("boundary_modulus_limit");
    let mut bm_rel: f64 = 0.0;
    let mut bm_floor: f64 = 0.0;
    for n in 1..=cfg.trunc_n {
        for angle in admissible_angles(of, n, cfg.boundary_angles) {
            let rep = radial_convergence_check(of, n, angle, tol_bm)?;
            bm_rel = bm_rel.max(rep.rel_err);
            if !rep.cauchy {
                bm_rel = f64::INFINITY;
            }
            bm_floor = bm_floor.max(1e-12);
        }
    }
    if tol_bm < bm_floor {
        checks.push(CheckRecord::unreachable(
            "boundary_modulus_limit",
            CheckBasis::Sampled,
            bm_floor,
            tol_bm,
        ));
    } else {
        checks.push(CheckRecord::le(
            "boundary_modulus_limit",
            CheckBasis::Sampled,
            bm_rel,
            tol_bm,
            format!(
                "max relative gap of the extrapolated radial modulus from φ_n, {} angles × n ≤ {}",
                cfg.boundary_angles, cfg.trunc_n
            ),
        ));
    }

    // The two phase routes agree within their combined error bounds.
    let tol_ph = cfg.tol("phase_two_route_agreement");
    let mut ph_gap: f64 = f64::NEG_INFINITY;
    for n in 1..=cfg.trunc_n {
        for angle in admissible_angles(of, n, cfg.boundary_angles) {
            let pv = of.boundary_value(n, angle, PhaseMethod::Pv)?;
            let rad = of.boundary_value(n, angle, PhaseMethod::Radial)?;
            ph_gap = ph_gap.max((pv.phase - rad.phase).abs() - pv.err - rad.err);
        }
    }
    checks.push(CheckRecord::le(
        "phase_two_route_agreement",
        CheckBasis::Sampled,
        ph_gap,
        tol_ph,
        "max phase gap beyond combined error bounds, radial vs principal value".to_string(),
    ));
    Ok(())
}

fn operator_checks(env: &Env, checks: &mut Vec<CheckRecord>) -> Result<(), BatteryError> {
    let cfg = &env.config;
    let of = &env.outer;
    let plan = QuadPlan::new(cfg.quad_levels)?;
    let matrix = OperatorMatrix::assemble(of, cfg.trunc_n, plan, cfg.m_cut)?;
    let lam_battery = env.lam_battery()?;

    // Diagonal identity with the tolerance-reachability gate.
    let tol_diag = cfg.tol("diagonal_identity");
    let err_floor = (1..=cfg.trunc_n)
        .map(|n| matrix.err(n, n))
        .fold(0.0_f64, f64::max);
    if tol_diag < err_floor {
        checks.push(CheckRecord::unreachable(
            "diagonal_identity",
            CheckBasis::Sampled,
            err_floor,
            tol_diag,
        ));
    } else {
        checks.push(CheckRecord::le(
            "diagonal_identity",
            CheckBasis::Sampled,
            matrix.max_diag_residual(),
            tol_diag,
            format!("max |(φψ)_nn - 1| over n ≤ {}", cfg.trunc_n),
        ));
    }

    checks.push(CheckRecord::le(
        "off_diagonal_bound",
        CheckBasis::Sampled,
        matrix.max_offdiag_ratio(of),
        1.0 + cfg.tol("off_diagonal_slack"),
        "max |(φψ)_nj| / (ε_j 2^{-n-4}) over j ≠ n".to_string(),
    ));

    // Contraction and series ingredient across the weight battery.
    let slack = cfg.tol("contraction_slack");
    let mut max_ratio: f64 = 0.0;
    let mut max_ingredient: f64 = 0.0;
    let per = (cfg.trials / lam_battery.len()).max(20);
    for (i, lam) in lam_battery.iter().enumerate() {
        let rep = contraction_check(&matrix, of, lam, per, cfg.seed ^ (0x7A + i as u64), slack)?;
        max_ratio = max_ratio.max(rep.max_ratio);
        max_ingredient = max_ingredient.max(rep.max_ingredient);
    }
    checks.push(CheckRecord::le(
        "series_ingredient_bound",
        CheckBasis::Sampled,
        max_ingredient,
        0.125,
        format!(
            "max Σ|a_j|ε_j / p_λ̄(a) over {} random vectors × {} normalized weights",
            per,
            lam_battery.len()
        ),
    ));
    checks.push(CheckRecord::le(
        "contraction_1_128",
        CheckBasis::Sampled,
        max_ratio,
        (1.0 / 128.0) * (1.0 + slack),
        "max p_λ̄((φψ - id)a) / p_λ̄(a) over the probe battery".to_string(),
    ));

    // ψ continuity on the big sample battery, evaluations shared across
    // probes.
    let lam_psi = &lam_battery[1];
    let wbar = make_canonical_wbar(lam_psi, &env.families, cfg.trunc_n)?;
    let samples = env.psi_battery()?;
    let ns: Vec<usize> = (1..=cfg.trunc_n).collect();
    let mut cached: Vec<(f64, Vec<Complex64>, f64)> = Vec::with_capacity(samples.len());
    for &z in &samples {
        let hs = of.exponents_all(z, cfg.m_cut, &ns)?;
        let evals: Vec<Complex64> = hs.iter().map(|h| h.value.exp()).collect();
        let err: f64 = hs
            .iter()
            .zip(&evals)
            .map(|(h, e)| e.norm() * h.tail_bound.exp_m1())
            .fold(0.0, f64::max);
        cached.push((wbar.value_at(z), evals, err));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9513);
    let mut probes: Vec<FiniteSeq> = (1..=cfg.trunc_n)
        .map(|m| FiniteSeq::unit(m).scale(Complex64::new(1.0 / lam_psi.get(m), 0.0)))
        .collect();
    for _ in 0..5 {
        probes.push(random_unit_seq(&mut rng, lam_psi, cfg.trunc_n));
    }
    let mut psi_worst: f64 = 0.0;
    for a in &probes {
        let p = a.seminorm(lam_psi);
        let mut sup: f64 = 0.0;
        for (w, evals, err) in &cached {
            let mut v = Complex64::new(0.0, 0.0);
            for (j, aj) in a.iter() {
                v += aj * evals[j - 1];
            }
            let bound_err: f64 = a.iter().map(|(_, aj)| aj.norm()).sum::<f64>() * err;
            sup = sup.max(w * (v.norm() - bound_err));
        }
        psi_worst = psi_worst.max(sup / p);
    }
    checks.push(CheckRecord::le(
        "psi_continuity_3",
        CheckBasis::Sampled,
        psi_worst,
        3.0,
        format!(
            "max p_w̄(Σ a_n e_n)/p_λ̄(a) over {} probes on {} samples (discs + common region)",
            probes.len(),
            samples.len()
        ),
    ));

    // φ continuity: p_λ̄(φf) against the boundary-realized sup of w̄|f|.
    let mut phi_ratio: f64 = 0.0;
    let interior: Vec<Complex64> = samples.iter().step_by(50).copied().collect();
    for _ in 0..3 {
        let fef = SpanElement::new(random_unit_seq(&mut rng, lam_psi, cfg.trunc_n));
        let (lhs, rhs) =
            phi_continuity_check(of, &matrix, &fef, lam_psi, &wbar, &interior, plan, cfg.m_cut)?;
        phi_ratio = phi_ratio.max(lhs / rhs);
    }
    checks.push(CheckRecord::le(
        "phi_continuity",
        CheckBasis::Sampled,
        phi_ratio,
        1.0 + 1e-6,
        "max p_λ̄(φf) / sup w̄|f| with the sup realized at boundary nodes".to_string(),
    ));

    // Neumann inversion and the induced projection.
    let tol_neu = cfg.tol("neumann_residual");
    let delta = (1.0 / 128.0) * (1.0 + slack);
    let mut neu_worst: f64 = 0.0;
    let mut terms_worst = 0usize;
    for _ in 0..cfg.trials.min(40) {
        let a = random_unit_seq(&mut rng, lam_psi, cfg.trunc_n);
        let (res, terms) = neumann_residual(&matrix, &a, lam_psi, delta, 1e-12)?;
        neu_worst = neu_worst.max(res);
        terms_worst = terms_worst.max(terms);
    }
    let neu_floor = err_floor * 2.0;
    if tol_neu < neu_floor {
        checks.push(CheckRecord::unreachable(
            "neumann_residual",
            CheckBasis::Sampled,
            neu_floor,
            tol_neu,
        ));
    } else {
        checks.push(CheckRecord::le(
            "neumann_residual",
            CheckBasis::Sampled,
            neu_worst,
            tol_neu,
            format!("max p_λ̄(φψ(Aa) - a); series length ≤ {terms_worst} (≤ 6 required)"),
        ));
        if terms_worst > 6 {
            checks.last_mut().unwrap().pass = false;
        }
    }

    let tol_proj = cfg.tol("projection_residual");
    let proj = projection_check(
        &matrix,
        lam_psi,
        cfg.trials.min(40),
        cfg.seed ^ 0x9F0,
        delta,
        tol_proj,
    )?;
    checks.push(CheckRecord::le(
        "projection_idempotence",
        CheckBasis::Sampled,
        proj.max_image_residual.max(proj.max_idem_residual),
        tol_proj,
        "max of image and idempotence residuals of (ψA)φ at coefficient level".to_string(),
    ));
    Ok(())
}

fn product_weight_checks(env: &Env, checks: &mut Vec<CheckRecord>) -> Result<(), BatteryError> {
    let cfg = &env.config;
    let of = &env.outer;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x3A11);
    let lam = SeqWeight::new((1..=cfg.trunc_n).map(|i| 1.0 / i as f64).collect())?;
    let z1 = sample_region(&env.families, Region::All, SamplePlan::new(400, cfg.seed ^ 0x51))?;

    let mut restr: f64 = 0.0;
    let mut dom: f64 = 0.0;
    for k in 1..=cfg.k_max {
        let wk = make_wk(k, &env.matrix, &env.families, cfg.n_max)?;
        let radii = [0.0, 0.5, 1.0, (k + 1) as f64, (k + 2) as f64, 50.0];
        let g = SpanElement::new(random_unit_seq(&mut rng, &lam, cfg.trunc_n));
        let rep = crate::operators::restriction_check(of, k, &g, &wk, &z1, &radii, cfg.m_cut)?;
        restr = restr.max(rep.p_wk / (rep.c_k * rep.p_vk));
        dom = dom.max(rep.p_vk / rep.p_wk);
    }
    checks.push(CheckRecord::le(
        "restriction_operator_norm",
        CheckBasis::Sampled,
        restr,
        1.0 + 1e-12,
        format!("max p_w_k(Af) / (C_k p_v_k(f)) with C_k = (k+2)^((k-1)/(2k)), k ≤ {}", cfg.k_max),
    ));
    checks.push(CheckRecord::le(
        "product_weight_domination",
        CheckBasis::Sampled,
        dom,
        1.0 + 1e-12,
        "max p_v_k(ḡ) / p_w_k(g) (u_k ≤ 1 pointwise)".to_string(),
    ));

    // Degeneration witnesses: unbounded second coordinate...
    let z_fix = Complex64::new(0.0, 0.75);
    let d_fix = HalfAnnulus::boundary_distance(z_fix)?;
    let ratio_at = |t: f64| -> f64 {
        u_k_from_distance(1, d_fix, t) / u_k_from_distance(2, d_fix, t)
    };
    let (r2, r4, r6) = (ratio_at(1e2), ratio_at(1e4), ratio_at(1e6));
    let measured_i = (10.0 / r6).max(r2 / r4).max(r4 / r6);
    checks.push(CheckRecord::le(
        "condition_m_unbounded",
        CheckBasis::Certified,
        measured_i,
        1.0,
        format!("v_1/v_2 at |z₂| = 10², 10⁴, 10⁶: {r2:.3}, {r4:.3}, {r6:.3} (monotone, final > 10)"),
    ));

    // ...and boundary degeneration of the first coordinate.
    let mut rs = Vec::new();
    for j in 1..=6 {
        let d = 10f64.powi(-j);
        let r = u_k_from_distance(1, d, 0.0) / u_k_from_distance(3, d, 0.0);
        rs.push(r);
    }
    let mut measured_ii: f64 = 10.0 * rs[0] / rs[5];
    for w in rs.windows(2) {
        measured_ii = measured_ii.max(w[0] / w[1]);
    }
    checks.push(CheckRecord::le(
        "condition_m_boundary",
        CheckBasis::Certified,
        measured_ii,
        1.0,
        format!(
            "v_1/v_3 at |z₂| = 0 along d(z₁) = 10^-j, j ≤ 6: first {:.3}, last {:.3}",
            rs[0], rs[5]
        ),
    ));
    Ok(())
}

// ---------------------------------------------------------------------------
// CSV dumps
// ---------------------------------------------------------------------------

/// `ŵ_k` on a uniform angle grid: columns `theta_rad,value`.
pub fn dump_weight_csv(config: &VerifyConfig, k: usize, points: usize) -> Result<String, BatteryError> {
    config.validate()?;
    let families = AngularFamilies::new(config.m_cut)?;
    let matrix = KoetheMatrix::default_matrix(config.n_max.max(50), config.k_max)?;
    let w = make_wk(k, &matrix, &families, config.n_max)?;
    let mut out = String::from("theta_rad,value\n");
    for i in 0..points {
        let t = (PI * i as f64 / (points.max(2) - 1) as f64).min(PI);
        out.push_str(&format!("{},{}\n", t, w.value_at_angle(t)));
    }
    Ok(out)
}

/// `h_n` on a polar grid of the half-annulus: columns
/// `r,theta_rad,re_h,im_h,tail_bound`.
pub fn dump_exponent_csv(config: &VerifyConfig, n: usize, grid: usize) -> Result<String, BatteryError> {
    config.validate()?;
    let families = AngularFamilies::new(config.m_cut)?;
    let outer = OuterFamily::new(families, config.m_cut)?;
    let mut out = String::from("r,theta_rad,re_h,im_h,tail_bound\n");
    for i in 0..grid {
        let r = 0.5 + 0.5 * (i as f64 + 0.5) / grid as f64;
        for j in 0..grid {
            let t = PI * (j as f64 + 0.5) / grid as f64;
            let h = outer.exponent(n, Complex64::from_polar(r, t), config.m_cut)?;
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r, t, h.value.re, h.value.im, h.tail_bound
            ));
        }
    }
    Ok(out)
}

/// The φψ matrix entries: columns `n,j,re,im,err`.
pub fn dump_matrix_csv(config: &VerifyConfig, n_top: usize) -> Result<String, BatteryError> {
    config.validate()?;
    let families = AngularFamilies::new(config.m_cut)?;
    let outer = OuterFamily::new(families, config.m_cut)?;
    let matrix = OperatorMatrix::assemble(
        &outer,
        n_top,
        QuadPlan::new(config.quad_levels)?,
        config.m_cut,
    )?;
    let mut out = String::from("n,j,re,im,err\n");
    for (n, j, re, im, err) in matrix.dump_rows() {
        out.push_str(&format!("{n},{j},{re},{im},{err}\n"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> VerifyConfig {
        VerifyConfig {
            n_max: 8,
            trunc_n: 4,
            k_max: 3,
            m_cut: 40,
            quad_levels: 4,
            cn_samples: 120,
            cn_near_samples: 30,
            boundary_angles: 8,
            psi_samples: 3000,
            normalizer_samples: 900,
            trials: 15,
            seed: 7,
            tolerances: BTreeMap::new(),
            out_dir: "wlim-out".into(),
        }
    }

    #[test]
    fn battery_passes_on_small_config() {
        let rep = run_battery(&small_config()).unwrap();
        for c in &rep.checks {
            assert!(c.pass, "check failed: {} ({})", c.anchor, c.detail);
        }
        assert!(rep.checks.len() >= 20, "only {} records", rep.checks.len());
        assert!(rep.all_pass());
    }

    #[test]
    fn battery_is_deterministic() {
        let a = run_battery(&small_config()).unwrap().to_json_string();
        let b = run_battery(&small_config()).unwrap().to_json_string();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_tolerance_reports_unreachable() {
        let mut cfg = small_config();
        cfg.tolerances.insert("diagonal_identity".into(), 0.0);
        let rep = run_battery(&cfg).unwrap();
        let diag = rep.checks.iter().find(|c| c.anchor == "diagonal_identity").unwrap();
        assert!(!diag.pass);
        assert!(diag.detail.contains("tolerance unreachable"), "{}", diag.detail);
        assert!(!rep.all_pass());
    }

    #[test]
    fn config_validation_rejects_bad_values() {
        let mut cfg = small_config();
        cfg.trunc_n = 20;
        assert!(cfg.validate().is_err());
        let mut cfg = small_config();
        cfg.cn_samples = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = small_config();
        cfg.tolerances.insert("diagonal_identity".into(), 1.5);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn dumps_have_expected_shape() {
        let cfg = small_config();
        let w = dump_weight_csv(&cfg, 1, 64).unwrap();
        assert_eq!(w.lines().count(), 65);
        assert!(w.starts_with("theta_rad,value"));

        let e = dump_exponent_csv(&cfg, 1, 10).unwrap();
        assert_eq!(e.lines().count(), 101);

        let m = dump_matrix_csv(&cfg, 3).unwrap();
        assert_eq!(m.lines().count(), 10);
        assert!(m.starts_with("n,j,re,im,err"));
    }

    #[test]
    fn config_hash_tracks_content() {
        let a = small_config();
        let mut b = small_config();
        assert_eq!(a.hash(), b.hash());
        b.seed = 8;
        assert_ne!(a.hash(), b.hash());
    }
}
