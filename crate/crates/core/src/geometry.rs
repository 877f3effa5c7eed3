//! The half-annulus `G₁ = {1/2 < |z| < 1, 0 < arg z < π}` and its angular
//! decorations: plateau intervals `I_n` around `θ_n = 1/(2n)`, shoulder
//! points `s_n`, the tiny boundary-data intervals `J_n`, the discs `D_n`
//! around `e^{iθ_n}` with complements `C_n`, and deterministic samplers for
//! all of them.
//!
//! Everything is formula-backed, so indices beyond the validated range are
//! still evaluable; construction checks the interval orderings up to `n_max`.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("point {0} lies outside the open half-annulus")]
    OutsideDomain(Complex64),
    #[error("sampling plan must request at least one point")]
    EmptySamplePlan,
    #[error("interval families violate the anchor ordering at n = {0}")]
    AnchorOrdering(usize),
    #[error("epsilon schedule violates the strict bound at n = {0}")]
    EpsSchedule(usize),
}

/// The fixed domain: open half-annulus with radii 1/2 and 1 in the upper
/// half-plane.
#[derive(Debug, Clone, Copy, Default)]
pub struct HalfAnnulus;

impl HalfAnnulus {
    pub const R_IN: f64 = 0.5;
    pub const R_OUT: f64 = 1.0;

    pub fn contains(z: Complex64) -> bool {
        let r = z.norm();
        let t = z.arg();
        r > Self::R_IN && r < Self::R_OUT && t > 0.0 && t < std::f64::consts::PI
    }

    /// Exact distance from an interior point to the complement: the minimum
    /// of the distances to the two bounding arcs and the two real segments
    /// `[1/2, 1]` and `[-1, -1/2]`.
    pub fn boundary_distance(z: Complex64) -> Result<f64, GeometryError> {
        if !Self::contains(z) {
            return Err(GeometryError::OutsideDomain(z));
        }
        let r = z.norm();
        let d_in = r - Self::R_IN;
        let d_out = Self::R_OUT - r;
        let d_pos = dist_to_segment(z, Self::R_IN, Self::R_OUT);
        let d_neg = dist_to_segment(z, -Self::R_OUT, -Self::R_IN);
        Ok(d_in.min(d_out).min(d_pos).min(d_neg))
    }
}

fn dist_to_segment(z: Complex64, x_lo: f64, x_hi: f64) -> f64 {
    let x = z.re.clamp(x_lo, x_hi);
    ((z.re - x) * (z.re - x) + z.im * z.im).sqrt()
}

/// The schedule `ε_n = 2^{-n-17} n^{-6}`: half of the strict admissibility
/// bound, leaving factor-2 slack for floating point.
pub fn default_eps(n: usize) -> f64 {
    assert!(n >= 1);
    (-(n as f64) - 17.0).exp2() * (n as f64).powi(-6)
}

/// The angular interval families around `θ_n = 1/(2n)`:
/// `I_n = [θ_n - 2⁻⁵n⁻², θ_n + 2⁻⁵n⁻²]`, shoulder `s_n = θ_n + 2⁻⁴n⁻²`,
/// `J_n = [θ_n - ε_n, θ_n + ε_n]`, disc radius `1/(50n²)`.
#[derive(Debug, Clone)]
pub struct AngularFamilies {
    n_max: usize,
}

impl AngularFamilies {
    /// Validates the strict anchor ordering
    /// `… < left(I_{n+1}) < s_{n+1} < left(I_n) < right(I_n) < s_n < … < π`
    /// and the epsilon bound `ε_n < 2^{-n-16} n^{-6}` for `n ≤ n_max`.
    pub fn new(n_max: usize) -> Result<Self, GeometryError> {
        if n_max < 1 {
            return Err(GeometryError::AnchorOrdering(0));
        }
        let f = Self { n_max };
        for n in 1..=n_max {
            let bound = (-(n as f64) - 16.0).exp2() * (n as f64).powi(-6);
            if !(f.eps(n) < bound) {
                return Err(GeometryError::EpsSchedule(n));
            }
            // J_n strictly inside I_n.
            if !(f.i_lo(n) < f.j_lo(n) && f.j_hi(n) < f.i_hi(n)) {
                return Err(GeometryError::AnchorOrdering(n));
            }
            if !(f.i_lo(n) < f.theta(n) && f.theta(n) < f.i_hi(n) && f.i_hi(n) < f.shoulder(n)) {
                return Err(GeometryError::AnchorOrdering(n));
            }
            // The next family, shoulder included, sits strictly below.
            if !(f.shoulder(n + 1) < f.i_lo(n)) {
                return Err(GeometryError::AnchorOrdering(n));
            }
        }
        if !(f.shoulder(1) < std::f64::consts::PI) {
            return Err(GeometryError::AnchorOrdering(1));
        }
        Ok(f)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn theta(&self, n: usize) -> f64 {
        0.5 / n as f64
    }

    pub fn eps(&self, n: usize) -> f64 {
        default_eps(n)
    }

    /// Half-width of the plateau interval `I_n`.
    pub fn i_halfwidth(&self, n: usize) -> f64 {
        let nf = n as f64;
        1.0 / (32.0 * nf * nf)
    }

    pub fn i_lo(&self, n: usize) -> f64 {
        self.theta(n) - self.i_halfwidth(n)
    }

    pub fn i_hi(&self, n: usize) -> f64 {
        self.theta(n) + self.i_halfwidth(n)
    }

    /// The right shoulder `s_n = θ_n + 2⁻⁴ n⁻²`, where the weights return
    /// to 1.
    pub fn shoulder(&self, n: usize) -> f64 {
        let nf = n as f64;
        self.theta(n) + 1.0 / (16.0 * nf * nf)
    }

    pub fn j_lo(&self, n: usize) -> f64 {
        self.theta(n) - self.eps(n)
    }

    pub fn j_hi(&self, n: usize) -> f64 {
        self.theta(n) + self.eps(n)
    }

    /// Exact width of `J_n` as used by the quadrature normalization.
    pub fn j_width(&self, n: usize) -> f64 {
        2.0 * self.eps(n)
    }

    pub fn disc_center(&self, n: usize) -> Complex64 {
        Complex64::from_polar(1.0, self.theta(n))
    }

    pub fn disc_radius(&self, n: usize) -> f64 {
        let nf = n as f64;
        1.0 / (50.0 * nf * nf)
    }

    /// Whether the angle lies in the closed plateau interval `I_n`.
    pub fn in_plateau(&self, n: usize, theta: f64) -> bool {
        theta >= self.i_lo(n) && theta <= self.i_hi(n)
    }

    /// Whether the angle lies in the closed interval `J_n`.
    pub fn in_j(&self, n: usize, theta: f64) -> bool {
        theta >= self.j_lo(n) && theta <= self.j_hi(n)
    }
}

/// Maximal angular deviation of the disc `D_n` from `θ_n`, as seen from the
/// origin: every `z ∈ D_n` has `|z| > 1 - ρ_n`, so
/// `|sin(arg z - θ_n)| < ρ_n / (1 - ρ_n)`. Formula-only; valid for any `n`.
pub fn sector_max_deviation(n: usize) -> f64 {
    let rho = 1.0 / (50.0 * (n * n) as f64);
    (rho / (1.0 - rho)).asin()
}

/// True iff the deviation bound keeps `D_n` inside the sector over `I_n`.
pub fn sector_inclusion_check(n: usize) -> bool {
    let halfwidth = 1.0 / (32.0 * (n * n) as f64);
    sector_max_deviation(n) <= halfwidth
}

/// Regions of the half-annulus addressed by the construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Region {
    /// The open disc `D_n` intersected with `G₁`.
    Disc { n: usize },
    /// `C_n = G₁ \ D_n`.
    Complement { n: usize },
    /// The sector `{re^{iθ} ∈ G₁ : θ ∈ I_n}`.
    Sector { n: usize },
    /// All of `G₁`.
    All,
}

impl Region {
    pub fn contains(self, families: &AngularFamilies, z: Complex64) -> bool {
        if !HalfAnnulus::contains(z) {
            return false;
        }
        match self {
            Region::All => true,
            Region::Disc { n } => {
                (z - families.disc_center(n)).norm() < families.disc_radius(n)
            }
            Region::Complement { n } => {
                (z - families.disc_center(n)).norm() >= families.disc_radius(n)
            }
            Region::Sector { n } => families.in_plateau(n, z.arg()),
        }
    }
}

/// Deterministic low-discrepancy sampling plan: `count` points, phase
/// offsets derived from `seed`.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct SamplePlan {
    pub count: usize,
    pub seed: u64,
}

impl SamplePlan {
    pub fn new(count: usize, seed: u64) -> Self {
        Self { count, seed }
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Two-dimensional R2 (plastic-constant) sequence with seeded phases.
pub(crate) struct R2 {
    s1: f64,
    s2: f64,
    i: u64,
}

impl R2 {
    const A1: f64 = 0.754_877_666_246_692_8;
    const A2: f64 = 0.569_840_290_998_053_2;

    pub fn new(seed: u64) -> Self {
        let mut st = seed;
        let s1 = (splitmix64(&mut st) >> 11) as f64 / (1u64 << 53) as f64;
        let s2 = (splitmix64(&mut st) >> 11) as f64 / (1u64 << 53) as f64;
        Self { s1, s2, i: 0 }
    }

    /// Next pair in the open square (0, 1)².
    pub fn next_pair(&mut self) -> (f64, f64) {
        self.i += 1;
        let x = (self.s1 + self.i as f64 * Self::A1).fract();
        let y = (self.s2 + self.i as f64 * Self::A2).fract();
        // Keep strictly away from the closed edges.
        (x.clamp(1e-9, 1.0 - 1e-9), y.clamp(1e-9, 1.0 - 1e-9))
    }
}

/// Area-uniform samples of a region. Complement samples mix bulk points of
/// `G₁` with a densified shell just outside `∂D_n`; disc samples are
/// rejection-sampled against `G₁`.
pub fn sample_region(
    families: &AngularFamilies,
    region: Region,
    plan: SamplePlan,
) -> Result<Vec<Complex64>, GeometryError> {
    if plan.count == 0 {
        return Err(GeometryError::EmptySamplePlan);
    }
    let mut out = Vec::with_capacity(plan.count);
    let mut r2 = R2::new(plan.seed);
    let budget = 10_000 * plan.count as u64 + 10_000;
    let mut tries = 0u64;
    match region {
        Region::All => {
            while out.len() < plan.count {
                out.push(annulus_point(r2.next_pair()));
            }
        }
        Region::Sector { n } => {
            let (lo, hi) = (families.i_lo(n), families.i_hi(n));
            while out.len() < plan.count {
                let (t_r, t_a) = r2.next_pair();
                let r = (0.25 + 0.75 * t_r).sqrt();
                let theta = lo + (hi - lo) * t_a;
                out.push(Complex64::from_polar(r, theta));
            }
        }
        Region::Disc { n } => {
            let c = families.disc_center(n);
            let rho = families.disc_radius(n);
            while out.len() < plan.count && tries < budget {
                tries += 1;
                let (t1, t2) = r2.next_pair();
                let z = c + Complex64::from_polar(
                    rho * t1.sqrt() * (1.0 - 1e-9),
                    std::f64::consts::TAU * t2,
                );
                if HalfAnnulus::contains(z) {
                    out.push(z);
                }
            }
        }
        Region::Complement { n } => {
            // Half the points near the disc boundary, half in the bulk.
            let near = plan.count / 2;
            out.extend(sample_near_disc_boundary(
                families,
                n,
                SamplePlan::new(near.max(1), plan.seed ^ 0xD15C),
                families.disc_radius(n) * 0.5,
            )?);
            out.truncate(near);
            while out.len() < plan.count && tries < budget {
                tries += 1;
                let z = annulus_point(r2.next_pair());
                if (z - families.disc_center(n)).norm() >= families.disc_radius(n) {
                    out.push(z);
                }
            }
        }
    }
    if out.len() < plan.count {
        return Err(GeometryError::EmptySamplePlan);
    }
    Ok(out)
}

/// Points of `C_n ∩ G₁` within `max_dist` of the circle `∂D_n` (distances
/// log-spaced down to `max_dist · 2⁻²⁰`).
pub fn sample_near_disc_boundary(
    families: &AngularFamilies,
    n: usize,
    plan: SamplePlan,
    max_dist: f64,
) -> Result<Vec<Complex64>, GeometryError> {
    if plan.count == 0 {
        return Err(GeometryError::EmptySamplePlan);
    }
    let c = families.disc_center(n);
    let rho = families.disc_radius(n);
    let mut out = Vec::with_capacity(plan.count);
    let mut r2 = R2::new(plan.seed);
    let budget = 10_000 * plan.count as u64 + 10_000;
    let mut tries = 0u64;
    while out.len() < plan.count && tries < budget {
        tries += 1;
        let (t1, t2) = r2.next_pair();
        let dist = max_dist * (-20.0 * t1).exp2();
        let z = c + Complex64::from_polar(rho + dist, std::f64::consts::TAU * t2);
        if HalfAnnulus::contains(z) {
            out.push(z);
        }
    }
    if out.len() < plan.count {
        return Err(GeometryError::EmptySamplePlan);
    }
    Ok(out)
}

/// Samples of the common region `D = ∩_n C_n`: bulk points of `G₁` with
/// `arg z ≥ arg_floor` avoiding every materialized disc. For
/// `arg_floor > s_{n_max+1}` this is exact, since deeper discs live in
/// sectors below the floor.
pub fn sample_common_region(
    families: &AngularFamilies,
    plan: SamplePlan,
    arg_floor: f64,
) -> Result<Vec<Complex64>, GeometryError> {
    if plan.count == 0 {
        return Err(GeometryError::EmptySamplePlan);
    }
    let mut out = Vec::with_capacity(plan.count);
    let mut r2 = R2::new(plan.seed);
    let budget = 10_000 * plan.count as u64 + 10_000;
    let mut tries = 0u64;
    while out.len() < plan.count && tries < budget {
        tries += 1;
        let z = annulus_point(r2.next_pair());
        if z.arg() < arg_floor {
            continue;
        }
        let in_disc = (1..=families.n_max())
            .any(|m| (z - families.disc_center(m)).norm() < families.disc_radius(m));
        if !in_disc {
            out.push(z);
        }
    }
    if out.len() < plan.count {
        return Err(GeometryError::EmptySamplePlan);
    }
    Ok(out)
}

fn annulus_point((t_r, t_a): (f64, f64)) -> Complex64 {
    let r = (0.25 + 0.75 * t_r).sqrt();
    Complex64::from_polar(r, std::f64::consts::PI * t_a)
}

/// Result of the sampled kernel-distance minimization for level `n`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct KernelDistanceEstimate {
    pub n: usize,
    /// Estimated infimum of `|e^{iθ} - z|` over `θ ∈ J_n`, `z` on `∂D_n`
    /// and far samples of `C_n`.
    pub estimate: f64,
    /// The required lower bound `1/(2⁶ n²)`.
    pub bound: f64,
    pub exceeds: bool,
}

/// Estimates `inf |e^{iθ} - z|` over `θ ∈ J_n` and `z ∈ C_n`, scanning the
/// disc boundary (where the infimum is attained) plus far complement
/// samples.
pub fn min_kernel_distance(
    families: &AngularFamilies,
    n: usize,
    plan: SamplePlan,
) -> Result<KernelDistanceEstimate, GeometryError> {
    if plan.count == 0 {
        return Err(GeometryError::EmptySamplePlan);
    }
    let c = families.disc_center(n);
    let rho = families.disc_radius(n);
    let theta_count = plan.count.max(8);
    let mut z_set = Vec::new();
    // ∂D_n within the closed half-annulus.
    for i in 0..(4 * theta_count) {
        let phi = std::f64::consts::TAU * (i as f64 + 0.5) / (4 * theta_count) as f64;
        let z = c + Complex64::from_polar(rho, phi);
        let (r, t) = (z.norm(), z.arg());
        if (HalfAnnulus::R_IN..=HalfAnnulus::R_OUT).contains(&r)
            && (0.0..=std::f64::consts::PI).contains(&t)
        {
            z_set.push(z);
        }
    }
    z_set.extend(sample_region(
        families,
        Region::Complement { n },
        SamplePlan::new(theta_count, plan.seed ^ 0xFA12),
    )?);
    let mut best = f64::INFINITY;
    for i in 0..theta_count {
        let theta = families.j_lo(n)
            + families.j_width(n) * (i as f64 + 0.5) / theta_count as f64;
        let w = Complex64::from_polar(1.0, theta);
        for &z in &z_set {
            best = best.min((w - z).norm());
        }
    }
    let bound = 1.0 / (64.0 * (n * n) as f64);
    Ok(KernelDistanceEstimate { n, estimate: best, bound, exceeds: best > bound })
}
