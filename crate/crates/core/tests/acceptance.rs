//! Acceptance suite: the quantitative skeleton of the construction at
//! default scale. One test per criterion; each prints a PASS/FAIL line
//! (visible with `--nocapture`) and asserts its pinned tolerance.
//!
//! Run with:
//!
//! ```text
//! cargo test -p wlim-core --test acceptance -- --nocapture
//! ```

use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::{LN_2, PI, TAU};
use std::sync::OnceLock;
use std::time::Instant;
use wlim_core::battery::{run_battery, VerifyConfig};
use wlim_core::geometry::{
    sample_common_region, sample_near_disc_boundary, sample_region, AngularFamilies,
    HalfAnnulus, Region, SamplePlan,
};
use wlim_core::operators::{
    contraction_check, neumann_residual, projection_check, random_unit_seq, OperatorMatrix,
    QuadPlan, SpanElement,
};
use wlim_core::outer::{
    admissible_angles, herglotz_segment, modulus_bound_check, radial_convergence_check,
    OuterFamily,
};
use wlim_core::seq_space::{normalize_seq_weight, FiniteSeq, KoetheMatrix, SeqWeight};
use wlim_core::weights::{
    floor_weight, dominating_normalize, make_canonical_wbar, make_wk, restriction_constant,
    u_k_from_distance, ProductWeight,
};

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 17;
const N_MAX: usize = 12;
const TRUNC_N: usize = 8;
const M_CUT: usize = 40;

struct Setup {
    families: AngularFamilies,
    outer: OuterFamily,
    koethe: KoetheMatrix,
    matrix: OperatorMatrix,
    lam_battery: Vec<SeqWeight>,
}

static SETUP: OnceLock<Setup> = OnceLock::new();

fn setup() -> &'static Setup {
    SETUP.get_or_init(|| {
        let families = AngularFamilies::new(M_CUT).unwrap();
        let outer = OuterFamily::new(families.clone(), M_CUT).unwrap();
        let koethe = KoetheMatrix::default_matrix(50, 5).unwrap();
        let matrix =
            OperatorMatrix::assemble(&outer, TRUNC_N, QuadPlan::new(6).unwrap(), M_CUT).unwrap();

        let mut lam_battery = vec![
            SeqWeight::new(vec![1.0; TRUNC_N]).unwrap(),
            SeqWeight::new((1..=TRUNC_N).map(|n| 1.0 / n as f64).collect()).unwrap(),
            SeqWeight::new((1..=TRUNC_N).map(|n| (n as f64).powf(-1.5)).collect()).unwrap(),
        ];
        let mu = SeqWeight::with_witnesses(koethe.level_weight(1), &koethe).unwrap();
        let (lam4, _) = normalize_seq_weight(&mu, &koethe).unwrap();
        lam_battery.push(SeqWeight::new(lam4.values()[..TRUNC_N].to_vec()).unwrap());
        let w1 = make_wk(1, &koethe, &families, N_MAX).unwrap();
        let w2 = make_wk(2, &koethe, &families, N_MAX).unwrap();
        let dom_out = dominating_normalize(&w2, &families, &koethe, &w1, N_MAX).unwrap();
        lam_battery.push(SeqWeight::new(dom_out.lam_out.values()[..TRUNC_N].to_vec()).unwrap());
        for lam in &lam_battery {
            assert!(lam.is_normalized());
        }
        Setup { families, outer, koethe, matrix, lam_battery }
    })
}

fn verdict(criterion: usize, name: &str, pass: bool, detail: String) {
    println!(
        "criterion {criterion:>2} ({name}): {} :: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} ({name}) failed: {detail}");
}

#[test]
fn criterion_01_poisson_normalization() {
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    use rand::Rng;
    for _ in 0..1000 {
        let r = 0.99 * rng.random::<f64>().sqrt();
        let z = Complex64::from_polar(r, TAU * rng.random::<f64>() - PI);
        let mut s = Complex64::new(0.0, 0.0);
        for q in 0..4 {
            s += herglotz_segment(z, TAU * q as f64 / 4.0, TAU * (q + 1) as f64 / 4.0).unwrap();
        }
        worst = worst.max((s.re - TAU).abs() / TAU);
    }
    let elapsed = t0.elapsed().as_secs_f64();
    verdict(
        1,
        "poisson_normalization",
        worst <= 1e-10 && elapsed < 1.0,
        format!("max rel deviation of Re ∮ from 2π = {worst:.3e} (tol 1e-10), {elapsed:.2}s"),
    );
}

#[test]
fn criterion_02_outer_modulus_ceiling() {
    let s = setup();
    let t0 = Instant::now();
    let pts = sample_region(&s.families, Region::All, SamplePlan::new(1000, SEED ^ 2)).unwrap();
    let ns: Vec<usize> = (1..=N_MAX).collect();
    let mut worst = f64::NEG_INFINITY;
    for &z in &pts {
        for h in s.outer.exponents_all(z, M_CUT, &ns).unwrap() {
            worst = worst.max(h.value.re - h.tail_bound);
        }
    }
    let elapsed = t0.elapsed().as_secs_f64();
    verdict(
        2,
        "outer_modulus_ceiling",
        worst <= 0.0 && elapsed < 10.0,
        format!("max (Re h_n - tail) over n ≤ {N_MAX} × 10³ samples = {worst:.3e} (≤ 0), {elapsed:.2}s"),
    );
}

#[test]
fn criterion_03_complement_bound() {
    let s = setup();
    let t0 = Instant::now();
    let mut worst_gap = f64::NEG_INFINITY;
    for n in 1..=TRUNC_N {
        let mut pts = sample_region(
            &s.families,
            Region::Complement { n },
            SamplePlan::new(1000, SEED ^ (0x30 + n as u64)),
        )
        .unwrap();
        pts.extend(
            sample_near_disc_boundary(
                &s.families,
                n,
                SamplePlan::new(200, SEED ^ (0x38 + n as u64)),
                1e-3,
            )
            .unwrap(),
        );
        let rep = modulus_bound_check(&s.outer, n, &pts, M_CUT).unwrap();
        worst_gap = worst_gap.max(rep.max_log_modulus - rep.log_bound);
        assert!(rep.numeric_pass, "numeric bound failed for n = {n}: {rep:?}");
    }
    let mut arith = 0.0_f64;
    for n in 1..=N_MAX {
        let eps = wlim_core::geometry::default_eps(n);
        let lhs = eps * 4096.0 * (n as f64).powi(4) / PI + eps;
        arith = arith.max(lhs / (-(4.0 + n as f64)).exp2());
    }
    let elapsed = t0.elapsed().as_secs_f64();
    verdict(
        3,
        "complement_bound",
        worst_gap <= 0.0 && arith <= 1.0 && elapsed < 60.0,
        format!(
            "max log-excess over 2^(-4-n) = {worst_gap:.3e} on 1200 samples/n (≤ 0); \
             arithmetic ratio = {arith:.3e} (≤ 1) for n ≤ {N_MAX}, {elapsed:.2}s"
        ),
    );
}

#[test]
fn criterion_04_boundary_modulus() {
    let s = setup();
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    for n in 1..=TRUNC_N {
        for angle in admissible_angles(&s.outer, n, 20) {
            let rep = radial_convergence_check(&s.outer, n, angle, 1e-6).unwrap();
            assert!(rep.cauchy, "radial sequence not Cauchy at θ = {}", rep.theta);
            worst = worst.max(rep.rel_err);
        }
    }
    let elapsed = t0.elapsed().as_secs_f64();
    verdict(
        4,
        "boundary_modulus",
        worst <= 1e-6 && elapsed < 30.0,
        format!("max rel gap |e_n((1-δ)e^iθ)| → φ_n over 20 angles × n ≤ {TRUNC_N} = {worst:.3e} (tol 1e-6), {elapsed:.2}s"),
    );
}

#[test]
fn criterion_05_diagonal_identity() {
    let s = setup();
    let t0 = Instant::now();
    let worst = s.matrix.max_diag_residual();
    let elapsed = t0.elapsed().as_secs_f64();
    verdict(
        5,
        "diagonal_identity",
        worst <= 1e-6 && elapsed < 60.0,
        format!("max |(φψ)_nn - 1| over n ≤ {TRUNC_N} = {worst:.3e} (tol 1e-6), {elapsed:.2}s"),
    );
}

#[test]
fn criterion_06_off_diagonal_moduli() {
    let s = setup();
    let worst = s.matrix.max_offdiag_ratio(&s.outer);
    verdict(
        6,
        "off_diagonal_moduli",
        worst <= 1.0 + 1e-6,
        format!("max |(φψ)_nj| / (ε_j 2^(-n-4)) = {worst:.9} (bound 1 + 1e-6)"),
    );
}

#[test]
fn criterion_07_series_ingredient() {
    let s = setup();
    let mut worst: f64 = 0.0;
    for (i, lam) in s.lam_battery.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ (0x70 + i as u64));
        for _ in 0..20 {
            let a = random_unit_seq(&mut rng, lam, TRUNC_N);
            let p = a.seminorm(lam);
            let ingredient: f64 = a.iter().map(|(j, v)| v.norm() * s.outer.eps(j)).sum();
            worst = worst.max(ingredient / p);
        }
    }
    verdict(
        7,
        "series_ingredient",
        worst <= 0.125,
        format!("max Σ|a_j|ε_j / p_λ̄(a) over 100 vectors × 5 weights = {worst:.3e} (≤ 1/8)"),
    );
}

#[test]
fn criterion_08_contraction() {
    let s = setup();
    let bound = (1.0 / 128.0) * (1.0 + 1e-3);
    let mut worst: f64 = 0.0;
    for (i, lam) in s.lam_battery.iter().enumerate() {
        let rep =
            contraction_check(&s.matrix, &s.outer, lam, 20, SEED ^ (0x80 + i as u64), 1e-3)
                .unwrap();
        worst = worst.max(rep.max_ratio);
        assert!(rep.pass, "contraction sub-report failed: {rep:?}");
    }
    verdict(
        8,
        "contraction",
        worst <= bound,
        format!("max p_λ̄((φψ-id)a)/p_λ̄(a) over 100 unit vectors, N = {TRUNC_N}: {worst:.3e} (≤ {bound:.6e})"),
    );
}

#[test]
fn criterion_09_psi_norm() {
    let s = setup();
    let lam = &s.lam_battery[1];
    let wbar = make_canonical_wbar(lam, &s.families, TRUNC_N).unwrap();
    // 10⁵-point battery: common region plus every disc.
    let per_disc = 40_000 / TRUNC_N;
    let mut samples =
        sample_common_region(&s.families, SamplePlan::new(60_000, SEED ^ 0x95), 0.05).unwrap();
    for m in 1..=TRUNC_N {
        samples.extend(
            sample_region(
                &s.families,
                Region::Disc { n: m },
                SamplePlan::new(per_disc, SEED ^ (0x9A + m as u64)),
            )
            .unwrap(),
        );
        // Boundary-hugging disc points, where the span attains its size.
        let eps = s.families.eps(m);
        for theta in [s.families.theta(m), s.families.theta(m) - 0.5 * eps] {
            for scale in [0.125_f64, 2.0_f64.powi(-6), 2.0_f64.powi(-10)] {
                let delta = (eps * scale).max(1e-13);
                samples.push(Complex64::from_polar(1.0 - delta, theta));
            }
        }
    }
    assert!(samples.len() >= 100_000);
    let ns: Vec<usize> = (1..=TRUNC_N).collect();
    let mut cached: Vec<(f64, Vec<Complex64>, f64)> = Vec::with_capacity(samples.len());
    for &z in &samples {
        let hs = s.outer.exponents_all(z, M_CUT, &ns).unwrap();
        let evals: Vec<Complex64> = hs.iter().map(|h| h.value.exp()).collect();
        let err = hs
            .iter()
            .zip(&evals)
            .map(|(h, e)| e.norm() * h.tail_bound.exp_m1())
            .fold(0.0_f64, f64::max);
        cached.push((wbar.value_at(z), evals, err));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x9C);
    let mut probes: Vec<FiniteSeq> = (1..=TRUNC_N)
        .map(|m| FiniteSeq::unit(m).scale(Complex64::new(1.0 / lam.get(m), 0.0)))
        .collect();
    for _ in 0..5 {
        probes.push(random_unit_seq(&mut rng, lam, TRUNC_N));
    }
    let mut worst: f64 = 0.0;
    for a in &probes {
        let p = a.seminorm(lam);
        let mut sup: f64 = 0.0;
        for (w, evals, err) in &cached {
            let mut v = Complex64::new(0.0, 0.0);
            for (j, aj) in a.iter() {
                v += aj * evals[j - 1];
            }
            let slack: f64 = a.iter().map(|(_, aj)| aj.norm()).sum::<f64>() * err;
            sup = sup.max(w * (v.norm() - slack));
        }
        worst = worst.max(sup / p);
    }
    verdict(
        9,
        "psi_norm",
        worst <= 3.0 && worst > 0.5,
        format!(
            "max p_w̄(ψa)/p_λ̄(a) over {} probes on {} samples = {worst:.4} (≤ 3, nontrivially attained)",
            probes.len(),
            samples.len()
        ),
    );
}

#[test]
fn criterion_10_neumann_inversion() {
    let s = setup();
    let lam = &s.lam_battery[1];
    let delta = (1.0 / 128.0) * (1.0 + 1e-3);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0xA0);
    let mut worst_res: f64 = 0.0;
    let mut worst_terms = 0usize;
    for _ in 0..20 {
        let a = random_unit_seq(&mut rng, lam, TRUNC_N);
        let (res, terms) = neumann_residual(&s.matrix, &a, lam, delta, 1e-12).unwrap();
        worst_res = worst_res.max(res);
        worst_terms = worst_terms.max(terms);
    }
    let proj = projection_check(&s.matrix, lam, 20, SEED ^ 0xA1, delta, 1e-6).unwrap();
    let pass = worst_res < 1e-9 && worst_terms <= 6 && proj.pass;
    verdict(
        10,
        "neumann_inversion",
        pass,
        format!(
            "max residual p_λ̄(φψ(Aa)-a) = {worst_res:.3e} (< 1e-9) with ≤ {worst_terms} terms (≤ 6); \
             projection residuals = {:.3e} (< 1e-6)",
            proj.max_image_residual.max(proj.max_idem_residual)
        ),
    );
}

#[test]
fn criterion_11_dominating_weight() {
    let s = setup();
    let w1 = make_wk(1, &s.koethe, &s.families, N_MAX).unwrap();
    let lam_a = SeqWeight::new((1..=N_MAX).map(|n| (n as f64).powf(-1.5)).collect()).unwrap();
    let lam_b = SeqWeight::new((1..=N_MAX).map(|n| 1.0 / n as f64).collect()).unwrap();
    let inputs = [
        make_wk(2, &s.koethe, &s.families, N_MAX).unwrap(),
        make_wk(5, &s.koethe, &s.families, N_MAX).unwrap(),
        make_canonical_wbar(&lam_a, &s.families, N_MAX).unwrap(),
        make_canonical_wbar(&lam_b, &s.families, N_MAX).unwrap(),
    ];
    let floor = floor_weight(&s.families, N_MAX);
    let mut dom_slack = f64::NEG_INFINITY;
    let mut disc_dev: f64 = 0.0;
    let mut plateau_floor = f64::NEG_INFINITY;
    for (idx, wp) in inputs.iter().enumerate() {
        let out = dominating_normalize(wp, &s.families, &s.koethe, &w1, N_MAX).unwrap();
        for i in 0..10_000 {
            let t = PI * (i as f64 + 0.5) / 10_000.0;
            let v = out.wbar.value_at_angle(t);
            dom_slack = dom_slack
                .max(out.c * wp.value_at_angle(t) - v)
                .max(v - 1.0)
                .max(floor.value_at_angle(t) - v);
        }
        for n in 1..=N_MAX {
            plateau_floor = plateau_floor.max(1.0 / (n * n) as f64 - out.lam_out.get(n));
            let plan = SamplePlan::new(850, SEED ^ (0xB0 + 16 * idx as u64 + n as u64));
            for z in sample_region(&s.families, Region::Disc { n }, plan).unwrap() {
                disc_dev = disc_dev.max((out.wbar.value_at(z) - out.lam_out.get(n)).abs());
            }
        }
    }
    let pass = dom_slack <= 1e-9 && disc_dev == 0.0 && plateau_floor <= 0.0;
    verdict(
        11,
        "dominating_weight",
        pass,
        format!(
            "max domination/floor slack = {dom_slack:.3e} (≤ 1e-9) on 10⁴ angles × 4 inputs; \
             disc deviation = {disc_dev:.1e} (exact); plateau floor slack = {plateau_floor:.3e} (≤ 0)"
        ),
    );
}

#[test]
fn criterion_12_product_weight_estimates() {
    let s = setup();
    let lam = &s.lam_battery[1];
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0xC0);
    let z1 = sample_region(&s.families, Region::All, SamplePlan::new(500, SEED ^ 0xC1)).unwrap();
    let mut restr: f64 = 0.0;
    let mut dom: f64 = 0.0;
    for k in 1..=5usize {
        let wk = make_wk(k, &s.koethe, &s.families, N_MAX).unwrap();
        let radii = [0.0, 0.5, 1.0, (k + 1) as f64, (k + 2) as f64, 50.0];
        for _ in 0..3 {
            let g = SpanElement::new(random_unit_seq(&mut rng, lam, TRUNC_N));
            let rep = wlim_core::operators::restriction_check(
                &s.outer, k, &g, &wk, &z1, &radii, M_CUT,
            )
            .unwrap();
            restr = restr.max(rep.p_wk / (rep.c_k * rep.p_vk));
            dom = dom.max(rep.p_vk / rep.p_wk);
        }
    }
    assert!((restriction_constant(2) - 2.0_f64.sqrt()).abs() < 1e-15);
    let pass = restr <= 1.0 + 1e-12 && dom <= 1.0 + 1e-12;
    verdict(
        12,
        "product_weight_estimates",
        pass,
        format!(
            "max p_w_k(Af)/(C_k p_v_k(f)) = {restr:.9}; max p_v_k(ḡ)/p_w_k(g) = {dom:.9} \
             (both ≤ 1), k ≤ 5, C_k = (k+2)^((k-1)/(2k))"
        ),
    );
}

#[test]
fn criterion_13_degeneration_witnesses() {
    let s = setup();
    // Case (i): unbounded second coordinate at fixed z₁.
    let z1 = Complex64::new(0.0, 0.75);
    let w1 = make_wk(1, &s.koethe, &s.families, N_MAX).unwrap();
    let w2 = make_wk(2, &s.koethe, &s.families, N_MAX).unwrap();
    let v1 = ProductWeight::new(w1.clone(), 1);
    let v2 = ProductWeight::new(w2.clone(), 2);
    let ratio = |t: f64| v1.value_at(z1, t).unwrap() / v2.value_at(z1, t).unwrap();
    let (r2, r4, r6) = (ratio(1e2), ratio(1e4), ratio(1e6));
    let case_i = r6 > 10.0 && r2 < r4 && r4 < r6;

    // Case (ii): boundary degeneration of the first coordinate.
    let w3 = make_wk(3, &s.koethe, &s.families, N_MAX).unwrap();
    let mut rs = Vec::new();
    for j in 1..=6 {
        let z = Complex64::new(0.0, 1.0 - 10f64.powi(-j));
        let d = HalfAnnulus::boundary_distance(z).unwrap();
        // d is exact for the stored point; 10^-j itself carries the
        // representation error of 1 - 10^-j.
        assert!((d - 10f64.powi(-j)).abs() <= 1e-9 * d);
        let r = (w1.value_at(z) * u_k_from_distance(1, d, 0.0))
            / (w3.value_at(z) * u_k_from_distance(3, d, 0.0));
        rs.push(r);
    }
    let case_ii = rs.windows(2).all(|w| w[1] > w[0]) && rs[5] / rs[0] > 10.0;
    verdict(
        13,
        "degeneration_witnesses",
        case_i && case_ii,
        format!(
            "v_1/v_2 at |z₂|=10²,10⁴,10⁶: {r2:.2}, {r4:.2}, {r6:.2} (monotone, last > 10); \
             v_1/v_3 along d = 10^-j grows {:.3} → {:.1}",
            rs[0], rs[5]
        ),
    );
}

#[test]
fn criterion_14_report_determinism() {
    let config = VerifyConfig {
        n_max: 10,
        trunc_n: 4,
        k_max: 4,
        m_cut: 40,
        quad_levels: 4,
        cn_samples: 200,
        cn_near_samples: 50,
        boundary_angles: 10,
        psi_samples: 5000,
        normalizer_samples: 2000,
        trials: 20,
        seed: 42,
        tolerances: BTreeMap::new(),
        out_dir: "unused".into(),
    };
    let a = run_battery(&config).unwrap();
    let b = run_battery(&config).unwrap();
    let pass = a.to_json_string() == b.to_json_string() && a.all_pass();
    verdict(
        14,
        "report_determinism",
        pass,
        format!(
            "two runs with identical config+seed: byte-identical JSON ({} bytes), all {} checks pass",
            a.to_json_string().len(),
            a.checks.len()
        ),
    );
}

// The log-domain design note, kept checkable: every certified log-modulus in
// the default battery stays far above the f64 underflow edge near -745.
#[test]
fn log_domain_quantities_stay_in_range() {
    let s = setup();
    let min_log_eps = (1..=N_MAX).map(|n| s.outer.eps(n).ln()).fold(0.0_f64, f64::min);
    let min_bound = -((4 + N_MAX) as f64) * LN_2;
    assert!(min_log_eps > -120.0 && min_bound > -120.0);
}
