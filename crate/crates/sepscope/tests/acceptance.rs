//! Acceptance suite: one test per criterion, each printing a PASS line
//! (visible with `--nocapture`). Run single-threaded for clean timing:
//!
//! ```text
//! cargo test -p sepscope --test acceptance -- --test-threads=1 --nocapture
//! ```

use sepscope::sweep::{compute_sweep, csv_string, SweepGrid, SweepSpec};
use sepscope::validate::{run_chain_campaign, ChainCampaignSpec};
use sepscope_core::bounds::{
    lambda_bound, rm_bound, witness_spectrum, witness_spectrum_dense, BoundVariant,
};
use sepscope_core::flips::enumerate_witnesses;
use sepscope_core::measures::{
    calibrate_eta, eta_pure, eta_via_concurrences, rm_pure, MeasureConfig,
};
use sepscope_core::partitions::{
    nonempty_subsets, orbit_reduce, set_partitions, stirling, v4, Partition, SiteSet,
};
use sepscope_core::random::{
    random_density, random_pure, random_separable_mixture, rng_from_seed,
};
use sepscope_core::roof::{validate_chain, ChainParams, RoofError};
use sepscope_core::states::{bell_pair, ghz, product_state, w_state};
use sepscope_core::tensor::{validate_density, CMat, DensityMatrix, SystemShape};
use std::sync::Mutex;
use std::time::Instant;

/// Heavy tests take this lock so wall-clock measurements are not skewed
/// by sibling tests on other threads.
static HEAVY: Mutex<()> = Mutex::new(());

fn heavy_guard() -> std::sync::MutexGuard<'static, ()> {
    HEAVY.lock().unwrap_or_else(|poison| poison.into_inner())
}

fn sites(v: &[usize]) -> SiteSet {
    SiteSet::new(v.to_vec()).unwrap()
}

fn part(blocks: &[&[usize]]) -> Partition {
    let n = blocks.iter().map(|b| b.len()).sum();
    Partition::new(blocks.iter().map(|b| sites(b)).collect(), n).unwrap()
}

#[test]
fn c1_combinatorics_and_orbit_tables() {
    assert_eq!(stirling(4, 2).unwrap(), 7);
    assert_eq!(stirling(4, 3).unwrap(), 6);

    // Orbit contents under the four-element relabeling group: the
    // one-versus-three cuts pair up two ways, the two-versus-two cuts
    // pair except for {12|34}, and in the tripartitions only the mixed
    // type fuses into one orbit of four. Representatives here are the
    // canonically smallest members.
    let group = v4();
    let bi = orbit_reduce(&set_partitions(4, 2).unwrap(), &group).unwrap();
    assert_eq!(bi.entries.len(), 4);
    assert_eq!(bi.total_multiplicity(), 7);
    let expected_bi = [
        (part(&[&[1], &[2, 3, 4]]), 2),
        (part(&[&[1, 2], &[3, 4]]), 1),
        (part(&[&[1, 3], &[2, 4]]), 2),
        (part(&[&[1, 2, 3], &[4]]), 2),
    ];
    for pair in &expected_bi {
        assert!(bi.entries.iter().any(|e| (&e.0, e.1) == (&pair.0, pair.1)), "missing {pair:?}");
    }

    let tri = orbit_reduce(&set_partitions(4, 3).unwrap(), &group).unwrap();
    assert_eq!(tri.entries.len(), 3);
    let expected_tri = [
        (part(&[&[1], &[2], &[3, 4]]), 1),
        (part(&[&[1, 2], &[3], &[4]]), 1),
        (part(&[&[1], &[2, 3], &[4]]), 4),
    ];
    for pair in &expected_tri {
        assert!(tri.entries.iter().any(|e| (&e.0, e.1) == (&pair.0, pair.1)), "missing {pair:?}");
    }
    println!("acceptance 1 (combinatorics and orbit tables): PASS");
}

#[test]
fn c2_eta_identity_and_calibration() {
    // The qubit run: per-state identity between the calibrated concurrence
    // route and the linear-entropy form, for every proper cut.
    let qubit_shapes: Vec<SystemShape> = [2usize, 3, 4]
        .iter()
        .map(|&n| SystemShape::qubits(n).unwrap())
        .collect();
    let outcome = calibrate_eta(100, &qubit_shapes, 20260811).unwrap();
    assert!(outcome.global_constant, "calibration constant must not depend on |γ|");

    let mut rng = rng_from_seed(515151);
    let mut checked = 0usize;
    for (i, &shape) in qubit_shapes.iter().cycle().take(200).enumerate() {
        let psi = random_pure(shape, &mut rng);
        for gamma in nonempty_subsets(&SiteSet::full(shape.n())) {
            if gamma.len() == shape.n() {
                continue;
            }
            let direct = eta_pure(&psi, &gamma).unwrap();
            let via = eta_via_concurrences(&psi, &gamma, &outcome.config).unwrap();
            let rel = (via - direct).abs() / direct.abs().max(1e-12);
            assert!(rel < 1e-9, "state {i}, γ={:?}: rel {rel:e}", gamma.members());
            checked += 1;
        }
    }
    assert!(checked >= 200);

    // The qutrit run fixes the summation reading: the ratio must be one
    // constant, and the same one the qubit run fitted.
    let qutrit = [SystemShape::new(2, 3).unwrap()];
    let qutrit_outcome = calibrate_eta(100, &qutrit, 424242).unwrap();
    for g in &qutrit_outcome.groups {
        assert!(g.spread <= 1e-8, "qutrit ratio spread {:e}", g.spread);
    }
    let a = outcome.config.calibration_factor;
    let b = qutrit_outcome.config.calibration_factor;
    assert!(((a - b) / a).abs() < 1e-8, "constants differ: {a} vs {b}");
    println!(
        "acceptance 2 (eta identity, calibration constant {:.12}, global): PASS",
        a
    );
}

#[test]
fn c3_pure_state_closed_forms() {
    let r2 = rm_pure(&ghz(4).unwrap(), 2).unwrap().rm;
    let closed = ((11.0f64 / 14.0).powi(4) * (2.0f64 / 3.0).powi(3)).powf(1.0 / 7.0);
    assert!((r2 - closed).abs() < 1e-10, "{r2} vs {closed}");

    let eta1 = eta_pure(&w_state(4).unwrap(), &sites(&[1])).unwrap();
    assert!((eta1 - 0.75).abs() < 1e-10);
    println!("acceptance 3 (GHZ4 R2 = {closed:.12}, W4 eta = 3/4): PASS");
}

#[test]
fn c4_bound_validity_campaign() {
    let _guard = heavy_guard();
    let spec = ChainCampaignSpec {
        seed: 7,
        trials: 500,
        two_qubit_states: 50,
        three_qubit_states: 25,
        variant: BoundVariant::Quadrature,
        tol_gap: 1e-6,
    };
    let outcome = run_chain_campaign(&spec).unwrap();
    assert_eq!(outcome.violation_count, 0, "chain violations: {:?}",
        outcome.states.iter().flat_map(|s| &s.violations).collect::<Vec<_>>());
    assert!(outcome.min_margin >= 0.0);

    // Regression: the aggregation as printed in the source formula
    // overshoots on the Bell projector (Λ = 4 against C² = 1) and must be
    // flagged as a chain violation.
    let bell = DensityMatrix::from_pure(&bell_pair());
    let err = validate_chain(
        &bell,
        &sites(&[1]),
        BoundVariant::SumLiteral,
        ChainParams::new(20, 4, 7),
        &MeasureConfig::calibrated(),
    )
    .unwrap_err();
    assert!(matches!(err, RoofError::ChainViolation { .. }));
    let literal = lambda_bound(&bell, &sites(&[1]), &sites(&[2]), BoundVariant::SumLiteral).unwrap();
    assert!((literal - 4.0).abs() < 1e-10);
    println!(
        "acceptance 4 (chain holds on 75 states, min margin {:.3e}; literal variant violates): PASS",
        outcome.min_margin
    );
}

#[test]
fn c5_separability_zeros() {
    let mut rng = rng_from_seed(909090);
    for n in [3usize, 4] {
        let shape = SystemShape::qubits(n).unwrap();
        let cuts: Vec<SiteSet> = nonempty_subsets(&SiteSet::full(n))
            .into_iter()
            .filter(|g| g.len() < n && g.contains(1))
            .collect();
        assert_eq!(cuts.len(), if n == 3 { 3 } else { 7 });
        for gamma in &cuts {
            for _ in 0..100 {
                use rand::Rng;
                let terms = rng.random_range(3..9);
                let rho = random_separable_mixture(shape, gamma, terms, &mut rng).unwrap();
                for delta in nonempty_subsets(&gamma.complement(n)) {
                    for variant in [BoundVariant::Quadrature, BoundVariant::SumLiteral] {
                        let lam = lambda_bound(&rho, gamma, &delta, variant).unwrap();
                        assert!(lam < 1e-9, "n={n} γ={:?} δ={:?}: Λ = {lam:e}", gamma.members(), delta.members());
                    }
                }
            }
        }
    }

    let shape = SystemShape::qubits(4).unwrap();
    let mixed = validate_density(CMat::identity(16).scaled(1.0 / 16.0), shape).unwrap();
    let zero = DensityMatrix::from_pure(&product_state(shape, &[0, 0, 0, 0]).unwrap());
    for m in 2..=4 {
        assert_eq!(rm_bound(&mixed, m, BoundVariant::Quadrature, None).unwrap().rm_tilde, 0.0);
        assert_eq!(rm_bound(&zero, m, BoundVariant::Quadrature, None).unwrap().rm_tilde, 0.0);
    }
    println!("acceptance 5 (separability zeros): PASS");
}

const ZERO_THRESHOLD: f64 = 1e-12;
const MONOTONE_SLACK: f64 = 1e-10;

/// Checks (a) zero-set nesting and (b) monotone decay along fixed-r rays;
/// returns the number of fixed-q slice pairs where R2 drops as r grows,
/// which property (c) requires to be zero.
fn check_sweep_structure(grid: &SweepGrid, variant: &str) -> usize {
    // (a) Zero-set nesting: a vanishing finer bound forces the coarser
    // ones to vanish.
    for row in &grid.rows {
        let [r2, r3, r4] = [
            row.value(2).unwrap(),
            row.value(3).unwrap(),
            row.value(4).unwrap(),
        ];
        if r4 < ZERO_THRESHOLD {
            assert!(r3 < ZERO_THRESHOLD, "{variant}: R4 = 0 but R3 = {r3} at ({}, {})", row.p1, row.p2);
        }
        if r3 < ZERO_THRESHOLD {
            assert!(r2 < ZERO_THRESHOLD, "{variant}: R3 = 0 but R2 = {r2} at ({}, {})", row.p1, row.p2);
        }
    }

    // (b) Fixed-r rays: every bound non-increasing in the noise degree.
    use std::collections::BTreeMap;
    let mut rays: BTreeMap<u64, Vec<&sepscope::sweep::SweepRow>> = BTreeMap::new();
    for row in &grid.rows {
        let key = row.r.map(f64::to_bits).unwrap_or(u64::MAX);
        rays.entry(key).or_default().push(row);
    }
    for ray in rays.values_mut() {
        ray.sort_by(|a, b| a.q.partial_cmp(&b.q).unwrap());
        for pair in ray.windows(2) {
            for m in 2..=4 {
                let hi = pair[0].value(m).unwrap();
                let lo = pair[1].value(m).unwrap();
                assert!(
                    lo <= hi + MONOTONE_SLACK,
                    "{variant}: R{m} rises along r-ray at q {} -> {}: {hi} -> {lo}",
                    pair[0].q,
                    pair[1].q
                );
            }
        }
    }

    // (c) Fixed-q slices: R2 non-increasing as r decreases, i.e.
    // non-decreasing in p2 along anti-diagonals. The grid is square, so a
    // slice is exactly i + j = const in step integers.
    let s1 = (grid.spec.p1_steps - 1) as f64;
    let s2 = (grid.spec.p2_steps - 1) as f64;
    assert_eq!(s1, s2, "slice grouping assumes a square grid");
    let mut slices: BTreeMap<i64, Vec<&sepscope::sweep::SweepRow>> = BTreeMap::new();
    for row in &grid.rows {
        let key = (row.p1 * s1).round() as i64 + (row.p2 * s2).round() as i64;
        slices.entry(key).or_default().push(row);
    }
    let mut slice_drops = 0usize;
    for slice in slices.values_mut() {
        slice.sort_by(|a, b| a.p2.partial_cmp(&b.p2).unwrap());
        for pair in slice.windows(2) {
            let lo_r = pair[0].value(2).unwrap();
            let hi_r = pair[1].value(2).unwrap();
            if hi_r < lo_r - MONOTONE_SLACK {
                slice_drops += 1;
            }
        }
    }
    slice_drops
}

#[test]
fn c6_sweep_structure_each_variant() {
    let _guard = heavy_guard();
    for variant in [BoundVariant::Quadrature, BoundVariant::SumLiteral, BoundVariant::MaxSingle] {
        let spec = SweepSpec::new(101, 101, vec![2, 3, 4], variant).unwrap();
        let grid = compute_sweep(&spec).unwrap();
        assert_eq!(grid.rows.len(), 5151);
        let slice_drops = check_sweep_structure(&grid, variant.as_str());
        match variant {
            // The validated variants carry the full figure structure
            // including the fixed-q slice monotonicity of R2.
            BoundVariant::Quadrature | BoundVariant::MaxSingle => {
                assert_eq!(slice_drops, 0, "{}: R2 must not fall as r grows", variant.as_str());
            }
            // The as-printed aggregation provably overshoots the
            // quantity it bounds (see the chain regression) and its R2
            // slices are demonstrably non-monotone; pin that fact so the
            // ambiguity stays surfaced rather than hidden.
            BoundVariant::SumLiteral => {
                assert!(slice_drops > 0, "literal slice non-monotonicity disappeared; revisit");
                println!(
                    "acceptance 6 note: literal variant breaks fixed-q slice monotonicity \
                     at {slice_drops} slice pairs (documented aggregation defect)"
                );
            }
        }
    }
    println!("acceptance 6 (zero-set nesting and monotone structure, 3 variants): PASS");
}

#[test]
fn c7_fast_path_equivalence() {
    let shape = SystemShape::qubits(4).unwrap();
    let mut rng = rng_from_seed(777);
    let all_pairs: Vec<(SiteSet, SiteSet)> = {
        let mut pairs = Vec::new();
        for gamma in nonempty_subsets(&SiteSet::full(4)) {
            if gamma.len() == 4 {
                continue;
            }
            for delta in nonempty_subsets(&gamma.complement(4)) {
                pairs.push((gamma.clone(), delta));
            }
        }
        pairs
    };
    let mut families = Vec::new();
    for (gamma, delta) in &all_pairs {
        families.push(enumerate_witnesses(&shape, gamma, delta).unwrap());
    }
    let mut checked = 0usize;
    use rand::Rng;
    'outer: for _ in 0..100 {
        let rho = random_density(shape, &mut rng);
        for _ in 0..10 {
            let family = &families[rng.random_range(0..families.len())];
            let witness = &family[rng.random_range(0..family.len())];
            let fast = witness_spectrum(&rho, witness).unwrap();
            let dense = witness_spectrum_dense(&rho, witness).unwrap();
            for i in 0..4 {
                let a = fast.lambdas.get(i).copied().unwrap_or(0.0);
                let b = dense.lambdas.get(i).copied().unwrap_or(0.0);
                assert!((a - b).abs() < 1e-9, "λ{i}: {a} vs {b}");
            }
            checked += 1;
            if checked == 1000 {
                break 'outer;
            }
        }
    }
    assert_eq!(checked, 1000);
    println!("acceptance 7 (fast path matches dense on 1000 pairs): PASS");
}

#[test]
fn c8_performance_and_determinism() {
    let _guard = heavy_guard();
    let spec = SweepSpec::new(101, 101, vec![2, 3, 4], BoundVariant::Quadrature).unwrap();

    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let start = Instant::now();
    let grid_a = single.install(|| compute_sweep(&spec)).unwrap();
    let t1 = start.elapsed();
    assert!(
        t1.as_secs_f64() < 60.0,
        "single-threaded sweep took {:.1}s",
        t1.as_secs_f64()
    );

    let grid_b = single.install(|| compute_sweep(&spec)).unwrap();
    assert_eq!(
        csv_string(&grid_a).unwrap(),
        csv_string(&grid_b).unwrap(),
        "CSV must be byte-identical across runs"
    );

    let eight = rayon::ThreadPoolBuilder::new().num_threads(8).build().unwrap();
    let start = Instant::now();
    let grid_c = eight.install(|| compute_sweep(&spec)).unwrap();
    let t8 = start.elapsed();
    assert_eq!(csv_string(&grid_a).unwrap(), csv_string(&grid_c).unwrap());
    let speedup = t1.as_secs_f64() / t8.as_secs_f64();

    let cores = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    if cores >= 8 {
        assert!(speedup >= 4.0, "8-thread speedup {speedup:.2} below 4");
        println!(
            "acceptance 8 (single-thread {:.2}s, 8-thread speedup {speedup:.2}, deterministic CSV): PASS",
            t1.as_secs_f64()
        );
    } else {
        println!(
            "acceptance 8 (single-thread {:.2}s < 60s, deterministic CSV): PASS; \
             8-thread scaling SKIPPED: host exposes {cores} CPUs, measured speedup {speedup:.2}",
            t1.as_secs_f64()
        );
    }
}
