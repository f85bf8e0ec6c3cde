use proptest::prelude::*;

use incidence_core::energy::s_energy;
use incidence_core::experiment::fit_exponent;
use incidence_core::families::{SphereFamily, SurfaceFamily};
use incidence_core::geometry::{
    check_homogeneity, generate_grid, generate_jittered, HomogeneityParams, PointSet, Provenance,
    ScanMethod,
};
use incidence_core::incidence::{count, Engine, IncidenceQuery};

fn defaults() -> HomogeneityParams {
    HomogeneityParams::new(3.0, 0.4, 4).unwrap()
}

fn cloud(d: usize) -> impl Strategy<Value = PointSet> {
    prop::collection::vec(0.0f64..=1.0, d..=d * 120).prop_map(move |mut c| {
        c.truncate(c.len() / d * d);
        PointSet::from_flat(d, c, Provenance::new("proptest")).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn grids_are_homogeneous(n in 1usize..64) {
        let set = generate_grid(n, 2).unwrap();
        let r = check_homogeneity(&set, &defaults(), ScanMethod::Exact).unwrap();
        prop_assert!(r.passed, "{}", r);
        prop_assert_eq!(r.max_small_cube_count, 1);
    }

    #[test]
    fn exact_scan_dominates_lattice_scan(set in cloud(2), c0 in 0.1f64..2.0) {
        let p = HomogeneityParams::new(c0 + 3.0, c0, 1).unwrap();
        let exact = check_homogeneity(&set, &p, ScanMethod::Exact).unwrap();
        let lattice = check_homogeneity(&set, &p, ScanMethod::Conservative).unwrap();
        prop_assert!(exact.max_small_cube_count >= lattice.max_small_cube_count);
        let w = &exact.max_witness;
        let inside = set.iter().filter(|p| w.contains(p)).count();
        prop_assert_eq!(inside, exact.max_small_cube_count);
    }

    #[test]
    fn scan_ignores_point_order(set in cloud(3), seed in any::<u64>()) {
        let mut pts: Vec<Vec<f64>> = set.iter().map(|p| p.to_vec()).collect();
        let len = pts.len();
        for i in (1..len).rev() {
            pts.swap(i, (seed.rotate_left(i as u32) % (i as u64 + 1)) as usize);
        }
        let shuffled = PointSet::from_points(3, &pts).unwrap();
        let a = check_homogeneity(&set, &defaults(), ScanMethod::Exact).unwrap();
        let b = check_homogeneity(&shuffled, &defaults(), ScanMethod::Exact).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn doubling_a_set_doubles_cube_counts(n in 2usize..20, amp in 0.0f64..0.45, seed in any::<u64>()) {
        let set = generate_jittered(n, 2, amp, seed).unwrap();
        let twice = set.union(&set).unwrap();
        // same cube side: compare at the scale of the doubled set
        let p = HomogeneityParams::new(3.0, 0.4, 8).unwrap();
        let p_single = HomogeneityParams::new(3.0 * 2f64.sqrt(), 0.4 / 2f64.sqrt(), 8).unwrap();
        let a = check_homogeneity(&set, &p_single, ScanMethod::Exact).unwrap();
        let b = check_homogeneity(&twice, &p, ScanMethod::Exact).unwrap();
        prop_assert_eq!(b.max_small_cube_count, 2 * a.max_small_cube_count);
        let strict = HomogeneityParams::new(3.0, 0.4, b.max_small_cube_count - 1).unwrap();
        prop_assert!(!check_homogeneity(&twice, &strict, ScanMethod::Exact).unwrap().passed);
    }

    #[test]
    fn regeneration_is_bitwise(n in 1usize..30, amp in 0.0f64..0.45, seed in any::<u64>()) {
        let a = generate_jittered(n, 2, amp, seed).unwrap();
        let b = generate_jittered(n, 2, amp, seed).unwrap();
        prop_assert_eq!(a.coords(), b.coords());
        prop_assert_eq!(a.provenance(), b.provenance());
    }

    #[test]
    fn counts_grow_with_delta(
        n in 3usize..25,
        seed in any::<u64>(),
        r in 0.05f64..0.4,
        d1 in 0.0f64..0.02,
        extra in 0.0f64..0.02,
    ) {
        let set = generate_jittered(n, 2, 0.3, seed).unwrap();
        let fam = SphereFamily::constant(2, r).unwrap();
        let at = |delta: f64| {
            count(&IncidenceQuery::new(&set, &fam, delta).unwrap(), Engine::Grid).unwrap().count
        };
        prop_assert!(at(d1) <= at(d1 + extra));
    }

    #[test]
    fn engines_agree_on_clouds(set in cloud(2), r in 0.02f64..0.5, delta in 0.0f64..0.05) {
        let fam = SphereFamily::constant(2, r).unwrap();
        prop_assert!(fam.has_exact_distance());
        let q = IncidenceQuery::new(&set, &fam, delta).unwrap();
        prop_assert_eq!(
            count(&q, Engine::Grid).unwrap().count,
            count(&q, Engine::Brute).unwrap().count
        );
    }

    #[test]
    fn energy_offdiag_is_translation_invariant(k in 1u32..5, sx in 0u32..8, sy in 0u32..8) {
        // dyadic grid and shift keep every difference exact
        let n = 1usize << k;
        let set = generate_grid(n, 2).unwrap();
        let step = 1.0 / (16.0 * n as f64);
        let shifted: Vec<f64> = set
            .coords()
            .chunks(2)
            .flat_map(|p| [p[0] + sx as f64 * step * 0.5, p[1] + sy as f64 * step * 0.5])
            .collect();
        let moved = PointSet::from_flat(2, shifted, Provenance::new("shifted")).unwrap();
        let a = s_energy(&set, 1.3, 0.01).unwrap();
        let b = s_energy(&moved, 1.3, 0.01).unwrap();
        prop_assert_eq!(a.offdiag_sum, b.offdiag_sum);
        prop_assert!(a.total >= a.offdiag_sum.max(a.diag_term));
    }

    #[test]
    fn fit_recovers_power_laws(exp in -2.0f64..3.0, scale in 0.1f64..100.0) {
        let pairs: Vec<(f64, f64)> =
            (4..12).map(|k| { let n = 2f64.powi(k); (n, scale * n.powf(exp)) }).collect();
        let f = fit_exponent(&pairs).unwrap();
        prop_assert!((f.slope - exp).abs() < 1e-9);
        prop_assert!(f.residual_max < 1e-9);
    }
}
