use num_bigint::BigInt;
use proptest::prelude::*;

use muord::cm::{family, simple_signature_check, splitting_datum};
use muord::counting::{
    count_projective, eigen_charpoly, lpolynomial_naive, lpolynomial_via_characters, CharSums, CurveInstance,
    DEFAULT_BUDGET,
};
use muord::harness::{coset_pieces, scan, ScanConfig};
use muord::invariant::compute_ap;
use muord::weyl::{LaurentPoly, TorusVars};

fn ap_of(curve: &CurveInstance, name: &str, p: u64) -> BigInt {
    let sig = family(name).unwrap().datum.signature();
    let split = splitting_datum(sig.m, p, &simple_signature_check(&sig).unwrap()).unwrap();
    let mut sums = CharSums::new(curve, DEFAULT_BUDGET);
    let pieces = coset_pieces(&mut sums, &split).unwrap();
    compute_ap(&pieces, &split).unwrap()
}

// when p is inert, K = Q and a_p is the trace on ∧^f H^1, i.e. (-1)^f c_f
#[test]
fn ap_matches_l_coefficient_at_inert_primes() {
    let cases: &[(&str, &[i64], &[u64])] = &[
        ("M11", &[0, 1, 3], &[7, 13, 17, 23]),
        ("M10", &[0, 1, 3, 7, 12], &[17, 23, 29]),
        ("M6", &[0, 1, 3, 7], &[5, 11, 17]),
        ("M8", &[0, 1, 3, 7], &[11, 19]),
    ];
    for &(name, pts, primes) in cases {
        let datum = family(name).unwrap().datum;
        for &p in primes {
            let curve = CurveInstance::from_datum(&datum, pts, p).unwrap();
            let f = muord::ffield::mult_order(p % datum.m, datum.m) as usize;
            assert_eq!(muord::ffield::units(datum.m).len(), f, "{name} p={p} should be inert");
            let l = lpolynomial_naive(&curve, DEFAULT_BUDGET).unwrap();
            let sign = if f % 2 == 0 { 1 } else { -1 };
            assert_eq!(ap_of(&curve, name, p), &l.coeffs[f] * sign, "{name} p={p}");
        }
    }
}

#[test]
fn ap_does_not_depend_on_the_character_labeling() {
    let datum = family("M11").unwrap().datum;
    let sig = datum.signature();
    let simple = simple_signature_check(&sig).unwrap();
    for p in [7u64, 11, 19, 29, 31] {
        let curve = CurveInstance::from_datum(&datum, &[0, 1, 3], p).unwrap();
        let split = splitting_datum(5, p, &simple).unwrap();
        let base = ap_of(&curve, "M11", p);
        for u in [2u64, 3, 4] {
            let mut sums = CharSums::new(&curve, DEFAULT_BUDGET);
            let pieces: Vec<_> =
                split.cosets.iter().map(|t| eigen_charpoly(&mut sums, u * (5 - t[0]) % 5, true).unwrap()).collect();
            assert_eq!(compute_ap(&pieces, &split).unwrap(), base, "p={p} u={u}");
        }
    }
}

#[test]
fn warm_cache_rerun_gives_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ScanConfig::for_family("M11", 3, 200);
    cfg.t = Some(3);
    cfg.budget = 60u64.pow(4);
    cfg.cache_path = Some(dir.path().join("cache.jsonl"));
    cfg.out_csv = Some(dir.path().join("a.csv"));
    let first = scan(&cfg).unwrap();
    cfg.out_csv = Some(dir.path().join("b.csv"));
    let second = scan(&cfg).unwrap();
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
    assert_eq!(first.classes, second.classes);
    let lines = std::fs::read_to_string(dir.path().join("cache.jsonl")).unwrap().lines().count();
    assert_eq!(lines, first.records.len());
}

#[test]
fn scan_records_are_consistent() {
    let mut cfg = ScanConfig::for_family("M11", 3, 300);
    cfg.t = Some(3);
    cfg.budget = 60u64.pow(4);
    let summary = scan(&cfg).unwrap();
    for r in summary.records.iter().filter(|r| r.is_classified()) {
        if r.mu_certified == Some(true) {
            assert_eq!(r.is_mu_ordinary, Some(true), "p={}", r.p);
        }
        if r.complete {
            assert_eq!(r.shortcut_agrees, Some(true), "p={}", r.p);
        }
        assert_eq!(r.div_ok, Some(true), "p={}", r.p);
        assert_eq!(r.bound_ok, Some(true), "p={}", r.p);
    }
}

fn small_curve() -> impl Strategy<Value = (u64, Vec<i64>, Vec<u64>, u64)> {
    (prop::sample::select(vec![3u64, 4, 5]), 2usize..=4, prop::sample::select(vec![7u64, 11, 13, 17, 19]))
        .prop_flat_map(|(m, k, p)| {
            (Just(m), prop::collection::vec(0i64..40, k), prop::collection::vec(1..m, k), Just(p))
        })
        .prop_map(|(m, pts, exps, p)| (m, pts, exps, p))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn point_counts_respect_weil((m, pts, exps, p) in small_curve()) {
        let Ok(curve) = CurveInstance::new(m, &pts, &exps, p) else { return Ok(()) };
        let g = curve.genus() as f64;
        for k in 1..=2usize {
            let n = count_projective(&curve, k, DEFAULT_BUDGET).unwrap() as f64;
            let q = (p as f64).powi(k as i32);
            prop_assert!((n - q - 1.0).abs() <= 2.0 * g * q.sqrt() + 1e-9);
        }
    }

    #[test]
    fn character_route_matches_naive((m, pts, exps, p) in small_curve()) {
        let Ok(curve) = CurveInstance::new(m, &pts, &exps, p) else { return Ok(()) };
        prop_assume!(curve.genus() <= 3);
        let budget = 20_000_000;
        let naive = lpolynomial_naive(&curve, budget);
        prop_assume!(naive.is_ok());
        let naive = naive.unwrap();
        let chars = lpolynomial_via_characters(&curve, budget).unwrap();
        prop_assert_eq!(&naive, &chars);
        prop_assert!(chars.satisfies_functional_equation());
        prop_assert!(chars.check_weil().is_ok());
    }

    #[test]
    fn laurent_ring_laws(
        a in prop::collection::vec((prop::collection::vec(-3i32..4, 3), -5i64..6), 0..5),
        b in prop::collection::vec((prop::collection::vec(-3i32..4, 3), -5i64..6), 0..5),
        c in prop::collection::vec((prop::collection::vec(-3i32..4, 3), -5i64..6), 0..5),
    ) {
        let mk = |v: &Vec<(Vec<i32>, i64)>| v.iter().fold(LaurentPoly::zero(3), |s, (e, k)| s.add(&LaurentPoly::monomial(e.clone(), *k)));
        let (a, b, c) = (mk(&a), mk(&b), mk(&c));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert!(a.sub(&a).is_empty());
        prop_assert!(a.terms().all(|(_, &k)| k != 0));
    }

    #[test]
    fn tprime_restriction_kills_determinants(i in 0usize..2, e in -3i32..4) {
        let v = TorusVars { d: 2, n: 2 };
        let mut x = vec![0; v.nvars()];
        x[v.x(i, 0)] = e;
        x[v.x(i, 1)] = e;
        prop_assert!(muord::weyl::restrict_to_tprime(&LaurentPoly::monomial(x, 1), v).is_constant());
    }
}
