use proptest::prelude::*;
use skewfold::*;

fn grid(n: usize) -> TimeGrid64 {
    make_grid(1.0, n).unwrap()
}

fn path_from(values: Vec<f64>) -> SamplePath64 {
    SamplePath::new(grid(values.len() - 1), values).unwrap()
}

/// Random walk started at 0 with the given increments.
fn walk(steps: &[f64]) -> SamplePath64 {
    let mut acc = 0.0;
    let mut v = vec![0.0];
    for s in steps {
        acc += s;
        v.push(acc);
    }
    path_from(v)
}

fn steps(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, 1..max_len)
}

proptest! {
    #[test]
    fn ito_is_linear_in_integrand(
        (h1, h2, u) in (1usize..40).prop_flat_map(|n| (
            prop::collection::vec(-3.0..3.0f64, n + 1),
            prop::collection::vec(-3.0..3.0f64, n + 1),
            prop::collection::vec(-3.0..3.0f64, n + 1),
        )),
        a in -2.0..2.0f64,
        b in -2.0..2.0f64,
    ) {
        let (h1, h2, u) = (path_from(h1), path_from(h2), path_from(u));
        let combo = h1.zip_with(&h2, |x, y| a * x + b * y).unwrap();
        let lhs = ito_integral(&combo, &u).unwrap();
        let rhs = ito_integral(&h1, &u).unwrap().scale(a).add(&ito_integral(&h2, &u).unwrap().scale(b)).unwrap();
        prop_assert!(identity_residual(&lhs, &rhs).unwrap() < 1e-9);
    }

    #[test]
    fn ito_is_linear_in_integrator_increments(
        (h, u1, u2) in (1usize..40).prop_flat_map(|n| (
            prop::collection::vec(-3.0..3.0f64, n + 1),
            prop::collection::vec(-3.0..3.0f64, n + 1),
            prop::collection::vec(-3.0..3.0f64, n + 1),
        )),
        shift in -5.0..5.0f64,
    ) {
        let (h, u1, u2) = (path_from(h), path_from(u1), path_from(u2));
        let sum = u1.add(&u2).unwrap().map(|v| v + shift);
        let lhs = ito_integral(&h, &sum).unwrap();
        let rhs = ito_integral(&h, &u1).unwrap().add(&ito_integral(&h, &u2).unwrap()).unwrap();
        prop_assert!(identity_residual(&lhs, &rhs).unwrap() < 1e-9);
    }

    #[test]
    fn quadratic_variation_is_nondecreasing(s in steps(60)) {
        let q = quadratic_variation(&walk(&s));
        prop_assert_eq!(q.first(), 0.0);
        prop_assert!(q.values().windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn skorokhod_reflection_solves_the_reflection_problem(s in steps(80)) {
        let u = walk(&s);
        let r = skorokhod_reflect(&u).unwrap();
        let (sv, cv, uv) = (r.reflected.values(), r.pushing.values(), u.values());
        prop_assert_eq!(cv[0], 0.0);
        for i in 0..sv.len() {
            prop_assert!(sv[i] >= 0.0);
            prop_assert_eq!(sv[i], uv[i] + cv[i]);
            if i > 0 {
                prop_assert!(cv[i] >= cv[i - 1]);
                if cv[i] > cv[i - 1] {
                    prop_assert_eq!(sv[i], 0.0);
                }
            }
        }
    }

    #[test]
    fn conventional_reflection_is_abs(s in steps(50)) {
        let u = walk(&s);
        let r = conventional_reflect(&u);
        prop_assert!(r.values().iter().zip(u.values()).all(|(a, b)| *a == b.abs()));
    }

    #[test]
    fn decomposition_covers_every_index(s in steps(80), tol in 0.0..0.5f64) {
        let folded = skorokhod_reflect(&walk(&s)).unwrap().reflected;
        let d = decompose_excursions(&folded, tol).unwrap();
        let mut covered = vec![0u8; folded.len()];
        let mut last_end = 0;
        for r in d.intervals() {
            prop_assert!(!r.is_empty());
            prop_assert!(r.start >= last_end);
            last_end = r.end;
            for i in r.clone() {
                covered[i] += 1;
                prop_assert!(folded.values()[i] > tol);
            }
        }
        for (i, &z) in d.zero_mask().iter().enumerate() {
            if z {
                covered[i] += 1;
            }
        }
        prop_assert!(covered.iter().all(|&c| c == 1));
    }

    #[test]
    fn unfolding_preserves_magnitude(s in steps(80), alpha in 0.01..0.99f64, seed in any::<u64>()) {
        let u = SemimartingalePath::from_martingale(walk(&s)).unwrap();
        let r = unfold_skorokhod(&u, alpha, RngStream::new(seed, 0), 0.0).unwrap();
        prop_assert_eq!(r.unfolded.abs(), r.folded.clone());
        for ((z, x), s) in r.sign_path.values().iter().zip(r.unfolded.values()).zip(r.folded.values()) {
            prop_assert!(*z == -1.0 || *z == 0.0 || *z == 1.0);
            prop_assert_eq!(*x, z * s);
            prop_assert_eq!(*z != 0.0, *s > 0.0);
        }
        prop_assert_eq!(r.diagnostics["pushing_flatness"], 0.0);
    }

    #[test]
    fn conventional_unfolding_with_tolerance(s in steps(80), tol in 0.0..0.3f64, seed in any::<u64>()) {
        let u = SemimartingalePath::from_martingale(walk(&s)).unwrap();
        let r = unfold_conventional(&u, 0.4, RngStream::new(seed, 1), tol).unwrap();
        for (x, s) in r.unfolded.values().iter().zip(r.folded.values()) {
            if *s > tol {
                prop_assert_eq!(x.abs(), *s);
            } else {
                prop_assert_eq!(*x, 0.0);
            }
        }
    }

    #[test]
    fn local_time_estimators_are_monotone(s in steps(80)) {
        let u = walk(&s).scale(0.2);
        let qv = quadratic_variation(&u);
        let curves = [
            occupation_local_time(&u, &qv, 0.1, Side::Right).unwrap(),
            occupation_local_time(&u, &qv, 0.1, Side::Symmetric).unwrap(),
            upcrossing_signed(&u, UpcrossingBand::plain(0.1), Side::Symmetric).unwrap(),
            upcrossing_local_time(&u.abs(), UpcrossingBand::for_grid(u.grid())).unwrap(),
            tanaka_local_time(&u, Side::Right),
            tanaka_local_time(&u, Side::Symmetric),
            folded_tanaka_local_time(&u),
        ];
        for c in curves {
            prop_assert_eq!(c.values.first(), 0.0);
            prop_assert!(c.values.values().windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn scale_map_is_odd(x in -50.0..50.0f64, delta in 1.01..1.99f64) {
        let (g, big) = bessel_scale_maps(x, delta);
        let (g_neg, big_neg) = bessel_scale_maps(-x, delta);
        prop_assert_eq!(g, g_neg);
        prop_assert_eq!(big, -big_neg);
        prop_assert!(g >= 0.0);
    }

    #[test]
    fn generators_are_deterministic(seed in any::<u64>(), stream in any::<u64>()) {
        let g = grid(64);
        let s = RngStream::new(seed, stream);
        prop_assert_eq!(sample_brownian(&g, s, 1.3).unwrap(), sample_brownian(&g, s, 1.3).unwrap());
        prop_assert_eq!(skew_brownian(0.6, 0.0, &g, s).unwrap(), skew_brownian(0.6, 0.0, &g, s).unwrap());
        prop_assert_eq!(nakao_solution(0.3, 0.1, &g, s).unwrap(), nakao_solution(0.3, 0.1, &g, s).unwrap());
    }
}

#[test]
fn f32_pipeline_runs_end_to_end() {
    let g = make_grid(1.0_f32, 1024).unwrap();
    let u = sample_brownian(&g, RngStream::new(1, 1), 1.0).unwrap();
    let r = unfold_skorokhod(&u, 0.7_f32, RngStream::new(1, 2), 0.0).unwrap();
    assert_eq!(r.unfolded.abs(), r.folded);
    let lt = upcrossing_local_time(&r.folded, UpcrossingBand::for_grid(&g)).unwrap();
    assert!(lt.terminal() >= 0.0);
}
