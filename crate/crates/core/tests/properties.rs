use msqi::covering::{attach_blend_points, build_covering_general};
use msqi::error_analysis::{e_max, EvaluationGrid};
use msqi::grid::{continuity_intervals, equispaced_nodes, mesh_report};
use msqi::{GapSpec, NoiseSpec, Params, QuasiInterpolant, SampledSignal, ShepardBasis, TestFunction};
use proptest::prelude::*;

/// Sorted gap indices respecting `0 < a`, `a < n - 1` and `a_l + 1 < a_{l+1}`.
fn gap_strategy(n: usize, max_gaps: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::btree_set(1..n - 1, 0..=max_gaps).prop_filter_map("adjacent gaps", |set| {
        let v: Vec<usize> = set.into_iter().collect();
        v.windows(2).all(|w| w[0] + 1 < w[1]).then_some(v)
    })
}

fn perturbed_nodes(n: usize, jitter: &[f64]) -> Vec<f64> {
    let mut x = equispaced_nodes(-1.0, 1.0, n);
    let h = 2.0 / n as f64;
    for i in 1..n {
        x[i] += 0.4 * h * jitter[i % jitter.len()];
    }
    x
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn shepard_partition_of_unity(
        centers in prop::collection::vec(-1.0f64..1.0, 1..6),
        k in 1usize..8,
        mu in 1u32..4,
        xs in prop::collection::vec(-1.5f64..1.5, 50),
    ) {
        let sets: Vec<Vec<f64>> = centers
            .iter()
            .map(|&c| (0..k).map(|j| c + 0.01 * (j as f64 + 1.0)).collect())
            .collect();
        let basis = ShepardBasis::new(sets, 2 * mu).unwrap();
        for x in xs {
            let w = basis.eval(x);
            prop_assert!(w.weights.iter().all(|&v| (0.0..=1.0).contains(&v)));
            prop_assert!((w.sum() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn vanishing_and_kronecker(offsets in prop::collection::vec(0.05f64..0.5, 2..5), k in 2usize..7) {
        let mut start = -1.0;
        let sets: Vec<Vec<f64>> = offsets
            .iter()
            .map(|&o| {
                let s: Vec<f64> = (1..=k).map(|j| start + o * j as f64 / (k + 1) as f64).collect();
                start += o;
                s
            })
            .collect();
        let basis = ShepardBasis::new(sets.clone(), 4).unwrap();
        for (i, set) in sets.iter().enumerate() {
            for &p in set {
                let w = basis.eval(p).weights;
                for (j, &v) in w.iter().enumerate() {
                    prop_assert_eq!(v, if i == j { 1.0 } else { 0.0 });
                }
            }
        }
    }

    #[test]
    fn mesh_quantities_are_consistent(
        n in 16usize..120,
        jitter in prop::collection::vec(-1.0f64..1.0, 7),
        gaps in gap_strategy(16, 3),
    ) {
        let x = perturbed_nodes(n, &jitter);
        let s = SampledSignal::new(x.clone(), vec![0.0; n + 1]).unwrap();
        let gaps = GapSpec::new(gaps);
        let ci = continuity_intervals(&s, &gaps).unwrap();
        prop_assert_eq!(ci.intervals.len(), gaps.len() + 1);
        let r = mesh_report(&s, &gaps, 0).unwrap();
        prop_assert!(r.h_min_xn <= r.h_max_xn);
        prop_assert!(r.h_min_d <= r.h_max_d);
        if let Some(dm) = r.d_max {
            let at = mesh_report(&s, &gaps, dm).unwrap();
            prop_assert!(at.condition_holds);
            if let Ok(next) = mesh_report(&s, &gaps, dm + 1) {
                prop_assert!(!next.condition_holds);
            }
        }
    }

    #[test]
    fn general_covering_invariants(
        n in 24usize..150,
        d in 0usize..4,
        jitter in prop::collection::vec(-1.0f64..1.0, 5),
        gaps in gap_strategy(24, 2),
    ) {
        let x = perturbed_nodes(n, &jitter);
        let s = SampledSignal::new(x.clone(), vec![0.0; n + 1]).unwrap();
        let gaps = GapSpec::new(gaps);
        let Ok(c) = build_covering_general(&s, &gaps, d) else { return Ok(()); };
        let ci = continuity_intervals(&s, &gaps).unwrap();
        let tol = 1e-12;
        for (l, piece) in ci.intervals.iter().enumerate() {
            let us = c.slice(l);
            prop_assert!((us[0].a - piece.a).abs() <= tol);
            prop_assert!((us.last().unwrap().b - piece.b).abs() <= tol);
            for w in us.windows(2) {
                // consecutive windows leave no hole
                prop_assert!(w[1].a <= w[0].b + tol);
                prop_assert!(w[1].a > w[0].a);
            }
            for u in us {
                prop_assert!((u.width() - c.width).abs() <= tol);
                prop_assert!(u.node_count() > d);
                prop_assert!(u.a >= piece.a - tol && u.b <= piece.b + tol);
                prop_assert!(!gaps.crosses(u.first_node, u.last_node));
            }
        }
        let c = attach_blend_points(c, 10, true).unwrap();
        for u in &c.intervals {
            prop_assert_eq!(u.blend_points.len(), 10);
            prop_assert!(u.blend_points.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(u.blend_points.iter().all(|&p| u.a < p && p < u.b));
        }
    }

    #[test]
    fn polynomial_reproduction(
        coeffs in prop::collection::vec(-3.0f64..3.0, 4),
        d in 0usize..4,
        gap in 40usize..200,
        jitter in prop::collection::vec(-1.0f64..1.0, 5),
        uniform in any::<bool>(),
    ) {
        let n = 256;
        let x = if uniform { equispaced_nodes(-1.0, 1.0, n) } else { perturbed_nodes(n, &jitter) };
        let q = |t: f64| coeffs[..=d].iter().rev().fold(0.0, |acc, &c| acc * t + c);
        let y = x.iter().map(|&t| q(t)).collect();
        let s = SampledSignal::new(x, y).unwrap();
        let Ok(qi) = QuasiInterpolant::build(&s, &GapSpec::new(vec![gap]), &Params { d, ..Params::default() }) else {
            return Ok(());
        };
        let scale = 1.0 + coeffs.iter().map(|c| c.abs()).sum::<f64>();
        for i in 0..=2000 {
            let t = -1.0 + i as f64 / 1000.0;
            prop_assert!((qi.eval(t) - q(t)).abs() <= 1e-10 * scale, "t = {}", t);
        }
    }

    #[test]
    fn convex_hull_envelope(seed in 0u64..1000, d in 1usize..5) {
        let (s, g) = TestFunction::F1.sample::<f64>(256, Some(NoiseSpec { amplitude: 0.3, seed })).unwrap();
        let q = QuasiInterpolant::build(&s, &g, &Params { d, ..Params::default() }).unwrap();
        for i in 0..=1000 {
            let x = -1.0 + i as f64 / 500.0;
            let e = q.envelope(x);
            prop_assert!(e.value >= e.lo - 1e-12 && e.value <= e.hi + 1e-12);
        }
    }

    #[test]
    fn seeded_noise_reproducible(seed in any::<u64>()) {
        let spec = Some(NoiseSpec { amplitude: 0.5, seed });
        let (a, _) = TestFunction::F3.sample::<f64>(128, spec).unwrap();
        let (b, _) = TestFunction::F3.sample::<f64>(128, spec).unwrap();
        let (c, _) = TestFunction::F3.sample::<f64>(128, Some(NoiseSpec { amplitude: 0.5, seed: seed ^ 1 })).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_ne!(&a, &c);
    }

    #[test]
    fn sampled_gaps_are_valid(n in 8usize..3000) {
        for id in TestFunction::ALL {
            if let Ok((s, g)) = id.sample::<f64>(n, None) {
                prop_assert!(g.validate(s.n()).is_ok());
                for j in id.jumps() {
                    // the jump lies in the closure of its gap interval, never at a node
                    // carrying a value from the wrong side
                    let a = g.indices().iter().find(|&&a| s.nodes()[a] <= j.at && j.at <= s.nodes()[a + 1]);
                    prop_assert!(a.is_some());
                }
            } else {
                prop_assert!(n < 8);
            }
        }
    }
}

#[test]
fn nested_grids_monotone() {
    let (s, g) = TestFunction::F2.sample::<f64>(512, None).unwrap();
    let q = QuasiInterpolant::build(&s, &g, &Params::default()).unwrap();
    let mut last = 0.0;
    for n_e in [250, 500, 1000, 2000, 4000] {
        let e = e_max(&q, |x| TestFunction::F2.value(x), &EvaluationGrid::new(-1.0, 1.0, n_e).unwrap());
        assert!(e.value >= last);
        last = e.value;
    }
}

#[test]
fn locality_of_samples() {
    let (s, g) = TestFunction::F3.sample::<f64>(512, None).unwrap();
    let q = QuasiInterpolant::build(&s, &g, &Params::default()).unwrap();
    let j = 100;
    let mut y = s.values().to_vec();
    y[j] += 1.0;
    let s2 = SampledSignal::new(s.nodes().to_vec(), y).unwrap();
    let q2 = QuasiInterpolant::build(&s2, &g, &Params::default()).unwrap();
    let affected: Vec<usize> = (0..q.covering().len())
        .filter(|&i| q.covering().intervals[i].node_indices().contains(&j))
        .collect();
    let xj = s.nodes()[j];
    let mut far = 0;
    for i in 0..=4000 {
        let x = -1.0 + i as f64 / 2000.0;
        let w = q.weights(x).weights;
        if affected.iter().all(|&i| w[i] == 0.0) {
            assert_eq!(q.eval(x), q2.eval(x), "x = {x}");
        }
        if (x - xj).abs() > 0.25 {
            assert!((q.eval(x) - q2.eval(x)).abs() < 1e-12, "x = {x}");
            far += 1;
        }
    }
    assert!(far > 2000);
}

#[test]
fn finite_differences_stay_bounded() {
    // fourth differences of Q track those of f away from the jump
    let f = TestFunction::F3;
    let (s, g) = f.sample::<f64>(1024, None).unwrap();
    let q = QuasiInterpolant::build(&s, &g, &Params::default()).unwrap();
    let h = 1e-2;
    let d4 = |v: &dyn Fn(f64) -> f64, x: f64| {
        (v(x - 2.0 * h) - 4.0 * v(x - h) + 6.0 * v(x) - 4.0 * v(x + h) + v(x + 2.0 * h)) / h.powi(4)
    };
    for (lo, hi) in [(-0.95, -0.05), (0.05, 0.95)] {
        let mut x = lo;
        while x <= hi {
            let dq = d4(&|t| q.eval(t), x);
            let df = d4(&|t| f.value(t), x);
            assert!((dq - df).abs() < 1.0, "x = {x}: {dq} vs {df}");
            x += 0.0137;
        }
    }
}
