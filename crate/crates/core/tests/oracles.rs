//! Cross-checks against independent reference computations.

#![allow(clippy::needless_range_loop)]

use msqi::error_analysis::GaussLegendre;
use msqi::local_fit::{interpolating_model, least_squares_model};
use msqi::shepard::f_mu_bound;
use msqi::{GapSpec, Params, QuasiInterpolant, SampledSignal, ShepardBasis, TestFunction};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rat(v: f64) -> BigRational {
    BigRational::from_float(v).unwrap()
}

/// Shepard weights straight from the defining quotient, in exact arithmetic.
fn exact_weights(sets: &[Vec<f64>], x: f64, mu: u32) -> Vec<f64> {
    let xr = rat(x);
    let inv: Vec<BigRational> = sets
        .iter()
        .map(|s| {
            let p = s
                .iter()
                .fold(BigRational::one(), |acc, &c| acc * (&xr - rat(c)).abs());
            p.pow(mu as i32).recip()
        })
        .collect();
    let total = inv.iter().fold(BigRational::zero(), |a, v| a + v);
    inv.iter().map(|v| (v / &total).to_f64().unwrap()).collect()
}

#[test]
fn shepard_matches_exact_quotient() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 2000 {
        let m = rng.random_range(1..=4);
        let k = rng.random_range(1..=6);
        let mu = 2 * rng.random_range(1..=3);
        let sets: Vec<Vec<f64>> = (0..m)
            .map(|j| {
                let a = -1.0 + 0.5 * j as f64;
                let mut s: Vec<f64> = (0..k).map(|_| rng.random_range(a..a + 0.6)).collect();
                s.sort_by(|p, q| p.partial_cmp(q).unwrap());
                s.dedup();
                s
            })
            .collect();
        let x: f64 = rng.random_range(-1.2..1.4);
        if sets.iter().flatten().any(|&p| (p - x).abs() < 1e-3) {
            continue;
        }
        let basis = ShepardBasis::new(sets.clone(), mu).unwrap();
        let got = basis.eval(x).weights;
        let want = exact_weights(&sets, x, mu);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() <= 1e-10 * w + 1e-300, "x = {x}: {g} vs {w}");
        }
        checked += 1;
    }
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

/// Leakage bound evaluated exactly for rational `gap / h`.
fn exact_f_mu(gap: f64, h: f64, k: usize, big_k: usize, mu: u32) -> f64 {
    let num = BigRational::from_integer(factorial(k) * factorial(big_k - k));
    let prod = (1..=big_k).fold(BigInt::one(), |a, j| a * BigInt::from(big_k - k + j));
    let ratio = rat(gap) / rat(h);
    let spread = BigRational::from_integer(BigInt::from(big_k + 1).pow(big_k as u32)) * ratio.pow(big_k as i32);
    let base = num / (BigRational::from_integer(prod) + spread);
    base.pow(mu as i32).to_f64().unwrap()
}

#[test]
fn f_mu_matches_rational_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..400 {
        let big_k = rng.random_range(2..=12);
        let k = rng.random_range(1..big_k);
        let mu = 2 * rng.random_range(1..=4);
        let h: f64 = rng.random_range(0.01..1.0);
        let gap = if rng.random_bool(0.2) { 0.0 } else { rng.random_range(0.0..2.0) * h };
        let got: f64 = f_mu_bound(gap, h, k, big_k, mu).unwrap();
        let want = exact_f_mu(gap, h, k, big_k, mu);
        assert!((got - want).abs() <= 1e-12 * want, "K={big_k} k={k} mu={mu} gap/h={}", gap / h);
    }
}

/// Lagrange form evaluated in exact arithmetic.
fn exact_lagrange(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let xr = rat(x);
    let mut acc = BigRational::zero();
    for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
        let mut l = BigRational::one();
        for (j, &xj) in xs.iter().enumerate() {
            if i != j {
                l = l * (&xr - rat(xj)) / (rat(xi) - rat(xj));
            }
        }
        acc += l * rat(yi);
    }
    acc.to_f64().unwrap()
}

#[test]
fn local_interpolant_matches_lagrange() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in [1usize, 3, 5, 8] {
        let mut xs: Vec<f64> = (0..=n).map(|i| i as f64 + rng.random_range(-0.3..0.3)).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let ys: Vec<f64> = (0..=n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let signal = SampledSignal::new(xs.clone(), ys.clone()).unwrap();
        let cover = msqi::CoverInterval {
            a: xs[0],
            b: xs[n],
            first_node: 0,
            last_node: n,
            blend_points: vec![],
            parent: 0,
        };
        let model = interpolating_model(&cover, &signal);
        for i in 0..=50 {
            let x = xs[0] + (xs[n] - xs[0]) * i as f64 / 50.0;
            let want = exact_lagrange(&xs, &ys, x);
            assert!((model.eval(x) - want).abs() <= 1e-11 * (1.0 + want.abs()), "n = {n}, x = {x}");
        }
    }
}

#[test]
fn least_squares_matches_normal_equations() {
    // exact normal equations in rational arithmetic for a cubic fit on 9 points
    let xs: Vec<f64> = (0..9).map(|i| -1.0 + 0.25 * i as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| (3.0 * x).sin() + 0.1 * x * x).collect();
    let signal = SampledSignal::new(xs.clone(), ys.clone()).unwrap();
    let cover = msqi::CoverInterval {
        a: -1.0,
        b: 1.0,
        first_node: 0,
        last_node: 8,
        blend_points: vec![],
        parent: 0,
    };
    let model = least_squares_model(&cover, &signal, 3).unwrap();

    let deg = 4;
    let mut a = vec![vec![BigRational::zero(); deg + 1]; deg];
    for (&x, &y) in xs.iter().zip(&ys) {
        let pw: Vec<BigRational> = (0..deg).map(|p| rat(x).pow(p as i32)).collect();
        for r in 0..deg {
            for c in 0..deg {
                a[r][c] += &pw[r] * &pw[c];
            }
            a[r][deg] += &pw[r] * rat(y);
        }
    }
    for col in 0..deg {
        let piv = (col..deg).find(|&r| !a[r][col].is_zero()).unwrap();
        a.swap(col, piv);
        for r in 0..deg {
            if r != col {
                let factor = &a[r][col] / &a[col][col];
                for c in col..=deg {
                    let v = &factor * &a[col][c];
                    a[r][c] -= v;
                }
            }
        }
    }
    let coef: Vec<BigRational> = (0..deg).map(|r| &a[r][deg] / &a[r][r]).collect();
    for i in 0..=40 {
        let x = -1.0 + i as f64 / 20.0;
        let want = coef
            .iter()
            .enumerate()
            .fold(BigRational::zero(), |s, (p, c)| s + c * rat(x).pow(p as i32))
            .to_f64()
            .unwrap();
        assert!((model.eval(x) - want).abs() < 1e-12, "x = {x}");
    }
}

#[test]
fn gauss_rule_exact_on_monomials() {
    for order in [1usize, 2, 5, 12, 20] {
        let g = GaussLegendre::<f64>::new(order).unwrap();
        for p in 0..2 * order {
            let v = g.integrate(|x| x.powi(p as i32), -1.0, 1.0);
            let want = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
            assert!((v - want).abs() < 1e-13, "order {order}, degree {p}");
        }
    }
    let g = GaussLegendre::<f64>::new(20).unwrap();
    assert!((g.integrate(|x| x.powi(38), -1.0, 1.0) - 2.0 / 39.0).abs() < 1e-13);
}

/// Second transcription of the benchmark functions.
fn reference(id: TestFunction, x: f64) -> f64 {
    use std::f64::consts::PI;
    match id {
        TestFunction::F1 if x > 0.0 => 0.5 * ((17.0 * PI / 8.0) * x).sin() + 10.0,
        TestFunction::F1 => ((17.0 * PI / 8.0) * x).sin(),
        TestFunction::F2 if x > 0.0 => x.powi(6) - x.powi(4) + x * x - 2.0,
        TestFunction::F2 => 0.5 * x.powi(5) - x * x,
        TestFunction::F3 if x > 0.0 => 1.0 + ((x + 1.0) * (x + 1.0) / 4.0).exp(),
        TestFunction::F3 => ((x + 1.0) / 2.0).exp(),
        TestFunction::F4 if x <= -0.5 || x >= 0.5 => 5.0 / ((x / 4.0) * (x / 4.0) + 1.0),
        TestFunction::F4 if x < 0.0 => 1.5,
        TestFunction::F4 => 0.25,
        TestFunction::F5 => 1.0 / (1.0 + 25.0 * x * x),
        TestFunction::F6 => ((20.0 * PI) * x).cos(),
    }
}

#[test]
fn test_functions_match_second_transcription() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for id in TestFunction::ALL {
        for _ in 0..1000 {
            let x: f64 = rng.random_range(-1.0..=1.0);
            let got = id.eval(x).unwrap();
            let want = reference(id, x);
            assert!((got - want).abs() <= 1e-15 * want.abs(), "{id} at {x}");
        }
        for x in [-1.0, -0.5, 0.0, 0.5, 1.0] {
            assert_eq!(id.eval(x).unwrap(), reference(id, x), "{id} at {x}");
        }
    }
}

#[test]
fn f4_outer_symmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..1000 {
        let x: f64 = rng.random_range(0.5..=1.0);
        assert_eq!(TestFunction::F4.value(x), TestFunction::F4.value(-x));
    }
}

#[test]
fn derivative_sups_dominate_finite_differences() {
    // sup of the k-th difference quotient never exceeds the tabulated bound
    for id in [TestFunction::F2, TestFunction::F3, TestFunction::F5] {
        for k in 1..=4usize {
            let h = 1e-3;
            let bound = id.derivative_sup(k);
            let mut worst = 0.0f64;
            let mut x = -1.0;
            while x + k as f64 * h <= 1.0 {
                let crosses = id.jumps().iter().any(|j| x <= j.at && j.at <= x + k as f64 * h);
                if !crosses {
                    let diff: f64 = (0..=k)
                        .map(|i| {
                            let binom = (0..i).fold(1.0, |b, j| b * (k - j) as f64 / (j + 1) as f64);
                            let sign = if (k - i) % 2 == 0 { 1.0 } else { -1.0 };
                            sign * binom * id.value(x + i as f64 * h)
                        })
                        .sum();
                    worst = worst.max((diff / h.powi(k as i32)).abs());
                }
                x += 0.01;
            }
            assert!(worst <= bound * (1.0 + 1e-2) + 1e-6, "{id} order {k}: {worst} > {bound}");
        }
    }
}

#[test]
fn global_interpolant_when_single_window() {
    let xs: Vec<f64> = vec![-1.0, -0.3, 0.2, 0.9, 1.0];
    let ys: Vec<f64> = vec![1.0, -2.0, 0.5, 3.0, 2.5];
    let s = SampledSignal::new(xs.clone(), ys.clone()).unwrap();
    let q = QuasiInterpolant::build(
        &s,
        &GapSpec::none(),
        &Params {
            d: 3,
            ..Params::default()
        },
    )
    .unwrap();
    assert_eq!(q.covering().len(), 1);
    for i in 0..=20 {
        let x = -1.0 + i as f64 / 10.0;
        let want = exact_lagrange(&xs, &ys, x);
        assert!((q.eval(x) - want).abs() < 1e-12 * (1.0 + want.abs()));
    }
}
