use nalgebra::DMatrix;
use okvalid_core::embeddings::table_constants;
use okvalid_core::lipschitz::{lipschitz_bounds, poly_range_max, ContinuationChoice};
use okvalid_core::newton::{newton_solve, seed_series, SolveOptions};
use okvalid_core::operator::{build_galerkin, ModelParams, Param};
use okvalid_core::polynomial::Polynomial;
use okvalid_core::spectral::{CosineSeries, MultiIndex, NormTag};
use okvalid_core::Interval64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

const PI: f64 = std::f64::consts::PI;

fn solution() -> (ModelParams<f64>, CosineSeries<f64>) {
    let p = ModelParams::new(150.0, 6.0, 0.0).unwrap();
    let u0 = seed_series(1, &[(MultiIndex::new(&[1]).unwrap(), 0.2)]).unwrap();
    let u = newton_solve(&p, &u0, &SolveOptions::new(48)).unwrap().u;
    (p, u)
}

fn spectral_norm(rows: usize, m: Vec<f64>) -> f64 {
    DMatrix::from_row_slice(rows, rows, &m).singular_values().max()
}

#[test]
fn galerkin_difference_bounded() {
    let (p0, u0) = solution();
    let consts = table_constants::<f64>(1).unwrap();
    let n = 12;
    let b0 = build_galerkin(&p0, &u0, n).unwrap().entries.mid();
    let size = n - 1;
    let mut rng = rand::rngs::StdRng::seed_from_u64(5);
    for which in Param::ALL {
        let dp = 0.05 * p0.get(which).abs().max(1.0);
        let du = 0.05;
        let c = ContinuationChoice::new(which, dp, du).unwrap();
        let lb = lipschitz_bounds(&p0, &u0, &c, &consts).unwrap();
        for _ in 0..100 {
            // Random direction with ‖v‖_{H̄²} = 1, scaled into the box.
            let mut v = CosineSeries::<f64>::zeros_cube(1, n + 4).unwrap();
            for k in 1..n + 4 {
                v.set(&MultiIndex::new(&[k]).unwrap(), rng.gen_range(-1.0..1.0));
            }
            let vn = v.to_interval().norm(NormTag::HbarL(2)).unwrap().mid();
            let r = rng.gen_range(0.0..du);
            let u = u0.resized(&[n + 4]).unwrap().add(&v.scale(r / vn)).unwrap();
            let t = rng.gen_range(-dp..dp);
            let p = p0.with(which, p0.get(which) + t).unwrap();
            let b = build_galerkin(&p, &u, n).unwrap().entries.mid();
            let diff: Vec<f64> = b.iter().zip(&b0).map(|(a, b)| a - b).collect();
            let lhs = spectral_norm(size, diff);
            let rhs = lb.l1 * r + lb.l2 * t.abs() + 1e-8;
            assert!(lhs <= rhs, "{which:?}: {lhs} > {rhs}");
        }
    }
}

/// Independent transcription of the three constant families.
#[test]
fn hand_transcription() {
    let (p, u) = solution();
    let consts = table_constants::<f64>(1).unwrap();
    let cmb = 0.149072;
    let sup = u.to_interval().norm(NormTag::SupBound).unwrap().mid();
    let (dp, du) = (0.5, 0.02);
    let r = sup + cmb * du;
    let tol = |a: f64, b: f64| (a - b).abs() <= 1e-6 * (1.0 + b.abs());

    let lam = lipschitz_bounds(&p, &u, &ContinuationChoice::new(Param::Lambda, dp, du).unwrap(), &consts).unwrap();
    let f2 = 6.0 * r;
    let f1 = (1.0f64).max(3.0 * r * r - 1.0);
    let qsup = fprime_sup(&u);
    assert!(tol(lam.l1, cmb * f2 * (150.0 + dp) / (PI * PI)));
    assert!(tol(lam.l2, qsup / (PI * PI) + 6.0 / PI.powi(4)));
    assert!(tol(lam.l3, f1 / (PI * PI) + 6.0 / PI.powi(4)));
    assert_eq!(lam.l4, 0.0);

    let sig = lipschitz_bounds(&p, &u, &ContinuationChoice::new(Param::Sigma, dp, du).unwrap(), &consts).unwrap();
    assert!(tol(sig.l1, 150.0 * f2 * cmb / (PI * PI)));
    assert!(tol(sig.l2, 150.0 / PI.powi(4)));
    assert!(tol(sig.l3, 150.0 / PI.powi(4)));

    let dmu = 0.01;
    let mu = lipschitz_bounds(&p, &u, &ContinuationChoice::new(Param::Mu, dmu, du).unwrap(), &consts).unwrap();
    let f2mu = 6.0 * (sup + cmb * du + dmu);
    assert!(tol(mu.l1, 150.0 * f2mu * cmb / (PI * PI)));
    assert!(tol(mu.l2, 150.0 * f2mu / (PI * PI)));
    assert!(tol(mu.l3, mu.l2));
    assert!(tol(mu.l4, 150.0 * f2mu));
}

/// `Σ |coefficients| c_k` of `1 - 3u²`.
fn fprime_sup(u: &CosineSeries<f64>) -> f64 {
    let u = u.to_interval();
    let three = Interval64::from_usize(3);
    u.multiply(&u)
        .unwrap()
        .scale(-three)
        .add_constant(Interval64::one())
        .norm(NormTag::SupBound)
        .unwrap()
        .mid()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn monotone_in_box(dp in 1e-4f64..1.0, du in 1e-4f64..0.5, gp in 1.0f64..3.0, gu in 1.0f64..3.0, w in 0usize..3) {
        let p = ModelParams::new(40.0, 3.0, 0.1).unwrap();
        let u = seed_series(1, &[(MultiIndex::new(&[1]).unwrap(), 0.3), (MultiIndex::new(&[2]).unwrap(), -0.1)])
            .unwrap();
        let consts = table_constants::<f64>(1).unwrap();
        let which = Param::ALL[w];
        let a = lipschitz_bounds(&p, &u, &ContinuationChoice::new(which, dp, du).unwrap(), &consts).unwrap();
        let b = lipschitz_bounds(&p, &u, &ContinuationChoice::new(which, dp * gp, du * gu).unwrap(), &consts).unwrap();
        // Subdivision stops at a relative tolerance, so allow that much slack.
        let ok = |x: f64, y: f64| x <= y * (1.0 + 2e-3);
        prop_assert!(ok(a.l1, b.l1) && ok(a.l2, b.l2) && ok(a.l3, b.l3) && ok(a.l4, b.l4));
        for v in [b.l1, b.l2, b.l3, b.l4] {
            prop_assert!(v >= 0.0);
        }
    }

    #[test]
    fn range_bound_dominates_samples(c in prop::collection::vec(-3.0f64..3.0, 1..6), r in 0.0f64..3.0, t in -1.0f64..1.0) {
        let g = Polynomial::new(c).unwrap();
        prop_assert!(g.eval(t * r).abs() <= poly_range_max(&g, r) * (1.0 + 1e-12) + 1e-300);
    }
}
