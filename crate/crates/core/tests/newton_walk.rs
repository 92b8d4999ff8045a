use okvalid_core::newton::{float_residual, newton_solve, parameter_walk, seed_series, SolveOptions};
use okvalid_core::operator::{residual, ModelParams, Param};
use okvalid_core::spectral::MultiIndex;

#[test]
fn lambda_walk_keeps_small_residuals() {
    let p = ModelParams::<f64>::new(140.0, 6.0, 0.0).unwrap();
    let u0 = seed_series(1, &[(MultiIndex::new(&[1]).unwrap(), 0.2)]).unwrap();
    let walk = parameter_walk(&p, &u0, Param::Lambda, 4.0, 5, &SolveOptions::new(64)).unwrap();
    assert_eq!(walk.len(), 6);
    assert!((walk.last().unwrap().0.lambda - 160.0).abs() < 1e-12);
    for (p, r) in &walk {
        assert_eq!(r.u.mean(), 0.0);
        let rho = residual(p, &r.u).unwrap();
        assert!(rho.hi() <= 1e-6, "λ = {}: {rho}", p.lambda);
        let fl = float_residual(p, &r.u).unwrap();
        assert!(rho.hi() <= 100.0 * fl.max(1e-15) && fl <= 100.0 * rho.hi().max(1e-15));
    }
}

#[test]
fn solve_is_deterministic() {
    let p = ModelParams::<f64>::new(75.0, 6.0, 0.0).unwrap();
    let modes = [
        (MultiIndex::new(&[1, 0]).unwrap(), 0.2),
        (MultiIndex::new(&[0, 1]).unwrap(), 0.2),
    ];
    let u0 = seed_series(2, &modes).unwrap();
    let a = newton_solve(&p, &u0, &SolveOptions::new(12)).unwrap();
    let b = newton_solve(&p, &u0, &SolveOptions::new(12)).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.u.mean(), 0.0);
}
