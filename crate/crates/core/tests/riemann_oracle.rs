mod common;

use common::{model, oracle_strengths, reconstruct, residuals};
use phasefront::riemann::{shock_speed, split_rarefaction, strength_bound, WaveSpeed};
use phasefront::{Family, RiemannSolver, State};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_state(rng: &mut ChaCha8Rng) -> State {
    State { v: rng.gen_range(0.2..5.0), u: rng.gen_range(-3.0..3.0), lam: rng.gen_range(0.0..=1.0) }
}

#[test]
fn agrees_with_bisection_oracle_on_random_pairs() {
    let m = model();
    let solver = RiemannSolver::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..2000 {
        let (l, r) = (random_state(&mut rng), random_state(&mut rng));
        let fan = solver.solve(&m, &l, &r).unwrap();
        let (e1, e2, e3) = oracle_strengths(&l, &r);
        let s = fan.strengths;
        assert!((s.eps1 - e1).abs() < 1e-9 && (s.eps2 - e2).abs() < 1e-12 && (s.eps3 - e3).abs() < 1e-9, "{l:?} {r:?} {s:?} vs {e1} {e3}");
        let [m1, m2, rr] = reconstruct(l, r.lam, s.eps1, s.eps2, s.eps3);
        assert!(rr.max_abs_diff(&r) <= 1e-10, "{rr:?} vs {r:?}");
        assert!(m1.max_abs_diff(&fan.mid1) <= 1e-10 && m2.max_abs_diff(&fan.mid2) <= 1e-10);
        let res = residuals(&l, &r, s.eps1, s.eps3);
        assert!(res[0].abs() <= 1e-12 && res[1].abs() <= 1e-12, "{res:?}");
    }
}

#[test]
fn a_priori_strength_bound_holds() {
    let m = model();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..10_000 {
        let (l, r) = (random_state(&mut rng), random_state(&mut rng));
        let s = RiemannSolver::default().solve(&m, &l, &r).unwrap().strengths;
        assert!(s.eps1.abs() + s.eps3.abs() <= strength_bound(&m, &l, &r) * (1.0 + 1e-12) + 1e-12);
    }
}

#[test]
fn shocks_satisfy_lax_inequalities() {
    let m = model();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..5000 {
        let (l, r) = (random_state(&mut rng), random_state(&mut rng));
        let fan = RiemannSolver::default().solve(&m, &l, &r).unwrap();
        let sides = [(Family::One, fan.left, fan.mid1, 0), (Family::Three, fan.mid2, fan.right, 2)];
        for (fam, a, b, i) in sides {
            if let WaveSpeed::Shock(s) = fan.speeds[i] {
                assert!((s - shock_speed(&m, fam, &a, &b)).abs() < 1e-14);
                let (ca, cb) = (m.characteristic_speed(fam, &a), m.characteristic_speed(fam, &b));
                assert!(ca > s && s > cb, "{fam:?}: {ca} > {s} > {cb}");
                // Rankine–Hugoniot in Lagrangian form
                let (pa, pb) = (m.pressure_of(&a), m.pressure_of(&b));
                assert!((s * (b.v - a.v) + (b.u - a.u)).abs() < 1e-9);
                assert!((s * (b.u - a.u) - (pb - pa)).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn partial_fan_has_no_three_wave() {
    let m = model();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..1000 {
        let (l, r) = (random_state(&mut rng), random_state(&mut rng));
        let full = RiemannSolver::default().solve(&m, &l, &r).unwrap();
        let part = RiemannSolver::default().solve(&m, &l, &full.mid2).unwrap();
        assert!((part.strengths.eps1 - full.strengths.eps1).abs() < 1e-10);
        assert!((part.strengths.eps2 - full.strengths.eps2).abs() < 1e-12);
        assert!(part.strengths.eps3.abs() < 1e-10);
    }
}

#[test]
fn rarefaction_split_reference() {
    let parts = split_rarefaction(0.25, 0.1);
    assert_eq!(parts.len(), 3);
    for p in &parts {
        assert!((p - 0.25 / 3.0).abs() < 1e-15 && *p < 0.1);
    }
    assert_eq!(split_rarefaction(0.05, 0.1), vec![0.05]);
}
