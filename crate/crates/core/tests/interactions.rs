mod common;

use common::{contact, contact_outcome, ctx, front, model, params, SIGN_TABLE};
use phasefront::fronttracker::{resolve_pair, FrontSpec, SolverUsed};
use phasefront::functionals::{FrontKind, InteractionClass};
use phasefront::State;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn contact_interaction_sign_table() {
    for (fam, delta, increasing, decreasing) in SIGN_TABLE {
        assert_eq!(contact_outcome(fam, delta, 0.2, 0.7), increasing, "{fam:?} {delta} λ_ℓ < λ_r");
        assert_eq!(contact_outcome(fam, delta, 0.7, 0.2), decreasing, "{fam:?} {delta} λ_ℓ > λ_r");
    }
}

#[test]
fn contact_interactions_satisfy_reflection_identity() {
    let m = model();
    let p = params(1.0);
    let c = ctx(&m, &p, 10.0, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..2000 {
        let base = State { v: rng.gen_range(0.5..2.0), u: rng.gen_range(-1.0..1.0), lam: rng.gen_range(0.0..1.0) };
        let lam_r = rng.gen_range(0.0..1.0);
        let delta = rng.gen_range(-0.5..0.5);
        let (res, wave, cd) = if rng.gen_bool(0.5) {
            let cd = contact(&m, lam_r, base);
            let w = front(&m, FrontKind::One, delta, cd.right, 3);
            (resolve_pair(&c, &cd, &w).unwrap(), w, cd)
        } else {
            let w = front(&m, FrontKind::Three, delta, base, 3);
            let cd = contact(&m, lam_r, w.right);
            (resolve_pair(&c, &w, &cd).unwrap(), w, cd)
        };
        let same: f64 = res.outgoing.iter().filter(|f| f.kind == wave.kind).map(|f| f.strength).sum();
        let other: f64 = res.outgoing.iter().filter(|f| f.kind.is_genuinely_nonlinear() && f.kind != wave.kind).map(|f| f.strength).sum();
        assert!(((same - delta).abs() - other.abs()).abs() <= 1e-9);
        assert!(other.abs() <= 0.5 * (cd.strength * delta).abs() + 1e-9);
        // transmitted wave keeps its order, reflected pieces get one more
        for f in res.outgoing.iter().filter(|f| f.kind.is_genuinely_nonlinear()) {
            assert_eq!(f.order, if f.kind == wave.kind { 3 } else { 4 });
        }
        assert!(matches!(res.class, InteractionClass::Contact { order: 3, simplified: false, .. }));
    }
}

#[test]
fn crossing_preserves_strengths_and_orders() {
    let m = model();
    let p = params(1.0);
    let c = ctx(&m, &p, 0.01, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..2000 {
        let base = State { v: rng.gen_range(0.5..2.0), u: rng.gen_range(-1.0..1.0), lam: rng.gen_range(0.0..1.0) };
        let (d3, d1) = (rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6));
        let w3 = front(&m, FrontKind::Three, d3, base, 2);
        let w1 = front(&m, FrontKind::One, d1, w3.right, 5);
        let res = resolve_pair(&c, &w3, &w1).unwrap();
        assert_eq!(res.class, InteractionClass::Crossing);
        assert_eq!(res.outgoing.len(), 2, "rarefactions are prolonged, not split");
        assert_eq!((res.outgoing[0].kind, res.outgoing[0].order), (FrontKind::One, 5));
        assert_eq!((res.outgoing[1].kind, res.outgoing[1].order), (FrontKind::Three, 2));
        assert!((res.outgoing[0].strength - d1).abs() <= 1e-9 && (res.outgoing[1].strength - d3).abs() <= 1e-9);
        assert_eq!(res.outgoing[1].right, w1.right);
    }
}

#[test]
fn same_family_reflection_is_damped() {
    let m = model();
    let p = params(1.0);
    let eta = 0.02;
    let c = ctx(&m, &p, eta, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut reflected_rarefactions = 0;
    for _ in 0..2000 {
        let base = State { v: rng.gen_range(0.5..2.0), u: rng.gen_range(-1.0..1.0), lam: rng.gen_range(0.0..1.0) };
        let (alpha, beta) = (rng.gen_range(-0.9..0.0), rng.gen_range(-0.9..0.9));
        let fam = if rng.gen_bool(0.5) { FrontKind::One } else { FrontKind::Three };
        let (o1, o2) = (rng.gen_range(1..5), rng.gen_range(1..5));
        let a = front(&m, fam, alpha, base, o1);
        let b = front(&m, fam, beta, a.right, o2);
        let res = resolve_pair(&c, &a, &b).unwrap();
        let eps_i: f64 = res.outgoing.iter().filter(|f| f.kind == fam).map(|f| f.strength).sum();
        let refl: Vec<&FrontSpec> = res.outgoing.iter().filter(|f| f.kind.is_genuinely_nonlinear() && f.kind != fam).collect();
        let eps_j: f64 = refl.iter().map(|f| f.strength).sum();
        assert!(eps_j.abs() <= p.d * alpha.abs().min(beta.abs()) + 1e-9);
        assert!(eps_i.abs() <= alpha.abs() + beta.abs() + 1e-9);
        if beta < 0.0 {
            assert!(eps_i < 0.0 && eps_i.abs() >= alpha.abs().max(beta.abs()) - 1e-9);
        }
        assert_eq!(res.outgoing.iter().filter(|f| f.kind == fam).count(), usize::from(eps_i.abs() >= 1e-14));
        for f in &res.outgoing {
            if f.kind == fam {
                assert_eq!(f.order, o1.min(o2));
            } else if f.kind != FrontKind::Two {
                assert_eq!(f.order, o1.max(o2) + 1);
                assert!(f.strength < eta);
            }
        }
        if eps_j > eta {
            reflected_rarefactions += 1;
            assert!(refl.len() >= 2, "a large reflected rarefaction is split");
        }
    }
    assert!(reflected_rarefactions > 0);
}

#[test]
fn simplified_solver_creates_pure_velocity_jump() {
    let m = model();
    let p = params(1.0);
    let c = ctx(&m, &p, 10.0, 1.0);
    let base = State { v: 1.1, u: 0.2, lam: 0.3 };
    let w = front(&m, FrontKind::Three, -0.05, base, 2);
    let cd = contact(&m, 0.6, w.right);
    let res = resolve_pair(&c, &w, &cd).unwrap();
    assert_eq!(res.solver, SolverUsed::Simplified);
    let kinds: Vec<FrontKind> = res.outgoing.iter().map(|f| f.kind).collect();
    assert_eq!(kinds, vec![FrontKind::Two, FrontKind::Three, FrontKind::NonPhysical]);
    assert_eq!(res.outgoing[1].strength, -0.05);
    let np = res.outgoing[2];
    assert_eq!(np.order, 3);
    assert_eq!(np.left.lam, np.right.lam);
    assert!((np.left.v / np.right.v).ln().abs() < 1e-12);
    assert!((np.strength - (np.right.u - np.left.u).abs()).abs() < 1e-15);
    assert!(np.strength <= p.c_o * 0.05 * cd.strength.abs());
    assert_eq!(np.right, cd.right);

    // the non-physical front then crosses a wave unchanged
    let npf = phasefront::fronttracker::Front { kind: FrontKind::NonPhysical, strength: np.strength, order: 3, left: np.left, right: np.right, speed: 0.0, x_ref: 0.0, t_ref: 0.0 };
    let next = front(&m, FrontKind::One, -0.1, npf.right, 1);
    let res2 = resolve_pair(&c, &npf, &next).unwrap();
    assert_eq!(res2.solver, SolverUsed::Transmit);
    assert_eq!(res2.outgoing[0].strength, -0.1);
    assert_eq!(res2.outgoing[1].kind, FrontKind::NonPhysical);
    assert!((res2.outgoing[1].strength - np.strength).abs() < 1e-12);
    assert_eq!(res2.outgoing[1].order, 3);
}
