use proptest::prelude::*;

use pampa::boundary::{BcKind, BoundarySpec, FarField};
use pampa::limiting::{final_blend, oe_theta};
use pampa::meshgen::{rectangle, refine};
use pampa::models::{llf_flux, max_blend_to_domain, positive_indicator, sign_matrix, steger_warming_split};
use pampa::*;

fn euler_state() -> impl Strategy<Value = State<4>> {
    (0.1..3.0f64, -3.0..3.0f64, -3.0..3.0f64, 0.1..3.0f64).prop_map(|(r, u, v, p)| Euler::default().conserved(r, u, v, p))
}

fn normal() -> impl Strategy<Value = Point> {
    (0.0..std::f64::consts::TAU).prop_map(|a| [a.cos(), a.sin()])
}

fn small_mesh(seed: u64) -> Mesh {
    rectangle([0.0, 1.0], [0.0, 1.0], 0.2, 0.25, seed).unwrap()
}

/// One forward-Euler stage, shrinking the step if the low-order cap asks.
fn stage<Mo: Model<M>, const M: usize>(s: &Solver<Mo, M>, u: &Solution<M>) -> Solution<M> {
    let dt = s.compute_dt(u).unwrap();
    match s.forward_euler_step(u, 0.0, dt) {
        Ok((v, _)) => v,
        Err(Error::StepTooLarge { cap, .. }) => s.forward_euler_step(u, 0.0, 0.9 * cap).unwrap().0,
        Err(e) => panic!("{e}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn llf_is_antisymmetric(a in euler_state(), b in euler_state(), n in normal()) {
        let e = Euler::default();
        let f = llf_flux(&e, &a, &b, [0.0, 0.0], n);
        let g = llf_flux(&e, &b, &a, [0.0, 0.0], [-n[0], -n[1]]);
        prop_assert!((f + g).amax() <= 1e-12 * (1.0 + f.amax()));
    }

    #[test]
    fn llf_is_consistent(a in euler_state(), n in normal()) {
        let e = Euler::default();
        let f = llf_flux(&e, &a, &a, [0.0, 0.0], n);
        prop_assert!((f - e.flux_n(&a, [0.0, 0.0], n)).amax() <= 1e-12 * (1.0 + f.amax()));
    }

    #[test]
    fn steger_warming_splits_the_flux(a in euler_state(), n in normal()) {
        let e = Euler::default();
        let (p, m) = steger_warming_split(&e, &a, [0.0, 0.0], n);
        let f = e.flux_n(&a, [0.0, 0.0], n);
        prop_assert!((p + m - f).amax() <= 1e-10 * (1.0 + f.amax()));
    }

    #[test]
    fn sign_matrix_is_an_involution(a in euler_state(), n in normal()) {
        let e = Euler::default();
        let s = sign_matrix(&e, &a, [0.0, 0.0], n).unwrap();
        let h = positive_indicator(&e, &a, [0.0, 0.0], n);
        prop_assert!((s * s - Mat::<4>::identity()).abs().max() <= 1e-8 * (1.0 + s.abs().max()));
        prop_assert!((h * h - h).abs().max() <= 1e-8 * (1.0 + h.abs().max()));
    }

    #[test]
    fn euler_blend_lands_in_domain(a in euler_state(), t in prop::array::uniform4(-5.0..5.0f64)) {
        let e = Euler::default();
        let d = EulerDomain::default();
        let target = State::<4>::from(t);
        let eta = max_blend_to_domain(&e, &a, &target, &d);
        prop_assert!((0.0..=1.0).contains(&eta));
        prop_assert!(e.in_domain(&(a + (target - a) * eta), &d));
        if e.in_domain(&target, &d) {
            prop_assert_eq!(eta, 1.0);
        }
    }

    #[test]
    fn scalar_blend_lands_in_domain(lo in -3.0..0.0f64, w in 0.1..4.0f64, b in 0.0..1.0f64, t in -10.0..10.0f64) {
        let m = ScalarModel::Kpp;
        let d = ScalarDomain { min: lo, max: lo + w };
        let base = State::<1>::new(lo + b * w);
        let target = State::<1>::new(t);
        let eta = max_blend_to_domain(&m, &base, &target, &d);
        prop_assert!((0.0..=1.0).contains(&eta));
        prop_assert!(m.in_domain(&(base + (target - base) * eta), &d));
    }

    #[test]
    fn final_blend_is_the_minimum(eta in 0.0..=1.0f64, th in prop::collection::vec(0.0..=1.0f64, 0..3)) {
        let f = final_blend(eta, &th);
        prop_assert!(f <= eta && th.iter().all(|&t| f <= t));
        prop_assert!(f == eta || th.contains(&f));
    }

    #[test]
    fn theta_decreases_with_damping(terms in prop::collection::vec((0.0..2.0f64, 0.0..10.0f64, 0.01..1.0f64), 1..3), dt in 1e-4..1e-1f64) {
        let t = oe_theta(&terms, dt);
        prop_assert!(t > 0.0 && t <= 1.0);
        let stronger: Vec<_> = terms.iter().map(|&(a, s, l)| (a, s + 1.0, l)).collect();
        prop_assert!(oe_theta(&stronger, dt) < t);
        let none: Vec<_> = terms.iter().map(|&(a, _, l)| (a, 0.0, l)).collect();
        prop_assert_eq!(oe_theta(&none, dt), 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn refinement_keeps_area_and_tiles_the_dual(seed in 0u64..1000) {
        let m = small_mesh(seed);
        let r = refine(&m).unwrap();
        prop_assert!((r.area() - 1.0).abs() < 1e-12);
        prop_assert_eq!(r.n_triangles(), 4 * m.n_triangles());
        let s = Solver::new(ScalarModel::Kpp, ScalarDomain { min: -1.0, max: 1.0 }, r, &BoundarySpec::uniform(BcKind::Wall), SolverOptions::default());
        let s = s.unwrap();
        let total: f64 = s.sub.norm_weights().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn low_order_stage_obeys_local_bounds(seed in 0u64..1000, vals in prop::collection::vec(0.0..1.0f64, 64)) {
        // Bounds of the data, far inside the invariant domain: the first-order
        // update may not leave them.
        let (a, b) = (std::f64::consts::FRAC_PI_4, 3.5 * std::f64::consts::PI);
        let far = State::<1>::new(a);
        let bc = BoundarySpec::uniform(BcKind::FarField(FarField::Constant(far)));
        let opts = SolverOptions { mode: Mode::Lo, ..Default::default() };
        let s = Solver::new(ScalarModel::Kpp, ScalarDomain { min: -1.0, max: 100.0 }, small_mesh(seed), &bc, opts).unwrap();
        let pick = |i: usize| State::<1>::new(a + (b - a) * vals[i % vals.len()]);
        let u = Solution {
            points: (0..s.dofs.n_points()).map(pick).collect(),
            averages: (0..s.geo.len()).map(|k| pick(k + 17)).collect(),
        };
        let v = stage(&s, &u);
        for w in v.iter() {
            prop_assert!(w[0] >= a - 1e-12 && w[0] <= b + 1e-12, "{} outside [{a}, {b}]", w[0]);
        }
    }

    #[test]
    fn limited_euler_stage_stays_admissible(seed in 0u64..1000, states in prop::collection::vec(euler_state(), 32)) {
        let e = Euler::default();
        let far = e.conserved(1.0, 0.3, 0.0, 1.0);
        let bc = BoundarySpec::uniform(BcKind::FarField(FarField::Constant(far)));
        let s = Solver::new(e.clone(), EulerDomain::default(), small_mesh(seed), &bc, SolverOptions::default()).unwrap();
        let pick = |i: usize| states[i % states.len()];
        let u = Solution {
            points: (0..s.dofs.n_points()).map(pick).collect(),
            averages: (0..s.geo.len()).map(|k| pick(k + 5)).collect(),
        };
        let v = stage(&s, &u);
        let d = EulerDomain::default();
        prop_assert!(v.iter().all(|w| e.in_domain(w, &d)));
    }

    #[test]
    fn constant_states_are_steady(seed in 0u64..1000, w in euler_state()) {
        let bc = BoundarySpec::uniform(BcKind::FarField(FarField::Constant(w)));
        let s = Solver::new(Euler::default(), EulerDomain::default(), small_mesh(seed), &bc, SolverOptions::default()).unwrap();
        let u = Solution::constant(&s.dofs, w);
        let v = stage(&s, &u);
        for x in v.iter() {
            prop_assert!((x - w).amax() <= 1e-12 * w.amax());
        }
    }
}
