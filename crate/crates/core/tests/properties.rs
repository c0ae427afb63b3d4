use std::f64::consts::PI;

use phasekit::dsl::{parse, serialize};
use phasekit::expr::{HamiltonianExpr, Term};
use phasekit::lattice::Lattice;
use phasekit::limits::{dv_to_cv, dv_to_rotor, rotor_to_cv, Var};
use phasekit::models::{self, ModelKind, ModelSpec};
use phasekit::spaces::{dv_wigner_grid, DensityMatrix, FockOperators, PhaseSpace, RotorOperators, RotorVariant};
use phasekit::tensor::{
    comm_norm, eig_hermitian, eig_lowest_sparse, exp_i_hermitian, kron, OperatorMatrix,
};
use phasekit::weyl::WeylString;
use phasekit::C64;
use proptest::prelude::*;

fn level() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![2u32, 3, 5])
}

fn factors(max_sites: usize) -> impl Strategy<Value = Vec<(usize, i64, i64)>> {
    prop::collection::vec((0..max_sites, -6i64..6, -6i64..6), 0..5)
}

fn string(n: u32, sites: usize) -> impl Strategy<Value = WeylString> {
    (factors(sites), 0i64..20).prop_map(move |(f, k)| {
        WeylString::from_factors(n, f).unwrap().with_phase_exp(k)
    })
}

fn hermitian(dim: usize) -> impl Strategy<Value = OperatorMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim * dim).prop_map(move |v| {
        let m = nalgebra::DMatrix::from_fn(dim, dim, |r, c| C64::new(v[r * dim + c].0, v[r * dim + c].1));
        let h = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        OperatorMatrix::from_dense(h).checked_hermitian().unwrap()
    })
}

fn dense_matrix(dim: usize) -> impl Strategy<Value = OperatorMatrix> {
    prop::collection::vec(-3i32..3, dim * dim).prop_map(move |v| {
        OperatorMatrix::from_dense(nalgebra::DMatrix::from_fn(dim, dim, |r, c| C64::new(v[r * dim + c] as f64, 0.5)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn string_product_matches_matrix_product(
        (n, p, q) in level().prop_flat_map(|n| (Just(n), string(n, 3), string(n, 3)))
    ) {
        let pq = p.mul(&q).unwrap().to_matrix(3).unwrap();
        let mm = p.to_matrix(3).unwrap().matmul(&q.to_matrix(3).unwrap()).unwrap();
        prop_assert!(pq.max_abs_diff(&mm).unwrap() <= 1e-12, "N={}", n);
    }

    #[test]
    fn commutation_exponent_agrees_with_matrices(
        (p, q) in level().prop_flat_map(|n| (string(n, 3), string(n, 3)))
    ) {
        let e = p.commutation_exponent(&q).unwrap();
        let (pm, qm) = (p.to_matrix(3).unwrap(), q.to_matrix(3).unwrap());
        prop_assert_eq!(e.commutes(), comm_norm(&pm, &qm).unwrap() <= 1e-12);
        let lhs = pm.matmul(&qm).unwrap();
        let rhs = qm.matmul(&pm).unwrap().scale(e.phase());
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-12);
        prop_assert_eq!((e.signed() + q.commutation_exponent(&p).unwrap().signed()).rem_euclid(p.n_level() as i64), 0);
    }

    #[test]
    fn dagger_is_the_matrix_adjoint((p,) in level().prop_flat_map(|n| (string(n, 2),))) {
        let d = p.dagger().to_matrix(2).unwrap();
        prop_assert!(d.max_abs_diff(&p.to_matrix(2).unwrap().adjoint()).unwrap() <= 1e-12);
        prop_assert_eq!(p.dagger().dagger(), p);
    }

    #[test]
    fn spectrum_is_unitarily_invariant(h in hermitian(6), g in hermitian(6)) {
        let u = exp_i_hermitian(&g, 1.0).unwrap();
        // symmetrize away rounding before the Hermitian solver sees it
        let d = u.adjoint().matmul(&h).unwrap().matmul(&u).unwrap().to_dense();
        let rotated = OperatorMatrix::from_dense((&d + d.adjoint()) * C64::new(0.5, 0.0)).checked_hermitian().unwrap();
        let a = eig_hermitian(&h).unwrap().eigenvalues;
        let b = eig_hermitian(&rotated).unwrap().eigenvalues;
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
    }

    #[test]
    fn kron_is_associative(a in dense_matrix(2), b in dense_matrix(3), c in dense_matrix(2)) {
        let left = kron(&kron(&a, &b).unwrap(), &c).unwrap();
        let right = kron(&a, &kron(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left.max_abs_diff(&right).unwrap(), 0.0);
    }

    #[test]
    fn wigner_of_pure_states_is_normalized(
        v in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 5),
    ) {
        let psi: Vec<C64> = v.iter().map(|&(a, b)| C64::new(a, b)).collect();
        prop_assume!(psi.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3);
        let rho = DensityMatrix::pure(&psi).unwrap();
        let total: f64 = dv_wigner_grid(&rho).unwrap().iter().map(|r| r.2).sum();
        prop_assert!((total - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn rotor_hops_invert_away_from_the_edges(cutoff in 1usize..8, k in 1i64..4) {
        prop_assume!(k as usize <= 2 * cutoff);
        let ops = RotorOperators::new(cutoff, 0.3).unwrap();
        let prod = ops.hop(k).unwrap().matmul(&ops.hop(-k).unwrap()).unwrap();
        let dim = ops.dim();
        for i in 0..dim {
            let want = if i >= k as usize { 1.0 } else { 0.0 };
            prop_assert_eq!(prod.get(i, i), C64::new(want, 0.0));
        }
    }

    #[test]
    fn cv_fourier_fourth_power_is_identity(cutoff in 1usize..30) {
        let f = FockOperators::new(cutoff).unwrap().fourier();
        let f4 = f.matmul(&f).unwrap().matmul(&f).unwrap().matmul(&f).unwrap();
        prop_assert_eq!(f4.max_abs_diff(&OperatorMatrix::identity(cutoff + 1)).unwrap(), 0.0);
    }

    #[test]
    fn random_dv_expressions_round_trip(
        (n, terms) in level().prop_flat_map(|n| (Just(n), prop::collection::vec((string(n, 3), -3.0f64..3.0, any::<bool>()), 1..5)))
    ) {
        let mut e = HamiltonianExpr::new(PhaseSpace::dv(n).unwrap(), Lattice::Free(3));
        for (w, c, hc) in terms {
            e.push(Term::weyl(C64::new(c, 0.0), hc, w));
        }
        let back = parse(&serialize(&e)).unwrap();
        prop_assert_eq!(&back, &e);
        let split = e.terms.len() / 2;
        let mut a = e.clone();
        a.terms.truncate(split);
        let mut b = e.clone();
        b.terms.drain(..split);
        let sum = a.realize().unwrap().add(&b.realize().unwrap()).unwrap();
        prop_assert!(e.realize().unwrap().max_abs_diff(&sum).unwrap() <= 1e-12);
    }

    #[test]
    fn limit_routes_commute_on_random_pairs(
        (n, terms) in prop::sample::select(vec![5u32, 7, 9]).prop_flat_map(|n| (Just(n), prop::collection::vec((factors(3), -2.0f64..2.0, -1.0f64..1.0), 1..5)))
    ) {
        let mut e = HamiltonianExpr::new(PhaseSpace::dv(n).unwrap(), Lattice::Free(3));
        for (f, re, im) in terms {
            e.push(Term::weyl(C64::new(re, im), true, WeylString::from_factors(n, f).unwrap()));
        }
        let (direct, report) = dv_to_cv(&e).unwrap();
        prop_assert!(report.dropped_order_bound >= 0.0);
        for v in [RotorVariant::One, RotorVariant::Two] {
            let r = dv_to_rotor(&e, v, 2.0 * PI / 30.0, 12).unwrap();
            prop_assert!(r.realize().unwrap().hermitian_hint());
            let (via, _) = rotor_to_cv(&r, 30.0).unwrap();
            prop_assert_eq!(&via, &direct);
        }
        prop_assert!(direct.to_matrix(3, 4).unwrap().hermitian_hint());
    }

    #[test]
    fn baxter_limit_is_shift_invariant(n in 3u32..9, k in 2usize..7, om in 0.1f64..2.0, g in 0.1f64..2.0) {
        let mut s = ModelSpec::new(ModelKind::Baxter);
        s.params.n = n;
        s.params.k = k;
        s.params.big_omega = om;
        s.params.g = g;
        let (q, _) = dv_to_cv(&models::build(&s).unwrap()).unwrap();
        for i in 0..k {
            prop_assert!(q.x_row_sum(Var::X(i)).abs() <= 1e-15);
        }
    }

    #[test]
    fn lattice_maps_are_bijections(lx in 2usize..5, ly in 2usize..5) {
        let g = Lattice::HoneycombTorus { lx, ly };
        let mut seen = vec![false; g.n_sites()];
        for i in 0..lx as i64 {
            for j in 0..ly as i64 {
                for sub in [phasekit::lattice::Sublattice::A, phasekit::lattice::Sublattice::B] {
                    let s = g.honeycomb_site(i, j, sub);
                    prop_assert!(!seen[s]);
                    seen[s] = true;
                    prop_assert_eq!(g.honeycomb_site(i + lx as i64, j - ly as i64, sub), s);
                }
            }
        }
    }
}

#[test]
fn lanczos_agrees_with_dense_on_model_matrices() {
    let cases = [
        ModelSpec::new(ModelKind::Baxter),
        ModelSpec::new(ModelKind::Toric),
        ModelSpec::new(ModelKind::Harper).with("N", "64").unwrap(),
    ];
    for s in cases {
        let h = models::build(&s).unwrap().realize().unwrap().to_sparse();
        let h = OperatorMatrix::from_sparse(h);
        let full = eig_hermitian(&h).unwrap().eigenvalues;
        let k = 6.min(h.dim());
        let low = eig_lowest_sparse(&h, k).unwrap().eigenvalues;
        for (a, b) in low.iter().zip(&full) {
            assert!((a - b).abs() <= 1e-8, "{}: {a} vs {b}", s.kind);
        }
    }
}

#[test]
fn verification_reports_are_byte_identical() {
    use phasekit::analysis::{verify_kinematics, VerifyOptions};
    let opts = VerifyOptions {
        n_list: vec![3, 4],
        rotor_cutoff: 8,
        fock_cutoff: 10,
        fault: None,
    };
    let a = verify_kinematics(&opts).unwrap().to_json();
    let b = verify_kinematics(&opts).unwrap().to_json();
    assert_eq!(a, b);
}
