use parabolic_core::criterion::{
    decide, nondegeneracy_gate, rhs_w, solve_theta, theta_residual, zero_curvature, DRoute, Status,
};
use parabolic_core::fixtures::{
    curved_constant_connection, opposite_pair, random_matrix, random_transform, round_trip,
};
use parabolic_core::geometry::{theta_from_transform, Connection, OperatorField};
use parabolic_core::polyalg::Matrix;
use parabolic_core::{Expr, Rational};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn constant_operator(m: &Matrix<Rational>) -> OperatorField {
    OperatorField::new(Matrix::from_fn(m.rows(), m.cols(), |i, j| Expr::rational(&m[(i, j)]))).unwrap()
}

fn constant_connection<R: Rng>(r: &mut R, n: usize) -> Connection {
    Connection::from_lower(n, |_, _, _| Expr::integer(r.gen_range(-3i64..=3)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn pulled_back_diffusion_systems_are_reducible(seed in any::<u64>(), n in 1usize..=2) {
        let mut r = rng(seed);
        let rt = round_trip(&mut r, n).unwrap();
        let v = decide(&rt.a, &rt.gamma, &rt.base, DRoute::Solve).unwrap();
        prop_assert_eq!(v.status, Status::Reducible);
        prop_assert_eq!(v.theta.unwrap(), rt.theta);
    }

    #[test]
    fn theta_of_a_point_transform_is_flat(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let phi = random_transform(&mut r, n).unwrap();
        prop_assert!(zero_curvature(&theta_from_transform(&phi)).is_flat());
    }

    #[test]
    fn routes_agree_on_constant_systems(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let a = constant_operator(&random_matrix(&mut r, n));
        let zero = vec![Rational::from_integer(0.into()); n];
        prop_assume!(nondegeneracy_gate(&a, &zero).unwrap().passed());
        let gamma = constant_connection(&mut r, n);
        let solved = solve_theta(&a, &gamma, DRoute::Solve).unwrap();
        prop_assert_eq!(&solve_theta(&a, &gamma, DRoute::Cayley).unwrap(), &solved);
        prop_assert!(theta_residual(&a, &gamma, &solved).unwrap().is_zero());
    }

    #[test]
    fn curvature_is_antisymmetric(seed in any::<u64>(), n in 2usize..=3) {
        let mut r = rng(seed);
        let theta = Connection::from_lower(n, |_, _, _| {
            (0..n).fold(Expr::integer(r.gen_range(-2i64..=2)), |acc, v| {
                &acc + &(&Expr::integer(r.gen_range(-2i64..=2)) * &Expr::var(v))
            })
        });
        let c = zero_curvature(&theta);
        for m in 0..n { for k in 0..n { for q in 0..n { for p in 0..n {
            prop_assert_eq!(c.get(m, k, q, p), -c.get(m, q, k, p));
        }}}}
    }

    #[test]
    fn two_dimensional_gates_agree(seed in any::<u64>(), opposite in any::<bool>()) {
        let mut r = rng(seed);
        let m = if opposite { opposite_pair(&mut r) } else { random_matrix(&mut r, 2) };
        let a = constant_operator(&m);
        let g = nondegeneracy_gate(&a, &[Rational::from_integer(0.into()), Rational::from_integer(0.into())]).unwrap();
        prop_assert_eq!(Some(g.resultant_test()), g.trace_test());
        if opposite {
            prop_assert!(!g.passed());
        }
    }
}

#[test]
fn curved_constant_connection_is_not_reducible() {
    let a = OperatorField::<Expr>::identity(2);
    let zero = [Rational::from_integer(0.into()), Rational::from_integer(0.into())];
    let v = decide(&a, &curved_constant_connection(), &zero, DRoute::Both).unwrap();
    assert_eq!(v.status, Status::NotReducible);
    assert_eq!(v.curvature_witnesses[0].index, (0, 0, 1, 1));
}

#[test]
fn w_vanishes_for_diffusion_form() {
    let a = constant_operator(&Matrix::from_rows(vec![
        vec![Rational::from_integer(2.into()), Rational::from_integer(1.into())],
        vec![Rational::from_integer(0.into()), Rational::from_integer(3.into())],
    ]).unwrap());
    assert!(rhs_w(&a, &Connection::zero(2)).unwrap().is_zero());
}
