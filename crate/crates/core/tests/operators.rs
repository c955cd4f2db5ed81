mod common;

use cgl_core::linalg::expm_pade;
use cgl_core::operators::{
    build_fd_operator, build_periodic_operator, BlockOperator, FdBoundary, Representation, StepFraction,
};
use cgl_core::spectral::{Advection, FourierGrid};
use cgl_core::tensor::assemble_kron_sum;
use cgl_core::{CglParameters, ComplexTensor};
use common::{max_abs, rel_diff, tensor};
use proptest::prelude::*;

fn cubic() -> CglParameters {
    CglParameters::cubic(1.0, 2.0, 1.0, -1.0, 0.2)
}

fn fd_case() -> impl Strategy<Value = (Vec<usize>, FdBoundary, ComplexTensor)> {
    (prop::collection::vec(7usize..=9, 1..=3), prop::bool::ANY).prop_flat_map(|(shape, dn)| {
        let boundary = if dn { FdBoundary::DirichletNeumann } else { FdBoundary::Dirichlet };
        (Just(shape.clone()), Just(boundary), tensor(shape))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn tucker_exponential_matches_dense((shape, boundary, u) in fd_case(), tau in 0.01f64..1.0) {
        let intervals = vec![(0.0, 10.0); shape.len()];
        let mut op = build_fd_operator(&shape, &intervals, &cubic(), boundary).unwrap();
        op.prepare(tau, &[StepFraction::HALF, StepFraction::ONE]).unwrap();
        let Representation::KroneckerSum(mats) = op.representation() else { unreachable!() };
        let k = assemble_kron_sum(mats, 4096).unwrap();
        for (f, t) in [(StepFraction::ONE, tau), (StepFraction::HALF, tau / 2.0)] {
            let expect = expm_pade(&k, t).unwrap().matvec(u.vec()).unwrap();
            prop_assert!(rel_diff(op.apply_exp(f, &u).unwrap().vec(), &expect) <= 1e-11);
        }
        let lin = k.matvec(u.vec()).unwrap();
        prop_assert!(rel_diff(op.apply_linear(&u).unwrap().vec(), &lin) <= 1e-12);
    }

    #[test]
    fn fourier_exponential_is_dissipative(u in tensor(vec![12, 10]), tau in 0.0f64..2.0) {
        let params = CglParameters::cubic(0.5, 0.5, -0.5, 1.0, 1.0);
        let grid = FourierGrid::new(vec![12, 10], vec![(-12.0, 12.0); 2]).unwrap();
        let mut op = build_periodic_operator(grid, &params, Advection::None).unwrap();
        op.prepare(tau, &[StepFraction::ONE]).unwrap();
        let out = op.apply_exp(StepFraction::ONE, &u).unwrap();
        prop_assert!(max_abs(out.vec()) <= max_abs(u.vec()) * (tau * params.alpha2).exp() * (1.0 + 1e-9));
    }

    #[test]
    fn block_exponential_is_componentwise(u in tensor(vec![8, 6]), v in tensor(vec![8, 6])) {
        let params = CglParameters { alpha0: -0.4, ..cubic() };
        let grid = FourierGrid::new(vec![8, 6], vec![(0.0, 70.0), (0.0, 35.0)]).unwrap();
        let a = build_periodic_operator(grid.clone(), &params, Advection::Positive).unwrap();
        let b = build_periodic_operator(grid, &params, Advection::Negative).unwrap();
        let mut block = BlockOperator::new(vec![a.clone(), b.clone()]).unwrap();
        block.prepare(0.3, &[StepFraction::ONE]).unwrap();
        let joint = block.apply_exp(StepFraction::ONE, &[u.clone(), v.clone()]).unwrap();
        let (mut a, mut b) = (a, b);
        a.prepare(0.3, &[StepFraction::ONE]).unwrap();
        b.prepare(0.3, &[StepFraction::ONE]).unwrap();
        prop_assert_eq!(&joint[0], &a.apply_exp(StepFraction::ONE, &u).unwrap());
        prop_assert_eq!(&joint[1], &b.apply_exp(StepFraction::ONE, &v).unwrap());
    }
}

#[test]
fn physical_round_trip_through_coefficients() {
    let grid = FourierGrid::new(vec![10, 6], vec![(0.0, 1.0); 2]).unwrap();
    let op = build_periodic_operator(grid, &cubic(), Advection::None).unwrap();
    let u = ComplexTensor::from_fn(&[10, 6], |i| cgl_core::C64::new(i[0] as f64, i[1] as f64 * 0.5));
    let mut v = u.clone();
    op.from_physical(&mut v).unwrap();
    op.to_physical(&mut v).unwrap();
    assert!(rel_diff(v.vec(), u.vec()) <= 1e-13);
}

#[test]
fn fd_operator_rejects_mismatched_input() {
    assert!(build_fd_operator(&[8, 8], &[(0.0, 1.0)], &cubic(), FdBoundary::Dirichlet).is_err());
    assert!(build_fd_operator(&[5], &[(0.0, 1.0)], &cubic(), FdBoundary::Dirichlet).is_err());
    let op = build_fd_operator(&[8, 8], &[(0.0, 1.0); 2], &cubic(), FdBoundary::Dirichlet).unwrap();
    assert!(op.apply_exp(StepFraction::ONE, &ComplexTensor::zeros(&[8, 8])).is_err());
    assert!(op.apply_linear(&ComplexTensor::zeros(&[8, 7])).is_err());
}
