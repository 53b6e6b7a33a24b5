use proptest::prelude::*;
use qst_core::hilbert::{
    annihilation, embed, min_eigenvalue, partial_trace, sigma_minus, sigma_z, Operator,
    QuantumState, SpaceSignature,
};
use qst_core::{CMatrix, C64};

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn dims() -> impl Strategy<Value = (usize, usize)> {
    (2usize..4, 2usize..5)
}

fn random_matrix(n: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n)
        .prop_map(move |v| CMatrix::from_iterator(n, n, v.into_iter().map(|(a, b)| C64::new(a, b))))
}

fn hermitian(n: usize) -> impl Strategy<Value = CMatrix> {
    random_matrix(n).prop_map(|m| (&m + m.adjoint()) * C64::new(0.5, 0.0))
}

/// Random density matrix `M M† / tr(M M†)` on a hybrid space.
fn density() -> impl Strategy<Value = QuantumState> {
    dims().prop_flat_map(|(nc, nm)| {
        let sig = SpaceSignature::hybrid(nc, nm).unwrap();
        let n = sig.total_dim();
        random_matrix(n).prop_map(move |m| {
            let mut rho = &m * m.adjoint();
            let tr = rho.trace().re;
            rho /= C64::new(tr, 0.0);
            let rho = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
            QuantumState::mixed(sig.clone(), rho).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn number_operator_diagonal(dim in 2usize..10) {
        let a = annihilation(dim).unwrap();
        let n = a.adjoint().compose(&a).unwrap();
        for i in 0..dim {
            for j in 0..dim {
                let want = if i == j { i as f64 } else { 0.0 };
                prop_assert!((n.matrix()[(i, j)] - C64::new(want, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn embed_preserves_hermiticity((nc, nm) in dims(), slot in 0usize..3, seed in hermitian(4)) {
        let sig = SpaceSignature::hybrid(nc, nm).unwrap();
        let d = sig.dims()[slot];
        let local = seed.view((0, 0), (d.min(4), d.min(4))).into_owned();
        let mut m = CMatrix::zeros(d, d);
        m.view_mut((0, 0), local.shape()).copy_from(&local);
        for i in local.nrows()..d {
            m[(i, i)] = C64::new(i as f64, 0.0);
        }
        let op = Operator::single(m).unwrap();
        prop_assert!(op.is_hermitian(1e-14));
        prop_assert!(embed(&op, slot, &sig).unwrap().is_hermitian(1e-14));
    }

    #[test]
    fn embeds_on_different_slots_commute((nc, nm) in dims()) {
        let sig = SpaceSignature::hybrid(nc, nm).unwrap();
        let a = embed(&annihilation(nc).unwrap(), 0, &sig).unwrap();
        let b = embed(&annihilation(nm).unwrap().adjoint(), 1, &sig).unwrap();
        let s = embed(&sigma_minus(), 2, &sig).unwrap();
        let z = embed(&sigma_z(), 2, &sig).unwrap();
        for (x, y) in [(&a, &b), (&a, &s), (&b, &s), (&a, &z), (&b, &z)] {
            prop_assert_eq!(max_abs(x.commutator(y).unwrap().matrix()), 0.0);
        }
    }

    #[test]
    fn partial_trace_is_trace_preserving_and_positive(rho in density(), keep_mask in 1usize..8) {
        let keep: Vec<usize> = (0..3).filter(|s| keep_mask & (1 << s) != 0).collect();
        let reduced = partial_trace(&rho, &keep).unwrap();
        let r = reduced.density().unwrap();
        prop_assert!((r.trace().re - rho.norm_or_trace()).abs() <= 1e-12);
        let herm = max_abs(&(r - r.adjoint()));
        prop_assert!(herm <= 1e-12);
        prop_assert!(min_eigenvalue(r) >= -1e-10);
    }
}
