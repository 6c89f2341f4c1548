use conjucirc::haar::HaarSampler;
use conjucirc::linalg::{hermitian_eig, ComplexMatrix};

fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
    let mut s = HaarSampler::new(seed);
    let g = ComplexMatrix::from_fn(n, n, |_, _| s.gaussian());
    (&g + &g.adjoint()).scale_real(0.5)
}

#[test]
fn reconstruction_up_to_side_1024() {
    for (n, seed) in [(16, 1), (128, 2), (512, 3), (1024, 4)] {
        let m = random_hermitian(n, seed);
        let eig = hermitian_eig(&m).unwrap();
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        let rel = eig.reconstruct().max_abs_diff(&m) / m.max_abs();
        assert!(rel <= 1e-9, "side {n}: relative error {rel:e}");
        let v = &eig.vectors;
        let gram = &v.adjoint() * v;
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-9);
    }
}
