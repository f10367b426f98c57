//! Closed-form checks that do not reuse the code paths under test.

use nalgebra::{Matrix3, Vector3};

use qchannel_ep::channel::{mix, DensityMatrix, Fixture, KrausSet, SuperOperator};
use qchannel_ep::circuit::{induced_channel, simulate, Circuit, Gate, ANCILLA, SIGNAL};
use qchannel_ep::linalg::{c, C64};
use qchannel_ep::spectral::{eigenvalues, ep_order, spectrum, Phase, DEFAULT_TOL};

fn distortion(s: &SuperOperator) -> Matrix3<f64> {
    s.to_affine().unwrap().distortion
}

#[test]
fn kraus_and_affine_fixtures_agree() {
    for f in [Fixture::E1, Fixture::E2, Fixture::E3, Fixture::Identity, Fixture::Reset, Fixture::Depolarizing(0.3)] {
        let from_kraus = f.kraus().unwrap().to_superop();
        assert!(from_kraus.frobenius_distance(&f.superop()) < 1e-14, "{f}");
    }
}

#[test]
fn e3_is_a_quarter_turn_about_the_diagonal() {
    let s3 = 1.0 / 3.0;
    let r = 1.0 / 3f64.sqrt();
    let expected = Matrix3::new(
        s3, s3 + r, s3 - r, //
        s3 - r, s3, s3 + r, //
        s3 + r, s3 - r, s3,
    );
    assert!((distortion(&Fixture::E3.superop()) - expected).norm() < 1e-15);
}

#[test]
fn interpolated_spectrum_has_closed_form() {
    for k in 0..=20 {
        let p = k as f64 / 20.0;
        let e = distortion(&mix(&[Fixture::E1.superop(), Fixture::E2.superop()], &[1.0 - p, p]).unwrap());
        // Characteristic polynomial is λ³ − (p/2 − 1/4) λ.
        assert!(e.trace().abs() < 1e-15);
        assert!(e.determinant().abs() < 1e-15);
        let minors = e[(0, 0)] * e[(1, 1)] - e[(0, 1)] * e[(1, 0)] + e[(0, 0)] * e[(2, 2)] - e[(0, 2)] * e[(2, 0)]
            + e[(1, 1)] * e[(2, 2)] - e[(1, 2)] * e[(2, 1)];
        assert!((minors + (p / 2.0 - 0.25)).abs() < 1e-15);
        let root = C64::from(p / 2.0 - 0.25).sqrt();
        let ev = eigenvalues(&e).unwrap();
        for z in [c(0.0, 0.0), root, -root] {
            assert!(ev.iter().any(|w| (w - z).norm() < 1e-12), "p = {p}");
        }
    }
}

#[test]
fn phases_on_either_side_of_the_ep() {
    let pair = [Fixture::E1.superop(), Fixture::E2.superop()];
    let at = |p: f64| spectrum(&distortion(&mix(&pair, &[1.0 - p, p]).unwrap()), DEFAULT_TOL).unwrap().phase;
    assert_eq!(at(0.3), Phase::KBroken);
    assert_eq!(at(0.7), Phase::KExact);
}

#[test]
fn jordan_blocks_of_known_size() {
    let j3 = Matrix3::new(0.2, 1.0, 0.0, 0.0, 0.2, 1.0, 0.0, 0.0, 0.2);
    let p = Matrix3::new(1.0, 2.0, 0.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0);
    let similar = p * j3 * p.try_inverse().unwrap();
    assert_eq!(ep_order(&similar, c(0.2, 0.0), 1e-8).unwrap(), 3);
    let j21 = Matrix3::new(0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    assert_eq!(ep_order(&j21, c(0.0, 0.0), 1e-8).unwrap(), 2);
    assert_eq!(ep_order(&Matrix3::zeros(), c(0.0, 0.0), 1e-8).unwrap(), 1);
}

#[test]
fn ep3_ratio_gives_a_triple_eigenvalue() {
    let raw = Vector3::new(10.0, 2.0 * 13f64.sqrt(), 3.0 * 3f64.sqrt());
    let a = raw / raw.sum();
    let s = mix(&[Fixture::E1.superop(), Fixture::E2.superop(), Fixture::E3.superop()], a.as_slice()).unwrap();
    let e = distortion(&s);
    let mean = e.trace() / 3.0;
    for z in eigenvalues(&e).unwrap() {
        assert!((z - mean).norm() < 1e-4, "{z}");
    }
    assert_eq!(ep_order(&e, c(mean, 0.0), 1e-7).unwrap(), 3);
}

#[test]
fn induced_channel_matches_the_circuit_kraus_pair() {
    let circuit = Circuit::new(vec![
        Gate::U3 { qubit: SIGNAL, theta: 0.4, phi: -1.1, lambda: 2.0 },
        Gate::Ry { qubit: ANCILLA, theta: 0.9 },
        Gate::Cnot { control: ANCILLA, target: SIGNAL },
        Gate::Ry { qubit: ANCILLA, theta: -0.3 },
        Gate::Cnot { control: SIGNAL, target: ANCILLA },
    ])
    .unwrap();
    let from_kraus = KrausSet::new(circuit.kraus().to_vec()).unwrap().to_superop();
    let induced = induced_channel(&circuit);
    assert!(induced.frobenius_distance(&from_kraus) < 1e-14);
    let rho = DensityMatrix::pure(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
    let out = simulate(&circuit, &rho);
    assert!((out.matrix() - induced.apply(&rho).matrix()).norm() < 1e-14);
}
