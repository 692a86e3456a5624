//! Invariants of the public API under randomized inputs.

use std::f64::consts::PI;

use heisenphase::calculus::twisted_convolution;
use heisenphase::fsb::{fsb_gaussian, fsb_project, membership_residual};
use heisenphase::grid::{inner_product, io};
use heisenphase::group::{group_inv, group_mul};
use heisenphase::reps::{act, RepTag};
use heisenphase::transforms::{covariant, symplectic_fourier, Window};
use heisenphase::twosided::{apply, TwoSidedKernel};
use heisenphase::{Field, GridSpec, GroupElement, Params, C64};
use proptest::prelude::*;

fn phase() -> GridSpec {
    GridSpec::self_dual(2, 32, 1.0).unwrap()
}

fn packet(spec: GridSpec, cx: f64, cy: f64, width: f64, k: f64) -> Field {
    Field::from_fn(spec, |q| {
        let r2 = (q[0] - cx).powi(2) + (q[1] - cy).powi(2);
        C64::from_polar((-PI * r2 / width).exp(), k * q[0])
    })
}

fn elem() -> impl Strategy<Value = GroupElement> {
    (-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0).prop_map(|(s, x, y)| GroupElement::scalar(s, x, y))
}

/// Elements with lattice-aligned translations on [`phase`].
fn lattice_elem() -> impl Strategy<Value = GroupElement> {
    let d = phase().spacing();
    (-1.0f64..1.0, -5i32..=5, -5i32..=5).prop_map(move |(s, i, j)| GroupElement::scalar(s, i as f64 * d, j as f64 * d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn group_law_is_associative_with_inverses(a in elem(), b in elem(), c in elem()) {
        let ab_c = group_mul(&group_mul(&a, &b).unwrap(), &c).unwrap();
        let a_bc = group_mul(&a, &group_mul(&b, &c).unwrap()).unwrap();
        prop_assert!((ab_c.s - a_bc.s).abs() < 1e-12);
        let e = group_mul(&a, &group_inv(&a)).unwrap();
        prop_assert!(e.s.abs() < 1e-12 && e.x[0].abs() < 1e-12 && e.y[0].abs() < 1e-12);
    }

    #[test]
    fn pulled_representations_are_unitary(g in lattice_elem(), cx in -1.0f64..1.0, k in -1.0f64..1.0) {
        let p = Params::default();
        let f = packet(phase(), cx, 0.2, 1.0, k);
        let h = packet(phase(), -0.3, cx, 0.7, -k);
        for tag in [RepTag::LeftPulled, RepTag::RightPulled] {
            let (gf, gh) = (act(tag, &g, &f, &p).unwrap(), act(tag, &g, &h, &p).unwrap());
            let before = inner_product(&f, &h).unwrap();
            let after = inner_product(&gf, &gh).unwrap();
            prop_assert!((before - after).norm() < 1e-10);
        }
    }

    #[test]
    fn homomorphism_on_lattice(g in lattice_elem(), h in lattice_elem()) {
        let p = Params::default();
        let f = packet(phase(), 0.2, -0.1, 1.0, 0.4);
        for tag in [RepTag::LeftPulled, RepTag::RightPulled] {
            let two = act(tag, &g, &act(tag, &h, &f, &p).unwrap(), &p).unwrap();
            let one = act(tag, &group_mul(&g, &h).unwrap(), &f, &p).unwrap();
            prop_assert!(two.rel_dist(&one).unwrap() < 1e-10);
        }
    }

    #[test]
    fn csv_and_binary_round_trip(cx in -1.0f64..1.0, k in -2.0f64..2.0, n in prop::sample::select(vec![8usize, 16])) {
        let f = packet(GridSpec::new(2, 3.0, n).unwrap(), cx, 0.1, 0.8, k);
        let back = io::parse_csv(&io::to_csv_string(&f)).unwrap();
        prop_assert_eq!(&back, &f);
        let mut buf = Vec::new();
        io::write_binary(&f, &mut buf).unwrap();
        prop_assert_eq!(io::read_binary(&mut buf.as_slice()).unwrap(), f);
    }

    #[test]
    fn fsb_projection_is_an_orthogonal_projection(cx in -1.0f64..1.0, cy in -1.0f64..1.0, k in -1.0f64..1.0) {
        let p = Params::default();
        let f = packet(phase(), cx, cy, 0.6, k);
        let pf = fsb_project(&f, 1.0, &p).unwrap();
        prop_assert!(membership_residual(&pf, 1.0, &p).unwrap() < 1e-8);
        // ‖F‖² = ‖PF‖² + ‖F − PF‖²
        let rest = f.sub(&pf).unwrap();
        let lhs = f.norm().powi(2);
        let rhs = pf.norm().powi(2) + rest.norm().powi(2);
        prop_assert!((lhs - rhs).abs() < 1e-8 * lhs);
    }

    #[test]
    fn symplectic_fourier_is_unitary(cx in -1.0f64..1.0, k in -1.0f64..1.0) {
        let p = Params::default();
        let f = packet(phase(), cx, 0.3, 0.5, k);
        let hat = symplectic_fourier(&f, &p).unwrap();
        prop_assert!((hat.norm() - f.norm()).abs() < 1e-10 * f.norm());
    }

    #[test]
    fn twisted_convolution_is_bilinear(a in -2.0f64..2.0, cx in -1.0f64..1.0) {
        let p = Params::default();
        let (k1, k2, k3) = (packet(phase(), cx, 0.0, 0.5, 0.3), packet(phase(), 0.0, cx, 0.7, -0.2), packet(phase(), 0.2, 0.2, 0.4, 0.0));
        let c = C64::new(a, 0.5);
        let lhs = twisted_convolution(&k1.axpy(c, &k2).unwrap(), &k3, &p).unwrap();
        let rhs = twisted_convolution(&k1, &k3, &p).unwrap().axpy(c, &twisted_convolution(&k2, &k3, &p).unwrap()).unwrap();
        prop_assert!(lhs.rel_dist(&rhs).unwrap() < 1e-12);
    }
}

#[test]
fn covariant_transform_preserves_norm_for_unit_windows() {
    let p = Params::default();
    let config = phase().wigner_config().unwrap();
    let w = Window::new(Field::from_fn(config, |t| C64::new((-PI * t[0] * t[0]).exp(), 0.0))).unwrap();
    let w = Window::new(w.vector.scale(C64::new(1.0 / w.vector.norm(), 0.0))).unwrap();
    let f = Field::from_fn(config, |t| C64::from_polar((-PI * (t[0] - 0.4).powi(2) / 2.0).exp(), 0.7 * t[0]));
    let wf = covariant(&f, &w, &p).unwrap();
    assert!((wf.norm() - f.norm()).abs() < 1e-10 * f.norm());
}

#[test]
fn right_only_kernel_is_the_projection() {
    let p = Params::default();
    let g = phase();
    let phi = fsb_gaussian(1.0, &p, &g).unwrap();
    let f = packet(g, 0.3, -0.4, 0.8, 0.5);
    let via = apply(&TwoSidedKernel::RightOnly(phi), &f, &p).unwrap();
    assert!(via.rel_dist(&fsb_project(&f, 1.0, &p).unwrap()).unwrap() < 1e-8);
}
