use std::f64::consts::PI;

use approx::assert_relative_eq;
use polycurve::energy::{energy_k, flow_step};
use polycurve::ktension::{
    circle_curve, constant_curvature_kappa, geodesic_curvature, kappa_profile, tension_k_general,
    tension_k_spaceform,
};
use polycurve::product::{graph_curve, product_curve};
use polycurve::samples::{random_sphere_curve, smooth_field};
use polycurve::variation::{
    classical_jacobi, hessian_matrix, hessian_matrix_in, index_nullity, jacobi_apply, FieldBasis, HessianMode,
};
use polycurve::{DiscreteCurve, Error, Execution, SpaceForm};

fn s2() -> SpaceForm {
    SpaceForm::unit_sphere(2)
}

#[test]
fn circle_family_curvatures() {
    assert_eq!(constant_curvature_kappa(1, 1.0), Some(0.0));
    assert_relative_eq!(constant_curvature_kappa(2, 1.0).unwrap(), 1.0);
    assert_relative_eq!(constant_curvature_kappa(3, 1.0).unwrap(), 2f64.sqrt());
    assert_relative_eq!(constant_curvature_kappa(4, 1.0).unwrap(), 3f64.sqrt());
    assert_relative_eq!(constant_curvature_kappa(5, 4.0).unwrap(), 4.0);
    assert_eq!(constant_curvature_kappa(2, 0.0), None);
}

#[test]
fn sampled_circles_have_exact_curvature() {
    for kappa in [0.0, 0.5, 1.0, 2f64.sqrt()] {
        let c = circle_curve(&s2(), kappa, 64).unwrap();
        for g in geodesic_curvature(&c).unwrap() {
            assert!((g - kappa).abs() < 1e-12, "kappa {kappa} measured {g}");
        }
    }
}

#[test]
fn kappa_profile_converges() {
    let a = kappa_profile(&circle_curve(&s2(), 1.0, 64).unwrap()).unwrap()[0];
    let b = kappa_profile(&circle_curve(&s2(), 1.0, 128).unwrap()).unwrap()[0];
    assert!((b - 1.0).abs() * 3.0 < (a - 1.0).abs());
}

#[test]
fn energies_of_reference_circles() {
    let e1 = energy_k(&circle_curve(&s2(), 0.0, 256).unwrap(), 1).unwrap();
    assert!((e1 - PI).abs() < 1e-3, "{e1}");
    let e2 = energy_k(&circle_curve(&s2(), 1.0, 256).unwrap(), 2).unwrap();
    assert!((e2 - PI / 2f64.sqrt()).abs() < 1e-3, "{e2}");
    // Frozen discrete values.
    assert_relative_eq!(e1, 3.1409618799408525, max_relative = 1e-12);
    assert_relative_eq!(e2, 2.220633116981695, max_relative = 1e-12);
}

#[test]
fn paths_agree_on_circles() {
    for (kappa, k) in [(0.3, 2), (1.0, 3), (0.7, 4), (1.2, 5)] {
        let c = circle_curve(&s2(), kappa, 128).unwrap();
        let g = tension_k_general(&c, k).unwrap();
        let s = tension_k_spaceform(&c, k).unwrap();
        let gap = g.field.sub(&s.field).inf_norm();
        assert!(gap <= 1e-10 * g.inf_norm.max(1.0), "k {k}: {gap}");
    }
}

#[test]
fn validation_messages() {
    let pts: Vec<f64> = (0..12).flat_map(|i| {
        let t = 2.0 * PI * i as f64 / 12.0;
        [t.cos(), t.sin(), 0.0]
    }).collect();
    let err = DiscreteCurve::from_points(s2(), pts, true).unwrap_err();
    assert!(err.to_string().contains("point count ≥ 16 required"), "{err}");
    let c = circle_curve(&s2(), 0.5, 128).unwrap();
    let err = tension_k_general(&c, 7).unwrap_err();
    assert!(err.to_string().contains("k ≤ 6"), "{err}");
    assert!(matches!(
        tension_k_spaceform(&product_curve(&c, &c).unwrap(), 2),
        Err(Error::NotASpaceForm)
    ));
}

#[test]
fn stretched_circle_resamples_uniformly() {
    let n = 64;
    let pts: Vec<f64> = (0..n)
        .flat_map(|i| {
            let s = i as f64 / n as f64;
            let t = 2.0 * PI * (s + 0.12 * (2.0 * PI * s).sin());
            [t.cos(), t.sin(), 0.0]
        })
        .collect();
    let c = DiscreteCurve::from_points(s2(), pts, true).unwrap();
    let r = c.resample_arclength().unwrap();
    let gaps = r.gaps();
    let spread = gaps.iter().cloned().fold(0.0, f64::max) - gaps.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(spread < 1e-10, "{spread}");
    assert!((r.length() - c.length()).abs() < 1e-3);
}

#[test]
fn first_order_jacobi_is_negative_classical() {
    let c = circle_curve(&s2(), 0.0, 64).unwrap();
    let w = smooth_field(&c, 3);
    let a = jacobi_apply(&c, 1, &w).unwrap();
    let b = classical_jacobi(&c, &w).unwrap();
    assert!(a.add(&b).inf_norm() < 1e-12);
}

#[test]
fn biharmonic_jacobi_is_square_of_classical_on_geodesics() {
    let c = circle_curve(&s2(), 0.0, 64).unwrap();
    let w = smooth_field(&c, 9);
    let j2 = jacobi_apply(&c, 2, &w).unwrap();
    let ll = classical_jacobi(&c, &classical_jacobi(&c, &w).unwrap()).unwrap();
    assert!(j2.sub(&ll).inf_norm() <= 1e-9 * ll.inf_norm());
}

#[test]
fn unstable_biharmonic_circle() {
    let c = circle_curve(&s2(), 1.0, 64).unwrap();
    let h = hessian_matrix(&c, 2, HessianMode::Jacobi, Execution::Parallel).unwrap();
    assert!(h.critical);
    let r = index_nullity(&h.matrix, 2, None).unwrap();
    assert_eq!(r.index, 3);
}

#[test]
fn spectrum_is_basis_invariant() {
    let c = circle_curve(&s2(), 0.0, 64).unwrap();
    let a = hessian_matrix(&c, 2, HessianMode::Jacobi, Execution::Sequential).unwrap();
    let b = hessian_matrix_in(&c, 2, HessianMode::Jacobi, &FieldBasis::rotated(&c, 5), Execution::Parallel).unwrap();
    let ea = index_nullity(&a.matrix, 2, None).unwrap();
    let eb = index_nullity(&b.matrix, 2, None).unwrap();
    let scale = ea.eigenvalues.last().unwrap().abs();
    for (x, y) in ea.eigenvalues.iter().zip(&eb.eigenvalues) {
        assert!((x - y).abs() <= 1e-9 * scale);
    }
    assert_eq!((ea.index, ea.nullity), (eb.index, eb.nullity));
}

#[test]
fn parallel_and_sequential_hessians_match() {
    let c = circle_curve(&s2(), 1.0, 48).unwrap();
    for mode in [HessianMode::Jacobi, HessianMode::Fd] {
        let a = hessian_matrix(&c, 2, mode, Execution::Sequential).unwrap();
        let b = hessian_matrix(&c, 2, mode, Execution::Parallel).unwrap();
        assert_eq!(a.matrix, b.matrix);
    }
}

#[test]
fn graph_requires_matching_length() {
    let psi = circle_curve(&s2(), 1.0, 64).unwrap();
    let bad = SpaceForm::sphere(1, 1.0).unwrap();
    assert!(matches!(graph_curve(&psi, &bad), Err(Error::LengthMismatch { .. })));
    let good = SpaceForm::sphere(1, 64.0 * psi.h() / (2.0 * PI)).unwrap();
    let g = graph_curve(&psi, &good).unwrap();
    assert_eq!(g.ambient_dim(), 5);
}

#[test]
fn small_step_descends_without_resampling_artifacts_off_the_family() {
    let c = random_sphere_curve(&s2(), 64, 11).unwrap();
    let e0 = energy_k(&c, 1).unwrap();
    let e1 = energy_k(&flow_step(&c, 1, 1e-4).unwrap(), 1).unwrap();
    assert!(e1 < e0);
}

#[test]
fn second_variation_factorizes_on_geodesics() {
    let c = circle_curve(&s2(), 0.0, 96).unwrap();
    let v = smooth_field(&c, 21);
    let lv = classical_jacobi(&c, &v).unwrap();
    for k in 2..=4 {
        let q = c.l2_inner(&v, &jacobi_apply(&c, k, &v).unwrap()).unwrap();
        let s = k / 2;
        let mut f = lv.clone();
        for _ in 0..s - 1 {
            f = c.rough_laplacian(&f).unwrap();
        }
        if k % 2 == 1 {
            f = c.covariant_derivative(&f).unwrap();
        }
        let norm = c.l2_inner(&f, &f).unwrap();
        assert!((q - norm).abs() <= 1e-9 * norm, "k {k}: {q} vs {norm}");
    }
}

#[test]
fn jacobi_and_fd_spectra_agree() {
    let c = circle_curve(&s2(), 1.0, 64).unwrap();
    let a = index_nullity(&hessian_matrix(&c, 2, HessianMode::Jacobi, Execution::Parallel).unwrap().matrix, 2, None).unwrap();
    let b = index_nullity(&hessian_matrix(&c, 2, HessianMode::Fd, Execution::Parallel).unwrap().matrix, 2, None).unwrap();
    let scale = a.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let worst = a.eigenvalues.iter().zip(&b.eigenvalues).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale;
    assert!(worst <= 1e-2, "{worst}");
}
