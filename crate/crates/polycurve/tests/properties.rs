use polycurve::energy::energy_k;
use polycurve::ktension::{circle_curve, tension_k_general, tension_k_spaceform};
use polycurve::product::product_curve;
use polycurve::samples::{random_sphere_curve, rough_field, smooth_field};
use polycurve::variation::jacobi_apply;
use polycurve::SpaceForm;
use proptest::prelude::*;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn vec3() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, 3)
}

fn point_and_tangents(
    radius: f64,
) -> impl Strategy<Value = (SpaceForm, Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> {
    (vec3(), vec3(), vec3(), vec3(), vec3())
        .prop_filter("base point away from the origin", |(x, ..)| dot(x, x) > 1e-2)
        .prop_map(move |(x, a, b, c, d)| {
            let s = SpaceForm::sphere(2, radius).unwrap();
            let p = s.project_point(&x).unwrap();
            let t = |v: &[f64]| s.project_tangent(&p, v);
            let (a, b, c) = (t(&a), t(&b), t(&c));
            (s, p, a, b, c, d)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tangent_projection_is_an_orthogonal_projector((s, p, a, _, _, d) in point_and_tangents(1.7)) {
        let pd = s.project_tangent(&p, &d);
        let ppd = s.project_tangent(&p, &pd);
        for (x, y) in pd.iter().zip(&ppd) {
            prop_assert!((x - y).abs() < 1e-12);
        }
        prop_assert!(dot(&pd, &p).abs() < 1e-12);
        let lhs = dot(&pd, &a);
        let rhs = dot(&d, &s.project_tangent(&p, &a));
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn curvature_tensor_symmetries((s, p, a, b, c, d) in point_and_tangents(0.8)) {
        let u = s.project_tangent(&p, &d);
        let r = |x: &[f64], y: &[f64], z: &[f64]| s.curvature_op(&p, x, y, z);
        let skew: Vec<f64> = r(&a, &b, &c).iter().zip(r(&b, &a, &c)).map(|(x, y)| x + y).collect();
        prop_assert!(skew.iter().all(|x| x.abs() < 1e-12));
        let pair = dot(&r(&a, &b, &c), &u) - dot(&r(&c, &u, &a), &b);
        prop_assert!(pair.abs() < 1e-11);
        let bianchi: Vec<f64> = (0..3).map(|i| r(&a, &b, &c)[i] + r(&b, &c, &a)[i] + r(&c, &a, &b)[i]).collect();
        prop_assert!(bianchi.iter().all(|x| x.abs() < 1e-11));
    }

    #[test]
    fn exponential_matches_retraction_to_third_order((s, p, a, ..) in point_and_tangents(1.0), t in 1e-3f64..1e-2) {
        prop_assume!(dot(&a, &a) > 1e-4);
        let v: Vec<f64> = a.iter().map(|x| t * x).collect();
        let e = s.exp_map(&p, &v);
        let chord: Vec<f64> = p.iter().zip(&v).map(|(x, y)| x + y).collect();
        let r = s.project_point(&chord).unwrap();
        let gap = e.iter().zip(&r).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        let nv = dot(&v, &v).sqrt();
        prop_assert!(gap <= nv.powi(3));
        prop_assert!((s.distance(&p, &e) - nv).abs() < 1e-12);
    }

    #[test]
    fn summation_by_parts_on_random_curves(seed in 0u64..10_000) {
        let c = random_sphere_curve(&SpaceForm::unit_sphere(2), 48, seed).unwrap();
        let f = rough_field(&c, seed + 1);
        let g = smooth_field(&c, seed + 2);
        let lhs = c.l2_inner(&c.rough_laplacian(&f).unwrap(), &g).unwrap();
        let df = c.covariant_derivative(&f).unwrap();
        let dg = c.covariant_derivative(&g).unwrap();
        let rhs = c.l2_inner(&df, &dg).unwrap();
        let scale = (c.l2_inner(&df, &df).unwrap() * c.l2_inner(&dg, &dg).unwrap()).sqrt();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
    }

    #[test]
    fn tension_paths_agree(seed in 0u64..10_000, k in 1usize..=4) {
        let c = random_sphere_curve(&SpaceForm::sphere(2, 1.3).unwrap(), 64, seed).unwrap();
        let g = tension_k_general(&c, k).unwrap();
        let s = tension_k_spaceform(&c, k).unwrap();
        prop_assert!(g.field.sub(&s.field).inf_norm() <= 1e-10 * g.inf_norm.max(1.0));
    }

    #[test]
    fn jacobi_operator_is_linear(seed in 0u64..10_000, alpha in -3.0f64..3.0, k in 1usize..=3) {
        let c = circle_curve(&SpaceForm::unit_sphere(2), 0.0, 64).unwrap();
        let v = smooth_field(&c, seed);
        let w = rough_field(&c, seed + 7);
        let lhs = jacobi_apply(&c, k, &v.axpy(alpha, &w)).unwrap();
        let rhs = jacobi_apply(&c, k, &v).unwrap().axpy(alpha, &jacobi_apply(&c, k, &w).unwrap());
        prop_assert!(lhs.sub(&rhs).inf_norm() <= 1e-10 * rhs.inf_norm().max(1.0));
    }

    #[test]
    fn product_energy_is_additive(s1 in 0u64..1000, s2 in 0u64..1000, k in 1usize..=3) {
        let a = random_sphere_curve(&SpaceForm::unit_sphere(2), 64, s1).unwrap();
        let b = random_sphere_curve(&SpaceForm::sphere(2, 2.0).unwrap(), 64, s2).unwrap().with_step(a.h()).unwrap();
        let p = product_curve(&a, &b).unwrap();
        let (ep, ea, eb) = (energy_k(&p, k).unwrap(), energy_k(&a, k).unwrap(), energy_k(&b, k).unwrap());
        prop_assert!((ep - ea - eb).abs() <= 1e-12 * ep);
    }
}
