use num_complex::Complex64;
use proptest::prelude::*;
use weierstrass::numerics::{coords_wrt_lattice, in_cell, in_fundamental_domain};
use weierstrass::reduction::{reduce, reduce_tau, reduce_z};
use weierstrass::{Engine, UpperHalfPoint};

fn tau_strategy() -> impl Strategy<Value = UpperHalfPoint> {
    (-3.0f64..3.0, 0.05f64..4.0).prop_map(|(re, im)| UpperHalfPoint::from_parts(re, im).unwrap())
}

fn reduced_tau() -> impl Strategy<Value = UpperHalfPoint> {
    tau_strategy().prop_map(|t| reduce_tau(t).unwrap().1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn coordinates_recompose(t in tau_strategy(), re in -5.0f64..5.0, im in -5.0f64..5.0) {
        let z = Complex64::new(re, im);
        let back = coords_wrt_lattice(t, z).recompose(t);
        prop_assert!((back - z).norm() <= 1e-12 * (1.0 + z.norm() / t.im()));
    }

    #[test]
    fn reduce_z_lands_in_the_cell(t in reduced_tau(), re in -5.0f64..5.0, im in -5.0f64..5.0) {
        let z = Complex64::new(re, im);
        let (m, n, w) = reduce_z(t, z);
        prop_assert!(in_cell(t, w));
        let back = w + m as f64 + t.value() * n as f64;
        prop_assert!((back - z).norm() <= 1e-12 * (1.0 + z.norm()));
    }

    #[test]
    fn reduce_tau_is_idempotent(t in tau_strategy()) {
        let (g, star) = reduce_tau(t).unwrap();
        prop_assert_eq!(g.det(), Some(1));
        prop_assert!(in_fundamental_domain(star));
        prop_assert!((g.apply(t).unwrap().value() - star.value()).norm() < 1e-9);
        let (g2, again) = reduce_tau(star).unwrap();
        prop_assert_eq!(again, star);
        prop_assert_eq!(g2, weierstrass::UnimodularMatrix::IDENTITY);
    }

    #[test]
    fn full_reduction_recomposes(t in tau_strategy(), re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let z = Complex64::new(re, im);
        let r = reduce(t, z).unwrap();
        let back = (r.z_star + r.m as f64 + r.tau_star.value() * r.n as f64) * r.scale;
        prop_assert!((back - z).norm() <= 1e-9 * (1.0 + z.norm()));
    }

    #[test]
    fn wp_is_even_and_periodic(t in tau_strategy(), a in 0.05f64..0.95, b in 0.05f64..0.95) {
        let e = Engine::default();
        let z = t.value() * a + b;
        let p = e.wp_anywhere(t, z).unwrap().value;
        let scale = p.norm().max(1.0);
        prop_assert!((e.wp_anywhere(t, -z).unwrap().value - p).norm() <= 1e-8 * scale);
        prop_assert!((e.wp_anywhere(t, z + t.value() - 2.0).unwrap().value - p).norm() <= 1e-8 * scale);
    }
}
