use cyclicity_core::capacity::{box_dimension, paper_capacity_with_samples, BoundaryCloud};
use cyclicity_core::cyclicity::cyclicity_index;
use cyclicity_core::freespace::{
    abelianize, evaluate_on_tuple, free_invert, free_multiply, free_norm, sample_row_contraction, FreePolynomial,
    FreeSpaceSpec, Word,
};
use cyclicity_core::mixednorm::{
    luxemburg_norm, mixed_norm, modular, AngularScheme, ExponentFamily, MixedSpec, RadialMeasure, VarExpSpec,
};
use cyclicity_core::{Complex64, MultiIndex, Polynomial, Preset, SpaceSpec};
use proptest::prelude::*;

fn coeff() -> impl Strategy<Value = Complex64> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(a, b)| Complex64::new(a, b))
}

fn poly(d: usize, max_deg: usize) -> impl Strategy<Value = Polynomial> {
    let idx = MultiIndex::up_to_degree(d, max_deg);
    proptest::collection::vec((0..idx.len(), coeff()), 1..6).prop_map(move |terms| {
        Polynomial::from_terms(d, terms.into_iter().map(|(i, c)| (idx[i].clone(), c))).unwrap()
    })
}

fn free_poly(d: usize, max_len: usize) -> impl Strategy<Value = FreePolynomial> {
    let words = Word::up_to_length(d, max_len);
    proptest::collection::vec((0..words.len(), coeff()), 1..6).prop_map(move |terms| {
        FreePolynomial::from_terms(d, terms.into_iter().map(|(i, c)| (words[i].clone(), c))).unwrap()
    })
}

fn close(a: &Polynomial, b: &Polynomial, tol: f64) -> bool {
    let diff = a.checked_sub(b).unwrap();
    let ok = diff.terms().all(|(_, c)| c.norm() <= tol);
    ok
}

fn close_free(a: &FreePolynomial, b: &FreePolynomial, tol: f64) -> bool {
    let diff = a.checked_sub(b).unwrap();
    let ok = diff.terms().all(|(_, c)| c.norm() <= tol);
    ok
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn polynomial_ring_axioms(f in poly(2, 3), g in poly(2, 3), h in poly(2, 3)) {
        let fg = f.multiply(&g).unwrap();
        prop_assert!(close(&fg, &g.multiply(&f).unwrap(), 1e-12));
        let left = fg.multiply(&h).unwrap();
        let right = f.multiply(&g.multiply(&h).unwrap()).unwrap();
        prop_assert!(close(&left, &right, 1e-10));
        let dist = f.multiply(&g.checked_add(&h).unwrap()).unwrap();
        let sum = fg.checked_add(&f.multiply(&h).unwrap()).unwrap();
        prop_assert!(close(&dist, &sum, 1e-10));
    }

    #[test]
    fn evaluation_is_multiplicative(f in poly(2, 3), g in poly(2, 3), x in -0.7f64..0.7, y in -0.7f64..0.7) {
        let z = [Complex64::new(x, y), Complex64::new(y, -x / 2.0)];
        let lhs = f.multiply(&g).unwrap().evaluate(&z).unwrap();
        let rhs = f.evaluate(&z).unwrap() * g.evaluate(&z).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
    }

    #[test]
    fn hilbert_norm_parallelogram(f in poly(2, 4), g in poly(2, 4)) {
        let spec = SpaceSpec::preset(Preset::DirichletType(2)).unwrap();
        let a = spec.norm_sq(&f.checked_add(&g).unwrap()).unwrap();
        let b = spec.norm_sq(&f.checked_sub(&g).unwrap()).unwrap();
        let c = 2.0 * (spec.norm_sq(&f).unwrap() + spec.norm_sq(&g).unwrap());
        prop_assert!((a + b - c).abs() <= 1e-10 * (1.0 + c));
    }

    #[test]
    fn residual_nonincreasing(f in poly(1, 3)) {
        let spec = SpaceSpec::preset(Preset::Bergman(1)).unwrap();
        let mut prev = f64::INFINITY;
        for n in 0..8 {
            let r = cyclicity_index(&spec, &f, n).unwrap().residual;
            prop_assert!(r <= prev + 1e-12);
            prev = r;
        }
    }

    #[test]
    fn abelianize_is_a_homomorphism(f in free_poly(2, 3), g in free_poly(2, 3)) {
        let lhs = abelianize(&free_multiply(&f, &g).unwrap());
        let rhs = abelianize(&f).multiply(&abelianize(&g)).unwrap();
        prop_assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn abelianize_contracts_into_drury_arveson(f in free_poly(3, 4)) {
        let da = SpaceSpec::drury_arveson(3, 10).unwrap();
        let fock = FreeSpaceSpec::free_hardy(3, 10).unwrap();
        prop_assert!(da.norm(&abelianize(&f)).unwrap() <= free_norm(&fock, &f).unwrap() + 1e-12);
    }

    #[test]
    fn free_evaluation_is_multiplicative(f in free_poly(2, 3), g in free_poly(2, 3), seed in 0u64..1000) {
        let z = sample_row_contraction(2, 4, 0.8, seed).unwrap();
        let lhs = evaluate_on_tuple(&free_multiply(&f, &g).unwrap(), &z).unwrap();
        let rhs = evaluate_on_tuple(&f, &z).unwrap() * evaluate_on_tuple(&g, &z).unwrap();
        prop_assert!((lhs - rhs).iter().all(|c| c.norm() <= 1e-10));
    }

    #[test]
    fn free_inverse_is_exact_through_length(f in free_poly(2, 2), a0 in 0.5f64..3.0) {
        let mut psi = f.clone();
        psi.add_term(Word::empty(), Complex64::new(a0, 0.0) - f.coeff(&Word::empty()));
        let theta = free_invert(&psi, 5).unwrap();
        let prod = free_multiply(&psi, &theta).unwrap().truncate(5);
        prop_assert!(close_free(&prod, &FreePolynomial::identity(2), 1e-9));
    }

    #[test]
    fn mixed_norm_axioms(f in poly(1, 4), g in poly(1, 4), c in coeff(), pq in prop::sample::select(vec![(1.0, 1.0), (1.5, 3.0), (3.0, 1.2), (2.0, 2.0)])) {
        let spec = MixedSpec {
            d: 1, order: 1, p: pq.0, q: pq.1,
            radial: RadialMeasure::PowerWeight { beta: 1.0 }, radial_nodes: 24,
            angular: AngularScheme::Trapezoid { m: 64 }, constant_term: true,
        };
        let nf = mixed_norm(&spec, &f).unwrap();
        let ng = mixed_norm(&spec, &g).unwrap();
        let sum = mixed_norm(&spec, &f.checked_add(&g).unwrap()).unwrap();
        prop_assert!(sum <= nf + ng + 1e-8);
        let scaled = mixed_norm(&spec, &f.scale(c)).unwrap();
        prop_assert!((scaled - c.norm() * nf).abs() <= 1e-8 * (1.0 + scaled));
    }

    #[test]
    fn luxemburg_axioms(f in poly(1, 4), g in poly(1, 4), c in coeff(), b in 0.0f64..2.0) {
        let spec = VarExpSpec {
            d: 1, order: 0, exponent: ExponentFamily { a: 1.2, b, c: 1.5 },
            radial: RadialMeasure::PowerWeight { beta: 1.0 }, radial_nodes: 24,
            angular: AngularScheme::Trapezoid { m: 64 }, bisection_tol: 1e-14, constant_term: true,
        };
        let nf = luxemburg_norm(&spec, &f).unwrap();
        let ng = luxemburg_norm(&spec, &g).unwrap();
        let sum = luxemburg_norm(&spec, &f.checked_add(&g).unwrap()).unwrap();
        prop_assert!(sum <= nf + ng + 1e-8);
        let scaled = luxemburg_norm(&spec, &f.scale(c)).unwrap();
        prop_assert!((scaled - c.norm() * nf).abs() <= 1e-8 * (1.0 + scaled));
        if nf > 0.0 {
            prop_assert!((modular(&spec, &f, nf).unwrap() - 1.0).abs() <= 1e-6);
        }
    }
}

#[test]
fn paper_capacity_is_monotone_in_radius_and_cloud() {
    let small = BoundaryCloud::arc(1.0, 300);
    let big = small.union(&BoundaryCloud::arc(2.5, 300)).unwrap();
    let mut prev = 0.0;
    for eps in [0.001, 0.005, 0.02, 0.1] {
        let s = paper_capacity_with_samples(&small, 1.0, eps, 8192).unwrap();
        let b = paper_capacity_with_samples(&big, 1.0, eps, 8192).unwrap();
        assert!(b >= s - 1e-12);
        assert!(s >= prev - 1e-12);
        prev = s;
    }
}

#[test]
fn paper_capacity_in_higher_dimension() {
    // the circle {(e^{it}, 0)} has σ-measure zero in ∂𝔹_2; its neighbourhood shrinks with ε
    let pts: Vec<Vec<f64>> = (0..2000)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / 2000.0;
            vec![t.cos(), t.sin(), 0.0, 0.0]
        })
        .collect();
    let cloud = BoundaryCloud::new(2, pts, 0.0).unwrap();
    let wide = paper_capacity_with_samples(&cloud, 1.0, 0.3, 20000).unwrap();
    let narrow = paper_capacity_with_samples(&cloud, 1.0, 0.05, 20000).unwrap();
    assert!(narrow < wide && narrow < 0.01);
    // σ{|z_2| < r} = r² for d = 2; the 0.3-neighbourhood is |z_2| < sin-ish of 0.3
    assert!((wide - 0.09).abs() < 0.02, "{wide}");
}

#[test]
fn box_dimension_of_union_dominates() {
    let arc = BoundaryCloud::arc(2.0, 4096);
    let point = BoundaryCloud::new(1, vec![vec![-1.0, 0.0]], 0.0).unwrap();
    let a = box_dimension(&arc, 2, 8).unwrap().dimension;
    let p = box_dimension(&point, 2, 8).unwrap().dimension;
    let u = box_dimension(&arc.union(&point).unwrap(), 2, 8).unwrap().dimension;
    assert!(u >= a.max(p) - 0.1);
}
