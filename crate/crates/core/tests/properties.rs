use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use specpol::classify::{assignment, track, DEFAULT_RADIUS};
use specpol::linalg::{rayleigh, ComplexMatrix, UnitVector};
use specpol::numrange::{hausdorff_clipped, hull_in, nr_support, ClipBox, ConvexRegion, SupportFunction};

const ANGLES: usize = 360;

fn complex() -> impl Strategy<Value = Complex64> {
    (-5.0..5.0f64, -5.0..5.0f64).prop_map(|(a, b)| Complex64::new(a, b))
}

fn matrix(max_dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    (2..=max_dim).prop_flat_map(|n| {
        prop::collection::vec(complex(), n * n).prop_map(move |e| ComplexMatrix::new(n, n, e).unwrap())
    })
}

fn matrix_and_vector() -> impl Strategy<Value = (ComplexMatrix, Vec<Complex64>)> {
    matrix(6).prop_flat_map(|m| {
        let n = m.rows();
        (Just(m), prop::collection::vec(complex(), n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rayleigh_quotients_lie_in_the_range((m, x) in matrix_and_vector()) {
        prop_assume!(x.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-6);
        let sf = nr_support(&m, ANGLES, 1e-10).unwrap();
        let z = rayleigh(&m, &UnitVector::normalize(x).unwrap()).unwrap();
        for j in 0..sf.len() {
            let (c, s) = sf.direction(j);
            prop_assert!(z.re * c + z.im * s <= sf.support[j] + 1e-9 * (1.0 + m.max_abs()));
        }
    }

    #[test]
    fn diagonal_range_is_hull_of_entries(d in prop::collection::vec(complex(), 1..8)) {
        let sf = nr_support(&ComplexMatrix::from_diagonal(&d), ANGLES, 1e-10).unwrap();
        let hull = SupportFunction::from_points(&d, ANGLES);
        for (a, b) in sf.support.iter().zip(&hull.support) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn support_rotates_and_translates(m in matrix(5), steps in 0..ANGLES, shift in complex()) {
        let n = m.rows();
        let rot = Complex64::from_polar(1.0, 2.0 * PI * steps as f64 / ANGLES as f64);
        let moved = ComplexMatrix::from_fn(n, n, |i, j| rot * m[(i, j)] + if i == j { shift } else { Complex64::new(0.0, 0.0) });
        let s0 = nr_support(&m, ANGLES, 1e-10).unwrap();
        let s1 = nr_support(&moved, ANGLES, 1e-10).unwrap();
        for j in 0..ANGLES {
            let (c, s) = s1.direction(j);
            let expected = s0.support[(j + ANGLES - steps) % ANGLES] + shift.re * c + shift.im * s;
            prop_assert!((s1.support[j] - expected).abs() <= 1e-8);
        }
    }

    #[test]
    fn hull_union_dominates_and_intersection_is_dominated(a in prop::collection::vec(complex(), 1..6), b in prop::collection::vec(complex(), 1..6)) {
        let (sa, sb) = (SupportFunction::from_points(&a, ANGLES), SupportFunction::from_points(&b, ANGLES));
        let u = SupportFunction::hull_union(&[&sa, &sb]).unwrap();
        let i = SupportFunction::intersection(&[&sa, &sb]).unwrap();
        for j in 0..ANGLES {
            prop_assert!(u.support[j] >= sa.support[j].max(sb.support[j]));
            prop_assert!(i.support[j] <= sa.support[j].min(sb.support[j]));
        }
    }

    #[test]
    fn hausdorff_is_symmetric_and_vanishes_on_the_diagonal(a in prop::collection::vec(complex(), 3..6), b in prop::collection::vec(complex(), 3..6)) {
        let clip = ClipBox::new(-6.0, 6.0, -6.0, 6.0);
        let (ra, rb): (ConvexRegion, ConvexRegion) = (hull_in(&a, clip, ANGLES), hull_in(&b, clip, ANGLES));
        prop_assume!(!ra.empty && !rb.empty);
        prop_assert!(hausdorff_clipped(&ra, &ra, clip).unwrap() <= 1e-12);
        let (ab, ba) = (hausdorff_clipped(&ra, &rb, clip).unwrap(), hausdorff_clipped(&rb, &ra, clip).unwrap());
        prop_assert!((ab - ba).abs() <= 1e-12);
    }

    #[test]
    fn assignment_is_optimal(cost in (1..=5usize).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(0.0..10.0f64, n), n))) {
        let n = cost.len();
        let got: f64 = assignment(&cost).iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
        let mut best = f64::INFINITY;
        let mut perm: Vec<usize> = (0..n).collect();
        permutations(&mut perm, 0, &mut |p| {
            best = best.min(p.iter().enumerate().map(|(i, &j)| cost[i][j]).sum());
        });
        prop_assert!((got - best).abs() <= 1e-9);
    }

    #[test]
    fn constant_levels_track_without_drift(values in prop::collection::vec(complex(), 1..6), levels in 4..7usize) {
        let lv: Vec<(f64, Vec<Complex64>)> = (0..levels).map(|k| (k as f64, values.clone())).collect();
        let points = track(&lv, DEFAULT_RADIUS).unwrap();
        prop_assert_eq!(points.len(), values.len());
        prop_assert!(points.iter().all(|p| p.cauchy_rate == 0.0 && p.span == levels));
    }
}

fn permutations(p: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, visit);
        p.swap(k, i);
    }
}
