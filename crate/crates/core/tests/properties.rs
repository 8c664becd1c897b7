use core::f64::consts::PI;

use gapkit_core::density::{
    lower_bm_density, monotone_assignment, redheffer_sum, regularity_integral, upper_bm_density, DensityOptions,
};
use gapkit_core::gap::{gram_spectrum, taming_factor};
use gapkit_core::transport::{herglotz_residues, InterlacedPair};
use gapkit_core::{AtomicMeasure, Complex64, DiscreteSet, Removal};
use proptest::prelude::*;

/// Rectangular Hungarian algorithm: minimal cost of matching every row to a distinct column.
fn hungarian(cost: &[Vec<f64>]) -> f64 {
    let n = cost.len();
    let m = cost[0].len();
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=m {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=m).filter(|j| p[*j] != 0).map(|j| cost[p[j] - 1][j - 1]).sum()
}

fn optimal_cost(points: &[f64], a: f64) -> f64 {
    let span = points.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let k = (a * span).ceil() as i64 + points.len() as i64 + 2;
    let cols: Vec<i64> = (-k..=k).filter(|n| *n != 0).collect();
    let cost: Vec<Vec<f64>> =
        points.iter().map(|l| cols.iter().map(|n| (1.0 / l - a / *n as f64).abs()).collect()).collect();
    hungarian(&cost)
}

fn heuristic_cost(points: &[f64], a: f64) -> f64 {
    points.iter().zip(monotone_assignment(points, a)).map(|(l, n)| (1.0 / l - a / n as f64).abs()).sum()
}

#[test]
fn brute_force_matches_monotone_assignment_on_even_integers() {
    for n in [4usize, 10, 20] {
        let pts: Vec<f64> = (1..=n as i64 / 2).flat_map(|k| [-2.0 * k as f64, 2.0 * k as f64]).collect();
        let mut pts = pts;
        pts.sort_by(f64::total_cmp);
        for a in [0.3, 0.4, 0.5] {
            let (h, o) = (heuristic_cost(&pts, a), optimal_cost(&pts, a));
            assert!((h - o).abs() < 1e-12, "n={n} a={a}: {h} vs {o}");
        }
    }
}

fn separated_points() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.3f64..2.0, 2..30).prop_flat_map(|gaps| {
        (Just(gaps), -10.0f64..10.0).prop_map(|(gaps, start)| {
            let mut x = start;
            gaps.iter()
                .map(|g| {
                    x += g;
                    x
                })
                .collect()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn heuristic_never_beats_optimum(pts in separated_points(), a in 0.2f64..2.0) {
        let pts: Vec<f64> = pts.into_iter().filter(|x| x.abs() > 0.05).take(8).collect();
        prop_assume!(!pts.is_empty());
        prop_assert!(heuristic_cost(&pts, a) >= optimal_cost(&pts, a) - 1e-12);
    }

    #[test]
    fn assignment_is_monotone_and_avoids_zero(pts in separated_points(), a in 0.05f64..3.0) {
        let n = monotone_assignment(&pts, a);
        prop_assert!(n.iter().all(|k| *k != 0));
        prop_assert!(n.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn translation_keeps_separation(pts in separated_points(), x in -50.0f64..50.0) {
        let s = DiscreteSet::explicit(pts).unwrap();
        let d0 = s.separation().unwrap();
        let d1 = s.translate(x).separation().unwrap();
        prop_assert!((d0 - d1).abs() <= 1e-12 * d0.max(1.0));
    }

    #[test]
    fn counting_function_steps_by_one(pts in separated_points()) {
        let s = DiscreteSet::explicit(pts.clone()).unwrap();
        let lo = pts[0] - 1.0;
        let hi = pts[pts.len() - 1] + 1.0;
        let mut prev = s.counting_function(lo).unwrap();
        let steps = 2000;
        let mut total = 0;
        for i in 1..=steps {
            let x = lo + (hi - lo) * i as f64 / steps as f64;
            let c = s.counting_function(x).unwrap();
            prop_assert!(c >= prev);
            total += c - prev;
            prev = c;
        }
        prop_assert_eq!(total as usize, pts.len());
    }

    #[test]
    fn snapping_offsets_in_range(alpha_base in 0.5f64..3.0, frac in 0.1f64..0.99) {
        let s = DiscreteSet::lattice(alpha_base, 30.0).unwrap();
        let delta = frac * alpha_base / 4.0;
        let (snapped, offsets) = s.snap_to_lattice(delta, delta / 4.0).unwrap();
        prop_assert!(offsets.iter().all(|e| *e > delta / 2.0 && *e < delta));
        prop_assert!(snapped.separation().unwrap() > 0.0);
    }

    #[test]
    fn modulation_preserves_variation_and_shifts(ws in prop::collection::vec((-5.0f64..5.0, -1.0f64..1.0, -1.0f64..1.0), 1..10), s in -3.0f64..3.0, x in -3.0f64..3.0) {
        let mut seen = Vec::new();
        let pairs: Vec<(f64, Complex64)> = ws.into_iter().filter_map(|(p, re, im)| {
            let p = (p * 100.0).round() / 100.0;
            if seen.contains(&p) { None } else { seen.push(p); Some((p, Complex64::new(re, im))) }
        }).collect();
        let mu = AtomicMeasure::from_pairs(pairs).unwrap();
        let m = mu.modulate(s);
        prop_assert!((m.total_variation() - mu.total_variation()).abs() <= 1e-12 * mu.total_variation().max(1.0));
        prop_assert!((m.fourier(x) - mu.fourier(x + s)).norm() <= 1e-12 * mu.total_variation().max(1.0));
    }

    #[test]
    fn cauchy_is_linear(x in -5.0f64..5.0, y in 0.1f64..5.0) {
        let m1 = AtomicMeasure::from_pairs([(0.5, Complex64::new(1.0, 2.0)), (-1.0, Complex64::new(0.3, 0.0))]).unwrap();
        let m2 = AtomicMeasure::from_pairs([(0.5, Complex64::new(-0.5, 0.0)), (2.0, Complex64::new(0.0, 1.0))]).unwrap();
        let z = Complex64::new(x, y);
        let lhs = m1.add(&m2).cauchy_transform(z).unwrap();
        let rhs = m1.cauchy_transform(z).unwrap() + m2.cauchy_transform(z).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn gram_depends_on_differences_only(pts in separated_points(), x in -20.0f64..20.0, a in 0.1f64..4.0) {
        prop_assume!(pts.len() >= 4);
        let shifted: Vec<f64> = pts.iter().map(|p| p - x).collect();
        let g0 = gram_spectrum(&pts, a).unwrap();
        let g1 = gram_spectrum(&shifted, a).unwrap();
        prop_assert!((g0.lambda_min - g1.lambda_min).abs() < 1e-12 * a.max(1.0) * pts.len() as f64);
    }

    #[test]
    fn taming_factor_is_normalized_and_bounded(t in -100.0f64..100.0, eps in 0.01f64..2.0, m in 1u32..6) {
        prop_assert_eq!(taming_factor(0.0, eps, m), 1.0);
        prop_assert!(taming_factor(t, eps, m).abs() <= 1.0 + 1e-15);
    }

    #[test]
    fn herglotz_residues_positive(seed in 0u64..1000, shift in 0.1f64..0.75) {
        let base = DiscreteSet::lattice(1.0, 100.0).unwrap().translate(-shift);
        let pair = InterlacedPair::positive_perturbation(&base, 48, 0.2, seed).unwrap();
        let h = herglotz_residues(&pair).unwrap();
        prop_assert!(h.c.iter().all(|c| *c > 0.0));
        prop_assert!(h.b1 >= 0.0);
        for (x, y) in [(0.3, 1.0), (-7.0, 0.2), (12.0, 3.0)] {
            let up = pair.phi(Complex64::new(x, y)).unwrap();
            let down = pair.phi(Complex64::new(x, -y)).unwrap();
            prop_assert!(up.im > 0.0 && down.im < 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn redheffer_zero_identity(k in 1u32..9) {
        let alpha = k as f64 / 4.0;
        let s = DiscreteSet::lattice_minus(alpha, Removal::Indices(vec![0]), 200.0).unwrap();
        let r = redheffer_sum(&s, 1.0 / alpha, 200.0).unwrap();
        prop_assert!(r.partial_sums.iter().all(|(_, v)| *v < 1e-12));
    }

    #[test]
    fn regularity_verdict_translation_invariant(x in -3.0f64..3.0, a in prop::sample::select(vec![0.5, 1.0, 1.5])) {
        let z = DiscreteSet::lattice(1.0, 1000.0).unwrap();
        let shifted = DiscreteSet::truncation(z.points().iter().map(|p| p - x).collect(), 995.0).unwrap();
        let v0 = regularity_integral(&z, a, 990.0).unwrap().verdict;
        let v1 = regularity_integral(&shifted, a, 990.0).unwrap().verdict;
        prop_assert_eq!(v0, v1);
    }

    #[test]
    fn lower_below_upper(modulus in 2u32..6, r in 0u32..5) {
        let r = r % modulus;
        let s = DiscreteSet::lattice_minus(1.0, Removal::Residues { modulus, residues: vec![r] }, 10.0).unwrap();
        let opts = DensityOptions { radius: 2048.0, ..Default::default() };
        let up = upper_bm_density(&s, &opts).unwrap();
        let lo = lower_bm_density(&s, &opts).unwrap();
        prop_assert!(lo.estimate.bracket.0 <= up.bracket.1);
        prop_assert!(lo.witness.bracket.0 <= up.bracket.1);
        prop_assert!(up.exact_in_bracket == Some(true));
    }
}

#[test]
fn radius_of_thinned_lattice_is_monotone() {
    let opts = DensityOptions { radius: 2048.0, ..Default::default() };
    let thin = DiscreteSet::lattice_minus(1.0, Removal::Residues { modulus: 4, residues: vec![0, 1] }, 10.0).unwrap();
    let thicker = DiscreteSet::lattice_minus(1.0, Removal::Residues { modulus: 4, residues: vec![0] }, 10.0).unwrap();
    let u0 = upper_bm_density(&thin, &opts).unwrap();
    let u1 = upper_bm_density(&thicker, &opts).unwrap();
    assert!(PI * u0.estimate <= PI * u1.estimate + PI * u1.width());
}
