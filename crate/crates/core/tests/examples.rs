//! Worked examples for maps, states and product extensions, each checked by
//! direct matrix computation.

mod common;

use common::{c, ms};
use fermikit_core::maps::{conjugation, left_multiply, right_multiply, theta_map};
use fermikit_core::random::{random_operator, random_parity_operator, rng};
use fermikit_core::{
    classify_correlation, embed, is_local_map, is_physical_map, jw_ladder, map_embed, map_tensor, ordered_product,
    product_extension_classify, DensityMatrix, LadderKind, LocalTarget, MapProduct, ModeSet, Operator,
    OrderedPartition, Partition, Sign, SsrMode, SuperOp, DEFAULT_TOL,
};

fn ladder(i: u32, y: &ModeSet) -> Operator {
    jw_ladder(i, y, LadderKind::Annihilate).unwrap()
}

/// `Π⁺ ∘ Ω ∘ Π⁺` with `Π⁺ = (I + Θ) / 2`.
fn even_compression(omega: &SuperOp) -> SuperOp {
    let y = omega.input().clone();
    let p = SuperOp::identity(&y).unwrap().add(&theta_map(&y).unwrap()).unwrap().scale(c(0.5));
    p.compose(omega).unwrap().compose(&p).unwrap()
}

fn random_even_map(x: &ModeSet, seed: u64) -> SuperOp {
    let mut g = rng(seed);
    let l = left_multiply(&random_parity_operator(x, Sign::Plus, &mut g)).unwrap();
    let r = right_multiply(&random_parity_operator(x, Sign::Plus, &mut g)).unwrap();
    l.compose(&r).unwrap().add(&theta_map(x).unwrap()).unwrap()
}

#[test]
fn ordered_map_product_acts_in_the_defining_order() {
    let mut g = rng(31);
    let y = ms("{1,2,3}");
    for xi in ["{2}|{3}|{1}", "{1}|{2}|{3}", "{3}|{1}|{2}"] {
        let xi: OrderedPartition = xi.parse().unwrap();
        let maps: Vec<SuperOp> = xi
            .parts()
            .iter()
            .map(|p| {
                let l = left_multiply(&random_operator(p, &mut g)).unwrap();
                l.compose(&conjugation(&random_operator(p, &mut g)).unwrap()).unwrap()
            })
            .collect();
        let ops: Vec<Operator> = xi.parts().iter().map(|p| random_operator(p, &mut g)).collect();
        let images: Vec<Operator> = maps.iter().zip(&ops).map(|(m, a)| m.apply(a).unwrap()).collect();
        let t = map_tensor(MapProduct::Ordered, &xi, &maps).unwrap();
        let lhs = t.apply(&ordered_product(&xi, &ops).unwrap()).unwrap();
        assert!(lhs.approx_eq(&ordered_product(&xi, &images).unwrap(), 1e-10), "{xi}");
        assert_eq!(y, *xi.modes());
    }
}

#[test]
fn identity_maps_give_identity() {
    let xi: OrderedPartition = "{2}|{1,3}".parse().unwrap();
    let ids: Vec<SuperOp> = xi.parts().iter().map(|p| SuperOp::identity(p).unwrap()).collect();
    let y = xi.modes().clone();
    for kind in [MapProduct::Fermionic, MapProduct::Ordered] {
        assert_eq!(map_tensor(kind, &xi, &ids).unwrap(), SuperOp::identity(&y).unwrap());
        assert_eq!(map_embed(kind, &ms("{2}"), &y, &ids[0]).unwrap(), SuperOp::identity(&y).unwrap());
    }
}

#[test]
fn odd_factor_flips_sign_on_swapped_product() {
    let (x1, x2) = (ms("{1}"), ms("{2}"));
    let xi = OrderedPartition::new(vec![x1.clone(), x2.clone()]).unwrap();
    let odd = left_multiply(&ladder(1, &x1)).unwrap();
    let t = map_tensor(MapProduct::Ordered, &xi, &[odd.clone(), SuperOp::identity(&x2).unwrap()]).unwrap();
    let a1 = ladder(1, &x1).dagger();
    let a2 = ladder(2, &x2);
    let swapped = OrderedPartition::new(vec![x2, x1]).unwrap();
    let lhs = t.apply(&ordered_product(&swapped, &[a2.clone(), a1.clone()]).unwrap()).unwrap();
    let rhs = ordered_product(&swapped, &[a2, odd.apply(&a1).unwrap()]).unwrap();
    assert!(rhs.max_abs() > 0.5);
    assert_eq!(lhs, rhs.scale(c(-1.0)));
}

#[test]
fn even_embedded_maps_are_strong_extensions() {
    let mut g = rng(77);
    let y = ms("{1,2,3}");
    for (k, x) in ["{2}", "{1,3}", "{1}"].into_iter().enumerate() {
        let x = ms(x);
        let xb = y.difference(&x);
        let omega = random_even_map(&x, k as u64);
        let big = map_embed(MapProduct::Ordered, &x, &y, &omega).unwrap();
        for _ in 0..4 {
            let (a, b) = (random_operator(&x, &mut g), random_operator(&xb, &mut g));
            let (ea, eb) = (embed(&x, &y, &a).unwrap(), embed(&xb, &y, &b).unwrap());
            let ew = embed(&x, &y, &omega.apply(&a).unwrap()).unwrap();
            let first = big.apply(&ea.mul(&eb).unwrap()).unwrap();
            assert!(first.approx_eq(&ew.mul(&eb).unwrap(), 1e-10), "{x}");
            let second = big.apply(&eb.mul(&ea).unwrap()).unwrap();
            assert!(second.approx_eq(&eb.mul(&ew).unwrap(), 1e-10), "{x}");
        }
    }
}

#[test]
fn odd_embedded_map_fails_the_second_extension_identity() {
    let y = ms("{1,2}");
    let (x, xb) = (ms("{1}"), ms("{2}"));
    let omega = left_multiply(&ladder(1, &x)).unwrap();
    let big = map_embed(MapProduct::Ordered, &x, &y, &omega).unwrap();
    let (a, b) = (ladder(1, &x).dagger(), ladder(2, &xb));
    let (ea, eb) = (embed(&x, &y, &a).unwrap(), embed(&xb, &y, &b).unwrap());
    let first = big.apply(&ea.mul(&eb).unwrap()).unwrap();
    assert_eq!(first, big.apply(&ea).unwrap().mul(&eb).unwrap());
    let lhs = big.apply(&eb.mul(&ea).unwrap()).unwrap();
    let rhs = eb.mul(&big.apply(&ea).unwrap()).unwrap();
    assert!(rhs.max_abs() > 0.5);
    assert_eq!(lhs, rhs.scale(c(-1.0)));
}

#[test]
fn physicality_examples() {
    let y = ms("{1,2}");
    let compressed = even_compression(&random_even_map(&y, 3));
    assert!(is_physical_map(&compressed, DEFAULT_TOL));
    assert!(!is_physical_map(&SuperOp::identity(&y).unwrap(), DEFAULT_TOL));
    assert!(!is_physical_map(&theta_map(&y).unwrap(), DEFAULT_TOL));
}

#[test]
fn embedded_physical_map_is_local() {
    let y = ms("{1,2,3}");
    for x in ["{2}", "{1,3}"] {
        let x = ms(x);
        let omega = even_compression(&random_even_map(&x, 5));
        let big = map_embed(MapProduct::Ordered, &x, &y, &omega).unwrap();
        let report = is_local_map(&big, LocalTarget::Modes(&x), DEFAULT_TOL).unwrap();
        assert!(report.local, "{x}: residual {}", report.residual);
        assert!(report.factors[0].max_abs_diff(&omega) <= 1e-10);
    }
}

#[test]
fn product_of_physical_maps_is_partition_local() {
    let xi: Partition = "{1,3}|{2}".parse().unwrap();
    let ordered = xi.canonical_order();
    let maps: Vec<SuperOp> =
        ordered.parts().iter().enumerate().map(|(k, p)| even_compression(&random_even_map(p, 40 + k as u64))).collect();
    let t = map_tensor(MapProduct::Ordered, &ordered, &maps).unwrap();
    let report = is_local_map(&t, LocalTarget::Partition(&xi), DEFAULT_TOL).unwrap();
    assert!(report.local, "residual {}", report.residual);
}

#[test]
fn swap_of_subsystems_is_not_local() {
    let y = ms("{1,2}");
    // A ↦ S A S† with S exchanging the occupations of modes 1 and 2
    let mut s = Operator::zeros(&y).into_matrix();
    for (from, to) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        s[(to, from)] = c(1.0);
    }
    let swap = even_compression(&conjugation(&Operator::new(y.clone(), s).unwrap()).unwrap());
    assert!(is_physical_map(&swap, DEFAULT_TOL));
    let report = is_local_map(&swap, LocalTarget::Modes(&ms("{1}")), DEFAULT_TOL).unwrap();
    assert!(!report.local);
    assert!(report.residual > 0.1);
}

#[test]
fn physical_map_on_odd_odd_block_only_is_local() {
    let y = ms("{1,2}");
    // keep only the (−,−) block: the span of E^{01,10} and E^{10,01}
    let omega =
        SuperOp::diagonal(&y, |r, col| if (r, col) == (1, 2) || (r, col) == (2, 1) { c(1.0) } else { c(0.0) }).unwrap();
    assert!(is_physical_map(&omega, DEFAULT_TOL));
    let report = is_local_map(&omega, LocalTarget::Modes(&ms("{1}")), DEFAULT_TOL).unwrap();
    assert!(report.local);
    assert_eq!(report.factors[0].max_abs(), 0.0);
}

fn diag_state(y: &ModeSet, p: &[f64]) -> Operator {
    Operator::diagonal(y, |k| c(p[k]))
}

#[test]
fn product_of_even_marginals_is_product_physical() {
    let (x1, x2) = (ms("{1}"), ms("{2}"));
    let xi = OrderedPartition::new(vec![x1.clone(), x2.clone()]).unwrap();
    let rho = ordered_product(&xi, &[diag_state(&x1, &[0.7, 0.3]), diag_state(&x2, &[0.4, 0.6])]).unwrap();
    let rho = DensityMatrix::new(rho, DEFAULT_TOL).unwrap();
    let part = xi.unordered();
    for mode in [SsrMode::NoSsr, SsrMode::Ssr] {
        let r = classify_correlation(&rho, &part, mode, DEFAULT_TOL).unwrap();
        assert!(r.physical && r.uncorrelated);
        assert_ne!(r.product_physical, Some(false));
    }
}

#[test]
fn odd_odd_coherence_is_uncorrelated_but_not_product() {
    let y = ms("{1,2}");
    let (p1, p2) = ([0.7, 0.3], [0.4, 0.6]);
    let probs: Vec<f64> = (0..4).map(|k| p1[k >> 1] * p2[k & 1]).collect();
    let coherence = 0.2;
    assert!(coherence * coherence <= probs[1] * probs[2]);
    let mut m = diag_state(&y, &probs).into_matrix();
    m[(1, 2)] = c(coherence);
    m[(2, 1)] = c(coherence);
    let rho = DensityMatrix::new(Operator::new(y.clone(), m).unwrap(), DEFAULT_TOL).unwrap();
    let xi: Partition = "{1}|{2}".parse().unwrap();
    let r = classify_correlation(&rho, &xi, SsrMode::Ssr, DEFAULT_TOL).unwrap();
    assert!(r.physical);
    assert!(r.uncorrelated, "residual {}", r.uncorrelated_residual);
    assert_eq!(r.product_physical, Some(false));
    assert!((r.product_residual - coherence).abs() <= 1e-12);
    let plain = classify_correlation(&rho, &xi, SsrMode::NoSsr, DEFAULT_TOL).unwrap();
    assert!(!plain.uncorrelated);
}

#[test]
fn one_mixed_psd_operand_among_even_ones_keeps_positivity() {
    let mut g = rng(8);
    let y = ms("{1,2,3}");
    for xi in ["{1}|{2}|{3}", "{3}|{1}|{2}", "{2}|{1,3}", "{1,3}|{2}"] {
        let xi: OrderedPartition = xi.parse().unwrap();
        for mixed_at in 0..xi.parts().len() {
            let ops: Vec<Operator> = xi
                .parts()
                .iter()
                .enumerate()
                .map(|(k, p)| {
                    if k == mixed_at {
                        let v = random_operator(p, &mut g);
                        v.mul(&v.dagger()).unwrap()
                    } else {
                        let v = random_parity_operator(p, Sign::Plus, &mut g);
                        v.mul(&v.dagger()).unwrap()
                    }
                })
                .collect();
            let r = product_extension_classify(&xi, &ops, 1e-10).unwrap();
            assert!(r.counts.mixed <= 1);
            assert!(r.self_adjoint && r.psd, "{xi}");
            assert!(r.min_eigenvalue.unwrap() >= -1e-10);
        }
        assert_eq!(xi.modes(), &y);
    }
}

#[test]
fn two_odd_component_operands_break_self_adjointness() {
    let xi: OrderedPartition = "{2}|{1}".parse().unwrap();
    let op = |p: &str, a: f64| {
        Operator::new(ms(p), nalgebra::DMatrix::from_row_slice(2, 2, &[c(1.0), c(a), c(a), c(1.0)])).unwrap()
    };
    let r = product_extension_classify(&xi, &[op("{2}", 0.5), op("{1}", 0.5)], 1e-10).unwrap();
    assert_eq!(r.counts.mixed, 2);
    assert!(!r.self_adjoint);
}
