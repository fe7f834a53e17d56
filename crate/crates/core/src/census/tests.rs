use std::sync::Arc;

use super::*;
use crate::ffield::AmbientField;
use crate::group::TableGroup;
use crate::homs::Isogeny;
use crate::matgroup::{rational_points, EnumBounds, FiniteGroup, GroupSpec, SpecKind};

fn points(kind: SpecKind, q: u64, n: usize) -> FiniteGroup {
    let spec = GroupSpec::new(kind, q).unwrap();
    let f = Arc::new(AmbientField::new(spec.characteristic(), spec.entry_degree(n)).unwrap());
    rational_points(&spec, n, &f, EnumBounds::default()).unwrap()
}

fn count(g: &impl Group, k: usize) -> usize {
    index_k_subgroups(g, k, &CensusBounds::default()).unwrap().len()
}

/// Every subset closed under products, by exhaustive search.
fn brute_force_subgroups(g: &impl Group) -> Vec<Vec<usize>> {
    let n = g.order();
    assert!(n <= 16);
    let mut out = Vec::new();
    for bits in 1u32..(1 << n) {
        let ids: Vec<usize> = (0..n).filter(|&i| bits >> i & 1 == 1).collect();
        let closed = ids.iter().all(|&a| ids.iter().all(|&b| bits >> g.mul(a, b) & 1 == 1));
        if closed {
            out.push(ids);
        }
    }
    out.sort();
    out
}

#[test]
fn index_one_is_the_whole_group() {
    let g = TableGroup::dihedral(5);
    let subs = index_k_subgroups(&g, 1, &CensusBounds::default()).unwrap();
    assert_eq!(subs.len(), 1);
    assert_eq!(subs[0].elements, (0..10).collect::<Vec<_>>());
}

#[test]
fn sl2_f2_has_one_index_two_subgroup() {
    let g = points(SpecKind::SL(2), 2, 1);
    let subs = index_k_subgroups(&g, 2, &CensusBounds::default()).unwrap();
    assert_eq!(subs.len(), 1);
    assert_eq!(subs[0].order(), 3);
    assert!(subs[0].normal);
}

#[test]
fn additive_group_of_f8() {
    let g = points(SpecKind::Ga, 8, 1);
    assert_eq!(count(&g, 2), 7);
}

#[test]
fn split_norm_torus_at_seven() {
    let g = points(SpecKind::NormTorus, 7, 1);
    assert_eq!(count(&g, 2), 3);
}

#[test]
fn lattice_oracle_matches_brute_force() {
    let groups: Vec<TableGroup> = vec![
        TableGroup::cyclic(12),
        TableGroup::dihedral(4),
        TableGroup::dihedral(6),
        TableGroup::direct_product(&TableGroup::cyclic(2), &TableGroup::cyclic(6)),
        TableGroup::from_group(&points(SpecKind::SL(2), 2, 1)),
    ];
    for g in &groups {
        assert_eq!(subgroup_lattice_oracle(g, 200).unwrap(), brute_force_subgroups(g));
    }
}

#[test]
fn census_matches_lattice_oracle() {
    let groups: Vec<TableGroup> = vec![
        TableGroup::cyclic(1),
        TableGroup::cyclic(30),
        TableGroup::dihedral(6),
        TableGroup::direct_product(&TableGroup::cyclic(4), &TableGroup::cyclic(4)),
        TableGroup::from_group(&points(SpecKind::SL(2), 3, 1)),
        TableGroup::from_group(&points(SpecKind::NormTorus, 5, 1)),
    ];
    for g in &groups {
        let all = subgroup_lattice_oracle(g, 200).unwrap();
        for k in 1..=6 {
            let want: Vec<Vec<usize>> = all.iter().filter(|h| h.len() * k == g.order()).cloned().collect();
            let got: Vec<Vec<usize>> =
                index_k_subgroups(g, k, &CensusBounds::default()).unwrap().into_iter().map(|h| h.elements).collect();
            assert_eq!(got, want, "order {} k {k}", g.order());
        }
    }
}

#[test]
fn core_bound_holds() {
    let g = TableGroup::from_group(&points(SpecKind::SL(2), 3, 1));
    for k in 1..=6 {
        for h in index_k_subgroups(&g, k, &CensusBounds::default()).unwrap() {
            let ci = h.core_index(g.order());
            assert!(k <= ci && ci as u128 <= crate::arith::factorial(k as u64));
            assert_eq!(normal_core(&g, &h.elements).unwrap().elements, h.core);
        }
    }
}

#[test]
fn index_two_count_is_two_rank() {
    let groups: Vec<TableGroup> = vec![
        TableGroup::cyclic(8),
        TableGroup::dihedral(4),
        TableGroup::dihedral(5),
        TableGroup::direct_product(&TableGroup::cyclic(2), &TableGroup::cyclic(6)),
        TableGroup::from_group(&points(SpecKind::NormTorus, 7, 1)),
        TableGroup::from_group(&points(SpecKind::SL(2), 3, 1)),
    ];
    for g in &groups {
        let r = abelianization_invariants(g).unwrap().iter().filter(|&&d| d % 2 == 0).count();
        assert_eq!(count(g, 2), (1 << r) - 1);
    }
}

#[test]
fn perfect_groups() {
    let g = points(SpecKind::SL(2), 4, 1);
    assert_eq!(derived_subgroup(&g).order(), 60);
    assert!(abelianization_invariants(&g).unwrap().is_empty());
    assert_eq!(count(&g, 2), 0);
    let g = points(SpecKind::SL(2), 5, 1);
    assert_eq!(count(&g, 2), 0);
    assert_eq!(minimal_proper_index(&g, 6, &CensusBounds::default()).unwrap(), Some(5));
}

#[test]
fn sl2_f3_abelianization() {
    let g = points(SpecKind::SL(2), 3, 1);
    assert_eq!(abelianization_invariants(&g).unwrap(), vec![3]);
    assert_eq!(derived_subgroup(&g).order(), 8);
    let c = TableGroup::cyclic(9);
    assert_eq!(derived_subgroup(&c).order(), 1);
}

#[test]
fn centers() {
    assert_eq!(center(&points(SpecKind::SL(2), 5, 1)).order(), 2);
    assert_eq!(center(&points(SpecKind::SL(2), 4, 1)).order(), 1);
    assert_eq!(center(&TableGroup::dihedral(4)).order(), 2);
    assert_eq!(center(&TableGroup::cyclic(7)).order(), 7);
}

#[test]
fn index_formula_examples() {
    let g = TableGroup::cyclic(6);
    let c2 = vec![0, 3];
    let c3 = vec![0, 2, 4];
    let r = index_formula_check(&g, &c2, &c3).unwrap();
    assert_eq!((r.lhs, r.rhs, r.equal), (3, 3, true));
    let r = index_formula_check(&g, &c2, &[0]).unwrap();
    assert_eq!((r.lhs, r.rhs), (3, 3));
    let all: Vec<usize> = (0..6).collect();
    let r = index_formula_check(&g, &c3, &all).unwrap();
    assert_eq!((r.lhs, r.rhs), (2, 2));
    let d3 = TableGroup::dihedral(3);
    let reflection = (0..6).find(|&x| d3.element_order(x) == 2).unwrap();
    let mut h = vec![d3.identity(), reflection];
    h.sort();
    assert!(index_formula_check(&d3, &[d3.identity()], &h).is_err());
}

#[test]
fn conjugacy_grouping() {
    let s3 = TableGroup::dihedral(3);
    let subs: Vec<Vec<usize>> = index_k_subgroup_ids(&s3, 3, &CensusBounds::default()).unwrap();
    assert_eq!(subs.len(), 3);
    assert_eq!(conjugacy_classes(&s3, &subs).len(), 1);
    let d4 = TableGroup::dihedral(4);
    let subs = index_k_subgroup_ids(&d4, 2, &CensusBounds::default()).unwrap();
    assert_eq!(conjugacy_classes(&d4, &subs).len(), 3);
}

#[test]
fn bounds_are_enforced() {
    let g = TableGroup::cyclic(12);
    let tight = CensusBounds { max_k: 3, ..CensusBounds::default() };
    assert!(matches!(index_k_subgroups(&g, 4, &tight), Err(Error::BoundExceeded { .. })));
    let tiny = CensusBounds { max_order: 10, ..CensusBounds::default() };
    assert!(matches!(index_k_subgroups(&g, 2, &tiny), Err(Error::BoundExceeded { .. })));
    assert!(subgroup_lattice_oracle(&TableGroup::cyclic(300), 200).is_err());
}

#[test]
fn norm_cover_reaches_one_of_three() {
    let phi = Isogeny::norm_cover(13).unwrap();
    let ctx = MuContext::build(&phi, 1, 4, EnumBounds::default()).unwrap();
    let subs = index_k_subgroup_ids(ctx.group(), 2, &CensusBounds::default()).unwrap();
    assert_eq!(subs.len(), 3);
    let mut reached = 0;
    for h in &subs {
        let flags = reached_by(h, &[("normcover".to_string(), &ctx)]).unwrap();
        reached += flags.iter().filter(|f| f.1).count();
    }
    assert_eq!(reached, 1);
}
