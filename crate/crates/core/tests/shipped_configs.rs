use std::collections::BTreeMap;

use holonomy_core::orbifold::{involution_locus, GroupConfig};
use holonomy_core::shipped;

#[test]
fn every_bundled_config_parses() {
    for (name, text) in shipped::ALL {
        let cfg = GroupConfig::parse(text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(!cfg.generators.is_empty(), "{name}");
        cfg.group().unwrap();
    }
}

#[test]
fn involution_translating_three_coordinates() {
    let cfg = GroupConfig::parse(shipped::EX54_SIGMA).unwrap();
    let group = cfg.group().unwrap();
    let sigma = cfg.involution.clone().unwrap();
    let locus = involution_locus(&sigma, &group).unwrap();
    let upstairs: usize = locus.pieces.iter().filter(|p| p.dimension == Some(3)).map(|p| p.count).sum();
    assert_eq!(upstairs, 16);
    assert_eq!(locus.quotient_counts(), BTreeMap::from([(3, 2)]));
    assert!(locus.free_on_components);
    assert!(!locus.meets_singular_set);
}

#[test]
fn involution_with_point_components() {
    let cfg = GroupConfig::parse(shipped::EX55_SIGMA).unwrap();
    let group = cfg.group().unwrap();
    let sigma = cfg.involution.clone().unwrap();
    let locus = involution_locus(&sigma, &group).unwrap();
    let mut by_dim: BTreeMap<Option<usize>, usize> = BTreeMap::new();
    for p in &locus.pieces {
        *by_dim.entry(p.dimension).or_default() += p.count;
    }
    assert_eq!(by_dim.get(&Some(4)), Some(&8));
    assert_eq!(by_dim.get(&Some(0)), Some(&128));
    assert_eq!(locus.quotient_counts(), BTreeMap::from([(0, 16), (4, 1)]));
}

#[test]
fn spin7_group_is_free_off_origin() {
    let cfg = GroupConfig::parse(shipped::SEC42).unwrap();
    let group = cfg.group().unwrap();
    assert_eq!(group.order(), 8);
    assert!(!group.is_abelian());
}
