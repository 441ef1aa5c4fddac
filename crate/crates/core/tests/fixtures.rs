use homdist::generate::{gen_gnp, gen_regular};
use homdist::Graph;

const GNP: &str = include_str!("fixtures/gnp-8-0.5-1.txt");
const REGULAR: &str = include_str!("fixtures/regular-8-3-7.txt");

#[test]
fn gnp_matches_golden_file() {
    let g = gen_gnp(8, 0.5, 1).unwrap();
    assert_eq!(g.serialize(), GNP);
    assert_eq!(Graph::parse(GNP).unwrap(), g);
}

#[test]
fn regular_matches_golden_file() {
    let g = gen_regular(8, 3, 7).unwrap();
    assert_eq!(g.serialize(), REGULAR);
    assert!((0..8).all(|u| g.degree(u) == 3));
}
