use nlmp_core::bisim::{compare_bisims, is_traditional_bisim, largest_traditional};
use nlmp_core::enumerate::set_partitions;
use nlmp_core::logic::{
    distinguish, satisfies, single_constraint_search, Distinction, StateFormula,
};
use nlmp_core::text::{parse_formula, parse_model};
use nlmp_core::{Nlmp, Partition, Relation, StateSet};

const FIG1: &str = include_str!("../../../corpus/fig1.nlmp");
const PSI: &str = "<a>[ <3/4 <b>[ >0 T ] , >1/4 <b>[ >0 T ] ]";

fn fig1() -> Nlmp {
    parse_model(FIG1).unwrap().nlmp()
}

fn idx(m: &Nlmp, name: &str) -> usize {
    m.universe().lookup(name).unwrap()
}

#[test]
fn fig1_parses_to_the_canonical_model() {
    let m = fig1();
    assert_eq!(m.universe().names(), ["s", "t", "x", "y", "z"]);
    assert_eq!(m.labels(), ["a", "b", "c", "d"]);
    assert!(m.sigma().is_powerset());
    let (s, t) = (idx(&m, "s"), idx(&m, "t"));
    assert_eq!(m.row(0, s).len(), 3);
    assert_eq!(m.row(0, t).len(), 2);
    assert_eq!(&m.row(0, s)[..2], m.row(0, t));
    assert!(m.validate().is_valid());
}

#[test]
fn extra_measure_lies_between_the_others() {
    let m = fig1();
    let row = m.row(0, idx(&m, "s"));
    let (mu1, mu2, mu3) = (
        m.pool().get(row[0]),
        m.pool().get(row[1]),
        m.pool().get(row[2]),
    );
    for mask in 0u32..8 {
        let q = StateSet::from_indices(5, (0..3).filter(|i| mask >> i & 1 == 1).map(|i| i + 2));
        let (v1, v2, v3) = (
            mu1.eval(&q).unwrap(),
            mu2.eval(&q).unwrap(),
            mu3.eval(&q).unwrap(),
        );
        let (lo, hi) = if v1 <= v2 { (v1, v2) } else { (v2, v1) };
        assert!(lo <= v3 && v3 <= hi, "mask {mask}");
    }
}

#[test]
fn bisimilarities_agree_and_separate_s_from_t() {
    let m = fig1();
    let c = compare_bisims(&m).unwrap();
    assert!(c.all_equal && c.consistent());
    assert_eq!(c.traditional.partition, Partition::discrete(5));

    let mut union = Relation::empty(5);
    let mut accepted = 0;
    for p in set_partitions(5) {
        let r = Relation::from_partition(&p);
        if is_traditional_bisim(&m, &r).unwrap().accepted() {
            accepted += 1;
            union = union.union(&r);
        }
    }
    assert_eq!(accepted, 1);
    assert_eq!(union, largest_traditional(&m).unwrap().relation());
    assert!(!union.contains(idx(&m, "s"), idx(&m, "t")));
}

#[test]
fn no_single_constraint_formula_separates() {
    let m = fig1();
    let out = single_constraint_search(&m, idx(&m, "s"), idx(&m, "t"), 2).unwrap();
    assert_eq!(out.separating, None);
    assert!(out.denotations > 4);
    assert!(out.candidates > 100);
}

#[test]
fn distinguish_needs_two_constraints() {
    let m = fig1();
    let (s, t) = (idx(&m, "s"), idx(&m, "t"));
    let Distinction::Formula(phi) = distinguish(&m, s, t).unwrap() else {
        panic!("s and t must be distinguishable");
    };
    assert_eq!(phi.to_string(), PSI);
    match &phi {
        StateFormula::DiamondMulti(a, cs) => {
            assert_eq!(a, "a");
            assert_eq!(cs.len(), 2);
        }
        other => panic!("{other}"),
    }
    assert!(satisfies(&m, s, &phi).unwrap());
    assert!(!satisfies(&m, t, &phi).unwrap());
    assert_eq!(parse_formula(PSI).unwrap(), phi);
    assert_eq!(
        distinguish(&m, idx(&m, "x"), idx(&m, "x")).unwrap(),
        Distinction::Equivalent
    );
}
