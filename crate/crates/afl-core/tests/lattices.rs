use afl_core::lattices::*;
use afl_core::local_rings::{make_ring, FieldSpec, Ring, RingData};
use afl_core::matrix::Mat;
use afl_core::Error;
fn ring(p: u64) -> Ring {
    make_ring(&FieldSpec::unramified(p, 1, true), 10).unwrap()
}

fn count(r: &RingData, exps: &[u32], s: Strategy) -> usize {
    let q = FiniteQuotient::standard(r, exps);
    enumerate_submodules(r, &q, &[], Mode::All, s, DEFAULT_CAP).unwrap().len()
}

#[test]
fn simple_quotient_has_two_submodules() {
    let r = ring(3);
    for s in [Strategy::Closure, Strategy::Echelon, Strategy::Socle] {
        assert_eq!(count(&r, &[1], s), 2);
    }
}

#[test]
fn residue_plane_has_q2_plus_3() {
    let r = ring(3);
    for s in [Strategy::Closure, Strategy::Echelon, Strategy::Socle] {
        assert_eq!(count(&r, &[1, 1], s), 9 + 3);
    }
}

#[test]
fn chain_formula_small() {
    assert_eq!(chain_ring_count(1, 1, 9), 12);
    assert_eq!(chain_ring_count(0, 2, 9), 3);
    let r = ring(3);
    assert_eq!(count(&r, &[1, 2], Strategy::Echelon) as u128, chain_ring_count(1, 2, 9));
}

#[test]
fn cap_is_enforced() {
    let r = ring(5);
    let q = FiniteQuotient::standard(&r, &[2, 2]);
    let err = enumerate_submodules(&r, &q, &[], Mode::All, Strategy::Socle, 1000).unwrap_err();
    assert_eq!(err, Error::CapExceeded { required: 390625, cap: 1000 });
}

#[test]
fn stable_under_distinct_eigenlines() {
    let r = ring(3);
    let q = FiniteQuotient::standard(&r, &[1, 1]);
    let x = Mat::diag(&[r.from_i64(0), r.from_i64(1)]);
    let ops = [Operator::linear(x)];
    for s in [Strategy::Closure, Strategy::Echelon, Strategy::Socle] {
        let v = enumerate_submodules(&r, &q, &ops, Mode::StableOnly, s, DEFAULT_CAP).unwrap();
        assert_eq!(v.len(), 4);
    }
}

#[test]
fn index_examples() {
    let r = ring(3);
    let l = Lattice::standard(&r, 2);
    assert_eq!(index(&l, &l), 0);
    assert_eq!(index(&l.scaled(-1), &l), 2);
    let q = quotient(&r, &l.scaled(1), &l).unwrap();
    assert_eq!(q.divisors(), vec![1, 1]);
    assert_eq!(q.length() as i64, index(&l, &l.scaled(1)));
}

#[test]
fn quotient_round_trip() {
    let r = ring(3);
    let l = Lattice::standard(&r, 2);
    let q = quotient(&r, &l.scaled(2), &l).unwrap();
    let subs = enumerate_submodules(&r, &q, &[], Mode::All, Strategy::Socle, DEFAULT_CAP).unwrap();
    assert_eq!(subs.len() as u128, chain_ring_count(2, 2, 9));
    for s in &subs {
        let lat = q.to_lattice(&r, s).unwrap();
        assert!(lat.contains(&r, &l.scaled(2)));
        assert!(l.contains(&r, &lat));
        assert_eq!(index(&lat, &l.scaled(2)), s.length as i64);
        assert_eq!(&q.from_lattice(&r, &lat).unwrap(), s);
    }
}
