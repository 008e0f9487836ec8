use std::collections::BTreeMap;

use afl_core::exact::ExactMat;
use afl_core::hermitian::HermitianSpace;
use afl_core::lattices::{Lattice, Strategy};
use afl_core::local_rings::{make_ring, FieldSpec, Ring};
use afl_core::matrix::{Mat, QMat};
use afl_core::orbital::*;
use afl_core::Error;

fn ring(p: u64) -> Ring {
    make_ring(&FieldSpec::unramified(p, 1, true), 16).unwrap()
}

fn ints(r: &Ring, rows: usize, cols: usize, v: &[i64]) -> QMat {
    let rows_v: Vec<Vec<_>> = (0..rows).map(|i| (0..cols).map(|j| r.from_i64(v[i * cols + j])).collect()).collect();
    QMat::integral(Mat::from_rows(&rows_v))
}

fn counts(v: &[(u32, u64)]) -> BTreeMap<u32, u64> {
    v.iter().copied().collect()
}

#[test]
fn trivial_even_line() {
    let r = ring(3);
    let s = HermitianSpace::diagonal(&r, &[0]).unwrap();
    let pair = make_pair(&s, &ints(&r, 1, 1, &[0]), &ints(&r, 1, 1, &[1])).unwrap();
    let o = Options::default();
    assert_eq!(counting_sets(&pair, &o).unwrap(), counts(&[(0, 1)]));
    assert_eq!(orbital_series(&pair, &o).unwrap(), LaurentSeries::one());
    assert_eq!(derived_orbital(&pair, &o).unwrap(), 0);
    assert_eq!(unitary_count(&pair, &o).unwrap(), 1);
    assert_eq!(pair.span_lattice().unwrap(), Lattice::standard(&r, 1));
    // tau is sigma itself
    assert!(pair.tau.eq_at_precision(&r, &ints(&r, 1, 1, &[1])));
}

#[test]
fn odd_line() {
    let r = ring(3);
    let s = HermitianSpace::diagonal(&r, &[1]).unwrap();
    let pair = make_pair(&s, &ints(&r, 1, 1, &[0]), &ints(&r, 1, 1, &[1])).unwrap();
    let o = Options::default();
    assert_eq!(counting_sets(&pair, &o).unwrap(), counts(&[(0, 1), (1, 1)]));
    let series = orbital_series(&pair, &o).unwrap();
    assert_eq!(series.terms(), vec![(0, 1), (1, -1)]);
    assert_eq!(series.eval_at_one(), 0);
    assert_eq!(derived_orbital(&pair, &o).unwrap(), 1);
    assert_eq!(unitary_count(&pair, &o).unwrap(), 0);
    assert_eq!(series_with_transfer(&pair, 2, &o).unwrap().terms(), vec![(2, 1), (3, -1)]);
    assert_eq!(series_with_transfer(&pair, 0, &o).unwrap(), series);
}

#[test]
fn diagonal_rank_two() {
    let r = ring(3);
    let s = HermitianSpace::diagonal(&r, &[0, 1]).unwrap();
    let x = ints(&r, 2, 2, &[0, 0, 0, 1]);
    let j = ints(&r, 2, 1, &[1, 1]);
    let pair = make_pair(&s, &x, &j).unwrap();
    assert_eq!(pair.span_lattice().unwrap(), Lattice::standard(&r, 2));
    let o = Options::default();
    assert_eq!(orbital_series(&pair, &o).unwrap().terms(), vec![(0, 1), (1, -1)]);
    // tau(x^i j) = (x*)^i j
    let xs = &pair.adjoint_x;
    let mut v = j.clone();
    let mut w = j.clone();
    for _ in 0..2 {
        let tv = pair.tau.mul(&r, &v.conj(&r));
        assert!(tv.eq_at_precision(&r, &w));
        v = x.mul(&r, &v);
        w = xs.mul(&r, &w);
    }
}

#[test]
fn scalar_x_is_not_regular() {
    let r = ring(3);
    let s = HermitianSpace::diagonal(&r, &[0, 1]).unwrap();
    let err = make_pair(&s, &ints(&r, 2, 2, &[0, 0, 0, 0]), &ints(&r, 2, 1, &[1, 1])).unwrap_err();
    assert_eq!(err, Error::NotRegularSemisimple);
}

#[test]
fn non_integral_norm_gives_empty_sets() {
    let r = ring(3);
    // J(j, j) = p^-1
    let g = QMat::integral(Mat::diag(&[r.one()])).shifted(1);
    let s = HermitianSpace::new(&r, g).unwrap();
    let pair = make_pair(&s, &ints(&r, 1, 1, &[0]), &ints(&r, 1, 1, &[1])).unwrap();
    assert!(pair.counting_data().unwrap().is_none());
    assert!(counting_sets(&pair, &Options::default()).unwrap().is_empty());
}

#[test]
fn strategies_agree_on_pairs() {
    let r = ring(3);
    let s = HermitianSpace::diagonal(&r, &[1, 3]).unwrap();
    let pair = make_pair(&s, &ints(&r, 2, 2, &[0, 0, 0, 1]), &ints(&r, 2, 1, &[1, 1])).unwrap();
    let mut results = Vec::new();
    for strategy in [Strategy::Closure, Strategy::Echelon, Strategy::Socle] {
        let o = Options { strategy, ..Options::default() };
        results.push(m_set(&pair, &o).unwrap());
    }
    assert_eq!(results[0], results[1]);
    assert_eq!(results[0], results[2]);
}

#[test]
fn transfer_factor_examples() {
    let r = ring(3);
    let one = ints(&r, 1, 1, &[1]);
    let std1 = Lattice::standard(&r, 1);
    assert_eq!(transfer_factor(&r, &one, &one, &std1).unwrap(), (0, 1));
    let p = ints(&r, 1, 1, &[3]);
    assert_eq!(transfer_factor(&r, &one, &p, &std1).unwrap(), (1, -1));
    // moving the reference lattice by h shifts l by -v(det h)
    let gamma = ints(&r, 2, 2, &[0, 1, 1, 1]);
    let u = ints(&r, 2, 1, &[1, 0]);
    let std2 = Lattice::standard(&r, 2);
    let (l0, w0) = transfer_factor(&r, &gamma, &u, &std2).unwrap();
    let h = ints(&r, 2, 2, &[3, 1, 0, 9]);
    let href = Lattice::from_basis(&r, &h).unwrap();
    let (l1, w1) = transfer_factor(&r, &gamma, &u, &href).unwrap();
    assert_eq!(l1, l0 - 3);
    assert_eq!(w1, -w0);
}

#[test]
fn matching_invariants() {
    let r = ring(5);
    let gamma = ints(&r, 2, 2, &[1, 2, 3, 4]);
    let u = ints(&r, 2, 1, &[1, 0]);
    let ud = ints(&r, 1, 2, &[0, 1]);
    let a = match_invariants(&r, &gamma, &u, &ud).unwrap();
    assert!(is_match(&a, &a));
    // conjugation by h fixing u and u∨
    let h = ints(&r, 2, 2, &[1, 0, 0, 7]);
    let hinv = afl_core::matrix::inverse_q(&r, &h).unwrap();
    let g2 = h.mul(&r, &gamma).mul(&r, &hinv);
    let b = match_invariants(&r, &g2, &h.mul(&r, &u), &ud.mul(&r, &hinv)).unwrap();
    assert!(is_match(&a, &b));
    let mut c = a.clone();
    c.moments[3] = c.moments[3].add(&afl_core::local_rings::RingElem::from_i64(&r, 1));
    assert!(!is_match(&a, &c));
}

#[test]
fn laurent_arithmetic() {
    let a = LaurentSeries::from_terms(&[(0, 1), (1, -1)]);
    let b = LaurentSeries::from_terms(&[(0, 1), (1, 1)]);
    assert_eq!(a.mul(&b).terms(), vec![(0, 1), (2, -1)]);
    assert!(a.add(&a.shift(0).mul(&LaurentSeries::monomial(0, -1))).is_zero());
    // derivative at s = 0 with an offset l: -(sum (i + l) c_i)
    let l = 3;
    let shifted = a.shift(l);
    assert_eq!(shifted.derived(), a.derived() - l * a.eval_at_one());
}

#[test]
fn exact_data_realizes_consistently() {
    let spec = FieldSpec::unramified(3, 1, true);
    let data = PairData::lie(
        spec,
        ExactMat::from_ints(2, 2, &[1, 0, 0, 3]),
        ExactMat::from_ints(2, 2, &[0, 0, 0, 1]),
        ExactMat::from_ints(2, 1, &[1, 1]),
    );
    let n = data.working_precision().unwrap();
    let o = Options::default();
    let a = orbital_result(&data.realize(n).unwrap(), &o).unwrap();
    let b = orbital_result(&data.realize(n + 4).unwrap(), &o).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.dual_length, 1);
}

#[test]
fn group_mode_line() {
    // g = 1 on an odd line: the g-stable lattices between L and L∨
    let r = ring(3);
    let s = HermitianSpace::diagonal(&r, &[1]).unwrap();
    let pair = RSPair::new(&s, &ints(&r, 1, 1, &[1]), &ints(&r, 1, 1, &[1]), Stability::Group).unwrap();
    assert_eq!(counting_sets(&pair, &Options::default()).unwrap(), counts(&[(0, 1), (1, 1)]));
}
