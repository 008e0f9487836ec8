use afl_core::local_rings::{make_ring, Elem, FieldSpec, Ring, RingData};
use afl_core::matrix::*;
fn ring() -> Ring {
    make_ring(&FieldSpec::unramified(3, 1, true), 8).unwrap()
}

fn m2(r: &RingData, v: [i64; 4]) -> Mat {
    Mat::from_rows(&[
        vec![r.from_i64(v[0]), r.from_i64(v[1])],
        vec![r.from_i64(v[2]), r.from_i64(v[3])],
    ])
}

#[test]
fn hnf_identity_and_permutation() {
    let r = ring();
    let id = Mat::identity(&r, 2);
    assert_eq!(hnf(&r, &id).h, id);
    let sw = m2(&r, [0, 1, 1, 0]);
    assert_eq!(hnf(&r, &sw).h, id);
}

#[test]
fn hnf_reduces_offdiagonal() {
    let r = ring();
    let m = m2(&r, [9, 7, 0, 3]);
    let h = hnf(&r, &m);
    assert_eq!(h.k, vec![2, 1]);
    // 7 reduces to 7 mod 9
    assert_eq!(h.h.get(0, 1), r.from_i64(7));
    assert!(h.contains(&r, &[r.from_i64(9), r.from_i64(0)]));
    assert!(!h.contains(&r, &[r.from_i64(3), r.from_i64(0)]));
}

#[test]
fn snf_and_inverse() {
    let r = ring();
    let m = m2(&r, [3, 1, 0, 3]);
    let s = snf(&r, &m);
    let d = s.l.mul(&r, &m).mul(&r, &s.r);
    assert_eq!(s.d, vec![Some(0), Some(2)]);
    assert_eq!(d.get(0, 1), Elem::ZERO);
    assert_eq!(s.l.mul(&r, &s.linv), Mat::identity(&r, 2));
    assert_eq!(s.r.mul(&r, &s.rinv), Mat::identity(&r, 2));
    let inv = inverse(&r, &m).unwrap();
    assert_eq!(inv.shift, 2);
    let prod = m.mul(&r, &inv.m);
    assert_eq!(prod.reduce(&r, r.prec() - 2), Mat::identity(&r, 2).mul_pi_pow(&r, 2));
    assert_eq!(det_val(&r, &m), Some(2));
}
