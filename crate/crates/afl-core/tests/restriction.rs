use afl_core::hermitian::restriction::*;
use afl_core::local_rings::{Elem, FieldSpec, RingElem};
#[test]
fn embedding_is_equivariant() {
    let sr = ScalarRestriction::new(&FieldSpec::unramified(3, 3, true), 6).unwrap();
    let y = sr.e_ring.gen_y();
    let lhs = sr.a_ring.conj(&sr.e_to_a(&y));
    let rhs = sr.e_to_a(&sr.e_ring.conj(&y));
    assert_eq!(lhs, rhs);
    for b in &sr.basis {
        assert_eq!(sr.a_ring.conj(b), *b);
    }
    // coordinates round trip
    let x = sr.a_ring.add(&sr.a_ring.gen_y(), &sr.a_ring.from_i64(5));
    let c = sr.a_to_e(&x);
    let mut back = Elem::ZERO;
    for (k, ck) in c.iter().enumerate() {
        back = sr.a_ring.add(&back, &sr.a_ring.mul(&sr.e_to_a(ck), &sr.basis[k]));
    }
    assert_eq!(back, x);
}

#[test]
fn trace_of_one_is_degree() {
    let sr = ScalarRestriction::new(&FieldSpec::unramified(3, 3, true), 6).unwrap();
    let t = sr.trace(&RingElem::from_i64(&sr.a_ring, 1)).unwrap();
    assert!(t.eq_at_precision(&RingElem::from_i64(&sr.e_ring, 3)));
}

#[test]
fn lift_descend_round_trip_cubic() {
    let sr = ScalarRestriction::new(&FieldSpec::unramified(3, 3, true), 8).unwrap();
    let a = &sr.a_ring;
    let c = a.from_i64(3);
    let ja = line_form(a, &c).unwrap();
    let j = sr.descend_form(&ja).unwrap();
    assert_eq!(j.n(), 3);
    let back = sr.lift_form(&j, 1).unwrap();
    assert!(back.gram.eq_at_precision(a, &ja.gram));
}

#[test]
fn lift_descend_round_trip_ramified() {
    let spec = FieldSpec::ramified(3, 1, vec![-3, 0, 0, 1], true);
    let sr = ScalarRestriction::new(&spec, 8).unwrap();
    let a = &sr.a_ring;
    assert_eq!(sr.theta.valuation().finite(), Some(-5));
    let ja = line_form(a, &a.pi()).unwrap();
    let j = sr.descend_form(&ja).unwrap();
    let back = sr.lift_form(&j, 1).unwrap();
    assert!(back.gram.eq_at_precision(a, &ja.gram));
}
