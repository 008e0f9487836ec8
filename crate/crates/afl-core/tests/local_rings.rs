use afl_core::local_rings::*;
use afl_core::Error;
fn e_ring(p: u64, f0: u32, n: u32) -> Ring {
    make_ring(&FieldSpec::unramified(p, f0, true), n).unwrap()
}

#[test]
fn p_two_rejected() {
    assert!(make_ring(&FieldSpec::unramified(2, 1, true), 6).is_err());
}

#[test]
fn precision_one_rejected() {
    assert_eq!(
        make_ring(&FieldSpec::unramified(3, 1, true), 1).unwrap_err(),
        Error::PrecisionTooSmall(1)
    );
}

#[test]
fn bad_eisenstein_rejected() {
    let bad = FieldSpec::ramified(3, 1, vec![9, 0, 1], false);
    assert!(make_ring(&bad, 6).is_err());
    let bad = FieldSpec::ramified(3, 1, vec![3, 1, 1], false);
    assert!(make_ring(&bad, 6).is_err());
}

#[test]
fn z9_modulus_and_sigma() {
    let r = e_ring(3, 1, 6);
    assert_eq!(r.modulus(), 729);
    let y = r.gen_y();
    // sigma(y) is the other root of the modulus, and sigma is an involution
    let sy = r.conj(&y);
    assert_ne!(sy, y);
    assert_eq!(r.conj(&sy), y);
    // y * sigma(y) and y + sigma(y) are sigma-fixed
    let n = r.norm(&y);
    assert_eq!(r.conj(&n), n);
    let t = r.trace(&y);
    assert_eq!(r.conj(&t), t);
}

#[test]
fn sigma_on_teichmuller_is_q_power() {
    let r = e_ring(5, 1, 8);
    let w = r.teichmuller(&r.primitive_residue());
    assert_eq!(r.conj(&w), r.pow(&w, 5));
    let n = r.mul(&w, &r.conj(&w));
    assert_eq!(r.conj(&n), n);
}

#[test]
fn ramified_sqrt3() {
    let r = make_ring(&FieldSpec::ramified(3, 1, vec![-3, 0, 1], false), 6).unwrap();
    let t = r.pi();
    assert_eq!(r.mul(&t, &t), r.from_i64(3));
    assert_eq!(r.val(&t), Some(1));
    assert_eq!(r.val(&r.from_i64(3)), Some(2));
    assert_eq!(r.val(&r.from_i64(9)), Some(4));
    let three = r.from_i64(3);
    assert_eq!(r.div_pi_pow(&three, 1), t);
}

#[test]
fn valuations() {
    let r = e_ring(3, 1, 6);
    let one = RingElem::from_i64(&r, 1);
    assert_eq!(one.valuation(), Valuation::Finite(0));
    let pi = RingElem::integral(&r, r.pi());
    assert_eq!(pi.valuation(), Valuation::Finite(1));
    let x = RingElem::new(&r, 2, r.from_i64(5));
    assert_eq!(x.valuation(), Valuation::Finite(-2));
    let z = RingElem::from_i64(&r, 0);
    assert_eq!(z.valuation(), Valuation::AtLeast(6));
}

#[test]
fn norm_one_count_and_property() {
    for (p, f0) in [(3u64, 1u32), (5, 1), (3, 2)] {
        let r = e_ring(p, f0, 8);
        let v = r.norm_one_residues().unwrap();
        let q = p.pow(f0);
        assert_eq!(v.len() as u64, q + 1);
        assert_eq!(v[0], r.one());
        let mut classes: Vec<u64> = v.iter().map(|a| r.residue_index(a)).collect();
        classes.sort();
        classes.dedup();
        assert_eq!(classes.len() as u64, q + 1);
        for a in &v {
            let d = r.sub(&r.norm(a), &r.one());
            assert!(r.val(&d).is_none_or(|x| x >= r.prec() - 2));
        }
    }
}

#[test]
fn norm_one_needs_quadratic() {
    let r = make_ring(&FieldSpec::unramified(3, 1, false), 6).unwrap();
    assert_eq!(r.norm_one_residues().unwrap_err(), Error::NotQuadratic);
}

#[test]
fn inverse_and_ringelem() {
    let r = e_ring(3, 2, 6);
    let a = r.add(&r.gen_y(), &r.from_i64(3));
    let ai = r.inv_unit(&a).unwrap();
    assert_eq!(r.mul(&a, &ai), r.one());
    let x = RingElem::integral(&r, r.mul_pi_pow(&a, 2));
    let xi = x.inv().unwrap();
    assert_eq!(xi.valuation(), Valuation::Finite(-2));
    assert!(x.mul(&xi).eq_at_precision(&RingElem::from_i64(&r, 1)));
}
