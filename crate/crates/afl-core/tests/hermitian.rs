use afl_core::hermitian::*;
use afl_core::lattices::Lattice;
use afl_core::local_rings::{make_ring, FieldSpec, Ring};
use afl_core::matrix::{Mat, QMat};
use afl_core::Error;
fn ring() -> Ring {
    make_ring(&FieldSpec::unramified(3, 1, true), 10).unwrap()
}

#[test]
fn parity_examples() {
    let r = ring();
    assert_eq!(HermitianSpace::diagonal(&r, &[0, 0, 0]).unwrap().parity(), Parity::Even);
    assert_eq!(HermitianSpace::diagonal(&r, &[0, 1]).unwrap().parity(), Parity::Odd);
    assert_eq!(HermitianSpace::diagonal(&r, &[1, 1]).unwrap().parity(), Parity::Even);
}

#[test]
fn dual_of_scaled_line() {
    let r = ring();
    let s = HermitianSpace::diagonal(&r, &[1]).unwrap();
    let l = Lattice::standard(&r, 1);
    assert_eq!(s.dual_lattice(&l).unwrap(), l.scaled(-1));
    let id = HermitianSpace::diagonal(&r, &[0, 0]).unwrap();
    let l2 = Lattice::standard(&r, 2);
    assert_eq!(id.dual_lattice(&l2).unwrap(), l2);
}

#[test]
fn non_hermitian_rejected() {
    let r = ring();
    let g = Mat::from_rows(&[
        vec![r.one(), r.from_i64(1)],
        vec![r.from_i64(2), r.one()],
    ]);
    assert_eq!(HermitianSpace::from_integral(&r, g).unwrap_err(), Error::NotHermitian);
}

#[test]
fn scalar_adjoint_is_conjugate() {
    let r = ring();
    let s = HermitianSpace::diagonal(&r, &[0, 1]).unwrap();
    let a = r.add(&r.gen_y(), &r.from_i64(2));
    let x = QMat::integral(Mat::identity(&r, 2).scale(&r, &a));
    let xs = s.adjoint(&x).unwrap();
    // the adjoint passes through G^-1 and loses one digit
    let want = Mat::identity(&r, 2).scale(&r, &r.conj(&a));
    assert_eq!(xs.shift, 0);
    assert_eq!(xs.m.reduce(&r, r.prec() - 1), want.reduce(&r, r.prec() - 1));
}

#[test]
fn factor_classification() {
    let r = ring();
    let s = HermitianSpace::diagonal(&r, &[0, 1]).unwrap();
    let e0 = QMat::integral(Mat::diag(&[r.one(), r.zero()]));
    let e1 = QMat::integral(Mat::diag(&[r.zero(), r.one()]));
    let f = s.classify_factors(&[e0, e1]).unwrap();
    assert_eq!(f[0].parity, Parity::Even);
    assert_eq!(f[1].parity, Parity::Odd);
    let s3 = HermitianSpace::diagonal(&r, &[0, 1, 3]).unwrap();
    let es: Vec<QMat> = (0..3)
        .map(|i| {
            let mut d = vec![r.zero(); 3];
            d[i] = r.one();
            QMat::integral(Mat::diag(&d))
        })
        .collect();
    let f = s3.classify_factors(&es).unwrap();
    let parities: Vec<Parity> = f.iter().map(|x| x.parity).collect();
    assert_eq!(parities, vec![Parity::Even, Parity::Odd, Parity::Odd]);
    assert_eq!(s3.parity(), Parity::Even);
}
