use std::collections::BTreeMap;

use afl_core::exact::{ExactEntry, ExactMat};
use afl_core::hermitian::Parity;
use afl_core::local_rings::FieldSpec;
use afl_core::orbital::{orbital_series, LaurentSeries, Options, PairData, Stability};
use afl_core::reductions::*;
use afl_core::Error;

fn e3() -> FieldSpec {
    FieldSpec::unramified(3, 1, true)
}

fn counts(v: &[(u32, u64)]) -> Value {
    Value::Counts(v.iter().copied().collect::<BTreeMap<_, _>>())
}

fn diag_pair() -> PairData {
    PairData::lie(
        e3(),
        ExactMat::from_ints(2, 2, &[1, 0, 0, 3]),
        ExactMat::from_ints(2, 2, &[0, 0, 0, 1]),
        ExactMat::from_ints(2, 1, &[1, 1]),
    )
}

#[test]
fn split_diag_example() {
    let data = diag_pair();
    let pair = data.realize(12).unwrap();
    let factors = split_idempotents(&pair).unwrap();
    assert_eq!(factors.len(), 2);
    let parities: Vec<Parity> = factors.iter().map(|f| f.parity).collect();
    assert!(parities.contains(&Parity::Even) && parities.contains(&Parity::Odd));
    let o = Options::default();
    for f in &factors {
        let s = orbital_series(&f.pair, &o).unwrap();
        match f.parity {
            Parity::Even => assert_eq!(s, LaurentSeries::one()),
            Parity::Odd => assert_eq!(s.terms(), vec![(0, 1), (1, -1)]),
        }
    }
    let rep = check_product(&data, &o).unwrap();
    assert!(rep.passed(), "{rep:?}");
    assert_eq!(rep.lhs, Value::Series(LaurentSeries::from_terms(&[(0, 1), (1, -1)])));
}

#[test]
fn two_odd_factors_have_vanishing_derivative() {
    let data = PairData::lie(
        e3(),
        ExactMat::from_ints(2, 2, &[3, 0, 0, 27]),
        ExactMat::from_ints(2, 2, &[0, 0, 0, 1]),
        ExactMat::from_ints(2, 1, &[1, 1]),
    );
    let o = Options::default();
    let rep = check_product(&data, &o).unwrap();
    assert!(rep.passed(), "{rep:?}");
    match &rep.lhs {
        Value::Series(s) => assert_eq!(s.derived(), 0),
        v => panic!("unexpected {v:?}"),
    }
}

#[test]
fn linear_charpoly_does_not_split() {
    let data = PairData::lie(e3(), ExactMat::from_ints(1, 1, &[3]), ExactMat::from_ints(1, 1, &[0]), ExactMat::from_ints(1, 1, &[1]));
    let pair = data.realize(12).unwrap();
    assert_eq!(split_idempotents(&pair).unwrap_err(), Error::NoSplitting);
}

#[test]
fn rotation_splits_over_the_quadratic_field() {
    // t^2 + 1 splits over F_9 into *-stable factors t -+ i
    let data = PairData::lie(e3(), ExactMat::identity(2), ExactMat::from_ints(2, 2, &[0, 1, -1, 0]), ExactMat::from_ints(2, 1, &[1, 0]));
    let pair = data.realize(12).unwrap();
    let f = split_idempotents(&pair).unwrap();
    assert_eq!(f.len(), 2);
    assert!(check_product(&data, &Options::default()).unwrap().passed());
}

#[test]
fn scalar_plus_nilpotent_has_no_splitting() {
    // x ≡ 0 mod p: a single residue factor t^2
    let data = PairData::lie(
        e3(),
        ExactMat::from_ints(2, 2, &[1, 0, 0, 1]),
        ExactMat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => ExactEntry::int(3),
            (1, 0) => ExactEntry::int(-3),
            _ => ExactEntry::zero(),
        }),
        ExactMat::from_ints(2, 1, &[1, 0]),
    );
    let pair = data.realize(12).unwrap();
    assert_eq!(split_idempotents(&pair).unwrap_err(), Error::NoSplitting);
}

fn group_line(gram: i64) -> PairData {
    PairData {
        stability: Stability::Group,
        ..PairData::lie(e3(), ExactMat::from_ints(1, 1, &[gram]), ExactMat::from_ints(1, 1, &[1]), ExactMat::from_ints(1, 1, &[1]))
    }
}

#[test]
fn odd_group_extension() {
    let data = group_line(3);
    let rep = check_extension(&data, &ResidueChoice::Auto, &Options::default()).unwrap();
    assert!(rep.passed(), "{rep:?}");
    assert_eq!(rep.lhs, counts(&[(0, 1), (1, 1)]));
    assert_eq!(rep.rhs, counts(&[(0, 1), (1, 1)]));
}

#[test]
fn even_group_extension_preserves_unitary_count() {
    let data = group_line(9);
    let rep = check_extension(&data, &ResidueChoice::Auto, &Options::default()).unwrap();
    assert!(rep.passed(), "{rep:?}");
    assert_eq!(rep.lhs, rep.rhs);
}

#[test]
fn wrong_residue_fails() {
    // g = 1, so a = 1 is a root of P(t) = t - 1
    let data = group_line(3);
    let rep = check_extension(&data, &ResidueChoice::Index(0), &Options::default()).unwrap();
    assert!(!rep.passed());
    assert!(!rep.diagnostics.is_empty());
}

#[test]
fn unit_norm_is_signalled() {
    let data = group_line(1);
    let err = check_extension(&data, &ResidueChoice::Auto, &Options::default()).unwrap_err();
    assert_eq!(err, Error::UnitNorm);
}

#[test]
fn lie_extension_block_shape() {
    let data = PairData::lie(e3(), ExactMat::from_ints(1, 1, &[3]), ExactMat::from_ints(1, 1, &[0]), ExactMat::from_ints(1, 1, &[1]));
    let pair = data.realize(12).unwrap();
    let ext = extend_lie(&pair).unwrap();
    let r = pair.ring();
    assert_eq!(ext.elem.m.rows, 2);
    assert!(r.reduce(&ext.elem.m.get(1, 1), 12).is_zero());
    assert_eq!(ext.elem.m.get(0, 1), r.one());
    // -j* = -sigma(j)^T G = -3
    assert_eq!(ext.elem.m.get(1, 0), r.from_i64(-3));
}

#[test]
fn block_reduction_examples() {
    let o = Options::default();
    let delta = ExactEntry::with_conj(&[0, 1], &[0, -1]);
    let mut x = ExactMat::zeros(2, 2);
    x.set(1, 1, delta);
    let skew_diag = PairData::lie(e3(), ExactMat::from_ints(2, 2, &[1, 0, 0, 3]), x, ExactMat::from_ints(2, 1, &[1, 1]));
    for data in [
        skew_diag,
        PairData::lie(e3(), ExactMat::from_ints(1, 1, &[3]), ExactMat::from_ints(1, 1, &[0]), ExactMat::from_ints(1, 1, &[1])),
    ] {
        let rep = check_block_reduction(&data, &o).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }
}

#[test]
fn base_change_worked_example() {
    let a = FieldSpec::unramified(3, 3, true);
    // x = y_A, j = 1, J^A = p
    let data = BaseChangeData::new(
        a,
        ExactMat::from_ints(1, 1, &[3]),
        ExactMat::from_fn(1, 1, |_, _| ExactEntry::from_coords(&[0, 1])),
        ExactMat::from_ints(1, 1, &[1]),
    );
    let rep = base_change_compare(&data, &Options::default()).unwrap();
    assert!(rep.passed(), "{rep:?}");
    assert_eq!(rep.lhs, Value::List(vec![Value::Int(0), Value::Int(3)]));
}

#[test]
fn vanishing_and_fl_examples() {
    let o = Options::default();
    let odd = PairData::lie(e3(), ExactMat::from_ints(1, 1, &[3]), ExactMat::from_ints(1, 1, &[0]), ExactMat::from_ints(1, 1, &[1]));
    let rep = vanishing_check(&odd, &o).unwrap();
    assert!(rep.passed(), "{rep:?}");
    let even = PairData::lie(e3(), ExactMat::from_ints(1, 1, &[1]), ExactMat::from_ints(1, 1, &[0]), ExactMat::from_ints(1, 1, &[1]));
    let rep = fl_check(&even, &o).unwrap();
    assert!(rep.passed(), "{rep:?}");
    assert_eq!(rep.lhs, Value::Int(1));
    assert!(matches!(fl_check(&odd, &o), Err(Error::Precondition(_))));
}

#[test]
fn generator_is_reproducible() {
    let mut prof = InstanceProfile::new(3, 1, 2, Parity::Odd, 1);
    let a = gen_instance(&prof).unwrap();
    let b = gen_instance(&prof).unwrap();
    assert_eq!(a, b);
    let InstanceData::Pair(data) = &a.data else { panic!() };
    assert_eq!(data.realize(12).unwrap().space.parity(), Parity::Odd);
    prof.structure = Structure::Split(2);
    let s = gen_instance(&prof).unwrap();
    let InstanceData::Pair(data) = &s.data else { panic!() };
    assert!(split_idempotents(&data.realize(data.working_precision().unwrap()).unwrap()).is_ok());
}

#[test]
fn generator_warns_when_residues_run_out() {
    let mut prof = InstanceProfile::new(3, 1, 4, Parity::Even, 3);
    prof.kind = Stability::Group;
    assert!(profile_warnings(&prof).iter().any(|w| w.contains("q + 1")));
    prof.n = 3;
    assert!(profile_warnings(&prof).is_empty());
}
