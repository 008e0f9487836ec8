//! Randomized invariants of the ring, lattice and orbital layers.

use afl_core::exact::{ExactEntry, ExactMat};
use afl_core::hermitian::{HermitianSpace, Parity};
use afl_core::lattices::{Lattice, Strategy};
use afl_core::local_rings::{make_ring, Elem, FieldSpec, Ring};
use afl_core::matrix::{Mat, QMat};
use afl_core::orbital::*;
use afl_core::reductions::{gen_instance, InstanceData, InstanceProfile};
use proptest::prelude::*;

fn e_ring(p: u64, n: u32) -> Ring {
    make_ring(&FieldSpec::unramified(p, 1, true), n).unwrap()
}

fn elem(r: &Ring, c: &[i64]) -> Elem {
    r.from_coords(&c[..r.d()]).unwrap()
}

fn generated(p: u64, n: usize, parity: Parity, seed: u64) -> Option<PairData> {
    match gen_instance(&InstanceProfile::new(p, 1, n, parity, seed)).ok()?.data {
        InstanceData::Pair(d) => Some(d),
        _ => None,
    }
}

/// `y` in `u(diag(p^v))` with entries divisible by `p`, so `cayley(y)` is an
/// isometry preserving the standard lattice.
fn skew_conjugator(data: &PairData, c: &[i64]) -> ExactMat {
    let n = data.n();
    let g: Vec<i64> = (0..n).map(|i| data.gram.get(i, i).coords[0]).collect();
    let p = data.spec.p as i64;
    let mut k = 0;
    let mut next = |s: i64| {
        let v = [c[k % c.len()] * p * s, c[(k + 1) % c.len()] * p * s];
        k += 2;
        v
    };
    let mut y = ExactMat::zeros(n, n);
    for i in 0..n {
        let z = next(1);
        y.set(i, i, ExactEntry::with_conj(&z, &[-z[0], -z[1]]));
        for j in i + 1..n {
            let a = next(1);
            y.set(i, j, ExactEntry::from_coords(&[a[0] * g[j], a[1] * g[j]]));
            y.set(j, i, ExactEntry::with_conj(&[0], &[-a[0] * g[i], -a[1] * g[i]]));
        }
    }
    y
}

fn opts(strategy: Strategy) -> Options {
    Options { cap: 200_000, strategy, precision: None }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn sigma_preserves_valuation(p in prop::sample::select(vec![3u64, 5, 7]), c in prop::array::uniform2(-200i64..200), k in 0u32..4) {
        let r = e_ring(p, 8);
        let a = r.mul_pi_pow(&elem(&r, &c), k);
        prop_assert_eq!(r.val(&r.conj(&a)), r.val(&a));
        prop_assert_eq!(r.conj(&r.conj(&a)), a);
        let t = r.trace(&a);
        let nm = r.norm(&a);
        prop_assert_eq!(r.conj(&t), t);
        prop_assert_eq!(r.conj(&nm), nm);
    }

    #[test]
    fn lowering_precision_is_reduction(c in prop::array::uniform2(-500i64..500), d in prop::array::uniform2(-500i64..500), lo in 2u32..6) {
        let hi = make_ring(&FieldSpec::unramified(3, 1, true), 8).unwrap();
        let low = hi.with_precision(lo).unwrap();
        let (a, b) = (elem(&hi, &c), elem(&hi, &d));
        prop_assert_eq!(low.coerce(&hi.mul(&a, &b)), low.mul(&low.coerce(&a), &low.coerce(&b)));
        prop_assert_eq!(low.coerce(&hi.add(&a, &b)), low.add(&low.coerce(&a), &low.coerce(&b)));
        if let Some(v) = hi.val(&a) {
            if v < lo {
                prop_assert_eq!(low.val(&low.coerce(&a)), Some(v));
            }
        }
    }

    #[test]
    fn lattice_double_dual(v in prop::collection::vec(0u32..3, 2..4), c in prop::collection::vec(-9i64..9, 9), k in 0u32..3) {
        let r = e_ring(3, 12);
        let n = v.len();
        let s = HermitianSpace::diagonal(&r, &v).unwrap();
        let rows: Vec<Vec<Elem>> = (0..n)
            .map(|i| (0..n).map(|j| match i.cmp(&j) {
                core::cmp::Ordering::Equal => r.pi_pow(k * (i as u32 % 2)),
                core::cmp::Ordering::Less => r.from_i64(c[(i * n + j) % c.len()]),
                _ => r.zero(),
            }).collect())
            .collect();
        let lat = Lattice::from_integral(&r, &Mat::from_rows(&rows)).unwrap();
        let dual = s.dual_lattice(&lat).unwrap();
        prop_assert_eq!(s.dual_lattice(&dual).unwrap(), lat.clone());
        prop_assert_eq!(Parity::of(s.dual_index(&lat).unwrap()), s.parity());
        prop_assert_eq!(Parity::of(s.dual_index(&lat.scaled(1)).unwrap()), s.parity());
    }

    #[test]
    fn adjoint_is_an_involution(v in prop::collection::vec(0u32..3, 2..4), c in prop::collection::vec(-9i64..9, 16)) {
        let r = e_ring(5, 12);
        let n = v.len();
        let s = HermitianSpace::diagonal(&r, &v).unwrap();
        let rows: Vec<Vec<Elem>> = (0..n).map(|i| (0..n).map(|j| elem(&r, &[c[i * n + j], c[(i + j) % 16]])).collect()).collect();
        let x = QMat::integral(Mat::from_rows(&rows));
        let xx = s.adjoint(&s.adjoint(&x).unwrap()).unwrap();
        prop_assert!(xx.eq_at_precision(&r, &x));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn tau_sends_x_powers_to_adjoint_powers(seed in 0u64..10_000, odd in any::<bool>()) {
        let parity = if odd { Parity::Odd } else { Parity::Even };
        let Some(data) = generated(3, 3, parity, seed) else { return Ok(()) };
        let pair = data.realize(12).unwrap();
        let r = pair.ring().clone();
        let mut u = pair.j.clone();
        let mut w = pair.j.clone();
        for _ in 0..pair.n() {
            let lhs = pair.tau.mul(&r, &u.conj(&r));
            prop_assert!(lhs.eq_at_precision(&r, &w));
            u = pair.x.mul(&r, &u);
            w = pair.adjoint_x.mul(&r, &w);
        }
    }

    #[test]
    fn isometry_invariance(seed in 0u64..10_000, odd in any::<bool>(), c in prop::collection::vec(0i64..3, 6)) {
        let parity = if odd { Parity::Odd } else { Parity::Even };
        let Some(data) = generated(3, 2, parity, seed) else { return Ok(()) };
        let mut moved = data.clone();
        moved.conjugator = Some(skew_conjugator(&data, &c));
        let o = Options::default();
        let prec = data.working_precision().unwrap();
        let a = data.realize(prec).unwrap();
        let b = moved.realize(prec).unwrap();
        prop_assert_eq!(counting_sets(&a, &o).unwrap(), counting_sets(&b, &o).unwrap());
        prop_assert_eq!(orbital_series(&a, &o).unwrap(), orbital_series(&b, &o).unwrap());
        prop_assert_eq!(unitary_count(&a, &o).unwrap(), unitary_count(&b, &o).unwrap());
    }

    #[test]
    fn counts_are_stable_in_precision(seed in 0u64..10_000, odd in any::<bool>()) {
        let parity = if odd { Parity::Odd } else { Parity::Even };
        let Some(data) = generated(3, 3, parity, seed) else { return Ok(()) };
        let o = Options::default();
        let n = data.working_precision().unwrap();
        let lo = counting_sets(&data.realize(n).unwrap(), &o).unwrap();
        let hi = counting_sets(&data.realize(n + 4).unwrap(), &o).unwrap();
        prop_assert_eq!(lo, hi);
    }

    #[test]
    fn odd_duality_is_fixed_point_free(seed in 0u64..10_000) {
        let Some(data) = generated(3, 3, Parity::Odd, seed) else { return Ok(()) };
        let pair = data.realize(data.working_precision().unwrap()).unwrap();
        let o = Options::default();
        let Some(d) = pair.counting_data().unwrap() else { return Ok(()) };
        let r = pair.ring();
        let m = m_set_with(r, &d, &o).unwrap();
        let l = d.quotient.length();
        for s in &m {
            let sd = d.dual(r, s).unwrap();
            prop_assert!(sd != *s);
            prop_assert_eq!(sd.length, l - s.length);
            prop_assert!(m.contains(&sd));
            prop_assert_eq!(&d.dual(r, &sd).unwrap(), s);
        }
        let b = bucket(&m);
        for (i, k) in &b {
            prop_assert_eq!(b.get(&(l - i)), Some(k));
        }
        prop_assert_eq!(orbital_series(&pair, &o).unwrap().eval_at_one(), 0);
    }

    #[test]
    fn strategies_agree(seed in 0u64..10_000, odd in any::<bool>()) {
        let parity = if odd { Parity::Odd } else { Parity::Even };
        let Some(data) = generated(3, 3, parity, seed) else { return Ok(()) };
        let pair = data.realize(data.working_precision().unwrap()).unwrap();
        let base = m_set(&pair, &opts(Strategy::Socle)).unwrap();
        for s in [Strategy::Closure, Strategy::Echelon] {
            prop_assert_eq!(&m_set(&pair, &opts(s)).unwrap(), &base);
            prop_assert_eq!(
                unitary_count(&pair, &opts(s)).unwrap(),
                unitary_count(&pair, &opts(Strategy::Socle)).unwrap()
            );
        }
    }
}
