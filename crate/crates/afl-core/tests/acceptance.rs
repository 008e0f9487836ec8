//! Acceptance criteria 1-10, one line each. Runs without the libtest
//! harness so the summary is always printed.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use afl_core::exact::{ExactEntry, ExactMat};
use afl_core::hermitian::Parity;
use afl_core::lattices::{chain_ring_count, enumerate_submodules, FiniteQuotient, Lattice, Mode, Operator, Strategy};
use afl_core::local_rings::{make_ring, Elem, FieldSpec};
use afl_core::matrix::{Mat, QMat};
use afl_core::orbital::{m_set_with, orbital_series, transfer_factor, Options, PairData, Stability};
use afl_core::reductions::{
    base_change_compare, check_block_reduction, check_extension, check_product, fl_check, gen_instance,
    vanishing_check, vanishing_values, BaseChangeData, CheckReport, InstanceData, InstanceProfile, ResidueChoice,
    Structure,
};
use afl_core::witt_frames::{witt_suite, WittCase};
use afl_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Parallel map preserving order.
fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync) -> Vec<U> {
    let threads = std::thread::available_parallelism().map_or(4, |n| n.get()).min(16);
    let next = AtomicUsize::new(0);
    let out: Mutex<Vec<Option<U>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let v = f(&items[i]);
                out.lock().unwrap()[i] = Some(v);
            });
        }
    });
    out.into_inner().unwrap().into_iter().map(|v| v.expect("every item mapped")).collect()
}

/// Accumulated outcome of one criterion.
#[derive(Default)]
struct Outcome {
    checked: usize,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Outcome {
    fn report(&mut self, what: &str, r: &Result<CheckReport, Error>) {
        self.checked += 1;
        match r {
            Ok(r) if r.passed() => {}
            Ok(r) => self.failures.push(format!("{what}: {:?} vs {:?}: {:?}", r.lhs, r.rhs, r.diagnostics)),
            Err(e) => self.failures.push(format!("{what}: {e}")),
        }
    }

    fn expect(&mut self, ok: bool, what: impl Into<String>) {
        self.checked += 1;
        if !ok {
            self.failures.push(what.into());
        }
    }
}

/// `count` instances per profile, skipping seeds the generator rejects.
fn instances(profiles: &[InstanceProfile], count: usize) -> Vec<(String, InstanceData)> {
    par_map(profiles, |base| {
        let mut got = Vec::new();
        let mut seed = base.seed;
        while got.len() < count && seed < base.seed + 4 * count as u64 {
            let mut p = base.clone();
            p.seed = seed;
            if let Ok(g) = gen_instance(&p) {
                got.push((format!("p={} f0={} n={} {:?} seed={seed}", p.p, p.f0, p.n, p.parity), g.data));
            }
            seed += 1;
        }
        got
    })
    .into_iter()
    .flatten()
    .collect()
}

fn pair(d: &InstanceData) -> &PairData {
    match d {
        InstanceData::Pair(p) => p,
        InstanceData::BaseChange(_) => panic!("expected a pair"),
    }
}

fn grid(parity: Parity) -> Vec<InstanceProfile> {
    let mut out = Vec::new();
    for p in [3, 5] {
        for f0 in [1, 2] {
            for n in 1..=3 {
                out.push(InstanceProfile::new(p, f0, n, parity, 1000 * n as u64 + 10 * f0 as u64 + p));
            }
        }
    }
    out
}

/// Every report of the earlier suites must have been evaluated twice.
#[derive(Default)]
struct StabilityLedger {
    reports: usize,
    unstable: Vec<String>,
}

impl StabilityLedger {
    fn add(&mut self, what: &str, r: &Result<CheckReport, Error>) {
        if let Ok(r) = r {
            self.reports += 1;
            let twice = r.precisions.len() == 2 && r.precisions[1] == r.precisions[0] + 4;
            if !twice || r.diagnostics.iter().any(|d| d.contains("changed between precisions")) {
                self.unstable.push(format!("{what}: {:?}", r.precisions));
            }
        }
    }
}

fn criterion_1_2(ledger: &mut StabilityLedger) -> (Outcome, Outcome) {
    let data = instances(&grid(Parity::Odd), 17);
    let o = Options::default();
    let results = par_map(&data, |(_, d)| {
        let p = pair(d);
        let rep = vanishing_check(p, &o);
        let vals = p.working_precision().and_then(|n| vanishing_values(&p.realize(n)?, &o));
        (rep, vals)
    });
    let mut c1 = Outcome::default();
    let mut c2 = Outcome::default();
    for ((what, _), (rep, vals)) in data.iter().zip(&results) {
        c1.report(what, rep);
        ledger.add(what, rep);
        match vals {
            Ok(v) => c2.expect(v.involution_ok && v.fixed_points == 0, format!("{what}: duality fixed points")),
            Err(e) => c2.expect(false, format!("{what}: {e}")),
        }
    }
    c1.expect(data.len() >= 200, format!("only {} odd instances", data.len()));
    c1.notes.push(format!("{} odd instances", data.len()));
    c2.notes.push(format!("{} counting sets", data.len()));
    (c1, c2)
}

fn criterion_3(ledger: &mut StabilityLedger) -> Outcome {
    let data = instances(&grid(Parity::Even), 17);
    let o = Options::default();
    let results = par_map(&data, |(_, d)| fl_check(pair(d), &o));
    let mut c = Outcome::default();
    for ((what, _), r) in data.iter().zip(&results) {
        c.report(what, r);
        ledger.add(what, r);
    }
    c.expect(data.len() >= 200, format!("only {} even instances", data.len()));
    c.notes.push(format!("{} even instances", data.len()));
    c
}

fn criterion_4(ledger: &mut StabilityLedger) -> Outcome {
    let mut profiles = Vec::new();
    for p in [3, 5] {
        for f0 in [1, 2] {
            for (n, k) in [(2, 2), (3, 2), (3, 3)] {
                for parity in [Parity::Odd, Parity::Even] {
                    let mut prof = InstanceProfile::new(p, f0, n, parity, 7 + 100 * n as u64 + k as u64);
                    prof.structure = Structure::Split(k);
                    profiles.push(prof);
                }
            }
        }
    }
    let data = instances(&profiles, 5);
    let o = Options::default();
    let results = par_map(&data, |(_, d)| check_product(pair(d), &o));
    let mut c = Outcome::default();
    for ((what, _), r) in data.iter().zip(&results) {
        c.report(what, r);
        ledger.add(what, r);
    }
    c.expect(data.len() >= 100, format!("only {} split instances", data.len()));
    c.notes.push(format!("{} split instances", data.len()));
    c
}

fn criterion_5(ledger: &mut StabilityLedger) -> Outcome {
    let mut c = Outcome::default();
    let o = Options::default();
    // worked example: x = y_A, j = 1, J^A = p over the cubic unramified A0
    let worked = BaseChangeData::new(
        FieldSpec::unramified(3, 3, true),
        ExactMat::from_ints(1, 1, &[3]),
        ExactMat::from_fn(1, 1, |_, _| ExactEntry::from_coords(&[0, 1])),
        ExactMat::from_ints(1, 1, &[1]),
    );
    let r = base_change_compare(&worked, &o);
    c.report("worked example", &r);
    ledger.add("worked example", &r);
    // the report compares f ∂O^A, so read the A-side series directly
    let derived = worked.working_precision().and_then(|m| {
        let (pe, pa) = worked.realize(m)?;
        Ok((orbital_series(&pe, &o)?.derived(), orbital_series(&pa, &o)?.derived()))
    });
    c.expect(derived == Ok((3, 1)), format!("worked example: (∂O, ∂O^A) = {derived:?}"));
    let fields = [
        ("f=3", FieldSpec::unramified(3, 3, true)),
        ("f=5", FieldSpec::unramified(3, 5, true)),
        ("ramified cubic", FieldSpec::ramified(3, 1, vec![-3, 0, 0, 1], true)),
    ];
    let mut profiles = Vec::new();
    for (_, a) in &fields {
        for n in [1, 2] {
            for parity in [Parity::Odd, Parity::Even] {
                let mut prof = InstanceProfile::new(3, 1, n, parity, 50 + n as u64);
                prof.structure = Structure::Subfield(a.clone());
                profiles.push(prof);
            }
        }
    }
    let data = instances(&profiles, 3);
    let results = par_map(&data, |(_, d)| match d {
        InstanceData::BaseChange(b) => (b.f(), base_change_compare(b, &o)),
        InstanceData::Pair(_) => unreachable!(),
    });
    let mut per_f: BTreeMap<String, usize> = BTreeMap::new();
    for ((what, d), (f, r)) in data.iter().zip(&results) {
        c.report(&format!("{what} f={f}"), r);
        ledger.add(what, r);
        if let InstanceData::BaseChange(b) = d {
            let key = if b.a_spec.e() > 1 { "ramified".to_string() } else { format!("f={}", b.f()) };
            *per_f.entry(key).or_default() += 1;
        }
    }
    for key in ["f=3", "f=5", "ramified"] {
        c.expect(per_f.get(key).copied().unwrap_or(0) > 0, format!("no {key} instance"));
    }
    c.notes.push(format!("{:?} plus the worked example", per_f));
    c
}

fn criterion_6(ledger: &mut StabilityLedger) -> Outcome {
    let mut profiles = Vec::new();
    for p in [3, 5] {
        for f0 in [1, 2] {
            for n in 1..=3 {
                for parity in [Parity::Odd, Parity::Even] {
                    let mut prof = InstanceProfile::new(p, f0, n, parity, 300 + p + 10 * n as u64);
                    prof.kind = Stability::Group;
                    profiles.push(prof);
                }
            }
        }
    }
    let o = Options::default();
    // draw seeds until each profile yields pairs with J(j, j) a non-unit;
    // unit norms are handled directly, without an extension
    let per = par_map(&profiles, |base| {
        let mut got = Vec::new();
        let mut skipped = 0;
        for seed in base.seed..base.seed + 80 {
            if got.len() == 3 {
                break;
            }
            let mut p = base.clone();
            p.seed = seed;
            let Ok(g) = gen_instance(&p) else { continue };
            match check_extension(pair(&g.data), &ResidueChoice::Auto, &o) {
                Err(Error::UnitNorm) => skipped += 1,
                r => got.push((format!("p={} f0={} n={} {:?} seed={seed}", p.p, p.f0, p.n, p.parity), r)),
            }
        }
        (got, skipped)
    });
    let mut c = Outcome::default();
    let mut done = 0;
    let mut skipped = 0;
    for (got, sk) in per {
        skipped += sk;
        for (what, r) in got {
            done += 1;
            c.report(&what, &r);
            ledger.add(&what, &r);
        }
    }
    c.expect(done >= 50, format!("only {done} extensions"));
    c.notes.push(format!("{done} group extensions, {skipped} pairs with unit J(j, j) passed over"));
    c
}

fn criterion_7(ledger: &mut StabilityLedger) -> Outcome {
    let mut profiles = Vec::new();
    for p in [3, 5] {
        for n in [1, 2] {
            for parity in [Parity::Odd, Parity::Even] {
                profiles.push(InstanceProfile::new(p, 1, n, parity, 700 + p + 10 * n as u64));
            }
        }
    }
    let data = instances(&profiles, 4);
    let o = Options::default();
    let results = par_map(&data, |(_, d)| check_block_reduction(pair(d), &o));
    let mut c = Outcome::default();
    for ((what, _), r) in data.iter().zip(&results) {
        c.report(what, r);
        ledger.add(what, r);
    }
    c.notes.push(format!("{} Lie extensions", data.len()));
    c
}

fn criterion_8() -> Outcome {
    let mut c = Outcome::default();
    let r = make_ring(&FieldSpec::unramified(3, 1, true), 8).unwrap();
    let qq = r.residue_size() as u128;
    // closed form for (O/pi^a) + (O/pi^b)
    let shapes: Vec<(u32, u32)> = (0..=3).flat_map(|a| (a..=3).map(move |b| (a, b))).collect();
    let counts = par_map(&shapes, |&(a, b)| {
        let exps: Vec<u32> = [a, b].into_iter().filter(|&e| e > 0).collect();
        let q = FiniteQuotient::standard(&r, &exps);
        let mut strategies = vec![Strategy::Echelon, Strategy::Socle];
        if q.size(&r) <= 1000 {
            strategies.push(Strategy::Closure);
        }
        strategies
            .into_iter()
            .map(|s| enumerate_submodules(&r, &q, &[], Mode::All, s, u128::MAX).map(|v| v.len() as u128))
            .collect::<Vec<_>>()
    });
    for (&(a, b), got) in shapes.iter().zip(&counts) {
        let want = chain_ring_count(a, b, qq);
        for g in got {
            c.expect(g.as_ref().ok() == Some(&want), format!("({a},{b}): {g:?} vs {want}"));
        }
    }
    // strategies agree on random operator pairs over every quotient of size <= 10^3
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut cases = Vec::new();
    for exps in [vec![1], vec![2], vec![3], vec![1, 1], vec![1, 2], vec![1, 1, 1]] {
        for _ in 0..6 {
            let n = exps.len();
            let mut m = || {
                let rows: Vec<Vec<Elem>> = (0..n)
                    .map(|_| (0..n).map(|_| r.from_coords(&[rng.random_range(0..3), rng.random_range(0..3)]).unwrap()).collect())
                    .collect();
                Mat::from_rows(&rows)
            };
            let (x, t) = (m(), m());
            cases.push((exps.clone(), x, t));
        }
    }
    let agree = par_map(&cases, |(exps, x, t)| {
        let q = FiniteQuotient::standard(&r, exps);
        let ops = [Operator::linear(x.clone()), Operator::semilinear(t.clone())];
        let runs: Vec<_> = [Strategy::Closure, Strategy::Echelon, Strategy::Socle]
            .into_iter()
            .map(|s| enumerate_submodules(&r, &q, &ops[..1], Mode::StableOnly, s, u128::MAX))
            .collect();
        let all_ops: Vec<_> = [Strategy::Closure, Strategy::Echelon, Strategy::Socle]
            .into_iter()
            .map(|s| enumerate_submodules(&r, &q, &ops, Mode::StableOnly, s, u128::MAX))
            .collect();
        runs.windows(2).all(|w| w[0] == w[1]) && all_ops.windows(2).all(|w| w[0] == w[1])
    });
    for (ok, (exps, _, _)) in agree.iter().zip(&cases) {
        c.expect(*ok, format!("strategies disagree on {exps:?}"));
    }
    // and on the counting problems of generated pairs with |Q| <= 10^3
    let mut data = instances(&grid(Parity::Odd)[..6], 4);
    data.extend(instances(&grid(Parity::Even)[..6], 4));
    let o = Options::default();
    let small = par_map(&data, |(_, d)| -> Result<Option<bool>, Error> {
        let p = pair(d);
        let rs = p.realize(p.working_precision()?)?;
        let Some(cd) = rs.counting_data()? else { return Ok(None) };
        if cd.quotient.size(rs.ring()) > 1000 {
            return Ok(None);
        }
        let sets: Vec<_> = [Strategy::Closure, Strategy::Echelon, Strategy::Socle]
            .into_iter()
            .map(|s| m_set_with(rs.ring(), &cd, &Options { strategy: s, ..o }))
            .collect::<Result<_, _>>()?;
        Ok(Some(sets.windows(2).all(|w| w[0] == w[1])))
    });
    let mut compared = 0;
    for ((what, _), r) in data.iter().zip(&small) {
        match r {
            Ok(Some(ok)) => {
                compared += 1;
                c.expect(*ok, format!("{what}: strategies disagree"));
            }
            Ok(None) => {}
            Err(e) => c.expect(false, format!("{what}: {e}")),
        }
    }
    c.notes.push(format!("{} chain shapes, {} operator cases, {compared} pair quotients", shapes.len(), cases.len()));
    c
}

fn criterion_9(ledger: &mut StabilityLedger) -> Outcome {
    let mut cases = Vec::new();
    for e in 1..=3 {
        cases.push(WittCase::pure(3, e, 4, 4));
        cases.push(WittCase::pure(5, e, 3, 4));
    }
    let t0 = Instant::now();
    let results = par_map(&cases, |case| witt_suite(case, 9));
    let secs = t0.elapsed().as_secs_f64();
    let mut c = Outcome::default();
    for (case, reps) in cases.iter().zip(results) {
        let what = format!("p={} e={} len={}", case.ext.top.p, case.ext.top.e(), case.len);
        for r in reps {
            let id = format!("{what} {}", r.identity);
            let r = Ok(r);
            c.report(&id, &r);
            ledger.add(&id, &r);
        }
    }
    c.expect(secs < 120.0, format!("Witt suite took {secs:.0} s"));
    c.notes.push(format!("{} suites in {secs:.1} s", cases.len()));
    c
}

fn criterion_10(ledger: &StabilityLedger) -> Outcome {
    let mut c = Outcome::default();
    c.checked += ledger.reports;
    c.failures.extend(ledger.unstable.iter().cloned());
    // transfer factor under Λ_ref -> h Λ_ref
    let r = make_ring(&FieldSpec::unramified(3, 1, true), 16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut tried = 0;
    while tried < 60 {
        let n = rng.random_range(1..=3usize);
        let rand_mat = |rows: usize, cols: usize, rng: &mut ChaCha8Rng| {
            let v: Vec<Vec<Elem>> = (0..rows)
                .map(|_| (0..cols).map(|_| r.from_coords(&[rng.random_range(-9..9), rng.random_range(-9..9)]).unwrap()).collect())
                .collect();
            QMat::integral(Mat::from_rows(&v))
        };
        let gamma = rand_mat(n, n, &mut rng);
        let u = rand_mat(n, 1, &mut rng);
        let std = Lattice::standard(&r, n);
        let Ok((l0, w0)) = transfer_factor(&r, &gamma, &u, &std) else { continue };
        // h upper triangular with diagonal p^k_i times units
        let mut h = rand_mat(n, n, &mut rng);
        let mut vdet = 0;
        for i in 0..n {
            let k = rng.random_range(0..3u32);
            vdet += k as i64;
            for j in 0..i {
                h.m.set(i, j, r.zero());
            }
            h.m.set(i, i, r.mul(&r.pi_pow(k), &r.from_coords(&[1 + 3 * rng.random_range(0..3), 3]).unwrap()));
        }
        let href = Lattice::from_basis(&r, &h).unwrap();
        let (l1, w1) = transfer_factor(&r, &gamma, &u, &href).unwrap();
        let sign = if vdet % 2 == 0 { 1 } else { -1 };
        c.expect(l1 == l0 - vdet && w1 == sign * w0, format!("transfer factor: {l0} {w0} -> {l1} {w1}, v(det h) = {vdet}"));
        tried += 1;
    }
    c.notes.push(format!("{} re-run reports, {tried} transfer cases", ledger.reports));
    c
}

fn line(k: usize, name: &str, o: &Outcome, secs: f64) -> bool {
    let ok = o.failures.is_empty() && o.checked > 0;
    println!(
        "criterion {k:>2} {:<4} {name}: {} checks, {} failures [{}] ({secs:.1} s)",
        if ok { "PASS" } else { "FAIL" },
        o.checked,
        o.failures.len(),
        o.notes.join("; ")
    );
    for f in o.failures.iter().take(5) {
        println!("              {f}");
    }
    ok
}

fn main() {
    // honour `cargo test -- --list` and name filters from the test runner
    let args: Vec<String> = std::env::args().collect();
    if args.iter().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let mut ledger = StabilityLedger::default();
    let mut all = true;
    let t = Instant::now();
    let (c1, c2) = criterion_1_2(&mut ledger);
    let s = t.elapsed().as_secs_f64();
    all &= line(1, "vanishing on odd pairs", &c1, s);
    all &= line(2, "duality has no fixed point", &c2, s);
    let mut run = |k: usize, name: &str, f: &mut dyn FnMut(&mut StabilityLedger) -> Outcome| {
        let t = Instant::now();
        let o = f(&mut ledger);
        line(k, name, &o, t.elapsed().as_secs_f64())
    };
    all &= run(3, "I = O on even pairs", &mut criterion_3);
    all &= run(4, "product formula", &mut criterion_4);
    all &= run(5, "base change scaling", &mut criterion_5);
    all &= run(6, "group extensions", &mut criterion_6);
    all &= run(7, "block reduction", &mut criterion_7);
    all &= run(8, "enumeration oracles", &mut |_| criterion_8());
    all &= run(9, "Witt vectors and frames", &mut criterion_9);
    let t = Instant::now();
    let c10 = criterion_10(&ledger);
    all &= line(10, "precision stability and transfer covariance", &c10, t.elapsed().as_secs_f64());
    if !all {
        std::process::exit(1);
    }
}
