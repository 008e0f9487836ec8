//! Truncated relative Witt vectors, Lubin-Tate frames, windows and their
//! duality, and the conversion between displays and frame windows.

use alloc::string::String;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::local_rings::{Elem, FieldSpec};
use crate::reductions::{CheckReport, Rerun, Value};

mod alpha;
mod frame;
mod poly;
mod tensor;
mod window;
mod witt;

pub use alpha::{alpha_tally, alpha_target, AlphaMap};
pub use frame::{
    convert_tally, frame_tally, frobenius_from_frame, frobenius_to_frame, lt_display_from_kappa, lubin_tate_kappa,
    lubin_tate_theta, residue_image, KappaData, LtDisplay, LtFrame, ThetaData,
};
pub use poly::{ghost_poly, y_var, Monomial, Poly, StructurePolys, MAX_LEN};
pub use tensor::{LtExtension, TensorElem, TensorRing};
pub use window::{
    diagonal_window, dual_window, epsilon_twist_tally, f_dot, mat_inverse, mat_mul, pairing, pairing_tally,
    random_twist, random_window, transpose, twist_window, TMat, Window,
};
pub use witt::{random_elem, WittRing, WittVector};

/// Counts of checked relations with the names of the failing ones.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub passed: i64,
    pub total: i64,
    pub failures: Vec<String>,
}

impl Tally {
    pub fn check(&mut self, ok: bool, what: &str) {
        self.total += 1;
        if ok {
            self.passed += 1;
        } else if !self.failures.iter().any(|f| f == what) {
            self.failures.push(what.into());
        }
    }

    pub fn merge(&mut self, o: Tally) {
        self.passed += o.passed;
        self.total += o.total;
        for f in o.failures {
            if !self.failures.contains(&f) {
                self.failures.push(f);
            }
        }
    }

    pub fn ok(&self) -> bool {
        self.passed == self.total && self.total > 0
    }

    fn from_result(r: Result<Tally>) -> Tally {
        r.unwrap_or_else(|e| Tally { passed: 0, total: 1, failures: alloc::vec![alloc::format!("{e}")] })
    }
}

/// Ring axioms, ghost homomorphism, `FV = pi`, `V(x F(y)) = V(x) y`,
/// Teichmuller multiplicativity, `F[a] = [a^q]` and the ghost behaviour of
/// `F` and `V`.
pub fn witt_tally(w: &WittRing, seed: u64) -> Tally {
    let mut t = Tally::default();
    let r = w.ring();
    let l = w.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pi_r = w.pi_image();
    let one = w.one(l);
    let zero = w.zero(l);
    for _ in 0..4 {
        let x = w.random(&mut rng, l);
        let y = w.random(&mut rng, l);
        let z = w.random(&mut rng, l);
        let (gx, gy) = (w.ghost(&x), w.ghost(&y));
        let gs: Vec<Elem> = gx.iter().zip(&gy).map(|(a, b)| r.add(a, b)).collect();
        let gp: Vec<Elem> = gx.iter().zip(&gy).map(|(a, b)| r.mul(a, b)).collect();
        t.check(w.ghost(&w.add(&x, &y)) == gs, "ghost(x + y) = ghost(x) + ghost(y)");
        t.check(w.ghost(&w.mul(&x, &y)) == gp, "ghost(x y) = ghost(x) ghost(y)");
        t.check(w.add(&x, &y) == w.add(&y, &x), "x + y = y + x");
        t.check(w.mul(&x, &y) == w.mul(&y, &x), "x y = y x");
        t.check(w.add(&w.add(&x, &y), &z) == w.add(&x, &w.add(&y, &z)), "(x + y) + z = x + (y + z)");
        t.check(w.mul(&w.mul(&x, &y), &z) == w.mul(&x, &w.mul(&y, &z)), "(x y) z = x (y z)");
        let lhs = w.mul(&x, &w.add(&y, &z));
        t.check(lhs == w.add(&w.mul(&x, &y), &w.mul(&x, &z)), "x (y + z) = x y + x z");
        t.check(w.mul(&x, &one) == x && w.add(&x, &zero) == x, "units of + and *");
        t.check(w.add(&x, &w.neg(&x)) == zero, "x + (-x) = 0");
        let xs = x.truncate(l - 1);
        let fv = w.frobenius(&w.verschiebung(&xs));
        t.check(Ok(fv) == w.pi(l - 1).map(|p| w.mul(&p, &xs)), "F V = pi");
        let lhs = w.verschiebung(&w.mul(&xs, &w.frobenius(&y)));
        t.check(lhs == w.mul(&w.verschiebung(&xs), &y), "V(x F(y)) = V(x) y");
        let gv = w.ghost(&w.verschiebung(&xs));
        let gxs = w.ghost(&xs);
        let ok = gv[0].is_zero() && (1..l).all(|n| gv[n] == r.mul(&pi_r, &gxs[n - 1]));
        t.check(ok, "ghost(V x)_n = pi ghost(x)_(n-1)");
        let gf = w.ghost(&w.frobenius(&x));
        t.check((0..l - 1).all(|n| gf[n] == gx[n + 1]), "ghost(F x)_n = ghost(x)_(n+1)");
        let (a, b) = (random_elem(r, &mut rng), random_elem(r, &mut rng));
        let tab = w.mul(&w.teichmuller(&a, l), &w.teichmuller(&b, l));
        t.check(tab == w.teichmuller(&r.mul(&a, &b), l), "[a][b] = [ab]");
        let fa = w.frobenius(&w.teichmuller(&a, l));
        t.check(fa == w.teichmuller(&r.pow(&a, w.q()), l - 1), "F[a] = [a^q]");
    }
    t
}

/// Properties of `theta` and `kappa`: both verifications, the valuation of
/// the image of `theta`, `pi' theta-bar = 0` modulo `pi` and the unit test.
pub fn theta_kappa_tally(s: &TensorRing) -> Result<Tally> {
    let mut t = Tally::default();
    let r = s.ring();
    let e = s.e();
    let th = lubin_tate_theta(s)?;
    t.check(th.image_valuation == Some(e as u32 - 1), "image of theta has valuation e - 1");
    let killed = r.reduce(&r.mul(&s.pi_prime(), &th.image), e as u32);
    t.check(killed.is_zero(), "pi' theta-bar = 0 modulo pi");
    let k = lubin_tate_kappa(s, &th.theta)?;
    t.check(r.is_unit(&k.residue), "kappa is a unit");
    if e == 1 {
        t.check(epsilon_ghost_ok(s, &k.kappa), "w_(n-1)(eps) = 1 - pi^(q^n - 1)");
    }
    Ok(t)
}

/// For `O' = O`: `kappa = eps = V^-1(pi - [pi])` has ghost components
/// `w_(n-1)(eps) = 1 - pi^(q^n - 1)`.
pub fn epsilon_ghost_ok(s: &TensorRing, eps: &TensorElem) -> bool {
    let w = &s.w;
    let r = s.ring();
    let pi = w.pi_image();
    let g = w.ghost(&eps.c[0]);
    g.iter().enumerate().all(|(i, gi)| {
        let n = i as u32 + 1;
        *gi == r.sub(&r.one(), &r.pow(&pi, w.q().pow(n) - 1))
    })
}

/// `F(1)` recovered from `kappa` and from `kappa v` scales by `v`.
pub fn display_tally(frame: &LtFrame, seed: u64) -> Result<Tally> {
    let s = &frame.s;
    let mut t = Tally::default();
    let d = lt_display_from_kappa(frame, &frame.kappa, seed)?;
    t.check(true, "relation F-dot(xi) = V^-1(xi) F(1)");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut v = s.random(&mut rng, frame.kappa.len());
    while !s.is_unit(&v) {
        v = s.random(&mut rng, frame.kappa.len());
    }
    let dv = lt_display_from_kappa(frame, &s.mul(&frame.kappa, &v), seed)?;
    t.check(dv.f_one == s.mul(&d.f_one, &v), "kappa -> kappa v scales F(1) by v");
    t.merge(convert_tally(frame, &d, seed)?);
    let fp = frobenius_to_frame(frame, &d)?;
    let fpv = frobenius_to_frame(frame, &dv)?;
    t.check(fpv == s.mul(&fp, &v).truncate(fpv.len()), "F -> F' is natural in unit scalings");
    Ok(t)
}

/// Pairing identity and double dual on windows of rank one and two, and the
/// twist comparison for the strict case and a random unit.
pub fn window_tally(frame: &LtFrame, seed: u64) -> Result<Tally> {
    let s = &frame.s;
    let mut t = Tally::default();
    let shapes: [&[bool]; 4] = [&[true], &[false], &[true, false], &[false, true]];
    for (i, shape) in shapes.iter().enumerate() {
        let w = random_window(s, shape, seed + i as u64)?;
        t.merge(pairing_tally(frame, &w, seed + 17 * i as u64)?);
        let one = s.one(s.len() - 1);
        t.merge(epsilon_twist_tally(frame, &w, &one, &one)?);
        let (eps, u) = random_twist(s, seed + 31 * i as u64)?;
        t.merge(epsilon_twist_tally(frame, &w, &eps, &u)?);
    }
    Ok(t)
}

/// Parameters of one suite run.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WittCase {
    pub ext: LtExtension,
    /// Witt length, at most `MAX_LEN`.
    pub len: usize,
    /// `pi'`-adic precision of `R`.
    pub prec: u32,
}

impl WittCase {
    pub fn new(ext: LtExtension, len: usize, prec: u32) -> WittCase {
        WittCase { ext, len, prec }
    }

    /// `Z_p[pi']` with `pi'^e = p`, seen over `Z_p`.
    pub fn pure(p: u64, e: usize, len: usize, prec: u32) -> WittCase {
        let top = if e == 1 {
            FieldSpec::unramified(p, 1, false)
        } else {
            let mut eis = alloc::vec![0i64; e + 1];
            eis[0] = -(p as i64);
            eis[e] = 1;
            FieldSpec::ramified(p, 1, eis, false)
        };
        WittCase::new(LtExtension::over_zp(&top), len, prec)
    }
}

pub const SUITE_IDENTITIES: [&str; 7] = [
    "Witt identities over Z_p",
    "Witt identities over O'",
    "theta and kappa",
    "frame relations",
    "display and conversion",
    "window pairing and twist",
    "alpha is a strict morphism",
];

fn suite_tallies(case: &WittCase, prec: u32, seed: u64) -> Result<Vec<Tally>> {
    let s = TensorRing::new(&case.ext, case.len, prec)?;
    let own = TensorRing::new(&LtExtension::trivial(&case.ext.top), case.len, prec)?;
    let mut out = Vec::new();
    out.push(witt_tally(&s.w, seed));
    out.push(witt_tally(&own.w, seed));
    let mut tk = Tally::from_result(theta_kappa_tally(&s));
    tk.merge(Tally::from_result(theta_kappa_tally(&own)));
    out.push(tk);
    let frame = LtFrame::from_ring(s);
    let own_frame = LtFrame::from_ring(own);
    let per = |f: &dyn Fn(&LtFrame) -> Result<Tally>| -> Tally {
        let mut t = Tally::default();
        for fr in [&frame, &own_frame] {
            t.merge(Tally::from_result(fr.clone().and_then(|fr| f(&fr))));
        }
        t
    };
    out.push(per(&|f| frame_tally(f, seed)));
    out.push(per(&|f| display_tally(f, seed)));
    out.push(per(&|f| window_tally(f, seed)));
    let alpha = if case.ext.base == case.ext.top {
        Tally { passed: 1, total: 1, failures: Vec::new() }
    } else {
        Tally::from_result(frame.and_then(|f| alpha_tally(&f, seed)))
    };
    out.push(alpha);
    Ok(out)
}

/// The full suite: each identity is tallied at `prec` and `prec + 4` and
/// reported with `lhs` = relations passed, `rhs` = relations checked.
pub fn witt_suite(case: &WittCase, seed: u64) -> Vec<CheckReport> {
    let precs = alloc::vec![case.prec, case.prec + 4];
    let runs: Vec<Result<Vec<Tally>>> = precs.iter().map(|&k| suite_tallies(case, k, seed)).collect();
    let (a, b) = match (&runs[0], &runs[1]) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            return SUITE_IDENTITIES
                .iter()
                .map(|id| CheckReport::failure(id, precs.clone(), alloc::format!("{e}")))
                .collect();
        }
    };
    SUITE_IDENTITIES
        .iter()
        .zip(a.iter().zip(b))
        .map(|(id, (x, y))| {
            let run = Rerun { precisions: precs.clone(), stable: x == y };
            let names: Vec<&str> = x.failures.iter().map(|s| s.as_str()).collect();
            let extra: Vec<(bool, &str)> = names.iter().map(|n| (false, *n)).collect();
            CheckReport::new(id, Value::Int(x.passed), Value::Int(x.total), &run, &extra)
        })
        .collect()
}

/// Serializable view of a frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameSummary {
    pub extension: LtExtension,
    pub m: usize,
    pub theta_coords: Vec<Vec<Vec<u64>>>,
    pub kappa_coords: Vec<Vec<Vec<u64>>>,
}

impl FrameSummary {
    pub fn of(frame: &LtFrame) -> FrameSummary {
        let r = frame.s.ring();
        FrameSummary {
            extension: frame.s.ext.clone(),
            m: frame.len(),
            theta_coords: frame.theta().coords(r),
            kappa_coords: frame.kappa.coords(r),
        }
    }
}
