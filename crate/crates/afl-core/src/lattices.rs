//! Lattices in `E^n`, finite quotients `L^v / L`, and exhaustive enumeration of
//! intermediate submodules.
//!
//! A lattice is stored as `pi^(-shift) H O^n` with `H` an integral column
//! Hermite form whose entries are not all divisible by `pi`; this makes the
//! representation unique. Submodules of a quotient `O^n / diag(pi^e)` are
//! stored by the Hermite form of their preimage in `O^n`.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::local_rings::{Elem, RingData};
use crate::matrix::{hnf, inverse_q, snf, Hnf, Mat, QMat};

/// Default bound on `|Q|` for enumeration.
pub const DEFAULT_CAP: u128 = 100_000;

/// A full-rank lattice `pi^(-shift) * span(hnf.h)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lattice {
    pub shift: i64,
    pub hnf: Hnf,
}

impl Lattice {
    pub fn standard(r: &RingData, n: usize) -> Lattice {
        Lattice { shift: 0, hnf: Hnf { h: Mat::identity(r, n), k: vec![0; n] } }
    }

    /// Lattice spanned by the columns of `b` (at least `n` of them).
    pub fn from_basis(r: &RingData, b: &QMat) -> Result<Lattice> {
        let h = hnf(r, &b.m);
        if h.k.iter().any(|&k| k >= r.prec()) {
            return Err(Error::Singular);
        }
        // the span must contain pi^prec O^n to be determined by known digits
        let p = b.eff_prec(r);
        if p < r.prec() {
            let n = b.m.rows;
            for i in 0..n {
                let mut v = vec![Elem::ZERO; n];
                v[i] = r.pi_pow(p);
                if !h.contains(r, &v) {
                    return Err(Error::PrecisionExhausted("lattice basis".into()));
                }
            }
        }
        let content = h.h.min_val(r).unwrap_or(0);
        let mut shift = b.shift as i64;
        let h = if content > 0 {
            shift -= content as i64;
            hnf(r, &h.h.div_pi_pow(r, content))
        } else {
            h
        };
        Ok(Lattice { shift, hnf: h })
    }

    pub fn from_integral(r: &RingData, m: &Mat) -> Result<Lattice> {
        Lattice::from_basis(r, &QMat::integral(m.clone()))
    }

    pub fn n(&self) -> usize {
        self.hnf.n()
    }

    /// Canonical basis as a matrix with denominator.
    pub fn basis(&self, r: &RingData) -> QMat {
        if self.shift >= 0 {
            QMat::integral(self.hnf.h.clone()).shifted(self.shift as u32)
        } else {
            QMat::integral(self.hnf.h.mul_pi_pow(r, (-self.shift) as u32))
        }
    }

    /// `pi^k * self`.
    pub fn scaled(&self, k: i64) -> Lattice {
        Lattice { shift: self.shift - k, hnf: self.hnf.clone() }
    }

    /// Valuation of the determinant of any basis.
    pub fn vdet(&self) -> i64 {
        self.hnf.k.iter().map(|&k| k as i64).sum::<i64>() - self.n() as i64 * self.shift
    }

    /// Membership of the vector `pi^(-t) u`.
    pub fn contains_vec(&self, r: &RingData, t: u32, u: &[Elem]) -> bool {
        let d = self.shift - t as i64;
        if d >= 0 {
            let w: Vec<Elem> = u.iter().map(|x| r.mul_pi_pow(x, d as u32)).collect();
            self.hnf.contains(r, &w)
        } else {
            let need = (-d) as u32;
            if u.iter().any(|x| r.val(x).is_some_and(|v| v < need)) {
                return false;
            }
            let w: Vec<Elem> = u.iter().map(|x| r.div_pi_pow(x, need)).collect();
            self.hnf.contains(r, &w)
        }
    }

    /// Whether every column of `m` lies in the lattice.
    pub fn contains_cols(&self, r: &RingData, m: &QMat) -> bool {
        (0..m.m.cols).all(|j| self.contains_vec(r, m.shift, &m.m.col(j)))
    }

    /// `other ⊆ self`.
    pub fn contains(&self, r: &RingData, other: &Lattice) -> bool {
        self.contains_cols(r, &other.basis(r))
    }

    pub fn sum(&self, r: &RingData, other: &Lattice) -> Result<Lattice> {
        let (a, b) = (self.basis(r), other.basis(r));
        let s = a.shift.max(b.shift);
        let m = a.m.mul_pi_pow(r, s - a.shift).hcat(&b.m.mul_pi_pow(r, s - b.shift));
        Lattice::from_basis(r, &QMat::integral(m).shifted(s))
    }

    /// Image under `v -> op v`, or `v -> op sigma(v)` when semilinear.
    pub fn apply(&self, r: &RingData, op: &QMat, semilinear: bool) -> Result<Lattice> {
        let b = self.basis(r);
        let b = if semilinear { b.conj(r) } else { b };
        Lattice::from_basis(r, &op.mul(r, &b))
    }

    /// `op(self) ⊆ self`.
    pub fn is_stable(&self, r: &RingData, op: &QMat, semilinear: bool) -> bool {
        let b = self.basis(r);
        let b = if semilinear { b.conj(r) } else { b };
        self.contains_cols(r, &op.mul(r, &b))
    }

    /// `op(self) = self`.
    pub fn is_invariant(&self, r: &RingData, op: &QMat, semilinear: bool) -> bool {
        match self.apply(r, op, semilinear) {
            Ok(img) => img == *self,
            Err(_) => false,
        }
    }
}

/// Relative index `len(a/(a∩b)) - len(b/(a∩b))`; `index(Λ, hΛ) = v(det h)`.
pub fn index(a: &Lattice, b: &Lattice) -> i64 {
    b.vdet() - a.vdet()
}

/// An operator acting on coordinate vectors, possibly through `sigma`.
#[derive(Clone, Debug)]
pub struct Operator {
    pub mat: Mat,
    pub semilinear: bool,
}

impl Operator {
    pub fn linear(mat: Mat) -> Operator {
        Operator { mat, semilinear: false }
    }

    pub fn semilinear(mat: Mat) -> Operator {
        Operator { mat, semilinear: true }
    }

    pub fn apply(&self, r: &RingData, v: &[Elem]) -> Vec<Elem> {
        if self.semilinear {
            let w: Vec<Elem> = v.iter().map(|x| r.conj(x)).collect();
            self.mat.mul_vec(r, &w)
        } else {
            self.mat.mul_vec(r, v)
        }
    }
}

/// `Lv / L` presented as `O^n / diag(pi^exps)` in the basis `basis` of `Lv`.
#[derive(Clone, Debug)]
pub struct FiniteQuotient {
    pub exps: Vec<u32>,
    /// Columns form a basis of the upper lattice; `basis * diag(pi^exps)` spans the lower one.
    pub basis: QMat,
}

impl FiniteQuotient {
    /// Standalone quotient `O^n / diag(pi^exps)` with the identity basis.
    pub fn standard(r: &RingData, exps: &[u32]) -> FiniteQuotient {
        FiniteQuotient { exps: exps.to_vec(), basis: QMat::integral(Mat::identity(r, exps.len())) }
    }

    pub fn n(&self) -> usize {
        self.exps.len()
    }

    /// Elementary divisor exponents, nonzero, in decreasing order.
    pub fn divisors(&self) -> Vec<u32> {
        let mut d: Vec<u32> = self.exps.iter().copied().filter(|&e| e > 0).collect();
        d.sort_unstable_by(|a, b| b.cmp(a));
        d
    }

    /// Total `O`-length.
    pub fn length(&self) -> u32 {
        self.exps.iter().sum()
    }

    /// Cardinality, saturating at `u128::MAX`.
    pub fn size(&self, r: &RingData) -> u128 {
        let q = r.residue_size() as u128;
        let mut s: u128 = 1;
        for _ in 0..self.length() {
            s = s.saturating_mul(q);
        }
        s
    }

    /// Preimage of the zero submodule.
    pub fn zero(&self, r: &RingData) -> Submodule {
        let d: Vec<Elem> = self.exps.iter().map(|&e| r.pi_pow(e)).collect();
        Submodule { hnf: hnf(r, &Mat::diag(&d)), length: 0 }
    }

    pub fn full(&self, r: &RingData) -> Submodule {
        Submodule { hnf: hnf(r, &Mat::identity(r, self.n())), length: self.length() }
    }

    /// Ambient lattice corresponding to a submodule.
    pub fn to_lattice(&self, r: &RingData, s: &Submodule) -> Result<Lattice> {
        Lattice::from_basis(r, &self.basis.mul(r, &QMat::integral(s.hnf.h.clone())))
    }

    /// Submodule corresponding to an intermediate lattice.
    pub fn from_lattice(&self, r: &RingData, lat: &Lattice) -> Result<Submodule> {
        let inv = inverse_q(r, &self.basis)?;
        let c = inv.mul(r, &lat.basis(r));
        let m = c.to_integral(r).ok_or(Error::NotIncluded)?;
        let mut gens = m;
        for (i, &e) in self.exps.iter().enumerate() {
            let mut col = vec![Elem::ZERO; self.n()];
            col[i] = r.pi_pow(e);
            gens = gens.hcat(&Mat::from_cols(self.n(), &[col]));
        }
        let h = hnf(r, &gens);
        let zero = self.zero(r);
        if !h.contains_all(r, &zero.hnf.h) {
            return Err(Error::NotIncluded);
        }
        Ok(self.submodule(h))
    }

    pub fn submodule(&self, h: Hnf) -> Submodule {
        let length = self.length() - h.colength();
        Submodule { hnf: h, length }
    }
}

/// Quotient `upper / lower`; fails unless `lower ⊆ upper`.
pub fn quotient(r: &RingData, lower: &Lattice, upper: &Lattice) -> Result<FiniteQuotient> {
    if !upper.contains(r, lower) {
        return Err(Error::NotIncluded);
    }
    let bv = upper.basis(r);
    let coords = inverse_q(r, &bv)?.mul(r, &lower.basis(r));
    let m = coords.to_integral(r).ok_or(Error::NotIncluded)?;
    let s = snf(r, &m);
    let mut exps = Vec::with_capacity(m.rows);
    for d in &s.d {
        exps.push(d.ok_or(Error::Singular)?);
    }
    let basis = bv.mul(r, &QMat::integral(s.linv));
    Ok(FiniteQuotient { exps, basis })
}

/// A submodule of a finite quotient, with its `O`-length.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Submodule {
    pub hnf: Hnf,
    pub length: u32,
}

impl Submodule {
    pub fn is_stable(&self, r: &RingData, op: &Operator) -> bool {
        let h = &self.hnf;
        (0..h.n()).all(|j| h.contains(r, &op.apply(r, &h.h.col(j))))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    All,
    StableOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Adjoin every element of the quotient; the oracle.
    Closure,
    /// Column-by-column echelon generation, then filtering.
    Echelon,
    /// Adjoin only socle lines of the complement; the fast path.
    Socle,
}

/// Every submodule of `q` (optionally only those stable under `ops`), sorted.
pub fn enumerate_submodules(
    r: &RingData,
    q: &FiniteQuotient,
    ops: &[Operator],
    mode: Mode,
    strategy: Strategy,
    cap: u128,
) -> Result<Vec<Submodule>> {
    let size = q.size(r);
    if size > cap {
        return Err(Error::CapExceeded { required: size, cap });
    }
    if let Some(&e) = q.exps.iter().max() {
        if e + 1 >= r.prec() {
            return Err(Error::PrecisionExhausted("quotient exponent near working precision".into()));
        }
    }
    let ops: &[Operator] = if mode == Mode::All { &[] } else { ops };
    let mut out = match strategy {
        Strategy::Echelon => echelon_all(r, q)
            .into_iter()
            .filter(|s| ops.iter().all(|op| s.is_stable(r, op)))
            .collect(),
        Strategy::Closure => bfs(r, q, ops, false),
        Strategy::Socle => bfs(r, q, ops, true),
    };
    out.sort();
    Ok(out)
}

/// Hermite form of the smallest `ops`-stable submodule containing `gens`.
fn close(r: &RingData, gens: Mat, ops: &[Operator]) -> Hnf {
    let n = gens.rows;
    let mut h = hnf(r, &gens);
    loop {
        let mut extra = Vec::new();
        for j in 0..n {
            let c = h.h.col(j);
            for op in ops {
                let w = op.apply(r, &c);
                if !h.contains(r, &w) {
                    extra.push(w);
                }
            }
        }
        if extra.is_empty() {
            return h;
        }
        h = hnf(r, &h.h.hcat(&Mat::from_cols(n, &extra)));
    }
}

fn bfs(r: &RingData, q: &FiniteQuotient, ops: &[Operator], socle_only: bool) -> Vec<Submodule> {
    let n = q.n();
    let start = close(r, q.zero(r).hnf.h, ops);
    let mut seen: BTreeSet<Hnf> = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    let all_elems = if socle_only { Vec::new() } else { quotient_elements(r, q) };
    while let Some(h) = queue.pop_front() {
        let cands = if socle_only { socle_lines(r, &h) } else { all_elems.clone() };
        for v in cands {
            if h.contains(r, &v) {
                continue;
            }
            let g = h.h.hcat(&Mat::from_cols(n, &[v]));
            let c = close(r, g, ops);
            if !seen.contains(&c) {
                seen.insert(c.clone());
                queue.push_back(c);
            }
        }
    }
    seen.into_iter().map(|h| q.submodule(h)).collect()
}

/// Representatives of the lines in the socle of `O^n / span(h)`.
fn socle_lines(r: &RingData, h: &Hnf) -> Vec<Vec<Elem>> {
    let n = h.n();
    let s = snf(r, &h.h);
    let mut gens = Vec::new();
    for (i, d) in s.d.iter().enumerate() {
        let d = d.unwrap_or(r.prec());
        if d >= 1 {
            let col = s.linv.col(i);
            gens.push(col.iter().map(|x| r.mul_pi_pow(x, d - 1)).collect::<Vec<Elem>>());
        }
    }
    let k = gens.len();
    let qsz = r.residue_size();
    let mut out = Vec::new();
    // lambda vectors with leading nonzero entry equal to 1
    for lead in 0..k {
        let tail = k - lead - 1;
        let count = qsz.pow(tail as u32);
        for mut idx in 0..count {
            let mut v = gens[lead].clone();
            for g in gens.iter().skip(lead + 1) {
                let lam = r.residue_lift(idx % qsz);
                idx /= qsz;
                if lam.is_zero() {
                    continue;
                }
                for t in 0..n {
                    v[t] = r.add(&v[t], &r.mul(&lam, &g[t]));
                }
            }
            out.push(v);
        }
    }
    out
}

/// Canonical representatives of all elements of the quotient.
fn quotient_elements(r: &RingData, q: &FiniteQuotient) -> Vec<Vec<Elem>> {
    let mut out: Vec<Vec<Elem>> = vec![Vec::new()];
    for &e in &q.exps {
        let reps = residues_mod(r, e);
        let mut next = Vec::with_capacity(out.len() * reps.len());
        for v in &out {
            for x in &reps {
                let mut w = v.clone();
                w.push(*x);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// Canonical representatives of `O / pi^k`.
pub fn residues_mod(r: &RingData, k: u32) -> Vec<Elem> {
    let (f, e) = (r.f(), r.e());
    let mut bounds = Vec::with_capacity(f * e);
    for j in 0..e {
        let ex = if (k as usize) > j { (k as usize - j).div_ceil(e) as u32 } else { 0 };
        for _ in 0..f {
            bounds.push(r.p().pow(ex));
        }
    }
    let mut out = vec![Elem::ZERO];
    for (i, &b) in bounds.iter().enumerate() {
        if b <= 1 {
            continue;
        }
        let mut next = Vec::with_capacity(out.len() * b as usize);
        for x in &out {
            for c in 0..b {
                let mut y = *x;
                y.c[i] = c;
                next.push(y);
            }
        }
        out = next;
    }
    out
}

fn echelon_all(r: &RingData, q: &FiniteQuotient) -> Vec<Submodule> {
    let n = q.n();
    let mut out = Vec::new();
    let mut cols: Vec<Vec<Elem>> = Vec::new();
    let mut ks: Vec<u32> = Vec::new();
    echelon_rec(r, q, n, &mut cols, &mut ks, &mut out);
    out
}

fn echelon_rec(
    r: &RingData,
    q: &FiniteQuotient,
    n: usize,
    cols: &mut Vec<Vec<Elem>>,
    ks: &mut Vec<u32>,
    out: &mut Vec<Submodule>,
) {
    let c = cols.len();
    if c == n {
        let h = Hnf { h: Mat::from_cols(n, cols), k: ks.clone() };
        out.push(q.submodule(h));
        return;
    }
    let ec = q.exps[c];
    for k in 0..=ec {
        let choices: Vec<Vec<Elem>> = (0..c).map(|row| residues_mod(r, ks[row])).collect();
        let total: usize = choices.iter().map(Vec::len).product();
        for mut idx in 0..total {
            let mut col = vec![Elem::ZERO; n];
            for (row, ch) in choices.iter().enumerate() {
                col[row] = ch[idx % ch.len()];
                idx /= ch.len();
            }
            col[c] = r.pi_pow(k);
            cols.push(col);
            ks.push(k);
            let mut target = vec![Elem::ZERO; n];
            target[c] = r.pi_pow(ec);
            if prefix_contains(r, cols, ks, &target) {
                echelon_rec(r, q, n, cols, ks, out);
            }
            cols.pop();
            ks.pop();
        }
    }
}

/// Membership in the span of upper-triangular columns `0..cols.len()`.
fn prefix_contains(r: &RingData, cols: &[Vec<Elem>], ks: &[u32], v: &[Elem]) -> bool {
    let mut w = v.to_vec();
    if w[cols.len()..].iter().any(|x| !x.is_zero()) {
        return false;
    }
    for row in (0..cols.len()).rev() {
        let x = w[row];
        if x.is_zero() {
            continue;
        }
        match r.val(&x) {
            Some(vx) if vx >= ks[row] => {
                let c = r.div_pi_pow(&x, ks[row]);
                for i in 0..=row {
                    w[i] = r.sub(&w[i], &r.mul(&c, &cols[row][i]));
                }
            }
            _ => return false,
        }
    }
    true
}

/// Number of submodules of `O/pi^a ⊕ O/pi^b` over a chain ring with residue
/// field of size `qq`.
pub fn chain_ring_count(a: u32, b: u32, qq: u128) -> u128 {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    (0..=a).map(|i| (b - a + 2 * i + 1) as u128 * qq.pow(a - i)).sum()
}
