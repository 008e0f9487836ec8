//! Dense matrices over a truncated ring, with Hermite and Smith forms.
//!
//! All forms are computed modulo `pi^N`. Divisions by a pivot `pi^k` lose the
//! top `k` digits of the quotient; the transforms stay exact modulo `pi^N`, so
//! a lattice is effectively handled modulo `pi^N` times the standard lattice.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::local_rings::{Elem, RingData};

/// Row-major matrix of ring elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub a: Vec<Elem>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat { rows, cols, a: vec![Elem::ZERO; rows * cols] }
    }

    pub fn identity(r: &RingData, n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, r.one());
        }
        m
    }

    pub fn diag(d: &[Elem]) -> Mat {
        let n = d.len();
        let mut m = Mat::zeros(n, n);
        for (i, x) in d.iter().enumerate() {
            m.set(i, i, *x);
        }
        m
    }

    pub fn from_cols(rows: usize, cols: &[Vec<Elem>]) -> Mat {
        let mut m = Mat::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..rows {
                m.set(i, j, c[i]);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Elem>]) -> Mat {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Mat::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            for j in 0..cols {
                m.set(i, j, r[j]);
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.a[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: Elem) {
        self.a[i * self.cols + j] = x;
    }

    pub fn col(&self, j: usize) -> Vec<Elem> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn cols_vec(&self) -> Vec<Vec<Elem>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(Elem::is_zero)
    }

    pub fn mul(&self, r: &RingData, o: &Mat) -> Mat {
        assert_eq!(self.cols, o.rows, "matrix shapes do not compose");
        let mut m = Mat::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let x = self.get(i, k);
                if x.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let y = o.get(k, j);
                    if !y.is_zero() {
                        let cur = m.get(i, j);
                        m.set(i, j, r.add(&cur, &r.mul(&x, &y)));
                    }
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, r: &RingData, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Elem::ZERO;
                for (k, x) in v.iter().enumerate() {
                    acc = r.add(&acc, &r.mul(&self.get(i, k), x));
                }
                acc
            })
            .collect()
    }

    fn zip(&self, o: &Mat, f: impl Fn(&Elem, &Elem) -> Elem) -> Mat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            a: self.a.iter().zip(&o.a).map(|(x, y)| f(x, y)).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(&Elem) -> Elem) -> Mat {
        Mat { rows: self.rows, cols: self.cols, a: self.a.iter().map(f).collect() }
    }

    pub fn add(&self, r: &RingData, o: &Mat) -> Mat {
        self.zip(o, |x, y| r.add(x, y))
    }

    pub fn sub(&self, r: &RingData, o: &Mat) -> Mat {
        self.zip(o, |x, y| r.sub(x, y))
    }

    pub fn neg(&self, r: &RingData) -> Mat {
        self.map(|x| r.neg(x))
    }

    pub fn scale(&self, r: &RingData, c: &Elem) -> Mat {
        self.map(|x| r.mul(x, c))
    }

    pub fn transpose(&self) -> Mat {
        let mut m = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j));
            }
        }
        m
    }

    /// Entrywise conjugation.
    pub fn conj(&self, r: &RingData) -> Mat {
        self.map(|x| r.conj(x))
    }

    /// `sigma(M)^T`.
    pub fn dagger(&self, r: &RingData) -> Mat {
        self.conj(r).transpose()
    }

    /// Smallest entry valuation, `None` for the zero matrix.
    pub fn min_val(&self, r: &RingData) -> Option<u32> {
        self.a.iter().filter_map(|x| r.val(x)).min()
    }

    pub fn div_pi_pow(&self, r: &RingData, k: u32) -> Mat {
        self.map(|x| r.div_pi_pow(x, k))
    }

    pub fn mul_pi_pow(&self, r: &RingData, k: u32) -> Mat {
        self.map(|x| r.mul_pi_pow(x, k))
    }

    pub fn reduce(&self, r: &RingData, k: u32) -> Mat {
        self.map(|x| r.reduce(x, k))
    }

    /// Columns `j0..j1`.
    pub fn col_block(&self, j0: usize, j1: usize) -> Mat {
        let cols: Vec<Vec<Elem>> = (j0..j1).map(|j| self.col(j)).collect();
        Mat::from_cols(self.rows, &cols)
    }

    /// Block-diagonal sum.
    pub fn block_diag(&self, o: &Mat) -> Mat {
        let mut m = Mat::zeros(self.rows + o.rows, self.cols + o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j));
            }
        }
        for i in 0..o.rows {
            for j in 0..o.cols {
                m.set(self.rows + i, self.cols + j, o.get(i, j));
            }
        }
        m
    }

    pub fn hcat(&self, o: &Mat) -> Mat {
        assert_eq!(self.rows, o.rows);
        let mut cols = self.cols_vec();
        cols.extend(o.cols_vec());
        Mat::from_cols(self.rows, &cols)
    }
}

/// Marker for matrices known to full working precision.
pub const FULL: u32 = u32::MAX;

/// Matrix with a common denominator: `pi^(-shift) * m`, where `m` is known
/// modulo `pi^prec` (relative precision).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMat {
    pub shift: u32,
    pub m: Mat,
    pub prec: u32,
}

impl QMat {
    pub fn new(shift: u32, m: Mat, prec: u32) -> QMat {
        QMat { shift, m, prec }
    }

    pub fn integral(m: Mat) -> QMat {
        QMat { shift: 0, m, prec: FULL }
    }

    /// Relative precision capped by the ring.
    pub fn eff_prec(&self, r: &RingData) -> u32 {
        self.prec.min(r.prec())
    }

    /// Absolute precision: entries are known modulo `pi^abs_prec`.
    pub fn abs_prec(&self, r: &RingData) -> i64 {
        self.eff_prec(r) as i64 - self.shift as i64
    }

    pub fn mul(&self, r: &RingData, o: &QMat) -> QMat {
        let (p1, p2) = (self.eff_prec(r), o.eff_prec(r));
        let v1 = self.m.min_val(r).unwrap_or(p1);
        let v2 = o.m.min_val(r).unwrap_or(p2);
        let prec = (p1 + v2).min(p2 + v1).min(r.prec());
        QMat { shift: self.shift + o.shift, m: self.m.mul(r, &o.m), prec }.normalized(r)
    }

    pub fn conj(&self, r: &RingData) -> QMat {
        QMat { shift: self.shift, m: self.m.conj(r), prec: self.prec }
    }

    pub fn transpose(&self) -> QMat {
        QMat { shift: self.shift, m: self.m.transpose(), prec: self.prec }
    }

    pub fn dagger(&self, r: &RingData) -> QMat {
        QMat { shift: self.shift, m: self.m.dagger(r), prec: self.prec }
    }

    pub fn neg(&self, r: &RingData) -> QMat {
        QMat { shift: self.shift, m: self.m.neg(r), prec: self.prec }
    }

    fn aligned(&self, r: &RingData, s: u32) -> (Mat, u32) {
        let k = s - self.shift;
        (self.m.mul_pi_pow(r, k), (self.eff_prec(r) + k).min(r.prec()))
    }

    pub fn add(&self, r: &RingData, o: &QMat) -> QMat {
        let s = self.shift.max(o.shift);
        let (a, pa) = self.aligned(r, s);
        let (b, pb) = o.aligned(r, s);
        QMat { shift: s, m: a.add(r, &b), prec: pa.min(pb) }.normalized(r)
    }

    pub fn sub(&self, r: &RingData, o: &QMat) -> QMat {
        self.add(r, &o.neg(r))
    }

    /// Cancels common powers of `pi`.
    pub fn normalized(mut self, r: &RingData) -> QMat {
        if self.shift == 0 {
            return self;
        }
        let p = self.eff_prec(r);
        let v = self.m.min_val(r).unwrap_or(u32::MAX).min(self.shift).min(p);
        if v > 0 {
            self.m = self.m.div_pi_pow(r, v);
            self.shift -= v;
            self.prec = p - v;
        }
        self
    }

    /// Valuation of the smallest entry (may be negative).
    pub fn min_val(&self, r: &RingData) -> Option<i64> {
        let p = self.eff_prec(r);
        self.m.min_val(r).filter(|&v| v < p).map(|v| v as i64 - self.shift as i64)
    }

    pub fn is_integral(&self, r: &RingData) -> bool {
        self.shift == 0 || self.m.reduce(r, self.shift.min(self.eff_prec(r))).is_zero()
    }

    /// The integral matrix, if every entry is integral.
    pub fn to_integral(&self, r: &RingData) -> Option<Mat> {
        if !self.is_integral(r) {
            return None;
        }
        Some(self.m.div_pi_pow(r, self.shift))
    }

    /// Like [`to_integral`](Self::to_integral), keeping the precision.
    pub fn integral_part(&self, r: &RingData) -> Option<QMat> {
        let m = self.to_integral(r)?;
        let prec = self.eff_prec(r).saturating_sub(self.shift);
        Some(QMat { shift: 0, m, prec })
    }

    /// Equality modulo the common known precision.
    pub fn eq_at_precision(&self, r: &RingData, o: &QMat) -> bool {
        let s = self.shift.max(o.shift);
        let (a, pa) = self.aligned(r, s);
        let (b, pb) = o.aligned(r, s);
        let p = pa.min(pb);
        a.reduce(r, p) == b.reduce(r, p)
    }

    /// `pi^-k * self`.
    pub fn shifted(mut self, k: u32) -> QMat {
        self.shift += k;
        self
    }

    pub fn with_prec(mut self, prec: u32) -> QMat {
        self.prec = self.prec.min(prec);
        self
    }
}

/// Column Hermite form of an integral lattice: `h` is upper triangular with
/// diagonal `pi^k[i]`, entries of row `i` right of the diagonal are reduced
/// modulo `pi^k[i]`. A pivot exponent equal to the precision means the
/// corresponding column is zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hnf {
    pub h: Mat,
    pub k: Vec<u32>,
}

impl Hnf {
    pub fn n(&self) -> usize {
        self.h.rows
    }

    /// Total `O`-length of `O^n / span`.
    pub fn colength(&self) -> u32 {
        self.k.iter().sum()
    }

    /// Whether `v` lies in the column span.
    pub fn contains(&self, r: &RingData, v: &[Elem]) -> bool {
        let n = self.n();
        let mut w = v.to_vec();
        for row in (0..n).rev() {
            let x = w[row];
            if x.is_zero() {
                continue;
            }
            let k = self.k[row];
            match r.val(&x) {
                Some(vx) if vx >= k => {
                    let c = r.div_pi_pow(&x, k);
                    for i in 0..=row {
                        w[i] = r.sub(&w[i], &r.mul(&c, &self.h.get(i, row)));
                    }
                }
                _ => return false,
            }
        }
        true
    }

    pub fn contains_all(&self, r: &RingData, m: &Mat) -> bool {
        (0..m.cols).all(|j| self.contains(r, &m.col(j)))
    }
}

/// Column Hermite form of the span of the columns of `gens`.
pub fn hnf(r: &RingData, gens: &Mat) -> Hnf {
    let n = gens.rows;
    let prec = r.prec();
    let mut cols: Vec<Vec<Elem>> = gens.cols_vec();
    let mut out: Vec<Vec<Elem>> = vec![vec![Elem::ZERO; n]; n];
    let mut k = vec![prec; n];
    for row in (0..n).rev() {
        let mut best: Option<(u32, usize)> = None;
        for (ci, c) in cols.iter().enumerate() {
            if let Some(v) = r.val(&c[row]) {
                if best.is_none_or(|(bv, _)| v < bv) {
                    best = Some((v, ci));
                }
            }
        }
        let Some((v, ci)) = best else {
            continue;
        };
        let mut piv = cols.swap_remove(ci);
        let u = r.div_pi_pow(&piv[row], v);
        let ui = r.inv_unit(&u).expect("pivot unit part is a unit");
        for x in piv.iter_mut().take(row + 1) {
            *x = r.mul(x, &ui);
        }
        piv[row] = r.pi_pow(v);
        for c in cols.iter_mut() {
            let x = c[row];
            if x.is_zero() {
                continue;
            }
            let q = r.div_pi_pow(&x, v);
            for i in 0..row {
                c[i] = r.sub(&c[i], &r.mul(&q, &piv[i]));
            }
            c[row] = Elem::ZERO;
        }
        out[row] = piv;
        k[row] = v;
    }
    // reduce above-diagonal entries
    for j in 0..n {
        for i in (0..j).rev() {
            if k[i] >= prec {
                continue;
            }
            let x = out[j][i];
            let rem = r.reduce(&x, k[i]);
            if rem == x {
                continue;
            }
            let q = r.div_pi_pow(&r.sub(&x, &rem), k[i]);
            let (lo, hi) = out.split_at_mut(j);
            let ci = &lo[i];
            let cj = &mut hi[0];
            for t in 0..i {
                cj[t] = r.sub(&cj[t], &r.mul(&q, &ci[t]));
            }
            cj[i] = rem;
        }
    }
    Hnf { h: Mat::from_cols(n, &out), k }
}

/// Smith form `L M R = D` with `D` diagonal with entries `pi^d[i]`
/// (`None` for zero pivots) and the inverses of the transforms.
#[derive(Clone, Debug)]
pub struct Snf {
    pub l: Mat,
    pub linv: Mat,
    pub r: Mat,
    pub rinv: Mat,
    pub d: Vec<Option<u32>>,
}

pub fn snf(ring: &RingData, m: &Mat) -> Snf {
    let (nr, nc) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut l = Mat::identity(ring, nr);
    let mut linv = Mat::identity(ring, nr);
    let mut rt = Mat::identity(ring, nc);
    let mut rinv = Mat::identity(ring, nc);
    let mut d = Vec::new();
    for t in 0..nr.min(nc) {
        let mut best: Option<(u32, usize, usize)> = None;
        for i in t..nr {
            for j in t..nc {
                if let Some(v) = ring.val(&a.get(i, j)) {
                    if best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let Some((v, pi, pj)) = best else {
            d.push(None);
            continue;
        };
        if pi != t {
            swap_rows(&mut a, t, pi);
            swap_rows(&mut l, t, pi);
            swap_cols(&mut linv, t, pi);
        }
        if pj != t {
            swap_cols(&mut a, t, pj);
            swap_cols(&mut rt, t, pj);
            swap_rows(&mut rinv, t, pj);
        }
        let u = ring.div_pi_pow(&a.get(t, t), v);
        let ui = ring.inv_unit(&u).expect("unit part");
        scale_row(ring, &mut a, t, &ui);
        scale_row(ring, &mut l, t, &ui);
        scale_col(ring, &mut linv, t, &u);
        a.set(t, t, ring.pi_pow(v));
        for i in t + 1..nr {
            let x = a.get(i, t);
            if x.is_zero() {
                continue;
            }
            let c = ring.div_pi_pow(&x, v);
            row_axpy(ring, &mut a, i, t, &c);
            a.set(i, t, Elem::ZERO);
            row_axpy(ring, &mut l, i, t, &c);
            col_axpy(ring, &mut linv, t, i, &ring.neg(&c));
        }
        for j in t + 1..nc {
            let x = a.get(t, j);
            if x.is_zero() {
                continue;
            }
            let c = ring.div_pi_pow(&x, v);
            col_axpy(ring, &mut a, j, t, &c);
            a.set(t, j, Elem::ZERO);
            col_axpy(ring, &mut rt, j, t, &c);
            row_axpy(ring, &mut rinv, t, j, &ring.neg(&c));
        }
        d.push(Some(v));
    }
    Snf { l, linv, r: rt, rinv, d }
}

fn swap_rows(m: &mut Mat, i: usize, j: usize) {
    for c in 0..m.cols {
        m.a.swap(i * m.cols + c, j * m.cols + c);
    }
}

fn swap_cols(m: &mut Mat, i: usize, j: usize) {
    for r in 0..m.rows {
        m.a.swap(r * m.cols + i, r * m.cols + j);
    }
}

fn scale_row(ring: &RingData, m: &mut Mat, i: usize, c: &Elem) {
    for j in 0..m.cols {
        let x = m.get(i, j);
        m.set(i, j, ring.mul(&x, c));
    }
}

fn scale_col(ring: &RingData, m: &mut Mat, j: usize, c: &Elem) {
    for i in 0..m.rows {
        let x = m.get(i, j);
        m.set(i, j, ring.mul(&x, c));
    }
}

/// `row_i -= c * row_t`
fn row_axpy(ring: &RingData, m: &mut Mat, i: usize, t: usize, c: &Elem) {
    for j in 0..m.cols {
        let y = m.get(t, j);
        if !y.is_zero() {
            let x = m.get(i, j);
            m.set(i, j, ring.sub(&x, &ring.mul(c, &y)));
        }
    }
}

/// `col_j -= c * col_t`
fn col_axpy(ring: &RingData, m: &mut Mat, j: usize, t: usize, c: &Elem) {
    for i in 0..m.rows {
        let y = m.get(i, t);
        if !y.is_zero() {
            let x = m.get(i, j);
            m.set(i, j, ring.sub(&x, &ring.mul(c, &y)));
        }
    }
}

/// Valuation of the determinant, `None` if singular at working precision.
pub fn det_val(ring: &RingData, m: &Mat) -> Option<u32> {
    let s = snf(ring, m);
    s.d.iter().try_fold(0u32, |acc, x| x.map(|v| acc + v))
}

/// Inverse of a square integral matrix known to full precision.
pub fn inverse(ring: &RingData, m: &Mat) -> Result<QMat> {
    inverse_with_prec(ring, m, ring.prec())
}

/// Inverse of a square integral matrix known modulo `pi^prec`.
pub fn inverse_with_prec(ring: &RingData, m: &Mat, prec: u32) -> Result<QMat> {
    if !m.is_square() {
        return Err(Error::Shape(alloc::format!("{}x{} matrix has no inverse", m.rows, m.cols)));
    }
    let prec = prec.min(ring.prec());
    let s = snf(ring, m);
    let mut ds = Vec::with_capacity(m.rows);
    for x in &s.d {
        match x {
            Some(v) if *v < prec => ds.push(*v),
            _ => return Err(Error::Singular),
        }
    }
    let shift = ds.iter().copied().max().unwrap_or(0);
    if 2 * shift >= prec {
        return Err(Error::PrecisionExhausted("matrix inverse".into()));
    }
    let dinv: Vec<Elem> = ds.iter().map(|&v| ring.pi_pow(shift - v)).collect();
    let core = s.r.mul(ring, &Mat::diag(&dinv)).mul(ring, &s.l);
    Ok(QMat { shift, m: core, prec: prec - shift }.normalized(ring))
}

/// Inverse of a matrix with a denominator.
pub fn inverse_q(ring: &RingData, m: &QMat) -> Result<QMat> {
    let inv = inverse_with_prec(ring, &m.m, m.eff_prec(ring))?;
    // (pi^-s M)^-1 = pi^s M^-1
    let s = m.shift;
    if inv.shift >= s {
        Ok(QMat { shift: inv.shift - s, m: inv.m, prec: inv.prec }.normalized(ring))
    } else {
        let k = s - inv.shift;
        Ok(QMat { shift: 0, m: inv.m.mul_pi_pow(ring, k), prec: (inv.prec + k).min(ring.prec()) })
    }
}

/// Solves `A c = b` for square invertible `A`, returning `c` with a denominator.
pub fn solve(ring: &RingData, a: &Mat, b: &[Elem]) -> Result<(u32, Vec<Elem>)> {
    let inv = inverse(ring, a)?;
    Ok((inv.shift, inv.m.mul_vec(ring, b)))
}
