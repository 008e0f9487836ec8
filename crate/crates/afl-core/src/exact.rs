//! Precision-independent matrix data.
//!
//! Entries are `pi^(-denom) * (a + sigma(b))` with `a`, `b` given by integer
//! coordinates, so the same data can be realized in rings of different
//! precision. This is what makes the re-run at a higher precision meaningful.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::local_rings::{Elem, RingData};
use crate::matrix::{Mat, QMat, FULL};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactEntry {
    pub denom: u32,
    /// Little-endian coordinates in the basis `y^i t^j` (index `i + f j`).
    pub coords: Vec<i64>,
    /// Coordinates of `b`; empty for `sigma`-free entries.
    pub conj: Vec<i64>,
}

impl ExactEntry {
    pub fn int(v: i64) -> ExactEntry {
        ExactEntry { denom: 0, coords: alloc::vec![v], conj: Vec::new() }
    }

    pub fn zero() -> ExactEntry {
        ExactEntry::int(0)
    }

    pub fn from_elem(r: &RingData, denom: u32, x: &Elem) -> ExactEntry {
        let mut coords: Vec<i64> = r.coords(x).into_iter().map(|c| c as i64).collect();
        while coords.len() > 1 && *coords.last().unwrap() == 0 {
            coords.pop();
        }
        ExactEntry { denom, coords, conj: Vec::new() }
    }

    pub fn from_coords(coords: &[i64]) -> ExactEntry {
        ExactEntry { denom: 0, coords: coords.to_vec(), conj: Vec::new() }
    }

    /// `a + sigma(b)`.
    pub fn with_conj(coords: &[i64], conj: &[i64]) -> ExactEntry {
        ExactEntry { denom: 0, coords: coords.to_vec(), conj: conj.to_vec() }
    }

    /// `sigma` of this entry.
    pub fn sigma(&self) -> ExactEntry {
        ExactEntry { denom: self.denom, coords: self.conj.clone(), conj: self.coords.clone() }
    }

    pub fn neg(&self) -> ExactEntry {
        let n = |v: &Vec<i64>| v.iter().map(|x| -x).collect();
        ExactEntry { denom: self.denom, coords: n(&self.coords), conj: n(&self.conj) }
    }

    /// Multiplication by a rational integer.
    pub fn scale(&self, k: i64) -> ExactEntry {
        let n = |v: &Vec<i64>| v.iter().map(|x| x * k).collect();
        ExactEntry { denom: self.denom, coords: n(&self.coords), conj: n(&self.conj) }
    }

    /// The numerator `a + sigma(b)`.
    pub fn realize(&self, r: &RingData) -> Result<Elem> {
        let a = r.from_coords(if self.coords.is_empty() { &[0] } else { &self.coords })?;
        if self.conj.iter().all(|&c| c == 0) {
            return Ok(a);
        }
        if !r.is_quadratic() {
            return Err(Error::NotQuadratic);
        }
        Ok(r.add(&a, &r.conj(&r.from_coords(&self.conj)?)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactMat {
    pub rows: usize,
    pub cols: usize,
    /// Row-major.
    pub entries: Vec<ExactEntry>,
}

impl ExactMat {
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> ExactEntry) -> ExactMat {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        ExactMat { rows, cols, entries }
    }

    pub fn from_ints(rows: usize, cols: usize, v: &[i64]) -> ExactMat {
        ExactMat::from_fn(rows, cols, |i, j| ExactEntry::int(v[i * cols + j]))
    }

    pub fn identity(n: usize) -> ExactMat {
        ExactMat::from_fn(n, n, |i, j| ExactEntry::int((i == j) as i64))
    }

    pub fn get(&self, i: usize, j: usize) -> &ExactEntry {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, e: ExactEntry) {
        self.entries[i * self.cols + j] = e;
    }

    pub fn zeros(rows: usize, cols: usize) -> ExactMat {
        ExactMat::from_fn(rows, cols, |_, _| ExactEntry::zero())
    }

    pub fn block_diag(&self, o: &ExactMat) -> ExactMat {
        let (r1, c1) = (self.rows, self.cols);
        ExactMat::from_fn(r1 + o.rows, c1 + o.cols, |i, j| match (i < r1, j < c1) {
            (true, true) => self.get(i, j).clone(),
            (false, false) => o.get(i - r1, j - c1).clone(),
            _ => ExactEntry::zero(),
        })
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> ExactMat {
        ExactMat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).sigma())
    }

    /// Captures an integral matrix at its current precision.
    pub fn from_mat(r: &RingData, m: &Mat) -> ExactMat {
        ExactMat::from_fn(m.rows, m.cols, |i, j| ExactEntry::from_elem(r, 0, &m.get(i, j)))
    }

    pub fn from_qmat(r: &RingData, m: &QMat) -> ExactMat {
        ExactMat::from_fn(m.m.rows, m.m.cols, |i, j| ExactEntry::from_elem(r, m.shift, &m.m.get(i, j)))
    }

    pub fn realize(&self, r: &RingData) -> Result<QMat> {
        if self.entries.len() != self.rows * self.cols {
            return Err(Error::Shape("entry count does not match the shape".into()));
        }
        let s = self.entries.iter().map(|e| e.denom).max().unwrap_or(0);
        if s >= r.prec() {
            return Err(Error::PrecisionExhausted("denominator exceeds precision".into()));
        }
        let mut m = Mat::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let e = &self.entries[i * self.cols + j];
                let x = e.realize(r)?;
                m.set(i, j, r.mul_pi_pow(&x, s - e.denom));
            }
        }
        Ok(QMat::new(s, m, FULL).normalized(r))
    }
}
