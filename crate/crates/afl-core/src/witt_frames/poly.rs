//! Sparse polynomials in `x_0..x_3, y_0..y_3` over a truncated base ring,
//! and the Witt structure polynomials obtained from the ghost identities.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::local_rings::{make_ring, max_precision, Elem, FieldSpec, Ring};

/// Largest supported truncation length.
pub const MAX_LEN: usize = 4;

/// Exponents of `x_0..x_3` followed by `y_0..y_3`.
pub type Monomial = [u16; 2 * MAX_LEN];

/// Index of `y_i` among the variables.
pub const fn y_var(i: usize) -> usize {
    MAX_LEN + i
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly {
    pub terms: BTreeMap<Monomial, Elem>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn monomial(r: &Ring, m: Monomial, c: Elem) -> Poly {
        let mut p = Poly::zero();
        p.accumulate(r, m, &c);
        p
    }

    pub fn constant(r: &Ring, c: Elem) -> Poly {
        Poly::monomial(r, [0; 2 * MAX_LEN], c)
    }

    /// `v^k` with coefficient one.
    pub fn var_pow(r: &Ring, v: usize, k: u16) -> Poly {
        let mut m = [0; 2 * MAX_LEN];
        m[v] = k;
        Poly::monomial(r, m, r.one())
    }

    fn accumulate(&mut self, r: &Ring, m: Monomial, c: &Elem) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert(Elem::ZERO);
        *slot = r.add(slot, c);
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn coeff(&self, m: &Monomial) -> Elem {
        self.terms.get(m).copied().unwrap_or(Elem::ZERO)
    }

    pub fn add(&self, r: &Ring, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.accumulate(r, *m, c);
        }
        out
    }

    pub fn sub(&self, r: &Ring, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.accumulate(r, *m, &r.neg(c));
        }
        out
    }

    pub fn mul(&self, r: &Ring, o: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let mut m = *ma;
                for (a, b) in m.iter_mut().zip(mb) {
                    *a += *b;
                }
                out.accumulate(r, m, &r.mul(ca, cb));
            }
        }
        out
    }

    pub fn pow(&self, r: &Ring, mut k: u64) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::constant(r, r.one());
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(r, &base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(r, &base);
            }
        }
        acc
    }

    pub fn mul_pi_pow(&self, r: &Ring, k: u32) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.accumulate(r, *m, &r.mul_pi_pow(c, k));
        }
        out
    }

    /// Coefficientwise division by `pi^k`; every coefficient must be divisible.
    pub fn div_pi_pow(&self, r: &Ring, k: u32) -> Result<Poly> {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.accumulate(r, *m, &r.try_div_pi_pow(c, k)?);
        }
        Ok(out)
    }

    /// Largest exponent of variable `v`.
    pub fn degree_in(&self, v: usize) -> u16 {
        self.terms.keys().map(|m| m[v]).max().unwrap_or(0)
    }
}

/// Ghost component `w_n = sum_{i<=n} pi^i v_{off+i}^(q^(n-i))`.
pub fn ghost_poly(r: &Ring, q: u64, n: usize, off: usize) -> Poly {
    let mut out = Poly::zero();
    for i in 0..=n {
        let m = Poly::var_pow(r, off + i, q.pow((n - i) as u32) as u16);
        out = out.add(r, &m.mul_pi_pow(r, i as u32));
    }
    out
}

/// Solves `w_n(s) = target(n)` for `n < count` by exact division.
fn ghost_solve(r: &Ring, q: u64, count: usize, target: impl Fn(usize) -> Poly) -> Result<Vec<Poly>> {
    let mut sols: Vec<Poly> = Vec::with_capacity(count);
    let mut pows: Vec<Poly> = Vec::with_capacity(count);
    for n in 0..count {
        for pw in pows.iter_mut() {
            *pw = pw.pow(r, q);
        }
        let mut acc = target(n);
        for (i, pw) in pows.iter().enumerate() {
            acc = acc.sub(r, &pw.mul_pi_pow(r, i as u32));
        }
        let s = acc.div_pi_pow(r, n as u32)?;
        pows.push(s.clone());
        sols.push(s);
    }
    Ok(sols)
}

/// Addition, multiplication and Frobenius polynomials of `W_O` up to length `len`.
#[derive(Debug)]
pub struct StructurePolys {
    base: Ring,
    len: usize,
    digits: u32,
    /// `s_n(x, y)`, `n < len`.
    pub sum: Vec<Poly>,
    /// `p_n(x, y)`, `n < len`.
    pub prod: Vec<Poly>,
    /// `f_n(x)` with `w_n(F x) = w_(n+1)(x)`, `n < len - 1`.
    pub frob: Vec<Poly>,
}

impl StructurePolys {
    /// Polynomials for `O` given by `base` (totally ramified over `Z_p`),
    /// correct modulo `p^digits`.
    pub fn new(base: &FieldSpec, len: usize, digits: u32) -> Result<StructurePolys> {
        if base.f0 != 1 || base.quadratic {
            return Err(Error::InvalidSpec("Witt base must be totally ramified over Z_p".into()));
        }
        if len == 0 || len > MAX_LEN {
            return Err(Error::InvalidSpec(alloc::format!("Witt length must lie in 1..={MAX_LEN}")));
        }
        let e = base.e() as u32;
        let need = (digits + len as u32 + 1) * e;
        if need > max_precision(base) {
            return Err(Error::InvalidSpec(alloc::format!("{digits} digits exceed the supported precision")));
        }
        let r = make_ring(base, need.max(2))?;
        let q = base.p;
        let gx = |n| ghost_poly(&r, q, n, 0);
        let gy = |n| ghost_poly(&r, q, n, y_var(0));
        let sum = ghost_solve(&r, q, len, |n| gx(n).add(&r, &gy(n)))?;
        let prod = ghost_solve(&r, q, len, |n| gx(n).mul(&r, &gy(n)))?;
        let frob = ghost_solve(&r, q, len - 1, |n| gx(n + 1))?;
        Ok(StructurePolys { base: r, len, digits, sum, prod, frob })
    }

    /// The base ring `O` at the precision of the solve.
    pub fn base(&self) -> &Ring {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn q(&self) -> u64 {
        self.base.p()
    }

    /// Coordinates of the image of `c` under `O -> W_O(O)`: ghost vector `(c, c, ...)`.
    pub fn structure_coords(&self, c: &Elem, len: usize) -> Result<Vec<Elem>> {
        let r = &self.base;
        let q = self.q();
        let mut u: Vec<Elem> = vec![];
        for n in 0..len {
            let mut acc = *c;
            for (i, ui) in u.iter().enumerate() {
                let t = r.mul_pi_pow(&r.pow(ui, q.pow((n - i) as u32)), i as u32);
                acc = r.sub(&acc, &t);
            }
            u.push(r.try_div_pi_pow(&acc, n as u32)?);
        }
        Ok(u)
    }
}
