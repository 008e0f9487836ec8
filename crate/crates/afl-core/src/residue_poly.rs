//! Polynomials over the residue field `F_Q` of a ring, with factorization by
//! distinct-degree and Cantor-Zassenhaus splitting.
//!
//! Coefficients are ring elements reduced modulo `pi`, little-endian, and a
//! polynomial is never empty (zero is `[0]`).

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::local_rings::{Elem, RingData};

pub type Poly = Vec<Elem>;

fn red(r: &RingData, a: &Elem) -> Elem {
    r.reduce(a, 1)
}

pub fn trim(mut a: Poly) -> Poly {
    while a.len() > 1 && a.last().unwrap().is_zero() {
        a.pop();
    }
    if a.is_empty() {
        a.push(Elem::ZERO);
    }
    a
}

pub fn reduce(r: &RingData, a: &[Elem]) -> Poly {
    trim(a.iter().map(|x| red(r, x)).collect())
}

pub fn is_zero(a: &Poly) -> bool {
    a.len() == 1 && a[0].is_zero()
}

pub fn deg(a: &Poly) -> usize {
    a.len() - 1
}

pub fn add(r: &RingData, a: &Poly, b: &Poly) -> Poly {
    let n = a.len().max(b.len());
    let z = Elem::ZERO;
    trim((0..n).map(|i| red(r, &r.add(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))).collect())
}

pub fn sub(r: &RingData, a: &Poly, b: &Poly) -> Poly {
    let nb: Poly = b.iter().map(|x| red(r, &r.neg(x))).collect();
    add(r, a, &nb)
}

pub fn mul(r: &RingData, a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![Elem::ZERO; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = red(r, &r.add(&out[i + j], &r.mul(x, y)));
        }
    }
    trim(out)
}

fn inv(r: &RingData, a: &Elem) -> Result<Elem> {
    Ok(red(r, &r.inv_unit(a)?))
}

/// Quotient and remainder; `b` must be nonzero.
pub fn divrem(r: &RingData, a: &Poly, b: &Poly) -> Result<(Poly, Poly)> {
    if is_zero(b) {
        return Err(Error::Precondition("division by the zero polynomial".into()));
    }
    let db = deg(b);
    let li = inv(r, b.last().unwrap())?;
    let mut rem = a.clone();
    if rem.len() <= db {
        return Ok((vec![Elem::ZERO], trim(rem)));
    }
    let mut q = vec![Elem::ZERO; rem.len() - db];
    for k in (0..q.len()).rev() {
        let c = red(r, &r.mul(&rem[k + db], &li));
        if c.is_zero() {
            continue;
        }
        q[k] = c;
        for (i, bi) in b.iter().enumerate() {
            rem[k + i] = red(r, &r.sub(&rem[k + i], &r.mul(&c, bi)));
        }
    }
    rem.truncate(db.max(1));
    Ok((trim(q), trim(rem)))
}

pub fn rem(r: &RingData, a: &Poly, b: &Poly) -> Result<Poly> {
    Ok(divrem(r, a, b)?.1)
}

pub fn monic(r: &RingData, a: &Poly) -> Result<Poly> {
    if is_zero(a) {
        return Ok(a.clone());
    }
    let li = inv(r, a.last().unwrap())?;
    Ok(a.iter().map(|x| red(r, &r.mul(x, &li))).collect())
}

pub fn gcd(r: &RingData, a: &Poly, b: &Poly) -> Result<Poly> {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !is_zero(&b) {
        let t = rem(r, &a, &b)?;
        a = b;
        b = t;
    }
    monic(r, &a)
}

/// `(g, s, t)` with `s a + t b = g` monic.
pub fn xgcd(r: &RingData, a: &Poly, b: &Poly) -> Result<(Poly, Poly, Poly)> {
    let one = vec![r.one()];
    let zero = vec![Elem::ZERO];
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (one.clone(), zero.clone());
    let (mut t0, mut t1) = (zero, one);
    while !is_zero(&r1) {
        let (q, rr) = divrem(r, &r0, &r1)?;
        let s2 = sub(r, &s0, &mul(r, &q, &s1));
        let t2 = sub(r, &t0, &mul(r, &q, &t1));
        r0 = r1;
        r1 = rr;
        s0 = s1;
        s1 = s2;
        t0 = t1;
        t1 = t2;
    }
    let li = inv(r, r0.last().unwrap())?;
    let sc = |p: &Poly| trim(p.iter().map(|x| red(r, &r.mul(x, &li))).collect());
    Ok((sc(&r0), sc(&s0), sc(&t0)))
}

pub fn powmod(r: &RingData, base: &Poly, mut e: u128, m: &Poly) -> Result<Poly> {
    let mut acc = vec![r.one()];
    let mut b = rem(r, base, m)?;
    while e > 0 {
        if e & 1 == 1 {
            acc = rem(r, &mul(r, &acc, &b), m)?;
        }
        b = rem(r, &mul(r, &b, &b), m)?;
        e >>= 1;
    }
    rem(r, &acc, m)
}

/// Monic irreducible factors with multiplicities, in a deterministic order.
pub fn factor(r: &RingData, f: &Poly) -> Result<Vec<(Poly, u32)>> {
    if r.p() == 2 {
        return Err(Error::Precondition("factorization needs odd characteristic".into()));
    }
    let f = monic(r, f)?;
    let n = deg(&f);
    if n == 0 {
        return Ok(Vec::new());
    }
    let q = r.residue_size() as u128;
    let x = vec![Elem::ZERO, r.one()];
    // D[d]: product of the distinct irreducible factors of degree exactly d
    let mut dd: Vec<Poly> = vec![vec![r.one()]; n + 1];
    let mut h = x.clone();
    for d in 1..=n {
        h = powmod(r, &h, q, &f)?;
        let mut g = gcd(r, &f, &sub(r, &h, &x))?;
        for dp in 1..d {
            if d % dp == 0 && deg(&dd[dp]) > 0 {
                g = divrem(r, &g, &dd[dp])?.0;
            }
        }
        dd[d] = monic(r, &g)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut irreducible = Vec::new();
    for (d, g) in dd.iter().enumerate().skip(1) {
        if deg(g) > 0 {
            equal_degree(r, g, d, q, &mut rng, &mut irreducible)?;
        }
    }
    irreducible.sort_by(|a: &Poly, b: &Poly| {
        deg(a).cmp(&deg(b)).then_with(|| r_key(r, a).cmp(&r_key(r, b)))
    });
    let mut out = Vec::with_capacity(irreducible.len());
    for phi in irreducible {
        let mut m = 0;
        let mut rest = f.clone();
        loop {
            let (qq, rr) = divrem(r, &rest, &phi)?;
            if !is_zero(&rr) {
                break;
            }
            rest = qq;
            m += 1;
        }
        out.push((phi, m));
    }
    Ok(out)
}

fn r_key(r: &RingData, a: &Poly) -> Vec<u64> {
    a.iter().map(|c| r.residue_index(c)).collect()
}

fn equal_degree(
    r: &RingData,
    g: &Poly,
    d: usize,
    q: u128,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<Poly>,
) -> Result<()> {
    let n = deg(g);
    if n == d {
        out.push(g.clone());
        return Ok(());
    }
    let e = (q.pow(d as u32) - 1) / 2;
    let one = vec![r.one()];
    loop {
        let a: Poly = trim((0..n).map(|_| r.residue_lift(rng.random_range(0..q as u64))).collect());
        if deg(&a) == 0 {
            continue;
        }
        let b = powmod(r, &a, e, g)?;
        let c = gcd(r, g, &sub(r, &b, &one))?;
        let k = deg(&c);
        if k > 0 && k < n {
            let other = divrem(r, g, &c)?.0;
            equal_degree(r, &c, d, q, rng, out)?;
            equal_degree(r, &monic(r, &other)?, d, q, rng, out)?;
            return Ok(());
        }
    }
}
