//! Truncated arithmetic in p-adic rings of integers.
//!
//! A ring is presented as `GR(p^m, f)[t]/(eis)`: a Galois ring of degree `f`
//! with an optional Eisenstein polynomial over `Z_p` on top. When the field specification is
//! quadratic the Galois ring has degree `2 f0`, and conjugation is the
//! `f0`-th power of Frobenius acting on the Galois-ring coordinates while
//! fixing `t`. Elements are stored as coordinate vectors in the basis
//! `y^i t^j` with entries in `Z/p^m`; the working precision is `pi^(e m)`.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Maximum number of `Z/p^m` coordinates of an element.
pub const MAXD: usize = 12;

/// Largest admissible modulus `p^m`; keeps every product below `2^120`.
const MODULUS_LIMIT: u64 = 1 << 60;

/// Description of `O_E0` or of `O_E` for the unramified quadratic `E/E0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    pub p: u64,
    pub f0: u32,
    /// Little-endian integer coefficients of a monic Eisenstein polynomial.
    pub eis: Option<Vec<i64>>,
    pub quadratic: bool,
}

impl FieldSpec {
    pub fn unramified(p: u64, f0: u32, quadratic: bool) -> Self {
        FieldSpec { p, f0, eis: None, quadratic }
    }

    pub fn ramified(p: u64, f0: u32, eis: Vec<i64>, quadratic: bool) -> Self {
        FieldSpec { p, f0, eis: Some(eis), quadratic }
    }

    /// Ramification index.
    pub fn e(&self) -> usize {
        match &self.eis {
            Some(c) if c.len() > 1 => c.len() - 1,
            _ => 1,
        }
    }

    /// Degree of the Galois-ring part of the modelled ring.
    pub fn f(&self) -> usize {
        if self.quadratic {
            2 * self.f0 as usize
        } else {
            self.f0 as usize
        }
    }

    /// Residue cardinality of `E0`.
    pub fn q(&self) -> u64 {
        self.p.pow(self.f0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 2 {
            return Err(Error::InvalidSpec("p = 2 is not supported".into()));
        }
        if !is_prime(self.p) {
            return Err(Error::InvalidSpec(alloc::format!("{} is not prime", self.p)));
        }
        if self.f0 == 0 {
            return Err(Error::InvalidSpec("f0 must be at least 1".into()));
        }
        if self.f() * self.e() > MAXD {
            return Err(Error::InvalidSpec(alloc::format!(
                "degree {} exceeds the supported maximum {}",
                self.f() * self.e(),
                MAXD
            )));
        }
        if let Some(c) = &self.eis {
            if c.len() < 2 {
                return Err(Error::InvalidSpec("Eisenstein polynomial needs degree >= 1".into()));
            }
            if *c.last().unwrap() != 1 {
                return Err(Error::InvalidSpec("Eisenstein polynomial must be monic".into()));
            }
            let p = self.p as i64;
            for (i, &a) in c[..c.len() - 1].iter().enumerate() {
                if a.rem_euclid(p) != 0 {
                    return Err(Error::InvalidSpec(alloc::format!(
                        "coefficient {} is not divisible by p",
                        i
                    )));
                }
            }
            if c[0].rem_euclid(p * p) == 0 {
                return Err(Error::InvalidSpec("constant term must have valuation 1".into()));
            }
        }
        Ok(())
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Coordinates of an element; meaningless without its ring.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem {
    pub c: [u64; MAXD],
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.c.iter().rposition(|&x| x != 0).map_or(1, |i| i + 1);
        write!(f, "{:?}", &self.c[..last])
    }
}

impl Elem {
    pub const ZERO: Elem = Elem { c: [0; MAXD] };

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }
}

/// Valuation of a possibly zero element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Valuation {
    Finite(i64),
    /// Zero at working precision; the true valuation is at least this.
    AtLeast(i64),
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::AtLeast(_) => None,
        }
    }
}

/// Shared, immutable ring data.
pub struct RingData {
    spec: FieldSpec,
    p: u64,
    f: usize,
    e: usize,
    m: u32,
    modulus: u64,
    ppow: Vec<u64>,
    h: Vec<u64>,
    eis: Vec<u64>,
    frob: Vec<Vec<u64>>,
    sigma: Vec<Vec<u64>>,
    winv: Elem,
}

pub type Ring = Arc<RingData>;

impl fmt::Debug for RingData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring({:?}, prec {})", self.spec, self.prec())
    }
}

impl PartialEq for RingData {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec && self.m == other.m
    }
}

/// Builds the truncated ring for `spec` at `pi`-adic precision at least `n`.
pub fn make_ring(spec: &FieldSpec, n: u32) -> Result<Ring> {
    spec.validate()?;
    if n < 2 {
        return Err(Error::PrecisionTooSmall(n));
    }
    let e = spec.e();
    let m = (n as usize).div_ceil(e) as u32;
    let p = spec.p;
    let mut ppow = vec![1u64];
    for _ in 0..m {
        let next = ppow.last().unwrap().checked_mul(p).filter(|&x| x < MODULUS_LIMIT);
        match next {
            Some(x) => ppow.push(x),
            None => {
                return Err(Error::InvalidSpec(alloc::format!(
                    "precision {} too large for p = {}",
                    n,
                    p
                )))
            }
        }
    }
    let modulus = ppow[m as usize];
    let f = spec.f();
    let h = if f == 1 { vec![0, 1] } else { fp_poly::first_irreducible(p, f) };
    let eis = match &spec.eis {
        Some(c) => c.iter().map(|&a| a.rem_euclid(modulus as i64) as u64).collect(),
        None => vec![0, 1],
    };
    let mut data = RingData {
        spec: spec.clone(),
        p,
        f,
        e,
        m,
        modulus,
        ppow,
        h,
        eis,
        frob: identity_rows(f),
        sigma: identity_rows(f),
        winv: Elem::ZERO,
    };
    if e > 1 {
        // t^e = p w with w = -(a_0/p + a_1/p t + ...), a unit.
        let mut w = Elem::ZERO;
        for j in 0..e {
            let a = spec.eis.as_ref().unwrap()[j];
            let c = (-(a / p as i64)).rem_euclid(modulus as i64) as u64;
            w.c[f * j] = c;
        }
        data.winv = data.inv_unit(&w)?;
    }
    if f > 1 {
        let z = data.frobenius_root();
        let mut rows = Vec::with_capacity(f);
        let mut zi = data.one();
        for _ in 0..f {
            rows.push(zi.c[..f].to_vec());
            zi = data.mul(&zi, &z);
        }
        // rows[i] = coordinates of Frob(y^i); store as matrix acting on columns
        let mut frob = vec![vec![0u64; f]; f];
        for (i, row) in rows.iter().enumerate() {
            for k in 0..f {
                frob[k][i] = row[k];
            }
        }
        data.frob = frob;
        if spec.quadratic {
            let mut s = identity_rows(f);
            for _ in 0..spec.f0 {
                s = data.mat_mul_small(&data.frob, &s);
            }
            data.sigma = s;
        }
    }
    Ok(Arc::new(data))
}

/// Largest `pi`-adic precision `make_ring` accepts for `spec`.
pub fn max_precision(spec: &FieldSpec) -> u32 {
    let mut m = 0u32;
    let mut x: u64 = 1;
    while let Some(y) = x.checked_mul(spec.p).filter(|&y| y < MODULUS_LIMIT) {
        x = y;
        m += 1;
    }
    m * spec.e() as u32
}

fn identity_rows(f: usize) -> Vec<Vec<u64>> {
    let mut r = vec![vec![0u64; f]; f];
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = 1;
    }
    r
}

impl RingData {
    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }
    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn f(&self) -> usize {
        self.f
    }
    pub fn e(&self) -> usize {
        self.e
    }
    /// Number of `Z/p^m` coordinates.
    pub fn d(&self) -> usize {
        self.f * self.e
    }
    /// `p`-adic precision.
    pub fn m(&self) -> u32 {
        self.m
    }
    /// `pi`-adic working precision.
    pub fn prec(&self) -> u32 {
        self.m * self.e as u32
    }
    pub fn modulus(&self) -> u64 {
        self.modulus
    }
    /// Monic modulus of the Galois-ring part, little-endian.
    pub fn galois_poly(&self) -> &[u64] {
        &self.h
    }
    /// Eisenstein polynomial reduced mod `p^m` (`t` when unramified).
    pub fn eisenstein_poly(&self) -> &[u64] {
        &self.eis
    }
    pub fn is_quadratic(&self) -> bool {
        self.spec.quadratic
    }
    /// Residue cardinality of this ring.
    pub fn residue_size(&self) -> u64 {
        self.p.pow(self.f as u32)
    }
    /// Residue cardinality `q` of the base `E0`.
    pub fn q(&self) -> u64 {
        self.spec.q()
    }

    /// The same ring at another precision.
    pub fn with_precision(&self, n: u32) -> Result<Ring> {
        make_ring(&self.spec, n)
    }

    /// Reinterprets an element of a ring with the same spec.
    pub fn coerce(&self, a: &Elem) -> Elem {
        let mut r = *a;
        for x in r.c.iter_mut().take(self.d()) {
            *x %= self.modulus;
        }
        r
    }

    #[inline]
    fn addm(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }
    #[inline]
    fn subm(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }
    #[inline]
    fn mulm(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    fn mat_mul_small(&self, a: &[Vec<u64>], b: &[Vec<u64>]) -> Vec<Vec<u64>> {
        let f = a.len();
        let mut r = vec![vec![0u64; f]; f];
        for i in 0..f {
            for k in 0..f {
                let mut acc = 0u128;
                for j in 0..f {
                    acc += a[i][j] as u128 * b[j][k] as u128;
                }
                r[i][k] = (acc % self.modulus as u128) as u64;
            }
        }
        r
    }

    pub fn zero(&self) -> Elem {
        Elem::ZERO
    }

    pub fn one(&self) -> Elem {
        let mut r = Elem::ZERO;
        r.c[0] = 1 % self.modulus;
        r
    }

    pub fn from_i64(&self, v: i64) -> Elem {
        let mut r = Elem::ZERO;
        r.c[0] = (v as i128).rem_euclid(self.modulus as i128) as u64;
        r
    }

    /// Element from coordinates in the basis `y^i t^j` (index `i + f j`).
    pub fn from_coords(&self, coords: &[i64]) -> Result<Elem> {
        if coords.len() > self.d() {
            return Err(Error::Shape(alloc::format!(
                "{} coordinates given, ring has {}",
                coords.len(),
                self.d()
            )));
        }
        let mut r = Elem::ZERO;
        for (i, &v) in coords.iter().enumerate() {
            r.c[i] = (v as i128).rem_euclid(self.modulus as i128) as u64;
        }
        Ok(r)
    }

    pub fn coords(&self, a: &Elem) -> Vec<u64> {
        a.c[..self.d()].to_vec()
    }

    /// Generator `y` of the Galois-ring part (equals 0 when `f = 1`).
    pub fn gen_y(&self) -> Elem {
        let mut r = Elem::ZERO;
        if self.f > 1 {
            r.c[1] = 1;
        }
        r
    }

    /// Uniformizer: the Eisenstein root when ramified, `p` otherwise.
    pub fn pi(&self) -> Elem {
        let mut r = Elem::ZERO;
        if self.e > 1 {
            r.c[self.f] = 1;
        } else {
            r.c[0] = self.p % self.modulus;
        }
        r
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        let mut r = Elem::ZERO;
        for i in 0..self.d() {
            r.c[i] = self.addm(a.c[i], b.c[i]);
        }
        r
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        let mut r = Elem::ZERO;
        for i in 0..self.d() {
            r.c[i] = self.subm(a.c[i], b.c[i]);
        }
        r
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        let mut r = Elem::ZERO;
        for i in 0..self.d() {
            r.c[i] = self.subm(0, a.c[i]);
        }
        r
    }

    pub fn scale_int(&self, a: &Elem, k: u64) -> Elem {
        let k = k % self.modulus;
        let mut r = Elem::ZERO;
        for i in 0..self.d() {
            r.c[i] = self.mulm(a.c[i], k);
        }
        r
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        let (f, e) = (self.f, self.e);
        if e == 1 && f == 1 {
            let mut r = Elem::ZERO;
            r.c[0] = self.mulm(a.c[0], b.c[0]);
            return r;
        }
        let w = 2 * f - 1;
        let mut acc = [0u128; 48];
        for ja in 0..e {
            for ia in 0..f {
                let x = a.c[ia + f * ja];
                if x == 0 {
                    continue;
                }
                for jb in 0..e {
                    let base = w * (ja + jb) + ia;
                    for ib in 0..f {
                        let y = b.c[ib + f * jb];
                        acc[base + ib] += x as u128 * y as u128;
                    }
                }
            }
        }
        let md = self.modulus as u128;
        let rows = 2 * e - 1;
        let mut t = [0u64; 48];
        for k in 0..w * rows {
            t[k] = (acc[k] % md) as u64;
        }
        // y-reduction within each t-block
        if f > 1 {
            for j in 0..rows {
                for k in (f..w).rev() {
                    let c = t[w * j + k];
                    if c == 0 {
                        continue;
                    }
                    t[w * j + k] = 0;
                    for i in 0..f {
                        let hi = self.h[i];
                        if hi != 0 {
                            let idx = w * j + k - f + i;
                            t[idx] = self.subm(t[idx], self.mulm(c, hi));
                        }
                    }
                }
            }
        }
        // t-reduction: t^e = -sum a_i t^i
        for j in (e..rows).rev() {
            for i in 0..e {
                let ai = self.eis[i];
                if ai == 0 {
                    continue;
                }
                for k in 0..f {
                    let c = t[w * j + k];
                    if c != 0 {
                        let idx = w * (j - e + i) + k;
                        t[idx] = self.subm(t[idx], self.mulm(c, ai));
                    }
                }
            }
        }
        let mut r = Elem::ZERO;
        for j in 0..e {
            for i in 0..f {
                r.c[i + f * j] = t[w * j + i];
            }
        }
        r
    }

    pub fn pow(&self, a: &Elem, mut k: u64) -> Elem {
        let mut base = *a;
        let mut r = self.one();
        while k > 0 {
            if k & 1 == 1 {
                r = self.mul(&r, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base);
            }
        }
        r
    }

    fn vp(&self, x: u64) -> u32 {
        if x == 0 {
            return u32::MAX;
        }
        let mut v = 0;
        let mut y = x;
        while y.is_multiple_of(self.p) {
            y /= self.p;
            v += 1;
        }
        v
    }

    /// `pi`-adic valuation, or `None` for zero at working precision.
    pub fn val(&self, a: &Elem) -> Option<u32> {
        let mut best = u32::MAX;
        for j in 0..self.e {
            let mut vb = u32::MAX;
            for i in 0..self.f {
                vb = vb.min(self.vp(a.c[i + self.f * j]));
            }
            if vb != u32::MAX {
                best = best.min(vb * self.e as u32 + j as u32);
            }
        }
        if best == u32::MAX {
            None
        } else {
            Some(best)
        }
    }

    pub fn is_unit(&self, a: &Elem) -> bool {
        self.val(a) == Some(0)
    }

    pub fn inv_unit(&self, a: &Elem) -> Result<Elem> {
        if !self.is_unit(a) {
            return Err(Error::NotUnit);
        }
        let q = self.residue_size();
        let mut w = self.pow(a, q - 2);
        let two = self.from_i64(2);
        let mut prec = 1u32;
        while prec < self.prec() {
            let aw = self.mul(a, &w);
            w = self.mul(&w, &self.sub(&two, &aw));
            prec *= 2;
        }
        debug_assert_eq!(self.mul(a, &w), self.one());
        Ok(w)
    }

    /// `pi^k` as an element (zero once `k` reaches the precision).
    pub fn pi_pow(&self, k: u32) -> Elem {
        if k >= self.prec() {
            return Elem::ZERO;
        }
        if self.e == 1 {
            let mut r = Elem::ZERO;
            r.c[0] = self.ppow[k as usize];
            r
        } else {
            self.pow(&self.pi(), k as u64)
        }
    }

    pub fn mul_pi_pow(&self, a: &Elem, k: u32) -> Elem {
        if k == 0 {
            return *a;
        }
        if self.e == 1 {
            if k >= self.m {
                return Elem::ZERO;
            }
            self.scale_int(a, self.ppow[k as usize])
        } else {
            self.mul(a, &self.pi_pow(k))
        }
    }

    /// Exact division by `pi^k`; the top `k` digits of the result are unknown
    /// and set to zero. Requires `val(a) >= k`.
    pub fn div_pi_pow(&self, a: &Elem, k: u32) -> Elem {
        if k == 0 {
            return *a;
        }
        debug_assert!(self.val(a).is_none_or(|v| v >= k));
        if self.e == 1 {
            if k >= self.m {
                return Elem::ZERO;
            }
            let d = self.ppow[k as usize];
            let mut r = Elem::ZERO;
            for i in 0..self.d() {
                r.c[i] = a.c[i] / d;
            }
            return r;
        }
        let e = self.e as u32;
        let s = k.div_ceil(e);
        let r = s * e - k;
        if s >= self.m {
            return Elem::ZERO;
        }
        let mut b = self.mul(a, &self.pow(&self.winv, s as u64));
        if r > 0 {
            b = self.mul(&b, &self.pow(&self.pi(), r as u64));
        }
        let d = self.ppow[s as usize];
        let mut out = Elem::ZERO;
        for i in 0..self.d() {
            out.c[i] = b.c[i] / d;
        }
        out
    }

    /// Checked variant of [`div_pi_pow`](Self::div_pi_pow).
    pub fn try_div_pi_pow(&self, a: &Elem, k: u32) -> Result<Elem> {
        match self.val(a) {
            Some(v) if v < k => Err(Error::InexactDivision),
            _ => Ok(self.div_pi_pow(a, k)),
        }
    }

    /// Canonical representative of `a` modulo `pi^k`.
    pub fn reduce(&self, a: &Elem, k: u32) -> Elem {
        if k >= self.prec() {
            return *a;
        }
        let mut r = Elem::ZERO;
        let e = self.e as u32;
        for j in 0..self.e {
            let j32 = j as u32;
            if k <= j32 {
                continue;
            }
            let ex = (k - j32).div_ceil(e);
            let md = self.ppow[ex as usize];
            for i in 0..self.f {
                r.c[i + self.f * j] = a.c[i + self.f * j] % md;
            }
        }
        r
    }

    /// Galois-ring Frobenius (`y -> Frob(y)`, `t` fixed).
    pub fn frob(&self, a: &Elem) -> Elem {
        self.apply_block_matrix(&self.frob, a)
    }

    /// Conjugation of `E/E0`. Identity on rings that are not quadratic.
    pub fn conj(&self, a: &Elem) -> Elem {
        if !self.spec.quadratic {
            return *a;
        }
        self.apply_block_matrix(&self.sigma, a)
    }

    fn apply_block_matrix(&self, m: &[Vec<u64>], a: &Elem) -> Elem {
        let f = self.f;
        if f == 1 {
            return *a;
        }
        let mut r = Elem::ZERO;
        for j in 0..self.e {
            for i in 0..f {
                let mut acc = 0u128;
                for k in 0..f {
                    acc += m[i][k] as u128 * a.c[k + f * j] as u128;
                }
                r.c[i + f * j] = (acc % self.modulus as u128) as u64;
            }
        }
        r
    }

    /// Norm to `E0`: `a * sigma(a)`.
    pub fn norm(&self, a: &Elem) -> Elem {
        self.mul(a, &self.conj(a))
    }

    /// Trace to `E0`: `a + sigma(a)`.
    pub fn trace(&self, a: &Elem) -> Elem {
        self.add(a, &self.conj(a))
    }

    /// Residue class index in `0..residue_size()`.
    pub fn residue_index(&self, a: &Elem) -> u64 {
        let mut idx = 0u64;
        for i in (0..self.f).rev() {
            idx = idx * self.p + a.c[i] % self.p;
        }
        idx
    }

    /// Lift with digit coordinates of the residue class `idx`.
    pub fn residue_lift(&self, mut idx: u64) -> Elem {
        let mut r = Elem::ZERO;
        for i in 0..self.f {
            r.c[i] = idx % self.p;
            idx /= self.p;
        }
        r
    }

    pub fn teichmuller(&self, a: &Elem) -> Elem {
        let q = self.residue_size();
        let mut x = self.reduce(a, 1);
        for _ in 0..=self.prec() {
            let y = self.pow(&x, q);
            if y == x {
                break;
            }
            x = y;
        }
        x
    }

    /// A residue class generating the multiplicative group of the residue field.
    pub fn primitive_residue(&self) -> Elem {
        let q = self.residue_size();
        let primes = prime_factors(q - 1);
        for idx in 1..q {
            let r = self.residue_lift(idx);
            let ok = primes.iter().all(|&l| {
                let t = self.reduce(&self.pow(&r, (q - 1) / l), 1);
                t != self.one()
            });
            if ok {
                return r;
            }
        }
        self.one()
    }

    /// Representatives of the `q + 1` residue classes of norm-one elements.
    pub fn norm_one_residues(&self) -> Result<Vec<Elem>> {
        if !self.spec.quadratic {
            return Err(Error::NotQuadratic);
        }
        let q = self.q();
        let g = self.teichmuller(&self.primitive_residue());
        let zeta = self.pow(&g, q - 1);
        let mut out = Vec::with_capacity(q as usize + 1);
        let mut a = self.one();
        for _ in 0..=q {
            out.push(a);
            a = self.mul(&a, &zeta);
        }
        Ok(out)
    }

    fn eval_h(&self, z: &Elem) -> (Elem, Elem) {
        let mut v = Elem::ZERO;
        let mut dv = Elem::ZERO;
        for (i, &hi) in self.h.iter().enumerate().rev() {
            dv = self.add(&self.mul(&dv, z), &v);
            v = self.add(&self.mul(&v, z), &self.from_i64(hi as i64));
            let _ = i;
        }
        (v, dv)
    }

    /// Root of the Galois-ring modulus congruent to `y^p`.
    fn frobenius_root(&self) -> Elem {
        let mut z = self.pow(&self.gen_y(), self.p);
        for _ in 0..64 {
            let (v, dv) = self.eval_h(&z);
            if v.is_zero() {
                break;
            }
            let inv = self.inv_unit(&dv).expect("modulus is separable");
            z = self.sub(&z, &self.mul(&v, &inv));
        }
        z
    }
}

/// An element of `E` with a denominator: `pi^(-denom) * num`, where `num` is
/// known modulo `pi^prec`.
#[derive(Clone)]
pub struct RingElem {
    pub ring: Ring,
    pub denom: u32,
    pub num: Elem,
    pub prec: u32,
}

impl fmt::Debug for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pi^-{} * {:?}", self.denom, self.num)
    }
}

impl RingElem {
    pub fn new(ring: &Ring, denom: u32, num: Elem) -> Self {
        RingElem { ring: ring.clone(), denom, num, prec: ring.prec() }
    }

    pub fn with_prec(mut self, prec: u32) -> Self {
        self.prec = self.prec.min(prec);
        self
    }

    pub fn integral(ring: &Ring, num: Elem) -> Self {
        RingElem::new(ring, 0, num)
    }

    pub fn from_i64(ring: &Ring, v: i64) -> Self {
        RingElem::integral(ring, ring.from_i64(v))
    }

    /// Absolute precision: the element is known modulo `pi^abs_prec`.
    pub fn abs_prec(&self) -> i64 {
        self.prec.min(self.ring.prec()) as i64 - self.denom as i64
    }

    fn aligned(&self, k: u32) -> (Elem, u32) {
        let d = k - self.denom;
        (self.ring.mul_pi_pow(&self.num, d), (self.prec + d).min(self.ring.prec()))
    }

    pub fn add(&self, o: &RingElem) -> RingElem {
        let k = self.denom.max(o.denom);
        let (a, pa) = self.aligned(k);
        let (b, pb) = o.aligned(k);
        let num = self.ring.add(&a, &b);
        RingElem { ring: self.ring.clone(), denom: k, num, prec: pa.min(pb) }.normalized()
    }

    pub fn sub(&self, o: &RingElem) -> RingElem {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> RingElem {
        RingElem { num: self.ring.neg(&self.num), ..self.clone() }
    }

    pub fn mul(&self, o: &RingElem) -> RingElem {
        let r = &self.ring;
        let (p1, p2) = (self.prec.min(r.prec()), o.prec.min(r.prec()));
        let v1 = r.val(&self.num).unwrap_or(p1);
        let v2 = r.val(&o.num).unwrap_or(p2);
        let prec = (p1 + v2).min(p2 + v1).min(r.prec());
        let num = r.mul(&self.num, &o.num);
        RingElem { ring: r.clone(), denom: self.denom + o.denom, num, prec }.normalized()
    }

    /// Removes common factors of `pi` from numerator and denominator.
    pub fn normalized(mut self) -> RingElem {
        if self.denom == 0 {
            return self;
        }
        let p = self.prec.min(self.ring.prec());
        let v = self.ring.val(&self.num).unwrap_or(u32::MAX).min(self.denom).min(p);
        if v > 0 {
            self.num = self.ring.div_pi_pow(&self.num, v);
            self.denom -= v;
            self.prec = p - v;
        }
        self
    }

    pub fn valuation(&self) -> Valuation {
        let p = self.prec.min(self.ring.prec());
        match self.ring.val(&self.num) {
            Some(v) if v < p => Valuation::Finite(v as i64 - self.denom as i64),
            _ => Valuation::AtLeast(self.abs_prec()),
        }
    }

    pub fn inv(&self) -> Result<RingElem> {
        let r = &self.ring;
        let p = self.prec.min(r.prec());
        let v = r.val(&self.num).filter(|&v| v < p).ok_or(Error::NotUnit)?;
        let u = r.div_pi_pow(&self.num, v);
        let ui = r.inv_unit(&u)?;
        let up = p - v;
        // (pi^-k pi^v u)^-1 = pi^(k - v) u^-1
        let shift = self.denom as i64 - v as i64;
        if shift >= 0 {
            let s = shift as u32;
            Ok(RingElem::new(r, 0, r.mul_pi_pow(&ui, s)).with_prec(up + s))
        } else {
            Ok(RingElem::new(r, (-shift) as u32, ui).with_prec(up))
        }
    }

    pub fn sigma(&self) -> Result<RingElem> {
        if !self.ring.is_quadratic() {
            return Err(Error::NotQuadratic);
        }
        Ok(RingElem { num: self.ring.conj(&self.num), ..self.clone() })
    }

    /// Equality after aligning denominators, modulo the common precision.
    pub fn eq_at_precision(&self, o: &RingElem) -> bool {
        let k = self.denom.max(o.denom);
        let (a, pa) = self.aligned(k);
        let (b, pb) = o.aligned(k);
        let p = pa.min(pb);
        self.ring.reduce(&a, p) == self.ring.reduce(&b, p)
    }
}

/// Small polynomial arithmetic over `F_p`, used to pick Galois-ring moduli.
mod fp_poly {
    use alloc::vec;
    use alloc::vec::Vec;

    fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.len() > 1 && *a.last().unwrap() == 0 {
            a.pop();
        }
        if a.is_empty() {
            a.push(0);
        }
        a
    }

    fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut r = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                r[i + j] = (r[i + j] + x * y) % p;
            }
        }
        trim(r)
    }

    fn inv(a: u64, p: u64) -> u64 {
        let mut r = 1u64;
        let mut b = a % p;
        let mut k = p - 2;
        while k > 0 {
            if k & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            k >>= 1;
        }
        r
    }

    fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        let dm = m.len() - 1;
        if dm == 0 {
            return vec![0];
        }
        let lead = inv(*m.last().unwrap(), p);
        while r.len() > dm && !(r.len() == 1 && r[0] == 0) {
            let c = r.last().unwrap() * lead % p;
            let shift = r.len() - 1 - dm;
            for (i, &mi) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - c * mi % p) % p;
            }
            r.pop();
            r = trim(r);
            if r.len() <= dm {
                break;
            }
        }
        trim(r)
    }

    fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut x = trim(a.to_vec());
        let mut y = trim(b.to_vec());
        while !(y.len() == 1 && y[0] == 0) {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        x
    }

    fn pow_x_mod(p: u64, e: u64, m: &[u64]) -> Vec<u64> {
        // x^(p^e) mod m via repeated p-th powers
        let mut r = rem(&[0, 1], m, p);
        for _ in 0..e {
            let mut acc = vec![1u64];
            let mut base = r.clone();
            let mut k = p;
            while k > 0 {
                if k & 1 == 1 {
                    acc = rem(&mul(&acc, &base, p), m, p);
                }
                base = rem(&mul(&base, &base, p), m, p);
                k >>= 1;
            }
            r = acc;
        }
        r
    }

    fn sub_x(a: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        if r.len() < 2 {
            r.resize(2, 0);
        }
        r[1] = (r[1] + p - 1) % p;
        trim(r)
    }

    pub fn is_irreducible(h: &[u64], p: u64) -> bool {
        let f = (h.len() - 1) as u64;
        let full = sub_x(&pow_x_mod(p, f, h), p);
        if !(full.len() == 1 && full[0] == 0) {
            return false;
        }
        for r in super::prime_factors(f) {
            let g = gcd(h, &sub_x(&pow_x_mod(p, f / r, h), p), p);
            if g.len() > 1 {
                return false;
            }
        }
        true
    }

    /// First monic irreducible polynomial of degree `f` in little-endian
    /// lexicographic order of its lower coefficients.
    pub fn first_irreducible(p: u64, f: usize) -> Vec<u64> {
        let total = p.pow(f as u32);
        for idx in 1..total {
            let mut h = vec![0u64; f + 1];
            let mut k = idx;
            for c in h.iter_mut().take(f) {
                *c = k % p;
                k /= p;
            }
            h[f] = 1;
            if h[0] != 0 && is_irreducible(&h, p) {
                return h;
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }
}
