//! Truncated relative Witt vectors `W_O(R)` with arithmetic by evaluation of
//! the cached structure polynomials.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::local_rings::{Elem, Ring};

use super::poly::{y_var, Monomial, Poly, StructurePolys, MAX_LEN};

/// A truncated Witt vector; the length is the number of coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WittVector {
    pub coords: Vec<Elem>,
}

impl WittVector {
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn truncate(&self, l: usize) -> WittVector {
        WittVector { coords: self.coords[..l.min(self.len())].to_vec() }
    }
}

type Terms = Vec<(Monomial, Elem)>;

/// `W_O(R)` truncated at `len`, for an `O`-algebra `R`.
#[derive(Clone, Debug)]
pub struct WittRing {
    polys: Arc<StructurePolys>,
    r: Ring,
    pi_r: Elem,
    sum: Vec<Terms>,
    prod: Vec<Terms>,
    frob: Vec<Terms>,
}

impl WittRing {
    /// `pi_image` is the image in `R` of the uniformizer of `O`.
    pub fn new(polys: Arc<StructurePolys>, r: Ring, pi_image: Elem) -> Result<WittRing> {
        if r.p() != polys.base().p() {
            return Err(Error::InvalidSpec("coefficient ring has a different residue characteristic".into()));
        }
        if r.m() > polys.digits() {
            return Err(Error::InvalidSpec(alloc::format!(
                "structure polynomials hold {} digits, ring needs {}",
                polys.digits(),
                r.m()
            )));
        }
        let mut w = WittRing { polys: polys.clone(), r, pi_r: pi_image, sum: vec![], prod: vec![], frob: vec![] };
        let emb = |p: &Poly, w: &WittRing| -> Terms { p.terms.iter().map(|(m, c)| (*m, w.embed(c))).collect() };
        w.sum = polys.sum.iter().map(|p| emb(p, &w)).collect();
        w.prod = polys.prod.iter().map(|p| emb(p, &w)).collect();
        w.frob = polys.frob.iter().map(|p| emb(p, &w)).collect();
        Ok(w)
    }

    pub fn ring(&self) -> &Ring {
        &self.r
    }

    pub fn polys(&self) -> &Arc<StructurePolys> {
        &self.polys
    }

    /// Maximal length.
    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn q(&self) -> u64 {
        self.polys.q()
    }

    /// Image of the uniformizer of `O` in `R`.
    pub fn pi_image(&self) -> Elem {
        self.pi_r
    }

    /// `O -> R`.
    pub fn embed(&self, c: &Elem) -> Elem {
        let b = self.polys.base();
        let r = &self.r;
        let mut acc = r.zero();
        let mut pw = r.one();
        for j in 0..b.e() {
            acc = r.add(&acc, &r.scale_int(&pw, c.c[j]));
            pw = r.mul(&pw, &self.pi_r);
        }
        acc
    }

    pub fn zero(&self, l: usize) -> WittVector {
        WittVector { coords: vec![Elem::ZERO; l] }
    }

    pub fn teichmuller(&self, a: &Elem, l: usize) -> WittVector {
        let mut w = self.zero(l);
        if l > 0 {
            w.coords[0] = *a;
        }
        w
    }

    pub fn one(&self, l: usize) -> WittVector {
        self.teichmuller(&self.r.one(), l)
    }

    /// Image of `c in O` under the structure map `O -> W_O(R)`.
    pub fn from_base(&self, c: &Elem, l: usize) -> Result<WittVector> {
        let u = self.polys.structure_coords(c, l)?;
        Ok(WittVector { coords: u.iter().map(|x| self.embed(x)).collect() })
    }

    pub fn from_int(&self, v: i64, l: usize) -> Result<WittVector> {
        let c = self.polys.base().from_i64(v);
        self.from_base(&c, l)
    }

    /// `pi_O` as a Witt vector.
    pub fn pi(&self, l: usize) -> Result<WittVector> {
        self.from_base(&self.polys.base().pi(), l)
    }

    fn tables(&self, a: &WittVector, b: Option<&WittVector>) -> Vec<Vec<Elem>> {
        let r = &self.r;
        let q = self.q();
        let l = a.len();
        let mut t: Vec<Vec<Elem>> = vec![Vec::new(); 2 * MAX_LEN];
        let mut fill = |v: usize, x: &Elem, top: u64| {
            let mut row = Vec::with_capacity(top as usize + 1);
            row.push(r.one());
            for k in 1..=top as usize {
                row.push(r.mul(&row[k - 1], x));
            }
            t[v] = row;
        };
        for i in 0..l {
            let top = q.pow((l - 1 - i) as u32);
            fill(i, &a.coords[i], top);
            if let Some(b) = b {
                fill(y_var(i), &b.coords[i], top);
            }
        }
        t
    }

    fn eval(&self, terms: &Terms, t: &[Vec<Elem>]) -> Elem {
        let r = &self.r;
        let mut acc = r.zero();
        for (m, c) in terms {
            let mut x = *c;
            for (v, &k) in m.iter().enumerate() {
                if k > 0 {
                    x = r.mul(&x, &t[v][k as usize]);
                }
            }
            acc = r.add(&acc, &x);
        }
        acc
    }

    fn binary(&self, polys: &[Terms], a: &WittVector, b: &WittVector) -> WittVector {
        let l = a.len().min(b.len()).min(self.len());
        let (a, b) = (a.truncate(l), b.truncate(l));
        let t = self.tables(&a, Some(&b));
        WittVector { coords: (0..l).map(|n| self.eval(&polys[n], &t)).collect() }
    }

    pub fn add(&self, a: &WittVector, b: &WittVector) -> WittVector {
        self.binary(&self.sum, a, b)
    }

    pub fn mul(&self, a: &WittVector, b: &WittVector) -> WittVector {
        self.binary(&self.prod, a, b)
    }

    /// Coordinatewise negation; valid because `q` is odd.
    pub fn neg(&self, a: &WittVector) -> WittVector {
        WittVector { coords: a.coords.iter().map(|x| self.r.neg(x)).collect() }
    }

    pub fn sub(&self, a: &WittVector, b: &WittVector) -> WittVector {
        self.add(a, &self.neg(b))
    }

    /// Frobenius `W_(l) -> W_(l-1)`.
    pub fn frobenius(&self, a: &WittVector) -> WittVector {
        let l = a.len().min(self.len());
        if l == 0 {
            return self.zero(0);
        }
        let a = a.truncate(l);
        let t = self.tables(&a, None);
        WittVector { coords: (0..l - 1).map(|n| self.eval(&self.frob[n], &t)).collect() }
    }

    /// Verschiebung `W_(l) -> W_(l+1)`, truncated to the maximal length.
    pub fn verschiebung(&self, a: &WittVector) -> WittVector {
        let mut coords = vec![Elem::ZERO];
        coords.extend_from_slice(&a.coords);
        coords.truncate(self.len());
        WittVector { coords }
    }

    /// Inverse of `V` on its image `I_O(R)`.
    pub fn v_inverse(&self, a: &WittVector) -> Result<WittVector> {
        match a.coords.first() {
            None => Ok(self.zero(0)),
            Some(x) if x.is_zero() => Ok(WittVector { coords: a.coords[1..].to_vec() }),
            Some(_) => Err(Error::NotInImageOfV),
        }
    }

    /// Ghost components `w_n = sum_i pi^i x_i^(q^(n-i))` in `R`.
    pub fn ghost(&self, a: &WittVector) -> Vec<Elem> {
        let r = &self.r;
        let q = self.q();
        (0..a.len())
            .map(|n| {
                let mut acc = r.zero();
                let mut pw = r.one();
                for i in 0..=n {
                    let t = r.pow(&a.coords[i], q.pow((n - i) as u32));
                    acc = r.add(&acc, &r.mul(&pw, &t));
                    pw = r.mul(&pw, &self.pi_r);
                }
                acc
            })
            .collect()
    }

    pub fn random(&self, rng: &mut impl Rng, l: usize) -> WittVector {
        WittVector { coords: (0..l).map(|_| random_elem(&self.r, rng)).collect() }
    }
}

/// Uniform element of a truncated ring.
pub fn random_elem(r: &Ring, rng: &mut impl Rng) -> Elem {
    let mut x = Elem::ZERO;
    for c in x.c.iter_mut().take(r.d()) {
        *c = rng.random_range(0..r.modulus());
    }
    x
}
