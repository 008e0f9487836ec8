//! The ring `S = O' ⊗_O W_O(R)`, free over `W_O(R)` with basis
//! `1, pi', ..., pi'^(e-1)`.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::local_rings::{make_ring, Elem, FieldSpec, Ring};

use super::poly::StructurePolys;
use super::witt::{WittRing, WittVector};

/// A totally ramified `O'/O`. The coefficient ring `R` is `O'` truncated.
///
/// Either `O = Z_p` and `O'` is given by `top`, or `O = O'` (degree one,
/// Eisenstein polynomial `T - pi'`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LtExtension {
    pub base: FieldSpec,
    pub top: FieldSpec,
    /// Eisenstein polynomial of `pi'` over `O`, little-endian, each
    /// coefficient given by its coordinates in `O`.
    pub eis: Vec<Vec<i64>>,
}

impl LtExtension {
    /// `O = Z_p`; `top` is totally ramified over `Z_p`.
    pub fn over_zp(top: &FieldSpec) -> LtExtension {
        let p = top.p as i64;
        let eis = match &top.eis {
            Some(c) => c.iter().map(|&a| vec![a]).collect(),
            None => vec![vec![-p], vec![1]],
        };
        LtExtension { base: FieldSpec::unramified(top.p, 1, false), top: top.clone(), eis }
    }

    /// `O' = O`, the Witt frame case.
    pub fn trivial(spec: &FieldSpec) -> LtExtension {
        let pi = if spec.e() > 1 { vec![0, -1] } else { vec![-(spec.p as i64)] };
        LtExtension { base: spec.clone(), top: spec.clone(), eis: vec![pi, vec![1]] }
    }

    /// Degree `e` of `O'/O`.
    pub fn degree(&self) -> usize {
        self.eis.len() - 1
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        self.top.validate()?;
        let zp = self.base == FieldSpec::unramified(self.top.p, 1, false);
        if !(zp || self.base == self.top) {
            return Err(Error::InvalidSpec("base must be Z_p or equal to the top ring".into()));
        }
        if self.top.f0 != 1 || self.top.quadratic {
            return Err(Error::InvalidSpec("top ring must be totally ramified over Z_p".into()));
        }
        if self.eis.len() < 2 || self.eis.last() != Some(&vec![1]) {
            return Err(Error::InvalidSpec("Eisenstein polynomial must be monic of degree >= 1".into()));
        }
        if self.degree() * self.base.e() != self.top.e() {
            return Err(Error::InvalidSpec("degrees of O'/O and O'/Z_p are inconsistent".into()));
        }
        Ok(())
    }
}

/// An element `sum_k pi'^k ⊗ c_k` of `S`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TensorElem {
    pub c: Vec<WittVector>,
}

impl TensorElem {
    pub fn len(&self) -> usize {
        self.c.iter().map(|w| w.len()).min().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn truncate(&self, l: usize) -> TensorElem {
        TensorElem { c: self.c.iter().map(|w| w.truncate(l)).collect() }
    }

    /// Coordinates `[k][i][j]`: component, Witt coordinate, ring coordinate.
    pub fn coords(&self, r: &Ring) -> Vec<Vec<Vec<u64>>> {
        self.c.iter().map(|w| w.coords.iter().map(|x| r.coords(x)).collect()).collect()
    }
}

/// `S = O' ⊗_O W_O(R)` with `R = O'/pi'^prec`.
#[derive(Clone, Debug)]
pub struct TensorRing {
    pub ext: LtExtension,
    pub w: WittRing,
    base_ring: Ring,
    eis: Vec<Elem>,
    eis_w: Vec<WittVector>,
}

impl TensorRing {
    /// Builds `S` with Witt length `len` over `R` at `pi'`-adic precision `prec`.
    pub fn new(ext: &LtExtension, len: usize, prec: u32) -> Result<TensorRing> {
        ext.validate()?;
        let r = make_ring(&ext.top, prec)?;
        let polys = Arc::new(StructurePolys::new(&ext.base, len, r.m())?);
        TensorRing::with_polys(ext, polys, r)
    }

    /// As [`new`](Self::new), sharing precomputed structure polynomials.
    pub fn with_polys(ext: &LtExtension, polys: Arc<StructurePolys>, r: Ring) -> Result<TensorRing> {
        ext.validate()?;
        let pi_image = if ext.base == ext.top { r.pi() } else { r.from_i64(ext.top.p as i64) };
        let w = WittRing::new(polys, r, pi_image)?;
        let b = w.polys().base().clone();
        let eis: Vec<Elem> = ext.eis.iter().map(|c| b.from_coords(c)).collect::<Result<_>>()?;
        let len = w.len();
        let eis_w = eis.iter().map(|c| w.from_base(c, len)).collect::<Result<_>>()?;
        let t = TensorRing { ext: ext.clone(), w, base_ring: b, eis, eis_w };
        let root = t.eval_eis(&t.pi_prime());
        if !root.is_zero() {
            return Err(Error::InvalidSpec("pi' is not a root of the Eisenstein polynomial in R".into()));
        }
        for (i, a) in t.eis[..t.e()].iter().enumerate() {
            let v = t.base_ring.val(a).map_or(u32::MAX, |v| v);
            if v == 0 || (i == 0 && v != 1) {
                return Err(Error::InvalidSpec("polynomial is not Eisenstein over O".into()));
            }
        }
        Ok(t)
    }

    pub fn e(&self) -> usize {
        self.ext.degree()
    }

    pub fn ring(&self) -> &Ring {
        self.w.ring()
    }

    pub fn base_ring(&self) -> &Ring {
        &self.base_ring
    }

    /// Maximal Witt length.
    pub fn len(&self) -> usize {
        self.w.len()
    }

    /// `pi'` in `R`.
    pub fn pi_prime(&self) -> Elem {
        self.ring().pi()
    }

    /// Eisenstein coefficients `a_0, ..., a_e` in `O`.
    pub fn eis_coeffs(&self) -> &[Elem] {
        &self.eis
    }

    fn eval_eis(&self, x: &Elem) -> Elem {
        let r = self.ring();
        let mut acc = r.zero();
        for a in self.eis.iter().rev() {
            acc = r.add(&r.mul(&acc, x), &self.w.embed(a));
        }
        acc
    }

    pub fn zero(&self, l: usize) -> TensorElem {
        TensorElem { c: vec![self.w.zero(l); self.e()] }
    }

    /// `1 ⊗ w`.
    pub fn scalar(&self, w: &WittVector) -> TensorElem {
        let mut t = self.zero(w.len());
        t.c[0] = w.clone();
        t
    }

    pub fn one(&self, l: usize) -> TensorElem {
        self.scalar(&self.w.one(l))
    }

    /// `pi'^k ⊗ w` for `k < e`.
    pub fn basis_times(&self, k: usize, w: &WittVector) -> TensorElem {
        let mut t = self.zero(w.len());
        t.c[k] = w.clone();
        t
    }

    /// `pi' ⊗ 1 - 1 ⊗ [pi']`.
    pub fn x_minus_teich(&self, l: usize) -> TensorElem {
        let teich = self.scalar(&self.w.teichmuller(&self.pi_prime(), l));
        self.sub(&self.pi_prime_tensor(l), &teich)
    }

    /// `pi' ⊗ 1`.
    pub fn pi_prime_tensor(&self, l: usize) -> TensorElem {
        let w = &self.w;
        if self.e() > 1 {
            return self.basis_times(1, &w.one(l));
        }
        // e = 1: pi' = -a_0 in O
        self.scalar(&w.neg(&self.eis_w[0].truncate(l)))
    }

    pub fn add(&self, a: &TensorElem, b: &TensorElem) -> TensorElem {
        TensorElem { c: a.c.iter().zip(&b.c).map(|(x, y)| self.w.add(x, y)).collect() }
    }

    pub fn neg(&self, a: &TensorElem) -> TensorElem {
        TensorElem { c: a.c.iter().map(|x| self.w.neg(x)).collect() }
    }

    pub fn sub(&self, a: &TensorElem, b: &TensorElem) -> TensorElem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &TensorElem, b: &TensorElem) -> TensorElem {
        let w = &self.w;
        let e = self.e();
        let l = a.len().min(b.len());
        let mut acc = vec![w.zero(l); 2 * e - 1];
        for (i, x) in a.c.iter().enumerate() {
            for (j, y) in b.c.iter().enumerate() {
                acc[i + j] = w.add(&acc[i + j], &w.mul(x, y));
            }
        }
        // pi'^e = -sum_{i<e} a_i pi'^i
        for d in (e..2 * e - 1).rev() {
            let top = core::mem::replace(&mut acc[d], w.zero(l));
            for i in 0..e {
                let t = w.mul(&top, &self.eis_w[i]);
                acc[d - e + i] = w.sub(&acc[d - e + i], &t);
            }
        }
        acc.truncate(e);
        TensorElem { c: acc }
    }

    /// Scales by `1 ⊗ w`.
    pub fn scale(&self, a: &TensorElem, w: &WittVector) -> TensorElem {
        TensorElem { c: a.c.iter().map(|x| self.w.mul(x, w)).collect() }
    }

    /// `sigma = id ⊗ F`; shortens by one.
    pub fn sigma(&self, a: &TensorElem) -> TensorElem {
        TensorElem { c: a.c.iter().map(|x| self.w.frobenius(x)).collect() }
    }

    /// `O'`-linear Verschiebung.
    pub fn verschiebung(&self, a: &TensorElem) -> TensorElem {
        TensorElem { c: a.c.iter().map(|x| self.w.verschiebung(x)).collect() }
    }

    /// `O'`-linear inverse of `V` on `O' ⊗ I_O(R)`.
    pub fn v_inverse(&self, a: &TensorElem) -> Result<TensorElem> {
        Ok(TensorElem { c: a.c.iter().map(|x| self.w.v_inverse(x)).collect::<Result<_>>()? })
    }

    /// Whether `a` lies in `O' ⊗ I_O(R)`.
    pub fn in_augmentation(&self, a: &TensorElem) -> bool {
        a.c.iter().all(|w| w.coords.first().is_none_or(|x| x.is_zero()))
    }

    /// Image under `S -> R`, `pi'^k ⊗ w -> pi'^k w_0`.
    pub fn to_r(&self, a: &TensorElem) -> Elem {
        let r = self.ring();
        let mut acc = r.zero();
        let mut pw = r.one();
        for w in &a.c {
            if let Some(x) = w.coords.first() {
                acc = r.add(&acc, &r.mul(&pw, x));
            }
            pw = r.mul(&pw, &self.pi_prime());
        }
        acc
    }

    /// Units are detected on the image in `R/pi'`.
    pub fn is_unit(&self, a: &TensorElem) -> bool {
        self.ring().is_unit(&self.to_r(a))
    }

    /// Inverse of a unit by Newton iteration from a Teichmuller start.
    pub fn inverse(&self, a: &TensorElem) -> Result<TensorElem> {
        let l = a.len();
        let r = self.ring();
        let c = r.inv_unit(&self.to_r(a))?;
        let one = self.one(l);
        let two = self.add(&one, &one);
        let mut y = self.scalar(&self.w.teichmuller(&c, l));
        for _ in 0..64 {
            let ay = self.mul(a, &y);
            if ay == one {
                return Ok(y);
            }
            y = self.mul(&y, &self.sub(&two, &ay));
        }
        Err(Error::NotUnit)
    }

    pub fn random(&self, rng: &mut impl Rng, l: usize) -> TensorElem {
        TensorElem { c: (0..self.e()).map(|_| self.w.random(rng, l)).collect() }
    }

    /// A random element of `J_O'(R)`: `(pi' ⊗ 1 - 1 ⊗ [pi']) y + V(z)`.
    pub fn random_in_j(&self, rng: &mut impl Rng, l: usize) -> TensorElem {
        let y = self.random(rng, l);
        let z = self.random(rng, l.saturating_sub(1));
        let vz = self.verschiebung(&z);
        self.add(&self.mul(&self.x_minus_teich(l), &y), &vz)
    }
}
