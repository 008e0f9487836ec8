//! The natural map `W_Z_p(R) -> W_O'(R)` for an `O'`-algebra `R`, defined by
//! matching ghost components on a torsion-free cover, and its extension to
//! `O' ⊗ W_Z_p(R) -> W_O'(R)`.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::local_rings::{make_ring, Elem, Ring};

use super::frame::LtFrame;
use super::tensor::{LtExtension, TensorElem, TensorRing};
use super::witt::{random_elem, WittRing, WittVector};
use super::Tally;

/// `alpha` with `w'_n(alpha x) = w_n(x)`.
#[derive(Clone, Debug)]
pub struct AlphaMap {
    src: WittRing,
    dst: WittRing,
    cover: Ring,
}

impl AlphaMap {
    /// `src` is `W_Z_p(R)`, `dst` is `W_O'(R)` over the same `R = O'/pi'^k`.
    pub fn new(src: &WittRing, dst: &WittRing) -> Result<AlphaMap> {
        let r = src.ring();
        if **r != **dst.ring() {
            return Err(Error::InvalidSpec("alpha needs a common coefficient ring".into()));
        }
        if src.polys().base().e() != 1 {
            return Err(Error::InvalidSpec("alpha starts from Witt vectors over Z_p".into()));
        }
        if dst.pi_image() != r.pi() || src.q() != dst.q() {
            return Err(Error::InvalidSpec("target must be Witt vectors over O' itself".into()));
        }
        // dividing by pi'^n for n < len costs len - 1 digits
        let cover = make_ring(r.spec(), r.prec() + src.len() as u32)?;
        Ok(AlphaMap { src: src.clone(), dst: dst.clone(), cover })
    }

    pub fn apply(&self, x: &WittVector) -> Result<WittVector> {
        let c = &self.cover;
        let q = self.src.q();
        let p = c.from_i64(c.p() as i64);
        let xs: Vec<Elem> = x.coords.iter().map(|a| c.coerce(a)).collect();
        let mut ys: Vec<Elem> = Vec::with_capacity(xs.len());
        for n in 0..xs.len() {
            let mut acc = c.zero();
            let mut pw = c.one();
            for (i, xi) in xs.iter().enumerate().take(n + 1) {
                acc = c.add(&acc, &c.mul(&pw, &c.pow(xi, q.pow((n - i) as u32))));
                pw = c.mul(&pw, &p);
            }
            for (i, yi) in ys.iter().enumerate() {
                let t = c.mul_pi_pow(&c.pow(yi, q.pow((n - i) as u32)), i as u32);
                acc = c.sub(&acc, &t);
            }
            ys.push(c.try_div_pi_pow(&acc, n as u32)?);
        }
        let r = self.dst.ring();
        Ok(WittVector { coords: ys.iter().map(|y| r.coerce(y)).collect() })
    }

    /// `sum_k pi'^k ⊗ c_k -> sum_k pi'^k alpha(c_k)`, into `W_O'(R)` viewed
    /// as `O' ⊗_O' W_O'(R)`.
    pub fn apply_tensor(&self, src: &TensorRing, dst: &TensorRing, a: &TensorElem) -> Result<TensorElem> {
        let w = &dst.w;
        let l = a.len();
        let pi = w.pi(l)?;
        let mut acc = w.zero(l);
        let mut pk = w.one(l);
        for c in &a.c {
            acc = w.add(&acc, &w.mul(&pk, &self.apply(c)?));
            pk = w.mul(&pk, &pi);
        }
        debug_assert_eq!(src.e(), a.c.len());
        Ok(dst.scalar(&acc))
    }
}

/// `alpha` as a map of frames `L_(O'/Z_p, kappa) -> L_(O'/O', alpha(kappa))`
/// together with the target frame.
pub fn alpha_target(frame: &LtFrame) -> Result<(AlphaMap, LtFrame)> {
    let s = &frame.s;
    if s.ext.base.e() != 1 || s.ext.base.p != s.ext.top.p {
        return Err(Error::Precondition("alpha needs a frame over Z_p".into()));
    }
    let dst = TensorRing::new(&LtExtension::trivial(&s.ext.top), s.len(), s.ring().prec())?;
    let alpha = AlphaMap::new(&s.w, &dst.w)?;
    let kappa = alpha.apply_tensor(s, &dst, &frame.kappa)?;
    let target = LtFrame::from_ring(dst)?.with_kappa(&kappa)?;
    Ok((alpha, target))
}

/// Teichmuller naturality, ring homomorphism, Frobenius equivariance, the
/// `V`-relation and strictness `alpha ∘ sigma-dot = sigma-dot' ∘ alpha`.
pub fn alpha_tally(frame: &LtFrame, seed: u64) -> Result<Tally> {
    let (alpha, target) = alpha_target(frame)?;
    let s = &frame.s;
    let d = &target.s;
    let (w, w2) = (&s.w, &d.w);
    let r = s.ring();
    let l = s.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tally::default();
    for _ in 0..3 {
        let a = random_elem(r, &mut rng);
        t.check(alpha.apply(&w.teichmuller(&a, l))? == w2.teichmuller(&a, l), "alpha([a]) = [a]");
        let x = w.random(&mut rng, l);
        let y = w.random(&mut rng, l);
        let (ax, ay) = (alpha.apply(&x)?, alpha.apply(&y)?);
        t.check(alpha.apply(&w.add(&x, &y))? == w2.add(&ax, &ay), "alpha(x + y) = alpha(x) + alpha(y)");
        t.check(alpha.apply(&w.mul(&x, &y))? == w2.mul(&ax, &ay), "alpha(x y) = alpha(x) alpha(y)");
        t.check(alpha.apply(&w.frobenius(&x))? == w2.frobenius(&ax), "alpha F = F' alpha");
    }
    // pi / pi' in O'
    let b = w2.polys().base();
    let ratio = b.try_div_pi_pow(&b.from_i64(r.p() as i64), 1)?;
    let lhs = alpha.apply(&w.verschiebung(&w.one(l - 1)))?;
    let rhs = w2.mul(&w2.from_base(&ratio, l)?, &w2.verschiebung(&w2.one(l - 1)));
    t.check(lhs == rhs, "alpha(V(1)) = (pi / pi') V'(1)");
    let mut gens = Vec::from([s.x_minus_teich(l)]);
    for k in 0..s.e() {
        gens.push(s.basis_times(k, &w.verschiebung(&w.random(&mut rng, l - 1))));
    }
    gens.push(s.random_in_j(&mut rng, l));
    for xi in &gens {
        let lhs = alpha.apply_tensor(s, d, &frame.sigma_dot(xi)?)?;
        let rhs = target.sigma_dot(&alpha.apply_tensor(s, d, xi)?)?;
        t.check(lhs == rhs, "alpha sigma-dot = sigma-dot' alpha");
        let lhs = alpha.apply_tensor(s, d, &s.sigma(xi))?;
        t.check(lhs == d.sigma(&alpha.apply_tensor(s, d, xi)?), "alpha sigma = sigma' alpha");
    }
    Ok(t)
}
