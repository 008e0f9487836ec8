//! Lubin-Tate frames on `O' ⊗ W_O(R)`: the element `theta`, the unit
//! `kappa`, the divided Frobenius and the display conversions.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::local_rings::Elem;

use super::tensor::{LtExtension, TensorElem, TensorRing};
use super::Tally;

/// `theta` with the data certifying its two defining properties.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaData {
    pub theta: TensorElem,
    /// Image in `O' ⊗ W_O(O'/pi') = O'`, modulo `pi^len`.
    pub image: Elem,
    pub image_valuation: Option<u32>,
}

/// `theta-bar = (-1)^(e+1) sum_{i=1}^e a_i (X^i - Y^i)/(X - Y)` with `a_e = 1`,
/// lifted by `1 ⊗ pi'^j -> 1 ⊗ [pi'^j]`, then checked for `theta J ⊆ O' ⊗ I`
/// and for the valuation `e - 1` of its image in `O'`.
pub fn lubin_tate_theta(s: &TensorRing) -> Result<ThetaData> {
    let w = &s.w;
    let r = s.ring();
    let e = s.e();
    let l = s.len();
    let a = s.eis_coeffs();
    let mut theta = s.zero(l);
    for (k, slot) in theta.c.iter_mut().enumerate() {
        for (i, ai) in a.iter().enumerate().skip(k + 1) {
            let t = w.teichmuller(&r.pow(&s.pi_prime(), (i - 1 - k) as u64), l);
            *slot = w.add(slot, &w.mul(&w.from_base(ai, l)?, &t));
        }
    }
    if e.is_multiple_of(2) {
        theta = s.neg(&theta);
    }
    // (i): theta J ⊆ O' ⊗ I on the generators of J
    let mut gens = Vec::from([s.x_minus_teich(l)]);
    for k in 0..e {
        gens.push(s.basis_times(k, &w.verschiebung(&w.one(l - 1))));
    }
    if !gens.iter().all(|g| s.in_augmentation(&s.mul(&theta, g))) {
        return Err(Error::Verification("theta J is not contained in O' ⊗ I".into()));
    }
    // (ii): image in O' has valuation e - 1
    let image = residue_image(s, &theta);
    let image_valuation = r.val(&image);
    let visible = r.prec().min((l * e) as u32);
    if (e as u32) > visible || image_valuation != Some(e as u32 - 1) {
        return Err(Error::Verification(alloc::format!(
            "image of theta has valuation {image_valuation:?}, expected {}",
            e - 1
        )));
    }
    Ok(ThetaData { theta, image, image_valuation })
}

/// `O' ⊗ W_O(R) -> O' ⊗ W_O(O'/pi') = O'/pi^len` via
/// `(x_i) -> sum_i pi^i [x_i mod pi']`.
pub fn residue_image(s: &TensorRing, a: &TensorElem) -> Elem {
    let r = s.ring();
    let pi_o = s.w.pi_image();
    let mut acc = r.zero();
    let mut pk = r.one();
    for w in &a.c {
        let mut iota = r.zero();
        let mut pw = r.one();
        for x in &w.coords {
            iota = r.add(&iota, &r.mul(&pw, &r.teichmuller(&r.reduce(x, 1))));
            pw = r.mul(&pw, &pi_o);
        }
        acc = r.add(&acc, &r.mul(&pk, &iota));
        pk = r.mul(&pk, &s.pi_prime());
    }
    let l = a.len() as u32;
    r.reduce(&acc, l * s.e() as u32)
}

/// `kappa` with its residue in `R/pi'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KappaData {
    pub kappa: TensorElem,
    pub residue: Elem,
}

/// `kappa = V^-1(theta (pi' ⊗ 1 - 1 ⊗ [pi']))`, certified a unit by its
/// image in `R/pi'`.
pub fn lubin_tate_kappa(s: &TensorRing, theta: &TensorElem) -> Result<KappaData> {
    let a = s.mul(theta, &s.x_minus_teich(theta.len()));
    let kappa = s.v_inverse(&a)?;
    let residue = s.ring().reduce(&s.to_r(&kappa), 1);
    if !s.is_unit(&kappa) {
        return Err(Error::Verification("kappa is not a unit".into()));
    }
    Ok(KappaData { kappa, residue })
}

/// The frame `L_(O'/O, kappa)(R)`.
#[derive(Clone, Debug)]
pub struct LtFrame {
    pub s: TensorRing,
    pub theta: ThetaData,
    /// `V^-1(theta (pi' ⊗ 1 - 1 ⊗ [pi']))`.
    pub kappa_theta: TensorElem,
    /// `sigma-dot(pi' ⊗ 1 - 1 ⊗ [pi'])`.
    pub kappa: TensorElem,
    twist: TensorElem,
}

impl LtFrame {
    pub fn new(ext: &LtExtension, len: usize, prec: u32) -> Result<LtFrame> {
        LtFrame::from_ring(TensorRing::new(ext, len, prec)?)
    }

    /// The frame with `sigma-dot(x) = V^-1(theta x)`.
    pub fn from_ring(s: TensorRing) -> Result<LtFrame> {
        if s.len() < 2 {
            return Err(Error::InvalidSpec("frames need Witt length at least 2".into()));
        }
        let theta = lubin_tate_theta(&s)?;
        let k = lubin_tate_kappa(&s, &theta.theta)?;
        let twist = s.one(k.kappa.len());
        Ok(LtFrame { s, theta, kappa_theta: k.kappa.clone(), kappa: k.kappa, twist })
    }

    /// The same ring with `sigma-dot` rescaled so that it sends
    /// `pi' ⊗ 1 - 1 ⊗ [pi']` to `kappa`.
    pub fn with_kappa(&self, kappa: &TensorElem) -> Result<LtFrame> {
        if !self.s.is_unit(kappa) {
            return Err(Error::NotUnit);
        }
        let twist = self.s.mul(kappa, &self.s.inverse(&self.kappa_theta)?);
        Ok(LtFrame { kappa: kappa.truncate(twist.len()), twist, ..self.clone() })
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn theta(&self) -> &TensorElem {
        &self.theta.theta
    }

    /// Whether `kappa` is the one coming from `theta`.
    pub fn is_theta_frame(&self) -> bool {
        self.kappa == self.kappa_theta
    }

    /// `sigma-dot(x) = (kappa / kappa_theta) V^-1(theta x)` on `J`.
    pub fn sigma_dot(&self, x: &TensorElem) -> Result<TensorElem> {
        let v = self.s.v_inverse(&self.s.mul(self.theta(), x))?;
        Ok(self.s.mul(&self.twist, &v))
    }

    /// `s = kappa^-1 sigma(pi' ⊗ 1 - 1 ⊗ [pi'])`, with `sigma = s sigma-dot` on `J`.
    pub fn s_element(&self) -> Result<TensorElem> {
        let s = &self.s;
        let sx = s.sigma(&s.x_minus_teich(self.len()));
        Ok(s.mul(&s.inverse(&self.kappa)?, &sx))
    }
}

/// `sigma-dot(xi) = V^-1(xi) sigma-dot(V(1))`, `sigma-dot(xi_0) = kappa`,
/// `sigma = s sigma-dot` and `sigma`-linearity, on generators of `J` and on
/// random elements.
pub fn frame_tally(frame: &LtFrame, seed: u64) -> Result<Tally> {
    let s = &frame.s;
    let w = &s.w;
    let l = frame.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tally::default();
    let v1 = s.verschiebung(&s.one(l - 1));
    let sd_v1 = frame.sigma_dot(&v1)?;
    let mut aug = Vec::from([v1.clone()]);
    for k in 0..s.e() {
        aug.push(s.basis_times(k, &w.verschiebung(&w.random(&mut rng, l - 1))));
    }
    for xi in &aug {
        let lhs = frame.sigma_dot(xi)?;
        let rhs = s.mul(&s.v_inverse(xi)?, &sd_v1);
        t.check(lhs == rhs, "sigma-dot(xi) = V^-1(xi) sigma-dot(V(1))");
    }
    let x0 = s.x_minus_teich(l);
    t.check(frame.sigma_dot(&x0)? == frame.kappa, "sigma-dot(pi' ⊗ 1 - 1 ⊗ [pi']) = kappa");
    let sel = frame.s_element()?;
    let mut gens = aug;
    gens.push(x0);
    for _ in 0..2 {
        gens.push(s.random_in_j(&mut rng, l));
    }
    for xi in &gens {
        let sd = frame.sigma_dot(xi)?;
        t.check(s.sigma(xi) == s.mul(&sel, &sd), "sigma(xi) = s sigma-dot(xi)");
        let y = s.random(&mut rng, l);
        let lhs = frame.sigma_dot(&s.mul(xi, &y))?;
        t.check(lhs == s.mul(&sd, &s.sigma(&y)), "sigma-dot(xi y) = sigma-dot(xi) sigma(y)");
    }
    Ok(t)
}

/// A rank-one Lubin-Tate `O`-display on `O' ⊗ W_O(R)`, given by
/// `F-dot(pi' ⊗ 1 - 1 ⊗ [pi'])` and `F(1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LtDisplay {
    pub kappa: TensorElem,
    pub f_one: TensorElem,
}

impl LtDisplay {
    /// `F(x) = sigma(x) F(1)`.
    pub fn frobenius(&self, s: &TensorRing, x: &TensorElem) -> TensorElem {
        s.mul(&s.sigma(x), &self.f_one)
    }

    /// `F-dot` on `O' ⊗ I` via `F-dot(xi) = V^-1(xi) F(1)`.
    pub fn f_dot_aug(&self, s: &TensorRing, xi: &TensorElem) -> Result<TensorElem> {
        Ok(s.mul(&s.v_inverse(xi)?, &self.f_one))
    }
}

/// Recovers `F(1) = V^-1(a)^-1 sigma(theta) kappa` with
/// `a = theta (pi' ⊗ 1 - 1 ⊗ [pi'])`, and checks `F-dot(xi) = V^-1(xi) F(1)` on
/// elements `a y` where both descriptions of `F-dot` apply.
pub fn lt_display_from_kappa(frame: &LtFrame, kappa: &TensorElem, seed: u64) -> Result<LtDisplay> {
    let s = &frame.s;
    if !s.is_unit(kappa) {
        return Err(Error::NotUnit);
    }
    let l = frame.len();
    let theta = frame.theta();
    let a = s.mul(theta, &s.x_minus_teich(l));
    let va = s.v_inverse(&a)?;
    let f_one = s.mul(&s.mul(&s.inverse(&va)?, &s.sigma(theta)), kappa);
    let disp = LtDisplay { kappa: kappa.clone(), f_one };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ys = Vec::from([s.one(l)]);
    for _ in 0..3 {
        ys.push(s.random(&mut rng, l));
    }
    for y in &ys {
        let via_kappa = s.mul(&s.sigma(&s.mul(theta, y)), kappa);
        let via_f = disp.f_dot_aug(s, &s.mul(&a, y))?;
        if via_kappa != via_f {
            return Err(Error::Verification("relation F-dot(xi) = V^-1(xi) F(1) fails".into()));
        }
    }
    Ok(disp)
}

/// `F'(1) = kappa^-1 F-dot(pi' ⊗ 1 - 1 ⊗ [pi'])`.
pub fn frobenius_to_frame(frame: &LtFrame, disp: &LtDisplay) -> Result<TensorElem> {
    theta_frame(frame)?;
    let s = &frame.s;
    Ok(s.mul(&s.inverse(&frame.kappa)?, &disp.kappa))
}

/// `F(1) = F'(theta) = sigma(theta) F'(1)`.
pub fn frobenius_from_frame(frame: &LtFrame, f_prime_one: &TensorElem) -> Result<TensorElem> {
    theta_frame(frame)?;
    let s = &frame.s;
    Ok(s.mul(&s.sigma(frame.theta()), f_prime_one))
}

fn theta_frame(frame: &LtFrame) -> Result<()> {
    if frame.is_theta_frame() {
        Ok(())
    } else {
        Err(Error::Precondition("conversion needs the frame with kappa = V^-1(theta (pi' ⊗ 1 - 1 ⊗ [pi']))".into()))
    }
}

/// Round trip `F -> F' -> F''` and `F-dot(xi x) = sigma-dot(xi) F'(x)`.
pub fn convert_tally(frame: &LtFrame, disp: &LtDisplay, seed: u64) -> Result<Tally> {
    let s = &frame.s;
    let l = frame.len();
    let fp = frobenius_to_frame(frame, disp)?;
    let fpp = frobenius_from_frame(frame, &fp)?;
    let mut t = Tally::default();
    t.check(fpp == disp.f_one.truncate(fpp.len()), "F''(1) = F(1)");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x0 = s.x_minus_teich(l);
    for _ in 0..3 {
        let x = s.random(&mut rng, l);
        let lhs = s.mul(&s.sigma(&s.mul(frame.theta(), &x)), &fp);
        t.check(lhs == disp.frobenius(s, &x), "F'(theta x) = F(x)");
        let f_prime_x = s.mul(&s.sigma(&x), &fp);
        let xi = s.verschiebung(&s.random(&mut rng, l - 1));
        let via_display = s.mul(&s.v_inverse(&xi)?, &disp.frobenius(s, &x));
        t.check(via_display == s.mul(&frame.sigma_dot(&xi)?, &f_prime_x), "F-dot(xi x) = sigma-dot(xi) F'(x), xi in I");
        let via_display = s.mul(&s.sigma(&x), &disp.kappa);
        t.check(via_display == s.mul(&frame.sigma_dot(&x0)?, &f_prime_x), "F-dot(xi_0 x) = sigma-dot(xi_0) F'(x)");
    }
    Ok(t)
}
