//! Free windows over a Lubin-Tate frame, their duals, the canonical pairing
//! and the unit twist of base change.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::frame::LtFrame;
use super::tensor::{TensorElem, TensorRing};
use super::Tally;

pub type TMat = Vec<Vec<TensorElem>>;

/// A window on `P = S^r` with normal decomposition `P = L ⊕ T`: basis vector
/// `i` lies in `L` iff `is_l[i]`. Column `i` of `phi` is `F-dot(e_i)` for
/// `e_i in L` and `F(e_i)` for `e_i in T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    pub is_l: Vec<bool>,
    pub phi: TMat,
}

impl Window {
    pub fn rank(&self) -> usize {
        self.is_l.len()
    }
}

pub fn mat_mul(s: &TensorRing, a: &TMat, b: &TMat) -> TMat {
    let n = a.len();
    let m = b[0].len();
    let l = a.iter().chain(b).flatten().map(|x| x.len()).min().unwrap_or(0);
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..b.len()).fold(s.zero(l), |acc, k| s.add(&acc, &s.mul(&a[i][k], &b[k][j]))))
                .collect()
        })
        .collect()
}

pub fn transpose(a: &TMat) -> TMat {
    (0..a[0].len()).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

/// Gauss-Jordan inverse over the local ring `S`.
pub fn mat_inverse(s: &TensorRing, a: &TMat) -> Result<TMat> {
    let n = a.len();
    let l = a.iter().flatten().map(|x| x.len()).min().unwrap_or(0);
    let mut m = a.clone();
    let mut inv: TMat = (0..n).map(|i| (0..n).map(|j| if i == j { s.one(l) } else { s.zero(l) }).collect()).collect();
    for c in 0..n {
        let piv = (c..n).find(|&i| s.is_unit(&m[i][c])).ok_or(Error::Singular)?;
        m.swap(c, piv);
        inv.swap(c, piv);
        let d = s.inverse(&m[c][c])?;
        for j in 0..n {
            m[c][j] = s.mul(&d, &m[c][j]);
            inv[c][j] = s.mul(&d, &inv[c][j]);
        }
        for i in 0..n {
            if i == c {
                continue;
            }
            let f = m[i][c].clone();
            for j in 0..n {
                m[i][j] = s.sub(&m[i][j], &s.mul(&f, &m[c][j]));
                inv[i][j] = s.sub(&inv[i][j], &s.mul(&f, &inv[c][j]));
            }
        }
    }
    Ok(inv)
}

/// The dual window: dual basis, `L' = T^dual`, `T' = L^dual`, operator
/// `(phi^dual)^-1`.
pub fn dual_window(s: &TensorRing, w: &Window) -> Result<Window> {
    let phi = mat_inverse(s, &transpose(&w.phi))?;
    Ok(Window { is_l: w.is_l.iter().map(|b| !b).collect(), phi })
}

/// Base change along the unit twist `sigma-dot -> u sigma-dot`:
/// `(P, Q, F, F-dot) -> (P, Q, u F, F-dot)`.
pub fn twist_window(s: &TensorRing, w: &Window, u: &TensorElem) -> Window {
    let phi = w
        .phi
        .iter()
        .map(|row| row.iter().zip(&w.is_l).map(|(x, &l)| if l { x.clone() } else { s.mul(u, x) }).collect())
        .collect();
    Window { is_l: w.is_l.clone(), phi }
}

/// `F-dot` on `Q = L ⊕ J T`; coordinates of `q` on `T` must lie in `J`.
pub fn f_dot(frame: &LtFrame, w: &Window, q: &[TensorElem]) -> Result<Vec<TensorElem>> {
    let s = &frame.s;
    let mut coef = Vec::with_capacity(q.len());
    for (x, &l) in q.iter().zip(&w.is_l) {
        coef.push(if l { s.sigma(x) } else { frame.sigma_dot(x)? });
    }
    let len = coef.iter().chain(w.phi.iter().flatten()).map(|x| x.len()).min().unwrap_or(0);
    Ok((0..w.rank())
        .map(|i| (0..w.rank()).fold(s.zero(len), |acc, j| s.add(&acc, &s.mul(&w.phi[i][j], &coef[j]))))
        .collect())
}

pub fn pairing(s: &TensorRing, a: &[TensorElem], b: &[TensorElem]) -> TensorElem {
    let l = a.iter().chain(b).map(|x| x.len()).min().unwrap_or(0);
    a.iter().zip(b).fold(s.zero(l), |acc, (x, y)| s.add(&acc, &s.mul(x, y)))
}

/// A window with random entries and invertible operator.
pub fn random_window(s: &TensorRing, is_l: &[bool], seed: u64) -> Result<Window> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = is_l.len();
    for _ in 0..64 {
        let phi: TMat = (0..n).map(|_| (0..n).map(|_| s.random(&mut rng, s.len())).collect()).collect();
        if mat_inverse(s, &phi).is_ok() {
            return Ok(Window { is_l: is_l.to_vec(), phi });
        }
    }
    Err(Error::Singular)
}

/// A random element of `Q`: arbitrary on `L`, in `J` on `T`.
fn random_q(s: &TensorRing, is_l: &[bool], rng: &mut ChaCha8Rng, only: Option<usize>) -> Vec<TensorElem> {
    let l = s.len();
    is_l.iter()
        .enumerate()
        .map(|(i, &in_l)| {
            if only.is_some_and(|k| k != i) {
                s.zero(l)
            } else if in_l {
                s.random(rng, l)
            } else {
                s.random_in_j(rng, l)
            }
        })
        .collect()
}

/// `<F-dot q, F-dot^dual q'> = sigma-dot <q, q'>` on each pair of generator
/// types and on random elements, and `(P^dual)^dual = P`.
pub fn pairing_tally(frame: &LtFrame, w: &Window, seed: u64) -> Result<Tally> {
    let s = &frame.s;
    let d = dual_window(s, w)?;
    let mut t = Tally::default();
    t.check(dual_window(s, &d)? == *w, "double dual is the identity");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = w.rank();
    let mut picks: Vec<Option<usize>> = (0..n).map(Some).collect();
    picks.push(None);
    for a in &picks {
        for b in &picks {
            let q = random_q(s, &w.is_l, &mut rng, *a);
            let qd = random_q(s, &d.is_l, &mut rng, *b);
            let lhs = pairing(s, &f_dot(frame, w, &q)?, &f_dot(frame, &d, &qd)?);
            let rhs = frame.sigma_dot(&pairing(s, &q, &qd))?;
            t.check(lhs == rhs, "<F-dot q, F-dot q'> = sigma-dot <q, q'>");
        }
    }
    Ok(t)
}

/// Multiplication by `eps` maps the dual of the twisted window to the twist
/// of the dual, where `u = sigma(eps) / eps`.
pub fn epsilon_twist_tally(frame: &LtFrame, w: &Window, eps: &TensorElem, u: &TensorElem) -> Result<Tally> {
    let s = &frame.s;
    if !s.is_unit(eps) || !s.is_unit(u) {
        return Err(Error::Precondition("eps and u must be units".into()));
    }
    let se = s.sigma(eps);
    if se != s.mul(u, eps).truncate(se.len()) {
        return Err(Error::Precondition("sigma(eps) eps^-1 differs from u".into()));
    }
    let a = twist_window(s, &dual_window(s, w)?, u);
    let b = dual_window(s, &twist_window(s, w, u))?;
    let mut t = Tally::default();
    t.check(a.is_l == b.is_l, "normal decompositions agree");
    let n = w.rank();
    let mut ok = true;
    for i in 0..n {
        for j in 0..n {
            let lhs = s.mul(eps, &a.phi[i][j]).truncate(se.len());
            ok &= lhs == s.mul(&se, &b.phi[i][j]);
        }
    }
    t.check(ok, "eps phi_a = sigma(eps) phi_b");
    Ok(t)
}

/// `eps` and `u = sigma(eps) eps^-1` for a random unit `eps`.
pub fn random_twist(s: &TensorRing, seed: u64) -> Result<(TensorElem, TensorElem)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = s.len();
    for _ in 0..64 {
        let eps = s.random(&mut rng, l);
        if s.is_unit(&eps) {
            let u = s.mul(&s.sigma(&eps), &s.inverse(&eps)?);
            return Ok((eps.truncate(u.len()), u));
        }
    }
    Err(Error::NotUnit)
}

/// Window with `phi = diag(c_i)` for units `c_i`.
pub fn diagonal_window(s: &TensorRing, is_l: &[bool], diag: &[TensorElem]) -> Window {
    let n = is_l.len();
    let l = diag.iter().map(|x| x.len()).min().unwrap_or(0);
    let phi = (0..n).map(|i| (0..n).map(|j| if i == j { diag[i].clone() } else { s.zero(l) }).collect()).collect();
    Window { is_l: is_l.to_vec(), phi }
}
