//! Restriction of scalars from `A = A0 ⊗ Q_p^2` to `E = Q_p^2`.
//!
//! `O_A` is free over `O_E` on `gamma^k t^l`, where `gamma` is a
//! conjugation-fixed Teichmüller generator of the unramified part of `A0`
//! and `t` its uniformizer. An `A/A0`-hermitian form `J^A` descends to the
//! `E/Q_p`-hermitian form `J = tr_{A/E}(theta J^A)` with `theta` a generator
//! of the inverse different of `A0`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::local_rings::{make_ring, Elem, FieldSpec, Ring, RingData, RingElem};
use crate::matrix::{inverse, Mat, QMat};

use super::HermitianSpace;

pub struct ScalarRestriction {
    pub e_ring: Ring,
    pub a_ring: Ring,
    zp: Ring,
    /// Image in `O_A` of the generator of `Z_p^2`.
    rho: Elem,
    /// `O_E`-basis of `O_A`.
    pub basis: Vec<Elem>,
    /// `Z_p`-coordinates with respect to `rho^s * basis[k]`.
    to_zp: Mat,
    pub theta: RingElem,
    /// Dual basis for `(a, b) -> tr(theta a b)`.
    pub dual_basis: Vec<Elem>,
}

impl core::fmt::Debug for ScalarRestriction {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "ScalarRestriction({:?} over {:?})", self.a_ring, self.e_ring)
    }
}

/// Root of the integer polynomial `poly` in `r` congruent to `start` mod `pi`.
fn hensel_root(r: &RingData, poly: &[u64], start: &Elem) -> Option<Elem> {
    let eval = |z: &Elem| {
        let mut v = Elem::ZERO;
        let mut dv = Elem::ZERO;
        for &c in poly.iter().rev() {
            dv = r.add(&r.mul(&dv, z), &v);
            v = r.add(&r.mul(&v, z), &r.from_i64(c as i64));
        }
        (v, dv)
    };
    let mut z = *start;
    for _ in 0..128 {
        let (v, dv) = eval(&z);
        if v.is_zero() {
            return Some(z);
        }
        let inv = r.inv_unit(&dv).ok()?;
        z = r.sub(&z, &r.mul(&v, &inv));
    }
    None
}

impl ScalarRestriction {
    /// `a_spec` must be quadratic with odd inertia degree, so that `A` is a field.
    /// `m` is the `p`-adic precision shared by both rings.
    pub fn new(a_spec: &FieldSpec, m: u32) -> Result<ScalarRestriction> {
        if !a_spec.quadratic {
            return Err(Error::NotQuadratic);
        }
        if a_spec.f0.is_multiple_of(2) {
            return Err(Error::Precondition("A0 has even inertia degree, A is not a field".into()));
        }
        let p = a_spec.p;
        let e_ring = make_ring(&FieldSpec::unramified(p, 1, true), m)?;
        let a_ring = make_ring(a_spec, m * a_spec.e() as u32)?;
        let zp = make_ring(&FieldSpec::unramified(p, 1, false), m)?;
        if a_ring.m() != m {
            return Err(Error::InvalidSpec("precision mismatch".into()));
        }
        let f = a_spec.f0 as usize;
        let ea = a_spec.e();
        let qa = a_ring.residue_size();
        let g = a_ring.teichmuller(&a_ring.primitive_residue());
        // roots of the Z_p^2 modulus live among the (p^2 - 1)-th roots of unity
        let zeta = a_ring.pow(&g, (qa - 1) / (p * p - 1));
        let h2 = e_ring.galois_poly().to_vec();
        let mut rho = None;
        let mut w = a_ring.one();
        for _ in 0..(p * p - 1) {
            let mut v = Elem::ZERO;
            for &c in h2.iter().rev() {
                v = a_ring.add(&a_ring.mul(&v, &w), &a_ring.from_i64(c as i64));
            }
            if a_ring.val(&v).is_none_or(|x| x >= 1) {
                rho = hensel_root(&a_ring, &h2, &w);
                if rho.is_some() {
                    break;
                }
            }
            w = a_ring.mul(&w, &zeta);
        }
        let rho = rho.ok_or_else(|| Error::Precondition("no embedding of Z_p^2".into()))?;
        let gamma = a_ring.pow(&g, p.pow(f as u32) + 1);
        let t = if ea > 1 { a_ring.pi() } else { a_ring.one() };
        let mut basis = Vec::with_capacity(f * ea);
        let mut tl = a_ring.one();
        for _ in 0..ea {
            let mut gk = a_ring.one();
            for _ in 0..f {
                basis.push(a_ring.mul(&gk, &tl));
                gk = a_ring.mul(&gk, &gamma);
            }
            tl = a_ring.mul(&tl, &t);
        }
        let d = basis.len();
        let mut cols = Vec::with_capacity(2 * d);
        for b in &basis {
            for s in 0..2 {
                let v = if s == 0 { *b } else { a_ring.mul(b, &rho) };
                let col: Vec<Elem> = (0..2 * d).map(|i| zp.from_i64(v.c[i] as i64)).collect();
                cols.push(col);
            }
        }
        let bm = Mat::from_cols(2 * d, &cols);
        let inv = inverse(&zp, &bm)?;
        if inv.shift != 0 {
            return Err(Error::Verification("basis of O_A over Z_p is not unimodular".into()));
        }
        let theta = if ea > 1 {
            let eis = a_ring.eisenstein_poly();
            let mut dv = Elem::ZERO;
            for i in (1..eis.len()).rev() {
                let c = a_ring.scale_int(&a_ring.from_i64(eis[i] as i64), i as u64);
                dv = a_ring.add(&a_ring.mul(&dv, &t), &c);
            }
            RingElem::integral(&a_ring, dv).inv()?
        } else {
            RingElem::from_i64(&a_ring, 1)
        };
        let mut sr = ScalarRestriction {
            e_ring,
            a_ring,
            zp,
            rho,
            basis,
            to_zp: inv.m,
            theta,
            dual_basis: Vec::new(),
        };
        // trace form matrix, unimodular when theta generates the inverse different
        let mut tm = Mat::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let x = sr.a_ring.mul(&sr.basis[i], &sr.basis[j]);
                let v = sr.trace(&sr.theta.mul(&RingElem::integral(&sr.a_ring, x)))?;
                let vi = sr.e_integral(&v)?;
                tm.set(i, j, vi);
            }
        }
        let tinv = inverse(&sr.e_ring, &tm)?;
        if tinv.shift != 0 {
            return Err(Error::Verification("trace pairing is degenerate on O_A".into()));
        }
        let mut dual = Vec::with_capacity(d);
        for j in 0..d {
            let mut acc = Elem::ZERO;
            for i in 0..d {
                let c = sr.e_to_a(&tinv.m.get(i, j));
                acc = sr.a_ring.add(&acc, &sr.a_ring.mul(&c, &sr.basis[i]));
            }
            dual.push(acc);
        }
        sr.dual_basis = dual;
        Ok(sr)
    }

    /// Degree `[A : E]`.
    pub fn degree(&self) -> usize {
        self.basis.len()
    }

    /// Inertia degree of `A0 / Q_p`.
    pub fn inertia(&self) -> usize {
        self.a_ring.spec().f0 as usize
    }

    fn e_integral(&self, v: &RingElem) -> Result<Elem> {
        let w = v.clone().normalized();
        if w.denom > 0 {
            return Err(Error::Precondition("value is not integral".into()));
        }
        Ok(w.num)
    }

    /// The embedding `O_E -> O_A`.
    pub fn e_to_a(&self, c: &Elem) -> Elem {
        let a = &self.a_ring;
        let c0 = a.from_i64(c.c[0] as i64);
        let c1 = a.from_i64(c.c[1] as i64);
        a.add(&c0, &a.mul(&c1, &self.rho))
    }

    /// Image of the generator of `Z_p^2`.
    pub fn rho(&self) -> Elem {
        self.rho
    }

    /// `O_E`-coordinates of an integral element of `A`.
    pub fn a_to_e(&self, x: &Elem) -> Vec<Elem> {
        let d = self.degree();
        let v: Vec<Elem> = (0..2 * d).map(|i| self.zp.from_i64(x.c[i] as i64)).collect();
        let c = self.to_zp.mul_vec(&self.zp, &v);
        (0..d)
            .map(|k| {
                let mut y = Elem::ZERO;
                y.c[0] = c[2 * k].c[0];
                y.c[1] = c[2 * k + 1].c[0];
                y
            })
            .collect()
    }

    /// `tr_{A/E}`.
    pub fn trace(&self, x: &RingElem) -> Result<RingElem> {
        let ea = self.a_ring.e() as u32;
        let s = x.denom.div_ceil(ea);
        let p = self.a_ring.p();
        let scaled = x.mul(&RingElem::from_i64(&self.a_ring, p.pow(s) as i64)).normalized();
        if scaled.denom > 0 {
            return Err(Error::PrecisionExhausted("trace denominator".into()));
        }
        let mut acc = Elem::ZERO;
        for (m, b) in self.basis.iter().enumerate() {
            let y = self.a_ring.mul(&scaled.num, b);
            acc = self.e_ring.add(&acc, &self.a_to_e(&y)[m]);
        }
        Ok(RingElem::new(&self.e_ring, s, acc).normalized())
    }

    /// Integral vector over `A` to `E`-coordinates (index `r d + m`).
    pub fn vec_to_e(&self, v: &[Elem]) -> Vec<Elem> {
        v.iter().flat_map(|x| self.a_to_e(x)).collect()
    }

    /// `E`-matrix of an integral `A`-linear map.
    pub fn mat_to_e(&self, x: &Mat) -> Mat {
        let d = self.degree();
        let n1 = x.rows;
        let mut out = Mat::zeros(n1 * d, n1 * d);
        for rc in 0..n1 {
            for (mc, b) in self.basis.iter().enumerate() {
                for rr in 0..n1 {
                    let y = self.a_ring.mul(&x.get(rr, rc), b);
                    for (mr, c) in self.a_to_e(&y).into_iter().enumerate() {
                        out.set(rr * d + mr, rc * d + mc, c);
                    }
                }
            }
        }
        out
    }

    /// `E`-matrices of multiplication by the basis elements, acting on `A^n1`.
    pub fn basis_actions(&self, n1: usize) -> Vec<Mat> {
        self.basis
            .iter()
            .map(|b| self.mat_to_e(&Mat::identity(&self.a_ring, n1).scale(&self.a_ring, b)))
            .collect()
    }

    /// The `E/Q_p`-hermitian form `tr(theta J^A)`.
    pub fn descend_form(&self, space: &HermitianSpace) -> Result<HermitianSpace> {
        let a = &self.a_ring;
        let n1 = space.n();
        let d = self.degree();
        let mut entries: Vec<Vec<RingElem>> = Vec::with_capacity(n1 * d);
        for r in 0..n1 {
            for m in 0..d {
                let mut row = Vec::with_capacity(n1 * d);
                for r2 in 0..n1 {
                    let g = RingElem::new(a, space.gram.shift, space.gram.m.get(r, r2));
                    for m2 in 0..d {
                        let prod = a.mul(&a.conj(&self.basis[m]), &self.basis[m2]);
                        let v = self.theta.mul(&g).mul(&RingElem::integral(a, prod));
                        row.push(self.trace(&v)?);
                    }
                }
                entries.push(row);
            }
        }
        let gram = common_denominator(&self.e_ring, &entries);
        HermitianSpace::new(&self.e_ring, gram)
    }

    /// The `A/A0`-hermitian form `J^A` on `A^n1` with `tr(theta J^A) = J`.
    pub fn lift_form(&self, space: &HermitianSpace, n1: usize) -> Result<HermitianSpace> {
        let d = self.degree();
        if space.n() != n1 * d {
            return Err(Error::Shape("dimension is not a multiple of [A:E]".into()));
        }
        let a = &self.a_ring;
        let e = &self.e_ring;
        let ea = a.e() as u32;
        let mut entries: Vec<Vec<RingElem>> = Vec::with_capacity(n1);
        for r in 0..n1 {
            let mut row = Vec::with_capacity(n1);
            for r2 in 0..n1 {
                let mut acc = RingElem::from_i64(a, 0);
                for m in 0..d {
                    // J(sigma(alpha_m) e_r, e_r2); the basis is conjugation-fixed
                    let g = RingElem::new(e, space.gram.shift, space.gram.m.get(r * d + m, r2 * d))
                        .normalized();
                    let ga = RingElem::new(a, g.denom * ea, self.e_to_a(&g.num));
                    acc = acc.add(&ga.mul(&RingElem::integral(a, self.dual_basis[m])));
                }
                row.push(acc);
            }
            entries.push(row);
        }
        let gram = common_denominator(a, &entries);
        HermitianSpace::new(a, gram)
    }
}

/// Matrix with a common denominator from a grid of elements.
pub fn common_denominator(r: &Ring, entries: &[Vec<RingElem>]) -> QMat {
    let rows = entries.len();
    let cols = entries.first().map_or(0, |x| x.len());
    let s = entries.iter().flatten().map(|x| x.denom).max().unwrap_or(0);
    let mut m = Mat::zeros(rows, cols);
    for (i, row) in entries.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            m.set(i, j, r.mul_pi_pow(&x.num, s - x.denom));
        }
    }
    let prec = entries.iter().flatten().map(|x| x.abs_prec() + s as i64).min().unwrap_or(r.prec() as i64);
    QMat::new(s, m, prec.max(0) as u32).normalized(r)
}

/// Scalar `c` as a `1 x 1` form over `A`.
pub fn line_form(r: &Ring, c: &Elem) -> Result<HermitianSpace> {
    HermitianSpace::from_integral(r, Mat::diag(&[*c]))
}
