//! Hermitian spaces over `E/E0`.
//!
//! Convention: `J(v, w) = sigma(v)^T G w`, conjugate-linear in the first
//! argument. The adjoint is therefore `x* = G^-1 sigma(x)^T G`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lattices::{index, Lattice};
use crate::local_rings::{Ring, RingElem};
use crate::matrix::{hnf, inverse_q, Mat, QMat};

pub mod restriction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(index: i64) -> Parity {
        if index.rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }
}

#[derive(Clone, Debug)]
pub struct HermitianSpace {
    pub ring: Ring,
    pub gram: QMat,
    pub label: String,
}

impl HermitianSpace {
    pub fn new(ring: &Ring, gram: QMat) -> Result<HermitianSpace> {
        if !ring.is_quadratic() {
            return Err(Error::NotQuadratic);
        }
        if !gram.m.is_square() {
            return Err(Error::Shape(alloc::format!(
                "gram is {}x{}",
                gram.m.rows,
                gram.m.cols
            )));
        }
        if !gram.dagger(ring).eq_at_precision(ring, &gram) {
            return Err(Error::NotHermitian);
        }
        inverse_q(ring, &gram)?;
        Ok(HermitianSpace { ring: ring.clone(), gram: gram.normalized(ring), label: String::new() })
    }

    pub fn from_integral(ring: &Ring, gram: Mat) -> Result<HermitianSpace> {
        HermitianSpace::new(ring, QMat::integral(gram))
    }

    /// Diagonal form `diag(pi^v_i)`.
    pub fn diagonal(ring: &Ring, vals: &[u32]) -> Result<HermitianSpace> {
        let d: Vec<_> = vals.iter().map(|&v| ring.pi_pow(v)).collect();
        HermitianSpace::from_integral(ring, Mat::diag(&d))
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = label.into();
        self
    }

    pub fn n(&self) -> usize {
        self.gram.m.rows
    }

    /// `J(v, w)` for column vectors.
    pub fn pairing(&self, v: &QMat, w: &QMat) -> RingElem {
        let r = &self.ring;
        let p = v.dagger(r).mul(r, &self.gram).mul(r, w);
        RingElem::new(r, p.shift, p.m.get(0, 0)).normalized()
    }

    /// Matrix of `J` on the columns of `b`: `sigma(b)^T G b`.
    pub fn gram_of(&self, b: &QMat) -> QMat {
        let r = &self.ring;
        b.dagger(r).mul(r, &self.gram).mul(r, b)
    }

    pub fn adjoint(&self, x: &QMat) -> Result<QMat> {
        let r = &self.ring;
        if x.m.rows != self.n() || x.m.cols != self.n() {
            return Err(Error::Shape("adjoint needs an n x n matrix".into()));
        }
        let gi = inverse_q(r, &self.gram)?;
        Ok(gi.mul(r, &x.dagger(r)).mul(r, &self.gram))
    }

    /// `{v : J(v, lattice) ⊆ O}`.
    pub fn dual_lattice(&self, lat: &Lattice) -> Result<Lattice> {
        let r = &self.ring;
        let b = lat.basis(r);
        // J(b_i, d_j) = delta_ij for D = (sigma(B)^T G)^-1
        let pairing = b.dagger(r).mul(r, &self.gram);
        let d = inverse_q(r, &pairing)?;
        Lattice::from_basis(r, &d)
    }

    /// `len(dual / lattice)` as a relative index.
    pub fn dual_index(&self, lat: &Lattice) -> Result<i64> {
        Ok(index(&self.dual_lattice(lat)?, lat))
    }

    pub fn parity(&self) -> Parity {
        let std = Lattice::standard(&self.ring, self.n());
        Parity::of(self.dual_index(&std).expect("gram is invertible"))
    }

    /// Form restricted to the span of the columns of `b`.
    pub fn restrict(&self, b: &QMat) -> Result<HermitianSpace> {
        HermitianSpace::new(&self.ring, self.gram_of(b))
    }

    pub fn orthogonal_sum(&self, o: &HermitianSpace) -> Result<HermitianSpace> {
        let r = &self.ring;
        let s = self.gram.shift.max(o.gram.shift);
        let a = self.gram.m.mul_pi_pow(r, s - self.gram.shift);
        let b = o.gram.m.mul_pi_pow(r, s - o.gram.shift);
        let prec = self.gram.abs_prec(r).min(o.gram.abs_prec(r)) + s as i64;
        HermitianSpace::new(r, QMat::new(s, a.block_diag(&b), prec.max(0) as u32))
    }

    /// Orthogonal factors cut out by self-adjoint idempotents.
    pub fn classify_factors(&self, idempotents: &[QMat]) -> Result<Vec<Factor>> {
        let r = &self.ring;
        let n = self.n();
        let mut total = QMat::integral(Mat::zeros(n, n));
        for (a, e) in idempotents.iter().enumerate() {
            if !e.mul(r, e).eq_at_precision(r, e) {
                return Err(Error::Precondition("element is not idempotent".into()));
            }
            if !self.adjoint(e)?.eq_at_precision(r, e) {
                return Err(Error::Precondition("idempotent is not self-adjoint".into()));
            }
            for (b, f) in idempotents.iter().enumerate() {
                if a != b && !e.mul(r, f).m.is_zero() {
                    return Err(Error::Precondition("idempotents are not orthogonal".into()));
                }
            }
            total = total.add(r, e);
        }
        if !total.eq_at_precision(r, &QMat::integral(Mat::identity(r, n))) {
            return Err(Error::Precondition("idempotents do not sum to the identity".into()));
        }
        let mut out = Vec::new();
        for e in idempotents {
            let basis = image_basis(r, e)?;
            let space = self.restrict(&QMat::integral(basis.clone()))?;
            let parity = space.parity();
            out.push(Factor { space, basis, parity });
        }
        Ok(out)
    }
}

/// An orthogonal factor: the space, its basis in ambient coordinates, its parity.
#[derive(Clone, Debug)]
pub struct Factor {
    pub space: HermitianSpace,
    pub basis: Mat,
    pub parity: Parity,
}

/// Basis of the image of an integral idempotent, a direct summand of `O^n`.
pub fn image_basis(r: &Ring, e: &QMat) -> Result<Mat> {
    let m = e
        .to_integral(r)
        .ok_or_else(|| Error::Precondition("idempotent is not integral".into()))?;
    let h = hnf(r, &m);
    let mut cols = Vec::new();
    for (j, &k) in h.k.iter().enumerate() {
        if k == 0 {
            cols.push(h.h.col(j));
        } else if k < r.prec() {
            return Err(Error::Precondition("image of idempotent is not saturated".into()));
        }
    }
    Ok(Mat::from_cols(m.rows, &cols))
}
