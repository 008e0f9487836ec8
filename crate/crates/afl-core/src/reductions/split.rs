//! Splitting a pair along `*`-stable idempotents of `O_E[x]` and the product
//! formula for orbital series.

use alloc::vec::Vec;
use core::ops::Range;

use crate::error::{Error, Result};
use crate::hermitian::{image_basis, HermitianSpace, Parity};
use crate::local_rings::{Elem, RingData};
use crate::matrix::{inverse, Mat, QMat};
use crate::orbital::{orbital_series, LaurentSeries, Options, PairData, RSPair};
use crate::residue_poly as rp;

use super::{rerun_pair, CheckReport, Value};

/// One factor `(x_k, j_k)` on `V_k = e_k V`.
#[derive(Clone, Debug)]
pub struct FactorPair {
    pub pair: RSPair,
    pub parity: Parity,
}

/// `a b mod p` for a monic `p` of degree `n`; inputs have length `n`.
fn mulmod(r: &RingData, a: &[Elem], b: &[Elem], p: &[Elem]) -> Vec<Elem> {
    let n = p.len() - 1;
    let mut t = alloc::vec![Elem::ZERO; 2 * n];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            t[i + j] = r.add(&t[i + j], &r.mul(x, y));
        }
    }
    for k in (n..2 * n).rev() {
        let c = t[k];
        if c.is_zero() {
            continue;
        }
        for i in 0..n {
            t[k - n + i] = r.sub(&t[k - n + i], &r.mul(&c, &p[i]));
        }
        t[k] = Elem::ZERO;
    }
    t.truncate(n);
    t
}

/// Lifts a residue idempotent of `F_Q[t]/P` to `O[t]/P` by `e <- 3e^2 - 2e^3`.
fn lift_idempotent(r: &RingData, eps: &[Elem], p: &[Elem]) -> Result<Vec<Elem>> {
    let n = p.len() - 1;
    let mut e: Vec<Elem> = (0..n).map(|i| eps.get(i).copied().unwrap_or(Elem::ZERO)).collect();
    for _ in 0..64 {
        let e2 = mulmod(r, &e, &e, p);
        if e2 == e {
            return Ok(e);
        }
        let e3 = mulmod(r, &e2, &e, p);
        e = (0..n).map(|i| r.sub(&r.scale_int(&e2[i], 3), &r.scale_int(&e3[i], 2))).collect();
    }
    Err(Error::Verification("idempotent lifting did not converge".into()))
}

fn eval_poly(r: &RingData, coeffs: &[Elem], x: &Mat) -> Mat {
    let n = x.rows;
    let mut acc = Mat::zeros(n, n);
    let mut pw = Mat::identity(r, n);
    for c in coeffs {
        acc = acc.add(r, &pw.scale(r, c));
        pw = pw.mul(r, x);
    }
    acc
}

/// Sub-block of a matrix with denominator.
pub fn sub_q(m: &QMat, rows: Range<usize>, cols: Range<usize>) -> QMat {
    let mut out = Mat::zeros(rows.len(), cols.len());
    for (i, ri) in rows.clone().enumerate() {
        for (j, cj) in cols.clone().enumerate() {
            out.set(i, j, m.m.get(ri, cj));
        }
    }
    QMat::new(m.shift, out, m.prec)
}

/// Splits `(x, j)` along the `*`-stable primary decomposition of `O_E[x]`.
pub fn split_idempotents(pair: &RSPair) -> Result<Vec<FactorPair>> {
    let r = pair.ring();
    let n = pair.n();
    let x = pair
        .companion
        .to_integral(r)
        .ok_or_else(|| Error::Precondition("characteristic polynomial is not integral".into()))?;
    let xs = pair
        .companion_adjoint
        .to_integral(r)
        .ok_or_else(|| Error::Precondition("x* is not integral over x".into()))?;
    let cp: Vec<Elem> = pair
        .charpoly()
        .iter()
        .map(|c| {
            let c = c.clone().normalized();
            if c.denom > 0 {
                Err(Error::Precondition("characteristic polynomial is not integral".into()))
            } else {
                Ok(c.num)
            }
        })
        .collect::<Result<_>>()?;
    let pbar = rp::reduce(r, &cp);
    let factors = rp::factor(r, &pbar)?;
    if factors.len() < 2 {
        return Err(Error::NoSplitting);
    }
    let mut idem = Vec::with_capacity(factors.len());
    for (phi, m) in &factors {
        let mut big = alloc::vec![r.one()];
        for _ in 0..*m {
            big = rp::mul(r, &big, phi);
        }
        let rest = rp::divrem(r, &pbar, &big)?.0;
        let (_, _, t) = rp::xgcd(r, &big, &rest)?;
        let eps = rp::rem(r, &rp::mul(r, &t, &rest), &pbar)?;
        let e = lift_idempotent(r, &eps, &cp)?;
        idem.push(e);
    }
    let mats: Vec<Mat> = idem.iter().map(|e| eval_poly(r, e, &x)).collect();
    let stars: Vec<Mat> = idem
        .iter()
        .map(|e| {
            let c: Vec<Elem> = e.iter().map(|a| r.conj(a)).collect();
            eval_poly(r, &c, &xs)
        })
        .collect();
    // the involution permutes the primary idempotents; merge its orbits
    let k = mats.len();
    let mut group: Vec<usize> = (0..k).collect();
    for (a, s) in stars.iter().enumerate() {
        let sr = s.reduce(r, 1);
        let b = (0..k)
            .find(|&b| mats[b].reduce(r, 1) == sr)
            .ok_or(Error::NotStarStable)?;
        let (ga, gb) = (group[a], group[b]);
        let g = ga.min(gb);
        for x in group.iter_mut() {
            if *x == ga || *x == gb {
                *x = g;
            }
        }
    }
    let mut reps: Vec<usize> = group.clone();
    reps.sort_unstable();
    reps.dedup();
    if reps.len() < 2 {
        return Err(Error::NotStarStable);
    }
    let mut blocks = Vec::with_capacity(reps.len());
    let mut cols = Vec::new();
    for &g in &reps {
        let mut f = Mat::zeros(n, n);
        for (a, m) in mats.iter().enumerate() {
            if group[a] == g {
                f = f.add(r, m);
            }
        }
        let b = image_basis(r, &QMat::integral(f))?;
        blocks.push(b.cols);
        cols.extend(b.cols_vec());
    }
    let bmat = Mat::from_cols(n, &cols);
    let binv = inverse(r, &bmat)?
        .to_integral(r)
        .ok_or_else(|| Error::Verification("factor bases are not unimodular".into()))?;
    let bq = QMat::integral(bmat.clone());
    let binv_q = QMat::integral(binv.clone());
    let xb = binv_q.mul(r, &pair.companion.mul(r, &bq));
    let gram = pair.cyclic_space.gram_of(&bq);
    let mut e0 = alloc::vec![Elem::ZERO; n];
    e0[0] = r.one();
    let jb = QMat::integral(Mat::from_cols(n, &[binv.mul_vec(r, &e0)]));
    let mut out = Vec::with_capacity(blocks.len());
    let mut start = 0;
    for &d in &blocks {
        let range = start..start + d;
        for i in range.clone() {
            for jj in (0..n).filter(|jj| !range.contains(jj)) {
                if !r.reduce(&xb.m.get(i, jj), xb.eff_prec(r)).is_zero() {
                    return Err(Error::Verification("x is not block diagonal".into()));
                }
            }
        }
        let space = HermitianSpace::new(r, sub_q(&gram, range.clone(), range.clone()))?;
        let xk = sub_q(&xb, range.clone(), range.clone());
        let jk = sub_q(&jb, range.clone(), 0..1);
        let fp = RSPair::new(&space, &xk, &jk, pair.stability)?;
        let parity = space.parity();
        out.push(FactorPair { pair: fp, parity });
        start += d;
    }
    Ok(out)
}

/// Series of a pair and of its factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductValues {
    pub full: LaurentSeries,
    pub factors: Vec<(LaurentSeries, Parity)>,
}

pub fn product_values(pair: &RSPair, opts: &Options) -> Result<ProductValues> {
    let full = orbital_series(pair, opts)?;
    let mut factors = Vec::new();
    for f in split_idempotents(pair)? {
        factors.push((orbital_series(&f.pair, opts)?, f.parity));
    }
    Ok(ProductValues { full, factors })
}

/// `O(x,j;s) = prod_k O(x_k,j_k;s)`, with `∂O = O(even part) ∂O(odd part)`
/// for a single odd factor and `∂O = 0` for several.
pub fn check_product(data: &PairData, opts: &Options) -> Result<CheckReport> {
    let (v, run) = rerun_pair(data, opts, |p| product_values(p, opts))?;
    let mut prod = LaurentSeries::one();
    for (s, _) in &v.factors {
        prod = prod.mul(s);
    }
    let odd: Vec<&LaurentSeries> = v.factors.iter().filter(|f| f.1.is_odd()).map(|f| &f.0).collect();
    let derived_ok = match odd.len() {
        0 => true,
        1 => {
            let even: i64 = v.factors.iter().filter(|f| !f.1.is_odd()).map(|f| f.0.eval_at_one()).product();
            v.full.derived() == even * odd[0].derived()
        }
        _ => v.full.derived() == 0,
    };
    Ok(CheckReport::new(
        "product",
        Value::Series(v.full.clone()),
        Value::Series(prod),
        &run,
        &[(derived_ok, "derivative formula fails")],
    ))
}
