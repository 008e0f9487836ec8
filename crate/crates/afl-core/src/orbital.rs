//! Regular semisimple pairs `(x, j)`, the involution `tau`, the counting sets
//! `M(x,j)_i` and `I(x,j)`, orbital series, transfer factors and matching
//! invariants.
//!
//! Everything is computed in the cyclic basis `C = [j | xj | ... | x^(n-1) j]`
//! where `x` becomes a companion matrix and `L(x,j) = O^n` when the
//! characteristic polynomial is integral.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::exact::ExactMat;
use crate::hermitian::HermitianSpace;
use crate::lattices::{
    enumerate_submodules, index, quotient, FiniteQuotient, Lattice, Mode, Operator, Strategy,
    Submodule, DEFAULT_CAP,
};
use crate::local_rings::{make_ring, max_precision, Elem, FieldSpec, Ring, RingData, RingElem, Valuation};
use crate::matrix::{hnf, inverse_q, Mat, QMat, FULL};

/// Which stability predicate defines the counting sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stability {
    /// `x Λ ⊆ Λ` for a Lie algebra element.
    Lie,
    /// `g Λ = Λ` for a unitary group element.
    Group,
}

/// Horizontal concatenation of matrices with denominators.
pub fn hcat_q(r: &RingData, parts: &[QMat]) -> QMat {
    let s = parts.iter().map(|q| q.shift).max().unwrap_or(0);
    let rows = parts.first().map_or(0, |q| q.m.rows);
    let mut cols = Vec::new();
    let mut prec = FULL;
    for q in parts {
        let k = s - q.shift;
        cols.extend(q.m.mul_pi_pow(r, k).cols_vec());
        prec = prec.min(q.eff_prec(r).saturating_add(k));
    }
    QMat::new(s, Mat::from_cols(rows, &cols), prec).normalized(r)
}

/// Column `j` as an `n x 1` matrix.
pub fn col_q(m: &QMat, j: usize) -> QMat {
    QMat::new(m.shift, Mat::from_cols(m.m.rows, &[m.m.col(j)]), m.prec)
}

/// Entry `(i, j)` as a ring element.
pub fn entry(r: &Ring, m: &QMat, i: usize, j: usize) -> RingElem {
    RingElem::new(r, m.shift, m.m.get(i, j)).with_prec(m.prec).normalized()
}

fn unit_col(r: &RingData, n: usize, i: usize) -> QMat {
    let mut v = alloc::vec![Elem::ZERO; n];
    v[i] = r.one();
    QMat::integral(Mat::from_cols(n, &[v]))
}

/// Cyclic matrix `[u | g u | ... | g^(n-1) u]`.
pub fn cyclic_matrix(r: &RingData, g: &QMat, u: &QMat) -> QMat {
    let n = g.m.rows;
    let mut cols = Vec::with_capacity(n);
    let mut v = u.clone();
    for _ in 0..n {
        let next = g.mul(r, &v);
        cols.push(v);
        v = next;
    }
    hcat_q(r, &cols)
}

/// Cayley transform `(1 + y)(1 - y)^-1`; unitary when `y` is skew-adjoint.
pub fn cayley(r: &RingData, y: &QMat) -> Result<QMat> {
    let n = y.m.rows;
    let one = QMat::integral(Mat::identity(r, n));
    let den = inverse_q(r, &one.sub(r, y))?;
    Ok(one.add(r, y).mul(r, &den))
}

/// A regular semisimple, adjoint-stable pair together with its derived data.
#[derive(Clone, Debug)]
pub struct RSPair {
    pub space: HermitianSpace,
    pub x: QMat,
    pub j: QMat,
    pub stability: Stability,
    pub cyclic_basis: QMat,
    pub adjoint_x: QMat,
    /// Ambient matrix of `tau`: `tau(v) = tau * sigma(v)`.
    pub tau: QMat,
    /// `x` in the cyclic basis (a companion matrix).
    pub companion: QMat,
    /// `x*` in the cyclic basis.
    pub companion_adjoint: QMat,
    /// `tau` in the cyclic basis.
    pub tau_cyclic: QMat,
    /// The form in the cyclic basis.
    pub cyclic_space: HermitianSpace,
    /// `x* = sum c_i x^i`.
    pub adjoint_coeffs: Vec<RingElem>,
}

/// Builds a pair in Lie mode.
pub fn make_pair(space: &HermitianSpace, x: &QMat, j: &QMat) -> Result<RSPair> {
    RSPair::new(space, x, j, Stability::Lie)
}

impl RSPair {
    pub fn new(space: &HermitianSpace, x: &QMat, j: &QMat, stability: Stability) -> Result<RSPair> {
        let r = &space.ring;
        let n = space.n();
        if x.m.rows != n || x.m.cols != n || j.m.rows != n || j.m.cols != 1 {
            return Err(Error::Shape(alloc::format!("pair shapes do not match dimension {n}")));
        }
        let c = cyclic_matrix(r, x, j);
        let cinv = inverse_q(r, &c).map_err(|e| match e {
            Error::Singular => Error::NotRegularSemisimple,
            e => e,
        })?;
        let companion = cinv.mul(r, &x.mul(r, &c));
        let adjoint_x = space.adjoint(x)?;
        let companion_adjoint = cinv.mul(r, &adjoint_x.mul(r, &c));
        // x is regular, so x* is a polynomial in x iff the two commute; the
        // coefficients are then read off from x* j.
        let xy = companion.mul(r, &companion_adjoint);
        let yx = companion_adjoint.mul(r, &companion);
        if !xy.eq_at_precision(r, &yx) {
            return Err(Error::Precondition("x* is not a polynomial in x".into()));
        }
        let adjoint_coeffs: Vec<RingElem> = (0..n).map(|i| entry(r, &companion_adjoint, i, 0)).collect();
        if companion.is_integral(r) {
            for (i, ci) in adjoint_coeffs.iter().enumerate() {
                if let Valuation::Finite(v) = ci.valuation() {
                    if v < 0 {
                        return Err(Error::NotAdjointStable { index: i, valuation: v });
                    }
                }
            }
        }
        let mut tcols = Vec::with_capacity(n);
        let mut w = unit_col(r, n, 0);
        for _ in 0..n {
            let next = companion_adjoint.mul(r, &w);
            tcols.push(w);
            w = next;
        }
        let tau_cyclic = hcat_q(r, &tcols);
        let id = QMat::integral(Mat::identity(r, n));
        if !tau_cyclic.mul(r, &tau_cyclic.conj(r)).eq_at_precision(r, &id) {
            return Err(Error::Verification("tau is not an involution".into()));
        }
        let cyclic_space = HermitianSpace::new(r, space.gram_of(&c))?;
        let tau = c.mul(r, &tau_cyclic).mul(r, &cinv.conj(r));
        Ok(RSPair {
            space: space.clone(),
            x: x.clone(),
            j: j.clone(),
            stability,
            cyclic_basis: c,
            adjoint_x,
            tau,
            companion,
            companion_adjoint,
            tau_cyclic,
            cyclic_space,
            adjoint_coeffs,
        })
    }

    pub fn ring(&self) -> &Ring {
        &self.space.ring
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn has_integral_charpoly(&self) -> bool {
        self.companion.is_integral(self.ring())
    }

    /// Coefficients `a_0..a_(n-1), 1` of the monic characteristic polynomial.
    pub fn charpoly(&self) -> Vec<RingElem> {
        let r = self.ring();
        let n = self.n();
        let mut out: Vec<RingElem> = (0..n).map(|i| entry(r, &self.companion, i, n - 1).neg()).collect();
        out.push(RingElem::from_i64(r, 1));
        out
    }

    /// `J(j, j)`.
    pub fn norm_of_j(&self) -> RingElem {
        self.space.pairing(&self.j, &self.j)
    }

    /// `L(x, j)` in cyclic coordinates.
    pub fn span_lattice_cyclic(&self) -> Result<Lattice> {
        let r = self.ring();
        let mut l = Lattice::standard(r, self.n());
        for _ in 0..r.prec() {
            if l.is_stable(r, &self.companion, false) {
                return Ok(l);
            }
            let img = l.apply(r, &self.companion, false)?;
            l = l.sum(r, &img)?;
        }
        Err(Error::SaturationFailed)
    }

    /// `L(x, j)` in ambient coordinates.
    pub fn span_lattice(&self) -> Result<Lattice> {
        let r = self.ring();
        let b = self.span_lattice_cyclic()?.basis(r);
        Lattice::from_basis(r, &self.cyclic_basis.mul(r, &b))
    }

    /// Quotient data `L∨/L`, or `None` when `L ⊄ L∨`.
    pub fn counting_data(&self) -> Result<Option<CountingData>> {
        let r = self.ring();
        let lower = self.span_lattice_cyclic()?;
        let upper = self.cyclic_space.dual_lattice(&lower)?;
        if !upper.contains(r, &lower) {
            return Ok(None);
        }
        let q = quotient(r, &lower, &upper)?;
        let emax = q.exps.iter().copied().max().unwrap_or(0) as i64;
        let u = &q.basis;
        let uinv = inverse_q(r, u)?;
        let x_u = uinv.mul(r, &self.companion.mul(r, u));
        let t_u = uinv.mul(r, &self.tau_cyclic.mul(r, &u.conj(r)));
        let gram = self.cyclic_space.gram_of(u);
        for m in [&x_u, &t_u] {
            if m.abs_prec(r) <= emax {
                return Err(Error::PrecisionExhausted("operators on L∨/L".into()));
            }
        }
        let x_op = x_u
            .to_integral(r)
            .ok_or_else(|| Error::Verification("L∨ is not x-stable".into()))?;
        let tau_op = t_u
            .to_integral(r)
            .ok_or_else(|| Error::Verification("L∨ is not tau-stable".into()))?;
        let ambient = self.cyclic_basis.mul(r, u);
        Ok(Some(CountingData { lower, upper, quotient: q, x_op, tau_op, gram, ambient }))
    }

    /// Dual lattice index `[L∨ : L]`.
    pub fn dual_length(&self) -> Result<i64> {
        let lower = self.span_lattice_cyclic()?;
        self.cyclic_space.dual_index(&lower)
    }
}

/// `L∨/L` with the operators induced by `x` and `tau`, in the adapted basis
/// `U` of `L∨` (cyclic coordinates).
#[derive(Clone, Debug)]
pub struct CountingData {
    pub lower: Lattice,
    pub upper: Lattice,
    pub quotient: FiniteQuotient,
    pub x_op: Mat,
    pub tau_op: Mat,
    /// The form in the basis `U`.
    pub gram: QMat,
    /// `C U`: maps quotient coordinates to ambient vectors.
    pub ambient: QMat,
}

impl CountingData {
    /// Dual of the lattice `U H O^n`, as a submodule.
    pub fn dual(&self, r: &Ring, s: &Submodule) -> Result<Submodule> {
        let h = QMat::integral(s.hnf.h.clone());
        let d = inverse_q(r, &h.dagger(r).mul(r, &self.gram))?;
        let emax = self.quotient.exps.iter().copied().max().unwrap_or(0) as i64;
        if d.abs_prec(r) <= emax {
            return Err(Error::PrecisionExhausted("dual of intermediate lattice".into()));
        }
        let m = d.to_integral(r).ok_or(Error::NotIncluded)?;
        let n = self.quotient.n();
        let mut gens = m;
        for (i, &e) in self.quotient.exps.iter().enumerate() {
            let mut col = alloc::vec![Elem::ZERO; n];
            col[i] = r.pi_pow(e);
            gens = gens.hcat(&Mat::from_cols(n, &[col]));
        }
        Ok(self.quotient.submodule(hnf(r, &gens)))
    }

    pub fn is_self_dual(&self, r: &Ring, s: &Submodule) -> Result<bool> {
        Ok(self.dual(r, s)? == *s)
    }

    /// Ambient lattice `C U H O^n`.
    pub fn ambient_lattice(&self, r: &Ring, s: &Submodule) -> Result<Lattice> {
        Lattice::from_basis(r, &self.ambient.mul(r, &QMat::integral(s.hnf.h.clone())))
    }
}

/// Enumeration knobs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    pub cap: u128,
    pub strategy: Strategy,
    /// Starting precision for checks; `None` uses the working precision.
    pub precision: Option<u32>,
}

impl Default for Options {
    fn default() -> Self {
        Options { cap: DEFAULT_CAP, strategy: Strategy::Socle, precision: None }
    }
}

/// `M(x, j)`: all `x`- and `tau`-stable `L ⊆ Λ ⊆ L∨`, sorted.
pub fn m_set(pair: &RSPair, opts: &Options) -> Result<Vec<Submodule>> {
    match pair.counting_data()? {
        Some(d) => m_set_with(pair.ring(), &d, opts),
        None => Ok(Vec::new()),
    }
}

/// `M(x, j)` from precomputed quotient data.
pub fn m_set_with(r: &Ring, d: &CountingData, opts: &Options) -> Result<Vec<Submodule>> {
    let ops = [Operator::linear(d.x_op.clone()), Operator::semilinear(d.tau_op.clone())];
    enumerate_submodules(r, &d.quotient, &ops, Mode::StableOnly, opts.strategy, opts.cap)
}

/// The self-dual `x`-stable lattices counted by `I(x, j)`.
pub fn i_set(pair: &RSPair, opts: &Options) -> Result<Vec<Submodule>> {
    match pair.counting_data()? {
        Some(d) => i_set_with(pair.ring(), &d, opts),
        None => Ok(Vec::new()),
    }
}

/// `I(x, j)` lattices from precomputed quotient data.
pub fn i_set_with(r: &Ring, d: &CountingData, opts: &Options) -> Result<Vec<Submodule>> {
    if d.quotient.length() % 2 == 1 {
        return Ok(Vec::new());
    }
    let half = d.quotient.length() / 2;
    let ops = [Operator::linear(d.x_op.clone())];
    let all = enumerate_submodules(r, &d.quotient, &ops, Mode::StableOnly, opts.strategy, opts.cap)?;
    let mut out = Vec::new();
    for s in all {
        if s.length == half && d.is_self_dual(r, &s)? {
            out.push(s);
        }
    }
    Ok(out)
}

/// Buckets submodules by length.
pub fn bucket(subs: &[Submodule]) -> BTreeMap<u32, u64> {
    let mut out = BTreeMap::new();
    for s in subs {
        *out.entry(s.length).or_insert(0) += 1;
    }
    out
}

/// `i -> |M(x,j)_i|`; empty when `L ⊄ L∨`.
pub fn counting_sets(pair: &RSPair, opts: &Options) -> Result<BTreeMap<u32, u64>> {
    Ok(bucket(&m_set(pair, opts)?))
}

pub fn orbital_series(pair: &RSPair, opts: &Options) -> Result<LaurentSeries> {
    Ok(LaurentSeries::from_counts(&counting_sets(pair, opts)?))
}

pub fn derived_orbital(pair: &RSPair, opts: &Options) -> Result<i64> {
    Ok(orbital_series(pair, opts)?.derived())
}

/// `I(x, j)`.
pub fn unitary_count(pair: &RSPair, opts: &Options) -> Result<u64> {
    Ok(i_set(pair, opts)?.len() as u64)
}

/// `O(x, j; s)` shifted by `u^l`.
pub fn series_with_transfer(pair: &RSPair, l: i64, opts: &Options) -> Result<LaurentSeries> {
    Ok(orbital_series(pair, opts)?.shift(l))
}

/// All orbital quantities of one pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitalResult {
    pub counts: BTreeMap<u32, u64>,
    pub series: LaurentSeries,
    pub derived: i64,
    pub unitary: u64,
    pub dual_length: i64,
}

pub fn orbital_result(pair: &RSPair, opts: &Options) -> Result<OrbitalResult> {
    let counts = counting_sets(pair, opts)?;
    let series = LaurentSeries::from_counts(&counts);
    let derived = series.derived();
    let unitary = unitary_count(pair, opts)?;
    let dual_length = pair.dual_length()?;
    Ok(OrbitalResult { counts, series, derived, unitary, dual_length })
}

/// A finitely supported integer Laurent polynomial in `u = q^-s`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentSeries {
    coeffs: BTreeMap<i64, i64>,
}

impl LaurentSeries {
    pub fn zero() -> Self {
        LaurentSeries::default()
    }

    pub fn one() -> Self {
        LaurentSeries::monomial(0, 1)
    }

    pub fn monomial(exp: i64, coeff: i64) -> Self {
        let mut s = LaurentSeries::zero();
        s.add_term(exp, coeff);
        s
    }

    pub fn from_terms(terms: &[(i64, i64)]) -> Self {
        let mut s = LaurentSeries::zero();
        for &(e, c) in terms {
            s.add_term(e, c);
        }
        s
    }

    /// `sum (-1)^i m_i u^i`.
    pub fn from_counts(counts: &BTreeMap<u32, u64>) -> Self {
        let mut s = LaurentSeries::zero();
        for (&i, &m) in counts {
            let sign = if i % 2 == 0 { 1 } else { -1 };
            s.add_term(i as i64, sign * m as i64);
        }
        s
    }

    fn add_term(&mut self, exp: i64, coeff: i64) {
        let c = self.coeffs.entry(exp).or_insert(0);
        *c += coeff;
        if *c == 0 {
            self.coeffs.remove(&exp);
        }
    }

    pub fn coeff(&self, exp: i64) -> i64 {
        self.coeffs.get(&exp).copied().unwrap_or(0)
    }

    /// Nonzero `(exponent, coefficient)` pairs in increasing order.
    pub fn terms(&self) -> Vec<(i64, i64)> {
        self.coeffs.iter().map(|(&e, &c)| (e, c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut s = self.clone();
        for (&e, &c) in &o.coeffs {
            s.add_term(e, c);
        }
        s
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut s = LaurentSeries::zero();
        for (&e1, &c1) in &self.coeffs {
            for (&e2, &c2) in &o.coeffs {
                s.add_term(e1 + e2, c1 * c2);
            }
        }
        s
    }

    /// Multiplication by `u^l`.
    pub fn shift(&self, l: i64) -> Self {
        LaurentSeries { coeffs: self.coeffs.iter().map(|(&e, &c)| (e + l, c)).collect() }
    }

    /// Value at `u = 1` (`s = 0`).
    pub fn eval_at_one(&self) -> i64 {
        self.coeffs.values().sum()
    }

    /// `d/du` at `u = 1`.
    pub fn derivative_at_one(&self) -> i64 {
        self.coeffs.iter().map(|(&e, &c)| e * c).sum()
    }

    /// `-d/d(s log q)` at `s = 0`, i.e. `-sum i c_i`.
    pub fn derived(&self) -> i64 {
        -self.derivative_at_one()
    }
}

/// `(l, Ω)` with `l = vdet(span{γ^i u}) - vdet(Λ_ref)`, so `l = len(Λ_ref/span)`
/// when the span lies inside `Λ_ref`, and `Ω = (-1)^l`.
pub fn transfer_factor(r: &Ring, gamma: &QMat, u: &QMat, lref: &Lattice) -> Result<(i64, i8)> {
    let c = cyclic_matrix(r, gamma, u);
    let span = Lattice::from_basis(r, &c).map_err(|e| match e {
        Error::Singular => Error::NotRegularSemisimple,
        e => e,
    })?;
    let l = index(lref, &span);
    Ok((l, if l.rem_euclid(2) == 0 { 1 } else { -1 }))
}

/// Characteristic polynomial and the moments `u∨ γ^i u`, `i < 2n`.
#[derive(Clone, Debug)]
pub struct MatchInvariants {
    /// `a_0, ..., a_(n-1), 1`.
    pub charpoly: Vec<RingElem>,
    pub moments: Vec<RingElem>,
}

pub fn match_invariants(r: &Ring, gamma: &QMat, u: &QMat, udual: &QMat) -> Result<MatchInvariants> {
    let n = gamma.m.rows;
    if gamma.m.cols != n || u.m.rows != n || u.m.cols != 1 || udual.m.rows != 1 || udual.m.cols != n {
        return Err(Error::Shape("match_invariants shapes".into()));
    }
    let c = cyclic_matrix(r, gamma, u);
    let cinv = inverse_q(r, &c).map_err(|e| match e {
        Error::Singular => Error::NotRegularSemisimple,
        e => e,
    })?;
    // generation of the dual space by u∨ γ^i
    let mut rows = Vec::with_capacity(n);
    let mut w = udual.clone();
    for _ in 0..n {
        rows.push(w.transpose());
        w = w.mul(r, gamma);
    }
    inverse_q(r, &hcat_q(r, &rows)).map_err(|e| match e {
        Error::Singular => Error::NotRegularSemisimple,
        e => e,
    })?;
    let mut gn_u = u.clone();
    for _ in 0..n {
        gn_u = gamma.mul(r, &gn_u);
    }
    let a = cinv.mul(r, &gn_u);
    let mut charpoly: Vec<RingElem> = (0..n).map(|i| entry(r, &a, i, 0).neg()).collect();
    charpoly.push(RingElem::from_i64(r, 1));
    let mut moments = Vec::with_capacity(2 * n);
    let mut v = u.clone();
    for _ in 0..2 * n {
        moments.push(entry(r, &udual.mul(r, &v), 0, 0));
        v = gamma.mul(r, &v);
    }
    Ok(MatchInvariants { charpoly, moments })
}

pub fn is_match(a: &MatchInvariants, b: &MatchInvariants) -> bool {
    a.charpoly.len() == b.charpoly.len()
        && a.moments.len() == b.moments.len()
        && a.charpoly.iter().zip(&b.charpoly).all(|(x, y)| x.eq_at_precision(y))
        && a.moments.iter().zip(&b.moments).all(|(x, y)| x.eq_at_precision(y))
}

/// Precision-independent description of a pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PairData {
    pub spec: FieldSpec,
    pub gram: ExactMat,
    pub x: ExactMat,
    pub j: ExactMat,
    pub stability: Stability,
    /// Realize `x` as the Cayley transform of the given matrix.
    pub cayley: bool,
    /// `y` skew-adjoint: replace `(x, j)` by `(h x h^-1, h j)` with `h = cayley(y)`.
    pub conjugator: Option<ExactMat>,
}

impl PairData {
    pub fn lie(spec: FieldSpec, gram: ExactMat, x: ExactMat, j: ExactMat) -> PairData {
        PairData { spec, gram, x, j, stability: Stability::Lie, cayley: false, conjugator: None }
    }

    pub fn n(&self) -> usize {
        self.gram.rows
    }

    pub fn space(&self, r: &Ring) -> Result<HermitianSpace> {
        HermitianSpace::new(r, self.gram.realize(r)?)
    }

    /// Realized `(space, x, j)` at precision `prec`.
    pub fn components(&self, prec: u32) -> Result<(HermitianSpace, QMat, QMat)> {
        let r = make_ring(&self.spec, prec)?;
        let space = self.space(&r)?;
        let mut x = self.x.realize(&r)?;
        if self.cayley {
            x = cayley(&r, &x)?;
        }
        let mut j = self.j.realize(&r)?;
        if let Some(y) = &self.conjugator {
            let h = cayley(&r, &y.realize(&r)?)?;
            let hinv = inverse_q(&r, &h)?;
            x = h.mul(&r, &x).mul(&r, &hinv);
            j = h.mul(&r, &j);
        }
        Ok((space, x, j))
    }

    pub fn realize(&self, prec: u32) -> Result<RSPair> {
        let (space, x, j) = self.components(prec)?;
        RSPair::new(&space, &x, &j, self.stability)
    }

    /// Highest precision worth realizing at (leaves room for the `+4` re-run).
    pub fn ceiling(&self) -> u32 {
        max_precision(&self.spec).saturating_sub(4)
    }

    /// `N = 2 max(e_i) + 8` for the elementary divisors of `L∨/L`.
    pub fn working_precision(&self) -> Result<u32> {
        let pair = self.realize(self.ceiling())?;
        let emax = match pair.counting_data()? {
            Some(d) => d.quotient.exps.iter().copied().max().unwrap_or(0),
            None => 0,
        };
        Ok((2 * emax + 8).min(self.ceiling()))
    }

    /// Runs `f` at the working precision, raising it when digits run out.
    pub fn run<T>(&self, start: u32, f: impl Fn(&RSPair) -> Result<T>) -> Result<(u32, T)> {
        let mut prec = start;
        loop {
            let out = self.realize(prec).and_then(|p| f(&p));
            match out {
                Err(Error::PrecisionExhausted(_)) if prec + 4 <= max_precision(&self.spec) => prec += 4,
                Err(e) => return Err(e),
                Ok(v) => return Ok((prec, v)),
            }
        }
    }
}
