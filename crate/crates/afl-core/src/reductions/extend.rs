//! Extending a pair by one dimension: the block element `x' = (x j; -j* 0)`
//! of the Lie algebra, and `g' = diag(g, a)` with `u' = ũ + j` for the group.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::exact::ExactEntry;
use crate::hermitian::HermitianSpace;
use crate::lattices::Lattice;
use crate::local_rings::{Elem, RingData, RingElem, Valuation};
use crate::matrix::{Mat, QMat, FULL};
use crate::orbital::{bucket, i_set_with, m_set_with, CountingData, LaurentSeries, Options, PairData, RSPair, Stability};

use super::{rerun_pair, CheckReport, Value};

/// Assembles a block matrix; blocks in a row share their row count and
/// blocks in a column share their column count.
pub fn block_q(r: &RingData, grid: &[Vec<QMat>]) -> QMat {
    let s = grid.iter().flatten().map(|q| q.shift).max().unwrap_or(0);
    let rows: usize = grid.iter().map(|row| row[0].m.rows).sum();
    let cols: usize = grid.first().map_or(0, |row| row.iter().map(|q| q.m.cols).sum());
    let mut m = Mat::zeros(rows, cols);
    let mut prec = FULL;
    let mut i0 = 0;
    for row in grid {
        let mut j0 = 0;
        for q in row {
            let k = s - q.shift;
            let a = q.m.mul_pi_pow(r, k);
            for i in 0..a.rows {
                for j in 0..a.cols {
                    m.set(i0 + i, j0 + j, a.get(i, j));
                }
            }
            prec = prec.min(q.eff_prec(r).saturating_add(k));
            j0 += q.m.cols;
        }
        i0 += row[0].m.rows;
    }
    QMat::new(s, m, prec).normalized(r)
}

/// `diag(a, b)`.
pub fn block_diag_q(r: &RingData, a: &QMat, b: &QMat) -> QMat {
    let z12 = QMat::integral(Mat::zeros(a.m.rows, b.m.cols));
    let z21 = QMat::integral(Mat::zeros(b.m.rows, a.m.cols));
    block_q(r, &[alloc::vec![a.clone(), z12], alloc::vec![z21, b.clone()]])
}

fn scalar_q(x: &RingElem) -> QMat {
    let x = x.clone().normalized();
    QMat::new(x.denom, Mat::diag(&[x.num]), x.prec)
}

/// The extended space, element and distinguished vector.
#[derive(Clone, Debug)]
pub struct Extension {
    pub space: HermitianSpace,
    pub elem: QMat,
    pub u: QMat,
    /// Position of `a` among the norm-one residues (group mode).
    pub residue: Option<usize>,
}

impl Extension {
    pub fn pair(&self, stability: Stability) -> Result<RSPair> {
        RSPair::new(&self.space, &self.elem, &self.u, stability)
    }
}

/// `x' = (x j; -j* 0)` on `V ⊕ Eu` with form `J ⊕ 1` and `u' = u`.
pub fn extend_lie(pair: &RSPair) -> Result<Extension> {
    let r = pair.ring();
    let n = pair.n();
    let x = &pair.x;
    if !pair.adjoint_x.eq_at_precision(r, &x.neg(r)) {
        return Err(Error::Precondition("x is not in the unitary Lie algebra".into()));
    }
    let jstar = pair.j.dagger(r).mul(r, &pair.space.gram).neg(r);
    let zero = QMat::integral(Mat::zeros(1, 1));
    let elem = block_q(r, &[alloc::vec![x.clone(), pair.j.clone()], alloc::vec![jstar, zero]]);
    let one = QMat::integral(Mat::identity(r, 1));
    let space = HermitianSpace::new(r, block_diag_q(r, &pair.space.gram, &one))?;
    let mut u = alloc::vec![Elem::ZERO; n + 1];
    u[n] = r.one();
    Ok(Extension { space, elem, u: QMat::integral(Mat::from_cols(n + 1, &[u])), residue: None })
}

/// How the norm-one residue `a` is chosen.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ResidueChoice {
    /// First residue with `P(a)` a unit.
    Auto,
    /// A fixed position among the norm-one residues, admissible or not.
    Index(usize),
    /// An explicit element of norm one.
    Explicit(ExactEntry),
}

fn eval_residue(r: &RingData, coeffs: &[Elem], a: &Elem) -> Elem {
    coeffs.iter().rev().fold(Elem::ZERO, |acc, c| r.add(&r.mul(&acc, a), c))
}

/// `V' = V ⊕ Eũ`, `J'(ũ, ũ) = 1 - J(j, j)`, `u' = ũ + j`, `g' = diag(g, a)`.
pub fn extend_group(pair: &RSPair, choice: &ResidueChoice) -> Result<Extension> {
    let r = pair.ring();
    let n = pair.n();
    let norm = pair.norm_of_j();
    match norm.valuation() {
        Valuation::Finite(0) => return Err(Error::UnitNorm),
        Valuation::Finite(v) if v < 0 => {
            return Err(Error::Precondition("J(j, j) is not integral".into()));
        }
        _ => {}
    }
    let coeffs: Vec<Elem> = pair
        .charpoly()
        .into_iter()
        .map(|c| {
            let c = c.normalized();
            if c.denom > 0 {
                Err(Error::Precondition("characteristic polynomial is not integral".into()))
            } else {
                Ok(c.num)
            }
        })
        .collect::<Result<_>>()?;
    let residues = r.norm_one_residues()?;
    let (a, residue) = match choice {
        ResidueChoice::Auto => {
            if (r.q() as usize) < n {
                return Err(Error::NoAdmissibleResidue);
            }
            let i = residues
                .iter()
                .position(|a| r.is_unit(&eval_residue(r, &coeffs, a)))
                .ok_or(Error::NoAdmissibleResidue)?;
            (residues[i], Some(i))
        }
        ResidueChoice::Index(i) => {
            let a = *residues.get(*i).ok_or_else(|| Error::Precondition("residue index out of range".into()))?;
            (a, Some(*i))
        }
        ResidueChoice::Explicit(e) => {
            let a = e.realize(r)?;
            if e.denom != 0 || r.norm(&a) != r.one() {
                return Err(Error::Precondition("a must have norm one".into()));
            }
            (a, None)
        }
    };
    let tail = scalar_q(&RingElem::from_i64(r, 1).sub(&norm));
    let space = HermitianSpace::new(r, block_diag_q(r, &pair.space.gram, &tail))?;
    let elem = block_diag_q(r, &pair.x, &QMat::integral(Mat::diag(&[a])));
    let one = QMat::integral(Mat::identity(r, 1));
    let u = block_q(r, &[alloc::vec![pair.j.clone()], alloc::vec![one]]);
    Ok(Extension { space, elem, u, residue })
}

/// Ambient lattices of `M` from quotient data.
fn ambient_set(pair: &RSPair, d: &Option<CountingData>, opts: &Options) -> Result<BTreeSet<Lattice>> {
    let mut out = BTreeSet::new();
    if let Some(d) = d {
        for s in m_set_with(pair.ring(), d, opts)? {
            out.insert(d.ambient_lattice(pair.ring(), &s)?);
        }
    }
    Ok(out)
}

/// `Λ ⊕ O e_(n+1)`.
fn add_line(r: &RingData, lat: &Lattice) -> Result<Lattice> {
    let one = QMat::integral(Mat::identity(r, 1));
    Lattice::from_basis(r, &block_diag_q(r, &lat.basis(r), &one))
}

/// Quantities compared between a pair and its extension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionValues {
    pub base_counts: BTreeMap<u32, u64>,
    pub ext_counts: BTreeMap<u32, u64>,
    /// `M(ext) = {Λ ⊕ O e_(n+1) : Λ ∈ M(base)}` as sets of ambient lattices.
    pub bijection: bool,
    pub base_value: i64,
    pub ext_value: i64,
    pub base_derived: i64,
    pub ext_derived: i64,
    /// `I` on both sides, for even spaces.
    pub unitary: Option<(i64, i64)>,
    pub residue: Option<usize>,
}

fn compare(base: &RSPair, ext: &RSPair, residue: Option<usize>, opts: &Options) -> Result<ExtensionValues> {
    let r = base.ring();
    let db = base.counting_data()?;
    let de = ext.counting_data()?;
    let lb = ambient_set(base, &db, opts)?;
    let le = ambient_set(ext, &de, opts)?;
    let lifted = lb.iter().map(|l| add_line(r, l)).collect::<Result<BTreeSet<_>>>()?;
    let counts = |p: &RSPair, d: &Option<CountingData>| -> Result<BTreeMap<u32, u64>> {
        Ok(match d {
            Some(d) => bucket(&m_set_with(p.ring(), d, opts)?),
            None => BTreeMap::new(),
        })
    };
    let base_counts = counts(base, &db)?;
    let ext_counts = counts(ext, &de)?;
    let sb = LaurentSeries::from_counts(&base_counts);
    let se = LaurentSeries::from_counts(&ext_counts);
    let unitary = if base.space.parity().is_odd() {
        None
    } else {
        let i = |p: &RSPair, d: &Option<CountingData>| -> Result<i64> {
            Ok(match d {
                Some(d) => i_set_with(p.ring(), d, opts)?.len() as i64,
                None => 0,
            })
        };
        Some((i(base, &db)?, i(ext, &de)?))
    };
    Ok(ExtensionValues {
        bijection: lifted == le,
        base_value: sb.eval_at_one(),
        ext_value: se.eval_at_one(),
        base_derived: sb.derived(),
        ext_derived: se.derived(),
        base_counts,
        ext_counts,
        unitary,
        residue,
    })
}

fn recoverable(e: &Error) -> bool {
    !matches!(
        e,
        Error::PrecisionExhausted(_)
            | Error::CapExceeded { .. }
            | Error::UnitNorm
            | Error::NoAdmissibleResidue
            | Error::Precondition(_)
    )
}

fn report(v: &ExtensionValues, run: &super::Rerun, identity: &str) -> CheckReport {
    let unitary_ok = v.unitary.is_none_or(|(a, b)| a == b);
    let mut rep = CheckReport::new(
        identity,
        Value::Counts(v.base_counts.clone()),
        Value::Counts(v.ext_counts.clone()),
        run,
        &[
            (v.bijection, "Λ ↦ Λ ⊕ O ũ is not a bijection onto M(g', u')"),
            (v.base_value == v.ext_value, "O differs"),
            (v.base_derived == v.ext_derived, "∂O differs"),
            (unitary_ok, "I differs"),
        ],
    );
    if let (Some(i), false) = (v.residue, rep.passed()) {
        rep.diagnostics.push(alloc::format!("residue a is norm-one class {i}"));
    }
    rep
}

/// Compares `(g, j)` with its group extension `(g', u')`: counts, the
/// explicit bijection, `∂O`, and for even spaces `O` and `I`.
pub fn check_extension(data: &PairData, choice: &ResidueChoice, opts: &Options) -> Result<CheckReport> {
    if data.stability != Stability::Group {
        return Err(Error::Precondition("group extension needs a unitary element".into()));
    }
    let out = rerun_pair(data, opts, |base| {
        let ext = extend_group(base, choice)?;
        let pair = ext.pair(Stability::Group)?;
        compare(base, &pair, ext.residue, opts)
    });
    match out {
        Ok((v, run)) => Ok(report(&v, &run, "group-extension")),
        Err(e) if recoverable(&e) && !matches!(choice, ResidueChoice::Auto) => Ok(CheckReport::failure(
            "group-extension",
            alloc::vec![data.working_precision().unwrap_or(0)],
            alloc::format!("extension with the chosen residue is not admissible: {e}"),
        )),
        Err(e) => Err(e),
    }
}

/// Inclusion data behind the projection identities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockValues {
    pub ext: ExtensionValues,
    pub base_included: bool,
    pub ext_included: bool,
    /// `pr(L') = L♭` and `pr(L'∨) = L♭∨`, when included.
    pub projections: Option<bool>,
}

/// Drops the last coordinate.
fn project(r: &RingData, lat: &Lattice) -> Result<Lattice> {
    let b = lat.basis(r);
    let n = b.m.rows - 1;
    let cols: Vec<Vec<Elem>> = b.m.cols_vec().into_iter().map(|mut c| {
        c.truncate(n);
        c
    }).collect();
    Lattice::from_basis(r, &QMat::new(b.shift, Mat::from_cols(n, &cols), b.prec))
}

fn block_values(base: &RSPair, opts: &Options) -> Result<BlockValues> {
    let r = base.ring();
    let ext = extend_lie(base)?;
    let pair = ext.pair(Stability::Lie)?;
    let values = compare(base, &pair, None, opts)?;
    let lb = base.span_lattice()?;
    let lbd = base.space.dual_lattice(&lb)?;
    let le = pair.span_lattice()?;
    let led = pair.space.dual_lattice(&le)?;
    let base_included = lbd.contains(r, &lb);
    let ext_included = led.contains(r, &le);
    let projections = if ext_included {
        Some(project(r, &le)? == lb && project(r, &led)? == lbd)
    } else {
        None
    };
    Ok(BlockValues { ext: values, base_included, ext_included, projections })
}

/// `M(x', u) = {Λ♭ ⊕ O u : Λ♭ ∈ M(x, j)}` for the Lie block element, with
/// `L' ⊆ L'∨ ⇔ L♭ ⊆ L♭∨` and `pr(L') = L♭`, `pr(L'∨) = L♭∨`.
pub fn check_block_reduction(data: &PairData, opts: &Options) -> Result<CheckReport> {
    if data.stability != Stability::Lie || data.cayley {
        return Err(Error::Precondition("block reduction needs a Lie algebra element".into()));
    }
    let (v, run) = rerun_pair(data, opts, |base| block_values(base, opts))?;
    let mut rep = report(&v.ext, &run, "block-reduction");
    if v.base_included != v.ext_included {
        rep.diagnostics.push("L ⊆ L∨ is not equivalent to L♭ ⊆ L♭∨".into());
    }
    if v.projections == Some(false) {
        rep.diagnostics.push("pr(L') or pr(L'∨) differs from L♭ or L♭∨".into());
    }
    if !rep.diagnostics.is_empty() {
        rep.verdict = super::Verdict::Fail;
    }
    Ok(rep)
}
