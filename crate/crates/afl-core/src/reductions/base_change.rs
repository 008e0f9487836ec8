//! Base change from `A = A0 ⊗ Q_p^2` down to `E = Q_p^2`: a pair over `A`
//! is viewed over `E` by restriction of scalars, and the counting sets are
//! compared on both sides.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::exact::ExactMat;
use crate::hermitian::restriction::ScalarRestriction;
use crate::hermitian::HermitianSpace;
use crate::local_rings::{max_precision, FieldSpec};
use crate::matrix::{inverse_q, Mat, QMat};
use crate::orbital::{bucket, m_set, LaurentSeries, Options, RSPair, Stability};

use super::{rerun, CheckReport, Value};

/// A pair over `A`: gram `J^A`, integral `x` and `j`, all with entries in `A`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BaseChangeData {
    pub a_spec: FieldSpec,
    pub gram: ExactMat,
    pub x: ExactMat,
    pub j: ExactMat,
    /// Replaces the restriction of `x` by an element over `E`; used to feed
    /// elements that are not `O_A`-linear.
    pub x_override: Option<ExactMat>,
}

impl BaseChangeData {
    pub fn new(a_spec: FieldSpec, gram: ExactMat, x: ExactMat, j: ExactMat) -> BaseChangeData {
        BaseChangeData { a_spec, gram, x, j, x_override: None }
    }

    /// Inertia degree `f` of `A0 / Q_p`.
    pub fn f(&self) -> u32 {
        self.a_spec.f0
    }

    fn e_spec(&self) -> FieldSpec {
        FieldSpec::unramified(self.a_spec.p, 1, true)
    }

    pub fn ceiling(&self) -> u32 {
        max_precision(&self.e_spec()).saturating_sub(4)
    }

    /// The pair over `E` and the pair over `A`, at `p`-adic precision `m`.
    pub fn realize(&self, m: u32) -> Result<(RSPair, RSPair)> {
        let sr = ScalarRestriction::new(&self.a_spec, m)?;
        let a = &sr.a_ring;
        let space_a = HermitianSpace::new(a, self.gram.realize(a)?)?;
        let integral = |q: QMat, what: &str| {
            q.to_integral(a).ok_or_else(|| Error::Precondition(alloc::format!("{what} is not integral over A")))
        };
        let xa = integral(self.x.realize(a)?, "x")?;
        let ja = integral(self.j.realize(a)?, "j")?;
        let pair_a = RSPair::new(&space_a, &QMat::integral(xa.clone()), &QMat::integral(ja.clone()), Stability::Lie)?;
        let e = &sr.e_ring;
        let space_e = sr.descend_form(&space_a)?;
        let xe = match &self.x_override {
            Some(x) => x.realize(e)?,
            None => QMat::integral(sr.mat_to_e(&xa)),
        };
        let je = QMat::integral(Mat::from_cols(space_e.n(), &[sr.vec_to_e(&ja.col(0))]));
        let pair_e = RSPair::new(&space_e, &xe, &je, Stability::Lie)?;
        check_inclusion(&sr, &pair_e, space_a.n())?;
        Ok((pair_e, pair_a))
    }

    /// `N = 2 e_max + 8` from the quotient over `E`.
    pub fn working_precision(&self) -> Result<u32> {
        let (pe, _) = self.realize(self.ceiling())?;
        let emax = match pe.counting_data()? {
            Some(d) => d.quotient.exps.iter().copied().max().unwrap_or(0),
            None => 0,
        };
        Ok((2 * emax + 8).min(self.ceiling()))
    }
}

/// `O_A ⊆ O_E[x]`: every basis element of `O_A` acts as an integral
/// polynomial in `x`.
fn check_inclusion(sr: &ScalarRestriction, pair: &RSPair, n1: usize) -> Result<()> {
    let r = pair.ring();
    let c = &pair.cyclic_basis;
    let cinv = inverse_q(r, c)?;
    for beta in sr.basis_actions(n1) {
        let b = QMat::integral(beta);
        if !b.mul(r, &pair.x).eq_at_precision(r, &pair.x.mul(r, &b)) {
            return Err(Error::Precondition("O_A does not commute with x".into()));
        }
        if !cinv.mul(r, &b.mul(r, &pair.j)).is_integral(r) {
            return Err(Error::Precondition("O_A is not contained in O_E[x]".into()));
        }
    }
    Ok(())
}

/// Counts of `M` over `E` and, independently, over `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseChangeValues {
    pub e_counts: BTreeMap<u32, u64>,
    pub a_counts: BTreeMap<u32, u64>,
}

impl BaseChangeValues {
    /// `E`-lengths divided by `f`, if all are divisible.
    pub fn relabeled(&self, f: u32) -> Option<BTreeMap<u32, u64>> {
        self.e_counts.iter().map(|(&i, &m)| (i % f == 0).then_some((i / f, m))).collect()
    }
}

fn values(pe: &RSPair, pa: &RSPair, opts: &Options) -> Result<BaseChangeValues> {
    Ok(BaseChangeValues { e_counts: bucket(&m_set(pe, opts)?), a_counts: bucket(&m_set(pa, opts)?) })
}

/// `M(x, j)_i = ∅` for `f ∤ i`, `|M_(fi)| = |M^A_i|`, `O = O^A` and `∂O = f ∂O^A`.
pub fn base_change_compare(data: &BaseChangeData, opts: &Options) -> Result<CheckReport> {
    let f = data.f();
    let start = match opts.precision {
        Some(n) => n,
        None => data.working_precision()?,
    };
    let limit = max_precision(&data.e_spec());
    let (v, run) = rerun(start, limit, |m| {
        let (pe, pa) = data.realize(m)?;
        values(&pe, &pa, opts)
    })?;
    let se = LaurentSeries::from_counts(&v.e_counts);
    let sa = LaurentSeries::from_counts(&v.a_counts);
    let relabeled = v.relabeled(f);
    let lhs = Value::List(alloc::vec![Value::Int(se.eval_at_one()), Value::Int(se.derived())]);
    let rhs = Value::List(alloc::vec![Value::Int(sa.eval_at_one()), Value::Int(f as i64 * sa.derived())]);
    let mut rep = CheckReport::new(
        "base-change",
        lhs,
        rhs,
        &run,
        &[
            (relabeled.is_some(), "an occupied length is not divisible by f"),
            (relabeled.as_ref() == Some(&v.a_counts), "counts over A differ from the relabeled counts over E"),
        ],
    );
    if !rep.passed() {
        let lens: Vec<u32> = v.e_counts.keys().copied().collect();
        rep.diagnostics.push(alloc::format!("occupied lengths over E: {lens:?}, f = {f}"));
    }
    Ok(rep)
}
