//! Reduction machinery as executable checks: extensions, idempotent
//! splitting, base change, vanishing and FL identities, and an instance
//! generator.
//!
//! Every check evaluates its quantities at the working precision `N` and
//! again at `N + 4`; a verdict passes only if the identity holds and both
//! evaluations agree.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hermitian::Parity;
use crate::orbital::{i_set_with, m_set_with, LaurentSeries, Options, PairData, RSPair};

mod base_change;
mod extend;
mod generate;
mod split;

pub use base_change::{base_change_compare, BaseChangeData, BaseChangeValues};
pub use extend::{
    block_diag_q, block_q, check_block_reduction, check_extension, extend_group, extend_lie,
    BlockValues, Extension, ExtensionValues, ResidueChoice,
};
pub use generate::{gen_instance, profile_warnings, Generated, InstanceData, InstanceProfile, RejectionStats, Structure};
pub use split::{check_product, product_values, split_idempotents, FactorPair, ProductValues};

/// A value appearing on one side of an identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Counts(BTreeMap<u32, u64>),
    Series(LaurentSeries),
    List(Vec<Value>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Pass,
    Fail,
}

/// Outcome of one identity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub identity: String,
    pub lhs: Value,
    pub rhs: Value,
    pub verdict: Verdict,
    pub precisions: Vec<u32>,
    pub diagnostics: Vec<String>,
}

impl CheckReport {
    /// Passes iff `lhs == rhs`, every extra condition holds and the re-run agreed.
    pub fn new(identity: &str, lhs: Value, rhs: Value, run: &Rerun, extra: &[(bool, &str)]) -> CheckReport {
        let mut diagnostics = Vec::new();
        if lhs != rhs {
            diagnostics.push(String::from("sides differ"));
        }
        for (ok, what) in extra {
            if !ok {
                diagnostics.push(String::from(*what));
            }
        }
        if !run.stable {
            diagnostics.push(alloc::format!("values changed between precisions {:?}", run.precisions));
        }
        let verdict = if diagnostics.is_empty() { Verdict::Pass } else { Verdict::Fail };
        CheckReport {
            identity: identity.into(),
            lhs,
            rhs,
            verdict,
            precisions: run.precisions.clone(),
            diagnostics,
        }
    }

    /// A failed check that could not be evaluated to the end.
    pub fn failure(identity: &str, precisions: Vec<u32>, why: String) -> CheckReport {
        CheckReport {
            identity: identity.into(),
            lhs: Value::Bool(false),
            rhs: Value::Bool(true),
            verdict: Verdict::Fail,
            precisions,
            diagnostics: alloc::vec![why],
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Precisions used and whether the two evaluations agreed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rerun {
    pub precisions: Vec<u32>,
    pub stable: bool,
}

/// Evaluates `f` at `start` (raised in steps of 4 while digits run out, up
/// to `limit`) and again 4 digits higher.
pub fn rerun<T: PartialEq>(start: u32, limit: u32, f: impl Fn(u32) -> Result<T>) -> Result<(T, Rerun)> {
    let mut n = start;
    let v = loop {
        match f(n) {
            Err(Error::PrecisionExhausted(_)) if n + 8 <= limit => n += 4,
            other => break other?,
        }
    };
    let w = f(n + 4)?;
    let stable = v == w;
    Ok((v, Rerun { precisions: alloc::vec![n, n + 4], stable }))
}

/// [`rerun`] over the realizations of an exact pair.
pub fn rerun_pair<T: PartialEq>(
    data: &PairData,
    opts: &Options,
    f: impl Fn(&RSPair) -> Result<T>,
) -> Result<(T, Rerun)> {
    let start = match opts.precision {
        Some(n) => n,
        None => data.working_precision()?,
    };
    let limit = crate::local_rings::max_precision(&data.spec);
    rerun(start, limit, |n| f(&data.realize(n)?))
}

/// Quantities behind the vanishing identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VanishingValues {
    pub counts: BTreeMap<u32, u64>,
    pub dual_length: i64,
    pub value: i64,
    /// Every dual lies in `M` with length `l - i`.
    pub involution_ok: bool,
    pub fixed_points: usize,
}

pub fn vanishing_values(pair: &RSPair, opts: &Options) -> Result<VanishingValues> {
    let r = pair.ring();
    let dual_length = pair.dual_length()?;
    let Some(d) = pair.counting_data()? else {
        return Ok(VanishingValues {
            counts: BTreeMap::new(),
            dual_length,
            value: 0,
            involution_ok: true,
            fixed_points: 0,
        });
    };
    let subs = m_set_with(r, &d, opts)?;
    let set: BTreeSet<_> = subs.iter().cloned().collect();
    let l = d.quotient.length() as i64;
    let mut involution_ok = true;
    let mut fixed_points = 0;
    for s in &subs {
        let dual = d.dual(r, s)?;
        if dual == *s {
            fixed_points += 1;
        }
        if !set.contains(&dual) || dual.length as i64 != l - s.length as i64 {
            involution_ok = false;
        }
    }
    let counts = crate::orbital::bucket(&subs);
    let value = LaurentSeries::from_counts(&counts).eval_at_one();
    Ok(VanishingValues { counts, dual_length, value, involution_ok, fixed_points })
}

fn symmetric(counts: &BTreeMap<u32, u64>, l: i64) -> bool {
    counts.iter().all(|(&i, &m)| {
        let k = l - i as i64;
        k >= 0 && counts.get(&(k as u32)).copied().unwrap_or(0) == m
    })
}

/// `O(x, j) = 0` with `|M_i| = |M_(l-i)|` and a fixed-point-free duality, for odd pairs.
pub fn vanishing_check(data: &PairData, opts: &Options) -> Result<CheckReport> {
    let parity = data.realize(data.ceiling())?.space.parity();
    if parity != Parity::Odd {
        return Err(Error::Precondition("vanishing needs an odd hermitian space".into()));
    }
    let (v, run) = rerun_pair(data, opts, |p| vanishing_values(p, opts))?;
    let sym = symmetric(&v.counts, v.dual_length);
    Ok(CheckReport::new(
        "vanishing",
        Value::Int(v.value),
        Value::Int(0),
        &run,
        &[
            (sym, "counts are not symmetric under i -> l - i"),
            (v.involution_ok, "duality does not act on M"),
            (v.fixed_points == 0, "duality has a fixed point"),
        ],
    ))
}

/// `(I(x, j), O(x, j))`.
pub fn fl_values(pair: &RSPair, opts: &Options) -> Result<(i64, i64)> {
    let r = pair.ring();
    let Some(d) = pair.counting_data()? else {
        return Ok((0, 0));
    };
    let i = i_set_with(r, &d, opts)?.len() as i64;
    let o = LaurentSeries::from_counts(&crate::orbital::bucket(&m_set_with(r, &d, opts)?)).eval_at_one();
    Ok((i, o))
}

/// `I(x, j) = O(x, j)` for even pairs. A failure that survives the re-run
/// is reported as a counterexample candidate.
pub fn fl_check(data: &PairData, opts: &Options) -> Result<CheckReport> {
    let parity = data.realize(data.ceiling())?.space.parity();
    if parity != Parity::Even {
        return Err(Error::Precondition("FL needs an even hermitian space".into()));
    }
    let ((i, o), run) = rerun_pair(data, opts, |p| fl_values(p, opts))?;
    let mut rep = CheckReport::new("fl", Value::Int(i), Value::Int(o), &run, &[]);
    if i != o && run.stable {
        rep.diagnostics
            .push(alloc::format!("counterexample candidate, confirmed at precision {}", run.precisions[1]));
    }
    Ok(rep)
}
