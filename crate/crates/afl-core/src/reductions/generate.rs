//! Seeded generation of valid instances.
//!
//! Forms are diagonal `diag(p^v_i)`. Lie elements are sampled from `u(J)`
//! entrywise, unitary elements as Cayley transforms of those, split elements
//! as block sums `lambda_k + pi y_k` with distinct skew scalars `lambda_k`,
//! and subfield instances as Lie elements over `A`. Candidates are rejected
//! until the pair is regular semisimple and `L∨/L` fits the size cap.

use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::{ExactEntry, ExactMat};
use crate::hermitian::Parity;
use crate::local_rings::{make_ring, FieldSpec};
use crate::orbital::{PairData, RSPair, Stability};

use super::base_change::BaseChangeData;
use super::split::split_idempotents;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Structure {
    Generic,
    /// Block sum with this many residually coprime factors.
    Split(usize),
    /// A pair over `A = A0 ⊗ Q_p^2`; `n` is then the dimension over `A`.
    Subfield(FieldSpec),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InstanceProfile {
    pub p: u64,
    pub f0: u32,
    pub n: usize,
    pub parity: Parity,
    pub structure: Structure,
    pub kind: Stability,
    pub seed: u64,
    /// Largest admissible `|L∨/L|`.
    pub max_quotient: u128,
    pub max_attempts: u32,
}

impl InstanceProfile {
    pub fn new(p: u64, f0: u32, n: usize, parity: Parity, seed: u64) -> InstanceProfile {
        InstanceProfile {
            p,
            f0,
            n,
            parity,
            structure: Structure::Generic,
            kind: Stability::Lie,
            seed,
            max_quotient: 10_000,
            max_attempts: 500,
        }
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec::unramified(self.p, self.f0, true)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum InstanceData {
    Pair(PairData),
    BaseChange(BaseChangeData),
}

/// Why candidates were discarded.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RejectionStats {
    pub attempts: u32,
    pub not_regular: u32,
    pub wrong_parity: u32,
    /// `L ⊄ L∨`, so the counting sets are empty.
    pub not_included: u32,
    pub too_large: u32,
    /// Failed the structural requirement (splitting, `O_A ⊆ O_E[x]`).
    pub structure: u32,
    pub other: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generated {
    pub data: InstanceData,
    pub stats: RejectionStats,
    pub warnings: Vec<String>,
}

struct Sampler {
    rng: ChaCha8Rng,
    p: i64,
    /// Coordinates per element.
    d: usize,
}

impl Sampler {
    fn coords(&mut self) -> Vec<i64> {
        (0..self.d).map(|_| self.rng.random_range(0..self.p)).collect()
    }

    fn scaled(&mut self, k: u32) -> Vec<i64> {
        let s = self.p.pow(k);
        self.coords().into_iter().map(|c| c * s).collect()
    }

    /// Valuations in `{0, 1, 2}`, weighted towards `0`.
    fn valuations(&mut self, n: usize, parity: Parity) -> Vec<u32> {
        let mut v: Vec<u32> = (0..n)
            .map(|_| match self.rng.random_range(0..10) {
                0..=4 => 0,
                5..=7 => 1,
                _ => 2,
            })
            .collect();
        if Parity::of(v.iter().sum::<u32>() as i64) != parity {
            let i = self.rng.random_range(0..n);
            v[i] = if v[i] == 1 { 0 } else { 1 };
        }
        v
    }

    /// A random element of `u(diag(p^v))` with entries divisible by `p^scale`.
    fn skew(&mut self, v: &[u32], scale: u32) -> ExactMat {
        let n = v.len();
        let mut x = ExactMat::zeros(n, n);
        let s = |c: Vec<i64>, k: i64| c.into_iter().map(|a| a * k).collect::<Vec<_>>();
        for i in 0..n {
            let z = self.scaled(scale);
            x.set(i, i, ExactEntry::with_conj(&z, &s(z.clone(), -1)));
            for j in i + 1..n {
                let y = self.scaled(scale);
                x.set(i, j, ExactEntry::from_coords(&s(y.clone(), self.p.pow(v[j]))));
                x.set(j, i, ExactEntry::with_conj(&[0], &s(y, -self.p.pow(v[i]))));
            }
        }
        x
    }

    fn vector(&mut self, n: usize) -> ExactMat {
        let mut j = ExactMat::zeros(n, 1);
        for i in 0..n {
            j.set(i, 0, ExactEntry::from_coords(&self.coords()));
        }
        j
    }
}

fn diag_gram(p: i64, v: &[u32]) -> ExactMat {
    let n = v.len();
    ExactMat::from_fn(n, n, |i, j| ExactEntry::int(if i == j { p.pow(v[i]) } else { 0 }))
}

/// Block sizes for `k` factors of a space of dimension `n`.
fn block_sizes(n: usize, k: usize) -> Vec<usize> {
    let mut s = alloc::vec![n / k; k];
    for b in s.iter_mut().take(n % k) {
        *b += 1;
    }
    s
}

fn split_element(smp: &mut Sampler, spec: &FieldSpec, v: &[u32], k: usize) -> Result<ExactMat> {
    let n = v.len();
    if k < 2 || k > n || k as i64 > smp.p {
        return Err(Error::Precondition("split needs 2 <= k <= min(n, p)".into()));
    }
    let r = make_ring(spec, 4)?;
    // delta = y - sigma(y) is a unit with sigma(delta) = -delta
    let y: Vec<i64> = r.coords(&r.gen_y()).into_iter().map(|c| c as i64).collect();
    let mut x = ExactMat::zeros(n, n);
    let mut start = 0;
    for (a, size) in block_sizes(n, k).into_iter().enumerate() {
        let blk = smp.skew(&v[start..start + size], 1);
        for i in 0..size {
            for j in 0..size {
                let mut e = blk.get(i, j).clone();
                if i == j {
                    let lam: Vec<i64> = y.iter().map(|c| c * a as i64).collect();
                    let neg: Vec<i64> = lam.iter().map(|c| -c).collect();
                    let add = |u: &[i64], w: &[i64]| {
                        let m = u.len().max(w.len());
                        (0..m).map(|t| u.get(t).unwrap_or(&0) + w.get(t).unwrap_or(&0)).collect::<Vec<_>>()
                    };
                    e = ExactEntry::with_conj(&add(&e.coords, &lam), &add(&e.conj, &neg));
                }
                x.set(start + i, start + j, e);
            }
        }
        start += size;
    }
    Ok(x)
}

fn classify(e: &Error, stats: &mut RejectionStats) {
    match e {
        Error::NotRegularSemisimple => stats.not_regular += 1,
        Error::NoSplitting | Error::NotStarStable => stats.structure += 1,
        Error::Precondition(_) => stats.structure += 1,
        _ => stats.other += 1,
    }
}

fn validate_pair(data: &PairData, profile: &InstanceProfile, stats: &mut RejectionStats) -> Result<bool> {
    let top = data.realize(data.ceiling());
    let pair = match top {
        Ok(p) => p,
        Err(e) => {
            classify(&e, stats);
            return Ok(false);
        }
    };
    if pair.space.parity() != profile.parity {
        stats.wrong_parity += 1;
        return Ok(false);
    }
    if !accept_quotient(&pair, profile, stats)? {
        return Ok(false);
    }
    if let Structure::Split(_) = profile.structure {
        if let Err(e) = split_idempotents(&pair) {
            classify(&e, stats);
            return Ok(false);
        }
    }
    Ok(true)
}

fn accept_quotient(pair: &RSPair, profile: &InstanceProfile, stats: &mut RejectionStats) -> Result<bool> {
    match pair.counting_data() {
        Ok(Some(d)) => {
            if d.quotient.size(pair.ring()) > profile.max_quotient {
                stats.too_large += 1;
                return Ok(false);
            }
            Ok(true)
        }
        Ok(None) => {
            stats.not_included += 1;
            Ok(false)
        }
        Err(e) => {
            classify(&e, stats);
            Ok(false)
        }
    }
}

fn sample_pair(smp: &mut Sampler, profile: &InstanceProfile) -> Result<PairData> {
    let spec = profile.spec();
    let v = smp.valuations(profile.n, profile.parity);
    let gram = diag_gram(smp.p, &v);
    let x = match &profile.structure {
        Structure::Split(k) => split_element(smp, &spec, &v, *k)?,
        _ => smp.skew(&v, 0),
    };
    let j = smp.vector(profile.n);
    let group = profile.kind == Stability::Group;
    // scramble split instances so the blocks are not visible in coordinates
    let conjugator = match profile.structure {
        Structure::Split(_) if smp.rng.random_bool(0.5) => Some(smp.skew(&v, 1)),
        _ => None,
    };
    Ok(PairData { spec, gram, x, j, stability: profile.kind, cayley: group, conjugator })
}

fn sample_subfield(smp: &mut Sampler, a_spec: &FieldSpec, profile: &InstanceProfile) -> Result<BaseChangeData> {
    let n = profile.n;
    let v: Vec<u32> = (0..n).map(|_| smp.rng.random_range(0..3)).collect();
    let gram = if a_spec.e() > 1 {
        // powers of the uniformizer t of A0, which is fixed by sigma
        let r = make_ring(a_spec, 4)?;
        let f = r.f();
        ExactMat::from_fn(n, n, |i, j| {
            if i != j {
                return ExactEntry::zero();
            }
            let mut c = alloc::vec![0i64; f * (v[i] as usize) + 1];
            c[f * v[i] as usize] = 1;
            ExactEntry::from_coords(&c)
        })
    } else {
        diag_gram(smp.p, &v)
    };
    let x = smp.skew(&alloc::vec![0; n], 0);
    let j = smp.vector(n);
    Ok(BaseChangeData::new(a_spec.clone(), gram, x, j))
}

fn validate_subfield(data: &BaseChangeData, profile: &InstanceProfile, stats: &mut RejectionStats) -> Result<bool> {
    let (pe, _) = match data.realize(data.ceiling()) {
        Ok(v) => v,
        Err(e) => {
            classify(&e, stats);
            return Ok(false);
        }
    };
    if pe.space.parity() != profile.parity {
        stats.wrong_parity += 1;
        return Ok(false);
    }
    accept_quotient(&pe, profile, stats)
}

/// Hypotheses of later constructions that the profile violates.
pub fn profile_warnings(profile: &InstanceProfile) -> Vec<String> {
    let q = profile.spec().q();
    let mut out = Vec::new();
    if profile.kind == Stability::Group && profile.n as u64 > q {
        out.push(alloc::format!(
            "n = {} >= q + 1 = {}: the group extension has no admissible residue",
            profile.n,
            q + 1
        ));
    }
    out
}

/// Deterministic in the profile; resamples until a valid instance appears.
pub fn gen_instance(profile: &InstanceProfile) -> Result<Generated> {
    let spec = profile.spec();
    spec.validate()?;
    if profile.n == 0 {
        return Err(Error::Precondition("dimension must be positive".into()));
    }
    let warnings = profile_warnings(profile);
    let d = match &profile.structure {
        Structure::Subfield(a) => {
            if a.p != profile.p || profile.f0 != 1 {
                return Err(Error::Precondition("subfield instances need E0 = Q_p and a matching p".into()));
            }
            if profile.kind != Stability::Lie {
                return Err(Error::Precondition("subfield instances are sampled in the Lie algebra".into()));
            }
            make_ring(a, 4)?.d()
        }
        _ => make_ring(&spec, 4)?.d(),
    };
    let mut smp = Sampler { rng: ChaCha8Rng::seed_from_u64(profile.seed), p: profile.p as i64, d };
    let mut stats = RejectionStats::default();
    while stats.attempts < profile.max_attempts {
        stats.attempts += 1;
        let data = match &profile.structure {
            Structure::Subfield(a) => {
                let data = sample_subfield(&mut smp, a, profile)?;
                if !validate_subfield(&data, profile, &mut stats)? {
                    continue;
                }
                InstanceData::BaseChange(data)
            }
            _ => {
                let data = sample_pair(&mut smp, profile)?;
                if !validate_pair(&data, profile, &mut stats)? {
                    continue;
                }
                InstanceData::Pair(data)
            }
        };
        return Ok(Generated { data, stats, warnings });
    }
    Err(Error::Unsatisfiable(stats.attempts))
}
