//! Argument parsing and subcommand dispatch.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::time::Instant;

use afl_core::hermitian::{HermitianSpace, Parity};
use afl_core::lattices::{Lattice, Strategy, DEFAULT_CAP};
use afl_core::local_rings::{make_ring, FieldSpec};
use afl_core::orbital::{orbital_result, Options, Stability};
use afl_core::reductions::{
    base_change_compare, check_block_reduction, check_extension, check_product, fl_check, gen_instance,
    rerun_pair, vanishing_check, CheckReport, InstanceData, InstanceProfile, ResidueChoice, Structure,
};
use afl_core::witt_frames::witt_suite;
use afl_core::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use crate::journal::Journal;
use crate::report::{counts_json, series_json, status_of, write_object, write_reports, Format, ReportJson, Status};
use crate::schema::{digest_str, split_values, GramJson, InstanceJson, WittJson};

#[derive(Parser, Debug)]
#[command(name = "afl", version, about = "Lattice counts for the unitary (arithmetic) fundamental lemma and checks of its reductions")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Starting p-adic precision; default is the working precision of each instance.
    #[arg(long, global = true, env = "AFL_PRECISION")]
    pub precision: Option<u32>,
    #[arg(long, global = true, env = "AFL_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for batches; 0 means one per core.
    #[arg(long, global = true, env = "AFL_JOBS", default_value_t = 1)]
    pub jobs: usize,
    /// Largest quotient `|L∨/L|` that may be enumerated.
    #[arg(long, global = true, env = "AFL_CAP", default_value_t = DEFAULT_CAP)]
    pub cap: u128,
    #[arg(long, global = true, env = "AFL_FORMAT", value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, global = true, value_enum, default_value_t = StrategyArg::Socle)]
    pub strategy: StrategyArg,
    /// Fill in `millis`; output is then no longer reproducible.
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Closure,
    Echelon,
    Socle,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parity of the dual index of the standard lattice.
    Parity(InputArg),
    /// Counting sets, orbital series, its derivative and the unitary count.
    Orbital(InputArg),
    /// `I(x, j) = O(x, j)` on even pairs.
    FlCheck(InputArg),
    /// `O(x, j) = 0` and the length symmetry on odd pairs.
    VanishingCheck(InputArg),
    /// The product formula on pairs with a split characteristic polynomial.
    ProductCheck(InputArg),
    /// Length scaling under restriction of scalars from `A` to `E`.
    BaseChangeCheck(InputArg),
    /// Group extensions for unitary pairs, block reduction for Lie pairs.
    ExtendCheck(InputArg),
    /// Witt vector, frame and window identities.
    WittCheck(InputArg),
    /// Random instances as JSON lines.
    Gen(GenArgs),
    /// Generate and check instances, resuming from a journal.
    Scan(ScanArgs),
}

#[derive(Args, Debug, Clone)]
pub struct InputArg {
    /// Inline JSON, a file path, or `-` for standard input.
    pub input: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ParityArg {
    Odd,
    Even,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StructureArg {
    Generic,
    Split,
    Subfield,
}

#[derive(Args, Debug, Clone)]
pub struct GenArgs {
    #[arg(long, default_value_t = 3)]
    pub p: u64,
    #[arg(long, default_value_t = 1)]
    pub f0: u32,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = ParityArg::Odd)]
    pub parity: ParityArg,
    #[arg(long, value_enum, default_value_t = StructureArg::Generic)]
    pub structure: StructureArg,
    /// Number of factors for split instances.
    #[arg(long, default_value_t = 2)]
    pub factors: usize,
    /// Residue degree of `A0` for subfield instances.
    #[arg(long, default_value_t = 3)]
    pub subfield_degree: u32,
    /// Eisenstein polynomial of `A0`, comma separated, little-endian.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub subfield_eis: Option<Vec<i64>>,
    #[arg(long)]
    pub group: bool,
    #[arg(long, default_value_t = 10_000)]
    pub max_quotient: u128,
    #[arg(long, default_value_t = 1)]
    pub count: u64,
}

#[derive(Args, Debug, Clone)]
pub struct ScanArgs {
    #[command(flatten)]
    pub profile: GenArgs,
    /// JSON-lines journal; finished instances are skipped on a re-run.
    #[arg(long)]
    pub journal: Option<PathBuf>,
}

/// Parsed settings shared by every subcommand.
#[derive(Clone, Debug)]
pub struct Settings {
    pub opts: Options,
    pub seed: u64,
    pub timings: bool,
}

impl Settings {
    fn new(g: &Global) -> Settings {
        let strategy = match g.strategy {
            StrategyArg::Closure => Strategy::Closure,
            StrategyArg::Echelon => Strategy::Echelon,
            StrategyArg::Socle => Strategy::Socle,
        };
        Settings { opts: Options { cap: g.cap, strategy, precision: g.precision }, seed: g.seed, timings: g.timings }
    }
}

/// Which identity a check subcommand verifies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    Fl,
    Vanishing,
    Product,
    BaseChange,
    Extend,
}

impl CheckKind {
    fn name(self) -> &'static str {
        match self {
            CheckKind::Fl => "fundamental-lemma",
            CheckKind::Vanishing => "vanishing",
            CheckKind::Product => "product",
            CheckKind::BaseChange => "base-change",
            CheckKind::Extend => "extension",
        }
    }
}

/// Runs one check on one instance.
pub fn check_instance(kind: CheckKind, inst: &InstanceJson, s: &Settings) -> (Vec<ReportJson>, Status) {
    let digest = inst.digest();
    let t0 = Instant::now();
    let out: Result<CheckReport, (Status, String)> = inst.to_data().map_err(|e| (Status::Schema, e)).and_then(|d| {
        let r = match (kind, &d) {
            (CheckKind::BaseChange, InstanceData::BaseChange(b)) => base_change_compare(b, &s.opts),
            (CheckKind::BaseChange, _) => {
                return Err((Status::Schema, "base-change-check needs a base_change instance".into()))
            }
            (_, InstanceData::BaseChange(_)) => return Err((Status::Schema, "this check needs a pair instance".into())),
            (CheckKind::Fl, InstanceData::Pair(p)) => fl_check(p, &s.opts),
            (CheckKind::Vanishing, InstanceData::Pair(p)) => vanishing_check(p, &s.opts),
            (CheckKind::Product, InstanceData::Pair(p)) => check_product(p, &s.opts),
            (CheckKind::Extend, InstanceData::Pair(p)) if p.stability == Stability::Group => {
                check_extension(p, &ResidueChoice::Auto, &s.opts)
            }
            (CheckKind::Extend, InstanceData::Pair(p)) => check_block_reduction(p, &s.opts),
        };
        r.map_err(|e| (status_of(&e), e.to_string()))
    });
    let millis = s.timings.then(|| t0.elapsed().as_millis() as u64);
    match out {
        Ok(r) => {
            let rep = ReportJson::from_check(&r, &digest, millis);
            let st = rep.status();
            (vec![rep], st)
        }
        Err((st, e)) => (vec![ReportJson::from_error(kind.name(), &digest, st, &e, millis)], st),
    }
}

fn read_input(arg: &InputArg) -> Result<String, String> {
    match arg.input.as_deref() {
        None | Some("-") => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| e.to_string())?;
            Ok(s)
        }
        Some(t) if t.trim_start().starts_with(['{', '[']) => Ok(t.to_string()),
        Some(path) => std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}")),
    }
}

fn pool(jobs: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().expect("thread pool")
}

fn schema_fail(err: &mut dyn Write, msg: &str) -> i32 {
    let _ = writeln!(err, "afl: invalid input: {msg}");
    Status::Schema.code()
}

/// Entry point used by the binary; returns the exit status.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let s = Settings::new(&cli.global);
    let format = cli.global.format;
    let jobs = cli.global.jobs;
    let kind = match &cli.command {
        Command::Parity(a) => return parity(a, &s, format, out, err),
        Command::Orbital(a) => return orbital(a, &s, format, out, err),
        Command::WittCheck(a) => return witt(a, &s, format, out, err),
        Command::Gen(g) => return gen(g, &s, format, out, err),
        Command::Scan(a) => return scan(a, &s, jobs, format, out, err),
        Command::FlCheck(_) => CheckKind::Fl,
        Command::VanishingCheck(_) => CheckKind::Vanishing,
        Command::ProductCheck(_) => CheckKind::Product,
        Command::BaseChangeCheck(_) => CheckKind::BaseChange,
        Command::ExtendCheck(_) => CheckKind::Extend,
    };
    let arg = match &cli.command {
        Command::FlCheck(a)
        | Command::VanishingCheck(a)
        | Command::ProductCheck(a)
        | Command::BaseChangeCheck(a)
        | Command::ExtendCheck(a) => a,
        _ => unreachable!(),
    };
    let insts = match read_input(arg).and_then(|t| split_values(&t)) {
        Ok(v) => v,
        Err(e) => return schema_fail(err, &e),
    };
    let parsed: Result<Vec<InstanceJson>, String> = insts.into_iter().map(InstanceJson::parse).collect();
    let insts = match parsed {
        Ok(v) => v,
        Err(e) => return schema_fail(err, &e),
    };
    let results: Vec<(Vec<ReportJson>, Status)> =
        pool(jobs).install(|| insts.par_iter().map(|i| check_instance(kind, i, &s)).collect());
    let mut status = Status::Ok;
    let mut reports = Vec::new();
    for (r, st) in results {
        status = status.worst(st);
        reports.extend(r);
    }
    finish(out, err, &reports, format, status)
}

fn finish(out: &mut dyn Write, err: &mut dyn Write, reports: &[ReportJson], format: Format, status: Status) -> i32 {
    if let Err(e) = write_reports(out, reports, format) {
        let _ = writeln!(err, "afl: {e}");
        return Status::Fail.code();
    }
    for r in reports.iter().filter(|r| !r.passed()) {
        for d in &r.diagnostics {
            let _ = writeln!(err, "afl: {} ({}): {d}", r.identity, &r.inputs_digest[..12]);
        }
    }
    status.code()
}

fn parity(arg: &InputArg, s: &Settings, format: Format, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let g: GramJson = match read_input(arg).and_then(|t| serde_json::from_str(&t).map_err(|e| e.to_string())) {
        Ok(g) => g,
        Err(e) => return schema_fail(err, &e),
    };
    let res = (|| -> Result<(Parity, i64, usize), Error> {
        let r = make_ring(&g.field.spec(), s.opts.precision.unwrap_or(12))?;
        let gram = g.gram().map_err(Error::Shape)?.realize(&r)?;
        let space = HermitianSpace::new(&r, gram)?;
        let idx = space.dual_index(&Lattice::standard(&r, space.n()))?;
        Ok((space.parity(), idx, space.n()))
    })();
    match res {
        Ok((p, idx, n)) => {
            let v = json!({"parity": if p.is_odd() { "odd" } else { "even" }, "dual_index": idx, "n": n});
            emit(out, &v, format)
        }
        Err(e) => report_error(err, &e),
    }
}

fn report_error(err: &mut dyn Write, e: &Error) -> i32 {
    let _ = writeln!(err, "afl: {e}");
    status_of(e).code()
}

fn emit(out: &mut dyn Write, v: &serde_json::Value, format: Format) -> i32 {
    match write_object(out, v, format) {
        Ok(()) => Status::Ok.code(),
        Err(_) => Status::Fail.code(),
    }
}

fn orbital(arg: &InputArg, s: &Settings, format: Format, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let inst = match read_input(arg)
        .and_then(|t| serde_json::from_str::<serde_json::Value>(&t).map_err(|e| e.to_string()))
        .and_then(InstanceJson::parse)
        .and_then(|i| i.to_data().map(|d| (i, d)))
    {
        Ok(v) => v,
        Err(e) => return schema_fail(err, &e),
    };
    let (inst, InstanceData::Pair(data)) = inst else {
        return schema_fail(err, "orbital needs a pair instance");
    };
    match rerun_pair(&data, &s.opts, |p| orbital_result(p, &s.opts)) {
        Ok((v, run)) => {
            let obj = json!({
                "counts": counts_json(&v.counts),
                "series": series_json(&v.series),
                "derived": v.derived,
                "unitary": v.unitary,
                "dual_length": v.dual_length,
                "precisions": run.precisions,
                "stable": run.stable,
                "inputs_digest": inst.digest(),
            });
            let code = emit(out, &obj, format);
            if run.stable {
                code
            } else {
                let _ = writeln!(err, "afl: values changed between precisions {:?}", run.precisions);
                Status::Fail.code()
            }
        }
        Err(e) => report_error(err, &e),
    }
}

fn witt(arg: &InputArg, s: &Settings, format: Format, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cases: Result<Vec<WittJson>, String> = read_input(arg).and_then(|t| split_values(&t)).and_then(|vs| {
        vs.into_iter().map(|v| serde_json::from_value(v).map_err(|e| e.to_string())).collect()
    });
    let cases = match cases {
        Ok(c) => c,
        Err(e) => return schema_fail(err, &e),
    };
    let mut reports = Vec::new();
    let mut status = Status::Ok;
    for c in &cases {
        let case = match c.case(s.opts.precision) {
            Ok(c) => c,
            Err(e) => return schema_fail(err, &e),
        };
        let digest = digest_str(&serde_json::to_string(c).expect("cases serialize"));
        let t0 = Instant::now();
        let reps = witt_suite(&case, s.seed);
        let millis = s.timings.then(|| t0.elapsed().as_millis() as u64);
        for r in &reps {
            if !r.passed() {
                status = status.worst(Status::Fail);
            }
            reports.push(ReportJson::from_check(r, &digest, millis));
        }
    }
    finish(out, err, &reports, format, status)
}

fn profile(g: &GenArgs, seed: u64) -> Result<InstanceProfile, String> {
    let parity = match g.parity {
        ParityArg::Odd => Parity::Odd,
        ParityArg::Even => Parity::Even,
    };
    let mut p = InstanceProfile::new(g.p, g.f0, g.n, parity, seed);
    p.max_quotient = g.max_quotient;
    p.kind = if g.group { Stability::Group } else { Stability::Lie };
    p.structure = match g.structure {
        StructureArg::Generic => Structure::Generic,
        StructureArg::Split => Structure::Split(g.factors),
        StructureArg::Subfield => Structure::Subfield(match &g.subfield_eis {
            Some(c) => FieldSpec::ramified(g.p, g.subfield_degree, c.clone(), true),
            None => FieldSpec::unramified(g.p, g.subfield_degree, true),
        }),
    };
    p.spec().validate().map_err(|e| e.to_string())?;
    Ok(p)
}

/// A seed and what the generator made of it.
type Drawn = (u64, Result<InstanceJson, Error>);

/// Instances for seeds `seed, seed + 1, ...`; failures to generate are
/// reported per seed.
fn generate(g: &GenArgs, s: &Settings, jobs: usize) -> Result<Vec<Drawn>, String> {
    let profiles: Vec<InstanceProfile> =
        (0..g.count).map(|k| profile(g, s.seed.wrapping_add(k))).collect::<Result<_, _>>()?;
    Ok(pool(jobs).install(|| {
        profiles
            .par_iter()
            .map(|p| (p.seed, gen_instance(p).map(|d| InstanceJson::from_data(&d.data))))
            .collect()
    }))
}

fn gen(g: &GenArgs, s: &Settings, _format: Format, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let made = match generate(g, s, 1) {
        Ok(v) => v,
        Err(e) => return schema_fail(err, &e),
    };
    let mut status = Status::Ok;
    for (seed, r) in made {
        match r {
            Ok(inst) => {
                if writeln!(out, "{}", inst.canonical()).is_err() {
                    return Status::Fail.code();
                }
            }
            Err(e) => {
                let _ = writeln!(err, "afl: seed {seed}: {e}");
                status = status.worst(status_of(&e).worst(Status::Fail));
            }
        }
    }
    status.code()
}

fn scan_kind(g: &GenArgs) -> CheckKind {
    match (g.structure, g.group, g.parity) {
        (StructureArg::Subfield, _, _) => CheckKind::BaseChange,
        (StructureArg::Split, _, _) => CheckKind::Product,
        (_, true, _) => CheckKind::Extend,
        (_, _, ParityArg::Odd) => CheckKind::Vanishing,
        (_, _, ParityArg::Even) => CheckKind::Fl,
    }
}

fn scan(a: &ScanArgs, s: &Settings, jobs: usize, format: Format, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let kind = scan_kind(&a.profile);
    let made = match generate(&a.profile, s, jobs) {
        Ok(v) => v,
        Err(e) => return schema_fail(err, &e),
    };
    let mut journal = match a.journal.as_deref().map(Journal::open).transpose() {
        Ok(j) => j,
        Err(e) => {
            let _ = writeln!(err, "afl: journal: {e}");
            return Status::Fail.code();
        }
    };
    let mut status = Status::Ok;
    let mut insts = Vec::new();
    for (seed, r) in made {
        match r {
            Ok(i) => insts.push(i),
            Err(e) => {
                let _ = writeln!(err, "afl: seed {seed}: {e}");
                status = status.worst(Status::Fail);
            }
        }
    }
    // deterministic digest order; duplicates are checked once
    let mut keyed: Vec<(String, InstanceJson)> = insts.into_iter().map(|i| (i.digest(), i)).collect();
    keyed.sort_by(|x, y| x.0.cmp(&y.0));
    keyed.dedup_by(|x, y| x.0 == y.0);
    let todo: Vec<&(String, InstanceJson)> =
        keyed.iter().filter(|(d, _)| journal.as_ref().is_none_or(|j| j.get(d).is_none())).collect();
    let fresh: Vec<(String, Vec<ReportJson>, Status)> = pool(jobs).install(|| {
        todo.par_iter()
            .map(|(d, i)| {
                let (r, st) = check_instance(kind, i, s);
                (d.clone(), r, st)
            })
            .collect()
    });
    let mut by_digest = std::collections::BTreeMap::new();
    for (d, r, st) in fresh {
        if let Some(j) = journal.as_mut() {
            if let Err(e) = j.record(&d, &r) {
                let _ = writeln!(err, "afl: journal: {e}");
                return Status::Fail.code();
            }
        }
        by_digest.insert(d, (r, st));
    }
    let mut reports = Vec::new();
    for (d, _) in &keyed {
        let (r, st) = match by_digest.remove(d) {
            Some(v) => v,
            None => {
                let r = journal.as_ref().and_then(|j| j.get(d)).cloned().unwrap_or_default();
                let st = journaled_status(&r);
                (r, st)
            }
        };
        status = status.worst(st);
        reports.extend(r);
    }
    finish(out, err, &reports, format, status)
}

fn journaled_status(r: &[ReportJson]) -> Status {
    r.iter().map(ReportJson::status).fold(Status::Ok, Status::worst)
}
