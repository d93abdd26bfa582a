mod output;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use northcott_core::algebraic::RadicalMonomial;
use northcott_core::group::{field_lattice_report, subgroup_census, FieldLattice};
use northcott_core::heights::{weighted_height, weil_height, Weight};
use northcott_core::matrix::{
    class_degree_bracket, prop_opnorth_check, prop_spectral_check, spectral_height, weighted_spectral_height,
    StructuredMatrix,
};
use northcott_core::northcott::{enumerate_bounded, northcott_bracket, weight_from_family, FamilyCase};
use northcott_core::tower::{build_tower, verify_tower, BuildOptions, TowerSpec};
use northcott_core::{selftest, Error, ErrorClass, LogLinear};

use output::{sig12, to_json, Run};

#[derive(Parser)]
#[command(name = "northcott-lab", version, about = "Exact weighted heights, towers and Northcott brackets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build or re-verify a tower of prime-degree radical extensions.
    #[command(subcommand)]
    Tower(TowerCmd),
    /// Heights of single algebraic numbers.
    #[command(subcommand)]
    Height(HeightCmd),
    /// Northcott number brackets, bounded enumeration and family weights.
    #[command(subcommand)]
    Northcott(NorthcottCmd),
    /// Subgroups of Z/d ⋊ (Z/d)^×.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Spectral and operator heights of matrices.
    #[command(subcommand)]
    Matrix(MatrixCmd),
    /// Run the reproducibility suite.
    Selftest {
        /// Only criteria 1, 4 and 6.
        #[arg(long)]
        quick: bool,
        #[arg(long, conflicts_with = "quick")]
        criterion: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum TowerCmd {
    Build {
        /// Target value, e.g. "log(2)" or "1/2*log(3) + log(5)".
        #[arg(long)]
        c: LogLinear,
        #[arg(long, default_value_t = 1)]
        n: u64,
        /// Weight spec such as const:1 or gamma:1/2.
        #[arg(long)]
        weight: Weight,
        #[arg(long)]
        levels: usize,
        /// Only admit degrees d_i > N.
        #[arg(long)]
        require_d_gt_n: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Verify {
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum HeightCmd {
    Eval {
        /// Radical monomial, e.g. 5/7^1/2 or zeta_8^3*2^(1/3).
        #[arg(long)]
        radical: RadicalMonomial,
        #[arg(long, default_value = "const:1")]
        weight: Weight,
        /// Print the full JSON record instead of one line.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    NorZero,
    NorInfinite,
}

#[derive(Subcommand)]
enum NorthcottCmd {
    Bracket {
        spec: PathBuf,
        #[arg(long)]
        levels: Option<usize>,
        /// CSV table; the JSON bracket goes to `--json` if given.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    Enumerate {
        #[arg(long)]
        deg: usize,
        #[arg(long)]
        bound: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    WeightFromFamily {
        /// JSON list of {"degree": d, "height": "log(2)/3"}.
        #[arg(long)]
        samples: PathBuf,
        #[arg(long, value_enum)]
        case: CaseArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GroupCmd {
    Census {
        /// A single d or a range like 3..31; non-prime d in a range are skipped.
        #[arg(long)]
        d: String,
        /// Include every subgroup's element list.
        #[arg(long)]
        members: bool,
        /// Include the matching subfield lattice.
        #[arg(long)]
        fields: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ChainArgs {
    spec: PathBuf,
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 8)]
    levels: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum MatrixCmd {
    Spectral {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        weight: Option<Weight>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    OpnorthCheck(ChainArgs),
    PropSpectralCheck(ChainArgs),
}

fn exit_code(class: ErrorClass) -> u8 {
    match class {
        ErrorClass::Usage => 2,
        ErrorClass::Precondition => 3,
        ErrorClass::Budget => 4,
    }
}

fn class_name(class: ErrorClass) -> &'static str {
    match class {
        ErrorClass::Usage => "usage",
        ErrorClass::Precondition => "precondition",
        ErrorClass::Budget => "budget",
    }
}

fn report_error(kind: &str, class: ErrorClass, message: &str) -> ExitCode {
    let body = json!({ "error": { "kind": kind, "class": class_name(class), "message": message } });
    eprintln!("{body}");
    ExitCode::from(exit_code(class))
}

fn configure_threads() -> Result<(), Error> {
    let Ok(raw) = std::env::var("NORTHCOTT_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Error::InvalidInput(format!("NORTHCOTT_LAB_THREADS={raw:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidInput(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            return report_error("Usage", ErrorClass::Usage, e.to_string().trim());
        }
    };
    if let Err(e) = configure_threads() {
        return report_error(e.kind(), e.class(), &e.to_string());
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(Failure::Lib(e)) => report_error(e.kind(), e.class(), &e.to_string()),
        Err(Failure::Check(msg)) => report_error("CheckFailed", ErrorClass::Precondition, &msg),
    }
}

enum Failure {
    Lib(Error),
    /// A verification that ran to completion and found a violation.
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn parse_d_range(s: &str) -> Result<Vec<u64>, Error> {
    let bad = || Error::InvalidInput(format!("--d expects a number or a range a..b, got {s:?}"));
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim_start_matches('=').trim().parse().map_err(|_| bad())?;
        let ds: Vec<u64> = (a.max(3)..=b).filter(|&d| d % 2 == 1 && northcott_core::exact::is_prime_u64(d)).collect();
        if ds.is_empty() {
            return Err(Error::InvalidInput(format!("no odd primes in {s}")));
        }
        Ok(ds)
    } else {
        Ok(vec![s.trim().parse().map_err(|_| bad())?])
    }
}

#[derive(Serialize)]
struct CensusOut {
    d: u64,
    group_order: u64,
    subgroup_count: usize,
    counts_by_order: BTreeMap<u64, usize>,
    claims: northcott_core::group::CensusClaims,
    all_claims_hold: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    subgroups: Option<Vec<Vec<(u64, u64)>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fields: Option<FieldLattice>,
}

#[derive(Deserialize)]
struct SampleIn {
    degree: u64,
    height: serde_json::Value,
}

fn sample_height(v: &serde_json::Value) -> Result<LogLinear, Error> {
    match v {
        serde_json::Value::String(s) => s.parse(),
        other => serde_json::from_value(other.clone()).map_err(|e| Error::InvalidInput(format!("height: {e}"))),
    }
}

fn bracket_csv(b: &northcott_core::northcott::NorBracket) -> String {
    let mut s = String::from("i,d,p,q,lower,upper,lower_approx,upper_approx,lower_envelope_approx,upper_envelope_approx\n");
    for l in &b.levels {
        let lower = l.lower.as_ref().map(|x| x.to_string()).unwrap_or_default();
        let lower_f = l.lower.as_ref().map(|x| sig12(x.approx())).unwrap_or_default();
        let env_f = l.lower_envelope.as_ref().map(|x| sig12(x.approx())).unwrap_or_default();
        s.push_str(&format!(
            "{},{},{},{},\"{}\",\"{}\",{},{},{},{}\n",
            l.i,
            l.d,
            l.p,
            l.q,
            lower,
            l.upper,
            lower_f,
            sig12(l.upper.approx()),
            env_f,
            sig12(l.upper_envelope.approx()),
        ));
    }
    s
}

fn run(command: Command) -> Result<ExitCode, Failure> {
    let mut io = Run::new();
    match command {
        Command::Tower(TowerCmd::Build { c, n, weight, levels, require_d_gt_n, out }) => {
            let spec = build_tower(&c, n, &weight, levels, &BuildOptions { require_d_gt_n })?;
            io.emit(out.as_ref(), &to_json(&spec))?;
        }
        Command::Tower(TowerCmd::Verify { spec, out }) => {
            let spec = TowerSpec::from_json(&io.read(&spec)?)?;
            let reports = verify_tower(&spec)?;
            let all_ok = reports.iter().all(|r| r.all_ok());
            io.emit(out.as_ref(), &to_json(&json!({ "all_ok": all_ok, "levels": reports })))?;
            io.finish()?;
            if !all_ok {
                let bad: Vec<usize> = reports.iter().filter(|r| !r.all_ok()).map(|r| r.i).collect();
                return Err(Failure::Check(format!("levels {bad:?} fail verification")));
            }
            return Ok(ExitCode::SUCCESS);
        }
        Command::Height(HeightCmd::Eval { radical, weight, json }) => {
            let h = weil_height(&radical);
            let hw = weighted_height(&radical, &weight)?;
            if json {
                let record = json!({
                    "radical": radical,
                    "display": radical.to_string(),
                    "degree": radical.degree()?.to_string(),
                    "weight": weight,
                    "height": h,
                    "weighted_height": hw,
                });
                io.emit(None, &to_json(&record))?;
            } else {
                println!("{hw} ≈ {:.4}", hw.approx());
            }
        }
        Command::Northcott(NorthcottCmd::Bracket { spec, levels, out, json }) => {
            let spec = TowerSpec::from_json(&io.read(&spec)?)?;
            let k = levels.unwrap_or(spec.levels.len());
            let b = northcott_bracket(&spec, k)?;
            io.emit(out.as_ref(), &bracket_csv(&b))?;
            if let Some(path) = json {
                io.emit(Some(&path), &to_json(&b))?;
            }
        }
        Command::Northcott(NorthcottCmd::Enumerate { deg, bound, out }) => {
            let e = enumerate_bounded(deg, bound)?;
            io.emit(out.as_ref(), &to_json(&e))?;
        }
        Command::Northcott(NorthcottCmd::WeightFromFamily { samples, case, out }) => {
            let raw: Vec<SampleIn> = serde_json::from_str(&io.read(&samples)?)
                .map_err(|e| Error::InvalidInput(format!("samples: {e}")))?;
            let samples: Vec<(u64, LogLinear)> =
                raw.iter().map(|s| Ok((s.degree, sample_height(&s.height)?))).collect::<Result<_, Error>>()?;
            let case = match case {
                CaseArg::NorZero => FamilyCase::NorZero,
                CaseArg::NorInfinite => FamilyCase::NorInfinite,
            };
            let fw = weight_from_family(&samples, case)?;
            io.emit(out.as_ref(), &to_json(&fw))?;
        }
        Command::Group(GroupCmd::Census { d, members, fields, out }) => {
            let mut report = Vec::new();
            for d in parse_d_range(&d)? {
                let c = subgroup_census(d)?;
                report.push(CensusOut {
                    d,
                    group_order: c.group_order,
                    subgroup_count: c.subgroups.len(),
                    counts_by_order: c.counts_by_order.clone(),
                    all_claims_hold: c.claims.all(),
                    claims: c.claims.clone(),
                    subgroups: members
                        .then(|| c.subgroups.iter().map(|s| s.iter().map(|g| (g.a, g.b)).collect()).collect()),
                    fields: if fields { Some(field_lattice_report(d)?) } else { None },
                });
            }
            io.emit(out.as_ref(), &to_json(&report))?;
        }
        Command::Matrix(MatrixCmd::Spectral { file, weight, out }) => {
            let a: StructuredMatrix = serde_json::from_str(&io.read(&file)?)
                .map_err(|e| Error::InvalidInput(format!("matrix: {e}")))?;
            a.validate()?;
            let mut record = json!({
                "size": a.size(),
                "spectral_height": spectral_height(&a)?,
                "class_degree": class_degree_bracket(&a)?,
            });
            if let Some(w) = weight {
                record["weight"] = serde_json::to_value(&w).expect("weight serializes");
                record["weighted_spectral_height"] =
                    serde_json::to_value(weighted_spectral_height(&a, &w)?).expect("bracket serializes");
            }
            io.emit(out.as_ref(), &to_json(&record))?;
        }
        Command::Matrix(MatrixCmd::OpnorthCheck(args)) => {
            let spec = TowerSpec::from_json(&io.read(&args.spec)?)?;
            let r = prop_opnorth_check(&spec, args.n, args.levels)?;
            io.emit(args.out.as_ref(), &to_json(&r))?;
            io.finish()?;
            if !r.all_ok {
                return Err(Failure::Check("operator-height witness chain failed".into()));
            }
            return Ok(ExitCode::SUCCESS);
        }
        Command::Matrix(MatrixCmd::PropSpectralCheck(args)) => {
            let spec = TowerSpec::from_json(&io.read(&args.spec)?)?;
            let r = prop_spectral_check(&spec, args.n, args.levels)?;
            io.emit(args.out.as_ref(), &to_json(&r))?;
            io.finish()?;
            if !r.all_ok {
                return Err(Failure::Check("spectral-height witness chain failed".into()));
            }
            return Ok(ExitCode::SUCCESS);
        }
        Command::Selftest { quick, criterion, out } => {
            let ids = match (quick, criterion) {
                (true, _) => selftest::QUICK.to_vec(),
                (false, Some(k)) => {
                    if !selftest::all_ids().contains(&k) {
                        return Err(Error::InvalidInput(format!("no criterion {k}; choose 1..=9")).into());
                    }
                    vec![k]
                }
                (false, None) => selftest::all_ids(),
            };
            let mut results = Vec::new();
            for id in ids {
                let r = selftest::run_criterion(id);
                eprintln!("{}", r.line());
                results.push(r);
            }
            let passed = results.iter().all(|r| r.passed);
            io.emit(out.as_ref(), &to_json(&json!({ "passed": passed, "criteria": results })))?;
            io.finish()?;
            return Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
    }
    io.finish()?;
    Ok(ExitCode::SUCCESS)
}
