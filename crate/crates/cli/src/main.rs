//! Command-line front door: construct codes, verify them exhaustively (or by
//! the algebraic conditions, or a sampled smoke run), decode erasure
//! instances, evaluate bounds, and run the built-in selftest.
//!
//! Exit codes: 0 success, 1 usage, 2 construction failure, 3 I/O,
//! 4 verification/decoding failure, 5 shape or mode mismatch.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use hlmrc::bounds;
use hlmrc::code::{
    decode_hierarchical, enumerate_mid_patterns, verify_mrc, CodeError, CodeProfile, Variant,
    VerifyMode, VerifyOptions,
};
use hlmrc::constructions::{
    check_theorem2, construct_general, construct_h1_1, construct_h1_1_h2_1, construct_h1_2_h2_1,
    ConstructError, ConstructedCode, Family, ParityCheck,
};
use hlmrc::io::{word_from_json, word_to_json, CodeFile, JobSpec};

const EXIT_USAGE: u8 = 1;
const EXIT_CONSTRUCT: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_FAIL: u8 = 4;
const EXIT_SHAPE: u8 = 5;

#[derive(Parser)]
#[command(name = "hlmrc", version, about = "hierarchical maximally recoverable erasure codes")]
struct Cli {
    /// Emit one machine-parseable JSON document on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a parity-check matrix and certificate for a profile.
    Construct(ConstructArgs),
    /// Verify maximal recoverability of a constructed code file.
    Verify(VerifyArgs),
    /// Fill erased symbols of a received word.
    Decode(DecodeArgs),
    /// Evaluate distance and field-size bounds for a profile.
    Bounds(BoundsArgs),
    /// Run the built-in property suite on tiny profiles.
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    General,
    H1eq1,
    H11h21,
    H12h21,
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    r1: usize,
    #[arg(long)]
    r2: usize,
    #[arg(long)]
    h1: usize,
    #[arg(long)]
    h2: usize,
    #[arg(long)]
    delta: usize,
}

#[derive(Args)]
struct ConstructArgs {
    /// Construction family.
    #[arg(long, value_enum, required_unless_present = "job")]
    family: Option<FamilyArg>,
    #[command(flatten)]
    profile: Option<ProfileArgs>,
    /// JSON construction descriptor {"family", "profile", "seed": null}.
    #[arg(long, conflicts_with = "family")]
    job: Option<PathBuf>,
    /// Output path for the code file.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Theorem2,
    Sample,
}

#[derive(Args)]
struct VerifyArgs {
    /// Code file produced by `construct`.
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "exhaustive")]
    mode: ModeArg,
    /// Worker threads for the pattern space.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Sample count for --mode sample.
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    /// Sample seed for --mode sample.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct DecodeArgs {
    /// Code file produced by `construct`.
    #[arg(short, long)]
    input: PathBuf,
    /// Received word: JSON list with null for erasures.
    #[arg(long)]
    word: PathBuf,
    /// Optional output path for the completed codeword.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    DataLocal,
    Local,
    Hdl,
    Hl,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, value_enum, default_value = "hl")]
    variant: VariantArg,
    #[command(flatten)]
    profile: ProfileArgs,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let code = match cli.command {
        Command::Construct(args) => cmd_construct(args, cli.json),
        Command::Verify(args) => cmd_verify(args, cli.json),
        Command::Decode(args) => cmd_decode(args, cli.json),
        Command::Bounds(args) => cmd_bounds(args, cli.json),
        Command::Selftest(args) => cmd_selftest(args, cli.json),
    };
    ExitCode::from(code)
}

fn build(family: Family, profile: &CodeProfile) -> Result<ConstructedCode, ConstructError> {
    match family {
        Family::General => construct_general(profile),
        Family::H1Eq1 => construct_h1_1(profile),
        Family::H11H21 => construct_h1_1_h2_1(profile),
        Family::H12H21 => construct_h1_2_h2_1(profile),
        Family::DerivedHdl => Err(ConstructError::WrongFamily(
            "derived codes come from derive, not construct".into(),
        )),
    }
}

fn cmd_construct(args: ConstructArgs, as_json: bool) -> u8 {
    let (family, profile) = if let Some(job_path) = &args.job {
        let text = match std::fs::read_to_string(job_path) {
            Ok(t) => t,
            Err(e) => return io_err(&format!("{}: {e}", job_path.display())),
        };
        let job: JobSpec = match serde_json::from_str(&text) {
            Ok(j) => j,
            Err(e) => return io_err(&format!("job file: {e}")),
        };
        if let Err(e) = job.validate() {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
        let profile = match job.profile.to_profile() {
            Ok(p) => p,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
        };
        (job.family, profile)
    } else {
        let f = match args.family.expect("required by clap") {
            FamilyArg::General => Family::General,
            FamilyArg::H1eq1 => Family::H1Eq1,
            FamilyArg::H11h21 => Family::H11H21,
            FamilyArg::H12h21 => Family::H12H21,
        };
        let Some(p) = &args.profile else {
            eprintln!("error: profile parameters required (--k --r1 --r2 --h1 --h2 --delta)");
            return EXIT_USAGE;
        };
        let profile = match CodeProfile::hl(p.k, p.r1, p.r2, p.h1, p.h2, p.delta) {
            Ok(p) => p,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
        };
        (f, profile)
    };

    let built = match build(family, &profile) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("construction failed: {e}");
            return EXIT_CONSTRUCT;
        }
    };
    let file = CodeFile::from_constructed(&built);
    let text = serde_json::to_string_pretty(&file).expect("serialize");
    if let Err(e) = std::fs::write(&args.output, text) {
        return io_err(&format!("{}: {e}", args.output.display()));
    }
    let summary = json!({
        "command": "construct",
        "family": built.code.family,
        "n": built.code.profile.n,
        "k": built.code.profile.k,
        "parity_rows": built.code.profile.parity_rows(),
        "certificate": built.certificate,
        "output": args.output.display().to_string(),
    });
    if as_json {
        println!("{summary}");
    } else {
        println!(
            "constructed n = {}, k = {} ({} parity rows); certificate: {:?} after {} checks",
            built.code.profile.n,
            built.code.profile.k,
            built.code.profile.parity_rows(),
            built.certificate.method,
            built.certificate.checks,
        );
        for note in &built.certificate.notes {
            println!("  note: {note}");
        }
        println!("wrote {}", args.output.display());
    }
    0
}

fn read_code(path: &PathBuf) -> Result<(ParityCheck, CodeFile), u8> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(&format!("{}: {e}", path.display())))?;
    let file: CodeFile =
        serde_json::from_str(&text).map_err(|e| io_err(&format!("code file: {e}")))?;
    let pc = file.to_parity_check().map_err(|e| {
        eprintln!("error: {e}");
        EXIT_SHAPE
    })?;
    Ok((pc, file))
}

fn cmd_verify(args: VerifyArgs, as_json: bool) -> u8 {
    let (pc, _) = match read_code(&args.input) {
        Ok(v) => v,
        Err(code) => return code,
    };
    if let Err(e) = pc.validate() {
        eprintln!("band structure invalid: {e}");
        return EXIT_SHAPE;
    }
    let (passed, checked, witness, mode_name) = match args.mode {
        ModeArg::Theorem2 => {
            if pc.family != Family::General {
                eprintln!(
                    "error: algebraic certification is only available for the general family"
                );
                return EXIT_SHAPE;
            }
            let mut checked = 0u64;
            let mut failed = None;
            for pat in enumerate_mid_patterns(&pc.profile) {
                checked += 1;
                match check_theorem2(&pc, &pat) {
                    Ok(true) => {}
                    Ok(false) => {
                        failed = Some(pat);
                        break;
                    }
                    Err(e) => {
                        eprintln!("error: {e}");
                        return EXIT_SHAPE;
                    }
                }
            }
            (
                failed.is_none(),
                checked,
                failed.map(|pattern| json!({ "pattern": pattern })),
                "theorem2",
            )
        }
        _ => {
            let mode = match args.mode {
                ModeArg::Exhaustive => VerifyMode::Exhaustive,
                ModeArg::Sample => VerifyMode::Sample {
                    count: args.samples,
                    seed: args.seed,
                },
                ModeArg::Theorem2 => unreachable!(),
            };
            let opts = VerifyOptions {
                jobs: args.jobs.max(1),
                mode,
            };
            let report = match verify_mrc(&pc.matrix, &pc.profile, &opts) {
                Ok(r) => r,
                Err(CodeError::ShapeMismatch(m)) => {
                    eprintln!("shape mismatch: {m}");
                    return EXIT_SHAPE;
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_SHAPE;
                }
            };
            let witness = report
                .failure_witness
                .as_ref()
                .map(|w| serde_json::to_value(w).expect("witness"));
            let name = match args.mode {
                ModeArg::Exhaustive => "exhaustive",
                _ => "sample (non-exhaustive)",
            };
            (report.passed, report.patterns_checked, witness, name)
        }
    };
    if as_json {
        println!(
            "{}",
            json!({
                "command": "verify",
                "mode": mode_name,
                "passed": passed,
                "patterns_checked": checked,
                "witness": witness,
            })
        );
    } else {
        println!("mode: {mode_name}");
        println!("patterns_checked: {checked}");
        match &witness {
            None => println!("passed: {passed}"),
            Some(w) => println!("FAILED, witness: {w}"),
        }
    }
    if passed {
        0
    } else {
        EXIT_FAIL
    }
}

fn cmd_decode(args: DecodeArgs, as_json: bool) -> u8 {
    let (pc, _) = match read_code(&args.input) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let text = match std::fs::read_to_string(&args.word) {
        Ok(t) => t,
        Err(e) => return io_err(&format!("{}: {e}", args.word.display())),
    };
    let value: serde_json::Value = match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(e) => return io_err(&format!("received word: {e}")),
    };
    let word = match word_from_json(&value, pc.matrix.tower(), pc.matrix.level()) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_SHAPE;
        }
    };
    match decode_hierarchical(&pc.matrix, &pc.profile, &word) {
        Ok(decoded) => {
            let out = word_to_json(&decoded.iter().cloned().map(Some).collect::<Vec<_>>());
            if let Some(path) = &args.output {
                if let Err(e) = std::fs::write(path, out.to_string()) {
                    return io_err(&format!("{}: {e}", path.display()));
                }
            }
            if as_json {
                println!("{}", json!({"command": "decode", "ok": true, "codeword": out}));
            } else {
                println!("{out}");
            }
            0
        }
        Err(CodeError::UnrecoverablePattern { deficit }) => {
            let msg = format!("unrecoverable erasure pattern: rank deficit {deficit}");
            if as_json {
                println!(
                    "{}",
                    json!({"command": "decode", "ok": false, "diagnosis": msg})
                );
            } else {
                eprintln!("{msg}");
            }
            EXIT_FAIL
        }
        Err(CodeError::InconsistentReceived) => {
            let msg = "known symbols are inconsistent with the code".to_string();
            if as_json {
                println!(
                    "{}",
                    json!({"command": "decode", "ok": false, "diagnosis": msg})
                );
            } else {
                eprintln!("{msg}");
            }
            EXIT_FAIL
        }
        Err(CodeError::ShapeMismatch(m)) => {
            eprintln!("shape mismatch: {m}");
            EXIT_SHAPE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_SHAPE
        }
    }
}

fn cmd_bounds(args: BoundsArgs, as_json: bool) -> u8 {
    let p = &args.profile;
    let variant = match args.variant {
        VariantArg::DataLocal => Variant::DataLocal,
        VariantArg::Local => Variant::Local,
        VariantArg::Hdl => Variant::Hdl,
        VariantArg::Hl => Variant::Hl,
    };
    let profile = match CodeProfile::make(variant, p.k, p.r1, p.r2, p.h1, p.h2, p.delta) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let mut rows: Vec<serde_json::Value> = Vec::new();
    let mut push = |name: &str, applicable: bool, value: i64, assumptions: Vec<String>| {
        rows.push(json!({
            "bound": name,
            "applicable": applicable,
            "value": value,
            "assumptions": assumptions,
        }));
    };
    match profile.variant {
        Variant::DataLocal | Variant::Local => {
            let (r, h) = (profile.r(), profile.h());
            match bounds::dmin_upper_rdelta(profile.n, profile.k, r, profile.delta + 1) {
                Ok(v) => push("dmin upper (r,delta)", true, v, vec![]),
                Err(e) => push("dmin upper (r,delta)", false, 0, vec![e.to_string()]),
            }
            let exact = if profile.variant == Variant::DataLocal {
                bounds::dmin_data_local(h, profile.delta) as i64
            } else {
                bounds::dmin_local(h, r, profile.delta).map(|v| v as i64).unwrap_or(0)
            };
            push("dmin exact (MRC)", true, exact, vec![]);
        }
        Variant::Hdl | Variant::Hl => {
            let d1 = profile.h2 + profile.delta + 1;
            let d2 = profile.delta + 1;
            match bounds::dmin_upper_hier(profile.n, profile.k, profile.r1, profile.r2, d1, d2) {
                Ok(v) => push(
                    "dmin upper (hierarchical)",
                    true,
                    v,
                    vec![format!("delta1 = {d1}, delta2 = {d2}")],
                ),
                Err(e) => push("dmin upper (hierarchical)", false, 0, vec![e.to_string()]),
            }
            if profile.variant == Variant::Hdl {
                push(
                    "dmin exact (HDL-MRC)",
                    true,
                    bounds::dmin_hdl(profile.h1, profile.h2, profile.delta) as i64,
                    vec![],
                );
            }
            if profile.variant == Variant::Hl {
                for (name, r) in [
                    ("field size lb (moderate h1)", bounds::field_size_lb_moderate_h1(&profile)),
                    ("field size lb (small h1+h2)", bounds::field_size_lb_small_sum(&profile)),
                    ("field size lb (large h1)", bounds::field_size_lb_large_h1(&profile)),
                ] {
                    let mut assumptions = r.assumptions.clone();
                    assumptions.extend(r.precondition_failures.clone());
                    push(name, r.applicable, r.value, assumptions);
                }
            }
        }
    }
    if as_json {
        println!("{}", json!({"command": "bounds", "profile": hlmrc::io::ProfileRepr::from(&profile), "rows": rows}));
    } else {
        println!("{:<32} {:<6} {:>8}  assumptions", "bound", "applies", "value");
        for row in &rows {
            println!(
                "{:<32} {:<6} {:>8}  {}",
                row["bound"].as_str().unwrap(),
                row["applicable"].as_bool().unwrap(),
                row["value"].as_i64().unwrap(),
                row["assumptions"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(|a| a.as_str().unwrap_or(""))
                    .collect::<Vec<_>>()
                    .join("; "),
            );
        }
    }
    0
}

fn cmd_selftest(args: SelftestArgs, as_json: bool) -> u8 {
    let report = hlmrc::selftest::run(args.jobs.max(1));
    if as_json {
        let lines: Vec<serde_json::Value> = report
            .lines
            .iter()
            .map(|l| json!({"name": l.name, "passed": l.passed, "detail": l.detail}))
            .collect();
        println!(
            "{}",
            json!({"command": "selftest", "passed": report.passed, "lines": lines})
        );
    } else {
        for l in &report.lines {
            println!(
                "{} {}: {}",
                if l.passed { "PASS" } else { "FAIL" },
                l.name,
                l.detail
            );
        }
        println!("selftest: {}", if report.passed { "PASS" } else { "FAIL" });
    }
    if report.passed {
        0
    } else {
        EXIT_FAIL
    }
}

fn io_err(msg: &str) -> u8 {
    eprintln!("i/o error: {msg}");
    EXIT_IO
}
