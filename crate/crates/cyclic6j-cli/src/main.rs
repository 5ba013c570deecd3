use clap::{Args, Parser, Subcommand, ValueEnum};
use cyclic6j::charged::{c_sixj, zeta_candidate, ChargePair};
use cyclic6j::intertwiners::{fuse_triple_recoupling_normalized, sixj_normalized, Normalization};
use cyclic6j::special_functions::g_one;
use cyclic6j::tetra::{evaluate_xi_report, DecoratedTetrahedron};
use cyclic6j::verify::{parse_relations, verify, VerificationReport, RNG_NAME};
use cyclic6j::weyl_reps::{FusedTriple, StandardRep};
use cyclic6j::{Context, Error, C64};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use std::process::ExitCode;

/// Largest supported N; beyond it the products of roots of unity lose too much precision.
const MAX_N: i64 = 13;
const DEFAULT_SWEEP: [i64; 3] = [3, 5, 7];

#[derive(Parser)]
#[command(
    name = "cyclic6j",
    version,
    about = "Cyclic 6j-symbols at odd roots of unity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Constants attached to N.
    Ctx {
        #[command(subcommand)]
        what: CtxCommand,
    },
    /// Check a relation on seeded random samples.
    Verify(VerifyArgs),
    /// Compute a (charged) 6j-symbol and write its JSON dump.
    Sixj(SixjArgs),
    /// Decorated tetrahedra.
    Tetra {
        #[command(subcommand)]
        what: TetraCommand,
    },
}

#[derive(Subcommand)]
enum CtxCommand {
    Info {
        #[arg(long = "N", default_value_t = 3)]
        n: i64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Subcommand)]
enum TetraCommand {
    /// Evaluate Ξ for a tetrahedron JSON file.
    Eval {
        input: PathBuf,
        #[arg(long = "N", default_value_t = 3)]
        n: i64,
        /// Ignore the charges even when present.
        #[arg(long)]
        uncharged: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct VerifyArgs {
    /// Relation name, or `all`.
    relation: String,
    /// Odd N; repeat for a sweep. Defaults to 3, 5, 7.
    #[arg(long = "N")]
    n: Vec<i64>,
    #[arg(long, default_value_t = 50)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Overrides every relation's default threshold.
    #[arg(long, env = "CYCLIC6J_TOL")]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct SixjArgs {
    #[arg(long = "N", default_value_t = 3)]
    n: i64,
    /// JSON file with `rho`, `mu`, `nu` and optional `branches`.
    #[arg(long, conflicts_with_all = ["rho", "mu", "nu"])]
    params: Option<PathBuf>,
    /// `a_re,a_im,y_re,y_im`.
    #[arg(long, allow_hyphen_values = true)]
    rho: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<String>,
    /// Charges `a,c`.
    #[arg(long, allow_hyphen_values = true)]
    charges: Option<String>,
    #[arg(long, value_enum, default_value_t = Norm::Corrected)]
    normalization: Norm,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Norm {
    Corrected,
    Literal,
}

impl From<Norm> for Normalization {
    fn from(n: Norm) -> Self {
        match n {
            Norm::Corrected => Normalization::Corrected,
            Norm::Literal => Normalization::Literal,
        }
    }
}

#[derive(Deserialize)]
struct SixjParams {
    rho: StandardRep,
    mu: StandardRep,
    nu: StandardRep,
    #[serde(default)]
    branches: Option<[usize; 3]>,
}

/// Invalid input or usage; exit code 2.
#[derive(Debug)]
struct Failure(String);

/// Text for stdout, and the message of a failed verification (exit code 1).
#[derive(Debug, Default)]
struct Report {
    stdout: String,
    failed: Option<String>,
}

impl From<String> for Report {
    fn from(stdout: String) -> Self {
        Report {
            stdout,
            failed: None,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.to_string())
    }
}

fn context(n: i64) -> Result<Context, Failure> {
    if n > MAX_N {
        return Err(Failure(format!(
            "N = {n} exceeds the supported maximum {MAX_N}"
        )));
    }
    Ok(Context::new(n)?)
}

/// Writes `text` to `out` when given, otherwise returns it for stdout.
fn write_or_return(out: &Option<PathBuf>, text: String) -> Result<String, Failure> {
    match out {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| Failure(format!("{}: {e}", p.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn c2(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Serialize)]
struct CtxInfo {
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "P")]
    p: usize,
    omega: [f64; 2],
    omega_half: [f64; 2],
    g1_norm: f64,
    sqrt_n: f64,
    zeta_9_8: [f64; 2],
    zeta_3_8: [f64; 2],
}

fn cmd_ctx_info(n: i64, format: Format) -> Result<Report, Failure> {
    let ctx = context(n)?;
    let info = CtxInfo {
        n: ctx.n(),
        p: ctx.p(),
        omega: c2(ctx.omega()),
        omega_half: c2(ctx.omega_half()),
        g1_norm: g_one(&ctx).norm(),
        sqrt_n: (ctx.n() as f64).sqrt(),
        zeta_9_8: c2(zeta_candidate(&ctx, 9)),
        zeta_3_8: c2(zeta_candidate(&ctx, 3)),
    };
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&info).expect("serializable") + "\n",
        Format::Text => [
            format!("N          {}", info.n),
            format!("P          {}", info.p),
            format!(
                "omega      {:+.17e} {:+.17e}i",
                info.omega[0], info.omega[1]
            ),
            format!(
                "omega^1/2  {:+.17e} {:+.17e}i",
                info.omega_half[0], info.omega_half[1]
            ),
            format!("|g(1)|     {:.17e}", info.g1_norm),
            format!("sqrt(N)    {:.17e}", info.sqrt_n),
            format!(
                "zeta 9/8   {:+.17e} {:+.17e}i",
                info.zeta_9_8[0], info.zeta_9_8[1]
            ),
            format!(
                "zeta 3/8   {:+.17e} {:+.17e}i",
                info.zeta_3_8[0], info.zeta_3_8[1]
            ),
        ]
        .map(|l| l + "\n")
        .concat(),
    };
    Ok(text.into())
}

fn cmd_verify(args: VerifyArgs) -> Result<Report, Failure> {
    let relations = parse_relations(&args.relation)?;
    let ns = if args.n.is_empty() {
        DEFAULT_SWEEP.to_vec()
    } else {
        args.n.clone()
    };
    if args.samples == 0 {
        return Err(Failure("--samples must be positive".into()));
    }
    let mut reports: Vec<VerificationReport> = Vec::new();
    for &n in &ns {
        let ctx = context(n)?;
        reports.extend(verify(&relations, &ctx, args.samples, args.seed, args.tol));
    }
    let summary: String = reports.iter().map(|r| r.summary_line() + "\n").collect();
    let body = match args.format {
        Format::Json => serde_json::to_string_pretty(&reports).expect("serializable") + "\n",
        Format::Text => format!("# rng: {RNG_NAME}\n{summary}"),
    };
    let mut stdout = write_or_return(&args.out, body)?;
    if args.out.is_some() {
        stdout = summary;
    }
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{} (N={})", r.relation, r.n))
        .collect();
    Ok(Report {
        stdout,
        failed: (!failed.is_empty()).then(|| format!("failed: {}", failed.join(", "))),
    })
}

fn parse_floats<const K: usize>(s: &str, what: &str) -> Result<[f64; K], Failure> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Failure(format!("--{what}: {e}")))?;
    v.try_into()
        .map_err(|_| Failure(format!("--{what}: expected {K} comma-separated numbers")))
}

fn rep_arg(s: &Option<String>, what: &str) -> Result<StandardRep, Failure> {
    let s = s
        .as_ref()
        .ok_or_else(|| Failure(format!("missing --{what}")))?;
    let [ar, ai, yr, yi] = parse_floats::<4>(s, what)?;
    Ok(StandardRep {
        a: C64::new(ar, ai),
        y: C64::new(yr, yi),
    })
}

fn cmd_sixj(args: SixjArgs) -> Result<Report, Failure> {
    let ctx = context(args.n)?;
    let (reps, branches) = match &args.params {
        Some(p) => {
            let text =
                std::fs::read_to_string(p).map_err(|e| Failure(format!("{}: {e}", p.display())))?;
            let sp: SixjParams = serde_json::from_str(&text)
                .map_err(|e| Failure(format!("{}: {e}", p.display())))?;
            ([sp.rho, sp.mu, sp.nu], sp.branches)
        }
        None => (
            [
                rep_arg(&args.rho, "rho")?,
                rep_arg(&args.mu, "mu")?,
                rep_arg(&args.nu, "nu")?,
            ],
            None,
        ),
    };
    let norm: Normalization = args.normalization.into();
    let triple = match branches {
        Some(b) => {
            let t = FusedTriple::with_branches(&ctx, &reps[0], &reps[1], &reps[2], b)?;
            if t.convention_residual(&ctx) >= ctx.tol_rel {
                return Err(Failure(format!(
                    "branches {b:?} violate the sign convention (residual {:.3e})",
                    t.convention_residual(&ctx)
                )));
            }
            t
        }
        None => fuse_triple_recoupling_normalized(&ctx, &reps[0], &reps[1], &reps[2], norm)?,
    };
    let base = sixj_normalized(&ctx, &triple, norm)?;
    let dump = match &args.charges {
        Some(s) => {
            let [a, c] = parse_floats::<2>(s, "charges")?;
            if a.fract() != 0.0 || c.fract() != 0.0 {
                return Err(Failure("--charges: expected integers".into()));
            }
            c_sixj(&ctx, &base, ChargePair::new(&ctx, a as i64, c as i64)).to_dump()
        }
        None => base.to_dump(),
    };
    let text = serde_json::to_string_pretty(&dump).expect("serializable") + "\n";
    Ok(write_or_return(&args.out, text)?.into())
}

fn cmd_tetra_eval(
    input: PathBuf,
    n: i64,
    uncharged: bool,
    format: Format,
) -> Result<Report, Failure> {
    let ctx = context(n)?;
    let text = std::fs::read_to_string(&input)
        .map_err(|e| Failure(format!("{}: {e}", input.display())))?;
    let tet: DecoratedTetrahedron =
        serde_json::from_str(&text).map_err(|e| Failure(format!("{}: {e}", input.display())))?;
    let use_charges = tet.charges.is_some() && !uncharged;
    let rep = evaluate_xi_report(&ctx, &tet, use_charges)?;
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&rep).expect("serializable") + "\n",
        Format::Text => [
            format!(
                "xi                 {:+.17e} {:+.17e}i",
                rep.value[0], rep.value[1]
            ),
            format!("star               {:+}", rep.star),
            match rep.charges {
                Some(q) => format!("charges (a, c)     ({}, {})", q.a, q.c),
                None => "charges (a, c)     none".to_string(),
            },
            format!("on support         {}", rep.on_support),
            format!("cocycle residual   {:.3e}", rep.cocycle_residual),
            format!("psi residual       {:.3e}", rep.psi_residual),
            format!("sign convention    {:.3e}", rep.convention_residual),
            format!("cut margin         {:.3e}", rep.margin),
            format!("fusion branches    {:?}", rep.triple.branches),
        ]
        .map(|l| l + "\n")
        .concat(),
    };
    Ok(text.into())
}

fn dispatch(cli: Cli) -> Result<Report, Failure> {
    match cli.command {
        Command::Ctx {
            what: CtxCommand::Info { n, format },
        } => cmd_ctx_info(n, format),
        Command::Verify(args) => cmd_verify(args),
        Command::Sixj(args) => cmd_sixj(args),
        Command::Tetra {
            what:
                TetraCommand::Eval {
                    input,
                    n,
                    uncharged,
                    format,
                },
        } => cmd_tetra_eval(input, n, uncharged, format),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(report) => {
            print!("{}", report.stdout);
            match report.failed {
                None => ExitCode::SUCCESS,
                Some(msg) => {
                    eprintln!("{msg}");
                    ExitCode::from(1)
                }
            }
        }
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cyclic6j::intertwiners::TensorDump;

    fn run(args: &[&str]) -> Result<Report, Failure> {
        let cli =
            Cli::try_parse_from(std::iter::once("cyclic6j").chain(args.iter().copied())).unwrap();
        dispatch(cli)
    }

    fn json(r: &Report) -> serde_json::Value {
        serde_json::from_str(&r.stdout).unwrap()
    }

    fn data(name: &str) -> String {
        format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
    }

    const TRIPLE: &str = r#""rho":{"a":[1.1,0.2],"y":[0.8,-0.3]},"mu":{"a":[0.9,-0.4],"y":[1.2,0.5]},"nu":{"a":[0.7,0.6],"y":[1.3,-0.2]}"#;

    #[test]
    fn ctx_info_reports_constants() {
        let v = json(&run(&["ctx", "info", "--N", "5", "--format", "json"]).unwrap());
        assert_eq!(v["N"], 5);
        assert_eq!(v["P"], 2);
        assert!((v["g1_norm"].as_f64().unwrap() - 5f64.sqrt()).abs() < 1e-12);
        let want = 2.0 * std::f64::consts::PI * 3.0 / 5.0;
        assert!((v["omega_half"][0].as_f64().unwrap() - want.cos()).abs() < 1e-15);
        assert!((v["omega_half"][1].as_f64().unwrap() - want.sin()).abs() < 1e-15);
        let text = run(&["ctx", "info", "--N", "3"]).unwrap().stdout;
        assert_eq!(text.lines().count(), 8);
    }

    #[test]
    fn invalid_input_is_a_usage_error() {
        for n in ["4", "1", "15"] {
            assert!(run(&["ctx", "info", "--N", n]).is_err(), "N = {n}");
        }
        assert!(run(&["verify", "no-such-relation", "--N", "3"]).is_err());
        assert!(run(&["verify", "pentagon", "--N", "3", "--samples", "0"]).is_err());
        assert!(Cli::try_parse_from(["cyclic6j", "verify"]).is_err());
    }

    #[test]
    fn verify_single_relation_passes() {
        let r = run(&[
            "verify",
            "pentagon",
            "--N",
            "3",
            "--samples",
            "20",
            "--seed",
            "7",
            "--format",
            "json",
        ])
        .unwrap();
        assert!(r.failed.is_none());
        let v = json(&r);
        assert_eq!(v[0]["relation"], "pentagon");
        assert_eq!(v[0]["pass"], true);
        assert!(v[0]["max_residual"].as_f64().unwrap() < 1e-8);
        assert_eq!(v[0]["records"].as_array().unwrap().len(), 20);
    }

    #[test]
    fn failing_relation_is_reported() {
        let r = run(&["verify", "symmetries", "--N", "3", "--samples", "5"]).unwrap();
        assert!(r.failed.is_some());
        assert!(r.stdout.starts_with("# rng: "));
        assert!(r.stdout.contains("FAIL"));
    }

    #[test]
    fn verify_out_file_keeps_summary_on_stdout() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g1.json");
        let p = path.to_string_lossy();
        let r = run(&[
            "verify",
            "g1-norm",
            "--N",
            "3",
            "--N",
            "5",
            "--samples",
            "2",
            "--format",
            "json",
            "--out",
            &p,
        ])
        .unwrap();
        assert_eq!(r.stdout.lines().count(), 2);
        let v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 2);
    }

    #[test]
    fn tetra_sample_evaluates() {
        let v = json(
            &run(&[
                "tetra",
                "eval",
                &data("tetra_n3.json"),
                "--N",
                "3",
                "--format",
                "json",
            ])
            .unwrap(),
        );
        let [re, im] = [0, 1].map(|k| v["value"][k].as_f64().unwrap());
        assert!(re.is_finite() && im.is_finite() && re.hypot(im) > 0.0);
        assert!(v["psi_residual"].as_f64().unwrap() < 1e-10);
        assert_eq!(v["star"], 1);
    }

    #[test]
    fn tetra_off_support_is_exact_zero() {
        let path = data("tetra_n3_off_support.json");
        for extra in [&[][..], &["--uncharged"][..]] {
            let mut args = vec!["tetra", "eval", &path, "--format", "json"];
            args.extend_from_slice(extra);
            let v = json(&run(&args).unwrap());
            assert_eq!(v["value"][0].as_f64(), Some(0.0));
            assert_eq!(v["value"][1].as_f64(), Some(0.0));
            assert_eq!(v["on_support"], false);
        }
    }

    #[test]
    fn tetra_bad_charge_names_the_face() {
        let Err(Failure(msg)) = run(&["tetra", "eval", &data("tetra_n3_bad_charge.json")]) else {
            panic!("bad charge accepted");
        };
        assert!(msg.contains("face f1"), "{msg}");
    }

    #[test]
    fn sixj_dump_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let params = dir.path().join("p.json");
        std::fs::write(&params, format!(r#"{{{TRIPLE},"branches":[0,2,1]}}"#)).unwrap();
        let path = dir.path().join("r.json");
        let (pp, p) = (params.to_string_lossy(), path.to_string_lossy());
        let r = run(&[
            "sixj",
            "--N",
            "3",
            "--params",
            &pp,
            "--charges",
            "1,2",
            "--out",
            &p,
        ])
        .unwrap();
        assert!(r.stdout.is_empty());
        let text = std::fs::read_to_string(&path).unwrap();
        let dump: TensorDump = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string_pretty(&dump).unwrap() + "\n", text);
        assert_eq!(dump.shape, [3; 4]);
        assert_eq!(dump.charges.as_ref().map(|c| (c.a, c.c)), Some((1, 2)));
        let (r, rbar) = dump.entries().unwrap();
        for (i, z) in r.iter().enumerate() {
            let (g, d, b) = (i / 27, (i / 9) % 3, i % 3);
            if (g + d) % 3 != b {
                assert_eq!(z.norm(), 0.0);
            }
        }
        assert!(rbar.iter().any(|z| z.norm() > 0.0));
    }

    #[test]
    fn sixj_rejects_bad_branches() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.json");
        std::fs::write(&path, format!(r#"{{{TRIPLE},"branches":[0,0,0]}}"#)).unwrap();
        assert!(run(&["sixj", "--N", "3", "--params", &path.to_string_lossy()]).is_err());
        assert!(run(&["sixj", "--N", "3", "--rho", "1,0,1"]).is_err());
    }
}
