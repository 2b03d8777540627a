//! Argument handling and output for the `tate-kappa` binary.

use std::fmt::Write as _;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tate_kappa::affine_weyl::Twisting;
use tate_kappa::json;
use tate_kappa::theta_torus::lattice_generators;
use tate_kappa::verify::{run_verification, VerifyConfig};
use tate_kappa::{
    affine_orbit_reps, check_theta_invariance, duality_bijection, duality_pairing, kac_character, load_root_datum,
    negative_level_basis, theta_basis, theta_pairing_matrix, RootDatum, Weight,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Parser, Debug, Clone)]
#[command(name = "tate-kappa", version, about = "Affine Weyl orbit bases, theta functions and Weyl-Kac characters over Z((q))")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format; JSON is canonical, TSV is a flattened projection.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Size of the worker pool (defaults to the number of CPUs).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

#[derive(Args, Debug, Clone)]
pub struct GroupArgs {
    /// Type label such as A2, C2 or G2.
    #[arg(long, conflicts_with = "cartan")]
    pub group: Option<String>,

    /// Explicit Cartan matrix as JSON, e.g. "[[2,-1],[-1,2]]".
    #[arg(long)]
    pub cartan: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct OrderArg {
    /// Truncation order in q.
    #[arg(long, env = "TATE_KAPPA_ORDER", default_value_t = 10)]
    pub order: i64,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Affine Weyl orbit representatives at a level, or for a twisted torus.
    Orbits {
        #[command(flatten)]
        group: GroupArgs,
        /// Symmetric definite form of a torus, as JSON.
        #[arg(long, conflicts_with_all = ["group", "cartan"])]
        torus: Option<String>,
        #[arg(long)]
        level: Option<i64>,
        /// Also list the regular orbits at level k + h_dual.
        #[arg(long)]
        shifted: bool,
    },
    /// Theta function basis of a twisted torus with invariance verdicts.
    Theta {
        #[arg(long)]
        torus: String,
        #[command(flatten)]
        order: OrderArg,
    },
    /// Weyl-Kac character of an integrable highest weight module.
    Character {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        level: i64,
        /// Highest weight in fundamental-weight coordinates, e.g. "[1,0]".
        #[arg(long)]
        weight: String,
        #[command(flatten)]
        order: OrderArg,
    },
    /// Level-shift bijection and the duality pairing matrix.
    Pair {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        level: i64,
        #[command(flatten)]
        order: OrderArg,
    },
    /// Runs the seeded self-check suite.
    Verify {
        #[command(flatten)]
        order: OrderArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// What a run produced: an exit code, data for stdout, logs for stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Config(String),
    Domain(tate_kappa::Error),
}

impl<E: Into<tate_kappa::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Domain(e.into())
    }
}

fn root_datum(g: &GroupArgs) -> Result<Arc<RootDatum>, Failure> {
    let rd = match (&g.group, &g.cartan) {
        (Some(label), None) => load_root_datum(label)?,
        (None, Some(m)) => RootDatum::from_cartan(&json::parse_matrix(m).map_err(Failure::Config)?)?,
        _ => return Err(Failure::Config("exactly one of --group or --cartan is required".into())),
    };
    Ok(Arc::new(rd))
}

fn check_order(order: i64) -> Result<i64, Failure> {
    if order < 0 {
        Err(Failure::Config(format!("order must be nonnegative, got {order}")))
    } else {
        Ok(order)
    }
}

fn torus(form: &str) -> Result<Twisting, Failure> {
    Ok(Twisting::torus(json::parse_matrix(form).map_err(Failure::Config)?)?)
}

fn coords(w: &Weight) -> String {
    w.0.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn orbits_cmd(cli: &Cli, group: &GroupArgs, torus_form: &Option<String>, level: Option<i64>, shifted: bool) -> Result<(String, i32), Failure> {
    let (tw, negative) = match torus_form {
        Some(f) => {
            if shifted {
                return Err(Failure::Config("--shifted needs a group".into()));
            }
            (torus(f)?, None)
        }
        None => {
            let rd = root_datum(group)?;
            let k = level.ok_or_else(|| Failure::Config("--level is required with a group".into()))?;
            let negative = if shifted { Some(negative_level_basis(&rd, k)?) } else { None };
            (Twisting::at_level(rd, k)?, negative)
        }
    };
    let reps = affine_orbit_reps(&tw)?;
    let out = match cli.format {
        Format::Json => render(&json::orbits(&tw, &reps, negative.as_deref())),
        Format::Tsv => {
            let mut s = String::from("basis\trep\tstabilizer_order\tregular\n");
            let rows = reps.iter().map(|o| ("positive", o)).chain(negative.iter().flatten().map(|o| ("negative", o)));
            for (tag, o) in rows {
                writeln!(s, "{tag}\t{}\t{}\t{}", coords(&o.rep), o.stabilizer_order, o.regular).unwrap();
            }
            s
        }
    };
    Ok((out, EXIT_OK))
}

fn theta_cmd(cli: &Cli, form: &str, order: i64) -> Result<(String, i32), Failure> {
    let tw = torus(form)?;
    let order = check_order(order)?;
    let basis = theta_basis(&tw, order)?;
    let gens = lattice_generators(tw.rank());
    let invariant: Vec<bool> = basis
        .iter()
        .map(|f| gens.iter().all(|p| check_theta_invariance(&tw, f, p)))
        .collect();
    let pairing = theta_pairing_matrix(&tw, order)?;
    let out = match cli.format {
        Format::Json => render(&json::theta(&tw, order, &basis, &invariant, &pairing)),
        Format::Tsv => {
            let mut s = String::from("coset\tq\tweight\tcoeff\n");
            for (c, f) in basis.iter().enumerate() {
                for (n, w, x) in f.terms() {
                    writeln!(s, "{c}\t{n}\t{}\t{x}", coords(w)).unwrap();
                }
            }
            s
        }
    };
    Ok((out, EXIT_OK))
}

fn character_cmd(cli: &Cli, group: &GroupArgs, level: i64, weight: &str, order: i64) -> Result<(String, i32), Failure> {
    let rd = root_datum(group)?;
    let order = check_order(order)?;
    let lambda = json::parse_weight(weight).map_err(Failure::Config)?;
    if lambda.rank() != rd.rank {
        return Err(Failure::Config(format!("weight {weight:?} has rank {}, group has rank {}", lambda.rank(), rd.rank)));
    }
    let c = kac_character(&rd, &lambda, level, order)?;
    let out = match cli.format {
        Format::Json => render(&json::character(&rd.label, &c)),
        Format::Tsv => {
            let mut s = String::from("q\tweight\tmult\n");
            for (n, w, m) in c.ch.terms() {
                writeln!(s, "{n}\t{}\t{m}", coords(w)).unwrap();
            }
            s
        }
    };
    Ok((out, EXIT_OK))
}

fn pair_cmd(cli: &Cli, group: &GroupArgs, level: i64, order: i64) -> Result<(String, i32), Failure> {
    let rd = root_datum(group)?;
    let order = check_order(order)?;
    let pairs = duality_bijection(&rd, level)?;
    let m = duality_pairing(&rd, level, order)?;
    let out = match cli.format {
        Format::Json => render(&json::pair(&rd.label, level, order, &pairs, &m)),
        Format::Tsv => {
            let mut s = String::from("positive\tnegative\tdiagonal_entry\n");
            for (i, (a, b)) in pairs.iter().enumerate() {
                writeln!(s, "{}\t{}\t{}", coords(&a.rep), coords(&b.rep), m.entries[i][i]).unwrap();
            }
            writeln!(s, "det\t\t{}", m.det).unwrap();
            s
        }
    };
    Ok((out, EXIT_OK))
}

fn verify_cmd(cli: &Cli, order: i64, seed: u64) -> Result<(String, i32), Failure> {
    let order = check_order(order)?;
    let results = run_verification(VerifyConfig { seed, order });
    let passed = results.iter().all(|r| r.passed);
    let out = match cli.format {
        Format::Json => render(&json!({
            "seed": seed,
            "order": order,
            "passed": passed,
            "checks": results
                .iter()
                .map(|r| json!({"name": r.name, "passed": r.passed, "detail": r.detail}))
                .collect::<Vec<_>>(),
        })),
        Format::Tsv => {
            let mut s = String::new();
            for r in &results {
                writeln!(s, "{}\t{}\t{}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail).unwrap();
            }
            s
        }
    };
    Ok((out, if passed { EXIT_OK } else { EXIT_VERIFY_FAILED }))
}

fn dispatch(cli: &Cli) -> Result<(String, i32), Failure> {
    match &cli.command {
        Command::Orbits { group, torus, level, shifted } => orbits_cmd(cli, group, torus, *level, *shifted),
        Command::Theta { torus, order } => theta_cmd(cli, torus, order.order),
        Command::Character { group, level, weight, order } => character_cmd(cli, group, *level, weight, order.order),
        Command::Pair { group, level, order } => pair_cmd(cli, group, *level, order.order),
        Command::Verify { order, seed } => verify_cmd(cli, order.order, *seed),
    }
}

/// Runs one command inside a worker pool of the requested size.
pub fn run(cli: &Cli) -> Outcome {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.workers {
        if n == 0 {
            return Outcome {
                code: EXIT_INVALID,
                stdout: String::new(),
                stderr: "error: --workers must be at least 1\n".into(),
            };
        }
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            return Outcome {
                code: EXIT_INVALID,
                stdout: String::new(),
                stderr: format!("error: cannot start worker pool: {e}\n"),
            }
        }
    };
    match pool.install(|| dispatch(cli)) {
        Ok((stdout, code)) => {
            let stderr = if code == EXIT_VERIFY_FAILED {
                "verification failed\n".to_string()
            } else {
                String::new()
            };
            Outcome { code, stdout, stderr }
        }
        Err(Failure::Config(msg)) => Outcome {
            code: EXIT_INVALID,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
        Err(Failure::Domain(e)) => Outcome {
            code: EXIT_INVALID,
            stdout: String::new(),
            stderr: format!("error: {}: {e}\n", e.qualified_name()),
        },
    }
}
