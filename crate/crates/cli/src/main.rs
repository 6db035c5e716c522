use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bqpolyak::arrow::AlgebraElement;
use bqpolyak::biquandle::{Biquandle, BiquandleError};
use bqpolyak::enhance::{enhancement, linking_element, parity_element, EnhancementValue};
use bqpolyak::gauss::{parse_gauss_code, GaussDiagram};
use bqpolyak::labeling::{enumerate_labelings, format_labeling};
use bqpolyak::oracle::global_relation_stack;
use bqpolyak::polyak::{polyak_basis, verify_invariance, PolyakBasis};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

mod knots;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Biquandle { path: PathBuf, source: BiquandleError },
    #[error("{0}")]
    Domain(String),
    /// Already reported on stdout; only the exit code is left to set.
    #[error("{0}")]
    Failed(String),
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(name = "bqpolyak", version, about = "Biquandle-labeled Polyak algebras and enhanced counting invariants")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate or generate biquandle operation tables.
    #[command(subcommand)]
    Biquandle(BiquandleCmd),
    /// Count or list labelings of a Gauss code.
    #[command(subcommand)]
    Labelings(LabelingsCmd),
    /// Compute or check Polyak algebra bases.
    #[command(subcommand)]
    Polyak(PolyakCmd),
    /// Evaluate an enhanced counting invariant.
    Enhance(EnhanceArgs),
    /// Randomized invariance check of every basis vector.
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum BiquandleCmd {
    /// Check the axioms, reporting every violation.
    Validate { file: PathBuf },
    /// Print a biquandle from one of the standard families.
    #[command(subcommand)]
    Gen(GenCmd),
}

#[derive(Subcommand)]
enum GenCmd {
    /// x^y = t x + (1 - s^-1 t) y, x_y = s^-1 x over Z_m.
    Alexander {
        #[arg(long)]
        modulus: usize,
        #[arg(long, allow_hyphen_values = true)]
        t: i64,
        #[arg(long, allow_hyphen_values = true)]
        s: i64,
    },
    /// x^y = sigma(x), x_y = sigma^-1(x), sigma given as 1-based images.
    Constant {
        #[arg(required = true)]
        sigma: Vec<usize>,
    },
    /// x^y = y^-k x y^k over a group given by its 1-based Cayley table file.
    Conj {
        #[arg(long)]
        group: PathBuf,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        power: i64,
    },
    /// Dihedral quandle x^y = 2y - x mod n.
    Dihedral { n: usize },
    /// Trivial operations on n elements.
    Trivial { n: usize },
}

#[derive(Args)]
struct BqArg {
    /// Biquandle table file.
    #[arg(long)]
    biquandle: PathBuf,
}

#[derive(Subcommand)]
enum LabelingsCmd {
    Count {
        gauss: String,
        #[command(flatten)]
        bq: BqArg,
    },
    /// One labeling per line as semiarc:element pairs.
    List {
        gauss: String,
        #[command(flatten)]
        bq: BqArg,
    },
}

#[derive(Args)]
struct PolyakArgs {
    #[command(flatten)]
    bq: BqArg,
    #[arg(long, default_value_t = 1)]
    degree: usize,
    #[arg(long, default_value_t = 1)]
    components: usize,
}

#[derive(Subcommand)]
enum PolyakCmd {
    /// Basis of the algebra and of the invariant sublattice.
    Basis {
        #[command(flatten)]
        args: PolyakArgs,
        /// Also report the rank of the whole-diagram move differences.
        #[arg(long)]
        oracle: bool,
    },
    Verify(VerifyArgs),
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    args: PolyakArgs,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    steps: usize,
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true)]
struct EnhanceArgs {
    #[command(subcommand)]
    table: Option<EnhanceCmd>,
    #[arg(long)]
    gauss: Option<String>,
    #[command(flatten)]
    element: ElementArgs,
}

#[derive(Args, Clone)]
struct ElementArgs {
    #[arg(long)]
    biquandle: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    degree: usize,
    /// `parity`, `linking`, a JSON element, or a file holding one.
    #[arg(long, conflicts_with = "element_index")]
    element: Option<String>,
    /// Position in the computed basis, 0-based.
    #[arg(long)]
    element_index: Option<usize>,
}

#[derive(Subcommand)]
enum EnhanceCmd {
    /// Evaluate every knot in a `name<TAB>code[<TAB>json]` file.
    Table {
        #[arg(long)]
        knots: PathBuf,
        #[command(flatten)]
        element: ElementArgs,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

fn load_biquandle(path: &Path) -> Result<Biquandle> {
    Biquandle::parse(&read(path)?).map_err(|source| CliError::Biquandle { path: path.to_owned(), source })
}

fn parse_code(code: &str) -> Result<GaussDiagram> {
    parse_gauss_code(code).map_err(|e| CliError::Domain(format!("gauss code {code:?}: {e}")))
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json values serialize"));
}

fn biquandle_cmd(cmd: BiquandleCmd, json_out: bool) -> Result<()> {
    match cmd {
        BiquandleCmd::Validate { file } => {
            let b = match Biquandle::parse(&read(&file)?) {
                Ok(b) => b,
                Err(BiquandleError::Axioms(vs)) => {
                    if json_out {
                        let vs: Vec<_> = vs
                            .iter()
                            .map(|v| {
                                json!({
                                    "axiom": v.axiom.to_string(),
                                    "witness": v.witness.iter().map(|x| x + 1).collect::<Vec<_>>(),
                                    "detail": v.detail,
                                })
                            })
                            .collect();
                        print_json(&json!({"valid": false, "violations": vs}));
                    } else {
                        println!("invalid: {} violation(s)", vs.len());
                        for v in &vs {
                            println!("  {v}");
                        }
                    }
                    return Err(CliError::Failed(format!("{}: not a biquandle", file.display())));
                }
                Err(source) => return Err(CliError::Biquandle { path: file, source }),
            };
            if json_out {
                print_json(&json!({"valid": true, "size": b.size(), "quandle": b.is_quandle()}));
            } else {
                let kind = if b.is_quandle() { "quandle" } else { "biquandle" };
                println!("valid {kind} on {} elements", b.size());
            }
        }
        BiquandleCmd::Gen(g) => {
            let b = match g {
                GenCmd::Alexander { modulus, t, s } => Biquandle::alexander(modulus, t, s),
                GenCmd::Constant { sigma } => {
                    if sigma.contains(&0) {
                        return Err(CliError::Domain("permutation images are 1-based".into()));
                    }
                    Biquandle::constant_action(&sigma.iter().map(|x| x - 1).collect::<Vec<_>>())
                }
                GenCmd::Conj { group, power } => {
                    let table = knots::parse_cayley(&read(&group)?).map_err(CliError::Domain)?;
                    Biquandle::conjugation(&table, power)
                }
                GenCmd::Dihedral { n } => {
                    if n == 0 {
                        return Err(CliError::Domain("dihedral quandle needs n >= 1".into()));
                    }
                    Ok(Biquandle::dihedral(n))
                }
                GenCmd::Trivial { n } => {
                    if n == 0 {
                        return Err(CliError::Domain("trivial biquandle needs n >= 1".into()));
                    }
                    Ok(Biquandle::trivial(n))
                }
            }
            .map_err(|e| CliError::Domain(e.to_string()))?;
            if json_out {
                let rows = |f: &dyn Fn(usize, usize) -> usize| -> Vec<Vec<usize>> {
                    (0..b.size()).map(|x| (0..b.size()).map(|y| f(x, y) + 1).collect()).collect()
                };
                print_json(&json!({"size": b.size(), "over": rows(&|x, y| b.over(x, y)), "under": rows(&|x, y| b.under(x, y))}));
            } else {
                print!("{}", b.to_text());
            }
        }
    }
    Ok(())
}

fn labelings_cmd(cmd: LabelingsCmd, json_out: bool) -> Result<()> {
    let (code, bq, list) = match cmd {
        LabelingsCmd::Count { gauss, bq } => (gauss, bq, false),
        LabelingsCmd::List { gauss, bq } => (gauss, bq, true),
    };
    let b = load_biquandle(&bq.biquandle)?;
    let d = parse_code(&code)?;
    let ls = enumerate_labelings(&d, &b);
    match (list, json_out) {
        (false, false) => println!("{}", ls.len()),
        (false, true) => print_json(&json!({"count": ls.len()})),
        (true, false) => {
            for f in &ls {
                println!("{}", format_labeling(f));
            }
        }
        (true, true) => {
            let ls: Vec<Vec<usize>> = ls.iter().map(|f| f.iter().map(|x| x + 1).collect()).collect();
            print_json(&json!({"count": ls.len(), "labelings": ls}));
        }
    }
    Ok(())
}

fn compute_basis(args: &PolyakArgs) -> Result<PolyakBasis> {
    if args.degree == 0 || args.components == 0 {
        return Err(CliError::Domain("degree and components must be at least 1".into()));
    }
    let b = load_biquandle(&args.bq.biquandle)?;
    Ok(polyak_basis(&b, args.degree, args.components))
}

fn verify(v: &VerifyArgs, json_out: bool) -> Result<()> {
    let p = compute_basis(&v.args)?;
    let r = verify_invariance(&p, v.steps, v.seed);
    if json_out {
        let fails: Vec<_> = r
            .failures
            .iter()
            .map(|f| {
                json!({
                    "vector": f.vector,
                    "before": f.before,
                    "labeling": format_labeling(&f.labeling),
                    "move": format!("{:?}", f.mv),
                    "after": f.after,
                    "values": [f.values.0, f.values.1],
                })
            })
            .collect();
        print_json(&json!({"dim_p": p.dim(), "steps": r.steps, "r3_steps": r.r3_steps, "failures": fails}));
    } else {
        println!("dim P = {}, {} steps ({} triangle moves), {} failures", p.dim(), r.steps, r.r3_steps, r.failures.len());
        for f in &r.failures {
            println!(
                "  vector {} on {} [{}] --{:?}--> {}: {} != {}",
                f.vector,
                f.before,
                format_labeling(&f.labeling),
                f.mv,
                f.after,
                f.values.0,
                f.values.1
            );
        }
    }
    if r.failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!("{} invariance failure(s)", r.failures.len())))
    }
}

fn polyak_cmd(cmd: PolyakCmd, json_out: bool) -> Result<()> {
    match cmd {
        PolyakCmd::Basis { args, oracle } => {
            let p = compute_basis(&args)?;
            let global = if oracle {
                Some(global_relation_stack(&p.biquandle, p.degree, p.components).map_err(|e| CliError::Domain(e.to_string()))?.rank())
            } else {
                None
            };
            if json_out {
                let mut v = p.to_json_value();
                if let Some(g) = global {
                    v["global_relation_rank"] = json!(g);
                }
                print_json(&v);
            } else {
                println!("dim A = {}", p.basis.len());
                println!("relation rank = {}", p.relation_rank);
                if let Some(g) = global {
                    println!("global relation rank = {g}");
                }
                println!("dim P = {}", p.dim());
                for (i, v) in p.vectors.iter().enumerate() {
                    let terms: Vec<String> = v
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| **c != 0)
                        .map(|(j, c)| format!("{c:+}*e{j}"))
                        .collect();
                    println!("v{i} = {}", terms.join(" "));
                }
            }
            Ok(())
        }
        PolyakCmd::Verify(v) => verify(&v, json_out),
    }
}

/// Resolves the element flags against a diagram with `c` components.
fn select_element(e: &ElementArgs, b: &Biquandle, c: usize) -> Result<AlgebraElement> {
    let basis = || polyak_basis(b, e.degree, c);
    match (&e.element, e.element_index) {
        (Some(s), _) if s == "parity" => {
            parity_element(&basis()).ok_or_else(|| CliError::Domain("no parity element for this biquandle".into()))
        }
        (Some(s), _) if s == "linking" => {
            linking_element(&basis()).ok_or_else(|| CliError::Domain("no linking element for this biquandle".into()))
        }
        (Some(s), _) => {
            let text = if s.trim_start().starts_with('[') { s.clone() } else { read(Path::new(s))? };
            let v: serde_json::Value =
                serde_json::from_str(&text).map_err(|err| CliError::Domain(format!("element: {err}")))?;
            AlgebraElement::from_json_value(&v).map_err(|err| CliError::Domain(format!("element: {err}")))
        }
        (None, Some(k)) => {
            let p = basis();
            if k >= p.dim() {
                return Err(CliError::Domain(format!("element index {k} out of range, dim P = {}", p.dim())));
            }
            Ok(p.element(k))
        }
        (None, None) => Err(CliError::Domain("give --element or --element-index".into())),
    }
}

fn evaluate(code: &str, e: &ElementArgs) -> Result<EnhancementValue> {
    let path = e.biquandle.as_ref().ok_or_else(|| CliError::Domain("--biquandle is required".into()))?;
    let b = load_biquandle(path)?;
    let d = parse_code(code)?;
    let a = select_element(e, &b, d.num_components())?;
    enhancement(&d, &b, &a, e.degree).map_err(|err| CliError::Domain(err.to_string()))
}

fn enhance_cmd(args: EnhanceArgs, json_out: bool) -> Result<()> {
    match args.table {
        Some(EnhanceCmd::Table { knots, element }) => knots::run_table(&knots, &element, json_out),
        None => {
            let code = args.gauss.ok_or_else(|| CliError::Domain("--gauss is required".into()))?;
            let v = evaluate(&code, &args.element)?;
            if json_out {
                print_json(&v.to_json_value());
            } else {
                println!("{v}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json_out = cli.json;
    let res = match cli.command {
        Command::Biquandle(c) => biquandle_cmd(c, json_out),
        Command::Labelings(c) => labelings_cmd(c, json_out),
        Command::Polyak(c) => polyak_cmd(c, json_out),
        Command::Enhance(a) => enhance_cmd(a, json_out),
        Command::Verify(v) => verify(&v, json_out),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
