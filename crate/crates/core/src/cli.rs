//! The `tropline` command line.
//!
//! Exit codes: 0 success or affirmative verdict, 1 negative verdict, 2 input
//! error, 3 resource cap exceeded. Output is assembled in full before it is
//! printed and never depends on thread scheduling.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::combs::{count_combs, homology_rank_formula};
use crate::complex::build_complex;
use crate::error::{ComplexError, EvalError};
use crate::evaluation::{canonical_tree, pi_tree, relative_matrix, PointConfig};
use crate::exec::Execution;
use crate::homology::{betti_numbers, Coefficients};
use crate::io::TreeJson;
use crate::report::verify;
use crate::shelling::{homology_facets, sort_facets, verify_shelling, ShellingStatus};
use crate::split::Coloring;
use crate::tropical::{tropical_rank_le2_with, RankVerdict, RatMatrix};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CAP: i32 = 3;

/// Default face cap; the `(4, 4)` complex has 14522 faces.
pub const DEFAULT_CAP: usize = 50_000;

#[derive(Debug, Parser)]
#[command(name = "tropline", version, about = "Tropical collinearity and the complex of collinear configurations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Refuse complexes with more faces than this.
    #[arg(long, default_value_t = DEFAULT_CAP, global = true)]
    pub cap: usize,
    /// Run every loop on the calling thread.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Formula,
    Combs,
    Boundary,
    All,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether the columns of a d x n matrix are tropically collinear.
    Collinear { matrix: PathBuf },
    /// The canonical tropical line through the columns of a d x n matrix.
    CanonicalLine { matrix: PathBuf },
    /// Facets of the complex, in shelling order.
    Facets { d: usize, n: usize },
    /// Check the shelling order (or the order given in a JSON file of trees).
    VerifyShelling {
        d: usize,
        n: usize,
        #[arg(long)]
        order: Option<PathBuf>,
    },
    /// Top homology rank.
    Homology {
        d: usize,
        n: usize,
        #[arg(long, value_enum, default_value_t = Method::All)]
        method: Method,
        /// Compute boundary ranks over the integers and report torsion.
        #[arg(long)]
        integral: bool,
    },
    /// Formula values for 1 <= d <= max_d, 1 <= n <= max_n.
    RankTable { max_d: usize, max_n: usize },
    /// Shelling, homology, combs and formula for one instance.
    Verify { d: usize, n: usize },
}

/// What a command printed and how it should exit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn out(code: i32, stdout: String) -> Self {
        Outcome { code, stdout, stderr: String::new() }
    }

    fn err(code: i32, stderr: String) -> Self {
        Outcome { code, stdout: String::new(), stderr }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome::err(code, text)
            } else {
                Outcome::out(code, text)
            }
        }
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::default() };
    let ctx = Ctx { format: cli.format, cap: cli.cap, exec };
    match &cli.command {
        Command::Collinear { matrix } => ctx.collinear(matrix),
        Command::CanonicalLine { matrix } => ctx.canonical_line(matrix),
        Command::Facets { d, n } => ctx.facets(*d, *n),
        Command::VerifyShelling { d, n, order } => ctx.verify_shelling(*d, *n, order.as_ref()),
        Command::Homology { d, n, method, integral } => ctx.homology(*d, *n, *method, *integral),
        Command::RankTable { max_d, max_n } => ctx.rank_table(*max_d, *max_n),
        Command::Verify { d, n } => ctx.verify(*d, *n),
    }
}

struct Ctx {
    format: Format,
    cap: usize,
    exec: Execution,
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn read_matrix(path: &PathBuf) -> Result<RatMatrix, Outcome> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Outcome::err(EXIT_INPUT, format!("error: cannot read {}: {e}\n", path.display())))?;
    text.parse::<RatMatrix>().map_err(|e| Outcome::err(EXIT_INPUT, format!("error: {}: {e}\n", path.display())))
}

fn coloring(d: usize, n: usize) -> Result<Coloring, Outcome> {
    Coloring::new(n, d).map_err(|e| Outcome::err(EXIT_INPUT, format!("error: {e}\n")))
}

fn cap_outcome(err: ComplexError) -> Outcome {
    match err {
        ComplexError::FaceCap { ref counts, total, cap } => Outcome {
            code: EXIT_CAP,
            stdout: to_json(&json!({"cap_exceeded": {"cap": cap, "faces_seen": total, "partial_face_counts": counts}})),
            stderr: format!("error: {err}; raise --cap to proceed\n"),
        },
        ComplexError::NotAPermutation(_) | ComplexError::Tree(_) => Outcome::err(EXIT_INPUT, format!("error: {err}\n")),
        other => Outcome::err(EXIT_NEGATIVE, format!("error: {other}\n")),
    }
}

fn matrix_rows(m: &RatMatrix) -> Vec<Vec<String>> {
    (0..m.rows()).map(|r| m.row(r).iter().map(ToString::to_string).collect()).collect()
}

impl Ctx {
    fn collinear(&self, path: &PathBuf) -> Outcome {
        let m = match read_matrix(path) {
            Ok(m) => m,
            Err(o) => return o,
        };
        let verdict = tropical_rank_le2_with(&m, self.exec);
        let code = if verdict.is_collinear() { EXIT_OK } else { EXIT_NEGATIVE };
        let stdout = match self.format {
            Format::Json => to_json(&json!({"collinear": verdict.is_collinear(), "witness": verdict.witness()})),
            Format::Text => match verdict {
                RankVerdict::Collinear => "collinear\n".to_string(),
                RankVerdict::NotCollinear(w) => format!("not collinear: nonsingular minor at {w}\n"),
            },
        };
        Outcome::out(code, stdout)
    }

    fn canonical_line(&self, path: &PathBuf) -> Outcome {
        let m = match read_matrix(path) {
            Ok(m) => m,
            Err(o) => return o,
        };
        let pc = PointConfig::from_matrix(&m);
        let line = match canonical_tree(&pc) {
            Ok(line) => line,
            Err(EvalError::NotCollinear(w)) => {
                let stdout = match self.format {
                    Format::Json => to_json(&json!({"collinear": false, "witness": w})),
                    Format::Text => format!("not collinear: nonsingular minor at {w}\n"),
                };
                return Outcome::out(EXIT_NEGATIVE, stdout);
            }
            Err(e) => return Outcome::err(EXIT_INPUT, format!("error: {e}\n")),
        };
        let image = pi_tree(&line.tree, &line.coloring).expect("canonical tree matches its coloring");
        let residual = relative_matrix(&pc).add(&image.scale(&crate::rat::Rat::from_int(-1)));
        let tree = TreeJson::from_tree(&line.tree, line.coloring).expect("tree over the coloring's leaves");
        let basepoint: Vec<String> = line.basepoint.coords().iter().map(ToString::to_string).collect();
        let code = if residual.is_zero() { EXIT_OK } else { EXIT_NEGATIVE };
        let stdout = match self.format {
            Format::Json => to_json(&json!({
                "tree": tree,
                "basepoint": basepoint,
                "residual": matrix_rows(&residual),
                "residual_is_zero": residual.is_zero(),
            })),
            Format::Text => {
                let mut s = format!(
                    "N = {}, n = {}, d = {}\nbasepoint: ({})\n",
                    tree.leaves,
                    tree.n,
                    tree.d,
                    basepoint.join(", ")
                );
                if tree.splits.is_empty() {
                    s.push_str("star tree (no internal edges)\n");
                }
                for split in &tree.splits {
                    let _ = writeln!(s, "split {:?} length {}", split.members, split.length);
                }
                let _ = writeln!(s, "residual: {}", if residual.is_zero() { "zero" } else { "NONZERO" });
                s
            }
        };
        Outcome::out(code, stdout)
    }

    fn facets(&self, d: usize, n: usize) -> Outcome {
        let c = match coloring(d, n) {
            Ok(c) => c,
            Err(o) => return o,
        };
        if let Err(e) = build_complex(c).face_counts(Some(self.cap)) {
            return cap_outcome(e);
        }
        let trees: Vec<TreeJson> =
            sort_facets(c).iter().map(|t| TreeJson::from_tree(t, c).expect("facets live on the coloring")).collect();
        let stdout = match self.format {
            Format::Json => to_json(&trees),
            Format::Text => {
                let mut s = format!("{} facets\n", trees.len());
                for (i, t) in trees.iter().enumerate() {
                    let splits: Vec<String> = t.splits.iter().map(|s| format!("{:?}", s.members)).collect();
                    let _ = writeln!(s, "{:>6}  {}", i, splits.join(" "));
                }
                s
            }
        };
        Outcome::out(EXIT_OK, stdout)
    }

    fn verify_shelling(&self, d: usize, n: usize, order_path: Option<&PathBuf>) -> Outcome {
        let c = match coloring(d, n) {
            Ok(c) => c,
            Err(o) => return o,
        };
        let complex = build_complex(c);
        if let Err(e) = complex.face_counts(Some(self.cap)) {
            return cap_outcome(e);
        }
        let order = match order_path {
            None => sort_facets(c),
            Some(path) => match read_order(path) {
                Ok(order) => order,
                Err(o) => return o,
            },
        };
        let report = match verify_shelling(&complex, &order, self.exec) {
            Ok(r) => r,
            Err(e) => return cap_outcome(e),
        };
        let homology = homology_facets(&report).ok();
        let code = if report.is_verified() { EXIT_OK } else { EXIT_NEGATIVE };
        let stdout = match self.format {
            Format::Json => {
                let restriction_sizes: Vec<usize> = (0..order.len()).map(|i| report.restriction(i).len()).collect();
                let homology_positions: Option<Vec<usize>> = homology.as_ref().map(|_| {
                    (0..order.len()).filter(|&i| report.restriction(i).len() == report.faces()[i].len()).collect()
                });
                to_json(&json!({
                    "d": d,
                    "n": n,
                    "facet_count": order.len(),
                    "shelling": report.status(),
                    "restriction_sizes": restriction_sizes,
                    "homology_facet_count": homology.as_ref().map(Vec::len),
                    "homology_facet_positions": homology_positions,
                }))
            }
            Format::Text => match report.status() {
                ShellingStatus::Verified => format!(
                    "{} facets: shelling verified, {} homology facets\n",
                    order.len(),
                    homology.map_or(0, |h| h.len())
                ),
                ShellingStatus::Counterexample { earlier, later } => {
                    format!("{} facets: no witness for the pair at positions {earlier} < {later}\n", order.len())
                }
            },
        };
        Outcome::out(code, stdout)
    }

    fn homology(&self, d: usize, n: usize, method: Method, integral: bool) -> Outcome {
        let c = match coloring(d, n) {
            Ok(c) => c,
            Err(o) => return o,
        };
        let mut out = serde_json::Map::new();
        out.insert("d".into(), json!(d));
        out.insert("n".into(), json!(n));
        let mut ranks: Vec<String> = Vec::new();
        if matches!(method, Method::Formula | Method::All) {
            let v = homology_rank_formula(c);
            ranks.push(v.to_string());
            out.insert("formula".into(), big_json(&v));
        }
        if matches!(method, Method::Combs | Method::All) {
            let v = count_combs(c);
            ranks.push(v.to_string());
            out.insert("combs".into(), json!(v));
        }
        let mut lower_ok = true;
        if matches!(method, Method::Boundary | Method::All) {
            let complex = build_complex(c);
            let coeff = if integral { Coefficients::Integers } else { Coefficients::Rationals };
            let entry = if complex.is_empty() {
                ranks.push("0".into());
                json!({"betti": vec![0; (n + d).saturating_sub(3)], "torsion": if integral { Some(Vec::<()>::new()) } else { None }})
            } else {
                match betti_numbers(&complex, coeff, Some(self.cap), self.exec) {
                    Ok(r) => {
                        ranks.push(r.top_rank().to_string());
                        lower_ok = r.betti[..r.betti.len() - 1].iter().all(|&b| b == 0)
                            && r.torsion.as_ref().map_or(true, Vec::is_empty);
                        json!({"face_counts": r.face_counts, "betti": r.betti, "torsion": r.torsion})
                    }
                    Err(e) => return cap_outcome(e),
                }
            };
            out.insert("boundary".into(), entry);
        }
        let agree = lower_ok && ranks.windows(2).all(|w| w[0] == w[1]);
        out.insert("agree".into(), json!(agree));
        let code = if agree { EXIT_OK } else { EXIT_NEGATIVE };
        let stdout = match self.format {
            Format::Json => to_json(&Value::Object(out)),
            Format::Text => {
                let mut s = format!("d = {d}, n = {n}\n");
                for key in ["formula", "combs"] {
                    if let Some(v) = out.get(key) {
                        let _ = writeln!(s, "{key:<8} {v}");
                    }
                }
                if let Some(b) = out.get("boundary") {
                    let _ = writeln!(s, "boundary reduced Betti {}", b["betti"]);
                    if !b["torsion"].is_null() {
                        let _ = writeln!(s, "torsion  {}", b["torsion"]);
                    }
                }
                let _ = writeln!(s, "agree    {agree}");
                s
            }
        };
        Outcome::out(code, stdout)
    }

    fn rank_table(&self, max_d: usize, max_n: usize) -> Outcome {
        if max_d == 0 || max_n == 0 || max_d + max_n > 64 {
            return Outcome::err(EXIT_INPUT, "error: need 1 <= max_d, max_n and max_d + max_n <= 64\n".into());
        }
        let table: Vec<Vec<num_bigint::BigInt>> = (1..=max_d)
            .map(|d| (1..=max_n).map(|n| homology_rank_formula(Coloring::new(n, d).expect("in range"))).collect())
            .collect();
        let stdout = match self.format {
            Format::Json => {
                let rows: Vec<Value> = table.iter().map(|r| Value::Array(r.iter().map(big_json).collect())).collect();
                to_json(
                    &json!({"max_d": max_d, "max_n": max_n, "rows": "d = 1..max_d", "columns": "n = 1..max_n", "table": rows}),
                )
            }
            Format::Text => {
                let cells: Vec<Vec<String>> =
                    table.iter().map(|r| r.iter().map(ToString::to_string).collect()).collect();
                let width = cells.iter().flatten().map(String::len).max().unwrap_or(1).max(max_n.to_string().len());
                let mut s = format!("{:>4} |", "d\\n");
                for n in 1..=max_n {
                    let _ = write!(s, " {n:>width$}");
                }
                s.push('\n');
                for (d, row) in cells.iter().enumerate() {
                    let _ = write!(s, "{:>4} |", d + 1);
                    for cell in row {
                        let _ = write!(s, " {cell:>width$}");
                    }
                    s.push('\n');
                }
                s
            }
        };
        Outcome::out(EXIT_OK, stdout)
    }

    fn verify(&self, d: usize, n: usize) -> Outcome {
        let c = match coloring(d, n) {
            Ok(c) => c,
            Err(o) => return o,
        };
        match verify(c, Some(self.cap), self.exec) {
            Ok(report) => {
                let code = if report.consistent { EXIT_OK } else { EXIT_NEGATIVE };
                let stdout = match self.format {
                    Format::Json => to_json(&report),
                    Format::Text => format!("{report}\n"),
                };
                Outcome::out(code, stdout)
            }
            Err(e) => cap_outcome(e),
        }
    }
}

fn big_json(v: &num_bigint::BigInt) -> Value {
    use num_traits::ToPrimitive;
    v.to_u64().map_or_else(|| json!(v.to_string()), |x| json!(x))
}

fn read_order(path: &PathBuf) -> Result<Vec<crate::tree::PhyloTree>, Outcome> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Outcome::err(EXIT_INPUT, format!("error: cannot read {}: {e}\n", path.display())))?;
    let trees: Vec<TreeJson> = serde_json::from_str(&text)
        .map_err(|e| Outcome::err(EXIT_INPUT, format!("error: {}: {e}\n", path.display())))?;
    trees
        .iter()
        .map(|t| t.to_tree().map(|(tree, _)| tree))
        .collect::<Result<_, _>>()
        .map_err(|e| Outcome::err(EXIT_INPUT, format!("error: {}: {e}\n", path.display())))
}
