//! Command-line surface over the treelike engine.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error.

use std::collections::BTreeSet;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use treelike::amalgam::{enumerate_amalgamations, AmalgamationDiagram};
use treelike::category::gram_semisimplicity;
use treelike::measure::{enumerate_measures, Measure};
use treelike::subclass::{enumerate_subclasses, support_of, InducedSubclassSpec};
use treelike::tree::{enumerate_structures, ColoredTree};
use treelike::verify;

#[derive(Parser)]
#[command(name = "treelike", version, about = "Exact engine for node-colored rooted binary tree structures: measures, subclasses, amalgamation, and category checks")]
struct Cli {
    /// Guard for enumeration sizes (total leaves in amalgamations).
    #[arg(long, global = true, default_value_t = 8)]
    max_leaves: u32,

    /// Worker threads for parallel sweeps (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// List all measures for a color count.
    EnumerateMeasures {
        #[arg(long)]
        n: u8,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Evaluate a measure on a tree given in text form.
    Eval {
        /// Tree text, e.g. "(1 * (2 * *))"; "()" is the empty structure.
        tree: String,
        #[command(flatten)]
        measure: MeasureSource,
    },
    /// List the subclasses (with all n colors appearing).
    Subclasses {
        #[arg(long)]
        n: u8,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Enumerate amalgamations of two trees over a common substructure.
    Amalgamate {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        /// Base structure; defaults to the empty structure.
        #[arg(long, default_value = "()")]
        z: String,
        /// Comma-separated leaf positions of z inside x.
        #[arg(long, value_delimiter = ',')]
        map_x: Vec<u32>,
        /// Comma-separated leaf positions of z inside y.
        #[arg(long, value_delimiter = ',')]
        map_y: Vec<u32>,
        #[arg(long)]
        n: u8,
    },
    /// Gram form on the endomorphisms of an object.
    Gram {
        #[arg(long)]
        tree: String,
        #[command(flatten)]
        measure: MeasureSource,
        /// Restrict the hom basis to the support of the measure.
        #[arg(long)]
        subclass: bool,
    },
    /// Run a named verification suite (or "all").
    Verify { suite: String },
    /// List structure classes with a given leaf count.
    EnumerateStructures {
        #[arg(long)]
        n: u8,
        #[arg(long)]
        leaves: u32,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct MeasureSourceKind {
    /// JSON measure file (as emitted by enumerate-measures).
    #[arg(long)]
    measure_file: Option<String>,
    /// Induced regular measure: comma-separated repeatable colors (may be
    /// empty: pass "none"); combine with --n and optionally --order.
    #[arg(long)]
    induced: Option<String>,
}

#[derive(Args)]
struct MeasureSource {
    #[command(flatten)]
    kind: MeasureSourceKind,
    /// Color count for --induced.
    #[arg(long)]
    n: Option<u8>,
    /// Color order for --induced (comma-separated permutation; default
    /// natural).
    #[arg(long, value_delimiter = ',')]
    order: Vec<u8>,
}

enum Failure {
    Usage(String),
    Verification(String),
}

impl MeasureSource {
    fn load(&self) -> Result<Measure, Failure> {
        if let Some(path) = &self.kind.measure_file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {path}: {e}")))?;
            return serde_json::from_str(&text)
                .map_err(|e| Failure::Usage(format!("bad measure file {path}: {e}")));
        }
        let spec = self.induced_spec()?;
        Ok(spec.extension_measure())
    }

    fn induced_spec(&self) -> Result<InducedSubclassSpec, Failure> {
        let repeats_text = self
            .kind
            .induced
            .as_ref()
            .ok_or_else(|| Failure::Usage("--induced requires a repeat set".into()))?;
        let n = self
            .n
            .ok_or_else(|| Failure::Usage("--induced requires --n".into()))?;
        let repeats: BTreeSet<u8> = if repeats_text == "none" || repeats_text.is_empty() {
            BTreeSet::new()
        } else {
            repeats_text
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<u8>()
                        .map_err(|_| Failure::Usage(format!("bad repeat color {s:?}")))
                })
                .collect::<Result<_, _>>()?
        };
        if repeats.iter().any(|&c| c == 0 || c > n) {
            return Err(Failure::Usage("repeat colors must lie in 1..=n".into()));
        }
        let order = if self.order.is_empty() {
            (1..=n).collect()
        } else {
            let mut sorted = self.order.clone();
            sorted.sort_unstable();
            if sorted != (1..=n).collect::<Vec<_>>() {
                return Err(Failure::Usage("--order must permute 1..=n".into()));
            }
            self.order.clone()
        };
        Ok(InducedSubclassSpec::new(n, order, repeats))
    }

    fn is_induced(&self) -> bool {
        self.kind.induced.is_some()
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        rayon_pool(cli.jobs);
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn rayon_pool(jobs: usize) {
    // The core crate uses rayon internally; configure the global pool once.
    let _ = treelike::verify::configure_threads(jobs);
}

fn emit_ok(payload: Value) {
    let envelope = json!({ "status": "ok", "payload": payload, "diagnostics": [] });
    println!("{}", serde_json::to_string_pretty(&envelope).unwrap());
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::EnumerateMeasures { n, format } => enumerate_measures_cmd(*n, *format),
        Command::Eval { tree, measure } => eval_cmd(tree, measure, cli.max_leaves),
        Command::Subclasses { n, format } => subclasses_cmd(*n, *format),
        Command::Amalgamate { x, y, z, map_x, map_y, n } => {
            amalgamate_cmd(x, y, z, map_x, map_y, *n, cli.max_leaves)
        }
        Command::Gram { tree, measure, subclass } => {
            gram_cmd(tree, measure, *subclass, cli.max_leaves)
        }
        Command::Verify { suite } => verify_cmd(suite),
        Command::EnumerateStructures { n, leaves, format } => {
            structures_cmd(*n, *leaves, *format, cli.max_leaves)
        }
    }
}

fn enumerate_measures_cmd(n: u8, format: Format) -> Result<(), Failure> {
    if !(1..=4).contains(&n) {
        return Err(Failure::Usage(format!("n must lie in 1..=4, got {n}")));
    }
    let measures = enumerate_measures(n);
    match format {
        Format::Json => {
            let payload = serde_json::to_value(&measures).unwrap();
            emit_ok(payload);
        }
        Format::Table => {
            let mut header = Vec::new();
            for i in 1..=n {
                header.push(format!("B({i})"));
                for j in 1..=n {
                    header.push(format!("C({i},{j})"));
                }
            }
            header.push("Support".to_string());
            println!("{}", header.join("\t"));
            for mu in &measures {
                let mut row = Vec::new();
                for i in 1..=n {
                    row.push(mu.b_value(i).to_string());
                    for j in 1..=n {
                        row.push(mu.c_value(i, j).to_string());
                    }
                }
                row.push(verify::support_name(&support_of(mu)));
                println!("{}", row.join("\t"));
            }
        }
    }
    Ok(())
}

fn eval_cmd(tree: &str, source: &MeasureSource, _max: u32) -> Result<(), Failure> {
    let mu = source.load()?;
    let t = ColoredTree::parse(tree, mu.n()).map_err(|e| Failure::Usage(e.to_string()))?;
    let value = if source.is_induced() {
        // Induced measures are only defined on their subclass; report the
        // closed-form value there and reject non-members.
        let spec = source.induced_spec()?;
        spec.value(&t).map_err(|e| Failure::Usage(e.to_string()))?
    } else {
        mu.evaluate(&t).map_err(|e| Failure::Usage(e.to_string()))?
    };
    emit_ok(json!({ "tree": t.to_text(), "value": value.to_string() }));
    Ok(())
}

fn subclasses_cmd(n: u8, format: Format) -> Result<(), Failure> {
    if !(1..=5).contains(&n) {
        return Err(Failure::Usage(format!("n must lie in 1..=5, got {n}")));
    }
    let subclasses = enumerate_subclasses(n);
    match format {
        Format::Json => emit_ok(serde_json::to_value(&subclasses).unwrap()),
        Format::Table => {
            println!("epsilon rows\tname");
            for s in &subclasses {
                let eps: Vec<String> = (1..=n)
                    .map(|i| {
                        (1..=n).map(|j| if s.eps(i, j) { '1' } else { '0' }).collect::<String>()
                    })
                    .collect();
                println!("{}\t{}", eps.join(" "), s.table_name().unwrap_or_default());
            }
        }
    }
    Ok(())
}

fn amalgamate_cmd(
    x: &str,
    y: &str,
    z: &str,
    map_x: &[u32],
    map_y: &[u32],
    n: u8,
    max_leaves: u32,
) -> Result<(), Failure> {
    let parse = |s: &str| ColoredTree::parse(s, n).map_err(|e| Failure::Usage(e.to_string()));
    let diagram = AmalgamationDiagram::new(
        parse(z)?,
        parse(x)?,
        parse(y)?,
        map_x.to_vec(),
        map_y.to_vec(),
    )
    .map_err(|e| Failure::Usage(e.to_string()))?;
    let amalgs = enumerate_amalgamations(&diagram, n, max_leaves)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let list: Vec<Value> = amalgs
        .iter()
        .map(|a| {
            json!({
                "total": a.total.to_text(),
                "from_left": a.from_left,
                "from_right": a.from_right,
                "class": a.key(),
            })
        })
        .collect();
    emit_ok(json!({ "count": list.len(), "amalgamations": list }));
    Ok(())
}

fn gram_cmd(
    tree: &str,
    source: &MeasureSource,
    restrict: bool,
    max_leaves: u32,
) -> Result<(), Failure> {
    let mu = source.load()?;
    let t = ColoredTree::parse(tree, mu.n()).map_err(|e| Failure::Usage(e.to_string()))?;
    let subclass = restrict.then(|| support_of(&mu));
    let report = gram_semisimplicity(&mu, &t, subclass.as_ref(), max_leaves)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    emit_ok(serde_json::to_value(&report).unwrap());
    Ok(())
}

fn verify_cmd(suite: &str) -> Result<(), Failure> {
    let names: Vec<&str> = if suite == "all" {
        verify::SUITE_NAMES.to_vec()
    } else {
        vec![suite]
    };
    let mut all_pass = true;
    for name in names {
        let report = verify::run_suite(name)
            .ok_or_else(|| Failure::Usage(format!("unknown suite {name:?}; available: {} or all", verify::SUITE_NAMES.join(", "))))?;
        for line in &report.lines {
            println!(
                "[{}] {}: {} ({})",
                if line.pass { "PASS" } else { "FAIL" },
                report.name,
                line.label,
                line.detail
            );
            all_pass &= line.pass;
        }
    }
    if all_pass {
        Ok(())
    } else {
        Err(Failure::Verification("some checks failed".into()))
    }
}

fn structures_cmd(n: u8, leaves: u32, format: Format, max_leaves: u32) -> Result<(), Failure> {
    if n == 0 {
        return Err(Failure::Usage("n must be at least 1".into()));
    }
    if leaves > max_leaves {
        return Err(Failure::Usage(format!(
            "leaf count {leaves} exceeds the --max-leaves guard {max_leaves}"
        )));
    }
    let (classes, labeled) = enumerate_structures(n, leaves);
    match format {
        Format::Json => {
            let texts: Vec<String> = classes.iter().map(|t| t.to_text()).collect();
            emit_ok(json!({ "classes": texts, "labeled_count": labeled.to_string() }));
        }
        Format::Table => {
            for t in &classes {
                println!("{t}");
            }
            eprintln!("{} classes, {} labeled structures", classes.len(), labeled);
        }
    }
    Ok(())
}
