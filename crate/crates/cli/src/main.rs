use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64 as C64;
use serde::Serialize;
use serde_json::{json, Map, Value};

use srank::claims::{verify_claim, ClaimReport, Status, CLAIM_IDS};
use srank::matrix::fmt_complex;
use srank::schmidt::operator_tensor3;
use srank::{
    als_fit, bipartite_schmidt, evaluate, matmul_tensor, paper_gate, parse, rank_search,
    strassen_certificate, AlsConfig, ComplexMatrix, Cut, Decomposition, GateEntry, RankReport,
    Tensor3, Verdict, RANK_TOL,
};

#[derive(Parser)]
#[command(
    name = "srank",
    version,
    about = "Operator Schmidt rank of small multi-qubit gates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Show a catalog gate: matrix, unitarity, claimed rank, certificate.
    Gate {
        name: String,
        #[arg(long)]
        json: bool,
    },
    /// Rank of a catalog gate or circuit file, tripartite or across a cut.
    Rank {
        name: Option<String>,
        #[arg(long, conflicts_with = "name")]
        circuit: Option<PathBuf>,
        /// Bipartite cut such as `A|BC`.
        #[arg(long)]
        cut: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Fit a rank-r CP decomposition with ALS.
    Decompose {
        name: String,
        #[arg(long)]
        rank: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Verify one registered claim, or all of them.
    Verify {
        #[arg(default_value = "all")]
        id: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Parse and evaluate a circuit file.
    Eval {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

/// Input problems map to exit code 2.
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

struct Output {
    command: &'static str,
    target: String,
    results: Value,
    verdicts: Map<String, Value>,
    seed: Option<u64>,
    text: String,
    failed: bool,
}

impl Output {
    fn to_json(&self) -> String {
        let doc = json!({
            "command": self.command,
            "target": self.target,
            "results": self.results,
            "verdicts": self.verdicts,
            "seed": self.seed,
            "tool_version": env!("CARGO_PKG_VERSION"),
        });
        serde_json::to_string_pretty(&doc).expect("serialisable")
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serialisable")
}

fn matrix_json(m: &ComplexMatrix) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|i| {
            Value::Array(
                (0..m.cols())
                    .map(|j| {
                        let z: C64 = m[(i, j)];
                        json!([z.re, z.im])
                    })
                    .collect(),
            )
        })
        .collect();
    Value::Array(rows)
}

fn read_circuit(path: &Path) -> Result<(String, ComplexMatrix, usize), UsageError> {
    let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => UsageError(format!("{}: file not found", path.display())),
        _ => UsageError(format!("{}: {e}", path.display())),
    })?;
    let circuit = parse(&text)?;
    let m = evaluate(&circuit)?;
    Ok((path.display().to_string(), m, circuit.n_qubits()))
}

/// Tensor, certificate hint and claim for a tripartite target.
struct Target {
    name: String,
    tensor: Tensor3,
    hint: Option<Decomposition>,
    entry: Option<GateEntry>,
}

fn named_target(name: &str) -> Result<Target, UsageError> {
    if name == "matmul" {
        return Ok(Target {
            name: name.into(),
            tensor: matmul_tensor(),
            hint: Some(strassen_certificate()),
            entry: None,
        });
    }
    let g = paper_gate(name)?;
    let tensor = g
        .operator_tensor()
        .ok_or_else(|| UsageError(format!("{name} is not a three-qubit gate; pass --cut")))?;
    Ok(Target {
        name: name.into(),
        tensor,
        hint: g.decomposition(),
        entry: Some(g),
    })
}

fn report_text(r: &RankReport) -> String {
    let mut s = format!(
        "target:          {}\nmode ranks:      ({},{},{})\nproved lower:    {}\n",
        r.target, r.mode_ranks[0], r.mode_ranks[1], r.mode_ranks[2], r.proved_lower
    );
    let opt = |o: Option<usize>| o.map_or("-".to_string(), |v| v.to_string());
    s += &format!("certified upper: {}\n", opt(r.certified_upper));
    s += &format!("ALS upper:       {}\n", opt(r.als_upper));
    for a in &r.als_attempts {
        s += &format!(
            "  ALS rank {}: residual {:.3e} ({}, {} restarts)\n",
            a.rank,
            a.best_residual,
            if a.converged {
                "converged"
            } else {
                "no convergence"
            },
            a.restarts
        );
    }
    if let Some(c) = &r.claimed {
        s += &format!("claimed:         {c}\n");
    }
    s += &format!("verdict:         {}\n", verdict_str(r.verdict));
    s
}

fn verdict_str(v: Verdict) -> String {
    to_value(&v).as_str().unwrap_or_default().to_string()
}

fn cmd_gate(name: &str) -> Result<Output, UsageError> {
    let g = paper_gate(name)?;
    let defect = g.unitarity_defect();
    let unitary = defect <= srank::IDENTITY_TOL;
    let mut text = format!("{}: {}\n{}\n", g.name, g.anchor, g.matrix);
    text += &format!(
        "unitary: {} (max |MM†−I| = {:.3e})\n",
        if unitary { "yes" } else { "no" },
        defect
    );
    text += &format!(
        "claimed rank: {}\n",
        g.claimed_rank
            .as_ref()
            .map_or("-".into(), |c| c.to_string())
    );
    text += &format!(
        "certificate terms: {}\n",
        g.certificate_len().map_or("-".into(), |n| n.to_string())
    );
    for v in &g.variants {
        text += &format!(
            "variant {}: unitary {} (defect {:.3e})\n",
            v.label,
            v.is_unitary(),
            v.unitarity_defect
        );
    }
    let variants: Vec<Value> = g
        .variants
        .iter()
        .map(|v| json!({"label": v.label, "unitary": v.is_unitary(), "unitarity_defect": v.unitarity_defect}))
        .collect();
    let mut verdicts = Map::new();
    verdicts.insert(
        g.name.clone(),
        json!(if unitary { "UNITARY" } else { "NOT_UNITARY" }),
    );
    Ok(Output {
        command: "gate",
        target: g.name.clone(),
        results: json!({
            "systems": g.systems,
            "matrix": matrix_json(&g.matrix),
            "unitary": unitary,
            "unitarity_defect": defect,
            "claimed_unitary": g.claimed_unitary,
            "claimed_rank": g.claimed_rank,
            "certificate_len": g.certificate_len(),
            "anchor": g.anchor,
            "variants": variants,
        }),
        verdicts,
        seed: None,
        text,
        failed: false,
    })
}

fn cut_output(
    target: String,
    m: &ComplexMatrix,
    dims: &[usize],
    cut: &str,
    seed: u64,
) -> Result<Output, UsageError> {
    let cut: Cut = cut.parse()?;
    let b = bipartite_schmidt(m, &cut, dims, RANK_TOL)?;
    let mut text = format!(
        "target: {target}\ncut:    {}\nrank:   {}\nweights:",
        b.cut, b.rank
    );
    for w in &b.weights {
        text += &format!(" {w:.6}");
    }
    text.push('\n');
    let mut verdicts = Map::new();
    verdicts.insert(b.cut.to_string(), json!(b.rank));
    Ok(Output {
        command: "rank",
        target,
        results: json!({"cut": b.cut.to_string(), "rank": b.rank, "weights": b.weights}),
        verdicts,
        seed: Some(seed),
        text,
        failed: false,
    })
}

fn rank_output(
    command: &'static str,
    t: &Target,
    seed: u64,
    prefix: String,
    mut results: Map<String, Value>,
) -> Result<Output, UsageError> {
    let cfg = AlsConfig::with_seed(seed);
    let claim = t.entry.as_ref().and_then(|e| e.claimed_rank.clone());
    let report = rank_search(&t.name, &t.tensor, t.hint.as_ref(), claim.as_ref(), &cfg)?;
    let mut verdicts = Map::new();
    verdicts.insert(t.name.clone(), json!(report.verdict));
    results.insert("report".into(), to_value(&report));
    Ok(Output {
        command,
        target: t.name.clone(),
        results: Value::Object(results),
        verdicts,
        seed: Some(seed),
        text: prefix + &report_text(&report),
        failed: report.verdict == Verdict::Inconsistent,
    })
}

fn cmd_rank(
    name: Option<String>,
    circuit: Option<PathBuf>,
    cut: Option<String>,
    seed: u64,
) -> Result<Output, UsageError> {
    let (label, matrix, dims) = match (&name, &circuit) {
        (Some(n), None) if n == "matmul" => {
            if cut.is_some() {
                return Err(UsageError(
                    "matmul is a tensor, not an operator; --cut does not apply".into(),
                ));
            }
            return rank_output("rank", &named_target(n)?, seed, String::new(), Map::new());
        }
        (Some(n), None) => {
            let g = paper_gate(n)?;
            (g.name.clone(), g.matrix.clone(), g.systems.clone())
        }
        (None, Some(p)) => {
            let (label, m, n) = read_circuit(p)?;
            (label, m, vec![2; n])
        }
        _ => return Err(UsageError("give a gate name or --circuit <file>".into())),
    };
    if let Some(c) = cut {
        return cut_output(label, &matrix, &dims, &c, seed);
    }
    let target = match name {
        Some(n) => named_target(&n)?,
        None => Target {
            tensor: tripartite(&matrix, &dims)?,
            name: label,
            hint: None,
            entry: None,
        },
    };
    rank_output("rank", &target, seed, String::new(), Map::new())
}

fn tripartite(m: &ComplexMatrix, dims: &[usize]) -> Result<Tensor3, UsageError> {
    if dims != [2, 2, 2] {
        return Err(UsageError(format!(
            "tripartite rank needs three qubits, got {}; pass --cut",
            dims.len()
        )));
    }
    Ok(operator_tensor3(m)?)
}

fn cmd_decompose(name: &str, rank: usize, seed: u64) -> Result<Output, UsageError> {
    let t = named_target(name)?;
    let cfg = AlsConfig::with_seed(seed);
    let fit = als_fit(&t.tensor, rank, &cfg)?;
    let mut text = format!(
        "target: {}\nrank tried: {}\nbest residual: {:.3e}\nconverged: {}\nrestarts used: {}\niterations of best: {}\n",
        t.name, fit.rank_tried, fit.best_residual, fit.converged, fit.restarts_used, fit.iterations_of_best
    );
    for (i, term) in fit.factors.terms().iter().enumerate() {
        let fmt = |v: &[C64]| {
            v.iter()
                .map(|&z| fmt_complex(z))
                .collect::<Vec<_>>()
                .join(", ")
        };
        text += &format!(
            "term {}:\n  a = [{}]\n  b = [{}]\n  c = [{}]\n",
            i + 1,
            fmt(&term.a),
            fmt(&term.b),
            fmt(&term.c)
        );
    }
    let mut verdicts = Map::new();
    verdicts.insert(
        t.name.clone(),
        json!(if fit.converged {
            "CONVERGED"
        } else {
            "NOT_CONVERGED"
        }),
    );
    Ok(Output {
        command: "decompose",
        target: t.name,
        results: to_value(&fit),
        verdicts,
        seed: Some(seed),
        text,
        failed: false,
    })
}

fn claim_text(r: &ClaimReport) -> String {
    let mut s = format!(
        "{:<4} {:<13} {}\n",
        r.id,
        r.overall.to_string(),
        r.statement
    );
    for c in &r.checks {
        let metrics: Vec<String> = c.metrics.iter().map(|(k, v)| format!("{k}={v}")).collect();
        s += &format!("       {:<13} {}", c.status.to_string(), c.description);
        if !metrics.is_empty() {
            s += &format!(" [{}]", metrics.join(" "));
        }
        s.push('\n');
    }
    s
}

fn cmd_verify(id: &str, seed: u64) -> Result<Output, UsageError> {
    let cfg = AlsConfig::with_seed(seed);
    let ids: Vec<&str> = if id.eq_ignore_ascii_case("all") {
        CLAIM_IDS.to_vec()
    } else {
        let canon = CLAIM_IDS
            .iter()
            .find(|c| c.eq_ignore_ascii_case(id))
            .ok_or_else(|| UsageError(format!("unknown claim `{id}`")))?;
        vec![*canon]
    };
    let reports = ids
        .iter()
        .map(|id| verify_claim(id, &cfg))
        .collect::<srank::Result<Vec<_>>>()?;
    let mut verdicts = Map::new();
    let mut text = String::new();
    for r in &reports {
        verdicts.insert(r.id.clone(), json!(r.overall));
        text += &claim_text(r);
    }
    let count = |s: Status| reports.iter().filter(|r| r.overall == s).count();
    text += &format!(
        "\n{} claims: {} PASS, {} OPEN-EVIDENCE, {} FAIL\n",
        reports.len(),
        count(Status::Pass),
        count(Status::OpenEvidence),
        count(Status::Fail)
    );
    Ok(Output {
        command: "verify",
        target: if ids.len() == 1 {
            ids[0].to_string()
        } else {
            "all".into()
        },
        results: to_value(&reports),
        verdicts,
        seed: Some(seed),
        text,
        failed: count(Status::Fail) > 0,
    })
}

fn cmd_eval(file: &Path, seed: u64) -> Result<Output, UsageError> {
    let (label, m, n) = read_circuit(file)?;
    let mut results = Map::new();
    results.insert("n_qubits".into(), json!(n));
    results.insert("matrix".into(), matrix_json(&m));
    results.insert("unitarity_defect".into(), json!(m.unitarity_defect()));
    let prefix = format!("{label}: {n} qubits\n{m}\n");
    if n != 3 {
        return Ok(Output {
            command: "eval",
            target: label,
            results: Value::Object(results),
            verdicts: Map::new(),
            seed: Some(seed),
            text: prefix,
            failed: false,
        });
    }
    let target = Target {
        tensor: operator_tensor3(&m)?,
        name: label,
        hint: None,
        entry: None,
    };
    rank_output("eval", &target, seed, prefix, results)
}

fn run(cli: Cli) -> Result<(Output, bool), UsageError> {
    Ok(match cli.command {
        Command::Gate { name, json } => (cmd_gate(&name)?, json),
        Command::Rank {
            name,
            circuit,
            cut,
            seed,
            json,
        } => (cmd_rank(name, circuit, cut, seed)?, json),
        Command::Decompose {
            name,
            rank,
            seed,
            json,
        } => (cmd_decompose(&name, rank, seed)?, json),
        Command::Verify { id, seed, json } => (cmd_verify(&id, seed)?, json),
        Command::Eval { file, seed, json } => (cmd_eval(&file, seed)?, json),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((out, json)) => {
            if json {
                println!("{}", out.to_json());
            } else {
                print!("{}", out.text);
            }
            if out.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(UsageError(msg)) => {
            eprintln!("srank: {msg}");
            ExitCode::from(2)
        }
    }
}
