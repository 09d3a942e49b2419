//! Command-line driver: loads model files, runs the engine and renders a
//! report either as a table or as deterministic JSON.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use courant::cohomology::{naive_cohomology, standard_cohomology, transgression, Complex, SpectralSequence};
use courant::genexact::{predict_standard_cohomology, severa_class_equal, transgression_from_form};
use courant::modelfile::load_model;
use courant::{CourantError, CourantModel, ExactMatrix, ModulePresentation};
use serde_json::{json, Map, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "courant", version, about = "Exact cohomology of Courant algebroids in invariant coordinate models")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Machine,
}

#[derive(clap::Args, Debug)]
pub struct Degree {
    /// Degree cutoff.
    #[arg(long, env = "COURANT_MAX_DEGREE", default_value_t = courant::cohomology::DEFAULT_MAX_DEGREE)]
    pub max_degree: u32,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Master equation and Courant axioms.
    Check { model: PathBuf },
    /// Standard cohomology H(A, Q).
    Cohomology {
        model: PathBuf,
        #[command(flatten)]
        degree: Degree,
    },
    /// Naive cohomology of the kernel of the anchor.
    Naive {
        model: PathBuf,
        #[command(flatten)]
        degree: Degree,
    },
    /// A page of the naive-ideal spectral sequence.
    Page {
        model: PathBuf,
        #[arg(long = "r", value_name = "K")]
        r: u32,
        #[command(flatten)]
        degree: Degree,
    },
    /// The transgression d3: E3[0,2] -> E3[3,0].
    Transgression { model: PathBuf },
    /// Compare Severa classes of two generalized exact models.
    Severa {
        model: PathBuf,
        #[arg(long)]
        compare: PathBuf,
    },
    /// Closed-form prediction of the standard cohomology.
    Predict {
        model: PathBuf,
        #[command(flatten)]
        degree: Degree,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    value: Value,
    passed: bool,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome { code: EXIT_INPUT, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: EXIT_OK, stdout: text, stderr: String::new() }
            }
        }
    }
}

pub fn execute(cli: &Cli) -> Outcome {
    match report(&cli.command) {
        Ok(r) => {
            let stdout = match cli.format {
                Format::Machine => format!("{}\n", serde_json::to_string_pretty(&r.value).expect("serializable")),
                Format::Table => render_table(&r.value),
            };
            Outcome { code: if r.passed { EXIT_OK } else { EXIT_CHECK_FAILED }, stdout, stderr: String::new() }
        }
        Err(Failure { code, message }) => Outcome { code, stdout: String::new(), stderr: format!("error: {message}\n") },
    }
}

struct Failure {
    code: i32,
    message: String,
}

fn input(e: CourantError) -> Failure {
    Failure { code: EXIT_INPUT, message: e.to_string() }
}

fn computation(e: CourantError) -> Failure {
    let code = match e {
        CourantError::MasterEquationFailed | CourantError::JacobiViolation(_) | CourantError::NotClosed(_) => EXIT_CHECK_FAILED,
        _ => EXIT_INPUT,
    };
    Failure { code, message: e.to_string() }
}

fn load(path: &PathBuf) -> Result<CourantModel, Failure> {
    load_model(path).map_err(input)
}

fn header(command: &str, m: &CourantModel) -> Map<String, Value> {
    let mut map = Map::new();
    map.insert("command".into(), json!(command));
    map.insert("model".into(), json!(m.name()));
    map.insert("ring".into(), json!(m.ring().to_string()));
    map
}

fn module(x: &ModulePresentation) -> Value {
    json!({
        "free_rank": x.free_rank,
        "torsion": x.torsion.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
    })
}

fn degrees(v: &[ModulePresentation]) -> Value {
    Value::Array(
        v.iter()
            .enumerate()
            .map(|(n, x)| {
                let mut entry = Map::new();
                entry.insert("degree".into(), json!(n));
                if let Value::Object(m) = module(x) {
                    entry.extend(m);
                }
                Value::Object(entry)
            })
            .collect(),
    )
}

fn matrix(m: &ExactMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| Value::Array((0..m.cols()).map(|j| json!(m.get(i, j).to_string())).collect())).collect())
}

fn report(command: &Command) -> Result<Report, Failure> {
    match command {
        Command::Check { model } => {
            let m = load(model)?;
            let mut map = header("check", &m);
            let residual = m.master_equation();
            let report = m.axiom_report();
            map.insert(
                "master_equation".into(),
                json!({ "zero": residual.is_zero(), "residual": residual.to_string() }),
            );
            let axioms: Vec<Value> = report
                .checks
                .iter()
                .map(|c| {
                    let witness = c.witness.as_ref().map(|(case, r)| json!({ "case": case, "residual": r.to_string() }));
                    json!({ "axiom": c.axiom.label(), "cases": c.cases, "failures": c.failures, "passed": c.passed(), "witness": witness })
                })
                .collect();
            map.insert("axioms".into(), Value::Array(axioms));
            let passed = residual.is_zero() && report.all_passed();
            map.insert("courant".into(), json!(passed));
            Ok(Report { value: Value::Object(map), passed })
        }
        Command::Cohomology { model, degree } | Command::Naive { model, degree } => {
            let m = load(model)?;
            let naive = matches!(command, Command::Naive { .. });
            let h = if naive { naive_cohomology(&m, degree.max_degree) } else { standard_cohomology(&m, degree.max_degree) }
                .map_err(computation)?;
            let mut map = header(if naive { "naive" } else { "cohomology" }, &m);
            map.insert("max_degree".into(), json!(degree.max_degree));
            map.insert("degrees".into(), degrees(&h));
            Ok(Report { value: Value::Object(map), passed: true })
        }
        Command::Page { model, r, degree } => {
            let m = load(model)?;
            let n = degree.max_degree;
            let complex = Complex::new(&m, n).map_err(computation)?;
            let page = SpectralSequence::new(&complex).page(*r, n).map_err(computation)?;
            let mut map = header("page", &m);
            map.insert("r".into(), json!(r));
            map.insert("max_degree".into(), json!(n));
            let mut keys: Vec<(u32, u32)> = page.entries.keys().copied().collect();
            keys.sort_by_key(|&(p, q)| (p + q, p));
            let entries: Map<String, Value> = keys.iter().map(|&(p, q)| (format!("E{r}[{p},{q}]"), module(&page.entries[&(p, q)]))).collect();
            map.insert("entries".into(), Value::Object(entries));
            let differentials: Map<String, Value> = keys
                .iter()
                .filter_map(|k| page.differentials.get(k).filter(|d| !d.is_zero()).map(|d| (k, d)))
                .map(|(&(p, q), d)| (format!("d{r}[{p},{q}]"), matrix(d)))
                .collect();
            map.insert("nonzero_differentials".into(), Value::Object(differentials));
            Ok(Report { value: Value::Object(map), passed: true })
        }
        Command::Transgression { model } => {
            let m = load(model)?;
            let t3 = transgression(&m).map_err(computation)?;
            let mut map = header("transgression", &m);
            map.insert("transverse".into(), json!(m.transverse_count() == 1));
            map.insert("h3_naive_rank".into(), json!(t3.rows()));
            map.insert("zero".into(), json!(t3.is_zero()));
            map.insert("matrix".into(), matrix(&t3));
            let mut passed = true;
            if m.genexact().is_some() {
                let from_form = transgression_from_form(&m).map_err(computation)?;
                passed = from_form == t3;
                map.insert("paths_agree".into(), json!(passed));
            }
            Ok(Report { value: Value::Object(map), passed })
        }
        Command::Severa { model, compare } => {
            let (a, b) = (load(model)?, load(compare)?);
            let equal = severa_class_equal(&a, &b).map_err(computation)?;
            let mut map = header("severa", &a);
            map.insert("other".into(), json!(b.name()));
            map.insert("equal".into(), json!(equal));
            Ok(Report { value: Value::Object(map), passed: true })
        }
        Command::Predict { model, degree } => {
            let m = load(model)?;
            let predicted = predict_standard_cohomology(&m, degree.max_degree).map_err(computation)?;
            let computed = standard_cohomology(&m, degree.max_degree).map_err(computation)?;
            let mut map = header("predict", &m);
            map.insert("max_degree".into(), json!(degree.max_degree));
            map.insert("predicted".into(), degrees(&predicted));
            map.insert("computed".into(), degrees(&computed));
            map.insert("agrees".into(), json!(predicted == computed));
            Ok(Report { value: Value::Object(map), passed: true })
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn module_cell(v: &Value) -> String {
    let rank = v["free_rank"].as_u64().unwrap_or(0);
    let torsion: Vec<String> = v["torsion"].as_array().map(|a| a.iter().map(scalar).collect()).unwrap_or_default();
    let mut parts = Vec::new();
    if rank > 0 {
        parts.push(if rank == 1 { "R".to_string() } else { format!("R^{rank}") });
    }
    parts.extend(torsion.iter().map(|p| format!("R/({p})")));
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn rows(out: &mut String, header: &[&str], rows: &[Vec<String>]) {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<String>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string()
    };
    let _ = writeln!(out, "{}", line(header.iter().map(|s| s.to_string()).collect()));
    for r in rows {
        let _ = writeln!(out, "{}", line(r.clone()));
    }
}

fn degree_rows(v: &Value) -> Vec<Vec<String>> {
    v.as_array()
        .into_iter()
        .flatten()
        .map(|d| {
            let torsion: Vec<String> = d["torsion"].as_array().into_iter().flatten().map(scalar).collect();
            vec![scalar(&d["degree"]), scalar(&d["free_rank"]), torsion.join(", "), module_cell(d)]
        })
        .collect()
}

fn matrix_text(v: &Value) -> String {
    let rows: Vec<String> = v
        .as_array()
        .into_iter()
        .flatten()
        .map(|r| format!("[{}]", r.as_array().into_iter().flatten().map(scalar).collect::<Vec<_>>().join(", ")))
        .collect();
    format!("[{}]", rows.join(", "))
}

fn render_table(v: &Value) -> String {
    let mut out = String::new();
    let command = v["command"].as_str().unwrap_or_default();
    let _ = writeln!(out, "model: {}  ring: {}", scalar(&v["model"]), scalar(&v["ring"]));
    match command {
        "check" => {
            let me = &v["master_equation"];
            let _ = writeln!(out, "master equation {{H,H}} = {}", scalar(&me["residual"]));
            let mut table = Vec::new();
            for a in v["axioms"].as_array().into_iter().flatten() {
                let witness = match &a["witness"] {
                    Value::Null => String::new(),
                    w => format!("{}: {}", scalar(&w["case"]), scalar(&w["residual"])),
                };
                let status = if a["passed"] == json!(true) { "pass" } else { "FAIL" };
                table.push(vec![scalar(&a["axiom"]), scalar(&a["cases"]), scalar(&a["failures"]), status.into(), witness]);
            }
            rows(&mut out, &["axiom", "cases", "failures", "status", "witness"], &table);
            let verdict = if v["courant"] == json!(true) { "Courant algebroid" } else { "not a Courant algebroid" };
            let _ = writeln!(out, "{verdict}");
        }
        "cohomology" | "naive" => {
            let _ = writeln!(out, "{} cohomology through degree {}", if command == "naive" { "naive" } else { "standard" }, v["max_degree"]);
            rows(&mut out, &["n", "free rank", "torsion", "H^n"], &degree_rows(&v["degrees"]));
        }
        "page" => {
            let _ = writeln!(out, "page E{} through total degree {}", v["r"], v["max_degree"]);
            let table: Vec<Vec<String>> = v["entries"]
                .as_object()
                .into_iter()
                .flatten()
                .map(|(k, e)| vec![k.clone(), scalar(&e["free_rank"]), e["torsion"].as_array().into_iter().flatten().map(scalar).collect::<Vec<_>>().join(", "), module_cell(e)])
                .collect();
            rows(&mut out, &["entry", "free rank", "torsion", "module"], &table);
            for (k, d) in v["nonzero_differentials"].as_object().into_iter().flatten() {
                let _ = writeln!(out, "{k} = {}", matrix_text(d));
            }
        }
        "transgression" => {
            let _ = writeln!(out, "transverse direction: {}", v["transverse"]);
            let _ = writeln!(out, "rank H^3 naive: {}", v["h3_naive_rank"]);
            let _ = writeln!(out, "T3(d/dt) = {}", matrix_text(&v["matrix"]));
            let _ = writeln!(out, "zero: {}", v["zero"]);
            if let Some(agree) = v.get("paths_agree") {
                let _ = writeln!(out, "paths agree: {agree}");
            }
        }
        "severa" => {
            let _ = writeln!(out, "compared with: {}", scalar(&v["other"]));
            let _ = writeln!(out, "same Severa class: {}", v["equal"]);
        }
        "predict" => {
            let _ = writeln!(out, "prediction through degree {}", v["max_degree"]);
            let computed = degree_rows(&v["computed"]);
            let table: Vec<Vec<String>> = degree_rows(&v["predicted"])
                .into_iter()
                .zip(computed)
                .map(|(p, c)| vec![p[0].clone(), p[1].clone(), p[2].clone(), c[1].clone(), c[2].clone()])
                .collect();
            rows(&mut out, &["n", "predicted rank", "predicted torsion", "computed rank", "computed torsion"], &table);
            let _ = writeln!(out, "agrees: {}", v["agrees"]);
        }
        _ => {}
    }
    out
}
