//! Command-line front end. Every computation is reachable from a subcommand and
//! emits CSV, JSON or an aligned table.

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::gup::{commutator_poly_1d, minimal_length, GupParams};
use crate::radial::{fig1_points, radial_brackets_quadrature, radial_level, RadialLevel, RadialSpec};
use crate::triangular::{
    solve_well, table1, well_brackets, well_first_order, BracketConvention, Parity, Table1Row, WellSpec,
};
use crate::specialfn::MAX_ZERO_INDEX;
use crate::verify;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
    Pretty,
}

#[derive(Debug, Parser)]
#[command(name = "dirac-gup", version, about = "First-order Dirac energy shifts with generalised momenta")]
pub struct Cli {
    /// Output format; defaults to pretty on a terminal and csv otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Commutator coefficients and minimal length.
    #[command(allow_negative_numbers = true)]
    Gup {
        #[arg(long, value_parser = non_negative)]
        a: f64,
        #[arg(long, value_parser = non_negative)]
        b: f64,
        #[arg(long, default_value_t = 1.0, value_parser = positive)]
        hbar: f64,
    },
    /// Levels of the linear radial potential.
    #[command(allow_negative_numbers = true)]
    Radial {
        #[arg(long, value_parser = positive)]
        q: f64,
        #[arg(long, value_parser = positive)]
        c: f64,
        #[arg(long, value_parser = non_negative)]
        a: f64,
        #[arg(long, default_value_t = 1.0, value_parser = positive)]
        m: f64,
        #[arg(long, default_value_t = 5, value_parser = level_count)]
        levels: usize,
        /// Also evaluate both brackets by quadrature and report the deltas.
        #[arg(long)]
        quadrature_check: bool,
    },
    /// Bound state, brackets and first-order shift of the triangular well.
    #[command(allow_negative_numbers = true)]
    Triangular {
        #[arg(long, value_parser = positive)]
        v0: f64,
        #[arg(long, default_value = "even", value_parser = parse_parity)]
        parity: Parity,
        #[arg(long, default_value_t = 1.0, value_parser = positive)]
        c: f64,
        #[arg(long, default_value_t = 0.0, value_parser = non_negative)]
        a: f64,
        #[arg(long, default_value_t = 0.0, value_parser = finite)]
        px: f64,
        #[arg(long, default_value_t = 0.0, value_parser = finite)]
        py: f64,
        #[arg(long = "Lx", default_value_t = 1.0, value_parser = positive)]
        lx: f64,
        #[arg(long = "Ly", default_value_t = 1.0, value_parser = positive)]
        ly: f64,
        #[arg(long, default_value = "displayed", value_parser = parse_convention)]
        convention: BracketConvention,
    },
    /// Even-parity ground-state table over a range of depths.
    #[command(allow_negative_numbers = true)]
    Table1 {
        #[arg(long, default_value_t = 1.0, value_parser = positive)]
        v0_min: f64,
        #[arg(long, default_value_t = 10.0, value_parser = positive)]
        v0_max: f64,
        #[arg(long, default_value_t = 1.0, value_parser = positive)]
        step: f64,
    },
    /// Points (n, 5 z_n/6, -4 z_n²/5).
    Fig1 {
        #[arg(long, default_value_t = 10, value_parser = level_count)]
        levels: usize,
    },
    /// Run the acceptance battery.
    Verify,
}

fn finite(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v = finite(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be positive, got {v}"))
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    let v = finite(s)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("must be non-negative, got {v}"))
    }
}

fn level_count(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|_| format!("'{s}' is not a positive integer"))?;
    if (1..=MAX_ZERO_INDEX).contains(&n) {
        Ok(n)
    } else {
        Err(format!("must be between 1 and {MAX_ZERO_INDEX}, got {n}"))
    }
}

fn parse_parity(s: &str) -> Result<Parity, String> {
    s.parse()
}

fn parse_convention(s: &str) -> Result<BracketConvention, String> {
    s.parse()
}

#[derive(Debug, Clone)]
enum Cell {
    Num(f64),
    Int(usize),
    Text(String),
}

impl Cell {
    fn render(&self, pretty: bool) -> String {
        match self {
            Cell::Num(x) if pretty => format!("{x:.9e}"),
            Cell::Num(x) => format!("{x}"),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }

    fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.render(false)))?;
        }
        w.flush()
    }

    fn write_pretty(&self, out: &mut dyn Write) -> std::io::Result<()> {
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(|c| c.render(true)).collect()).collect();
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|j| cells.iter().map(|r| r[j].chars().count()).chain([self.columns[j].chars().count()]).max().unwrap())
            .collect();
        let line = |out: &mut dyn Write, items: &[String]| -> std::io::Result<()> {
            let padded: Vec<String> = items.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
            writeln!(out, "{}", padded.join("  ").trim_end())
        };
        line(out, &self.columns)?;
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        line(out, &rule)?;
        for r in &cells {
            line(out, r)?;
        }
        Ok(())
    }
}

struct Output {
    table: Table,
    json: serde_json::Value,
    /// Replaces the aligned table in pretty mode.
    text: Option<String>,
}

fn emit(output: &Output, format: OutputFormat, out: &mut dyn Write) -> std::io::Result<()> {
    match format {
        OutputFormat::Csv => output.table.write_csv(out),
        OutputFormat::Pretty => match &output.text {
            Some(text) => writeln!(out, "{text}"),
            None => output.table.write_pretty(out),
        },
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, &output.json)?;
            writeln!(out)
        }
    }
}

/// A failed computation: the diagnostic and any partial output produced first.
struct Failure {
    message: String,
    partial: Option<Box<Output>>,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure { message: e.to_string(), partial: None }
    }
}

fn to_json<T: Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("domain types serialize")
}

fn gup(a: f64, b: f64, hbar: f64) -> Result<Output, Failure> {
    let params = GupParams::with_hbar(a, b, hbar)?;
    let (c0, c1, c2) = commutator_poly_1d(&params);
    let min = minimal_length(&params)?;
    let mut table = Table::new(&["a", "b", "hbar", "c0", "c1", "c2", "delta_p_ext", "l_min"]);
    table.push([a, b, hbar, c0, c1, c2, min.delta_p_ext, min.length].map(Cell::Num).to_vec());
    let json = json!({
        "params": to_json(&params),
        "commutator": { "c0": c0, "c1": c1, "c2": c2 },
        "delta_p_ext": min.delta_p_ext,
        "l_min": min.length,
    });
    Ok(Output { table, json, text: None })
}

#[derive(Serialize)]
struct QuadratureCheck {
    #[serde(rename = "bracket_EV2_quadrature")]
    bracket_ev2_quadrature: f64,
    bracket_small_quadrature: f64,
    #[serde(rename = "delta_EV2")]
    delta_ev2: f64,
    delta_small: f64,
}

#[derive(Serialize)]
struct RadialRow {
    #[serde(flatten)]
    level: RadialLevel,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    check: Option<QuadratureCheck>,
}

fn radial(spec: RadialSpec, levels: usize, check: bool) -> Result<Output, Failure> {
    let mut columns = vec!["n", "z_n", "E0", "E1_rel", "E1_gup", "E1_total"];
    if check {
        columns.extend(["bracket_EV2", "bracket_EV2_quadrature", "delta_EV2"]);
        columns.extend(["bracket_small", "bracket_small_quadrature", "delta_small"]);
    }
    let mut table = Table::new(&columns);
    let mut rows = Vec::new();
    for n in 1..=levels {
        let level = radial_level(&spec, n)?;
        let mut cells = vec![Cell::Int(n)];
        cells.extend([level.z_n, level.e0, level.e1_rel, level.e1_gup, level.e1_total].map(Cell::Num));
        let check = if check {
            let (ev2, small) = radial_brackets_quadrature(&spec, n)?;
            let qc = QuadratureCheck {
                bracket_ev2_quadrature: ev2,
                bracket_small_quadrature: small,
                delta_ev2: ev2 - level.bracket_ev2,
                delta_small: small - level.bracket_small,
            };
            cells.extend(
                [level.bracket_ev2, ev2, qc.delta_ev2, level.bracket_small, small, qc.delta_small].map(Cell::Num),
            );
            Some(qc)
        } else {
            None
        };
        table.push(cells);
        rows.push(RadialRow { level, check });
    }
    let json = json!({ "spec": to_json(&spec), "levels": to_json(&rows) });
    Ok(Output { table, json, text: None })
}

fn triangular(spec: WellSpec, convention: BracketConvention) -> Result<Output, Failure> {
    let state = solve_well(&spec)?;
    let brackets = well_brackets(&state, &spec)?;
    let e1 = well_first_order(&state, &spec, convention)?;
    let mut table = Table::new(&["quantity", "value"]);
    let entries = [
        ("zeta0", state.zeta0),
        ("zetaL", state.zeta_l),
        ("alpha_match", state.alpha_match),
        ("eps_par", state.eps_par),
        ("c_a", state.c_a),
        ("c_b", state.c_b),
        ("c_out", state.c_out),
        ("emv_pp", brackets.emv_pp),
        ("emv2_pp", brackets.emv2_pp),
        ("epv_mm", brackets.epv_mm),
        ("E_perp", e1.e_perp),
        ("E1_relativistic", e1.relativistic),
        ("E1_gup", e1.gup),
        ("E1_perp_gup_cross", e1.perp_gup_cross),
        ("E1_perp_small_z", e1.perp_small_z),
        ("E1_perp_small_transverse", e1.perp_small_transverse),
        ("E1_perp_gup_square", e1.perp_gup_square),
        ("E1_total", e1.total),
    ];
    for (name, value) in entries {
        table.push(vec![Cell::Text(name.into()), Cell::Num(value)]);
    }
    let json = json!({
        "spec": to_json(&spec),
        "state": to_json(&state),
        "brackets": to_json(&brackets),
        "first_order": to_json(&e1),
    });
    Ok(Output { table, json, text: None })
}

fn depth_range(min: f64, max: f64, step: f64) -> Vec<f64> {
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| min + i as f64 * step).collect()
}

fn table1_output(v0s: &[f64]) -> Result<Output, Failure> {
    let mut table = Table::new(&Table1Row::COLUMNS);
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for (v0, row) in v0s.iter().zip(table1(v0s)) {
        match row {
            Ok(r) => {
                table.push(r.values().map(Cell::Num).to_vec());
                rows.push(r);
            }
            Err(e) => errors.push(format!("v0 = {v0}: {e}")),
        }
    }
    let output = Output { table, json: to_json(&rows), text: None };
    if errors.is_empty() {
        Ok(output)
    } else {
        Err(Failure { message: errors.join("\n"), partial: Some(Box::new(output)) })
    }
}

fn fig1(levels: usize) -> Result<Output, Failure> {
    let points = fig1_points(levels)?;
    let mut table = Table::new(&["n", "five_z_over_six", "minus_four_z_sq_over_five"]);
    for p in &points {
        table.push(vec![Cell::Int(p.n), Cell::Num(p.small), Cell::Num(p.gup)]);
    }
    Ok(Output { table, json: to_json(&points), text: None })
}

fn verify_output() -> Result<Output, Failure> {
    let results = verify::run_all();
    let mut table = Table::new(&["criterion", "name", "status", "elapsed_s", "details"]);
    for r in &results {
        table.push(vec![
            Cell::Int(r.id as usize),
            Cell::Text(r.name.into()),
            Cell::Text(if r.passed { "PASS" } else { "FAIL" }.into()),
            Cell::Text(format!("{:.3}", r.elapsed_s)),
            Cell::Text(r.details.join("; ")),
        ]);
    }
    let text = results.iter().map(|r| r.line()).collect::<Vec<_>>().join("\n");
    let output = Output { table, json: to_json(&results), text: Some(text) };
    let failed: Vec<String> = results.iter().filter(|r| !r.passed).map(|r| r.id.to_string()).collect();
    if failed.is_empty() {
        Ok(output)
    } else {
        Err(Failure { message: format!("criteria failed: {}", failed.join(", ")), partial: Some(Box::new(output)) })
    }
}

fn usage_error(kind: ErrorKind, message: String) -> clap::Error {
    Cli::command().error(kind, message)
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write, stdout_is_terminal: bool) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{rendered}");
            return code;
        }
    };
    let format = cli.format.unwrap_or(if stdout_is_terminal { OutputFormat::Pretty } else { OutputFormat::Csv });

    let result = match cli.command {
        Command::Gup { a, b, hbar } => gup(a, b, hbar),
        Command::Radial { q, c, a, m, levels, quadrature_check } => {
            match (RadialSpec { q, c, a, m }).validated() {
                Ok(spec) => radial(spec, levels, quadrature_check),
                Err(e) => Err(e.into()),
            }
        }
        Command::Triangular { v0, parity, c, a, px, py, lx, ly, convention } => {
            let spec = WellSpec { v0, parity, c, a, p_x: px, p_y: py, l_x: lx, l_y: ly };
            match spec.validated() {
                Ok(spec) => triangular(spec, convention),
                Err(e) => Err(e.into()),
            }
        }
        Command::Table1 { v0_min, v0_max, step } => {
            if v0_min > v0_max {
                let e = usage_error(ErrorKind::ValueValidation, format!("--v0-min {v0_min} exceeds --v0-max {v0_max}"));
                let _ = write!(err, "{}", e.render());
                return 2;
            }
            table1_output(&depth_range(v0_min, v0_max, step))
        }
        Command::Fig1 { levels } => fig1(levels),
        Command::Verify => verify_output(),
    };

    match result {
        Ok(output) => match emit(&output, format, out) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                1
            }
        },
        Err(failure) => {
            if let Some(partial) = &failure.partial {
                let _ = emit(partial, format, out);
            }
            let _ = writeln!(err, "error: {}", failure.message);
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("dirac-gup").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err, false);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn depth_range_is_inclusive() {
        assert_eq!(depth_range(1.0, 10.0, 1.0).len(), 10);
        assert_eq!(depth_range(1.0, 2.0, 0.1).len(), 11);
        assert_eq!(depth_range(3.0, 3.0, 1.0), vec![3.0]);
    }

    #[test]
    fn parsers_validate_ranges() {
        assert!(positive("0").is_err());
        assert!(positive("inf").is_err());
        assert!(non_negative("-1e-3").is_err());
        assert_eq!(non_negative("0").unwrap(), 0.0);
        assert!(level_count("0").is_err());
        assert!(level_count("51").is_err());
        assert!(finite("abc").is_err());
    }

    #[test]
    fn csv_numbers_round_trip() {
        let (code, out, _) = run_capture(&["gup", "--a", "0.1", "--b", "0.02"]);
        assert_eq!(code, 0);
        let mut lines = out.lines();
        assert_eq!(lines.next().unwrap(), "a,b,hbar,c0,c1,c2,delta_p_ext,l_min");
        let values: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
        assert!((values[7] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn pretty_table_aligns() {
        let (code, out, _) = run_capture(&["--format", "pretty", "fig1", "--levels", "2"]);
        assert_eq!(code, 0);
        let widths: Vec<usize> = out.lines().map(|l| l.len()).collect();
        assert_eq!(widths.len(), 4);
        assert!(widths.iter().all(|&w| w == widths[0]));
    }

    #[test]
    fn no_minimum_is_a_computation_failure() {
        let (code, out, err) = run_capture(&["gup", "--a", "1", "--b", "0.5"]);
        assert_eq!(code, 1);
        assert!(out.is_empty());
        assert!(err.contains("no minimal length"));
    }
}
