//! Command driver behind the `gpdb` binary: loads a program, evaluates it
//! under the requested semantics and assembles a [`QueryReport`] that renders
//! either as text or as a single JSON document.

use std::fmt::Write as _;
use std::path::PathBuf;

use gpdb_core::{
    ground_program, hoare_minimal, negation_keys, parse_formula, parse_program, smyth_minimal,
    BasicFormula, Engine, FormulaFunction, GroundProgram, Interval, Limits, StableClass,
};
use serde::ser::{Serialize, SerializeSeq, Serializer};

/// Shown when a program has no stable formula function.
pub const NO_STABLE_FUNCTION: &str = "no stable formula function; alternating class available";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Semantics {
    Lfp,
    Stable,
    Classes,
    Hoare,
    Smyth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    All,
    Hoare,
    Smyth,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Check,
    Lfp,
    Stable,
    Classes(Selection),
    /// `semantics: None` picks the least fixpoint for negation-free programs
    /// and stable functions otherwise.
    Query {
        formula: String,
        semantics: Option<Semantics>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Lfp => "lfp",
            Command::Stable => "stable",
            Command::Classes(_) => "classes",
            Command::Query { .. } => "query",
        }
    }
}

#[derive(Debug, Clone)]
pub struct QueryRequest {
    pub program: PathBuf,
    pub command: Command,
    pub limits: Limits,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Program {
        path: String,
        source: gpdb_core::Error,
    },
    #[error("query formula: {0}")]
    Query(gpdb_core::Error),
}

impl CliError {
    /// 3 parse/validation, 4 least fixpoint of a program with negation,
    /// 5 budget, 6 divergence, 7 I/O, 8 bad query formula. Clap uses 2.
    pub fn exit_code(&self) -> i32 {
        use gpdb_core::Error as E;
        match self {
            CliError::Io { .. } => 7,
            CliError::Query(_) => 8,
            CliError::Program { source, .. } => match source {
                E::Syntax { .. }
                | E::UnboundHeadVariable { .. }
                | E::ArityMismatch { .. }
                | E::ConstantOutOfRange { .. }
                | E::VariableUnderNegation { .. }
                | E::NonBareBodyVariable { .. }
                | E::UnboundVariable(_) => 3,
                E::NegationPresent => 4,
                E::AtomBudget { .. } | E::NegationBudget { .. } => 5,
                E::Divergence(_) | E::NonMonotone(_) => 6,
                E::AtomOutsideBase(_) | E::NonGroundFormula(_) => 8,
                E::DomainMismatch => 1,
            },
        }
    }
}

/// An interval rendered with exact `p/q` endpoints, or `"empty"`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalValue(pub Interval);

impl Serialize for IntervalValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match &self.0 {
            Interval::Empty => s.serialize_str("empty"),
            Interval::Closed { lo, hi } => {
                let mut seq = s.serialize_seq(Some(2))?;
                seq.serialize_element(&format!("{}/{}", lo.numer(), lo.denom()))?;
                seq.serialize_element(&format!("{}/{}", hi.numer(), hi.denom()))?;
                seq.end()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct FormulaValue {
    pub formula: String,
    pub interval: IntervalValue,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct NamedFunction {
    pub name: String,
    pub values: Vec<FormulaValue>,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct NamedClass {
    pub name: String,
    pub hoare_minimal: bool,
    pub smyth_minimal: bool,
    pub members: Vec<NamedFunction>,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Answer {
    pub name: String,
    pub formula: String,
    pub interval: IntervalValue,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Summary {
    pub clauses: usize,
    pub ground_clauses: usize,
    pub base_size: usize,
    pub tracked: usize,
    pub blocking_keys: usize,
    pub negation_free: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
#[serde(untagged)]
pub enum ResultEntry {
    Summary(Summary),
    Function(NamedFunction),
    Class(NamedClass),
    Answer(Answer),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct Diagnostics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    pub tp_steps: u64,
    pub lp_solves: u64,
    pub infeasible_steps: u64,
    pub messages: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct QueryReport {
    pub command: String,
    pub program: String,
    pub base_size: Option<usize>,
    pub status: String,
    pub results: Vec<ResultEntry>,
    /// Query only: the smallest interval containing every answer. A
    /// convenience, not a semantics.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hull: Option<IntervalValue>,
    pub diagnostics: Diagnostics,
}

impl QueryReport {
    fn new(req: &QueryRequest) -> Self {
        QueryReport {
            command: req.command.name().to_string(),
            program: req.program.display().to_string(),
            base_size: None,
            status: "ok".to_string(),
            results: Vec::new(),
            hull: None,
            diagnostics: Diagnostics::default(),
        }
    }

    /// The report emitted in place of results when `run` fails.
    pub fn failure(req: &QueryRequest, err: &CliError) -> Self {
        let mut report = QueryReport::new(req);
        report.status = "error".to_string();
        report.diagnostics.error = Some(err.to_string());
        report
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = self.write_text(&mut out);
        out
    }

    fn write_text(&self, out: &mut String) -> std::fmt::Result {
        if let Some(err) = &self.diagnostics.error {
            return writeln!(out, "error: {err}");
        }
        for entry in &self.results {
            match entry {
                ResultEntry::Summary(s) => {
                    writeln!(out, "clauses:        {}", s.clauses)?;
                    writeln!(out, "ground clauses: {}", s.ground_clauses)?;
                    writeln!(out, "base size:      {}", s.base_size)?;
                    writeln!(out, "tracked:        {}", s.tracked)?;
                    writeln!(out, "blocking keys:  {}", s.blocking_keys)?;
                    writeln!(out, "negation-free:  {}", s.negation_free)?;
                }
                ResultEntry::Function(f) => write_function(out, f, "")?,
                ResultEntry::Class(c) => {
                    let mut tags = Vec::new();
                    if c.hoare_minimal {
                        tags.push("hoare-minimal");
                    }
                    if c.smyth_minimal {
                        tags.push("smyth-minimal");
                    }
                    if tags.is_empty() {
                        writeln!(out, "{}:", c.name)?;
                    } else {
                        writeln!(out, "{} ({}):", c.name, tags.join(", "))?;
                    }
                    for m in &c.members {
                        write_function(out, m, "  ")?;
                    }
                }
                ResultEntry::Answer(a) => {
                    writeln!(out, "{}: {} : {}", a.name, a.formula, a.interval.0)?
                }
            }
        }
        if self.results.is_empty() {
            writeln!(out, "(none)")?;
        }
        if let Some(h) = &self.hull {
            writeln!(out, "hull (convenience only): {}", h.0)?;
        }
        if let Some(n) = self.diagnostics.iterations {
            writeln!(out, "iterations: {n}")?;
        }
        for m in &self.diagnostics.messages {
            writeln!(out, "note: {m}")?;
        }
        Ok(())
    }
}

fn write_function(out: &mut String, f: &NamedFunction, indent: &str) -> std::fmt::Result {
    writeln!(out, "{indent}{}:", f.name)?;
    for v in &f.values {
        writeln!(out, "{indent}  {} : {}", v.formula, v.interval.0)?;
    }
    Ok(())
}

fn named(name: String, h: &FormulaFunction) -> NamedFunction {
    NamedFunction {
        name,
        values: h
            .iter()
            .map(|(f, v)| FormulaValue {
                formula: f.to_string(),
                interval: IntervalValue(v.clone()),
            })
            .collect(),
    }
}

fn named_classes(classes: &[StableClass], selection: Selection) -> Vec<NamedClass> {
    let hoare = hoare_minimal(classes);
    let smyth = smyth_minimal(classes);
    classes
        .iter()
        .enumerate()
        .map(|(i, c)| NamedClass {
            name: format!("C{}", i + 1),
            hoare_minimal: hoare.contains(c),
            smyth_minimal: smyth.contains(c),
            members: c
                .members()
                .iter()
                .enumerate()
                .map(|(j, h)| named(format!("h{}", j + 1), h))
                .collect(),
        })
        .filter(|c| match selection {
            Selection::All => true,
            Selection::Hoare => c.hoare_minimal,
            Selection::Smyth => c.smyth_minimal,
        })
        .collect()
}

/// Smallest interval containing every non-empty value; empty if there is none.
fn hull<'a>(values: impl IntoIterator<Item = &'a Interval>) -> Interval {
    values
        .into_iter()
        .fold(Interval::Empty, |acc, v| match (&acc, v) {
            (_, Interval::Empty) => acc,
            (Interval::Empty, _) => v.clone(),
            (Interval::Closed { lo: a, hi: b }, Interval::Closed { lo: c, hi: d }) => {
                Interval::new(a.min(c).clone(), b.max(d).clone())
            }
        })
}

/// Loads, grounds and evaluates `req.program`.
pub fn run(req: &QueryRequest) -> Result<QueryReport, CliError> {
    let path = req.program.display().to_string();
    let source = std::fs::read_to_string(&req.program).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    let in_program = |source| CliError::Program {
        path: path.clone(),
        source,
    };
    let program = parse_program(&source).map_err(in_program)?;
    let g = ground_program(&program, &req.limits).map_err(in_program)?;
    let engine = Engine::new(req.limits);

    let mut report = QueryReport::new(req);
    report.base_size = Some(g.base().len());
    match &req.command {
        Command::Check => {
            report.results.push(ResultEntry::Summary(Summary {
                clauses: program.len(),
                ground_clauses: g.clauses().len(),
                base_size: g.base().len(),
                tracked: g.tracked().len(),
                blocking_keys: negation_keys(&g).map_err(in_program)?.len(),
                negation_free: g.is_pf(),
            }));
        }
        Command::Lfp => {
            let fix = engine.lfp(&g).map_err(in_program)?;
            report.diagnostics.iterations = Some(fix.iterations);
            report
                .results
                .push(ResultEntry::Function(named("lfp".into(), &fix.function)));
        }
        Command::Stable => {
            let stable = engine.enumerate_stable_functions(&g).map_err(in_program)?;
            if stable.is_empty() {
                report.diagnostics.messages.push(NO_STABLE_FUNCTION.into());
            }
            report.results = stable
                .iter()
                .enumerate()
                .map(|(i, h)| ResultEntry::Function(named(format!("h{}", i + 1), h)))
                .collect();
        }
        Command::Classes(selection) => {
            let classes = engine.minimal_stable_classes(&g).map_err(in_program)?;
            report.results = named_classes(&classes, *selection)
                .into_iter()
                .map(ResultEntry::Class)
                .collect();
        }
        Command::Query { formula, semantics } => {
            let f = parse_formula(formula).map_err(CliError::Query)?;
            let g = g.with_tracked(std::slice::from_ref(&f)).map_err(CliError::Query)?;
            let semantics = semantics.unwrap_or(if g.is_pf() {
                Semantics::Lfp
            } else {
                Semantics::Stable
            });
            report.results = answer(&engine, &g, &f, semantics, &mut report.diagnostics)
                .map_err(in_program)?;
            if semantics != Semantics::Lfp && !report.results.is_empty() {
                report.hull = Some(IntervalValue(hull(report.results.iter().map(|r| match r {
                    ResultEntry::Answer(a) => &a.interval.0,
                    _ => unreachable!("query results are answers"),
                }))));
            }
        }
    }
    let stats = engine.stats();
    report.diagnostics.tp_steps = stats.tp_steps;
    report.diagnostics.lp_solves = stats.lp_solves;
    report.diagnostics.infeasible_steps = stats.infeasible_steps;
    Ok(report)
}

fn answer(
    engine: &Engine,
    g: &GroundProgram,
    f: &BasicFormula,
    semantics: Semantics,
    diagnostics: &mut Diagnostics,
) -> gpdb_core::Result<Vec<ResultEntry>> {
    let entry = |name: String, h: &FormulaFunction| {
        ResultEntry::Answer(Answer {
            name,
            formula: f.to_string(),
            interval: IntervalValue(h.get(f)),
        })
    };
    Ok(match semantics {
        Semantics::Lfp => {
            let fix = engine.lfp(g)?;
            diagnostics.iterations = Some(fix.iterations);
            vec![entry("lfp".into(), &fix.function)]
        }
        Semantics::Stable => {
            let stable = engine.enumerate_stable_functions(g)?;
            if stable.is_empty() {
                diagnostics.messages.push(NO_STABLE_FUNCTION.into());
            }
            stable
                .iter()
                .enumerate()
                .map(|(i, h)| entry(format!("h{}", i + 1), h))
                .collect()
        }
        Semantics::Classes | Semantics::Hoare | Semantics::Smyth => {
            let selection = match semantics {
                Semantics::Hoare => Selection::Hoare,
                Semantics::Smyth => Selection::Smyth,
                _ => Selection::All,
            };
            let classes = engine.minimal_stable_classes(g)?;
            let hoare = hoare_minimal(&classes);
            let smyth = smyth_minimal(&classes);
            classes
                .iter()
                .enumerate()
                .filter(|(_, c)| match selection {
                    Selection::All => true,
                    Selection::Hoare => hoare.contains(c),
                    Selection::Smyth => smyth.contains(c),
                })
                .flat_map(|(i, c)| {
                    c.members()
                        .iter()
                        .enumerate()
                        .map(move |(j, h)| entry(format!("C{}/h{}", i + 1, j + 1), h))
                })
                .collect()
        }
    })
}
