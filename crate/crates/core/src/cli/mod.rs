//! Text front end: expression grammar, session files, reports and the
//! `conslaw` command line.
//!
//! Exit codes: `0` computed, `1` the verdict is false (or `NotHomogeneous`),
//! `2` usage errors and failed mathematical preconditions.

mod parse;
mod print;
mod session;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use parse::{parse_expr, parse_expr_with, parse_jet_name};
pub use print::jet_name;
pub use session::Session;

use crate::conslaw::{
    check_adjoint_symmetry, check_multiplier, current_from_multiplier, helmholtz_check,
    is_trivial_current, multiplier_from_current, solve_multipliers, verify_conservation_law,
    Ansatz, ConservedCurrent,
};
use crate::error::{Error, Result};
use crate::expr::DiffExpr;
use crate::symmetry::{
    act_on_current, act_on_multiplier, action_matrix, check_symmetry, classify_with, psi_current,
    solve_symmetries, Comparison, SymmetryGen, Verdict,
};

/// Ordered `field = value` report. Expression values use the parser grammar.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    fields: Vec<(String, String)>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut r = Report::default();
        r.push("command", command);
        r
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.fields.push((key.into(), value.to_string()));
    }

    pub fn fields(&self) -> &[(String, String)] {
        &self.fields
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn to_text(&self) -> String {
        self.fields
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    pub fn to_json(&self) -> String {
        let map: serde_json::Map<String, serde_json::Value> = self
            .fields
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
            .collect();
        let mut s = serde_json::to_string_pretty(&serde_json::Value::Object(map))
            .expect("string map serializes");
        s.push('\n');
        s
    }

    /// Inverse of [`Report::to_text`].
    pub fn parse_text(text: &str) -> Option<Report> {
        let fields = text
            .lines()
            .map(|l| {
                l.split_once(" = ")
                    .map(|(k, v)| (k.to_string(), v.to_string()))
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Report { fields })
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "conslaw",
    version,
    about = "Conservation laws, multipliers and symmetry actions for scalar PDEs u_L = g(t, x, u, ...)"
)]
struct Cli {
    /// Session file declaring the PDE (`lead = ...`, `rhs = ...`).
    #[arg(long, global = true, value_name = "FILE")]
    session: Option<PathBuf>,
    /// Emit the report as a JSON object instead of `field = value` lines.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct AnsatzArgs {
    #[arg(long)]
    order: Option<u32>,
    #[arg(long = "jet-degree")]
    jet_degree: Option<u32>,
    #[arg(long = "t-degree")]
    t_degree: Option<u32>,
    #[arg(long = "x-degree")]
    x_degree: Option<u32>,
}

impl AnsatzArgs {
    fn resolve(&self, defaults: Ansatz) -> Ansatz {
        Ansatz::new(
            self.order.unwrap_or(defaults.max_order),
            self.jet_degree.unwrap_or(defaults.max_jet_degree),
            self.t_degree.unwrap_or(defaults.max_t_degree),
            self.x_degree.unwrap_or(defaults.max_x_degree),
        )
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that (T, X) is a conserved current.
    CheckConslaw {
        #[arg(long = "T", allow_hyphen_values = true)]
        t: String,
        #[arg(long = "X", allow_hyphen_values = true)]
        x: String,
    },
    /// Multiplier of a conserved current.
    MultiplierOf {
        #[arg(long = "T", allow_hyphen_values = true)]
        t: String,
        #[arg(long = "X", allow_hyphen_values = true)]
        x: String,
    },
    /// Check a multiplier, its adjoint-symmetry equation and Helmholtz conditions.
    CheckMultiplier {
        #[arg(long = "Q", allow_hyphen_values = true)]
        q: String,
    },
    /// Check a symmetry characteristic.
    CheckSymmetry {
        #[arg(long = "P", allow_hyphen_values = true)]
        p: String,
    },
    /// Basis of multipliers within a polynomial ansatz.
    Multipliers(AnsatzArgs),
    /// Basis of symmetry characteristics within a polynomial ansatz.
    Symmetries(AnsatzArgs),
    /// Conserved current of a multiplier.
    Current {
        #[arg(long = "Q", allow_hyphen_values = true)]
        q: String,
    },
    /// Act with a symmetry on a multiplier or on a current.
    Act {
        #[arg(long = "P", allow_hyphen_values = true)]
        p: String,
        #[arg(long = "Q", allow_hyphen_values = true, conflicts_with_all = ["t", "x"], required_unless_present_all = ["t", "x"])]
        q: Option<String>,
        #[arg(long = "T", allow_hyphen_values = true, requires = "x")]
        t: Option<String>,
        #[arg(long = "X", allow_hyphen_values = true, requires = "t")]
        x: Option<String>,
        /// Generator given as (tau, xi, eta) instead of a characteristic.
        #[arg(long, allow_hyphen_values = true, requires_all = ["xi", "t"])]
        tau: Option<String>,
        #[arg(long, allow_hyphen_values = true, requires = "tau")]
        xi: Option<String>,
    },
    /// Current Ψ_G(P, Q) from a symmetry and an adjoint-symmetry.
    Psi {
        #[arg(long = "P", allow_hyphen_values = true)]
        p: String,
        #[arg(long = "Q", allow_hyphen_values = true)]
        q: String,
    },
    /// Invariance/homogeneity of a conservation law under a symmetry.
    Classify {
        #[arg(long = "P", allow_hyphen_values = true)]
        p: String,
        #[arg(long = "Q", allow_hyphen_values = true)]
        q: String,
        /// Compare R_P*(Q) - R_Q*(P) with λQ off the solution space.
        #[arg(long = "strict-off-e")]
        strict_off_e: bool,
    },
    /// Matrix and eigenvectors of the symmetry action on a multiplier basis.
    ActionMatrix {
        #[arg(long = "P", allow_hyphen_values = true)]
        p: String,
        /// Basis element; repeat for each. Defaults to the multiplier basis
        /// of the session ansatz.
        #[arg(long = "Q", allow_hyphen_values = true)]
        q: Vec<String>,
        #[command(flatten)]
        ansatz: AnsatzArgs,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::CheckConslaw { .. } => "check-conslaw",
            Command::MultiplierOf { .. } => "multiplier-of",
            Command::CheckMultiplier { .. } => "check-multiplier",
            Command::CheckSymmetry { .. } => "check-symmetry",
            Command::Multipliers(_) => "multipliers",
            Command::Symmetries(_) => "symmetries",
            Command::Current { .. } => "current",
            Command::Act { .. } => "act",
            Command::Psi { .. } => "psi",
            Command::Classify { .. } => "classify",
            Command::ActionMatrix { .. } => "action-matrix",
        }
    }
}

/// Result of one CLI invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the command line `args` (including the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let (stdout, stderr) = if code == 0 {
                (text, String::new())
            } else {
                (String::new(), text)
            };
            return Outcome {
                code,
                stdout,
                stderr,
            };
        }
    };
    match execute(&cli) {
        Ok((report, ok)) => Outcome {
            code: if ok { 0 } else { 1 },
            stdout: if cli.json {
                report.to_json()
            } else {
                report.to_text()
            },
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn load_session(path: Option<&PathBuf>) -> Result<Session> {
    let path = path.ok_or_else(|| Error::Session("--session <FILE> is required".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Session(format!("{}: {e}", path.display())))?;
    Session::parse(&text)
}

fn push_current(report: &mut Report, cur: &ConservedCurrent) {
    report.push("T", &cur.density);
    report.push("X", &cur.flux);
}

fn push_basis(report: &mut Report, basis: &[DiffExpr]) {
    report.push("dimension", basis.len());
    for (i, b) in basis.iter().enumerate() {
        report.push(format!("basis[{i}]"), b);
    }
}

fn push_ansatz(report: &mut Report, a: &Ansatz) {
    report.push("order", a.max_order);
    report.push("jet-degree", a.max_jet_degree);
    report.push("t-degree", a.max_t_degree);
    report.push("x-degree", a.max_x_degree);
}

/// Runs a parsed command; the flag is the verdict (false ⇒ exit code 1).
fn execute(cli: &Cli) -> Result<(Report, bool)> {
    let session = load_session(cli.session.as_ref())?;
    let pde = &session.pde;
    let expr = |s: &str| session.parse_expr(s);
    let mut r = Report::new(cli.command.name());
    let ok = match &cli.command {
        Command::CheckConslaw { t, x } => {
            let cur = ConservedCurrent::new(expr(t)?, expr(x)?);
            push_current(&mut r, &cur);
            let verdict = verify_conservation_law(&cur, pde);
            r.push("verdict", verdict);
            verdict
        }
        Command::MultiplierOf { t, x } => {
            let cur = ConservedCurrent::new(expr(t)?, expr(x)?);
            push_current(&mut r, &cur);
            let q = multiplier_from_current(&cur, pde)?;
            let q_e = pde.restrict(q.expr());
            r.push("Q", &q_e);
            r.push("Q_offshell", q.expr());
            r.push("trivial", q_e.is_zero());
            true
        }
        Command::CheckMultiplier { q } => {
            let q = expr(q)?;
            r.push("Q", &q);
            let multiplier = check_multiplier(&q, pde);
            let adjoint = check_adjoint_symmetry(&q, pde);
            r.push("verdict", multiplier);
            r.push("adjoint_symmetry", adjoint);
            if adjoint {
                r.push("helmholtz", helmholtz_check(&q, pde)?);
            }
            multiplier
        }
        Command::CheckSymmetry { p } => {
            let p = expr(p)?;
            r.push("P", &p);
            let verdict = check_symmetry(&p, pde);
            r.push("verdict", verdict);
            verdict
        }
        Command::Multipliers(args) => {
            let a = args.resolve(session.ansatz);
            push_ansatz(&mut r, &a);
            let basis: Vec<DiffExpr> = solve_multipliers(pde, &a)?
                .into_iter()
                .map(|m| m.into_expr())
                .collect();
            push_basis(&mut r, &basis);
            true
        }
        Command::Symmetries(args) => {
            let a = args.resolve(session.ansatz);
            push_ansatz(&mut r, &a);
            push_basis(&mut r, &solve_symmetries(pde, &a));
            true
        }
        Command::Current { q } => {
            let q = expr(q)?;
            r.push("Q", &q);
            push_current(&mut r, &current_from_multiplier(&q, pde)?);
            true
        }
        Command::Act {
            p,
            q,
            t,
            x,
            tau,
            xi,
        } => {
            let p = expr(p)?;
            match (q, t, x) {
                (Some(q), _, _) => {
                    let q = expr(q)?;
                    r.push("P", &p);
                    r.push("Q_in", &q);
                    let dq = act_on_multiplier(&p, &q, pde)?;
                    r.push("Q", pde.restrict(&dq));
                    r.push("Q_offshell", &dq);
                }
                (None, Some(t), Some(x)) => {
                    let cur = ConservedCurrent::new(expr(t)?, expr(x)?);
                    let gen = match (tau, xi) {
                        (Some(tau), Some(xi)) => SymmetryGen::Full {
                            tau: expr(tau)?,
                            xi: expr(xi)?,
                            eta: p,
                        },
                        _ => SymmetryGen::Characteristic(p),
                    };
                    r.push("P", gen.characteristic());
                    let out = act_on_current(&gen, &cur, pde)?;
                    push_current(&mut r, &out);
                    r.push("trivial", is_trivial_current(&out, pde)?);
                }
                _ => unreachable!("clap enforces --Q or --T/--X"),
            }
            true
        }
        Command::Psi { p, q } => {
            let (p, q) = (expr(p)?, expr(q)?);
            r.push("P", &p);
            r.push("Q_in", &q);
            let cur = psi_current(&p, &q, pde)?;
            push_current(&mut r, &cur);
            true
        }
        Command::Classify { p, q, strict_off_e } => {
            let (p, q) = (expr(p)?, expr(q)?);
            r.push("P", &p);
            r.push("Q_in", &q);
            let mode = if *strict_off_e {
                Comparison::OffSolutionSpace
            } else {
                Comparison::OnSolutionSpace
            };
            let res = classify_with(&p, &q, pde, mode)?;
            r.push("verdict", res.verdict.name());
            if let Some(l) = res.verdict.lambda() {
                r.push("lambda", l);
            }
            r.push("Q", &res.action_multiplier);
            if let Some(res) = &res.residual {
                r.push("residual", res);
            }
            res.verdict != Verdict::NotHomogeneous
        }
        Command::ActionMatrix { p, q, ansatz } => {
            let p = expr(p)?;
            r.push("P", &p);
            let basis: Vec<DiffExpr> = if q.is_empty() {
                solve_multipliers(pde, &ansatz.resolve(session.ansatz))?
                    .into_iter()
                    .map(|m| m.into_expr())
                    .collect()
            } else {
                q.iter().map(|s| expr(s)).collect::<Result<_>>()?
            };
            push_basis(&mut r, &basis);
            let am = action_matrix(&p, &basis, pde)?;
            for i in 0..am.matrix.rows() {
                let row: Vec<String> = am.matrix.row(i).iter().map(ToString::to_string).collect();
                r.push(format!("matrix[{i}]"), format!("[{}]", row.join(", ")));
            }
            for (k, (l, q, _)) in am.eigen.iter().enumerate() {
                r.push(format!("eigen[{k}].lambda"), l);
                r.push(format!("eigen[{k}].Q"), q);
            }
            if am.unresolved.len() > 1 {
                let coeffs: Vec<String> = am.unresolved.iter().map(ToString::to_string).collect();
                r.push("unresolved", format!("[{}]", coeffs.join(", ")));
            }
            true
        }
    };
    Ok((r, ok))
}
