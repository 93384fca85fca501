use std::collections::BTreeMap;

use crate::conslaw::Ansatz;
use crate::error::{Error, Result};
use crate::expr::DiffExpr;
use crate::soln::NormalPDE;

use super::parse::{parse_expr_with, parse_jet_name};

/// A PDE with named expressions and default ansatz bounds.
///
/// File format, one `key = value` per line, `#` starts a comment:
///
/// ```text
/// lead = u_t
/// rhs = -u*u_x - u_xxx
/// name energy = 1/2*u^2 + u_xx
/// order = 2
/// jet-degree = 2
/// t-degree = 1
/// x-degree = 1
/// ```
#[derive(Clone, Debug)]
pub struct Session {
    pub pde: NormalPDE,
    pub names: BTreeMap<String, DiffExpr>,
    pub ansatz: Ansatz,
}

const RESERVED: [&str; 3] = ["t", "x", "u"];

impl Session {
    pub fn parse(text: &str) -> Result<Session> {
        let mut lead = None;
        let mut rhs = None;
        let mut names = BTreeMap::new();
        let mut bounds: [Option<u32>; 4] = [None; 4];
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Session(format!("line {}: {msg}", lineno + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err("expected 'key = value'".into()))?;
            let (key, value) = (key.trim(), value.trim());
            let expr = |v: &str, names: &BTreeMap<String, DiffExpr>| {
                parse_expr_with(v, names).map_err(|e| err(e.to_string()))
            };
            let number = |v: &str| {
                v.parse::<u32>()
                    .map_err(|_| err(format!("'{v}' is not a non-negative integer")))
            };
            match key {
                "lead" => {
                    lead = Some(
                        parse_jet_name(value)
                            .ok_or_else(|| err(format!("'{value}' is not a jet variable")))?,
                    )
                }
                "rhs" => rhs = Some(expr(value, &names)?),
                "order" => bounds[0] = Some(number(value)?),
                "jet-degree" => bounds[1] = Some(number(value)?),
                "t-degree" => bounds[2] = Some(number(value)?),
                "x-degree" => bounds[3] = Some(number(value)?),
                _ => {
                    let Some(name) = key
                        .strip_prefix("name")
                        .filter(|r| r.starts_with(char::is_whitespace))
                        .map(str::trim)
                    else {
                        return Err(err(format!("unknown key '{key}'")));
                    };
                    let valid = !name.is_empty()
                        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                        && name.chars().next().is_some_and(|c| c.is_ascii_alphabetic());
                    if !valid || RESERVED.contains(&name) || parse_jet_name(name).is_some() {
                        return Err(err(format!("invalid name '{name}'")));
                    }
                    let e = expr(value, &names)?;
                    names.insert(name.to_string(), e);
                }
            }
        }
        let lead = lead.ok_or_else(|| Error::Session("missing 'lead'".into()))?;
        let rhs = rhs.ok_or_else(|| Error::Session("missing 'rhs'".into()))?;
        let pde = NormalPDE::new(lead, rhs)?;
        let ansatz = Ansatz::new(
            bounds[0].unwrap_or(pde.order().saturating_sub(1)),
            bounds[1].unwrap_or(2),
            bounds[2].unwrap_or(1),
            bounds[3].unwrap_or(1),
        );
        Ok(Session { pde, names, ansatz })
    }

    pub fn parse_expr(&self, text: &str) -> Result<DiffExpr> {
        parse_expr_with(text, &self.names)
    }
}
