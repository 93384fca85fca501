use std::fmt;

use num_traits::{One, Signed};

use crate::expr::{DiffExpr, JetIndex, Monomial};

/// `u`, `u_t`, `u_txx`, … (all `t` before all `x`).
pub fn jet_name(j: JetIndex) -> String {
    if j == JetIndex::U {
        return "u".to_string();
    }
    let mut s = String::from("u_");
    s.extend(std::iter::repeat_n('t', j.nt as usize));
    s.extend(std::iter::repeat_n('x', j.nx as usize));
    s
}

fn factor(name: &str, e: u32) -> String {
    if e == 1 {
        name.to_string()
    } else {
        format!("{name}^{e}")
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.t_deg() > 0 {
            parts.push(factor("t", self.t_deg()));
        }
        if self.x_deg() > 0 {
            parts.push(factor("x", self.x_deg()));
        }
        for &(j, e) in self.jets() {
            parts.push(factor(&jet_name(j), e));
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

impl fmt::Display for DiffExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mag = c.abs();
            if m.is_one() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}
