//! Linear models in LP file format: writer, reader and evaluation of an
//! integer assignment.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }

    fn holds(self, lhs: i128, rhs: i128) -> bool {
        match self {
            Sense::Le => lhs <= rhs,
            Sense::Ge => lhs >= rhs,
            Sense::Eq => lhs == rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(i128, String)>,
    pub sense: Sense,
    pub rhs: i128,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    /// Integer with inclusive bounds; `None` upper bound is unbounded.
    Integer {
        lower: i128,
        upper: Option<i128>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
}

/// A minimization model.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Model {
    pub comments: Vec<String>,
    pub objective: Vec<(i128, String)>,
    pub objective_constant: i128,
    pub constraints: Vec<Constraint>,
    pub variables: Vec<Variable>,
}

pub type Assignment = HashMap<String, i128>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub objective: i128,
    /// Names of violated constraints and out-of-domain variables.
    pub violations: Vec<String>,
}

impl Model {
    pub fn binary(&mut self, name: String) {
        self.variables.push(Variable {
            name,
            kind: VarKind::Binary,
        });
    }

    pub fn integer(&mut self, name: String, lower: i128, upper: Option<i128>) {
        self.variables.push(Variable {
            name,
            kind: VarKind::Integer { lower, upper },
        });
    }

    pub fn add(&mut self, name: String, terms: Vec<(i128, String)>, sense: Sense, rhs: i128) {
        self.constraints.push(Constraint {
            name,
            terms,
            sense,
            rhs,
        });
    }

    /// Objective value and violations; unassigned variables read as zero.
    pub fn evaluate(&self, a: &Assignment) -> Evaluation {
        let value = |name: &str| a.get(name).copied().unwrap_or(0);
        let lin = |terms: &[(i128, String)]| terms.iter().map(|(c, v)| c * value(v)).sum::<i128>();
        let mut violations = Vec::new();
        for v in &self.variables {
            let x = value(&v.name);
            let ok = match v.kind {
                VarKind::Binary => x == 0 || x == 1,
                VarKind::Integer { lower, upper } => x >= lower && upper.is_none_or(|u| x <= u),
            };
            if !ok {
                violations.push(v.name.clone());
            }
        }
        for c in &self.constraints {
            if !c.sense.holds(lin(&c.terms), c.rhs) {
                violations.push(c.name.clone());
            }
        }
        Evaluation {
            objective: lin(&self.objective) + self.objective_constant,
            violations,
        }
    }

    /// LP file text. Output depends only on the model, so it is stable.
    pub fn to_lp(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "\\ {c}");
        }
        out.push_str("Minimize\n");
        write_expr(&mut out, "obj", &self.objective, self.objective_constant);
        out.push('\n');
        out.push_str("Subject To\n");
        for c in &self.constraints {
            write_expr(&mut out, &c.name, &c.terms, 0);
            let _ = writeln!(out, " {} {}", c.sense.symbol(), c.rhs);
        }
        let bounded: Vec<&Variable> = self
            .variables
            .iter()
            .filter(|v| matches!(v.kind, VarKind::Integer { .. }))
            .collect();
        if !bounded.is_empty() {
            out.push_str("Bounds\n");
            for v in &bounded {
                if let VarKind::Integer { lower, upper } = v.kind {
                    match upper {
                        Some(u) => {
                            let _ = writeln!(out, " {lower} <= {} <= {u}", v.name);
                        }
                        None => {
                            let _ = writeln!(out, " {} >= {lower}", v.name);
                        }
                    }
                }
            }
        }
        for (header, want_binary) in [("Binaries", true), ("Generals", false)] {
            let names: Vec<&str> = self
                .variables
                .iter()
                .filter(|v| matches!(v.kind, VarKind::Binary) == want_binary)
                .map(|v| v.name.as_str())
                .collect();
            if names.is_empty() {
                continue;
            }
            let _ = writeln!(out, "{header}");
            for chunk in names.chunks(10) {
                let _ = writeln!(out, " {}", chunk.join(" "));
            }
        }
        out.push_str("End\n");
        out
    }
}

const WRAP: usize = 90;

fn write_expr(out: &mut String, label: &str, terms: &[(i128, String)], constant: i128) {
    let mut line = format!(" {label}:");
    let mut pieces: Vec<String> = terms
        .iter()
        .map(|(c, v)| match *c {
            1 => format!("+ {v}"),
            -1 => format!("- {v}"),
            c if c < 0 => format!("- {} {v}", -c),
            c => format!("+ {c} {v}"),
        })
        .collect();
    if constant != 0 {
        pieces.push(if constant < 0 {
            format!("- {}", -constant)
        } else {
            format!("+ {constant}")
        });
    }
    if pieces.is_empty() {
        pieces.push("0".into());
    }
    for p in pieces {
        if line.len() + p.len() + 1 > WRAP {
            out.push_str(&line);
            out.push('\n');
            line = String::from("  ");
        }
        line.push(' ');
        line.push_str(&p);
    }
    out.push_str(&line);
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("missing section {0}")]
    MissingSection(&'static str),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Preamble,
    Objective,
    Constraints,
    Bounds,
    Binaries,
    Generals,
    End,
}

/// Reads the dialect written by [`Model::to_lp`].
pub fn parse_lp(text: &str) -> Result<Model, LpError> {
    let mut model = Model::default();
    let mut section = Section::Preamble;
    let mut seen_objective = false;
    let mut pending: Vec<(usize, String)> = Vec::new();
    let mut bounds: BTreeMap<String, (i128, Option<i128>)> = BTreeMap::new();
    let mut generals: Vec<String> = Vec::new();

    let flush = |model: &mut Model,
                 section: Section,
                 pending: &mut Vec<(usize, String)>|
     -> Result<(), LpError> {
        if pending.is_empty() {
            return Ok(());
        }
        let line = pending[0].0;
        let tokens: Vec<String> = pending
            .drain(..)
            .flat_map(|(_, s)| s.split_whitespace().map(String::from).collect::<Vec<_>>())
            .collect();
        match section {
            Section::Objective => {
                let (label_ok, rest) = split_label(&tokens);
                if !label_ok {
                    return Err(syntax(line, "objective needs a label"));
                }
                let (terms, constant) = parse_terms(rest, line)?;
                model.objective = terms;
                model.objective_constant = constant;
            }
            Section::Constraints => {
                let (_, rest) = split_label(&tokens);
                let name = tokens[0].trim_end_matches(':').to_string();
                let pos = rest
                    .iter()
                    .position(|t| matches!(t.as_str(), "<=" | ">=" | "="))
                    .ok_or_else(|| syntax(line, "constraint without operator"))?;
                let sense = match rest[pos].as_str() {
                    "<=" => Sense::Le,
                    ">=" => Sense::Ge,
                    _ => Sense::Eq,
                };
                let (terms, constant) = parse_terms(&rest[..pos], line)?;
                if constant != 0 {
                    return Err(syntax(line, "constant on constraint left-hand side"));
                }
                let rhs_tok = rest
                    .get(pos + 1)
                    .ok_or_else(|| syntax(line, "missing right-hand side"))?;
                let rhs = rhs_tok
                    .parse()
                    .map_err(|_| syntax(line, "bad right-hand side"))?;
                model.add(name, terms, sense, rhs);
            }
            _ => {}
        }
        Ok(())
    };

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let trimmed = raw.trim();
        if section == Section::Preamble {
            if let Some(c) = trimmed.strip_prefix('\\') {
                model.comments.push(c.trim_start().to_string());
                continue;
            }
        }
        if trimmed.is_empty() || trimmed.starts_with('\\') {
            continue;
        }
        let next = match trimmed.to_ascii_lowercase().as_str() {
            "minimize" => Some(Section::Objective),
            "subject to" => Some(Section::Constraints),
            "bounds" => Some(Section::Bounds),
            "binaries" => Some(Section::Binaries),
            "generals" => Some(Section::Generals),
            "end" => Some(Section::End),
            _ => None,
        };
        if let Some(s) = next {
            flush(&mut model, section, &mut pending)?;
            seen_objective |= s == Section::Objective;
            section = s;
            continue;
        }
        match section {
            Section::Preamble | Section::End => {
                return Err(syntax(lineno, "text outside a section"));
            }
            Section::Objective => pending.push((lineno, trimmed.to_string())),
            Section::Constraints => {
                // A label starts a new constraint.
                let first = trimmed.split_whitespace().next().unwrap_or("");
                if first.ends_with(':') {
                    flush(&mut model, section, &mut pending)?;
                }
                pending.push((lineno, trimmed.to_string()));
            }
            Section::Bounds => {
                let t: Vec<&str> = trimmed.split_whitespace().collect();
                let num = |s: &str| s.parse::<i128>().map_err(|_| syntax(lineno, "bad bound"));
                match t.as_slice() {
                    [lo, "<=", name, "<=", hi] => {
                        bounds.insert(name.to_string(), (num(lo)?, Some(num(hi)?)));
                    }
                    [name, ">=", lo] => {
                        bounds.insert(name.to_string(), (num(lo)?, None));
                    }
                    _ => return Err(syntax(lineno, "unsupported bound")),
                }
            }
            Section::Binaries => {
                for name in trimmed.split_whitespace() {
                    model.binary(name.to_string());
                }
            }
            Section::Generals => generals.extend(trimmed.split_whitespace().map(String::from)),
        }
    }
    flush(&mut model, section, &mut pending)?;
    if !seen_objective {
        return Err(LpError::MissingSection("Minimize"));
    }
    if section != Section::End {
        return Err(LpError::MissingSection("End"));
    }
    for name in generals {
        let (lower, upper) = bounds.remove(&name).unwrap_or((0, None));
        model.integer(name, lower, upper);
    }
    Ok(model)
}

fn syntax(line: usize, reason: &str) -> LpError {
    LpError::Syntax {
        line,
        reason: reason.into(),
    }
}

fn split_label(tokens: &[String]) -> (bool, &[String]) {
    match tokens.first() {
        Some(t) if t.ends_with(':') => (true, &tokens[1..]),
        _ => (false, tokens),
    }
}

/// Signed terms `[+|-] [coef] name` and bare constants.
fn parse_terms(tokens: &[String], line: usize) -> Result<(Vec<(i128, String)>, i128), LpError> {
    let mut terms = Vec::new();
    let mut sign = 1i128;
    let mut coef: Option<i128> = None;
    for t in tokens {
        match t.as_str() {
            "+" => sign = 1,
            "-" => sign = -1,
            _ => match t.parse::<i128>() {
                Ok(_) if coef.is_some() => return Err(syntax(line, "two numbers in a row")),
                Ok(c) => coef = Some(c),
                Err(_) => {
                    terms.push((sign * coef.take().unwrap_or(1), t.clone()));
                    sign = 1;
                }
            },
        }
    }
    Ok((terms, coef.map_or(0, |c| sign * c)))
}
