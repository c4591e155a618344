use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::model::{Parameters, State};
use crate::nsfd::{simulate, StepConfig};
use crate::ode::rk4_integrate;
use crate::trajectory::{Scheme, Trajectory};

/// Bundled Portugal 2020 scenario. Also the source of defaults for keys a
/// user file leaves out.
pub const BUNDLED_SCENARIO: &str = include_str!("../../data/portugal_2020.cfg");
const BUNDLED_ORIGIN: &str = "<bundled portugal_2020.cfg>";

/// Every key a scenario file may set, in canonical output order.
pub const SCENARIO_KEYS: [&str; 31] = [
    "Lambda", "mu", "beta", "lA", "lH", "phi", "nu", "delta1", "delta2", "eta", "omega",
    "alpha1", "alpha2", "p", "q", "f1", "f2", "f3", "kappa", "m", "S0", "A0", "I0", "Q0", "H0",
    "Hbar0", "D0", "h", "n_steps", "t0_date", "scheme",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub params: Parameters<f64>,
    pub init: State<f64>,
    pub h: f64,
    pub n_steps: usize,
    pub t0_date: NaiveDate,
    pub scheme: Scheme,
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Number(f64),
    Date(NaiveDate),
    Scheme(Scheme),
}

/// Raw key/value pairs with the line each came from.
#[derive(Debug, Clone, Default)]
struct Entries {
    values: BTreeMap<&'static str, (Value, String, usize)>,
}

fn canonical_key(key: &str) -> Option<&'static str> {
    SCENARIO_KEYS.iter().copied().find(|k| *k == key)
}

fn parse_value(key: &str, raw: &str) -> std::result::Result<Value, String> {
    match key {
        "t0_date" => NaiveDate::parse_from_str(raw, "%Y-%m-%d")
            .map(Value::Date)
            .map_err(|e| format!("bad date `{raw}`: {e}")),
        "scheme" => raw.parse().map(Value::Scheme),
        _ => eval_expr(raw).map(Value::Number),
    }
}

fn parse_entries(text: &str, origin: &str) -> Result<Entries> {
    let mut entries = Entries::default();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| Error::Config {
            path: origin.to_string(),
            line: line_no,
            message,
        };
        let (key, raw) = content
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, got `{content}`")))?;
        let key = key.trim();
        let raw = raw.trim();
        let canon = canonical_key(key).ok_or_else(|| err(format!("unknown key `{key}`")))?;
        if entries.values.contains_key(canon) {
            return Err(err(format!("duplicate key `{key}`")));
        }
        let value = parse_value(canon, raw).map_err(|m| err(format!("key `{key}`: {m}")))?;
        entries
            .values
            .insert(canon, (value, origin.to_string(), line_no));
    }
    Ok(entries)
}

impl Entries {
    fn overlay(mut self, other: Entries) -> Self {
        self.values.extend(other.values);
        self
    }

    fn entry(&self, key: &'static str) -> Result<&(Value, String, usize)> {
        self.values.get(key).ok_or_else(|| Error::Config {
            path: BUNDLED_ORIGIN.into(),
            line: 0,
            message: format!("missing key `{key}`"),
        })
    }

    fn number(&self, key: &'static str) -> Result<f64> {
        match self.entry(key)? {
            (Value::Number(x), _, _) => Ok(*x),
            (_, path, line) => Err(Error::Config {
                path: path.clone(),
                line: *line,
                message: format!("key `{key}` must be numeric"),
            }),
        }
    }

    fn count(&self, key: &'static str) -> Result<usize> {
        let x = self.number(key)?;
        if x.fract() != 0.0 || x < 0.0 || x > u32::MAX as f64 {
            let (_, path, line) = self.entry(key)?;
            return Err(Error::Config {
                path: path.clone(),
                line: *line,
                message: format!("key `{key}` must be a nonnegative integer, got {x}"),
            });
        }
        Ok(x as usize)
    }

    fn into_scenario(self) -> Result<Scenario> {
        let n = |k| self.number(k);
        let params = Parameters {
            recruitment: n("Lambda")?,
            mu: n("mu")?,
            beta: n("beta")?,
            l_a: n("lA")?,
            l_h: n("lH")?,
            phi: n("phi")?,
            nu: n("nu")?,
            delta1: n("delta1")?,
            delta2: n("delta2")?,
            eta: n("eta")?,
            omega: n("omega")?,
            alpha1: n("alpha1")?,
            alpha2: n("alpha2")?,
            p: n("p")?,
            q: n("q")?,
            f1: n("f1")?,
            f2: n("f2")?,
            f3: n("f3")?,
            kappa: n("kappa")?,
            m: n("m")?,
        };
        let init = State {
            susceptible: n("S0")?,
            asymptomatic: n("A0")?,
            infected: n("I0")?,
            quarantined: n("Q0")?,
            hospitalized: n("H0")?,
            icu: n("Hbar0")?,
            deaths: n("D0")?,
        };
        let t0_date = match self.entry("t0_date")? {
            (Value::Date(d), _, _) => *d,
            _ => unreachable!("t0_date always parses as a date"),
        };
        let scheme = match self.entry("scheme")? {
            (Value::Scheme(s), _, _) => *s,
            _ => unreachable!("scheme always parses as a scheme"),
        };
        let scenario = Scenario {
            params,
            init,
            h: n("h")?,
            n_steps: self.count("n_steps")?,
            t0_date,
            scheme,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

impl Scenario {
    /// The bundled Portugal scenario.
    pub fn bundled() -> Self {
        parse_entries(BUNDLED_SCENARIO, BUNDLED_ORIGIN)
            .and_then(Entries::into_scenario)
            .expect("bundled scenario is valid")
    }

    /// Parses scenario text; keys it omits take the bundled values.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let defaults = parse_entries(BUNDLED_SCENARIO, BUNDLED_ORIGIN)?;
        let user = parse_entries(text, origin)?;
        defaults.overlay(user).into_scenario()
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.init.validate()?;
        if !(self.init.population() > 0.0) {
            return Err(Error::Invalid {
                field: "S0+A0+I0+Q0+H0+Hbar0",
                value: self.init.population(),
                bound: "initial population must be > 0",
            });
        }
        if !self.h.is_finite() || self.h <= 0.0 {
            return Err(Error::Invalid {
                field: "h",
                value: self.h,
                bound: "step size must be finite and > 0",
            });
        }
        if self.n_steps == 0 {
            return Err(Error::Invalid {
                field: "n_steps",
                value: 0.0,
                bound: "must be >= 1",
            });
        }
        Ok(())
    }

    /// Applies `key = value` on top of this scenario and revalidates.
    pub fn with_override(&self, key: &str, raw: &str) -> Result<Self> {
        let mut entries = parse_entries(&self.to_config_string(), "<scenario>")?;
        let text = format!("{key} = {raw}");
        entries = entries.overlay(parse_entries(&text, "<override>")?);
        entries.into_scenario()
    }

    /// Canonical text form; parsing it back yields an identical scenario.
    pub fn to_config_string(&self) -> String {
        let p = &self.params;
        let s = &self.init;
        let numbers = [
            p.recruitment,
            p.mu,
            p.beta,
            p.l_a,
            p.l_h,
            p.phi,
            p.nu,
            p.delta1,
            p.delta2,
            p.eta,
            p.omega,
            p.alpha1,
            p.alpha2,
            p.p,
            p.q,
            p.f1,
            p.f2,
            p.f3,
            p.kappa,
            p.m,
            s.susceptible,
            s.asymptomatic,
            s.infected,
            s.quarantined,
            s.hospitalized,
            s.icu,
            s.deaths,
            self.h,
        ];
        let mut out = String::new();
        for (key, v) in SCENARIO_KEYS.iter().zip(numbers) {
            let _ = writeln!(out, "{key} = {v:?}");
        }
        let _ = writeln!(out, "n_steps = {}", self.n_steps);
        let _ = writeln!(out, "t0_date = {}", self.t0_date.format("%Y-%m-%d"));
        let _ = writeln!(out, "scheme = {}", self.scheme);
        out
    }
}

impl Scenario {
    /// Integrates the scenario with its configured scheme and step.
    pub fn run(&self) -> Result<Trajectory<f64>> {
        self.run_with(self.scheme, self.h, self.n_steps)
    }

    pub fn run_with(&self, scheme: Scheme, h: f64, n_steps: usize) -> Result<Trajectory<f64>> {
        let mut traj = match scheme {
            Scheme::Nsfd => simulate(&self.params, &self.init, &StepConfig::new(h)?, n_steps)?,
            Scheme::Rk4 => rk4_integrate(&self.params, &self.init, h, n_steps)?,
        };
        traj.start_date = Some(self.t0_date);
        Ok(traj)
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Scenario::parse(&text, &path.display().to_string())
}

pub fn write_scenario(scenario: &Scenario, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, scenario.to_config_string()).map_err(|e| Error::io(path, e))
}

/// Evaluates `+ - * /` expressions over decimal literals.
fn eval_expr(src: &str) -> std::result::Result<f64, String> {
    let mut parser = ExprParser {
        bytes: src.as_bytes(),
        pos: 0,
    };
    let v = parser.sum()?;
    parser.skip_ws();
    if parser.pos != parser.bytes.len() {
        return Err(format!("unexpected input at column {} in `{src}`", parser.pos + 1));
    }
    if !v.is_finite() {
        return Err(format!("`{src}` does not evaluate to a finite number"));
    }
    Ok(v)
}

struct ExprParser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl ExprParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn sum(&mut self) -> std::result::Result<f64, String> {
        let mut acc = self.product()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.product()?;
            acc = if op == b'+' { acc + rhs } else { acc - rhs };
        }
        Ok(acc)
    }

    fn product(&mut self) -> std::result::Result<f64, String> {
        let mut acc = self.unary()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if op == b'*' { acc * rhs } else { acc / rhs };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> std::result::Result<f64, String> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.sum()?;
                if self.peek() != Some(b')') {
                    return Err("missing `)`".into());
                }
                self.pos += 1;
                Ok(v)
            }
            Some(_) => self.number(),
            None => Err("expected a value".into()),
        }
    }

    fn number(&mut self) -> std::result::Result<f64, String> {
        let start = self.pos;
        let b = self.bytes;
        let digits = |p: &mut usize| {
            while *p < b.len() && b[*p].is_ascii_digit() {
                *p += 1;
            }
        };
        let mut p = self.pos;
        digits(&mut p);
        if p < b.len() && b[p] == b'.' {
            p += 1;
            digits(&mut p);
        }
        if p < b.len() && (b[p] == b'e' || b[p] == b'E') {
            let mut q = p + 1;
            if q < b.len() && (b[q] == b'+' || b[q] == b'-') {
                q += 1;
            }
            let exp_start = q;
            digits(&mut q);
            if q > exp_start {
                p = q;
            }
        }
        let text = std::str::from_utf8(&b[start..p]).unwrap_or("");
        let v = text
            .parse::<f64>()
            .map_err(|_| format!("expected a number at column {}", start + 1))?;
        self.pos = p;
        Ok(v)
    }
}
