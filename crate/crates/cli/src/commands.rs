//! Command dispatch. Every command renders to a string and an exit code so
//! the binary and the tests share one code path.

use motivic_core::coefficients::{ECoeffTable, RECURSION_LIMIT};
use motivic_core::groups::Q_LATTICE_LIMIT;
use motivic_core::ratfield::{
    rational_to_string, specialize, RatFunc, SpecializeTarget, Specialized,
};
use motivic_core::stackcalc::{abelianize_bgl, gen_euler};
use motivic_core::Error as CoreError;
use serde_json::{json, Value};

use crate::expr::{self, ClassExpr, ParseError};
use crate::suites;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_EVAL: i32 = 3;

/// Largest `m` accepted by `eff-table`.
pub const EFF_TABLE_LIMIT: usize = Q_LATTICE_LIMIT;

/// Output width used when `MOTIVIC_WIDTH` is unset or unreadable.
pub const DEFAULT_WIDTH: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Eval {
        expr: String,
        at_one: bool,
        poincare: bool,
    },
    EffTable {
        max: usize,
    },
    Abelianize {
        m: usize,
    },
    Euler {
        m: usize,
    },
    Check {
        suite: String,
        max: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Flags {
    pub json: bool,
    /// Wrap width for long text cells.
    pub width: usize,
}

impl Default for Flags {
    fn default() -> Self {
        Flags {
            json: false,
            width: DEFAULT_WIDTH,
        }
    }
}

impl Flags {
    /// Reads `MOTIVIC_WIDTH`; it only affects text layout.
    pub fn from_env(json: bool) -> Self {
        let width = std::env::var("MOTIVIC_WIDTH")
            .ok()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .filter(|w| *w >= 20)
            .unwrap_or(DEFAULT_WIDTH);
        Flags { json, width }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }
}

/// Failure categories, each with its own exit code.
#[derive(Debug)]
enum Failure {
    Parse(ParseError),
    Core(CoreError),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Parse(_) => EXIT_USAGE,
            Failure::Core(CoreError::TooLarge { .. } | CoreError::InvalidInput(_)) => EXIT_USAGE,
            Failure::Core(_) => EXIT_EVAL,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Failure::Parse(ParseError::Syntax { position, expected }) => json!({
                "error": "SyntaxError",
                "position": position,
                "expected": expected,
                "message": self.message(),
            }),
            Failure::Parse(ParseError::Guard { position, .. }) => json!({
                "error": "GuardError",
                "position": position,
                "message": self.message(),
            }),
            Failure::Core(e) => json!({
                "error": core_kind(e),
                "message": self.message(),
            }),
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Parse(e) => e.to_string(),
            Failure::Core(e) => e.to_string(),
        }
    }

    fn render(&self, flags: Flags) -> Outcome {
        let stderr = if flags.json {
            format!("{}\n", self.to_json())
        } else {
            let kind = match self {
                Failure::Parse(ParseError::Syntax { .. }) => "SyntaxError",
                Failure::Parse(ParseError::Guard { .. }) => "GuardError",
                Failure::Core(e) => core_kind(e),
            };
            format!("error: {kind}: {}\n", self.message())
        };
        Outcome {
            code: self.code(),
            stdout: String::new(),
            stderr,
        }
    }
}

fn core_kind(e: &CoreError) -> &'static str {
    match e {
        CoreError::DivisionByZero => "DivisionByZero",
        CoreError::PoleAtOne(_) => "PoleAtOne",
        CoreError::AmbientMismatch { .. } => "AmbientMismatch",
        CoreError::TooLarge { .. } => "GuardError",
        CoreError::NotInPoset => "NotInPoset",
        CoreError::NotComparable => "NotComparable",
        CoreError::NotAbelian => "NotAbelian",
        CoreError::InvalidInput(_) => "InvalidInput",
        CoreError::InternalInvariant(_) => "InternalInvariant",
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::Parse(e)
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        Failure::Core(e)
    }
}

pub fn run(cmd: &Command, flags: Flags) -> Outcome {
    let res = match cmd {
        Command::Eval {
            expr,
            at_one,
            poincare,
        } => eval(expr, *at_one, *poincare, flags),
        Command::EffTable { max } => eff_table(*max, flags),
        Command::Abelianize { m } => abelianize(*m, flags),
        Command::Euler { m } => euler(*m, flags),
        Command::Check { suite, max } => return check(suite, *max, flags),
    };
    match res {
        Ok(s) => Outcome::ok(s),
        Err(f) => f.render(flags),
    }
}

fn eval(src: &str, at_one: bool, poincare: bool, flags: Flags) -> Result<String, Failure> {
    let e: ClassExpr = expr::parse(src)?;
    let v: RatFunc = expr::eval_class(&e)?;
    let one = if at_one { Some(v.pi_eval()?) } else { None };
    let z = if poincare {
        match specialize(&v, SpecializeTarget::PoincareZ) {
            Specialized::Poincare(p) => Some(p.fmt_with_var("z")),
            Specialized::Hodge(_) => unreachable!("asked for the Poincaré realization"),
        }
    } else {
        None
    };
    if flags.json {
        let mut obj = json!({ "expr": expr::render(&e), "value": v.to_string() });
        if let Some(q) = &one {
            obj["at_one"] = json!(rational_to_string(q));
        }
        if let Some(p) = &z {
            obj["poincare"] = json!(p);
        }
        return Ok(format!("{obj}\n"));
    }
    let mut out = format!("{v}\n");
    if let Some(q) = &one {
        out.push_str(&format!("at ℓ = 1: {}\n", rational_to_string(q)));
    }
    if let Some(p) = &z {
        out.push_str(&format!("Poincaré: {p}\n"));
    }
    Ok(out)
}

fn positive(m: usize, what: &str) -> Result<(), Failure> {
    if m == 0 {
        return Err(CoreError::InvalidInput(format!("{what} must be at least 1")).into());
    }
    Ok(())
}

fn eff_table(max: usize, flags: Flags) -> Result<String, Failure> {
    positive(max, "--max")?;
    if max > EFF_TABLE_LIMIT.min(RECURSION_LIMIT) {
        return Err(CoreError::TooLarge {
            what: "eff-table --max",
            limit: EFF_TABLE_LIMIT.min(RECURSION_LIMIT),
            got: max,
        }
        .into());
    }
    let table = ECoeffTable::build(max)?;
    let mut rows = Vec::new();
    for m in 1..=max {
        rows.push((m, table.e(m)?.to_string(), rational_to_string(table.f(m)?)));
    }
    if flags.json {
        let arr: Vec<Value> = rows
            .iter()
            .map(|(m, e, f)| json!({ "m": m, "E": e, "F": f }))
            .collect();
        return Ok(format!("{}\n", Value::Array(arr)));
    }
    Ok(render_table(&rows, flags.width))
}

/// Three aligned columns; an `E` cell longer than the room left by the
/// width is continued on indented lines.
fn render_table(rows: &[(usize, String, String)], width: usize) -> String {
    let mw = rows
        .iter()
        .map(|r| r.0.to_string().len())
        .max()
        .unwrap_or(1)
        .max(1);
    let fw = rows
        .iter()
        .map(|r| r.2.chars().count())
        .max()
        .unwrap_or(1)
        .max(4);
    let ew_full = rows
        .iter()
        .map(|r| r.1.chars().count())
        .max()
        .unwrap_or(1)
        .max(4);
    let room = width.saturating_sub(mw + fw + 4).max(16);
    let ew = ew_full.min(room);
    let mut out = format!("{:>mw$}  {:<fw$}  {}\n", "m", "F(m)", "E(m)");
    for (m, e, f) in rows {
        let chunks = wrap(e, ew);
        out.push_str(&format!("{:>mw$}  {:<fw$}  {}\n", m, f, chunks[0]));
        for c in &chunks[1..] {
            out.push_str(&format!("{:>mw$}  {:<fw$}    {}\n", "", "", c));
        }
    }
    out
}

/// Break at spaces so that each line has at most `w` characters when possible.
fn wrap(s: &str, w: usize) -> Vec<String> {
    let mut lines = Vec::new();
    let mut cur = String::new();
    for word in s.split(' ') {
        if !cur.is_empty() && cur.chars().count() + 1 + word.chars().count() > w {
            lines.push(std::mem::take(&mut cur));
        }
        if !cur.is_empty() {
            cur.push(' ');
        }
        cur.push_str(word);
    }
    lines.push(cur);
    lines
}

fn abelianize(m: usize, flags: Flags) -> Result<String, Failure> {
    positive(m, "m")?;
    let x = abelianize_bgl(m)?;
    if flags.json {
        return Ok(format!(
            "{}\n",
            serde_json::to_string(&x).expect("serializable")
        ));
    }
    Ok(format!("{x}\n"))
}

fn euler(m: usize, flags: Flags) -> Result<String, Failure> {
    positive(m, "m")?;
    let x = gen_euler(&abelianize_bgl(m)?)?;
    if flags.json {
        return Ok(format!(
            "{}\n",
            serde_json::to_string(&x).expect("serializable")
        ));
    }
    Ok(format!("{x}\n"))
}

fn check(suite: &str, max: usize, flags: Flags) -> Outcome {
    let report = match suites::run_suite(suite, max) {
        Ok(r) => r,
        Err(e) => return Failure::Core(e).render(flags),
    };
    let code = if report.passed {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    };
    let stdout = if flags.json {
        format!(
            "{}\n",
            serde_json::to_string(&report).expect("serializable")
        )
    } else {
        let mut s = format!(
            "{}: {} ({} instances, {} failures, max {})\n",
            report.suite,
            if report.passed { "PASS" } else { "FAIL" },
            report.instances,
            report.failures.len(),
            report.max
        );
        for f in &report.failures {
            s.push_str(&format!("  {f}\n"));
        }
        s
    };
    Outcome {
        code,
        stdout,
        stderr: String::new(),
    }
}
