//! Batch front-end: TOML run configs in, JSON reports out.
//!
//! A config names the gate (or gives a 4x4 matrix), the game (preset or
//! target sets), an optional play, grid and tolerances. [`validate`] turns
//! the text into a [`RunConfig`] or a list of field-addressed
//! [`Diagnostic`]s; [`run`] dispatches to the library and builds a
//! [`Report`]. Complex numbers are `[re, im]` pairs, matrices row-major.
//!
//! ```toml
//! command = "verify"
//! epsilon = 1e-9
//!
//! [unitary]
//! gate = "cnot"
//!
//! [game]
//! preset = "prisoners_dilemma"
//!
//! [play]
//! a = [[0.0, 0.0], [1.0, 0.0]]
//! b = [[1.0, 0.0], [0.0, 0.0]]
//! ```

use std::fmt;
use std::path::PathBuf;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value as Json;
use thiserror::Error;
use toml::{Table, Value};

use crate::classical_game::{ClassicalGame, Outcome, PreferenceOrder};
use crate::equilibrium_search::{
    minimax_search_with, search_nash_with, GridSpec, MinimaxReport, SearchReport,
};
use crate::inequality_analysis::{
    classify_cases, triangle_bounds, CaseReport, Convention, TriangleReport,
};
use crate::qlinalg::{gate, random_unitary, GateName, QubitState, Unitary4, NORM_TOL};
use crate::quantum_game::{
    outcome, theta, verify_nash, NashCertificate, Play, QuantumGameSpec, TargetSet,
    ANALYTIC_EPSILON, GRID_EPSILON, PRISONERS_DILEMMA,
};
use crate::Player;

/// Bumped on breaking changes to the report layout.
pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Outcome norm tolerance for the post-run invariant check. Looser than
/// [`NORM_TOL`] because custom matrices are only unitary to
/// [`UNITARY_TOL`](crate::qlinalg::UNITARY_TOL).
const OUTCOME_NORM_TOL: f64 = 1e-9;
/// Cauchy-Schwarz slack for margins.
const MARGIN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Classical,
    Outcome,
    Verify,
    Search,
    Cases,
    Minimax,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Classical,
        Command::Outcome,
        Command::Verify,
        Command::Search,
        Command::Cases,
        Command::Minimax,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Classical => "classical",
            Command::Outcome => "outcome",
            Command::Verify => "verify",
            Command::Search => "search",
            Command::Cases => "cases",
            Command::Minimax => "minimax",
        }
    }
}

impl std::str::FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command `{s}`"))
    }
}

/// A config problem, addressed by dotted field path and, when it can be
/// located, 1-based line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub field: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        write!(f, "`{}`: {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
#[allow(clippy::large_enum_variant)]
pub enum UnitarySource {
    Named {
        gate: GateName,
    },
    Custom {
        gate: GateName,
        matrix: [[[f64; 2]; 4]; 4],
    },
    /// Seeded random unitary; the seed lives in [`RunConfig::seed`].
    Random {
        gate: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum GameSource {
    Preset {
        preset: String,
    },
    Targets {
        targets1: TargetSet,
        targets2: TargetSet,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalConfig {
    pub strategies1: [String; 2],
    pub strategies2: [String; 2],
    pub table: [[String; 2]; 2],
    pub prefs1: Vec<String>,
    pub prefs2: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper1: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper2: Option<Vec<String>>,
}

impl ClassicalConfig {
    /// Prisoner's Dilemma with the upper sets `{o3, o4}` and `{o2, o4}`.
    pub fn prisoners_dilemma() -> Self {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        Self {
            strategies1: ["C".into(), "D".into()],
            strategies2: ["C".into(), "D".into()],
            table: [["o1".into(), "o2".into()], ["o3".into(), "o4".into()]],
            prefs1: s(&["o3", "o1", "o4", "o2"]),
            prefs2: s(&["o2", "o1", "o4", "o3"]),
            upper1: Some(s(&["o3", "o4"])),
            upper2: Some(s(&["o2", "o4"])),
        }
    }

    fn build(&self) -> Result<ClassicalGame, crate::classical_game::GameError> {
        let o = |v: &[String]| {
            v.iter()
                .map(|x| Outcome::new(x.clone()))
                .collect::<Vec<_>>()
        };
        ClassicalGame::new(
            [self.strategies1.clone(), self.strategies2.clone()],
            self.table.clone().map(|row| row.map(Outcome::new)),
            [
                PreferenceOrder::new(o(&self.prefs1)),
                PreferenceOrder::new(o(&self.prefs2)),
            ],
        )
    }
}

/// Fully validated run configuration with defaults filled in. Serializes
/// back into the config file layout, so an echoed config can be re-run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub epsilon: f64,
    pub convention: Convention,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<usize>,
    pub maximin: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub unitary: UnitarySource,
    pub game: GameSource,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub play: Option<Play>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alt_play: Option<Play>,
    pub grid: GridSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classical: Option<ClassicalConfig>,
}

impl RunConfig {
    /// The config as TOML text, re-runnable through [`validate`].
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes to TOML")
    }

    pub fn resolve_unitary(&self) -> Result<Unitary4, RunError> {
        match &self.unitary {
            UnitarySource::Named { gate: g } => {
                gate(*g, None).map_err(|e| RunError::invalid("unitary.gate", e.to_string()))
            }
            UnitarySource::Custom { matrix, .. } => {
                Unitary4::new(matrix.map(|row| row.map(|[re, im]| Complex64::new(re, im))))
                    .map_err(|e| RunError::invalid("unitary.matrix", e.to_string()))
            }
            UnitarySource::Random { .. } => match self.seed {
                Some(seed) => Ok(random_unitary(seed)),
                None => Err(RunError::invalid("seed", "random gate requires a seed")),
            },
        }
    }

    pub fn game_spec(&self) -> Result<QuantumGameSpec, RunError> {
        let u = self.resolve_unitary()?;
        Ok(match &self.game {
            GameSource::Preset { .. } => QuantumGameSpec::prisoners_dilemma(u),
            GameSource::Targets { targets1, targets2 } => {
                QuantumGameSpec::new(u, targets1.clone(), targets2.clone())
            }
        })
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid input:\n{}", .0.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Diagnostic>),
    #[error("numerical invariant violated: {0}")]
    Numerical(String),
}

impl RunError {
    fn invalid(field: &str, message: impl Into<String>) -> Self {
        RunError::Invalid(vec![Diagnostic {
            field: field.to_string(),
            line: None,
            message: message.into(),
        }])
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Invalid(_) => EXIT_INVALID,
            RunError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

// ---------------------------------------------------------------------------
// validation

struct Validator<'a> {
    text: &'a str,
    diags: Vec<Diagnostic>,
}

impl<'a> Validator<'a> {
    /// Best-effort line lookup for `section.key` by scanning table headers.
    fn locate(&self, field: &str) -> Option<usize> {
        let (section, key) = match field.split_once('.') {
            Some((s, k)) => (s, k.split('.').next().unwrap_or(k)),
            None => ("", field),
        };
        let mut current = String::new();
        for (n, line) in self.text.lines().enumerate() {
            let t = line.trim();
            if t.starts_with('[') {
                current = t.trim_matches(|c| c == '[' || c == ']').trim().to_string();
                if key.is_empty() && current == section {
                    return Some(n + 1);
                }
                continue;
            }
            if current == section {
                if let Some((k, _)) = t.split_once('=') {
                    if k.trim() == key {
                        return Some(n + 1);
                    }
                }
            }
        }
        if !section.is_empty() {
            return self
                .text
                .lines()
                .position(|l| l.trim().trim_matches(|c| c == '[' || c == ']').trim() == section)
                .map(|n| n + 1);
        }
        None
    }

    fn push(&mut self, field: &str, message: impl Into<String>) {
        let line = self.locate(field);
        self.diags.push(Diagnostic {
            field: field.to_string(),
            line,
            message: message.into(),
        });
    }
}

fn number(v: &Value) -> Option<f64> {
    match v {
        Value::Float(f) => Some(*f),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn complex(v: &Value) -> Result<Complex64, String> {
    match v.as_array().map(|a| a.as_slice()) {
        Some([re, im]) => match (number(re), number(im)) {
            (Some(re), Some(im)) if re.is_finite() && im.is_finite() => Ok(Complex64::new(re, im)),
            _ => Err("complex entries must be finite numbers [re, im]".into()),
        },
        _ => Err("complex numbers must be two-element arrays [re, im]".into()),
    }
}

fn qubit(v: &Value) -> Result<QubitState, String> {
    let arr = v
        .as_array()
        .ok_or("strategy must be an array of two [re, im] pairs")?;
    if arr.len() != 2 {
        return Err(format!(
            "strategy must have 2 amplitudes, got {}",
            arr.len()
        ));
    }
    let x = complex(&arr[0])?;
    let y = complex(&arr[1])?;
    let norm_sq = x.norm_sqr() + y.norm_sqr();
    if (norm_sq - 1.0).abs() > NORM_TOL {
        return Err(format!(
            "strategy not normalized (|x|^2 + |y|^2 = {norm_sq})"
        ));
    }
    QubitState::new(x, y).map_err(|e| e.to_string())
}

fn matrix(v: &Value) -> Result<[[[f64; 2]; 4]; 4], String> {
    let rows = v
        .as_array()
        .filter(|r| r.len() == 4)
        .ok_or("matrix must have 4 rows")?;
    let mut m = [[[0.0; 2]; 4]; 4];
    for (i, row) in rows.iter().enumerate() {
        let cols = row
            .as_array()
            .filter(|c| c.len() == 4)
            .ok_or(format!("matrix row {} must have 4 entries", i + 1))?;
        for (j, e) in cols.iter().enumerate() {
            let z = complex(e).map_err(|msg| format!("entry ({}, {}): {msg}", i + 1, j + 1))?;
            m[i][j] = [z.re, z.im];
        }
    }
    Ok(m)
}

fn strings(v: &Value) -> Option<Vec<String>> {
    v.as_array()?
        .iter()
        .map(|x| x.as_str().map(str::to_string))
        .collect()
}

fn pair_of_strings(v: &Value) -> Option<[String; 2]> {
    strings(v)?.try_into().ok()
}

fn check_keys(val: &mut Validator, table: &Table, section: &str, allowed: &[&str]) {
    for k in table.keys() {
        if !allowed.contains(&k.as_str()) {
            let field = if section.is_empty() {
                k.clone()
            } else {
                format!("{section}.{k}")
            };
            val.push(&field, "unknown field");
        }
    }
}

fn sub_table<'t>(val: &mut Validator, root: &'t Table, name: &str) -> Option<&'t Table> {
    match root.get(name) {
        None => None,
        Some(Value::Table(t)) => Some(t),
        Some(_) => {
            val.push(name, "must be a table");
            None
        }
    }
}

/// Parses and fully validates a config. `command` overrides (or supplies) the
/// `command` field, as the CLI subcommand does.
pub fn validate_with(
    config_text: &[u8],
    command: Option<Command>,
) -> Result<RunConfig, Vec<Diagnostic>> {
    let text = match std::str::from_utf8(config_text) {
        Ok(t) => t,
        Err(e) => {
            return Err(vec![Diagnostic {
                field: "<file>".into(),
                line: None,
                message: format!("not UTF-8: {e}"),
            }])
        }
    };
    let root: Table = match text.parse() {
        Ok(t) => t,
        Err(e) => {
            let e: toml::de::Error = e;
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
            return Err(vec![Diagnostic {
                field: "<syntax>".into(),
                line,
                message: e.message().to_string(),
            }]);
        }
    };
    let mut val = Validator {
        text,
        diags: Vec::new(),
    };
    check_keys(
        &mut val,
        &root,
        "",
        &[
            "command",
            "epsilon",
            "convention",
            "seed",
            "target",
            "maximin",
            "output",
            "unitary",
            "game",
            "play",
            "alt_play",
            "grid",
            "classical",
        ],
    );

    let command = match (command, root.get("command")) {
        (Some(c), None) => Some(c),
        (Some(c), Some(v)) => {
            if v.as_str() != Some(c.name()) {
                val.push(
                    "command",
                    format!(
                        "config says {v} but the `{}` subcommand was given",
                        c.name()
                    ),
                );
            }
            Some(c)
        }
        (None, Some(v)) => match v.as_str().map(str::parse::<Command>) {
            Some(Ok(c)) => Some(c),
            Some(Err(e)) => {
                val.push("command", e);
                None
            }
            None => {
                val.push("command", "must be a string");
                None
            }
        },
        (None, None) => {
            val.push("command", "missing command");
            None
        }
    };

    let epsilon = match root.get("epsilon") {
        None => None,
        Some(v) => match number(v) {
            Some(e) if e >= 0.0 && e.is_finite() => Some(e),
            _ => {
                val.push("epsilon", "must be a finite number >= 0");
                None
            }
        },
    };

    let convention = match root.get("convention") {
        None => Convention::Corrected,
        Some(v) => match v.as_str().map(str::parse::<Convention>) {
            Some(Ok(c)) => c,
            Some(Err(e)) => {
                val.push("convention", e);
                Convention::Corrected
            }
            None => {
                val.push("convention", "must be a string");
                Convention::Corrected
            }
        },
    };

    let seed = match root.get("seed") {
        None => None,
        Some(Value::Integer(i)) if *i >= 0 => Some(*i as u64),
        Some(_) => {
            val.push("seed", "must be a nonnegative integer");
            None
        }
    };

    let target = match root.get("target") {
        None => None,
        Some(Value::Integer(i)) if (1..=4).contains(i) => Some(*i as usize),
        Some(_) => {
            val.push("target", "must be a basis index 1..=4");
            None
        }
    };

    let maximin = match root.get("maximin") {
        None => false,
        Some(Value::Boolean(b)) => *b,
        Some(_) => {
            val.push("maximin", "must be a boolean");
            false
        }
    };

    let output = match root.get("output") {
        None => None,
        Some(Value::String(s)) if !s.is_empty() => Some(PathBuf::from(s)),
        Some(_) => {
            val.push("output", "must be a nonempty path string");
            None
        }
    };

    // [unitary]
    let mut unitary = UnitarySource::Named {
        gate: GateName::Identity,
    };
    if matches!(command, Some(c) if c != Command::Classical) && !root.contains_key("unitary") {
        val.push("unitary", "missing [unitary] table");
    }
    if let Some(t) = sub_table(&mut val, &root, "unitary") {
        check_keys(&mut val, t, "unitary", &["gate", "matrix"]);
        let name = t.get("gate").and_then(Value::as_str);
        match name {
            None => val.push("unitary.gate", "missing gate name"),
            Some(n) if n.eq_ignore_ascii_case("random") => {
                unitary = UnitarySource::Random {
                    gate: "random".into(),
                };
            }
            Some(n) => match n.parse::<GateName>() {
                Ok(GateName::Custom) => match t.get("matrix").map(matrix) {
                    None => val.push("unitary.matrix", "custom gate requires a 4x4 matrix"),
                    Some(Err(e)) => val.push("unitary.matrix", e),
                    Some(Ok(m)) => {
                        let cm = m.map(|row| row.map(|[re, im]| Complex64::new(re, im)));
                        match Unitary4::new(cm) {
                            Ok(_) => {
                                unitary = UnitarySource::Custom {
                                    gate: GateName::Custom,
                                    matrix: m,
                                }
                            }
                            Err(e) => val.push("unitary.matrix", e.to_string()),
                        }
                    }
                },
                Ok(g) => {
                    if t.contains_key("matrix") {
                        val.push(
                            "unitary.matrix",
                            "matrix is only allowed with gate = \"custom\"",
                        );
                    }
                    unitary = UnitarySource::Named { gate: g };
                }
                Err(e) => val.push("unitary.gate", e.to_string()),
            },
        }
    }

    // [game]
    let mut game = GameSource::Preset {
        preset: PRISONERS_DILEMMA.into(),
    };
    if let Some(t) = sub_table(&mut val, &root, "game") {
        check_keys(&mut val, t, "game", &["preset", "targets1", "targets2"]);
        match (t.get("preset"), t.get("targets1"), t.get("targets2")) {
            (Some(p), None, None) => match p.as_str() {
                Some(PRISONERS_DILEMMA) => {}
                _ => val.push(
                    "game.preset",
                    format!("unknown preset (available: {PRISONERS_DILEMMA})"),
                ),
            },
            (None, Some(t1), Some(t2)) => {
                let parse = |v: &Value| -> Result<TargetSet, String> {
                    let list: Option<Vec<usize>> = v
                        .as_array()
                        .map(|a| {
                            a.iter()
                                .map(|x| x.as_integer().and_then(|i| usize::try_from(i).ok()))
                                .collect()
                        })
                        .and_then(|o: Option<Vec<usize>>| o);
                    let list = list.ok_or("target set must be an array of basis indices")?;
                    TargetSet::new(list).map_err(|e| e.to_string())
                };
                match (parse(t1), parse(t2)) {
                    (Ok(a), Ok(b)) => {
                        game = GameSource::Targets {
                            targets1: a,
                            targets2: b,
                        }
                    }
                    (r1, r2) => {
                        if let Err(e) = r1 {
                            val.push("game.targets1", e);
                        }
                        if let Err(e) = r2 {
                            val.push("game.targets2", e);
                        }
                    }
                }
            }
            _ => val.push(
                "game",
                "give either `preset` or both `targets1` and `targets2`",
            ),
        }
    }

    // [play], [alt_play]
    let read_play = |val: &mut Validator, name: &str| -> Option<Play> {
        let t = sub_table(val, &root, name)?;
        check_keys(val, t, name, &["a", "b"]);
        let mut side = |key: &str| -> Option<QubitState> {
            let field = format!("{name}.{key}");
            match t.get(key).map(qubit) {
                None => {
                    val.push(&field, "missing strategy");
                    None
                }
                Some(Err(e)) => {
                    val.push(&field, e);
                    None
                }
                Some(Ok(s)) => Some(s),
            }
        };
        let a = side("a");
        let b = side("b");
        Some(Play::new(a?, b?))
    };
    let play = read_play(&mut val, "play");
    let alt_play = read_play(&mut val, "alt_play");

    // [grid]
    let mut grid = GridSpec::default();
    if let Some(t) = sub_table(&mut val, &root, "grid") {
        check_keys(
            &mut val,
            t,
            "grid",
            &["n_alpha", "n_phi", "refine_depth", "top_k"],
        );
        let mut int = |key: &str, min: i64, slot: &mut usize| {
            if let Some(v) = t.get(key) {
                match v.as_integer() {
                    Some(i) if i >= min => *slot = i as usize,
                    _ => val.push(
                        &format!("grid.{key}"),
                        format!("must be an integer >= {min}"),
                    ),
                }
            }
        };
        let mut depth = grid.refine_depth as usize;
        int("n_alpha", 2, &mut grid.n_alpha);
        int("n_phi", 1, &mut grid.n_phi);
        int("refine_depth", 0, &mut depth);
        int("top_k", 1, &mut grid.top_k);
        grid.refine_depth = depth.min(u32::MAX as usize) as u32;
    }

    // [classical]
    let mut classical = None;
    if let Some(t) = sub_table(&mut val, &root, "classical") {
        check_keys(
            &mut val,
            t,
            "classical",
            &[
                "strategies1",
                "strategies2",
                "table",
                "prefs1",
                "prefs2",
                "upper1",
                "upper2",
            ],
        );
        let s1 = t.get("strategies1").and_then(pair_of_strings);
        let s2 = t.get("strategies2").and_then(pair_of_strings);
        let table = t.get("table").and_then(|v| {
            let rows = v.as_array()?;
            let rows: Vec<[String; 2]> = rows.iter().map(pair_of_strings).collect::<Option<_>>()?;
            <[[String; 2]; 2]>::try_from(rows).ok()
        });
        let p1 = t.get("prefs1").and_then(strings);
        let p2 = t.get("prefs2").and_then(strings);
        let opt_list = |val: &mut Validator, key: &str| match t.get(key) {
            None => None,
            Some(v) => {
                let s = strings(v);
                if s.is_none() {
                    val.push(
                        &format!("classical.{key}"),
                        "must be a list of outcome labels",
                    );
                }
                s
            }
        };
        let upper1 = opt_list(&mut val, "upper1");
        let upper2 = opt_list(&mut val, "upper2");
        for (key, ok) in [
            ("strategies1", s1.is_some()),
            ("strategies2", s2.is_some()),
            ("table", table.is_some()),
            ("prefs1", p1.is_some()),
            ("prefs2", p2.is_some()),
        ] {
            if !ok {
                let msg = match key {
                    "table" => "must be a 2x2 array of outcome labels",
                    "prefs1" | "prefs2" => "must be a list of outcome labels, most preferred first",
                    _ => "must be a pair of strategy labels",
                };
                val.push(&format!("classical.{key}"), msg);
            }
        }
        if let (Some(s1), Some(s2), Some(table), Some(p1), Some(p2)) = (s1, s2, table, p1, p2) {
            let cfg = ClassicalConfig {
                strategies1: s1,
                strategies2: s2,
                table,
                prefs1: p1,
                prefs2: p2,
                upper1,
                upper2,
            };
            match cfg.build() {
                Ok(g) => {
                    for (p, upper) in [(Player::One, &cfg.upper1), (Player::Two, &cfg.upper2)] {
                        if let Some(up) = upper {
                            let (upper, lower) = split_outcomes(&g, up);
                            if let Err(e) = g.strict_pairwise_dominance(p, &upper, &lower) {
                                val.push(
                                    &format!("classical.upper{}", p.index() + 1),
                                    e.to_string(),
                                );
                            }
                        }
                    }
                    classical = Some(cfg);
                }
                Err(e) => val.push("classical", e.to_string()),
            }
        }
    }

    // command-specific requirements
    match command {
        Some(Command::Outcome | Command::Verify)
            if play.is_none() && !root.contains_key("play") =>
        {
            val.push("play", "this command requires a [play] table")
        }
        Some(Command::Cases) => {
            if play.is_none() && !root.contains_key("play") {
                val.push("play", "cases requires the starred play in [play]");
            }
            if alt_play.is_none() && !root.contains_key("alt_play") {
                val.push(
                    "alt_play",
                    "cases requires the comparison play in [alt_play]",
                );
            }
            if let GameSource::Targets { .. } = game {
                val.push(
                    "game",
                    "cases evaluates the prisoner's dilemma inequalities; use the preset",
                );
            }
        }
        _ => {}
    }

    if !val.diags.is_empty() {
        return Err(val.diags);
    }
    let command = command.expect("command validated");
    let epsilon = epsilon.unwrap_or(if command == Command::Search {
        GRID_EPSILON
    } else {
        ANALYTIC_EPSILON
    });
    if command == Command::Classical && classical.is_none() {
        classical = Some(ClassicalConfig::prisoners_dilemma());
    }
    Ok(RunConfig {
        command,
        epsilon,
        convention,
        seed,
        target,
        maximin,
        output,
        unitary,
        game,
        play,
        alt_play,
        grid,
        classical,
    })
}

/// [`validate_with`] reading the command from the config itself.
pub fn validate(config_text: &[u8]) -> Result<RunConfig, Vec<Diagnostic>> {
    validate_with(config_text, None)
}

fn split_outcomes(g: &ClassicalGame, upper: &[String]) -> (Vec<Outcome>, Vec<Outcome>) {
    let upper: Vec<Outcome> = upper.iter().map(|s| Outcome::new(s.clone())).collect();
    let mut lower: Vec<Outcome> = g
        .outcomes()
        .filter(|o| !upper.contains(o))
        .cloned()
        .collect();
    lower.sort();
    (upper, lower)
}

// ---------------------------------------------------------------------------
// reports

#[derive(Debug, Clone, Serialize)]
pub struct DominanceEntry {
    pub player: Player,
    pub strategy: String,
    pub strongly_dominant: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct StructureEntry {
    pub player: Player,
    pub upper: Vec<Outcome>,
    pub lower: Vec<Outcome>,
    pub strict_pairwise: bool,
    pub dominance_induced: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct NashPlay {
    pub play: [String; 2],
    pub outcome: Outcome,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassicalReport {
    pub dominance: Vec<DominanceEntry>,
    pub structure: Vec<StructureEntry>,
    pub pure_nash: Vec<NashPlay>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OutcomeReport {
    pub play: Play,
    pub outcome: crate::qlinalg::TwoQubitState,
    pub moduli: [f64; 4],
    pub theta: [f64; 4],
}

#[derive(Debug, Clone, Serialize)]
pub struct CasesPayload {
    #[serde(flatten)]
    pub cases: CaseReport,
    pub triangle: [TriangleReport; 2],
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimaxPayload {
    pub reports: Vec<MinimaxReport>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
#[allow(clippy::large_enum_variant)]
pub enum Payload {
    Classical(ClassicalReport),
    Outcome(OutcomeReport),
    Verify(NashCertificate),
    Search(SearchReport),
    Cases(CasesPayload),
    Minimax(MinimaxPayload),
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub command: Command,
    pub config: RunConfig,
    pub result: Payload,
}

impl Report {
    pub fn to_json_value(&self) -> Json {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// JSON with every `wall_time_ms` zeroed; byte-identical across runs of
    /// the same config.
    pub fn to_canonical_json(&self) -> String {
        let mut v = self.to_json_value();
        strip_timing(&mut v);
        serde_json::to_string_pretty(&v).expect("report serializes") + "\n"
    }

    /// The payload alone, canonicalized.
    pub fn canonical_result(&self) -> String {
        let mut v = serde_json::to_value(&self.result).expect("payload serializes");
        strip_timing(&mut v);
        serde_json::to_string(&v).expect("payload serializes")
    }
}

/// Zeroes every `wall_time_ms` field in place.
pub fn strip_timing(v: &mut Json) {
    match v {
        Json::Object(map) => {
            for (k, x) in map.iter_mut() {
                if k == "wall_time_ms" {
                    *x = Json::from(0.0);
                } else {
                    strip_timing(x);
                }
            }
        }
        Json::Array(xs) => xs.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

fn check_certificate(cert: &NashCertificate) -> Result<(), RunError> {
    let norm = cert.outcome.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > OUTCOME_NORM_TOL {
        return Err(RunError::Numerical(format!(
            "outcome norm {norm} differs from 1"
        )));
    }
    for m in &cert.margins {
        if !m.margin.is_finite() || m.margin > MARGIN_TOL {
            return Err(RunError::Numerical(format!(
                "margin {} for player {} target {} exceeds the Cauchy-Schwarz bound",
                m.margin, m.player, m.target
            )));
        }
    }
    Ok(())
}

fn run_classical(cfg: &ClassicalConfig) -> Result<ClassicalReport, RunError> {
    let g = cfg
        .build()
        .map_err(|e| RunError::invalid("classical", e.to_string()))?;
    let mut dominance = Vec::new();
    for p in Player::BOTH {
        for s in g.strategies(p) {
            let strongly_dominant = g
                .is_strongly_dominant(p, s)
                .map_err(|e| RunError::Numerical(e.to_string()))?;
            dominance.push(DominanceEntry {
                player: p,
                strategy: s.clone(),
                strongly_dominant,
            });
        }
    }
    let mut structure = Vec::new();
    for (p, upper) in [(Player::One, &cfg.upper1), (Player::Two, &cfg.upper2)] {
        if let Some(up) = upper {
            let (upper, lower) = split_outcomes(&g, up);
            let strict_pairwise = g
                .strict_pairwise_dominance(p, &upper, &lower)
                .map_err(|e| {
                    RunError::invalid(&format!("classical.upper{}", p.index() + 1), e.to_string())
                })?;
            let dominance_induced = g.dominance_induced(p, &upper, &lower).map_err(|e| {
                RunError::invalid(&format!("classical.upper{}", p.index() + 1), e.to_string())
            })?;
            structure.push(StructureEntry {
                player: p,
                upper,
                lower,
                strict_pairwise,
                dominance_induced,
            });
        }
    }
    let pure_nash = g
        .pure_nash()
        .into_iter()
        .map(|(a, b)| {
            let outcome = g.outcome_of(&a, &b).expect("labels from the game").clone();
            NashPlay {
                play: [a, b],
                outcome,
            }
        })
        .collect();
    Ok(ClassicalReport {
        dominance,
        structure,
        pure_nash,
    })
}

/// Executes a validated config.
pub fn run(config: &RunConfig) -> Result<Report, RunError> {
    let need_play =
        |p: &Option<Play>, field: &str| p.ok_or_else(|| RunError::invalid(field, "missing"));
    let result = match config.command {
        Command::Classical => {
            let cfg = config
                .classical
                .clone()
                .unwrap_or_else(ClassicalConfig::prisoners_dilemma);
            Payload::Classical(run_classical(&cfg)?)
        }
        Command::Outcome => {
            let spec = config.game_spec()?;
            let play = need_play(&config.play, "play")?;
            let n = outcome(&spec, &play);
            if (n.norm() - 1.0).abs() > OUTCOME_NORM_TOL {
                return Err(RunError::Numerical(format!(
                    "outcome norm {} differs from 1",
                    n.norm()
                )));
            }
            let moduli = [1, 2, 3, 4].map(|i| n.amp(i).norm());
            let theta = [1, 2, 3, 4].map(|i| theta(&n, i).expect("basis index in range").value());
            Payload::Outcome(OutcomeReport {
                play,
                outcome: n,
                moduli,
                theta,
            })
        }
        Command::Verify => {
            let spec = config.game_spec()?;
            let play = need_play(&config.play, "play")?;
            let cert = verify_nash(&spec, &play, config.epsilon);
            check_certificate(&cert)?;
            Payload::Verify(cert)
        }
        Command::Search => {
            let spec = config.game_spec()?;
            let report = search_nash_with(&spec, &config.grid, config.epsilon)
                .map_err(|e| RunError::invalid("grid", e.to_string()))?;
            for c in &report.candidates {
                check_certificate(&c.certificate)?;
            }
            Payload::Search(report)
        }
        Command::Cases => {
            let u = config.resolve_unitary()?;
            let star = need_play(&config.play, "play")?;
            let alt = need_play(&config.alt_play, "alt_play")?;
            let cases = classify_cases(&u, &star, &alt, config.convention);
            for c in cases.cases.chunks(2) {
                if !(c[0].holds || c[1].holds) {
                    return Err(RunError::Numerical(format!(
                        "{} and {} both fail",
                        c[0].label, c[1].label
                    )));
                }
            }
            let triangle = [
                triangle_bounds(&u, &star, &alt.a, Player::One, config.convention),
                triangle_bounds(&u, &star, &alt.b, Player::Two, config.convention),
            ];
            Payload::Cases(CasesPayload { cases, triangle })
        }
        Command::Minimax => {
            let u = config.resolve_unitary()?;
            let targets: Vec<usize> = config.target.map_or_else(|| vec![1, 2, 3, 4], |t| vec![t]);
            let mut reports = Vec::with_capacity(targets.len());
            for t in targets {
                let r = minimax_search_with(&u, t, &config.grid, config.maximin)
                    .map_err(|e| RunError::invalid("grid", e.to_string()))?;
                if !(0.0..=1.0 + MARGIN_TOL).contains(&r.value)
                    || r.value < r.closed_form_value - MARGIN_TOL
                {
                    return Err(RunError::Numerical(format!(
                        "minimax value {} inconsistent with closed form {}",
                        r.value, r.closed_form_value
                    )));
                }
                reports.push(r);
            }
            Payload::Minimax(MinimaxPayload { reports })
        }
    };
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        tool: "qgame",
        tool_version: TOOL_VERSION,
        command: config.command,
        config: config.clone(),
        result,
    })
}
