//! Scenario configuration files.
//!
//! A config is TOML with the sections `physics`, `sweep`, `noise`, `sampling`,
//! `qfunc` and `output`. Every section and key is optional; missing keys take the
//! defaults of [`ScenarioConfig::defaults`]. Physical quantities are strings with
//! an explicit unit.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use toml_edit::{Document, Item, Table, Value};

use crate::units::{format_quantity, parse_quantity, Kind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioId {
    RamseyClassical,
    FringesVsPhiRf,
    FringesVsPhiMw,
    PhaseVsTau,
    SensitivityVsTau,
    QfuncSnapshots,
    PulseOptimize,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 7] = [
        ScenarioId::RamseyClassical,
        ScenarioId::FringesVsPhiRf,
        ScenarioId::FringesVsPhiMw,
        ScenarioId::PhaseVsTau,
        ScenarioId::SensitivityVsTau,
        ScenarioId::QfuncSnapshots,
        ScenarioId::PulseOptimize,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioId::RamseyClassical => "ramsey-classical",
            ScenarioId::FringesVsPhiRf => "fringes-vs-phirf",
            ScenarioId::FringesVsPhiMw => "fringes-vs-phimw",
            ScenarioId::PhaseVsTau => "phase-vs-tau",
            ScenarioId::SensitivityVsTau => "sensitivity-vs-tau",
            ScenarioId::QfuncSnapshots => "qfunc-snapshots",
            ScenarioId::PulseOptimize => "pulse-optimize",
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        ScenarioId::ALL.into_iter().find(|id| id.as_str() == s).ok_or_else(|| {
            let names: Vec<&str> = ScenarioId::ALL.iter().map(|id| id.as_str()).collect();
            let mut msg = format!("unknown scenario {s:?}");
            if let Some(best) = suggest(s, &names) {
                msg.push_str(&format!("; did you mean {best:?}?"));
            }
            msg.push_str(&format!(" (known: {})", names.join(", ")));
            msg
        })
    }
}

/// A value that may be left to the scenario to determine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AutoOr<T> {
    Auto,
    Value(T),
}

/// Field step between the two settings `F0 +- dF/2`, given as a field or as the frequency it produces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Step {
    /// V/cm.
    Field(f64),
    /// Hz.
    Frequency(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Physics {
    pub two_j: u32,
    /// Rabi frequency `Omega_rf / 2 pi` (Hz).
    pub omega_rf: f64,
    pub pulse_duration: f64,
    /// Pulse durations compared by `phase-vs-tau`.
    pub pulse_durations: Vec<f64>,
    pub tau: f64,
    /// Interrogation times of the `*-vs-tau` scenarios.
    pub taus: Vec<f64>,
    /// Working-point field (V/cm).
    pub f0: f64,
    pub step: Step,
    /// Hz per V/cm.
    pub stark_slope: f64,
    /// `eta / 2 pi` (Hz); `auto` calibrates it on the reference phase.
    pub anharmonicity: AutoOr<f64>,
    pub phi_rf: AutoOr<f64>,
    pub phi_mw: f64,
    pub instantaneous_pulses: bool,
    /// Detuning of the reference ladder (Hz), `pulse-optimize` only.
    pub reference_detuning: f64,
    pub rotations: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub points: usize,
    /// Angle (rad), or time (s) for `pulse-optimize`.
    pub start: AutoOr<f64>,
    pub stop: AutoOr<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Noise {
    /// V/cm.
    pub shot_sigma: f64,
    pub inhomogeneity_sigma: f64,
    pub drift_start: f64,
    /// Field drift per experimental sequence (V/cm).
    pub drift_per_sequence: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sampling {
    /// Shots per grid point and field setting in one pass.
    pub shots: usize,
    pub repetitions: usize,
    pub seed: u64,
    /// Repetition rate of the experiment (Hz), for per-root-Hz figures.
    pub rep_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Qfunc {
    pub n_theta: usize,
    pub n_phi: usize,
    /// Field offset from `F0` applied to the snapshots (V/cm).
    pub field_offset: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub dir: String,
    pub emit_plots: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: ScenarioId,
    pub physics: Physics,
    pub sweep: Sweep,
    pub noise: Noise,
    pub sampling: Sampling,
    pub qfunc: Qfunc,
    pub output: Output,
}

impl ScenarioConfig {
    /// Defaults: the n = 50 experiment with `t2 = 184 ns`, `tau = 56 ns`, `dF = 566 uV/cm`.
    pub fn defaults(scenario: ScenarioId) -> Self {
        let points = match scenario {
            ScenarioId::RamseyClassical | ScenarioId::FringesVsPhiRf => 121,
            ScenarioId::PulseOptimize => 401,
            _ => 24,
        };
        Self {
            scenario,
            physics: Physics {
                two_j: 49,
                omega_rf: 1.6e6,
                pulse_duration: 184e-9,
                pulse_durations: vec![91e-9, 184e-9],
                tau: 56e-9,
                taus: [56.0, 100.0, 150.0, 200.0, 250.0, 300.0, 400.0, 500.0]
                    .map(|t| t * 1e-9)
                    .to_vec(),
                f0: 5.50527,
                step: Step::Field(566e-6),
                stark_slope: 96e6,
                anharmonicity: AutoOr::Value(catspin_core::dynamics::CALIBRATED_ANHARMONICITY / std::f64::consts::TAU),
                phi_rf: AutoOr::Auto,
                phi_mw: 0.0,
                instantaneous_pulses: false,
                reference_detuning: 11e6,
                rotations: vec![1, 2],
            },
            sweep: Sweep {
                points,
                start: AutoOr::Auto,
                stop: AutoOr::Auto,
            },
            noise: Noise {
                shot_sigma: 0.0,
                inhomogeneity_sigma: 0.0,
                drift_start: 0.0,
                drift_per_sequence: 0.0,
            },
            sampling: Sampling {
                shots: 3100,
                repetitions: 1,
                seed: 1,
                rep_rate: 1.0 / 311e-6,
            },
            qfunc: Qfunc {
                n_theta: 200,
                n_phi: 400,
                field_offset: 1.7e-3,
            },
            output: Output {
                dir: "out".into(),
                emit_plots: false,
            },
        }
    }

    /// Field step `dF` in V/cm.
    pub fn field_step(&self) -> f64 {
        match self.physics.step {
            Step::Field(f) => f,
            Step::Frequency(hz) => hz / self.physics.stark_slope,
        }
    }

    /// Canonical TOML text: every key, canonical units, exact under [`validate_config`].
    pub fn to_toml(&self) -> String {
        let p = &self.physics;
        let time = |v: f64| quote(&format_quantity(v, Kind::Time));
        let times = |v: &[f64]| format!("[{}]", v.iter().map(|&t| time(t)).collect::<Vec<_>>().join(", "));
        let freq = |v: f64| quote(&format_quantity(v, Kind::Frequency));
        let field = |v: f64| quote(&format_quantity(v, Kind::Field));
        let angle = |v: f64| quote(&format_quantity(v, Kind::Angle));
        let auto = |v: AutoOr<f64>, f: &dyn Fn(f64) -> String| match v {
            AutoOr::Auto => quote("auto"),
            AutoOr::Value(x) => f(x),
        };
        let sweep_kind = self.sweep_kind();
        let sweep_value = |v: f64| quote(&format_quantity(v, sweep_kind));
        let mut out = String::new();
        out.push_str(&format!("scenario = {}\n\n[physics]\n", quote(self.scenario.as_str())));
        out.push_str(&format!("two_j = {}\n", p.two_j));
        out.push_str(&format!("omega_rf = {}\n", freq(p.omega_rf)));
        out.push_str(&format!("pulse_duration = {}\n", time(p.pulse_duration)));
        out.push_str(&format!("pulse_durations = {}\n", times(&p.pulse_durations)));
        out.push_str(&format!("tau = {}\n", time(p.tau)));
        out.push_str(&format!("taus = {}\n", times(&p.taus)));
        out.push_str(&format!("f0 = {}\n", field(p.f0)));
        match p.step {
            Step::Field(f) => out.push_str(&format!("field_step = {}\n", field(f))),
            Step::Frequency(hz) => out.push_str(&format!("frequency_step = {}\n", freq(hz))),
        }
        out.push_str(&format!(
            "stark_slope = {}\n",
            quote(&format_quantity(p.stark_slope, Kind::StarkSlope))
        ));
        out.push_str(&format!("anharmonicity = {}\n", auto(p.anharmonicity, &freq)));
        out.push_str(&format!("phi_rf = {}\n", auto(p.phi_rf, &angle)));
        out.push_str(&format!("phi_mw = {}\n", angle(p.phi_mw)));
        out.push_str(&format!("instantaneous_pulses = {}\n", p.instantaneous_pulses));
        out.push_str(&format!("reference_detuning = {}\n", freq(p.reference_detuning)));
        let rotations: Vec<String> = p.rotations.iter().map(u32::to_string).collect();
        out.push_str(&format!("rotations = [{}]\n", rotations.join(", ")));
        out.push_str(&format!(
            "\n[sweep]\npoints = {}\nstart = {}\nstop = {}\n",
            self.sweep.points,
            auto(self.sweep.start, &sweep_value),
            auto(self.sweep.stop, &sweep_value)
        ));
        let n = &self.noise;
        out.push_str(&format!(
            "\n[noise]\nshot_sigma = {}\ninhomogeneity_sigma = {}\ndrift_start = {}\ndrift_per_sequence = {}\n",
            field(n.shot_sigma),
            field(n.inhomogeneity_sigma),
            field(n.drift_start),
            field(n.drift_per_sequence)
        ));
        let s = &self.sampling;
        let seed = if s.seed > i64::MAX as u64 {
            quote(&s.seed.to_string())
        } else {
            s.seed.to_string()
        };
        out.push_str(&format!(
            "\n[sampling]\nshots = {}\nrepetitions = {}\nseed = {}\nrep_rate = {}\n",
            s.shots,
            s.repetitions,
            seed,
            freq(s.rep_rate)
        ));
        let q = &self.qfunc;
        out.push_str(&format!(
            "\n[qfunc]\nn_theta = {}\nn_phi = {}\nfield_offset = {}\n",
            q.n_theta,
            q.n_phi,
            field(q.field_offset)
        ));
        out.push_str(&format!(
            "\n[output]\ndir = {}\nemit_plots = {}\n",
            quote(&self.output.dir),
            self.output.emit_plots
        ));
        out
    }

    fn sweep_kind(&self) -> Kind {
        if self.scenario == ScenarioId::PulseOptimize {
            Kind::Time
        } else {
            Kind::Angle
        }
    }
}

fn quote(s: &str) -> String {
    Value::from(s).to_string().trim().to_string()
}

/// One problem found in a config, located by key path and line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub path: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}: {}", self.path, self.message),
            None => write!(f, "{}: {}", self.path, self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub diagnostics: Vec<Diagnostic>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lines: Vec<String> = self.diagnostics.iter().map(ToString::to_string).collect();
        f.write_str(&lines.join("\n"))
    }
}

impl std::error::Error for ConfigError {}

/// Closest known name within a small edit distance.
pub fn suggest<'a>(name: &str, known: &[&'a str]) -> Option<&'a str> {
    known
        .iter()
        .map(|k| (strsim::damerau_levenshtein(name, k), *k))
        .filter(|(d, k)| *d <= 3.max(k.len() / 3))
        .min_by_key(|(d, _)| *d)
        .map(|(_, k)| k)
}

struct Reader<'t> {
    text: &'t str,
    diagnostics: Vec<Diagnostic>,
}

impl<'t> Reader<'t> {
    fn line(&self, span: Option<Range<usize>>) -> Option<usize> {
        span.map(|s| self.text[..s.start.min(self.text.len())].matches('\n').count() + 1)
    }

    fn report(&mut self, path: &str, span: Option<Range<usize>>, message: impl Into<String>) {
        let line = self.line(span);
        self.diagnostics.push(Diagnostic {
            path: path.to_string(),
            line,
            message: message.into(),
        });
    }

    fn unknown_keys(&mut self, table: &Table, prefix: &str, known: &[&str]) {
        for (key, _) in table.iter() {
            if known.contains(&key) {
                continue;
            }
            let span = table.get_key_value(key).and_then(|(k, _)| k.span());
            let mut msg = "unknown key".to_string();
            if let Some(best) = suggest(key, known) {
                msg.push_str(&format!("; did you mean {best:?}?"));
            } else {
                msg.push_str(&format!(" (known keys: {})", known.join(", ")));
            }
            let path = if prefix.is_empty() {
                key.to_string()
            } else {
                format!("{prefix}.{key}")
            };
            self.report(&path, span, msg);
        }
    }
}

/// View of one section during parsing.
struct Section<'a, 't> {
    reader: &'a mut Reader<'t>,
    name: &'static str,
    table: Option<&'a Table>,
}

enum Bound {
    Positive,
    NonNegative,
    Any,
}

impl Section<'_, '_> {
    fn path(&self, key: &str) -> String {
        format!("{}.{key}", self.name)
    }

    fn value(&self, key: &str) -> Option<(&Value, Option<Range<usize>>)> {
        let item = self.table?.get(key)?;
        match item {
            Item::Value(v) => Some((v, v.span())),
            _ => None,
        }
    }

    fn not_a_value(&mut self, key: &str) -> bool {
        if let Some(item) = self.table.and_then(|t| t.get(key)) {
            if !item.is_value() {
                let span = item.span();
                let path = self.path(key);
                self.reader.report(&path, span, "expected a value, found a table");
                return true;
            }
        }
        false
    }

    fn check(&mut self, path: &str, span: Option<Range<usize>>, v: f64, bound: &Bound, unit: &str) -> bool {
        let ok = match bound {
            Bound::Positive => v > 0.0,
            Bound::NonNegative => v >= 0.0,
            Bound::Any => true,
        };
        if !ok {
            let need = if matches!(bound, Bound::Positive) {
                "> 0"
            } else {
                ">= 0"
            };
            self.reader
                .report(path, span, format!("must be {need} (got {v:e} {unit})"));
        }
        ok
    }

    fn parse_one(
        &mut self,
        path: &str,
        v: &Value,
        span: Option<Range<usize>>,
        kind: Kind,
        bound: &Bound,
    ) -> Option<f64> {
        let Some(s) = v.as_str() else {
            self.reader.report(
                path,
                span,
                format!("expected a quoted quantity with unit, e.g. \"1 {}\"", kind.canonical()),
            );
            return None;
        };
        match parse_quantity(s, kind) {
            Ok(x) => self.check(path, span, x, bound, kind.canonical()).then_some(x),
            Err(e) => {
                self.reader.report(path, span, e.0);
                None
            }
        }
    }

    fn quantity(&mut self, key: &str, kind: Kind, default: f64, bound: Bound) -> f64 {
        if self.not_a_value(key) {
            return default;
        }
        let Some((v, span)) = self.value(key).map(|(v, s)| (v.clone(), s)) else {
            return default;
        };
        let path = self.path(key);
        self.parse_one(&path, &v, span, kind, &bound).unwrap_or(default)
    }

    fn optional_quantity(&mut self, key: &str, kind: Kind, bound: Bound) -> Option<f64> {
        self.value(key)?;
        Some(self.quantity(key, kind, f64::NAN, bound))
    }

    fn auto_quantity(&mut self, key: &str, kind: Kind, default: AutoOr<f64>, bound: Bound) -> AutoOr<f64> {
        match self.value(key) {
            Some((v, _)) if v.as_str() == Some("auto") => AutoOr::Auto,
            Some(_) => AutoOr::Value(self.quantity(key, kind, f64::NAN, bound)),
            None => {
                self.not_a_value(key);
                default
            }
        }
    }

    fn quantity_list(&mut self, key: &str, kind: Kind, default: &[f64], bound: Bound) -> Vec<f64> {
        if self.not_a_value(key) {
            return default.to_vec();
        }
        let Some((v, span)) = self.value(key).map(|(v, s)| (v.clone(), s)) else {
            return default.to_vec();
        };
        let path = self.path(key);
        let Some(array) = v.as_array() else {
            self.reader.report(&path, span, "expected an array of quantities");
            return default.to_vec();
        };
        if array.is_empty() {
            self.reader.report(&path, span, "must not be empty");
            return default.to_vec();
        }
        let mut out = Vec::with_capacity(array.len());
        for (i, item) in array.iter().enumerate() {
            let item_path = format!("{path}[{i}]");
            if let Some(x) = self.parse_one(&item_path, item, item.span().or(span.clone()), kind, &bound) {
                out.push(x);
            }
        }
        out
    }

    fn integer(&mut self, key: &str, default: u64, min: u64) -> u64 {
        if self.not_a_value(key) {
            return default;
        }
        let Some((v, span)) = self.value(key).map(|(v, s)| (v.clone(), s)) else {
            return default;
        };
        let path = self.path(key);
        let parsed = match &v {
            Value::Integer(i) => u64::try_from(*i.value()).ok(),
            Value::String(s) => s.value().parse::<u64>().ok(),
            _ => None,
        };
        match parsed {
            Some(x) if x >= min => x,
            Some(x) => {
                self.reader.report(&path, span, format!("must be >= {min} (got {x})"));
                default
            }
            None => {
                self.reader.report(&path, span, "expected a non-negative integer");
                default
            }
        }
    }

    fn integer_list(&mut self, key: &str, default: &[u32], min: u32) -> Vec<u32> {
        let Some((v, span)) = self.value(key).map(|(v, s)| (v.clone(), s)) else {
            self.not_a_value(key);
            return default.to_vec();
        };
        let path = self.path(key);
        let Some(array) = v.as_array().filter(|a| !a.is_empty()) else {
            self.reader
                .report(&path, span, "expected a non-empty array of integers");
            return default.to_vec();
        };
        let mut out = Vec::new();
        for (i, item) in array.iter().enumerate() {
            match item.as_integer().and_then(|x| u32::try_from(x).ok()) {
                Some(x) if x >= min => out.push(x),
                _ => self.reader.report(
                    &format!("{path}[{i}]"),
                    item.span().or(span.clone()),
                    format!("expected an integer >= {min}"),
                ),
            }
        }
        out
    }

    fn boolean(&mut self, key: &str, default: bool) -> bool {
        if self.not_a_value(key) {
            return default;
        }
        let Some((v, span)) = self.value(key).map(|(v, s)| (v.clone(), s)) else {
            return default;
        };
        v.as_bool().unwrap_or_else(|| {
            let path = self.path(key);
            self.reader.report(&path, span, "expected true or false");
            default
        })
    }

    fn string(&mut self, key: &str, default: &str) -> String {
        if self.not_a_value(key) {
            return default.into();
        }
        let Some((v, span)) = self.value(key).map(|(v, s)| (v.clone(), s)) else {
            return default.into();
        };
        match v.as_str() {
            Some(s) if !s.is_empty() => s.to_string(),
            _ => {
                let path = self.path(key);
                self.reader.report(&path, span, "expected a non-empty string");
                default.into()
            }
        }
    }

    fn finish(&mut self, known: &[&str]) {
        if let Some(t) = self.table {
            self.reader.unknown_keys(t, self.name, known);
        }
    }
}

const SECTIONS: [&str; 6] = ["physics", "sweep", "noise", "sampling", "qfunc", "output"];
const PHYSICS_KEYS: [&str; 17] = [
    "two_j",
    "omega_rf",
    "pulse_duration",
    "pulse_durations",
    "tau",
    "taus",
    "f0",
    "field_step",
    "frequency_step",
    "stark_slope",
    "anharmonicity",
    "phi_rf",
    "phi_mw",
    "instantaneous_pulses",
    "reference_detuning",
    "rotations",
    "j",
];

/// Parses and checks a config for `scenario`. All problems are reported together.
pub fn validate_config(text: &str, scenario: ScenarioId) -> Result<ScenarioConfig, ConfigError> {
    let doc = Document::parse(text).map_err(|e| {
        let line = e
            .span()
            .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
        ConfigError {
            diagnostics: vec![Diagnostic {
                path: "<syntax>".into(),
                line,
                message: e.message().to_string(),
            }],
        }
    })?;
    let root = doc.as_table();
    let mut reader = Reader {
        text,
        diagnostics: Vec::new(),
    };
    let mut root_known: Vec<&str> = SECTIONS.to_vec();
    root_known.push("scenario");
    reader.unknown_keys(root, "", &root_known);
    if let Some((key, item)) = root.get_key_value("scenario") {
        match item.as_str().map(ScenarioId::from_str) {
            Some(Ok(id)) if id == scenario => {}
            Some(Ok(id)) => reader.report(
                "scenario",
                key.span(),
                format!("config is for {id:?} but {:?} was requested", scenario.as_str()),
            ),
            Some(Err(e)) => reader.report("scenario", key.span(), e),
            None => reader.report("scenario", key.span(), "expected a string"),
        }
    }
    let mut tables: Vec<Option<&Table>> = Vec::new();
    for name in SECTIONS {
        let t = match root.get(name) {
            None => None,
            Some(Item::Table(t)) => Some(t),
            Some(other) => {
                reader.report(name, other.span(), "expected a [section] table");
                None
            }
        };
        tables.push(t);
    }
    let d = ScenarioConfig::defaults(scenario);
    let sweep_kind = d.sweep_kind();

    let physics = {
        let mut s = Section {
            reader: &mut reader,
            name: "physics",
            table: tables[0],
        };
        if s.value("j").is_some() {
            let span = s.value("j").and_then(|v| v.1);
            s.reader.report(
                "physics.j",
                span,
                "give the spin as two_j (integer 2J), e.g. two_j = 49",
            );
        }
        let dp = &d.physics;
        let two_j = s.integer("two_j", u64::from(dp.two_j), 1);
        let two_j = if two_j > 400 {
            let span = s.value("two_j").and_then(|v| v.1);
            s.reader
                .report("physics.two_j", span, format!("must be <= 400 (got {two_j})"));
            dp.two_j
        } else {
            two_j as u32
        };
        let field_step = s.optional_quantity("field_step", Kind::Field, Bound::Positive);
        let frequency_step = s.optional_quantity("frequency_step", Kind::Frequency, Bound::Positive);
        let step = match (field_step, frequency_step) {
            (Some(_), Some(_)) => {
                let span = s.value("frequency_step").and_then(|v| v.1);
                s.reader.report(
                    "physics.frequency_step",
                    span,
                    "give either field_step or frequency_step, not both",
                );
                dp.step
            }
            (Some(f), None) => Step::Field(f),
            (None, Some(hz)) => Step::Frequency(hz),
            (None, None) => dp.step,
        };
        let p = Physics {
            two_j,
            omega_rf: s.quantity("omega_rf", Kind::Frequency, dp.omega_rf, Bound::Positive),
            pulse_duration: s.quantity("pulse_duration", Kind::Time, dp.pulse_duration, Bound::Positive),
            pulse_durations: s.quantity_list("pulse_durations", Kind::Time, &dp.pulse_durations, Bound::Positive),
            tau: s.quantity("tau", Kind::Time, dp.tau, Bound::NonNegative),
            taus: s.quantity_list("taus", Kind::Time, &dp.taus, Bound::NonNegative),
            f0: s.quantity("f0", Kind::Field, dp.f0, Bound::Any),
            step,
            stark_slope: s.quantity("stark_slope", Kind::StarkSlope, dp.stark_slope, Bound::Positive),
            anharmonicity: s.auto_quantity("anharmonicity", Kind::Frequency, dp.anharmonicity, Bound::Any),
            phi_rf: s.auto_quantity("phi_rf", Kind::Angle, dp.phi_rf, Bound::Any),
            phi_mw: s.quantity("phi_mw", Kind::Angle, dp.phi_mw, Bound::Any),
            instantaneous_pulses: s.boolean("instantaneous_pulses", dp.instantaneous_pulses),
            reference_detuning: s.quantity("reference_detuning", Kind::Frequency, dp.reference_detuning, Bound::Any),
            rotations: s.integer_list("rotations", &dp.rotations, 1),
        };
        s.finish(&PHYSICS_KEYS);
        p
    };
    let sweep = {
        let mut s = Section {
            reader: &mut reader,
            name: "sweep",
            table: tables[1],
        };
        let min_points = if scenario == ScenarioId::PulseOptimize { 2 } else { 5 };
        let bound = if sweep_kind == Kind::Time {
            Bound::NonNegative
        } else {
            Bound::Any
        };
        let sw = Sweep {
            points: s.integer("points", d.sweep.points as u64, min_points) as usize,
            start: s.auto_quantity("start", sweep_kind, AutoOr::Auto, Bound::Any),
            stop: s.auto_quantity("stop", sweep_kind, AutoOr::Auto, bound),
        };
        if let (AutoOr::Value(a), AutoOr::Value(b)) = (sw.start, sw.stop) {
            if !(b > a) {
                let span = s.value("stop").and_then(|v| v.1);
                s.reader.report("sweep.stop", span, "must be greater than sweep.start");
            }
        }
        s.finish(&["points", "start", "stop"]);
        sw
    };
    let noise = {
        let mut s = Section {
            reader: &mut reader,
            name: "noise",
            table: tables[2],
        };
        let n = Noise {
            shot_sigma: s.quantity("shot_sigma", Kind::Field, 0.0, Bound::NonNegative),
            inhomogeneity_sigma: s.quantity("inhomogeneity_sigma", Kind::Field, 0.0, Bound::NonNegative),
            drift_start: s.quantity("drift_start", Kind::Field, 0.0, Bound::Any),
            drift_per_sequence: s.quantity("drift_per_sequence", Kind::Field, 0.0, Bound::Any),
        };
        s.finish(&["shot_sigma", "inhomogeneity_sigma", "drift_start", "drift_per_sequence"]);
        n
    };
    let sampling = {
        let mut s = Section {
            reader: &mut reader,
            name: "sampling",
            table: tables[3],
        };
        let ds = &d.sampling;
        let sm = Sampling {
            shots: s.integer("shots", ds.shots as u64, 1) as usize,
            repetitions: s.integer("repetitions", ds.repetitions as u64, 1) as usize,
            seed: s.integer("seed", ds.seed, 0),
            rep_rate: s.quantity("rep_rate", Kind::Frequency, ds.rep_rate, Bound::Positive),
        };
        s.finish(&["shots", "repetitions", "seed", "rep_rate"]);
        sm
    };
    let qfunc = {
        let mut s = Section {
            reader: &mut reader,
            name: "qfunc",
            table: tables[4],
        };
        let q = Qfunc {
            n_theta: s.integer("n_theta", d.qfunc.n_theta as u64, 2) as usize,
            n_phi: s.integer("n_phi", d.qfunc.n_phi as u64, 2) as usize,
            field_offset: s.quantity("field_offset", Kind::Field, d.qfunc.field_offset, Bound::Any),
        };
        s.finish(&["n_theta", "n_phi", "field_offset"]);
        q
    };
    let output = {
        let mut s = Section {
            reader: &mut reader,
            name: "output",
            table: tables[5],
        };
        let o = Output {
            dir: s.string("dir", &d.output.dir),
            emit_plots: s.boolean("emit_plots", d.output.emit_plots),
        };
        s.finish(&["dir", "emit_plots"]);
        o
    };

    let cfg = ScenarioConfig {
        scenario,
        physics,
        sweep,
        noise,
        sampling,
        qfunc,
        output,
    };
    scenario_checks(&cfg, &mut reader, tables[0]);
    if reader.diagnostics.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigError {
            diagnostics: reader.diagnostics,
        })
    }
}

fn scenario_checks(cfg: &ScenarioConfig, reader: &mut Reader<'_>, physics: Option<&Table>) {
    let span = |key: &str| physics.and_then(|t| t.get(key)).and_then(Item::span);
    match cfg.scenario {
        ScenarioId::PhaseVsTau if cfg.physics.taus.len() < 2 => {
            reader.report(
                "physics.taus",
                span("taus"),
                "phase-vs-tau needs at least two interrogation times",
            );
        }
        ScenarioId::SensitivityVsTau => {
            if cfg.physics.taus.len() < 2 {
                reader.report(
                    "physics.taus",
                    span("taus"),
                    "sensitivity-vs-tau needs at least two interrogation times",
                );
            }
            if let Some(i) = cfg.physics.taus.iter().position(|&t| t <= 0.0) {
                reader.report(
                    &format!("physics.taus[{i}]"),
                    span("taus"),
                    "must be > 0 for sensitivity-vs-tau",
                );
            }
        }
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gives_defaults() {
        for id in ScenarioId::ALL {
            assert_eq!(validate_config("", id).unwrap(), ScenarioConfig::defaults(id));
        }
    }

    #[test]
    fn canonical_text_round_trips() {
        let text = r#"
[physics]
omega_rf = "1.6 MHz"
pulse_duration = "91 ns"
taus = ["20 ns", "56 ns", "0.1 us"]
frequency_step = "54.8 kHz"
anharmonicity = "auto"
phi_rf = "715 mrad"

[sampling]
seed = "18446744073709551615"

[noise]
inhomogeneity_sigma = "120 µV/cm"
"#;
        let cfg = validate_config(text, ScenarioId::PhaseVsTau).unwrap();
        assert_eq!(cfg.sampling.seed, u64::MAX);
        assert_eq!(cfg.physics.step, Step::Frequency(54.8e3));
        let again = validate_config(&cfg.to_toml(), ScenarioId::PhaseVsTau).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.to_toml(), cfg.to_toml());
    }

    #[test]
    fn negative_tau_names_the_field() {
        let err = validate_config("[physics]\n\ntau = \"-5 ns\"\n", ScenarioId::FringesVsPhiMw).unwrap_err();
        assert_eq!(err.diagnostics.len(), 1);
        let d = &err.diagnostics[0];
        assert_eq!(d.path, "physics.tau");
        assert_eq!(d.line, Some(3));
        assert!(d.message.contains(">= 0"), "{}", d.message);
    }

    #[test]
    fn typo_gets_a_suggestion() {
        let err = validate_config("[physics]\nombega_rf = \"1.6 MHz\"\n", ScenarioId::FringesVsPhiMw).unwrap_err();
        let d = &err.diagnostics[0];
        assert_eq!(d.path, "physics.ombega_rf");
        assert_eq!(d.line, Some(2));
        assert!(d.message.contains("\"omega_rf\""), "{}", d.message);
        let err = validate_config("[samplng]\n", ScenarioId::FringesVsPhiMw).unwrap_err();
        assert!(
            err.diagnostics[0].message.contains("\"sampling\""),
            "{}",
            err.diagnostics[0].message
        );
    }

    #[test]
    fn bad_units_and_types_reported_together() {
        let text = "[physics]\ntau = 56\npulse_duration = \"184 Hz\"\n[sampling]\nshots = 0\n";
        let err = validate_config(text, ScenarioId::FringesVsPhiMw).unwrap_err();
        let paths: Vec<&str> = err.diagnostics.iter().map(|d| d.path.as_str()).collect();
        assert_eq!(paths, ["physics.pulse_duration", "physics.tau", "sampling.shots"]);
        assert!(err.to_string().contains("line 2"));
    }

    #[test]
    fn mismatched_scenario_rejected() {
        let err = validate_config("scenario = \"phase-vs-tau\"\n", ScenarioId::QfuncSnapshots).unwrap_err();
        assert_eq!(err.diagnostics[0].path, "scenario");
        assert!("fringes-vs-phimv"
            .parse::<ScenarioId>()
            .unwrap_err()
            .contains("fringes-vs-phimw"));
    }

    #[test]
    fn syntax_errors_have_lines() {
        let err = validate_config("[physics]\ntau = \"56 ns\n", ScenarioId::PhaseVsTau).unwrap_err();
        assert_eq!(err.diagnostics[0].line, Some(2));
    }

    #[test]
    fn both_steps_rejected() {
        let text = "[physics]\nfield_step = \"566 uV/cm\"\nfrequency_step = \"54.8 kHz\"\n";
        assert!(validate_config(text, ScenarioId::PhaseVsTau).is_err());
    }
}
