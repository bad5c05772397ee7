//! Strict unit-suffixed quantities: `"184 ns"`, `"1.6 MHz"`, `"566 µV/cm"`.

use std::fmt;

/// Physical dimension of a config value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Time,
    Frequency,
    Field,
    /// Frequency per field, `Hz/(V/cm)`.
    StarkSlope,
    Angle,
}

impl Kind {
    /// Accepted suffixes and their factor to the canonical unit (first entry).
    pub fn units(self) -> &'static [(&'static str, f64)] {
        match self {
            Kind::Time => &[("s", 1.0), ("ms", 1e-3), ("us", 1e-6), ("µs", 1e-6), ("ns", 1e-9)],
            Kind::Frequency => &[("Hz", 1.0), ("kHz", 1e3), ("MHz", 1e6), ("GHz", 1e9)],
            Kind::Field => &[("V/cm", 1.0), ("mV/cm", 1e-3), ("µV/cm", 1e-6), ("uV/cm", 1e-6)],
            Kind::StarkSlope => &[
                ("Hz/(V/cm)", 1.0),
                ("kHz/(V/cm)", 1e3),
                ("MHz/(V/cm)", 1e6),
                ("GHz/(V/cm)", 1e9),
            ],
            Kind::Angle => &[("rad", 1.0), ("mrad", 1e-3)],
        }
    }

    pub fn canonical(self) -> &'static str {
        self.units()[0].0
    }

    fn name(self) -> &'static str {
        match self {
            Kind::Time => "time",
            Kind::Frequency => "frequency",
            Kind::Field => "electric field",
            Kind::StarkSlope => "Stark slope",
            Kind::Angle => "angle",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitError(pub String);

impl fmt::Display for UnitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Parses `"<number> <unit>"` into the canonical unit of `kind`. The space is optional.
pub fn parse_quantity(text: &str, kind: Kind) -> Result<f64, UnitError> {
    let text = text.trim();
    let split = text
        .char_indices()
        .find(|&(i, c)| {
            !(c.is_ascii_digit()
                || matches!(c, '+' | '-' | '.')
                || (matches!(c, 'e' | 'E') && i > 0 && exponent_follows(text, i)))
        })
        .map_or(text.len(), |(i, _)| i);
    let (number, unit) = text.split_at(split);
    let unit = unit.trim_start();
    let allowed = || kind.units().iter().map(|u| u.0).collect::<Vec<_>>().join(", ");
    if unit.is_empty() {
        return Err(UnitError(format!(
            "missing unit in {text:?}; a {} needs one of: {}",
            kind.name(),
            allowed()
        )));
    }
    let value: f64 = number
        .parse()
        .map_err(|_| UnitError(format!("cannot read a number from {text:?}")))?;
    if !value.is_finite() {
        return Err(UnitError(format!("{text:?} is not finite")));
    }
    let factor = kind.units().iter().find(|u| u.0 == unit).map(|u| u.1).ok_or_else(|| {
        UnitError(format!(
            "unit {unit:?} is not a {}; use one of: {}",
            kind.name(),
            allowed()
        ))
    })?;
    Ok(value * factor)
}

fn exponent_follows(text: &str, i: usize) -> bool {
    let rest = &text[i + 1..];
    let rest = rest.strip_prefix(['+', '-']).unwrap_or(rest);
    rest.starts_with(|c: char| c.is_ascii_digit())
}

/// Canonical text of a value, exact under [`parse_quantity`].
pub fn format_quantity(value: f64, kind: Kind) -> String {
    format!("{value:e} {}", kind.canonical())
}
