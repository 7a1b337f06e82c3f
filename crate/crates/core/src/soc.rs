// SPDX-License-Identifier: Apache-2.0

//! SOC and core descriptions, plus the line-oriented benchmark format.
//!
//! ```text
//! soc d695
//! powerlimit 1500
//! core 1 inputs 32 outputs 32 bidirs 0 patterns 12 power 660 scanchains 0 name c6288
//! core 3 inputs 34 outputs 1 bidirs 0 patterns 75 power 823 scanchains 1 lengths 32
//! ```
//!
//! `#` starts a comment. Fields on a `core` line appear in exactly the order
//! shown; `power` and the trailing `name` are optional.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ParseError;

/// Test parameters of one embedded core.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoreSpec {
    pub id: u32,
    /// Free-form label; empty when the benchmark file gives none.
    pub name: String,
    pub inputs: u32,
    pub outputs: u32,
    pub bidirs: u32,
    pub patterns: u32,
    pub scan_chain_lengths: Vec<u32>,
    /// Test power in milliwatts.
    pub power: Option<f64>,
}

impl CoreSpec {
    pub fn new(id: u32, inputs: u32, outputs: u32, bidirs: u32, patterns: u32) -> Self {
        Self {
            id,
            name: String::new(),
            inputs,
            outputs,
            bidirs,
            patterns,
            scan_chain_lengths: Vec::new(),
            power: None,
        }
    }

    pub fn with_scan_chains(mut self, lengths: impl Into<Vec<u32>>) -> Self {
        self.scan_chain_lengths = lengths.into();
        self
    }

    pub fn with_power(mut self, mw: f64) -> Self {
        self.power = Some(mw);
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn is_combinational(&self) -> bool {
        self.scan_chain_lengths.is_empty()
    }

    /// Wrapper input cells: one per functional input and one per bidir.
    pub fn input_cells(&self) -> u64 {
        u64::from(self.inputs) + u64::from(self.bidirs)
    }

    /// Wrapper output cells: one per functional output and one per bidir.
    pub fn output_cells(&self) -> u64 {
        u64::from(self.outputs) + u64::from(self.bidirs)
    }

    /// Flip-flops over all internal scan chains.
    pub fn scan_flops(&self) -> u64 {
        self.scan_chain_lengths.iter().map(|&l| u64::from(l)).sum()
    }

    /// Every element that ends up on some wrapper chain.
    pub fn total_scan_elements(&self) -> u64 {
        self.scan_flops() + self.input_cells() + self.output_cells()
    }

    /// Label used in reports.
    pub fn label(&self) -> String {
        if self.name.is_empty() {
            format!("core{}", self.id)
        } else {
            self.name.clone()
        }
    }
}

/// A system-on-chip: an ordered list of cores and an optional power cap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SocSpec {
    pub name: String,
    pub cores: Vec<CoreSpec>,
    /// Default P_max in milliwatts, used when the caller gives none.
    pub default_power_limit: Option<f64>,
}

impl SocSpec {
    /// Builds a validated SOC.
    pub fn new(
        name: impl Into<String>,
        cores: Vec<CoreSpec>,
        default_power_limit: Option<f64>,
    ) -> Result<Self, ParseError> {
        let soc = Self {
            name: name.into(),
            cores,
            default_power_limit,
        };
        let violations = validate_soc(&soc);
        if violations.is_empty() {
            Ok(soc)
        } else {
            Err(ParseError::Invalid(
                violations.iter().map(ToString::to_string).collect(),
            ))
        }
    }

    pub fn core(&self, id: u32) -> Option<&CoreSpec> {
        self.cores.iter().find(|c| c.id == id)
    }

    /// Position of core `id` in `cores`.
    pub fn index_of(&self, id: u32) -> Option<usize> {
        self.cores.iter().position(|c| c.id == id)
    }
}

/// One broken invariant of a [`SocSpec`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SocViolation {
    pub core: Option<u32>,
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for SocViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.core {
            Some(id) => write!(f, "core {} `{}`: {}", id, self.field, self.message),
            None => write!(f, "soc `{}`: {}", self.field, self.message),
        }
    }
}

fn is_token(s: &str) -> bool {
    !s.is_empty() && !s.contains(char::is_whitespace) && !s.contains('#')
}

/// Checks every SOC invariant. An empty result means the SOC is valid.
pub fn validate_soc(spec: &SocSpec) -> Vec<SocViolation> {
    let mut out = Vec::new();
    let soc_violation = |field, message: String| SocViolation {
        core: None,
        field,
        message,
    };

    if !is_token(&spec.name) {
        out.push(soc_violation(
            "name",
            format!("`{}` is not a single non-empty token", spec.name),
        ));
    }
    if spec.cores.is_empty() {
        out.push(soc_violation(
            "cores",
            "at least one core is required".into(),
        ));
    }
    if let Some(limit) = spec.default_power_limit {
        if !limit.is_finite() || limit < 0.0 {
            out.push(soc_violation(
                "powerlimit",
                format!("{limit} is not a non-negative finite value"),
            ));
        }
    }

    let mut seen = BTreeSet::new();
    let mut reported = BTreeSet::new();
    for core in &spec.cores {
        let mut push = |field, message: String| {
            out.push(SocViolation {
                core: Some(core.id),
                field,
                message,
            })
        };
        if !seen.insert(core.id) && reported.insert(core.id) {
            push("id", "duplicate core id".into());
        }
        if core.patterns == 0 {
            push("patterns", "pattern count must be at least 1".into());
        }
        for (k, &len) in core.scan_chain_lengths.iter().enumerate() {
            if len == 0 {
                push("scan_chain_lengths", format!("scan chain {k} has length 0"));
            }
        }
        match core.power {
            Some(p) if !p.is_finite() || p < 0.0 => {
                push("power", format!("{p} is not a non-negative finite value"))
            }
            None if spec.default_power_limit.is_some() => {
                push("power", "missing while a power limit is in force".into())
            }
            _ => {}
        }
        if !core.name.is_empty() && !is_token(&core.name) {
            push("name", format!("`{}` is not a single token", core.name));
        }
    }

    if reported.is_empty() && !spec.cores.is_empty() {
        let n = spec.cores.len() as u32;
        if seen.iter().copied().ne(1..=n) {
            out.push(soc_violation(
                "cores",
                format!("core ids must be exactly 1..={n}"),
            ));
        }
    }
    out
}

struct Tokens<'a> {
    line: usize,
    iter: std::iter::Peekable<std::str::SplitWhitespace<'a>>,
}

impl<'a> Tokens<'a> {
    fn syntax(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line: self.line,
            message: message.into(),
        }
    }

    fn next(&mut self, what: &str) -> Result<&'a str, ParseError> {
        self.iter
            .next()
            .ok_or_else(|| self.syntax(format!("expected {what}, found end of line")))
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        let tok = self.next(&format!("`{kw}`"))?;
        if tok == kw {
            Ok(())
        } else {
            Err(self.syntax(format!("expected `{kw}`, found `{tok}`")))
        }
    }

    fn count(&mut self, field: &str) -> Result<u32, ParseError> {
        let tok = self.next(&format!("value for `{field}`"))?;
        if let Ok(v) = tok.parse::<i64>() {
            if v < 0 {
                return Err(ParseError::NegativeCount {
                    line: self.line,
                    field: field.to_string(),
                });
            }
        }
        tok.parse::<u32>()
            .map_err(|_| self.syntax(format!("`{tok}` is not a valid count for `{field}`")))
    }

    fn milliwatts(&mut self, field: &str) -> Result<f64, ParseError> {
        let tok = self.next(&format!("value for `{field}`"))?;
        let v: f64 = tok
            .parse()
            .map_err(|_| self.syntax(format!("`{tok}` is not a number for `{field}`")))?;
        if !v.is_finite() {
            return Err(self.syntax(format!("`{tok}` is not finite")));
        }
        if v < 0.0 {
            return Err(ParseError::NegativeCount {
                line: self.line,
                field: field.to_string(),
            });
        }
        Ok(v)
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        match self.iter.next() {
            None => Ok(()),
            Some(tok) => Err(self.syntax(format!("unexpected trailing token `{tok}`"))),
        }
    }
}

fn parse_core(t: &mut Tokens<'_>) -> Result<CoreSpec, ParseError> {
    let id = t.count("id")?;
    t.keyword("inputs")?;
    let inputs = t.count("inputs")?;
    t.keyword("outputs")?;
    let outputs = t.count("outputs")?;
    t.keyword("bidirs")?;
    let bidirs = t.count("bidirs")?;
    t.keyword("patterns")?;
    let patterns = t.count("patterns")?;
    if patterns == 0 {
        return Err(ParseError::NonPositivePatterns { line: t.line, id });
    }
    let power = if t.iter.peek() == Some(&"power") {
        t.iter.next();
        Some(t.milliwatts("power")?)
    } else {
        None
    };
    t.keyword("scanchains")?;
    let n = t.count("scanchains")?;
    let mut lengths = Vec::with_capacity(n as usize);
    if n > 0 {
        t.keyword("lengths")?;
        for _ in 0..n {
            let len = t.count("lengths")?;
            if len == 0 {
                return Err(t.syntax("scan chain length must be at least 1"));
            }
            lengths.push(len);
        }
    }
    let name = if t.iter.peek() == Some(&"name") {
        t.iter.next();
        t.next("core name")?.to_string()
    } else {
        String::new()
    };
    t.finish()?;
    Ok(CoreSpec {
        id,
        name,
        inputs,
        outputs,
        bidirs,
        patterns,
        scan_chain_lengths: lengths,
        power,
    })
}

/// Parses a benchmark description.
pub fn parse_soc(text: &str) -> Result<SocSpec, ParseError> {
    let mut name: Option<String> = None;
    let mut limit: Option<f64> = None;
    let mut cores: Vec<CoreSpec> = Vec::new();
    let mut ids = BTreeSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut t = Tokens {
            line,
            iter: content.split_whitespace().peekable(),
        };
        let Some(directive) = t.iter.next() else {
            continue;
        };
        if name.is_none() && directive != "soc" {
            return Err(t.syntax(format!("expected `soc <name>` before `{directive}`")));
        }
        match directive {
            "soc" => {
                if name.is_some() {
                    return Err(t.syntax("`soc` given more than once"));
                }
                name = Some(t.next("soc name")?.to_string());
                t.finish()?;
            }
            "powerlimit" => {
                if limit.is_some() {
                    return Err(t.syntax("`powerlimit` given more than once"));
                }
                limit = Some(t.milliwatts("powerlimit")?);
                t.finish()?;
            }
            "core" => {
                let core = parse_core(&mut t)?;
                if !ids.insert(core.id) {
                    return Err(ParseError::DuplicateCoreId { line, id: core.id });
                }
                cores.push(core);
            }
            other => {
                return Err(ParseError::UnknownDirective {
                    line,
                    directive: other.to_string(),
                })
            }
        }
    }

    let name = name.ok_or_else(|| ParseError::Syntax {
        line: 1,
        message: "missing `soc <name>` line".into(),
    })?;
    SocSpec::new(name, cores, limit)
}

impl fmt::Display for CoreSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "core {} inputs {} outputs {} bidirs {} patterns {}",
            self.id, self.inputs, self.outputs, self.bidirs, self.patterns
        )?;
        if let Some(p) = self.power {
            write!(f, " power {p}")?;
        }
        write!(f, " scanchains {}", self.scan_chain_lengths.len())?;
        if !self.scan_chain_lengths.is_empty() {
            f.write_str(" lengths")?;
            for l in &self.scan_chain_lengths {
                write!(f, " {l}")?;
            }
        }
        if !self.name.is_empty() {
            write!(f, " name {}", self.name)?;
        }
        Ok(())
    }
}

impl fmt::Display for SocSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "soc {}", self.name)?;
        if let Some(limit) = self.default_power_limit {
            writeln!(f, "powerlimit {limit}")?;
        }
        for core in &self.cores {
            writeln!(f, "{core}")?;
        }
        Ok(())
    }
}

/// Canonical text form; `parse_soc` reads it back unchanged.
pub fn serialize_soc(spec: &SocSpec) -> String {
    spec.to_string()
}
