//! `key = value` run configuration for scaling studies.
//!
//! ```text
//! # comments and blank lines are ignored
//! family = sect4
//! rho = 7/6
//! m_list = 4,8,16,32,64
//! box = 0,2pi
//! ```
//!
//! Keys not listed in [`KEYS`] are rejected; omitted keys take the family's
//! defaults.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write;

use crate::besov::{BesovParams, DEFAULT_BUDGET};
use crate::constructions::{ConstructionSpec, Family};
use crate::error::{Error, Result};
use crate::grid_field::GridBox;

pub const KEYS: [&str; 12] = ["family", "n", "k", "p", "s", "rho", "m_list", "base", "grid_points", "box", "seed", "budget"];

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub family: Family,
    pub n: usize,
    pub k: usize,
    pub p: f64,
    pub s: f64,
    pub rho: f64,
    pub m_list: Vec<u64>,
    pub base: f64,
    pub grid_points: usize,
    pub bbox: (f64, f64),
    pub seed: u64,
    pub budget: usize,
}

impl RunConfig {
    pub fn defaults(family: Family) -> Self {
        match family {
            Family::Sect3 => Self {
                family,
                n: 3,
                k: 3,
                p: 2.0,
                s: 1.1,
                rho: 0.0,
                m_list: vec![2, 4, 8, 16],
                base: 4.0,
                grid_points: 128,
                bbox: (-1.1, 1.1),
                seed: 1,
                budget: DEFAULT_BUDGET,
            },
            Family::Sect4 => Self {
                family,
                n: 3,
                k: 3,
                p: 4.0,
                s: 1.0,
                rho: 7.0 / 6.0,
                m_list: vec![4, 8, 16, 32, 64],
                base: 4.0,
                grid_points: 64,
                bbox: (0.0, 2.0 * PI),
                seed: 1,
                budget: DEFAULT_BUDGET,
            },
            Family::Sect5 => Self {
                family,
                n: 3,
                k: 3,
                p: 4.0,
                s: 4.0 / 3.0,
                rho: 0.0,
                m_list: vec![2, 3, 4, 5, 6],
                base: 4.0,
                grid_points: 64,
                bbox: (0.0, 2.0 * PI),
                seed: 1,
                budget: DEFAULT_BUDGET,
            },
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected 'key = value', got '{line}'", lineno + 1)))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(Error::Parse(format!("line {}: unknown key '{key}'", lineno + 1)));
            }
            if pairs.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(Error::Parse(format!("line {}: duplicate key '{key}'", lineno + 1)));
            }
        }
        let family: Family = pairs
            .get("family")
            .ok_or_else(|| Error::Parse("missing required key 'family'".into()))?
            .parse()?;
        let mut cfg = Self::defaults(family);
        for (key, value) in &pairs {
            let bad = |what: &str| Error::Parse(format!("{key}: {what}, got '{value}'"));
            match key.as_str() {
                "family" => {}
                "n" => cfg.n = value.parse().map_err(|_| bad("expected an integer"))?,
                "k" => cfg.k = value.parse().map_err(|_| bad("expected an integer"))?,
                "p" => cfg.p = parse_real(value).ok_or_else(|| bad("expected a number"))?,
                "s" => cfg.s = parse_real(value).ok_or_else(|| bad("expected a number"))?,
                "rho" => cfg.rho = parse_real(value).ok_or_else(|| bad("expected a number or a/b"))?,
                "base" => cfg.base = parse_real(value).ok_or_else(|| bad("expected a number"))?,
                "grid_points" => cfg.grid_points = value.parse().map_err(|_| bad("expected an integer"))?,
                "seed" => cfg.seed = value.parse().map_err(|_| bad("expected an integer"))?,
                "budget" => cfg.budget = value.parse().map_err(|_| bad("expected an integer"))?,
                "m_list" => cfg.m_list = parse_m_list(value).ok_or_else(|| bad("expected 'a,b,c' or 'a..b'"))?,
                "box" => {
                    let (lo, hi) = value.split_once(',').ok_or_else(|| bad("expected 'lo,hi'"))?;
                    let lo = parse_real(lo).ok_or_else(|| bad("bad lower bound"))?;
                    let hi = parse_real(hi).ok_or_else(|| bad("bad upper bound"))?;
                    cfg.bbox = (lo, hi);
                }
                _ => unreachable!("keys are validated above"),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Structural checks that do not need a construction.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Parse(msg));
        if self.m_list.len() < 3 {
            return fail(format!("m_list needs at least 3 entries for a fit, got {}", self.m_list.len()));
        }
        if self.m_list.windows(2).any(|w| w[1] <= w[0]) || self.m_list[0] == 0 {
            return fail("m_list must be positive and strictly ascending".into());
        }
        if !(self.bbox.0 < self.bbox.1) {
            return fail(format!("box lower {} must be below upper {}", self.bbox.0, self.bbox.1));
        }
        if self.grid_points < 4 {
            return fail(format!("grid_points must be at least 4, got {}", self.grid_points));
        }
        BesovParams::new(self.s, self.p).map_err(|e| Error::Parse(e.to_string()))?;
        self.spec(self.m_list[0]).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(())
    }

    pub fn besov(&self) -> Result<BesovParams> {
        BesovParams::new(self.s, self.p)
    }

    pub fn spec(&self, m: u64) -> Result<ConstructionSpec> {
        let bbox = GridBox::cube(self.n, self.bbox.0, self.bbox.1)?;
        ConstructionSpec::new(self.family, self.n, self.k, self.rho, m, self.base, bbox)
    }

    /// Canonical text form; parsing it gives back the same config.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let ms: Vec<String> = self.m_list.iter().map(|m| m.to_string()).collect();
        let _ = writeln!(out, "family = {}", self.family);
        let _ = writeln!(out, "n = {}", self.n);
        let _ = writeln!(out, "k = {}", self.k);
        let _ = writeln!(out, "p = {:?}", self.p);
        let _ = writeln!(out, "s = {:?}", self.s);
        let _ = writeln!(out, "rho = {:?}", self.rho);
        let _ = writeln!(out, "m_list = {}", ms.join(","));
        let _ = writeln!(out, "base = {:?}", self.base);
        let _ = writeln!(out, "grid_points = {}", self.grid_points);
        let _ = writeln!(out, "box = {:?},{:?}", self.bbox.0, self.bbox.1);
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "budget = {}", self.budget);
        out
    }
}

/// A real written as a decimal, `a/b`, `pi`, `2pi`, `-pi` or `c*pi`.
pub fn parse_real(text: &str) -> Option<f64> {
    let t = text.trim();
    if let Some((a, b)) = t.split_once('/') {
        let (a, b) = (parse_real(a)?, parse_real(b)?);
        return (b != 0.0).then(|| a / b);
    }
    if let Some(head) = t.strip_suffix("pi") {
        let head = head.trim().trim_end_matches('*').trim();
        let c = match head {
            "" => 1.0,
            "-" => -1.0,
            h => h.parse::<f64>().ok()?,
        };
        return Some(c * PI);
    }
    t.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn parse_m_list(text: &str) -> Option<Vec<u64>> {
    if let Some((a, b)) = text.split_once("..") {
        let (a, b): (u64, u64) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
        return (a <= b).then(|| (a..=b).collect());
    }
    text.split(',').map(|v| v.trim().parse().ok()).collect()
}
