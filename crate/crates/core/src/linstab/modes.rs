//! Neumann eigenmodes admitted by a finite domain, grouped by exact wavenumber.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::{max_growth, unstable_band};
use crate::error::{Error, Result};
use crate::model::NondimParams;

pub type Rational = Ratio<i64>;

/// A length of the form `c·π` or `c·√3·π` with rational `c`.
///
/// Keeping the surd symbolic makes `k² = (pπ/L)²` an exact rational number,
/// so degenerate wavenumbers are detected without floating-point ties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PiLength {
    pub coeff: Rational,
    pub sqrt3: bool,
}

impl PiLength {
    pub fn new(coeff: Rational, sqrt3: bool) -> Result<Self> {
        if *coeff.numer() <= 0 {
            return Err(Error::Config(format!("domain length coefficient must be positive, got {coeff}")));
        }
        Ok(Self { coeff, sqrt3 })
    }

    pub fn pi_multiple(n: i64) -> Self {
        Self {
            coeff: Rational::from_integer(n),
            sqrt3: false,
        }
    }

    pub fn value(&self) -> f64 {
        let c = *self.coeff.numer() as f64 / *self.coeff.denom() as f64;
        let s = if self.sqrt3 { 3f64.sqrt() } else { 1.0 };
        c * s * std::f64::consts::PI
    }

    /// `(π/L)²` as an exact rational.
    pub fn inv_sq(&self) -> Rational {
        let c2 = self.coeff * self.coeff;
        let c2 = if self.sqrt3 { c2 * 3 } else { c2 };
        c2.recip()
    }
}

impl fmt::Display for PiLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.coeff == Rational::from_integer(1), self.sqrt3) {
            (true, true) => write!(f, "sqrt(3)"),
            (false, true) => write!(f, "{}*sqrt(3)", self.coeff),
            (_, false) => write!(f, "{}", self.coeff),
        }
    }
}

impl FromStr for PiLength {
    type Err = Error;

    /// Accepts `"2"`, `"1/2"`, `"sqrt(3)"`, `"2*sqrt(3)"`, `"2√3"`, with an optional `pi` factor.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("cannot parse domain length {s:?} as a rational multiple of pi"));
        let mut t: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
        for pi in ["*pi", "pi", "*π", "π"] {
            if let Some(stripped) = t.strip_suffix(pi) {
                t = stripped.to_string();
                break;
            }
        }
        let mut sqrt3 = false;
        for pat in ["*sqrt(3)", "sqrt(3)*", "sqrt(3)", "*sqrt3", "sqrt3", "*√3", "√3"] {
            if let Some(pos) = t.find(pat) {
                t.replace_range(pos..pos + pat.len(), "");
                sqrt3 = true;
                break;
            }
        }
        let coeff = if t.is_empty() {
            Rational::from_integer(1)
        } else if let Some((a, b)) = t.split_once('/') {
            let a: i64 = a.parse().map_err(|_| bad())?;
            let b: i64 = b.parse().map_err(|_| bad())?;
            if b == 0 {
                return Err(bad());
            }
            Rational::new(a, b)
        } else {
            Rational::from_integer(t.parse().map_err(|_| bad())?)
        };
        PiLength::new(coeff, sqrt3)
    }
}

impl Serialize for PiLength {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PiLength {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            S(String),
            I(i64),
        }
        match Raw::deserialize(d)? {
            Raw::S(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::I(i) => PiLength::new(Rational::from_integer(i), false).map_err(serde::de::Error::custom),
        }
    }
}

/// Spatial domain with homogeneous Neumann boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Line { lx: PiLength },
    Rect { lx: PiLength, ly: PiLength },
}

impl Domain {
    pub fn lx(&self) -> PiLength {
        match *self {
            Domain::Line { lx } | Domain::Rect { lx, .. } => lx,
        }
    }

    pub fn ly(&self) -> Option<PiLength> {
        match *self {
            Domain::Line { .. } => None,
            Domain::Rect { ly, .. } => Some(ly),
        }
    }

    pub fn mode(&self, p: u32, q: u32) -> ModePair {
        let ax = self.lx().inv_sq();
        let ay = self.ly().map(|l| l.inv_sq()).unwrap_or_else(|| Rational::from_integer(0));
        let q = if self.ly().is_some() { q } else { 0 };
        let k2 = ax * i64::from(p * p) + ay * i64::from(q * q);
        let pi = std::f64::consts::PI;
        ModePair {
            p,
            q,
            phi_x: p as f64 * pi / self.lx().value(),
            phi_y: self.ly().map_or(0.0, |l| q as f64 * pi / l.value()),
            k2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModePair {
    pub p: u32,
    pub q: u32,
    pub phi_x: f64,
    pub phi_y: f64,
    #[serde(with = "ratio_serde")]
    pub k2: Rational,
}

impl ModePair {
    pub fn k2_value(&self) -> f64 {
        ratio_f64(self.k2)
    }
}

pub(crate) fn ratio_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

mod ratio_serde {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Resonance {
    None,
    Resonant,
}

/// The group of admissible modes sharing the most unstable exact `k²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSet {
    pub domain: Domain,
    pub modes: Vec<ModePair>,
    #[serde(with = "ratio_serde")]
    pub k2: Rational,
    pub multiplicity: usize,
    pub resonance: Resonance,
    /// Linear growth rate of the group.
    pub growth: f64,
    /// Unstable band `(k1², k2²)` at the parameters used.
    pub band: (f64, f64),
}

impl ModeSet {
    pub fn k2_value(&self) -> f64 {
        ratio_f64(self.k2)
    }

    pub fn indices(&self) -> Vec<(u32, u32)> {
        self.modes.iter().map(|m| (m.p, m.q)).collect()
    }
}

/// Two critical modes interact quadratically when one is a self-product
/// harmonic of the other: `(φ_i, ψ_i) = (0, 2ψ_j)` or `(2φ_j, 0)`.
fn quadratic_pair(i: &ModePair, j: &ModePair) -> bool {
    (i.p == 0 && i.q == 2 * j.q) || (i.p == 2 * j.p && i.q == 0)
}

pub fn classify_resonance(modes: &[ModePair]) -> Resonance {
    for (a, i) in modes.iter().enumerate() {
        for (b, j) in modes.iter().enumerate() {
            if a != b && quadratic_pair(i, j) {
                return Resonance::Resonant;
            }
        }
    }
    Resonance::None
}

/// Enumerates the modes `(p, q)` whose `k²` lies strictly inside the unstable band
/// with positive growth and returns the most unstable exact-`k²` group.
pub fn admissible_modes(np: &NondimParams, domain: Domain) -> Result<ModeSet> {
    let (k1, k2) = unstable_band(np).ok_or(Error::NoAdmissibleMode)?;
    let pmax = (k2.sqrt() * domain.lx().value() / std::f64::consts::PI).floor() as u32 + 1;
    let qmax = domain
        .ly()
        .map_or(0, |l| (k2.sqrt() * l.value() / std::f64::consts::PI).floor() as u32 + 1);
    let mut groups: BTreeMap<Rational, Vec<ModePair>> = BTreeMap::new();
    for p in 0..=pmax {
        for q in 0..=qmax {
            if p == 0 && q == 0 {
                continue;
            }
            let m = domain.mode(p, q);
            let kv = m.k2_value();
            if kv > k1 && kv < k2 {
                groups.entry(m.k2).or_default().push(m);
            }
        }
    }
    let mut best: Option<(f64, Rational, Vec<ModePair>)> = None;
    for (k2r, modes) in groups {
        let g = max_growth(np, ratio_f64(k2r));
        if g > 0.0 && best.as_ref().map_or(true, |b| g > b.0) {
            best = Some((g, k2r, modes));
        }
    }
    let (growth, k2r, modes) = best.ok_or(Error::NoAdmissibleMode)?;
    Ok(ModeSet {
        domain,
        multiplicity: modes.len(),
        resonance: classify_resonance(&modes),
        modes,
        k2: k2r,
        growth,
        band: (k1, k2),
    })
}
