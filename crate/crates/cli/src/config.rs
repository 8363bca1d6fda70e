use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgebraChoice {
    Sl2,
    Sl3,
    Su2,
    Su3,
}

impl AlgebraChoice {
    pub fn n(&self) -> usize {
        match self {
            AlgebraChoice::Sl2 | AlgebraChoice::Su2 => 2,
            AlgebraChoice::Sl3 | AlgebraChoice::Su3 => 3,
        }
    }

    pub fn is_compact(&self) -> bool {
        matches!(self, AlgebraChoice::Su2 | AlgebraChoice::Su3)
    }
}

impl fmt::Display for AlgebraChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AlgebraChoice::Sl2 => "sl2",
            AlgebraChoice::Sl3 => "sl3",
            AlgebraChoice::Su2 => "su2",
            AlgebraChoice::Su3 => "su3",
        };
        f.write_str(s)
    }
}

impl FromStr for AlgebraChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "sl2" => Ok(AlgebraChoice::Sl2),
            "sl3" => Ok(AlgebraChoice::Sl3),
            "su2" => Ok(AlgebraChoice::Su2),
            "su3" => Ok(AlgebraChoice::Su3),
            other => Err(format!("unknown algebra {other:?} (expected sl2, sl3, su2 or su3)")),
        }
    }
}

/// Invariant element used on the right-hand side of the compact PL-CDYBE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompactInvariant {
    /// -f^ / (4 theta^2), the value the equation takes.
    Derived,
    /// (1/(16 theta^2) - 3/4) f^.
    Stated,
}

impl FromStr for CompactInvariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "derived" => Ok(CompactInvariant::Derived),
            "stated" => Ok(CompactInvariant::Stated),
            other => Err(format!(
                "unknown compact invariant {other:?} (expected derived or stated)"
            )),
        }
    }
}

pub const DEFAULT_NU: f64 = 0.35;
pub const DEFAULT_THETA: f64 = 0.3;
pub const DEFAULT_SAMPLES: usize = 100;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_RADIUS: f64 = 0.3;
pub const DEFAULT_FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub algebra: AlgebraChoice,
    /// nu on split algebras.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    /// theta on compact algebras (nu = i theta).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compact_theta: Option<f64>,
    pub samples: usize,
    pub seed: u64,
    pub domain_radius: f64,
    pub fd_step: f64,
    pub compact_invariant: CompactInvariant,
    /// Threshold overrides by check id.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

impl SuiteConfig {
    pub fn new(algebra: AlgebraChoice) -> Self {
        let (nu, compact_theta) = if algebra.is_compact() {
            (None, Some(DEFAULT_THETA))
        } else {
            (Some(DEFAULT_NU), None)
        };
        SuiteConfig {
            algebra,
            nu,
            compact_theta,
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            domain_radius: DEFAULT_RADIUS,
            fd_step: DEFAULT_FD_STEP,
            compact_invariant: CompactInvariant::Derived,
            tolerances: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, p: f64) -> Self {
        if self.algebra.is_compact() {
            self.compact_theta = Some(p);
        } else {
            self.nu = Some(p);
        }
        self
    }

    pub fn with_samples(mut self, s: usize) -> Self {
        self.samples = s;
        self
    }

    /// nu or theta, whichever applies.
    pub fn parameter(&self) -> f64 {
        if self.algebra.is_compact() {
            self.compact_theta.unwrap_or(DEFAULT_THETA)
        } else {
            self.nu.unwrap_or(DEFAULT_NU)
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.samples < 1 {
            return Err("samples must be at least 1".into());
        }
        if !(self.domain_radius > 0.0 && self.domain_radius < 0.5) {
            return Err(format!("domain radius {} outside (0, 0.5)", self.domain_radius));
        }
        if !(1e-8..=1e-3).contains(&self.fd_step) {
            return Err(format!("fd step {:e} outside [1e-8, 1e-3]", self.fd_step));
        }
        if self.algebra.is_compact() {
            if self.nu.is_some() {
                return Err(format!(
                    "{} is compact: give --compact-theta instead of --nu",
                    self.algebra
                ));
            }
            match self.compact_theta {
                None => return Err(format!("{} requires --compact-theta", self.algebra)),
                Some(t) if !(t.is_finite() && t != 0.0) => return Err(format!("theta {t} must be finite and nonzero")),
                _ => {}
            }
        } else {
            if self.compact_theta.is_some() {
                return Err(format!("--compact-theta needs a compact algebra, got {}", self.algebra));
            }
            match self.nu {
                Some(v) if !(v.is_finite() && v != 0.0) => return Err(format!("nu {v} must be finite and nonzero")),
                _ => {}
            }
        }
        for (k, v) in &self.tolerances {
            if !(v.is_finite() && *v >= 0.0) {
                return Err(format!("tolerance {k}={v} must be a non-negative number"));
            }
        }
        Ok(())
    }
}
