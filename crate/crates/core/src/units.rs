//! Atomic units (m = ħ = e = 1) and the conversions used at the user-facing edge.

/// Speed of light in atomic units (inverse fine-structure constant).
pub const C: f64 = 137.0359991;

/// Electron rest energy `c²` in atomic units.
pub const C2: f64 = C * C;

/// Compton wavelength `1/c` in atomic units.
pub const LAMBDA_C: f64 = 1.0 / C;

/// Bundle of the three constants every other module needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub c: f64,
    pub lambda_c: f64,
    pub c2: f64,
}

impl PhysicalConstants {
    pub const ATOMIC: PhysicalConstants = PhysicalConstants {
        c: C,
        lambda_c: LAMBDA_C,
        c2: C2,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::ATOMIC
    }
}

/// Units a quantity may be written in at the configuration and CSV boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Unit {
    /// Multiples of `c²` (energies and angular frequencies).
    RestEnergy,
    /// Multiples of the Compton wavelength.
    Compton,
    /// Plain atomic units.
    Atomic,
}

impl Unit {
    pub fn scale(self) -> f64 {
        match self {
            Unit::RestEnergy => C2,
            Unit::Compton => LAMBDA_C,
            Unit::Atomic => 1.0,
        }
    }

    pub fn suffix(self) -> &'static str {
        match self {
            Unit::RestEnergy => "c2",
            Unit::Compton => "lambdaC",
            Unit::Atomic => "au",
        }
    }

    pub fn from_suffix(s: &str) -> Option<Unit> {
        match s {
            "c2" | "c^2" => Some(Unit::RestEnergy),
            "lambdaC" | "lambda_C" | "lc" => Some(Unit::Compton),
            "au" | "a.u." => Some(Unit::Atomic),
            _ => None,
        }
    }
}
