//! Numerical thresholds shared across the crate.
//!
//! The constants are the defaults; [`Tolerances`] bundles the ones a caller
//! may want to override (the CLI reads them from the environment).

/// Largest register the dense simulator will allocate.
pub const N_MAX: usize = 16;

/// Norm tolerance for states, gates and probability sums.
pub const EPS_NORM: f64 = 1e-12;

/// Branches with probability at or below this are dropped during enumeration.
pub const EPS_PRUNE: f64 = 1e-12;

/// Stabilizer expectations must sit within this of +1.
pub const EPS_VERIFY: f64 = 1e-10;

/// Fermion-vs-qubit encoder agreement threshold.
pub const EPS_FERMION: f64 = 1e-10;

pub const ENV_TOL_NORM: &str = "FERMICLUSTER_TOL_NORM";
pub const ENV_TOL_VERIFY: &str = "FERMICLUSTER_TOL_VERIFY";
pub const ENV_TOL_FERMION: &str = "FERMICLUSTER_TOL_FERMION";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub norm: f64,
    pub verify: f64,
    pub fermion: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            norm: EPS_NORM,
            verify: EPS_VERIFY,
            fermion: EPS_FERMION,
        }
    }
}

impl Tolerances {
    /// Defaults overridden by any of the `FERMICLUSTER_TOL_*` variables that
    /// parse as positive finite floats. Returns the offending variable name
    /// when one is set but unparsable.
    pub fn from_env() -> Result<Self, String> {
        let mut tol = Self::default();
        for (var, slot) in [
            (ENV_TOL_NORM, &mut tol.norm),
            (ENV_TOL_VERIFY, &mut tol.verify),
            (ENV_TOL_FERMION, &mut tol.fermion),
        ] {
            if let Ok(raw) = std::env::var(var) {
                match raw.trim().parse::<f64>() {
                    Ok(v) if v.is_finite() && v > 0.0 => *slot = v,
                    _ => return Err(format!("{var}={raw:?} is not a positive number")),
                }
            }
        }
        Ok(tol)
    }
}
