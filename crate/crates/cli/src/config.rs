//! Run configuration: validated parameter set serialized verbatim into every
//! output together with its hash, so emitted artifacts are reproducible.

use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub theta: f64,
    pub grid: usize,
    pub window: f64,
    pub gl_order: usize,
    pub seed: u64,
    pub mass: f64,
    pub spin: f64,
    pub alpha: f64,
    /// Worker cap; a resource setting, not part of the numerical contract,
    /// so it stays out of the serialized provenance.
    #[serde(skip)]
    pub threads: usize,
}

#[derive(Debug)]
pub enum ConfigError {
    BadTheta(f64),
    BadAlpha(f64),
    BadGrid(usize),
    BadMassSpin { mass: f64, spin: f64 },
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::BadTheta(t) => write!(f, "theta must be nonzero, got {t}"),
            ConfigError::BadAlpha(a) => write!(f, "alpha must satisfy |alpha| < 1, got {a}"),
            ConfigError::BadGrid(n) => write!(f, "grid must be at least 8, got {n}"),
            ConfigError::BadMassSpin { mass, spin } => {
                write!(f, "generic quotient needs mass > |spin|, got M={mass}, J={spin}")
            }
        }
    }
}

impl std::error::Error for ConfigError {}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.theta == 0.0 || !self.theta.is_finite() {
            return Err(ConfigError::BadTheta(self.theta));
        }
        if !(self.alpha.abs() < 1.0) {
            return Err(ConfigError::BadAlpha(self.alpha));
        }
        if self.grid < 8 {
            return Err(ConfigError::BadGrid(self.grid));
        }
        if self.mass <= self.spin.abs() {
            return Err(ConfigError::BadMassSpin {
                mass: self.mass,
                spin: self.spin,
            });
        }
        Ok(())
    }

    /// FNV-1a hash of the canonical serialization.
    pub fn hash(&self) -> String {
        let body = serde_json::to_string(self).expect("config serializes");
        let mut h: u64 = 0xcbf29ce484222325;
        for b in body.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        format!("{h:016x}")
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            theta: 0.3,
            grid: 24,
            window: 2.0,
            gl_order: 6,
            seed: 20260808,
            mass: 1.0,
            spin: 0.0,
            alpha: 0.0,
            threads: crate::pool::default_threads(),
        }
    }
}

/// Tolerance table embedded in every emitted artifact.
#[derive(Clone, Debug, Serialize)]
pub struct ToleranceTable {
    pub group_law: f64,
    pub decomp_roundtrip: f64,
    pub metric_rel: f64,
    pub bfield_residual: f64,
    pub torus_exact: f64,
    pub star_trace_rel: f64,
    pub star_assoc_rel: f64,
    pub kernel_left_inv: f64,
    pub udf_covariance: f64,
    pub udf_z_invariance: f64,
    pub derivation_defect: f64,
    pub dirac_defect: f64,
}

impl ToleranceTable {
    pub fn pinned() -> Self {
        use adsdeform_core::tol;
        ToleranceTable {
            group_law: tol::GROUP_LAW,
            decomp_roundtrip: tol::DECOMP_ROUNDTRIP,
            metric_rel: tol::METRIC_REL,
            bfield_residual: tol::BFIELD_RESIDUAL,
            torus_exact: tol::TORUS_EXACT,
            star_trace_rel: tol::STAR_TRACE_REL,
            star_assoc_rel: tol::STAR_ASSOC_REL,
            kernel_left_inv: tol::KERNEL_LEFT_INV,
            udf_covariance: tol::UDF_COVARIANCE,
            udf_z_invariance: tol::UDF_Z_INVARIANCE,
            derivation_defect: tol::DERIVATION_DEFECT,
            dirac_defect: tol::DIRAC_DEFECT,
        }
    }
}
