//! Registered invariant checks and the certificate a run produces.
//!
//! Every check owns one documented invariant, is registered under a stable id
//! of the form `module.name`, and scales its ranges with the run depth. A run
//! never aborts: errors and panics inside a check become `error` records.

mod constructors;
mod frames;
mod ideals;
mod levelgraphs;
mod words;

use std::collections::BTreeMap;
use std::error::Error;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::constructors::oracles::DEFAULT_ORACLE_BOUND;

pub type CheckError = Box<dyn Error + Send + Sync>;

/// Modules a run can be restricted to.
pub const MODULES: [&str; 5] = ["words", "levelgraphs", "frames", "ideals", "constructors"];

/// Scale and randomness shared by every check in a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub depth: u32,
    pub seed: u64,
    pub oracle_bound: u64,
}

impl RunConfig {
    pub fn new(depth: u32, seed: u64) -> Self {
        RunConfig {
            depth,
            seed,
            oracle_bound: DEFAULT_ORACLE_BOUND,
        }
    }

    /// The generator for one check: the run seed picks the key and the check
    /// id picks the stream, so results do not depend on which checks run.
    pub fn rng(&self, id: &str) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(fnv1a(id));
        rng
    }
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

/// What a check found.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub details: Value,
}

impl Outcome {
    pub fn pass(details: Value) -> Self {
        Outcome {
            passed: true,
            details,
        }
    }

    /// Passes iff no counterexample was recorded.
    pub fn from_failures(checked: u64, failures: Vec<String>) -> Self {
        let shown: Vec<&String> = failures.iter().take(5).collect();
        Outcome {
            passed: failures.is_empty(),
            details: json!({
                "checked": checked,
                "failures": failures.len(),
                "examples": shown,
            }),
        }
    }
}

pub trait Check: Send + Sync {
    fn id(&self) -> &'static str;

    /// The invariant this check establishes, in one line.
    fn invariant(&self) -> &'static str;

    /// Ranges and sample sizes used at this configuration.
    fn params(&self, cfg: &RunConfig) -> Value;

    fn run(&self, cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Outcome, CheckError>;

    fn module(&self) -> &'static str {
        self.id().split('.').next().unwrap_or_default()
    }
}

type ParamsFn = fn(&RunConfig) -> Value;
type RunFn = fn(&RunConfig, &mut ChaCha8Rng) -> Result<Outcome, CheckError>;

/// A check given by plain functions.
pub(crate) struct FnCheck {
    pub id: &'static str,
    pub invariant: &'static str,
    pub params: ParamsFn,
    pub run: RunFn,
}

impl FnCheck {
    pub(crate) fn boxed(
        id: &'static str,
        invariant: &'static str,
        params: ParamsFn,
        run: RunFn,
    ) -> Arc<dyn Check> {
        Arc::new(FnCheck {
            id,
            invariant,
            params,
            run,
        })
    }
}

impl Check for FnCheck {
    fn id(&self) -> &'static str {
        self.id
    }

    fn invariant(&self) -> &'static str {
        self.invariant
    }

    fn params(&self, cfg: &RunConfig) -> Value {
        (self.params)(cfg)
    }

    fn run(&self, cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Outcome, CheckError> {
        (self.run)(cfg, rng)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    pub invariant: String,
    pub params: Value,
    pub status: Status,
    pub details: Value,
    pub duration_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateParams {
    pub scope: String,
    pub depth: u32,
    pub seed: u64,
    pub oracle_bound: u64,
    pub rng: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub tool: String,
    pub version: String,
    pub params: CertificateParams,
    pub status: Status,
    pub checks: Vec<CheckRecord>,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }

    /// The same certificate with every duration zeroed, for comparing runs.
    pub fn without_timing(&self) -> Certificate {
        let mut c = self.clone();
        for r in &mut c.checks {
            r.duration_ms = 0.0;
        }
        c
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RunError {
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("unknown scope {0:?}; expected all, a check id, or one of {MODULES:?}")]
    UnknownScope(String),
    #[error("unknown check id {0:?}")]
    UnknownCheck(String),
}

#[derive(Clone, Default)]
pub struct CheckRegistry {
    checks: BTreeMap<&'static str, Arc<dyn Check>>,
}

impl CheckRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn standard() -> Self {
        let mut r = Self::empty();
        for c in words::checks()
            .into_iter()
            .chain(levelgraphs::checks())
            .chain(frames::checks())
            .chain(ideals::checks())
            .chain(constructors::checks())
        {
            r.register(c);
        }
        r
    }

    /// Adds a check, replacing any with the same id.
    pub fn register(&mut self, check: Arc<dyn Check>) {
        self.checks.insert(check.id(), check);
    }

    pub fn get(&self, id: &str) -> Result<&Arc<dyn Check>, RunError> {
        self.checks
            .get(id)
            .ok_or_else(|| RunError::UnknownCheck(id.to_string()))
    }

    pub fn ids(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.checks.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.checks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.checks.is_empty()
    }

    /// Ids of the checks in `scope`, sorted.
    pub fn select(&self, scope: &str) -> Result<Vec<&'static str>, RunError> {
        if let Some(c) = self.checks.get(scope) {
            return Ok(vec![c.id()]);
        }
        if scope != "all" && !MODULES.contains(&scope) {
            return Err(RunError::UnknownScope(scope.to_string()));
        }
        Ok(self
            .checks
            .values()
            .filter(|c| scope == "all" || c.module() == scope)
            .map(|c| c.id())
            .collect())
    }

    /// Runs one check, capturing errors and panics.
    pub fn run_one(&self, id: &str, cfg: &RunConfig) -> Result<CheckRecord, RunError> {
        let check = self.get(id)?;
        let mut rng = cfg.rng(id);
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(|| check.run(cfg, &mut rng)));
        let duration_ms = start.elapsed().as_micros() as f64 / 1e3;
        let (status, details) = match result {
            Ok(Ok(o)) if o.passed => (Status::Pass, o.details),
            Ok(Ok(o)) => (Status::Fail, o.details),
            Ok(Err(e)) => (Status::Error, json!({ "error": e.to_string() })),
            Err(panic) => {
                let msg = panic
                    .downcast_ref::<&str>()
                    .map(|s| s.to_string())
                    .or_else(|| panic.downcast_ref::<String>().cloned())
                    .unwrap_or_else(|| "panic".into());
                (Status::Error, json!({ "panic": msg }))
            }
        };
        Ok(CheckRecord {
            id: id.to_string(),
            invariant: check.invariant().to_string(),
            params: check.params(cfg),
            status,
            details,
            duration_ms,
        })
    }

    /// Runs every check in `scope` in id order.
    pub fn run(&self, scope: &str, cfg: &RunConfig) -> Result<Certificate, RunError> {
        self.run_with(scope, cfg, |_| {})
    }

    /// As [`CheckRegistry::run`], calling `progress` after each check.
    pub fn run_with(
        &self,
        scope: &str,
        cfg: &RunConfig,
        mut progress: impl FnMut(&CheckRecord),
    ) -> Result<Certificate, RunError> {
        if cfg.depth == 0 {
            return Err(RunError::ZeroDepth);
        }
        let mut checks = Vec::new();
        for id in self.select(scope)? {
            let record = self.run_one(id, cfg)?;
            progress(&record);
            checks.push(record);
        }
        let status = if checks.iter().all(|r| r.status == Status::Pass) {
            Status::Pass
        } else {
            Status::Fail
        };
        Ok(Certificate {
            tool: "levelcert".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            params: CertificateParams {
                scope: scope.to_string(),
                depth: cfg.depth,
                seed: cfg.seed,
                oracle_bound: cfg.oracle_bound,
                rng: "chacha8, stream per check id".into(),
            },
            status,
            checks,
        })
    }
}
