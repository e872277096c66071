//! Cross-checks of the solvers against brute-force enumeration on small
//! instances.

use std::fs;
use std::path::Path;

use robord_core::degree::min_degree;
use robord_core::model::{all_alternatives, subsets_up_to};
use robord_core::oracle::{self, fixtures, EnumerationBudget, Simplicity};
use robord_core::{lex_signature_with, LexOptions, Model, PreferenceSet, RobustContext, Subset};
use serde::{Deserialize, Serialize};

use crate::error::{io_err, CliError, Result};

/// A verification instance in JSON: alternatives as bit strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub name: String,
    pub n: usize,
    pub pairs: Vec<(String, String)>,
}

pub const BUILTINS: [&str; 3] = ["example1", "example2", "contradictory"];

fn from_set(name: &str, r: &PreferenceSet) -> Instance {
    Instance {
        name: name.to_string(),
        n: r.n(),
        pairs: r
            .pairs()
            .iter()
            .map(|&(a, b)| (a.to_bitstring(r.n()), b.to_bitstring(r.n())))
            .collect(),
    }
}

/// A built-in instance by name, or else a JSON instance file.
pub fn load_instance(spec: &str) -> Result<Instance> {
    match spec {
        "example1" => Ok(from_set(spec, &fixtures::example_closure())),
        "example2" => Ok(from_set(spec, &fixtures::singleton_chain())),
        "contradictory" => Ok(Instance {
            name: spec.to_string(),
            n: 3,
            pairs: vec![
                ("100".into(), "010".into()),
                ("010".into(), "001".into()),
                ("001".into(), "100".into()),
            ],
        }),
        path => {
            let text = fs::read_to_string(Path::new(path)).map_err(io_err(path))?;
            Ok(serde_json::from_str(&text)?)
        }
    }
}

impl Instance {
    pub fn preferences(&self) -> Result<PreferenceSet> {
        let alt = |s: &str| {
            Subset::parse_bitstring(s)
                .filter(|_| s.len() == self.n)
                .ok_or_else(|| CliError::Config(format!("`{s}` is not a bit string of length {}", self.n)))
        };
        let pairs = self
            .pairs
            .iter()
            .map(|(a, b)| Ok((alt(a)?, alt(b)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(PreferenceSet::new(self.n, pairs)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub instance: String,
    pub n: usize,
    pub r_size: usize,
    /// Number of models representing the preferences.
    pub models: usize,
    /// Inclusion-minimal models; every model contains one of them.
    pub minimal_models: Vec<Model>,
    pub signature: Option<(usize, usize, usize)>,
    pub witness: Option<Model>,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn check(name: &str, pass: bool, detail: impl Into<String>) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        pass,
        detail: detail.into(),
    }
}

pub fn verify(instance: &Instance, opts: &LexOptions, budget: &EnumerationBudget) -> Result<VerifyReport> {
    let r = instance.preferences()?;
    let n = r.n();
    let models = oracle::enumerate_theta_r(&r, budget)?;
    let minimal: Vec<Model> = models
        .iter()
        .filter(|m| !models.iter().any(|o| o != *m && o.is_subset_of(m)))
        .cloned()
        .collect();
    let pool = subsets_up_to(n, n);
    let mut checks = Vec::new();

    // The models are exactly the supersets of the minimal ones.
    let upward = pool.len() < 63
        && (0u64..1 << pool.len())
            .filter(|mask| {
                let m = Model::new((0..pool.len()).filter(|k| mask >> k & 1 == 1).map(|k| pool[k]))
                    .expect("non-empty subsets");
                minimal.iter().any(|min| min.is_subset_of(&m))
            })
            .count()
            == models.len();
    checks.push(check(
        "models are the supersets of the minimal models",
        upward,
        format!("{} models, {} minimal", models.len(), minimal.len()),
    ));

    let sig = match lex_signature_with(&r, opts) {
        Ok(sig) => Some(sig),
        Err(robord_core::Error::InconsistentPreferences) => None,
        Err(e) => return Err(e.into()),
    };
    match &sig {
        None => {
            checks.push(check(
                "no signature exactly when no model exists",
                models.is_empty(),
                "preferences are inconsistent",
            ));
        }
        Some(sig) => {
            let simplest = oracle::enumerate_simplest(&r, Simplicity::Lex, budget)?;
            let agree = simplest.iter().all(|m| m.key() == sig.triple()) && simplest.contains(&sig.witness);
            checks.push(check(
                "signature matches the enumerated simplest models",
                agree,
                format!("signature {:?}, {} simplest models", sig.triple(), simplest.len()),
            ));
            let deg = min_degree(&r)?;
            let deg_lp = oracle::min_degree_lp(&r)?;
            checks.push(check(
                "degree matches the explicit LP",
                deg == deg_lp,
                format!("{deg} vs {deg_lp}"),
            ));
            let ctx = RobustContext::new(&r, sig, opts);
            let mut mismatches = Vec::new();
            let mut total = 0;
            for a in all_alternatives(n) {
                for b in all_alternatives(n) {
                    total += 1;
                    let fast = ctx.query(a, b)?.dominates;
                    let slow = oracle::dominated_by_all(&r, &simplest, a, b)?;
                    if fast != slow {
                        mismatches.push(format!("{a} vs {b}"));
                    }
                }
            }
            checks.push(check(
                "robust dominance matches enumeration",
                mismatches.is_empty(),
                if mismatches.is_empty() {
                    format!("{total} ordered pairs")
                } else {
                    mismatches.join("; ")
                },
            ));
        }
    }
    Ok(VerifyReport {
        instance: instance.name.clone(),
        n,
        r_size: r.len(),
        models: models.len(),
        minimal_models: minimal,
        signature: sig.as_ref().map(|s| s.triple()),
        witness: sig.map(|s| s.witness),
        checks,
    })
}
