//! Seeded equivalence sweeps: every instance is pushed through the flow
//! decision, the brute-force oracle, and (within guards) the
//! subset-condition criteria, and any disagreement is reported with its
//! reproducer seed.
//!
//! One sweep is embarrassingly parallel across seeds. With the
//! `parallel` feature (default) the work runs on a rayon pool; the
//! sequential path is kept for the feature-less build and for
//! benchmarking one against the other. Output order is by seed either
//! way, so logs are byte-identical across modes and runs.

use sha2::{Digest, Sha256};

use crate::complete::{complete, reverify_certificate, CompleteOutcome};
use crate::conditions::{hall_conditions, ryser_theorem_check, ConditionError};
use crate::guards::Guards;
use crate::model::Rectangle;
use crate::oracle::{
    brute_force_complete, random_instance, GenMode, InstanceParams, OracleError, RNG_ALGORITHM,
};

#[derive(Debug, Clone)]
pub struct AuditConfig {
    /// Seeds swept: `seed_start..seed_end`.
    pub seed_start: u64,
    pub seed_end: u64,
    pub params: InstanceParams,
    /// Evaluate the subset-condition criteria where guards allow.
    pub check_conditions: bool,
    pub parallel: bool,
}

impl AuditConfig {
    pub fn new(seed_start: u64, seed_end: u64, max_n: usize, mode: GenMode) -> Self {
        AuditConfig {
            seed_start,
            seed_end,
            params: InstanceParams::new((2, max_n.max(2)), (2, usize::MAX), mode),
            check_conditions: true,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriVerdict {
    Feasible,
    Infeasible,
    Skipped,
}

impl TriVerdict {
    fn of(feasible: bool) -> Self {
        if feasible {
            TriVerdict::Feasible
        } else {
            TriVerdict::Infeasible
        }
    }

    fn word(self) -> &'static str {
        match self {
            TriVerdict::Feasible => "feasible",
            TriVerdict::Infeasible => "infeasible",
            TriVerdict::Skipped => "skipped",
        }
    }
}

#[derive(Debug, Clone)]
pub struct AuditLine {
    pub seed: u64,
    pub digest: String,
    pub flow: TriVerdict,
    pub oracle: TriVerdict,
    pub conditions: TriVerdict,
    /// Replay result of the infeasibility certificate, when one exists.
    pub certificate_ok: Option<bool>,
    pub agree: bool,
}

impl AuditLine {
    pub fn render(&self) -> String {
        let cert = match self.certificate_ok {
            None => "-",
            Some(true) => "ok",
            Some(false) => "bad",
        };
        format!(
            "seed={} digest={} flow={} oracle={} conditions={} cert={} agree={}",
            self.seed,
            self.digest,
            self.flow.word(),
            self.oracle.word(),
            self.conditions.word(),
            cert,
            if self.agree { "yes" } else { "no" }
        )
    }
}

#[derive(Debug, Clone)]
pub struct AuditReport {
    pub lines: Vec<AuditLine>,
    pub disagreements: Vec<u64>,
}

impl AuditReport {
    pub fn all_agree(&self) -> bool {
        self.disagreements.is_empty()
    }

    /// Full log: a header naming the generator, then one line per seed.
    pub fn render_log(&self, config: &AuditConfig) -> String {
        let mode = match config.params.mode {
            GenMode::Completable => "completable",
            GenMode::Arbitrary => "arbitrary",
        };
        let mut out = format!(
            "# audit v1 rng={RNG_ALGORITHM}\n# seeds={}..{} n={}..{} mode={mode} conditions={}\n",
            config.seed_start,
            config.seed_end,
            config.params.n.0,
            config.params.n.1,
            if config.check_conditions { "yes" } else { "no" }
        );
        for line in &self.lines {
            out.push_str(&line.render());
            out.push('\n');
        }
        out
    }
}

/// Canonical digest of an instance, stable across runs.
pub fn instance_digest(rect: &Rectangle) -> String {
    let p = rect.profile();
    let rho: Vec<String> = p.rho().iter().map(|v| v.to_string()).collect();
    let grid: Vec<String> = rect
        .grid()
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect();
    let canonical = format!(
        "n={};k={};rho={};r={};s={};grid={}",
        p.n(),
        p.k(),
        rho.join(","),
        rect.r(),
        rect.s(),
        grid.join("|")
    );
    let hash = Sha256::digest(canonical.as_bytes());
    hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Audits one seed: generate, decide three ways, replay certificates.
pub fn audit_seed(
    seed: u64,
    params: &InstanceParams,
    guards: &Guards,
    check_conditions: bool,
) -> AuditLine {
    let inst = random_instance(params, seed).expect("audit parameter ranges are valid");
    let digest = instance_digest(&inst);
    let outcome = complete(&inst);
    let flow = TriVerdict::of(outcome.is_feasible());
    let certificate_ok = match &outcome {
        CompleteOutcome::Square(_) => None,
        CompleteOutcome::Infeasible(cert) => Some(reverify_certificate(&inst, cert)),
    };
    let oracle = match brute_force_complete(&inst, guards) {
        Ok(found) => TriVerdict::of(found.is_some()),
        Err(OracleError::TooLarge { .. }) => TriVerdict::Skipped,
        Err(e) => panic!("oracle rejected a generated instance: {e}"),
    };
    let conditions = if !check_conditions {
        TriVerdict::Skipped
    } else {
        match ryser_theorem_check(&inst, guards) {
            Ok(report) => TriVerdict::of(report.completable),
            Err(ConditionError::TooLarge { .. }) => {
                if inst.s() == inst.profile().n() {
                    match hall_conditions(&inst, guards) {
                        Ok(report) => TriVerdict::of(report.verdict()),
                        Err(_) => TriVerdict::Skipped,
                    }
                } else {
                    TriVerdict::Skipped
                }
            }
            Err(e) => panic!("condition audit failed unexpectedly: {e}"),
        }
    };
    let mut agree = certificate_ok != Some(false);
    for v in [oracle, conditions] {
        if v != TriVerdict::Skipped && v != flow {
            agree = false;
        }
    }
    AuditLine {
        seed,
        digest,
        flow,
        oracle,
        conditions,
        certificate_ok,
        agree,
    }
}

#[cfg(feature = "parallel")]
fn sweep_lines(config: &AuditConfig, guards: &Guards) -> Vec<AuditLine> {
    use rayon::prelude::*;
    if config.parallel {
        (config.seed_start..config.seed_end)
            .into_par_iter()
            .map(|seed| audit_seed(seed, &config.params, guards, config.check_conditions))
            .collect()
    } else {
        (config.seed_start..config.seed_end)
            .map(|seed| audit_seed(seed, &config.params, guards, config.check_conditions))
            .collect()
    }
}

#[cfg(not(feature = "parallel"))]
fn sweep_lines(config: &AuditConfig, guards: &Guards) -> Vec<AuditLine> {
    (config.seed_start..config.seed_end)
        .map(|seed| audit_seed(seed, &config.params, guards, config.check_conditions))
        .collect()
}

/// Runs the sweep and collects disagreeing seeds.
pub fn run_audit(config: &AuditConfig, guards: &Guards) -> AuditReport {
    let lines = sweep_lines(config, guards);
    let disagreements = lines
        .iter()
        .filter(|line| !line.agree)
        .map(|line| line.seed)
        .collect();
    AuditReport {
        lines,
        disagreements,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RhoProfile;

    #[test]
    fn digest_is_stable_and_input_sensitive() {
        let p = RhoProfile::new(2, 2, vec![2, 2]).unwrap();
        let a = Rectangle::new(vec![vec![1]], p.clone()).unwrap();
        let b = Rectangle::new(vec![vec![2]], p).unwrap();
        assert_eq!(instance_digest(&a), instance_digest(&a));
        assert_ne!(instance_digest(&a), instance_digest(&b));
        assert_eq!(instance_digest(&a).len(), 16);
    }

    #[test]
    fn small_sweep_agrees() {
        let config = AuditConfig::new(0, 60, 4, GenMode::Arbitrary);
        let report = run_audit(&config, &Guards::default());
        assert_eq!(report.lines.len(), 60);
        assert!(
            report.all_agree(),
            "disagreements at {:?}",
            report.disagreements
        );
        // Seeds come back in order regardless of execution mode.
        for (idx, line) in report.lines.iter().enumerate() {
            assert_eq!(line.seed, idx as u64);
        }
    }

    #[test]
    fn sequential_and_parallel_logs_match() {
        let mut config = AuditConfig::new(5, 45, 4, GenMode::Arbitrary);
        let guards = Guards::default();
        config.parallel = false;
        let seq = run_audit(&config, &guards).render_log(&config);
        config.parallel = true;
        let par = run_audit(&config, &guards).render_log(&config);
        assert_eq!(seq, par);
    }

    #[test]
    fn log_format_is_line_oriented() {
        let config = AuditConfig::new(0, 3, 3, GenMode::Completable);
        let report = run_audit(&config, &Guards::default());
        let log = report.render_log(&config);
        let lines: Vec<&str> = log.lines().collect();
        assert!(lines[0].starts_with("# audit v1 rng=chacha8"));
        assert!(lines[1].starts_with("# seeds=0..3"));
        for line in &lines[2..] {
            assert!(line.starts_with("seed="), "bad line {line}");
            assert!(line.contains(" digest="));
            assert!(line.contains(" flow="));
            assert!(line.contains(" agree="));
        }
    }
}
