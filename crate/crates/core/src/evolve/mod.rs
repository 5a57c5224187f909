//! The policy-evolution loop: an island database of score programs, parent
//! and inspiration sampling, LLM-backed program rewriting, the 125% fast
//! filter, parameter tuning, and full-set evaluation — run for a fixed
//! number of iterations with crash-safe resume.
//!
//! Every iteration is seeded independently from (run seed, iteration index),
//! so a resumed run replays exactly the iterations an uninterrupted run would
//! have produced: with a scripted LLM the final database bytes are a pure
//! function of (config, seed, fixtures).

pub mod db;
pub mod events;
pub mod llm;
pub mod prompt;
pub mod sampling;

pub use db::{island_of, DbError, IslandDatabase, ProgramRecord};
pub use events::{Event, EventKind, EventLog, HistoryLog, HistoryRow, HISTORY_CSV_HEADER};
pub use llm::{parse_llm_response, LlmClient, LlmClientConfig, LlmError, LlmVariant, RejectReason};
pub use prompt::{build_prompt, PromptBundle};
pub use sampling::{diversity_score, sample_inspirations, sample_parent, sample_parent_traced, ParentDraw};

use crate::dsl::{ScoreProgram, GRAMMAR_DOC};
use crate::features::feature_docs_table;
use crate::metrics::shifted_geomean;
use crate::milp::MilpInstance;
use crate::rng::derive_seed;
use crate::tune::{
    baseline_node_counts, evaluate_cost, evaluate_cost_detailed, fast_filter, optimize_params,
    CostMetric, FilterVerdict, OptBudget,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::path::PathBuf;

/// Everything a discovery run needs besides the instances themselves.
#[derive(Debug, Clone)]
pub struct EvolutionConfig {
    /// Iteration limit T.
    pub iterations: u64,
    pub exploration_prob: f64,
    pub exploitation_prob: f64,
    /// Inspiration count k per prompt (⌈k/2⌉ top performers, ⌊k/2⌋ diverse).
    pub inspirations_k: usize,
    pub island_count: u32,
    pub metric: CostMetric,
    /// Per-candidate parameter-tuning budget; its `rng_seed` is overridden
    /// per iteration.
    pub tune_budget: OptBudget,
    pub llm: LlmClientConfig,
    pub seed: u64,
    pub db_path: PathBuf,
    pub event_log_path: PathBuf,
    pub history_path: PathBuf,
}

impl EvolutionConfig {
    /// Defaults for everything but the artifact paths and LLM settings.
    pub fn new(db_path: PathBuf, event_log_path: PathBuf, history_path: PathBuf) -> Self {
        Self {
            iterations: 200,
            exploration_prob: 0.7,
            exploitation_prob: 0.3,
            inspirations_k: 4,
            island_count: 4,
            metric: CostMetric::default(),
            tune_budget: OptBudget::default(),
            llm: LlmClientConfig::default(),
            seed: 0,
            db_path,
            event_log_path,
            history_path,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EvolveError {
    #[error("evolution config: {0}")]
    Config(String),
    #[error(transparent)]
    Db(#[from] DbError),
    #[error("artifact io: {0}")]
    Io(#[from] std::io::Error),
    #[error("llm client: {0}")]
    Llm(#[from] LlmError),
    #[error("fast-filter baseline: {0}")]
    Baseline(String),
    #[error("initial program evaluation failed: {0}")]
    InitialEvaluation(String),
}

/// The seed program stored as record 0: one parameter scaling one feature —
/// deliberately weak, so discovered programs have room to win.
pub fn initial_program() -> ScoreProgram {
    let text = "spl/1\nused_features: [9]\nparams: [0.5]\nbounds: [[0, 1]]\nscore:\nreturn param(0) * feature(9)\n";
    ScoreProgram::parse(text).expect("initial program is valid").0
}

/// Runs (or resumes) the discovery loop and returns the lowest-cost record.
///
/// `instances` is the full evaluation set D; `subset_indices` selects the
/// cheap screening subset D_sub ⊆ D used by the fast filter and parameter
/// tuning. Artifacts (database, event log, history CSV) land at the paths in
/// `config`; if they already hold a partial run with the same config, the
/// loop continues after the last fully committed iteration.
pub fn evolve_loop(
    config: &EvolutionConfig,
    instances: &[MilpInstance],
    subset_indices: &[usize],
) -> Result<ProgramRecord, EvolveError> {
    let check = |ok: bool, msg: &str| -> Result<(), EvolveError> {
        ok.then_some(()).ok_or_else(|| EvolveError::Config(msg.into()))
    };
    check(!instances.is_empty(), "instance set is empty")?;
    check(!subset_indices.is_empty(), "subset is empty")?;
    check(
        subset_indices.iter().all(|&i| i < instances.len()),
        "subset index out of range",
    )?;
    check(
        (config.exploration_prob + config.exploitation_prob - 1.0).abs() < 1e-12,
        "exploration and exploitation probabilities must sum to 1",
    )?;
    let subset: Vec<MilpInstance> =
        subset_indices.iter().map(|&i| instances[i].clone()).collect();

    let mut database = IslandDatabase::open(&config.db_path, config.island_count)?;
    let mut history = HistoryLog::open(&config.history_path)?;
    let mut event_log = EventLog::open(&config.event_log_path)?;
    let mut client = LlmClient::new(config.llm.clone())?;

    // Seed record: the initial program evaluated on the full set, with the
    // subset cost recomputed from the same solves.
    if database.is_empty() {
        let program = initial_program();
        let detail = evaluate_cost_detailed(
            &program,
            &program.initial_params,
            instances,
            config.metric,
            config.tune_budget.limits,
        );
        if !detail.cost.is_finite() {
            return Err(EvolveError::InitialEvaluation(
                "cost is not finite on the full instance set".into(),
            ));
        }
        let subset_measures: Vec<f64> = subset_indices
            .iter()
            .map(|&i| detail.per_instance[i].measure)
            .collect();
        let subset_cost = shifted_geomean(&subset_measures, config.metric.shift);
        let theta = program.initial_params.clone();
        database.insert(program, theta, detail.cost, subset_cost, None, 0)?;
    }

    // Resume: drop anything from iterations after the last committed history
    // row, then fast-forward the scripted cursor (one query per iteration).
    let resume_from = history.last_iteration();
    database.truncate_after_iteration(resume_from)?;
    event_log.truncate_after_iteration(resume_from)?;
    client.set_cursor(resume_from as usize);

    let feature_docs = feature_docs_table();
    let mut baseline: Option<Vec<u64>> = None;

    for iteration in (resume_from + 1)..=config.iterations {
        let iter_seed = derive_seed(config.seed, iteration);
        let mut rng = ChaCha8Rng::seed_from_u64(iter_seed);
        let parent =
            sample_parent(&database, &mut rng, config.exploration_prob).clone();
        let bundle = {
            let inspirations =
                sample_inspirations(&database, &parent, config.inspirations_k);
            build_prompt(&parent, &inspirations, &feature_docs, GRAMMAR_DOC)
        };

        let finish = |database: &IslandDatabase,
                      history: &mut HistoryLog,
                      event_log: &EventLog|
         -> Result<(), EvolveError> {
            let best = database.best().expect("database is seeded").cost;
            history.append(HistoryRow {
                iteration,
                best_cost: best,
                event_counts: event_log.counts_for(iteration),
            })?;
            Ok(())
        };

        let response = match client.query(&bundle.system, &bundle.user) {
            Ok(text) => text,
            Err(e) => {
                event_log.record(iteration, EventKind::LlmError, json!({"message": e.to_string()}))?;
                finish(&database, &mut history, &event_log)?;
                continue;
            }
        };
        event_log.record(
            iteration,
            EventKind::Generated,
            json!({"response_chars": response.chars().count()}),
        )?;

        let (candidate, warnings) = match parse_llm_response(&response) {
            Ok(parsed) => parsed,
            Err(reason) => {
                event_log.record(
                    iteration,
                    EventKind::ParseReject,
                    json!({"message": reason.to_string()}),
                )?;
                finish(&database, &mut history, &event_log)?;
                continue;
            }
        };

        let baseline = match &baseline {
            Some(b) => b,
            None => {
                let counts = baseline_node_counts(&subset, config.tune_budget.limits)
                    .map_err(EvolveError::Baseline)?;
                baseline.insert(counts)
            }
        };
        let verdict = fast_filter(
            &candidate,
            &candidate.initial_params,
            &subset,
            baseline,
            config.tune_budget.limits,
        );
        if let FilterVerdict::Fail { reason } = verdict {
            event_log.record(iteration, EventKind::FilterReject, json!({"reason": reason}))?;
            finish(&database, &mut history, &event_log)?;
            continue;
        }

        let budget = OptBudget {
            rng_seed: derive_seed(iter_seed, 0x7475_6e65),
            ..config.tune_budget
        };
        let tuned = optimize_params(
            &candidate,
            &candidate.initial_params,
            &candidate.bounds,
            &subset,
            config.metric,
            &budget,
        );
        event_log.record(
            iteration,
            EventKind::Tuned,
            json!({
                "theta": tuned.theta,
                "subset_cost": finite_or_string(tuned.cost),
                "trials": tuned.trials.len(),
                "parse_warnings": warnings,
            }),
        )?;

        let cost = evaluate_cost(
            &candidate,
            &tuned.theta,
            instances,
            config.metric,
            config.tune_budget.limits,
        );
        event_log.record(
            iteration,
            EventKind::Evaluated,
            json!({"cost": finite_or_string(cost)}),
        )?;

        if cost.is_finite() {
            // Stored text carries θ* so prompts and re-parses see the tuned
            // program.
            let mut stored = candidate;
            stored.initial_params = tuned.theta.clone();
            database.insert(
                stored,
                tuned.theta,
                cost,
                tuned.cost,
                Some(parent.id),
                iteration,
            )?;
        }
        finish(&database, &mut history, &event_log)?;
    }

    Ok(database.best().expect("database is seeded").clone())
}

/// JSON-safe float: bare number when finite, string otherwise (JSON has no
/// infinity literal).
fn finite_or_string(v: f64) -> serde_json::Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(v.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_set_cover;
    use std::fs;
    use tempfile::tempdir;

    /// A knapsack relaxation has at most one fractional variable at any node,
    /// so every policy branches identically — a subset instance on which the
    /// 125% filter can never fire.
    fn knapsack() -> MilpInstance {
        MilpInstance::from_dense(
            vec![-5.0, -4.0, -3.0, -3.0, -2.0],
            &[vec![4.0, 3.0, 2.0, 2.0, 1.0]],
            vec![6.5],
            vec![0.0; 5],
            vec![1.0; 5],
            vec![true; 5],
        )
        .unwrap()
    }

    fn desk_instances() -> Vec<MilpInstance> {
        let mut v = vec![knapsack()];
        for seed in [3, 4] {
            v.push(gen_set_cover(10, 20, 0.25, seed).unwrap());
        }
        v
    }

    fn fixture(dir: &std::path::Path, responses: &[&str]) -> PathBuf {
        let path = dir.join("responses.txt");
        fs::write(&path, responses.join("\n---RESPONSE---\n")).unwrap();
        path
    }

    fn config_for(dir: &std::path::Path, fixture_path: PathBuf, t: u64) -> EvolutionConfig {
        let mut c = EvolutionConfig::new(
            dir.join("db.jsonl"),
            dir.join("events.jsonl"),
            dir.join("history.csv"),
        );
        c.iterations = t;
        c.tune_budget = OptBudget { max_iterations: 4, ..OptBudget::default() };
        c.llm.variant = LlmVariant::Scripted(fixture_path);
        c.seed = 7;
        c
    }

    #[test]
    fn zero_iterations_returns_the_initial_record() {
        let dir = tempdir().unwrap();
        let fixture_path = fixture(dir.path(), &[]);
        let config = config_for(dir.path(), fixture_path, 0);
        let instances = vec![knapsack()];
        let best = evolve_loop(&config, &instances, &[0]).unwrap();
        assert_eq!(best.id, 0);
        assert_eq!(best.iteration, 0);
        assert_eq!(best.parent, None);
        assert_eq!(
            best.program.canonical_text(),
            initial_program().canonical_text()
        );
        // One DB line, no history rows beyond the header.
        let db_text = fs::read_to_string(&config.db_path).unwrap();
        assert_eq!(db_text.lines().count(), 1);
        let history = fs::read_to_string(&config.history_path).unwrap();
        assert_eq!(history.trim(), HISTORY_CSV_HEADER);
    }

    #[test]
    fn skips_bad_iterations_and_keeps_the_curve_nonincreasing() {
        let dir = tempdir().unwrap();
        // Iteration 1: prose (parse reject). 2: stored. 3: fixture exhausted.
        let fixture_path = fixture(dir.path(), &["no code here, sorry", GOOD_PROGRAM_FENCED]);
        let config = config_for(dir.path(), fixture_path, 3);
        let instances = desk_instances();
        let best = evolve_loop(&config, &instances, &[0]).unwrap();

        let db = IslandDatabase::open(&config.db_path, 4).unwrap();
        assert_eq!(db.len(), 2, "initial + one stored candidate");
        assert_eq!(db.records()[1].iteration, 2);
        assert_eq!(best.cost, db.best().unwrap().cost);

        let history = HistoryLog::open(&config.history_path).unwrap();
        // Count columns: generated, parse_reject, filter_reject, tuned,
        // evaluated, llm_error.
        let counts: Vec<[u64; 6]> =
            history.rows().iter().map(|r| r.event_counts).collect();
        assert_eq!(
            counts,
            vec![[1, 1, 0, 0, 0, 0], [1, 0, 0, 1, 1, 0], [0, 0, 0, 0, 0, 1]]
        );
        let costs: Vec<f64> = history.rows().iter().map(|r| r.best_cost).collect();
        assert!(costs.windows(2).all(|w| w[1] <= w[0]), "curve {costs:?}");

        let events = EventLog::open(&config.event_log_path).unwrap();
        let kinds: Vec<(u64, EventKind)> =
            events.events().iter().map(|e| (e.iteration, e.event)).collect();
        assert_eq!(
            kinds,
            vec![
                (1, EventKind::Generated),
                (1, EventKind::ParseReject),
                (2, EventKind::Generated),
                (2, EventKind::Tuned),
                (2, EventKind::Evaluated),
                (3, EventKind::LlmError),
            ]
        );
    }

    const GOOD_PROGRAM_FENCED: &str = "Here you go:\n```spl\nspl/1\nused_features: [9, 43]\nparams: [0.5]\nbounds: [[0, 1]]\nscore:\nreturn param(0) * feature(43) + 4 * feature(9) * (1 - feature(9))\n```";

    #[test]
    fn eval_error_candidates_fail_the_filter_before_tuning() {
        let dir = tempdir().unwrap();
        // Division by an identically-zero expression: parses, cannot evaluate.
        let broken = "```spl\nspl/1\nused_features: [9]\nparams: [0.5]\nbounds: [[0, 1]]\nscore:\nreturn param(0) / (feature(9) - feature(9))\n```";
        let fixture_path = fixture(dir.path(), &[broken]);
        let config = config_for(dir.path(), fixture_path, 1);
        let instances = desk_instances();
        evolve_loop(&config, &instances, &[0]).unwrap();

        let events = EventLog::open(&config.event_log_path).unwrap();
        let kinds: Vec<EventKind> = events.events().iter().map(|e| e.event).collect();
        assert_eq!(kinds, vec![EventKind::Generated, EventKind::FilterReject]);
        assert!(
            events.events()[1].payload["reason"]
                .as_str()
                .unwrap()
                .contains("eval_error@0"),
            "payload: {}",
            events.events()[1].payload
        );
        // Filter precedes tuning: no Tuned event anywhere.
        assert!(!kinds.contains(&EventKind::Tuned));
        let db = IslandDatabase::open(&config.db_path, 4).unwrap();
        assert_eq!(db.len(), 1, "only the seed record");
    }

    #[test]
    fn kill_and_resume_reproduces_an_uninterrupted_run() {
        let dir_a = tempdir().unwrap();
        let dir_b = tempdir().unwrap();
        let instances = desk_instances();
        let responses = [
            GOOD_PROGRAM_FENCED,
            "not a program",
            "```spl\nspl/1\nused_features: [22]\nparams: [0.25]\nbounds: [[0, 1]]\nscore:\nreturn param(0) * feature(22)\n```",
        ];

        // Uninterrupted run of 3 iterations.
        let fix_a = fixture(dir_a.path(), &responses);
        let config_a = config_for(dir_a.path(), fix_a, 3);
        evolve_loop(&config_a, &instances, &[0]).unwrap();

        // Same run killed after iteration 2 (simulated by running to T=2),
        // then resumed to T=3 against the same artifacts.
        let fix_b = fixture(dir_b.path(), &responses);
        let mut config_b = config_for(dir_b.path(), fix_b, 2);
        evolve_loop(&config_b, &instances, &[0]).unwrap();
        config_b.iterations = 3;
        evolve_loop(&config_b, &instances, &[0]).unwrap();

        let db_a = fs::read(&config_a.db_path).unwrap();
        let db_b = fs::read(&config_b.db_path).unwrap();
        assert!(!db_a.is_empty());
        assert_eq!(db_a, db_b, "database bytes diverge after resume");
        let hist_a = fs::read(&config_a.history_path).unwrap();
        let hist_b = fs::read(&config_b.history_path).unwrap();
        assert_eq!(hist_a, hist_b, "history bytes diverge after resume");

        // Re-running the finished run is a no-op.
        let before = fs::read(&config_a.db_path).unwrap();
        evolve_loop(&config_a, &instances, &[0]).unwrap();
        assert_eq!(before, fs::read(&config_a.db_path).unwrap());
    }

    #[test]
    fn stored_records_carry_tuned_params_and_parentage() {
        let dir = tempdir().unwrap();
        let fixture_path = fixture(dir.path(), &[GOOD_PROGRAM_FENCED]);
        let config = config_for(dir.path(), fixture_path, 1);
        let instances = desk_instances();
        evolve_loop(&config, &instances, &[0]).unwrap();
        let db = IslandDatabase::open(&config.db_path, 4).unwrap();
        let stored = &db.records()[1];
        assert_eq!(stored.parent, Some(0));
        assert_eq!(stored.iteration, 1);
        assert_eq!(stored.program.initial_params, stored.theta);
        assert_eq!(stored.island, island_of(&stored.program, 4));
        assert!(stored.cost.is_finite());
        assert!(stored.subset_cost.is_finite());
    }
}
