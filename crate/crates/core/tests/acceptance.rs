//! Acceptance gate: one test per shipping criterion, each printing a single
//! PASS/FAIL line. Run with `cargo test --test acceptance -- --nocapture`
//! to see the lines even on success.

mod common;

use branchlab::bnb::{run_bnb, BnbConfig, BnbStatus};
use branchlab::dsl::{evaluate, ScoreProgram};
use branchlab::features::{FeatureMatrix, NUM_FEATURES};
use branchlab::policy::BranchingPolicy;
use branchlab::simplex::{solve_lp_relaxation, LpStatus};
use common::{
    dense_rows, enumerate_binary_optimum, naive_solve_lp, random_binary_milp, random_lp, rng,
    OracleStatus,
};
use rand::Rng;
use std::time::Instant;

fn report(id: u32, name: &str, body: impl FnOnce() -> Result<(), String>) {
    match body() {
        Ok(()) => println!("ACCEPTANCE {id:02} {name}: PASS"),
        Err(e) => {
            println!("ACCEPTANCE {id:02} {name}: FAIL — {e}");
            panic!("criterion {id:02} ({name}) failed: {e}");
        }
    }
}

#[test]
fn criterion_01_milp_optimum_matches_enumeration() {
    report(1, "milp-vs-enumeration", || {
        let start = Instant::now();
        let mut r = rng(0xC1);
        let mut feasible_seen = 0;
        let mut infeasible_seen = 0;
        for case in 0..100 {
            let inst = random_binary_milp(&mut r, 8, 10);
            let stats = run_bnb(&inst, &BranchingPolicy::MostFractional, &BnbConfig::default())
                .map_err(|e| format!("case {case}: solver error: {e}"))?;
            match enumerate_binary_optimum(&inst) {
                Some((best, _)) => {
                    feasible_seen += 1;
                    if stats.status != BnbStatus::Optimal {
                        return Err(format!(
                            "case {case}: expected optimal, got {:?}",
                            stats.status
                        ));
                    }
                    let inc = stats.incumbent_objective.unwrap();
                    if (inc - best).abs() > 1e-6 {
                        return Err(format!(
                            "case {case}: solver {inc} vs enumeration {best}"
                        ));
                    }
                }
                None => {
                    infeasible_seen += 1;
                    if stats.status != BnbStatus::Infeasible {
                        return Err(format!(
                            "case {case}: expected infeasible, got {:?} (incumbent {:?})",
                            stats.status, stats.incumbent_objective
                        ));
                    }
                }
            }
        }
        let elapsed = start.elapsed().as_secs_f64();
        if elapsed >= 30.0 {
            return Err(format!("suite took {elapsed:.1} s, budget is 30 s"));
        }
        // The draw should exercise both branches; purely a sanity check on
        // the instance distribution, not part of the criterion.
        assert!(feasible_seen > 10 && infeasible_seen > 3);
        Ok(())
    });
}

#[test]
fn criterion_02_lp_fixtures_and_oracle_agreement() {
    report(2, "simplex-vs-naive-oracle", || {
        // Hand-crafted fixture 1: min -x, 0 <= x <= 1.5, no rows.
        let inst = branchlab::milp::MilpInstance::from_dense(
            vec![-1.0],
            &[],
            vec![],
            vec![0.0],
            vec![1.5],
            vec![false],
        )
        .unwrap();
        let res = solve_lp_relaxation(&inst, &inst.lower, &inst.upper)
            .map_err(|e| format!("fixture 1: {e}"))?;
        if res.status != LpStatus::Optimal || (res.objective - -1.5).abs() > 1e-8 {
            return Err(format!("fixture 1: status {:?} obj {}", res.status, res.objective));
        }

        // Hand-crafted fixture 2: min -x1-x2 s.t. x1+x2 <= 1, x in [0,1]^2.
        let inst = branchlab::milp::MilpInstance::from_dense(
            vec![-1.0, -1.0],
            &[vec![1.0, 1.0]],
            vec![1.0],
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![false, false],
        )
        .unwrap();
        let res = solve_lp_relaxation(&inst, &inst.lower, &inst.upper)
            .map_err(|e| format!("fixture 2: {e}"))?;
        if res.status != LpStatus::Optimal || (res.objective - -1.0).abs() > 1e-8 {
            return Err(format!("fixture 2: status {:?} obj {}", res.status, res.objective));
        }

        // 50 random LPs against the standard-form tableau oracle.
        let mut r = rng(0xC2);
        for case in 0..50 {
            let inst = random_lp(&mut r);
            let oracle = naive_solve_lp(
                &inst.objective,
                &dense_rows(&inst),
                &inst.rhs,
                &inst.lower,
                &inst.upper,
            );
            let res = solve_lp_relaxation(&inst, &inst.lower, &inst.upper)
                .map_err(|e| format!("case {case}: solver error: {e}"))?;
            let expect = match oracle.status {
                OracleStatus::Optimal => LpStatus::Optimal,
                OracleStatus::Infeasible => LpStatus::Infeasible,
                OracleStatus::Unbounded => LpStatus::Unbounded,
            };
            if res.status != expect {
                return Err(format!(
                    "case {case}: solver {:?} vs oracle {:?}",
                    res.status, oracle.status
                ));
            }
            if res.status == LpStatus::Optimal && (res.objective - oracle.objective).abs() > 1e-7 {
                return Err(format!(
                    "case {case}: solver obj {} vs oracle {}",
                    res.objective, oracle.objective
                ));
            }
        }
        Ok(())
    });
}

const REFERENCE_PROGRAMS: [(&str, &str); 6] = [
    ("setcover", include_str!("../fixtures/programs/setcover.spl")),
    ("cauctions", include_str!("../fixtures/programs/cauctions.spl")),
    ("facilities", include_str!("../fixtures/programs/facilities.spl")),
    ("indset", include_str!("../fixtures/programs/indset.spl")),
    ("itemplace", include_str!("../fixtures/programs/itemplace.spl")),
    ("nnverify", include_str!("../fixtures/programs/nnverify.spl")),
];

#[test]
fn criterion_04_reference_programs_regression() {
    report(4, "dsl-reference-programs", || {
        let mut programs = Vec::new();
        for (name, text) in REFERENCE_PROGRAMS {
            let (prog, _) =
                ScoreProgram::parse(text).map_err(|e| format!("{name} failed to parse: {e}"))?;
            // Round-trip: canonical text reparses to the identical AST and the
            // canonical form is a fixed point.
            let canon = prog.canonical_text();
            let (again, _) = ScoreProgram::parse(&canon)
                .map_err(|e| format!("{name} canonical text failed to reparse: {e}"))?;
            if again != prog {
                return Err(format!("{name}: round-trip changed the program"));
            }
            if again.canonical_text() != canon {
                return Err(format!("{name}: canonical text is not a fixed point"));
            }
            programs.push((name, prog));
        }

        // The printed parameter from the published setcover policy must
        // survive parse + serialization bit-exactly.
        let setcover = &programs[0].1;
        if setcover.initial_params[1] != 0.5887010792086566 {
            return Err(format!(
                "setcover theta[1] = {:?}, want 0.5887010792086566",
                setcover.initial_params[1]
            ));
        }

        // Every program evaluates to finite scores on 1000 random normalized
        // feature matrices.
        let mut r = rng(0xC4);
        for matrix_id in 0..1000 {
            let n_rows = r.gen_range(1..=12);
            let values: Vec<f64> =
                (0..n_rows * NUM_FEATURES).map(|_| r.gen_range(0.0..=1.0)).collect();
            let m = FeatureMatrix {
                values,
                candidate_indices: (0..n_rows).collect(),
                normalized: true,
            };
            for (name, prog) in &programs {
                let scores = evaluate(prog, &prog.initial_params, &m)
                    .map_err(|e| format!("{name} on matrix {matrix_id}: {e}"))?;
                if scores.len() != n_rows || scores.iter().any(|v| !v.is_finite()) {
                    return Err(format!("{name} on matrix {matrix_id}: non-finite score"));
                }
            }
        }

        // Hand-traced spot check on the combinatorial-auction policy: a row
        // with f7=0.1, f9=0.5, f22=0.4, f39=f40=0.2, f43=0.04 scores
        // 1*4*0.5*0.5 + 1*0.4 + 0.26450634387680155*1 + 0.29613190117158167*0.4.
        let cauctions = &programs[1].1;
        let mut row = vec![0.0; NUM_FEATURES];
        row[7] = 0.1;
        row[9] = 0.5;
        row[22] = 0.4;
        row[39] = 0.2;
        row[40] = 0.2;
        row[43] = 0.04;
        let m = FeatureMatrix { values: row, candidate_indices: vec![0], normalized: true };
        let scores = evaluate(cauctions, &cauctions.initial_params, &m)
            .map_err(|e| format!("hand trace: {e}"))?;
        if (scores[0] - 1.7829591043454343).abs() > 1e-12 {
            return Err(format!("hand trace scored {}, want 1.7829591043454343", scores[0]));
        }
        Ok(())
    });
}
