//! Parent and inspiration sampling over the island database.
//!
//! Parents come from a 70/30 exploration/exploitation split: exploration is a
//! uniform draw over every stored record, exploitation a rank-proportional
//! draw within the island with the best mean cost. Inspirations mix the
//! island's top performers with a structurally diverse remainder.

use super::db::{IslandDatabase, ProgramRecord};
use rand::Rng;

/// Which branch of the exploration/exploitation split a draw took.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParentDraw {
    Exploration,
    Exploitation,
}

/// Draws a parent record. See [`sample_parent_traced`] for the split; this
/// wrapper drops the trace.
pub fn sample_parent<'a>(
    db: &'a IslandDatabase,
    rng: &mut impl Rng,
    exploration_prob: f64,
) -> &'a ProgramRecord {
    sample_parent_traced(db, rng, exploration_prob).0
}

/// Draws a parent and reports which branch fired (the split itself is a
/// tested quantity). With probability `exploration_prob` the parent is a
/// uniform draw over all records; otherwise it is drawn rank-proportionally
/// (best rank = highest weight) within the island whose records have the
/// lowest mean cost.
pub fn sample_parent_traced<'a>(
    db: &'a IslandDatabase,
    rng: &mut impl Rng,
    exploration_prob: f64,
) -> (&'a ProgramRecord, ParentDraw) {
    assert!(!db.is_empty(), "cannot sample a parent from an empty database");
    assert!((0.0..=1.0).contains(&exploration_prob), "probability out of range");
    if rng.gen_range(0.0..1.0) < exploration_prob {
        let i = rng.gen_range(0..db.len());
        return (&db.records()[i], ParentDraw::Exploration);
    }
    let island = best_island(db);
    let mut members: Vec<&ProgramRecord> = db
        .island_members(island)
        .iter()
        .map(|&id| db.get(id).expect("island ids are valid"))
        .collect();
    // Rank by cost ascending, ties broken by id so ranks are deterministic.
    members.sort_by(|a, b| a.cost.total_cmp(&b.cost).then(a.id.cmp(&b.id)));
    let n = members.len();
    // Weight n for the best record down to 1 for the worst.
    let total = n * (n + 1) / 2;
    let mut ticket = rng.gen_range(0..total);
    for (rank, record) in members.iter().enumerate() {
        let weight = n - rank;
        if ticket < weight {
            return (record, ParentDraw::Exploitation);
        }
        ticket -= weight;
    }
    unreachable!("ticket always lands inside the total weight");
}

/// Island whose records have the lowest mean cost (ties → lowest island id).
fn best_island(db: &IslandDatabase) -> u32 {
    db.occupied_islands()
        .min_by(|&a, &b| island_mean_cost(db, a).total_cmp(&island_mean_cost(db, b)))
        .expect("nonempty database has an occupied island")
}

fn island_mean_cost(db: &IslandDatabase, island: u32) -> f64 {
    let members = db.island_members(island);
    let sum: f64 = members
        .iter()
        .map(|&id| db.get(id).expect("island ids are valid").cost)
        .sum();
    sum / members.len() as f64
}

/// Structural diversity between two records in [0, 1]: the mean of the
/// normalized token-level edit distance between canonical sources and the
/// Jaccard distance between used-feature sets. Identical programs score 0.
pub fn diversity_score(a: &ProgramRecord, b: &ProgramRecord) -> f64 {
    let ta = tokenize(&a.program.canonical_text());
    let tb = tokenize(&b.program.canonical_text());
    let edit = if ta.is_empty() && tb.is_empty() {
        0.0
    } else {
        levenshtein(&ta, &tb) as f64 / ta.len().max(tb.len()) as f64
    };
    0.5 * edit + 0.5 * jaccard_distance(&a.program.used_features, &b.program.used_features)
}

/// Inspirations for a parent, all drawn from the parent's island: the ⌈k/2⌉
/// lowest-cost records (parent excluded), then ⌊k/2⌋ records from the
/// remainder chosen to maximize total pairwise diversity among themselves
/// (exact argmax for up to two picks, greedy farthest-point beyond). Fewer
/// records available → returns what exists. Deterministic.
pub fn sample_inspirations<'a>(
    db: &'a IslandDatabase,
    parent: &ProgramRecord,
    k: usize,
) -> Vec<&'a ProgramRecord> {
    let mut pool: Vec<&ProgramRecord> = db
        .island_members(parent.island)
        .iter()
        .map(|&id| db.get(id).expect("island ids are valid"))
        .filter(|r| r.id != parent.id)
        .collect();
    pool.sort_by(|a, b| a.cost.total_cmp(&b.cost).then(a.id.cmp(&b.id)));

    let n_top = k.div_ceil(2).min(pool.len());
    let mut chosen: Vec<&ProgramRecord> = pool[..n_top].to_vec();
    let rest: Vec<&ProgramRecord> = pool[n_top..].to_vec();

    let n_diverse = (k / 2).min(rest.len());
    let mut diverse: Vec<&ProgramRecord> = Vec::with_capacity(n_diverse);
    if n_diverse == 1 {
        // Sole pick: the record most diverse from the parent.
        diverse.push(
            *rest
                .iter()
                .max_by(|a, b| {
                    diversity_score(a, parent)
                        .total_cmp(&diversity_score(b, parent))
                        .then(b.id.cmp(&a.id))
                })
                .expect("n_diverse bounded by rest.len()"),
        );
    } else if n_diverse >= 2 {
        // Seed with the most diverse pair (exact over all pairs, ties →
        // lexicographically smallest id pair).
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..rest.len() {
            for j in (i + 1)..rest.len() {
                let d = diversity_score(rest[i], rest[j]);
                if best.is_none_or(|(_, _, bd)| d > bd) {
                    best = Some((i, j, d));
                }
            }
        }
        let (i, j, _) = best.expect("rest has at least two records");
        let mut picked = vec![false; rest.len()];
        picked[i] = true;
        picked[j] = true;
        diverse.push(rest[i]);
        diverse.push(rest[j]);
        // Greedy farthest-point for any further picks.
        while diverse.len() < n_diverse {
            let (next, _) = rest
                .iter()
                .enumerate()
                .filter(|(idx, _)| !picked[*idx])
                .map(|(idx, r)| {
                    let gain: f64 = diverse.iter().map(|c| diversity_score(c, r)).sum();
                    (idx, gain)
                })
                .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
                .expect("unpicked records remain");
            picked[next] = true;
            diverse.push(rest[next]);
        }
        diverse.sort_by_key(|r| r.id);
    }
    chosen.extend(diverse);
    chosen
}

/// Jaccard distance between two ascending index sets: 1 − |∩| / |∪|.
fn jaccard_distance(a: &[u8], b: &[u8]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let mut inter = 0usize;
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                inter += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = a.len() + b.len() - inter;
    1.0 - inter as f64 / union as f64
}

/// Splits program text into identifier/number tokens and single punctuation
/// characters; whitespace separates but never appears.
fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut word = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() || ch == '_' || ch == '.' {
            word.push(ch);
        } else {
            if !word.is_empty() {
                tokens.push(std::mem::take(&mut word));
            }
            if !ch.is_whitespace() {
                tokens.push(ch.to_string());
            }
        }
    }
    if !word.is_empty() {
        tokens.push(word);
    }
    tokens
}

/// Classic two-row Levenshtein distance over token sequences.
fn levenshtein(a: &[String], b: &[String]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, ta) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, tb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ta != tb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::ScoreProgram;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn record_with(db: &mut IslandDatabase, body: &str, features: &str, cost: f64) -> u64 {
        let text = format!(
            "spl/1\nused_features: [{features}]\nparams: [0.5]\nbounds: [[0, 1]]\nscore:\nreturn {body}\n"
        );
        let (program, _) = ScoreProgram::parse(&text).unwrap();
        db.insert(program, vec![0.5], cost, cost, None, 0).unwrap().id
    }

    #[test]
    fn single_record_database_always_returns_it() {
        let mut db = IslandDatabase::in_memory(4);
        record_with(&mut db, "param(0) * feature(9)", "9", 5.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            assert_eq!(sample_parent(&db, &mut rng, 0.7).id, 0);
        }
    }

    #[test]
    fn exploitation_prefers_low_cost() {
        let mut db = IslandDatabase::in_memory(1); // one island: rank weights apply globally
        record_with(&mut db, "feature(9)", "9", 10.0);
        record_with(&mut db, "feature(22)", "22", 5.0);
        record_with(&mut db, "feature(7)", "7", 20.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut hits = [0u32; 3];
        for _ in 0..6000 {
            // exploration_prob 0 forces the exploitation branch.
            hits[sample_parent(&db, &mut rng, 0.0).id as usize] += 1;
        }
        // Rank weights 3:2:1 → the cost-5 record (id 1) leads, cost-20 trails.
        assert!(hits[1] > hits[0] && hits[0] > hits[2], "{hits:?}");
    }

    #[test]
    fn exploration_fraction_tracks_the_split() {
        let mut db = IslandDatabase::in_memory(4);
        record_with(&mut db, "feature(9)", "9", 10.0);
        record_with(&mut db, "feature(22)", "22", 5.0);
        record_with(&mut db, "feature(7) + feature(9)", "7, 9", 7.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let explored = (0..10_000)
            .filter(|_| {
                sample_parent_traced(&db, &mut rng, 0.7).1 == ParentDraw::Exploration
            })
            .count();
        let fraction = explored as f64 / 10_000.0;
        assert!((0.68..=0.72).contains(&fraction), "fraction {fraction}");
    }

    #[test]
    fn identical_programs_have_zero_diversity() {
        let mut db = IslandDatabase::in_memory(4);
        let a = record_with(&mut db, "param(0) * feature(9)", "9", 1.0);
        let b = record_with(&mut db, "param(0) * feature(9)", "9", 2.0);
        let (ra, rb) = (db.get(a).unwrap(), db.get(b).unwrap());
        assert_eq!(diversity_score(ra, rb), 0.0);
        assert!(diversity_score(ra, ra) == 0.0);
    }

    #[test]
    fn diversity_is_symmetric_and_bounded() {
        let mut db = IslandDatabase::in_memory(4);
        record_with(&mut db, "param(0) * feature(9)", "9", 1.0);
        record_with(&mut db, "param(0) * feature(22) + feature(40)", "22, 40", 2.0);
        record_with(&mut db, "max(feature(9), feature(7))", "7, 9", 3.0);
        for a in db.records() {
            for b in db.records() {
                let d = diversity_score(a, b);
                assert!((0.0..=1.0).contains(&d));
                assert_eq!(d, diversity_score(b, a));
            }
        }
    }

    #[test]
    fn lone_parent_gets_no_inspirations() {
        let mut db = IslandDatabase::in_memory(4);
        let id = record_with(&mut db, "feature(9)", "9", 1.0);
        let parent = db.get(id).unwrap();
        assert!(sample_inspirations(&db, parent, 4).is_empty());
    }

    #[test]
    fn inspirations_mix_top_cost_and_max_diversity() {
        // One island (island_count 1) so every record is a candidate.
        let mut db = IslandDatabase::in_memory(1);
        let parent_id = record_with(&mut db, "feature(9)", "9", 50.0);
        // Two cheap records become the top-cost picks.
        record_with(&mut db, "feature(22)", "22", 1.0);
        record_with(&mut db, "feature(7)", "7", 2.0);
        // Remainder: ids 3..6 with varying structure; the diverse pair must
        // match a brute-force argmax over all pairs.
        record_with(&mut db, "feature(40) + feature(41)", "40, 41", 10.0);
        record_with(&mut db, "feature(40) + feature(41) + 0", "40, 41", 11.0);
        record_with(&mut db, "min(feature(0), feature(43)) / (feature(2) + 1)", "0, 2, 43", 12.0);
        let parent = db.get(parent_id).unwrap();
        let picks = sample_inspirations(&db, parent, 4);
        assert_eq!(picks.len(), 4);
        assert_eq!(picks[0].id, 1);
        assert_eq!(picks[1].id, 2);
        let rest: Vec<&ProgramRecord> =
            [3u64, 4, 5].iter().map(|&i| db.get(i).unwrap()).collect();
        let mut best = (0usize, 1usize, f64::MIN);
        for i in 0..rest.len() {
            for j in (i + 1)..rest.len() {
                let d = diversity_score(rest[i], rest[j]);
                if d > best.2 {
                    best = (i, j, d);
                }
            }
        }
        let expected: Vec<u64> = vec![rest[best.0].id, rest[best.1].id];
        let got: Vec<u64> = picks[2..].iter().map(|r| r.id).collect();
        assert_eq!(got, expected);
        assert!(!picks.iter().any(|r| r.id == parent_id));
    }

    #[test]
    fn small_islands_return_what_exists() {
        let mut db = IslandDatabase::in_memory(1);
        let parent_id = record_with(&mut db, "feature(9)", "9", 5.0);
        record_with(&mut db, "feature(22)", "22", 1.0);
        let parent = db.get(parent_id).unwrap();
        let picks = sample_inspirations(&db, parent, 4);
        assert_eq!(picks.len(), 1);
        assert_eq!(picks[0].id, 1);
    }
}
