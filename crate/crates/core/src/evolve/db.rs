//! Append-only island-structured program database with JSON-lines
//! persistence.
//!
//! Every record lives in exactly one island, chosen by hashing the program's
//! used-feature signature — a pure function of the program text, so
//! re-parsing a stored program always reproduces its island.

use crate::dsl::ScoreProgram;
use crate::rng::fnv1a64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

/// One stored (program, θ*) pair with its evaluated costs.
#[derive(Debug, Clone, PartialEq)]
pub struct ProgramRecord {
    /// Monotone, assigned by the database at insertion.
    pub id: u64,
    /// The program with its params line rewritten to θ* — the stored text is
    /// exactly what a later prompt should show.
    pub program: ScoreProgram,
    pub theta: Vec<f64>,
    /// Full-set cost M(p*; D). Finite for every stored record.
    pub cost: f64,
    /// Subset cost from the tuning run that produced θ*.
    pub subset_cost: f64,
    pub island: u32,
    pub parent: Option<u64>,
    /// Loop iteration that produced the record (0 for the seed record).
    pub iteration: u64,
    /// Logical timestamp — equals `iteration` so database bytes are a pure
    /// function of the run, not of the wall clock.
    pub created_at: u64,
}

/// Wire form of a record: the program travels as canonical text.
#[derive(Serialize, Deserialize)]
struct RecordWire {
    v: u32,
    id: u64,
    program: String,
    theta: Vec<f64>,
    cost: f64,
    subset_cost: f64,
    island: u32,
    parent: Option<u64>,
    iteration: u64,
    created_at: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum DbError {
    #[error("database io: {0}")]
    Io(#[from] std::io::Error),
    #[error("database line {line}: {message}")]
    Corrupt { line: usize, message: String },
}

/// Island id for a program: FNV-1a of its ascending used-feature indices,
/// modulo the island count.
pub fn island_of(program: &ScoreProgram, island_count: u32) -> u32 {
    assert!(island_count > 0, "island count must be positive");
    (fnv1a64(&program.used_features) % island_count as u64) as u32
}

/// Append-only record store grouped into islands. With a backing path every
/// insert is flushed to disk immediately; without one the database is
/// memory-only (handy for sampling tests).
#[derive(Debug)]
pub struct IslandDatabase {
    records: Vec<ProgramRecord>,
    islands: BTreeMap<u32, Vec<u64>>,
    island_count: u32,
    path: Option<PathBuf>,
}

impl IslandDatabase {
    pub fn in_memory(island_count: u32) -> Self {
        assert!(island_count > 0, "island count must be positive");
        Self { records: Vec::new(), islands: BTreeMap::new(), island_count, path: None }
    }

    /// Opens (or creates) a JSONL-backed database, loading existing records.
    pub fn open(path: &Path, island_count: u32) -> Result<Self, DbError> {
        let mut db = Self::in_memory(island_count);
        db.path = Some(path.to_path_buf());
        if path.exists() {
            for (lineno, line) in fs::read_to_string(path)?.lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                let record = decode_record(line).map_err(|message| DbError::Corrupt {
                    line: lineno + 1,
                    message,
                })?;
                db.attach(record);
            }
        }
        Ok(db)
    }

    /// Inserts a record, assigning the next id, and appends it to the backing
    /// file. The caller supplies everything but the id.
    #[allow(clippy::too_many_arguments)]
    pub fn insert(
        &mut self,
        program: ScoreProgram,
        theta: Vec<f64>,
        cost: f64,
        subset_cost: f64,
        parent: Option<u64>,
        iteration: u64,
    ) -> Result<&ProgramRecord, DbError> {
        assert!(cost.is_finite(), "stored records must have finite cost");
        let record = ProgramRecord {
            id: self.records.last().map_or(0, |r| r.id + 1),
            island: island_of(&program, self.island_count),
            program,
            theta,
            cost,
            subset_cost,
            parent,
            iteration,
            created_at: iteration,
        };
        if let Some(path) = &self.path {
            let mut f = fs::OpenOptions::new().create(true).append(true).open(path)?;
            f.write_all(encode_record(&record).as_bytes())?;
            f.write_all(b"\n")?;
            f.flush()?;
        }
        self.attach(record);
        Ok(self.records.last().expect("just attached"))
    }

    fn attach(&mut self, record: ProgramRecord) {
        self.islands.entry(record.island).or_default().push(record.id);
        self.records.push(record);
    }

    /// Drops every record from iterations after `iteration` and rewrites the
    /// backing file — the resume path for a run killed mid-iteration.
    pub fn truncate_after_iteration(&mut self, iteration: u64) -> Result<(), DbError> {
        if self.records.iter().all(|r| r.iteration <= iteration) {
            return Ok(());
        }
        let kept: Vec<ProgramRecord> =
            self.records.drain(..).filter(|r| r.iteration <= iteration).collect();
        self.islands.clear();
        if let Some(path) = self.path.clone() {
            let mut text = String::new();
            for r in &kept {
                text.push_str(&encode_record(r));
                text.push('\n');
            }
            fs::write(path, text)?;
        }
        for r in kept {
            self.attach(r);
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn records(&self) -> &[ProgramRecord] {
        &self.records
    }

    pub fn island_count(&self) -> u32 {
        self.island_count
    }

    /// Record ids in an island, in insertion order.
    pub fn island_members(&self, island: u32) -> &[u64] {
        self.islands.get(&island).map_or(&[], |v| v.as_slice())
    }

    /// Islands that currently hold at least one record.
    pub fn occupied_islands(&self) -> impl Iterator<Item = u32> + '_ {
        self.islands.keys().copied()
    }

    pub fn get(&self, id: u64) -> Option<&ProgramRecord> {
        self.records.iter().find(|r| r.id == id)
    }

    /// Lowest-cost record (ties → lowest id). None only when empty.
    pub fn best(&self) -> Option<&ProgramRecord> {
        self.records
            .iter()
            .min_by(|a, b| a.cost.total_cmp(&b.cost).then(a.id.cmp(&b.id)))
    }
}

fn encode_record(record: &ProgramRecord) -> String {
    let wire = RecordWire {
        v: 1,
        id: record.id,
        program: record.program.canonical_text(),
        theta: record.theta.clone(),
        cost: record.cost,
        subset_cost: record.subset_cost,
        island: record.island,
        parent: record.parent,
        iteration: record.iteration,
        created_at: record.created_at,
    };
    serde_json::to_string(&wire).expect("record serialization is infallible")
}

fn decode_record(line: &str) -> Result<ProgramRecord, String> {
    let wire: RecordWire = serde_json::from_str(line).map_err(|e| e.to_string())?;
    if wire.v != 1 {
        return Err(format!("unsupported record version {}", wire.v));
    }
    let (program, _warnings) =
        ScoreProgram::parse(&wire.program).map_err(|e| format!("stored program: {e}"))?;
    Ok(ProgramRecord {
        id: wire.id,
        program,
        theta: wire.theta,
        cost: wire.cost,
        subset_cost: wire.subset_cost,
        island: wire.island,
        parent: wire.parent,
        iteration: wire.iteration,
        created_at: wire.created_at,
    })
}
