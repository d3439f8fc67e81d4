//! Executes an op-log against a backend, optionally shadowing every record
//! into the oracle.

use std::fmt;
use std::io::{self, Write};

use thiserror::Error;

use super::oplog::{OpRecord, ParseError};
use super::DynBackend;
use crate::model::{ChainGeometry, PartialOrder, PoError};
use crate::oracle::OracleGraph;

/// Result of one query record.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Answer {
    Succ(Option<u32>),
    Pred(Option<u32>),
    Reach(bool),
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Answer::Succ(Some(j)) => write!(f, "succ -> {j}"),
            Answer::Succ(None) => write!(f, "succ -> inf"),
            Answer::Pred(Some(j)) => write!(f, "pred -> {j}"),
            Answer::Pred(None) => write!(f, "pred -> none"),
            Answer::Reach(b) => write!(f, "reach -> {b}"),
        }
    }
}

/// Applies one non-`init` record. Queries return their answer.
pub fn apply<P: PartialOrder + ?Sized>(po: &mut P, op: &OpRecord) -> Result<Option<Answer>, PoError> {
    Ok(match *op {
        OpRecord::Init(_) => None,
        OpRecord::Ins(u, v) => {
            po.insert_edge(u, v)?;
            None
        }
        OpRecord::Del(u, v) => {
            po.delete_edge(u, v)?;
            None
        }
        OpRecord::Succ(u, t) => Some(Answer::Succ(po.successor(u, t)?)),
        OpRecord::Pred(u, t) => Some(Answer::Pred(po.predecessor(u, t)?)),
        OpRecord::Reach(u, v) => Some(Answer::Reach(po.reachable(u, v)?)),
        OpRecord::Grow(t, len) => {
            po.grow(t, len)?;
            None
        }
    })
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("line {line}: `{op}` failed: {source}")]
    Backend {
        line: usize,
        op: String,
        source: PoError,
    },
    #[error("line {line}: `{op}`: backend gave `{got}`, oracle gave `{want}`")]
    Mismatch {
        line: usize,
        op: String,
        got: String,
        want: String,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl ReplayError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            ReplayError::Mismatch { .. } => 2,
            _ => 1,
        }
    }
}

/// Replays `ops` (as produced by [`super::oplog::parse`]) against the
/// backend built by `make`, writing one line per query to `out`. Returns the
/// number of records executed.
pub fn replay(
    ops: &[(usize, OpRecord)],
    make: &dyn Fn(ChainGeometry) -> DynBackend,
    check_oracle: bool,
    out: &mut dyn Write,
) -> Result<usize, ReplayError> {
    let Some((_, OpRecord::Init(lens))) = ops.first() else {
        return Err(ParseError {
            line: ops.first().map_or(0, |(l, _)| *l),
            message: "the first record must be init".into(),
        }
        .into());
    };
    let geom = ChainGeometry::new(lens.clone()).ok_or_else(|| ParseError {
        line: ops[0].0,
        message: "init needs at least one chain".into(),
    })?;
    let mut po = make(geom.clone());
    let mut oracle = check_oracle.then(|| OracleGraph::new(geom));
    for (line, op) in &ops[1..] {
        let got = apply(&mut *po, op).map_err(|source| ReplayError::Backend {
            line: *line,
            op: op.to_string(),
            source,
        })?;
        if let Some(oracle) = oracle.as_mut() {
            let want = match apply(oracle, op) {
                Ok(want) => want,
                // Insert-only backends accept repeated edges.
                Err(PoError::DuplicateEdge { .. }) if matches!(op, OpRecord::Ins(..)) => None,
                Err(e) => {
                    return Err(ReplayError::Mismatch {
                        line: *line,
                        op: op.to_string(),
                        got: "ok".into(),
                        want: e.to_string(),
                    })
                }
            };
            if got != want {
                let show = |a: Option<Answer>| a.map_or("ok".to_string(), |a| a.to_string());
                return Err(ReplayError::Mismatch {
                    line: *line,
                    op: op.to_string(),
                    got: show(got),
                    want: show(want),
                });
            }
        }
        if let Some(a) = got {
            writeln!(out, "{a}")?;
        }
    }
    Ok(ops.len())
}
