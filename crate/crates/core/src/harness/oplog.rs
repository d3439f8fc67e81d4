//! Text op-log: one record per line, `#` starts a comment.
//!
//! ```text
//! init <k> <len_0> ... <len_{k-1}>
//! ins <t1> <j1> <t2> <j2>
//! del <t1> <j1> <t2> <j2>
//! succ <t1> <j1> <t2>
//! pred <t1> <j1> <t2>
//! reach <t1> <j1> <t2> <j2>
//! grow <t> <new_len>
//! ```

use std::fmt;

use thiserror::Error;

use crate::model::NodeId;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OpRecord {
    Init(Vec<u32>),
    Ins(NodeId, NodeId),
    Del(NodeId, NodeId),
    Succ(NodeId, u32),
    Pred(NodeId, u32),
    Reach(NodeId, NodeId),
    Grow(u32, u32),
}

impl OpRecord {
    pub fn is_query(&self) -> bool {
        matches!(self, OpRecord::Succ(..) | OpRecord::Pred(..) | OpRecord::Reach(..))
    }
}

impl fmt::Display for OpRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpRecord::Init(lens) => {
                write!(f, "init {}", lens.len())?;
                for l in lens {
                    write!(f, " {l}")?;
                }
                Ok(())
            }
            OpRecord::Ins(u, v) => write!(f, "ins {} {} {} {}", u.chain, u.index, v.chain, v.index),
            OpRecord::Del(u, v) => write!(f, "del {} {} {} {}", u.chain, u.index, v.chain, v.index),
            OpRecord::Succ(u, t) => write!(f, "succ {} {} {t}", u.chain, u.index),
            OpRecord::Pred(u, t) => write!(f, "pred {} {} {t}", u.chain, u.index),
            OpRecord::Reach(u, v) => {
                write!(f, "reach {} {} {} {}", u.chain, u.index, v.chain, v.index)
            }
            OpRecord::Grow(t, len) => write!(f, "grow {t} {len}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

/// Parses one line. Blank and comment-only lines give `None`.
pub fn parse_line(line: &str) -> Result<Option<OpRecord>, String> {
    let body = line.split('#').next().unwrap_or("");
    let mut words = body.split_whitespace();
    let Some(head) = words.next() else {
        return Ok(None);
    };
    let nums = words
        .map(|w| w.parse::<u32>().map_err(|_| format!("bad number {w:?}")))
        .collect::<Result<Vec<_>, _>>()?;
    let arity = |n: usize| {
        if nums.len() == n {
            Ok(())
        } else {
            Err(format!("{head} takes {n} operands, got {}", nums.len()))
        }
    };
    let node = |i: usize| NodeId::new(nums[i], nums[i + 1]);
    let rec = match head {
        "init" => {
            let Some((&k, lens)) = nums.split_first() else {
                return Err("init needs a chain count".into());
            };
            if k == 0 || lens.len() != k as usize {
                return Err(format!("init declares {k} chains but lists {} lengths", lens.len()));
            }
            OpRecord::Init(lens.to_vec())
        }
        "ins" => {
            arity(4)?;
            OpRecord::Ins(node(0), node(2))
        }
        "del" => {
            arity(4)?;
            OpRecord::Del(node(0), node(2))
        }
        "succ" => {
            arity(3)?;
            OpRecord::Succ(node(0), nums[2])
        }
        "pred" => {
            arity(3)?;
            OpRecord::Pred(node(0), nums[2])
        }
        "reach" => {
            arity(4)?;
            OpRecord::Reach(node(0), node(2))
        }
        "grow" => {
            arity(2)?;
            OpRecord::Grow(nums[0], nums[1])
        }
        other => return Err(format!("unknown record {other:?}")),
    };
    Ok(Some(rec))
}

/// Parses a whole log, returning each record with its 1-based line number.
/// The first record must be `init` and no other record may be.
pub fn parse(text: &str) -> Result<Vec<(usize, OpRecord)>, ParseError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let err = |message: String| ParseError { line: lineno, message };
        if let Some(rec) = parse_line(line).map_err(err)? {
            let is_init = matches!(rec, OpRecord::Init(_));
            if out.is_empty() != is_init {
                return Err(err(if is_init {
                    "init may only appear once, first".into()
                } else {
                    "the first record must be init".into()
                }));
            }
            out.push((lineno, rec));
        }
    }
    if out.is_empty() {
        return Err(ParseError { line: 0, message: "empty op-log".into() });
    }
    Ok(out)
}

/// Renders records one per line.
pub fn render<'a>(ops: impl IntoIterator<Item = &'a OpRecord>) -> String {
    let mut s = String::new();
    for op in ops {
        s.push_str(&op.to_string());
        s.push('\n');
    }
    s
}
