//! Tooling behind the `csst` binary: op-log replay, differential fuzzing,
//! the scalability benchmark and the saturation-based consistency checker.

use std::fmt;
use std::str::FromStr;

use crate::baselines::{GraphPO, PlainStPO, VectorClockPO};
use crate::dynamic::DynamicPartialOrder;
use crate::incremental::IncrementalPartialOrder;
use crate::model::{ChainGeometry, PartialOrder};

pub mod bench;
pub mod fuzz;
pub mod oplog;
pub mod replay;
pub mod satcheck;

/// A partial-order backend that can be moved between threads.
pub type DynBackend = Box<dyn PartialOrder + Send>;

/// Backends selectable by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    CsstDyn,
    CsstInc,
    Vc,
    Graph,
    St,
}

impl Backend {
    pub const ALL: [Backend; 5] = [
        Backend::CsstDyn,
        Backend::CsstInc,
        Backend::Vc,
        Backend::Graph,
        Backend::St,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Backend::CsstDyn => "csst-dyn",
            Backend::CsstInc => "csst-inc",
            Backend::Vc => "vc",
            Backend::Graph => "graph",
            Backend::St => "st",
        }
    }

    pub fn supports_delete(self) -> bool {
        matches!(self, Backend::CsstDyn | Backend::Graph)
    }

    pub fn build(self, geom: ChainGeometry) -> DynBackend {
        match self {
            Backend::CsstDyn => Box::new(DynamicPartialOrder::new(geom)),
            Backend::CsstInc => Box::new(IncrementalPartialOrder::<crate::sst::SuffixMinArray>::new(geom)),
            Backend::Vc => Box::new(VectorClockPO::new(geom)),
            Backend::Graph => Box::new(GraphPO::new(geom)),
            Backend::St => Box::new(PlainStPO::new(geom)),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Backend::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Backend::ALL.iter().map(|b| b.name()).collect();
                format!("unknown backend {s:?} (expected one of {})", names.join(", "))
            })
    }
}
