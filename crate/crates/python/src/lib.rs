//! Python bindings. Nodes are `(chain, index)` tuples.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use csst::harness::replay::ReplayError;
use csst::harness::{oplog, replay, Backend};
use csst::{
    ChainGeometry, DynamicPartialOrder, IncrementalPartialOrder, NodeId, PartialOrder, PoError,
    SstError, SuffixMinArray,
};

create_exception!(pycsst, PartialOrderError, PyException);

fn po_err(e: PoError) -> PyErr {
    PartialOrderError::new_err(format!("{}: {e}", e.kind()))
}

fn sst_err(e: SstError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn node((chain, index): (u32, u32)) -> NodeId {
    NodeId::new(chain, index)
}

fn geometry(lengths: Vec<u32>) -> PyResult<ChainGeometry> {
    ChainGeometry::new(lengths).ok_or_else(|| PyValueError::new_err("at least one chain is required"))
}

/// Sparse array of `u32` values answering suffix-minimum and `argleq`
/// queries.
#[pyclass(name = "SuffixMinArray", module = "pycsst")]
struct PySuffixMinArray {
    inner: SuffixMinArray,
}

#[pymethods]
impl PySuffixMinArray {
    #[new]
    #[pyo3(signature = (capacity, block_threshold = csst::sst::DEFAULT_BLOCK_THRESHOLD))]
    fn new(capacity: u32, block_threshold: u32) -> PyResult<Self> {
        let inner = SuffixMinArray::new(capacity, block_threshold).map_err(sst_err)?;
        Ok(PySuffixMinArray { inner })
    }

    /// Sets `A[i]`; `None` clears the slot.
    #[pyo3(signature = (i, value))]
    fn update(&mut self, i: u32, value: Option<u32>) -> PyResult<()> {
        self.inner.update(i, value).map_err(sst_err)
    }

    fn get(&self, i: u32) -> PyResult<Option<u32>> {
        self.inner.get(i).map_err(sst_err)
    }

    /// Minimum of `A[i..]`, or `None` if that suffix is empty.
    fn min_suffix(&self, i: u32) -> PyResult<Option<u32>> {
        self.inner.min_suffix(i).map_err(sst_err)
    }

    /// Largest index whose value is at most `v`.
    fn argleq(&self, v: u32) -> Option<u32> {
        self.inner.argleq(v)
    }

    fn grow(&mut self, capacity: u32) -> PyResult<()> {
        self.inner.grow(capacity).map_err(sst_err)
    }

    fn entries(&self) -> Vec<(u32, u32)> {
        self.inner.entries()
    }

    #[getter]
    fn capacity(&self) -> u32 {
        self.inner.capacity()
    }

    #[getter]
    fn density(&self) -> usize {
        self.inner.density()
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    #[getter]
    fn height(&self) -> u32 {
        self.inner.height()
    }

    fn __len__(&self) -> usize {
        self.inner.density()
    }

    fn __repr__(&self) -> String {
        format!(
            "SuffixMinArray(capacity={}, density={})",
            self.inner.capacity(),
            self.inner.density()
        )
    }
}

macro_rules! partial_order_class {
    ($py_name:literal, $ty:ident, $inner:ty) => {
        #[pyclass(name = $py_name, module = "pycsst")]
        struct $ty {
            inner: $inner,
        }

        #[pymethods]
        impl $ty {
            #[new]
            #[pyo3(signature = (lengths, cycle_guard = false, block_threshold = csst::sst::DEFAULT_BLOCK_THRESHOLD))]
            fn new(lengths: Vec<u32>, cycle_guard: bool, block_threshold: u32) -> PyResult<Self> {
                let inner = <$inner>::with_options(geometry(lengths)?, block_threshold, cycle_guard);
                Ok($ty { inner })
            }

            fn insert_edge(&mut self, src: (u32, u32), dst: (u32, u32)) -> PyResult<()> {
                self.inner.insert_edge(node(src), node(dst)).map_err(po_err)
            }

            fn delete_edge(&mut self, src: (u32, u32), dst: (u32, u32)) -> PyResult<()> {
                self.inner.delete_edge(node(src), node(dst)).map_err(po_err)
            }

            fn reachable(&mut self, src: (u32, u32), dst: (u32, u32)) -> PyResult<bool> {
                self.inner.reachable(node(src), node(dst)).map_err(po_err)
            }

            /// Earliest index on `chain` reachable from `u`.
            fn successor(&mut self, u: (u32, u32), chain: u32) -> PyResult<Option<u32>> {
                self.inner.successor(node(u), chain).map_err(po_err)
            }

            /// Latest index on `chain` that reaches `u`.
            fn predecessor(&mut self, u: (u32, u32), chain: u32) -> PyResult<Option<u32>> {
                self.inner.predecessor(node(u), chain).map_err(po_err)
            }

            fn grow(&mut self, chain: u32, new_len: u32) -> PyResult<()> {
                self.inner.grow(chain, new_len).map_err(po_err)
            }

            #[getter]
            fn lengths(&self) -> Vec<u32> {
                self.inner.geometry().lengths().to_vec()
            }

            #[getter]
            fn supports_delete(&self) -> bool {
                self.inner.supports_delete()
            }

            /// Total tree nodes allocated across all arrays.
            #[getter]
            fn tree_nodes(&self) -> Option<usize> {
                self.inner.tree_nodes()
            }

            /// Array `A[t1][t2]` as `(index, value)` pairs.
            fn array_entries(&self, t1: u32, t2: u32) -> PyResult<Vec<(u32, u32)>> {
                self.inner
                    .array(t1, t2)
                    .map(|a| a.entries())
                    .ok_or_else(|| PyValueError::new_err(format!("no array for chains {t1}, {t2}")))
            }

            fn __repr__(&self) -> String {
                format!("{}(lengths={:?})", $py_name, self.inner.geometry().lengths())
            }
        }
    };
}

partial_order_class!("IncrementalPartialOrder", PyIncremental, IncrementalPartialOrder);
partial_order_class!("DynamicPartialOrder", PyDynamic, DynamicPartialOrder);

/// Runs an op-log against a backend and returns the query output lines.
#[pyfunction]
#[pyo3(signature = (text, backend = "csst-dyn", check_oracle = false))]
fn replay_log(text: &str, backend: &str, check_oracle: bool) -> PyResult<Vec<String>> {
    let backend: Backend = backend.parse().map_err(PyValueError::new_err)?;
    let ops = oplog::parse(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let mut out = Vec::new();
    replay::replay(&ops, &|g| backend.build(g), check_oracle, &mut out).map_err(|e| match e {
        ReplayError::Parse(p) => PyValueError::new_err(p.to_string()),
        other => PartialOrderError::new_err(other.to_string()),
    })?;
    Ok(String::from_utf8_lossy(&out).lines().map(str::to_string).collect())
}

#[pymodule]
fn pycsst(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySuffixMinArray>()?;
    m.add_class::<PyIncremental>()?;
    m.add_class::<PyDynamic>()?;
    m.add("PartialOrderError", m.py().get_type::<PartialOrderError>())?;
    m.add_function(wrap_pyfunction!(replay_log, m)?)?;
    Ok(())
}
