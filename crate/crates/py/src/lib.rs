//! Python bindings: `import mse_lab`.
//!
//! Instances, layouts and route sets are opaque handles; reports come back as
//! plain dicts and lists so scripts never need the Rust types.

use mse_core::gadgets::{make_bundle, make_crossing, make_feather, make_grid, make_rainbow, GadgetHandle};
use mse_core::graph::{export, ExportFormat};
use mse_core::oracles::{
    build_canonical_routes, check_invariant_1, check_invariant_2, min_cover_size, min_shared_flow, solve_mse_exact_flow, solve_mse_exact_paths,
    verify_routes, FlowConfig, InvariantReport, MseVerdict, PathsConfig, RouteSet as CoreRoutes, RouteVerdict, DEFAULT_VC_CAP,
};
use mse_core::reduction::{continue_pipeline, estimate_pipeline, run_pipeline, LayoutMap, MseInstance as CoreInstance, Stage, VcInstance as CoreVc};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn parse_stage(name: &str) -> PyResult<Stage> {
    name.parse().map_err(value_err)
}

#[pyclass(name = "VcInstance", module = "mse_lab", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyVc(CoreVc);

#[pymethods]
impl PyVc {
    #[new]
    fn new(n: u32, edges: Vec<(u32, u32)>, k: u32) -> PyResult<Self> {
        CoreVc::new(n, edges, k).map(Self).map_err(value_err)
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        text.parse().map(Self).map_err(value_err)
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    #[getter]
    fn n(&self) -> u32 {
        self.0.n
    }

    #[getter]
    fn m(&self) -> u32 {
        self.0.m()
    }

    #[getter]
    fn k(&self) -> u32 {
        self.0.k
    }

    #[getter]
    fn edges(&self) -> Vec<(u32, u32)> {
        self.0.edges.clone()
    }

    fn is_cover(&self, cover: Vec<u32>) -> bool {
        self.0.is_cover(&cover)
    }

    /// Brute-force minimum cover size; refuses graphs above the vertex cap.
    fn min_cover_size(&self) -> PyResult<u32> {
        min_cover_size(&self.0, DEFAULT_VC_CAP).map_err(runtime_err)
    }

    fn __repr__(&self) -> String {
        format!("VcInstance(n={}, m={}, k={})", self.0.n, self.0.m(), self.0.k)
    }
}

#[pyclass(name = "MseInstance", module = "mse_lab", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyInstance {
    inst: CoreInstance,
    stage: Option<Stage>,
    digest: Option<String>,
}

#[pymethods]
impl PyInstance {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let (inst, file) = CoreInstance::from_json(text.as_bytes()).map_err(value_err)?;
        Ok(Self {
            inst,
            stage: file.stage,
            digest: file.layout_digest,
        })
    }

    #[pyo3(signature = (layout = None))]
    fn to_json(&self, layout: Option<&PyLayout>) -> String {
        let bytes = self.inst.to_json(self.stage, layout.map(|l| &l.0));
        String::from_utf8(bytes).expect("json is utf-8")
    }

    #[getter]
    fn p(&self) -> u64 {
        self.inst.p
    }

    #[getter]
    fn k(&self) -> u64 {
        self.inst.k
    }

    #[getter]
    fn stage(&self) -> Option<&'static str> {
        self.stage.map(Stage::name)
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inst.graph.vertex_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inst.graph.edge_count()
    }

    fn with_budget(&self, k: u64) -> Self {
        Self {
            inst: self.inst.with_budget(k),
            ..self.clone()
        }
    }

    fn with_routes(&self, p: u64) -> PyResult<Self> {
        let inst = CoreInstance::new(self.inst.graph.clone(), self.inst.s, self.inst.t, p, self.inst.k).map_err(value_err)?;
        Ok(Self { inst, ..self.clone() })
    }

    /// `"dot"` or `"json"`.
    fn export(&self, format: &str) -> PyResult<String> {
        let format: ExportFormat = format.parse().map_err(value_err)?;
        Ok(String::from_utf8(export(&self.inst.graph, format)).expect("export is utf-8"))
    }

    fn __repr__(&self) -> String {
        format!(
            "MseInstance(stage={}, vertices={}, edges={}, p={}, k={})",
            self.stage.map_or("none", Stage::name),
            self.inst.graph.vertex_count(),
            self.inst.graph.edge_count(),
            self.inst.p,
            self.inst.k
        )
    }
}

impl PyInstance {
    fn check_layout(&self, layout: &PyLayout) -> PyResult<()> {
        match &self.digest {
            Some(d) if *d != layout.0.digest() => Err(value_err("layout does not belong to this instance")),
            _ => Ok(()),
        }
    }
}

#[pyclass(name = "Layout", module = "mse_lab", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyLayout(LayoutMap);

#[pymethods]
impl PyLayout {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Self).map_err(value_err)
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("layout serialises")
    }

    fn digest(&self) -> String {
        self.0.digest()
    }

    #[getter]
    fn stage(&self) -> &'static str {
        self.0.stage.name()
    }
}

#[pyclass(name = "RouteSet", module = "mse_lab", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyRoutes(CoreRoutes);

#[pymethods]
impl PyRoutes {
    #[staticmethod]
    fn from_json(text: &str, instance: &PyInstance) -> PyResult<Self> {
        CoreRoutes::from_json(text.as_bytes(), &instance.inst.graph).map(Self).map_err(value_err)
    }

    fn to_json(&self) -> String {
        String::from_utf8(self.0.to_json()).expect("json is utf-8")
    }

    /// Vertex ids of each route, `s` first.
    fn vertices(&self) -> Vec<Vec<u32>> {
        self.0.routes.iter().map(|r| r.vertices.iter().map(|v| v.0).collect()).collect()
    }

    /// Edge ids of each route, in travel order.
    fn edges(&self) -> Vec<Vec<u32>> {
        self.0.routes.iter().map(|r| r.edges.iter().map(|e| e.0).collect()).collect()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

/// Runs the reduction up to `stage` and returns `(instance, layout, report)`,
/// where `report` is the per-stage summary as a dict.
#[pyfunction]
#[pyo3(signature = (vc, stage = "base"))]
fn reduce<'py>(py: Python<'py>, vc: &PyVc, stage: &str) -> PyResult<(PyInstance, PyLayout, Bound<'py, PyAny>)> {
    let stage = parse_stage(stage)?;
    let (inst, layout, report) = py.detach(|| run_pipeline(&vc.0, stage)).map_err(runtime_err)?;
    let report = json_to_py(py, &serde_json::to_value(&report).expect("report serialises"))?;
    Ok((wrap(inst, &layout), PyLayout(layout), report))
}

/// Continues a saved instance and its layout to a later stage.
#[pyfunction]
fn resume<'py>(py: Python<'py>, instance: &PyInstance, layout: &PyLayout, stage: &str) -> PyResult<(PyInstance, PyLayout, Bound<'py, PyAny>)> {
    instance.check_layout(layout)?;
    let stage = parse_stage(stage)?;
    let (inst, layout) = (instance.inst.clone(), layout.0.clone());
    let (inst, layout, report) = py.detach(|| continue_pipeline(inst, layout, stage)).map_err(runtime_err)?;
    let report = json_to_py(py, &serde_json::to_value(&report).expect("report serialises"))?;
    Ok((wrap(inst, &layout), PyLayout(layout), report))
}

fn wrap(inst: CoreInstance, layout: &LayoutMap) -> PyInstance {
    PyInstance {
        inst,
        stage: Some(layout.stage),
        digest: Some(layout.digest()),
    }
}

/// Closed-form vertex, edge and budget counts for every stage.
#[pyfunction]
fn estimate<'py>(py: Python<'py>, vc: &PyVc) -> PyResult<Bound<'py, PyAny>> {
    let est = estimate_pipeline(&vc.0).map_err(runtime_err)?;
    json_to_py(py, &serde_json::to_value(est).expect("estimate serialises"))
}

#[pyfunction]
fn canonical_routes(instance: &PyInstance, layout: &PyLayout, cover: Vec<u32>) -> PyResult<PyRoutes> {
    instance.check_layout(layout)?;
    build_canonical_routes(&instance.inst, &layout.0, &cover).map(PyRoutes).map_err(value_err)
}

/// Returns `{"accept", "reason", "shared", "count"}`; `shared` and `count`
/// are `None` when the routes are structurally broken.
#[pyfunction]
fn verify<'py>(py: Python<'py>, instance: &PyInstance, routes: &PyRoutes) -> PyResult<Bound<'py, PyDict>> {
    let verdict = verify_routes(&instance.inst, &routes.0);
    let out = PyDict::new(py);
    out.set_item("accept", verdict.is_accept())?;
    let reason = match &verdict {
        RouteVerdict::Accept(_) => None,
        RouteVerdict::Reject { reason, .. } => Some(reason.to_string()),
    };
    out.set_item("reason", reason)?;
    let report = verdict.report();
    out.set_item("shared", report.map(|r| r.shared.iter().map(|e| e.0).collect::<Vec<_>>()))?;
    out.set_item("count", report.map(|r| r.count))?;
    Ok(out)
}

fn invariant_dict<'py>(py: Python<'py>, r: &InvariantReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("holds", r.holds)?;
    d.set_item("per_row", r.per_row.clone())?;
    d.set_item("validation", r.validation)?;
    d.set_item("violations", r.violations.clone())?;
    Ok(d)
}

/// Both structural invariants of a route set against its layout.
#[pyfunction]
fn invariants<'py>(py: Python<'py>, layout: &PyLayout, routes: &PyRoutes) -> PyResult<(Bound<'py, PyDict>, Bound<'py, PyDict>)> {
    let one = check_invariant_1(&layout.0, &routes.0).map_err(value_err)?;
    let two = check_invariant_2(&layout.0, &routes.0).map_err(value_err)?;
    Ok((invariant_dict(py, &one)?, invariant_dict(py, &two)?))
}

fn verdict_tuple(v: MseVerdict) -> (bool, Option<Vec<u32>>, Option<PyRoutes>) {
    match v {
        MseVerdict::Yes { shared, routes } => (true, Some(shared.iter().map(|e| e.0).collect()), Some(PyRoutes(routes))),
        MseVerdict::No => (false, None, None),
    }
}

/// Exact decision by shared-set enumeration and max flow.
/// Returns `(yes, shared_edges, routes)`.
#[pyfunction]
#[pyo3(signature = (instance, max_edges = 200, max_k = 4, jobs = 0))]
fn solve_flow(py: Python<'_>, instance: &PyInstance, max_edges: usize, max_k: u64, jobs: usize) -> PyResult<(bool, Option<Vec<u32>>, Option<PyRoutes>)> {
    let cfg = FlowConfig { max_edges, max_k, jobs };
    py.detach(|| solve_mse_exact_flow(&instance.inst, &cfg)).map(verdict_tuple).map_err(runtime_err)
}

/// Exact decision by simple-path enumeration.
#[pyfunction]
#[pyo3(signature = (instance, max_paths = 100_000, max_p = 5))]
fn solve_paths(py: Python<'_>, instance: &PyInstance, max_paths: usize, max_p: u64) -> PyResult<(bool, Option<Vec<u32>>, Option<PyRoutes>)> {
    let cfg = PathsConfig { max_paths, max_p };
    py.detach(|| solve_mse_exact_paths(&instance.inst, &cfg)).map(verdict_tuple).map_err(runtime_err)
}

/// Smallest feasible budget, or `None` when no budget works.
#[pyfunction]
#[pyo3(signature = (instance, max_edges = 200, max_k = 4, jobs = 0))]
fn min_shared(py: Python<'_>, instance: &PyInstance, max_edges: usize, max_k: u64, jobs: usize) -> PyResult<Option<u64>> {
    let cfg = FlowConfig { max_edges, max_k, jobs };
    py.detach(|| min_shared_flow(&instance.inst, &cfg)).map_err(runtime_err)
}

/// A standalone gadget as an instance between its terminals.
#[pyfunction]
#[pyo3(signature = (kind, params, p, k = 0))]
fn gadget(kind: &str, params: Vec<u32>, p: u64, k: u64) -> PyResult<PyInstance> {
    let arg = |i: usize| params.get(i).copied().ok_or_else(|| value_err(format!("{kind}: missing parameter {}", i + 1)));
    let h: GadgetHandle = match kind {
        "bundle" => make_bundle(arg(0)?, arg(1)?),
        "feather" => make_feather(arg(0)?, arg(1)?, arg(2)?),
        "rainbow" => make_rainbow(arg(0)?, arg(1)?),
        "grid" => make_grid(arg(0)?, arg(1)?),
        "crossing" => make_crossing(arg(0)?),
        other => return Err(value_err(format!("unknown gadget {other:?}"))),
    }
    .map_err(value_err)?;
    let inst = CoreInstance::new(h.graph, h.terminals.0, h.terminals.1, p, k).map_err(value_err)?;
    Ok(PyInstance {
        inst,
        stage: None,
        digest: None,
    })
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    let json = py.import("json")?;
    json.call_method1("loads", (v.to_string(),))
}

#[pymodule]
fn mse_lab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyVc>()?;
    m.add_class::<PyInstance>()?;
    m.add_class::<PyLayout>()?;
    m.add_class::<PyRoutes>()?;
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    m.add_function(wrap_pyfunction!(resume, m)?)?;
    m.add_function(wrap_pyfunction!(estimate, m)?)?;
    m.add_function(wrap_pyfunction!(canonical_routes, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(invariants, m)?)?;
    m.add_function(wrap_pyfunction!(solve_flow, m)?)?;
    m.add_function(wrap_pyfunction!(solve_paths, m)?)?;
    m.add_function(wrap_pyfunction!(min_shared, m)?)?;
    m.add_function(wrap_pyfunction!(gadget, m)?)?;
    Ok(())
}
