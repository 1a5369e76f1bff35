//! Python bindings: lenticular view conversion, ISCN parsing, karyotype
//! compilation and sex classification.

use litonto::iscn::{self, IscnKaryotype, ParseOptions};
use litonto::karyotype::{self, example_skeleton};
use litonto::lentic::{self, Diagnostic, LiterateSource, Severity, ViewKind};
use litonto::owl::{emit_frame, emit_manchester};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(litonto_py, LenticError, PyException, "Invalid literate source.");
create_exception!(litonto_py, IscnError, PyException, "Malformed ISCN karyotype string.");
create_exception!(litonto_py, KaryotypeError, PyException, "Karyotype cannot be modelled.");

/// Comment prefix, fence markers and strictness for view conversion.
#[pyclass(name = "LiterateConfig", module = "litonto_py", frozen)]
struct PyLiterateConfig {
    inner: lentic::LiterateConfig,
}

#[pymethods]
impl PyLiterateConfig {
    #[new]
    #[pyo3(signature = (prefix = ";; ", begin = "\\begin{code}", end = "\\end{code}", strict = true))]
    fn new(prefix: &str, begin: &str, end: &str, strict: bool) -> PyResult<Self> {
        let inner = lentic::LiterateConfig::new(prefix, begin, end)
            .map_err(|e| PyValueError::new_err(e.to_string()))?
            .with_strict(strict);
        Ok(PyLiterateConfig { inner })
    }

    #[getter]
    fn prefix(&self) -> &str {
        self.inner.comment_prefix()
    }

    #[getter]
    fn begin(&self) -> &str {
        self.inner.begin_marker()
    }

    #[getter]
    fn end(&self) -> &str {
        self.inner.end_marker()
    }

    #[getter]
    fn strict(&self) -> bool {
        self.inner.is_strict()
    }

    fn __repr__(&self) -> String {
        format!(
            "LiterateConfig(prefix={:?}, begin={:?}, end={:?}, strict={})",
            self.prefix(),
            self.begin(),
            self.end(),
            if self.strict() { "True" } else { "False" }
        )
    }
}

#[pyclass(name = "Diagnostic", module = "litonto_py", frozen, get_all)]
struct PyDiagnostic {
    line_number: usize,
    severity: &'static str,
    code: &'static str,
    message: String,
}

#[pymethods]
impl PyDiagnostic {
    fn __str__(&self) -> String {
        format!("line {}: {} {}", self.line_number, self.code, self.message)
    }

    fn __repr__(&self) -> String {
        format!("<Diagnostic {} line {}: {}>", self.severity, self.line_number, self.code)
    }
}

impl From<&Diagnostic> for PyDiagnostic {
    fn from(d: &Diagnostic) -> Self {
        PyDiagnostic {
            line_number: d.line_number,
            severity: match d.severity {
                Severity::Error => "error",
                Severity::Warning => "warning",
            },
            code: d.code.as_str(),
            message: d.message.clone(),
        }
    }
}

fn parse_view(view: &str) -> PyResult<ViewKind> {
    match view {
        "doc" | "document" => Ok(ViewKind::DocumentCentric),
        "code" => Ok(ViewKind::CodeCentric),
        other => Err(PyValueError::new_err(format!("view must be 'doc' or 'code', not {other:?}"))),
    }
}

fn config_or_default(config: Option<&PyLiterateConfig>) -> lentic::LiterateConfig {
    config.map(|c| c.inner.clone()).unwrap_or_default()
}

fn convert(text: &str, from: ViewKind, config: Option<&PyLiterateConfig>) -> PyResult<String> {
    let cfg = config_or_default(config);
    let (src, mut diagnostics) = LiterateSource::from_text(text, from);
    diagnostics.extend(lentic::validate(&src, &cfg));
    if let Some(first) = diagnostics.iter().find(|d| d.is_error()) {
        return Err(LenticError::new_err(first.to_string()));
    }
    lentic::propagate(&src, &cfg)
        .map(|out| out.to_text())
        .map_err(|e| LenticError::new_err(e.to_string()))
}

/// Converts code-view text into the document view.
#[pyfunction]
#[pyo3(signature = (text, config = None))]
fn to_document(text: &str, config: Option<&PyLiterateConfig>) -> PyResult<String> {
    convert(text, ViewKind::CodeCentric, config)
}

/// Converts document-view text into the code view.
#[pyfunction]
#[pyo3(signature = (text, config = None))]
fn to_code(text: &str, config: Option<&PyLiterateConfig>) -> PyResult<String> {
    convert(text, ViewKind::DocumentCentric, config)
}

/// Lists diagnostics for `text` read in the given view (`"doc"` or `"code"`).
#[pyfunction]
#[pyo3(signature = (text, view, config = None))]
fn validate(text: &str, view: &str, config: Option<&PyLiterateConfig>) -> PyResult<Vec<PyDiagnostic>> {
    let cfg = config_or_default(config);
    let (src, mut diagnostics) = LiterateSource::from_text(text, parse_view(view)?);
    diagnostics.extend(lentic::validate(&src, &cfg));
    Ok(diagnostics.iter().map(PyDiagnostic::from).collect())
}

/// A parsed ISCN karyotype.
#[pyclass(name = "Karyotype", module = "litonto_py", frozen)]
struct PyKaryotype {
    inner: IscnKaryotype,
}

#[pymethods]
impl PyKaryotype {
    #[getter]
    fn declared_count(&self) -> u32 {
        self.inner.declared_count
    }

    #[getter]
    fn sex_field(&self) -> String {
        let mut s: String = self.inner.sex_field.iter().map(|c| c.letter()).collect();
        if self.inner.sex_constitutional {
            s.push('c');
        }
        s
    }

    #[getter]
    fn events(&self) -> Vec<String> {
        self.inner.events.iter().map(ToString::to_string).collect()
    }

    /// Whether the declared count agrees with the sex field and events.
    fn count_is_consistent(&self) -> bool {
        iscn::validate_count(&self.inner)
    }

    /// Structured form as a dict.
    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let text = self.inner.to_json().to_string();
        py.import("json")?.call_method1("loads", (text,))
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Karyotype({:?})", self.inner.raw)
    }
}

fn iscn_err(e: iscn::IscnError) -> PyErr {
    IscnError::new_err((e.to_string(), e.position()))
}

fn karyotype_err(e: karyotype::KaryotypeError) -> PyErr {
    match e {
        karyotype::KaryotypeError::Iscn(e) => iscn_err(e),
        other => KaryotypeError::new_err(other.to_string()),
    }
}

fn parse(s: &str, allow_n: bool) -> PyResult<IscnKaryotype> {
    iscn::parse_checked(s, ParseOptions { allow_n }).map_err(iscn_err)
}

/// Parses an ISCN string. The error's args are `(message, offset)`.
#[pyfunction]
#[pyo3(signature = (s, allow_n = false, check_count = true))]
fn parse_iscn(s: &str, allow_n: bool, check_count: bool) -> PyResult<PyKaryotype> {
    let inner = if check_count {
        parse(s, allow_n)?
    } else {
        iscn::parse_iscn_with(s, ParseOptions { allow_n }).map_err(iscn_err)?
    };
    Ok(PyKaryotype { inner })
}

/// Manchester frame of the class modelling `s`.
#[pyfunction]
#[pyo3(signature = (s, comment = None))]
fn build_class(s: &str, comment: Option<&str>) -> PyResult<String> {
    let definition = karyotype::compile_karyotype(&parse(s, false)?).map_err(karyotype_err)?;
    let mut ontology = example_skeleton().map_err(|e| karyotype_err(e.into()))?;
    definition
        .add_to(&mut ontology, comment)
        .map_err(|e| karyotype_err(e.into()))?;
    emit_frame(&ontology, &definition.id).map_err(|e| karyotype_err(e.into()))
}

/// `"male"`, `"female"` or `"unknown"`, from the derivation chain alone.
#[pyfunction]
fn classify_sex(s: &str) -> PyResult<&'static str> {
    let definition = karyotype::compile_karyotype(&parse(s, false)?).map_err(karyotype_err)?;
    karyotype::classify_sex(&definition)
        .map(|sex| sex.as_str())
        .map_err(karyotype_err)
}

/// The example karyotype ontology in Manchester syntax.
#[pyfunction]
fn example_ontology() -> PyResult<String> {
    let ontology = karyotype::build_example_ontology().map_err(karyotype_err)?;
    emit_manchester(&ontology).map_err(|e| karyotype_err(e.into()))
}

#[pymodule]
fn litonto_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("LenticError", py.get_type::<LenticError>())?;
    m.add("IscnError", py.get_type::<IscnError>())?;
    m.add("KaryotypeError", py.get_type::<KaryotypeError>())?;
    m.add_class::<PyLiterateConfig>()?;
    m.add_class::<PyDiagnostic>()?;
    m.add_class::<PyKaryotype>()?;
    m.add_function(wrap_pyfunction!(to_document, m)?)?;
    m.add_function(wrap_pyfunction!(to_code, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(parse_iscn, m)?)?;
    m.add_function(wrap_pyfunction!(build_class, m)?)?;
    m.add_function(wrap_pyfunction!(classify_sex, m)?)?;
    m.add_function(wrap_pyfunction!(example_ontology, m)?)?;
    Ok(())
}
