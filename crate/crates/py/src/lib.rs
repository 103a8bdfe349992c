//! Python module `pyccfinder`.

use ccfinder::{self as core, CcError};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(pyccfinder, CcFailure, PyException);
create_exception!(pyccfinder, SingularError, CcFailure);
create_exception!(pyccfinder, RootNotFound, CcFailure);

fn to_py(e: CcError) -> PyErr {
    let msg = e.to_string();
    match e {
        CcError::Domain(_)
        | CcError::InvalidConfiguration(_)
        | CcError::Collision { .. }
        | CcError::NotCentered { .. } => PyValueError::new_err(msg),
        CcError::Singular { .. } => SingularError::new_err(msg),
        CcError::NoBracket { .. } | CcError::RootLost { .. } => RootNotFound::new_err(msg),
        _ => CcFailure::new_err(msg),
    }
}

#[pyclass(name = "Configuration", module = "pyccfinder", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Configuration {
    inner: core::PlanarConfiguration,
}

#[pymethods]
impl Configuration {
    #[new]
    fn new(positions: Vec<[f64; 2]>, masses: Vec<f64>) -> PyResult<Self> {
        let inner = core::PlanarConfiguration::from_pairs(&positions, &masses).map_err(to_py)?;
        Ok(Self { inner })
    }

    /// Two-triangle family member at `(x, y)` with apex mass `m`.
    #[staticmethod]
    fn family(x: f64, y: f64, m: f64) -> PyResult<Self> {
        let p = core::FamilyParams::new(x, y, m).map_err(to_py)?;
        Ok(Self {
            inner: core::build_configuration(&p),
        })
    }

    #[getter]
    fn positions(&self) -> Vec<(f64, f64)> {
        self.inner.positions().iter().map(|q| (q.x, q.y)).collect()
    }

    #[getter]
    fn masses(&self) -> Vec<f64> {
        self.inner.masses().to_vec()
    }

    fn center_of_mass(&self) -> (f64, f64) {
        let c = self.inner.center_of_mass();
        (c.x, c.y)
    }

    fn translate_to_cm(&self) -> Self {
        Self {
            inner: self.inner.translate_to_cm(),
        }
    }

    fn min_pairwise_distance(&self) -> f64 {
        self.inner.min_pairwise_distance()
    }

    fn potential_energy(&self) -> PyResult<f64> {
        core::potential_energy(&self.inner).map_err(to_py)
    }

    fn moment_of_inertia(&self) -> f64 {
        core::moment_of_inertia(&self.inner)
    }

    /// `U / I`; the configuration must be centered.
    fn lambda_of(&self) -> PyResult<f64> {
        core::lambda_of(&self.inner).map(|s| s.lambda).map_err(to_py)
    }

    /// Largest per-body norm of the direct residual.
    fn residual_direct(&self, lambda: f64) -> PyResult<f64> {
        core::cc_residual_direct(&self.inner, lambda)
            .map(|r| r.max_norm)
            .map_err(to_py)
    }

    /// Largest per-body norm of the weighted residual with `s = λ / M`.
    fn residual_weighted(&self, s: f64) -> PyResult<f64> {
        core::cc_residual_weighted(&self.inner, s)
            .map(|r| r.max_norm)
            .map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Configuration(n={})", self.inner.len())
    }
}

#[pyclass(name = "MassSolution", module = "pyccfinder", frozen, get_all)]
struct MassSolution {
    x: f64,
    y: f64,
    nullspace_dim: usize,
    singular_values: Vec<f64>,
    smallest_singular_value: f64,
    masses: Option<[f64; 6]>,
    lambda: Option<f64>,
    residual_norm: Option<f64>,
    valid: bool,
    degenerate_rank: bool,
}

impl From<core::MassSolution> for MassSolution {
    fn from(s: core::MassSolution) -> Self {
        Self {
            x: s.x,
            y: s.y,
            nullspace_dim: s.nullspace_dim,
            singular_values: s.singular_values,
            smallest_singular_value: s.smallest_singular_value,
            masses: s.masses,
            lambda: s.lambda,
            residual_norm: s.residual_norm,
            valid: s.valid,
            degenerate_rank: s.degenerate_rank,
        }
    }
}

#[pymethods]
impl MassSolution {
    fn __repr__(&self) -> String {
        format!(
            "MassSolution(x={}, y={}, nullspace_dim={}, valid={})",
            self.x, self.y, self.nullspace_dim, self.valid
        )
    }
}

#[pyclass(name = "SolutionPoint", module = "pyccfinder", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct SolutionPoint {
    y: f64,
    x: f64,
    m: f64,
    lambda: f64,
    dfdx: f64,
    residual_norm: f64,
    multi_root: bool,
}

impl From<&core::SolutionPoint> for SolutionPoint {
    fn from(p: &core::SolutionPoint) -> Self {
        Self {
            y: p.y,
            x: p.x,
            m: p.m,
            lambda: p.lambda,
            dfdx: p.dfdx,
            residual_norm: p.residual_norm,
            multi_root: p.multi_root,
        }
    }
}

#[pymethods]
impl SolutionPoint {
    fn __repr__(&self) -> String {
        format!("SolutionPoint(y={}, x={}, m={})", self.y, self.x, self.m)
    }
}

#[pyclass(name = "CurveTrace", module = "pyccfinder", frozen, get_all)]
struct CurveTrace {
    points: Vec<SolutionPoint>,
    lower_termination: &'static str,
    upper_termination: &'static str,
}

#[pymethods]
impl CurveTrace {
    fn __len__(&self) -> usize {
        self.points.len()
    }
}

#[pyclass(name = "IftCertificate", module = "pyccfinder", frozen, get_all)]
struct IftCertificate {
    x: f64,
    y: f64,
    dm1_dx: f64,
    dm1_dx_error: f64,
    dm2_dx: f64,
    dm2_dx_error: f64,
    df_dx: f64,
    df_dx_error: f64,
}

#[pyfunction]
fn mass_m1(x: f64, y: f64) -> PyResult<f64> {
    core::mass_m1(x, y).map_err(to_py)
}

#[pyfunction]
fn mass_m2(x: f64, y: f64) -> PyResult<f64> {
    core::mass_m2(x, y).map_err(to_py)
}

#[pyfunction]
fn family_f(x: f64, y: f64) -> PyResult<f64> {
    core::family_f(x, y).map_err(to_py)
}

/// `(rect_x, rect_y, apex_x)`.
#[pyfunction]
fn lambda_reduced(x: f64, y: f64, m: f64) -> PyResult<(f64, f64, f64)> {
    let p = core::FamilyParams::new(x, y, m).map_err(to_py)?;
    let l = core::lambda_reduced(&p);
    Ok((l.rect_x, l.rect_y, l.apex_x))
}

#[pyfunction]
#[pyo3(signature = (x, y, tol = core::mass_solver::RANK_TOLERANCE))]
fn solve_masses(x: f64, y: f64, tol: f64) -> PyResult<MassSolution> {
    core::solve_masses(x, y, tol).map(Into::into).map_err(to_py)
}

/// `(defects, gaps)` of the four elimination relations.
#[pyfunction]
fn check_symmetry_relations(masses: [f64; 6], y: f64) -> PyResult<([f64; 4], [f64; 4])> {
    let r = core::check_symmetry_relations(&masses, y).map_err(to_py)?;
    Ok((r.defects, r.gaps))
}

#[pyfunction]
#[pyo3(signature = (y, x_guess = 1.0, tol = 1e-12))]
fn solve_phi(y: f64, x_guess: f64, tol: f64) -> PyResult<SolutionPoint> {
    core::solve_phi(y, x_guess, tol)
        .map(|p| (&p).into())
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (y_min, y_max, step = 0.01))]
fn trace_curve(y_min: f64, y_max: f64, step: f64) -> PyResult<CurveTrace> {
    let t = core::trace_curve(y_min, y_max, step).map_err(to_py)?;
    Ok(CurveTrace {
        points: t.points.iter().map(Into::into).collect(),
        lower_termination: t.lower_termination.as_str(),
        upper_termination: t.upper_termination.as_str(),
    })
}

#[pyfunction]
fn ift_certificate(x: f64, y: f64) -> PyResult<IftCertificate> {
    let c = core::ift_certificate(x, y).map_err(to_py)?;
    Ok(IftCertificate {
        x: c.x,
        y: c.y,
        dm1_dx: c.dm1_dx,
        dm1_dx_error: c.dm1_dx_error,
        dm2_dx: c.dm2_dx,
        dm2_dx_error: c.dm2_dx_error,
        df_dx: c.df_dx,
        df_dx_error: c.df_dx_error,
    })
}

#[pymodule]
fn pyccfinder(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("CcFailure", py.get_type::<CcFailure>())?;
    m.add("SingularError", py.get_type::<SingularError>())?;
    m.add("RootNotFound", py.get_type::<RootNotFound>())?;
    m.add("SQRT3", core::sqrt3())?;
    m.add_class::<Configuration>()?;
    m.add_class::<MassSolution>()?;
    m.add_class::<SolutionPoint>()?;
    m.add_class::<CurveTrace>()?;
    m.add_class::<IftCertificate>()?;
    m.add_function(wrap_pyfunction!(mass_m1, m)?)?;
    m.add_function(wrap_pyfunction!(mass_m2, m)?)?;
    m.add_function(wrap_pyfunction!(family_f, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_reduced, m)?)?;
    m.add_function(wrap_pyfunction!(solve_masses, m)?)?;
    m.add_function(wrap_pyfunction!(check_symmetry_relations, m)?)?;
    m.add_function(wrap_pyfunction!(solve_phi, m)?)?;
    m.add_function(wrap_pyfunction!(trace_curve, m)?)?;
    m.add_function(wrap_pyfunction!(ift_certificate, m)?)?;
    Ok(())
}
