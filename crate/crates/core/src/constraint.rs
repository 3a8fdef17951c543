//! Contact constraints and projection onto their zero set.
//!
//! A [`ConstraintSet`] stacks one residual per contact point. Sliding contacts measure
//! the distance of the contact point to their surface; transition contacts switch
//! between "free" (residual 0), their start surface and their goal surface according
//! to the mode currently stored on the spec.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{distance_to_mesh, Point3, TriMesh};
use crate::robot::{Configuration, KinematicChain};

/// Default residual tolerance ε_f in meters.
pub const DEFAULT_TOLERANCE: f64 = 1e-4;

/// Which constraint a contact point currently obeys.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(into = "u8", try_from = "u8")]
pub enum Mode {
    /// No contact; the residual is identically zero.
    Free = 0,
    /// In contact with the start surface (the only surface of a sliding contact).
    Start = 1,
    /// In contact with the goal surface.
    Goal = 2,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Free, Mode::Start, Mode::Goal];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl From<Mode> for u8 {
    fn from(m: Mode) -> u8 {
        m as u8
    }
}

impl TryFrom<u8> for Mode {
    type Error = String;
    fn try_from(v: u8) -> Result<Self, String> {
        match v {
            0 => Ok(Mode::Free),
            1 => Ok(Mode::Start),
            2 => Ok(Mode::Goal),
            other => Err(format!("mode must be 0, 1 or 2, got {other}")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", *self as u8)
    }
}

/// One mode per contact spec. Sliding specs always hold [`Mode::Start`].
pub type ModeVector = Vec<Mode>;

pub fn format_modes(modes: &[Mode]) -> String {
    let inner: Vec<String> = modes.iter().map(|m| m.to_string()).collect();
    format!("({})", inner.join(","))
}

#[derive(Debug, Clone)]
pub enum ContactKind {
    Sliding {
        surface: Arc<TriMesh>,
    },
    Transition {
        start: Arc<TriMesh>,
        goal: Arc<TriMesh>,
        mode: Mode,
    },
}

#[derive(Debug, Clone)]
pub struct ContactSpec {
    pub contact: usize,
    pub kind: ContactKind,
}

impl ContactSpec {
    pub fn sliding(contact: usize, surface: Arc<TriMesh>) -> Self {
        ContactSpec {
            contact,
            kind: ContactKind::Sliding { surface },
        }
    }

    pub fn transition(contact: usize, start: Arc<TriMesh>, goal: Arc<TriMesh>) -> Self {
        ContactSpec {
            contact,
            kind: ContactKind::Transition {
                start,
                goal,
                mode: Mode::Start,
            },
        }
    }

    pub fn is_transition(&self) -> bool {
        matches!(self.kind, ContactKind::Transition { .. })
    }

    pub fn mode(&self) -> Mode {
        match self.kind {
            ContactKind::Sliding { .. } => Mode::Start,
            ContactKind::Transition { mode, .. } => mode,
        }
    }

    /// Surface the contact is bound to under `mode`, if any.
    pub fn surface_for(&self, mode: Mode) -> Option<&Arc<TriMesh>> {
        match (&self.kind, mode) {
            (ContactKind::Sliding { surface }, _) => Some(surface),
            (ContactKind::Transition { .. }, Mode::Free) => None,
            (ContactKind::Transition { start, .. }, Mode::Start) => Some(start),
            (ContactKind::Transition { goal, .. }, Mode::Goal) => Some(goal),
        }
    }
}

/// Distance of contact point `contact` to `surface` at configuration `q`.
pub fn sliding_constraint(
    chain: &KinematicChain,
    q: &Configuration,
    contact: usize,
    surface: &TriMesh,
) -> Result<f64> {
    let p = chain.contact_point_world(q, contact)?;
    Ok(distance_to_mesh(&p, surface)?.distance)
}

/// Three-mode transition residual: 0 when free, otherwise the sliding residual on the
/// start or goal surface.
pub fn transition_constraint(
    chain: &KinematicChain,
    q: &Configuration,
    contact: usize,
    mode: Mode,
    start: &TriMesh,
    goal: &TriMesh,
) -> Result<f64> {
    let p = chain.contact_point_world(q, contact)?;
    match mode {
        Mode::Free => Ok(0.0),
        Mode::Start => Ok(distance_to_mesh(&p, start)?.distance),
        Mode::Goal => Ok(distance_to_mesh(&p, goal)?.distance),
    }
}

/// Damped least-squares Newton settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectionOptions {
    pub damping: f64,
    pub max_iterations: usize,
    pub min_step: f64,
    pub fd_step: f64,
}

impl Default for ProjectionOptions {
    fn default() -> Self {
        ProjectionOptions {
            damping: 1e-6,
            max_iterations: 50,
            min_step: 1e-10,
            fd_step: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub q: Configuration,
    pub success: bool,
    pub iterations: usize,
}

/// The stacked constraint function f(q) for one robot.
#[derive(Debug, Clone)]
pub struct ConstraintSet {
    chain: Arc<KinematicChain>,
    specs: Vec<ContactSpec>,
    tolerance: f64,
    options: ProjectionOptions,
}

impl ConstraintSet {
    /// `specs` must cover every contact point of `chain` exactly once; they are stored
    /// in contact-id order so residual `k` belongs to contact `k`.
    pub fn new(chain: Arc<KinematicChain>, mut specs: Vec<ContactSpec>, tolerance: f64) -> Result<Self> {
        if !(tolerance > 0.0) {
            return Err(Error::InvalidConstraints(format!(
                "tolerance must be positive, got {tolerance}"
            )));
        }
        specs.sort_by_key(|s| s.contact);
        if specs.len() != chain.contacts().len()
            || specs.iter().enumerate().any(|(i, s)| s.contact != i)
        {
            return Err(Error::InvalidConstraints(format!(
                "need exactly one spec per contact point (0..{})",
                chain.contacts().len()
            )));
        }
        for s in &specs {
            let surfaces: Vec<&Arc<TriMesh>> = match &s.kind {
                ContactKind::Sliding { surface } => vec![surface],
                ContactKind::Transition { start, goal, .. } => vec![start, goal],
            };
            if let Some(m) = surfaces.iter().find(|m| m.is_empty()) {
                return Err(Error::EmptySurface(m.name().to_string()));
            }
        }
        Ok(ConstraintSet {
            chain,
            specs,
            tolerance,
            options: ProjectionOptions::default(),
        })
    }

    pub fn with_options(mut self, options: ProjectionOptions) -> Self {
        self.options = options;
        self
    }

    pub fn chain(&self) -> &Arc<KinematicChain> {
        &self.chain
    }

    pub fn specs(&self) -> &[ContactSpec] {
        &self.specs
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn options(&self) -> &ProjectionOptions {
        &self.options
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn modes(&self) -> ModeVector {
        self.specs.iter().map(ContactSpec::mode).collect()
    }

    /// Checks that `modes` has one entry per spec and that sliding slots hold
    /// [`Mode::Start`].
    pub fn check_modes(&self, modes: &[Mode]) -> Result<()> {
        if modes.len() != self.specs.len() {
            return Err(Error::ModeLengthMismatch(modes.len(), self.specs.len()));
        }
        for (s, &m) in self.specs.iter().zip(modes) {
            if !s.is_transition() && m != Mode::Start {
                return Err(Error::InvalidConstraints(format!(
                    "contact {} slides on a single surface and must stay in mode 1",
                    s.contact
                )));
            }
        }
        Ok(())
    }

    pub fn set_modes(&mut self, modes: &[Mode]) -> Result<()> {
        self.check_modes(modes)?;
        for (s, &m) in self.specs.iter_mut().zip(modes) {
            if let ContactKind::Transition { mode, .. } = &mut s.kind {
                *mode = m;
            }
        }
        Ok(())
    }

    /// Sets the mode of a transition spec. Sliding specs ignore the call.
    pub fn set_mode(&mut self, spec: usize, m: Mode) {
        if let ContactKind::Transition { mode, .. } = &mut self.specs[spec].kind {
            *mode = m;
        }
    }

    /// Residuals under the stored modes.
    pub fn evaluate(&self, q: &Configuration) -> Result<DVector<f64>> {
        let modes = self.modes();
        self.evaluate_with(q, &modes)
    }

    pub fn evaluate_with(&self, q: &Configuration, modes: &[Mode]) -> Result<DVector<f64>> {
        self.check_modes(modes)?;
        let points = self.chain.contact_points_world(q)?;
        Ok(self.residuals(&points, modes))
    }

    fn residuals(&self, points: &[Point3], modes: &[Mode]) -> DVector<f64> {
        DVector::from_iterator(
            self.specs.len(),
            self.specs.iter().zip(modes).map(|(s, &m)| match s.surface_for(m) {
                // surfaces were checked non-empty at construction
                Some(mesh) => distance_to_mesh(&points[s.contact], mesh)
                    .map(|d| d.distance)
                    .unwrap_or(f64::INFINITY),
                None => 0.0,
            }),
        )
    }

    pub fn is_satisfied(&self, q: &Configuration) -> Result<bool> {
        Ok(max_abs(&self.evaluate(q)?) <= self.tolerance)
    }

    pub fn is_satisfied_with(&self, q: &Configuration, modes: &[Mode]) -> Result<bool> {
        Ok(max_abs(&self.evaluate_with(q, modes)?) <= self.tolerance)
    }

    /// Central-difference Jacobian (k × n) under the stored modes.
    pub fn jacobian(&self, q: &Configuration) -> Result<DMatrix<f64>> {
        let modes = self.modes();
        self.jacobian_with(q, &modes)
    }

    pub fn jacobian_with(&self, q: &Configuration, modes: &[Mode]) -> Result<DMatrix<f64>> {
        self.check_modes(modes)?;
        let n = self.chain.dof();
        if q.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: q.dim() });
        }
        Ok(self.central_difference(q, modes))
    }

    fn central_difference(&self, q: &Configuration, modes: &[Mode]) -> DMatrix<f64> {
        let n = self.chain.dof();
        let k = self.specs.len();
        let h = self.options.fd_step;
        let mut jac = DMatrix::zeros(k, n);
        if modes.iter().zip(&self.specs).all(|(&m, s)| s.surface_for(m).is_none()) {
            return jac;
        }
        let mut probe = q.clone();
        for j in 0..n {
            let orig = probe.as_slice()[j];
            probe.as_mut_slice()[j] = orig + h;
            let plus = self.residuals_at(&probe, modes);
            probe.as_mut_slice()[j] = orig - h;
            let minus = self.residuals_at(&probe, modes);
            probe.as_mut_slice()[j] = orig;
            jac.set_column(j, &((plus - minus) / (2.0 * h)));
        }
        jac
    }

    fn residuals_at(&self, q: &Configuration, modes: &[Mode]) -> DVector<f64> {
        // dimension was checked by the caller
        let points = self
            .chain
            .contact_points_world(q)
            .expect("configuration dimension checked");
        self.residuals(&points, modes)
    }

    /// Projects `q` under the stored modes.
    pub fn project(&self, q: &Configuration) -> Result<Projection> {
        let modes = self.modes();
        self.project_with(q, &modes)
    }

    /// Damped least-squares Newton projection onto `{q | f(q) <= ε_f}`, clamping to
    /// joint limits after every step.
    pub fn project_with(&self, q: &Configuration, modes: &[Mode]) -> Result<Projection> {
        self.check_modes(modes)?;
        let n = self.chain.dof();
        if q.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: q.dim() });
        }
        let opts = &self.options;
        let mut x = self.chain.clamp_to_limits(q);
        for iteration in 0..=opts.max_iterations {
            let f = self.residuals_at(&x, modes);
            let worst = max_abs(&f);
            if worst <= self.tolerance {
                return Ok(Projection { q: x, success: true, iterations: iteration });
            }
            if iteration == opts.max_iterations || !worst.is_finite() {
                break;
            }
            let jac = self.central_difference(&x, modes);
            let mut gram = &jac * jac.transpose();
            for i in 0..gram.nrows() {
                gram[(i, i)] += opts.damping;
            }
            let Some(chol) = gram.cholesky() else { break };
            let step = jac.transpose() * chol.solve(&f);
            let next: Configuration = x
                .as_slice()
                .iter()
                .zip(step.iter())
                .map(|(a, d)| a - d)
                .collect::<Vec<_>>()
                .into();
            let next = self.chain.clamp_to_limits(&next);
            let moved = next.distance(&x);
            x = next;
            if !(moved >= opts.min_step) {
                break;
            }
        }
        let iterations = opts.max_iterations;
        Ok(Projection { q: x, success: false, iterations })
    }
}

pub(crate) fn max_abs(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
