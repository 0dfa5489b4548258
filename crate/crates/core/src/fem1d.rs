//! Transient 1D convection-diffusion on a rod with linear elements.
//!
//! Solves `∂φ/∂t + u ∂φ/∂x − ∂/∂x(k ∂φ/∂x) + Q = 0` for constant velocity
//! `u`. The Galerkin semi-discretisation `M φ' + A φ = b` is advanced with the
//! theta scheme
//!
//! ```text
//! (M + θ·dt·A) φⁿ⁺¹ = (M − (1−θ)·dt·A) φⁿ + dt·b
//! ```
//!
//! No upwinding is applied. Convection-dominated runs (cell Péclet number
//! `u·ℓ/(2k)` above 1, or Courant number `u·dt/ℓ` well above 1) can oscillate.

use thiserror::Error;

use crate::linalg::{DenseMatrix, LinalgError, Lu};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RodError {
    #[error("invalid rod: {0}")]
    InvalidRod(String),
    #[error("invalid time step: {0}")]
    InvalidStep(String),
    #[error("state has {got} values, rod has {expected} nodes")]
    StateLength { expected: usize, got: usize },
    #[error("pure convection step requires k = 0 and Q = 0")]
    NotPureConvection,
    #[error("singular step matrix: {0}")]
    Singular(#[from] LinalgError),
}

/// Uniform rod `[0, length]` split into `n_elems` linear elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rod1D<T> {
    /// cm
    pub length: T,
    pub n_elems: usize,
    pub k: T,
    /// Convection velocity, cm/s.
    pub u1: T,
    /// Volumetric source `Q` as it appears on the left-hand side of the equation.
    pub q_src: T,
}

impl<T: Scalar> Rod1D<T> {
    pub fn validate(&self) -> Result<(), RodError> {
        let bad = |m: String| Err(RodError::InvalidRod(m));
        if !(self.length > T::zero()) || !self.length.is_finite() {
            return bad(format!("length must be positive (got {})", self.length));
        }
        if self.n_elems == 0 {
            return bad("at least one element is required".into());
        }
        if !(self.k >= T::zero()) || !self.k.is_finite() {
            return bad(format!("k must be non-negative (got {})", self.k));
        }
        if !self.u1.is_finite() || !self.q_src.is_finite() {
            return bad("u1 and Q must be finite".into());
        }
        if self.k == T::zero() && self.u1 == T::zero() && self.q_src == T::zero() {
            return bad("k, u1 and Q are all zero".into());
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.n_elems + 1
    }

    pub fn element_length(&self) -> T {
        self.length / T::from_count(self.n_elems)
    }

    pub fn node_x(&self, i: usize) -> T {
        if i == self.n_elems {
            self.length
        } else {
            self.length * T::from_count(i) / T::from_count(self.n_elems)
        }
    }

    /// `u·dt/ℓ`.
    pub fn courant(&self, dt: T) -> T {
        self.u1.abs() * dt / self.element_length()
    }

    /// `|u|·ℓ/(2k)`; infinite for pure convection.
    pub fn cell_peclet(&self) -> T {
        self.u1.abs() * self.element_length() / (T::lit(2.0) * self.k)
    }
}

/// Snapshot of the nodal field at `time`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransientState<T> {
    pub time: T,
    pub values: Vec<T>,
}

impl<T: Scalar> TransientState<T> {
    pub fn uniform(rod: &Rod1D<T>, value: T) -> Self {
        Self {
            time: T::zero(),
            values: vec![value; rod.node_count()],
        }
    }

    pub fn from_fn(rod: &Rod1D<T>, f: impl Fn(T) -> T) -> Self {
        Self {
            time: T::zero(),
            values: (0..rod.node_count()).map(|i| f(rod.node_x(i))).collect(),
        }
    }
}

/// Fixed end values; `None` leaves that end with zero diffusive flux.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EndConditions<T> {
    pub left: Option<T>,
    pub right: Option<T>,
}

impl<T: Scalar> EndConditions<T> {
    pub fn fixed(left: T, right: T) -> Self {
        Self {
            left: Some(left),
            right: Some(right),
        }
    }

    fn pinned(&self, n: usize) -> impl Iterator<Item = (usize, T)> {
        [self.left.map(|v| (0, v)), self.right.map(|v| (n - 1, v))]
            .into_iter()
            .flatten()
    }
}

/// Mass matrix `M`, operator `A` (diffusion plus convection) and load `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct RodSystem<T> {
    pub mass: DenseMatrix<T>,
    pub operator: DenseMatrix<T>,
    pub load: Vec<T>,
}

impl<T: Scalar> RodSystem<T> {
    pub fn from_parts(mass: DenseMatrix<T>, operator: DenseMatrix<T>, load: Vec<T>) -> Self {
        assert_eq!(mass.dim(), operator.dim());
        assert_eq!(mass.dim(), load.len());
        Self {
            mass,
            operator,
            load,
        }
    }

    pub fn dim(&self) -> usize {
        self.load.len()
    }

    /// `1ᵀ M φ`, the integral of the interpolated field.
    pub fn integral(&self, values: &[T]) -> T {
        self.mass.mul_vec(values).into_iter().sum()
    }

    /// Solves the steady problem `A φ = b` with the given end values.
    pub fn steady(&self, ends: &EndConditions<T>) -> Result<Vec<T>, RodError> {
        let mut a = self.operator.clone();
        let mut rhs = self.load.clone();
        pin_rows(&mut a, &mut rhs, ends);
        Ok(a.lu_solve(&rhs)?)
    }
}

/// Assembles the global rod matrices.
///
/// Per element of length `ℓ`: mass `(ℓ/6)[[2,1],[1,2]]`, diffusion
/// `(k/ℓ)[[1,−1],[−1,1]]`, convection `(u/2)[[−1,1],[−1,1]]` and load
/// `−Q·ℓ/2` at both nodes.
pub fn assemble_1d<T: Scalar>(rod: &Rod1D<T>) -> Result<RodSystem<T>, RodError> {
    rod.validate()?;
    let n = rod.node_count();
    let l = rod.element_length();
    let two = T::lit(2.0);
    let m_diag = l * two / T::lit(6.0);
    let m_off = l / T::lit(6.0);
    let d = rod.k / l;
    let c = rod.u1 / two;
    let me = [[m_diag, m_off], [m_off, m_diag]];
    let ae = [[d - c, -d + c], [-d - c, d + c]];
    let be = -rod.q_src * l / two;

    let mut mass = DenseMatrix::zeros(n);
    let mut operator = DenseMatrix::zeros(n);
    let mut load = vec![T::zero(); n];
    for e in 0..rod.n_elems {
        let ids = [e, e + 1];
        for i in 0..2 {
            for j in 0..2 {
                mass[(ids[i], ids[j])] = mass[(ids[i], ids[j])] + me[i][j];
                operator[(ids[i], ids[j])] = operator[(ids[i], ids[j])] + ae[i][j];
            }
            load[ids[i]] = load[ids[i]] + be;
        }
    }
    Ok(RodSystem {
        mass,
        operator,
        load,
    })
}

fn pin_rows<T: Scalar>(a: &mut DenseMatrix<T>, rhs: &mut [T], ends: &EndConditions<T>) {
    let n = rhs.len();
    for (i, v) in ends.pinned(n) {
        for j in 0..n {
            a[(i, j)] = T::zero();
        }
        a[(i, i)] = T::one();
        rhs[i] = v;
    }
}

fn check_step<T: Scalar>(dt: T, theta: T) -> Result<(), RodError> {
    if !(dt > T::zero()) || !dt.is_finite() {
        return Err(RodError::InvalidStep(format!(
            "dt must be positive (got {dt})"
        )));
    }
    if !(theta >= T::zero() && theta <= T::one()) {
        return Err(RodError::InvalidStep(format!(
            "theta must lie in [0, 1] (got {theta})"
        )));
    }
    Ok(())
}

/// Theta-scheme integrator with the step matrix factorised once.
#[derive(Debug, Clone)]
pub struct ThetaStepper<T> {
    explicit: DenseMatrix<T>,
    load: Vec<T>,
    factor: Lu<T>,
    ends: EndConditions<T>,
    dt: T,
}

impl<T: Scalar> ThetaStepper<T> {
    pub fn new(
        sys: &RodSystem<T>,
        dt: T,
        theta: T,
        ends: EndConditions<T>,
    ) -> Result<Self, RodError> {
        check_step(dt, theta)?;
        let mut implicit = sys.mass.add_scaled(theta * dt, &sys.operator);
        let explicit = sys.mass.add_scaled(-(T::one() - theta) * dt, &sys.operator);
        let mut dummy = vec![T::zero(); sys.dim()];
        pin_rows(&mut implicit, &mut dummy, &ends);
        Ok(Self {
            explicit,
            load: sys.load.clone(),
            factor: implicit.lu()?,
            ends,
            dt,
        })
    }

    pub fn step(&self, state: &TransientState<T>) -> Result<TransientState<T>, RodError> {
        let n = self.load.len();
        if state.values.len() != n {
            return Err(RodError::StateLength {
                expected: n,
                got: state.values.len(),
            });
        }
        let mut rhs = self.explicit.mul_vec(&state.values);
        for (r, &b) in rhs.iter_mut().zip(&self.load) {
            *r = *r + self.dt * b;
        }
        for (i, v) in self.ends.pinned(n) {
            rhs[i] = v;
        }
        Ok(TransientState {
            time: state.time + self.dt,
            values: self.factor.solve(&rhs)?,
        })
    }

    /// Runs `steps` steps, returning every state including the initial one.
    pub fn run(
        &self,
        initial: TransientState<T>,
        steps: usize,
    ) -> Result<Vec<TransientState<T>>, RodError> {
        let mut history = Vec::with_capacity(steps + 1);
        history.push(initial);
        for _ in 0..steps {
            let next = self.step(history.last().expect("non-empty"))?;
            history.push(next);
        }
        Ok(history)
    }
}

/// Advances one theta step.
pub fn theta_step<T: Scalar>(
    sys: &RodSystem<T>,
    state: &TransientState<T>,
    dt: T,
    theta: T,
    ends: EndConditions<T>,
) -> Result<TransientState<T>, RodError> {
    ThetaStepper::new(sys, dt, theta, ends)?.step(state)
}

/// Result of a pure convection step together with its Courant number.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvectionStep<T> {
    pub state: TransientState<T>,
    pub courant: T,
}

/// Theta step of `∂φ/∂t + u ∂φ/∂x = 0` (unstabilised Galerkin).
///
/// Only reliable for small Courant numbers; the returned `courant` lets the
/// caller monitor it.
pub fn pure_convection_step<T: Scalar>(
    rod: &Rod1D<T>,
    state: &TransientState<T>,
    dt: T,
    theta: T,
    ends: EndConditions<T>,
) -> Result<ConvectionStep<T>, RodError> {
    if rod.k != T::zero() || rod.q_src != T::zero() {
        return Err(RodError::NotPureConvection);
    }
    if rod.u1 == T::zero() {
        check_step(dt, theta)?;
        return Ok(ConvectionStep {
            state: TransientState {
                time: state.time + dt,
                values: state.values.clone(),
            },
            courant: T::zero(),
        });
    }
    let sys = assemble_1d(rod)?;
    Ok(ConvectionStep {
        state: theta_step(&sys, state, dt, theta, ends)?,
        courant: rod.courant(dt),
    })
}
