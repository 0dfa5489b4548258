//! Steady heat conduction on linear triangles with boundary flux and convection.
//!
//! The discrete system is `K T = f` with
//!
//! ```text
//! K = Σ_e ∫ k Bᵀ B dΩ + Σ_conv ∫ h Nᵀ N dΓ
//! f = Σ_e ∫ G Nᵀ dΩ + Σ_flux ∫ q Nᵀ dΓ + Σ_conv ∫ h T∞ Nᵀ dΓ
//! ```
//!
//! Sign conventions: `q > 0` is heat flowing *into* the plate and `G > 0` is heat
//! generation; both add to `f`. The plate has unit thickness.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::linalg::{norm2, DenseMatrix, LinalgError};
use crate::mesh::{twice_signed_area, Mesh2D, Wall};
use crate::Scalar;

/// Triangles with area at or below this (cm²) are rejected.
pub const MIN_TRIANGLE_AREA: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FemError {
    #[error("degenerate or inverted triangle (area {area:e})")]
    DegenerateTriangle { area: f64 },
    #[error("zero-length boundary edge")]
    ZeroLengthEdge,
    #[error("node {node} constrained to both {existing} and {requested}")]
    ConflictingDirichlet {
        node: usize,
        existing: f64,
        requested: f64,
    },
    #[error("node index {node} out of range for {count} nodes")]
    NodeOutOfRange { node: usize, count: usize },
    #[error("invalid plate parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Solve(#[from] LinalgError),
}

fn to_f64<T: Scalar>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Material and boundary data of the plate problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateParameters<T> {
    /// Conductivity, W/(cm·K).
    pub k: T,
    /// Volumetric source, W/cm³.
    pub source: T,
    /// Convection coefficient, W/(cm²·K).
    pub h: T,
    /// Boundary heat flux into the plate, W/cm².
    pub q: T,
    /// Ambient temperature, K.
    pub t_inf: T,
    /// Temperature of fixed walls, K.
    pub t_fixed: T,
}

impl<T: Scalar> Default for PlateParameters<T> {
    fn default() -> Self {
        Self {
            k: T::lit(1.5),
            source: T::zero(),
            h: T::lit(1.2),
            q: T::lit(2.0),
            t_inf: T::lit(25.0),
            t_fixed: T::lit(100.0),
        }
    }
}

impl<T: Scalar> PlateParameters<T> {
    pub fn validate(&self) -> Result<(), FemError> {
        let fields = [
            ("k", self.k),
            ("source", self.source),
            ("h", self.h),
            ("q", self.q),
            ("t_inf", self.t_inf),
            ("t_fixed", self.t_fixed),
        ];
        if let Some((name, _)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(FemError::InvalidParameters(format!("{name} is not finite")));
        }
        if !(self.k > T::zero()) {
            return Err(FemError::InvalidParameters(format!(
                "conductivity k must be positive (got {})",
                self.k
            )));
        }
        if self.h < T::zero() {
            return Err(FemError::InvalidParameters(format!(
                "convection coefficient h must be non-negative (got {})",
                self.h
            )));
        }
        Ok(())
    }
}

/// Kind of condition imposed on a wall; values come from [`PlateParameters`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WallCondition {
    /// Temperature fixed at `t_fixed`.
    FixedTemperature,
    /// Heat flux `q` into the plate.
    Flux,
    /// Exchange `h (T∞ - T)` with the ambient.
    Convection,
    Adiabatic,
}

/// One condition per wall.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryConditionSet {
    pub left: WallCondition,
    pub right: WallCondition,
    pub top: WallCondition,
    pub bottom: WallCondition,
}

impl Default for BoundaryConditionSet {
    /// Flux on the left, fixed right wall, convective top, adiabatic bottom.
    fn default() -> Self {
        Self {
            left: WallCondition::Flux,
            right: WallCondition::FixedTemperature,
            top: WallCondition::Convection,
            bottom: WallCondition::Adiabatic,
        }
    }
}

impl BoundaryConditionSet {
    pub fn uniform(c: WallCondition) -> Self {
        Self {
            left: c,
            right: c,
            top: c,
            bottom: c,
        }
    }

    pub fn get(&self, wall: Wall) -> WallCondition {
        match wall {
            Wall::Left => self.left,
            Wall::Right => self.right,
            Wall::Top => self.top,
            Wall::Bottom => self.bottom,
        }
    }

    /// Attaches parameter values to each wall.
    pub fn resolve<T: Scalar>(&self, p: &PlateParameters<T>) -> BoundaryLoads<T> {
        let load = |c: WallCondition| match c {
            WallCondition::FixedTemperature => WallLoad::Dirichlet(p.t_fixed),
            WallCondition::Flux => WallLoad::Flux(p.q),
            WallCondition::Convection => WallLoad::Convection {
                h: p.h,
                t_inf: p.t_inf,
            },
            WallCondition::Adiabatic => WallLoad::Adiabatic,
        };
        BoundaryLoads {
            left: load(self.left),
            right: load(self.right),
            top: load(self.top),
            bottom: load(self.bottom),
        }
    }
}

/// Wall condition with its values attached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WallLoad<T> {
    Dirichlet(T),
    Flux(T),
    Convection { h: T, t_inf: T },
    Adiabatic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryLoads<T> {
    pub left: WallLoad<T>,
    pub right: WallLoad<T>,
    pub top: WallLoad<T>,
    pub bottom: WallLoad<T>,
}

impl<T: Scalar> BoundaryLoads<T> {
    pub fn uniform(load: WallLoad<T>) -> Self {
        Self {
            left: load,
            right: load,
            top: load,
            bottom: load,
        }
    }

    pub fn get(&self, wall: Wall) -> WallLoad<T> {
        match wall {
            Wall::Left => self.left,
            Wall::Right => self.right,
            Wall::Top => self.top,
            Wall::Bottom => self.bottom,
        }
    }
}

/// Volumetric source term.
#[derive(Clone, Copy)]
pub enum Source<'a, T> {
    Uniform(T),
    /// Spatially varying source, integrated with the edge-midpoint rule
    /// (exact for quadratic integrands).
    Field(&'a (dyn Fn(T, T) -> T + Sync)),
}

fn triangle_area<T: Scalar>(coords: &[(T, T); 3]) -> Result<T, FemError> {
    let area = twice_signed_area(coords[0], coords[1], coords[2]) / T::lit(2.0);
    if area > T::lit(MIN_TRIANGLE_AREA) {
        Ok(area)
    } else {
        Err(FemError::DegenerateTriangle { area: to_f64(area) })
    }
}

fn edge_length<T: Scalar>(a: (T, T), b: (T, T)) -> Result<T, FemError> {
    let len = (b.0 - a.0).hypot(b.1 - a.1);
    if len > T::zero() {
        Ok(len)
    } else {
        Err(FemError::ZeroLengthEdge)
    }
}

/// Conduction matrix `k·A·BᵀB` of a linear triangle (vertices counter-clockwise).
pub fn element_stiffness<T: Scalar>(coords: &[(T, T); 3], k: T) -> Result<[[T; 3]; 3], FemError> {
    let area = triangle_area(coords)?;
    let mut b = [T::zero(); 3];
    let mut c = [T::zero(); 3];
    for i in 0..3 {
        let (xj, yj) = coords[(i + 1) % 3];
        let (xk, yk) = coords[(i + 2) % 3];
        b[i] = yj - yk;
        c[i] = xk - xj;
    }
    let scale = k / (T::lit(4.0) * area);
    let mut ke = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            ke[i][j] = scale * (b[i] * b[j] + c[i] * c[j]);
        }
    }
    Ok(ke)
}

/// Convection contribution `(h·L/6)·[[2,1],[1,2]]` of a boundary edge.
pub fn edge_convection_matrix<T: Scalar>(
    a: (T, T),
    b: (T, T),
    h: T,
) -> Result<[[T; 2]; 2], FemError> {
    let s = h * edge_length(a, b)? / T::lit(6.0);
    let two = T::lit(2.0);
    Ok([[two * s, s], [s, two * s]])
}

/// Load from a uniform inward flux `q` on a boundary edge.
pub fn edge_flux_vector<T: Scalar>(a: (T, T), b: (T, T), q: T) -> Result<[T; 2], FemError> {
    let v = q * edge_length(a, b)? / T::lit(2.0);
    Ok([v, v])
}

/// Ambient load `h·T∞` on a convective edge.
pub fn edge_ambient_vector<T: Scalar>(
    a: (T, T),
    b: (T, T),
    h: T,
    t_inf: T,
) -> Result<[T; 2], FemError> {
    let v = h * t_inf * edge_length(a, b)? / T::lit(2.0);
    Ok([v, v])
}

/// Load from a uniform source `g` over a triangle.
pub fn element_source_vector<T: Scalar>(coords: &[(T, T); 3], g: T) -> Result<[T; 3], FemError> {
    let v = g * triangle_area(coords)? / T::lit(3.0);
    Ok([v, v, v])
}

fn element_source_field<T: Scalar>(
    coords: &[(T, T); 3],
    g: &(dyn Fn(T, T) -> T + Sync),
) -> Result<[T; 3], FemError> {
    let area = triangle_area(coords)?;
    let half = T::lit(0.5);
    let mid = |i: usize, j: usize| {
        let (xi, yi) = coords[i];
        let (xj, yj) = coords[j];
        g((xi + xj) * half, (yi + yj) * half)
    };
    // Midpoint of edge (i, i+1); each shape function is 1/2 at the two
    // midpoints adjacent to its vertex and 0 at the opposite one.
    let m = [mid(0, 1), mid(1, 2), mid(2, 0)];
    let w = area / T::lit(3.0) * half;
    Ok([w * (m[0] + m[2]), w * (m[0] + m[1]), w * (m[1] + m[2])])
}

/// Global `K T = f`, plus the Dirichlet constraints applied so far.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem<T> {
    k: DenseMatrix<T>,
    f: Vec<T>,
    constrained: BTreeMap<usize, T>,
}

impl<T: Scalar> LinearSystem<T> {
    pub fn new(k: DenseMatrix<T>, f: Vec<T>) -> Self {
        assert_eq!(k.dim(), f.len(), "matrix and load vector sizes differ");
        Self {
            k,
            f,
            constrained: BTreeMap::new(),
        }
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.k
    }

    pub fn rhs(&self) -> &[T] {
        &self.f
    }

    pub fn dim(&self) -> usize {
        self.f.len()
    }

    pub fn constrained(&self) -> &BTreeMap<usize, T> {
        &self.constrained
    }

    /// Fixes `nodes` to `value` by symmetric elimination.
    ///
    /// Column entries of a constrained node move to the right-hand side, then
    /// its row and column are replaced by the identity. Constraining an already
    /// constrained node to a different value is an error.
    pub fn apply_dirichlet(&self, nodes: &[usize], value: T) -> Result<Self, FemError> {
        let mut out = self.clone();
        out.apply_dirichlet_in_place(nodes, value)?;
        Ok(out)
    }

    fn apply_dirichlet_in_place(&mut self, nodes: &[usize], value: T) -> Result<(), FemError> {
        let n = self.dim();
        for &node in nodes {
            if node >= n {
                return Err(FemError::NodeOutOfRange { node, count: n });
            }
            if let Some(&existing) = self.constrained.get(&node) {
                if existing != value {
                    return Err(FemError::ConflictingDirichlet {
                        node,
                        existing: to_f64(existing),
                        requested: to_f64(value),
                    });
                }
                continue;
            }
            for j in 0..n {
                if j == node {
                    continue;
                }
                let kji = self.k[(j, node)];
                if kji != T::zero() {
                    self.f[j] = self.f[j] - kji * value;
                    self.k[(j, node)] = T::zero();
                    self.k[(node, j)] = T::zero();
                }
            }
            self.k[(node, node)] = T::one();
            self.f[node] = value;
            self.constrained.insert(node, value);
        }
        Ok(())
    }

    /// Direct Cholesky solve.
    pub fn solve(&self) -> Result<TemperatureField<T>, FemError> {
        let chol = self.k.cholesky()?;
        Ok(TemperatureField {
            values: chol.solve(&self.f)?,
        })
    }

    /// `‖K·T − f‖ / ‖f‖` (absolute residual when `f = 0`).
    pub fn relative_residual(&self, t: &TemperatureField<T>) -> T {
        let kt = self.k.mul_vec(&t.values);
        let r: Vec<T> = kt.iter().zip(&self.f).map(|(&a, &b)| a - b).collect();
        let fnorm = norm2(&self.f);
        if fnorm > T::zero() {
            norm2(&r) / fnorm
        } else {
            norm2(&r)
        }
    }
}

/// Nodal temperatures.
#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureField<T> {
    pub values: Vec<T>,
}

impl<T: Scalar> TemperatureField<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn mean(&self) -> T {
        self.values.iter().copied().sum::<T>() / T::from_count(self.values.len().max(1))
    }
}

/// Assembles `K` and `f` without applying any Dirichlet constraint.
pub fn assemble_loads<T: Scalar>(
    mesh: &Mesh2D<T>,
    k: T,
    source: Source<'_, T>,
    loads: &BoundaryLoads<T>,
) -> Result<LinearSystem<T>, FemError> {
    let n = mesh.node_count();
    let mut kg = DenseMatrix::zeros(n);
    let mut f = vec![T::zero(); n];

    for tri in mesh.elements() {
        let coords = mesh.triangle_coords(tri);
        let ke = element_stiffness(&coords, k)?;
        let fe = match source {
            Source::Uniform(g) if g == T::zero() => [T::zero(); 3],
            Source::Uniform(g) => element_source_vector(&coords, g)?,
            Source::Field(g) => element_source_field(&coords, g)?,
        };
        for (i, &gi) in tri.nodes.iter().enumerate() {
            for (j, &gj) in tri.nodes.iter().enumerate() {
                kg[(gi, gj)] = kg[(gi, gj)] + ke[i][j];
            }
            f[gi] = f[gi] + fe[i];
        }
    }

    for edge in mesh.boundary() {
        let (a, b) = (mesh.coords(edge.a), mesh.coords(edge.b));
        let ids = [edge.a, edge.b];
        match loads.get(edge.wall) {
            WallLoad::Flux(q) => {
                let fe = edge_flux_vector(a, b, q)?;
                for i in 0..2 {
                    f[ids[i]] = f[ids[i]] + fe[i];
                }
            }
            WallLoad::Convection { h, t_inf } => {
                let ke = edge_convection_matrix(a, b, h)?;
                let fe = edge_ambient_vector(a, b, h, t_inf)?;
                for i in 0..2 {
                    for j in 0..2 {
                        kg[(ids[i], ids[j])] = kg[(ids[i], ids[j])] + ke[i][j];
                    }
                    f[ids[i]] = f[ids[i]] + fe[i];
                }
            }
            WallLoad::Dirichlet(_) | WallLoad::Adiabatic => {}
        }
    }

    Ok(LinearSystem::new(kg, f))
}

/// Assembles the plate system for `params` and `bc` (before Dirichlet application).
pub fn assemble<T: Scalar>(
    mesh: &Mesh2D<T>,
    params: &PlateParameters<T>,
    bc: &BoundaryConditionSet,
) -> Result<LinearSystem<T>, FemError> {
    params.validate()?;
    assemble_loads(
        mesh,
        params.k,
        Source::Uniform(params.source),
        &bc.resolve(params),
    )
}

/// Applies every Dirichlet wall of `loads`, in the fixed order left, right, top, bottom.
pub fn apply_wall_dirichlet<T: Scalar>(
    sys: &LinearSystem<T>,
    mesh: &Mesh2D<T>,
    loads: &BoundaryLoads<T>,
) -> Result<LinearSystem<T>, FemError> {
    let mut out = sys.clone();
    for wall in Wall::ALL {
        if let WallLoad::Dirichlet(value) = loads.get(wall) {
            out.apply_dirichlet_in_place(&mesh.nodes_on_wall(wall), value)?;
        }
    }
    Ok(out)
}

/// Assemble, constrain and solve the plate problem.
pub fn solve_plate<T: Scalar>(
    mesh: &Mesh2D<T>,
    params: &PlateParameters<T>,
    bc: &BoundaryConditionSet,
) -> Result<TemperatureField<T>, FemError> {
    let sys = assemble(mesh, params, bc)?;
    apply_wall_dirichlet(&sys, mesh, &bc.resolve(params))?.solve()
}

/// Heat entering and leaving the plate for a solved field (W per unit thickness).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatBalance<T> {
    pub flux_in: T,
    pub source_in: T,
    pub convection_in: T,
    /// Heat removed through fixed-temperature nodes, from the nodal reactions.
    pub dirichlet_out: T,
}

impl<T: Scalar> HeatBalance<T> {
    pub fn total_in(&self) -> T {
        self.flux_in + self.source_in + self.convection_in
    }

    /// `|in − out| / max(|in|, |out|)`.
    pub fn relative_imbalance(&self) -> T {
        let total = self.total_in();
        let scale = total.abs().max(self.dirichlet_out.abs());
        if scale > T::zero() {
            (total - self.dirichlet_out).abs() / scale
        } else {
            T::zero()
        }
    }
}

/// Balances boundary and source heat against the reactions at constrained nodes.
///
/// `unconstrained` is the assembled system before Dirichlet application and
/// `fixed` the set of constrained nodes.
pub fn heat_balance<T: Scalar>(
    mesh: &Mesh2D<T>,
    source: T,
    loads: &BoundaryLoads<T>,
    unconstrained: &LinearSystem<T>,
    fixed: &[usize],
    field: &TemperatureField<T>,
) -> HeatBalance<T> {
    let two = T::lit(2.0);
    let mut flux_in = T::zero();
    let mut convection_in = T::zero();
    for edge in mesh.boundary() {
        let len = mesh.edge_length(edge);
        match loads.get(edge.wall) {
            WallLoad::Flux(q) => flux_in = flux_in + q * len,
            WallLoad::Convection { h, t_inf } => {
                let mean_t = (field.values[edge.a] + field.values[edge.b]) / two;
                convection_in = convection_in + h * len * (t_inf - mean_t);
            }
            _ => {}
        }
    }
    let source_in = source * mesh.total_area();
    let kt = unconstrained.matrix().mul_vec(&field.values);
    let dirichlet_out = -fixed
        .iter()
        .map(|&i| kt[i] - unconstrained.rhs()[i])
        .sum::<T>();
    HeatBalance {
        flux_in,
        source_in,
        convection_in,
        dirichlet_out,
    }
}
