//! Structured triangular meshes of an axis-aligned rectangular plate.
//!
//! The plate occupies `[0, width] x [0, height]` (centimetres). Nodes are laid
//! out row by row from the bottom-left corner, so node `(i, j)` has index
//! `j * (nx + 1) + i`. Each grid cell is split along its lower-left to
//! upper-right diagonal into two counter-clockwise triangles.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshError {
    #[error("plate dimensions must be positive (got {width} x {height})")]
    NonPositiveDimensions { width: f64, height: f64 },
    #[error("grid subdivisions must be at least 1 (got nx = {nx}, ny = {ny})")]
    ZeroSubdivisions { nx: usize, ny: usize },
    #[error("invalid mesh: {0}")]
    Invalid(String),
}

/// One side of the rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Wall {
    Left,
    Right,
    Top,
    Bottom,
}

impl Wall {
    pub const ALL: [Wall; 4] = [Wall::Left, Wall::Right, Wall::Top, Wall::Bottom];

    pub fn name(self) -> &'static str {
        match self {
            Wall::Left => "left",
            Wall::Right => "right",
            Wall::Top => "top",
            Wall::Bottom => "bottom",
        }
    }
}

impl fmt::Display for Wall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node2D<T> {
    pub id: usize,
    pub x: T,
    pub y: T,
}

/// Linear triangle, vertices in counter-clockwise order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triangle {
    pub nodes: [usize; 3],
}

/// Boundary segment `a -> b`, oriented counter-clockwise around the plate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub a: usize,
    pub b: usize,
    pub wall: Wall,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh2D<T> {
    nodes: Vec<Node2D<T>>,
    elements: Vec<Triangle>,
    boundary: Vec<BoundaryEdge>,
    width: T,
    height: T,
}

/// Twice the signed area of the triangle `p0, p1, p2`.
pub fn twice_signed_area<T: Scalar>(p0: (T, T), p1: (T, T), p2: (T, T)) -> T {
    (p1.0 - p0.0) * (p2.1 - p0.1) - (p2.0 - p0.0) * (p1.1 - p0.1)
}

impl<T: Scalar> Mesh2D<T> {
    /// Uniform `nx x ny` grid over `[0, width] x [0, height]`, two triangles per cell.
    pub fn structured(width: T, height: T, nx: usize, ny: usize) -> Result<Self, MeshError> {
        if !(width > T::zero() && height > T::zero()) {
            return Err(MeshError::NonPositiveDimensions {
                width: width.to_f64().unwrap_or(f64::NAN),
                height: height.to_f64().unwrap_or(f64::NAN),
            });
        }
        if nx == 0 || ny == 0 {
            return Err(MeshError::ZeroSubdivisions { nx, ny });
        }

        let stride = nx + 1;
        let index = |i: usize, j: usize| j * stride + i;
        // Exact endpoints so that wall nodes sit exactly on the walls.
        let coord = |k: usize, n: usize, extent: T| {
            if k == n {
                extent
            } else {
                extent * T::from_count(k) / T::from_count(n)
            }
        };

        let mut nodes = Vec::with_capacity(stride * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                nodes.push(Node2D {
                    id: index(i, j),
                    x: coord(i, nx, width),
                    y: coord(j, ny, height),
                });
            }
        }

        let mut elements = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let n00 = index(i, j);
                let n10 = index(i + 1, j);
                let n11 = index(i + 1, j + 1);
                let n01 = index(i, j + 1);
                elements.push(Triangle {
                    nodes: [n00, n10, n11],
                });
                elements.push(Triangle {
                    nodes: [n00, n11, n01],
                });
            }
        }

        let mut boundary = Vec::with_capacity(2 * (nx + ny));
        for i in 0..nx {
            boundary.push(BoundaryEdge {
                a: index(i, 0),
                b: index(i + 1, 0),
                wall: Wall::Bottom,
            });
        }
        for j in 0..ny {
            boundary.push(BoundaryEdge {
                a: index(nx, j),
                b: index(nx, j + 1),
                wall: Wall::Right,
            });
        }
        for i in (0..nx).rev() {
            boundary.push(BoundaryEdge {
                a: index(i + 1, ny),
                b: index(i, ny),
                wall: Wall::Top,
            });
        }
        for j in (0..ny).rev() {
            boundary.push(BoundaryEdge {
                a: index(0, j + 1),
                b: index(0, j),
                wall: Wall::Left,
            });
        }

        let mesh = Self {
            nodes,
            elements,
            boundary,
            width,
            height,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn nodes(&self) -> &[Node2D<T>] {
        &self.nodes
    }

    pub fn elements(&self) -> &[Triangle] {
        &self.elements
    }

    pub fn boundary(&self) -> &[BoundaryEdge] {
        &self.boundary
    }

    pub fn width(&self) -> T {
        self.width
    }

    pub fn height(&self) -> T {
        self.height
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn coords(&self, node: usize) -> (T, T) {
        let n = &self.nodes[node];
        (n.x, n.y)
    }

    pub fn triangle_coords(&self, tri: &Triangle) -> [(T, T); 3] {
        tri.nodes.map(|n| self.coords(n))
    }

    pub fn triangle_area(&self, tri: &Triangle) -> T {
        let [p0, p1, p2] = self.triangle_coords(tri);
        twice_signed_area(p0, p1, p2) / T::lit(2.0)
    }

    pub fn edge_length(&self, edge: &BoundaryEdge) -> T {
        let (xa, ya) = self.coords(edge.a);
        let (xb, yb) = self.coords(edge.b);
        (xb - xa).hypot(yb - ya)
    }

    pub fn edges_on_wall(&self, wall: Wall) -> impl Iterator<Item = &BoundaryEdge> + '_ {
        self.boundary.iter().filter(move |e| e.wall == wall)
    }

    /// Nodes lying on `wall`, sorted by their position along it.
    /// Corner nodes appear on both adjacent walls.
    pub fn nodes_on_wall(&self, wall: Wall) -> Vec<usize> {
        let mut ids: Vec<usize> = self
            .nodes
            .iter()
            .filter(|n| self.on_wall(n.x, n.y, wall))
            .map(|n| n.id)
            .collect();
        let along = |id: &usize| match wall {
            Wall::Left | Wall::Right => self.nodes[*id].y,
            Wall::Top | Wall::Bottom => self.nodes[*id].x,
        };
        ids.sort_by(|a, b| along(a).partial_cmp(&along(b)).expect("finite coordinates"));
        ids
    }

    fn on_wall(&self, x: T, y: T, wall: Wall) -> bool {
        match wall {
            Wall::Left => x == T::zero(),
            Wall::Right => x == self.width,
            Wall::Bottom => y == T::zero(),
            Wall::Top => y == self.height,
        }
    }

    pub fn total_area(&self) -> T {
        self.elements.iter().map(|t| self.triangle_area(t)).sum()
    }

    /// Checks node ids, orientation, boundary placement and area conservation.
    pub fn validate(&self) -> Result<(), MeshError> {
        let invalid = |msg: String| Err(MeshError::Invalid(msg));
        for (i, n) in self.nodes.iter().enumerate() {
            if n.id != i {
                return invalid(format!("node at position {i} has id {}", n.id));
            }
        }
        let count = self.nodes.len();
        for (e, tri) in self.elements.iter().enumerate() {
            let [a, b, c] = tri.nodes;
            if a >= count || b >= count || c >= count {
                return invalid(format!("element {e} references a missing node"));
            }
            if a == b || b == c || a == c {
                return invalid(format!("element {e} repeats a vertex"));
            }
            if !(self.triangle_area(tri) > T::zero()) {
                return invalid(format!("element {e} is not counter-clockwise"));
            }
        }
        for edge in &self.boundary {
            if edge.a >= count || edge.b >= count {
                return invalid("boundary edge references a missing node".into());
            }
            let (xa, ya) = self.coords(edge.a);
            let (xb, yb) = self.coords(edge.b);
            if !self.on_wall(xa, ya, edge.wall) || !self.on_wall(xb, yb, edge.wall) {
                return invalid(format!(
                    "boundary edge {}-{} is not on the {} wall",
                    edge.a, edge.b, edge.wall
                ));
            }
        }
        let perimeter: T = self.boundary.iter().map(|e| self.edge_length(e)).sum();
        let expected_perimeter = T::lit(2.0) * (self.width + self.height);
        let rel = T::lit(1e-9).max(T::epsilon() * T::lit(64.0));
        if (perimeter - expected_perimeter).abs() > rel * expected_perimeter {
            return invalid("boundary edges do not cover the perimeter".into());
        }
        let area = self.total_area();
        let expected_area = self.width * self.height;
        if (area - expected_area).abs() > rel * expected_area {
            return invalid(format!(
                "element areas sum to {area}, expected {expected_area}"
            ));
        }
        Ok(())
    }

    /// Plain-text listing: `node id x y`, `tri id n0 n1 n2`, `edge a b wall`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for n in &self.nodes {
            let _ = writeln!(out, "node {} {} {}", n.id, n.x, n.y);
        }
        for (id, t) in self.elements.iter().enumerate() {
            let [a, b, c] = t.nodes;
            let _ = writeln!(out, "tri {id} {a} {b} {c}");
        }
        for e in &self.boundary {
            let _ = writeln!(out, "edge {} {} {}", e.a, e.b, e.wall);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{BTreeSet, HashMap};

    #[test]
    fn default_plate_has_fifty_elements() {
        let m = Mesh2D::<f64>::structured(20.0, 10.0, 5, 5).unwrap();
        assert_eq!(m.node_count(), 36);
        assert_eq!(m.elements().len(), 50);
        assert_eq!(m.boundary().len(), 20);
    }

    #[test]
    fn smallest_mesh() {
        let m = Mesh2D::<f64>::structured(1.0, 1.0, 1, 1).unwrap();
        assert_eq!(m.node_count(), 4);
        assert_eq!(m.elements().len(), 2);
        assert_eq!(m.boundary().len(), 4);
    }

    #[test]
    fn area_is_conserved() {
        let m = Mesh2D::<f64>::structured(2.0, 1.0, 2, 1).unwrap();
        assert!((m.total_area() - 2.0).abs() <= 1e-9 * 2.0);
        let m = Mesh2D::<f64>::structured(20.0, 10.0, 7, 3).unwrap();
        assert!((m.total_area() - 200.0).abs() <= 1e-9 * 200.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            Mesh2D::<f64>::structured(0.0, 1.0, 1, 1),
            Err(MeshError::NonPositiveDimensions { .. })
        ));
        assert!(Mesh2D::<f64>::structured(1.0, -1.0, 1, 1).is_err());
        assert!(matches!(
            Mesh2D::<f64>::structured(1.0, 1.0, 0, 1),
            Err(MeshError::ZeroSubdivisions { .. })
        ));
        assert!(Mesh2D::<f64>::structured(1.0, 1.0, 2, 0).is_err());
    }

    #[test]
    fn wall_nodes() {
        let m = Mesh2D::<f64>::structured(20.0, 10.0, 5, 5).unwrap();
        let right = m.nodes_on_wall(Wall::Right);
        assert_eq!(right.len(), 6);
        assert!(right.iter().all(|&n| m.coords(n).0 == 20.0));
        let ys: Vec<f64> = right.iter().map(|&n| m.coords(n).1).collect();
        assert!(ys.windows(2).all(|w| w[0] < w[1]));

        let unit = Mesh2D::<f64>::structured(1.0, 1.0, 1, 1).unwrap();
        let bottom = unit.nodes_on_wall(Wall::Bottom);
        assert_eq!(bottom, vec![0, 1]);
        let left = unit.nodes_on_wall(Wall::Left);
        assert_eq!(left, vec![0, 2]);
        assert!(left.contains(&0) && bottom.contains(&0));
    }

    #[test]
    fn all_triangles_counter_clockwise() {
        let m = Mesh2D::<f64>::structured(3.0, 2.0, 4, 3).unwrap();
        for t in m.elements() {
            assert!(m.triangle_area(t) > 0.0);
        }
    }

    #[test]
    fn euler_characteristic_by_edge_enumeration() {
        for (nx, ny) in [(1, 1), (2, 3), (5, 5), (4, 1)] {
            let m = Mesh2D::<f64>::structured(1.0, 1.0, nx, ny).unwrap();
            let mut edges = BTreeSet::new();
            for t in m.elements() {
                let [a, b, c] = t.nodes;
                for (p, q) in [(a, b), (b, c), (c, a)] {
                    edges.insert((p.min(q), p.max(q)));
                }
            }
            let v = m.node_count() as i64;
            let e = edges.len() as i64;
            let f = m.elements().len() as i64;
            assert_eq!(v - e + f, 1, "nx={nx} ny={ny}");
        }
    }

    #[test]
    fn boundary_forms_single_closed_loop() {
        let (nx, ny) = (4, 3);
        let m = Mesh2D::<f64>::structured(2.0, 1.0, nx, ny).unwrap();
        let next: HashMap<usize, usize> = m.boundary().iter().map(|e| (e.a, e.b)).collect();
        assert_eq!(next.len(), m.boundary().len());
        let start = m.boundary()[0].a;
        let mut cur = start;
        let mut steps = 0;
        loop {
            cur = next[&cur];
            steps += 1;
            if cur == start {
                break;
            }
            assert!(steps <= m.boundary().len());
        }
        assert_eq!(steps, 2 * (nx + ny));
    }

    #[test]
    fn boundary_edges_cover_each_wall() {
        let m = Mesh2D::<f64>::structured(20.0, 10.0, 5, 5).unwrap();
        for wall in Wall::ALL {
            let len: f64 = m.edges_on_wall(wall).map(|e| m.edge_length(e)).sum();
            let expected = match wall {
                Wall::Left | Wall::Right => 10.0,
                Wall::Top | Wall::Bottom => 20.0,
            };
            assert!((len - expected).abs() < 1e-12, "{wall}");
        }
    }

    #[test]
    fn dump_lists_every_record() {
        let m = Mesh2D::<f64>::structured(1.0, 1.0, 1, 1).unwrap();
        let text = m.dump();
        assert_eq!(text.lines().filter(|l| l.starts_with("node ")).count(), 4);
        assert_eq!(text.lines().filter(|l| l.starts_with("tri ")).count(), 2);
        assert_eq!(text.lines().filter(|l| l.starts_with("edge ")).count(), 4);
        assert!(text.contains("tri 0 0 1 3"));
        assert!(text.contains("edge 0 1 bottom"));
    }

    #[test]
    fn single_precision_mesh() {
        let m = Mesh2D::<f32>::structured(20.0, 10.0, 5, 5).unwrap();
        assert!((m.total_area() - 200.0).abs() < 1e-3);
    }
}
