use super::BiotError;

/// Uniform triangulation of the unit square.
///
/// Vertex `(i, j)` sits at `(i/N, j/N)` with index `j·(N+1) + i`. Each cell
/// is split along its lower-left to upper-right diagonal. Edges are listed
/// horizontal first, then vertical, then diagonal, each group row by row.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangularMesh {
    pub n: usize,
    pub vertices: Vec<[f64; 2]>,
    /// Counterclockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    /// Vertex pairs, lower index first.
    pub edges: Vec<[usize; 2]>,
}

pub fn build_mesh(n: usize) -> Result<TriangularMesh, BiotError> {
    if n == 0 {
        return Err(BiotError::InvalidMesh(n));
    }
    let m = n + 1;
    let h = 1.0 / n as f64;
    let v = |i: usize, j: usize| j * m + i;
    let mut vertices = Vec::with_capacity(m * m);
    for j in 0..m {
        for i in 0..m {
            vertices.push([i as f64 * h, j as f64 * h]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (a, b, c, d) = (v(i, j), v(i + 1, j), v(i + 1, j + 1), v(i, j + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    let mut edges = Vec::with_capacity(2 * n * m + n * n);
    for j in 0..m {
        for i in 0..n {
            edges.push([v(i, j), v(i + 1, j)]);
        }
    }
    for j in 0..n {
        for i in 0..m {
            edges.push([v(i, j), v(i, j + 1)]);
        }
    }
    for j in 0..n {
        for i in 0..n {
            edges.push([v(i, j), v(i + 1, j + 1)]);
        }
    }
    Ok(TriangularMesh {
        n,
        vertices,
        triangles,
        edges,
    })
}

impl TriangularMesh {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Signed area, positive for counterclockwise triangles.
    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t].map(|k| self.vertices[k]);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
    }

    /// Side length of the `(2N+1)²` lattice holding vertices and edge midpoints.
    pub fn p2_side(&self) -> usize {
        2 * self.n + 1
    }

    /// Lattice node of a vertex.
    pub fn p2_vertex_node(&self, v: usize) -> usize {
        let m = self.n + 1;
        let (i, j) = (v % m, v / m);
        2 * j * self.p2_side() + 2 * i
    }

    /// Lattice node of the midpoint of edge `(a, b)`.
    pub fn p2_midpoint_node(&self, a: usize, b: usize) -> usize {
        let m = self.n + 1;
        let (i, j) = (a % m + b % m, a / m + b / m);
        j * self.p2_side() + i
    }

    /// The six P2 nodes of a triangle: vertices, then midpoints of edges
    /// (0,1), (1,2), (2,0).
    pub fn p2_nodes(&self, t: usize) -> [usize; 6] {
        let [a, b, c] = self.triangles[t];
        [
            self.p2_vertex_node(a),
            self.p2_vertex_node(b),
            self.p2_vertex_node(c),
            self.p2_midpoint_node(a, b),
            self.p2_midpoint_node(b, c),
            self.p2_midpoint_node(c, a),
        ]
    }

    /// Coordinates of a lattice node.
    pub fn p2_coords(&self, node: usize) -> [f64; 2] {
        let s = self.p2_side();
        let h = 0.5 / self.n as f64;
        [(node % s) as f64 * h, (node / s) as f64 * h]
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;

    #[test]
    fn entity_counts() {
        let m1 = build_mesh(1).unwrap();
        assert_eq!((m1.vertices.len(), m1.edges.len(), m1.triangles.len()), (4, 5, 2));
        let m2 = build_mesh(2).unwrap();
        assert_eq!((m2.vertices.len(), m2.edges.len(), m2.triangles.len()), (9, 16, 8));
        for n in 1..8 {
            let m = build_mesh(n).unwrap();
            assert_eq!(m.vertices.len(), (n + 1) * (n + 1));
            assert_eq!(m.edges.len(), 2 * n * (n + 1) + n * n);
            assert_eq!(m.triangles.len(), 2 * n * n);
        }
        assert!(build_mesh(0).is_err());
    }

    #[test]
    fn area_and_orientation() {
        let m = build_mesh(7).unwrap();
        let total: f64 = (0..m.triangles.len()).map(|t| m.signed_area(t)).sum();
        assert!((total - 1.0).abs() < 1e-14);
        assert!((0..m.triangles.len()).all(|t| m.signed_area(t) > 0.0));
    }

    #[test]
    fn edges_are_unique_and_match_triangles() {
        let m = build_mesh(4).unwrap();
        let set: HashSet<[usize; 2]> = m.edges.iter().copied().collect();
        assert_eq!(set.len(), m.edges.len());
        for t in &m.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                assert!(set.contains(&[a.min(b), a.max(b)]));
            }
        }
    }

    #[test]
    fn p2_nodes_cover_the_lattice() {
        let m = build_mesh(3).unwrap();
        let mut seen = HashSet::new();
        for t in 0..m.triangles.len() {
            let nodes = m.p2_nodes(t);
            let [a, b, c] = m.triangles[t].map(|k| m.vertices[k]);
            let mid = m.p2_coords(nodes[3]);
            assert!((mid[0] - 0.5 * (a[0] + b[0])).abs() < 1e-15);
            assert!((mid[1] - 0.5 * (a[1] + b[1])).abs() < 1e-15);
            assert_eq!(m.p2_coords(nodes[2]), c);
            seen.extend(nodes);
        }
        assert_eq!(seen.len(), m.p2_side() * m.p2_side());
    }
}
