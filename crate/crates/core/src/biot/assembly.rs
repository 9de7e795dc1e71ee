use super::{BiotError, BiotParameters, TriangularMesh};
use crate::sparse::{CsrMatrix, SparseError};

/// Degree-4 six-point rule on the reference triangle: barycentric point and
/// weight relative to the triangle area.
const DEGREE4_RULE: [([f64; 3], f64); 6] = {
    const A: f64 = 0.108_103_018_168_070;
    const B: f64 = 0.445_948_490_915_965;
    const C: f64 = 0.816_847_572_980_459;
    const D: f64 = 0.091_576_213_509_771;
    const WA: f64 = 0.223_381_589_678_011;
    const WB: f64 = 0.109_951_743_655_322;
    [
        ([A, B, B], WA),
        ([B, A, B], WA),
        ([B, B, A], WA),
        ([C, D, D], WB),
        ([D, C, D], WB),
        ([D, D, C], WB),
    ]
};

/// Edge-midpoint rule, exact for quadratics.
const MIDPOINT_RULE: [([f64; 3], f64); 3] = [
    ([0.5, 0.5, 0.0], 1.0 / 3.0),
    ([0.0, 0.5, 0.5], 1.0 / 3.0),
    ([0.5, 0.0, 0.5], 1.0 / 3.0),
];

/// Local P2 edges as vertex pairs, matching `TriangularMesh::p2_nodes`.
const P2_EDGES: [(usize, usize); 3] = [(0, 1), (1, 2), (2, 0)];

struct Element {
    area: f64,
    grad: [[f64; 2]; 3],
}

impl Element {
    fn new(p: [[f64; 2]; 3]) -> Self {
        let (j00, j01) = (p[1][0] - p[0][0], p[2][0] - p[0][0]);
        let (j10, j11) = (p[1][1] - p[0][1], p[2][1] - p[0][1]);
        let det = j00 * j11 - j01 * j10;
        let g1 = [j11 / det, -j01 / det];
        let g2 = [-j10 / det, j00 / det];
        let g0 = [-g1[0] - g2[0], -g1[1] - g2[1]];
        Self {
            area: 0.5 * det,
            grad: [g0, g1, g2],
        }
    }

    fn p2_values(l: [f64; 3]) -> [f64; 6] {
        let mut v = [0.0; 6];
        for i in 0..3 {
            v[i] = l[i] * (2.0 * l[i] - 1.0);
        }
        for (k, &(a, b)) in P2_EDGES.iter().enumerate() {
            v[3 + k] = 4.0 * l[a] * l[b];
        }
        v
    }

    fn p2_gradients(&self, l: [f64; 3]) -> [[f64; 2]; 6] {
        let g = &self.grad;
        let mut out = [[0.0; 2]; 6];
        for i in 0..3 {
            let s = 4.0 * l[i] - 1.0;
            out[i] = [s * g[i][0], s * g[i][1]];
        }
        for (k, &(a, b)) in P2_EDGES.iter().enumerate() {
            out[3 + k] = [
                4.0 * (l[a] * g[b][0] + l[b] * g[a][0]),
                4.0 * (l[a] * g[b][1] + l[b] * g[a][1]),
            ];
        }
        out
    }
}

/// Blocks over all degrees of freedom, before boundary conditions.
///
/// Displacement dof `2·node + c` is component `c` at P2 lattice node `node`;
/// scalar dofs are mesh vertices.
#[derive(Clone, Debug)]
pub struct FullBlocks {
    /// `2μ(ε(u), ε(v))`.
    pub a_u: CsrMatrix,
    /// `-(φ, div u)`, scalar rows by displacement columns.
    pub b_uxi: CsrMatrix,
    /// P1 mass.
    pub mass: CsrMatrix,
    /// P1 stiffness `(∇p, ∇ψ)`.
    pub stiffness: CsrMatrix,
    /// `(f, v)`.
    pub load_u: Vec<f64>,
    /// `-Δt[(Q_s, ψ) + Kρ_f(g, ∇ψ)]`.
    pub load_p: Vec<f64>,
}

pub fn assemble_full(mesh: &TriangularMesh, params: &BiotParameters) -> Result<FullBlocks, BiotError> {
    params.validate()?;
    let mu = params.mu();
    let side = mesh.p2_side();
    let nu_dofs = 2 * side * side;
    let nv = mesh.vertex_count();

    let mut au = Vec::with_capacity(mesh.triangles.len() * 144);
    let mut bu = Vec::with_capacity(mesh.triangles.len() * 36);
    let mut mm = Vec::with_capacity(mesh.triangles.len() * 9);
    let mut kk = Vec::with_capacity(mesh.triangles.len() * 9);
    let mut load_u = vec![0.0; nu_dofs];
    let mut load_p = vec![0.0; nv];

    for t in 0..mesh.triangles.len() {
        let verts = mesh.triangles[t];
        let el = Element::new(verts.map(|v| mesh.vertices[v]));
        let nodes = mesh.p2_nodes(t);
        let dof = |a: usize, c: usize| 2 * nodes[a] + c;

        let mut ke = [[0.0; 12]; 12];
        for &(l, w) in &DEGREE4_RULE {
            let g = el.p2_gradients(l);
            let w = w * el.area * mu;
            for a in 0..6 {
                for b in 0..6 {
                    let dot = g[a][0] * g[b][0] + g[a][1] * g[b][1];
                    for c in 0..2 {
                        for d in 0..2 {
                            let delta = if c == d { dot } else { 0.0 };
                            ke[2 * a + c][2 * b + d] += w * (delta + g[a][d] * g[b][c]);
                        }
                    }
                }
            }
        }
        for a in 0..6 {
            for c in 0..2 {
                for b in 0..6 {
                    for d in 0..2 {
                        au.push((dof(a, c), dof(b, d), ke[2 * a + c][2 * b + d]));
                    }
                }
            }
        }

        let mut be = [[0.0; 12]; 3];
        for &(l, w) in &MIDPOINT_RULE {
            let g = el.p2_gradients(l);
            let phi = Element::p2_values(l);
            for k in 0..3 {
                for a in 0..6 {
                    for c in 0..2 {
                        be[k][2 * a + c] -= w * el.area * l[k] * g[a][c];
                    }
                }
            }
            for a in 0..6 {
                for c in 0..2 {
                    load_u[dof(a, c)] += w * el.area * params.f[c] * phi[a];
                }
            }
        }
        for k in 0..3 {
            for a in 0..6 {
                for c in 0..2 {
                    bu.push((verts[k], dof(a, c), be[k][2 * a + c]));
                }
            }
        }

        let gl = &el.grad;
        for i in 0..3 {
            for j in 0..3 {
                let m = el.area / 12.0 * if i == j { 2.0 } else { 1.0 };
                mm.push((verts[i], verts[j], m));
                let k = el.area * (gl[i][0] * gl[j][0] + gl[i][1] * gl[j][1]);
                kk.push((verts[i], verts[j], k));
            }
            let gravity = params.rho_f * (params.g[0] * gl[i][0] + params.g[1] * gl[i][1]);
            load_p[verts[i]] -= params.dt * (params.q_s * el.area / 3.0 + params.k * el.area * gravity);
        }
    }

    let build = |r: usize, c: usize, t: &[(usize, usize, f64)]| -> Result<CsrMatrix, SparseError> {
        CsrMatrix::from_triplets(r, c, t)
    };
    Ok(FullBlocks {
        a_u: build(nu_dofs, nu_dofs, &au)?,
        b_uxi: build(nv, nu_dofs, &bu)?,
        mass: build(nv, nv, &mm)?,
        stiffness: build(nv, nv, &kk)?,
        load_u,
        load_p,
    })
}

/// The reduced three-field system
/// `[[A_u, B_uξᵀ, 0], [B_uξ, -A_ξ, B_ξpᵀ], [0, B_ξp, A_p]]`.
#[derive(Clone, Debug)]
pub struct BiotAssembly {
    pub a_u: CsrMatrix,
    pub b_uxi: CsrMatrix,
    pub a_xi: CsrMatrix,
    pub b_xip: CsrMatrix,
    pub a_p: CsrMatrix,
    pub m_xi: CsrMatrix,
    pub m_p: CsrMatrix,
    pub rhs: Vec<f64>,
    /// Full displacement dof of each free displacement unknown.
    pub u_dofs: Vec<usize>,
    /// Mesh vertex of each free pressure unknown; ξ uses every vertex.
    pub p_dofs: Vec<usize>,
    pub xi_count: usize,
}

/// Assembles and eliminates `u = 0` and `p = 0` on `x = 0` and `x = 1`.
pub fn assemble_biot(mesh: &TriangularMesh, params: &BiotParameters) -> Result<BiotAssembly, BiotError> {
    let full = assemble_full(mesh, params)?;
    let (lambda, side, n) = (params.lambda(), mesh.p2_side(), mesh.n);
    let u_dofs: Vec<usize> = (0..2 * side * side)
        .filter(|&d| {
            let i = (d / 2) % side;
            i != 0 && i != side - 1
        })
        .collect();
    let p_dofs: Vec<usize> = (0..mesh.vertex_count())
        .filter(|&v| {
            let i = v % (n + 1);
            i != 0 && i != n
        })
        .collect();
    let xi_all: Vec<usize> = (0..mesh.vertex_count()).collect();

    let a_u = full.a_u.select(&u_dofs, &u_dofs);
    let b_uxi = full.b_uxi.select(&xi_all, &u_dofs);
    let m_xi = full.mass.clone();
    let a_xi = m_xi.scale(1.0 / lambda);
    let b_xip = full.mass.select(&p_dofs, &xi_all).scale(params.alpha / lambda);
    let m_p = full.mass.select(&p_dofs, &p_dofs);
    let k_p = full.stiffness.select(&p_dofs, &p_dofs);
    let a_p = m_p.linear_combination(
        -(params.c0 + params.alpha * params.alpha / lambda),
        &k_p,
        -params.dt * params.k,
    )?;

    let mut rhs: Vec<f64> = u_dofs.iter().map(|&d| full.load_u[d]).collect();
    rhs.extend(std::iter::repeat(0.0).take(xi_all.len()));
    rhs.extend(p_dofs.iter().map(|&v| full.load_p[v]));

    Ok(BiotAssembly {
        a_u,
        b_uxi,
        a_xi,
        b_xip,
        a_p,
        m_xi,
        m_p,
        rhs,
        u_dofs,
        p_dofs,
        xi_count: xi_all.len(),
    })
}

impl BiotAssembly {
    pub fn block_sizes(&self) -> [usize; 3] {
        [self.u_dofs.len(), self.xi_count, self.p_dofs.len()]
    }

    pub fn total_size(&self) -> usize {
        self.block_sizes().iter().sum()
    }

    /// Monolithic sparse matrix with `-A_ξ` in the middle block.
    pub fn monolithic(&self) -> CsrMatrix {
        let [nu, nx, np] = self.block_sizes();
        let (ox, op) = (nu, nu + nx);
        let mut t = Vec::with_capacity(
            self.a_u.nnz() + 2 * self.b_uxi.nnz() + self.a_xi.nnz() + 2 * self.b_xip.nnz() + self.a_p.nnz(),
        );
        t.extend(self.a_u.iter());
        for (i, j, v) in self.b_uxi.iter() {
            t.push((ox + i, j, v));
            t.push((j, ox + i, v));
        }
        t.extend(self.a_xi.iter().map(|(i, j, v)| (ox + i, ox + j, -v)));
        for (i, j, v) in self.b_xip.iter() {
            t.push((op + i, ox + j, v));
            t.push((ox + j, op + i, v));
        }
        t.extend(self.a_p.iter().map(|(i, j, v)| (op + i, op + j, v)));
        CsrMatrix::from_triplets(nu + nx + np, nu + nx + np, &t).expect("indices in range")
    }
}
