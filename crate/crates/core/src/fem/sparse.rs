//! Compressed-sparse-row matrices and P1 stiffness assembly.

use crate::mesh::Mesh;
use crate::tensors::SymMat;

#[derive(Clone, Debug)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col: Vec<usize>,
    val: Vec<f64>,
}

impl CsrMatrix {
    /// Zero matrix with the given per-row column sets.
    pub fn with_pattern(rows: Vec<Vec<usize>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let mut col = Vec::new();
        for mut r in rows {
            r.sort_unstable();
            r.dedup();
            col.extend_from_slice(&r);
            row_ptr.push(col.len());
        }
        let nnz = col.len();
        CsrMatrix { n, row_ptr, col, val: vec![0.0; nnz] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.col.len()
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
        let k = self.col[s..e].binary_search(&j).expect("entry outside sparsity pattern");
        self.val[s + k] += v;
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.val[k] * x[self.col[k]];
            }
            *yi = s;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
                self.col[s..e].binary_search(&i).map(|k| self.val[s + k]).unwrap_or(0.0)
            })
            .collect()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |k| (self.col[k], self.val[k]))
    }
}

/// Vertex-to-unknown numbering. `None` marks a vertex whose value is prescribed.
#[derive(Clone, Debug)]
pub struct DofMap {
    pub dof: Vec<Option<usize>>,
    pub n: usize,
}

impl DofMap {
    /// Boundary vertices prescribed, the rest free.
    pub fn dirichlet(mesh: &Mesh) -> DofMap {
        let b = mesh.is_boundary_vertex();
        let mut n = 0;
        let dof = b
            .iter()
            .map(|&on| {
                if on {
                    None
                } else {
                    n += 1;
                    Some(n - 1)
                }
            })
            .collect();
        DofMap { dof, n }
    }

    /// All vertices free except `pinned`; with `periodic`, identified vertices share an unknown.
    pub fn pinned(mesh: &Mesh, periodic: Option<&[usize]>, pinned: usize) -> DofMap {
        let nv = mesh.n_vertices();
        let master = |v: usize| periodic.map_or(v, |m| m[v]);
        let pinned = master(pinned);
        let mut id = vec![usize::MAX; nv];
        let mut n = 0;
        for v in 0..nv {
            let m = master(v);
            if m == v && v != pinned {
                id[v] = n;
                n += 1;
            }
        }
        let dof = (0..nv)
            .map(|v| {
                let m = master(v);
                if m == pinned {
                    None
                } else {
                    Some(id[m])
                }
            })
            .collect();
        DofMap { dof, n }
    }
}

/// Local stiffness `area * (K grad l_j) . grad l_i` of triangle `t`.
pub fn local_stiffness(mesh: &Mesh, t: usize, k: &SymMat) -> [[f64; 3]; 3] {
    let g = mesh.geom(t);
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let v = g.area * k.bilinear(&g.grad[i], &g.grad[j]);
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    out
}

/// Assembles the stiffness matrix on the free unknowns and the right-hand side contribution
/// `-K_{free, fixed} g` of prescribed vertex values `fixed`.
pub fn assemble(mesh: &Mesh, cells: &[SymMat], dofs: &DofMap, fixed: Option<&[f64]>) -> (CsrMatrix, Vec<f64>) {
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); dofs.n];
    for tri in mesh.triangles() {
        for &a in tri {
            if let Some(i) = dofs.dof[a] {
                rows[i].extend(tri.iter().filter_map(|&b| dofs.dof[b]));
            }
        }
    }
    let mut mat = CsrMatrix::with_pattern(rows);
    let mut rhs = vec![0.0; dofs.n];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let kl = local_stiffness(mesh, t, &cells[t]);
        for a in 0..3 {
            let Some(i) = dofs.dof[tri[a]] else { continue };
            for b in 0..3 {
                match dofs.dof[tri[b]] {
                    Some(j) => mat.add(i, j, kl[a][b]),
                    None => {
                        if let Some(g) = fixed {
                            rhs[i] -= kl[a][b] * g[tri[b]];
                        }
                    }
                }
            }
        }
    }
    (mat, rhs)
}

/// Load vector `sum_T area * flux_T . grad phi_i` on the free unknowns.
pub fn flux_load(mesh: &Mesh, flux: &[[f64; 2]], dofs: &DofMap) -> Vec<f64> {
    let mut b = vec![0.0; dofs.n];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let f = flux[t];
        if f == [0.0, 0.0] {
            continue;
        }
        let g = mesh.geom(t);
        for k in 0..3 {
            if let Some(i) = dofs.dof[tri[k]] {
                b[i] += g.area * (f[0] * g.grad[k][0] + f[1] * g.grad[k][1]);
            }
        }
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::grid::uniform_rectangle;

    #[test]
    fn stiffness_rows_sum_to_zero() {
        let m = uniform_rectangle(0.0, 1.0, 0.0, 1.0, 0.25).unwrap();
        let cells = vec![SymMat::new2(2.0, 0.3, 1.0); m.n_triangles()];
        let dofs = DofMap::pinned(&m, None, usize::MAX.min(m.n_vertices() - 1));
        let (a, _) = assemble(&m, &cells, &dofs, None);
        // with one vertex pinned, rows not touching it still sum to zero
        let pinned = m.n_vertices() - 1;
        for v in 0..m.n_vertices() {
            let Some(i) = dofs.dof[v] else { continue };
            let touches = m.triangles().iter().any(|t| t.contains(&v) && t.contains(&pinned));
            if !touches {
                let s: f64 = a.row(i).map(|(_, x)| x).sum();
                assert!(s.abs() < 1e-12);
            }
        }
    }
}
