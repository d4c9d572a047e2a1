//! Tensor-product triangulations of rectangles.

use super::Mesh;
use crate::error::{Error, Result};

/// Triangulates the grid `xs x ys`; cell diagonals alternate in a checkerboard pattern.
pub fn tensor_grid(xs: &[f64], ys: &[f64]) -> Result<Mesh> {
    tensor_grid_with_parity(xs, ys, 0)
}

pub(crate) fn tensor_grid_with_parity(xs: &[f64], ys: &[f64], parity: usize) -> Result<Mesh> {
    if xs.len() < 2 || ys.len() < 2 {
        return Err(Error::InvalidArgument("grid needs at least two lines per direction".into()));
    }
    if !xs.windows(2).all(|w| w[1] > w[0]) || !ys.windows(2).all(|w| w[1] > w[0]) {
        return Err(Error::InvalidArgument("grid lines must increase".into()));
    }
    let nx = xs.len();
    let mut vertices = Vec::with_capacity(nx * ys.len());
    for &y in ys {
        for &x in xs {
            vertices.push([x, y]);
        }
    }
    let id = |i: usize, j: usize| j * nx + i;
    let mut triangles = Vec::with_capacity(2 * (nx - 1) * (ys.len() - 1));
    for j in 0..ys.len() - 1 {
        for i in 0..nx - 1 {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            if (i + j + parity) % 2 == 0 {
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            } else {
                triangles.push([a, b, d]);
                triangles.push([b, c, d]);
            }
        }
    }
    let h = xs.windows(2).chain(ys.windows(2)).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    Mesh::new(vertices, triangles, h)
}

/// Uniform grid on `[x0, x1] x [y0, y1]` with spacing at most `h`.
pub fn uniform_rectangle(x0: f64, x1: f64, y0: f64, y1: f64, h: f64) -> Result<Mesh> {
    let line = |a: f64, b: f64| {
        let n = ((b - a) / h).ceil().max(1.0) as usize;
        (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect::<Vec<_>>()
    };
    tensor_grid(&line(x0, x1), &line(y0, y1))
}
