//! Conformal grids in elliptic coordinates `x = c cosh(xi) cos(eta)`, `y = c sinh(xi) sin(eta)`.
//!
//! Every coordinate ellipse `xi = const` is a closed loop of mesh edges, so confocal
//! elliptic inclusions are resolved exactly. The line `xi = 0` is the focal segment; its
//! upper and lower copies are merged. Cells touching a focus are split along the diagonal
//! through the focus, which keeps the doubled angles there below 180 degrees.

use std::f64::consts::PI;

use super::grading::{graded_nodes, unique_sorted};
use super::Mesh;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct ConfocalLayout {
    /// Focal half-distance.
    pub c: f64,
    /// Increasing `xi` levels starting at 0; the last is the domain boundary.
    pub xis: Vec<f64>,
    /// Increasing `eta` values in `[0, 2 pi)` starting at 0, symmetric under `eta -> -eta` and
    /// `eta -> pi - eta`; the count is a multiple of 8.
    pub etas: Vec<f64>,
}

/// Largest ratio between the `eta` and `xi` parameter spacings.
const ASPECT: f64 = 2.0;

/// Nodes on `[0, pi/2]` with spacing `min(coarse, fine + 0.2 eta)`; the interval count is even.
fn quarter_nodes(fine: f64, coarse: f64) -> Vec<f64> {
    const SAMPLES: usize = 400;
    let q = 0.5 * PI;
    let dx = q / SAMPLES as f64;
    let density = |e: f64| 1.0 / coarse.min(fine + 0.2 * e);
    let mut cum = vec![0.0; SAMPLES + 1];
    for i in 0..SAMPLES {
        let e = dx * i as f64;
        cum[i + 1] = cum[i] + dx * (density(e) + 4.0 * density(e + 0.5 * dx) + density(e + dx)) / 6.0;
    }
    let total = cum[SAMPLES];
    let mut cells = (total.ceil() as usize).max(2);
    cells += cells % 2;
    let mut out = vec![0.0];
    let mut j = 0;
    for k in 1..cells {
        let target = total * k as f64 / cells as f64;
        while cum[j + 1] < target {
            j += 1;
        }
        out.push(dx * (j as f64 + (target - cum[j]) / (cum[j + 1] - cum[j])));
    }
    out.push(q);
    out
}

impl ConfocalLayout {
    /// Graded layout with `xi` lines on every requested level.
    ///
    /// `h` is the target physical size near the outer boundary. The `eta` spacing is at most
    /// `ASPECT` times the finest `xi` spacing and equals it next to the foci.
    pub fn graded(c: f64, xi_max: f64, levels: &[f64], h: f64) -> Result<ConfocalLayout> {
        if !(h > 0.0) || !(xi_max > 0.0) {
            return Err(Error::InvalidArgument("mesh size and outer level must be positive".into()));
        }
        let dxi_max = h / (c * xi_max.sinh());
        let mut breaks = vec![0.0, xi_max];
        breaks.extend(levels.iter().copied().filter(|x| *x > 0.0 && *x < xi_max));
        let breaks = unique_sorted(breaks, 1e-12);
        let xis = graded_nodes(&breaks, dxi_max, 1.2, 2);
        let dxi_min = xis.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        let q = quarter_nodes(dxi_min, (ASPECT * dxi_min).min(2.0 * dxi_max));
        let mut etas = q.clone();
        etas.extend(q.iter().rev().skip(1).map(|e| PI - e));
        etas.extend(q.iter().skip(1).map(|e| PI + e));
        etas.extend(q.iter().rev().skip(1).map(|e| 2.0 * PI - e));
        etas.pop();
        Ok(ConfocalLayout { c, xis, etas })
    }

    pub fn n_eta(&self) -> usize {
        self.etas.len()
    }

    pub fn build(&self) -> Result<Mesh> {
        confocal_mesh(self)
    }
}

pub fn confocal_mesh(layout: &ConfocalLayout) -> Result<Mesh> {
    let ConfocalLayout { c, xis, etas } = layout;
    let (c, ne) = (*c, etas.len());
    if ne % 8 != 0 || xis.len() < 2 || xis[0] != 0.0 {
        return Err(Error::InvalidArgument("need xi levels from 0 and a multiple of 8 eta intervals".into()));
    }
    let eta = |j: usize| if j >= ne { 2.0 * PI + etas[j - ne] } else { etas[j] };
    let map = |xi: f64, e: f64| [c * xi.cosh() * e.cos(), c * xi.sinh() * e.sin()];
    let mut vertices = Vec::new();
    for j in 0..=ne / 2 {
        vertices.push(map(0.0, eta(j)));
    }
    let row0 = ne / 2 + 1;
    for &xi in &xis[1..] {
        for j in 0..ne {
            vertices.push(map(xi, eta(j)));
        }
    }
    let id = |i: usize, j: usize| {
        let j = j % ne;
        if i == 0 {
            if j <= ne / 2 {
                j
            } else {
                ne - j
            }
        } else {
            row0 + (i - 1) * ne + j
        }
    };
    let mut triangles = Vec::new();
    let mut zones = Vec::new();
    for i in 0..xis.len() - 1 {
        let xm = 0.5 * (xis[i] + xis[i + 1]);
        for j in 0..ne {
            let (a, b, cc, d) = ((i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1));
            let quarter = ((eta(j) + eta(j + 1)) / PI).floor() as usize;
            let main = quarter == 0 || quarter == 2;
            let pair = if main { [[a, b, cc], [a, cc, d]] } else { [[a, b, d], [b, cc, d]] };
            for tri in pair {
                let em = tri.iter().map(|(_, jj)| eta(*jj)).sum::<f64>() / 3.0;
                triangles.push([id(tri[0].0, tri[0].1), id(tri[1].0, tri[1].1), id(tri[2].0, tri[2].1)]);
                zones.push(map(xm, em));
            }
        }
    }
    let outer = *xis.last().expect("nonempty");
    let deta = (0..ne).map(|j| eta(j + 1) - eta(j)).fold(0.0, f64::max);
    let h = c * outer.cosh() * deta.max(xis.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max));
    Ok(Mesh::new(vertices, triangles, h)?.with_zone_points(zones))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ellipse_area_and_quality() {
        let layout = ConfocalLayout::graded(1.0, 2.0, &[1.0 / 16.0, 1.0 / 8.0, 1.0], 0.1).unwrap();
        let m = layout.build().unwrap();
        let exact = PI * 2f64.cosh() * 2f64.sinh();
        assert!((m.total_area() - exact).abs() / exact < 2e-3, "{}", m.total_area());
        assert_eq!(m.n_components(), 1);
        assert!(m.min_angle_deg() > 15.0, "{}", m.min_angle_deg());
        // area inside xi < 1/8 matches pi cosh sinh
        let inner: f64 = (0..m.n_triangles())
            .filter(|&t| {
                let p = m.zone_point(t);
                let (a, b) = ((1.0f64 / 8.0).cosh(), (1.0f64 / 8.0).sinh());
                (p[0] / a).powi(2) + (p[1] / b).powi(2) < 1.0
            })
            .map(|t| m.geom(t).area)
            .sum();
        let exact = PI * (1.0f64 / 8.0).cosh() * (1.0f64 / 8.0).sinh();
        assert!((inner - exact).abs() / exact < 5e-3, "{inner} {exact}");
    }
}
