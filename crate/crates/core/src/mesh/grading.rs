//! Graded one-dimensional node sets used by the structured meshers.

/// Nodes on `[breaks[0], breaks.last()]` containing every break point.
///
/// The target spacing near break `k` is `min(h, smallest adjacent gap / min_cells)` and grows
/// linearly at rate `growth - 1` with distance, capped at `h`. Every gap receives at least
/// `min_cells` intervals.
pub fn graded_nodes(breaks: &[f64], h: f64, growth: f64, min_cells: usize) -> Vec<f64> {
    graded_nodes_local(breaks, h, h, growth, min_cells)
}

/// As [`graded_nodes`] with spacing at most `near` at the break points and at most `far`
/// elsewhere.
pub fn graded_nodes_local(breaks: &[f64], near: f64, far: f64, growth: f64, min_cells: usize) -> Vec<f64> {
    let h = far.max(near);
    assert!(breaks.len() >= 2, "need at least two break points");
    assert!(breaks.windows(2).all(|w| w[1] > w[0]), "break points must increase");
    let gaps: Vec<f64> = breaks.windows(2).map(|w| w[1] - w[0]).collect();
    let fine: Vec<f64> = (0..breaks.len())
        .map(|k| {
            let left = if k > 0 { gaps[k - 1] } else { f64::INFINITY };
            let right = if k < gaps.len() { gaps[k] } else { f64::INFINITY };
            near.min(left.min(right) / min_cells as f64)
        })
        .collect();
    let rate = growth - 1.0;
    let spacing = |x: f64| {
        let mut s = h;
        for (b, f) in breaks.iter().zip(&fine) {
            s = s.min(f + rate * (x - b).abs());
        }
        s
    };
    const SAMPLES: usize = 400;
    let mut out = vec![breaks[0]];
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let dx = (b - a) / SAMPLES as f64;
        let mut cum = vec![0.0; SAMPLES + 1];
        for i in 0..SAMPLES {
            let x0 = a + dx * i as f64;
            let mid = 1.0 / spacing(x0 + 0.5 * dx);
            let ends = 0.5 * (1.0 / spacing(x0) + 1.0 / spacing(x0 + dx));
            cum[i + 1] = cum[i] + dx * (2.0 * mid + ends) / 3.0;
        }
        let total = cum[SAMPLES];
        let cells = ((total - 1e-9).ceil() as usize).max(min_cells);
        let mut j = 0;
        for c in 1..cells {
            let target = total * c as f64 / cells as f64;
            while cum[j + 1] < target {
                j += 1;
            }
            let frac = (target - cum[j]) / (cum[j + 1] - cum[j]);
            out.push(a + dx * (j as f64 + frac));
        }
        out.push(b);
    }
    out
}

/// Sorted copy with near-duplicates (closer than `tol`) merged.
pub fn unique_sorted(mut v: Vec<f64>, tol: f64) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(v.len());
    for x in v {
        if out.last().is_none_or(|l| x - l > tol) {
            out.push(x);
        }
    }
    out
}
