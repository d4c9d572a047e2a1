//! Closed-form tables printed by the `oracle` subcommands.

use std::fmt::Write as _;

use contrast_asym::oracles::{elliptic_solution, radial_csv, radial_solution};
use contrast_asym::Result;

/// `n,alpha,beta,A1..A4,B2..B4` for the two-shell example.
pub fn radial_table(d: usize, alpha: f64, beta: f64, ns: &[usize]) -> Result<String> {
    let rows = ns.iter().map(|&n| radial_solution(d, n, alpha, beta)).collect::<Result<Vec<_>>>()?;
    Ok(radial_csv(&rows))
}

/// Elliptic inclusion `xi < 1/n` with `lambda_n = n^q`: interior field factors and the
/// polarization tensors.
pub fn elliptic_table(q: f64, ns: &[usize]) -> Result<String> {
    let mut s = String::from("n,lambda,a,b,l1_dn,D11,D22,W11,W22,M11,M22\n");
    for &n in ns {
        let e = elliptic_solution(n, (n as f64).powf(q))?;
        let (d, w, m) = (e.d_tensor(), e.w_tensor(), e.m_tensor());
        let _ = writeln!(
            s,
            "{n},{},{},{},{},{},{},{},{},{},{}",
            e.lambda,
            e.a,
            e.b,
            e.l1_dn(),
            d.get(0, 0),
            d.get(1, 1),
            w.get(0, 0),
            w.get(1, 1),
            m.get(0, 0),
            m.get(1, 1)
        );
    }
    Ok(s)
}
