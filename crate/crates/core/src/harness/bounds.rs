//! Existence-bound calculator for generalized non-malleable extractors:
//! seed length and entropy inequalities with user-supplied O(1) constants,
//! plus the comparison table against the one-adversary bound quoted from
//! earlier work (d > log(n-k+1) + 2 log(1/eps) + 7).

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundsReport {
    pub n: u64,
    pub k: u64,
    pub d: u64,
    pub m: u64,
    pub eps: f64,
    pub r: u32,
    pub c1: f64,
    pub c2: f64,
    /// d > 1.5*log2(n-k) + 3*log2(1/eps) + c1
    pub d_required: f64,
    pub d_margin: f64,
    /// k > (r+1)m + d/3 + 2*log2(1/eps) + log2(d) + c2
    pub k_required: f64,
    pub k_margin: f64,
    pub feasible: bool,
    /// r = 1 comparison against the earlier-work bound, per epsilon.
    pub dw_table: Vec<DwRow>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DwRow {
    pub eps: f64,
    pub d_here: f64,
    pub d_dw: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn existence_bound_check(
    n: u64,
    k: u64,
    d: u64,
    m: u64,
    eps: f64,
    r: u32,
    c1: f64,
    c2: f64,
) -> BoundsReport {
    let log_inv_eps = (1.0 / eps).log2();
    let d_required = 1.5 * ((n - k).max(1) as f64).log2() + 3.0 * log_inv_eps + c1;
    let k_required =
        ((r as u64 + 1) * m) as f64 + d as f64 / 3.0 + 2.0 * log_inv_eps + (d as f64).log2() + c2;
    let d_margin = d as f64 - d_required;
    let k_margin = k as f64 - k_required;

    let dw_table = [1e-2, 1e-4, 1e-6, 1e-9]
        .iter()
        .map(|&e| {
            let li = (1.0f64 / e).log2();
            DwRow {
                eps: e,
                d_here: 1.5 * ((n - k).max(1) as f64).log2() + 3.0 * li + c1,
                d_dw: ((n - k + 1) as f64).log2() + 2.0 * li + 7.0,
            }
        })
        .collect();

    BoundsReport {
        n,
        k,
        d,
        m,
        eps,
        r,
        c1,
        c2,
        d_required,
        d_margin,
        k_required,
        k_margin,
        feasible: d_margin > 0.0 && k_margin > 0.0,
        dw_table,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_plus_one_is_feasible_with_unit_margin() {
        let n = 1024;
        let k = 512;
        let eps = 1.0 / 1024.0; // log2(1/eps) = 10
        let c1 = 10.0;
        let d_req: f64 = 1.5 * 9.0 + 30.0 + c1; // 53.5
        let d = d_req.ceil() as u64 + 1; // 55
        let rep = existence_bound_check(n, k, d, 8, eps, 1, c1, 10.0);
        assert!(rep.d_margin > 0.0 && rep.d_margin <= 2.0);
        assert!(rep.feasible);
    }

    #[test]
    fn low_entropy_reports_negative_margin() {
        let rep = existence_bound_check(256, 16, 64, 8, 1e-4, 2, 10.0, 10.0);
        assert!(rep.k_margin < 0.0);
        assert!(!rep.feasible);
    }

    #[test]
    fn dw_comparison_rows_present() {
        let rep = existence_bound_check(1024, 512, 64, 8, 1e-4, 1, 10.0, 10.0);
        assert_eq!(rep.dw_table.len(), 4);
        for row in &rep.dw_table {
            assert!(row.d_here.is_finite() && row.d_dw.is_finite());
        }
    }
}
