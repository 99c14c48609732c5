//! Bethe system solving and parameter-grid scans.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use rtoda_core::bethe::{
    derive_params, energy_identity_residual, lambda_leading_phase_residual,
    lambda_leading_product_residual, product_form_residual, solve_bae, tq_consistency_residual,
    verify_unwanted, BetheSolution,
};

use crate::config::Tolerances;
use crate::report::{check, named, named_re, CheckRecord, CxJson, Summary};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct LambdaMode {
    pub mode: i64,
    pub value: CxJson,
}

/// Serialized solve result: parameters, roots, eigenvalue data and the
/// self-consistency check battery.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SolveOutput {
    pub tool: String,
    pub command: String,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub q: i64,
    pub g: CxJson,
    pub k: CxJson,
    pub eta: CxJson,
    pub delta: CxJson,
    pub phi: CxJson,
    pub m_branch: i64,
    pub branch: Vec<i64>,
    pub roots: Vec<CxJson>,
    pub energy: CxJson,
    pub lambda_modes: Vec<LambdaMode>,
    pub lambda_out_of_band: f64,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

impl SolveOutput {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("solve output serializes");
        s.push('\n');
        s
    }

    /// CSV: one row per root plus one summary row (columns documented in
    /// docs/formats.md).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kind,index,re,im,extra\n");
        for (j, root) in self.roots.iter().enumerate() {
            out.push_str(&format!("root,{},{:e},{:e},\n", j + 1, root.re, root.im));
        }
        out.push_str(&format!(
            "summary,{},{:e},{:e},{:e}\n",
            self.m, self.energy.re, self.energy.im, self.summary.worst_residual
        ));
        out
    }

    pub fn all_pass(&self) -> bool {
        self.summary.fail_count == 0
    }
}

/// Solve one Bethe system and run the full self-consistency battery.
pub fn run_solve(
    n: usize,
    m: usize,
    q: i64,
    g: C64,
    k: f64,
    branch: Option<&[i64]>,
    seed: u64,
    tols: &Tolerances,
) -> Result<SolveOutput, rtoda_core::Error> {
    let params = derive_params::<f64>(n, m, q, g, k)?;
    let sol = solve_bae(&params, branch, None)?;
    let checks = solution_checks(&sol, tols)?;
    let pass_count = checks.iter().filter(|c| c.pass).count();
    let fail_count = checks.len() - pass_count;
    let (worst_residual, worst_check) = checks
        .iter()
        .max_by(|a, b| {
            (a.residual / a.tolerance)
                .partial_cmp(&(b.residual / b.tolerance))
                .unwrap()
        })
        .map(|c| (c.residual, c.id.clone()))
        .unwrap_or((0.0, String::new()));
    Ok(SolveOutput {
        tool: "rtoda".into(),
        command: "solve".into(),
        seed,
        n,
        m,
        q,
        g: g.into(),
        k: params.k_momentum.into(),
        eta: params.eta.into(),
        delta: params.delta.into(),
        phi: params.phi.into(),
        m_branch: params.m_branch,
        branch: sol.branch_ints.clone(),
        roots: sol.roots.iter().map(|r| CxJson::from(*r)).collect(),
        energy: sol.energy.into(),
        lambda_modes: sol
            .lambda
            .modes
            .iter()
            .map(|(mode, value)| LambdaMode {
                mode: *mode,
                value: (*value).into(),
            })
            .collect(),
        lambda_out_of_band: sol.lambda.out_of_band,
        checks,
        summary: Summary {
            pass_count,
            fail_count,
            worst_residual,
            worst_check,
        },
    })
}

fn solution_checks(
    sol: &BetheSolution<f64>,
    tols: &Tolerances,
) -> Result<Vec<CheckRecord>, rtoda_core::Error> {
    let params = &sol.params;
    let inputs = vec![
        named_re("N", params.n_sites as f64),
        named_re("M", params.m_roots as f64),
        named_re("q", params.q as f64),
        named("g", params.g),
        named("K", params.k_momentum),
        named("eta", params.eta),
    ];
    let mut checks = vec![
        check(
            "bae_log_residual".into(),
            inputs.clone(),
            sol.residual,
            tols.get("bae_log"),
        ),
        check(
            "bae_product_form".into(),
            inputs.clone(),
            product_form_residual(params, &sol.roots),
            tols.get("bae_product"),
        ),
        check(
            "unwanted_terms".into(),
            inputs.clone(),
            verify_unwanted(params, &sol.roots).worst(),
            tols.get("unwanted"),
        ),
        check(
            "lambda_band_limit".into(),
            inputs.clone(),
            sol.lambda.out_of_band,
            tols.get("lambda_band_limit"),
        ),
        check(
            "lambda_leading_product".into(),
            inputs.clone(),
            lambda_leading_product_residual(sol)?,
            tols.get("lambda_leading_product"),
        ),
        check(
            "lambda_leading_phase".into(),
            inputs.clone(),
            lambda_leading_phase_residual(sol)?,
            tols.get("lambda_leading_phase"),
        ),
        check(
            "tq_consistency".into(),
            inputs.clone(),
            tq_consistency_residual(params, &sol.roots, C64::new(0.31, 0.43))?,
            tols.get("tq_consistency"),
        ),
    ];
    if params.n_sites >= 2 {
        checks.push(check(
            "energy_identity".into(),
            inputs,
            energy_identity_residual(sol)?,
            tols.get("energy_identity"),
        ));
    }
    Ok(checks)
}

/// One scan grid point.
#[derive(Debug, Clone)]
pub struct ScanPoint {
    pub q: i64,
    pub m: usize,
    pub k: f64,
    pub branch: Vec<i64>,
}

/// Enumerate the scan grid: q range x M list x K list x branch multisets.
pub fn scan_grid(
    q_range: (i64, i64),
    m_list: &[usize],
    k_list: &[f64],
    branch_range: (i64, i64),
) -> Vec<ScanPoint> {
    let mut points = Vec::new();
    for q in q_range.0..=q_range.1 {
        for &m in m_list {
            for &k in k_list {
                for branch in branch_multisets(branch_range, m) {
                    points.push(ScanPoint {
                        q,
                        m,
                        k,
                        branch,
                    });
                }
            }
        }
    }
    points
}

/// Non-decreasing branch tuples of length `m` over the inclusive range
/// (solutions are symmetric under root permutation, so ordered tuples would
/// duplicate solution sets).
fn branch_multisets(range: (i64, i64), m: usize) -> Vec<Vec<i64>> {
    if m == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(m);
    fn rec(range: (i64, i64), m: usize, start: i64, current: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if current.len() == m {
            out.push(current.clone());
            return;
        }
        for v in start..=range.1 {
            current.push(v);
            rec(range, m, v, current, out);
            current.pop();
        }
    }
    rec(range, m, range.0, &mut current, &mut out);
    out
}

/// Scan a grid; failed solves are logged on stderr and skipped.
/// Returns CSV rows `(q, M, eta, branch, K, E, worst residual)`.
pub fn run_scan(
    n: usize,
    g: C64,
    points: &[ScanPoint],
    tols: &Tolerances,
) -> String {
    let results: Vec<Option<String>> = points
        .par_iter()
        .map(|pt| {
            match run_solve(n, pt.m, pt.q, g, pt.k, Some(&pt.branch), 0, tols) {
                Ok(out) => {
                    let branch = pt
                        .branch
                        .iter()
                        .map(|b| b.to_string())
                        .collect::<Vec<_>>()
                        .join(";");
                    Some(format!(
                        "{},{},{:e},{:e},{},{:e},{:e},{:e},{:e}\n",
                        pt.q,
                        pt.m,
                        out.eta.re,
                        out.eta.im,
                        branch,
                        pt.k,
                        out.energy.re,
                        out.energy.im,
                        out.summary.worst_residual
                    ))
                }
                Err(err) => {
                    eprintln!(
                        "scan: solve failed at q={}, M={}, K={}, branch={:?}: {err}",
                        pt.q, pt.m, pt.k, pt.branch
                    );
                    None
                }
            }
        })
        .collect();
    let mut csv = String::from("q,M,eta_re,eta_im,branch,K,E_re,E_im,worst_residual\n");
    for row in results.into_iter().flatten() {
        csv.push_str(&row);
    }
    csv
}
