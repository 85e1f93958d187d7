use gcl::policy::limit_thresholds;
use gcl::{gcl_bound, mixture_weights, phi, thresholds, Size};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub m: Size,
    pub ell: Size,
    pub alpha: f64,
    pub beta: f64,
    pub x_ell: f64,
    pub y_ell: f64,
    pub bound: f64,
    /// Bound exceeds the previous row with the same `ell` and smaller `m`.
    pub increasing_in_m: Option<bool>,
    /// Bound is below the previous row with the same `m` and smaller `ell`.
    pub decreasing_in_ell: Option<bool>,
}

pub const HEADER: &str = "m,ell,alpha,beta,x_ell,y_ell,bound,increasing_in_m,decreasing_in_ell";

/// Rounds to nine significant digits so CSV and JSON carry the same values.
pub fn sig9(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.8e}").parse().expect("formatted float parses")
}

fn raw_row(m: Size, ell: Size) -> gcl::Result<[f64; 5]> {
    let bound = gcl_bound(m, ell)?;
    let (alpha, beta, x, y) = match (m, ell) {
        (Size::Finite(m), Size::Finite(l)) => {
            let p = thresholds(m, l)?;
            (p.alpha, p.beta, p.x_last(), p.y_last())
        }
        (_, Size::Unbounded) => {
            let lim = limit_thresholds(m)?;
            (lim.alpha, 0.0, lim.x, lim.y)
        }
        (_, Size::Finite(_)) => {
            let (alpha, beta) = mixture_weights(m, ell)?;
            let y = phi() / alpha;
            (alpha, beta, 1.0 + 1.0 / y, y)
        }
    };
    Ok([alpha, beta, x, y, bound])
}

pub fn sweep(ms: &[Size], ells: &[Size]) -> gcl::Result<Vec<Row>> {
    if ms.is_empty() || ells.is_empty() {
        return Err(gcl::Error::InvalidArgument("sweep needs at least one m and one ell".into()));
    }
    let mut ms = ms.to_vec();
    let mut ells = ells.to_vec();
    ms.sort();
    ms.dedup();
    ells.sort();
    ells.dedup();

    let mut rows = Vec::with_capacity(ms.len() * ells.len());
    let mut grid = vec![vec![0.0; ells.len()]; ms.len()];
    for (a, &m) in ms.iter().enumerate() {
        for (b, &ell) in ells.iter().enumerate() {
            let [alpha, beta, x_ell, y_ell, bound] = raw_row(m, ell)?;
            grid[a][b] = bound;
            rows.push(Row {
                m,
                ell,
                alpha: sig9(alpha),
                beta: sig9(beta),
                x_ell: sig9(x_ell),
                y_ell: sig9(y_ell),
                bound: sig9(bound),
                increasing_in_m: (a > 0).then(|| bound > grid[a - 1][b]),
                decreasing_in_ell: (b > 0).then(|| bound < grid[a][b - 1]),
            });
        }
    }
    Ok(rows)
}

fn flag(f: Option<bool>) -> &'static str {
    match f {
        None => "",
        Some(true) => "true",
        Some(false) => "false",
    }
}

pub fn to_csv(rows: &[Row]) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.m,
            r.ell,
            r.alpha,
            r.beta,
            r.x_ell,
            r.y_ell,
            r.bound,
            flag(r.increasing_in_m),
            flag(r.decreasing_in_ell),
        ));
    }
    out
}
