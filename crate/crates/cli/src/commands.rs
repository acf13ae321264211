use tmode_core::ballprob::{ball_prob, check_table1, TABLE_RADIUS};
use tmode_core::mcoracle::{estimate_ball_prob, estimate_radial_moment, sample_t};
use tmode_core::monotone::{verify_theorem, NuGrid};
use tmode_core::tdist::{self, density, kurtosis_ratio, moment_ratio, radial_moment};
use tmode_core::{Dim, Dof, Radius};

use crate::output::{Cell, Table};
use crate::GridSpec;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] tmode_core::Error),
    #[error("output failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("output failed: {0}")]
    Csv(#[from] csv::Error),
}

/// A rendered table plus any verification mismatches (non-empty means exit 1).
pub struct Outcome {
    pub table: Table,
    pub mismatches: Vec<String>,
}

impl Outcome {
    fn ok(table: Table) -> Self {
        Outcome {
            table,
            mismatches: Vec::new(),
        }
    }
}

fn parse_dof(s: &str) -> Result<Dof, CliError> {
    s.parse::<Dof>()
        .map_err(|e| CliError::Usage(format!("--nu: {e}")))
}

fn parse_dim(k: u32) -> Result<Dim, CliError> {
    Dim::new(k).map_err(|e| CliError::Usage(format!("--k: {e}")))
}

fn points(grid: GridSpec, log: bool) -> Result<Vec<f64>, CliError> {
    let built = if log {
        NuGrid::log_spaced(grid.start, grid.stop, grid.count)
    } else {
        NuGrid::linear(grid.start, grid.stop, grid.count)
    };
    built
        .map(|g| g.points().to_vec())
        .map_err(|e| CliError::Usage(format!("grid: {e}")))
}

fn linspace(grid: GridSpec) -> Vec<f64> {
    let step = (grid.stop - grid.start) / (grid.count - 1) as f64;
    (0..grid.count)
        .map(|i| {
            if i + 1 == grid.count {
                grid.stop
            } else {
                grid.start + step * i as f64
            }
        })
        .collect()
}

const DEFAULT_MODE_GRID: GridSpec = GridSpec {
    start: 0.1,
    stop: 30.0,
    count: 200,
};

pub fn mode_value(
    ks: &[u32],
    nu: Option<&str>,
    grid: Option<GridSpec>,
    log: bool,
) -> Result<Outcome, CliError> {
    let nus: Vec<Dof> = match (nu, grid) {
        (Some(nu), _) => vec![parse_dof(nu)?],
        (None, Some(grid)) => points(grid, log)?
            .into_iter()
            .map(|v| Dof::new(v).map_err(|e| CliError::Usage(format!("grid: {e}"))))
            .collect::<Result<_, _>>()?,
        (None, None) => points(DEFAULT_MODE_GRID, true)?
            .into_iter()
            .map(|v| Dof::new(v).expect("positive"))
            .collect(),
    };
    let mut table = Table::new(
        "mode-value",
        &["k", "nu", "mode_value", "gaussian_mode_value"],
    );
    for &k in ks {
        let k = parse_dim(k)?;
        let limit = tdist::mode_value(Dof::INFINITY, k);
        for &nu in &nus {
            table.push(vec![
                Cell::Int(k.get() as i64),
                nu.into(),
                tdist::mode_value(nu, k).into(),
                limit.into(),
            ]);
        }
    }
    Ok(Outcome::ok(table))
}

const FIGURE_DOFS: [f64; 4] = [1.0, 2.0, 10.0, f64::INFINITY];

pub fn density_profile(nu: &str, k: u32, range: GridSpec) -> Result<Outcome, CliError> {
    let k = parse_dim(k)?;
    let nus: Vec<Dof> = if nu.eq_ignore_ascii_case("all") {
        FIGURE_DOFS
            .iter()
            .map(|&v| Dof::new(v).expect("valid"))
            .collect()
    } else {
        vec![parse_dof(nu)?]
    };
    let ts = linspace(range);
    let mut table = Table::new("density-profile", &["nu", "k", "t", "density"]);
    let mut x = vec![0.0; k.get() as usize];
    for &nu in &nus {
        for &t in &ts {
            x[0] = t;
            table.push(vec![
                nu.into(),
                Cell::Int(k.get() as i64),
                Cell::Exact(t),
                density(nu, k, &x)?.into(),
            ]);
        }
    }
    Ok(Outcome::ok(table))
}

const MC_Z_LIMIT: f64 = 4.0;
const MIN_EXPECTED_HITS: f64 = 10.0;

pub fn table1(n_mc: Option<usize>, seed: u64) -> Result<Outcome, CliError> {
    let cells = check_table1()?;
    let mut headers = vec!["nu", "k", "probability", "reference", "matches"];
    if n_mc.is_some() {
        headers.extend(["mc_estimate", "mc_std_error", "mc_z", "mc_within_4se"]);
    }
    let mut table = Table::new("table1", &headers);
    let mut mismatches = Vec::new();
    if n_mc == Some(0) {
        return Err(CliError::Usage("--n-mc must be at least 1".into()));
    }
    let r = Radius::new(TABLE_RADIUS)?;
    for cell in cells {
        let mut row = vec![
            cell.nu.into(),
            Cell::Int(cell.k.get() as i64),
            cell.computed.into(),
            Cell::Text(cell.reference.to_string()),
            Cell::Bool(cell.matches),
        ];
        if !cell.matches {
            mismatches.push(format!(
                "nu={} k={}: computed {:.12e}, published {}",
                cell.nu, cell.k, cell.computed, cell.reference
            ));
        }
        if let Some(n) = n_mc {
            let batch = sample_t(cell.nu, cell.k, n, seed)?;
            let est = estimate_ball_prob(&batch, r);
            // Standardise with the binomial error under the computed probability, so
            // cells with no hits still get a finite score.
            let p = cell.computed;
            let null_se = (p * (1.0 - p) / n as f64).sqrt();
            let z = (est.estimate - p).abs() / null_se;
            // Below about ten expected hits the normal approximation is too rough to judge.
            let judged = n as f64 * p * (1.0 - p) >= MIN_EXPECTED_HITS;
            let within = z <= MC_Z_LIMIT;
            if judged && !within {
                mismatches.push(format!(
                    "nu={} k={}: Monte Carlo {:.6e} is {z:.2} standard errors from {:.6e}",
                    cell.nu, cell.k, est.estimate, p
                ));
            }
            row.extend([
                est.estimate.into(),
                est.std_error.into(),
                z.into(),
                if judged {
                    Cell::Bool(within)
                } else {
                    Cell::Empty
                },
            ]);
        }
        table.push(row);
    }
    Ok(Outcome { table, mismatches })
}

pub fn verify(k_max: u32, grid: GridSpec, tol: f64) -> Result<Outcome, CliError> {
    if k_max < 3 {
        return Err(CliError::Usage(format!(
            "--k-max must be at least 3 to exercise the increasing, constant and decreasing cases (got {k_max})"
        )));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    let grid = NuGrid::log_spaced(grid.start, grid.stop, grid.count)
        .map_err(|e| CliError::Usage(format!("--grid: {e}")))?;
    let check = verify_theorem(k_max, &grid, tol)?;
    let mut table = Table::new(
        "verify",
        &[
            "k",
            "expected",
            "observed",
            "max_abs_derivative",
            "max_fd_residual",
            "product_form_residual",
            "witness_violations",
            "passed",
        ],
    );
    let mut mismatches = Vec::new();
    let opt = |v: Option<f64>| v.map_or(Cell::Empty, Cell::Num);
    for d in &check.dimensions {
        table.push(vec![
            Cell::Int(d.k.get() as i64),
            Cell::Text(d.expected.to_string()),
            d.observed
                .map_or(Cell::Empty, |c| Cell::Text(c.to_string())),
            opt(d.max_abs_derivative),
            opt(d.max_derivative_residual),
            opt(d.product_form_residual),
            Cell::Int(d.witness_violations.len() as i64),
            Cell::Bool(d.passed),
        ]);
        if !d.passed {
            let mut msg = format!("k={}: expected {}", d.k, d.expected);
            if let Some(obs) = d.observed {
                msg.push_str(&format!(", observed {obs}"));
            }
            if let Some(err) = &d.error {
                msg.push_str(&format!(", {err}"));
            }
            for w in d.witness_violations.iter().take(10) {
                msg.push_str(&format!(
                    ", witness nu={} ({:?} {:e})",
                    w.nu, w.kind, w.value
                ));
            }
            mismatches.push(msg);
        }
    }
    Ok(Outcome { table, mismatches })
}

const SWEEP_DIMS: std::ops::RangeInclusive<u32> = 1..=10;

pub fn moments(nu1: &str, nu2: &str, k: u32, m: f64) -> Result<Outcome, CliError> {
    let nu1 = parse_dof(nu1)?;
    let nu2 = parse_dof(nu2)?;
    let k = parse_dim(k)?;
    if !(m >= 0.0 && m.is_finite()) {
        return Err(CliError::Usage(format!(
            "--m must be finite and >= 0, got {m}"
        )));
    }
    let min_nu = nu1.as_f64().min(nu2.as_f64());
    if m >= min_nu {
        return Err(CliError::Usage(format!(
            "moment of order {m} does not exist: requires m < min(nu1, nu2) = {min_nu}"
        )));
    }
    let with_kurtosis = min_nu > 4.0;
    let mut dims: Vec<u32> = SWEEP_DIMS.collect();
    if !SWEEP_DIMS.contains(&k.get()) {
        dims.push(k.get());
    }
    let mut table = Table::new(
        "moments",
        &[
            "k",
            "m",
            "moment_ratio",
            "radial_moment_quotient",
            "kurtosis_ratio",
            "requested",
        ],
    );
    for kk in dims {
        let d = Dim::new(kk)?;
        let ratio = moment_ratio(nu1, nu2, d, m)?;
        let quotient = radial_moment(nu1, d, m)? / radial_moment(nu2, d, m)?;
        let kurt = if with_kurtosis {
            Cell::Num(kurtosis_ratio(nu1, nu2, d)?)
        } else {
            Cell::Empty
        };
        table.push(vec![
            Cell::Int(kk as i64),
            Cell::Exact(m),
            ratio.into(),
            quotient.into(),
            kurt,
            Cell::Bool(kk == k.get()),
        ]);
    }
    Ok(Outcome::ok(table))
}

pub fn sample(
    nu: &str,
    k: u32,
    n: usize,
    seed: u64,
    radii: &[f64],
    draws: bool,
) -> Result<Outcome, CliError> {
    let nu = parse_dof(nu)?;
    let k = parse_dim(k)?;
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let radii: Vec<Radius> = radii
        .iter()
        .map(|&r| Radius::new(r).map_err(|e| CliError::Usage(format!("--radius: {e}"))))
        .collect::<Result<_, _>>()?;
    let batch = sample_t(nu, k, n, seed)?;
    if draws {
        const COORDS: [&str; 8] = ["x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8"];
        if k.get() as usize > COORDS.len() {
            return Err(CliError::Usage(format!(
                "--draws supports k <= {}",
                COORDS.len()
            )));
        }
        let mut headers = vec!["index"];
        headers.extend_from_slice(&COORDS[..k.get() as usize]);
        let mut table = Table::new("sample", &headers);
        for (i, p) in batch.points().enumerate() {
            let mut row = vec![Cell::Int(i as i64)];
            row.extend(p.iter().map(|&c| Cell::Num(c)));
            table.push(row);
        }
        return Ok(Outcome::ok(table));
    }
    let mut table = Table::new(
        "sample",
        &[
            "statistic",
            "parameter",
            "estimate",
            "std_error",
            "analytic",
        ],
    );
    for r in radii {
        let est = estimate_ball_prob(&batch, r);
        table.push(vec![
            Cell::Text("ball_prob".into()),
            Cell::Exact(r.get()),
            est.estimate.into(),
            est.std_error.into(),
            ball_prob(nu, k, r)?.into(),
        ]);
    }
    if nu.as_f64() > 4.0 {
        // The sample mean of |X|^2 only has a finite standard error when E|X|^4 exists.
        let est = estimate_radial_moment(&batch, 2.0);
        table.push(vec![
            Cell::Text("radial_moment".into()),
            Cell::Exact(2.0),
            est.estimate.into(),
            est.std_error.into(),
            radial_moment(nu, k, 2.0)?.into(),
        ]);
    }
    Ok(Outcome::ok(table))
}
