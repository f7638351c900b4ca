//! Plain-text plot data derived from study artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::artifacts::*;
use crate::error::{CliError, CliResult};

pub const MU_MAP_DAT: &str = "mu_map.dat";
pub const LOGLOG_DAT: &str = "loglog.dat";
pub const CRITERIA_DAT: &str = "criteria.dat";

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Project the artifacts in `dir` onto whitespace-separated data files:
///
/// * `mu_map.dat` — `(m, k, μ)` for every unstable mode of `spectrum.csv`;
/// * `criteria.dat` — one `(r, value)` block per `m`, blocks separated by
///   two blank lines (gnuplot `index`);
/// * `loglog.dat` — `(ln k, ln(−λ_upper))` per `α`, likewise in blocks.
///
/// `spectrum.csv` is required; the other two files are written only when
/// their source artifact exists. Returns the paths written.
pub fn emit_plot_data(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let spectrum: Vec<SpectrumRow> = read_csv(&dir.join(SPECTRUM_CSV))?;
    let mut written = Vec::new();

    let mut text = String::from("# m k mu\n");
    for row in spectrum.iter().filter(|r| r.lambda < 0.0) {
        if let Some(mu) = row.mu {
            let _ = writeln!(text, "{} {} {:.12e}", row.m, row.k, mu);
        }
    }
    let path = dir.join(MU_MAP_DAT);
    write_text(&path, &text)?;
    written.push(path);

    let criteria_path = dir.join(CRITERIA_CSV);
    if criteria_path.exists() {
        let rows: Vec<CriterionRow> = read_csv(&criteria_path)?;
        let mut text = String::from("# r value (one block per m)\n");
        let mut current: Option<i32> = None;
        for row in rows {
            if current != Some(row.m) {
                if current.is_some() {
                    text.push_str("\n\n");
                }
                let _ = writeln!(text, "# m = {}", row.m);
                current = Some(row.m);
            }
            let _ = writeln!(text, "{:.12e} {:.12e}", row.r, row.value);
        }
        let path = dir.join(CRITERIA_DAT);
        write_text(&path, &text)?;
        written.push(path);
    }

    let scaling_path = dir.join(SCALING_CSV);
    if scaling_path.exists() {
        let rows: Vec<ScalingRow> = read_csv(&scaling_path)?;
        let mut text = String::from("# log_k log_neg_lambda (one block per alpha)\n");
        let mut current: Option<f64> = None;
        for row in rows.iter().filter(|r| r.lambda_upper < 0.0) {
            if current != Some(row.alpha) {
                if current.is_some() {
                    text.push_str("\n\n");
                }
                let _ = writeln!(text, "# alpha = {}", row.alpha);
                current = Some(row.alpha);
            }
            let _ = writeln!(
                text,
                "{:.12e} {:.12e}",
                (row.k as f64).ln(),
                (-row.lambda_upper).ln()
            );
        }
        let path = dir.join(LOGLOG_DAT);
        write_text(&path, &text)?;
        written.push(path);
    }
    Ok(written)
}
