//! The train-summary subcommand: read the stats CSVs of a training run,
//! print the latest update check broken down by walk length, and emit
//! per-metric plot-data files (`plotdata_<metric>.csv`, x = update check)
//! plus predicted-vs-target scatter data when prediction samples exist.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::registry::CliError;

struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn read_csv(path: &Path) -> Result<Csv, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| CliError::Usage(format!("{}: empty stats file", path.display())))?
        .split(',')
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<String> = line.split(',').map(str::to_string).collect();
        if row.len() != header.len() {
            return Err(CliError::Usage(format!(
                "{}:{}: expected {} fields, got {}",
                path.display(),
                i + 2,
                header.len(),
                row.len()
            )));
        }
        rows.push(row);
    }
    Ok(Csv { header, rows })
}

impl Csv {
    fn col(&self, name: &str) -> Result<usize, CliError> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Usage(format!("stats file lacks column `{name}`")))
    }
}

/// Metrics exported as plot data, one file per metric.
const PLOT_METRICS: [&str; 7] = [
    "loss",
    "target_mean",
    "solve_rate",
    "path_cost_mean",
    "search_itrs_mean",
    "insts_generated",
    "k_max",
];

pub fn run_summary(stats_dir: &Path, out_dir: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let stats = read_csv(&stats_dir.join("stats.csv"))?;
    if stats.rows.is_empty() {
        return Err(CliError::Usage("stats.csv holds no update checks".into()));
    }
    fs::create_dir_all(out_dir)?;

    let check_col = stats.col("check")?;
    for metric in PLOT_METRICS {
        let col = stats.col(metric)?;
        let mut text = String::from("check,value\n");
        for row in &stats.rows {
            text.push_str(&format!("{},{}\n", row[check_col], row[col]));
        }
        fs::write(out_dir.join(format!("plotdata_{metric}.csv")), text)?;
    }

    let last = stats.rows.last().expect("nonempty rows");
    writeln!(out, "latest update check: {}", last[check_col])?;
    for (name, value) in stats.header.iter().zip(last) {
        writeln!(out, "  {name:<18} {value}")?;
    }

    let by_k = read_csv(&stats_dir.join("stats_by_k.csv"))?;
    let k_check = by_k.col("check")?;
    let last_check = &last[check_col];
    let cols = [
        by_k.col("k")?,
        by_k.col("count")?,
        by_k.col("solve_rate")?,
        by_k.col("path_cost_mean")?,
        by_k.col("search_itrs_mean")?,
        by_k.col("target_mean")?,
    ];
    writeln!(out)?;
    writeln!(
        out,
        "{:>4} {:>7} {:>11} {:>15} {:>17} {:>12}",
        "k", "count", "solve_rate", "path_cost_mean", "search_itrs_mean", "target_mean"
    )?;
    let mut k_rows: BTreeMap<usize, &Vec<String>> = BTreeMap::new();
    for row in &by_k.rows {
        if &row[k_check] == last_check {
            let k: usize = row[cols[0]]
                .parse()
                .map_err(|_| CliError::Usage(format!("bad k value `{}`", row[cols[0]])))?;
            k_rows.insert(k, row);
        }
    }
    for (k, row) in &k_rows {
        writeln!(
            out,
            "{:>4} {:>7} {:>11} {:>15} {:>17} {:>12}",
            k, row[cols[1]], row[cols[2]], row[cols[3]], row[cols[4]], row[cols[5]]
        )?;
    }

    // Scatter data from the latest check, when the run saved predictions.
    let pred_path = stats_dir.join("pred_samples.csv");
    if pred_path.exists() {
        let pred = read_csv(&pred_path)?;
        if !pred.rows.is_empty() {
            let pc = pred.col("check")?;
            let pt = pred.col("target")?;
            let pp = pred.col("pred")?;
            let latest = &pred.rows.last().expect("nonempty")[pc];
            let mut text = String::from("target,pred\n");
            for row in &pred.rows {
                if &row[pc] == latest {
                    text.push_str(&format!("{},{}\n", row[pt], row[pp]));
                }
            }
            fs::write(out_dir.join("plotdata_pred_vs_target.csv"), text)?;
        }
    }
    Ok(())
}
