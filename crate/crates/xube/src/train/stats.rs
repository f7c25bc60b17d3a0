//! Per-update-check statistics: CSV emission, the human-readable log, and
//! prediction samples for the training-summary tool.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::collect::CollectStats;

pub const STATS_HEADER: &str = "check,itr,loss,target_mean,target_min,target_max,k_max,\
solve_rate,path_cost_mean,search_itrs_mean,insts_generated,secs_generate,secs_targets,secs_train";
pub const BY_K_HEADER: &str = "check,k,count,solve_rate,path_cost_mean,search_itrs_mean,target_mean";
pub const PRED_HEADER: &str = "check,target,pred";
pub const TEST_HEADER: &str = "check,count,solve_rate,path_cost_mean,search_itrs_mean";

#[derive(Debug, Clone, Default)]
pub struct KRow {
    pub count: usize,
    pub solve_rate: f64,
    pub path_cost_mean: f64,
    pub search_itrs_mean: f64,
    pub target_mean: f64,
}

#[derive(Debug, Clone)]
pub struct UpdateCheckStats {
    pub check: usize,
    /// Cumulative gradient iterations.
    pub itr: usize,
    /// Mean loss over the check's gradient steps.
    pub loss: f64,
    pub target_mean: f64,
    pub target_min: f64,
    pub target_max: f64,
    /// The walk-length cap used to generate this check's instances.
    pub k_max: usize,
    /// First-attempt instances only (resamples excluded).
    pub solve_rate: f64,
    pub path_cost_mean: f64,
    pub search_itrs_mean: f64,
    pub insts_generated: usize,
    pub secs_generate: f64,
    pub secs_targets: f64,
    pub secs_train: f64,
    pub per_k: BTreeMap<usize, KRow>,
}

impl UpdateCheckStats {
    pub fn build(
        check: usize,
        itr: usize,
        loss: f64,
        k_cur: usize,
        collect: &CollectStats,
        secs_train: f64,
    ) -> Self {
        let mut cost_sum = 0.0;
        let mut solved = 0usize;
        let mut itr_sum = 0usize;
        let mut attempts = 0usize;
        let mut per_k = BTreeMap::new();
        for (&k, agg) in &collect.per_k {
            cost_sum += agg.cost_sum;
            solved += agg.solved;
            itr_sum += agg.itr_sum;
            attempts += agg.count;
            per_k.insert(
                k,
                KRow {
                    count: agg.count,
                    solve_rate: ratio(agg.solved as f64, agg.count as f64),
                    path_cost_mean: ratio(agg.cost_sum, agg.solved as f64),
                    search_itrs_mean: ratio(agg.itr_sum as f64, agg.count as f64),
                    target_mean: ratio(agg.target_sum, agg.target_count as f64),
                },
            );
        }
        UpdateCheckStats {
            check,
            itr,
            loss,
            target_mean: collect.target_mean(),
            target_min: collect.target_min,
            target_max: collect.target_max,
            k_max: k_cur,
            solve_rate: ratio(solved as f64, attempts as f64),
            path_cost_mean: ratio(cost_sum, solved as f64),
            search_itrs_mean: ratio(itr_sum as f64, attempts as f64),
            insts_generated: collect.insts_generated,
            secs_generate: collect.secs_generate,
            secs_targets: collect.secs_targets,
            secs_train,
            per_k,
        }
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        f64::NAN
    } else {
        num / den
    }
}

/// Fixed-precision CSV cell; NaN (undefined mean) renders as `nan`.
pub fn csv_num(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.6}")
    }
}

pub(crate) struct StatsFiles {
    stats: BufWriter<File>,
    by_k: BufWriter<File>,
    pred: BufWriter<File>,
    test: BufWriter<File>,
    log: BufWriter<File>,
}

impl StatsFiles {
    pub fn create(out_dir: &Path) -> std::io::Result<Self> {
        let open = |name: &str, header: Option<&str>| -> std::io::Result<BufWriter<File>> {
            let mut w = BufWriter::new(File::create(out_dir.join(name))?);
            if let Some(h) = header {
                writeln!(w, "{h}")?;
            }
            Ok(w)
        };
        Ok(StatsFiles {
            stats: open("stats.csv", Some(STATS_HEADER))?,
            by_k: open("stats_by_k.csv", Some(BY_K_HEADER))?,
            pred: open("pred_samples.csv", Some(PRED_HEADER))?,
            test: open("stats_test.csv", Some(TEST_HEADER))?,
            log: open("train.log", None)?,
        })
    }

    pub fn write_check(&mut self, s: &UpdateCheckStats, verbose: bool) -> std::io::Result<()> {
        writeln!(
            self.stats,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            s.check,
            s.itr,
            csv_num(s.loss),
            csv_num(s.target_mean),
            csv_num(s.target_min),
            csv_num(s.target_max),
            s.k_max,
            csv_num(s.solve_rate),
            csv_num(s.path_cost_mean),
            csv_num(s.search_itrs_mean),
            s.insts_generated,
            csv_num(s.secs_generate),
            csv_num(s.secs_targets),
            csv_num(s.secs_train),
        )?;
        for (k, row) in &s.per_k {
            writeln!(
                self.by_k,
                "{},{},{},{},{},{},{}",
                s.check,
                k,
                row.count,
                csv_num(row.solve_rate),
                csv_num(row.path_cost_mean),
                csv_num(row.search_itrs_mean),
                csv_num(row.target_mean),
            )?;
        }
        writeln!(
            self.log,
            "check {:>4}: itr {:>7} loss {:>10.6} targets {:.3}/{:.3}/{:.3} K {:>3} \
             solved {:>5.1}% cost {:>7.3} search-itrs {:>6.2} insts {}",
            s.check,
            s.itr,
            s.loss,
            s.target_min,
            s.target_mean,
            s.target_max,
            s.k_max,
            s.solve_rate * 100.0,
            s.path_cost_mean,
            s.search_itrs_mean,
            s.insts_generated,
        )?;
        if verbose {
            writeln!(
                self.log,
                "            timing: generate {:.2}s targets {:.2}s train {:.2}s",
                s.secs_generate, s.secs_targets, s.secs_train,
            )?;
        }
        self.stats.flush()?;
        self.by_k.flush()?;
        self.log.flush()
    }

    pub fn write_pred_samples(
        &mut self,
        check: usize,
        pairs: &[(f64, f64)],
    ) -> std::io::Result<()> {
        for (target, pred) in pairs {
            writeln!(
                self.pred,
                "{},{},{}",
                check,
                csv_num(*target),
                csv_num(*pred)
            )?;
        }
        self.pred.flush()
    }

    pub fn write_test(
        &mut self,
        check: usize,
        count: usize,
        solve_rate: f64,
        path_cost_mean: f64,
        search_itrs_mean: f64,
    ) -> std::io::Result<()> {
        writeln!(
            self.test,
            "{},{},{},{},{}",
            check,
            count,
            csv_num(solve_rate),
            csv_num(path_cost_mean),
            csv_num(search_itrs_mean)
        )?;
        writeln!(
            self.log,
            "            test: {} instances, solved {:.1}%, cost {:.3}, search-itrs {:.2}",
            count,
            solve_rate * 100.0,
            path_cost_mean,
            search_itrs_mean
        )?;
        self.test.flush()?;
        self.log.flush()
    }

    pub fn log_note(&mut self, note: &str) -> std::io::Result<()> {
        writeln!(self.log, "{note}")?;
        self.log.flush()
    }
}
