//! Exact tabular approximator: a map from encoded input rows to stored
//! values (default 0). With learning rate 1 a training step sets entries
//! exactly to their targets, which makes it a convergence test double for
//! the value-iteration and Q-learning fixed points.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use ndarray::{Array2, ArrayView2};

use super::{Approximator, Evaluator, NnetError};

type Key = Vec<u32>;

fn key_of(row: &[f32]) -> Key {
    row.iter().map(|v| v.to_bits()).collect()
}

pub struct TabularApprox {
    in_dim: usize,
    out_dim: usize,
    pub lr: f64,
    map: HashMap<Key, Vec<f32>>,
}

impl TabularApprox {
    pub fn new(in_dim: usize, out_dim: usize, lr: f64) -> Self {
        TabularApprox {
            in_dim,
            out_dim,
            lr,
            map: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn lookup(&self, input: &[f32]) -> Vec<f32> {
        self.map
            .get(&key_of(input))
            .cloned()
            .unwrap_or_else(|| vec![0.0; self.out_dim])
    }
}

impl Approximator for TabularApprox {
    fn in_dim(&self) -> usize {
        self.in_dim
    }

    fn out_dim(&self) -> usize {
        self.out_dim
    }

    fn forward(&self, inputs: ArrayView2<f32>) -> Result<Array2<f64>, NnetError> {
        let mut out = Array2::zeros((inputs.nrows(), self.out_dim));
        for (i, row) in inputs.rows().into_iter().enumerate() {
            let vals = self.lookup(row.as_slice().expect("contiguous row"));
            for (j, v) in vals.iter().enumerate() {
                out[[i, j]] = f64::from(*v);
            }
        }
        Ok(out)
    }

    fn train_step(
        &mut self,
        inputs: ArrayView2<f32>,
        targets: &[f64],
        actions: Option<&[usize]>,
    ) -> Result<f64, NnetError> {
        let n = inputs.nrows();
        if targets.len() != n {
            return Err(NnetError::DimMismatch(format!(
                "{} targets for {} input rows",
                targets.len(),
                n
            )));
        }
        let mut loss = 0.0;
        for (i, row) in inputs.rows().into_iter().enumerate() {
            let key = key_of(row.as_slice().expect("contiguous row"));
            let entry = self
                .map
                .entry(key)
                .or_insert_with(|| vec![0.0; self.out_dim]);
            let col = actions.map_or(0, |sel| sel[i]);
            let pred = f64::from(entry[col]);
            let residual = targets[i] - pred;
            loss += residual * residual;
            entry[col] = (pred + self.lr * residual) as f32;
        }
        Ok(loss / n.max(1) as f64)
    }

    fn snapshot(&self) -> Arc<dyn Evaluator> {
        Arc::new(TabularSnapshot {
            out_dim: self.out_dim,
            map: Arc::new(self.map.clone()),
        })
    }

    fn save(&self, path: &Path, meta: &serde_json::Value) -> Result<(), NnetError> {
        let tmp = path.with_extension("tmp");
        {
            let mut file = std::io::BufWriter::new(std::fs::File::create(&tmp)?);
            writeln!(
                file,
                "{}",
                serde_json::json!({
                    "kind": "tabular",
                    "in_dim": self.in_dim,
                    "out_dim": self.out_dim,
                    "lr": self.lr,
                    "entries": self.map.len(),
                    "meta": meta,
                })
            )?;
            let mut entries: Vec<(&Key, &Vec<f32>)> = self.map.iter().collect();
            entries.sort_by(|a, b| a.0.cmp(b.0));
            for (key, value) in entries {
                writeln!(
                    file,
                    "{}",
                    serde_json::json!({ "key": key, "value": value })
                )?;
            }
        }
        std::fs::rename(&tmp, path)?;
        Ok(())
    }
}

pub struct TabularSnapshot {
    out_dim: usize,
    map: Arc<HashMap<Key, Vec<f32>>>,
}

impl Evaluator for TabularSnapshot {
    fn out_dim(&self) -> usize {
        self.out_dim
    }

    fn eval(&self, inputs: ArrayView2<f32>) -> Array2<f64> {
        let mut out = Array2::zeros((inputs.nrows(), self.out_dim));
        for (i, row) in inputs.rows().into_iter().enumerate() {
            if let Some(vals) = self.map.get(&key_of(row.as_slice().expect("contiguous row"))) {
                for (j, v) in vals.iter().enumerate() {
                    out[[i, j]] = f64::from(*v);
                }
            }
        }
        out
    }
}
