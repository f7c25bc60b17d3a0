//! The training loop: per update check, collect a block of examples, push
//! it into the replay buffer, take `U` gradient steps on batches of `N`,
//! decide whether the target network adopts the current parameters, adapt
//! the walk-length curriculum, and emit statistics and checkpoints. The
//! target network is the zero function until the first swap.

use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::domain::{Domain, ProblemInstance};
use crate::encode::Encoder;
use crate::heur_nnet::{NnetHeuristicQ, NnetHeuristicV};
use crate::nnet::{Approximator, Evaluator, ZeroEvaluator};
use crate::search::replay_path;

use super::collect::{collect_update_check, run_search};
use super::replay::ReplayBuffer;
use super::stats::{StatsFiles, UpdateCheckStats};
use super::{Guidance, Head, TargetUpdate, TrainConfig, TrainError};

/// Double the walk-length cap when at least half the instances were
/// solved, up to `k_max`.
pub fn adapt_k(current_k: usize, solve_rate: f64, k_max: usize) -> usize {
    if solve_rate >= 0.5 && current_k < k_max {
        (current_k * 2).min(k_max)
    } else {
        current_k
    }
}

/// Target-network update criterion.
pub fn should_swap(policy: TargetUpdate, loss: f64) -> bool {
    match policy {
        TargetUpdate::Always => true,
        TargetUpdate::LossBelow(threshold) => loss < threshold,
    }
}

#[derive(Debug)]
pub struct TrainReport {
    pub checks: Vec<UpdateCheckStats>,
    pub final_k: usize,
}

/// Run the full training loop, writing `stats.csv`, `stats_by_k.csv`,
/// `pred_samples.csv`, `stats_test.csv`, `train.log`, and checkpoints
/// (`model.ckpt`, plus `model_targ.ckpt` once the target network has
/// adopted trained parameters) into `out_dir`.
pub fn train<D: Domain + ?Sized>(
    domain: &D,
    cfg: &TrainConfig,
    encoder: Arc<dyn Encoder<D::State, D::Goal>>,
    approx: &mut dyn Approximator,
    test_set: Option<&[ProblemInstance<D::State, D::Goal>]>,
    out_dir: &Path,
    ckpt_meta: &serde_json::Value,
) -> Result<TrainReport, TrainError> {
    cfg.validate()?;
    validate_capabilities(domain, cfg)?;
    if encoder.dim() != approx.in_dim() {
        return Err(TrainError::Config(format!(
            "encoder width {} != approximator input dim {}",
            encoder.dim(),
            approx.in_dim()
        )));
    }
    match cfg.head {
        Head::V if approx.out_dim() != 1 => {
            return Err(TrainError::Config(format!(
                "v head needs output dim 1, approximator has {}",
                approx.out_dim()
            )))
        }
        Head::Q => {
            let n_actions = domain
                .fixed_acts_enum()
                .map(|f| f.all_actions().len())
                .unwrap_or(0);
            if approx.out_dim() != n_actions {
                return Err(TrainError::Config(format!(
                    "q head needs one output per action ({} actions, output dim {})",
                    n_actions,
                    approx.out_dim()
                )));
            }
        }
        _ => {}
    }

    std::fs::create_dir_all(out_dir)?;
    let mut files = StatsFiles::create(out_dir)?;
    let mut replay = ReplayBuffer::new(cfg.replay_checks);
    let mut target_eval: Arc<dyn Evaluator> = Arc::new(ZeroEvaluator {
        out_dim: approx.out_dim(),
    });
    let mut swapped_once = false;
    let mut k_cur = cfg.k_start;
    let mut sampler = ChaCha12Rng::seed_from_u64(cfg.seed);
    sampler.set_stream(u64::MAX);

    let mut checks = Vec::with_capacity(cfg.max_update_checks);
    for check in 1..=cfg.max_update_checks {
        let guide_eval: Arc<dyn Evaluator> = match cfg.guidance {
            Guidance::Target => target_eval.clone(),
            Guidance::Live => approx.snapshot(),
        };
        let (block, cstats) =
            collect_update_check(domain, cfg, &encoder, &target_eval, &guide_eval, k_cur, check)?;
        if cstats.discarded > 0 {
            log::warn!(
                "check {check}: discarded {} dead-end examples",
                cstats.discarded
            );
        }
        replay.push_block(block);

        let train_start = Instant::now();
        let mut loss_sum = 0.0;
        let mut steps = 0usize;
        if replay.n_examples() > 0 {
            for _ in 0..cfg.update_itrs {
                loss_sum += gradient_step(approx, &replay, cfg, &mut sampler)?;
                steps += 1;
            }
        }
        let loss = if steps > 0 {
            loss_sum / steps as f64
        } else {
            f64::NAN
        };
        let secs_train = train_start.elapsed().as_secs_f64();

        let swapped = should_swap(cfg.target_update, loss);
        if swapped {
            target_eval = approx.snapshot();
            swapped_once = true;
        }

        let row = UpdateCheckStats::build(
            check,
            check * cfg.update_itrs,
            loss,
            k_cur,
            &cstats,
            secs_train,
        );
        files.write_check(&row, cfg.verbose)?;
        write_pred_samples(&mut files, check, approx, &replay)?;

        approx.save(&out_dir.join("model.ckpt"), ckpt_meta)?;
        if swapped {
            approx.save(&out_dir.join("model_targ.ckpt"), ckpt_meta)?;
        }

        if cfg.adaptive_k {
            k_cur = adapt_k(k_cur, row.solve_rate, cfg.k_max);
        }

        if let Some(insts) = test_set {
            if cfg.test_every > 0 && check % cfg.test_every == 0 && !insts.is_empty() {
                run_test_set(domain, cfg, approx, &encoder, insts, check, &mut files)?;
            }
        }

        checks.push(row);
    }

    if !swapped_once {
        files.log_note("target network never adopted trained parameters (zero function)")?;
    }
    Ok(TrainReport {
        checks,
        final_k: k_cur,
    })
}

fn validate_capabilities<D: Domain + ?Sized>(
    domain: &D,
    cfg: &TrainConfig,
) -> Result<(), TrainError> {
    use crate::algspec::AlgoFamily::*;
    let family = cfg.algo.family;
    let need = |cap: &'static str, what: String| TrainError::Capability(cap, what);
    match family {
        GraphV | BeamV => {
            if domain.acts_enum().is_none() {
                return Err(need("ActsEnum", format!("algorithm {family}")));
            }
        }
        GraphQ | BeamQ => {
            if domain.fixed_acts_enum().is_none() {
                return Err(need("FixedActsEnum", format!("algorithm {family}")));
            }
        }
        SupFwdV | SupFwdQ => {
            if domain.goal_sampleable().is_none() {
                return Err(need("GoalSampleableFromState", format!("algorithm {family}")));
            }
        }
        SupRevV | SupRevQ => {
            if domain.reverse_walkable().is_none() {
                return Err(need("ReverseWalkable", format!("algorithm {family}")));
            }
        }
        Rollout => {}
    }
    match cfg.head {
        Head::V => {
            if domain.acts_enum().is_none() {
                return Err(need("ActsEnum", "value-iteration targets".into()));
            }
        }
        Head::Q => {
            if domain.fixed_acts_enum().is_none() {
                return Err(need("FixedActsEnum", "q-learning targets".into()));
            }
        }
    }
    if cfg.her && domain.goal_sampleable().is_none() {
        return Err(need("GoalSampleableFromState", "hindsight relabeling".into()));
    }
    Ok(())
}

fn gradient_step(
    approx: &mut dyn Approximator,
    replay: &ReplayBuffer,
    cfg: &TrainConfig,
    sampler: &mut ChaCha12Rng,
) -> Result<f64, TrainError> {
    let sample = replay.sample(cfg.batch_size, sampler);
    let dim = approx.in_dim();
    let mut inputs = Array2::<f32>::zeros((sample.len(), dim));
    let mut targets = Vec::with_capacity(sample.len());
    let mut actions = Vec::with_capacity(sample.len());
    for (i, ex) in sample.iter().enumerate() {
        inputs
            .row_mut(i)
            .into_slice()
            .expect("contiguous row")
            .copy_from_slice(&ex.input);
        targets.push(ex.target);
        if let Some(a) = ex.action_index {
            actions.push(a);
        }
    }
    let mask = match cfg.head {
        Head::Q => {
            debug_assert_eq!(actions.len(), sample.len());
            Some(actions.as_slice())
        }
        Head::V => None,
    };
    Ok(approx.train_step(inputs.view(), &targets, mask)?)
}

fn write_pred_samples(
    files: &mut StatsFiles,
    check: usize,
    approx: &dyn Approximator,
    replay: &ReplayBuffer,
) -> Result<(), TrainError> {
    let Some(block) = replay.latest_block() else {
        return Ok(());
    };
    if block.is_empty() {
        return Ok(());
    }
    let step = (block.len() / 200).max(1);
    let picks: Vec<&super::TrainExample> = block.iter().step_by(step).take(200).collect();
    let mut inputs = Array2::<f32>::zeros((picks.len(), approx.in_dim()));
    for (i, ex) in picks.iter().enumerate() {
        inputs
            .row_mut(i)
            .into_slice()
            .expect("contiguous row")
            .copy_from_slice(&ex.input);
    }
    let outputs = approx.forward(inputs.view())?;
    let pairs: Vec<(f64, f64)> = picks
        .iter()
        .enumerate()
        .map(|(i, ex)| {
            let col = ex.action_index.unwrap_or(0);
            (ex.target, outputs[[i, col]])
        })
        .collect();
    files.write_pred_samples(check, &pairs)?;
    Ok(())
}

fn run_test_set<D: Domain + ?Sized>(
    domain: &D,
    cfg: &TrainConfig,
    approx: &dyn Approximator,
    encoder: &Arc<dyn Encoder<D::State, D::Goal>>,
    insts: &[ProblemInstance<D::State, D::Goal>],
    check: usize,
    files: &mut StatsFiles,
) -> Result<(), TrainError> {
    if cfg.algo.family.is_supervised() {
        return Ok(());
    }
    let snapshot = approx.snapshot();
    let hv = NnetHeuristicV::new(snapshot.clone(), encoder.clone());
    let hq = NnetHeuristicQ::new(snapshot, encoder.clone());
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    rng.set_stream(u64::MAX - check as u64);

    let mut solved = 0usize;
    let mut cost_sum = 0.0;
    let mut itr_sum = 0usize;
    for inst in insts {
        let result = run_search(
            domain,
            cfg,
            inst,
            Some(&hv),
            Some(&hq),
            &mut rng,
        )?;
        itr_sum += result.iterations;
        if result.solved {
            let (cost, ok) = replay_path(domain, inst, &result.path)?;
            debug_assert!(ok);
            solved += 1;
            cost_sum += cost;
        }
    }
    let n = insts.len();
    files.write_test(
        check,
        n,
        solved as f64 / n as f64,
        if solved > 0 {
            cost_sum / solved as f64
        } else {
            f64::NAN
        },
        itr_sum as f64 / n as f64,
    )?;
    Ok(())
}
