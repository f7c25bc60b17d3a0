//! Registry of domains, per-(domain, architecture) encoders, and
//! approximator architectures, plus the type-erased operations the
//! command-line tool drives. Domains and architectures are referenced by
//! name with an optional `key=value` argument list, for example
//! `grid:width=8,height=8,density=0.1` or `mlp:hidden=400-200`.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::algspec::{AlgoFamily, AlgoSpec};
use crate::domain::{
    gen_prob_insts_forward, gen_prob_insts_reverse, random_walk, sample_ks, Domain,
    GoalSampleableFromState, ProblemInstance, Renderable, StringToAct,
};
use crate::domains::{
    GridCoordsEncoder, GridDomain, SlidingTileDomain, StpOneHotEncoder,
};
use crate::encode::Encoder;
use crate::heur_nnet::{NnetHeuristicQ, NnetHeuristicV};
use crate::io::{FileError, InstanceLine, SolveRecord};
use crate::nnet::{
    load_checkpoint, Approximator, Evaluator, Mlp, MlpApprox, MlpSpec, NnetError,
};
use crate::search::{
    beam_search_q, beam_search_v, bwas, bwqs, random_rollout, replay_path, BeamParams,
    GraphSearchParams, HeuristicQ, HeuristicV, SearchError, SearchResult, ZeroHeuristicQ,
    ZeroHeuristicV,
};
use crate::train::{self, Head, TrainConfig, TrainError};

/// Errors surfaced to the command line, split by exit code: usage and
/// configuration problems exit 2, runtime failures exit 1.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<TrainError> for CliError {
    fn from(e: TrainError) -> Self {
        match e {
            TrainError::Config(_) | TrainError::Capability(..) => CliError::Usage(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::Config(_) => CliError::Usage(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<NnetError> for CliError {
    fn from(e: NnetError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<FileError> for CliError {
    fn from(e: FileError) -> Self {
        match e {
            FileError::Io(io) => CliError::Runtime(io.to_string()),
            fmt => CliError::Usage(fmt.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

/// `key=value` argument lists attached to domain and architecture names.
#[derive(Debug, Clone, Default)]
pub struct ArgMap(BTreeMap<String, String>);

impl ArgMap {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        for part in text.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (key, value) = part.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("expected key=value, got `{part}`"))
            })?;
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(ArgMap(map))
    }

    pub fn ensure_known(&self, known: &[&str]) -> Result<(), CliError> {
        for key in self.0.keys() {
            if !known.contains(&key.as_str()) {
                return Err(CliError::Usage(format!(
                    "unknown argument `{key}` (expected one of {})",
                    known.join(", ")
                )));
            }
        }
        Ok(())
    }

    pub fn get<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, CliError> {
        match self.0.get(key) {
            None => Ok(default),
            Some(raw) => raw
                .parse()
                .map_err(|_| CliError::Usage(format!("bad value `{raw}` for `{key}`"))),
        }
    }

    pub fn get_str(&self, key: &str, default: &str) -> String {
        self.0.get(key).cloned().unwrap_or_else(|| default.to_string())
    }
}

/// Split `name:args` into the name and its parsed argument list.
pub fn split_spec(text: &str) -> Result<(&str, ArgMap), CliError> {
    match text.split_once(':') {
        Some((name, args)) => Ok((name.trim(), ArgMap::parse(args)?)),
        None => Ok((text.trim(), ArgMap::default())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Forward,
    Reverse,
}

impl std::str::FromStr for Scheme {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "forward" => Ok(Scheme::Forward),
            "reverse" => Ok(Scheme::Reverse),
            other => Err(format!("unknown scheme `{other}` (forward|reverse)")),
        }
    }
}

/// A report row from the timing tool.
pub struct TimeRow {
    pub calls: usize,
    pub total_secs: f64,
}

pub fn format_time_report(rows: &[(String, Option<TimeRow>)]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<22} {:>8} {:>12} {:>14}\n",
        "op", "calls", "total secs", "per-call us"
    ));
    for (name, row) in rows {
        match row {
            Some(r) => {
                let per_call = if r.calls == 0 {
                    0.0
                } else {
                    r.total_secs / r.calls as f64 * 1e6
                };
                out.push_str(&format!(
                    "{:<22} {:>8} {:>12.6} {:>14.3}\n",
                    name, r.calls, r.total_secs, per_call
                ));
            }
            None => out.push_str(&format!("{name:<22} {:>8}\n", "absent")),
        }
    }
    out
}

/// The type-erased operations the CLI runs against a registered domain.
pub trait DomainOps: Send + Sync {
    fn name(&self) -> &str;
    fn capabilities(&self) -> Vec<&'static str>;

    fn gen_instances(
        &self,
        scheme: Scheme,
        ks: &[usize],
        seed: u64,
    ) -> Result<Vec<InstanceLine>, CliError>;

    fn solve(
        &self,
        insts: &[InstanceLine],
        algo: &AlgoSpec,
        ckpt: Option<&Path>,
        workers: usize,
        seed: u64,
        verbose: bool,
    ) -> Result<Vec<SolveRecord>, CliError>;

    fn time_report(&self, ckpt: Option<&Path>) -> Result<String, CliError>;

    fn viz(
        &self,
        steps: usize,
        interactive: bool,
        seed: u64,
        input: &mut dyn BufRead,
        output: &mut dyn Write,
    ) -> Result<(), CliError>;

    fn train(
        &self,
        cfg: &TrainConfig,
        arch_name: &str,
        factory: &ApproxFactory<'_>,
        test_insts: Option<&[InstanceLine]>,
        out_dir: &Path,
    ) -> Result<(), CliError>;
}

/// Builds an approximator given the encoder input width and output width.
pub type ApproxFactory<'a> = dyn Fn(usize, usize) -> Result<MlpApprox, CliError> + 'a;

struct Ops<D: Domain> {
    name: String,
    domain: D,
    encoders: Vec<(String, Arc<dyn Encoder<D::State, D::Goal>>)>,
}

impl<D> Ops<D>
where
    D: Domain + GoalSampleableFromState + StringToAct + Renderable + 'static,
{
    /// First registered encoder for the architecture name.
    fn encoder_for(&self, arch: &str) -> Result<&Arc<dyn Encoder<D::State, D::Goal>>, CliError> {
        self.encoders
            .iter()
            .find(|(a, _)| a == arch)
            .map(|(_, e)| e)
            .ok_or_else(|| {
                CliError::Usage(format!(
                    "no encoder registered for domain `{}` and architecture `{arch}`",
                    self.name
                ))
            })
    }

    fn parse_instance(
        &self,
        line: &InstanceLine,
    ) -> Result<ProblemInstance<D::State, D::Goal>, CliError> {
        let start = self
            .domain
            .text_to_state(&line.start)
            .map_err(|e| CliError::Usage(format!("instance start: {e}")))?;
        let goal = self
            .domain
            .text_to_goal(&line.goal)
            .map_err(|e| CliError::Usage(format!("instance goal: {e}")))?;
        Ok(ProblemInstance {
            start,
            goal,
            gen_steps: line.gen_steps,
        })
    }

    /// Load a checkpoint and wire it to this domain's encoder, checking
    /// the stored head kind against what the algorithm expects.
    fn heuristic_from_ckpt(
        &self,
        ckpt: &Path,
        wants_q: bool,
    ) -> Result<(Arc<dyn Evaluator>, Arc<dyn Encoder<D::State, D::Goal>>), CliError> {
        let data = load_checkpoint(ckpt)?;
        let head = data.meta.get("head").and_then(|h| h.as_str()).map(str::to_string);
        if let Some(head) = &head {
            let stored_q = head == "q";
            if stored_q != wants_q {
                return Err(CliError::Usage(format!(
                    "checkpoint holds a heuristic-{head} function but the algorithm needs a \
                     heuristic-{} function",
                    if wants_q { "q" } else { "v" }
                )));
            }
        }
        let arch = data
            .meta
            .get("arch")
            .and_then(|a| a.as_str())
            .unwrap_or("mlp")
            .to_string();
        let approx = MlpApprox::from_checkpoint(data);
        let encoder = self.encoder_for(&arch)?.clone();
        if encoder.dim() != approx.in_dim() {
            return Err(CliError::Usage(format!(
                "checkpoint input width {} does not match encoder width {}",
                approx.in_dim(),
                encoder.dim()
            )));
        }
        Ok((approx.snapshot(), encoder))
    }

    fn solve_one(
        &self,
        inst: &ProblemInstance<D::State, D::Goal>,
        algo: &AlgoSpec,
        hv: &dyn HeuristicV<D::State, D::Goal>,
        hq: &dyn HeuristicQ<D::State, D::Goal>,
        verbose: bool,
        rng: &mut dyn RngCore,
    ) -> Result<SearchResult<D::State, D::Action>, CliError> {
        let graph_params = GraphSearchParams {
            weight: algo.weight,
            batch_size: algo.batch,
            eps: algo.eps,
            max_itrs: algo.max_itrs,
            verbose,
        };
        let beam_params = BeamParams {
            width: algo.batch,
            temp: algo.temp,
            eps: algo.eps,
            max_itrs: algo.max_itrs,
            verbose,
        };
        let need = |cap: &str| {
            CliError::Usage(format!(
                "domain `{}` lacks the {cap} capability required by {}",
                self.name, algo.family
            ))
        };
        match algo.family {
            AlgoFamily::GraphV => {
                let acts = self.domain.acts_enum().ok_or_else(|| need("ActsEnum"))?;
                Ok(bwas(acts, inst, hv, &graph_params, rng)?)
            }
            AlgoFamily::GraphQ => {
                let fixed = self
                    .domain
                    .fixed_acts_enum()
                    .ok_or_else(|| need("FixedActsEnum"))?;
                Ok(bwqs(fixed, inst, hq, &graph_params, rng)?)
            }
            AlgoFamily::BeamV => {
                let acts = self.domain.acts_enum().ok_or_else(|| need("ActsEnum"))?;
                Ok(beam_search_v(acts, inst, hv, &beam_params, rng)?)
            }
            AlgoFamily::BeamQ => {
                let fixed = self
                    .domain
                    .fixed_acts_enum()
                    .ok_or_else(|| need("FixedActsEnum"))?;
                Ok(beam_search_q(fixed, inst, hq, &beam_params, rng)?)
            }
            AlgoFamily::Rollout => Ok(random_rollout(&self.domain, inst, algo.max_itrs, rng)?),
            other => Err(CliError::Usage(format!(
                "`{other}` is a training algorithm, not a solver"
            ))),
        }
    }
}

impl<D> DomainOps for Ops<D>
where
    D: Domain + GoalSampleableFromState + StringToAct + Renderable + 'static,
{
    fn name(&self) -> &str {
        &self.name
    }

    fn capabilities(&self) -> Vec<&'static str> {
        let d = &self.domain;
        let mut caps = Vec::new();
        if d.acts_enum().is_some() {
            caps.push("ActsEnum");
        }
        if d.fixed_acts_enum().is_some() {
            caps.push("FixedActsEnum");
        }
        caps.push("GoalSampleableFromState");
        if d.reverse_walkable().is_some() {
            caps.push("ReverseWalkable");
        }
        caps.push("StringToAct");
        caps.push("Renderable");
        if d.batched_transition().is_some() {
            caps.push("BatchedTransition");
        }
        caps
    }

    fn gen_instances(
        &self,
        scheme: Scheme,
        ks: &[usize],
        seed: u64,
    ) -> Result<Vec<InstanceLine>, CliError> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let insts = match scheme {
            Scheme::Forward => gen_prob_insts_forward(&self.domain, ks, &mut rng)
                .map_err(|e| CliError::Runtime(e.to_string()))?,
            Scheme::Reverse => {
                let walker = self.domain.reverse_walkable().ok_or_else(|| {
                    CliError::Usage(format!(
                        "domain `{}` lacks the ReverseWalkable capability required by the \
                         reverse scheme",
                        self.name
                    ))
                })?;
                gen_prob_insts_reverse(walker, ks, &mut rng)
                    .map_err(|e| CliError::Runtime(e.to_string()))?
            }
        };
        Ok(insts
            .into_iter()
            .map(|inst| InstanceLine {
                start: self.domain.state_to_text(&inst.start),
                goal: self.domain.goal_to_text(&inst.goal),
                gen_steps: inst.gen_steps,
            })
            .collect())
    }

    fn solve(
        &self,
        insts: &[InstanceLine],
        algo: &AlgoSpec,
        ckpt: Option<&Path>,
        workers: usize,
        seed: u64,
        verbose: bool,
    ) -> Result<Vec<SolveRecord>, CliError> {
        if algo.family.is_supervised() {
            return Err(CliError::Usage(format!(
                "`{}` is a training algorithm, not a solver",
                algo.family
            )));
        }
        let wants_q = algo.family.q_head().unwrap_or(false);
        let n_actions = self
            .domain
            .fixed_acts_enum()
            .map(|f| f.all_actions().len())
            .unwrap_or(0);

        let loaded = match ckpt {
            Some(path) => Some(self.heuristic_from_ckpt(path, wants_q)?),
            None => None,
        };
        let hv: Box<dyn HeuristicV<D::State, D::Goal>> = match &loaded {
            Some((eval, encoder)) if !wants_q => {
                Box::new(NnetHeuristicV::new(eval.clone(), encoder.clone()))
            }
            _ => Box::new(ZeroHeuristicV),
        };
        let hq: Box<dyn HeuristicQ<D::State, D::Goal>> = match &loaded {
            Some((eval, encoder)) if wants_q => {
                Box::new(NnetHeuristicQ::new(eval.clone(), encoder.clone()))
            }
            _ => Box::new(ZeroHeuristicQ { n_actions }),
        };

        let parsed: Vec<ProblemInstance<D::State, D::Goal>> = insts
            .iter()
            .map(|line| self.parse_instance(line))
            .collect::<Result<_, _>>()?;

        let solve_range = |range: std::ops::Range<usize>| -> Result<Vec<SolveRecord>, CliError> {
            let mut records = Vec::with_capacity(range.len());
            for idx in range {
                let inst = &parsed[idx];
                let mut rng = ChaCha12Rng::seed_from_u64(seed.wrapping_add(idx as u64));
                let result =
                    self.solve_one(inst, algo, hv.as_ref(), hq.as_ref(), verbose, &mut rng)?;
                // Replay-verify every solved path before it is written.
                let path_cost = if result.solved {
                    let (cost, reached) = replay_path(&self.domain, inst, &result.path)
                        .map_err(|e| CliError::Runtime(format!("replay failed: {e}")))?;
                    if !reached || cost != result.path_cost {
                        return Err(CliError::Runtime(format!(
                            "instance {idx}: path replay disagrees with search result"
                        )));
                    }
                    Some(cost)
                } else {
                    None
                };
                records.push(SolveRecord {
                    inst: idx,
                    solved: result.solved,
                    path: result.path.iter().map(|a| a.to_string()).collect(),
                    path_cost,
                    iterations: result.iterations,
                    nodes_generated: result.nodes_generated,
                    secs: result.wall_time_secs,
                });
            }
            Ok(records)
        };

        let workers = workers.max(1).min(parsed.len().max(1));
        if workers <= 1 {
            return solve_range(0..parsed.len());
        }
        let chunk = parsed.len().div_ceil(workers);
        let results: Vec<Result<Vec<SolveRecord>, CliError>> = std::thread::scope(|scope| {
            let solve_range = &solve_range;
            (0..workers)
                .map(|w| {
                    let range = w * chunk..((w + 1) * chunk).min(parsed.len());
                    scope.spawn(move || solve_range(range))
                })
                .collect::<Vec<_>>()
                .into_iter()
                .map(|h| h.join().expect("solve worker panicked"))
                .collect()
        });
        let mut records = Vec::with_capacity(parsed.len());
        for result in results {
            records.extend(result?);
        }
        Ok(records)
    }

    fn time_report(&self, ckpt: Option<&Path>) -> Result<String, CliError> {
        let d = &self.domain;
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let mut rows: Vec<(String, Option<TimeRow>)> = Vec::new();

        let time_block = |f: &mut dyn FnMut() -> Result<usize, CliError>| -> Result<TimeRow, CliError> {
            let start = Instant::now();
            let calls = f()?;
            Ok(TimeRow {
                calls,
                total_secs: start.elapsed().as_secs_f64(),
            })
        };

        // Shared workload: instances and a pool of walk states.
        let ks = sample_ks(10, 100, &mut rng);
        let row = time_block(&mut || {
            d.samp_prob_insts(&ks, &mut rng.clone())
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            Ok(100)
        })?;
        rows.push(("samp_prob_insts".into(), Some(row)));

        let start = d.samp_start_state(&mut rng);
        let walk = random_walk(d, &start, 1000, &mut rng)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        let states = walk.states;

        let mut rng2 = ChaCha12Rng::seed_from_u64(1);
        let row = time_block(&mut || {
            let mut n = 0;
            for s in &states {
                if d.samp_state_act(s, &mut rng2).is_ok() {
                    n += 1;
                }
            }
            Ok(n)
        })?;
        rows.push(("samp_state_act".into(), Some(row)));

        let mut rng3 = ChaCha12Rng::seed_from_u64(2);
        let acts: Vec<_> = states
            .iter()
            .map(|s| d.samp_state_act(s, &mut rng3).ok())
            .collect();
        let row = time_block(&mut || {
            let mut n = 0;
            for (s, a) in states.iter().zip(&acts) {
                if let Some(a) = a {
                    d.next_state(s, a)
                        .map_err(|e| CliError::Runtime(e.to_string()))?;
                    n += 1;
                }
            }
            Ok(n)
        })?;
        rows.push(("next_state".into(), Some(row)));

        let goal = d.samp_goal_from_state(states.last().expect("nonempty walk"), &mut rng);
        let row = time_block(&mut || {
            for s in &states {
                std::hint::black_box(d.is_solved(s, &goal));
            }
            Ok(states.len())
        })?;
        rows.push(("is_solved".into(), Some(row)));

        let row = time_block(&mut || {
            for s in &states {
                std::hint::black_box(d.samp_goal_from_state(s, &mut rng.clone()));
            }
            Ok(states.len())
        })?;
        rows.push(("samp_goal_from_state".into(), Some(row)));

        match d.acts_enum() {
            Some(acts_enum) => {
                let row = time_block(&mut || {
                    for s in &states {
                        acts_enum
                            .expand(s)
                            .map_err(|e| CliError::Runtime(e.to_string()))?;
                    }
                    Ok(states.len())
                })?;
                rows.push(("expand".into(), Some(row)));
            }
            None => rows.push(("expand".into(), None)),
        }

        match d.reverse_walkable() {
            Some(walker) => {
                let mut rng4 = ChaCha12Rng::seed_from_u64(3);
                let row = time_block(&mut || {
                    for s in &states {
                        walker
                            .reverse_step(s, &mut rng4)
                            .map_err(|e| CliError::Runtime(e.to_string()))?;
                    }
                    Ok(states.len())
                })?;
                rows.push(("reverse_step".into(), Some(row)));
            }
            None => rows.push(("reverse_step".into(), None)),
        }

        match d.batched_transition() {
            Some(batched) => {
                let legal: Vec<(D::State, D::Action)> = states
                    .iter()
                    .zip(&acts)
                    .filter_map(|(s, a)| a.clone().map(|a| (s.clone(), a)))
                    .collect();
                let batch_states: Vec<D::State> =
                    legal.iter().map(|(s, _)| s.clone()).collect();
                let batch_acts: Vec<D::Action> = legal.iter().map(|(_, a)| a.clone()).collect();
                let row = time_block(&mut || {
                    let mut flat = batched.encode_states(&batch_states);
                    batched
                        .step_batch(&mut flat, &batch_acts)
                        .map_err(|e| CliError::Runtime(e.to_string()))?;
                    std::hint::black_box(batched.decode_states(&flat));
                    Ok(batch_states.len())
                })?;
                rows.push(("batched_transition".into(), Some(row)));
            }
            None => rows.push(("batched_transition".into(), None)),
        }

        let row = time_block(&mut || {
            for s in &states {
                let text = self.domain.state_to_text(s);
                self.domain
                    .text_to_state(&text)
                    .map_err(|e| CliError::Runtime(e.to_string()))?;
            }
            Ok(states.len())
        })?;
        rows.push(("state_codec".into(), Some(row)));

        let row = time_block(&mut || {
            for s in states.iter().take(100) {
                std::hint::black_box(self.domain.render_state(s));
            }
            Ok(states.len().min(100))
        })?;
        rows.push(("render_state".into(), Some(row)));

        if let Some(path) = ckpt {
            let data = load_checkpoint(path)?;
            let arch = data
                .meta
                .get("arch")
                .and_then(|a| a.as_str())
                .unwrap_or("mlp")
                .to_string();
            let approx = MlpApprox::from_checkpoint(data);
            let encoder = self.encoder_for(&arch)?.clone();
            let pairs: Vec<(&D::State, &D::Goal)> =
                states.iter().map(|s| (s, &goal)).collect();
            let row = time_block(&mut || {
                std::hint::black_box(crate::encode::encode_rows(encoder.as_ref(), &pairs));
                Ok(pairs.len())
            })?;
            rows.push(("encode_state_goal".into(), Some(row)));

            let inputs = crate::encode::encode_rows(encoder.as_ref(), &pairs);
            let row = time_block(&mut || {
                for chunk_start in (0..inputs.nrows()).step_by(32) {
                    let end = (chunk_start + 32).min(inputs.nrows());
                    let view = inputs.slice(ndarray::s![chunk_start..end, ..]);
                    std::hint::black_box(
                        approx
                            .forward(view)
                            .map_err(|e| CliError::Runtime(e.to_string()))?,
                    );
                }
                Ok(inputs.nrows())
            })?;
            rows.push(("nnet_forward".into(), Some(row)));
        }

        Ok(format_time_report(&rows))
    }

    fn viz(
        &self,
        steps: usize,
        interactive: bool,
        seed: u64,
        input: &mut dyn BufRead,
        output: &mut dyn Write,
    ) -> Result<(), CliError> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let inst = self
            .domain
            .samp_prob_insts(&[steps], &mut rng)
            .map_err(|e| CliError::Runtime(e.to_string()))?
            .into_iter()
            .next()
            .ok_or_else(|| CliError::Runtime("domain sampled no instance".into()))?;

        let mut current = inst.start.clone();
        writeln!(output, "goal:")?;
        writeln!(output, "{}", self.domain.render_goal(&inst.goal))?;
        writeln!(output, "state:")?;
        writeln!(output, "{}", self.domain.render_state(&current))?;
        if self.domain.is_solved(&current, &inst.goal) {
            writeln!(output, "solved")?;
        }
        if !interactive {
            return Ok(());
        }

        loop {
            write!(output, "action (q to quit)> ")?;
            output.flush()?;
            let mut line = String::new();
            if input.read_line(&mut line)? == 0 {
                return Ok(());
            }
            let text = line.trim();
            if text.is_empty() {
                continue;
            }
            if text.eq_ignore_ascii_case("q") {
                return Ok(());
            }
            let action = match self.domain.parse_action(text) {
                Ok(a) => a,
                Err(e) => {
                    writeln!(output, "{e}")?;
                    continue;
                }
            };
            match self.domain.next_state(&current, &action) {
                Ok(tr) => current = tr.next_state,
                Err(e) => {
                    writeln!(output, "{e}")?;
                    continue;
                }
            }
            writeln!(output, "{}", self.domain.render_state(&current))?;
            if self.domain.is_solved(&current, &inst.goal) {
                writeln!(output, "solved")?;
            }
        }
    }

    fn train(
        &self,
        cfg: &TrainConfig,
        arch_name: &str,
        factory: &ApproxFactory<'_>,
        test_insts: Option<&[InstanceLine]>,
        out_dir: &Path,
    ) -> Result<(), CliError> {
        let encoder = self.encoder_for(arch_name)?.clone();
        let out_dim = match cfg.head {
            Head::V => 1,
            Head::Q => self
                .domain
                .fixed_acts_enum()
                .map(|f| f.all_actions().len())
                .ok_or_else(|| {
                    CliError::Usage(format!(
                        "domain `{}` lacks the FixedActsEnum capability required by q heads",
                        self.name
                    ))
                })?,
        };
        let mut approx = factory(encoder.dim(), out_dim)?;
        let test_set: Option<Vec<ProblemInstance<D::State, D::Goal>>> = test_insts
            .map(|lines| {
                lines
                    .iter()
                    .map(|l| self.parse_instance(l))
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()?;
        let meta = serde_json::json!({
            "head": cfg.head.name(),
            "domain": self.name,
            "arch": arch_name,
        });
        train::train(
            &self.domain,
            cfg,
            encoder,
            &mut approx,
            test_set.as_deref(),
            out_dir,
            &meta,
        )?;
        Ok(())
    }
}

pub struct DomainEntry {
    pub name: &'static str,
    pub summary: &'static str,
    pub args_help: &'static str,
    build: Box<dyn Fn(&ArgMap) -> Result<Arc<dyn DomainOps>, CliError> + Send + Sync>,
}

pub struct ArchEntry {
    pub name: &'static str,
    pub summary: &'static str,
    pub args_help: &'static str,
    build:
        Box<dyn Fn(&ArgMap, usize, usize, u64, f64) -> Result<MlpApprox, CliError> + Send + Sync>,
}

impl ArchEntry {
    pub fn build(
        &self,
        args: &ArgMap,
        in_dim: usize,
        out_dim: usize,
        seed: u64,
        lr: f64,
    ) -> Result<MlpApprox, CliError> {
        (self.build)(args, in_dim, out_dim, seed, lr)
    }
}

pub struct Registry {
    domains: Vec<DomainEntry>,
    archs: Vec<ArchEntry>,
}

impl Registry {
    /// The default registry: sliding-tile puzzles (`stp3`, `stp4`), the
    /// weighted grid (`grid`), and the `mlp` architecture.
    pub fn with_builtins() -> Self {
        let mut reg = Registry {
            domains: Vec::new(),
            archs: Vec::new(),
        };
        reg.domains.push(DomainEntry {
            name: "stp3",
            summary: "3x3 sliding-tile puzzle (8-puzzle), unit costs, reverse-walk generation",
            args_help: "(no arguments)",
            build: Box::new(|args| {
                args.ensure_known(&[])?;
                let domain = SlidingTileDomain::new(3)
                    .map_err(|e| CliError::Usage(e.to_string()))?;
                let encoder = Arc::new(StpOneHotEncoder::new(&domain));
                Ok(Arc::new(Ops {
                    name: "stp3".to_string(),
                    domain,
                    encoders: vec![("mlp".to_string(), encoder as _)],
                }))
            }),
        });
        reg.domains.push(DomainEntry {
            name: "stp4",
            summary: "4x4 sliding-tile puzzle (15-puzzle), unit costs, reverse-walk generation",
            args_help: "(no arguments)",
            build: Box::new(|args| {
                args.ensure_known(&[])?;
                let domain = SlidingTileDomain::new(4)
                    .map_err(|e| CliError::Usage(e.to_string()))?;
                let encoder = Arc::new(StpOneHotEncoder::new(&domain));
                Ok(Arc::new(Ops {
                    name: "stp4".to_string(),
                    domain,
                    encoders: vec![("mlp".to_string(), encoder as _)],
                }))
            }),
        });
        reg.domains.push(DomainEntry {
            name: "grid",
            summary: "weighted-grid navigation with obstacles, forward-walk generation",
            args_help: "width=8,height=8,density=0.0,maxw=3,mapseed=0",
            build: Box::new(|args| {
                args.ensure_known(&["width", "height", "density", "maxw", "mapseed"])?;
                let width = args.get("width", 8usize)?;
                let height = args.get("height", 8usize)?;
                let density = args.get("density", 0.0f64)?;
                let maxw = args.get("maxw", 3u32)?;
                let mapseed = args.get("mapseed", 0u64)?;
                let domain = GridDomain::new(width, height, density, maxw, mapseed)
                    .map_err(|e| CliError::Usage(e.to_string()))?;
                let encoder = Arc::new(GridCoordsEncoder::new(&domain));
                Ok(Arc::new(Ops {
                    name: "grid".to_string(),
                    domain,
                    encoders: vec![("mlp".to_string(), encoder as _)],
                }))
            }),
        });
        reg.archs.push(ArchEntry {
            name: "mlp",
            summary: "feedforward rectifier MLP trained with Adam",
            args_help: "hidden=400-200 (dash-separated hidden layer sizes)",
            build: Box::new(|args, in_dim, out_dim, seed, lr| {
                args.ensure_known(&["hidden"])?;
                let hidden = args.get_str("hidden", "400-200");
                let mut sizes = vec![in_dim];
                for part in hidden.split('-').filter(|p| !p.is_empty()) {
                    sizes.push(part.parse().map_err(|_| {
                        CliError::Usage(format!("bad hidden layer size `{part}`"))
                    })?);
                }
                sizes.push(out_dim);
                let spec = MlpSpec::new(sizes).map_err(|e| CliError::Usage(e.to_string()))?;
                Ok(MlpApprox::adam(Mlp::new(spec, seed), lr))
            }),
        });
        reg
    }

    pub fn domains(&self) -> &[DomainEntry] {
        &self.domains
    }

    pub fn archs(&self) -> &[ArchEntry] {
        &self.archs
    }

    /// Build a domain from a `name:args` spec.
    pub fn build_domain(&self, spec: &str) -> Result<Arc<dyn DomainOps>, CliError> {
        let (name, args) = split_spec(spec)?;
        let entry = self
            .domains
            .iter()
            .find(|d| d.name == name)
            .ok_or_else(|| {
                let names: Vec<&str> = self.domains.iter().map(|d| d.name).collect();
                CliError::Usage(format!(
                    "unknown domain `{name}` (registered: {})",
                    names.join(", ")
                ))
            })?;
        (entry.build)(&args)
    }

    pub fn find_arch(&self, name: &str) -> Result<&ArchEntry, CliError> {
        self.archs.iter().find(|a| a.name == name).ok_or_else(|| {
            let names: Vec<&str> = self.archs.iter().map(|a| a.name).collect();
            CliError::Usage(format!(
                "unknown architecture `{name}` (registered: {})",
                names.join(", ")
            ))
        })
    }
}
