//! Pathfinding-algorithm spec strings.
//!
//! Grammar: `family ( "." param ( "_" param )* )?` where a param is a
//! decimal number immediately followed by one of the letters `B` (batch
//! or beam size), `W` (path-cost weight), `E` (epsilon), `T`
//! (temperature), `I` (max iterations), `S` (walk steps). For example,
//! `graph_q.10B_0.5W` is batch weighted Q* search with a batch size of 10
//! and a weight of 0.5. Unspecified params take defaults.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
#[error("bad algorithm spec: {0}")]
pub struct AlgoParseError(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlgoFamily {
    /// Batch weighted A* over nodes, guided by a heuristic-v function.
    GraphV,
    /// Batch weighted Q* over edges, guided by a heuristic-q function.
    GraphQ,
    BeamV,
    BeamQ,
    /// Uniform-random action rollout.
    Rollout,
    /// Supervised targets from forward random-walk path costs.
    SupFwdV,
    SupRevV,
    SupFwdQ,
    SupRevQ,
}

pub const ALGO_FAMILIES: [AlgoFamily; 9] = [
    AlgoFamily::GraphV,
    AlgoFamily::GraphQ,
    AlgoFamily::BeamV,
    AlgoFamily::BeamQ,
    AlgoFamily::Rollout,
    AlgoFamily::SupFwdV,
    AlgoFamily::SupRevV,
    AlgoFamily::SupFwdQ,
    AlgoFamily::SupRevQ,
];

impl AlgoFamily {
    pub fn name(self) -> &'static str {
        match self {
            AlgoFamily::GraphV => "graph_v",
            AlgoFamily::GraphQ => "graph_q",
            AlgoFamily::BeamV => "beam_v",
            AlgoFamily::BeamQ => "beam_q",
            AlgoFamily::Rollout => "rollout",
            AlgoFamily::SupFwdV => "sup_fwd_v",
            AlgoFamily::SupRevV => "sup_rev_v",
            AlgoFamily::SupFwdQ => "sup_fwd_q",
            AlgoFamily::SupRevQ => "sup_rev_q",
        }
    }

    pub fn is_supervised(self) -> bool {
        matches!(
            self,
            AlgoFamily::SupFwdV | AlgoFamily::SupRevV | AlgoFamily::SupFwdQ | AlgoFamily::SupRevQ
        )
    }

    /// Does the family consume a heuristic-q function (or produce q
    /// examples)? Rollout is head-agnostic and returns `None`.
    pub fn q_head(self) -> Option<bool> {
        match self {
            AlgoFamily::GraphV | AlgoFamily::BeamV | AlgoFamily::SupFwdV | AlgoFamily::SupRevV => {
                Some(false)
            }
            AlgoFamily::GraphQ | AlgoFamily::BeamQ | AlgoFamily::SupFwdQ | AlgoFamily::SupRevQ => {
                Some(true)
            }
            AlgoFamily::Rollout => None,
        }
    }
}

impl fmt::Display for AlgoFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgoSpec {
    pub family: AlgoFamily,
    /// B: batch size (graph search) or beam width.
    pub batch: usize,
    /// W: path-cost weight lambda.
    pub weight: f64,
    /// E: random-pop / random-edge probability.
    pub eps: f64,
    /// T: Boltzmann temperature for beam search.
    pub temp: f64,
    /// I: maximum search iterations.
    pub max_itrs: usize,
    /// S: fixed walk length for supervised families (0 = use the
    /// instance's generation length).
    pub walk_steps: usize,
}

pub const DEFAULT_BATCH: usize = 1;
pub const DEFAULT_WEIGHT: f64 = 1.0;
pub const DEFAULT_EPS: f64 = 0.0;
pub const DEFAULT_TEMP: f64 = 0.0;
pub const DEFAULT_MAX_ITRS: usize = 10_000;
pub const DEFAULT_WALK_STEPS: usize = 0;

impl AlgoSpec {
    pub fn new(family: AlgoFamily) -> Self {
        AlgoSpec {
            family,
            batch: DEFAULT_BATCH,
            weight: DEFAULT_WEIGHT,
            eps: DEFAULT_EPS,
            temp: DEFAULT_TEMP,
            max_itrs: DEFAULT_MAX_ITRS,
            walk_steps: DEFAULT_WALK_STEPS,
        }
    }

    /// Canonical text form; `parse_algo(render())` is the identity.
    pub fn render(&self) -> String {
        let mut params = Vec::new();
        if self.batch != DEFAULT_BATCH {
            params.push(format!("{}B", self.batch));
        }
        if self.weight != DEFAULT_WEIGHT {
            params.push(format!("{}W", self.weight));
        }
        if self.eps != DEFAULT_EPS {
            params.push(format!("{}E", self.eps));
        }
        if self.temp != DEFAULT_TEMP {
            params.push(format!("{}T", self.temp));
        }
        if self.max_itrs != DEFAULT_MAX_ITRS {
            params.push(format!("{}I", self.max_itrs));
        }
        if self.walk_steps != DEFAULT_WALK_STEPS {
            params.push(format!("{}S", self.walk_steps));
        }
        if params.is_empty() {
            self.family.name().to_string()
        } else {
            format!("{}.{}", self.family.name(), params.join("_"))
        }
    }
}

impl fmt::Display for AlgoSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

pub fn parse_algo(text: &str) -> Result<AlgoSpec, AlgoParseError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(AlgoParseError("empty spec".into()));
    }
    let (family_name, params_text) = match text.split_once('.') {
        Some((f, p)) => (f, Some(p)),
        None => (text, None),
    };
    let family = ALGO_FAMILIES
        .into_iter()
        .find(|f| f.name() == family_name)
        .ok_or_else(|| {
            let names: Vec<&str> = ALGO_FAMILIES.iter().map(|f| f.name()).collect();
            AlgoParseError(format!(
                "unknown family `{family_name}` (expected one of {})",
                names.join(", ")
            ))
        })?;

    let mut spec = AlgoSpec::new(family);
    let Some(params_text) = params_text else {
        return Ok(spec);
    };
    let mut seen = Vec::new();
    for token in params_text.split('_') {
        if token.len() < 2 {
            return Err(AlgoParseError(format!("malformed param `{token}`")));
        }
        let letter = token.chars().last().expect("nonempty token");
        let number = &token[..token.len() - letter.len_utf8()];
        if seen.contains(&letter) {
            return Err(AlgoParseError(format!("duplicate param `{token}`")));
        }
        seen.push(letter);
        let value: f64 = number
            .parse()
            .map_err(|_| AlgoParseError(format!("malformed number in `{token}`")))?;
        if !value.is_finite() || value < 0.0 {
            return Err(AlgoParseError(format!(
                "value out of range in `{token}`"
            )));
        }
        let as_count = |v: f64| -> Result<usize, AlgoParseError> {
            if v.fract() != 0.0 {
                return Err(AlgoParseError(format!(
                    "`{token}` needs an integer value"
                )));
            }
            Ok(v as usize)
        };
        match letter {
            'B' => spec.batch = as_count(value)?,
            'W' => spec.weight = value,
            'E' => spec.eps = value,
            'T' => spec.temp = value,
            'I' => spec.max_itrs = as_count(value)?,
            'S' => spec.walk_steps = as_count(value)?,
            other => {
                return Err(AlgoParseError(format!(
                    "unknown param letter `{other}` in `{token}`"
                )))
            }
        }
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn parses_the_documented_example() {
        let spec = parse_algo("graph_q.10B_0.5W").unwrap();
        assert_eq!(spec.family, AlgoFamily::GraphQ);
        assert_eq!(spec.batch, 10);
        assert_eq!(spec.weight, 0.5);
        assert_eq!(spec.eps, 0.0);
    }

    #[test]
    fn bare_family_takes_defaults() {
        let spec = parse_algo("graph_v").unwrap();
        assert_eq!(spec, AlgoSpec::new(AlgoFamily::GraphV));
        assert_eq!(spec.batch, 1);
        assert_eq!(spec.weight, 1.0);
        assert_eq!(spec.max_itrs, 10_000);
    }

    #[test]
    fn beam_spec_with_three_params() {
        let spec = parse_algo("beam_v.32B_1.0T_0.1E").unwrap();
        assert_eq!(spec.family, AlgoFamily::BeamV);
        assert_eq!(spec.batch, 32);
        assert_eq!(spec.temp, 1.0);
        assert_eq!(spec.eps, 0.1);
    }

    #[test]
    fn errors_name_the_offending_token() {
        for (input, needle) in [
            ("graph_x.1B", "graph_x"),
            ("graph_v.1B_2B", "2B"),
            ("graph_v.1Z", "1Z"),
            ("graph_v.xB", "xB"),
            ("graph_v.1.5B", "1.5B"),
            ("rollout.B", "B"),
        ] {
            let err = parse_algo(input).unwrap_err();
            assert!(
                err.0.contains(needle),
                "error for `{input}` should mention `{needle}`: {err}"
            );
        }
    }

    #[test]
    fn render_round_trips_fuzzed_specs() {
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        for _ in 0..500 {
            let family = ALGO_FAMILIES[rng.random_range(0..ALGO_FAMILIES.len())];
            let mut spec = AlgoSpec::new(family);
            if rng.random_bool(0.5) {
                spec.batch = rng.random_range(1..100);
            }
            if rng.random_bool(0.5) {
                spec.weight = f64::from(rng.random_range(0..=10u32)) / 10.0;
            }
            if rng.random_bool(0.5) {
                spec.eps = f64::from(rng.random_range(0..=4u32)) / 4.0;
            }
            if rng.random_bool(0.5) {
                spec.temp = f64::from(rng.random_range(0..=8u32)) / 2.0;
            }
            if rng.random_bool(0.5) {
                spec.max_itrs = rng.random_range(1..100_000);
            }
            if rng.random_bool(0.3) {
                spec.walk_steps = rng.random_range(1..50);
            }
            let rendered = spec.render();
            assert_eq!(parse_algo(&rendered).unwrap(), spec, "spec `{rendered}`");
        }
    }
}
