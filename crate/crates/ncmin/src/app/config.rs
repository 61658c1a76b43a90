//! Experiment config files: flat `key = value` text whose keys mirror the
//! command-line flags, so a checked-in file reproduces a run and any flag
//! overrides a single key. Unknown keys are rejected.

use super::AppError;
use crate::sim::Strategy;
use std::fmt::Write as _;
use std::path::PathBuf;

/// Every knob an experiment can turn, with the defaults each subcommand
/// starts from. `parse` then flags refine it.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    // topology generation
    pub nodes: usize,
    pub links: usize,
    pub receivers: usize,
    pub rate: u32,
    /// Read the network from a file instead of generating one.
    pub network: Option<PathBuf>,
    /// Coding assignment file, used by GANS runs.
    pub assignment: Option<PathBuf>,
    // shared
    pub seed: u64,
    /// Paired runs per experiment: seeds seed..seed+runs.
    pub runs: usize,
    pub out: PathBuf,
    // genetic search
    pub population: usize,
    pub crossover: f64,
    pub mutation: f64,
    pub generations: u32,
    pub elite: usize,
    pub uniform: f64,
    pub struct_mutation: f64,
    pub min_improvement: f64,
    pub stall: u32,
    pub improve: bool,
    // evaluation
    pub q: u8,
    pub trials: usize,
    pub weights: [f64; 6],
    // simulation
    pub content_bytes: usize,
    pub block_bytes: usize,
    pub segment_blocks: usize,
    pub deadline: u32,
    pub strategy: Strategy,
    pub strategies: Vec<Strategy>,
    pub rsn_count: usize,
    /// File sizes (in blocks) swept by `compare`.
    pub file_blocks: Vec<usize>,
    /// Links failing per run; `compare` sweeps the list for the failure
    /// chart, everything else uses the first entry.
    pub dynamic_links: Vec<usize>,
    pub churn_max_round: u32,
}

impl Default for ExperimentConfig {
    fn default() -> ExperimentConfig {
        ExperimentConfig {
            nodes: 30,
            links: 90,
            receivers: 20,
            rate: 5,
            network: None,
            assignment: None,
            seed: 1,
            runs: 10,
            out: PathBuf::from("out"),
            population: 50,
            crossover: 0.8,
            mutation: 0.01,
            generations: 100,
            elite: 2,
            uniform: 0.5,
            struct_mutation: 0.1,
            min_improvement: 1e-3,
            stall: 10,
            improve: true,
            q: 8,
            trials: 3,
            weights: [10.0, 10.0, 1.0, 1.0, 100.0, 100.0],
            content_bytes: 4096,
            block_bytes: 64,
            segment_blocks: 8,
            deadline: 10_000,
            strategy: Strategy::Can,
            strategies: Strategy::ALL.to_vec(),
            rsn_count: 1,
            file_blocks: vec![16, 32, 64],
            dynamic_links: vec![0],
            churn_max_round: 20,
        }
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

impl ExperimentConfig {
    /// Canonical text form; `parse` reads it back exactly.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("nodes", self.nodes.to_string());
        kv("links", self.links.to_string());
        kv("receivers", self.receivers.to_string());
        kv("rate", self.rate.to_string());
        if let Some(p) = &self.network {
            kv("network", p.display().to_string());
        }
        if let Some(p) = &self.assignment {
            kv("assignment", p.display().to_string());
        }
        kv("seed", self.seed.to_string());
        kv("runs", self.runs.to_string());
        kv("out", self.out.display().to_string());
        kv("population", self.population.to_string());
        kv("crossover", self.crossover.to_string());
        kv("mutation", self.mutation.to_string());
        kv("generations", self.generations.to_string());
        kv("elite", self.elite.to_string());
        kv("uniform", self.uniform.to_string());
        kv("struct-mutation", self.struct_mutation.to_string());
        kv("min-improvement", self.min_improvement.to_string());
        kv("stall", self.stall.to_string());
        kv("improve", self.improve.to_string());
        kv("q", self.q.to_string());
        kv("trials", self.trials.to_string());
        kv("weights", join(&self.weights));
        kv("content-bytes", self.content_bytes.to_string());
        kv("block-bytes", self.block_bytes.to_string());
        kv("segment-blocks", self.segment_blocks.to_string());
        kv("deadline", self.deadline.to_string());
        kv("strategy", self.strategy.to_string());
        kv("strategies", join(&self.strategies));
        kv("rsn-count", self.rsn_count.to_string());
        kv("file-blocks", join(&self.file_blocks));
        kv("dynamic-links", join(&self.dynamic_links));
        kv("churn-max-round", self.churn_max_round.to_string());
        s
    }

    /// Reads `key = value` lines over the defaults. Blank lines and `#`
    /// comments are skipped; an unknown or malformed key is an error.
    pub fn parse(text: &str) -> Result<ExperimentConfig, AppError> {
        let mut cfg = ExperimentConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |context: &str| AppError::Invalid(format!(
                "config line {}: {context}: {line}",
                idx + 1
            ));
            let Some((key, value)) = line.split_once('=') else {
                return Err(bad("expected 'key = value'"));
            };
            let (key, value) = (key.trim(), value.trim());
            cfg.set(key, value).map_err(|context| bad(&context))?;
        }
        Ok(cfg)
    }

    /// Applies one key. Shared by the file parser and flag overrides.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: std::str::FromStr>(value: &str) -> Result<T, String> {
            value.parse().map_err(|_| format!("cannot parse '{value}'"))
        }
        fn list<T: std::str::FromStr>(value: &str) -> Result<Vec<T>, String> {
            value.split(',').map(|p| num(p.trim())).collect()
        }
        match key {
            "nodes" => self.nodes = num(value)?,
            "links" => self.links = num(value)?,
            "receivers" => self.receivers = num(value)?,
            "rate" => self.rate = num(value)?,
            "network" => self.network = Some(PathBuf::from(value)),
            "assignment" => self.assignment = Some(PathBuf::from(value)),
            "seed" => self.seed = num(value)?,
            "runs" => self.runs = num(value)?,
            "out" => self.out = PathBuf::from(value),
            "population" => self.population = num(value)?,
            "crossover" => self.crossover = num(value)?,
            "mutation" => self.mutation = num(value)?,
            "generations" => self.generations = num(value)?,
            "elite" => self.elite = num(value)?,
            "uniform" => self.uniform = num(value)?,
            "struct-mutation" => self.struct_mutation = num(value)?,
            "min-improvement" => self.min_improvement = num(value)?,
            "stall" => self.stall = num(value)?,
            "improve" => self.improve = num(value)?,
            "q" => self.q = num(value)?,
            "trials" => self.trials = num(value)?,
            "weights" => {
                let w: Vec<f64> = list(value)?;
                self.weights = w
                    .try_into()
                    .map_err(|_| "weights needs exactly six values".to_string())?;
            }
            "content-bytes" => self.content_bytes = num(value)?,
            "block-bytes" => self.block_bytes = num(value)?,
            "segment-blocks" => self.segment_blocks = num(value)?,
            "deadline" => self.deadline = num(value)?,
            "strategy" => self.strategy = value.parse()?,
            "strategies" => {
                self.strategies =
                    value.split(',').map(|p| p.trim().parse()).collect::<Result<_, _>>()?;
            }
            "rsn-count" => self.rsn_count = num(value)?,
            "file-blocks" => self.file_blocks = list(value)?,
            "dynamic-links" => self.dynamic_links = list(value)?,
            "churn-max-round" => self.churn_max_round = num(value)?,
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }

    /// The paired seed list every experiment iterates.
    pub fn seed_list(&self) -> Vec<u64> {
        (0..self.runs as u64).map(|i| self.seed.wrapping_add(i)).collect()
    }

    pub fn ga_params(&self) -> crate::ga::GaParams {
        crate::ga::GaParams {
            population: self.population,
            crossover_prob: self.crossover,
            mutation_prob: self.mutation,
            max_generations: self.generations,
            elite: self.elite,
            uniform_prob: self.uniform,
            struct_mutation_prob: self.struct_mutation,
            min_improvement: self.min_improvement,
            stall_generations: self.stall,
            q: self.q,
            trials: self.trials,
            improve: self.improve,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serialize_parse_round_trip() {
        let mut cfg = ExperimentConfig::default();
        cfg.network = Some(PathBuf::from("nets/butterfly.txt"));
        cfg.weights = [12.0, 9.5, 1.0, 0.5, 120.0, 130.0];
        cfg.strategies = vec![Strategy::Gans, Strategy::None];
        cfg.dynamic_links = vec![0, 4, 9];
        cfg.improve = false;
        assert_eq!(ExperimentConfig::parse(&cfg.serialize()).unwrap(), cfg);
    }

    #[test]
    fn defaults_round_trip_too() {
        let cfg = ExperimentConfig::default();
        assert_eq!(ExperimentConfig::parse(&cfg.serialize()).unwrap(), cfg);
    }

    #[test]
    fn comments_and_blanks_are_skipped() {
        let cfg = ExperimentConfig::parse("# comment\n\nseed = 9\n  rate = 3\n").unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.rate, 3);
        assert_eq!(cfg.nodes, ExperimentConfig::default().nodes);
    }

    #[test]
    fn bad_lines_name_the_problem() {
        let err = ExperimentConfig::parse("speed = 9\n").unwrap_err();
        assert!(err.to_string().contains("unknown key 'speed'"), "{err}");
        let err = ExperimentConfig::parse("seed 9\n").unwrap_err();
        assert!(err.to_string().contains("expected 'key = value'"), "{err}");
        let err = ExperimentConfig::parse("weights = 1,2,3\n").unwrap_err();
        assert!(err.to_string().contains("six values"), "{err}");
    }

    #[test]
    fn seed_list_is_contiguous() {
        let mut cfg = ExperimentConfig::default();
        cfg.seed = 40;
        cfg.runs = 3;
        assert_eq!(cfg.seed_list(), vec![40, 41, 42]);
    }
}
