//! Genetic search for assignments that hold every receiver at the target
//! rate with as few mixing nodes and links as possible. Chromosomes are the
//! bit genomes of [`codec::GenomeLayout`]; fitness is the piecewise
//! objective of [`crate::eval`], evaluated with coefficients drawn from a
//! genome-content seed so repeated evaluations of one genome agree and runs
//! are reproducible.

pub mod codec;
pub mod improve;
pub mod operators;

pub use codec::{GeneBlock, GenomeLayout};

use crate::eval::{
    self, CodingAssignment, EvalError, FitnessCoefficients, FitnessReport, DEFAULT_Q,
    DEFAULT_TRIALS,
};
use crate::graph::Network;
use crate::rng::{mix, substream};
use rand::Rng;
use std::collections::HashMap;
use std::fmt::Write as _;

const GA_TAG: u64 = 0x6761_7365_6564;
const EVAL_TAG: u64 = 0x6576_616c;

/// Search knobs. The defaults match the desk-scale experiments the crate's
/// tests freeze.
#[derive(Debug, Clone, PartialEq)]
pub struct GaParams {
    pub population: usize,
    pub crossover_prob: f64,
    pub mutation_prob: f64,
    pub max_generations: u32,
    /// Fittest chromosomes copied unchanged into the next generation.
    pub elite: usize,
    /// Probability a disagreeing position follows the first parent.
    pub uniform_prob: f64,
    /// Probability of the coding-node demotion move after point mutation.
    pub struct_mutation_prob: f64,
    /// Smallest best-fitness gain that counts as progress.
    pub min_improvement: f64,
    /// Consecutive non-improving generations tolerated before stopping.
    pub stall_generations: u32,
    /// Field size exponent used by fitness evaluation.
    pub q: u8,
    /// Evaluation trials per genome (best rank per receiver is kept).
    pub trials: usize,
    /// Run the duplicate-merge repair pass on every offspring.
    pub improve: bool,
}

impl Default for GaParams {
    fn default() -> GaParams {
        GaParams {
            population: 50,
            crossover_prob: 0.8,
            mutation_prob: 0.01,
            max_generations: 100,
            elite: 2,
            uniform_prob: 0.5,
            struct_mutation_prob: 0.1,
            min_improvement: 1e-3,
            stall_generations: 10,
            q: DEFAULT_Q,
            trials: DEFAULT_TRIALS,
            improve: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    MaxGenerations,
    Stalled,
    /// The network has no merging nodes, so the empty assignment is the
    /// only point in the search space.
    Exhausted,
}

/// Best individual of one generation plus the population mean.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationRow {
    pub generation: u32,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub best_coding_nodes: usize,
    pub best_coding_links: usize,
    pub best_min_rate: u32,
    pub best_avg_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub best_genes: Vec<bool>,
    pub best_assignment: CodingAssignment,
    /// Full evaluation of the winner, same seed policy as the search.
    pub report: FitnessReport,
    pub history: Vec<GenerationRow>,
    pub generations: u32,
    pub terminated_by: Termination,
    /// Genomes actually evaluated (cache misses).
    pub evaluations: u64,
}

#[derive(Clone, Copy)]
struct Outcome {
    fitness: f64,
    min_rate: u32,
    avg_rate: f64,
    coding_nodes: usize,
    coding_links: usize,
}

struct Evaluator<'a> {
    net: &'a Network,
    coeffs: &'a FitnessCoefficients,
    layout: &'a GenomeLayout,
    q: u8,
    trials: usize,
    seed: u64,
    cache: HashMap<Vec<bool>, Outcome>,
    evaluations: u64,
}

// deterministic across runs, unlike the std hasher
fn genome_seed(base: u64, genes: &[bool]) -> u64 {
    let mut words = vec![base, EVAL_TAG, genes.len() as u64];
    for chunk in genes.chunks(64) {
        words.push(chunk.iter().enumerate().fold(0u64, |w, (i, &g)| w | (u64::from(g) << i)));
    }
    mix(&words)
}

impl Evaluator<'_> {
    fn outcome(&mut self, genes: &[bool]) -> Result<Outcome, EvalError> {
        if let Some(o) = self.cache.get(genes) {
            return Ok(*o);
        }
        let a = self.layout.decode(genes);
        let rep = eval::report(
            self.net,
            &a,
            self.coeffs,
            self.q,
            self.trials,
            genome_seed(self.seed, genes),
        )?;
        let o = Outcome {
            fitness: rep.objective,
            min_rate: rep.min_rate,
            avg_rate: rep.avg_rate,
            coding_nodes: rep.coding_nodes,
            coding_links: rep.coding_links,
        };
        self.cache.insert(genes.to_vec(), o);
        self.evaluations += 1;
        Ok(o)
    }
}

fn row(generation: u32, best: &Outcome, mean_fitness: f64) -> GenerationRow {
    GenerationRow {
        generation,
        best_fitness: best.fitness,
        mean_fitness,
        best_coding_nodes: best.coding_nodes,
        best_coding_links: best.coding_links,
        best_min_rate: best.min_rate,
        best_avg_rate: best.avg_rate,
    }
}

/// Runs the search. `coeffs.target_rate` should match `net.target_rate()`
/// unless a different goal is wanted on purpose.
pub fn run_ga(
    net: &Network,
    params: &GaParams,
    coeffs: &FitnessCoefficients,
    seed: u64,
) -> Result<RunResult, EvalError> {
    assert!(params.population >= 2, "population must hold at least two chromosomes");
    assert!(params.elite < params.population, "elitism cannot fill the population");
    let layout = GenomeLayout::new(net);
    let mut ev = Evaluator {
        net,
        coeffs,
        layout: &layout,
        q: params.q,
        trials: params.trials,
        seed,
        cache: HashMap::new(),
        evaluations: 0,
    };

    if layout.bits() == 0 {
        let genes = Vec::new();
        let o = ev.outcome(&genes)?;
        let best_assignment = layout.decode(&genes);
        let report =
            eval::report(net, &best_assignment, coeffs, params.q, params.trials, genome_seed(seed, &genes))?;
        return Ok(RunResult {
            best_genes: genes,
            best_assignment,
            report,
            history: vec![row(0, &o, o.fitness)],
            generations: 0,
            terminated_by: Termination::Exhausted,
            evaluations: ev.evaluations,
        });
    }

    let mut rng = substream(seed, &[GA_TAG]);
    let mut population: Vec<(Vec<bool>, Outcome)> = Vec::with_capacity(params.population);
    for genes in
        operators::opposition_init(&layout, params.population, &mut rng, |g| {
            ev.outcome(g).map(|o| o.fitness)
        })?
    {
        let o = ev.outcome(&genes)?;
        population.push((genes, o));
    }
    sort_population(&mut population);

    let mut history = Vec::new();
    history.push(row(0, &population[0].1, mean_fitness(&population)));
    let mut best_seen = population[0].clone();
    let mut stall = 0u32;
    let mut generations = 0u32;
    let mut terminated_by = Termination::MaxGenerations;

    for generation in 1..=params.max_generations {
        generations = generation;
        let fitness: Vec<f64> = population.iter().map(|(_, o)| o.fitness).collect();
        let mut next: Vec<(Vec<bool>, Outcome)> =
            population.iter().take(params.elite).cloned().collect();
        while next.len() < params.population {
            let p1 = &population[operators::roulette(&fitness, &mut rng)].0;
            let p2 = &population[operators::roulette(&fitness, &mut rng)].0;
            let (mut c1, mut c2) = if rng.random::<f64>() < params.crossover_prob {
                operators::uniform_crossover(p1, p2, params.uniform_prob, &mut rng)
            } else {
                (p1.clone(), p2.clone())
            };
            for child in [&mut c1, &mut c2] {
                operators::mutate(
                    child,
                    &layout,
                    params.mutation_prob,
                    params.struct_mutation_prob,
                    &mut rng,
                );
                if params.improve {
                    improve::improve_genes(net, &layout, child)?;
                }
            }
            for child in [c1, c2] {
                if next.len() < params.population {
                    let o = ev.outcome(&child)?;
                    next.push((child, o));
                }
            }
        }
        sort_population(&mut next);
        population = next;
        history.push(row(generation, &population[0].1, mean_fitness(&population)));

        if population[0].1.fitness > best_seen.1.fitness + params.min_improvement {
            best_seen = population[0].clone();
            stall = 0;
        } else {
            if population[0].1.fitness > best_seen.1.fitness {
                best_seen = population[0].clone();
            }
            stall += 1;
            if stall >= params.stall_generations {
                terminated_by = Termination::Stalled;
                break;
            }
        }
    }

    let best_assignment = layout.decode(&best_seen.0);
    let report = eval::report(
        net,
        &best_assignment,
        coeffs,
        params.q,
        params.trials,
        genome_seed(seed, &best_seen.0),
    )?;
    Ok(RunResult {
        best_genes: best_seen.0,
        best_assignment,
        report,
        history,
        generations,
        terminated_by,
        evaluations: ev.evaluations,
    })
}

// fitness descending; genes break ties so equal-fitness orderings are stable
// across runs
fn sort_population(population: &mut [(Vec<bool>, Outcome)]) {
    population.sort_by(|a, b| b.1.fitness.total_cmp(&a.1.fitness).then_with(|| a.0.cmp(&b.0)));
}

fn mean_fitness(population: &[(Vec<bool>, Outcome)]) -> f64 {
    population.iter().map(|(_, o)| o.fitness).sum::<f64>() / population.len() as f64
}

/// Renders a run's history in the generation log format:
/// `generation,best_F,mean_F,best_Nn,best_Nl,min_rate,avg_rate`.
pub fn history_csv(history: &[GenerationRow]) -> String {
    let mut out = String::from("generation,best_F,mean_F,best_Nn,best_Nl,min_rate,avg_rate\n");
    for r in history {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.generation,
            r.best_fitness,
            r.mean_fitness,
            r.best_coding_nodes,
            r.best_coding_links,
            r.best_min_rate,
            r.best_avg_rate
        );
    }
    out
}
