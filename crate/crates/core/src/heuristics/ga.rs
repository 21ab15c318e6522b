use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::Instance;
use crate::master::ColumnPool;
use crate::pricing::{Estimator, NEGATIVE_TOL};
use crate::routing::{is_distance_feasible, Route};

use super::moves::{crossover, local_search_pair, Legs};

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct GaParams {
    pub population_size: usize,
    pub generations: usize,
    pub mutation_rate: f64,
    pub tournament_rate: f64,
    pub max_columns: usize,
    /// Longest segment, in legs, exchanged by crossover.
    pub max_segment: usize,
    /// Improving steps allowed to the local search per offspring pair.
    pub local_search_steps: usize,
    /// Offspring pairs tried per generation before it is closed early.
    pub attempts_per_generation: usize,
    pub max_legs: usize,
    pub seed: u64,
}

impl Default for GaParams {
    fn default() -> Self {
        Self {
            population_size: 500,
            generations: 500,
            mutation_rate: 0.02,
            tournament_rate: 0.1,
            max_columns: 1000,
            max_segment: 2,
            local_search_steps: 10,
            attempts_per_generation: 2000,
            max_legs: 12,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GaOutcome {
    pub pool: ColumnPool,
    /// Best fitness in the population after each generation.
    pub best_per_generation: Vec<f64>,
    pub evaluations: usize,
}

struct Scorer<'a, 'b> {
    inst: &'a Instance,
    est: &'a Estimator<'b>,
    max_legs: usize,
    cache: HashMap<Legs, Option<f64>>,
}

impl Scorer<'_, '_> {
    fn fitness(&mut self, legs: &[(usize, usize)]) -> Option<f64> {
        if let Some(&f) = self.cache.get(legs) {
            return f;
        }
        let f = if legs.is_empty() || legs.len() > self.max_legs {
            None
        } else {
            let r = Route::from_legs(legs, &self.inst.network);
            is_distance_feasible(&r, 0, self.inst).then(|| self.est.estimate(&r))
        };
        self.cache.insert(legs.to_vec(), f);
        f
    }
}

/// Genetic search over leg sequences. Each generation breeds offspring pairs
/// from tournament-selected parents by crossover, mutation and a pairwise
/// local search; offspring with negative fitness form the next population
/// and are offered to the pool. The start routes always belong to the
/// population.
pub fn ga_generate(z: &[Route], est: &Estimator, params: GaParams) -> GaOutcome {
    let inst = est.inst;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut sc = Scorer { inst, est, max_legs: params.max_legs, cache: HashMap::new() };
    let mut pool = ColumnPool::with_capacity(params.max_columns);
    let mut seeds: Vec<(Legs, f64)> = Vec::new();
    for r in z {
        let legs = r.legs();
        if seeds.iter().any(|(l, _)| *l == legs) {
            continue;
        }
        if let Some(f) = sc.fitness(&legs) {
            seeds.push((legs, f));
        }
    }
    let tournament = ((params.population_size as f64 * params.tournament_rate).round() as usize).max(1);
    let mut population = seeds.clone();
    let mut best_per_generation = Vec::new();

    for _ in 0..params.generations {
        if population.is_empty() {
            break;
        }
        for s in &seeds {
            if !population.iter().any(|(l, _)| *l == s.0) {
                population.push(s.clone());
            }
        }
        let mut next: Vec<(Legs, f64)> = Vec::new();
        let mut attempts = 0;
        while next.len() < params.population_size && attempts < params.attempts_per_generation {
            attempts += 1;
            let pa = select(&population, tournament, &mut rng);
            let pb = select(&population, tournament, &mut rng);
            let (mut a, mut b) = crossover(&population[pa].0, &population[pb].0, params.max_segment, &mut rng);
            for child in [&mut a, &mut b] {
                if child.len() >= 2 && rng.gen_bool(params.mutation_rate.clamp(0.0, 1.0)) {
                    let p = rng.gen_range(0..child.len());
                    let q = rng.gen_range(0..child.len());
                    child.swap(p, q);
                }
            }
            let (a, b) = local_search_pair(a, b, params.local_search_steps, |l| sc.fitness(l));
            for child in [a, b] {
                let Some(f) = sc.fitness(&child) else { continue };
                if f < -NEGATIVE_TOL && next.len() < params.population_size {
                    pool.offer(Route::from_legs(&child, &inst.network), f, 0);
                    next.push((child, f));
                }
            }
        }
        population = next;
        best_per_generation.push(population.iter().map(|p| p.1).fold(f64::INFINITY, f64::min));
    }
    for r in z {
        pool.force(r.clone(), est.estimate(r), 0);
    }
    GaOutcome { pool, best_per_generation, evaluations: sc.cache.len() }
}

fn select<R: Rng>(population: &[(Legs, f64)], size: usize, rng: &mut R) -> usize {
    let mut best = rng.gen_range(0..population.len());
    for _ in 1..size {
        let c = rng.gen_range(0..population.len());
        if population[c].1 < population[best].1 {
            best = c;
        }
    }
    best
}
