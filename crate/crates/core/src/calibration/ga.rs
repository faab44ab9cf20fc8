//! Genetic optimization of model parameters against a target recording.
//!
//! Fitness is `sum_k w_k sum_j (M_kj_target - M_kj_candidate)^2` where
//! `M_kj` is the magnitude of harmonic `k` (at `k * f0` of the target) in
//! analysis frame `j`, either linear or in dB.
//!
//! Operators: tournament selection of size 3, elitism of 1, uniform
//! crossover, Gaussian mutation with sigma at 10% of the bound width,
//! clipped to the bounds. All randomness comes from one ChaCha8 stream;
//! candidates are evaluated in parallel and collected in index order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use super::analysis::{frame_count, HarmonicProbe};
use super::pitch::estimate_f0;
use crate::error::{check_positive, Error, Result};
use crate::string::fdl::{fdl_render, FdlParams};

const TOURNAMENT: usize = 3;
const MUTATION_SIGMA: f64 = 0.1;
/// At most this many analysis frames enter the fitness.
const MAX_FRAMES: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weighting {
    Flat,
    #[default]
    Db,
}

/// Model searched by the GA. `Fdl` optimizes `[f0, loop_gain]`; every other
/// field of the template is held fixed.
#[derive(Debug, Clone)]
pub enum GaModel {
    Fdl(FdlParams),
}

impl GaModel {
    pub fn parameter_names(&self) -> &'static [&'static str] {
        match self {
            GaModel::Fdl(_) => &["f0", "loop_gain"],
        }
    }

    fn render(&self, params: &[f64], n_samples: usize, fs: f64) -> Result<Vec<f64>> {
        match self {
            GaModel::Fdl(template) => {
                let mut p = template.clone();
                p.sample_rate = fs;
                p.f0 = params[0];
                p.loop_gain = params[1];
                p.duration = n_samples as f64 / fs;
                let mut y = fdl_render(&p)?;
                y.resize(n_samples, 0.0);
                Ok(y)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    /// One `(low, high)` interval per model parameter.
    pub bounds: Vec<(f64, f64)>,
    /// Per-gene mutation probability.
    pub mutation_rate: f64,
    /// Probability that a child mixes two parents instead of copying one.
    pub crossover_rate: f64,
    pub harmonic_count: usize,
    pub weighting: Weighting,
    pub seed: u64,
}

impl GaConfig {
    pub fn validate(&self, model: &GaModel) -> Result<()> {
        if self.population < 2 {
            return Err(Error::Argument("population must be at least 2".into()));
        }
        if self.harmonic_count == 0 {
            return Err(Error::Argument("harmonic_count must be at least 1".into()));
        }
        for (name, r) in [("mutation_rate", self.mutation_rate), ("crossover_rate", self.crossover_rate)] {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::Range {
                    name,
                    value: r,
                    interval: "[0, 1]".into(),
                });
            }
        }
        let names = model.parameter_names();
        if self.bounds.len() != names.len() {
            return Err(Error::Argument(format!(
                "expected {} bounds ({}), got {}",
                names.len(),
                names.join(", "),
                self.bounds.len()
            )));
        }
        for (&(lo, hi), name) in self.bounds.iter().zip(names) {
            if !(lo < hi && lo.is_finite() && hi.is_finite()) {
                return Err(Error::Argument(format!("degenerate bounds [{lo}, {hi}] for {name}")));
            }
        }
        Ok(())
    }
}

/// Spectral fitness against a fixed target.
#[derive(Debug, Clone)]
pub struct FitnessEvaluator {
    model: GaModel,
    fs: f64,
    n_samples: usize,
    frames: usize,
    probe: HarmonicProbe,
    weighting: Weighting,
    target: Vec<Vec<f64>>,
    target_f0: f64,
}

impl FitnessEvaluator {
    pub fn new(target: &[f64], fs: f64, model: GaModel, harmonic_count: usize, weighting: Weighting) -> Result<Self> {
        check_positive("fs", fs)?;
        if !target.iter().any(|&v| v != 0.0) {
            return Err(Error::Unvoiced(0.0));
        }
        let target_f0 = estimate_f0(target, fs)?;
        let frames = frame_count(target.len()).min(MAX_FRAMES);
        if frames == 0 {
            return Err(Error::Argument("target is shorter than one analysis frame".into()));
        }
        let harmonics: Vec<f64> = (1..=harmonic_count)
            .map(|k| k as f64 * target_f0)
            .take_while(|&f| f < fs / 2.0)
            .collect();
        let probe = HarmonicProbe::new(&harmonics, fs);
        let mut eval = Self {
            model,
            fs,
            n_samples: target.len(),
            frames,
            probe,
            weighting,
            target: Vec::new(),
            target_f0,
        };
        eval.target = eval.features(target);
        Ok(eval)
    }

    pub fn target_f0(&self) -> f64 {
        self.target_f0
    }

    fn features(&self, signal: &[f64]) -> Vec<Vec<f64>> {
        let mut m = self.probe.magnitudes(signal, self.frames);
        if self.weighting == Weighting::Db {
            for row in &mut m {
                row.iter_mut().for_each(|v| *v = 20.0 * v.max(1e-12).log10());
            }
        }
        m
    }

    /// Fitness of a signal already rendered at the target length.
    pub fn fitness_of(&self, signal: &[f64]) -> f64 {
        self.features(signal)
            .iter()
            .zip(&self.target)
            .map(|(c, t)| c.iter().zip(t).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
            .sum()
    }

    /// Fitness of a parameter vector; unrenderable parameters score
    /// infinity.
    pub fn evaluate(&self, params: &[f64]) -> f64 {
        match self.model.render(params, self.n_samples, self.fs) {
            Ok(y) => self.fitness_of(&y),
            Err(_) => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GaResult {
    pub params: Vec<f64>,
    pub fitness: f64,
    /// Best fitness after initialization and after each generation.
    pub trace: Vec<f64>,
    /// Best parameters matching each entry of `trace`.
    pub trajectory: Vec<Vec<f64>>,
    pub target_f0: f64,
}

fn tournament(rng: &mut ChaCha8Rng, fitness: &[f64]) -> usize {
    let mut best = rng.random_range(0..fitness.len());
    for _ in 1..TOURNAMENT {
        let c = rng.random_range(0..fitness.len());
        if fitness[c] < fitness[best] || (fitness[c] == fitness[best] && c < best) {
            best = c;
        }
    }
    best
}

fn best_index(fitness: &[f64]) -> usize {
    (0..fitness.len())
        .min_by(|&a, &b| fitness[a].total_cmp(&fitness[b]).then(a.cmp(&b)))
        .unwrap()
}

pub fn ga_optimize(target: &[f64], fs: f64, model: GaModel, config: &GaConfig) -> Result<GaResult> {
    config.validate(&model)?;
    let eval = FitnessEvaluator::new(target, fs, model, config.harmonic_count, config.weighting)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let normals: Vec<Normal<f64>> = config
        .bounds
        .iter()
        .map(|&(lo, hi)| Normal::new(0.0, MUTATION_SIGMA * (hi - lo)).expect("finite sigma"))
        .collect();

    let mut population: Vec<Vec<f64>> = (0..config.population)
        .map(|_| config.bounds.iter().map(|&(lo, hi)| rng.random_range(lo..=hi)).collect())
        .collect();
    let mut fitness: Vec<f64> = population.par_iter().map(|p| eval.evaluate(p)).collect();

    let mut trace = Vec::with_capacity(config.generations + 1);
    let mut trajectory = Vec::with_capacity(config.generations + 1);
    let b = best_index(&fitness);
    trace.push(fitness[b]);
    trajectory.push(population[b].clone());

    for _ in 0..config.generations {
        let elite = best_index(&fitness);
        let mut children = Vec::with_capacity(config.population - 1);
        for _ in 1..config.population {
            let a = tournament(&mut rng, &fitness);
            let mut child = population[a].clone();
            if rng.random::<f64>() < config.crossover_rate {
                let other = &population[tournament(&mut rng, &fitness)];
                for (g, &o) in child.iter_mut().zip(other) {
                    if rng.random::<bool>() {
                        *g = o;
                    }
                }
            }
            for ((g, n), &(lo, hi)) in child.iter_mut().zip(&normals).zip(&config.bounds) {
                if rng.random::<f64>() < config.mutation_rate {
                    *g = (*g + n.sample(&mut rng)).clamp(lo, hi);
                }
            }
            children.push(child);
        }
        let child_fitness: Vec<f64> = children.par_iter().map(|p| eval.evaluate(p)).collect();
        let elite_params = population[elite].clone();
        let elite_fitness = fitness[elite];
        population = std::iter::once(elite_params).chain(children).collect();
        fitness = std::iter::once(elite_fitness).chain(child_fitness).collect();
        let b = best_index(&fitness);
        trace.push(fitness[b]);
        trajectory.push(population[b].clone());
    }
    let b = best_index(&fitness);
    Ok(GaResult {
        params: population[b].clone(),
        fitness: fitness[b],
        trace,
        trajectory,
        target_f0: eval.target_f0(),
    })
}
