//! The individual-based model: a fixed-size population reproducing in
//! non-overlapping generations, parents chosen with fitness weight
//! `(1 - alpha)^i`, and each child gaining a Poisson number of new
//! mutations. The ratchet clicks when the mutation-free class dies out.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{ProfileError, SimError};
use crate::params::DiscreteParams;
use crate::profile::Profile;
use crate::stats::multinomial_counts;

/// Population state: `counts[i]` individuals carry `i` mutations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscretePopulation {
    counts: Vec<u64>,
    n: u64,
}

impl DiscretePopulation {
    /// Population from class counts; the size is their sum.
    pub fn new(counts: Vec<u64>) -> Result<Self, ProfileError> {
        if counts.is_empty() {
            return Err(ProfileError::Empty);
        }
        let n = counts.iter().sum();
        if n == 0 {
            return Err(ProfileError::NotNormalized { sum: 0.0 });
        }
        Ok(Self { counts, n })
    }

    /// All `n` individuals in one class.
    pub fn homogeneous(n: u64, class: usize) -> Self {
        assert!(n >= 1);
        let mut counts = alloc::vec![0; class + 1];
        counts[class] = n;
        Self { counts, n }
    }

    #[inline]
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    #[inline]
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Individuals in the mutation-free class.
    #[inline]
    pub fn fittest_count(&self) -> u64 {
        self.counts[0]
    }

    /// `k`-th moment of the empirical mutation-count distribution.
    pub fn moment(&self, k: u32) -> f64 {
        let total: f64 = self
            .counts
            .iter()
            .enumerate()
            .map(|(i, &c)| (i as f64).powi(k as i32) * c as f64)
            .sum();
        total / self.n as f64
    }

    /// Empirical frequencies as a simplex state of dimension `dim`; classes
    /// above `dim` are folded into the top entry.
    pub fn empirical_profile(&self, dim: usize) -> Profile {
        let n = self.n as f64;
        let mut freqs = alloc::vec![0.0; dim + 1];
        for (i, &c) in self.counts.iter().enumerate() {
            freqs[i.min(dim)] += c as f64 / n;
        }
        Profile::from_normalized(freqs)
    }
}

/// Split `m` children over mutation increments `0, 1, 2, ...` following the
/// Poisson law, again by conditional binomials; calls `place(j, count)` for
/// each realized increment.
fn poisson_partition<R: Rng + ?Sized>(
    rng: &mut R,
    mut m: u64,
    lambda: f64,
    mut place: impl FnMut(usize, u64),
) {
    if lambda == 0.0 {
        place(0, m);
        return;
    }
    let mut pmf = (-lambda).exp();
    let mut tail = 1.0;
    let mut j = 0usize;
    while m > 0 {
        let p = if tail > 0.0 { (pmf / tail).clamp(0.0, 1.0) } else { 1.0 };
        let draw = if p >= 1.0 {
            m
        } else if p <= 0.0 {
            0
        } else {
            Binomial::new(m, p).expect("p is clamped to [0, 1]").sample(rng)
        };
        if draw > 0 {
            place(j, draw);
            m -= draw;
        }
        tail -= pmf;
        j += 1;
        pmf *= lambda / j as f64;
        if tail <= 0.0 && m > 0 {
            // Poisson tail numerically exhausted; the event has probability
            // on the order of machine epsilon
            place(j, m);
            return;
        }
    }
}

/// One non-overlapping generation: every child independently picks a parent
/// class with weight `counts[i] (1 - alpha)^i` and adds Poisson(`lambda`)
/// mutations, saturated at the cap when one is set.
pub fn step_generation<R: Rng + ?Sized>(
    pop: &DiscretePopulation,
    p: &DiscreteParams,
    rng: &mut R,
) -> DiscretePopulation {
    let counts = pop.counts();
    let survival = 1.0 - p.alpha();
    let mut weights = Vec::with_capacity(counts.len());
    let mut w = 1.0;
    for &c in counts {
        weights.push(c as f64 * w);
        w *= survival;
    }
    let mut parents = alloc::vec![0u64; counts.len()];
    multinomial_counts(rng, pop.n(), &weights, &mut parents);

    let cap = p.cap();
    let mut next: Vec<u64> = match cap {
        Some(c) => alloc::vec![0; c + 1],
        None => alloc::vec![0; counts.len()],
    };
    for (class, &children) in parents.iter().enumerate() {
        if children == 0 {
            continue;
        }
        poisson_partition(rng, children, p.lambda(), |j, count| {
            let mut target = class + j;
            if let Some(c) = cap {
                target = target.min(c);
            }
            if target >= next.len() {
                next.resize(target + 1, 0);
            }
            next[target] += count;
        });
    }
    DiscretePopulation { counts: next, n: pop.n() }
}

/// Click generation of a discrete path, or censoring at the last simulated
/// generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClickGeneration {
    Clicked(u64),
    Censored(u64),
}

impl ClickGeneration {
    #[inline]
    pub fn clicked(&self) -> bool {
        matches!(self, ClickGeneration::Clicked(_))
    }

    #[inline]
    pub fn generation(&self) -> u64 {
        match *self {
            ClickGeneration::Clicked(g) | ClickGeneration::Censored(g) => g,
        }
    }
}

/// Per-generation summary of a discrete path, including generation 0.
#[derive(Debug, Clone)]
pub struct DiscretePath {
    /// Fraction of the population in the mutation-free class.
    pub fittest_fraction: Vec<f64>,
    pub m1: Vec<f64>,
    pub m2: Vec<f64>,
    pub m3: Vec<f64>,
    pub click: ClickGeneration,
    /// Final population (the first clicked state, or the horizon state).
    pub last: DiscretePopulation,
}

/// Run generations until the mutation-free class empties or `max_gens` is
/// reached.
pub fn simulate_until_click<R: Rng + ?Sized>(
    pop0: &DiscretePopulation,
    p: &DiscreteParams,
    max_gens: u64,
    rng: &mut R,
) -> Result<DiscretePath, SimError> {
    if pop0.fittest_count() == 0 {
        return Err(SimError::InvalidStart);
    }
    let mut pop = pop0.clone();
    let cap_hint = max_gens.min(1 << 20) as usize + 1;
    let mut path = DiscretePath {
        fittest_fraction: Vec::with_capacity(cap_hint),
        m1: Vec::with_capacity(cap_hint),
        m2: Vec::with_capacity(cap_hint),
        m3: Vec::with_capacity(cap_hint),
        click: ClickGeneration::Censored(max_gens),
        last: pop0.clone(),
    };
    record(&mut path, &pop);
    for gen in 1..=max_gens {
        pop = step_generation(&pop, p, rng);
        record(&mut path, &pop);
        if pop.fittest_count() == 0 {
            path.click = ClickGeneration::Clicked(gen);
            break;
        }
    }
    path.last = pop;
    Ok(path)
}

/// Run exactly `gens` generations without stopping: the population keeps
/// evolving after the mutation-free class empties. The first such
/// generation is still reported as the click, if one occurs.
pub fn simulate_generations<R: Rng + ?Sized>(
    pop0: &DiscretePopulation,
    p: &DiscreteParams,
    gens: u64,
    rng: &mut R,
) -> DiscretePath {
    let mut pop = pop0.clone();
    let cap_hint = gens.min(1 << 20) as usize + 1;
    let mut path = DiscretePath {
        fittest_fraction: Vec::with_capacity(cap_hint),
        m1: Vec::with_capacity(cap_hint),
        m2: Vec::with_capacity(cap_hint),
        m3: Vec::with_capacity(cap_hint),
        click: ClickGeneration::Censored(gens),
        last: pop0.clone(),
    };
    record(&mut path, &pop);
    if pop.fittest_count() == 0 {
        path.click = ClickGeneration::Clicked(0);
    }
    for gen in 1..=gens {
        pop = step_generation(&pop, p, rng);
        record(&mut path, &pop);
        if pop.fittest_count() == 0 && !path.click.clicked() {
            path.click = ClickGeneration::Clicked(gen);
        }
    }
    path.last = pop;
    path
}

fn record(path: &mut DiscretePath, pop: &DiscretePopulation) {
    let n = pop.n() as f64;
    path.fittest_fraction.push(pop.fittest_count() as f64 / n);
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    for (i, &c) in pop.counts().iter().enumerate() {
        let x = c as f64 / n;
        let i = i as f64;
        m1 += i * x;
        m2 += i * i * x;
        m3 += i * i * i * x;
    }
    path.m1.push(m1);
    path.m2.push(m2);
    path.m3.push(m3);
}
