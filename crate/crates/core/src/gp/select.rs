//! Tournament selection and Pareto bookkeeping.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rand::Rng;

use super::Individual;

/// Strict "a beats b" under scalar fitness: valid before invalid, then
/// lower fitness, lower complexity, earlier birth.
pub fn beats(a: &Individual, b: &Individual) -> bool {
    match (a.is_valid(), b.is_valid()) {
        (true, false) => return true,
        (false, true) => return false,
        _ => {}
    }
    (a.fitness, a.complexity, a.birth_generation).partial_cmp(&(b.fitness, b.complexity, b.birth_generation))
        == Some(Ordering::Less)
}

/// Index of the winner of a `k`-way tournament drawn with replacement; ties
/// go to the earlier draw.
pub fn select<R: Rng + ?Sized>(rng: &mut R, population: &[Individual], k: usize) -> usize {
    assert!(!population.is_empty(), "selection from an empty population");
    let mut best = rng.random_range(0..population.len());
    for _ in 1..k.max(1) {
        let i = rng.random_range(0..population.len());
        if beats(&population[i], &population[best]) {
            best = i;
        }
    }
    best
}

/// Tournament on (rank ascending, crowding descending).
pub fn select_pareto<R: Rng + ?Sized>(rng: &mut R, ranks: &[usize], crowding: &[f64], k: usize) -> usize {
    assert!(!ranks.is_empty(), "selection from an empty population");
    let mut best = rng.random_range(0..ranks.len());
    for _ in 1..k.max(1) {
        let i = rng.random_range(0..ranks.len());
        if ranks[i] < ranks[best] || (ranks[i] == ranks[best] && crowding[i] > crowding[best]) {
            best = i;
        }
    }
    best
}

/// `a` dominates `b`: no worse in complexity and error, strictly better in one.
pub fn dominates(a: &Individual, b: &Individual) -> bool {
    a.complexity <= b.complexity && a.raw_mse <= b.raw_mse && (a.complexity < b.complexity || a.raw_mse < b.raw_mse)
}

/// Nondomination layer of every individual (0 is the front). Invalid
/// individuals share the last layer.
pub fn nondomination_ranks(pop: &[Individual]) -> Vec<usize> {
    let n = pop.len();
    let mut rank = vec![usize::MAX; n];
    let valid: Vec<usize> = (0..n).filter(|&i| pop[i].is_valid()).collect();
    let mut dominated_by = vec![0usize; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (a_pos, &a) in valid.iter().enumerate() {
        for &b in &valid[a_pos + 1..] {
            if dominates(&pop[a], &pop[b]) {
                dominates_list[a].push(b);
                dominated_by[b] += 1;
            } else if dominates(&pop[b], &pop[a]) {
                dominates_list[b].push(a);
                dominated_by[a] += 1;
            }
        }
    }
    let mut layer: Vec<usize> = valid.iter().copied().filter(|&i| dominated_by[i] == 0).collect();
    let mut r = 0;
    while !layer.is_empty() {
        let mut next = Vec::new();
        for &i in &layer {
            rank[i] = r;
            for &j in &dominates_list[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        layer = next;
        r += 1;
    }
    for x in rank.iter_mut().filter(|x| **x == usize::MAX) {
        *x = r;
    }
    rank
}

/// Crowding distance within each layer over (complexity, raw_mse).
pub fn crowding_distances(pop: &[Individual], ranks: &[usize]) -> Vec<f64> {
    let mut out = vec![0.0; pop.len()];
    let mut layers: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &r) in ranks.iter().enumerate() {
        layers.entry(r).or_default().push(i);
    }
    let objectives: [fn(&Individual) -> f64; 2] = [|a| a.complexity as f64, |a| a.raw_mse];
    for members in layers.values() {
        for obj in objectives {
            let mut idx = members.clone();
            idx.sort_by(|&a, &b| obj(&pop[a]).total_cmp(&obj(&pop[b])).then(a.cmp(&b)));
            let (lo, hi) = (obj(&pop[idx[0]]), obj(&pop[*idx.last().unwrap()]));
            out[idx[0]] = f64::INFINITY;
            out[*idx.last().unwrap()] = f64::INFINITY;
            let span = hi - lo;
            if !(span.is_finite() && span > 0.0) {
                continue;
            }
            for w in 1..idx.len().saturating_sub(1) {
                out[idx[w]] += (obj(&pop[idx[w + 1]]) - obj(&pop[idx[w - 1]])) / span;
            }
        }
    }
    out
}

/// Running archive of nondominated individuals, at most one per complexity.
#[derive(Clone, Debug, Default)]
pub struct ParetoFront {
    members: BTreeMap<usize, Individual>,
}

impl ParetoFront {
    pub fn new() -> Self {
        Self::default()
    }

    /// Offers a candidate; returns whether it entered the front.
    pub fn insert(&mut self, cand: &Individual) -> bool {
        if !cand.is_valid() {
            return false;
        }
        if self
            .members
            .range(..=cand.complexity)
            .any(|(_, m)| m.raw_mse <= cand.raw_mse)
        {
            return false;
        }
        let evicted: Vec<usize> = self
            .members
            .range(cand.complexity..)
            .filter(|(_, m)| m.raw_mse >= cand.raw_mse)
            .map(|(c, _)| *c)
            .collect();
        for c in evicted {
            self.members.remove(&c);
        }
        self.members.insert(cand.complexity, cand.clone());
        true
    }

    pub fn extend<'a>(&mut self, pop: impl IntoIterator<Item = &'a Individual>) {
        for i in pop {
            self.insert(i);
        }
    }

    /// Members in increasing complexity (and so decreasing error).
    pub fn members(&self) -> impl Iterator<Item = &Individual> {
        self.members.values()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Checks that no member dominates another.
    pub fn is_consistent(&self) -> bool {
        let m: Vec<&Individual> = self.members().collect();
        m.iter()
            .all(|a| m.iter().all(|b| std::ptr::eq(*a, *b) || !dominates(a, b)))
    }
}

/// Distinct (complexity, raw_mse) points of the valid nondominated subset,
/// by pairwise comparison.
pub fn brute_force_front(pop: &[Individual]) -> Vec<(usize, f64)> {
    let mut pts: Vec<(usize, f64)> = pop
        .iter()
        .filter(|a| a.is_valid() && !pop.iter().any(|b| b.is_valid() && dominates(b, a)))
        .map(|a| (a.complexity, a.raw_mse))
        .collect();
    pts.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();
    pts
}
