//! Depth-first enumeration of subcarrier-to-receiver assignments.
//!
//! Assignments are visited in lexicographic order. A candidate replaces the
//! incumbent only when its score is strictly lower, so each worker keeps the
//! lexicographically first minimizer of its share. Workers own disjoint sets
//! of prefixes and their winners are merged by `(score, assignment)`, which
//! makes the result independent of the thread count.

use std::cmp::Ordering;

use crate::model::Matrix;

pub(crate) struct Candidate<T> {
    /// Lower is better.
    pub score: f64,
    pub data: T,
}

#[derive(Default)]
pub(crate) struct Prune<'a> {
    /// Receiver `k` must still be able to reach `targets[k]` with every
    /// remaining subcarrier at its cap; `cap_bits` holds those saturated rates.
    pub targets: Option<(&'a Matrix, &'a [f64])>,
    /// Every receiver needs at least one subcarrier.
    pub cover_all: bool,
}

pub(crate) struct SearchOutcome<T> {
    pub best: Option<(Vec<usize>, Candidate<T>)>,
    /// Complete assignments reached after structural pruning.
    pub explored: u64,
}

struct Worker<'a, T, F> {
    receivers: usize,
    subcarriers: usize,
    prune: &'a Prune<'a>,
    /// `suffix_bits[k][d]`: saturated rate of receiver `k` on subcarriers `d..`.
    suffix_bits: Vec<Vec<f64>>,
    leaf: &'a F,
    assignment: Vec<usize>,
    assigned_bits: Vec<f64>,
    counts: Vec<usize>,
    best: Option<(Vec<usize>, Candidate<T>)>,
    explored: u64,
}

impl<'a, T, F> Worker<'a, T, F>
where
    F: Fn(&[usize], Option<f64>) -> Option<Candidate<T>>,
{
    fn new(receivers: usize, subcarriers: usize, prune: &'a Prune<'a>, leaf: &'a F) -> Self {
        let suffix_bits = match prune.targets {
            Some((cap_bits, _)) => (0..receivers)
                .map(|k| {
                    let mut suffix = vec![0.0; subcarriers + 1];
                    for n in (0..subcarriers).rev() {
                        suffix[n] = suffix[n + 1] + cap_bits.get(k, n);
                    }
                    suffix
                })
                .collect(),
            None => Vec::new(),
        };
        Worker {
            receivers,
            subcarriers,
            prune,
            suffix_bits,
            leaf,
            assignment: Vec::with_capacity(subcarriers),
            assigned_bits: vec![0.0; receivers],
            counts: vec![0; receivers],
            best: None,
            explored: 0,
        }
    }

    fn viable(&self) -> bool {
        let depth = self.assignment.len();
        if self.prune.cover_all {
            let empty = self.counts.iter().filter(|&&c| c == 0).count();
            if empty > self.subcarriers - depth {
                return false;
            }
        }
        match self.prune.targets {
            Some((_, targets)) => (0..self.receivers).all(|k| {
                let reachable = self.assigned_bits[k] + self.suffix_bits[k][depth];
                reachable >= targets[k] - 1e-12 * targets[k].max(1.0)
            }),
            None => true,
        }
    }

    fn push(&mut self, k: usize) {
        let n = self.assignment.len();
        self.assignment.push(k);
        self.counts[k] += 1;
        if let Some((cap_bits, _)) = self.prune.targets {
            self.assigned_bits[k] += cap_bits.get(k, n);
        }
    }

    fn pop(&mut self) {
        let n = self.assignment.len() - 1;
        let k = self.assignment.pop().expect("pop on empty assignment");
        self.counts[k] -= 1;
        if let Some((cap_bits, _)) = self.prune.targets {
            self.assigned_bits[k] -= cap_bits.get(k, n);
        }
    }

    fn run_from(&mut self, prefix: &[usize]) {
        for &k in prefix {
            self.push(k);
        }
        if self.viable() {
            self.descend();
        }
        for _ in prefix {
            self.pop();
        }
    }

    fn descend(&mut self) {
        if self.assignment.len() == self.subcarriers {
            self.explored += 1;
            let incumbent = self.best.as_ref().map(|(_, c)| c.score);
            if let Some(candidate) = (self.leaf)(&self.assignment, incumbent) {
                if incumbent.is_none_or(|s| candidate.score < s) {
                    self.best = Some((self.assignment.clone(), candidate));
                }
            }
            return;
        }
        for k in 0..self.receivers {
            self.push(k);
            if self.viable() {
                self.descend();
            }
            self.pop();
        }
    }
}

fn better<T>(a: &(Vec<usize>, Candidate<T>), b: &(Vec<usize>, Candidate<T>)) -> bool {
    match a.1.score.total_cmp(&b.1.score) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => a.0 < b.0,
    }
}

fn prefixes(receivers: usize, depth: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..depth {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..receivers).map(move |k| {
                    let mut q = p.clone();
                    q.push(k);
                    q
                })
            })
            .collect();
    }
    out
}

pub(crate) fn search<T, F>(
    receivers: usize,
    subcarriers: usize,
    threads: usize,
    prune: &Prune<'_>,
    leaf: F,
) -> SearchOutcome<T>
where
    T: Send,
    F: Fn(&[usize], Option<f64>) -> Option<Candidate<T>> + Sync,
{
    let threads = threads.max(1);
    if threads == 1 || receivers < 2 {
        let mut worker = Worker::new(receivers, subcarriers, prune, &leaf);
        worker.run_from(&[]);
        return SearchOutcome {
            best: worker.best,
            explored: worker.explored,
        };
    }

    let mut depth = 0;
    while depth < subcarriers && receivers.pow(depth as u32) < 8 * threads {
        depth += 1;
    }
    let roots = prefixes(receivers, depth);
    let results: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|w| {
                let roots = &roots;
                let leaf = &leaf;
                scope.spawn(move || {
                    let mut worker = Worker::new(receivers, subcarriers, prune, leaf);
                    for root in roots.iter().skip(w).step_by(threads) {
                        worker.run_from(root);
                    }
                    (worker.best, worker.explored)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("enumeration worker panicked"))
            .collect()
    });

    let mut outcome = SearchOutcome {
        best: None,
        explored: 0,
    };
    for (best, explored) in results {
        outcome.explored += explored;
        if let Some(candidate) = best {
            if outcome.best.as_ref().is_none_or(|b| better(&candidate, b)) {
                outcome.best = Some(candidate);
            }
        }
    }
    outcome
}
