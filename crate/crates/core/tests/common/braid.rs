//! Word problem by braid moves alone: a word is reduced iff no word reachable
//! by braid moves contains a repeated adjacent letter, and two reduced words
//! represent the same element iff braid moves connect them.

use std::collections::{BTreeSet, VecDeque};

use cox_core::system::{CoxeterSystem, Order};

pub struct BraidOracle {
    rank: usize,
    m: Vec<Vec<Option<usize>>>,
}

impl BraidOracle {
    pub fn new(system: &CoxeterSystem) -> Self {
        let rank = system.rank();
        let m = (0..rank)
            .map(|s| {
                (0..rank)
                    .map(|t| match system.m(s, t) {
                        Order::Finite(k) => Some(k as usize),
                        Order::Infinite => None,
                    })
                    .collect()
            })
            .collect();
        Self { rank, m }
    }

    fn alternating(s: u8, t: u8, len: usize) -> Vec<u8> {
        (0..len).map(|i| if i % 2 == 0 { s } else { t }).collect()
    }

    /// All words reachable from `word` by braid moves.
    pub fn braid_class(&self, word: &[u8]) -> BTreeSet<Vec<u8>> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([word.to_vec()]);
        seen.insert(word.to_vec());
        while let Some(w) = queue.pop_front() {
            for s in 0..self.rank as u8 {
                for t in 0..self.rank as u8 {
                    if s == t {
                        continue;
                    }
                    let Some(k) = self.m[s as usize][t as usize] else { continue };
                    if k > w.len() {
                        continue;
                    }
                    let from = Self::alternating(s, t, k);
                    let to = Self::alternating(t, s, k);
                    for i in 0..=w.len() - k {
                        if w[i..i + k] == from[..] {
                            let mut v = w.clone();
                            v[i..i + k].copy_from_slice(&to);
                            if seen.insert(v.clone()) {
                                queue.push_back(v);
                            }
                        }
                    }
                }
            }
        }
        seen
    }

    /// Reduces a word by alternating braid-class search and cancellation of
    /// an adjacent pair `ss`.
    pub fn reduce(&self, word: &[u8]) -> Vec<u8> {
        let mut cur = word.to_vec();
        'outer: loop {
            for w in self.braid_class(&cur) {
                if let Some(i) = w.windows(2).position(|p| p[0] == p[1]) {
                    let mut v = w.clone();
                    v.drain(i..i + 2);
                    cur = v;
                    continue 'outer;
                }
            }
            return cur;
        }
    }

    pub fn is_reduced(&self, word: &[u8]) -> bool {
        self.braid_class(word).iter().all(|w| w.windows(2).all(|p| p[0] != p[1]))
    }

    /// ShortLex-least reduced word for the element represented by `word`.
    pub fn normal_form(&self, word: &[u8]) -> Vec<u8> {
        let reduced = self.reduce(word);
        self.braid_class(&reduced).into_iter().next().unwrap()
    }

    /// Number of elements of each length `0..=radius`, by enumerating reduced
    /// words one letter at a time and grouping them into braid classes.
    pub fn sphere_sizes(&self, radius: usize) -> Vec<usize> {
        let mut sizes = vec![1];
        let mut layer: BTreeSet<Vec<u8>> = BTreeSet::from([Vec::new()]);
        for _ in 0..radius {
            let mut next = BTreeSet::new();
            for w in &layer {
                for s in 0..self.rank as u8 {
                    let mut v = w.clone();
                    v.push(s);
                    if self.is_reduced(&v) {
                        next.insert(self.braid_class(&v).into_iter().next().unwrap());
                    }
                }
            }
            sizes.push(next.len());
            layer = next;
        }
        sizes
    }
}
