//! Cayley balls computed with exact arithmetic. Matrices of the geometric
//! representation have entries in Z[x] with x = √2, √3 or the golden ratio,
//! so group elements can be identified by their matrices without rounding.

use std::collections::HashMap;

use cox_core::system::{CoxeterSystem, Order};

/// `a + b·x` where `x² = p·x + q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Quad(i128, i128);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Ring {
    p: i128,
    q: i128,
}

impl Ring {
    fn add(self, u: Quad, v: Quad) -> Quad {
        Quad(u.0 + v.0, u.1 + v.1)
    }

    fn mul(self, u: Quad, v: Quad) -> Quad {
        let bd = u.1 * v.1;
        Quad(u.0 * v.0 + bd * self.q, u.0 * v.1 + u.1 * v.0 + bd * self.p)
    }
}

pub type ExactMat = Vec<Quad>;

pub struct ExactRep {
    n: usize,
    ring: Ring,
    gens: Vec<ExactMat>,
}

impl ExactRep {
    pub fn new(system: &CoxeterSystem) -> Self {
        let n = system.rank();
        let mut ring: Option<Ring> = None;
        let mut two_cos = |m: Order| -> Quad {
            let (value, r) = match m {
                Order::Finite(2) => return Quad(0, 0),
                Order::Finite(3) => return Quad(1, 0),
                Order::Infinite => return Quad(2, 0),
                Order::Finite(4) => (Quad(0, 1), Ring { p: 0, q: 2 }),
                Order::Finite(5) => (Quad(0, 1), Ring { p: 1, q: 1 }),
                Order::Finite(6) => (Quad(0, 1), Ring { p: 0, q: 3 }),
                Order::Finite(k) => panic!("exact oracle does not support m = {k}"),
            };
            match ring {
                None => ring = Some(r),
                Some(existing) => assert_eq!(existing, r, "mixed quadratic fields"),
            }
            value
        };
        let mut gens = Vec::new();
        for s in 0..n {
            let mut g = vec![Quad(0, 0); n * n];
            for i in 0..n {
                g[i * n + i] = Quad(1, 0);
            }
            for t in 0..n {
                g[s * n + t] = if s == t { Quad(-1, 0) } else { two_cos(system.m(s, t)) };
            }
            gens.push(g);
        }
        Self { n, ring: ring.unwrap_or(Ring { p: 0, q: 0 }), gens }
    }

    pub fn identity(&self) -> ExactMat {
        let n = self.n;
        let mut m = vec![Quad(0, 0); n * n];
        for i in 0..n {
            m[i * n + i] = Quad(1, 0);
        }
        m
    }

    pub fn mul(&self, a: &ExactMat, b: &ExactMat) -> ExactMat {
        let n = self.n;
        let mut out = vec![Quad(0, 0); n * n];
        for i in 0..n {
            for k in 0..n {
                let x = a[i * n + k];
                if x == Quad(0, 0) {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] = self.ring.add(out[i * n + j], self.ring.mul(x, b[k * n + j]));
                }
            }
        }
        out
    }

    pub fn word(&self, word: &[u8]) -> ExactMat {
        word.iter().fold(self.identity(), |acc, &s| self.mul(&acc, &self.gens[s as usize]))
    }

    pub fn generator(&self, s: usize) -> &ExactMat {
        &self.gens[s]
    }
}

/// BFS ball by right multiplication with the generators in `gens`.
pub struct ExactBall {
    pub rep: ExactRep,
    pub mats: Vec<ExactMat>,
    pub depth: Vec<usize>,
    /// A reduced word for each node (the BFS path).
    pub words: Vec<Vec<u8>>,
    /// `adj[i][s]`: node of `w_i·s`, or `None` when outside the ball or `s ∉ gens`.
    pub adj: Vec<Vec<Option<usize>>>,
    pub index: HashMap<ExactMat, usize>,
}

impl ExactBall {
    pub fn build(system: &CoxeterSystem, radius: usize) -> Self {
        let all: Vec<usize> = (0..system.rank()).collect();
        Self::build_with(system, radius, &all)
    }

    pub fn build_with(system: &CoxeterSystem, radius: usize, gens: &[usize]) -> Self {
        let rep = ExactRep::new(system);
        let n = system.rank();
        let id = rep.identity();
        let mut ball = ExactBall {
            mats: vec![id.clone()],
            depth: vec![0],
            words: vec![Vec::new()],
            adj: vec![vec![None; n]],
            index: HashMap::from([(id, 0)]),
            rep,
        };
        let mut head = 0;
        while head < ball.mats.len() {
            let i = head;
            head += 1;
            for &s in gens {
                let m = ball.rep.mul(&ball.mats[i], ball.rep.generator(s));
                let j = match ball.index.get(&m) {
                    Some(&j) => j,
                    None if ball.depth[i] < radius => {
                        let j = ball.mats.len();
                        let mut w = ball.words[i].clone();
                        w.push(s as u8);
                        ball.mats.push(m.clone());
                        ball.depth.push(ball.depth[i] + 1);
                        ball.words.push(w);
                        ball.adj.push(vec![None; n]);
                        ball.index.insert(m, j);
                        j
                    }
                    None => continue,
                };
                ball.adj[i][s] = Some(j);
            }
        }
        ball
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn count_within(&self, r: usize) -> usize {
        self.depth.iter().filter(|&&d| d <= r).count()
    }

    pub fn node_of_word(&self, word: &[u8]) -> Option<usize> {
        self.index.get(&self.rep.word(word)).copied()
    }

    /// Right descents read off BFS depths.
    pub fn descents(&self, i: usize) -> u32 {
        (0..self.adj[i].len())
            .filter(|&s| matches!(self.adj[i][s], Some(j) if self.depth[j] < self.depth[i]))
            .fold(0, |m, s| m | 1 << s)
    }

    /// Letters of the BFS word; the support is the same for every reduced word.
    pub fn support(&self, i: usize) -> u32 {
        self.words[i].iter().fold(0, |m, &s| m | 1 << s)
    }

    /// Graph distance from every node to the nearest node in `targets`.
    pub fn distances_to(&self, targets: &[usize]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        let mut queue = std::collections::VecDeque::new();
        for &t in targets {
            dist[t] = Some(0);
            queue.push_back(t);
        }
        while let Some(i) = queue.pop_front() {
            let d = dist[i].unwrap();
            for j in self.adj[i].iter().flatten() {
                if dist[*j].is_none() {
                    dist[*j] = Some(d + 1);
                    queue.push_back(*j);
                }
            }
        }
        dist
    }

    /// Graph distance from `from` to the nearest target, by a BFS started at `from`.
    pub fn distance_from(&self, from: usize, is_target: &dyn Fn(usize) -> bool) -> Option<usize> {
        let mut dist = HashMap::from([(from, 0usize)]);
        let mut queue = std::collections::VecDeque::from([from]);
        while let Some(i) = queue.pop_front() {
            let d = dist[&i];
            if is_target(i) {
                return Some(d);
            }
            for &j in self.adj[i].iter().flatten() {
                if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(j) {
                    e.insert(d + 1);
                    queue.push_back(j);
                }
            }
        }
        None
    }
}
