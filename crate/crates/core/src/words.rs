//! The word problem through the geometric representation.
//!
//! `W` acts on the real vector space with basis the simple roots `α_s`, with
//! `σ_s(α_t) = α_t − 2B(α_s,α_t)α_s` and `B(α_s,α_t) = −cos(π/m(s,t))`
//! (`−1` when `m = ∞`). A generator `s` is a right descent of `w` exactly
//! when `w(α_s)` is a negative root, which is a sign test on one column of
//! the matrix of `w`. Normal forms are ShortLex-least reduced words,
//! extracted greedily from left descents.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CoxError, Result};
use crate::system::{CoxeterSystem, GenSubset, Order};

pub const DEFAULT_EPSILON: f64 = 1e-8;
pub const DEFAULT_BALL_CAP: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Numeric policy for sign tests and the ball size limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Numerics {
    pub epsilon: f64,
    pub ball_cap: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        Self { epsilon: DEFAULT_EPSILON, ball_cap: DEFAULT_BALL_CAP }
    }
}

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Mat {
    n: usize,
    data: Vec<f64>,
}

impl Mat {
    fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self { n, data }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    fn product(&self, other: &Mat) -> Mat {
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.at(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * other.at(k, j);
                }
            }
        }
        Mat { n, data }
    }
}

/// The geometric representation of a Coxeter system, shared by its elements.
#[derive(Debug)]
pub struct ReflectionRep {
    system: CoxeterSystem,
    /// Row `s` of `σ_s`; every other row of `σ_s` is the identity row.
    reflection_rows: Vec<Vec<f64>>,
    numerics: Numerics,
}

impl ReflectionRep {
    pub fn new(system: CoxeterSystem) -> Arc<Self> {
        Self::with_numerics(system, Numerics::default())
    }

    pub fn with_numerics(system: CoxeterSystem, numerics: Numerics) -> Arc<Self> {
        let n = system.rank();
        let reflection_rows = (0..n)
            .map(|s| {
                (0..n)
                    .map(|t| if s == t { -1.0 } else { -2.0 * bilinear(system.m(s, t)) })
                    .collect()
            })
            .collect();
        Arc::new(Self { system, reflection_rows, numerics })
    }

    pub fn system(&self) -> &CoxeterSystem {
        &self.system
    }

    pub fn rank(&self) -> usize {
        self.system.rank()
    }

    pub fn numerics(&self) -> Numerics {
        self.numerics
    }

    pub fn identity(self: &Arc<Self>) -> Element {
        let n = self.rank();
        Element { rep: Arc::clone(self), fwd: Mat::identity(n), inv: Mat::identity(n), nf: Vec::new() }
    }

    pub fn generator(self: &Arc<Self>, s: usize) -> Result<Element> {
        self.identity().mul_gen(s, Side::Right)
    }

    /// The element represented by an arbitrary (not necessarily reduced) word.
    pub fn from_word(self: &Arc<Self>, word: &[usize]) -> Result<Element> {
        for &s in word {
            self.system.check_generator(s)?;
        }
        let mut fwd = Mat::identity(self.rank());
        let mut inv = Mat::identity(self.rank());
        for &s in word {
            self.right_reflect(&mut fwd, s);
            self.left_reflect(&mut inv, s);
        }
        let nf = self.greedy_normal_form(&inv, word.len())?;
        Ok(Element { rep: Arc::clone(self), fwd, inv, nf })
    }

    /// `m ← m·σ_s`. Only column-wise updates: column `s` flips sign and every
    /// other column `j` gains `m[·][s]·c_j`.
    fn right_reflect(&self, m: &mut Mat, s: usize) {
        let n = m.n;
        let row = &self.reflection_rows[s];
        for i in 0..n {
            let pivot = m.data[i * n + s];
            if pivot == 0.0 {
                continue;
            }
            for (j, &c) in row.iter().enumerate() {
                if j != s {
                    m.data[i * n + j] += pivot * c;
                }
            }
            m.data[i * n + s] = -pivot;
        }
    }

    /// `m ← σ_s·m`. Only row `s` changes.
    fn left_reflect(&self, m: &mut Mat, s: usize) {
        let n = m.n;
        let coeffs = &self.reflection_rows[s];
        let mut new_row = vec![0.0; n];
        for (k, &c) in coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            for (j, slot) in new_row.iter_mut().enumerate() {
                *slot += c * m.data[k * n + j];
            }
        }
        m.data[s * n..(s + 1) * n].copy_from_slice(&new_row);
    }

    /// Sign of column `s` of `m`: `Ok(true)` for a negative root.
    fn column_is_negative(&self, m: &Mat, s: usize) -> Result<bool> {
        let eps = self.numerics.epsilon;
        let (mut all_ge, mut all_le, mut some_pos, mut some_neg) = (true, true, false, false);
        for i in 0..m.n {
            let x = m.at(i, s);
            all_ge &= x >= -eps;
            all_le &= x <= eps;
            some_pos |= x > eps;
            some_neg |= x < -eps;
        }
        if all_ge && some_pos {
            Ok(false)
        } else if all_le && some_neg {
            Ok(true)
        } else {
            Err(CoxError::NumericalAmbiguity { generator: s, epsilon: eps })
        }
    }

    fn descents_of(&self, m: &Mat) -> Result<GenSubset> {
        (0..self.rank()).try_fold(GenSubset::EMPTY, |acc, s| {
            Ok(if self.column_is_negative(m, s)? { acc.with(s) } else { acc })
        })
    }

    /// ShortLex normal form of the element whose inverse has matrix `inv`:
    /// repeatedly strip the least left descent. `bound` is an upper bound on
    /// the length; exceeding it can only be a numerical failure.
    fn greedy_normal_form(&self, inv: &Mat, bound: usize) -> Result<Vec<u8>> {
        let mut cur = inv.clone();
        let mut nf = Vec::new();
        'outer: loop {
            for s in 0..self.rank() {
                if self.column_is_negative(&cur, s)? {
                    if nf.len() == bound {
                        return Err(CoxError::NumericalAmbiguity {
                            generator: s,
                            epsilon: self.numerics.epsilon,
                        });
                    }
                    nf.push(s as u8);
                    self.right_reflect(&mut cur, s);
                    continue 'outer;
                }
            }
            return Ok(nf);
        }
    }
}

/// `B(α_s, α_t)` for `s != t`. The rational values are exact so that systems
/// with `m ∈ {2, 3, ∞}` have integer matrices.
fn bilinear(m: Order) -> f64 {
    match m {
        Order::Finite(2) => 0.0,
        Order::Finite(3) => -0.5,
        Order::Finite(m) => -(std::f64::consts::PI / m as f64).cos(),
        Order::Infinite => -1.0,
    }
}

/// A group element: matrices of `w` and `w⁻¹` plus the ShortLex normal form.
///
/// Equality and hashing use the normal form only.
#[derive(Clone)]
pub struct Element {
    rep: Arc<ReflectionRep>,
    fwd: Mat,
    inv: Mat,
    nf: Vec<u8>,
}

impl Element {
    pub fn rep(&self) -> &Arc<ReflectionRep> {
        &self.rep
    }

    pub fn system(&self) -> &CoxeterSystem {
        &self.rep.system
    }

    pub fn length(&self) -> usize {
        self.nf.len()
    }

    pub fn is_identity(&self) -> bool {
        self.nf.is_empty()
    }

    /// The ShortLex-least reduced word, as generator indices.
    pub fn normal_form(&self) -> &[u8] {
        &self.nf
    }

    pub fn word(&self) -> Vec<usize> {
        self.nf.iter().map(|&s| s as usize).collect()
    }

    /// `w·s` or `s·w`.
    pub fn mul_gen(&self, s: usize, side: Side) -> Result<Element> {
        self.rep.system.check_generator(s)?;
        let mut fwd = self.fwd.clone();
        let mut inv = self.inv.clone();
        match side {
            Side::Right => {
                self.rep.right_reflect(&mut fwd, s);
                self.rep.left_reflect(&mut inv, s);
            }
            Side::Left => {
                self.rep.left_reflect(&mut fwd, s);
                self.rep.right_reflect(&mut inv, s);
            }
        }
        let nf = self.rep.greedy_normal_form(&inv, self.length() + 1)?;
        if nf.len().abs_diff(self.length()) != 1 {
            return Err(CoxError::NumericalAmbiguity { generator: s, epsilon: self.rep.numerics.epsilon });
        }
        Ok(Element { rep: Arc::clone(&self.rep), fwd, inv, nf })
    }

    /// Whether `ℓ(ws) < ℓ(w)`.
    pub fn has_right_descent(&self, s: usize) -> Result<bool> {
        self.rep.system.check_generator(s)?;
        self.rep.column_is_negative(&self.fwd, s)
    }

    /// Whether `ℓ(sw) < ℓ(w)`.
    pub fn has_left_descent(&self, s: usize) -> Result<bool> {
        self.rep.system.check_generator(s)?;
        self.rep.column_is_negative(&self.inv, s)
    }

    /// `S(w)` on the right: generators sending `w` to a shorter element.
    pub fn right_descents(&self) -> Result<GenSubset> {
        self.rep.descents_of(&self.fwd)
    }

    pub fn left_descents(&self) -> Result<GenSubset> {
        self.rep.descents_of(&self.inv)
    }

    pub fn descent_set(&self, side: Side) -> Result<GenSubset> {
        match side {
            Side::Right => self.right_descents(),
            Side::Left => self.left_descents(),
        }
    }

    /// Recomputes the normal form from the matrices.
    pub fn recompute_normal_form(&self) -> Result<Vec<u8>> {
        self.rep.greedy_normal_form(&self.inv, self.length())
    }

    fn same_system(&self, other: &Element) -> Result<()> {
        if Arc::ptr_eq(&self.rep, &other.rep) || self.rep.system == other.rep.system {
            Ok(())
        } else {
            Err(CoxError::SystemMismatch)
        }
    }

    /// Exact comparison of normal forms.
    pub fn equals(&self, other: &Element) -> Result<bool> {
        self.same_system(other)?;
        Ok(self.nf == other.nf)
    }

    pub fn inverse(&self) -> Result<Element> {
        let nf = self.rep.greedy_normal_form(&self.fwd, self.length())?;
        Ok(Element { rep: Arc::clone(&self.rep), fwd: self.inv.clone(), inv: self.fwd.clone(), nf })
    }

    /// The product `self·other`.
    pub fn mul(&self, other: &Element) -> Result<Element> {
        self.same_system(other)?;
        let fwd = self.fwd.product(&other.fwd);
        let inv = other.inv.product(&self.inv);
        let nf = self.rep.greedy_normal_form(&inv, self.length() + other.length())?;
        Ok(Element { rep: Arc::clone(&self.rep), fwd, inv, nf })
    }

    /// `d(w, w') = ℓ(w⁻¹w')`.
    pub fn word_distance(&self, other: &Element) -> Result<usize> {
        self.same_system(other)?;
        let inv = other.inv.product(&self.fwd);
        Ok(self.rep.greedy_normal_form(&inv, self.length() + other.length())?.len())
    }

    /// Generators occurring in the normal form (the same for every reduced word).
    pub fn support(&self) -> GenSubset {
        GenSubset::from_indices(self.nf.iter().map(|&s| s as usize))
    }

    /// Coordinates of `w(α_s)` in the simple-root basis.
    pub fn root_image(&self, s: usize) -> Vec<f64> {
        (0..self.fwd.n).map(|i| self.fwd.at(i, s)).collect()
    }

    pub fn format(&self) -> String {
        self.rep.system.format_word(&self.nf)
    }
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.nf == other.nf
    }
}

impl Eq for Element {}

impl Hash for Element {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.nf.hash(state);
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element({})", self.format())
    }
}

/// Successors of a layer: each `w·s` with `s` not a right descent, deduplicated
/// and sorted by normal form. Edges are `(parent index, generator, child index)`.
fn expand_layer(layer: &[Element]) -> Result<(Vec<Element>, Vec<(u32, u8, u32)>)> {
    let candidates: Vec<Vec<(Element, u32, u8)>> = layer
        .par_iter()
        .enumerate()
        .map(|(p, w)| {
            let desc = w.right_descents()?;
            let rank = w.rep.rank();
            (0..rank)
                .filter(|&s| !desc.contains(s))
                .map(|s| Ok((w.mul_gen(s, Side::Right)?, p as u32, s as u8)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut flat: Vec<(Element, u32, u8)> = candidates.into_iter().flatten().collect();
    flat.par_sort_unstable_by(|a, b| (&a.0.nf, a.1, a.2).cmp(&(&b.0.nf, b.1, b.2)));

    let mut next: Vec<Element> = Vec::new();
    let mut edges = Vec::with_capacity(flat.len());
    for (child, p, s) in flat {
        if next.last().is_none_or(|last| last.nf != child.nf) {
            next.push(child);
        }
        edges.push((p, s, next.len() as u32 - 1));
    }
    Ok((next, edges))
}

/// Visits the spheres `{w : ℓ(w) = k}` for `k = 0..=radius` in order, keeping
/// only one sphere in memory. Each sphere is sorted by normal form. Stops early
/// when a sphere is empty (the group is finite). Returns the ball size.
pub fn for_each_sphere<F>(rep: &Arc<ReflectionRep>, radius: usize, mut visit: F) -> Result<usize>
where
    F: FnMut(usize, &[Element]) -> Result<()>,
{
    let cap = rep.numerics.ball_cap;
    let mut layer = vec![rep.identity()];
    let mut total = 1;
    for k in 0..=radius {
        visit(k, &layer)?;
        if k == radius {
            break;
        }
        layer = expand_layer(&layer)?.0;
        if layer.is_empty() {
            break;
        }
        total += layer.len();
        if total > cap {
            return Err(CoxError::ResourceLimit { cap });
        }
    }
    Ok(total)
}

/// The Cayley ball `{w : ℓ(w) ≤ R}` with its right-multiplication graph.
#[derive(Debug, Clone)]
pub struct CayleyBall {
    radius: usize,
    rank: usize,
    elements: Vec<Element>,
    /// `sphere_starts[k]` is the index of the first element of length `k`;
    /// one extra entry marks the end.
    sphere_starts: Vec<usize>,
    adjacency: Vec<u32>,
    index: HashMap<Vec<u8>, u32>,
}

const NO_NEIGHBOR: u32 = u32::MAX;

impl CayleyBall {
    /// BFS from the identity, one sphere at a time. Elements are ordered by
    /// `(length, normal form)`.
    pub fn enumerate(rep: &Arc<ReflectionRep>, radius: usize) -> Result<CayleyBall> {
        let rank = rep.rank();
        let cap = rep.numerics.ball_cap;
        let mut elements = vec![rep.identity()];
        let mut sphere_starts = vec![0, 1];
        let mut adjacency = vec![NO_NEIGHBOR; rank];
        for _ in 0..radius {
            let start = sphere_starts[sphere_starts.len() - 2];
            let end = elements.len();
            let (next, edges) = expand_layer(&elements[start..end])?;
            if next.is_empty() {
                break;
            }
            if end + next.len() > cap {
                return Err(CoxError::ResourceLimit { cap });
            }
            adjacency.resize((end + next.len()) * rank, NO_NEIGHBOR);
            for (p, s, c) in edges {
                let (p, c, s) = (start + p as usize, end + c as usize, s as usize);
                adjacency[p * rank + s] = c as u32;
                adjacency[c * rank + s] = p as u32;
            }
            elements.extend(next);
            sphere_starts.push(elements.len());
        }
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, w)| (w.nf.clone(), i as u32))
            .collect();
        Ok(CayleyBall { radius, rank, elements, sphere_starts, adjacency, index })
    }

    /// The radius requested at construction.
    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Largest length present; smaller than `radius` for a finite group
    /// whose longest element is shorter.
    pub fn max_length(&self) -> usize {
        self.sphere_starts.len() - 2
    }

    /// Whether the ball is all of `W` (some sphere inside the radius was empty).
    pub fn is_saturated(&self) -> bool {
        self.max_length() < self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Element {
        &self.elements[i]
    }

    /// Elements of length exactly `k`.
    pub fn sphere(&self, k: usize) -> &[Element] {
        if k + 1 >= self.sphere_starts.len() {
            return &[];
        }
        &self.elements[self.sphere_starts[k]..self.sphere_starts[k + 1]]
    }

    /// Number of elements of length at most `r`.
    pub fn count_within(&self, r: usize) -> usize {
        self.sphere_starts[(r + 1).min(self.sphere_starts.len() - 1)]
    }

    /// Sizes of the spheres, by length.
    pub fn sphere_sizes(&self) -> Vec<usize> {
        self.sphere_starts.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Index of `w·s`, when it lies in the ball.
    pub fn neighbor(&self, i: usize, s: usize) -> Option<usize> {
        match self.adjacency[i * self.rank + s] {
            NO_NEIGHBOR => None,
            j => Some(j as usize),
        }
    }

    pub fn position(&self, w: &Element) -> Option<usize> {
        self.position_of_word(&w.nf)
    }

    pub fn position_of_word(&self, nf: &[u8]) -> Option<usize> {
        self.index.get(nf).map(|&i| i as usize)
    }
}

pub fn enumerate_ball(rep: &Arc<ReflectionRep>, radius: usize) -> Result<CayleyBall> {
    CayleyBall::enumerate(rep, radius)
}

/// Enumerates a finite group completely. Infinite groups are rejected up
/// front by finite-type recognition.
pub fn enumerate_group(rep: &Arc<ReflectionRep>) -> Result<CayleyBall> {
    let cap = rep.numerics.ball_cap;
    if !crate::classify::is_spherical(&rep.system, rep.system.all())? {
        return Err(CoxError::Precondition("the group is infinite".into()));
    }
    let ball = CayleyBall::enumerate(rep, cap)?;
    if ball.is_saturated() {
        Ok(ball)
    } else {
        Err(CoxError::ResourceLimit { cap })
    }
}
