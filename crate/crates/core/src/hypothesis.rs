//! Density certificates for orbits of parabolic boundaries, and exhaustive
//! ball-level checks of the supporting lemmas on descent classes.
//!
//! Everything here is either a finite matrix condition (decided exactly) or
//! a scan over a Cayley ball (evidence at a stated radius). Verifiers return
//! counterexamples rather than booleans.

use std::collections::VecDeque;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::classify::{essential_within, is_spherical, maximal_spherical_subsets, parabolic_order};
use crate::error::{CoxError, Result};
use crate::parabolic::index;
use crate::system::{CoxeterSystem, GenSubset};
use crate::words::{enumerate_ball, enumerate_group, CayleyBall, Element, ReflectionRep, Side};

pub const DEFAULT_MARGIN: usize = 4;
pub const DEFAULT_STABILIZATION_WINDOW: usize = 3;

fn require_infinite(system: &CoxeterSystem, t: GenSubset) -> Result<()> {
    if is_spherical(system, t)? {
        return Err(CoxError::Precondition(format!(
            "W_T is finite for T = {}",
            system.format_subset(t)
        )));
    }
    Ok(())
}

/// Generators `s` with `m(s,s0) = ∞` and `m(s0,t) ≥ 3` for some `s0 ∈ S∖T`
/// and `t ∈ T̃`. The union of the descent classes `W^{{s}}` over this set is
/// the set whose quasi-density implies density of `W·∂Σ(W_T,T)`.
pub fn theorem_generator_set(system: &CoxeterSystem, t: GenSubset) -> Result<GenSubset> {
    require_infinite(system, t)?;
    let t_tilde = essential_within(system, t)?;
    let outside = system.all().difference(t);
    let mut out = GenSubset::EMPTY;
    for s in system.all().iter() {
        let qualifies = outside.iter().any(|s0| {
            system.m(s, s0).is_infinite() && t_tilde.iter().any(|u| system.m(s0, u).at_least(3))
        });
        if qualifies {
            out = out.with(s);
        }
    }
    Ok(out)
}

/// Whether `w` lies in `⋃ W^{{s}}` over `s ∈ generators`.
pub fn in_singleton_descent_classes(w: &Element, generators: GenSubset) -> Result<bool> {
    let d = w.right_descents()?;
    Ok(d.len() == 1 && d.is_subset_of(generators))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorollaryWitness {
    /// Maximal spherical subset.
    pub u: GenSubset,
    pub s: usize,
    pub u0: usize,
    /// 1: `s ∉ T` and `u0 ∈ T̃`; 2: `u0 ∉ T` and `s ∈ T̃`.
    pub condition: u8,
    pub t_tilde: GenSubset,
}

/// `o(s,u) ≥ 3` for every `u ∈ U` and `o(s,u0) = ∞` for some `u0 ∈ U`; returns
/// every such `u0`.
fn certificate_pivots(system: &CoxeterSystem, u: GenSubset, s: usize) -> Vec<usize> {
    if !u.iter().all(|x| system.product_order(s, x).at_least(3)) {
        return Vec::new();
    }
    u.iter().filter(|&x| system.product_order(s, x).is_infinite()).collect()
}

/// All witnesses `(U, s, u0, condition)` for the corollary's hypotheses,
/// ordered by `(U mask, s, u0, condition)`. An empty list is inconclusive.
pub fn check_corollary(system: &CoxeterSystem, t: GenSubset) -> Result<Vec<CorollaryWitness>> {
    require_infinite(system, t)?;
    let t_tilde = essential_within(system, t)?;
    let mut out = Vec::new();
    for u in maximal_spherical_subsets(system) {
        for s in system.all().iter() {
            for u0 in certificate_pivots(system, u, s) {
                let first = !t.contains(s) && t_tilde.contains(u0);
                let second = !t.contains(u0) && t_tilde.contains(s);
                for (condition, holds) in [(1, first), (2, second)] {
                    if holds {
                        out.push(CorollaryWitness { u, s, u0, condition, t_tilde });
                    }
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuasiDenseCertificate {
    pub u: GenSubset,
    pub s0: usize,
}

/// Pairs `(U, s0)`, `U` maximal spherical, with `m(s0,u) ≥ 3` on `U` and
/// `m(s0,u0) = ∞` for some `u0 ∈ U`. Each pair certifies that `W^{{s0}}` is
/// quasi-dense in `W`.
pub fn check_quasidense_certificate(system: &CoxeterSystem) -> Vec<QuasiDenseCertificate> {
    let mut out = Vec::new();
    for u in maximal_spherical_subsets(system) {
        for s0 in system.all().iter() {
            if !certificate_pivots(system, u, s0).is_empty() {
                out.push(QuasiDenseCertificate { u, s0 });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DensityRow {
    /// Inner radius `r`.
    pub radius: usize,
    /// Maximum over `ball(r)` of the distance to the target; `None` when the
    /// ball contains no target element.
    pub max_distance: Option<usize>,
    /// Normal form of the first element (in ShortLex order) attaining the maximum.
    pub witness: Vec<u8>,
    pub boundary_reliable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DensityProfile {
    pub target: String,
    pub radius: usize,
    pub margin: usize,
    pub target_count: usize,
    pub rows: Vec<DensityRow>,
}

/// Profiles how far elements of `ball(r)` are from a target set, for
/// `r ≤ R − Δ`, using a multi-source BFS inside `ball(R)`.
///
/// A row is reliable when its maximum is at most `Δ`: any shorter path from
/// an element of `ball(R − Δ)` stays inside `ball(R)`.
pub fn density_profile<F>(
    rep: &Arc<ReflectionRep>,
    description: &str,
    target: F,
    radius: usize,
    margin: usize,
) -> Result<DensityProfile>
where
    F: Fn(&Element) -> Result<bool>,
{
    if radius <= margin {
        return Err(CoxError::Precondition(format!(
            "outer radius {radius} must exceed margin {margin}"
        )));
    }
    let ball = enumerate_ball(rep, radius)?;
    density_profile_in(&ball, description, target, margin)
}

pub fn density_profile_in<F>(
    ball: &CayleyBall,
    description: &str,
    target: F,
    margin: usize,
) -> Result<DensityProfile>
where
    F: Fn(&Element) -> Result<bool>,
{
    let radius = ball.radius();
    let rank = ball.elements().first().map_or(0, |e| e.rep().rank());
    let mut dist: Vec<Option<usize>> = vec![None; ball.len()];
    let mut queue = VecDeque::new();
    for (i, w) in ball.elements().iter().enumerate() {
        if target(w)? {
            dist[i] = Some(0);
            queue.push_back(i);
        }
    }
    let target_count = queue.len();
    while let Some(i) = queue.pop_front() {
        let d = dist[i].expect("queued nodes have distances") + 1;
        for s in 0..rank {
            if let Some(j) = ball.neighbor(i, s) {
                if dist[j].is_none() {
                    dist[j] = Some(d);
                    queue.push_back(j);
                }
            }
        }
    }

    let mut rows = Vec::new();
    // (distance, index), `None` distance meaning unreachable.
    let mut worst: Option<(Option<usize>, usize)> = None;
    let inner = radius.saturating_sub(margin);
    for r in 0..=inner {
        let start = if r == 0 { 0 } else { ball.count_within(r - 1) };
        for i in start..ball.count_within(r) {
            let worse = match worst {
                None => true,
                Some((None, _)) => false,
                Some((Some(d), _)) => dist[i].is_none_or(|x| x > d),
            };
            if worse {
                worst = Some((dist[i], i));
            }
        }
        let (max_distance, at) = worst.expect("ball(0) contains the identity");
        rows.push(DensityRow {
            radius: r,
            max_distance,
            witness: ball.element(at).normal_form().to_vec(),
            boundary_reliable: max_distance.is_some_and(|d| d <= margin),
        });
    }
    Ok(DensityProfile { target: description.to_string(), radius, margin, target_count, rows })
}

/// `W = W_{T̃} × W_{S∖T̃}`: every generator of `T̃` commutes with every
/// generator outside it. This decides whether `∂Σ(W_T,T)` is `W`-invariant.
pub fn check_w_invariance(system: &CoxeterSystem, t: GenSubset) -> Result<bool> {
    let t_tilde = essential_within(system, t)?;
    let rest = system.all().difference(t_tilde);
    Ok(t_tilde
        .iter()
        .all(|a| rest.iter().all(|b| system.m(a, b).is_commuting())))
}

/// Checks `(W_{S∖{t1..tn}})^T · t_n⋯t_1 ⊆ W^{{t1}}` on `ball(R)`; returns the
/// normal forms of violating `w`.
pub fn verify_lemma_2_7(
    rep: &Arc<ReflectionRep>,
    t: GenSubset,
    chain: &[usize],
    radius: usize,
) -> Result<Vec<Vec<u8>>> {
    check_lemma_2_7_chain(rep.system(), t, chain)?;
    let ball = enumerate_ball(rep, radius)?;
    verify_lemma_2_7_in(&ball, t, chain)
}

/// Rejects chains outside the lemma's hypotheses with a precondition error.
pub fn check_lemma_2_7_chain(system: &CoxeterSystem, t: GenSubset, chain: &[usize]) -> Result<()> {
    system.check_subset(t)?;
    let precondition = |msg: String| Err(CoxError::Precondition(msg));
    let Some(&last) = chain.last() else {
        return precondition("the chain t1..tn must be nonempty".into());
    };
    for (i, &x) in chain.iter().enumerate() {
        system.check_generator(x)?;
        if t.contains(x) {
            return precondition(format!("chain element {} lies in T", system.name(x)));
        }
        if chain[..i].contains(&x) {
            return precondition(format!("chain element {} repeats", system.name(x)));
        }
    }
    for pair in chain.windows(2) {
        if pair[0] != pair[1] && system.m(pair[0], pair[1]).is_commuting() {
            return precondition(format!(
                "consecutive chain elements {} and {} commute",
                system.name(pair[0]),
                system.name(pair[1])
            ));
        }
    }
    if let Some(x) = t.iter().find(|&x| system.m(last, x).is_commuting()) {
        return precondition(format!(
            "last chain element {} commutes with {} in T",
            system.name(last),
            system.name(x)
        ));
    }
    Ok(())
}

/// Every `(T, chain)` meeting the hypotheses with chain length `1..=max_len`,
/// ordered by `(T mask, chain)`.
pub fn lemma_2_7_instances(system: &CoxeterSystem, max_len: usize) -> Vec<(GenSubset, Vec<usize>)> {
    fn extend(
        system: &CoxeterSystem,
        t: GenSubset,
        chain: &mut Vec<usize>,
        max_len: usize,
        out: &mut Vec<(GenSubset, Vec<usize>)>,
    ) {
        if !chain.is_empty() && check_lemma_2_7_chain(system, t, chain).is_ok() {
            out.push((t, chain.clone()));
        }
        if chain.len() == max_len {
            return;
        }
        for x in system.all().difference(t).iter() {
            if chain.contains(&x) || chain.last().is_some_and(|&p| !system.m(p, x).at_least(3)) {
                continue;
            }
            chain.push(x);
            extend(system, t, chain, max_len, out);
            chain.pop();
        }
    }
    let mut out = Vec::new();
    for mask in 0..1u32 << system.rank() {
        extend(system, GenSubset::from_mask(mask), &mut Vec::new(), max_len, &mut out);
    }
    out
}

pub fn verify_lemma_2_7_in(ball: &CayleyBall, t: GenSubset, chain: &[usize]) -> Result<Vec<Vec<u8>>> {
    let Some(first) = ball.elements().first() else { return Ok(Vec::new()) };
    check_lemma_2_7_chain(first.system(), t, chain)?;
    let allowed = first.system().all().difference(GenSubset::from_indices(chain.iter().copied()));
    let expected = GenSubset::singleton(chain[0]);
    let mut bad = ball
        .elements()
        .par_iter()
        .map(|w| -> Result<Option<Vec<u8>>> {
            if !w.support().is_subset_of(allowed) || w.right_descents()? != t {
                return Ok(None);
            }
            let mut x = w.clone();
            for &c in chain.iter().rev() {
                x = x.mul_gen(c, Side::Right)?;
            }
            Ok((x.right_descents()? != expected).then(|| w.normal_form().to_vec()))
        })
        .filter_map(Result::transpose)
        .collect::<Result<Vec<_>>>()?;
    bad.sort();
    Ok(bad)
}

/// Whether `s0` satisfies the premise for `w`: `m(s0,t) ≥ 3` on `S(w)` and
/// `m(s0,t0) = ∞` for some `t0 ∈ S(w)`.
fn extension_premise(system: &CoxeterSystem, descents: GenSubset, s0: usize) -> bool {
    descents.iter().all(|t| system.product_order(s0, t).at_least(3))
        && descents.iter().any(|t| system.product_order(s0, t).is_infinite())
}

/// Checks `S(w·s0) = {s0}` whenever the premise holds, over `ball(R)`.
pub fn verify_descent_extension(rep: &Arc<ReflectionRep>, radius: usize) -> Result<Vec<(Vec<u8>, usize)>> {
    let ball = enumerate_ball(rep, radius)?;
    verify_descent_extension_in(&ball)
}

pub fn verify_descent_extension_in(ball: &CayleyBall) -> Result<Vec<(Vec<u8>, usize)>> {
    let per_element = ball
        .elements()
        .par_iter()
        .map(|w| -> Result<Vec<(Vec<u8>, usize)>> {
            let system = w.system();
            let d = w.right_descents()?;
            let mut bad = Vec::new();
            for s0 in system.all().iter() {
                if !extension_premise(system, d, s0) {
                    continue;
                }
                if w.mul_gen(s0, Side::Right)?.right_descents()? != GenSubset::singleton(s0) {
                    bad.push((w.normal_form().to_vec(), s0));
                }
            }
            Ok(bad)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut bad: Vec<_> = per_element.into_iter().flatten().collect();
    bad.sort();
    Ok(bad)
}

/// `|{w ∈ ball(r) : S(w) = {s}, ws ∈ W_T}|` for `r = 0..=R`. Since `w ↦ ws`
/// is injective this counts `W^{{s}}s ∩ W_T` on the ball.
pub fn intersection_counts(ball: &CayleyBall, t: GenSubset, s: usize) -> Result<Vec<usize>> {
    let mut per_length = vec![0usize; ball.max_length() + 1];
    for (i, w) in ball.elements().iter().enumerate() {
        if w.right_descents()? != GenSubset::singleton(s) {
            continue;
        }
        let ws = ball.neighbor(i, s).expect("w·s is shorter than w");
        if ball.element(ws).support().is_subset_of(t) {
            per_length[w.length()] += 1;
        }
    }
    let mut total = 0;
    Ok((0..=ball.radius())
        .map(|r| {
            total += per_length.get(r).copied().unwrap_or(0);
            total
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorGrowth {
    pub generator: usize,
    /// Cumulative counts, indexed by radius `0..=R`.
    pub counts: Vec<usize>,
    pub stabilized: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommutingSetReport {
    pub radius: usize,
    pub window: usize,
    pub t_tilde: GenSubset,
    pub rows: Vec<GeneratorGrowth>,
    pub u_estimate: GenSubset,
    /// Pairs `(t, u)` with `t ∈ T̃`, `u ∈ U_est`, `m(t,u) ≠ 2`. Nonempty means
    /// the radius is too small to separate finite from infinite counts.
    pub discrepancies: Vec<(usize, usize)>,
}

/// Estimates `U = {s ∉ T : W^{{s}}s ∩ W_T finite}` by count stabilization over
/// the last `window` radii, then checks that `T̃` commutes with the estimate.
pub fn estimate_commuting_set(
    rep: &Arc<ReflectionRep>,
    t: GenSubset,
    radius: usize,
    window: usize,
) -> Result<CommutingSetReport> {
    let system = rep.system();
    require_infinite(system, t)?;
    if t == system.all() {
        return Err(CoxError::Precondition("T must be a proper subset of S".into()));
    }
    let ball = enumerate_ball(rep, radius)?;
    let t_tilde = essential_within(system, t)?;
    let mut rows = Vec::new();
    let mut u_estimate = GenSubset::EMPTY;
    for s in system.all().difference(t).iter() {
        let counts = intersection_counts(&ball, t, s)?;
        let stabilized = radius >= window && counts[radius] == counts[radius - window];
        if stabilized {
            u_estimate = u_estimate.with(s);
        }
        rows.push(GeneratorGrowth { generator: s, counts, stabilized });
    }
    let discrepancies = t_tilde
        .iter()
        .flat_map(|a| u_estimate.iter().map(move |b| (a, b)))
        .filter(|&(a, b)| !system.m(a, b).is_commuting())
        .collect();
    Ok(CommutingSetReport { radius, window, t_tilde, rows, u_estimate, discrepancies })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthTable {
    pub generator: usize,
    /// `(r, count)` for `r = 1..=R`.
    pub counts: Vec<(usize, usize)>,
    pub checkpoints: [usize; 3],
    pub monotone: bool,
    pub strictly_increasing: bool,
    pub positive: bool,
}

impl GrowthTable {
    pub fn holds(&self) -> bool {
        self.monotone && self.strictly_increasing && self.positive
    }

    pub fn count_at(&self, r: usize) -> Option<usize> {
        self.counts.iter().find(|&&(x, _)| x == r).map(|&(_, c)| c)
    }
}

/// Growth of `W^{{s}}s ∩ W_T` on balls, for `s ∉ T` not commuting with `T̃`;
/// the set is infinite, so counts at `R/3 < 2R/3 < R` must strictly increase.
pub fn verify_infinite_intersection(
    rep: &Arc<ReflectionRep>,
    t: GenSubset,
    s: usize,
    radius: usize,
) -> Result<GrowthTable> {
    let system = rep.system();
    system.check_subset(t)?;
    system.check_generator(s)?;
    if t.contains(s) {
        return Err(CoxError::Precondition(format!("{} lies in T", system.name(s))));
    }
    let t_tilde = essential_within(system, t)?;
    if !t_tilde.iter().any(|x| system.m(s, x).at_least(3)) {
        return Err(CoxError::Precondition(format!(
            "{} commutes with every generator of T~ = {}",
            system.name(s),
            system.format_subset(t_tilde)
        )));
    }
    let ball = enumerate_ball(rep, radius)?;
    let all = intersection_counts(&ball, t, s)?;
    let counts: Vec<(usize, usize)> = (1..=radius).map(|r| (r, all[r])).collect();
    let checkpoints = [radius / 3, 2 * radius / 3, radius];
    let [a, b, c] = checkpoints.map(|r| all[r]);
    Ok(GrowthTable {
        generator: s,
        monotone: all.windows(2).all(|w| w[0] <= w[1]),
        strictly_increasing: a < b && b < c,
        positive: a > 0,
        checkpoints,
        counts,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexLemmaCheck {
    pub group_order: usize,
    pub parabolic_order: usize,
    pub minimal_representatives: usize,
    pub index: u128,
    pub holds: bool,
}

/// For finite `W`: `|A_T|·|W_T| = |W|` and `|A_T| = [W:W_T]`.
pub fn verify_index_lemma(rep: &Arc<ReflectionRep>, t: GenSubset) -> Result<IndexLemmaCheck> {
    let system = rep.system();
    system.check_subset(t)?;
    let group = enumerate_group(rep)?;
    let mut minimal_representatives = 0;
    let mut parabolic = 0;
    for w in group.elements() {
        if w.right_descents()?.is_disjoint(t) {
            minimal_representatives += 1;
        }
        if w.support().is_subset_of(t) {
            parabolic += 1;
        }
    }
    let idx = index(system, t)?.finite().expect("finite group has finite indices");
    let order = parabolic_order(system, t)?.finite().expect("finite group");
    let holds = minimal_representatives * parabolic == group.len()
        && minimal_representatives as u128 == idx
        && parabolic as u128 == order;
    Ok(IndexLemmaCheck {
        group_order: group.len(),
        parabolic_order: parabolic,
        minimal_representatives,
        index: idx,
        holds,
    })
}
