//! Finite-type recognition for parabolic subgroups.
//!
//! Each irreducible component is matched against the labeled diagrams of the
//! finite irreducible Coxeter groups. A component with an infinite bond, a
//! cycle, or a shape outside the templates generates an infinite group.

use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::Result;
use crate::system::{CoxeterSystem, GenSubset, Order};

/// A group order or coset count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cardinality {
    Finite(u128),
    Infinite,
}

impl Cardinality {
    pub fn is_finite(self) -> bool {
        matches!(self, Cardinality::Finite(_))
    }

    pub fn finite(self) -> Option<u128> {
        match self {
            Cardinality::Finite(n) => Some(n),
            Cardinality::Infinite => None,
        }
    }
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cardinality::Finite(n) => write!(f, "{n}"),
            Cardinality::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Cardinality {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Cardinality::Finite(n) => match u64::try_from(*n) {
                Ok(n) => serializer.serialize_u64(n),
                Err(_) => serializer.serialize_str(&n.to_string()),
            },
            Cardinality::Infinite => serializer.serialize_str("inf"),
        }
    }
}

/// Type of an irreducible component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComponentType {
    A(usize),
    B(usize),
    D(usize),
    E6,
    E7,
    E8,
    F4,
    H3,
    H4,
    I2(u32),
    Infinite,
}

impl ComponentType {
    pub fn order(self) -> Cardinality {
        use ComponentType::*;
        let n = match self {
            A(n) => factorial(n as u128 + 1),
            B(n) => (1u128 << n) * factorial(n as u128),
            D(n) => (1u128 << (n - 1)) * factorial(n as u128),
            E6 => 51_840,
            E7 => 2_903_040,
            E8 => 696_729_600,
            F4 => 1_152,
            H3 => 120,
            H4 => 14_400,
            I2(m) => 2 * m as u128,
            Infinite => return Cardinality::Infinite,
        };
        Cardinality::Finite(n)
    }
}

fn factorial(n: u128) -> u128 {
    (1..=n).product()
}

impl fmt::Display for ComponentType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ComponentType::*;
        match self {
            A(n) => write!(f, "A{n}"),
            B(n) => write!(f, "B{n}"),
            D(n) => write!(f, "D{n}"),
            E6 => f.write_str("E6"),
            E7 => f.write_str("E7"),
            E8 => f.write_str("E8"),
            F4 => f.write_str("F4"),
            H3 => f.write_str("H3"),
            H4 => f.write_str("H4"),
            I2(m) => write!(f, "I2({m})"),
            Infinite => f.write_str("INFINITE"),
        }
    }
}

impl Serialize for ComponentType {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentVerdict {
    pub generators: GenSubset,
    #[serde(rename = "type")]
    pub kind: ComponentType,
    pub order: Cardinality,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FinitenessVerdict {
    pub finite: bool,
    pub components: Vec<ComponentVerdict>,
    pub total_order: Cardinality,
}

/// Recognizes the type of the connected component `comp` of `system`.
pub fn component_type(system: &CoxeterSystem, comp: GenSubset) -> ComponentType {
    let members: Vec<usize> = comp.iter().collect();
    let n = members.len();
    let mut edges = Vec::new();
    for (a, &i) in members.iter().enumerate() {
        for &j in &members[a + 1..] {
            match system.m(i, j) {
                Order::Infinite => return ComponentType::Infinite,
                Order::Finite(m) if m >= 3 => edges.push((i, j, m)),
                Order::Finite(_) => {}
            }
        }
    }
    match n {
        0 => return ComponentType::A(0),
        1 => return ComponentType::A(1),
        2 => {
            return match edges.as_slice() {
                [(_, _, m)] => ComponentType::I2(*m),
                _ => ComponentType::Infinite,
            }
        }
        _ => {}
    }
    // A connected diagram on n vertices with n-1 edges is a tree.
    if edges.len() != n - 1 || edges.iter().any(|&(_, _, m)| m >= 6) {
        return ComponentType::Infinite;
    }
    let heavy: Vec<_> = edges.iter().filter(|&&(_, _, m)| m > 3).collect();
    if heavy.len() > 1 {
        return ComponentType::Infinite;
    }
    let neighbors = |v: usize| -> Vec<usize> {
        edges
            .iter()
            .filter_map(|&(i, j, _)| (i == v).then_some(j).or((j == v).then_some(i)))
            .collect()
    };
    let degree = |v: usize| neighbors(v).len();
    let branches: Vec<usize> = members.iter().copied().filter(|&v| degree(v) >= 3).collect();

    if let Some(&centre) = branches.first() {
        if branches.len() > 1 || degree(centre) > 3 || !heavy.is_empty() {
            return ComponentType::Infinite;
        }
        let mut arms: Vec<usize> = neighbors(centre)
            .into_iter()
            .map(|start| {
                let (mut prev, mut cur, mut len) = (centre, start, 1);
                loop {
                    let next: Vec<usize> =
                        neighbors(cur).into_iter().filter(|&x| x != prev).collect();
                    match next.as_slice() {
                        [x] => {
                            prev = cur;
                            cur = *x;
                            len += 1;
                        }
                        _ => return len,
                    }
                }
            })
            .collect();
        arms.sort_unstable();
        return match arms.as_slice() {
            [1, 1, _] => ComponentType::D(n),
            [1, 2, 2] => ComponentType::E6,
            [1, 2, 3] => ComponentType::E7,
            [1, 2, 4] => ComponentType::E8,
            _ => ComponentType::Infinite,
        };
    }

    // Path: walk from an endpoint and record the labels in order.
    let start = members.iter().copied().find(|&v| degree(v) == 1).unwrap_or(members[0]);
    let mut labels = Vec::with_capacity(n - 1);
    let (mut prev, mut cur) = (usize::MAX, start);
    while let Some(next) = neighbors(cur).into_iter().find(|&x| x != prev) {
        let m = match system.m(cur, next) {
            Order::Finite(m) => m,
            Order::Infinite => unreachable!("infinite bonds rejected above"),
        };
        labels.push(m);
        prev = cur;
        cur = next;
    }
    let heavy_at = labels.iter().position(|&m| m > 3);
    let at_end = |p: usize| p == 0 || p == labels.len() - 1;
    match heavy_at {
        None => ComponentType::A(n),
        Some(p) => match (labels[p], n) {
            (4, _) if at_end(p) => ComponentType::B(n),
            (4, 4) => ComponentType::F4,
            (5, 3) => ComponentType::H3,
            (5, 4) if at_end(p) => ComponentType::H4,
            _ => ComponentType::Infinite,
        },
    }
}

/// Decides whether `W_T` is finite, with the type and order of each component.
pub fn classify_subset(system: &CoxeterSystem, t: GenSubset) -> Result<FinitenessVerdict> {
    system.check_subset(t)?;
    let components: Vec<ComponentVerdict> = system
        .components_within(t)
        .into_iter()
        .map(|comp| {
            let kind = component_type(system, comp);
            ComponentVerdict { generators: comp, kind, order: kind.order() }
        })
        .collect();
    let finite = components.iter().all(|c| c.order.is_finite());
    let total_order = if finite {
        Cardinality::Finite(components.iter().filter_map(|c| c.order.finite()).product())
    } else {
        Cardinality::Infinite
    };
    Ok(FinitenessVerdict { finite, components, total_order })
}

pub fn is_spherical(system: &CoxeterSystem, t: GenSubset) -> Result<bool> {
    Ok(classify_subset(system, t)?.finite)
}

/// `|W_T|`.
pub fn parabolic_order(system: &CoxeterSystem, t: GenSubset) -> Result<Cardinality> {
    Ok(classify_subset(system, t)?.total_order)
}

fn spherical_table(system: &CoxeterSystem) -> Vec<bool> {
    let n = system.rank();
    (0u32..1 << n)
        .into_par_iter()
        .map(|mask| {
            system
                .components_within(GenSubset::from_mask(mask))
                .into_iter()
                .all(|c| component_type(system, c) != ComponentType::Infinite)
        })
        .collect()
}

/// All spherical subsets, in increasing mask order.
pub fn spherical_subsets(system: &CoxeterSystem) -> Vec<GenSubset> {
    spherical_table(system)
        .into_iter()
        .enumerate()
        .filter(|&(_, sph)| sph)
        .map(|(mask, _)| GenSubset::from_mask(mask as u32))
        .collect()
}

/// Spherical subsets that become infinite when any further generator is added,
/// in increasing mask order.
pub fn maximal_spherical_subsets(system: &CoxeterSystem) -> Vec<GenSubset> {
    let table = spherical_table(system);
    let all = system.all();
    table
        .iter()
        .enumerate()
        .filter(|&(mask, &sph)| {
            let t = GenSubset::from_mask(mask as u32);
            sph && all.difference(t).iter().all(|s| !table[t.with(s).mask() as usize])
        })
        .map(|(mask, _)| GenSubset::from_mask(mask as u32))
        .collect()
}

/// The union of the infinite irreducible components of `(W_T, T)`, in the
/// ambient indexing. With `t = S` this is the essential subset of the system.
pub fn essential_within(system: &CoxeterSystem, t: GenSubset) -> Result<GenSubset> {
    system.check_subset(t)?;
    Ok(system
        .components_within(t)
        .into_iter()
        .filter(|&c| component_type(system, c) == ComponentType::Infinite)
        .fold(GenSubset::EMPTY, GenSubset::union))
}

pub fn essential_subset(system: &CoxeterSystem) -> GenSubset {
    essential_within(system, system.all()).expect("full set is in range")
}
