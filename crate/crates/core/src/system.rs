//! Coxeter matrices, Coxeter systems and generator subsets.
//!
//! Generators are identified by index `0..rank`; labels only matter when
//! reading or printing a presentation. Subsets of generators are bitmasks.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CoxError, Result};

/// Largest supported rank. Subsets are `u32` masks and group orders are
/// tracked in `u128`, which covers every finite type up to this rank.
pub const MAX_RANK: usize = 24;

/// An entry `m(s,t)` of a Coxeter matrix, which is also the order of `st`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    Finite(u32),
    Infinite,
}

impl Order {
    pub fn is_infinite(self) -> bool {
        matches!(self, Order::Infinite)
    }

    /// `self >= k`, with infinity above every integer.
    pub fn at_least(self, k: u32) -> bool {
        match self {
            Order::Finite(m) => m >= k,
            Order::Infinite => true,
        }
    }

    /// True for `m = 2`, i.e. the two generators commute.
    pub fn is_commuting(self) -> bool {
        self == Order::Finite(2)
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(m) => write!(f, "{m}"),
            Order::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Order {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Order::Finite(m) => serializer.serialize_u32(*m),
            Order::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Order {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u32),
            Str(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Int(m) => Ok(Order::Finite(m)),
            Raw::Str(s) if s == "inf" => Ok(Order::Infinite),
            Raw::Str(s) => Err(serde::de::Error::custom(format!(
                "expected integer or \"inf\", got {s:?}"
            ))),
        }
    }
}

/// A violated Coxeter matrix condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// `m(i,j) != m(j,i)`; reported once with `i < j`.
    Asymmetric { i: usize, j: usize },
    /// `m(i,i) != 1`.
    Diagonal { i: usize },
    /// `m(i,j) < 2` for `i != j`.
    OffDiagonal { i: usize, j: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Asymmetric { i, j } => write!(f, "m({i},{j}) != m({j},{i})"),
            Violation::Diagonal { i } => write!(f, "m({i},{i}) != 1"),
            Violation::OffDiagonal { i, j } => write!(f, "m({i},{j}) < 2"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoxeterMatrix {
    rank: usize,
    entries: Vec<Order>,
}

impl CoxeterMatrix {
    /// Builds a matrix from rows without checking the Coxeter conditions;
    /// use [`CoxeterMatrix::validate`] for that. Fails only on a non-square table.
    pub fn from_rows(rows: Vec<Vec<Order>>) -> Result<Self> {
        let rank = rows.len();
        if let Some((r, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != rank) {
            return Err(CoxError::Syntax {
                line: r + 1,
                message: format!("row has {} entries, expected {rank}", row.len()),
            });
        }
        Ok(Self {
            rank,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// The matrix with every off-diagonal entry equal to 2.
    pub fn commuting(rank: usize) -> Self {
        let mut entries = vec![Order::Finite(2); rank * rank];
        for i in 0..rank {
            entries[i * rank + i] = Order::Finite(1);
        }
        Self { rank, entries }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, i: usize, j: usize) -> Order {
        self.entries[i * self.rank + j]
    }

    fn set_pair(&mut self, i: usize, j: usize, m: Order) {
        self.entries[i * self.rank + j] = m;
        self.entries[j * self.rank + i] = m;
    }

    pub fn rows(&self) -> Vec<Vec<Order>> {
        self.entries.chunks(self.rank.max(1)).take(self.rank).map(<[_]>::to_vec).collect()
    }

    /// Every violated presentation condition, in index order. Empty iff valid.
    pub fn validate(&self) -> Vec<Violation> {
        let n = self.rank;
        let mut out = Vec::new();
        for i in 0..n {
            if self.get(i, i) != Order::Finite(1) {
                out.push(Violation::Diagonal { i });
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                if i < j && self.get(i, j) != self.get(j, i) {
                    out.push(Violation::Asymmetric { i, j });
                }
                if !self.get(i, j).at_least(2) {
                    out.push(Violation::OffDiagonal { i, j });
                }
            }
        }
        out
    }
}

/// A subset of the generators, as a bitmask over generator indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GenSubset(u32);

impl GenSubset {
    pub const EMPTY: GenSubset = GenSubset(0);

    pub fn from_mask(mask: u32) -> Self {
        GenSubset(mask)
    }

    pub fn full(rank: usize) -> Self {
        if rank >= 32 {
            GenSubset(u32::MAX)
        } else {
            GenSubset((1u32 << rank) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        GenSubset(1 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Self {
        GenSubset(it.into_iter().fold(0, |m, i| m | (1 << i)))
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn contains(self, i: usize) -> bool {
        i < 32 && self.0 >> i & 1 == 1
    }

    pub fn with(self, i: usize) -> Self {
        GenSubset(self.0 | 1 << i)
    }

    pub fn without(self, i: usize) -> Self {
        GenSubset(self.0 & !(1 << i))
    }

    pub fn union(self, other: Self) -> Self {
        GenSubset(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        GenSubset(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        GenSubset(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Least member, if any.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Members in increasing index order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let i = rest.trailing_zeros();
            rest &= rest - 1;
            Some(i as usize)
        })
    }

    /// Whether every member is below `rank`.
    pub fn fits(self, rank: usize) -> bool {
        self.is_subset_of(GenSubset::full(rank))
    }
}

/// Serializes as the ascending list of member indices.
impl Serialize for GenSubset {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

/// A Coxeter system `(W,S)`: generator labels plus a validated matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoxeterSystem {
    names: Vec<String>,
    matrix: CoxeterMatrix,
}

impl CoxeterSystem {
    pub fn new(names: Vec<String>, matrix: CoxeterMatrix) -> Result<Self> {
        if names.len() != matrix.rank() {
            return Err(CoxError::Precondition(format!(
                "{} labels for a rank {} matrix",
                names.len(),
                matrix.rank()
            )));
        }
        if matrix.rank() > MAX_RANK {
            return Err(CoxError::Precondition(format!(
                "rank {} exceeds the supported maximum {MAX_RANK}",
                matrix.rank()
            )));
        }
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(CoxError::Precondition(format!("duplicate generator label `{a}`")));
            }
        }
        let violations = matrix.validate();
        if !violations.is_empty() {
            return Err(CoxError::Invalid(violations));
        }
        Ok(Self { names, matrix })
    }

    /// Builds a system from labels and explicit off-diagonal entries; pairs
    /// not listed default to 2.
    pub fn from_pairs(names: &[&str], pairs: &[(usize, usize, Order)]) -> Result<Self> {
        let mut matrix = CoxeterMatrix::commuting(names.len());
        for &(i, j, m) in pairs {
            if i >= names.len() || j >= names.len() {
                return Err(CoxError::GeneratorOutOfRange { index: i.max(j), rank: names.len() });
            }
            matrix.set_pair(i, j, m);
        }
        Self::new(names.iter().map(|s| s.to_string()).collect(), matrix)
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn matrix(&self) -> &CoxeterMatrix {
        &self.matrix
    }

    pub fn m(&self, s: usize, t: usize) -> Order {
        self.matrix.get(s, t)
    }

    pub fn all(&self) -> GenSubset {
        GenSubset::full(self.rank())
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.names.iter().position(|n| n == label)
    }

    pub fn generator(&self, label: &str) -> Result<usize> {
        self.index_of(label)
            .ok_or_else(|| CoxError::UnknownGenerator(label.to_string()))
    }

    pub fn check_generator(&self, s: usize) -> Result<()> {
        if s < self.rank() {
            Ok(())
        } else {
            Err(CoxError::GeneratorOutOfRange { index: s, rank: self.rank() })
        }
    }

    pub fn check_subset(&self, t: GenSubset) -> Result<()> {
        if t.fits(self.rank()) {
            Ok(())
        } else {
            Err(CoxError::SubsetOutOfRange { mask: t.mask(), rank: self.rank() })
        }
    }

    /// Parses comma-separated labels, e.g. `s1,s4`. The empty string is the empty set.
    pub fn parse_subset(&self, text: &str) -> Result<GenSubset> {
        text.split(',')
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .try_fold(GenSubset::EMPTY, |acc, l| Ok(acc.with(self.generator(l)?)))
    }

    /// Parses a comma-separated word of labels into generator indices.
    pub fn parse_word(&self, text: &str) -> Result<Vec<usize>> {
        text.split(',')
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| self.generator(l))
            .collect()
    }

    pub fn format_subset(&self, t: GenSubset) -> String {
        let labels: Vec<&str> = t.iter().map(|i| self.name(i)).collect();
        format!("{{{}}}", labels.join(","))
    }

    pub fn format_word(&self, word: &[u8]) -> String {
        if word.is_empty() {
            return "e".to_string();
        }
        word.iter().map(|&i| self.name(i as usize)).collect::<Vec<_>>().join(",")
    }

    /// `o(st)`: `m(s,t)` for `s != t` and 1 for `s = t`.
    pub fn product_order(&self, s: usize, t: usize) -> Order {
        if s == t {
            Order::Finite(1)
        } else {
            self.m(s, t)
        }
    }

    /// The parabolic system `(W_T, T)`, with labels preserved. Index `k` of the
    /// result is the `k`-th smallest member of `t`.
    pub fn restrict(&self, t: GenSubset) -> Result<CoxeterSystem> {
        self.check_subset(t)?;
        let members: Vec<usize> = t.iter().collect();
        let rows = members
            .iter()
            .map(|&i| members.iter().map(|&j| self.m(i, j)).collect())
            .collect();
        Ok(CoxeterSystem {
            names: members.iter().map(|&i| self.names[i].clone()).collect(),
            matrix: CoxeterMatrix::from_rows(rows)?,
        })
    }

    /// Connected components of the graph with an edge wherever `m(s,t) >= 3`,
    /// ordered by least member.
    pub fn irreducible_components(&self) -> Vec<GenSubset> {
        self.components_within(self.all())
    }

    /// Irreducible components of the parabolic subsystem on `t`, in the
    /// ambient indexing.
    pub fn components_within(&self, t: GenSubset) -> Vec<GenSubset> {
        let mut seen = GenSubset::EMPTY;
        let mut out = Vec::new();
        for start in t.iter() {
            if seen.contains(start) {
                continue;
            }
            let mut comp = GenSubset::singleton(start);
            let mut stack = vec![start];
            while let Some(i) = stack.pop() {
                for j in t.difference(comp).iter() {
                    if self.m(i, j).at_least(3) {
                        comp = comp.with(j);
                        stack.push(j);
                    }
                }
            }
            seen = seen.union(comp);
            out.push(comp);
        }
        out
    }

    /// Writes the system in the diagram format; pairs with `m = 2` are omitted.
    pub fn to_diagram(&self) -> String {
        let mut out = format!("generators {}\n", self.names.join(" "));
        for i in 0..self.rank() {
            for j in i + 1..self.rank() {
                let m = self.m(i, j);
                if !m.is_commuting() {
                    out.push_str(&format!("m {} {} {}\n", self.names[i], self.names[j], m));
                }
            }
        }
        out
    }

    /// Hex SHA-256 of the serialized presentation.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let hash = Sha256::digest(self.to_diagram().as_bytes());
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Display for CoxeterSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_diagram())
    }
}

/// Labels and matrix read from a diagram file, before validation.
#[derive(Debug, Clone)]
pub struct Presentation {
    pub names: Vec<String>,
    pub matrix: CoxeterMatrix,
}

/// Reads the diagram format without checking the Coxeter conditions.
pub fn parse_presentation(text: &str) -> Result<Presentation> {
    let mut names: Option<Vec<String>> = None;
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut matrix = CoxeterMatrix::commuting(0);
    let mut declared: HashMap<(usize, usize), usize> = HashMap::new();

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = body.split_whitespace().collect();
        let syntax = |message: String| CoxError::Syntax { line, message };
        match (tokens[0], names.is_some()) {
            ("generators", false) => {
                let labels: Vec<String> = tokens[1..].iter().map(|s| s.to_string()).collect();
                if labels.is_empty() {
                    return Err(syntax("`generators` needs at least one label".into()));
                }
                if labels.len() > MAX_RANK {
                    return Err(syntax(format!("more than {MAX_RANK} generators")));
                }
                for (i, l) in labels.iter().enumerate() {
                    if index.insert(l.clone(), i).is_some() {
                        return Err(syntax(format!("duplicate generator label `{l}`")));
                    }
                }
                matrix = CoxeterMatrix::commuting(labels.len());
                names = Some(labels);
            }
            ("generators", true) => {
                return Err(syntax("only one `generators` line is allowed".into()));
            }
            (_, false) => {
                return Err(syntax("the first declaration must be `generators`".into()));
            }
            ("m", true) => {
                if tokens.len() != 4 {
                    return Err(syntax(format!(
                        "expected `m <label> <label> <value>`, got {} fields",
                        tokens.len()
                    )));
                }
                let lookup = |label: &str| {
                    index.get(label).copied().ok_or_else(|| CoxError::UnknownLabel {
                        line,
                        label: label.to_string(),
                    })
                };
                let (i, j) = (lookup(tokens[1])?, lookup(tokens[2])?);
                let value = match tokens[3] {
                    "inf" => Order::Infinite,
                    v => Order::Finite(
                        v.parse::<u32>()
                            .map_err(|_| syntax(format!("bad value `{v}`: expected integer or `inf`")))?,
                    ),
                };
                let key = (i.min(j), i.max(j));
                if declared.insert(key, line).is_some() {
                    return Err(CoxError::DuplicatePair {
                        line,
                        a: tokens[1].to_string(),
                        b: tokens[2].to_string(),
                    });
                }
                matrix.set_pair(i, j, value);
            }
            (other, true) => {
                return Err(syntax(format!("unknown directive `{other}`")));
            }
        }
    }
    let names = names.ok_or(CoxError::Syntax {
        line: text.lines().count().max(1),
        message: "missing `generators` line".into(),
    })?;
    Ok(Presentation { names, matrix })
}

/// Parses and validates a diagram file. Pairs without an `m` line get `m = 2`.
pub fn parse_system(text: &str) -> Result<CoxeterSystem> {
    let p = parse_presentation(text)?;
    CoxeterSystem::new(p.names, p.matrix)
}
