//! Flip operators and the sparse two-entry witness family.
//!
//! A single-site flip `σ_kl = |k⟩⟨l| + |l⟩⟨k|` acts on one qudit; a subset
//! flip applies one such exchange per site of its support and annihilates
//! any basis label whose digits fall outside the assigned level pairs.
//! For disjoint nonempty subsets (γ, δ) and a level-pair assignment over
//! γ ∪ δ, each basis label `j` yields the witness
//!
//! ```text
//! O = f_{γ∪δ} |j⟩⟨j|  -  f_γ |j⟩⟨j| f_δ
//! ```
//!
//! whose matrix element `⟨ψ|O|ψ*⟩` is a 2x2 minor of the amplitude matrix
//! of ψ reshaped across the cut γ | γ̄. The minor form is what makes every
//! witness vanish identically on states that are product across the cut.
//!
//! Enumeration order is deterministic: assignments run in lexicographic
//! order (sites ascending, level pairs `(k, l)` with `k < l` in lexicographic
//! order per site, rightmost site fastest), and the basis label `j` is the
//! innermost loop. Sums over witnesses are therefore reproducible.

use crate::partitions::SiteSet;
use crate::tensor::{CMat, SystemShape};
use crate::Complex64;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlipError {
    #[error("subsets γ and δ must be nonempty")]
    EmptySubset,
    #[error("subsets γ and δ must be disjoint")]
    OverlapError,
    #[error("site {site} out of range 1..={n}")]
    SiteOutOfRange { site: usize, n: usize },
    #[error("level {level} out of range 0..{d}")]
    LevelOutOfRange { level: usize, d: usize },
}

/// A single-site symmetric flip `σ_kl` embedded on `site` (identity on all
/// other sites), represented by its action on basis labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SiteFlip {
    site: usize,
    k: usize,
    l: usize,
}

pub fn flip_site(shape: &SystemShape, site: usize, k: usize, l: usize) -> Result<SiteFlip, FlipError> {
    if site == 0 || site > shape.n() {
        return Err(FlipError::SiteOutOfRange { site, n: shape.n() });
    }
    for level in [k, l] {
        if level >= shape.d() {
            return Err(FlipError::LevelOutOfRange {
                level,
                d: shape.d(),
            });
        }
    }
    Ok(SiteFlip { site, k, l })
}

impl SiteFlip {
    /// Action on a basis label: `σ_kl |m⟩` is `|l⟩`, `|k⟩` or zero, with
    /// the degenerate `k = l` case giving `2|k⟩⟨k|`.
    pub fn apply(&self, shape: &SystemShape, label: usize) -> Option<(usize, f64)> {
        let m = shape.digit(label, self.site);
        if self.k == self.l {
            return (m == self.k).then_some((label, 2.0));
        }
        if m == self.k {
            Some((shape.with_digit(label, self.site, self.l), 1.0))
        } else if m == self.l {
            Some((shape.with_digit(label, self.site, self.k), 1.0))
        } else {
            None
        }
    }
}

/// A level pair `(k, l)` with `k < l` per site of its domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairAssignment {
    entries: Vec<(usize, usize, usize)>,
}

impl PairAssignment {
    /// Builds from `(site, k, l)` triples; sites must be distinct and
    /// `k < l` strictly.
    pub fn new(mut entries: Vec<(usize, usize, usize)>, d: usize) -> Result<Self, FlipError> {
        entries.sort_unstable();
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(FlipError::OverlapError);
            }
        }
        for &(_, k, l) in &entries {
            if l >= d {
                return Err(FlipError::LevelOutOfRange { level: l, d });
            }
            if k >= l {
                return Err(FlipError::LevelOutOfRange { level: k, d });
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[(usize, usize, usize)] {
        &self.entries
    }

    pub fn domain(&self) -> SiteSet {
        SiteSet::new(self.entries.iter().map(|e| e.0).collect()).expect("sites are distinct")
    }

    /// Sub-assignment over the sites also contained in `sites`.
    pub fn restricted(&self, sites: &SiteSet) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .copied()
                .filter(|(s, _, _)| sites.contains(*s))
                .collect(),
        }
    }

    /// Flips every assigned site of `label`; `None` when any digit lies
    /// outside its level pair. An involution on its support.
    pub fn flip_label(&self, shape: &SystemShape, label: usize) -> Option<usize> {
        let mut out = label;
        for &(site, k, l) in &self.entries {
            let m = shape.digit(out, site);
            if m == k {
                out = shape.with_digit(out, site, l);
            } else if m == l {
                out = shape.with_digit(out, site, k);
            } else {
                return None;
            }
        }
        Some(out)
    }
}

/// The map on basis labels implemented by the subset flip of `assign`.
pub fn flip_subset(shape: &SystemShape, assign: &PairAssignment, label: usize) -> Option<usize> {
    assign.flip_label(shape, label)
}

/// One signed matrix entry of a witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WitnessTerm {
    pub row: usize,
    pub col: usize,
    /// +1 for the joint-flip term, -1 for the split-flip term.
    pub sign: i8,
}

/// A witness operator stored as at most two signed unit entries, plus the
/// provenance that generated it. A witness whose label is annihilated by
/// the flips is identically zero and carries no terms.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseWitness {
    dim: usize,
    terms: Vec<WitnessTerm>,
    gamma: SiteSet,
    delta: SiteSet,
    assignment: PairAssignment,
    label: usize,
}

impl SparseWitness {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[WitnessTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn gamma(&self) -> &SiteSet {
        &self.gamma
    }

    pub fn delta(&self) -> &SiteSet {
        &self.delta
    }

    pub fn assignment(&self) -> &PairAssignment {
        &self.assignment
    }

    pub fn label(&self) -> usize {
        self.label
    }

    /// Dense materialization; oracle path for tests.
    pub fn dense(&self) -> CMat {
        let mut m = CMat::zeros(self.dim);
        for t in &self.terms {
            m.add_at(t.row, t.col, Complex64::new(t.sign as f64, 0.0));
        }
        m
    }

    /// Dense `O + O†`.
    pub fn dense_symmetrized(&self) -> CMat {
        let o = self.dense();
        o.add(&o.adjoint())
    }

    /// Entries of `F = O + O†` as (row, col, sign) triples.
    pub fn f_entries(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(2 * self.terms.len());
        for t in &self.terms {
            out.push((t.row, t.col, t.sign as f64));
            out.push((t.col, t.row, t.sign as f64));
        }
        out
    }

    /// Debug dump: `γ|δ|assignment|j|row,col,sign;row,col,sign`, with
    /// `zero` in the terms field for annihilated witnesses.
    pub fn dump_line(&self) -> String {
        let join = |s: &SiteSet| {
            s.members()
                .iter()
                .map(|m| format!("{m}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        let assign = self
            .assignment
            .entries()
            .iter()
            .map(|(s, k, l)| format!("{s}:{k}-{l}"))
            .collect::<Vec<_>>()
            .join(",");
        let terms = if self.terms.is_empty() {
            String::from("zero")
        } else {
            self.terms
                .iter()
                .map(|t| format!("{},{},{:+}", t.row, t.col, t.sign))
                .collect::<Vec<_>>()
                .join(";")
        };
        format!(
            "{}|{}|{}|{}|{}",
            join(&self.gamma),
            join(&self.delta),
            assign,
            self.label,
            terms
        )
    }
}

fn check_subsets(shape: &SystemShape, gamma: &SiteSet, delta: &SiteSet) -> Result<(), FlipError> {
    if gamma.is_empty() || delta.is_empty() {
        return Err(FlipError::EmptySubset);
    }
    if !gamma.is_disjoint(delta) {
        return Err(FlipError::OverlapError);
    }
    for set in [gamma, delta] {
        if let Some(site) = set.max_site() {
            if site > shape.n() {
                return Err(FlipError::SiteOutOfRange { site, n: shape.n() });
            }
        }
    }
    Ok(())
}

/// All level pairs `(k, l)` with `k < l < d`, lexicographic.
fn level_pairs(d: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for k in 0..d {
        for l in (k + 1)..d {
            out.push((k, l));
        }
    }
    out
}

/// Every witness of the (γ, δ) family: one per (assignment over γ ∪ δ,
/// basis label), in the documented deterministic order.
pub fn enumerate_witnesses(
    shape: &SystemShape,
    gamma: &SiteSet,
    delta: &SiteSet,
) -> Result<Vec<SparseWitness>, FlipError> {
    check_subsets(shape, gamma, delta)?;
    let support = gamma.union(delta);
    let sites = support.members();
    let pairs = level_pairs(shape.d());
    let dim = shape.total_dim();
    let mut wits = Vec::new();
    let mut odometer = vec![0usize; sites.len()];
    loop {
        let entries: Vec<(usize, usize, usize)> = sites
            .iter()
            .zip(&odometer)
            .map(|(&site, &pi)| (site, pairs[pi].0, pairs[pi].1))
            .collect();
        let assignment = PairAssignment::new(entries, shape.d()).expect("pairs are valid by construction");
        let assign_gamma = assignment.restricted(gamma);
        let assign_delta = assignment.restricted(delta);
        for label in 0..dim {
            let terms = match assignment.flip_label(shape, label) {
                Some(joint) => {
                    let row_split = assign_gamma
                        .flip_label(shape, label)
                        .expect("γ digits are in range when the joint flip is");
                    let col_split = assign_delta
                        .flip_label(shape, label)
                        .expect("δ digits are in range when the joint flip is");
                    vec![
                        WitnessTerm {
                            row: joint,
                            col: label,
                            sign: 1,
                        },
                        WitnessTerm {
                            row: row_split,
                            col: col_split,
                            sign: -1,
                        },
                    ]
                }
                None => Vec::new(),
            };
            wits.push(SparseWitness {
                dim,
                terms,
                gamma: gamma.clone(),
                delta: delta.clone(),
                assignment: assignment.clone(),
                label,
            });
        }
        // Odometer increment, rightmost site fastest.
        let mut pos = sites.len();
        loop {
            if pos == 0 {
                return Ok(wits);
            }
            pos -= 1;
            odometer[pos] += 1;
            if odometer[pos] < pairs.len() {
                break;
            }
            odometer[pos] = 0;
        }
    }
}
