//! Exhaustive Neyman–Pearson checks on finite probability spaces.
//!
//! For two laws `P₁`, `P₂` on `n ≤ 20` atoms the static problems
//!
//! * maximise `P₁(A)` subject to `P₂(A) ≤ budget`, and
//! * minimise `P₂(B)` subject to `P₁(B) ≥ confidence`,
//!
//! are solved by scanning all `2ⁿ` subsets and compared with the
//! likelihood-ratio sets `{dP₁/dP₂ ≥ c}` and `{dP₂/dP₁ ≤ c}`.

use crate::error::{Error, Result};

/// Feasibility slack for sums computed in different orders.
const SUM_TOL: f64 = 1e-12;
const MAX_ATOMS: usize = 20;

/// Atoms `(p1, p2)` with strictly positive weights, each column summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMarket {
    atoms: Vec<(f64, f64)>,
}

impl DiscreteMarket {
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() || atoms.len() > MAX_ATOMS {
            return Err(Error::InvalidParameter(format!(
                "need between 1 and {MAX_ATOMS} atoms, got {}",
                atoms.len()
            )));
        }
        if atoms.iter().any(|&(a, b)| !(a > 0.0) || !(b > 0.0)) {
            return Err(Error::InvalidParameter("atom weights must be positive".into()));
        }
        let (s1, s2) = atoms.iter().fold((0.0, 0.0), |(x, y), &(a, b)| (x + a, y + b));
        if (s1 - 1.0).abs() > 1e-9 || (s2 - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "weights must sum to one, got {s1} and {s2}"
            )));
        }
        Ok(Self { atoms })
    }

    /// Builds a market from unnormalised positive weights.
    pub fn normalised(raw: &[(f64, f64)]) -> Result<Self> {
        let (s1, s2) = raw.iter().fold((0.0, 0.0), |(x, y), &(a, b)| (x + a, y + b));
        Self::new(raw.iter().map(|&(a, b)| (a / s1, b / s2)).collect())
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// `(P₁(set), P₂(set))` of a subset given as a bit mask.
    pub fn measure(&self, mask: u32) -> (f64, f64) {
        self.atoms
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .fold((0.0, 0.0), |(x, y), (_, &(a, b))| (x + a, y + b))
    }

    /// Atom indices sorted by decreasing `p1/p2`, grouped by equal ratio.
    fn ratio_groups(&self) -> Vec<(f64, u32)> {
        let mut idx: Vec<usize> = (0..self.atoms.len()).collect();
        let ratio = |i: usize| self.atoms[i].0 / self.atoms[i].1;
        idx.sort_by(|&a, &b| ratio(b).total_cmp(&ratio(a)));
        let mut groups: Vec<(f64, u32)> = Vec::new();
        for i in idx {
            match groups.last_mut() {
                Some((r, mask)) if *r == ratio(i) => *mask |= 1 << i,
                _ => groups.push((ratio(i), 1 << i)),
            }
        }
        groups
    }
}

/// Exhaustive optimum next to the likelihood-ratio candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NpOutcome {
    pub best_set: u32,
    /// Objective of `best_set`: `P₁` for the max problem, `P₂` for the min problem.
    pub best_value: f64,
    /// Likelihood-ratio set attaining the constraint exactly, if one exists.
    pub threshold_set: Option<u32>,
    pub threshold_value: f64,
    /// Ratio level defining `threshold_set`.
    pub level: f64,
}

/// `max P₁(A)` over `P₂(A) ≤ budget`, against `{dP₁/dP₂ ≥ c}` with `P₂ = budget`.
pub fn np_bruteforce(dm: &DiscreteMarket, budget: f64) -> Result<NpOutcome> {
    if !(0.0..=1.0).contains(&budget) {
        return Err(Error::InvalidParameter(format!("budget {budget} outside [0, 1]")));
    }
    let n = dm.len();
    let (mut best_set, mut best_value) = (0u32, 0.0);
    for mask in 0..(1u32 << n) {
        let (p1, p2) = dm.measure(mask);
        if p2 <= budget + SUM_TOL && p1 > best_value {
            best_set = mask;
            best_value = p1;
        }
    }
    let mut acc = 0u32;
    let mut threshold = None;
    for (ratio, mask) in dm.ratio_groups() {
        let (_, p2) = dm.measure(acc | mask);
        if p2 > budget + SUM_TOL {
            break;
        }
        acc |= mask;
        // The group level is the one that adds this group.
        threshold = Some((acc, ratio));
    }
    let (threshold_set, level) = match threshold {
        Some((mask, ratio)) if (dm.measure(mask).1 - budget).abs() <= SUM_TOL => (Some(mask), ratio),
        _ if budget <= SUM_TOL => (Some(0), f64::INFINITY),
        _ => (None, f64::NAN),
    };
    Ok(NpOutcome {
        best_set,
        best_value,
        threshold_set,
        threshold_value: threshold_set.map_or(f64::NAN, |m| dm.measure(m).0),
        level,
    })
}

/// `min P₂(B)` over `P₁(B) ≥ confidence`, against `{dP₂/dP₁ ≤ c}` with `P₁ = confidence`.
pub fn np_bruteforce_min(dm: &DiscreteMarket, confidence: f64) -> Result<NpOutcome> {
    if !(0.0..=1.0).contains(&confidence) {
        return Err(Error::InvalidParameter(format!(
            "confidence {confidence} outside [0, 1]"
        )));
    }
    let n = dm.len();
    let (mut best_set, mut best_value) = (0u32, f64::INFINITY);
    for mask in 0..(1u32 << n) {
        let (p1, p2) = dm.measure(mask);
        if p1 >= confidence - SUM_TOL && p2 < best_value {
            best_set = mask;
            best_value = p2;
        }
    }
    // {dP₂/dP₁ ≤ c} grows through atoms in decreasing p1/p2 order.
    let mut acc = 0u32;
    let mut threshold = if confidence <= SUM_TOL { Some((0u32, 0.0)) } else { None };
    for (ratio, mask) in dm.ratio_groups() {
        if dm.measure(acc).0 >= confidence - SUM_TOL {
            break;
        }
        acc |= mask;
        threshold = Some((acc, 1.0 / ratio));
    }
    let (threshold_set, level) = match threshold {
        Some((mask, level)) if (dm.measure(mask).0 - confidence).abs() <= SUM_TOL => {
            (Some(mask), level)
        }
        _ => (None, f64::NAN),
    };
    Ok(NpOutcome {
        best_set,
        best_value,
        threshold_set,
        threshold_value: threshold_set.map_or(f64::NAN, |m| dm.measure(m).1),
        level,
    })
}
