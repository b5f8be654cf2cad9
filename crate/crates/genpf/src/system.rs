//! The system model: entities, affectors, gain matrices and selections.
//!
//! A system is a pair of nonnegative `n x m` matrices. Affector `j` is a
//! *supporter* of entity `i` when the supporter gain at `(i, j)` is positive
//! and a *repressor* when the repressor gain is; a well-formed system never
//! has both. Selections pick one supporter per entity and induce the hidden
//! square subsystems the whole theory revolves around.

use std::collections::BTreeMap;

use num::traits::{One, Signed, Zero};

use crate::matrix::RatMatrix;
use crate::numeric::{rat_from_f64, rat_to_f64, Rat};
use crate::{Error, Result};

pub mod fixtures;

/// A nonsquare nonnegative system: supporter and repressor gain matrices
/// plus the derived per-entity index sets.
#[derive(Debug, Clone, PartialEq)]
pub struct GainSystem {
    supporter_gains: RatMatrix,
    repressor_gains: RatMatrix,
    supporters: Vec<Vec<usize>>,
    repressors: Vec<Vec<usize>>,
}

/// One structural defect found by [`GainSystem::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// An affector both supports and represses the same entity.
    SignConflict { entity: usize, affector: usize },
    /// An entity has no supporter at all.
    NoSupporter { entity: usize },
    /// A gain entry is negative (matrices must be nonnegative).
    NegativeGain {
        entity: usize,
        affector: usize,
        matrix: &'static str,
    },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::SignConflict { entity, affector } => {
                write!(f, "sign conflict at ({entity}, {affector})")
            }
            Violation::NoSupporter { entity } => {
                write!(f, "entity {entity} has no supporter")
            }
            Violation::NegativeGain {
                entity,
                affector,
                matrix,
            } => write!(f, "negative {matrix} gain at ({entity}, {affector})"),
        }
    }
}

/// The three system families, by supporter multiplicity and shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemClass {
    /// `m <= n` and every entity has exactly one supporter.
    Square,
    /// `m <= n + 1`, exactly one entity has two supporters, the rest one.
    WeaklySquare,
    /// `m > n + 1`.
    Nonsquare,
}

/// Largest absolute gain in the system; upper-bounds the optimal `beta`
/// for integer gains.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxGain(pub Rat);

impl MaxGain {
    pub fn of(system: &GainSystem) -> MaxGain {
        let s = system.supporter_gains.max_abs_entry();
        let r = system.repressor_gains.max_abs_entry();
        MaxGain(s.max(r))
    }

    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.0)
    }
}

/// A choice of exactly one supporter per determined entity. Complete when
/// every entity is determined.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Selection {
    assignments: BTreeMap<usize, usize>,
}

impl Selection {
    pub fn empty() -> Self {
        Selection {
            assignments: BTreeMap::new(),
        }
    }

    /// Complete selection from a per-entity affector list.
    pub fn complete(affector_by_entity: &[usize]) -> Self {
        Selection {
            assignments: affector_by_entity
                .iter()
                .enumerate()
                .map(|(e, &a)| (e, a))
                .collect(),
        }
    }

    pub fn from_pairs(pairs: &[(usize, usize)]) -> Self {
        Selection {
            assignments: pairs.iter().copied().collect(),
        }
    }

    /// Extended copy with one more assignment.
    pub fn with(&self, entity: usize, affector: usize) -> Self {
        let mut assignments = self.assignments.clone();
        assignments.insert(entity, affector);
        Selection { assignments }
    }

    pub fn get(&self, entity: usize) -> Option<usize> {
        self.assignments.get(&entity).copied()
    }

    /// Determined entities in ascending order.
    pub fn determined(&self) -> impl Iterator<Item = usize> + '_ {
        self.assignments.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.assignments.iter().map(|(&e, &a)| (e, a))
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn is_complete_for(&self, n: usize) -> bool {
        self.assignments.len() == n && (0..n).all(|e| self.assignments.contains_key(&e))
    }

    /// Selected affectors, ordered by entity.
    pub fn affectors(&self) -> Vec<usize> {
        self.assignments.values().copied().collect()
    }
}

/// The result of applying a selection: the induced system plus the
/// affector reindexing needed to expand sub-solutions back to length `m`.
#[derive(Debug, Clone)]
pub struct Contraction {
    pub system: GainSystem,
    /// Original affector index per contracted column.
    pub kept_affectors: Vec<usize>,
    /// Number of affectors in the source system.
    pub source_affectors: usize,
    pub selection: Selection,
}

impl Contraction {
    /// Natural extension: selected columns carry their sub-solution values,
    /// every other affector is zero.
    pub fn extend(&self, sub: &[f64]) -> Result<Vec<f64>> {
        if sub.len() != self.kept_affectors.len() {
            return Err(Error::IndexMismatch {
                what: "sub-solution",
                expected: self.kept_affectors.len(),
                got: sub.len(),
            });
        }
        let mut full = vec![0.0; self.source_affectors];
        for (k, &j) in self.kept_affectors.iter().enumerate() {
            full[j] = sub[k];
        }
        Ok(full)
    }

    /// Restriction of a full-length vector back to the contracted columns;
    /// the inverse of [`Contraction::extend`] on its image.
    pub fn restrict(&self, full: &[f64]) -> Result<Vec<f64>> {
        if full.len() != self.source_affectors {
            return Err(Error::IndexMismatch {
                what: "full solution",
                expected: self.source_affectors,
                got: full.len(),
            });
        }
        Ok(self.kept_affectors.iter().map(|&j| full[j]).collect())
    }
}

impl GainSystem {
    /// Builds a system from the two nonnegative gain matrices. Dimensions
    /// must agree; structural invariants are reported by [`validate`],
    /// not enforced here.
    ///
    /// [`validate`]: GainSystem::validate
    pub fn from_split(supporter_gains: Vec<Vec<Rat>>, repressor_gains: Vec<Vec<Rat>>) -> Result<Self> {
        let sup = RatMatrix::from_rows(supporter_gains)?;
        let rep = RatMatrix::from_rows(repressor_gains)?;
        if sup.rows() != rep.rows() || sup.cols() != rep.cols() {
            return Err(Error::DimensionMismatch {
                what: "repressor matrix shape",
                expected: sup.rows() * sup.cols(),
                got: rep.rows() * rep.cols(),
            });
        }
        let supporters = (0..sup.rows())
            .map(|i| {
                (0..sup.cols())
                    .filter(|&j| sup.get(i, j).is_positive())
                    .collect()
            })
            .collect();
        let repressors = (0..rep.rows())
            .map(|i| {
                (0..rep.cols())
                    .filter(|&j| rep.get(i, j).is_positive())
                    .collect()
            })
            .collect();
        Ok(GainSystem {
            supporter_gains: sup,
            repressor_gains: rep,
            supporters,
            repressors,
        })
    }

    /// Builds a system from a single signed gain matrix: positive entries
    /// become supporter gains, negative entries repressor gains.
    pub fn from_signed(gains: Vec<Vec<Rat>>) -> Result<Self> {
        let g = RatMatrix::from_rows(gains)?;
        let (n, m) = (g.rows(), g.cols());
        let mut sup = RatMatrix::zero(n, m);
        let mut rep = RatMatrix::zero(n, m);
        for i in 0..n {
            for j in 0..m {
                let v = g.get(i, j);
                if v.is_positive() {
                    sup.set(i, j, v.clone());
                } else if v.is_negative() {
                    rep.set(i, j, -v.clone());
                }
            }
        }
        let rows = |m: &RatMatrix| (0..n).map(|i| m.row(i).to_vec()).collect::<Vec<_>>();
        GainSystem::from_split(rows(&sup), rows(&rep))
    }

    /// Convenience constructor from signed integer gains.
    pub fn from_signed_ints(gains: &[Vec<i64>]) -> Result<Self> {
        GainSystem::from_signed(
            gains
                .iter()
                .map(|row| row.iter().map(|&v| Rat::from_integer(v.into())).collect())
                .collect(),
        )
    }

    /// Convenience constructor from signed float gains (converted exactly).
    pub fn from_signed_f64(gains: &[Vec<f64>]) -> Result<Self> {
        GainSystem::from_signed(
            gains
                .iter()
                .map(|row| row.iter().map(|&v| rat_from_f64(v)).collect::<Result<_>>())
                .collect::<Result<_>>()?,
        )
    }

    pub fn entities(&self) -> usize {
        self.supporter_gains.rows()
    }

    pub fn affectors(&self) -> usize {
        self.supporter_gains.cols()
    }

    pub fn supporter_gains(&self) -> &RatMatrix {
        &self.supporter_gains
    }

    pub fn repressor_gains(&self) -> &RatMatrix {
        &self.repressor_gains
    }

    /// Supporter index set of entity `i`, ascending.
    pub fn supporters(&self, i: usize) -> &[usize] {
        &self.supporters[i]
    }

    /// Repressor index set of entity `i`, ascending.
    pub fn repressors(&self, i: usize) -> &[usize] {
        &self.repressors[i]
    }

    pub fn max_gain(&self) -> MaxGain {
        MaxGain::of(self)
    }

    /// True when every nonzero gain is an integer.
    pub fn has_integer_gains(&self) -> bool {
        self.supporter_gains
            .iter()
            .chain(self.repressor_gains.iter())
            .all(|v| v.denom().is_one())
    }

    /// True when every nonzero gain is at least one. Under this condition
    /// the optimal `beta` never exceeds the largest gain.
    pub fn gains_at_least_one(&self) -> bool {
        let one = Rat::one();
        self.supporter_gains
            .iter()
            .chain(self.repressor_gains.iter())
            .all(|v| v.is_zero() || *v >= one)
    }

    /// Checks every structural invariant; returns an empty list iff the
    /// system is well-formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let (n, m) = (self.entities(), self.affectors());
        for i in 0..n {
            for j in 0..m {
                if self.supporter_gains.get(i, j).is_negative() {
                    out.push(Violation::NegativeGain {
                        entity: i,
                        affector: j,
                        matrix: "supporter",
                    });
                }
                if self.repressor_gains.get(i, j).is_negative() {
                    out.push(Violation::NegativeGain {
                        entity: i,
                        affector: j,
                        matrix: "repressor",
                    });
                }
                if self.supporter_gains.get(i, j).is_positive()
                    && self.repressor_gains.get(i, j).is_positive()
                {
                    out.push(Violation::SignConflict {
                        entity: i,
                        affector: j,
                    });
                }
            }
            if self.supporters[i].is_empty() {
                out.push(Violation::NoSupporter { entity: i });
            }
        }
        out
    }

    /// Indices of affectors whose supporter column is all-zero.
    pub fn redundant_affectors(&self) -> Vec<usize> {
        (0..self.affectors())
            .filter(|&j| (0..self.entities()).all(|i| self.supporter_gains.get(i, j).is_zero()))
            .collect()
    }

    /// Drops affectors that support nobody. Such affectors are zero in any
    /// optimal solution, so solutions of the reduced system re-expand with
    /// zeros at the removed indices.
    pub fn remove_redundant_affectors(&self) -> Result<(GainSystem, Vec<usize>)> {
        let removed = self.redundant_affectors();
        if removed.is_empty() {
            return Ok((self.clone(), removed));
        }
        let kept: Vec<usize> = (0..self.affectors())
            .filter(|j| !removed.contains(j))
            .collect();
        if kept.is_empty() {
            return Err(Error::EmptyAffectorSet);
        }
        let sys = GainSystem::from_matrices(
            self.supporter_gains.select_columns(&kept),
            self.repressor_gains.select_columns(&kept),
        );
        Ok((sys, removed))
    }

    fn from_matrices(sup: RatMatrix, rep: RatMatrix) -> GainSystem {
        let rows = |m: &RatMatrix| {
            (0..m.rows())
                .map(|i| m.row(i).to_vec())
                .collect::<Vec<_>>()
        };
        GainSystem::from_split(rows(&sup), rows(&rep)).expect("shapes agree by construction")
    }

    /// Classifies the system into one of the three families.
    pub fn classify(&self) -> Result<SystemClass> {
        let (n, m) = (self.entities(), self.affectors());
        let sizes: Vec<usize> = self.supporters.iter().map(Vec::len).collect();
        if m <= n && sizes.iter().all(|&s| s == 1) {
            return Ok(SystemClass::Square);
        }
        let twos = sizes.iter().filter(|&&s| s == 2).count();
        let ones = sizes.iter().filter(|&&s| s == 1).count();
        if m <= n + 1 && twos == 1 && ones == n - 1 {
            return Ok(SystemClass::WeaklySquare);
        }
        if m > n + 1 {
            return Ok(SystemClass::Nonsquare);
        }
        Err(Error::Unclassifiable(format!(
            "n = {n}, m = {m}, supporter multiplicities {sizes:?}"
        )))
    }

    /// Validates a selection: every assignment must pick a supporter.
    pub fn check_selection(&self, sel: &Selection) -> Result<()> {
        for (entity, affector) in sel.iter() {
            if entity >= self.entities()
                || affector >= self.affectors()
                || !self.supporters[entity].contains(&affector)
            {
                return Err(Error::NotASupporter { entity, affector });
            }
        }
        Ok(())
    }

    /// Applies a complete or partial selection.
    ///
    /// For a complete selection the result is square in canonical order:
    /// column `k` is the selected supporter column of entity `k`, so the
    /// supporter matrix is diagonal when supporter sets are disjoint. For a
    /// partial selection the result is the contracted system keeping the
    /// selected columns plus all supporters of undetermined entities, in
    /// ascending original column order.
    pub fn apply_selection(&self, sel: &Selection) -> Result<Contraction> {
        self.check_selection(sel)?;
        let n = self.entities();
        let kept: Vec<usize> = if sel.is_complete_for(n) {
            (0..n).map(|e| sel.get(e).unwrap()).collect()
        } else {
            let mut kept: Vec<usize> = sel.iter().map(|(_, a)| a).collect();
            for i in 0..n {
                if sel.get(i).is_none() {
                    kept.extend_from_slice(&self.supporters[i]);
                }
            }
            kept.sort_unstable();
            kept.dedup();
            kept
        };
        let system = GainSystem::from_matrices(
            self.supporter_gains.select_columns(&kept),
            self.repressor_gains.select_columns(&kept),
        );
        Ok(Contraction {
            system,
            kept_affectors: kept,
            source_affectors: self.affectors(),
            selection: sel.clone(),
        })
    }

    /// Total support and total repression per entity:
    /// `(supporter_gains * x, repressor_gains * x)`.
    pub fn totals(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let xr: Vec<Rat> = x.iter().map(|&v| rat_from_f64(v)).collect::<Result<_>>()?;
        let (s, r) = self.totals_exact(&xr)?;
        Ok((
            s.iter().map(rat_to_f64).collect(),
            r.iter().map(rat_to_f64).collect(),
        ))
    }

    /// Exact totals for rational vectors.
    pub fn totals_exact(&self, x: &[Rat]) -> Result<(Vec<Rat>, Vec<Rat>)> {
        Ok((
            self.supporter_gains.matvec(x)?,
            self.repressor_gains.matvec(x)?,
        ))
    }

    /// Number of complete selections, `prod |S_i|`.
    pub fn selection_count(&self) -> u128 {
        self.supporters
            .iter()
            .map(|s| s.len() as u128)
            .product()
    }

    /// Iterates every complete selection in lexicographic order by entity.
    pub fn selections(&self) -> SelectionIter<'_> {
        SelectionIter {
            system: self,
            state: vec![0; self.entities()],
            done: self.supporters.iter().any(Vec::is_empty),
        }
    }
}

/// Natural extension of a sub-solution through a selection: the selected
/// system's affectors carry their values, all other affectors are zero.
pub fn natural_extension(system: &GainSystem, sel: &Selection, sub: &[f64]) -> Result<Vec<f64>> {
    system.apply_selection(sel)?.extend(sub)
}

/// Lexicographic iterator over complete selections.
pub struct SelectionIter<'a> {
    system: &'a GainSystem,
    state: Vec<usize>,
    done: bool,
}

impl Iterator for SelectionIter<'_> {
    type Item = Selection;

    fn next(&mut self) -> Option<Selection> {
        if self.done {
            return None;
        }
        let sel = Selection::complete(
            &self
                .state
                .iter()
                .enumerate()
                .map(|(i, &k)| self.system.supporters(i)[k])
                .collect::<Vec<_>>(),
        );
        // Advance odometer, last entity fastest.
        let mut i = self.state.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.state[i] += 1;
            if self.state[i] < self.system.supporters(i).len() {
                break;
            }
            self.state[i] = 0;
        }
        if self.state.is_empty() {
            self.done = true;
        }
        Some(sel)
    }
}
