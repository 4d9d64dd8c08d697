//! Horizon-relative limsup and liminf of pool-restricted theories.
//!
//! For a row `t_1..t_N` and window `w`, the admissible starting indices are
//! `1..=max(N - w, 1)`. A row is in the limsup when every admissible start is
//! followed by a true cell, and in the liminf when some admissible start is
//! followed only by true cells. Oracle rows are classified from their
//! declared eventual behavior instead.

use thiserror::Error;

use crate::eval::{EventualBehavior, Provenance, TruthMatrix};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LimitError {
    #[error("window {window} must be smaller than the horizon {horizon}")]
    WindowTooLarge { window: usize, horizon: usize },
    #[error("window must be at least 1")]
    ZeroWindow,
    #[error("the sentence pool is not closed under negation")]
    NotNegationClosed,
    #[error("the matrix has no columns")]
    Empty,
}

/// The default window `ceil(N / 4)`.
pub fn default_window(horizon: usize) -> usize {
    horizon.div_ceil(4).max(1)
}

fn last_start(n: usize, w: usize) -> usize {
    n.saturating_sub(w).max(1)
}

/// Cofinal truth within the observed horizon.
pub fn limsup_member(row: &[bool], w: usize) -> bool {
    let start = last_start(row.len(), w);
    row.get(start - 1..).is_some_and(|tail| tail.iter().any(|&b| b))
}

/// Eventual truth within the observed horizon.
pub fn liminf_member(row: &[bool], w: usize) -> bool {
    let start = last_start(row.len(), w);
    // The latest true-run start: one past the last false cell.
    let run_start = row.iter().rposition(|&b| !b).map_or(1, |i| i + 2);
    run_start <= start && run_start <= row.len()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    InLiminf,
    InLimsupOnly,
    OutsideLimsup,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::InLiminf => "in-liminf",
            Classification::InLimsupOnly => "in-limsup-only",
            Classification::OutsideLimsup => "outside-limsup",
        }
    }

    pub fn in_limsup(self) -> bool {
        self != Classification::OutsideLimsup
    }

    pub fn in_liminf(self) -> bool {
        self == Classification::InLiminf
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exactness {
    HorizonRelative,
    OracleExact,
}

impl Exactness {
    pub fn as_str(self) -> &'static str {
        match self {
            Exactness::HorizonRelative => "horizon-relative",
            Exactness::OracleExact => "oracle-exact",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowReport {
    pub label: String,
    pub classification: Classification,
    pub exactness: Exactness,
    /// For rows outside the liminf: the 1-based indices where the truth value
    /// changes, i.e. `t_n != t_{n-1}`.
    pub oscillations: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitReport {
    pub source: String,
    pub horizon: usize,
    pub window: usize,
    pub rows: Vec<RowReport>,
    pub limit_exists: bool,
}

impl LimitReport {
    pub fn classification(&self, row: usize) -> Classification {
        self.rows[row].classification
    }

    pub fn limsup_only(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().enumerate().filter(|(_, r)| r.classification == Classification::InLimsupOnly).map(|(i, _)| i)
    }

    /// Whether any row's verdict is only horizon-relative.
    pub fn is_horizon_relative(&self) -> bool {
        self.rows.iter().any(|r| r.exactness == Exactness::HorizonRelative)
    }
}

fn change_points(row: &[bool]) -> Vec<usize> {
    (1..row.len()).filter(|&i| row[i] != row[i - 1]).map(|i| i + 1).collect()
}

fn check_window(horizon: usize, w: usize) -> Result<(), LimitError> {
    if horizon == 0 {
        return Err(LimitError::Empty);
    }
    if w == 0 {
        return Err(LimitError::ZeroWindow);
    }
    if horizon > 1 && w >= horizon {
        return Err(LimitError::WindowTooLarge { window: w, horizon });
    }
    Ok(())
}

/// Classifies every row of `matrix`.
pub fn limit_report(matrix: &TruthMatrix, w: usize) -> Result<LimitReport, LimitError> {
    check_window(matrix.horizon, w)?;
    let rows: Vec<RowReport> = matrix
        .rows
        .iter()
        .map(|row| {
            let (classification, exactness) = match &row.eventual {
                Some(EventualBehavior::TrueFrom(_)) => (Classification::InLiminf, Exactness::OracleExact),
                Some(EventualBehavior::FalseFrom(_)) => (Classification::OutsideLimsup, Exactness::OracleExact),
                Some(EventualBehavior::Oscillating(_)) => (Classification::InLimsupOnly, Exactness::OracleExact),
                None => {
                    let c = if liminf_member(&row.cells, w) {
                        Classification::InLiminf
                    } else if limsup_member(&row.cells, w) {
                        Classification::InLimsupOnly
                    } else {
                        Classification::OutsideLimsup
                    };
                    (c, Exactness::HorizonRelative)
                }
            };
            let oscillations = if classification.in_liminf() { Vec::new() } else { change_points(&row.cells) };
            RowReport { label: row.label.clone(), classification, exactness, oscillations }
        })
        .collect();
    let limit_exists = rows.iter().all(|r| r.classification != Classification::InLimsupOnly);
    Ok(LimitReport { source: matrix.source.clone(), horizon: matrix.horizon, window: w, rows, limit_exists })
}

/// Outcome of one clause, with a witnessing pair `(θ, ¬θ)` of row indices
/// when it fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub holds: bool,
    pub counterexample: Option<(usize, usize)>,
}

impl Clause {
    fn from_failure(failure: Option<(usize, usize)>) -> Self {
        Clause { holds: failure.is_none(), counterexample: failure }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceReport {
    /// Every column contains exactly one of each negation pair.
    pub columns_are_theories: Clause,
    pub liminf_consistent: Clause,
    pub limsup_complete: Clause,
    pub limsup_consistent: Clause,
    pub liminf_complete: Clause,
    pub limit_exists: bool,
}

impl EquivalenceReport {
    /// liminf consistent and limsup complete.
    pub fn first_part_holds(&self) -> bool {
        self.liminf_consistent.holds && self.limsup_complete.holds
    }

    /// limsup consistent, liminf complete and limit existence agree.
    pub fn equivalence_holds(&self) -> bool {
        self.limsup_consistent.holds == self.liminf_complete.holds && self.liminf_complete.holds == self.limit_exists
    }

    pub fn passes(&self) -> bool {
        self.columns_are_theories.holds && self.first_part_holds() && self.equivalence_holds()
    }
}

/// Checks the pool-relative consistency and completeness relations between
/// liminf, limsup and limit existence.
pub fn check_section2_equivalences(matrix: &TruthMatrix, w: usize) -> Result<EquivalenceReport, LimitError> {
    let partners = matrix.partners.as_ref().ok_or(LimitError::NotNegationClosed)?;
    let report = limit_report(matrix, w)?;
    let pairs: Vec<(usize, usize)> =
        (0..partners.len()).filter(|&i| i < partners[i]).map(|i| (i, partners[i])).collect();
    let find = |bad: &dyn Fn(usize, usize) -> bool| pairs.iter().copied().find(|&(i, j)| bad(i, j));

    let columns = find(&|i, j| {
        let (a, b) = (&matrix.rows[i].cells, &matrix.rows[j].cells);
        a.iter().zip(b).any(|(x, y)| x == y)
    });
    let c = |i: usize| report.rows[i].classification;
    Ok(EquivalenceReport {
        columns_are_theories: Clause::from_failure(columns),
        liminf_consistent: Clause::from_failure(find(&|i, j| c(i).in_liminf() && c(j).in_liminf())),
        limsup_complete: Clause::from_failure(find(&|i, j| !c(i).in_limsup() && !c(j).in_limsup())),
        limsup_consistent: Clause::from_failure(find(&|i, j| c(i).in_limsup() && c(j).in_limsup())),
        liminf_complete: Clause::from_failure(find(&|i, j| !c(i).in_liminf() && !c(j).in_liminf())),
        limit_exists: report.limit_exists,
    })
}

/// Refines `1..=N` row by row, keeping the larger truth class of each row
/// (ties go to `true`), so every row is constant along the result.
pub fn extract_convergent_subchain(matrix: &TruthMatrix) -> Vec<usize> {
    let mut indices: Vec<usize> = (1..=matrix.horizon).collect();
    if let Some(partners) = &matrix.partners {
        for (i, row) in matrix.rows.iter().enumerate() {
            let partner = &matrix.rows[partners[i]];
            let concrete = row.provenance.iter().chain(&partner.provenance).all(|p| *p == Provenance::Evaluated);
            if concrete {
                // No index may have both or neither of a negation pair.
                debug_assert!(row.cells.iter().zip(&partner.cells).all(|(a, b)| a != b));
            }
        }
    }
    for row in &matrix.rows {
        let (yes, no): (Vec<usize>, Vec<usize>) = indices.iter().partition(|&&n| row.cells[n - 1]);
        indices = if yes.len() >= no.len() { yes } else { no };
    }
    indices
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::Row;

    fn row(text: &str) -> Vec<bool> {
        text.split(',').map(|c| c.trim() == "T").collect()
    }

    fn matrix(rows: &[&str], partners: Option<Vec<usize>>) -> TruthMatrix {
        let rows: Vec<Row> = rows
            .iter()
            .map(|r| {
                let cells = row(r);
                Row {
                    label: r.to_string(),
                    sentence: None,
                    provenance: vec![Provenance::Evaluated; cells.len()],
                    cells,
                    eventual: None,
                }
            })
            .collect();
        TruthMatrix { source: "test".into(), horizon: rows[0].cells.len(), rows, partners }
    }

    #[test]
    fn membership_examples() {
        assert!(limsup_member(&row("F,T,F,T,F,T"), 2));
        assert!(limsup_member(&row("T,T,T,T"), 2));
        assert!(!limsup_member(&row("T,T,F,F,F,F"), 2));
        assert!(!liminf_member(&row("F,T,F,T,F,T"), 2));
        assert!(liminf_member(&row("F,F,T,T,T,T"), 2));
        assert!(!liminf_member(&row("F,F,F,F"), 2));
        // The true run must start at or before N - w.
        assert!(!liminf_member(&row("F,F,F,F,F,T"), 2));
        assert!(liminf_member(&row("F,F,F,T,T,T"), 2));
        assert!(!liminf_member(&row("F,F,F,T,T,T"), 3));
    }

    #[test]
    fn oscillating_pair_has_no_limit() {
        let m = matrix(&["F,T,F,T,F,T", "T,F,T,F,T,F"], Some(vec![1, 0]));
        let report = limit_report(&m, 2).unwrap();
        assert!(!report.limit_exists);
        assert_eq!(report.classification(0), Classification::InLimsupOnly);
        assert_eq!(report.rows[0].oscillations, vec![2, 3, 4, 5, 6]);
        let eq = check_section2_equivalences(&m, 2).unwrap();
        assert!(eq.passes());
        assert!(!eq.limsup_consistent.holds && !eq.liminf_complete.holds);
        assert_eq!(eq.limsup_consistent.counterexample, Some((0, 1)));
    }

    #[test]
    fn single_member_chain() {
        let m = matrix(&["T", "F"], Some(vec![1, 0]));
        let report = limit_report(&m, 1).unwrap();
        assert!(report.limit_exists);
        assert_eq!(report.classification(0), Classification::InLiminf);
        assert_eq!(report.classification(1), Classification::OutsideLimsup);
    }

    #[test]
    fn window_errors() {
        let m = matrix(&["T,T,T"], None);
        assert_eq!(limit_report(&m, 3), Err(LimitError::WindowTooLarge { window: 3, horizon: 3 }));
        assert_eq!(limit_report(&m, 0), Err(LimitError::ZeroWindow));
        assert_eq!(check_section2_equivalences(&m, 1), Err(LimitError::NotNegationClosed));
        assert_eq!(default_window(20), 5);
        assert_eq!(default_window(1), 1);
    }

    #[test]
    fn oracle_rows_ignore_the_window() {
        let mut m = matrix(&["F,F,F,F"], None);
        m.rows[0].eventual = Some(EventualBehavior::TrueFrom(9));
        let report = limit_report(&m, 1).unwrap();
        assert_eq!(report.rows[0].classification, Classification::InLiminf);
        assert_eq!(report.rows[0].exactness, Exactness::OracleExact);
    }

    #[test]
    fn subchain_examples() {
        let alternating = matrix(&["F,T,F,T,F,T,F,T", "T,F,T,F,T,F,T,F"], Some(vec![1, 0]));
        assert_eq!(extract_convergent_subchain(&alternating), vec![2, 4, 6, 8]);
        let constant = matrix(&["T,T,T"], None);
        assert_eq!(extract_convergent_subchain(&constant), vec![1, 2, 3]);
        let early = matrix(&["T,F,F,F,F"], None);
        assert_eq!(extract_convergent_subchain(&early), vec![2, 3, 4, 5]);
    }
}
