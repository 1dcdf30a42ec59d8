use serde::{Deserialize, Serialize};

use super::{InfectionStatus, PopulationState};
use crate::error::{Error, Result};

/// Binary pooling design: one row per test, one column per individual.
///
/// Stored sparsely as the member list of each pool, since pools at the
/// population sizes of interest are short relative to `n`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TestMatrix {
    cols: usize,
    pools: Vec<Vec<usize>>,
}

impl TestMatrix {
    pub fn new(cols: usize) -> Self {
        Self {
            cols,
            pools: Vec::new(),
        }
    }

    pub fn from_dense(rows: &[Vec<bool>], cols: usize) -> Result<Self> {
        let mut m = Self::new(cols);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Shape(format!(
                    "row {r} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            m.pools.push(
                row.iter()
                    .enumerate()
                    .filter(|(_, b)| **b)
                    .map(|(j, _)| j)
                    .collect(),
            );
        }
        Ok(m)
    }

    pub fn push_pool(&mut self, members: Vec<usize>) -> Result<()> {
        if let Some(&bad) = members.iter().find(|&&j| j >= self.cols) {
            return Err(Error::Shape(format!(
                "column {bad} outside a matrix with {} columns",
                self.cols
            )));
        }
        self.pools.push(members);
        Ok(())
    }

    /// Appends a single-member row.
    pub fn push_individual(&mut self, index: usize) -> Result<()> {
        self.push_pool(vec![index])
    }

    pub fn append(&mut self, other: TestMatrix) -> Result<()> {
        if other.cols != self.cols {
            return Err(Error::Shape(format!(
                "cannot append {} columns to {}",
                other.cols, self.cols
            )));
        }
        self.pools.extend(other.pools);
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.pools.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn pool(&self, row: usize) -> &[usize] {
        &self.pools[row]
    }

    pub fn pools(&self) -> &[Vec<usize>] {
        &self.pools
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.pools[row].contains(&col)
    }

    pub fn to_dense(&self) -> Vec<Vec<bool>> {
        self.pools
            .iter()
            .map(|pool| {
                let mut row = vec![false; self.cols];
                for &j in pool {
                    row[j] = true;
                }
                row
            })
            .collect()
    }
}

/// Outcomes of the rows of a [`TestMatrix`], in row order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TestResults(pub Vec<bool>);

impl TestResults {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.0.iter().filter(|b| **b).count()
    }

    pub fn extend(&mut self, other: TestResults) {
        self.0.extend(other.0);
    }
}

/// Noiseless OR channel: a row is positive iff it pools at least one
/// currently infected individual. Isolated members count as negative.
pub fn run_tests(matrix: &TestMatrix, state: &PopulationState) -> Result<TestResults> {
    if matrix.cols() != state.len() {
        return Err(Error::Shape(format!(
            "matrix has {} columns but population has {} individuals",
            matrix.cols(),
            state.len()
        )));
    }
    let statuses = state.statuses();
    Ok(TestResults(
        matrix
            .pools()
            .iter()
            .map(|pool| {
                pool.iter()
                    .any(|&j| statuses[j] == InfectionStatus::Infected)
            })
            .collect(),
    ))
}
