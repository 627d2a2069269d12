use crate::error::{Error, Result};
use crate::model::ModelParams;

/// One basis state: cell index `n`, position index `q` and the derived
/// momentum integer `j = N n - q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisIndex {
    pub n: i64,
    pub q: i64,
    pub j: i64,
    pub row: usize,
}

/// The truncated `(n, q)` grid and its flattening onto matrix rows,
/// `row = (n + n_max) Q + (q + q_max)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Basis {
    pub n_cells: i64,
    pub n_max: i64,
    pub q_max: i64,
}

impl Basis {
    pub fn new(params: &ModelParams) -> Self {
        Basis {
            n_cells: params.n_cells as i64,
            n_max: params.n_max(),
            q_max: params.q_max(),
        }
    }

    pub fn q_states(&self) -> usize {
        (2 * self.q_max + 1) as usize
    }

    pub fn j_states(&self) -> usize {
        (2 * self.n_max + 1) as usize
    }

    pub fn dim(&self) -> usize {
        self.q_states() * self.j_states()
    }

    pub fn index(&self, n: i64, q: i64) -> Result<BasisIndex> {
        if n.abs() > self.n_max || q.abs() > self.q_max {
            return Err(Error::IndexOutOfRange {
                n,
                q,
                n_max: self.n_max,
                q_max: self.q_max,
            });
        }
        let row = ((n + self.n_max) * (2 * self.q_max + 1) + (q + self.q_max)) as usize;
        Ok(BasisIndex {
            n,
            q,
            j: self.n_cells * n - q,
            row,
        })
    }

    pub fn from_row(&self, row: usize) -> Result<BasisIndex> {
        let width = self.q_states();
        if row >= self.dim() {
            return Err(Error::IndexOutOfRange {
                n: (row / width) as i64 - self.n_max,
                q: (row % width) as i64 - self.q_max,
                n_max: self.n_max,
                q_max: self.q_max,
            });
        }
        self.index(
            (row / width) as i64 - self.n_max,
            (row % width) as i64 - self.q_max,
        )
    }

    /// Whether `index` is consistent with this basis (range, `j` and `row`).
    pub fn contains(&self, index: &BasisIndex) -> bool {
        self.index(index.n, index.q).is_ok_and(|i| i == *index)
    }

    /// All basis states in row order.
    pub fn iter(&self) -> impl Iterator<Item = BasisIndex> + '_ {
        (0..self.dim()).map(move |row| self.from_row(row).expect("row in range"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flattening_is_a_bijection() {
        let basis = Basis::new(&ModelParams::desk(5, 7, 4));
        assert_eq!(basis.dim(), 35);
        let mut seen = vec![false; basis.dim()];
        for n in -basis.n_max..=basis.n_max {
            for q in -basis.q_max..=basis.q_max {
                let idx = basis.index(n, q).unwrap();
                assert_eq!(idx.j, 4 * n - q);
                assert!(!seen[idx.row]);
                seen[idx.row] = true;
                assert_eq!(basis.from_row(idx.row).unwrap(), idx);
            }
        }
        assert!(seen.into_iter().all(|s| s));
    }

    #[test]
    fn out_of_range() {
        let basis = Basis::new(&ModelParams::desk(5, 5, 2));
        assert!(matches!(
            basis.index(3, 0),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(basis.index(0, -3).is_err());
        assert!(basis.from_row(25).is_err());
    }
}
