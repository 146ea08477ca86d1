//! Dense rectangular grids indexed by signed integer coordinates.

use crate::Error;

/// A dense grid addressed by `(row, col)` in the inclusive rectangle
/// `[row_lo, row_hi] x [col_lo, col_hi]`.
#[derive(Debug, Clone)]
pub struct Grid<T> {
    row_lo: i64,
    row_hi: i64,
    col_lo: i64,
    col_hi: i64,
    width: usize,
    data: Vec<T>,
}

impl<T: Clone> Grid<T> {
    pub fn new(row_lo: i64, row_hi: i64, col_lo: i64, col_hi: i64, fill: T) -> Result<Self, Error> {
        if row_lo > row_hi || col_lo > col_hi {
            return Err(Error::Config(format!(
                "degenerate grid bounds rows [{row_lo}, {row_hi}] cols [{col_lo}, {col_hi}]"
            )));
        }
        let height = (row_hi - row_lo + 1) as usize;
        let width = (col_hi - col_lo + 1) as usize;
        Ok(Grid {
            row_lo,
            row_hi,
            col_lo,
            col_hi,
            width,
            data: vec![fill; height * width],
        })
    }
}

impl<T> Grid<T> {
    #[inline]
    pub fn row_lo(&self) -> i64 {
        self.row_lo
    }

    #[inline]
    pub fn row_hi(&self) -> i64 {
        self.row_hi
    }

    #[inline]
    pub fn col_lo(&self) -> i64 {
        self.col_lo
    }

    #[inline]
    pub fn col_hi(&self) -> i64 {
        self.col_hi
    }

    #[inline]
    pub fn contains(&self, row: i64, col: i64) -> bool {
        row >= self.row_lo && row <= self.row_hi && col >= self.col_lo && col <= self.col_hi
    }

    #[inline]
    fn index(&self, row: i64, col: i64) -> usize {
        debug_assert!(self.contains(row, col));
        (row - self.row_lo) as usize * self.width + (col - self.col_lo) as usize
    }

    /// Panics if `(row, col)` is outside the grid. Use `contains` to guard.
    #[inline]
    pub fn get(&self, row: i64, col: i64) -> &T {
        assert!(
            self.contains(row, col),
            "grid access ({row}, {col}) outside rows [{}, {}] cols [{}, {}]",
            self.row_lo,
            self.row_hi,
            self.col_lo,
            self.col_hi
        );
        &self.data[self.index(row, col)]
    }

    #[inline]
    pub fn try_get(&self, row: i64, col: i64) -> Option<&T> {
        if self.contains(row, col) {
            Some(&self.data[self.index(row, col)])
        } else {
            None
        }
    }

    #[inline]
    pub fn set(&mut self, row: i64, col: i64, value: T) {
        let i = self.index(row, col);
        self.data[i] = value;
    }

    pub fn rows(&self) -> impl Iterator<Item = i64> + '_ {
        self.row_lo..=self.row_hi
    }

    pub fn cols(&self) -> impl Iterator<Item = i64> + '_ {
        self.col_lo..=self.col_hi
    }
}

impl<T: Copy> Grid<T> {
    #[inline]
    pub fn at(&self, row: i64, col: i64) -> T {
        *self.get(row, col)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signed_indexing_round_trips() {
        let mut g = Grid::new(-2, 3, -5, 5, 0u8).unwrap();
        g.set(-2, -5, 7);
        g.set(3, 5, 9);
        g.set(0, 0, 1);
        assert_eq!(g.at(-2, -5), 7);
        assert_eq!(g.at(3, 5), 9);
        assert_eq!(g.at(0, 0), 1);
        assert_eq!(g.at(1, 1), 0);
        assert!(g.contains(-2, 5));
        assert!(!g.contains(-3, 0));
        assert!(g.try_get(4, 0).is_none());
    }

    #[test]
    fn degenerate_bounds_rejected() {
        assert!(Grid::new(1, 0, 0, 0, 0u8).is_err());
        assert!(Grid::new(0, 0, 3, 2, 0u8).is_err());
    }
}
