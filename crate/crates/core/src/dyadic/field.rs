use alloc::vec::Vec;

use super::{DyadicCube, HalfSpaceSet};
use crate::{Error, Result};

/// One nonnegative value per Whitney cell of levels `0..=j_max`: the probe
/// maximum of whatever ratio defines a superlevel set.
///
/// Thresholding is strict, so `threshold(ε)` keeps cells whose value exceeds `ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct CellField {
    n: usize,
    values: Vec<Vec<f64>>,
}

impl CellField {
    pub fn from_levels(n: usize, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Shape("a field needs at least level 0".into()));
        }
        for (j, l) in values.iter().enumerate() {
            if l.len() != 1usize << (n * j) {
                return Err(Error::Shape(alloc::format!("field level {j} has {} cells", l.len())));
            }
            if l.iter().any(|v| !(*v >= 0.0)) {
                return Err(Error::range("field value", alloc::format!("negative or NaN entry at level {j}")));
            }
        }
        Ok(CellField { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn j_max(&self) -> u32 {
        self.values.len() as u32 - 1
    }

    pub fn level(&self, j: u32) -> &[f64] {
        &self.values[j as usize]
    }

    pub fn value(&self, cube: &DyadicCube) -> Option<f64> {
        (cube.n() == self.n && cube.level() <= self.j_max())
            .then(|| self.values[cube.level() as usize][cube.flat()])
    }

    pub fn max(&self) -> f64 {
        self.values.iter().flatten().fold(0.0f64, |m, &v| m.max(v))
    }

    /// `sup` of the field over each level.
    pub fn level_sups(&self) -> Vec<f64> {
        self.values.iter().map(|l| l.iter().fold(0.0f64, |m, &v| m.max(v))).collect()
    }

    /// Median over all cells of all levels.
    pub fn median(&self) -> f64 {
        let mut all: Vec<f64> = self.values.iter().flatten().copied().collect();
        all.sort_unstable_by(f64::total_cmp);
        let mid = all.len() / 2;
        if all.len() % 2 == 1 {
            all[mid]
        } else {
            0.5 * (all[mid - 1] + all[mid])
        }
    }

    /// Cells with value `> eps`, over levels `0..=j_max`.
    pub fn threshold(&self, eps: f64) -> HalfSpaceSet {
        self.threshold_to(eps, self.j_max())
    }

    pub fn threshold_to(&self, eps: f64, j_max: u32) -> HalfSpaceSet {
        let levels = self.values[..=j_max.min(self.j_max()) as usize]
            .iter()
            .map(|l| l.iter().map(|&v| v > eps).collect())
            .collect();
        HalfSpaceSet::from_levels(self.n, levels).expect("field levels have set shape")
    }

    pub fn scale(&self, lambda: f64) -> CellField {
        CellField {
            n: self.n,
            values: self.values.iter().map(|l| l.iter().map(|v| v * lambda.abs()).collect()).collect(),
        }
    }

    /// `(level, flat index, value)` for every cell.
    pub fn entries(&self) -> impl Iterator<Item = (u32, usize, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .flat_map(|(j, l)| l.iter().enumerate().map(move |(i, &v)| (j as u32, i, v)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_is_strict_and_monotone() {
        let f = CellField::from_levels(1, alloc::vec![alloc::vec![1.0], alloc::vec![0.5, 2.0]]).unwrap();
        assert_eq!(f.threshold(1.0).len(), 1);
        assert_eq!(f.threshold(0.0).len(), 3);
        assert!(f.threshold(2.0).is_empty());
        assert_eq!(f.max(), 2.0);
        assert_eq!(f.level_sups(), alloc::vec![1.0, 2.0]);
        assert_eq!(f.median(), 1.0);
        assert!(CellField::from_levels(1, alloc::vec![alloc::vec![-1.0]]).is_err());
        assert!(CellField::from_levels(2, alloc::vec![alloc::vec![1.0], alloc::vec![1.0; 2]]).is_err());
    }
}
