//! Dyadic cubes of the torus, Whitney cells `T(Q) = Q × [l(Q)/2, l(Q)]`,
//! finite unions of them, the Carleson functional and hyperbolic geometry.

mod carleson;
mod field;
mod hyperbolic;

use alloc::vec::Vec;

use crate::math::exp2i;
use crate::{Error, Result};

pub use carleson::{carleson_box_value, carleson_box_value_to, carleson_sup, CarlesonReport};
pub use field::CellField;
pub use hyperbolic::{
    cell_diameter_bound, enlarge, hyperbolic_distance, HalfSpacePoint, ProximityField,
};

/// `Q = {x : 2^j x − k ∈ [0,1]^n}` on the torus, `k ∈ [0, 2^j)^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DyadicCube {
    n: u8,
    level: u32,
    index: [u32; 2],
}

impl DyadicCube {
    pub fn new(n: usize, level: u32, index: [u32; 2]) -> Result<Self> {
        if n != 1 && n != 2 {
            return Err(Error::range("dimension", alloc::format!("n = {n}")));
        }
        if level > 30 {
            return Err(Error::range("level", alloc::format!("level {level} > 30")));
        }
        let side = 1u64 << level;
        let ok = (index[0] as u64) < side && (n == 2 && (index[1] as u64) < side || n == 1 && index[1] == 0);
        if !ok {
            return Err(Error::range(
                "cube index",
                alloc::format!("{index:?} outside [0, 2^{level})^{n}"),
            ));
        }
        Ok(DyadicCube {
            n: n as u8,
            level,
            index,
        })
    }

    /// Unchecked constructor for indices produced by the crate's own loops.
    #[inline]
    pub(crate) fn raw(n: usize, level: u32, index: [u32; 2]) -> Self {
        DyadicCube {
            n: n as u8,
            level,
            index,
        }
    }

    pub fn unit(n: usize) -> Self {
        DyadicCube::raw(n, 0, [0, 0])
    }

    /// Cube at `level` from its flat per-level position (row-major for n = 2).
    pub fn from_flat(n: usize, level: u32, flat: usize) -> Self {
        let side = 1usize << level;
        if n == 1 {
            DyadicCube::raw(1, level, [flat as u32, 0])
        } else {
            DyadicCube::raw(2, level, [(flat % side) as u32, (flat / side) as u32])
        }
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    /// `τ(Q)`.
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn index(&self) -> [u32; 2] {
        self.index
    }

    pub fn flat(&self) -> usize {
        let side = 1usize << self.level;
        self.index[1] as usize * side + self.index[0] as usize
    }

    /// `l(Q) = 2^{-j}`.
    pub fn side(&self) -> f64 {
        exp2i(-(self.level as i32))
    }

    /// `|Q| = 2^{-nj}`.
    pub fn volume(&self) -> f64 {
        exp2i(-((self.n as u32 * self.level) as i32))
    }

    pub fn center(&self) -> [f64; 2] {
        let l = self.side();
        let c0 = (self.index[0] as f64 + 0.5) * l;
        if self.n == 1 {
            [c0, 0.0]
        } else {
            [c0, (self.index[1] as f64 + 0.5) * l]
        }
    }

    /// Center of the Whitney cell `T(Q)`, at height `3l(Q)/4`.
    pub fn whitney_center(&self) -> HalfSpacePoint {
        HalfSpacePoint::new(self.n(), self.center(), 0.75 * self.side())
    }

    pub fn parent(&self) -> Option<DyadicCube> {
        (self.level > 0).then(|| DyadicCube {
            n: self.n,
            level: self.level - 1,
            index: [self.index[0] / 2, self.index[1] / 2],
        })
    }

    pub fn children(&self) -> impl Iterator<Item = DyadicCube> + '_ {
        let count = if self.n == 1 { 2u32 } else { 4 };
        (0..count).map(move |c| DyadicCube {
            n: self.n,
            level: self.level + 1,
            index: [
                2 * self.index[0] + (c & 1),
                if self.n == 1 { 0 } else { 2 * self.index[1] + (c >> 1) },
            ],
        })
    }

    /// Ancestor at `level ≤ self.level`.
    pub fn ancestor(&self, level: u32) -> DyadicCube {
        debug_assert!(level <= self.level);
        let shift = self.level - level;
        DyadicCube {
            n: self.n,
            level,
            index: [self.index[0] >> shift, self.index[1] >> shift],
        }
    }

    /// Half-open range of descendant indices at `level` along each axis.
    pub fn descendant_range(&self, level: u32) -> [core::ops::Range<usize>; 2] {
        debug_assert!(level >= self.level);
        let shift = level - self.level;
        let r = |k: u32| ((k as usize) << shift)..((k as usize + 1) << shift);
        if self.n == 1 {
            [r(self.index[0]), 0..1]
        } else {
            [r(self.index[0]), r(self.index[1])]
        }
    }
}

/// `P ⊆ Q` in the dyadic tree.
pub fn cube_contains(q: &DyadicCube, p: &DyadicCube) -> bool {
    q.n == p.n && p.level >= q.level && p.ancestor(q.level) == *q
}

/// Finite union of Whitney cells with levels `0..=j_max`, stored as one
/// occupancy bitmap per level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfSpaceSet {
    n: usize,
    j_max: u32,
    levels: Vec<Vec<bool>>,
}

impl HalfSpaceSet {
    pub fn empty(n: usize, j_max: u32) -> Self {
        let levels = (0..=j_max).map(|j| alloc::vec![false; 1usize << (n as u32 * j)]).collect();
        HalfSpaceSet { n, j_max, levels }
    }

    /// Every cell of levels `0..=j_max`.
    pub fn full(n: usize, j_max: u32) -> Self {
        let levels = (0..=j_max).map(|j| alloc::vec![true; 1usize << (n as u32 * j)]).collect();
        HalfSpaceSet { n, j_max, levels }
    }

    pub fn from_predicate(n: usize, j_max: u32, mut keep: impl FnMut(DyadicCube) -> bool) -> Self {
        let mut set = HalfSpaceSet::empty(n, j_max);
        for j in 0..=j_max {
            for (flat, slot) in set.levels[j as usize].iter_mut().enumerate() {
                *slot = keep(DyadicCube::from_flat(n, j, flat));
            }
        }
        set
    }

    /// Builds a set from per-level occupancy; `levels[j]` must have `2^{nj}` entries.
    pub fn from_levels(n: usize, levels: Vec<Vec<bool>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Shape("a set needs at least level 0".into()));
        }
        for (j, l) in levels.iter().enumerate() {
            if l.len() != 1usize << (n * j) {
                return Err(Error::Shape(alloc::format!("level {j} has {} cells", l.len())));
            }
        }
        Ok(HalfSpaceSet {
            n,
            j_max: levels.len() as u32 - 1,
            levels,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn j_max(&self) -> u32 {
        self.j_max
    }

    pub fn level(&self, j: u32) -> &[bool] {
        &self.levels[j as usize]
    }

    pub fn insert(&mut self, cube: DyadicCube) -> Result<bool> {
        self.check(&cube)?;
        let slot = &mut self.levels[cube.level as usize][cube.flat()];
        let fresh = !*slot;
        *slot = true;
        Ok(fresh)
    }

    fn check(&self, cube: &DyadicCube) -> Result<()> {
        if cube.n() != self.n || cube.level > self.j_max {
            return Err(Error::Shape(alloc::format!(
                "cube (n={}, level={}) in set (n={}, j_max={})",
                cube.n(),
                cube.level,
                self.n,
                self.j_max
            )));
        }
        Ok(())
    }

    pub fn contains(&self, cube: &DyadicCube) -> bool {
        cube.n() == self.n && cube.level <= self.j_max && self.levels[cube.level as usize][cube.flat()]
    }

    pub fn len(&self) -> usize {
        self.levels.iter().map(|l| l.iter().filter(|&&b| b).count()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.iter().all(|l| l.iter().all(|&b| !b))
    }

    pub fn level_count(&self, j: u32) -> usize {
        self.levels[j as usize].iter().filter(|&&b| b).count()
    }

    /// Cells ordered by level, then flat index.
    pub fn cells(&self) -> impl Iterator<Item = DyadicCube> + '_ {
        self.levels.iter().enumerate().flat_map(move |(j, l)| {
            l.iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(move |(flat, _)| DyadicCube::from_flat(self.n, j as u32, flat))
        })
    }

    /// The same cells with levels above `j_max` dropped.
    pub fn truncate(&self, j_max: u32) -> HalfSpaceSet {
        let keep = j_max.min(self.j_max);
        HalfSpaceSet {
            n: self.n,
            j_max: keep,
            levels: self.levels[..=keep as usize].to_vec(),
        }
    }

    pub fn is_subset(&self, other: &HalfSpaceSet) -> bool {
        self.cells().all(|c| other.contains(&c))
    }

    pub fn union(&self, other: &HalfSpaceSet) -> Result<HalfSpaceSet> {
        if self.n != other.n || self.j_max != other.j_max {
            return Err(Error::Shape("union of sets with different n or j_max".into()));
        }
        let levels = self
            .levels
            .iter()
            .zip(&other.levels)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| *x || *y).collect())
            .collect();
        Ok(HalfSpaceSet {
            n: self.n,
            j_max: self.j_max,
            levels,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn containment_in_tree() {
        let q = DyadicCube::new(1, 2, [1, 0]).unwrap();
        assert!(cube_contains(&q, &q));
        for c in q.children() {
            assert!(cube_contains(&q, &c));
            assert!(!cube_contains(&c, &q));
        }
        let sibling = DyadicCube::new(1, 2, [2, 0]).unwrap();
        assert!(!cube_contains(&q, &sibling));
        let deep = DyadicCube::new(1, 6, [3 * 16 + 5, 0]).unwrap();
        assert!(cube_contains(&DyadicCube::new(1, 2, [3, 0]).unwrap(), &deep));
        assert_eq!(deep.ancestor(2).index(), [3, 0]);

        let q2 = DyadicCube::new(2, 1, [1, 0]).unwrap();
        let kids: Vec<_> = q2.children().collect();
        assert_eq!(kids.len(), 4);
        assert!(kids.iter().all(|k| cube_contains(&q2, k) && k.parent() == Some(q2)));
        assert!(!cube_contains(&q2, &DyadicCube::new(2, 2, [0, 0]).unwrap()));
    }

    #[test]
    fn cube_validation_and_geometry() {
        assert!(DyadicCube::new(1, 3, [8, 0]).is_err());
        assert!(DyadicCube::new(1, 3, [1, 1]).is_err());
        assert!(DyadicCube::new(2, 3, [7, 7]).is_ok());
        let q = DyadicCube::new(2, 3, [1, 2]).unwrap();
        assert_eq!(q.side(), 0.125);
        assert_eq!(q.volume(), 1.0 / 64.0);
        assert_eq!(q.center(), [0.1875, 0.3125]);
        assert_eq!(DyadicCube::from_flat(2, 3, q.flat()), q);
    }

    #[test]
    fn set_bookkeeping() {
        let mut a = HalfSpaceSet::empty(1, 4);
        assert!(a.is_empty());
        assert!(a.insert(DyadicCube::new(1, 2, [3, 0]).unwrap()).unwrap());
        assert!(!a.insert(DyadicCube::new(1, 2, [3, 0]).unwrap()).unwrap());
        assert!(a.insert(DyadicCube::new(1, 5, [0, 0]).unwrap()).is_err());
        assert_eq!(a.len(), 1);
        assert_eq!(HalfSpaceSet::full(1, 3).len(), 15);
        assert_eq!(HalfSpaceSet::full(2, 2).len(), 21);
        assert!(a.is_subset(&HalfSpaceSet::full(1, 4)));
        assert_eq!(a.truncate(1).len(), 0);
        let cells: Vec<_> = a.cells().collect();
        assert_eq!(cells, alloc::vec![DyadicCube::raw(1, 2, [3, 0])]);
    }
}
