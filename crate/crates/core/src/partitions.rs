//! 3D partitions: finite downward-closed sets of boxes in `Z>=0^3`, i.e. the
//! staircases of finite-colength monomial ideals in three variables.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// A box `(k1, k2, k3)`, standing for the monomial `x^k1 y^k2 z^k3`.
pub type Cell = [u32; 3];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("box {0:?} listed twice")]
    Duplicate(Cell),
    #[error("box set is not downward closed: {0:?} is missing a lower neighbour")]
    NotDownwardClosed(Cell),
}

/// An immutable 3D partition. Boxes are stored sorted, so equality and
/// hashing are by the sorted box list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition3D {
    boxes: Vec<Cell>,
}

impl Partition3D {
    pub fn empty() -> Self {
        Partition3D { boxes: Vec::new() }
    }

    pub fn new(mut boxes: Vec<Cell>) -> Result<Self, PartitionError> {
        boxes.sort_unstable();
        if let Some(w) = boxes.windows(2).find(|w| w[0] == w[1]) {
            return Err(PartitionError::Duplicate(w[0]));
        }
        if let Some(bad) = first_unsupported(&boxes) {
            return Err(PartitionError::NotDownwardClosed(bad));
        }
        Ok(Partition3D { boxes })
    }

    /// Number of boxes, i.e. the colength of the monomial ideal.
    pub fn size(&self) -> usize {
        self.boxes.len()
    }

    pub fn boxes(&self) -> &[Cell] {
        &self.boxes
    }

    pub fn contains(&self, cell: &Cell) -> bool {
        self.boxes.binary_search(cell).is_ok()
    }

    /// Applies a coordinate permutation: new coordinate `i` is old coordinate `perm[i]`.
    pub fn permute(&self, perm: [usize; 3]) -> Self {
        let mut boxes: Vec<Cell> = self
            .boxes
            .iter()
            .map(|b| [b[perm[0]], b[perm[1]], b[perm[2]]])
            .collect();
        boxes.sort_unstable();
        Partition3D { boxes }
    }

    /// Boxes that can be removed leaving a partition.
    fn removable(&self) -> impl Iterator<Item = &Cell> + '_ {
        self.boxes.iter().filter(move |b| {
            (0..3).all(|i| {
                let mut up = **b;
                up[i] += 1;
                !self.contains(&up)
            })
        })
    }

    /// Cells outside the partition whose addition keeps it downward closed.
    fn addable(&self) -> Vec<Cell> {
        let mut candidates = BTreeSet::new();
        candidates.insert([0, 0, 0]);
        for b in &self.boxes {
            for i in 0..3 {
                let mut up = *b;
                up[i] += 1;
                candidates.insert(up);
            }
        }
        candidates
            .into_iter()
            .filter(|c| !self.contains(c) && self.supports(c))
            .collect()
    }

    fn supports(&self, c: &Cell) -> bool {
        (0..3).all(|i| {
            c[i] == 0 || {
                let mut down = *c;
                down[i] -= 1;
                self.contains(&down)
            }
        })
    }

    fn with_cell(&self, c: Cell) -> Self {
        let mut boxes = self.boxes.clone();
        let pos = boxes.binary_search(&c).unwrap_err();
        boxes.insert(pos, c);
        Partition3D { boxes }
    }
}

impl fmt::Debug for Partition3D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.boxes.iter()).finish()
    }
}

fn first_unsupported(sorted: &[Cell]) -> Option<Cell> {
    sorted.iter().copied().find(|b| {
        (0..3).any(|i| {
            b[i] > 0 && {
                let mut down = *b;
                down[i] -= 1;
                sorted.binary_search(&down).is_err()
            }
        })
    })
}

/// True iff every box's lower neighbours are present. Duplicates are ignored.
pub fn is_downward_closed(boxes: &[Cell]) -> bool {
    let mut sorted = boxes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    first_unsupported(&sorted).is_none()
}

/// All partitions with exactly `n` boxes, each once, sorted by box list.
pub fn enumerate_partitions(n: usize) -> Vec<Partition3D> {
    enumerate_partitions_up_to(n).pop().unwrap()
}

/// `result[k]` holds every partition with `k` boxes, for `k = 0..=n`.
///
/// Reverse search: a partition's canonical parent is obtained by removing its
/// largest removable box, so a child is kept only when the box just added is
/// that largest removable box.
pub fn enumerate_partitions_up_to(n: usize) -> Vec<Vec<Partition3D>> {
    let mut levels = vec![vec![Partition3D::empty()]];
    for _ in 0..n {
        let prev = levels.last().unwrap();
        let mut next = Vec::new();
        for p in prev {
            for cell in p.addable() {
                let child = p.with_cell(cell);
                if child.removable().max() == Some(&cell) {
                    next.push(child);
                }
            }
        }
        next.sort_unstable();
        levels.push(next);
    }
    levels
}
