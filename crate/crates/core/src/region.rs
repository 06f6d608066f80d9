use crate::error::{Error, Result};

/// A subset of the points of a space, kept as sorted, deduplicated indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Region {
    ambient: usize,
    members: Vec<usize>,
}

impl Region {
    pub fn new(ambient: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        if let Some(&index) = members.last() {
            if index >= ambient {
                return Err(Error::IndexOutOfRange {
                    index,
                    len: ambient,
                });
            }
        }
        Ok(Region { ambient, members })
    }

    pub fn empty(ambient: usize) -> Self {
        Region {
            ambient,
            members: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Region {
            ambient,
            members: (0..ambient).collect(),
        }
    }

    pub fn from_mask(mask: &[bool]) -> Self {
        Region {
            ambient: mask.len(),
            members: mask
                .iter()
                .enumerate()
                .filter_map(|(i, &m)| m.then_some(i))
                .collect(),
        }
    }

    /// Number of points in the ambient space.
    pub fn ambient_len(&self) -> usize {
        self.ambient
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.members.len() == self.ambient
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.ambient];
        for &i in &self.members {
            mask[i] = true;
        }
        mask
    }

    pub fn complement(&self) -> Region {
        let mask = self.mask();
        Region {
            ambient: self.ambient,
            members: (0..self.ambient).filter(|&i| !mask[i]).collect(),
        }
    }

    pub fn is_subset(&self, other: &Region) -> bool {
        self.members.iter().all(|&i| other.contains(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorts_and_dedups() {
        let r = Region::new(5, [3, 1, 3, 0]).unwrap();
        assert_eq!(r.members(), &[0, 1, 3]);
        assert!(r.contains(3));
        assert!(!r.contains(2));
        assert_eq!(r.complement().members(), &[2, 4]);
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(
            Region::new(3, [3]),
            Err(Error::IndexOutOfRange { index: 3, len: 3 })
        ));
    }
}
