//! Lattice geometry: the ambient lattice and finite regions of sites.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the integer lattice `Z^d`.
pub type Site = Vec<i64>;

/// Spatial dimension `d` together with the single-site matrix dimension `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lattice {
    pub d: usize,
    #[serde(default = "default_site_dim")]
    pub n: usize,
}

fn default_site_dim() -> usize {
    2
}

impl Lattice {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        let lattice = Lattice { d, n };
        lattice.validate()?;
        Ok(lattice)
    }

    /// One-dimensional spin-½ chain.
    pub fn chain() -> Self {
        Lattice { d: 1, n: 2 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 1 {
            return Err(Error::InvalidLattice(format!("spatial dimension {} < 1", self.d)));
        }
        if self.n < 2 {
            return Err(Error::InvalidLattice(format!("site dimension {} < 2", self.n)));
        }
        Ok(())
    }

    pub fn origin(&self) -> Site {
        vec![0; self.d]
    }
}

impl Default for Lattice {
    fn default() -> Self {
        Lattice::chain()
    }
}

/// A finite set of lattice sites kept in lexicographic order.
///
/// The order fixes the tensor-leg order of every operator supported on the
/// region: the first site is the most significant Kronecker factor.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Region {
    sites: Vec<Site>,
}

impl Region {
    /// Build a region; rejects duplicate sites and mixed coordinate lengths.
    pub fn new<I: IntoIterator<Item = Site>>(sites: I) -> Result<Self> {
        let mut sites: Vec<Site> = sites.into_iter().collect();
        if let Some(first) = sites.first() {
            let d = first.len();
            if d == 0 {
                return Err(Error::InvalidRegion("zero-dimensional site".into()));
            }
            if sites.iter().any(|s| s.len() != d) {
                return Err(Error::InvalidRegion("sites of different dimension".into()));
            }
        }
        sites.sort();
        if sites.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidRegion("duplicate site".into()));
        }
        Ok(Region { sites })
    }

    pub fn empty() -> Self {
        Region::default()
    }

    /// Sites `start..end` of a one-dimensional chain.
    pub fn chain(range: std::ops::Range<i64>) -> Self {
        Region {
            sites: range.map(|i| vec![i]).collect(),
        }
    }

    /// `len` sites along the first axis of `Z^d`, starting at the origin.
    pub fn line(d: usize, len: usize) -> Self {
        Region {
            sites: (0..len as i64)
                .map(|i| {
                    let mut s = vec![0; d];
                    s[0] = i;
                    s
                })
                .collect(),
        }
    }

    pub fn site(site: Site) -> Self {
        Region { sites: vec![site] }
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Coordinate length of the sites, `None` for the empty region.
    pub fn dim(&self) -> Option<usize> {
        self.sites.first().map(Vec::len)
    }

    pub fn contains(&self, site: &[i64]) -> bool {
        self.position(site).is_some()
    }

    /// Index of `site` in the canonical order.
    pub fn position(&self, site: &[i64]) -> Option<usize> {
        self.sites.binary_search_by(|s| s.as_slice().cmp(site)).ok()
    }

    pub fn is_subset(&self, other: &Region) -> bool {
        self.sites.iter().all(|s| other.contains(s))
    }

    pub fn union(&self, other: &Region) -> Region {
        let set: BTreeSet<Site> = self.sites.iter().chain(other.sites.iter()).cloned().collect();
        Region {
            sites: set.into_iter().collect(),
        }
    }

    pub fn difference(&self, other: &Region) -> Region {
        Region {
            sites: self.sites.iter().filter(|s| !other.contains(s)).cloned().collect(),
        }
    }

    pub fn intersection(&self, other: &Region) -> Region {
        Region {
            sites: self.sites.iter().filter(|s| other.contains(s)).cloned().collect(),
        }
    }

    pub fn is_disjoint(&self, other: &Region) -> bool {
        self.sites.iter().all(|s| !other.contains(s))
    }

    pub fn translate(&self, offset: &[i64]) -> Region {
        // translation preserves lexicographic order
        Region {
            sites: self
                .sites
                .iter()
                .map(|s| s.iter().zip(offset).map(|(a, b)| a + b).collect())
                .collect(),
        }
    }

    /// Largest Chebyshev distance between two sites; 0 for regions of size ≤ 1.
    pub fn diameter(&self) -> u64 {
        let mut diam = 0;
        for (i, a) in self.sites.iter().enumerate() {
            for b in &self.sites[i + 1..] {
                let d = a.iter().zip(b).map(|(x, y)| x.abs_diff(*y)).max().unwrap_or(0);
                diam = diam.max(d);
            }
        }
        diam
    }

    /// Positions of `sub`'s sites inside `self`, or `None` if not a subset.
    pub(crate) fn positions_of(&self, sub: &Region) -> Option<Vec<usize>> {
        sub.sites.iter().map(|s| self.position(s)).collect()
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.sites.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if s.len() == 1 {
                write!(f, "{}", s[0])?;
            } else {
                write!(f, "(")?;
                for (k, c) in s.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")?;
            }
        }
        write!(f, "}}")
    }
}

impl Serialize for Region {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.sites.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Region {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let sites = Vec::<Site>::deserialize(deserializer)?;
        Region::new(sites).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_and_equality() {
        let a = Region::new(vec![vec![2], vec![0], vec![1]]).unwrap();
        let b = Region::chain(0..3);
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "{0, 1, 2}");
    }

    #[test]
    fn duplicates_rejected() {
        assert!(Region::new(vec![vec![0], vec![0]]).is_err());
        assert!(Region::new(vec![vec![0], vec![0, 1]]).is_err());
    }

    #[test]
    fn set_operations() {
        let a = Region::chain(0..4);
        let b = Region::chain(2..6);
        assert_eq!(a.intersection(&b), Region::chain(2..4));
        assert_eq!(a.difference(&b), Region::chain(0..2));
        assert_eq!(a.union(&b), Region::chain(0..6));
        assert!(Region::chain(1..3).is_subset(&a));
        assert!(Region::empty().is_subset(&a));
        assert_eq!(a.diameter(), 3);
        assert_eq!(a.translate(&[5]), Region::chain(5..9));
    }

    #[test]
    fn lattice_validation() {
        assert!(Lattice::new(0, 2).is_err());
        assert!(Lattice::new(1, 1).is_err());
        assert!(Lattice::new(2, 3).is_ok());
    }
}
