//! Discrete time regions over a finite integer timeline.
//!
//! A region is a set of instant indices. Parthood between regions is set
//! inclusion and the sum of regions is set union. Convex regions are
//! contiguous index ranges; the two ordering relations are only defined on
//! those.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::TimeError;

/// Index of an instant on the knowledge-base timeline.
pub type Instant = u32;

/// A set of instants.
///
/// Regions built through [`TimeRegion::new`] or [`TimeRegion::range`] are
/// never empty. The engine also uses this type for relation coverage, where
/// the empty set is meaningful, so `Default` yields the empty set.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TimeRegion(BTreeSet<Instant>);

impl TimeRegion {
    pub fn new<I: IntoIterator<Item = Instant>>(instants: I) -> Result<Self, TimeError> {
        let set: BTreeSet<Instant> = instants.into_iter().collect();
        if set.is_empty() {
            return Err(TimeError::Empty);
        }
        Ok(TimeRegion(set))
    }

    /// The convex region `lo..=hi`.
    pub fn range(lo: Instant, hi: Instant) -> Result<Self, TimeError> {
        if lo > hi {
            return Err(TimeError::BadRange { lo, hi });
        }
        Ok(TimeRegion((lo..=hi).collect()))
    }

    pub fn instant(i: Instant) -> Self {
        TimeRegion(BTreeSet::from([i]))
    }

    pub fn instants(&self) -> impl Iterator<Item = Instant> + '_ {
        self.0.iter().copied()
    }

    pub fn as_set(&self) -> &BTreeSet<Instant> {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, i: Instant) -> bool {
        self.0.contains(&i)
    }

    pub fn first(&self) -> Option<Instant> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Instant> {
        self.0.last().copied()
    }

    pub fn is_convex(&self) -> bool {
        match (self.first(), self.last()) {
            (Some(lo), Some(hi)) => (hi - lo) as usize + 1 == self.0.len(),
            _ => false,
        }
    }

    pub fn is_subset(&self, other: &TimeRegion) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn overlaps(&self, other: &TimeRegion) -> bool {
        !self.0.is_disjoint(&other.0)
    }

    pub fn union(&self, other: &TimeRegion) -> TimeRegion {
        TimeRegion(self.0.union(&other.0).copied().collect())
    }

    pub fn intersection(&self, other: &TimeRegion) -> TimeRegion {
        TimeRegion(self.0.intersection(&other.0).copied().collect())
    }

    pub fn difference(&self, other: &TimeRegion) -> TimeRegion {
        TimeRegion(self.0.difference(&other.0).copied().collect())
    }

    pub fn extend(&mut self, other: &TimeRegion) {
        self.0.extend(other.0.iter().copied());
    }

    pub fn remove_all(&mut self, other: &TimeRegion) {
        for i in other.instants() {
            self.0.remove(&i);
        }
    }

    /// Maximal convex runs, in ascending order.
    pub fn runs(&self) -> Vec<TimeRegion> {
        let mut out = Vec::new();
        let mut current: Option<(Instant, Instant)> = None;
        for i in self.instants() {
            current = match current {
                Some((lo, hi)) if hi + 1 == i => Some((lo, i)),
                Some((lo, hi)) => {
                    out.push(TimeRegion((lo..=hi).collect()));
                    Some((i, i))
                }
                None => Some((i, i)),
            };
        }
        if let Some((lo, hi)) = current {
            out.push(TimeRegion((lo..=hi).collect()));
        }
        out
    }
}

impl fmt::Debug for TimeRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TimeRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_convex() && self.len() > 1 {
            return write!(f, "[{}..{}]", self.first().unwrap(), self.last().unwrap());
        }
        write!(f, "{{")?;
        for (n, i) in self.instants().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// The finite timeline every region lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Timeline {
    lo: Instant,
    hi: Instant,
}

impl Timeline {
    pub fn new(lo: Instant, hi: Instant) -> Result<Self, TimeError> {
        if lo > hi {
            return Err(TimeError::BadRange { lo, hi });
        }
        Ok(Timeline { lo, hi })
    }

    /// Smallest timeline covering every region given.
    pub fn spanning<'a, I: IntoIterator<Item = &'a TimeRegion>>(regions: I) -> Option<Self> {
        let mut bounds: Option<(Instant, Instant)> = None;
        for r in regions {
            if let (Some(a), Some(b)) = (r.first(), r.last()) {
                bounds = Some(match bounds {
                    Some((lo, hi)) => (lo.min(a), hi.max(b)),
                    None => (a, b),
                });
            }
        }
        bounds.map(|(lo, hi)| Timeline { lo, hi })
    }

    pub fn bounds(&self) -> (Instant, Instant) {
        (self.lo, self.hi)
    }

    pub fn instants(&self) -> impl Iterator<Item = Instant> {
        self.lo..=self.hi
    }

    pub fn whole(&self) -> TimeRegion {
        TimeRegion((self.lo..=self.hi).collect())
    }

    /// Every convex region of the timeline, shortest first, then by start.
    pub fn convex_regions(&self) -> Vec<TimeRegion> {
        let n = self.hi - self.lo + 1;
        let mut out = Vec::with_capacity((n * (n + 1) / 2) as usize);
        for len in 1..=n {
            for start in self.lo..=(self.hi + 1 - len) {
                out.push(TimeRegion((start..start + len).collect()));
            }
        }
        out
    }
}

pub fn region_part(t1: &TimeRegion, t2: &TimeRegion) -> bool {
    t1.is_subset(t2)
}

pub fn region_sum(ts: &[TimeRegion]) -> Result<TimeRegion, TimeError> {
    if ts.is_empty() {
        return Err(TimeError::EmptySum);
    }
    let mut acc = TimeRegion::default();
    for t in ts {
        acc.extend(t);
    }
    Ok(acc)
}

fn require_convex(t: &TimeRegion) -> Result<(), TimeError> {
    if t.is_convex() {
        Ok(())
    } else {
        Err(TimeError::NotConvex(t.to_string()))
    }
}

/// `t1 < t2`: both convex, ordered and non-overlapping.
pub fn strictly_before(t1: &TimeRegion, t2: &TimeRegion) -> Result<bool, TimeError> {
    require_convex(t1)?;
    require_convex(t2)?;
    Ok(t1.last() < t2.first())
}

/// `t1 <= t2`: ordered, possibly properly overlapping. When the regions
/// overlap in `t`, the residues `t1 - t` and `t2 - t` must be nonempty and
/// strictly ordered; a region included in the other never qualifies.
pub fn weakly_before(t1: &TimeRegion, t2: &TimeRegion) -> Result<bool, TimeError> {
    if strictly_before(t1, t2)? {
        return Ok(true);
    }
    if !t1.overlaps(t2) || t1.is_subset(t2) || t2.is_subset(t1) {
        return Ok(false);
    }
    let common = t1.intersection(t2);
    let r1 = t1.difference(&common);
    let r2 = t2.difference(&common);
    if r1.is_empty() || r2.is_empty() || !r1.is_convex() || !r2.is_convex() {
        return Ok(false);
    }
    strictly_before(&r1, &r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(xs: &[u32]) -> TimeRegion {
        TimeRegion::new(xs.iter().copied()).unwrap()
    }

    #[test]
    fn part_is_inclusion() {
        assert!(region_part(&r(&[1]), &r(&[1, 2])));
        assert!(region_part(&r(&[1, 2]), &r(&[1, 2])));
        assert!(!region_part(&r(&[1, 3]), &r(&[1, 2])));
    }

    #[test]
    fn sum_is_union() {
        assert_eq!(region_sum(&[r(&[1, 2]), r(&[2, 3])]).unwrap(), r(&[1, 2, 3]));
        assert_eq!(region_sum(&[r(&[4])]).unwrap(), r(&[4]));
        assert_eq!(region_sum(&[]), Err(TimeError::EmptySum));
    }

    #[test]
    fn orderings() {
        assert!(strictly_before(&r(&[1]), &r(&[2])).unwrap());
        assert!(!strictly_before(&r(&[1]), &r(&[1])).unwrap());
        assert!(!strictly_before(&r(&[1, 2]), &r(&[2, 3])).unwrap());
        assert!(weakly_before(&r(&[1, 2, 3]), &r(&[3, 4, 5])).unwrap());
        assert!(!weakly_before(&r(&[1, 2, 3, 4]), &r(&[2, 3])).unwrap());
        assert!(!weakly_before(&r(&[2, 3]), &r(&[2, 3])).unwrap());
        assert!(weakly_before(&r(&[1]), &r(&[5])).unwrap());
        assert!(matches!(strictly_before(&r(&[1, 3]), &r(&[4])), Err(TimeError::NotConvex(_))));
    }

    #[test]
    fn runs_split_gaps() {
        assert_eq!(r(&[1, 2, 4, 6, 7]).runs(), vec![r(&[1, 2]), r(&[4]), r(&[6, 7])]);
        assert!(TimeRegion::default().runs().is_empty());
    }

    #[test]
    fn bad_range_rejected() {
        assert_eq!(TimeRegion::range(5, 3), Err(TimeError::BadRange { lo: 5, hi: 3 }));
    }

    #[test]
    fn convex_region_count_is_quadratic() {
        let tl = Timeline::new(0, 5).unwrap();
        assert_eq!(tl.convex_regions().len(), 21);
        assert!(tl.convex_regions().iter().all(TimeRegion::is_convex));
    }
}
