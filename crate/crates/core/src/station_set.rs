use std::fmt;

/// Upper bound on the number of vertices (start included) an instance may hold.
pub const MAX_STATIONS: usize = 256;

const WORDS: usize = MAX_STATIONS / 64;

/// Fixed-width bitset over dense station ids. Copyable so labels carry it inline.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct StationSet([u64; WORDS]);

impl StationSet {
    pub const fn empty() -> Self {
        StationSet([0; WORDS])
    }

    #[inline]
    pub fn insert(&mut self, id: usize) {
        self.0[id >> 6] |= 1 << (id & 63);
    }

    #[inline]
    pub fn remove(&mut self, id: usize) {
        self.0[id >> 6] &= !(1 << (id & 63));
    }

    #[inline]
    pub fn contains(&self, id: usize) -> bool {
        self.0[id >> 6] & (1 << (id & 63)) != 0
    }

    #[inline]
    pub fn is_subset(&self, other: &StationSet) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a & !b == 0)
    }

    #[inline]
    pub fn union(&self, other: &StationSet) -> StationSet {
        let mut out = *self;
        for (o, b) in out.0.iter_mut().zip(other.0.iter()) {
            *o |= b;
        }
        out
    }

    #[inline]
    pub fn intersection(&self, other: &StationSet) -> StationSet {
        let mut out = *self;
        for (o, b) in out.0.iter_mut().zip(other.0.iter()) {
            *o &= b;
        }
        out
    }

    #[inline]
    pub fn difference(&self, other: &StationSet) -> StationSet {
        let mut out = *self;
        for (o, b) in out.0.iter_mut().zip(other.0.iter()) {
            *o &= !b;
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + bit)
            })
        })
    }
}

impl FromIterator<usize> for StationSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = StationSet::empty();
        for id in iter {
            s.insert(id);
        }
        s
    }
}

impl fmt::Debug for StationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
