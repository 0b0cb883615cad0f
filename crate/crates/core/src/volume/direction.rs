use std::fmt;

use nalgebra::Vector3;

/// sin(pi/8): a measurement belongs to every direction whose correspondence weight exceeds it.
pub const DIRECTION_THRESHOLD: f64 = 0.382_683_432_365_089_8;

/// One of the six signed coordinate axes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Direction {
    XPos = 0,
    XNeg = 1,
    YPos = 2,
    YNeg = 3,
    ZPos = 4,
    ZNeg = 5,
}

impl Direction {
    pub const ALL: [Direction; 6] = [
        Direction::XPos,
        Direction::XNeg,
        Direction::YPos,
        Direction::YNeg,
        Direction::ZPos,
        Direction::ZNeg,
    ];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Direction> {
        Self::ALL.get(index).copied()
    }

    /// Coordinate axis (0 = x, 1 = y, 2 = z).
    #[inline]
    pub fn axis(self) -> usize {
        self.index() / 2
    }

    #[inline]
    pub fn sign(self) -> f64 {
        if self.index().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    pub fn vector(self) -> Vector3<f64> {
        let mut v = Vector3::zeros();
        v[self.axis()] = self.sign();
        v
    }

    pub fn opposite(self) -> Direction {
        Self::ALL[self.index() ^ 1]
    }

    pub fn name(self) -> &'static str {
        ["X+", "X-", "Y+", "Y-", "Z+", "Z-"][self.index()]
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Direction-correspondence weight `<n, v_D>`.
///
/// `v_D` has a single non-zero component, so this is exactly the signed component of `n`.
#[inline]
pub fn direction_weight(normal: &Vector3<f64>, direction: Direction) -> f64 {
    normal[direction.axis()] * direction.sign()
}

/// Directions whose correspondence weight is strictly above sin(pi/8).
pub fn applicable_directions(normal: &Vector3<f64>) -> DirectionSet {
    applicable_directions_with(normal, DIRECTION_THRESHOLD)
}

pub fn applicable_directions_with(normal: &Vector3<f64>, threshold: f64) -> DirectionSet {
    let mut set = DirectionSet::EMPTY;
    for d in Direction::ALL {
        if direction_weight(normal, d) > threshold {
            set.insert(d);
        }
    }
    set
}

/// Bit set over [`Direction`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct DirectionSet(u8);

impl DirectionSet {
    pub const EMPTY: DirectionSet = DirectionSet(0);
    pub const FULL: DirectionSet = DirectionSet(0b11_1111);

    pub fn from_bits(bits: u8) -> DirectionSet {
        DirectionSet(bits & Self::FULL.0)
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn insert(&mut self, d: Direction) {
        self.0 |= 1 << d.index();
    }

    pub fn contains(self, d: Direction) -> bool {
        self.0 & (1 << d.index()) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Direction> {
        Direction::ALL.into_iter().filter(move |d| self.contains(*d))
    }
}

impl FromIterator<Direction> for DirectionSet {
    fn from_iter<I: IntoIterator<Item = Direction>>(iter: I) -> Self {
        let mut set = DirectionSet::EMPTY;
        for d in iter {
            set.insert(d);
        }
        set
    }
}
