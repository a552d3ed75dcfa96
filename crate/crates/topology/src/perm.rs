//! Permutations of the four vertices of a tetrahedron.

use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm4([u8; 4]);

/// All 24 permutations in lexicographic order of their images.
pub const ALL: [Perm4; 24] = {
    let mut out = [Perm4([0, 1, 2, 3]); 24];
    let mut k = 0;
    let mut a = 0;
    while a < 4 {
        let mut b = 0;
        while b < 4 {
            let mut c = 0;
            while c < 4 {
                if a != b && a != c && b != c {
                    out[k] = Perm4([a, b, c, 6 - a - b - c]);
                    k += 1;
                }
                c += 1;
            }
            b += 1;
        }
        a += 1;
    }
    out
};

impl Perm4 {
    pub const IDENTITY: Perm4 = Perm4([0, 1, 2, 3]);

    /// Fails unless `images` is a permutation of `0..4`.
    pub fn new(images: [u8; 4]) -> Option<Self> {
        let mut seen = [false; 4];
        for &x in &images {
            if x > 3 || seen[x as usize] {
                return None;
            }
            seen[x as usize] = true;
        }
        Some(Perm4(images))
    }

    pub fn images(&self) -> [u8; 4] {
        self.0
    }

    #[inline]
    pub fn apply(&self, i: u8) -> u8 {
        self.0[i as usize]
    }

    pub fn inverse(&self) -> Perm4 {
        let mut out = [0u8; 4];
        for i in 0..4 {
            out[self.0[i] as usize] = i as u8;
        }
        Perm4(out)
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Perm4) -> Perm4 {
        Perm4([self.0[other.0[0] as usize], self.0[other.0[1] as usize], self.0[other.0[2] as usize], self.0[other.0[3] as usize]])
    }

    pub fn transposition(i: u8, j: u8) -> Perm4 {
        let mut p = [0, 1, 2, 3];
        p.swap(i as usize, j as usize);
        Perm4(p)
    }

    pub fn is_even(&self) -> bool {
        let mut inversions = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                if self.0[i] > self.0[j] {
                    inversions += 1;
                }
            }
        }
        inversions % 2 == 0
    }

    /// Position in [`ALL`].
    pub fn index(&self) -> usize {
        let p = self.0;
        let mut idx = 0;
        let mut fact = 6;
        for i in 0..3 {
            let smaller = (i + 1..4).filter(|&j| p[j] < p[i]).count();
            idx += smaller * fact;
            fact /= 3 - i;
        }
        idx
    }

    pub fn from_index(i: usize) -> Perm4 {
        ALL[i]
    }
}

impl fmt::Debug for Perm4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}{}", self.0[0], self.0[1], self.0[2], self.0[3])
    }
}
