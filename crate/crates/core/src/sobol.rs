//! Sobol low-discrepancy sequence with Joe-Kuo direction numbers.
//!
//! Direction numbers come from the `new-joe-kuo-6.21201` parameter set. The
//! first 64 dimensions are embedded here; the std companion crate supplies
//! the full 21201-dimension table through [`DirectionNumbers`].

use alloc::vec::Vec;

const BITS: usize = 32;

/// Source of primitive-polynomial parameters for dimensions 2 and up.
pub trait DirectionNumbers {
    /// Largest supported dimension (dimension 1 is the van der Corput
    /// sequence and needs no parameters).
    fn max_dims(&self) -> usize;

    /// `(degree, coefficient bits a, initial m_1..m_s)` for 1-based `dim >= 2`.
    fn parameters(&self, dim: usize) -> (usize, u32, &[u32]);
}

/// Dimension parameters 2..=64 of `new-joe-kuo-6.21201`, as `(s, a, m)`.
static JOE_KUO_64: [(usize, u32, &[u32]); 63] = [
    (1, 0, &[1]),
    (2, 1, &[1, 3]),
    (3, 1, &[1, 3, 1]),
    (3, 2, &[1, 1, 1]),
    (4, 1, &[1, 1, 3, 3]),
    (4, 4, &[1, 3, 5, 13]),
    (5, 2, &[1, 1, 5, 5, 17]),
    (5, 4, &[1, 1, 5, 5, 5]),
    (5, 7, &[1, 1, 7, 11, 19]),
    (5, 11, &[1, 1, 5, 1, 1]),
    (5, 13, &[1, 1, 1, 3, 11]),
    (5, 14, &[1, 3, 5, 5, 31]),
    (6, 1, &[1, 3, 3, 9, 7, 49]),
    (6, 13, &[1, 1, 1, 15, 21, 21]),
    (6, 16, &[1, 3, 1, 13, 27, 49]),
    (6, 19, &[1, 1, 1, 15, 7, 5]),
    (6, 22, &[1, 3, 1, 15, 13, 25]),
    (6, 25, &[1, 1, 5, 5, 19, 61]),
    (7, 1, &[1, 3, 7, 11, 23, 15, 103]),
    (7, 4, &[1, 3, 7, 13, 13, 15, 69]),
    (7, 7, &[1, 1, 3, 13, 7, 35, 63]),
    (7, 8, &[1, 3, 5, 9, 1, 25, 53]),
    (7, 14, &[1, 3, 1, 13, 9, 35, 107]),
    (7, 19, &[1, 3, 1, 5, 27, 61, 31]),
    (7, 21, &[1, 1, 5, 11, 19, 41, 61]),
    (7, 28, &[1, 3, 5, 3, 3, 13, 69]),
    (7, 31, &[1, 1, 7, 13, 1, 19, 1]),
    (7, 32, &[1, 3, 7, 5, 13, 19, 59]),
    (7, 37, &[1, 1, 3, 9, 25, 29, 41]),
    (7, 41, &[1, 3, 5, 13, 23, 1, 55]),
    (7, 42, &[1, 3, 7, 3, 13, 59, 17]),
    (7, 50, &[1, 3, 1, 3, 5, 53, 69]),
    (7, 55, &[1, 1, 5, 5, 23, 33, 13]),
    (7, 56, &[1, 1, 7, 7, 1, 61, 123]),
    (7, 59, &[1, 1, 7, 9, 13, 61, 49]),
    (7, 62, &[1, 3, 3, 5, 3, 55, 33]),
    (8, 14, &[1, 3, 1, 15, 31, 13, 49, 245]),
    (8, 21, &[1, 3, 5, 15, 31, 59, 63, 97]),
    (8, 22, &[1, 3, 1, 11, 11, 11, 77, 249]),
    (8, 38, &[1, 3, 1, 11, 27, 43, 71, 9]),
    (8, 47, &[1, 1, 7, 15, 21, 11, 81, 45]),
    (8, 49, &[1, 3, 7, 3, 25, 31, 65, 79]),
    (8, 50, &[1, 3, 1, 1, 19, 11, 3, 205]),
    (8, 52, &[1, 1, 5, 9, 19, 21, 29, 157]),
    (8, 56, &[1, 3, 7, 11, 1, 33, 89, 185]),
    (8, 67, &[1, 3, 3, 3, 15, 9, 79, 71]),
    (8, 70, &[1, 3, 7, 11, 15, 39, 119, 27]),
    (8, 84, &[1, 1, 3, 1, 11, 31, 97, 225]),
    (8, 97, &[1, 1, 1, 3, 23, 43, 57, 177]),
    (8, 103, &[1, 3, 7, 7, 17, 17, 37, 71]),
    (8, 115, &[1, 3, 1, 5, 27, 63, 123, 213]),
    (8, 122, &[1, 1, 3, 5, 11, 43, 53, 133]),
    (9, 8, &[1, 3, 5, 5, 29, 17, 47, 173, 479]),
    (9, 13, &[1, 3, 3, 11, 3, 1, 109, 9, 69]),
    (9, 16, &[1, 1, 1, 5, 17, 39, 23, 5, 343]),
    (9, 22, &[1, 3, 1, 5, 25, 15, 31, 103, 499]),
    (9, 25, &[1, 1, 1, 11, 11, 17, 63, 105, 183]),
    (9, 44, &[1, 1, 5, 11, 9, 29, 97, 231, 363]),
    (9, 47, &[1, 1, 5, 15, 19, 45, 41, 7, 383]),
    (9, 52, &[1, 3, 7, 7, 31, 19, 83, 137, 221]),
    (9, 55, &[1, 1, 1, 3, 23, 15, 111, 223, 83]),
    (9, 59, &[1, 1, 5, 13, 31, 15, 55, 25, 161]),
    (9, 62, &[1, 1, 3, 13, 25, 47, 39, 87, 257]),
];

/// The embedded first 64 dimensions of the Joe-Kuo D6 set.
#[derive(Debug, Clone, Copy, Default)]
pub struct EmbeddedJoeKuo;

impl DirectionNumbers for EmbeddedJoeKuo {
    fn max_dims(&self) -> usize {
        JOE_KUO_64.len() + 1
    }

    fn parameters(&self, dim: usize) -> (usize, u32, &[u32]) {
        JOE_KUO_64[dim - 2]
    }
}

fn directions(dim: usize, source: &dyn DirectionNumbers) -> [u32; BITS] {
    let mut v = [0u32; BITS];
    if dim == 1 {
        for (i, slot) in v.iter_mut().enumerate() {
            *slot = 1u32 << (BITS - 1 - i);
        }
        return v;
    }
    let (s, a, m) = source.parameters(dim);
    let s = s.min(BITS);
    for i in 0..s {
        v[i] = m[i] << (BITS - 1 - i);
    }
    for i in s..BITS {
        let mut x = v[i - s] ^ (v[i - s] >> s);
        for k in 1..s {
            if (a >> (s - 1 - k)) & 1 == 1 {
                x ^= v[i - k];
            }
        }
        v[i] = x;
    }
    v
}

/// Gray-code Sobol generator over `[0, 1)^dims`, optionally digitally
/// shifted by a per-dimension XOR mask.
#[derive(Debug, Clone)]
pub struct SobolSequence {
    dirs: Vec<[u32; BITS]>,
    state: Vec<u32>,
    shift: Vec<u32>,
    index: u64,
}

impl SobolSequence {
    /// `None` when `dims` is zero or exceeds what `source` supports.
    pub fn new(dims: usize, source: &dyn DirectionNumbers) -> Option<Self> {
        if dims == 0 || dims > source.max_dims() {
            return None;
        }
        let dirs = (1..=dims).map(|d| directions(d, source)).collect();
        Some(Self {
            dirs,
            state: alloc::vec![0; dims],
            shift: alloc::vec![0; dims],
            index: 0,
        })
    }

    /// Applies a digital shift; preserves the net structure of the sequence.
    pub fn with_digital_shift(mut self, shift: Vec<u32>) -> Self {
        assert_eq!(shift.len(), self.dirs.len());
        self.shift = shift;
        self
    }

    pub fn dims(&self) -> usize {
        self.dirs.len()
    }

    /// Writes the next point into `out`.
    pub fn next_into(&mut self, out: &mut [f64]) {
        if self.index > 0 {
            let c = self.index.trailing_zeros() as usize;
            for (x, d) in self.state.iter_mut().zip(&self.dirs) {
                *x ^= d[c];
            }
        }
        self.index += 1;
        for ((o, x), s) in out.iter_mut().zip(&self.state).zip(&self.shift) {
            *o = (x ^ s) as f64 / 4294967296.0;
        }
    }
}
