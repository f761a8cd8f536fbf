//! Small square matrices over GF(2), up to 128x128.
//!
//! A matrix is a slice of rows; bit `c` of `rows[r]` is entry `(r, c)`.
//! Vectors multiply from the left: `x * M = XOR of rows[r] for set bits r of x`.

/// `x * M`.
pub fn vec_mul(x: u128, rows: &[u128]) -> u128 {
    let mut acc = 0;
    let mut bits = x;
    while bits != 0 {
        let r = bits.trailing_zeros() as usize;
        acc ^= rows[r];
        bits &= bits - 1;
    }
    acc
}

/// Row echelon basis with combination tracking.
///
/// `pivots[b]` holds a vector whose highest set bit is `b`, together with
/// the set of input rows XORed to produce it.
struct Echelon {
    pivots: Vec<Option<(u128, u128)>>,
}

impl Echelon {
    fn new() -> Self {
        Self { pivots: vec![None; 128] }
    }

    /// Reduces `(v, combo)` against the current pivots, top bit first.
    fn reduce(&self, mut v: u128, mut combo: u128) -> (u128, u128) {
        while v != 0 {
            let top = 127 - v.leading_zeros() as usize;
            match self.pivots[top] {
                Some((pv, pc)) => {
                    v ^= pv;
                    combo ^= pc;
                }
                None => break,
            }
        }
        (v, combo)
    }

    /// Inserts a row. Returns false if it was dependent on earlier rows.
    fn insert(&mut self, v: u128, combo: u128) -> bool {
        let (v, combo) = self.reduce(v, combo);
        if v == 0 {
            return false;
        }
        let top = 127 - v.leading_zeros() as usize;
        self.pivots[top] = Some((v, combo));
        true
    }

    /// Fully reduces `v`, including bits below unmatched positions.
    fn reduce_fully(&self, mut v: u128, mut combo: u128) -> (u128, u128) {
        for b in (0..128).rev() {
            if (v >> b) & 1 == 1 {
                if let Some((pv, pc)) = self.pivots[b] {
                    v ^= pv;
                    combo ^= pc;
                }
            }
        }
        (v, combo)
    }
}

fn echelon(rows: &[u128]) -> (Echelon, usize) {
    assert!(rows.len() <= 128);
    let mut e = Echelon::new();
    let mut rank = 0;
    for (r, &v) in rows.iter().enumerate() {
        if e.insert(v, 1u128 << r) {
            rank += 1;
        }
    }
    (e, rank)
}

pub fn rank(rows: &[u128]) -> usize {
    echelon(rows).1
}

/// Finds some `x` with `x * M = target`, or `None` if `target` is outside
/// the row space.
pub fn solve(rows: &[u128], target: u128) -> Option<u128> {
    let (e, _) = echelon(rows);
    let (rest, combo) = e.reduce_fully(target, 0);
    (rest == 0).then_some(combo)
}

/// Inverse of an `n x n` matrix, or `None` if singular.
pub fn invert(rows: &[u128]) -> Option<Vec<u128>> {
    let n = rows.len();
    let (e, rank) = echelon(rows);
    if rank < n {
        return None;
    }
    // Row k of the inverse is the combination of input rows that yields e_k.
    (0..n)
        .map(|k| {
            let (rest, combo) = e.reduce_fully(1u128 << k, 0);
            (rest == 0).then_some(combo)
        })
        .collect()
}

/// Row-space matrix product `A * B` for square matrices.
pub fn mat_mul(a: &[u128], b: &[u128]) -> Vec<u128> {
    a.iter().map(|&row| vec_mul(row, b)).collect()
}
