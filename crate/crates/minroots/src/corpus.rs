//! Named Coxeter systems and seeded random matrices used by tests,
//! benchmarks, and the verification suite.

use crate::system::CoxeterSystem;

/// Deterministic generator for reproducible random matrices.
#[derive(Clone)]
pub struct SplitMix64(pub u64);

impl SplitMix64 {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }
}

fn sys(rows: &[&[u32]]) -> CoxeterSystem {
    CoxeterSystem::from_orders(rows).expect("corpus matrices are valid")
}

pub fn a2() -> CoxeterSystem {
    sys(&[&[1, 3], &[3, 1]])
}

pub fn b2() -> CoxeterSystem {
    sys(&[&[1, 4], &[4, 1]])
}

pub fn g2() -> CoxeterSystem {
    sys(&[&[1, 6], &[6, 1]])
}

pub fn i2(m: u32) -> CoxeterSystem {
    sys(&[&[1, m], &[m, 1]])
}

pub fn a3() -> CoxeterSystem {
    sys(&[&[1, 3, 2], &[3, 1, 3], &[2, 3, 1]])
}

pub fn b3() -> CoxeterSystem {
    sys(&[&[1, 4, 2], &[4, 1, 3], &[2, 3, 1]])
}

pub fn h3() -> CoxeterSystem {
    sys(&[&[1, 5, 2], &[5, 1, 3], &[2, 3, 1]])
}

/// The infinite dihedral group.
pub fn affine_a1() -> CoxeterSystem {
    sys(&[&[1, 0], &[0, 1]])
}

pub fn affine_a2() -> CoxeterSystem {
    sys(&[&[1, 3, 3], &[3, 1, 3], &[3, 3, 1]])
}

pub fn affine_b2() -> CoxeterSystem {
    sys(&[&[1, 4, 2], &[4, 1, 4], &[2, 4, 1]])
}

/// The rank-3 hyperbolic group with orders {3,4,3} off the diagonal.
pub fn figure1() -> CoxeterSystem {
    sys(&[&[1, 3, 4], &[3, 1, 3], &[4, 3, 1]])
}

/// All named systems with labels.
pub fn named() -> Vec<(&'static str, CoxeterSystem)> {
    vec![
        ("a2", a2()),
        ("b2", b2()),
        ("g2", g2()),
        ("i2_7", i2(7)),
        ("a3", a3()),
        ("b3", b3()),
        ("h3", h3()),
        ("affine_a1", affine_a1()),
        ("affine_a2", affine_a2()),
        ("affine_b2", affine_b2()),
        ("figure1", figure1()),
    ]
}

/// Seeded random system with off-diagonal orders drawn uniformly from
/// {2,3,4,5}, plus infinity when `allow_infinite` is set.
pub fn random_system(rank: usize, seed: u64, allow_infinite: bool) -> CoxeterSystem {
    let mut rng = SplitMix64(seed);
    let choices: &[u32] = if allow_infinite { &[2, 3, 4, 5, 0] } else { &[2, 3, 4, 5] };
    let mut rows = vec![vec![0u32; rank]; rank];
    for i in 0..rank {
        rows[i][i] = 1;
        for j in i + 1..rank {
            let v = choices[(rng.next_u64() % choices.len() as u64) as usize];
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    let refs: Vec<&[u32]> = rows.iter().map(|r| r.as_slice()).collect();
    sys(&refs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_is_deterministic() {
        let a = random_system(4, 42, true);
        let b = random_system(4, 42, true);
        assert_eq!(a, b);
        let c = random_system(4, 43, true);
        assert_ne!(a, c);
    }
}

/// Path graph with the given consecutive edge orders (0 meaning infinity).
pub fn chain(orders: &[u32]) -> CoxeterSystem {
    let rank = orders.len() + 1;
    let mut rows = vec![vec![2u32; rank]; rank];
    for i in 0..rank {
        rows[i][i] = 1;
    }
    for (i, &m) in orders.iter().enumerate() {
        rows[i][i + 1] = m;
        rows[i + 1][i] = m;
    }
    let refs: Vec<&[u32]> = rows.iter().map(|r| r.as_slice()).collect();
    sys(&refs)
}

/// Star graph: node 0 joined to three leaves by simple links.
pub fn star3() -> CoxeterSystem {
    sys(&[
        &[1, 3, 3, 3],
        &[3, 1, 2, 2],
        &[3, 2, 1, 2],
        &[3, 2, 2, 1],
    ])
}
