//! Coxeter matrix model: validation, graph queries, base ring level.

use crate::bitset::GenSet;
use crate::error::ParseError;
use std::fmt;

/// Index of a generator, `0..rank`.  The total order on generators used by
/// normal forms everywhere downstream is this index order.
pub type GeneratorId = usize;

/// An entry of the Coxeter matrix: either a finite order or infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Order {
    Finite(u32),
    Infinite,
}

impl Order {
    pub fn finite(self) -> Option<u32> {
        match self {
            Order::Finite(m) => Some(m),
            Order::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Order::Infinite)
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(m) => write!(f, "{m}"),
            Order::Infinite => write!(f, "inf"),
        }
    }
}

/// A validated Coxeter system: the rank and the symmetric matrix of orders
/// `m[i][j]`, with `m[i][i] = 1` and `m[i][j] >= 2` off the diagonal.
///
/// Immutable after construction; generator order is input order and is
/// never permuted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoxeterSystem {
    rank: usize,
    m: Vec<Order>,
    neighbors: Vec<GenSet>,
}

/// Generator indices go into `u128` bitsets, so rank is capped there.
pub const MAX_RANK: usize = 128;

impl CoxeterSystem {
    /// Validate a matrix of orders and build the system.
    pub fn new(rank: usize, m: Vec<Vec<Order>>) -> Result<Self, ParseError> {
        if rank == 0 {
            return Err(ParseError::other("rank must be positive"));
        }
        if rank > MAX_RANK {
            return Err(ParseError::other(format!("rank {rank} exceeds supported maximum {MAX_RANK}")));
        }
        if m.len() != rank || m.iter().any(|row| row.len() != rank) {
            return Err(ParseError::other(format!("matrix must be {rank}x{rank}")));
        }
        let mut flat = Vec::with_capacity(rank * rank);
        for (i, row) in m.iter().enumerate() {
            for (j, &mij) in row.iter().enumerate() {
                if i == j && mij != Order::Finite(1) {
                    return Err(ParseError::BadEntry {
                        row: i + 1,
                        col: j + 1,
                        msg: format!("diagonal entry must be 1, found {mij}"),
                    });
                }
                if i != j {
                    if let Order::Finite(v) = mij {
                        if v < 2 {
                            return Err(ParseError::BadEntry {
                                row: i + 1,
                                col: j + 1,
                                msg: format!("off-diagonal entry must be at least 2, found {v}"),
                            });
                        }
                    }
                    if mij != m[j][i] {
                        return Err(ParseError::NotSymmetric {
                            row: i + 1,
                            col: j + 1,
                            a: mij.to_string(),
                            b: m[j][i].to_string(),
                        });
                    }
                }
                flat.push(mij);
            }
        }
        let mut neighbors = vec![GenSet::EMPTY; rank];
        for i in 0..rank {
            for j in 0..rank {
                if i != j {
                    let linked = match flat[i * rank + j] {
                        Order::Finite(v) => v >= 3,
                        Order::Infinite => true,
                    };
                    if linked {
                        neighbors[i].insert(j);
                    }
                }
            }
        }
        Ok(CoxeterSystem { rank, m: flat, neighbors })
    }

    /// Convenience constructor from plain integers, with 0 meaning infinity.
    pub fn from_orders(rows: &[&[u32]]) -> Result<Self, ParseError> {
        let rank = rows.len();
        let m = rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&v| if v == 0 { Order::Infinite } else { Order::Finite(v) })
                    .collect()
            })
            .collect();
        CoxeterSystem::new(rank, m)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn order(&self, s: GeneratorId, t: GeneratorId) -> Order {
        self.m[s * self.rank + t]
    }

    /// Generators `t != s` with `m[s][t] >= 3`, i.e. exactly those whose
    /// simple root has nonzero inner product with that of `s`.
    pub fn neighbors(&self, s: GeneratorId) -> GenSet {
        self.neighbors[s]
    }

    /// Level of the common base ring: the lcm of the finite orders that are
    /// at least 3.  When there are none the level is 3, whose ring
    /// degenerates to the integers.  Orders equal to 2 contribute a zero
    /// inner product and never require ring arithmetic.
    pub fn base_level(&self) -> u32 {
        let mut l: u64 = 1;
        for i in 0..self.rank {
            for j in i + 1..self.rank {
                if let Order::Finite(m) = self.order(i, j) {
                    if m >= 3 {
                        l = lcm(l, m as u64);
                    }
                }
            }
        }
        if l == 1 {
            3
        } else {
            l as u32
        }
    }

    /// Parse the matrix file format: first non-comment line is the rank,
    /// then one row of whitespace-separated order tokens per line.  The
    /// tokens `inf` and `0` both denote infinity; lines starting with `#`
    /// are ignored.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(n, l)| (n + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line_no, rank_line) = lines
            .next()
            .ok_or_else(|| ParseError::other("empty matrix file"))?;
        let rank: usize = rank_line.parse().map_err(|_| ParseError::Malformed {
            line: line_no,
            msg: format!("expected rank, found {rank_line:?}"),
        })?;
        if rank == 0 {
            return Err(ParseError::Malformed { line: line_no, msg: "rank must be positive".into() });
        }
        let mut rows: Vec<Vec<Order>> = Vec::with_capacity(rank);
        for i in 0..rank {
            let (line_no, row_line) = lines.next().ok_or_else(|| ParseError::Malformed {
                line: line_no,
                msg: format!("expected {rank} matrix rows, found {i}"),
            })?;
            let mut row = Vec::with_capacity(rank);
            for (j, tok) in row_line.split_whitespace().enumerate() {
                let entry = match tok {
                    "inf" | "0" => Order::Infinite,
                    _ => {
                        let v: u32 = tok.parse().map_err(|_| ParseError::BadEntry {
                            row: i + 1,
                            col: j + 1,
                            msg: format!("malformed order token {tok:?}"),
                        })?;
                        Order::Finite(v)
                    }
                };
                row.push(entry);
            }
            if row.len() != rank {
                return Err(ParseError::Malformed {
                    line: line_no,
                    msg: format!("row {} has {} entries, expected {rank}", i + 1, row.len()),
                });
            }
            rows.push(row);
        }
        CoxeterSystem::new(rank, rows)
    }

    /// Inverse of [`CoxeterSystem::parse`].
    pub fn serialize(&self) -> String {
        let mut out = format!("{}\n", self.rank);
        for i in 0..self.rank {
            let row: Vec<String> = (0..self.rank).map(|j| self.order(i, j).to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_a2() {
        let sys = CoxeterSystem::parse("2\n1 3\n3 1\n").unwrap();
        assert_eq!(sys.rank(), 2);
        assert_eq!(sys.order(0, 1), Order::Finite(3));
        assert_eq!(sys.base_level(), 3);
    }

    #[test]
    fn parse_figure1() {
        let sys = CoxeterSystem::parse("3\n1 3 4\n3 1 3\n4 3 1\n").unwrap();
        assert_eq!(sys.rank(), 3);
        assert_eq!(sys.neighbors(0).iter().collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(sys.base_level(), 12);
    }

    #[test]
    fn parse_rejects_bad_offdiagonal() {
        let err = CoxeterSystem::parse("2\n1 1\n1 1\n").unwrap_err();
        assert!(matches!(err, ParseError::BadEntry { row: 1, col: 2, .. }), "{err:?}");
    }

    #[test]
    fn parse_rejects_asymmetry_and_diagonal() {
        assert!(CoxeterSystem::parse("2\n1 3\n4 1\n").is_err());
        assert!(CoxeterSystem::parse("2\n2 3\n3 1\n").is_err());
        assert!(CoxeterSystem::parse("2\n1 x\n3 1\n").is_err());
    }

    #[test]
    fn infinity_tokens() {
        let a = CoxeterSystem::parse("2\n1 inf\ninf 1\n").unwrap();
        let b = CoxeterSystem::parse("2\n1 0\n0 1\n").unwrap();
        assert_eq!(a.order(0, 1), Order::Infinite);
        assert_eq!(a, b);
        assert_eq!(a.neighbors(0).iter().collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn neighbors_drop_commuting() {
        let sys = CoxeterSystem::from_orders(&[&[1, 2], &[2, 1]]).unwrap();
        assert!(sys.neighbors(0).is_empty());
    }

    #[test]
    fn base_level_examples() {
        // Orders {3,5} with a commuting pair: the 2 does not enter the lcm.
        let h3 = CoxeterSystem::from_orders(&[&[1, 5, 2], &[5, 1, 3], &[2, 3, 1]]).unwrap();
        assert_eq!(h3.base_level(), 15);
        let rank1 = CoxeterSystem::from_orders(&[&[1]]).unwrap();
        assert_eq!(rank1.base_level(), 3);
    }

    #[test]
    fn serialize_round_trip() {
        let text = "3\n1 3 4\n3 1 3\n4 3 1\n";
        let sys = CoxeterSystem::parse(text).unwrap();
        assert_eq!(sys.serialize(), text);
        let inf = CoxeterSystem::parse("2\n1 inf\ninf 1\n").unwrap();
        assert_eq!(CoxeterSystem::parse(&inf.serialize()).unwrap(), inf);
    }

    proptest::proptest! {
        #[test]
        fn parse_serialize_identity(rank in 1usize..6, seed in 0u64..5000) {
            let sys = crate::corpus::random_system(rank, seed, true);
            proptest::prop_assert_eq!(&CoxeterSystem::parse(&sys.serialize()).unwrap(), &sys);
            // Neighbor relation is symmetric and the base level is
            // divisible by every finite order of at least 3.
            for s in 0..rank {
                for t in 0..rank {
                    proptest::prop_assert_eq!(
                        sys.neighbors(s).contains(t),
                        sys.neighbors(t).contains(s)
                    );
                    if s != t {
                        if let Order::Finite(m) = sys.order(s, t) {
                            if m >= 3 {
                                proptest::prop_assert_eq!(sys.base_level() % m, 0);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn comments_ignored() {
        let sys = CoxeterSystem::parse("# type A2\n2\n# row 1\n1 3\n3 1\n").unwrap();
        assert_eq!(sys.rank(), 2);
    }
}
