//! Rank-2 root systems in closed form: the coefficient sequence C_n, exact
//! depths, reflection actions, and minimality.  The structured builder
//! seeds every edge of the Coxeter graph from these systems.

use crate::cyclo::{BaseRing, RingElem};
use crate::error::BuildError;
use crate::system::Order;

/// Action of one of the two local generators on a dihedral root.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DihedralEntry {
    /// The root is this generator's simple root; the image is negative.
    Neg,
    /// Image is the root with the given local index (possibly itself).
    Idx(usize),
    /// Image is positive but not minimal (infinite edges only).
    NonMin,
}

/// A positive root of a rank-2 subsystem, with coefficients over the
/// elementary ring of the edge.
#[derive(Debug, Clone)]
pub struct DihedralRoot {
    /// Which simple root the orbit word producing this root starts from
    /// (0 or 1, local indexing).
    pub side: usize,
    pub depth: u32,
    /// Coefficients (at local node 0, at local node 1).
    pub coeffs: (RingElem, RingElem),
    /// Actions of local generators 0 and 1.
    pub refl: [DihedralEntry; 2],
    pub minimal: bool,
}

/// All positive roots of the dihedral system on one edge.  Local indices 0
/// and 1 are the simple roots; for finite order m there are exactly m
/// roots and all are minimal.  For an infinite edge only the simples are
/// kept, each locked by the other generator.
#[derive(Debug, Clone)]
pub struct DihedralSystem {
    pub order: Order,
    pub ring: BaseRing,
    pub roots: Vec<DihedralRoot>,
}

/// The coefficient sequence C_n over `ring`, driven by the constant
/// `cm` = 2cos(pi/m) (the integer 2 for infinite edges): C_0 = 0, C_1 = 1,
/// C_{n+2} = cm*C_{n+1} - C_n.
pub fn coeff_c(ring: &BaseRing, cm: &RingElem, n: u32) -> Result<RingElem, BuildError> {
    let mut prev = ring.zero();
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = ring.one();
    for _ in 1..n {
        let next = ring.sub(&ring.mul(cm, &cur)?, &prev)?;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// C_n by its explicit expansion z^(n-1) + z^(n-3) + ... + z^(1-n), i.e. a
/// sum of the Chebyshev-like values D_k(cm) plus a constant 1 for odd n.
/// Independent of the recurrence; used to cross-check it.
pub fn coeff_c_sum(ring: &BaseRing, n: u32) -> Result<RingElem, BuildError> {
    let mut acc = if n % 2 == 1 { ring.one() } else { ring.zero() };
    let mut k = if n % 2 == 1 { 2 } else { 1 };
    while k < n {
        acc = ring.add(&acc, &ring.d_poly(k)?)?;
        k += 2;
    }
    Ok(acc)
}

/// Build the dihedral system for an edge of order `m`.
pub fn dihedral_system(order: Order) -> Result<DihedralSystem, BuildError> {
    match order {
        Order::Infinite => {
            let ring = BaseRing::new(3);
            let one = ring.one();
            let zero = ring.zero();
            let roots = vec![
                DihedralRoot {
                    side: 0,
                    depth: 1,
                    coeffs: (one.clone(), zero.clone()),
                    refl: [DihedralEntry::Neg, DihedralEntry::NonMin],
                    minimal: true,
                },
                DihedralRoot {
                    side: 1,
                    depth: 1,
                    coeffs: (zero, one),
                    refl: [DihedralEntry::NonMin, DihedralEntry::Neg],
                    minimal: true,
                },
            ];
            Ok(DihedralSystem { order, ring, roots })
        }
        Order::Finite(m) => {
            assert!(m >= 2, "edge orders are at least 2");
            let ring = BaseRing::new(m);
            let cm = if m == 2 { ring.zero() } else { ring.embed(m)? };
            let mut roots: Vec<DihedralRoot> = Vec::with_capacity(m as usize);
            for side in 0..2 {
                let coeffs =
                    if side == 0 { (ring.one(), ring.zero()) } else { (ring.zero(), ring.one()) };
                roots.push(DihedralRoot {
                    side,
                    depth: 1,
                    coeffs,
                    refl: [DihedralEntry::Idx(usize::MAX); 2],
                    minimal: true,
                });
            }
            // Breadth-first closure; for finite m this yields exactly m
            // positive roots, all minimal.
            let mut next = 0usize;
            while next < roots.len() {
                let i = next;
                next += 1;
                for u in 0..2usize {
                    let (p, q) = roots[i].coeffs.clone();
                    let image = if u == 0 {
                        (ring.sub(&ring.mul(&cm, &q)?, &p)?, q)
                    } else {
                        let nq = ring.sub(&ring.mul(&cm, &p)?, &q)?;
                        (p, nq)
                    };
                    let entry = if ring.sign(&image.0) < 0 || ring.sign(&image.1) < 0 {
                        DihedralEntry::Neg
                    } else {
                        let found = roots.iter().position(|r| r.coeffs == image);
                        let j = match found {
                            Some(j) => j,
                            None => {
                                let depth = roots[i].depth + 1;
                                roots.push(DihedralRoot {
                                    side: roots[i].side,
                                    depth,
                                    coeffs: image,
                                    refl: [DihedralEntry::Idx(usize::MAX); 2],
                                    minimal: true,
                                });
                                roots.len() - 1
                            }
                        };
                        DihedralEntry::Idx(j)
                    };
                    roots[i].refl[u] = entry;
                }
            }
            assert_eq!(roots.len(), m as usize, "a dihedral system of order m has m positive roots");
            Ok(DihedralSystem { order, ring, roots })
        }
    }
}

impl DihedralSystem {
    /// Local index of the depth-2 root whose unit coefficient sits on
    /// `side` (that is, the reflection of the side's simple root by the
    /// other generator).  None for m = 2 and for infinite edges.
    pub fn unit_depth2(&self, side: usize) -> Option<usize> {
        match self.roots[side].refl[1 - side] {
            DihedralEntry::Idx(j) if j != side => Some(j),
            _ => None,
        }
    }
}
