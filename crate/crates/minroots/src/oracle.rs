//! Brute-force verification path, independent of both table builders.
//!
//! Group elements are exact matrices of the standard realization over the
//! common base ring, deduplicated by their canonical coefficient tuples.
//! From a Cayley ball the ISL normal form of every element is read off by
//! following least descents, giving an oracle for everything the table
//! machinery computes.  This module must not depend on the builders.

use crate::cyclo::{BaseRing, Coeff, RingElem};
use crate::error::{BuildError, Error};
use crate::system::{CoxeterSystem, Order};
use std::collections::HashMap;

/// Row-major rank x rank matrix over the base ring.
pub type Matrix = Vec<RingElem>;

/// Exact reflection matrices of the generators in the simple-root basis.
///
/// The matrix of `s` is the identity except in row `s`, where the diagonal
/// is -1 and the off-diagonal entries are 2cos(pi/m) for finite orders and
/// the integer 2 for infinite ones.
pub fn realization_matrices(
    sys: &CoxeterSystem,
    ring: &BaseRing,
) -> Result<Vec<Matrix>, BuildError> {
    let n = sys.rank();
    let mut gens = Vec::with_capacity(n);
    for s in 0..n {
        let mut m = vec![ring.zero(); n * n];
        for j in 0..n {
            m[j * n + j] = ring.one();
        }
        m[s * n + s] = ring.from_int(-1);
        for j in 0..n {
            if j != s {
                m[s * n + j] = minus_two_dot(sys, ring, s, j)?;
            }
        }
        gens.push(m);
    }
    Ok(gens)
}

/// The doubled inner product -2(a_s . a_t): zero for commuting generators,
/// 2cos(pi/m) for finite m >= 3, and 2 for infinite m.
pub fn minus_two_dot(
    sys: &CoxeterSystem,
    ring: &BaseRing,
    s: usize,
    t: usize,
) -> Result<RingElem, BuildError> {
    Ok(match sys.order(s, t) {
        Order::Finite(2) => ring.zero(),
        Order::Finite(m) => ring.embed(m)?,
        Order::Infinite => ring.from_int(2),
    })
}

pub fn mat_mul(n: usize, ring: &BaseRing, a: &Matrix, b: &Matrix) -> Result<Matrix, BuildError> {
    let mut out = vec![ring.zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = &a[i * n + k];
            if aik.is_zero() {
                continue;
            }
            for j in 0..n {
                let bkj = &b[k * n + j];
                if !bkj.is_zero() {
                    out[i * n + j] = ring.add(&out[i * n + j], &ring.mul(aik, bkj)?)?;
                }
            }
        }
    }
    Ok(out)
}

pub fn mat_identity(n: usize, ring: &BaseRing) -> Matrix {
    let mut m = vec![ring.zero(); n * n];
    for i in 0..n {
        m[i * n + i] = ring.one();
    }
    m
}

fn mat_key(m: &Matrix) -> Vec<Coeff> {
    let mut key = Vec::with_capacity(m.len() * m.first().map_or(0, |e| e.coeffs().len()));
    for e in m {
        key.extend_from_slice(e.coeffs());
    }
    key
}

/// All positive roots of a finite system, by closure of the simple roots
/// under the exact generator reflections.  Fails with a resource error if
/// the closure exceeds `cap` roots, which signals an infinite group.
pub fn positive_root_closure(
    sys: &CoxeterSystem,
    ring: &BaseRing,
    cap: usize,
) -> Result<Vec<Vec<RingElem>>, Error> {
    let n = sys.rank();
    let mut dots = vec![ring.zero(); n * n];
    for s in 0..n {
        for t in 0..n {
            if s != t {
                dots[s * n + t] = minus_two_dot(sys, ring, s, t).map_err(BuildError::from)?;
            }
        }
    }
    let mut roots: Vec<Vec<RingElem>> = Vec::new();
    let mut seen: HashMap<Vec<Coeff>, ()> = HashMap::new();
    for s in 0..n {
        let mut v = vec![ring.zero(); n];
        v[s] = ring.one();
        seen.insert(flat_key(&v), ());
        roots.push(v);
    }
    let mut next = 0usize;
    while next < roots.len() {
        let v = roots[next].clone();
        next += 1;
        for s in 0..n {
            // Reflection changes only coordinate s:
            // new_s = -v_s + sum over neighbors of (-2 a_s.a_t) v_t.
            let mut acc = ring.neg(&v[s]).map_err(Error::Build)?;
            for t in sys.neighbors(s).iter() {
                if !v[t].is_zero() {
                    let prod = ring.mul(&dots[s * n + t], &v[t]).map_err(Error::Build)?;
                    acc = ring.add(&acc, &prod).map_err(Error::Build)?;
                }
            }
            let mut image = v.clone();
            image[s] = acc;
            // Negative roots (all coordinates non-positive) are skipped.
            if image.iter().all(|c| ring.sign(c) <= 0) {
                continue;
            }
            let key = flat_key(&image);
            if !seen.contains_key(&key) {
                if roots.len() >= cap {
                    return Err(Error::Resource(format!(
                        "positive root closure exceeded {cap} roots (infinite group?)"
                    )));
                }
                seen.insert(key, ());
                roots.push(image);
            }
        }
    }
    Ok(roots)
}

fn flat_key(v: &[RingElem]) -> Vec<Coeff> {
    let mut key = Vec::new();
    for e in v {
        key.extend_from_slice(e.coeffs());
    }
    key
}

/// Cayley ball of a Coxeter group: all elements up to a given length as
/// exact matrices, with BFS distances and ISL normal forms.
pub struct CayleyBall {
    rank: usize,
    radius: usize,
    gens: Vec<Matrix>,
    ring: BaseRing,
    elems: Vec<Matrix>,
    dist: Vec<u32>,
    index: HashMap<Vec<Coeff>, u32>,
    nf: Vec<Vec<usize>>,
}

impl CayleyBall {
    /// Breadth-first enumeration by right multiplication up to `radius`,
    /// capped at `cap` elements.
    pub fn build(sys: &CoxeterSystem, radius: usize, cap: usize) -> Result<CayleyBall, Error> {
        let ring = BaseRing::new(sys.base_level());
        let gens = realization_matrices(sys, &ring).map_err(Error::Build)?;
        let n = sys.rank();
        let id = mat_identity(n, &ring);
        let mut elems = vec![id.clone()];
        let mut dist = vec![0u32];
        let mut index = HashMap::new();
        index.insert(mat_key(&id), 0u32);
        let mut next = 0usize;
        while next < elems.len() {
            let i = next;
            next += 1;
            if dist[i] as usize >= radius {
                continue;
            }
            for s in 0..n {
                let m = mat_mul(n, &ring, &elems[i], &gens[s]).map_err(Error::Build)?;
                let key = mat_key(&m);
                if !index.contains_key(&key) {
                    if elems.len() >= cap {
                        return Err(Error::Resource(format!(
                            "Cayley ball exceeded {cap} elements; lower the radius"
                        )));
                    }
                    index.insert(key, elems.len() as u32);
                    dist.push(dist[i] + 1);
                    elems.push(m);
                }
            }
        }

        // Normal forms: the last letter of NF(w) is the least s with
        // l(ws) < l(w); elements come out of the BFS sorted by distance,
        // so the shorter suffix is always ready.
        let mut nf: Vec<Vec<usize>> = vec![Vec::new(); elems.len()];
        let mut ball = CayleyBall { rank: n, radius, gens, ring, elems, dist, index, nf: Vec::new() };
        for i in 1..ball.elems.len() {
            let s = (0..n)
                .find(|&s| {
                    ball.right_neighbor(s, i as u32)
                        .map(|j| ball.dist[j as usize] < ball.dist[i])
                        .unwrap_or(false)
                })
                .expect("every nonidentity element has a right descent");
            let shorter = ball.right_neighbor(s, i as u32).unwrap() as usize;
            debug_assert_eq!(ball.dist[shorter] + 1, ball.dist[i]);
            let mut word = nf[shorter].clone();
            word.push(s);
            debug_assert_eq!(word.len(), ball.dist[i] as usize);
            nf[i] = word;
        }
        ball.nf = nf;
        Ok(ball)
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn dist(&self, i: u32) -> u32 {
        self.dist[i as usize]
    }

    /// ISL normal form of element `i`, letters as 0-based generators.
    pub fn normal_form(&self, i: u32) -> &[usize] {
        &self.nf[i as usize]
    }

    /// Index of `w * s` if it lies in the ball.
    pub fn right_neighbor(&self, s: usize, i: u32) -> Option<u32> {
        let m = mat_mul(self.rank, &self.ring, &self.elems[i as usize], &self.gens[s]).ok()?;
        self.index.get(&mat_key(&m)).copied()
    }

    /// Index of `s * w` if it lies in the ball.
    pub fn left_neighbor(&self, s: usize, i: u32) -> Option<u32> {
        let m = mat_mul(self.rank, &self.ring, &self.gens[s], &self.elems[i as usize]).ok()?;
        self.index.get(&mat_key(&m)).copied()
    }

    /// Sizes of the spheres: count of elements per length `0..=radius`.
    pub fn growth_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.radius + 1];
        for &d in &self.dist {
            counts[d as usize] += 1;
        }
        counts
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn reflection_matrices_are_involutions() {
        for (name, sys) in corpus::named() {
            let ring = BaseRing::new(sys.base_level());
            let gens = realization_matrices(&sys, &ring).unwrap();
            let n = sys.rank();
            let id = mat_identity(n, &ring);
            for m in &gens {
                assert_eq!(mat_mul(n, &ring, m, m).unwrap(), id, "involution fails in {name}");
            }
        }
    }

    #[test]
    fn product_orders_match_matrix() {
        // (M_s M_t) has the order given by the Coxeter matrix.
        let sys = corpus::b2();
        let ring = BaseRing::new(sys.base_level());
        let gens = realization_matrices(&sys, &ring).unwrap();
        let st = mat_mul(2, &ring, &gens[0], &gens[1]).unwrap();
        let id = mat_identity(2, &ring);
        let mut p = st.clone();
        let mut order = 1;
        while p != id {
            p = mat_mul(2, &ring, &p, &st).unwrap();
            order += 1;
            assert!(order <= 8);
        }
        assert_eq!(order, 4);
        // And the square is not yet the identity.
        let sq = mat_mul(2, &ring, &st, &st).unwrap();
        assert_ne!(sq, id);
    }

    #[test]
    fn closure_counts_for_finite_groups() {
        let expected = [
            (corpus::a2(), 3),
            (corpus::b2(), 4),
            (corpus::g2(), 6),
            (corpus::i2(7), 7),
            (corpus::a3(), 6),
            (corpus::b3(), 9),
            (corpus::h3(), 15),
        ];
        for (sys, count) in expected {
            let ring = BaseRing::new(sys.base_level());
            let roots = positive_root_closure(&sys, &ring, 10_000).unwrap();
            assert_eq!(roots.len(), count);
        }
    }

    #[test]
    fn closure_detects_infinite_groups() {
        let sys = corpus::affine_a2();
        let ring = BaseRing::new(sys.base_level());
        assert!(matches!(
            positive_root_closure(&sys, &ring, 500),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn a2_ball_and_normal_forms() {
        let ball = CayleyBall::build(&corpus::a2(), 3, 1000).unwrap();
        assert_eq!(ball.len(), 6);
        assert_eq!(ball.growth_counts(), vec![1, 2, 2, 1]);
        // The longest element has normal form [0,1,0].
        let longest = (0..ball.len() as u32).find(|&i| ball.dist(i) == 3).unwrap();
        assert_eq!(ball.normal_form(longest), &[0, 1, 0]);
        assert_eq!(ball.normal_form(0), &[] as &[usize]);
    }

    #[test]
    fn affine_ball_grows() {
        let ball = CayleyBall::build(&corpus::affine_a2(), 6, 100_000).unwrap();
        let counts = ball.growth_counts();
        for d in 1..counts.len() {
            assert!(counts[d] > 0, "sphere {d} empty");
        }
        assert!(counts[6] > counts[1]);
    }
}
#[cfg(test)]
mod nf_tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn normal_forms_are_least_descent_words() {
        // Lengths equal distances; every suffix strips the least generator
        // that shortens the element.
        for sys in [corpus::a2(), corpus::figure1()] {
            let ball = CayleyBall::build(&sys, 5, 100_000).unwrap();
            for i in 0..ball.len() as u32 {
                let nf = ball.normal_form(i);
                assert_eq!(nf.len(), ball.dist(i) as usize);
                let mut cur = i;
                for &letter in nf.iter().rev() {
                    let least = (0..sys.rank())
                        .find(|&s| {
                            ball.right_neighbor(s, cur)
                                .map(|j| ball.dist(j) < ball.dist(cur))
                                .unwrap_or(false)
                        })
                        .unwrap();
                    assert_eq!(least, letter);
                    cur = ball.right_neighbor(letter, cur).unwrap();
                }
                assert_eq!(cur, 0);
            }
        }
    }
}
