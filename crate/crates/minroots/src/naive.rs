//! Reference table construction: FIFO worklist over exact root coordinates
//! in the common base ring, with a coordinate lookup table for
//! deduplication.
//!
//! Kept deliberately simple and independent of the structured builder: no
//! descent walks, no lock inheritance, one arithmetic classification per
//! missing table cell.

use crate::cyclo::{BaseRing, Coeff, RingElem};
use crate::error::{BuildError, Error};
use crate::system::{CoxeterSystem, Order};
use crate::table::{Entry, MinimalRootTable, TableCoords};
use std::collections::{HashMap, VecDeque};

/// Exact coordinates of a positive root over the common ring.
pub type RootCoordinates = Vec<RingElem>;

/// Outcome of applying a generator to a known minimal root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    /// The root is the generator's own simple root; the reflection is
    /// negative.
    NegSimple,
    /// The reflection fixes the root.
    Fixed,
    /// The reflection is a strictly shallower minimal root (already known
    /// when processing in depth order); carries its coordinates.
    Descent(RootCoordinates),
    /// The reflection is a strictly deeper minimal root; carries its
    /// coordinates.
    NewMinimal(RootCoordinates),
    /// The reflection is positive but dominates the generator's simple
    /// root, so it is no longer minimal.
    NonMinimal,
}

/// The doubled inner product -2(a_s . a_t) as a ring constant.
fn minus_two_dot(
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

/// Doubled inner product 2(lambda . a_s) of a positive root with a simple
/// root: 2*lambda_s - sum over neighbors t of 2cos(pi/m_st)*lambda_t.
pub fn doubled_dot(
    sys: &CoxeterSystem,
    ring: &BaseRing,
    coords: &[RingElem],
    s: usize,
) -> Result<RingElem, BuildError> {
    let mut acc = ring.scale(&coords[s], 2)?;
    for t in sys.neighbors(s).iter() {
        if !coords[t].is_zero() {
            let c = minus_two_dot(sys, ring, s, t)?;
            acc = ring.sub(&acc, &ring.mul(&c, &coords[t])?)?;
        }
    }
    Ok(acc)
}

/// Reflect a positive root's coordinates by generator `s`: only coordinate
/// `s` changes, to lambda_s - 2(lambda . a_s).
pub fn reflect_coordinates(
    sys: &CoxeterSystem,
    ring: &BaseRing,
    coords: &[RingElem],
    s: usize,
) -> Result<RootCoordinates, BuildError> {
    let p = doubled_dot(sys, ring, coords, s)?;
    let mut out = coords.to_vec();
    out[s] = ring.sub(&coords[s], &p)?;
    Ok(out)
}

/// Classify the reflection of a known minimal root by `s` via exact signs
/// of the doubled product p: positive means descent, zero fixed, p <= -2
/// means the image dominates the simple root of `s`, and otherwise the
/// image is a new minimal root.
pub fn classify(
    sys: &CoxeterSystem,
    ring: &BaseRing,
    coords: &[RingElem],
    s: usize,
    is_alpha_s: bool,
) -> Result<Classification, BuildError> {
    if is_alpha_s {
        return Ok(Classification::NegSimple);
    }
    let p = doubled_dot(sys, ring, coords, s)?;
    let sign = ring.sign(&p);
    if sign == 0 {
        return Ok(Classification::Fixed);
    }
    let mut reflected = coords.to_vec();
    reflected[s] = ring.sub(&coords[s], &p)?;
    if sign > 0 {
        return Ok(Classification::Descent(reflected));
    }
    let p_plus_2 = ring.add(&p, &ring.from_int(2))?;
    if ring.sign(&p_plus_2) <= 0 {
        Ok(Classification::NonMinimal)
    } else {
        Ok(Classification::NewMinimal(reflected))
    }
}

fn flat_key(v: &[RingElem]) -> Vec<Coeff> {
    let mut key = Vec::new();
    for e in v {
        key.extend_from_slice(e.coeffs());
    }
    key
}

/// Build the minimal-root reflection table by breadth-first closure.
///
/// Simple roots get indices `0..rank`; every later root is assigned the
/// next index when first discovered, entered into the coordinate lookup,
/// and enqueued.  Finishing a root classifies every generator not yet
/// recorded and stores reciprocal entries.  Terminates because the set of
/// minimal roots is finite; `max_roots` guards against configuration
/// mistakes.
pub fn build_table_naive(sys: &CoxeterSystem, max_roots: usize) -> Result<MinimalRootTable, Error> {
    let ring = BaseRing::new(sys.base_level());
    let rank = sys.rank();
    let mut coords: Vec<RootCoordinates> = Vec::new();
    let mut depths: Vec<u32> = Vec::new();
    let mut entries: Vec<Option<Entry>> = Vec::new();
    let mut lookup: HashMap<Vec<Coeff>, u32> = HashMap::new();
    let mut queue: VecDeque<u32> = VecDeque::new();

    for s in 0..rank {
        let mut v = vec![ring.zero(); rank];
        v[s] = ring.one();
        lookup.insert(flat_key(&v), s as u32);
        coords.push(v);
        depths.push(1);
        entries.extend(std::iter::repeat(None).take(rank));
        entries[s * rank + s] = Some(Entry::NegSimple);
        queue.push_back(s as u32);
    }

    let mut last_depth = 1u32;
    while let Some(i) = queue.pop_front() {
        let depth = depths[i as usize];
        assert!(depth >= last_depth, "worklist must process roots in depth order");
        last_depth = depth;
        for s in 0..rank {
            if entries[i as usize * rank + s].is_some() {
                continue;
            }
            let lambda = coords[i as usize].clone();
            match classify(sys, &ring, &lambda, s, false).map_err(Error::Build)? {
                Classification::NegSimple => unreachable!("handled at definition"),
                Classification::Fixed => {
                    entries[i as usize * rank + s] = Some(Entry::Root(i));
                }
                Classification::NonMinimal => {
                    entries[i as usize * rank + s] = Some(Entry::NonMin);
                }
                Classification::Descent(image) => {
                    // A strictly shallower root was finished earlier and
                    // recorded the reciprocal entry then; reaching this arm
                    // would mean the lookup table and queue disagree.
                    let j = *lookup
                        .get(&flat_key(&image))
                        .ok_or_else(|| {
                            BuildError::Invariant(format!(
                                "descent of root {i} by {s} is not in the lookup table"
                            ))
                        })
                        .map_err(Error::Build)?;
                    entries[i as usize * rank + s] = Some(Entry::Root(j));
                    entries[j as usize * rank + s] = Some(Entry::Root(i));
                }
                Classification::NewMinimal(image) => {
                    let key = flat_key(&image);
                    let j = match lookup.get(&key) {
                        Some(&j) => j,
                        None => {
                            let j = coords.len() as u32;
                            if coords.len() >= max_roots {
                                return Err(BuildError::RootCap { cap: max_roots }.into());
                            }
                            lookup.insert(key, j);
                            coords.push(image);
                            depths.push(depth + 1);
                            entries.extend(std::iter::repeat(None).take(rank));
                            queue.push_back(j);
                            j
                        }
                    };
                    entries[i as usize * rank + s] = Some(Entry::Root(j));
                    entries[j as usize * rank + s] = Some(Entry::Root(i));
                }
            }
        }
    }

    let entries: Vec<Entry> = entries
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .expect("every cell is assigned when the queue drains");
    Ok(MinimalRootTable::from_parts(rank, entries, depths, Some(TableCoords { ring, coords })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::oracle;

    fn ring_for(sys: &CoxeterSystem) -> BaseRing {
        BaseRing::new(sys.base_level())
    }

    #[test]
    fn reflect_examples() {
        let a2 = corpus::a2();
        let ring = ring_for(&a2);
        let alpha = vec![ring.one(), ring.zero()];
        let refl = reflect_coordinates(&a2, &ring, &alpha, 1).unwrap();
        assert_eq!(refl, vec![ring.one(), ring.one()]);

        let b2 = corpus::b2();
        let ring = ring_for(&b2);
        let alpha = vec![ring.one(), ring.zero()];
        let refl = reflect_coordinates(&b2, &ring, &alpha, 1).unwrap();
        assert_eq!(refl[0], ring.one());
        assert_eq!(refl[1], ring.embed(4).unwrap());

        // Reflecting by a commuting generator changes nothing.
        let a1a1 = CoxeterSystem::from_orders(&[&[1, 2], &[2, 1]]).unwrap();
        let ring = ring_for(&a1a1);
        let alpha = vec![ring.one(), ring.zero()];
        assert_eq!(reflect_coordinates(&a1a1, &ring, &alpha, 1).unwrap(), alpha);
    }

    #[test]
    fn classify_examples() {
        let a2 = corpus::a2();
        let ring = ring_for(&a2);
        let highest = vec![ring.one(), ring.one()];
        assert!(matches!(
            classify(&a2, &ring, &highest, 0, false).unwrap(),
            Classification::Descent(_)
        ));

        let inf = corpus::affine_a1();
        let ring = ring_for(&inf);
        let alpha = vec![ring.one(), ring.zero()];
        assert_eq!(classify(&inf, &ring, &alpha, 1, false).unwrap(), Classification::NonMinimal);

        let b2 = corpus::b2();
        let ring = ring_for(&b2);
        let mut talpha = vec![ring.one(), ring.embed(4).unwrap()];
        assert_eq!(classify(&b2, &ring, &talpha, 0, false).unwrap(), Classification::Fixed);
        talpha.swap(0, 1);
        assert!(matches!(
            classify(&b2, &ring, &talpha, 0, false).unwrap(),
            Classification::Descent(_)
        ));
    }

    #[test]
    fn figure1_has_seven_minimal_roots() {
        let table = build_table_naive(&corpus::figure1(), 10_000).unwrap();
        assert_eq!(table.count(), 7);
    }

    #[test]
    fn rank_one_table() {
        let sys = CoxeterSystem::from_orders(&[&[1]]).unwrap();
        let table = build_table_naive(&sys, 10).unwrap();
        assert_eq!(table.count(), 1);
        assert_eq!(table.entry(0, 0), Entry::NegSimple);
    }

    #[test]
    fn infinite_dihedral_table() {
        let table = build_table_naive(&corpus::affine_a1(), 10).unwrap();
        assert_eq!(table.count(), 2);
        assert_eq!(table.entry(0, 0), Entry::NegSimple);
        assert_eq!(table.entry(1, 0), Entry::NonMin);
        assert_eq!(table.entry(0, 1), Entry::NonMin);
        assert_eq!(table.entry(1, 1), Entry::NegSimple);
    }

    #[test]
    fn finite_group_counts_match_root_closure() {
        for sys in [
            corpus::a2(),
            corpus::b2(),
            corpus::g2(),
            corpus::i2(7),
            corpus::a3(),
            corpus::b3(),
            corpus::h3(),
        ] {
            let ring = ring_for(&sys);
            let closure = oracle::positive_root_closure(&sys, &ring, 10_000).unwrap();
            let table = build_table_naive(&sys, 10_000).unwrap();
            assert_eq!(table.count(), closure.len());
        }
    }

    #[test]
    fn affine_a2_has_six_minimal_roots() {
        let table = build_table_naive(&corpus::affine_a2(), 10_000).unwrap();
        assert_eq!(table.count(), 6);
    }

    #[test]
    fn root_cap_is_enforced() {
        let err = build_table_naive(&corpus::figure1(), 5).unwrap_err();
        assert!(matches!(err, Error::Build(BuildError::RootCap { cap: 5 })));
    }
}
