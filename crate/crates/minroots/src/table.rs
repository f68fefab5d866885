//! The minimal-root reflection table: storage, canonical ordering, and the
//! bit-exact text serialization.

use crate::bitset::GenSet;
use crate::cyclo::{parse_rendered, BaseRing, Rendered, RingElem};
use crate::error::{Error, ParseError};
use std::cmp::Ordering;
use std::fmt;

/// One cell of the reflection table.
///
/// `Root(j)` means the reflection is the minimal root with index `j`
/// (possibly the root itself, when the reflection fixes it).  `NegSimple`
/// marks the simple root of the acting generator, whose reflection is
/// negative.  `NonMin` marks a reflection that is positive but no longer
/// minimal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Entry {
    Root(u32),
    NegSimple,
    NonMin,
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entry::Root(j) => write!(f, "{j}"),
            Entry::NegSimple => write!(f, "-"),
            Entry::NonMin => write!(f, "+"),
        }
    }
}

/// Exact root coordinates attached to a table, over a common base ring.
#[derive(Debug, Clone)]
pub struct TableCoords {
    pub ring: BaseRing,
    /// One coefficient tuple per root, `rank` entries each.
    pub coords: Vec<Vec<RingElem>>,
}

/// The reflection table of all minimal roots of a Coxeter system.
///
/// Rows are indexed by root, columns by generator.  Depths, descent sets
/// and lock sets are derived from the entries.  Coordinates are optional
/// in production use but required for canonicalization and serialization;
/// verified builds always carry them.
#[derive(Debug, Clone)]
pub struct MinimalRootTable {
    rank: usize,
    n: usize,
    entries: Vec<Entry>,
    depths: Vec<u32>,
    descents: Vec<GenSet>,
    locks: Vec<GenSet>,
    coords: Option<TableCoords>,
}

impl MinimalRootTable {
    /// Assemble a table from builder output.  Descent and lock sets are
    /// derived uniformly from the entries so that independent builders
    /// cannot disagree on them except through the entries themselves.
    pub fn from_parts(
        rank: usize,
        entries: Vec<Entry>,
        depths: Vec<u32>,
        coords: Option<TableCoords>,
    ) -> Self {
        let n = depths.len();
        assert_eq!(entries.len(), n * rank, "entry matrix shape mismatch");
        if let Some(c) = &coords {
            assert_eq!(c.coords.len(), n, "coordinate count mismatch");
        }
        let mut descents = vec![GenSet::EMPTY; n];
        let mut locks = vec![GenSet::EMPTY; n];
        for i in 0..n {
            for s in 0..rank {
                match entries[i * rank + s] {
                    Entry::Root(j) => {
                        if depths[j as usize] < depths[i] {
                            descents[i].insert(s);
                        }
                    }
                    Entry::NonMin => locks[i].insert(s),
                    Entry::NegSimple => {}
                }
            }
        }
        MinimalRootTable { rank, n, entries, depths, descents, locks, coords }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of minimal roots.
    pub fn count(&self) -> usize {
        self.n
    }

    /// Table lookup: the action of generator `s` on minimal root `i`.
    #[inline]
    pub fn entry(&self, s: usize, i: u32) -> Entry {
        self.entries[i as usize * self.rank + s]
    }

    pub fn depth(&self, i: u32) -> u32 {
        self.depths[i as usize]
    }

    pub fn descents(&self, i: u32) -> GenSet {
        self.descents[i as usize]
    }

    pub fn locks(&self, i: u32) -> GenSet {
        self.locks[i as usize]
    }

    pub fn coords(&self) -> Option<&TableCoords> {
        self.coords.as_ref()
    }

    pub fn depths(&self) -> &[u32] {
        &self.depths
    }

    /// Histogram of root counts per depth (index 0 unused).
    pub fn depth_histogram(&self) -> Vec<usize> {
        let max = self.depths.iter().copied().max().unwrap_or(0) as usize;
        let mut hist = vec![0usize; max + 1];
        for &d in &self.depths {
            hist[d as usize] += 1;
        }
        hist
    }

    /// Reindex the roots into the canonical order: by depth, then by the
    /// coordinate tuple compared coefficientwise by exact sign (larger
    /// leading coefficients first), so simple roots come out in generator
    /// order at indices `0..rank`.  Deterministic and idempotent.
    pub fn canonicalize(&self) -> Result<MinimalRootTable, Error> {
        let coords = self
            .coords
            .as_ref()
            .ok_or_else(|| ParseError::other("canonicalize requires coordinates"))?;
        let ring = &coords.ring;
        let mut order: Vec<u32> = (0..self.n as u32).collect();
        order.sort_by(|&a, &b| {
            let (ia, ib) = (a as usize, b as usize);
            self.depths[ia].cmp(&self.depths[ib]).then_with(|| {
                let (ca, cb) = (&coords.coords[ia], &coords.coords[ib]);
                for g in 0..self.rank {
                    match ring.cmp_elems(&ca[g], &cb[g]) {
                        Ordering::Greater => return Ordering::Less,
                        Ordering::Less => return Ordering::Greater,
                        Ordering::Equal => {}
                    }
                }
                Ordering::Equal
            })
        });
        let mut new_index = vec![0u32; self.n];
        for (new, &old) in order.iter().enumerate() {
            new_index[old as usize] = new as u32;
        }
        let mut entries = Vec::with_capacity(self.n * self.rank);
        let mut depths = Vec::with_capacity(self.n);
        let mut new_coords = Vec::with_capacity(self.n);
        for &old in &order {
            let o = old as usize;
            for s in 0..self.rank {
                entries.push(match self.entries[o * self.rank + s] {
                    Entry::Root(j) => Entry::Root(new_index[j as usize]),
                    e => e,
                });
            }
            depths.push(self.depths[o]);
            new_coords.push(coords.coords[o].clone());
        }
        Ok(MinimalRootTable::from_parts(
            self.rank,
            entries,
            depths,
            Some(TableCoords { ring: ring.clone(), coords: new_coords }),
        ))
    }

    /// Table file v1.  Bit-exact: two tables are equal as tables iff their
    /// serializations are byte-identical.
    pub fn serialize(&self) -> Result<String, Error> {
        let coords = self
            .coords
            .as_ref()
            .ok_or_else(|| ParseError::other("serialization requires coordinates"))?;
        let ring = &coords.ring;
        let mut out = String::new();
        out.push_str("minroots 1\n");
        out.push_str(&format!("rank {}\n", self.rank));
        out.push_str(&format!("count {}\n", self.n));
        for i in 0..self.n {
            let cs: Vec<String> = coords.coords[i].iter().map(|c| ring.render(c)).collect();
            out.push_str(&format!(
                "root {} depth {} descents {} coeffs {}\n",
                i,
                self.depths[i],
                self.descents[i].to_hex(),
                cs.join("|")
            ));
        }
        for i in 0..self.n {
            let es: Vec<String> =
                (0..self.rank).map(|s| self.entries[i * self.rank + s].to_string()).collect();
            out.push_str(&format!("refl {} {}\n", i, es.join(" ")));
        }
        Ok(out)
    }

    /// Canonical serialized form; the cross-builder comparison object.
    pub fn canonical_form(&self) -> Result<String, Error> {
        self.canonicalize()?.serialize()
    }

    /// Parse a table file v1, validating counts, indices, and coefficient
    /// consistency.
    pub fn deserialize(text: &str) -> Result<MinimalRootTable, Error> {
        let mut lines = text.lines().enumerate().map(|(n, l)| (n + 1, l.trim()));
        let mut expect = |tag: &str| -> Result<(usize, Vec<String>), Error> {
            let (no, line) = lines
                .next()
                .ok_or_else(|| ParseError::other(format!("unexpected end of table file, expected {tag}")))?;
            let toks: Vec<String> = line.split_whitespace().map(|s| s.to_string()).collect();
            if toks.first().map(String::as_str) != Some(tag) {
                return Err(ParseError::Malformed {
                    line: no,
                    msg: format!("expected {tag:?} line, found {line:?}"),
                }
                .into());
            }
            Ok((no, toks))
        };

        let (_, toks) = expect("minroots")?;
        if toks.get(1).map(String::as_str) != Some("1") {
            return Err(ParseError::Version(toks.get(1).cloned().unwrap_or_default()).into());
        }
        let (_, toks) = expect("rank")?;
        let rank: usize = toks
            .get(1)
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| ParseError::other("malformed rank line"))?;
        let (_, toks) = expect("count")?;
        let n: usize = toks
            .get(1)
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| ParseError::other("malformed count line"))?;

        // First pass over the root lines collects raw coefficients so the
        // ring level can be fixed before elements are materialized.
        let mut depths = Vec::with_capacity(n);
        let mut descent_sets = Vec::with_capacity(n);
        let mut raw_coeffs: Vec<Vec<Rendered>> = Vec::with_capacity(n);
        let mut level: Option<u32> = None;
        for i in 0..n {
            let (no, toks) = expect("root")?;
            let fail =
                |msg: String| -> Error { ParseError::Malformed { line: no, msg }.into() };
            if toks.len() != 8 || toks[2] != "depth" || toks[4] != "descents" || toks[6] != "coeffs"
            {
                return Err(fail("malformed root line".into()));
            }
            if toks[1].parse::<usize>().ok() != Some(i) {
                return Err(fail(format!("root lines out of order, expected {i}")));
            }
            let depth: u32 = toks[3].parse().map_err(|_| fail("malformed depth".into()))?;
            if depth == 0 {
                return Err(fail("depth must be positive".into()));
            }
            let descents =
                GenSet::from_hex(&toks[5]).ok_or_else(|| fail("malformed descent bitset".into()))?;
            let parts: Vec<&str> = toks[7].split('|').collect();
            if parts.len() != rank {
                return Err(fail(format!("expected {rank} coefficients, found {}", parts.len())));
            }
            let rendered = parts
                .iter()
                .map(|p| parse_rendered(p))
                .collect::<Result<Vec<_>, _>>()
                .map_err(Error::Parse)?;
            for r in &rendered {
                if let Rendered::Poly { level: l, .. } = r {
                    match level {
                        None => level = Some(*l),
                        Some(prev) if prev != *l => {
                            return Err(fail(format!("mixed ring levels {prev} and {l}")))
                        }
                        _ => {}
                    }
                }
            }
            depths.push(depth);
            descent_sets.push(descents);
            raw_coeffs.push(rendered);
        }

        let ring = BaseRing::new(level.unwrap_or(3));
        let mut coords = Vec::with_capacity(n);
        for rendered in raw_coeffs {
            let mut row = Vec::with_capacity(rank);
            for r in rendered {
                row.push(match r {
                    Rendered::Constant(c) => ring.from_int(c),
                    Rendered::Poly { coeffs, level: l } => ring
                        .parse_elem(&format!(
                            "poly{}:{}",
                            l,
                            coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
                        ))
                        .map_err(Error::Parse)?,
                });
            }
            coords.push(row);
        }

        let mut entries = Vec::with_capacity(n * rank);
        for i in 0..n {
            let (no, toks) = expect("refl")?;
            let fail = |msg: String| -> Error { ParseError::Malformed { line: no, msg }.into() };
            if toks.len() != rank + 2 {
                return Err(fail(format!("expected {rank} entries")));
            }
            if toks[1].parse::<usize>().ok() != Some(i) {
                return Err(fail(format!("refl lines out of order, expected {i}")));
            }
            for tok in &toks[2..] {
                let e = match tok.as_str() {
                    "-" => Entry::NegSimple,
                    "+" => Entry::NonMin,
                    _ => {
                        let j: u32 =
                            tok.parse().map_err(|_| fail(format!("malformed entry {tok:?}")))?;
                        if j as usize >= n {
                            return Err(fail(format!("entry index {j} out of range (count {n})")));
                        }
                        Entry::Root(j)
                    }
                };
                entries.push(e);
            }
        }
        if lines.any(|(_, l)| !l.is_empty()) {
            return Err(ParseError::other("trailing content after table").into());
        }

        let table =
            MinimalRootTable::from_parts(rank, entries, depths, Some(TableCoords { ring, coords }));
        // Recorded descent sets must match the derived ones.
        for i in 0..n {
            if table.descents[i] != descent_sets[i] {
                return Err(ParseError::other(format!(
                    "descent set of root {i} disagrees with the reflection matrix"
                ))
                .into());
            }
        }
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Hand-built A2 table: roots a0, a1, a0+a1.
    fn a2_table() -> MinimalRootTable {
        let ring = BaseRing::new(3);
        let e = |s: usize| {
            let mut v = vec![ring.from_int(0), ring.from_int(0)];
            v[s] = ring.from_int(1);
            v
        };
        let both = vec![ring.from_int(1), ring.from_int(1)];
        let entries = vec![
            Entry::NegSimple,
            Entry::Root(2),
            Entry::Root(2),
            Entry::NegSimple,
            Entry::Root(1),
            Entry::Root(0),
        ];
        MinimalRootTable::from_parts(
            2,
            entries,
            vec![1, 1, 2],
            Some(TableCoords { ring: ring.clone(), coords: vec![e(0), e(1), both] }),
        )
    }

    #[test]
    fn round_trip_a2() {
        let t = a2_table();
        let text = t.serialize().unwrap();
        let back = MinimalRootTable::deserialize(&text).unwrap();
        assert_eq!(back.serialize().unwrap(), text);
        assert_eq!(back.count(), 3);
        assert_eq!(back.entry(0, 1), Entry::Root(2));
        assert_eq!(back.descents(2).iter().collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn canonicalize_is_idempotent_and_orders_simples() {
        let t = a2_table();
        let c1 = t.canonicalize().unwrap();
        let c2 = c1.canonicalize().unwrap();
        assert_eq!(c1.serialize().unwrap(), c2.serialize().unwrap());
        // Simple roots stay at indices 0,1 in generator order.
        assert_eq!(c1.entry(0, 0), Entry::NegSimple);
        assert_eq!(c1.entry(1, 1), Entry::NegSimple);
        assert_eq!(c1.depth(2), 2);
    }

    #[test]
    fn round_trip_figure1() {
        let sys = crate::corpus::figure1();
        let table = crate::naive::build_table_naive(&sys, 1000).unwrap();
        assert_eq!(table.count(), 7);
        let text = table.canonical_form().unwrap();
        let back = MinimalRootTable::deserialize(&text).unwrap();
        assert_eq!(back.serialize().unwrap(), text);
    }

    #[test]
    fn deserialize_rejects_out_of_range_entry() {
        let t = a2_table();
        let text = t.serialize().unwrap().replace("refl 2 1 0", "refl 2 7 0");
        let err = MinimalRootTable::deserialize(&text).unwrap_err();
        assert!(err.to_string().contains("out of range"), "{err}");
    }

    #[test]
    fn deserialize_rejects_bad_version() {
        let t = a2_table();
        let text = t.serialize().unwrap().replace("minroots 1", "minroots 9");
        assert!(MinimalRootTable::deserialize(&text).is_err());
    }

    #[test]
    fn derived_locks_from_entries() {
        let entries = vec![Entry::NegSimple, Entry::NonMin, Entry::NonMin, Entry::NegSimple];
        let t = MinimalRootTable::from_parts(2, entries, vec![1, 1], None);
        assert_eq!(t.locks(0).iter().collect::<Vec<_>>(), vec![1]);
        assert!(t.descents(0).is_empty());
    }
}
