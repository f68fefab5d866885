//! Normal forms and multiplication driven by the reflection table.
//!
//! A word is ISL-normal when every prefix ends in the least generator that
//! shortens it.  Left multiplication rewrites a normal form with a single
//! left-to-right scan: the scan tracks the root obtained by pushing the
//! multiplier's simple root through the letters, and the reflection table
//! answers each step with one lookup.  A negative answer marks a deletion,
//! a non-minimal answer freezes the last recorded exchange site, and a
//! simple root smaller than the letter just read records a new exchange.

use crate::bitset::GenSet;
use crate::error::{Error, ParseError};
use crate::table::{Entry, MinimalRootTable};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// An ISL-normal word, letters as 0-based generator indices.
///
/// The invariant is not rechecked on every call; normal forms are produced
/// by this module's own operations (or by the brute-force oracle) and fed
/// back in.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct NormalForm(Vec<usize>);

impl NormalForm {
    pub fn empty() -> Self {
        NormalForm(Vec::new())
    }

    /// Wrap letters without normalization; the caller asserts normality.
    pub fn from_letters(letters: Vec<usize>) -> Self {
        NormalForm(letters)
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Insertion-or-deletion record produced by the scan: insert `t` after the
/// prefix of length `k` (the last exchange site, with insertion at the
/// front rendered as k = 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExchangeRecord {
    pub k: usize,
    pub t: usize,
}

/// Normal form of `s * w` from the normal form of `w`, with the number of
/// table lookups performed (at most one per letter of the input).
pub fn left_multiply_counted(
    table: &MinimalRootTable,
    s: usize,
    nf: &NormalForm,
) -> (NormalForm, usize) {
    let rank = table.rank();
    debug_assert!(s < rank);
    let mut exch = ExchangeRecord { k: 0, t: s };
    // Simple roots occupy table indices 0..rank in generator order.
    let mut lam = s as u32;
    let mut lookups = 0usize;
    for (pos, &letter) in nf.letters().iter().enumerate() {
        lookups += 1;
        match table.entry(letter, lam) {
            Entry::NegSimple => {
                // The scan crossed the multiplier's hyperplane: delete.
                let mut out = nf.letters().to_vec();
                out.remove(pos);
                return (NormalForm(out), lookups);
            }
            Entry::NonMin => {
                // The hyperplane can no longer be recrossed; the recorded
                // exchange is final.
                break;
            }
            Entry::Root(j) => {
                lam = j;
                if (j as usize) < rank && (j as usize) < letter {
                    exch = ExchangeRecord { k: pos + 1, t: j as usize };
                }
            }
        }
    }
    let mut out = Vec::with_capacity(nf.len() + 1);
    out.extend_from_slice(&nf.letters()[..exch.k]);
    out.push(exch.t);
    out.extend_from_slice(&nf.letters()[exch.k..]);
    (NormalForm(out), lookups)
}

/// Normal form of `s * w`.
pub fn left_multiply(table: &MinimalRootTable, s: usize, nf: &NormalForm) -> NormalForm {
    left_multiply_counted(table, s, nf).0
}

/// Normal form of an arbitrary word: fold its letters from last to first
/// through left multiplication.
pub fn normalize(table: &MinimalRootTable, word: &[usize]) -> NormalForm {
    let mut nf = NormalForm::empty();
    for &letter in word.iter().rev() {
        nf = left_multiply(table, letter, &nf);
    }
    nf
}

/// Normal form of the product of two normal forms.
pub fn multiply(table: &MinimalRootTable, a: &NormalForm, b: &NormalForm) -> NormalForm {
    let mut nf = b.clone();
    for &letter in a.letters().iter().rev() {
        nf = left_multiply(table, letter, &nf);
    }
    nf
}

/// Coxeter length of the element spelled by an arbitrary word.
pub fn length(table: &MinimalRootTable, word: &[usize]) -> usize {
    normalize(table, word).len()
}

/// Generators that shorten the element on the left.
pub fn left_descents(table: &MinimalRootTable, nf: &NormalForm) -> GenSet {
    (0..table.rank()).filter(|&s| left_multiply(table, s, nf).len() < nf.len()).collect()
}

/// Count normal forms per length `0..=max_len` by breadth-first extension:
/// a candidate `nf || s` survives iff it is its own normal form.  Fails
/// with a resource error once more than `cap` words are alive.
pub fn growth(table: &MinimalRootTable, max_len: usize, cap: usize) -> Result<Vec<u64>, Error> {
    let mut counts = vec![1u64];
    let mut layer = vec![NormalForm::empty()];
    let mut total = 1usize;
    for _ in 0..max_len {
        let next: Vec<NormalForm> = extend_layer(table, &layer);
        total += next.len();
        if total > cap {
            return Err(Error::Resource(format!(
                "growth enumeration exceeded {cap} words; lower --max-len"
            )));
        }
        counts.push(next.len() as u64);
        layer = next;
        if layer.is_empty() {
            // Finite group exhausted; remaining sphere sizes are zero.
            while counts.len() <= max_len {
                counts.push(0);
            }
            break;
        }
    }
    Ok(counts)
}

fn extend_candidate(table: &MinimalRootTable, nf: &NormalForm, s: usize) -> Option<NormalForm> {
    let mut word = nf.letters().to_vec();
    word.push(s);
    let normalized = normalize(table, &word);
    if normalized.letters() == word.as_slice() {
        Some(normalized)
    } else {
        None
    }
}

#[cfg(feature = "parallel")]
fn extend_layer(table: &MinimalRootTable, layer: &[NormalForm]) -> Vec<NormalForm> {
    layer
        .par_iter()
        .flat_map_iter(|nf| (0..table.rank()).filter_map(move |s| extend_candidate(table, nf, s)))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn extend_layer(table: &MinimalRootTable, layer: &[NormalForm]) -> Vec<NormalForm> {
    layer
        .iter()
        .flat_map(|nf| (0..table.rank()).filter_map(move |s| extend_candidate(table, nf, s)))
        .collect()
}

/// Sequential growth enumeration regardless of the parallel feature, for
/// benchmarking the two code paths against each other.
pub fn growth_seq(table: &MinimalRootTable, max_len: usize, cap: usize) -> Result<Vec<u64>, Error> {
    let mut counts = vec![1u64];
    let mut layer = vec![NormalForm::empty()];
    let mut total = 1usize;
    for _ in 0..max_len {
        let next: Vec<NormalForm> = layer
            .iter()
            .flat_map(|nf| (0..table.rank()).filter_map(move |s| extend_candidate(table, nf, s)))
            .collect();
        total += next.len();
        if total > cap {
            return Err(Error::Resource(format!(
                "growth enumeration exceeded {cap} words; lower --max-len"
            )));
        }
        counts.push(next.len() as u64);
        layer = next;
        if layer.is_empty() {
            while counts.len() <= max_len {
                counts.push(0);
            }
            break;
        }
    }
    Ok(counts)
}

/// Parse the word syntax used on the command line: whitespace-separated
/// 1-based generator numbers, or a compact digit string when the rank is
/// at most 9.  The empty string is the identity.
pub fn parse_word(text: &str, rank: usize) -> Result<Vec<usize>, ParseError> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    let parse_tok = |tok: &str| -> Result<usize, ParseError> {
        let v: usize = tok
            .parse()
            .map_err(|_| ParseError::other(format!("malformed generator {tok:?}")))?;
        if v == 0 || v > rank {
            return Err(ParseError::other(format!("generator {v} out of range 1..={rank}")));
        }
        Ok(v - 1)
    };
    if toks.len() == 1
        && rank <= 9
        && toks[0].len() > 1
        && toks[0].chars().all(|c| c.is_ascii_digit())
    {
        return toks[0].chars().map(|c| parse_tok(&c.to_string())).collect();
    }
    toks.iter().map(|t| parse_tok(t)).collect()
}

/// Render a word as whitespace-separated 1-based generator numbers; the
/// identity renders as "e".
pub fn format_word(word: &[usize]) -> String {
    if word.is_empty() {
        return "e".to_string();
    }
    word.iter().map(|&l| (l + 1).to_string()).collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::naive::build_table_naive;

    fn table(sys: &crate::system::CoxeterSystem) -> MinimalRootTable {
        build_table_naive(sys, 100_000).unwrap()
    }

    #[test]
    fn a2_left_multiplication() {
        let t = table(&corpus::a2());
        // 2 * (1 2) = 1 2 1, by an exchange at the end.
        let nf = NormalForm::from_letters(vec![0, 1]);
        let (out, lookups) = left_multiply_counted(&t, 1, &nf);
        assert_eq!(out.letters(), &[0, 1, 0]);
        assert!(lookups <= 2);
        // 1 * (1 2 1) deletes the first letter.
        let nf = NormalForm::from_letters(vec![0, 1, 0]);
        assert_eq!(left_multiply(&t, 0, &nf).letters(), &[1, 0]);
        // Multiplying the identity inserts at the front.
        assert_eq!(left_multiply(&t, 1, &NormalForm::empty()).letters(), &[1]);
    }

    #[test]
    fn infinite_dihedral_insertion_after_lock() {
        let t = table(&corpus::affine_a1());
        let nf = NormalForm::from_letters(vec![1, 0]);
        let (out, lookups) = left_multiply_counted(&t, 0, &nf);
        assert_eq!(out.letters(), &[0, 1, 0]);
        assert_eq!(lookups, 1);
    }

    #[test]
    fn normalize_examples() {
        let t = table(&corpus::a2());
        assert_eq!(normalize(&t, &[1, 0, 1]).letters(), &[0, 1, 0]);
        assert_eq!(normalize(&t, &[0, 0]).letters(), &[] as &[usize]);
        assert_eq!(normalize(&t, &[]).letters(), &[] as &[usize]);
    }

    #[test]
    fn multiply_examples() {
        let t = table(&corpus::a2());
        let b = NormalForm::from_letters(vec![1, 0]);
        assert_eq!(multiply(&t, &NormalForm::empty(), &b), b);
        let a = NormalForm::from_letters(vec![0]);
        assert_eq!(multiply(&t, &a, &b).letters(), &[0, 1, 0]);
    }

    #[test]
    fn length_and_descents() {
        let t = table(&corpus::a2());
        assert_eq!(length(&t, &[0, 1, 0, 0]), 2);
        let longest = NormalForm::from_letters(vec![0, 1, 0]);
        assert_eq!(left_descents(&t, &longest).iter().collect::<Vec<_>>(), vec![0, 1]);
        assert!(left_descents(&t, &NormalForm::empty()).is_empty());
    }

    #[test]
    fn growth_counts() {
        let t = table(&corpus::a2());
        assert_eq!(growth(&t, 3, 1000).unwrap(), vec![1, 2, 2, 1]);
        assert_eq!(growth(&t, 5, 1000).unwrap(), vec![1, 2, 2, 1, 0, 0]);
        let t = table(&corpus::affine_a1());
        assert_eq!(growth(&t, 4, 1000).unwrap(), vec![1, 2, 2, 2, 2]);
    }

    #[test]
    fn growth_matches_oracle_ball() {
        let sys = corpus::affine_a2();
        let t = table(&sys);
        let ball = crate::oracle::CayleyBall::build(&sys, 10, 1_000_000).unwrap();
        assert_eq!(growth(&t, 10, 1_000_000).unwrap(), ball.growth_counts());
        assert_eq!(growth_seq(&t, 10, 1_000_000).unwrap(), ball.growth_counts());
    }

    #[test]
    fn word_parsing() {
        assert_eq!(parse_word("2 1 2", 2).unwrap(), vec![1, 0, 1]);
        assert_eq!(parse_word("212", 2).unwrap(), vec![1, 0, 1]);
        assert_eq!(parse_word("", 2).unwrap(), Vec::<usize>::new());
        assert_eq!(parse_word("12", 15).unwrap(), vec![11]);
        assert!(parse_word("3", 2).is_err());
        assert!(parse_word("0", 2).is_err());
        assert!(parse_word("x", 2).is_err());
        assert_eq!(format_word(&[1, 0, 1]), "2 1 2");
        assert_eq!(format_word(&[]), "e");
    }

    #[test]
    fn normalize_is_idempotent_on_outputs() {
        let sys = corpus::figure1();
        let t = table(&sys);
        let mut rng = corpus::SplitMix64(7);
        for _ in 0..50 {
            let word: Vec<usize> = (0..12).map(|_| (rng.next_u64() % 3) as usize).collect();
            let nf = normalize(&t, &word);
            assert_eq!(normalize(&t, nf.letters()), nf);
        }
    }
}
#[cfg(test)]
mod inverse_tests {
    use super::*;
    use crate::corpus;
    use crate::oracle::CayleyBall;

    #[test]
    fn product_with_inverse_is_identity_on_ball() {
        for sys in [corpus::a2(), corpus::figure1()] {
            let t = crate::naive::build_table_naive(&sys, 100_000).unwrap();
            let ball = CayleyBall::build(&sys, 6, 1_000_000).unwrap();
            for i in 0..ball.len() as u32 {
                let nf = NormalForm::from_letters(ball.normal_form(i).to_vec());
                let reversed: Vec<usize> = nf.letters().iter().rev().copied().collect();
                let inverse = normalize(&t, &reversed);
                assert!(multiply(&t, &nf, &inverse).is_empty());
                assert!(multiply(&t, &inverse, &nf).is_empty());
            }
        }
    }
}
