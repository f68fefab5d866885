//! Invariant suites for built tables and the oracle cross-check.
//!
//! Everything here reports rather than panics: each check produces a line
//! with the first counterexample when it fails, and the full report is the
//! verification surface of the command-line `verify` subcommand.

use crate::brink;
use crate::cyclo::RingElem;
use crate::error::Error;
use crate::naive;
use crate::oracle::CayleyBall;
use crate::system::{CoxeterSystem, Order};
use crate::table::{Entry, MinimalRootTable};
use crate::words::{self, NormalForm};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone)]
pub struct CheckLine {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl CheckLine {
    fn pass(name: &str, detail: String) -> Self {
        CheckLine { name: name.to_string(), pass: true, detail }
    }

    fn fail(name: &str, detail: String) -> Self {
        CheckLine { name: name.to_string(), pass: false, detail }
    }

    fn from_result(name: &str, result: Result<String, String>) -> Self {
        match result {
            Ok(detail) => CheckLine::pass(name, detail),
            Err(detail) => CheckLine::fail(name, detail),
        }
    }
}

impl std::fmt::Display for CheckLine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CHECK {} {} {}", self.name, if self.pass { "PASS" } else { "FAIL" }, self.detail)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub checks: Vec<CheckLine>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

impl std::fmt::Display for Report {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for check in &self.checks {
            writeln!(f, "{check}")?;
        }
        Ok(())
    }
}

/// Structural and arithmetic invariants of a built table.  Requires
/// coordinates (verified builds always carry them).
pub fn table_invariants(sys: &CoxeterSystem, table: &MinimalRootTable) -> Vec<CheckLine> {
    let mut checks = Vec::new();
    checks.push(CheckLine::from_result("involution", check_involution(table)));
    checks.push(CheckLine::from_result("neg_simple_placement", check_neg_simple(table)));
    checks.push(CheckLine::from_result("depth_edges", check_depth_edges(table)));
    checks.push(CheckLine::from_result("trichotomy", check_trichotomy(sys, table)));
    checks.push(CheckLine::from_result("lock_inheritance", check_lock_inheritance(table)));
    checks.push(CheckLine::from_result("coefficient_monotone", check_coefficient_monotone(table)));
    checks.push(CheckLine::from_result("coefficient_bounds", check_coefficient_bounds(sys, table)));
    checks.push(CheckLine::from_result("support_shape", check_support_shape(sys, table)));
    checks.push(CheckLine::from_result("forbidden_patterns", check_forbidden_patterns(sys, table)));
    checks.push(CheckLine::from_result("single_multiple_link", check_single_multiple_link(sys, table)));
    checks
}

fn check_involution(table: &MinimalRootTable) -> Result<String, String> {
    for i in 0..table.count() as u32 {
        for s in 0..table.rank() {
            if let Entry::Root(j) = table.entry(s, i) {
                if j != i {
                    match table.entry(s, j) {
                        Entry::Root(k) if k == i => {}
                        found => {
                            return Err(format!(
                                "s={s} root={i} expected={i} found={found} (via {j})"
                            ))
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{} cells", table.count() * table.rank()))
}

fn check_neg_simple(table: &MinimalRootTable) -> Result<String, String> {
    let rank = table.rank();
    let mut count = 0;
    for i in 0..table.count() as u32 {
        for s in 0..rank {
            if table.entry(s, i) == Entry::NegSimple {
                count += 1;
                if i as usize >= rank || s != i as usize {
                    return Err(format!("negative entry at s={s}, root={i}"));
                }
            }
        }
    }
    if count != rank {
        return Err(format!("{count} negative entries, expected {rank}"));
    }
    if let Some(coords) = table.coords() {
        for i in 0..rank {
            for g in 0..rank {
                let c = &coords.coords[i][g];
                let ok = if g == i { c.is_const(1) } else { c.is_zero() };
                if !ok {
                    return Err(format!("root {i} is not the simple root of generator {i}"));
                }
            }
        }
    }
    Ok(format!("{rank} placements"))
}

fn check_depth_edges(table: &MinimalRootTable) -> Result<String, String> {
    for i in 0..table.count() as u32 {
        for s in 0..table.rank() {
            if let Entry::Root(j) = table.entry(s, i) {
                let (di, dj) = (table.depth(i), table.depth(j));
                let ok = if i == j { di == dj } else { dj == di + 1 || dj + 1 == di };
                if !ok {
                    return Err(format!("s={s} root={i} depth {di} maps to {j} depth {dj}"));
                }
            }
        }
    }
    Ok("all edges shift depth by one".into())
}

/// Exact-sign trichotomy: the entry kind at (s, i) is determined by the
/// sign of the doubled product of the root with the simple root of s.
fn check_trichotomy(sys: &CoxeterSystem, table: &MinimalRootTable) -> Result<String, String> {
    let coords = table.coords().ok_or("coordinates required")?;
    let ring = &coords.ring;
    for i in 0..table.count() as u32 {
        for s in 0..table.rank() {
            let p = naive::doubled_dot(sys, ring, &coords.coords[i as usize], s)
                .map_err(|e| e.to_string())?;
            let sign = ring.sign(&p);
            let entry = table.entry(s, i);
            let ok = match entry {
                Entry::NegSimple => sign > 0,
                Entry::Root(j) if j == i => sign == 0,
                Entry::Root(j) => {
                    (sign > 0 && table.depth(j) < table.depth(i))
                        || (sign < 0 && table.depth(j) > table.depth(i))
                }
                Entry::NonMin => sign < 0,
            };
            if !ok {
                return Err(format!("s={s} root={i} entry={entry} but sign {sign}"));
            }
        }
    }
    Ok("entry kinds match exact signs".into())
}

/// Once a generator locks a root, it locks everything above it in the
/// root graph.  Checked exhaustively over all ascent edges.
fn check_lock_inheritance(table: &MinimalRootTable) -> Result<String, String> {
    for i in 0..table.count() as u32 {
        for s in table.locks(i).iter() {
            for u in 0..table.rank() {
                if let Entry::Root(j) = table.entry(u, i) {
                    if table.depth(j) > table.depth(i) && table.entry(s, j) != Entry::NonMin {
                        return Err(format!(
                            "lock {s} of root {i} not inherited along {u} to {j}: found {}",
                            table.entry(s, j)
                        ));
                    }
                }
            }
        }
    }
    Ok("locks inherited along every ascent edge".into())
}

/// Coordinates never shrink along an ascent edge.
fn check_coefficient_monotone(table: &MinimalRootTable) -> Result<String, String> {
    let coords = table.coords().ok_or("coordinates required")?;
    let ring = &coords.ring;
    for i in 0..table.count() as u32 {
        for s in 0..table.rank() {
            if let Entry::Root(j) = table.entry(s, i) {
                if table.depth(j) == table.depth(i) + 1 {
                    for g in 0..table.rank() {
                        let diff = ring
                            .sub(&coords.coords[j as usize][g], &coords.coords[i as usize][g])
                            .map_err(|e| e.to_string())?;
                        if ring.sign(&diff) < 0 {
                            return Err(format!(
                                "coordinate {g} shrinks along root {i} -> {j} (generator {s})"
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok("coordinates monotone along ascents".into())
}

/// Every nonzero coefficient is 1 or at least sqrt(2), and everything
/// strictly between 1 and 2 is 2cos(pi/m) for a matrix entry m.
fn check_coefficient_bounds(sys: &CoxeterSystem, table: &MinimalRootTable) -> Result<String, String> {
    let coords = table.coords().ok_or("coordinates required")?;
    let ring = &coords.ring;
    let mut edge_constants: Vec<RingElem> = Vec::new();
    for u in 0..sys.rank() {
        for v in u + 1..sys.rank() {
            if let Order::Finite(m) = sys.order(u, v) {
                if m >= 3 {
                    let c = ring.embed(m).map_err(|e| e.to_string())?;
                    if !edge_constants.contains(&c) {
                        edge_constants.push(c);
                    }
                }
            }
        }
    }
    let one = ring.one();
    let two = ring.from_int(2);
    for (i, row) in coords.coords.iter().enumerate() {
        for (g, c) in row.iter().enumerate() {
            if c.is_zero() || *c == one {
                continue;
            }
            let sq = ring.mul(c, c).map_err(|e| e.to_string())?;
            let sq_minus_2 = ring.sub(&sq, &two).map_err(|e| e.to_string())?;
            if ring.sign(&sq_minus_2) < 0 {
                return Err(format!("coefficient {g} of root {i} lies strictly between 0 and sqrt(2)"));
            }
            let below_two = ring.sign(&ring.sub(c, &two).map_err(|e| e.to_string())?) < 0;
            if below_two && !edge_constants.contains(c) {
                return Err(format!(
                    "coefficient {g} of root {i} lies in (1,2) but is no edge constant"
                ));
            }
        }
    }
    Ok("all coefficients bounded away from (1, sqrt 2)".into())
}

/// Supports are connected trees spanning no infinite link.
fn check_support_shape(sys: &CoxeterSystem, table: &MinimalRootTable) -> Result<String, String> {
    let coords = table.coords().ok_or("coordinates required")?;
    for (i, row) in coords.coords.iter().enumerate() {
        let support: Vec<usize> = (0..sys.rank()).filter(|&g| !row[g].is_zero()).collect();
        let in_support = |g: usize| !row[g].is_zero();
        let mut edges = 0;
        for (a, &u) in support.iter().enumerate() {
            for &v in &support[a + 1..] {
                match sys.order(u, v) {
                    Order::Infinite => {
                        return Err(format!("support of root {i} spans an infinite link"))
                    }
                    Order::Finite(m) if m >= 3 => edges += 1,
                    _ => {}
                }
            }
        }
        if edges + 1 != support.len() {
            return Err(format!("support of root {i} is not a tree"));
        }
        // Connectivity via flood fill.
        let mut seen = vec![false; sys.rank()];
        let mut stack = vec![support[0]];
        seen[support[0]] = true;
        while let Some(x) = stack.pop() {
            for y in sys.neighbors(x).iter() {
                if in_support(y) && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        if support.iter().any(|&g| !seen[g]) {
            return Err(format!("support of root {i} is disconnected"));
        }
    }
    Ok("supports are trees without infinite links".into())
}

/// Local patterns that can never occur: a simple link carrying (1, c) with
/// 1 < c < 2, or a multiple link carrying (1, 1).
fn check_forbidden_patterns(sys: &CoxeterSystem, table: &MinimalRootTable) -> Result<String, String> {
    let coords = table.coords().ok_or("coordinates required")?;
    let ring = &coords.ring;
    let one = ring.one();
    let two = ring.from_int(2);
    for (i, row) in coords.coords.iter().enumerate() {
        for u in 0..sys.rank() {
            if row[u].is_zero() {
                continue;
            }
            for v in sys.neighbors(u).iter() {
                if v < u || row[v].is_zero() {
                    continue;
                }
                let m = sys.order(u, v).finite().unwrap_or(0);
                let unit = |g: usize| row[g] == one;
                if m == 3 {
                    for (a, b) in [(u, v), (v, u)] {
                        if unit(a) && !unit(b) {
                            let above_one =
                                ring.sign(&ring.sub(&row[b], &one).map_err(|e| e.to_string())?) > 0;
                            let below_two =
                                ring.sign(&ring.sub(&row[b], &two).map_err(|e| e.to_string())?) < 0;
                            if above_one && below_two {
                                return Err(format!(
                                    "root {i}: simple link ({a},{b}) carries (1, c) with 1 < c < 2"
                                ));
                            }
                        }
                    }
                } else if m > 3 && unit(u) && unit(v) {
                    return Err(format!("root {i}: multiple link ({u},{v}) carries (1, 1)"));
                }
            }
        }
    }
    Ok("no forbidden local patterns".into())
}

/// Indecomposable roots (unit support on the support boundary) have at
/// most one multiple link in their support.
fn check_single_multiple_link(sys: &CoxeterSystem, table: &MinimalRootTable) -> Result<String, String> {
    let coords = table.coords().ok_or("coordinates required")?;
    let ring = &coords.ring;
    let one = ring.one();
    for (i, row) in coords.coords.iter().enumerate() {
        let in_support = |g: usize| !row[g].is_zero();
        let boundary = |g: usize| sys.neighbors(g).iter().filter(|&y| in_support(y)).count() <= 1;
        let indec = (0..sys.rank())
            .filter(|&g| in_support(g) && row[g] == one)
            .all(boundary);
        if !indec {
            continue;
        }
        let mut multiple = 0;
        for u in 0..sys.rank() {
            if !in_support(u) {
                continue;
            }
            for v in sys.neighbors(u).iter() {
                if v > u && in_support(v) {
                    if let Order::Finite(m) = sys.order(u, v) {
                        if m > 3 {
                            multiple += 1;
                        }
                    }
                }
            }
        }
        if multiple > 1 {
            return Err(format!("indecomposable root {i} has {multiple} multiple links"));
        }
    }
    Ok("one multiple link per indecomposable root".into())
}

/// Outcome of the multiplication agreement sweep.
#[derive(Debug, Clone)]
pub struct AgreementStats {
    pub pairs: usize,
    pub max_input_len: usize,
    pub failures: Vec<String>,
    pub lookup_violations: Vec<String>,
}

fn agree_one(
    table: &MinimalRootTable,
    ball: &CayleyBall,
    i: u32,
) -> (usize, Vec<String>, Vec<String>) {
    let mut pairs = 0;
    let mut failures = Vec::new();
    let mut lookup_violations = Vec::new();
    let nf = NormalForm::from_letters(ball.normal_form(i).to_vec());
    for s in 0..table.rank() {
        let Some(swi) = ball.left_neighbor(s, i) else { continue };
        pairs += 1;
        let (got, lookups) = words::left_multiply_counted(table, s, &nf);
        let expected = ball.normal_form(swi);
        if got.letters() != expected {
            failures.push(format!(
                "s={} w={:?}: got {:?}, oracle {:?}",
                s + 1,
                nf.letters(),
                got.letters(),
                expected
            ));
        }
        // Left multiplication is a deletion or an insertion, never a
        // length-preserving rewrite.
        if got.len().abs_diff(nf.len()) != 1 {
            failures.push(format!(
                "s={} w={:?}: length moved from {} to {}",
                s + 1,
                nf.letters(),
                nf.len(),
                got.len()
            ));
        }
        if lookups > nf.len() {
            lookup_violations.push(format!(
                "s={} w={:?}: {lookups} lookups for length {}",
                s + 1,
                nf.letters(),
                nf.len()
            ));
        }
    }
    (pairs, failures, lookup_violations)
}

/// Compare table-driven left multiplication against the oracle for every
/// element of the ball whose product stays inside the ball.
pub fn multiplication_agreement(table: &MinimalRootTable, ball: &CayleyBall) -> AgreementStats {
    let indices: Vec<u32> = (0..ball.len() as u32).collect();
    #[cfg(feature = "parallel")]
    let results: Vec<_> = indices.par_iter().map(|&i| agree_one(table, ball, i)).collect();
    #[cfg(not(feature = "parallel"))]
    let results: Vec<_> = indices.iter().map(|&i| agree_one(table, ball, i)).collect();
    collect_agreement(table, ball, results)
}

/// Sequential variant of the agreement sweep, for benchmarking against the
/// data-parallel one.
pub fn multiplication_agreement_seq(table: &MinimalRootTable, ball: &CayleyBall) -> AgreementStats {
    let results: Vec<_> = (0..ball.len() as u32).map(|i| agree_one(table, ball, i)).collect();
    collect_agreement(table, ball, results)
}

fn collect_agreement(
    _table: &MinimalRootTable,
    ball: &CayleyBall,
    results: Vec<(usize, Vec<String>, Vec<String>)>,
) -> AgreementStats {
    let mut stats = AgreementStats {
        pairs: 0,
        max_input_len: ball.radius(),
        failures: Vec::new(),
        lookup_violations: Vec::new(),
    };
    for (pairs, failures, lookups) in results {
        stats.pairs += pairs;
        stats.failures.extend(failures);
        stats.lookup_violations.extend(lookups);
    }
    stats
}

/// Default oracle ball radius: deep for small ranks, shallow for larger.
pub fn default_radius(rank: usize) -> usize {
    match rank {
        0..=3 => 10,
        4..=5 => 6,
        _ => 4,
    }
}

/// Full verification of one system: build the table with both algorithms,
/// compare canonical forms, audit the structured construction, run the
/// invariant suites, and check multiplication against the Cayley oracle.
pub fn cross_check(
    sys: &CoxeterSystem,
    radius: usize,
    max_roots: usize,
    ball_cap: usize,
) -> Result<Report, Error> {
    let mut checks = Vec::new();

    let naive_table = naive::build_table_naive(sys, max_roots)?;
    let detailed = brink::build_brink_detailed(sys, max_roots)?;
    let canonical = detailed.table().canonicalize()?;
    let naive_form = naive_table.canonical_form()?;
    let brink_form = canonical.serialize()?;
    if naive_form == brink_form {
        checks.push(CheckLine::pass(
            "builder_equivalence",
            format!("N={} canonical tables byte-identical", canonical.count()),
        ));
    } else {
        checks.push(CheckLine::fail(
            "builder_equivalence",
            format!(
                "N={} vs N={}: canonical tables differ",
                naive_table.count(),
                detailed.table().count()
            ),
        ));
    }

    checks.push(match detailed.audit() {
        Ok(()) => CheckLine::pass("construction_audit", "all process tags re-verified".into()),
        Err(e) => CheckLine::fail("construction_audit", e.to_string()),
    });

    checks.extend(table_invariants(sys, &canonical));

    let ball = CayleyBall::build(sys, radius, ball_cap)?;
    let stats = multiplication_agreement(&canonical, &ball);
    if stats.failures.is_empty() {
        checks.push(CheckLine::pass(
            "multiplication_agreement",
            format!("{} products against a ball of {} elements", stats.pairs, ball.len()),
        ));
    } else {
        checks.push(CheckLine::fail(
            "multiplication_agreement",
            format!("{} of {} products differ; first: {}", stats.failures.len(), stats.pairs, stats.failures[0]),
        ));
    }
    if stats.lookup_violations.is_empty() {
        checks.push(CheckLine::pass(
            "linear_scan",
            "lookup count bounded by input length in every call".into(),
        ));
    } else {
        checks.push(CheckLine::fail("linear_scan", stats.lookup_violations[0].clone()));
    }

    Ok(Report { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn cross_check_passes_on_small_groups() {
        for (label, sys) in [
            ("a2", corpus::a2()),
            ("figure1", corpus::figure1()),
            ("affine_b2", corpus::affine_b2()),
        ] {
            let report = cross_check(&sys, 6, 100_000, 1_000_000).unwrap();
            assert!(report.passed(), "{label}:\n{report}");
        }
    }

    #[test]
    fn invariants_pass_on_corpus_tables() {
        for (label, sys) in corpus::named() {
            let table = crate::naive::build_table_naive(&sys, 100_000).unwrap();
            for check in table_invariants(&sys, &table) {
                assert!(check.pass, "{label}: {check}");
            }
        }
    }

    #[test]
    fn corrupted_entry_is_reported() {
        // Redirect one reflection cell and expect the involution check to
        // name the cell with expected and found values.
        let sys = corpus::a2();
        let good = crate::naive::build_table_naive(&sys, 100).unwrap();
        let coords = good.coords().unwrap().clone();
        let mut entries = Vec::new();
        for i in 0..good.count() as u32 {
            for s in 0..good.rank() {
                entries.push(good.entry(s, i));
            }
        }
        // refl(1, root 2) pointed at root 0; send it to root 1 instead.
        entries[2 * good.rank() + 1] = Entry::Root(1);
        let corrupted =
            MinimalRootTable::from_parts(good.rank(), entries, good.depths().to_vec(), Some(coords));
        let checks = table_invariants(&sys, &corrupted);
        let involution = checks.iter().find(|c| c.name == "involution").unwrap();
        assert!(!involution.pass);
        assert!(
            involution.detail.contains("s=1") && involution.detail.contains("root="),
            "{}",
            involution.detail
        );
    }

    #[test]
    fn report_formatting() {
        let report = Report {
            checks: vec![
                CheckLine::pass("alpha", "fine".into()),
                CheckLine::fail("beta", "broken".into()),
            ],
        };
        let text = report.to_string();
        assert!(text.contains("CHECK alpha PASS fine"));
        assert!(text.contains("CHECK beta FAIL broken"));
        assert!(!report.passed());
    }
}
