//! Backtracking enumeration of all subgroups of bounded index.
//!
//! Entries are filled in row-major order and a new coset is only ever
//! introduced at the first undefined entry, so every leaf is already in
//! breadth-first standard form and each subgroup is produced exactly once.

use super::table::{CosetTable, Presentation};
use crate::error::{Error, Result};

const UNDEF: usize = usize::MAX;

pub const DEFAULT_NODE_BUDGET: usize = 20_000_000;

#[derive(Clone)]
struct Partial {
    size: usize,
    rows: Vec<usize>,
}

struct Search<'a> {
    slots: usize,
    max_index: usize,
    relators: Vec<Vec<usize>>,
    presentation: &'a Presentation,
    nodes: usize,
    budget: usize,
    found: Vec<CosetTable>,
}

impl Search<'_> {
    fn assign(&self, st: &mut Partial, c: usize, s: usize, t: usize) {
        st.rows[c * self.slots + s] = t;
        st.rows[t * self.slots + (s ^ 1)] = c;
    }

    /// Relator deductions until stable; false on a contradiction.
    fn deduce(&self, st: &mut Partial) -> bool {
        let slots = self.slots;
        loop {
            let mut changed = false;
            for c in 0..st.size {
                for r in &self.relators {
                    let mut f = c;
                    let mut i = 0;
                    while i < r.len() && st.rows[f * slots + r[i]] != UNDEF {
                        f = st.rows[f * slots + r[i]];
                        i += 1;
                    }
                    if i == r.len() {
                        if f != c {
                            return false;
                        }
                        continue;
                    }
                    let mut b = c;
                    let mut j = r.len();
                    while j > i && st.rows[b * slots + (r[j - 1] ^ 1)] != UNDEF {
                        b = st.rows[b * slots + (r[j - 1] ^ 1)];
                        j -= 1;
                    }
                    if j == i + 1 {
                        self.assign(st, f, r[i], b);
                        changed = true;
                    } else if j == i {
                        return false;
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn run(&mut self, st: Partial) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::bounded("low-index search nodes", self.budget));
        }
        let slots = self.slots;
        let Some(pos) = st.rows[..st.size * slots].iter().position(|&x| x == UNDEF) else {
            let table = CosetTable::new_unchecked(
                self.presentation,
                st.size,
                st.rows[..st.size * slots].to_vec(),
            );
            debug_assert_eq!(table.standardize(), table);
            self.found.push(table);
            return Ok(());
        };
        let (c, s) = (pos / slots, pos % slots);
        for t in 0..st.size {
            if st.rows[t * slots + (s ^ 1)] == UNDEF {
                let mut next = st.clone();
                self.assign(&mut next, c, s, t);
                if self.deduce(&mut next) {
                    self.run(next)?;
                }
            }
        }
        if st.size < self.max_index {
            let mut next = st;
            let d = next.size;
            next.size += 1;
            self.assign(&mut next, c, s, d);
            if self.deduce(&mut next) {
                self.run(next)?;
            }
        }
        Ok(())
    }
}

/// All subgroups of index at most `n`, as standardized coset tables in
/// canonical order (by size, then flattened rows).
pub fn low_index(p: &Presentation, n: usize) -> Result<Vec<CosetTable>> {
    low_index_with_budget(p, n, DEFAULT_NODE_BUDGET)
}

pub fn low_index_with_budget(p: &Presentation, n: usize, budget: usize) -> Result<Vec<CosetTable>> {
    if n == 0 {
        return Err(Error::invalid("maximum index must be positive"));
    }
    let slots = p.alphabet().slots();
    let mut search = Search {
        slots,
        max_index: n,
        relators: p
            .relators()
            .iter()
            .map(|r| r.letters().iter().map(|l| l.slot()).collect())
            .collect(),
        presentation: p,
        nodes: 0,
        budget,
        found: Vec::new(),
    };
    let start = Partial {
        size: 1,
        rows: vec![UNDEF; n * slots],
    };
    let mut start = start;
    if !search.deduce(&mut start) {
        return Err(Error::invalid("presentation admits no coset table"));
    }
    search.run(start)?;
    let mut found = search.found;
    found.sort();
    Ok(found)
}
