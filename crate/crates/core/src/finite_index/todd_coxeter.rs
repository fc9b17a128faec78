//! HLT coset enumeration with coincidence processing and a lookahead pass
//! before giving up.

use std::collections::VecDeque;

use super::table::{CosetTable, Presentation};
use crate::error::{Error, Result};
use crate::word::Word;

struct Enumerator<'a> {
    slots: usize,
    relators: &'a [Vec<usize>],
    rows: Vec<Vec<Option<usize>>>,
    parent: Vec<usize>,
    live: usize,
    max_live: usize,
    max_total: usize,
    queue: VecDeque<usize>,
}

enum Overflow {
    Full,
}

impl<'a> Enumerator<'a> {
    fn rep(&mut self, mut c: usize) -> usize {
        let mut root = c;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[c] != root {
            let next = self.parent[c];
            self.parent[c] = root;
            c = next;
        }
        root
    }

    fn is_live(&self, c: usize) -> bool {
        self.parent[c] == c
    }

    fn define(&mut self, c: usize, s: usize) -> std::result::Result<usize, Overflow> {
        if self.live >= self.max_live || self.rows.len() >= self.max_total {
            return Err(Overflow::Full);
        }
        let d = self.rows.len();
        self.rows.push(vec![None; self.slots]);
        self.parent.push(d);
        self.live += 1;
        self.rows[c][s] = Some(d);
        self.rows[d][s ^ 1] = Some(c);
        Ok(d)
    }

    fn merge(&mut self, a: usize, b: usize) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a == b {
            return;
        }
        let (keep, gone) = if a < b { (a, b) } else { (b, a) };
        self.parent[gone] = keep;
        self.live -= 1;
        self.queue.push_back(gone);
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        self.merge(a, b);
        while let Some(e) = self.queue.pop_front() {
            for s in 0..self.slots {
                let Some(f) = self.rows[e][s] else { continue };
                if self.rows[f][s ^ 1] == Some(e) {
                    self.rows[f][s ^ 1] = None;
                }
                let (e1, f1) = (self.rep(e), self.rep(f));
                if let Some(x) = self.rows[e1][s] {
                    self.merge(f1, x);
                } else if let Some(x) = self.rows[f1][s ^ 1] {
                    self.merge(e1, x);
                } else {
                    self.rows[e1][s] = Some(f1);
                    self.rows[f1][s ^ 1] = Some(e1);
                }
            }
        }
    }

    /// Traces `w` from `c` in both directions, deducing or merging when the
    /// gap closes. With `fill`, missing entries are defined.
    fn scan(&mut self, c: usize, w: &[usize], fill: bool) -> std::result::Result<(), Overflow> {
        if w.is_empty() {
            return Ok(());
        }
        let (mut f, mut b) = (c, c);
        let mut i = 0isize;
        let mut j = w.len() as isize - 1;
        loop {
            while i <= j {
                match self.rows[f][w[i as usize]] {
                    Some(t) => {
                        f = t;
                        i += 1;
                    }
                    None => break,
                }
            }
            if i > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j >= i {
                match self.rows[b][w[j as usize] ^ 1] {
                    Some(t) => {
                        b = t;
                        j -= 1;
                    }
                    None => break,
                }
            }
            if j < i {
                self.coincidence(f, b);
                return Ok(());
            }
            let x = w[i as usize];
            if i == j {
                self.rows[f][x] = Some(b);
                self.rows[b][x ^ 1] = Some(f);
                return Ok(());
            }
            if !fill {
                return Ok(());
            }
            self.define(f, x)?;
        }
    }
}

fn slots_of(w: &Word) -> Vec<usize> {
    w.letters().iter().map(|l| l.slot()).collect()
}

/// Enumerates the cosets of `<subgens>` in the group presented by `p`.
///
/// Running out of room is reported as a bounded-search failure: it means
/// the index is larger than `max_cosets` or infinite.
pub fn coset_enumerate(p: &Presentation, subgens: &[Word], max_cosets: usize) -> Result<CosetTable> {
    if max_cosets == 0 {
        return Err(Error::invalid("max_cosets must be positive"));
    }
    for w in subgens {
        p.alphabet().check(w)?;
    }
    let slots = p.alphabet().slots();
    let relators: Vec<Vec<usize>> = p.relators().iter().map(slots_of).collect();
    let subs: Vec<Vec<usize>> = subgens.iter().map(slots_of).collect();
    let mut e = Enumerator {
        slots,
        relators: &relators,
        rows: vec![vec![None; slots]],
        parent: vec![0],
        live: 1,
        max_live: max_cosets,
        max_total: max_cosets.saturating_mul(64).max(1024),
        queue: VecDeque::new(),
    };
    let bounded = || Error::bounded("coset enumeration", max_cosets);

    let run = |e: &mut Enumerator, fill: bool| -> std::result::Result<(), Overflow> {
        for w in &subs {
            let base = e.rep(0);
            e.scan(base, w, fill)?;
        }
        let mut c = 0;
        while c < e.rows.len() {
            if e.is_live(c) {
                for r in e.relators {
                    if !e.is_live(c) {
                        break;
                    }
                    e.scan(c, r, fill)?;
                }
                if fill {
                    for s in 0..e.slots {
                        if e.is_live(c) && e.rows[c][s].is_none() {
                            e.define(c, s)?;
                        }
                    }
                }
            }
            c += 1;
        }
        Ok(())
    };

    loop {
        match run(&mut e, true) {
            Ok(()) => break,
            Err(Overflow::Full) => {
                let before = e.live;
                // Lookahead: deductions and coincidences only.
                let _ = run(&mut e, false);
                if e.live >= before || e.rows.len() >= e.max_total {
                    return Err(bounded());
                }
            }
        }
    }
    // Every live row is complete; rescan until no coincidence remains.
    loop {
        let before = e.live;
        if run(&mut e, false).is_err() {
            return Err(bounded());
        }
        if e.live == before {
            break;
        }
    }
    let live: Vec<usize> = (0..e.rows.len()).filter(|&c| e.is_live(c)).collect();
    let mut number = vec![usize::MAX; e.rows.len()];
    for (i, &c) in live.iter().enumerate() {
        number[c] = i;
    }
    let mut action = vec![0; live.len() * slots];
    for (i, &c) in live.iter().enumerate() {
        for s in 0..slots {
            let t = e.rows[c][s].ok_or_else(bounded)?;
            let t = e.rep(t);
            action[i * slots + s] = number[t];
        }
    }
    let table = CosetTable::new(p, live.len(), action)?;
    Ok(table.standardize())
}
