//! Algorithm X over bitmask options.
//!
//! Items are `0..n_items`; each option is the set of items it covers. The
//! search always branches on the uncovered item with the fewest live options.
//! The first branching level is fanned out across the thread pool; solutions
//! come back as sorted lists of option indices, globally sorted.

use crate::par;

pub(crate) struct ExactCover<'a> {
    n_items: usize,
    options: &'a [u128],
    /// For each item, the options containing it.
    by_item: Vec<Vec<usize>>,
}

impl<'a> ExactCover<'a> {
    pub(crate) fn new(n_items: usize, options: &'a [u128]) -> Self {
        debug_assert!(n_items <= 128);
        let by_item = (0..n_items)
            .map(|i| {
                (0..options.len())
                    .filter(|&o| options[o] >> i & 1 == 1)
                    .collect()
            })
            .collect();
        Self {
            n_items,
            options,
            by_item,
        }
    }

    fn full(&self) -> u128 {
        if self.n_items == 128 {
            u128::MAX
        } else {
            (1u128 << self.n_items) - 1
        }
    }

    /// Uncovered item with the fewest options disjoint from `covered`, along
    /// with those options.
    fn choose(&self, covered: u128) -> Option<(usize, Vec<usize>)> {
        let mut best: Option<(usize, Vec<usize>)> = None;
        for item in 0..self.n_items {
            if covered >> item & 1 == 1 {
                continue;
            }
            let live: Vec<usize> = self.by_item[item]
                .iter()
                .copied()
                .filter(|&o| self.options[o] & covered == 0)
                .collect();
            let better = best.as_ref().is_none_or(|(_, b)| live.len() < b.len());
            if better {
                let empty = live.is_empty();
                best = Some((item, live));
                if empty {
                    break;
                }
            }
        }
        best
    }

    fn search(&self, covered: u128, chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if covered == self.full() {
            let mut s = chosen.clone();
            s.sort_unstable();
            out.push(s);
            return;
        }
        let Some((_, live)) = self.choose(covered) else {
            return;
        };
        for o in live {
            chosen.push(o);
            self.search(covered | self.options[o], chosen, out);
            chosen.pop();
        }
    }

    pub(crate) fn solve(&self) -> Vec<Vec<usize>> {
        let mut solutions = if self.n_items == 0 {
            vec![Vec::new()]
        } else {
            let (_, live) = self.choose(0).expect("at least one item");
            par::map(&live, |&o| {
                let mut out = Vec::new();
                self.search(self.options[o], &mut vec![o], &mut out);
                out
            })
            .into_iter()
            .flatten()
            .collect()
        };
        solutions.sort();
        solutions
    }
}
