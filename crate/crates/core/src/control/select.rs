use super::cost::StateCostTable;
use crate::topology::StateSpace;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Selection {
    pub index: usize,
    /// The toggle limit had to be doubled to find a candidate.
    pub relaxed: bool,
}

/// Cheapest state at `level` reachable from `prev` within `max_toggles` gate
/// changes.
///
/// Ties go to the lowest index, which is the lexicographically smallest
/// serialization. With no candidate the limit is doubled once and the result
/// flagged.
pub fn fast_select(
    space: &StateSpace,
    table: &StateCostTable,
    level: i32,
    prev: usize,
    max_toggles: u32,
) -> Result<Selection> {
    if table.costs.len() != space.len() {
        return Err(Error::LengthMismatch {
            left: space.len(),
            right: table.costs.len(),
        });
    }
    let n = space.module_count();
    if level.unsigned_abs() as usize > n {
        return Err(Error::LevelOutOfRange { level, n });
    }
    let words = space.words();
    let prev_word = words[prev];
    let scan = |limit: u32| {
        let mut best: Option<(usize, f64)> = None;
        for &s in space.at_level(level) {
            let s = s as usize;
            if (words[s] ^ prev_word).count_ones() > limit {
                continue;
            }
            let c = table.costs[s];
            if best.is_none_or(|(_, bc)| c < bc) {
                best = Some((s, c));
            }
        }
        best.map(|(s, _)| s)
    };
    if let Some(index) = scan(max_toggles) {
        return Ok(Selection {
            index,
            relaxed: false,
        });
    }
    let relaxed_limit = max_toggles.saturating_mul(2);
    scan(relaxed_limit)
        .map(|index| Selection {
            index,
            relaxed: true,
        })
        .ok_or_else(|| Error::NoCandidate {
            level,
            prev: alloc::string::ToString::to_string(space.get(prev)),
            max_toggles: relaxed_limit,
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{count_toggles, enumerate_string_states};
    use alloc::vec;

    #[test]
    fn unique_zero_cost_candidate_wins() {
        let space = enumerate_string_states(3, None).unwrap();
        let target = space.index_of(&"B+ S+ B+".parse().unwrap()).unwrap();
        let mut table = StateCostTable::uniform(space.len());
        table.costs.iter_mut().for_each(|c| *c = 1.0);
        table.costs[target] = 0.0;
        let prev = space.index_of(&"B+ B+ B+".parse().unwrap()).unwrap();
        let sel = fast_select(&space, &table, 1, prev, 8).unwrap();
        assert_eq!(sel, Selection { index: target, relaxed: false });
    }

    #[test]
    fn equal_costs_pick_lowest_serialization() {
        let space = enumerate_string_states(4, None).unwrap();
        let table = StateCostTable::uniform(space.len());
        let prev = space.bypass_index();
        for level in -4..=4 {
            let sel = fast_select(&space, &table, level, prev, 64).unwrap();
            let best = space
                .at_level(level)
                .iter()
                .map(|&i| alloc::string::ToString::to_string(space.get(i as usize)))
                .min()
                .unwrap();
            assert_eq!(alloc::string::ToString::to_string(space.get(sel.index)), best);
        }
    }

    #[test]
    fn toggle_limit_beats_cheaper_far_candidate() {
        let space = enumerate_string_states(3, None).unwrap();
        let prev = space.index_of(&"S+ B+ B+".parse().unwrap()).unwrap();
        let mut table = StateCostTable::uniform(space.len());
        table.costs.iter_mut().for_each(|c| *c = 10.0);
        let far = space.index_of(&"B- S+ S+".parse().unwrap()).unwrap();
        table.costs[far] = 0.0;
        let near = space.index_of(&"S+ S+ B+".parse().unwrap()).unwrap();
        table.costs[near] = 1.0;

        let sel = fast_select(&space, &table, 2, prev, 2).unwrap();
        assert_eq!(sel.index, near);
        assert!(!sel.relaxed);

        // exhaustive check of the constrained argmin
        let mut expect = None;
        for &s in space.at_level(2) {
            let s = s as usize;
            if count_toggles(space.get(prev), space.get(s)).unwrap() <= 2
                && expect.is_none_or(|e: usize| table.costs[s] < table.costs[e])
            {
                expect = Some(s);
            }
        }
        assert_eq!(Some(sel.index), expect);
    }

    #[test]
    fn relaxes_once_then_fails() {
        let space = enumerate_string_states(2, None).unwrap();
        let table = StateCostTable::uniform(space.len());
        let prev = space.index_of(&"S- S-".parse().unwrap()).unwrap();
        // S- S- -> S+ S+ toggles all eight gates
        let sel = fast_select(&space, &table, 2, prev, 4).unwrap();
        assert!(sel.relaxed);
        let err = fast_select(&space, &table, 2, prev, 2).unwrap_err();
        assert!(matches!(err, Error::NoCandidate { max_toggles: 4, .. }));
        assert!(fast_select(&space, &table, 3, prev, 2).is_err());
        let short = StateCostTable { costs: vec![0.0], generation: 0 };
        assert!(fast_select(&space, &short, 0, prev, 2).is_err());
    }
}
