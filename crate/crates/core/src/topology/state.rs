use core::fmt;
use core::ops::Range;
use core::str::FromStr;

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::label::{ModuleLabel, GATE_WORD_BITS};
use crate::{Error, Result};

/// Largest string handled by exhaustive enumeration.
pub const MAX_MODULES: usize = 12;

/// Maximal run of adjacent modules sharing one output level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParallelGroup {
    /// First member (0-based module index).
    pub start: usize,
    /// Number of members.
    pub len: usize,
    /// +1, 0 (bypass) or -1.
    pub polarity: i8,
}

impl ParallelGroup {
    pub fn members(&self) -> Range<usize> {
        self.start..self.start + self.len
    }
}

/// Labels of every module in the string plus the derived group structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StringState {
    labels: Vec<ModuleLabel>,
    groups: Vec<ParallelGroup>,
    level: i32,
    word: u64,
}

impl StringState {
    /// Builds a state, rejecting label sequences that are not feasible: the
    /// first module can't be `P`, and `P` may only join a non-bypass group.
    pub fn new(labels: Vec<ModuleLabel>) -> Result<Self> {
        if labels.is_empty() || labels.len() > MAX_MODULES {
            return Err(Error::ModuleCount(labels.len()));
        }
        let mut groups: Vec<ParallelGroup> = Vec::with_capacity(labels.len());
        let mut word = 0_u64;
        for (i, &label) in labels.iter().enumerate() {
            word = (word << GATE_WORD_BITS) | u64::from(label.gate_word());
            match label.polarity() {
                Some(polarity) => groups.push(ParallelGroup {
                    start: i,
                    len: 1,
                    polarity,
                }),
                None => match groups.last_mut() {
                    Some(g) if g.polarity != 0 => g.len += 1,
                    Some(_) => {
                        return Err(Error::InfeasibleState(alloc::format!(
                            "module {} is P after a bypass group",
                            i + 1
                        )))
                    }
                    None => {
                        return Err(Error::InfeasibleState("first module labeled P".to_string()))
                    }
                },
            }
        }
        let level = groups.iter().map(|g| i32::from(g.polarity)).sum();
        Ok(Self {
            labels,
            groups,
            level,
            word,
        })
    }

    pub fn labels(&self) -> &[ModuleLabel] {
        &self.labels
    }

    pub fn groups(&self) -> &[ParallelGroup] {
        &self.groups
    }

    pub fn level(&self) -> i32 {
        self.level
    }

    pub fn module_count(&self) -> usize {
        self.labels.len()
    }

    /// Concatenated gate words, module 1 in the most significant nibble.
    pub fn gate_word(&self) -> u64 {
        self.word
    }

    /// True when every module is bypassed.
    pub fn is_all_bypass(&self) -> bool {
        self.groups.iter().all(|g| g.polarity == 0)
    }
}

impl fmt::Display for StringState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, label) in self.labels.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(label.as_str())?;
        }
        Ok(())
    }
}

impl FromStr for StringState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let labels = s
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<Vec<ModuleLabel>>>()?;
        StringState::new(labels)
    }
}

/// Number of gate signals that change between two states.
pub fn count_toggles(prev: &StringState, next: &StringState) -> Result<u32> {
    if prev.module_count() != next.module_count() {
        return Err(Error::LengthMismatch {
            left: prev.module_count(),
            right: next.module_count(),
        });
    }
    Ok((prev.word ^ next.word).count_ones())
}

/// Every feasible state of an `n`-module string, sorted by serialization.
///
/// Sorting makes "lowest index" equal to "lexicographically smallest
/// serialization", which is the tie-break rule used by state selection.
#[derive(Debug, Clone)]
pub struct StateSpace {
    n: usize,
    states: Vec<StringState>,
    levels: Vec<i32>,
    words: Vec<u64>,
    by_level: Vec<Vec<u32>>,
    by_word: BTreeMap<u64, u32>,
    neighbors: Option<(u32, Vec<Vec<u32>>)>,
}

impl StateSpace {
    pub fn module_count(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[StringState] {
        &self.states
    }

    /// Output level of every state, by index.
    pub fn levels(&self) -> &[i32] {
        &self.levels
    }

    /// Packed gate word of every state, by index.
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, index: usize) -> &StringState {
        &self.states[index]
    }

    pub fn iter(&self) -> core::slice::Iter<'_, StringState> {
        self.states.iter()
    }

    /// Indices of the states at `level`, in ascending order.
    pub fn at_level(&self, level: i32) -> &[u32] {
        let idx = level + self.n as i32;
        if idx < 0 || idx as usize >= self.by_level.len() {
            return &[];
        }
        &self.by_level[idx as usize]
    }

    pub fn index_of(&self, state: &StringState) -> Option<usize> {
        if state.module_count() != self.n {
            return None;
        }
        self.by_word.get(&state.word).map(|&i| i as usize)
    }

    /// Toggle limit the neighbor lists were built for, if any.
    pub fn neighbor_limit(&self) -> Option<u32> {
        self.neighbors.as_ref().map(|(k, _)| *k)
    }

    /// States reachable from `index` within the enumeration's toggle limit
    /// (including `index` itself).
    pub fn neighbors(&self, index: usize) -> Option<&[u32]> {
        self.neighbors.as_ref().map(|(_, lists)| lists[index].as_slice())
    }

    /// All-bypass state with positive bypass labels, a natural start state.
    pub fn bypass_index(&self) -> usize {
        let word = (0..self.n).fold(0_u64, |w, _| {
            (w << GATE_WORD_BITS) | u64::from(ModuleLabel::BypassPlus.gate_word())
        });
        self.by_word[&word] as usize
    }
}

/// Enumerates every feasible state of an `n`-module string.
///
/// With `max_toggles`, the returned space also carries, per state, the list of
/// states reachable within that many gate toggles.
pub fn enumerate_string_states(n: usize, max_toggles: Option<u32>) -> Result<StateSpace> {
    if n == 0 || n > MAX_MODULES {
        return Err(Error::ModuleCount(n));
    }

    let mut sequences: Vec<Vec<ModuleLabel>> = Vec::new();
    let mut current = Vec::with_capacity(n);
    // Tracks the polarity of the open group so P is only offered when legal.
    fn extend(
        n: usize,
        open_polarity: Option<i8>,
        current: &mut Vec<ModuleLabel>,
        out: &mut Vec<Vec<ModuleLabel>>,
    ) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        for label in ModuleLabel::ALL {
            let next_polarity = match label.polarity() {
                Some(p) => p,
                None => match open_polarity {
                    Some(p) if p != 0 => p,
                    _ => continue,
                },
            };
            current.push(label);
            extend(n, Some(next_polarity), current, out);
            current.pop();
        }
    }
    extend(n, None, &mut current, &mut sequences);

    let mut states = sequences
        .into_iter()
        .map(StringState::new)
        .collect::<Result<Vec<_>>>()?;
    let mut keyed: Vec<(String, StringState)> =
        states.drain(..).map(|s| (s.to_string(), s)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    let states: Vec<StringState> = keyed.into_iter().map(|(_, s)| s).collect();

    let mut by_level = alloc::vec![Vec::new(); 2 * n + 1];
    let mut by_word = BTreeMap::new();
    for (i, s) in states.iter().enumerate() {
        by_level[(s.level + n as i32) as usize].push(i as u32);
        by_word.insert(s.word, i as u32);
    }

    let neighbors = max_toggles.map(|limit| {
        let lists = states
            .iter()
            .map(|a| {
                states
                    .iter()
                    .enumerate()
                    .filter(|(_, b)| (a.word ^ b.word).count_ones() <= limit)
                    .map(|(j, _)| j as u32)
                    .collect()
            })
            .collect();
        (limit, lists)
    });

    Ok(StateSpace {
        n,
        levels: states.iter().map(|s| s.level).collect(),
        words: states.iter().map(|s| s.word).collect(),
        states,
        by_level,
        by_word,
        neighbors,
    })
}
