//! Winning conditions over colours.
//!
//! Reach and Safety look at the colours visited at least once; Büchi,
//! co-Büchi, parity and Muller look at the colours visited infinitely often.
//! A play that eventually sees no colour at all has an empty infinite set and
//! is losing for Eve under Muller (the empty set is never in `F`), parity and
//! Büchi.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::arena::ColourId;
use crate::error::{Error, Result};

/// A set of colours as a bitmask; colour `c` is bit `c`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColourSet(pub u64);

pub const MAX_COLOURS: usize = 64;

impl ColourSet {
    pub const EMPTY: ColourSet = ColourSet(0);

    pub fn full(n: usize) -> ColourSet {
        assert!(n <= MAX_COLOURS);
        if n == 64 {
            ColourSet(u64::MAX)
        } else {
            ColourSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(c: ColourId) -> ColourSet {
        ColourSet(1 << c)
    }

    pub fn contains(self, c: ColourId) -> bool {
        c < MAX_COLOURS && self.0 >> c & 1 == 1
    }

    pub fn insert(&mut self, c: ColourId) {
        self.0 |= 1 << c;
    }

    pub fn with(self, c: ColourId) -> ColourSet {
        ColourSet(self.0 | 1 << c)
    }

    pub fn without(self, c: ColourId) -> ColourSet {
        ColourSet(self.0 & !(1 << c))
    }

    pub fn union(self, other: ColourSet) -> ColourSet {
        ColourSet(self.0 | other.0)
    }

    pub fn intersection(self, other: ColourSet) -> ColourSet {
        ColourSet(self.0 & other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset(self, other: ColourSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = ColourId> {
        (0..MAX_COLOURS).filter(move |&c| self.contains(c))
    }

    /// Every subset, including the empty set and `self`.
    pub fn subsets(self) -> impl Iterator<Item = ColourSet> {
        // Standard submask enumeration, descending from `self` to 0.
        let full = self.0;
        let mut next = Some(full);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == 0 { None } else { Some((cur - 1) & full) };
            Some(ColourSet(cur))
        })
    }

    pub fn render(self, colours: &[String]) -> String {
        let names: Vec<&str> = self.iter().map(|c| colours[c].as_str()).collect();
        format!("{{{}}}", names.join(","))
    }
}

impl FromIterator<ColourId> for ColourSet {
    fn from_iter<I: IntoIterator<Item = ColourId>>(iter: I) -> Self {
        let mut s = ColourSet::EMPTY;
        for c in iter {
            s.insert(c);
        }
        s
    }
}

impl fmt::Debug for ColourSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A Muller family `F`: a set of nonempty colour sets.
pub type MullerFamily = BTreeSet<ColourSet>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Condition {
    Reach(ColourSet),
    Safety(ColourSet),
    Buchi(ColourSet),
    CoBuchi(ColourSet),
    /// Min-parity: Eve wins iff the least priority seen infinitely often is
    /// even. Colours without a priority are ignored.
    Parity(BTreeMap<ColourId, u32>),
    Muller(MullerFamily),
}

impl Condition {
    /// Reach and Safety are decided by finite prefixes.
    pub fn is_prefix_decidable(&self) -> bool {
        matches!(self, Condition::Reach(_) | Condition::Safety(_))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Condition::Reach(_) => "reach",
            Condition::Safety(_) => "safety",
            Condition::Buchi(_) => "buchi",
            Condition::CoBuchi(_) => "cobuchi",
            Condition::Parity(_) => "parity",
            Condition::Muller(_) => "muller",
        }
    }

    /// Parses `reach:c1,c2`, `safety:c`, `buchi:c`, `cobuchi:c`,
    /// `parity:c1=0,c2=1` or `muller:{a};{a,c}` against a colour universe.
    pub fn parse(text: &str, colours: &[String]) -> Result<Condition> {
        let (kind, body) = text
            .split_once(':')
            .ok_or_else(|| Error::InvalidCondition(format!("missing `:` in `{text}`")))?;
        let colour = |name: &str| {
            colours
                .iter()
                .position(|c| c == name.trim())
                .ok_or_else(|| Error::UnknownIdentifier(name.trim().to_owned()))
        };
        let set = |body: &str| -> Result<ColourSet> {
            body.split(',')
                .filter(|s| !s.trim().is_empty())
                .map(colour)
                .collect::<Result<ColourSet>>()
        };
        let cond = match kind.trim() {
            "reach" => Condition::Reach(set(body)?),
            "safety" => Condition::Safety(set(body)?),
            "buchi" => Condition::Buchi(set(body)?),
            "cobuchi" => Condition::CoBuchi(set(body)?),
            "parity" => {
                let mut map = BTreeMap::new();
                for item in body.split(',').filter(|s| !s.trim().is_empty()) {
                    let (c, p) = item.split_once('=').ok_or_else(|| {
                        Error::InvalidCondition(format!("parity entry `{item}` lacks `=`"))
                    })?;
                    let p: u32 = p.trim().parse().map_err(|_| {
                        Error::InvalidCondition(format!("priority `{p}` is not a natural"))
                    })?;
                    if map.insert(colour(c)?, p).is_some() {
                        return Err(Error::DuplicateId(c.trim().to_owned()));
                    }
                }
                Condition::Parity(map)
            }
            "muller" => {
                let mut family = MullerFamily::new();
                for item in body.split(';').map(str::trim).filter(|s| !s.is_empty()) {
                    let inner = item
                        .strip_prefix('{')
                        .and_then(|s| s.strip_suffix('}'))
                        .ok_or_else(|| {
                            Error::InvalidCondition(format!("Muller set `{item}` must be braced"))
                        })?;
                    family.insert(set(inner)?);
                }
                validate_family(&family, colours.len())?;
                Condition::Muller(family)
            }
            other => {
                return Err(Error::InvalidCondition(format!("unknown condition kind `{other}`")))
            }
        };
        if colours.len() > MAX_COLOURS {
            return Err(Error::InvalidCondition(format!("more than {MAX_COLOURS} colours")));
        }
        Ok(cond)
    }

    pub fn render(&self, colours: &[String]) -> String {
        let list = |s: &ColourSet| {
            s.iter()
                .map(|c| colours[c].as_str())
                .collect::<Vec<_>>()
                .join(",")
        };
        match self {
            Condition::Reach(s) => format!("reach:{}", list(s)),
            Condition::Safety(s) => format!("safety:{}", list(s)),
            Condition::Buchi(s) => format!("buchi:{}", list(s)),
            Condition::CoBuchi(s) => format!("cobuchi:{}", list(s)),
            Condition::Parity(m) => format!(
                "parity:{}",
                m.iter()
                    .map(|(&c, p)| format!("{}={p}", colours[c]))
                    .collect::<Vec<_>>()
                    .join(",")
            ),
            Condition::Muller(f) => format!(
                "muller:{}",
                f.iter().map(|s| s.render(colours)).collect::<Vec<_>>().join(";")
            ),
        }
    }
}

pub fn validate_family(family: &MullerFamily, colour_count: usize) -> Result<()> {
    let universe = ColourSet::full(colour_count.min(MAX_COLOURS));
    for s in family {
        if s.is_empty() {
            return Err(Error::InvalidCondition("the empty set cannot belong to F".into()));
        }
        if !s.is_subset(universe) {
            return Err(Error::InvalidCondition("F mentions colours outside the universe".into()));
        }
    }
    Ok(())
}

/// Decides a play from its visited colours and its infinitely-visited colours.
pub fn inf_set_verdict(condition: &Condition, inf: ColourSet, visited: ColourSet) -> bool {
    match condition {
        Condition::Reach(target) => !target.intersection(visited).is_empty(),
        Condition::Safety(bad) => bad.intersection(visited).is_empty(),
        Condition::Buchi(target) => !target.intersection(inf).is_empty(),
        Condition::CoBuchi(bad) => bad.intersection(inf).is_empty(),
        Condition::Parity(priorities) => inf
            .iter()
            .filter_map(|c| priorities.get(&c))
            .min()
            .is_some_and(|p| p % 2 == 0),
        Condition::Muller(family) => family.contains(&inf),
    }
}

/// Adam's Muller objective: every nonempty subset of the universe not in `F`.
pub fn muller_complement(family: &MullerFamily, colour_count: usize) -> MullerFamily {
    ColourSet::full(colour_count)
        .subsets()
        .filter(|s| !s.is_empty() && !family.contains(s))
        .collect()
}
