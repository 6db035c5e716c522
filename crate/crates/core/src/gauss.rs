//! Gauss diagrams: ordered oriented circles carrying signed arrows.
//!
//! A circle is a cyclic sequence of slots; each slot is one end of an arrow.
//! The tail of an arrow is the over-instance of its crossing and the head is
//! the under-instance. The semiarc (gap) `j` of a circle is the stretch that
//! follows slot `j`; a circle without slots is a single closed semiarc.
//!
//! [`Diagram`] is generic over the per-arrow decoration so the same canonical
//! form and rewriting code serve plain signed diagrams ([`GaussDiagram`]) and
//! locally labeled arrow diagrams.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }

    pub fn value(self) -> i64 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Positive),
            -1 => Some(Sign::Negative),
            _ => None,
        }
    }

    pub const BOTH: [Sign; 2] = [Sign::Positive, Sign::Negative];
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Positive => "+",
            Sign::Negative => "-",
        })
    }
}

/// Which end of an arrow a slot holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum End {
    /// Over-instance.
    Tail,
    /// Under-instance.
    Head,
}

impl End {
    fn index(self) -> usize {
        match self {
            End::Tail => 0,
            End::Head => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Slot {
    pub arrow: usize,
    pub end: End,
}

/// The four strand ends meeting at one crossing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Crossing<T> {
    pub over_in: T,
    pub over_out: T,
    pub under_in: T,
    pub under_out: T,
}

/// Per-arrow data that the canonical form and moves carry along.
pub trait Decoration: Clone + Ord + std::hash::Hash + fmt::Debug {
    fn sign(&self) -> Sign;
}

impl Decoration for Sign {
    fn sign(&self) -> Sign {
        *self
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GaussError {
    #[error("component {component}, position {position}: malformed token {token:?}")]
    Token {
        component: usize,
        position: usize,
        token: String,
    },
    #[error("crossing {id}: {kind} instance appears more than once")]
    Duplicate { id: u64, kind: char },
    #[error("crossing {id}: missing {kind} instance")]
    Missing { id: u64, kind: char },
    #[error("crossing {id}: O and U instances carry different signs")]
    SignMismatch { id: u64 },
    #[error("arrow {0} does not have exactly one tail and one head")]
    BadArrow(usize),
    #[error("slot refers to arrow {0}, which does not exist")]
    UnknownArrow(usize),
    #[error("invalid diagram JSON: {0}")]
    Json(String),
    #[error("illegal move: {0}")]
    IllegalMove(String),
}

/// A diagram on ordered circles whose arrows carry a decoration `A`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Diagram<A> {
    circles: Vec<Vec<Slot>>,
    arrows: Vec<A>,
    /// `loc[a][end] = (circle, position)`.
    loc: Vec<[(usize, usize); 2]>,
}

pub type GaussDiagram = Diagram<Sign>;

impl<A: Decoration> PartialOrd for Diagram<A> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by arrow count, then skeleton (slot counts), then slots, then
/// decorations.
impl<A: Decoration> Ord for Diagram<A> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.arrows
            .len()
            .cmp(&other.arrows.len())
            .then_with(|| {
                let a = self.circles.iter().map(Vec::len);
                let b = other.circles.iter().map(Vec::len);
                a.cmp(b)
            })
            .then_with(|| self.circles.cmp(&other.circles))
            .then_with(|| self.arrows.cmp(&other.arrows))
    }
}

impl<A: Decoration> fmt::Debug for Diagram<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let circles: Vec<String> = self
            .circles
            .iter()
            .map(|c| {
                c.iter()
                    .map(|s| {
                        let e = if s.end == End::Tail { 'O' } else { 'U' };
                        format!("{e}{}", s.arrow + 1)
                    })
                    .collect::<String>()
            })
            .collect();
        write!(f, "[{}] {:?}", circles.join(";"), self.arrows)
    }
}

impl<A: Decoration> Diagram<A> {
    /// Builds a diagram, checking that each arrow has one tail and one head.
    pub fn new(circles: Vec<Vec<Slot>>, arrows: Vec<A>) -> Result<Self, GaussError> {
        const NONE: (usize, usize) = (usize::MAX, usize::MAX);
        let mut loc = vec![[NONE; 2]; arrows.len()];
        for (c, circle) in circles.iter().enumerate() {
            for (p, s) in circle.iter().enumerate() {
                let entry = loc.get_mut(s.arrow).ok_or(GaussError::UnknownArrow(s.arrow))?;
                if entry[s.end.index()] != NONE {
                    return Err(GaussError::BadArrow(s.arrow));
                }
                entry[s.end.index()] = (c, p);
            }
        }
        if let Some(a) = loc.iter().position(|l| l[0] == NONE || l[1] == NONE) {
            return Err(GaussError::BadArrow(a));
        }
        Ok(Diagram { circles, arrows, loc })
    }

    /// `c` circles with no arrows.
    pub fn empty(c: usize) -> Self {
        Diagram {
            circles: vec![Vec::new(); c],
            arrows: Vec::new(),
            loc: Vec::new(),
        }
    }

    pub fn num_components(&self) -> usize {
        self.circles.len()
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn circles(&self) -> &[Vec<Slot>] {
        &self.circles
    }

    pub fn arrows(&self) -> &[A] {
        &self.arrows
    }

    pub fn arrow(&self, a: usize) -> &A {
        &self.arrows[a]
    }

    pub fn tail(&self, a: usize) -> (usize, usize) {
        self.loc[a][0]
    }

    pub fn head(&self, a: usize) -> (usize, usize) {
        self.loc[a][1]
    }

    pub fn end(&self, a: usize, end: End) -> (usize, usize) {
        self.loc[a][end.index()]
    }

    /// Index of the first semiarc of each circle, plus the total at the end.
    pub fn semiarc_offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.circles.len() + 1);
        let mut acc = 0;
        for c in &self.circles {
            out.push(acc);
            acc += c.len().max(1);
        }
        out.push(acc);
        out
    }

    pub fn num_semiarcs(&self) -> usize {
        self.circles.iter().map(|c| c.len().max(1)).sum()
    }

    /// Semiarcs around every crossing, as global semiarc indices.
    pub fn crossing_semiarcs(&self) -> Vec<Crossing<usize>> {
        let off = self.semiarc_offsets();
        let gap_before = |(c, p): (usize, usize)| {
            let k = self.circles[c].len();
            off[c] + (p + k - 1) % k
        };
        let gap_after = |(c, p): (usize, usize)| off[c] + p;
        (0..self.arrows.len())
            .map(|a| Crossing {
                over_in: gap_before(self.tail(a)),
                over_out: gap_after(self.tail(a)),
                under_in: gap_before(self.head(a)),
                under_out: gap_after(self.head(a)),
            })
            .collect()
    }

    /// Component of each semiarc.
    pub fn semiarc_components(&self) -> Vec<usize> {
        self.circles
            .iter()
            .enumerate()
            .flat_map(|(c, s)| std::iter::repeat_n(c, s.len().max(1)))
            .collect()
    }

    /// For an arrow with both ends on one circle, the number of slots
    /// strictly between them (walking forward from the tail).
    pub fn endpoints_between(&self, a: usize) -> Option<usize> {
        let (ct, pt) = self.tail(a);
        let (ch, ph) = self.head(a);
        if ct != ch {
            return None;
        }
        let k = self.circles[ct].len();
        Some((ph + k - pt - 1) % k)
    }

    /// Replaces every decoration.
    pub fn map<B: Decoration>(&self, mut f: impl FnMut(usize, &A) -> B) -> Diagram<B> {
        Diagram {
            circles: self.circles.clone(),
            arrows: self.arrows.iter().enumerate().map(|(i, a)| f(i, a)).collect(),
            loc: self.loc.clone(),
        }
    }

    /// Keeps only the arrows with `keep[a]`, renumbering them in order.
    /// Circles are all retained.
    pub fn subdiagram(&self, keep: &[bool]) -> Self {
        let mut renum = vec![usize::MAX; self.arrows.len()];
        let mut arrows = Vec::new();
        for (a, dec) in self.arrows.iter().enumerate() {
            if keep[a] {
                renum[a] = arrows.len();
                arrows.push(dec.clone());
            }
        }
        let circles = self
            .circles
            .iter()
            .map(|c| {
                c.iter()
                    .filter(|s| keep[s.arrow])
                    .map(|s| Slot {
                        arrow: renum[s.arrow],
                        end: s.end,
                    })
                    .collect()
            })
            .collect();
        Diagram::new(circles, arrows).expect("subdiagram of a valid diagram")
    }

    /// Appends `extra` empty circles.
    pub fn with_empty_circles(&self, extra: usize) -> Self {
        let mut d = self.clone();
        d.circles.extend(std::iter::repeat_with(Vec::new).take(extra));
        d
    }

    /// Rotates circle `c` so that slot `r` comes first.
    pub fn rotated(&self, c: usize, r: usize) -> Self {
        let mut circles = self.circles.clone();
        if !circles[c].is_empty() {
            let r = r % circles[c].len();
            circles[c].rotate_left(r);
        }
        Diagram::new(circles, self.arrows.clone()).expect("rotation keeps validity")
    }

    /// Lexicographically minimal representative over independent rotations
    /// of each circle, with arrows renumbered by first appearance.
    pub fn canonical(&self) -> Self {
        const NONE: usize = usize::MAX;
        let m = self.arrows.len();
        let mut states: Vec<(Vec<usize>, usize)> = vec![(vec![NONE; m], 0)];
        let mut out_circles: Vec<Vec<Slot>> = Vec::with_capacity(self.circles.len());
        for circle in &self.circles {
            let k = circle.len();
            if k == 0 {
                out_circles.push(Vec::new());
                continue;
            }
            let mut best: Vec<(usize, End, &A)> = Vec::new();
            let mut winners: Vec<(Vec<usize>, usize)> = Vec::new();
            let mut seen: HashSet<Vec<usize>> = HashSet::new();
            let mut toks: Vec<(usize, End, &A)> = Vec::with_capacity(k);
            for (map0, next0) in &states {
                for r in 0..k {
                    let mut map = map0.clone();
                    let mut next = *next0;
                    toks.clear();
                    let mut ord = if best.is_empty() { Ordering::Less } else { Ordering::Equal };
                    for i in 0..k {
                        let s = circle[(r + i) % k];
                        if map[s.arrow] == NONE {
                            map[s.arrow] = next;
                            next += 1;
                        }
                        let t = (map[s.arrow], s.end, &self.arrows[s.arrow]);
                        if ord == Ordering::Equal {
                            ord = t.cmp(&best[i]);
                            if ord == Ordering::Greater {
                                break;
                            }
                        }
                        toks.push(t);
                    }
                    match ord {
                        Ordering::Less => {
                            best = toks.clone();
                            winners.clear();
                            seen.clear();
                            seen.insert(map.clone());
                            winners.push((map, next));
                        }
                        Ordering::Equal => {
                            if seen.insert(map.clone()) {
                                winners.push((map, next));
                            }
                        }
                        Ordering::Greater => {}
                    }
                }
            }
            out_circles.push(
                best.iter()
                    .map(|&(arrow, end, _)| Slot { arrow, end })
                    .collect(),
            );
            states = winners;
        }
        let (map, _) = &states[0];
        let mut arrows: Vec<Option<A>> = vec![None; m];
        for (old, &new) in map.iter().enumerate() {
            arrows[new] = Some(self.arrows[old].clone());
        }
        let arrows = arrows.into_iter().map(|a| a.expect("every arrow is placed")).collect();
        Diagram::new(out_circles, arrows).expect("canonical form is valid")
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.canonical()
    }

    /// Replaces blocks of slots according to `runs`. See [`Run`].
    pub fn rewrite(&self, runs: &[Run], new_arrows: Vec<A>) -> Result<Rewritten<A>, GaussError> {
        let mut deleted: Vec<Vec<bool>> = self.circles.iter().map(|c| vec![false; c.len()]).collect();
        for run in runs {
            let k = self.circles.get(run.circle).map(Vec::len).ok_or_else(|| {
                GaussError::IllegalMove(format!("no circle {}", run.circle))
            })?;
            if run.del_len > k || (k > 0 && run.pos >= k) || (k == 0 && run.pos != 0) {
                return Err(GaussError::IllegalMove("run out of range".into()));
            }
            for i in 0..run.del_len {
                let p = (run.pos + i) % k;
                if deleted[run.circle][p] {
                    return Err(GaussError::IllegalMove("overlapping runs".into()));
                }
                deleted[run.circle][p] = true;
            }
        }
        // Old arrows referenced by run items survive; others must keep both
        // ends outside every deleted block or lose both.
        let m = self.arrows.len();
        let mut reinserted = vec![[false; 2]; m];
        for run in runs {
            for it in &run.items {
                if let Item::Old(a, e) = *it {
                    if a >= m {
                        return Err(GaussError::UnknownArrow(a));
                    }
                    reinserted[a][e.index()] = true;
                }
            }
        }
        let mut survives = vec![false; m];
        for a in 0..m {
            let present = |e: End| {
                let (c, p) = self.end(a, e);
                !deleted[c][p] || reinserted[a][e.index()]
            };
            match (present(End::Tail), present(End::Head)) {
                (true, true) => survives[a] = true,
                (false, false) => {}
                _ => return Err(GaussError::IllegalMove(format!("arrow {} is split by the rewrite", a + 1))),
            }
        }
        let mut arrow_source = Vec::new();
        let mut renum = vec![usize::MAX; m];
        let mut arrows = Vec::new();
        for a in 0..m {
            if survives[a] {
                renum[a] = arrows.len();
                arrow_source.push(ArrowSource::Old(a));
                arrows.push(self.arrows[a].clone());
            }
        }
        let base = arrows.len();
        for (j, dec) in new_arrows.into_iter().enumerate() {
            arrow_source.push(ArrowSource::New(j));
            arrows.push(dec);
        }
        let off = self.semiarc_offsets();
        let mut circles = Vec::with_capacity(self.circles.len());
        let mut gap_source: Vec<Option<usize>> = Vec::new();
        for (c, circle) in self.circles.iter().enumerate() {
            let k = circle.len();
            let mut slots = Vec::new();
            let mut sources = Vec::new();
            let mut fallback = None;
            let emit_run = |run: &Run, slots: &mut Vec<Slot>, sources: &mut Vec<Option<usize>>| {
                let after_gap = if k == 0 { 0 } else { (run.pos + run.del_len + k - 1) % k };
                for (i, it) in run.items.iter().enumerate() {
                    slots.push(match *it {
                        Item::Old(a, end) => Slot { arrow: renum[a], end },
                        Item::New(j, end) => Slot { arrow: base + j, end },
                    });
                    let last = i + 1 == run.items.len();
                    sources.push(last.then_some(off[c] + after_gap));
                }
                off[c] + after_gap
            };
            let here: Vec<&Run> = runs.iter().filter(|r| r.circle == c).collect();
            if k == 0 {
                for run in &here {
                    fallback = Some(emit_run(run, &mut slots, &mut sources));
                }
            }
            for i in 0..k {
                for run in here.iter().filter(|r| r.pos == i) {
                    fallback = Some(emit_run(run, &mut slots, &mut sources));
                }
                if !deleted[c][i] {
                    let s = circle[i];
                    slots.push(Slot { arrow: renum[s.arrow], end: s.end });
                    sources.push(Some(off[c] + i));
                }
            }
            if slots.is_empty() {
                gap_source.push(Some(fallback.unwrap_or(off[c])));
            } else {
                gap_source.extend(sources);
            }
            circles.push(slots);
        }
        let diagram = Diagram::new(circles, arrows)?;
        Ok(Rewritten {
            diagram,
            gap_source,
            arrow_source,
        })
    }
}

/// One contiguous block replacement on a circle: slots
/// `pos, pos+1, .., pos+del_len-1` (cyclically) are replaced by `items`.
/// With `del_len == 0` the items go into the gap just before slot `pos`
/// (use `pos = 0` on an empty circle).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub circle: usize,
    pub pos: usize,
    pub del_len: usize,
    pub items: Vec<Item>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Item {
    /// An end of an existing arrow, moved here.
    Old(usize, End),
    /// An end of the `j`-th newly created arrow.
    New(usize, End),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArrowSource {
    Old(usize),
    New(usize),
}

/// Result of [`Diagram::rewrite`].
#[derive(Clone, Debug)]
pub struct Rewritten<A: Decoration> {
    pub diagram: Diagram<A>,
    /// For each new semiarc, the old semiarc it continues, or `None` for
    /// semiarcs created strictly inside a run.
    pub gap_source: Vec<Option<usize>>,
    pub arrow_source: Vec<ArrowSource>,
}

/// Parses a signed Gauss code such as `U1-O2-U3+O4+U2-O1-U4+O3+`.
/// Components are separated by `;`, an empty component is a circle with no
/// crossings.
pub fn parse_gauss_code(code: &str) -> Result<GaussDiagram, GaussError> {
    use std::collections::BTreeMap;
    let mut ids: BTreeMap<u64, usize> = BTreeMap::new();
    let mut signs: Vec<(u64, Option<Sign>, Option<Sign>)> = Vec::new();
    let mut circles = Vec::new();
    for (ci, comp) in code.split(';').enumerate() {
        let chars: Vec<char> = comp.chars().filter(|c| !c.is_whitespace()).collect();
        let mut i = 0;
        let mut slots = Vec::new();
        while i < chars.len() {
            let start = i;
            let bad = |j: usize| GaussError::Token {
                component: ci + 1,
                position: slots_len_hint(start, &chars),
                token: chars[start..j.min(chars.len())].iter().collect(),
            };
            let end = match chars[i].to_ascii_uppercase() {
                'O' => End::Tail,
                'U' => End::Head,
                _ => return Err(bad(i + 1)),
            };
            i += 1;
            let ds = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if ds == i || i >= chars.len() {
                return Err(bad(i + 1));
            }
            let id: u64 = chars[ds..i].iter().collect::<String>().parse().map_err(|_| bad(i))?;
            if id == 0 {
                return Err(bad(i));
            }
            let sign = match chars[i] {
                '+' => Sign::Positive,
                '-' => Sign::Negative,
                _ => return Err(bad(i + 1)),
            };
            i += 1;
            let a = *ids.entry(id).or_insert_with(|| {
                signs.push((id, None, None));
                signs.len() - 1
            });
            let entry = &mut signs[a];
            let (kind, seen) = match end {
                End::Tail => ('O', &mut entry.1),
                End::Head => ('U', &mut entry.2),
            };
            if seen.is_some() {
                return Err(GaussError::Duplicate { id, kind });
            }
            *seen = Some(sign);
            slots.push(Slot { arrow: a, end });
        }
        circles.push(slots);
    }
    let mut arrows = Vec::with_capacity(signs.len());
    for &(id, o, u) in &signs {
        match (o, u) {
            (None, _) => return Err(GaussError::Missing { id, kind: 'O' }),
            (_, None) => return Err(GaussError::Missing { id, kind: 'U' }),
            (Some(a), Some(b)) if a != b => return Err(GaussError::SignMismatch { id }),
            (Some(a), Some(_)) => arrows.push(a),
        }
    }
    Diagram::new(circles, arrows)
}

fn slots_len_hint(char_pos: usize, chars: &[char]) -> usize {
    // 1-based token index: count sign characters before the token.
    chars[..char_pos].iter().filter(|c| **c == '+' || **c == '-').count() + 1
}

impl GaussDiagram {
    /// Signed Gauss code with arrows numbered from 1.
    pub fn to_code(&self) -> String {
        self.circles
            .iter()
            .map(|c| {
                c.iter()
                    .map(|s| {
                        let e = if s.end == End::Tail { 'O' } else { 'U' };
                        format!("{e}{}{}", s.arrow + 1, self.arrows[s.arrow])
                    })
                    .collect::<String>()
            })
            .collect::<Vec<_>>()
            .join(";")
    }

    /// Signed count of arrows with tail on circle `i` and head on `j`.
    pub fn directed_linking(&self, i: usize, j: usize) -> i64 {
        (0..self.num_arrows())
            .filter(|&a| self.tail(a).0 == i && self.head(a).0 == j)
            .map(|a| self.arrows[a].value())
            .sum()
    }

    /// Applies a move, returning the new diagram and the correspondence
    /// data needed to carry a labeling across.
    pub fn apply_move(&self, mv: &Move) -> Result<Rewritten<Sign>, GaussError> {
        let (runs, new) = self.move_runs(mv)?;
        self.rewrite(&runs, new)
    }

    fn move_runs(&self, mv: &Move) -> Result<(Vec<Run>, Vec<Sign>), GaussError> {
        let illegal = |s: &str| Err(GaussError::IllegalMove(s.into()));
        let gap_run = |circle: usize, gap: usize, items: Vec<Item>| -> Result<Run, GaussError> {
            let k = self
                .circles
                .get(circle)
                .ok_or_else(|| GaussError::IllegalMove(format!("no circle {}", circle + 1)))?
                .len();
            if (k == 0 && gap != 0) || (k > 0 && gap >= k) {
                return Err(GaussError::IllegalMove(format!("no gap {gap} on circle {}", circle + 1)));
            }
            Ok(Run {
                circle,
                pos: if k == 0 { 0 } else { (gap + 1) % k },
                del_len: 0,
                items,
            })
        };
        match *mv {
            Move::R1Insert { circle, gap, head_first, sign } => {
                let items = if head_first {
                    vec![Item::New(0, End::Head), Item::New(0, End::Tail)]
                } else {
                    vec![Item::New(0, End::Tail), Item::New(0, End::Head)]
                };
                Ok((vec![gap_run(circle, gap, items)?], vec![sign]))
            }
            Move::R1Delete { arrow } => {
                if arrow >= self.num_arrows() {
                    return illegal("no such arrow");
                }
                match self.r1_block(arrow) {
                    Some((c, pos)) => Ok((vec![Run { circle: c, pos, del_len: 2, items: vec![] }], vec![])),
                    None => illegal("arrow ends are not adjacent"),
                }
            }
            Move::R2Insert { over, under, parallel, first_sign, under_first } => {
                let tails = vec![Item::New(0, End::Tail), Item::New(1, End::Tail)];
                let heads = if parallel {
                    vec![Item::New(0, End::Head), Item::New(1, End::Head)]
                } else {
                    vec![Item::New(1, End::Head), Item::New(0, End::Head)]
                };
                let signs = vec![first_sign, first_sign.flip()];
                if over == under {
                    let items = if under_first { [heads, tails].concat() } else { [tails, heads].concat() };
                    Ok((vec![gap_run(over.0, over.1, items)?], signs))
                } else {
                    Ok((vec![gap_run(over.0, over.1, tails)?, gap_run(under.0, under.1, heads)?], signs))
                }
            }
            Move::R2Delete { first, second } => match self.r2_blocks(first, second) {
                Some(blocks) => Ok((
                    blocks
                        .iter()
                        .map(|&(c, pos)| Run { circle: c, pos, del_len: 2, items: vec![] })
                        .collect(),
                    vec![],
                )),
                None => illegal("arrows do not bound a bigon"),
            },
            Move::R3 { arrows, order } => {
                if !self.is_r3_site(arrows, order) {
                    return illegal("arrows do not form a valid triangle");
                }
                let [a, b, c] = arrows;
                let pairs = [
                    ((a, End::Tail), (b, End::Tail)),
                    ((a, End::Head), (c, End::Tail)),
                    ((b, End::Head), (c, End::Head)),
                ];
                let runs = pairs
                    .iter()
                    .zip(order)
                    .map(|(&(x, y), first_is_x)| {
                        let (f, s) = if first_is_x { (x, y) } else { (y, x) };
                        let (circle, pos) = self.end(f.0, f.1);
                        Run {
                            circle,
                            pos,
                            del_len: 2,
                            items: vec![Item::Old(s.0, s.1), Item::Old(f.0, f.1)],
                        }
                    })
                    .collect();
                Ok((runs, vec![]))
            }
        }
    }

    /// If the arrow's ends are adjacent, the block `(circle, first position)`.
    fn r1_block(&self, a: usize) -> Option<(usize, usize)> {
        let (ct, pt) = self.tail(a);
        let (ch, ph) = self.head(a);
        if ct != ch {
            return None;
        }
        let k = self.circles[ct].len();
        if (pt + 1) % k == ph {
            Some((ct, pt))
        } else if (ph + 1) % k == pt {
            Some((ct, ph))
        } else {
            None
        }
    }

    fn follows(&self, x: (usize, usize), y: (usize, usize)) -> bool {
        x.0 == y.0 && (x.1 + 1) % self.circles[x.0].len() == y.1
    }

    /// Blocks of an R2 pair: tail of `first` directly before tail of
    /// `second`, heads adjacent in either order, opposite signs.
    fn r2_blocks(&self, first: usize, second: usize) -> Option<[(usize, usize); 2]> {
        let m = self.num_arrows();
        if first >= m || second >= m || first == second || self.arrows[first] == self.arrows[second] {
            return None;
        }
        let (t1, t2, h1, h2) = (self.tail(first), self.tail(second), self.head(first), self.head(second));
        if !self.follows(t1, t2) {
            return None;
        }
        if self.follows(h1, h2) {
            Some([t1, h1])
        } else if self.follows(h2, h1) {
            Some([t1, h2])
        } else {
            None
        }
    }

    /// `arrows = [a, b, c]` with `a` from the top strand to the middle, `b`
    /// from top to bottom and `c` from middle to bottom. `order[s]` says
    /// whether the first-named end comes first on strand `s` (top, middle,
    /// bottom).
    fn is_r3_site(&self, arrows: [usize; 3], order: [bool; 3]) -> bool {
        let m = self.num_arrows();
        let [a, b, c] = arrows;
        if a >= m || b >= m || c >= m || a == b || b == c || a == c {
            return false;
        }
        let pairs = [
            (self.tail(a), self.tail(b)),
            (self.head(a), self.tail(c)),
            (self.head(b), self.head(c)),
        ];
        let adjacent = pairs
            .iter()
            .zip(order)
            .all(|(&(x, y), first)| if first { self.follows(x, y) } else { self.follows(y, x) });
        adjacent && r3_keys().contains(&(order, [self.arrows[a], self.arrows[b], self.arrows[c]]))
    }

    /// Every R1 deletion, R2 deletion and R3 move available on the diagram.
    pub fn local_moves(&self) -> Vec<Move> {
        let m = self.num_arrows();
        let mut out = Vec::new();
        for a in 0..m {
            if self.r1_block(a).is_some() {
                out.push(Move::R1Delete { arrow: a });
            }
        }
        for first in 0..m {
            for second in 0..m {
                if self.r2_blocks(first, second).is_some() {
                    out.push(Move::R2Delete { first, second });
                }
            }
        }
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    for bits in 0..8u8 {
                        let order = [bits & 1 != 0, bits & 2 != 0, bits & 4 != 0];
                        if self.is_r3_site([a, b, c], order) {
                            out.push(Move::R3 { arrows: [a, b, c], order });
                        }
                    }
                }
            }
        }
        out
    }

    /// Every R1 and R2 insertion.
    pub fn insertion_moves(&self) -> Vec<Move> {
        let gaps: Vec<(usize, usize)> = self
            .circles
            .iter()
            .enumerate()
            .flat_map(|(c, s)| (0..s.len().max(1)).map(move |g| (c, g)))
            .collect();
        let mut out = Vec::new();
        for &(circle, gap) in &gaps {
            for head_first in [false, true] {
                for sign in Sign::BOTH {
                    out.push(Move::R1Insert { circle, gap, head_first, sign });
                }
            }
        }
        for &over in &gaps {
            for &under in &gaps {
                for parallel in [true, false] {
                    for first_sign in Sign::BOTH {
                        for under_first in [false, true] {
                            if under_first && over != under {
                                continue;
                            }
                            out.push(Move::R2Insert { over, under, parallel, first_sign, under_first });
                        }
                    }
                }
            }
        }
        out
    }
}

/// An oriented Reidemeister move on a [`GaussDiagram`]. Gaps are
/// `(circle, semiarc index within the circle)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    R1Insert {
        circle: usize,
        gap: usize,
        head_first: bool,
        sign: Sign,
    },
    R1Delete {
        arrow: usize,
    },
    /// Two new arrows with adjacent tails in gap `over` and adjacent heads
    /// in gap `under`; the first arrow has `first_sign`, the second the
    /// opposite. `parallel` keeps the head order equal to the tail order.
    /// When both gaps coincide `under_first` puts the heads first.
    R2Insert {
        over: (usize, usize),
        under: (usize, usize),
        parallel: bool,
        first_sign: Sign,
        under_first: bool,
    },
    R2Delete {
        first: usize,
        second: usize,
    },
    /// Reverses the three pairs of adjacent ends of a triangle.
    R3 {
        arrows: [usize; 3],
        order: [bool; 3],
    },
}

impl Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i64(self.value())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = i64::deserialize(d)?;
        Sign::from_value(v).ok_or_else(|| serde::de::Error::custom(format!("sign must be 1 or -1, got {v}")))
    }
}

/// `(order bits, signs)` of every triangle that occurs in a real R3 move.
///
/// Three straight oriented lines bound a triangle; every choice of line
/// orientations and heights, read off before and after sliding one line
/// across the opposite vertex, gives one valid configuration.
pub(crate) fn r3_keys() -> &'static HashSet<([bool; 3], [Sign; 3])> {
    static KEYS: OnceLock<HashSet<([bool; 3], [Sign; 3])>> = OnceLock::new();
    KEYS.get_or_init(|| {
        use itertools::Itertools;
        let dirs = [(1i64, 0i64), (0, 1), (1, -1)];
        // Pairwise intersections of y = 0, x = 0, x + y = 1.
        let meet = |i: usize, j: usize| match (i.min(j), i.max(j)) {
            (0, 1) => (0i64, 0i64),
            (0, 2) => (1, 0),
            _ => (0, 1),
        };
        let mut keys = HashSet::new();
        for flips in 0..8u8 {
            let d: Vec<(i64, i64)> = (0..3)
                .map(|i| {
                    let s = if flips >> i & 1 == 1 { -1 } else { 1 };
                    (dirs[i].0 * s, dirs[i].1 * s)
                })
                .collect();
            for h in (0..3).permutations(3) {
                // h = [top, middle, bottom] line indices.
                let along = |line: usize, other: usize| {
                    let p = meet(line, other);
                    p.0 * d[line].0 + p.1 * d[line].1
                };
                let sign = |over: usize, under: usize| {
                    let (o, u) = (d[over], d[under]);
                    if o.0 * u.1 - o.1 * u.0 > 0 {
                        Sign::Positive
                    } else {
                        Sign::Negative
                    }
                };
                let (t, mid, b) = (h[0], h[1], h[2]);
                let order = [
                    along(t, mid) < along(t, b),
                    along(mid, t) < along(mid, b),
                    along(b, t) < along(b, mid),
                ];
                let signs = [sign(t, mid), sign(t, b), sign(mid, b)];
                keys.insert((order, signs));
                keys.insert((order.map(|o| !o), signs));
            }
        }
        keys
    })
}

#[derive(Serialize, Deserialize)]
#[serde(bound(deserialize = "L: Deserialize<'de>"))]
struct ArrowJson<L> {
    tail: [usize; 2],
    head: [usize; 2],
    sign: Sign,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    labels: Option<L>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(deserialize = "L: Deserialize<'de>"))]
struct DiagramJson<L> {
    components: Vec<usize>,
    arrows: Vec<ArrowJson<L>>,
}

/// Conversion between a decoration and its JSON fields.
pub trait JsonDecoration: Decoration {
    type Labels: Serialize + for<'de> Deserialize<'de>;
    fn to_json(&self) -> (Sign, Option<Self::Labels>);
    fn from_json(sign: Sign, labels: Option<Self::Labels>) -> Result<Self, String>;
}

impl JsonDecoration for Sign {
    type Labels = serde_json::Value;
    fn to_json(&self) -> (Sign, Option<serde_json::Value>) {
        (*self, None)
    }
    fn from_json(sign: Sign, _: Option<serde_json::Value>) -> Result<Self, String> {
        Ok(sign)
    }
}

impl<A: JsonDecoration> Diagram<A> {
    /// `{components: [slot counts], arrows: [{tail: [circle, slot], head:
    /// [circle, slot], sign}]}` with 0-based circle and slot indices.
    pub fn to_json_value(&self) -> serde_json::Value {
        let arrows = (0..self.num_arrows())
            .map(|a| {
                let (sign, labels) = self.arrows[a].to_json();
                let (tc, tp) = self.tail(a);
                let (hc, hp) = self.head(a);
                ArrowJson {
                    tail: [tc, tp],
                    head: [hc, hp],
                    sign,
                    labels,
                }
            })
            .collect();
        serde_json::to_value(DiagramJson {
            components: self.circles.iter().map(Vec::len).collect(),
            arrows,
        })
        .expect("diagram serializes")
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Self, GaussError> {
        let j: DiagramJson<A::Labels> =
            serde_json::from_value(v.clone()).map_err(|e| GaussError::Json(e.to_string()))?;
        let mut circles: Vec<Vec<Option<Slot>>> = j.components.iter().map(|&k| vec![None; k]).collect();
        let mut arrows = Vec::with_capacity(j.arrows.len());
        for (a, aj) in j.arrows.into_iter().enumerate() {
            for (pos, end) in [(aj.tail, End::Tail), (aj.head, End::Head)] {
                let cell = circles
                    .get_mut(pos[0])
                    .and_then(|c| c.get_mut(pos[1]))
                    .ok_or_else(|| GaussError::Json(format!("arrow {a}: slot {pos:?} out of range")))?;
                if cell.is_some() {
                    return Err(GaussError::Json(format!("slot {pos:?} used twice")));
                }
                *cell = Some(Slot { arrow: a, end });
            }
            arrows.push(A::from_json(aj.sign, aj.labels).map_err(GaussError::Json)?);
        }
        let circles = circles
            .into_iter()
            .map(|c| c.into_iter().collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| GaussError::Json("unused slot".into()))?;
        Diagram::new(circles, arrows)
    }
}

/// Closure of a braid word on `strands` strands. Letter `k` is `σ_k`
/// (strand `k` crosses over strand `k+1` from the left), `-k` its inverse.
pub fn braid_closure(strands: usize, word: &[i32]) -> GaussDiagram {
    let mut pieces: Vec<Vec<Slot>> = vec![Vec::new(); strands];
    let mut cur: Vec<usize> = (0..strands).collect();
    let mut arrows = Vec::new();
    for &g in word {
        let k = g.unsigned_abs() as usize;
        assert!(k >= 1 && k < strands, "generator {g} out of range");
        let (left, right) = (cur[k - 1], cur[k]);
        let a = arrows.len();
        let (over, under, sign) = if g > 0 {
            (left, right, Sign::Positive)
        } else {
            (right, left, Sign::Negative)
        };
        pieces[over].push(Slot { arrow: a, end: End::Tail });
        pieces[under].push(Slot { arrow: a, end: End::Head });
        arrows.push(sign);
        cur.swap(k - 1, k);
    }
    // The piece starting at bottom position p ends at top position q with
    // cur[q] == p.
    let mut ends_at = vec![0; strands];
    for (q, &p) in cur.iter().enumerate() {
        ends_at[p] = q;
    }
    let mut seen = vec![false; strands];
    let mut circles = Vec::new();
    for start in 0..strands {
        if seen[start] {
            continue;
        }
        let mut circle = Vec::new();
        let mut p = start;
        while !seen[p] {
            seen[p] = true;
            circle.extend(pieces[p].iter().copied());
            p = ends_at[p];
        }
        circles.push(circle);
    }
    Diagram::new(circles, arrows).expect("braid closure is a valid diagram")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(code: &str) -> GaussDiagram {
        parse_gauss_code(code).unwrap()
    }

    #[test]
    fn parses_figure_eight() {
        let g = d("U1-O2-U3+O4+U2-O1-U4+O3+");
        assert_eq!(g.num_components(), 1);
        assert_eq!(g.circles()[0].len(), 8);
        assert_eq!(g.arrows(), &[Sign::Negative, Sign::Negative, Sign::Positive, Sign::Positive]);
        assert_eq!(g.head(0), (0, 0));
        assert_eq!(g.tail(0), (0, 5));
    }

    #[test]
    fn parses_virtual_trefoil_and_hopf() {
        let t = d("O1+U2+U1+O2+");
        assert_eq!(t.tail(0), (0, 0));
        assert_eq!(t.head(1), (0, 1));
        assert_eq!(t.head(0), (0, 2));
        assert_eq!(t.tail(1), (0, 3));
        let h = d("U1+;O1+");
        assert_eq!(h.num_components(), 2);
        assert_eq!(h.head(0), (0, 0));
        assert_eq!(h.tail(0), (1, 0));
        assert_eq!(h.directed_linking(1, 0), 1);
        assert_eq!(h.directed_linking(0, 1), 0);
    }

    #[test]
    fn parse_is_lenient_about_spacing_and_case() {
        assert_eq!(d(" o1+ u1+ "), d("O1+U1+"));
        assert_eq!(d("").num_components(), 1);
        assert_eq!(d(";").num_components(), 2);
        assert_eq!(d("O12-U12-").arrows(), &[Sign::Negative]);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_gauss_code("X1+"), Err(GaussError::Token { .. })));
        assert!(matches!(parse_gauss_code("O1"), Err(GaussError::Token { .. })));
        assert!(matches!(parse_gauss_code("O+U1+"), Err(GaussError::Token { .. })));
        assert!(matches!(parse_gauss_code("O0+U0+"), Err(GaussError::Token { .. })));
        assert_eq!(parse_gauss_code("O1+O1+U1+"), Err(GaussError::Duplicate { id: 1, kind: 'O' }));
        assert_eq!(parse_gauss_code("O1+"), Err(GaussError::Missing { id: 1, kind: 'U' }));
        assert_eq!(parse_gauss_code("U1+"), Err(GaussError::Missing { id: 1, kind: 'O' }));
        assert_eq!(parse_gauss_code("O1+U1-"), Err(GaussError::SignMismatch { id: 1 }));
    }

    #[test]
    fn canonical_rotation_classes() {
        assert_eq!(d("O1+U1+").canonical(), d("U1+O1+").canonical());
        assert_ne!(d("O1+U1+").canonical(), d("O1-U1-").canonical());
        assert_eq!(d("").canonical(), d(""));
        let t = d("U1-O2-U3+O4+U2-O1-U4+O3+");
        for r in 0..8 {
            assert_eq!(t.rotated(0, r).canonical(), t.canonical());
        }
        assert!(t.canonical().is_canonical());
    }

    #[test]
    fn canonical_keeps_component_order() {
        assert_ne!(d("U1+;O1+").canonical(), d("O1+;U1+").canonical());
        assert_eq!(d("U1+;O1+").canonical(), d("U7+;O7+").canonical());
    }

    #[test]
    fn code_round_trip() {
        for code in ["U1-O2-U3+O4+U2-O1-U4+O3+", "O1+U2+U1+O2+", "U1+;O1+", "", "O1-U1-;;O2+U2+"] {
            let g = d(code).canonical();
            assert_eq!(d(&g.to_code()).canonical(), g);
        }
    }

    #[test]
    fn json_round_trip() {
        let g = d("U1-O2-U3+O4+U2-O1-U4+O3+;O5+;U5+");
        let v = g.to_json_value();
        assert_eq!(v["components"], serde_json::json!([8, 1, 1]));
        assert_eq!(GaussDiagram::from_json_value(&v).unwrap(), g);
        let bad = serde_json::json!({"components": [1], "arrows": []});
        assert!(GaussDiagram::from_json_value(&bad).is_err());
    }

    #[test]
    fn semiarcs_and_crossings() {
        let t = d("O1+U2+U1+O2+");
        assert_eq!(t.num_semiarcs(), 4);
        let cs = t.crossing_semiarcs();
        assert_eq!(cs[0], Crossing { over_in: 3, over_out: 0, under_in: 1, under_out: 2 });
        let h = d("U1+;O1+;");
        assert_eq!(h.semiarc_offsets(), vec![0, 1, 2, 3]);
        assert_eq!(h.crossing_semiarcs()[0], Crossing { over_in: 1, over_out: 1, under_in: 0, under_out: 0 });
    }

    #[test]
    fn r1_insert_and_delete() {
        let u = d("");
        let r = u.apply_move(&Move::R1Insert { circle: 0, gap: 0, head_first: false, sign: Sign::Positive }).unwrap();
        assert_eq!(r.diagram.canonical(), d("O1+U1+").canonical());
        assert_eq!(r.gap_source, vec![None, Some(0)]);
        let back = r.diagram.apply_move(&Move::R1Delete { arrow: 0 }).unwrap();
        assert_eq!(back.diagram, u);
        assert!(d("O1+U2+U1+O2+").apply_move(&Move::R1Delete { arrow: 0 }).is_err());
    }

    #[test]
    fn r2_on_unknot() {
        let r = d("")
            .apply_move(&Move::R2Insert {
                over: (0, 0),
                under: (0, 0),
                parallel: true,
                first_sign: Sign::Negative,
                under_first: false,
            })
            .unwrap();
        assert_eq!(r.diagram.canonical(), d("O1+U2-U1+O2-").canonical());
        let moves = r.diagram.local_moves();
        let del = moves.iter().find(|m| matches!(m, Move::R2Delete { .. })).unwrap();
        assert_eq!(r.diagram.apply_move(del).unwrap().diagram, d(""));
    }

    #[test]
    fn r3_keys_are_closed_under_mirror() {
        let keys = r3_keys();
        assert!(!keys.is_empty());
        for (o, s) in keys {
            assert!(keys.contains(&(*o, s.map(Sign::flip))));
            assert!(keys.contains(&(o.map(|x| !x), *s)));
        }
    }

    #[test]
    fn r3_round_trip() {
        // Closure of s1 s2 s1 contains a triangle.
        let g = braid_closure(3, &[1, 2, 1]);
        let r3: Vec<Move> = g.local_moves().into_iter().filter(|m| matches!(m, Move::R3 { .. })).collect();
        assert!(!r3.is_empty());
        for mv in r3 {
            let h = g.apply_move(&mv).unwrap().diagram;
            assert_eq!(h.canonical(), braid_closure(3, &[2, 1, 2]).canonical());
            let back = h
                .local_moves()
                .into_iter()
                .filter(|m| matches!(m, Move::R3 { .. }))
                .any(|m| h.apply_move(&m).unwrap().diagram.canonical() == g.canonical());
            assert!(back);
        }
    }

    #[test]
    fn braid_closures() {
        let t = braid_closure(2, &[1, 1, 1]);
        assert_eq!(t.num_components(), 1);
        assert_eq!(t.canonical(), d("O1+U2+O3+U1+O2+U3+").canonical());
        let hopf = braid_closure(2, &[1, 1]);
        assert_eq!(hopf.num_components(), 2);
        assert_eq!(hopf.directed_linking(0, 1) + hopf.directed_linking(1, 0), 2);
    }

    #[test]
    fn endpoints_between() {
        let t = d("O1+U2+U1+O2+");
        assert_eq!(t.endpoints_between(0), Some(1));
        assert_eq!(t.endpoints_between(1), Some(1));
        assert_eq!(d("U1+;O1+").endpoints_between(0), None);
    }
}
