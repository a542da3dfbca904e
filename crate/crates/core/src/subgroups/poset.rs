use std::collections::HashMap;

use super::subgroup::TorusSubgroup;
use crate::error::{Error, Result};

/// Largest down-set the brute-force crosscut sum will enumerate.
pub const CROSSCUT_LIMIT: usize = 20;

/// Finite intersection-closed family of torus subgroups with a top element.
///
/// The containment table and the full Möbius table are computed when the
/// poset is built; all queries afterwards are read-only.
#[derive(Clone, Debug)]
pub struct SubgroupPoset {
    ambient: usize,
    elements: Vec<TorusSubgroup>,
    top: usize,
    index: HashMap<TorusSubgroup, usize>,
    /// `leq[i * n + j]` iff `elements[i] ⊆ elements[j]`.
    leq: Vec<bool>,
    /// `mobius[i * n + j]` for `i ⊆ j`, zero otherwise.
    mobius: Vec<i64>,
}

impl SubgroupPoset {
    /// Smallest intersection-closed family containing `seed` and `top`.
    pub fn close(seed: &[TorusSubgroup], top: &TorusSubgroup) -> Result<Self> {
        let mut elements = vec![top.clone()];
        let mut index: HashMap<TorusSubgroup, usize> = HashMap::from([(top.clone(), 0)]);
        for s in seed {
            if s.ambient_rank() != top.ambient_rank() {
                return Err(Error::AmbientMismatch {
                    left: top.ambient_rank(),
                    right: s.ambient_rank(),
                });
            }
            if !top.contains(s)? {
                return Err(Error::InvalidInput(format!(
                    "seed element {s} is not below the top"
                )));
            }
            if !index.contains_key(s) {
                index.insert(s.clone(), elements.len());
                elements.push(s.clone());
            }
        }
        // Each new element is intersected with everything before it.
        let mut i = 1;
        while i < elements.len() {
            for j in 0..i {
                let meet = elements[i].intersect(&elements[j])?;
                if !index.contains_key(&meet) {
                    index.insert(meet.clone(), elements.len());
                    elements.push(meet);
                }
            }
            i += 1;
        }
        Ok(Self::build(elements, 0))
    }

    /// Wrap a family already known to be intersection-closed with maximum
    /// `elements[top]`.
    pub(crate) fn from_closed_family(elements: Vec<TorusSubgroup>, top: usize) -> Self {
        Self::build(elements, top)
    }

    fn build(elements: Vec<TorusSubgroup>, top: usize) -> Self {
        let n = elements.len();
        let ambient = elements[top].ambient_rank();
        let index = elements
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, e)| (e, i))
            .collect();
        let mut leq = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                leq[i * n + j] = i == j
                    || (elements[i].dim() <= elements[j].dim()
                        && elements[j]
                            .contains(&elements[i])
                            .expect("same ambient rank"));
            }
        }
        // Linear extension: strictly smaller elements have strictly smaller
        // down-sets.
        let down: Vec<usize> = (0..n)
            .map(|j| (0..n).filter(|&i| leq[i * n + j]).count())
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| down[i]);

        let mut mobius = vec![0i64; n * n];
        for &a in &order {
            let up: Vec<usize> = order.iter().copied().filter(|&b| leq[a * n + b]).collect();
            for (k, &b) in up.iter().enumerate() {
                if a == b {
                    mobius[a * n + b] = 1;
                    continue;
                }
                let s: i64 = up[..k]
                    .iter()
                    .filter(|&&c| leq[c * n + b])
                    .map(|&c| mobius[a * n + c])
                    .sum();
                mobius[a * n + b] = -s;
            }
        }
        SubgroupPoset {
            ambient,
            elements,
            top,
            index,
            leq,
            mobius,
        }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[TorusSubgroup] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &TorusSubgroup {
        &self.elements[i]
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn top_element(&self) -> &TorusSubgroup {
        &self.elements[self.top]
    }

    /// The minimum: intersection of every element.
    pub fn bottom(&self) -> usize {
        let n = self.len();
        (0..n)
            .find(|&i| (0..n).all(|j| self.leq[i * n + j]))
            .expect("intersection-closed families have a minimum")
    }

    pub fn index_of(&self, s: &TorusSubgroup) -> Option<usize> {
        self.index.get(s).copied()
    }

    fn require(&self, s: &TorusSubgroup) -> Result<usize> {
        if s.ambient_rank() != self.ambient {
            return Err(Error::AmbientMismatch {
                left: self.ambient,
                right: s.ambient_rank(),
            });
        }
        self.index_of(s).ok_or(Error::NotInPoset)
    }

    /// `elements[i] ⊆ elements[j]`.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i * self.len() + j]
    }

    /// Indices of elements contained in `elements[j]`, including `j`.
    pub fn below(&self, j: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.leq(i, j)).collect()
    }

    /// Indices of elements containing `elements[i]`, including `i`.
    pub fn above(&self, i: usize) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.leq(i, j)).collect()
    }

    /// Index of the meet, which is an element because the family is closed.
    pub fn meet(&self, i: usize, j: usize) -> usize {
        let m = self.elements[i]
            .intersect(&self.elements[j])
            .expect("same ambient rank");
        self.index_of(&m).expect("family is intersection-closed")
    }

    /// Smallest element containing `s`, if any element does.
    pub fn smallest_containing(&self, s: &TorusSubgroup) -> Result<Option<usize>> {
        let mut best: Option<usize> = None;
        for (i, e) in self.elements.iter().enumerate() {
            if e.contains(s)? && best.is_none_or(|b| self.leq(i, b)) {
                best = Some(i);
            }
        }
        Ok(best)
    }

    /// Möbius value by index; zero unless `i ⊆ j`.
    pub fn mobius_idx(&self, i: usize, j: usize) -> i64 {
        self.mobius[i * self.len() + j]
    }

    /// `μ(a, b)` for `a ⊆ b`.
    pub fn mobius(&self, a: &TorusSubgroup, b: &TorusSubgroup) -> Result<i64> {
        let (i, j) = (self.require(a)?, self.require(b)?);
        if !self.leq(i, j) {
            return Err(Error::NotComparable);
        }
        Ok(self.mobius_idx(i, j))
    }

    /// Literal subset sum `Σ (-1)^{|B|-1}` over `B ⊆ {c ⊆ upper}` with
    /// `upper ∈ B` and `∩B = lower`.
    pub fn crosscut_coeff(&self, lower: &TorusSubgroup, upper: &TorusSubgroup) -> Result<i64> {
        let (lo, up) = (self.require(lower)?, self.require(upper)?);
        self.crosscut_idx(lo, up)
    }

    pub fn crosscut_idx(&self, lo: usize, up: usize) -> Result<i64> {
        let down: Vec<usize> = self.below(up);
        if down.len() > CROSSCUT_LIMIT {
            return Err(Error::TooLarge {
                what: "crosscut down-set",
                limit: CROSSCUT_LIMIT,
                got: down.len(),
            });
        }
        if !self.leq(lo, up) {
            return Ok(0);
        }
        let local: HashMap<usize, usize> = down.iter().enumerate().map(|(k, &g)| (g, k)).collect();
        let d = down.len();
        let meet: Vec<usize> = (0..d * d)
            .map(|x| local[&self.meet(down[x / d], down[x % d])])
            .collect();
        let others: Vec<usize> = (0..d).filter(|&k| down[k] != up).collect();
        let start = local[&up];
        let target = local[&lo];

        // Depth-first over include/exclude decisions, carrying the running
        // meet and |B|.
        fn walk(
            pos: usize,
            cur: usize,
            size: usize,
            others: &[usize],
            meet: &[usize],
            d: usize,
            target: usize,
        ) -> i64 {
            if pos == others.len() {
                return if cur == target {
                    if size % 2 == 1 {
                        1
                    } else {
                        -1
                    }
                } else {
                    0
                };
            }
            let k = others[pos];
            walk(pos + 1, cur, size, others, meet, d, target)
                + walk(
                    pos + 1,
                    meet[cur * d + k],
                    size + 1,
                    others,
                    meet,
                    d,
                    target,
                )
        }
        Ok(walk(0, start, 1, &others, &meet, d, target))
    }
}
