//! Position-ordered front storage and the pending-collision queue.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use super::front::Front;

/// Stable handle of a front inside a [`FrontList`]. Handles of removed fronts
/// are recycled.
pub type FrontId = usize;

#[derive(Debug, Clone)]
struct Slot {
    front: Option<Front>,
    prev: Option<FrontId>,
    next: Option<FrontId>,
}

/// Doubly linked list of fronts in increasing position, backed by a slab.
#[derive(Debug, Clone, Default)]
pub struct FrontList {
    slots: Vec<Slot>,
    free: Vec<FrontId>,
    head: Option<FrontId>,
    tail: Option<FrontId>,
    len: usize,
}

impl FrontList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn head(&self) -> Option<FrontId> {
        self.head
    }

    pub fn get(&self, id: FrontId) -> &Front {
        self.slots[id].front.as_ref().expect("live front")
    }

    pub fn get_mut(&mut self, id: FrontId) -> &mut Front {
        self.slots[id].front.as_mut().expect("live front")
    }

    pub fn next(&self, id: FrontId) -> Option<FrontId> {
        self.slots[id].next
    }

    pub fn prev(&self, id: FrontId) -> Option<FrontId> {
        self.slots[id].prev
    }

    fn alloc(&mut self, front: Front) -> FrontId {
        let slot = Slot { front: Some(front), prev: None, next: None };
        self.len += 1;
        match self.free.pop() {
            Some(id) => {
                self.slots[id] = slot;
                id
            }
            None => {
                self.slots.push(slot);
                self.slots.len() - 1
            }
        }
    }

    pub fn push_back(&mut self, front: Front) -> FrontId {
        let tail = self.tail;
        self.insert_after(tail, vec![front])[0]
    }

    /// Insert `fronts` (in order) right after `after`, or at the head when `after` is `None`.
    pub fn insert_after(&mut self, after: Option<FrontId>, fronts: Vec<Front>) -> Vec<FrontId> {
        let mut ids = Vec::with_capacity(fronts.len());
        let mut prev = after;
        let next = match after {
            Some(a) => self.slots[a].next,
            None => self.head,
        };
        for f in fronts {
            let id = self.alloc(f);
            self.slots[id].prev = prev;
            match prev {
                Some(p) => self.slots[p].next = Some(id),
                None => self.head = Some(id),
            }
            prev = Some(id);
            ids.push(id);
        }
        match prev {
            Some(p) => self.slots[p].next = next,
            None => self.head = next,
        }
        match next {
            Some(n) => self.slots[n].prev = prev,
            None => self.tail = prev,
        }
        ids
    }

    pub fn remove(&mut self, id: FrontId) -> Front {
        let (prev, next) = (self.slots[id].prev, self.slots[id].next);
        match prev {
            Some(p) => self.slots[p].next = next,
            None => self.head = next,
        }
        match next {
            Some(n) => self.slots[n].prev = prev,
            None => self.tail = prev,
        }
        self.free.push(id);
        self.len -= 1;
        let slot = &mut self.slots[id];
        slot.prev = None;
        slot.next = None;
        slot.front.take().expect("live front")
    }

    pub fn ids(&self) -> Ids<'_> {
        Ids { list: self, cur: self.head }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Front> + '_ {
        self.ids().map(move |id| self.get(id))
    }
}

pub struct Ids<'a> {
    list: &'a FrontList,
    cur: Option<FrontId>,
}

impl Iterator for Ids<'_> {
    type Item = FrontId;
    fn next(&mut self) -> Option<FrontId> {
        let id = self.cur?;
        self.cur = self.list.next(id);
        Some(id)
    }
}

/// Collision time ordered by `f64::total_cmp`.
#[derive(Debug, Clone, Copy)]
pub struct TimeKey(pub f64);

impl PartialEq for TimeKey {
    fn eq(&self, other: &Self) -> bool {
        self.0.total_cmp(&other.0) == Ordering::Equal
    }
}

impl Eq for TimeKey {}

impl PartialOrd for TimeKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TimeKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// A scheduled collision between `left` and its current right neighbour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pending {
    pub time: TimeKey,
    pub seq: u64,
    pub left: FrontId,
}

/// Indexed priority queue of collisions, one entry per left front.
#[derive(Debug, Clone, Default)]
pub struct EventQueue {
    set: BTreeSet<Pending>,
    by_front: Vec<Option<Pending>>,
    seq: u64,
}

impl EventQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    pub fn insert(&mut self, left: FrontId, time: f64) {
        self.remove(left);
        self.seq += 1;
        let p = Pending { time: TimeKey(time), seq: self.seq, left };
        if self.by_front.len() <= left {
            self.by_front.resize(left + 1, None);
        }
        self.by_front[left] = Some(p);
        self.set.insert(p);
    }

    pub fn remove(&mut self, left: FrontId) {
        if let Some(Some(p)) = self.by_front.get_mut(left).map(Option::take) {
            self.set.remove(&p);
        }
    }

    pub fn peek(&self) -> Option<Pending> {
        self.set.first().copied()
    }

    pub fn pop(&mut self) -> Option<Pending> {
        let p = self.set.pop_first()?;
        self.by_front[p.left] = None;
        Some(p)
    }

    pub fn scheduled(&self, left: FrontId) -> Option<f64> {
        self.by_front.get(left).copied().flatten().map(|p| p.time.0)
    }

    /// Whether an entry other than `left`'s lies within `window` of `time`.
    pub fn has_conflict(&self, left: FrontId, time: f64, window: f64) -> bool {
        let lo = Pending { time: TimeKey(time - window), seq: 0, left: 0 };
        let hi = Pending { time: TimeKey(time + window), seq: u64::MAX, left: usize::MAX };
        self.set.range(lo..=hi).any(|p| p.left != left)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::FrontKind;
    use crate::model::State;

    fn front(x: f64) -> Front {
        let s = State { v: 1.0, u: 0.0, lam: 0.0 };
        Front { kind: FrontKind::Three, strength: -0.1, order: 1, left: s, right: s, speed: 0.0, x_ref: x, t_ref: 0.0 }
    }

    #[test]
    fn list_insert_remove_keeps_order() {
        let mut l = FrontList::new();
        let a = l.push_back(front(0.0));
        let c = l.push_back(front(2.0));
        let ids = l.insert_after(Some(a), vec![front(1.0), front(1.5)]);
        let xs: Vec<f64> = l.iter().map(|f| f.x_ref).collect();
        assert_eq!(xs, vec![0.0, 1.0, 1.5, 2.0]);
        l.remove(ids[0]);
        l.remove(a);
        let xs: Vec<f64> = l.iter().map(|f| f.x_ref).collect();
        assert_eq!(xs, vec![1.5, 2.0]);
        assert_eq!(l.prev(c), Some(ids[1]));
        let d = l.insert_after(None, vec![front(-1.0)])[0];
        assert_eq!(l.head(), Some(d));
        assert_eq!(l.len(), 3);
    }

    #[test]
    fn queue_orders_and_reindexes() {
        let mut q = EventQueue::new();
        q.insert(3, 2.0);
        q.insert(1, 1.0);
        q.insert(3, 0.5);
        assert_eq!(q.len(), 2);
        assert!(q.has_conflict(1, 0.5 + 1e-13, 1e-12));
        assert!(!q.has_conflict(3, 0.5, 1e-12));
        assert_eq!(q.pop().unwrap().left, 3);
        q.remove(1);
        assert!(q.is_empty());
    }
}
