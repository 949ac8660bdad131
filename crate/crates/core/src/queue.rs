//! Messages and the single shared queue.
//!
//! Only messages with the same sender and receiver are ordered with respect
//! to each other, so a queue is stored as one FIFO per channel. Equality of
//! [`Queue`] values is therefore exactly the structural equivalence on
//! queues.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::name::{Label, Participant, ParticipantSet};

/// An ordered (sender, receiver) pair.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Channel {
    pub sender: Participant,
    pub receiver: Participant,
}

impl Channel {
    pub fn new(sender: Participant, receiver: Participant) -> Self {
        Self { sender, receiver }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.sender, self.receiver)
    }
}

/// `<p l q>`: `p` sent `l` to `q`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Message {
    pub sender: Participant,
    pub label: Label,
    pub receiver: Participant,
}

impl Message {
    pub fn new(sender: Participant, label: Label, receiver: Participant) -> Self {
        Self { sender, label, receiver }
    }

    pub fn channel(&self) -> Channel {
        Channel::new(self.sender.clone(), self.receiver.clone())
    }
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}:{}", self.sender, self.receiver, self.label)
    }
}

/// Per-channel label sequences; the canonical form of a queue.
pub type ChannelForm = BTreeMap<Channel, VecDeque<Label>>;

#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Queue {
    // Invariant: no channel maps to an empty sequence.
    channels: ChannelForm,
}

impl Queue {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a queue from messages listed front to back.
    pub fn from_messages<I: IntoIterator<Item = Message>>(messages: I) -> Self {
        let mut q = Self::new();
        for m in messages {
            q.push(m);
        }
        q
    }

    pub fn canonical(&self) -> &ChannelForm {
        &self.channels
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn len(&self) -> usize {
        self.channels.values().map(VecDeque::len).sum()
    }

    /// Appends at the tail.
    pub fn push(&mut self, m: Message) {
        let ch = m.channel();
        self.channels.entry(ch).or_default().push_back(m.label);
    }

    /// Re-inserts a message in front of its channel.
    pub fn push_front(&mut self, m: Message) {
        let ch = m.channel();
        self.channels.entry(ch).or_default().push_front(m.label);
    }

    pub fn head(&self, ch: &Channel) -> Option<&Label> {
        self.channels.get(ch).and_then(VecDeque::front)
    }

    pub fn last(&self, ch: &Channel) -> Option<&Label> {
        self.channels.get(ch).and_then(VecDeque::back)
    }

    pub fn channel_len(&self, ch: &Channel) -> usize {
        self.channels.get(ch).map_or(0, VecDeque::len)
    }

    pub fn pop_head(&mut self, ch: &Channel) -> Option<Label> {
        let seq = self.channels.get_mut(ch)?;
        let label = seq.pop_front();
        if seq.is_empty() {
            self.channels.remove(ch);
        }
        label
    }

    pub fn pop_last(&mut self, ch: &Channel) -> Option<Label> {
        let seq = self.channels.get_mut(ch)?;
        let label = seq.pop_back();
        if seq.is_empty() {
            self.channels.remove(ch);
        }
        label
    }

    /// Messages in canonical order: channels sorted, FIFO within a channel.
    pub fn messages(&self) -> impl Iterator<Item = Message> + '_ {
        self.channels.iter().flat_map(|(ch, labels)| {
            labels.iter().map(move |l| Message::new(ch.sender.clone(), l.clone(), ch.receiver.clone()))
        })
    }

    /// Senders and receivers of all messages.
    pub fn plays(&self) -> ParticipantSet {
        self.channels.keys().flat_map(|ch| [ch.sender.clone(), ch.receiver.clone()]).collect()
    }
}

/// Serialized as the list of messages in canonical order.
impl Serialize for Queue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.messages())
    }
}

impl fmt::Display for Queue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, m) in self.messages().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for Queue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Queue{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::name::participants;
    use proptest::prelude::*;

    fn m(s: &str, l: &str, r: &str) -> Message {
        Message::new(s.into(), l.into(), r.into())
    }

    #[test]
    fn distinct_channels_commute() {
        let a = Queue::from_messages([m("p", "a", "q"), m("q", "b", "p")]);
        let b = Queue::from_messages([m("q", "b", "p"), m("p", "a", "q")]);
        assert_eq!(a, b);
        assert_eq!(a.canonical(), b.canonical());
    }

    #[test]
    fn same_channel_order_matters() {
        let a = Queue::from_messages([m("p", "a", "q"), m("p", "b", "q")]);
        let b = Queue::from_messages([m("p", "b", "q"), m("p", "a", "q")]);
        assert_ne!(a, b);
    }

    #[test]
    fn empty_queue() {
        assert!(Queue::new().canonical().is_empty());
        assert!(Queue::new().plays().is_empty());
    }

    #[test]
    fn plays_of_queue() {
        let q = Queue::from_messages([m("u1", "go", "u2"), m("u2", "stop", "u1")]);
        assert_eq!(q.plays(), participants(["u1", "u2"]));
        let q = Queue::from_messages([m("u1", "req", "s")]);
        assert_eq!(q.plays(), participants(["s", "u1"]));
    }

    #[test]
    fn popping_last_message_removes_channel() {
        let mut q = Queue::from_messages([m("p", "a", "q")]);
        assert_eq!(q.pop_head(&Channel::new("p".into(), "q".into())), Some("a".into()));
        assert_eq!(q, Queue::new());
    }

    fn arb_messages() -> impl Strategy<Value = Vec<Message>> {
        let part = prop::sample::select(vec!["p", "q", "r"]);
        let label = prop::sample::select(vec!["a", "b"]);
        prop::collection::vec((part.clone(), label, part), 0..8)
            .prop_map(|v| v.into_iter().filter(|(s, _, r)| s != r).map(|(s, l, r)| m(s, l, r)).collect())
    }

    proptest! {
        /// Swapping adjacent messages changes the canonical form exactly when
        /// they share a channel and differ in label.
        #[test]
        fn adjacent_swap_respects_equivalence(msgs in arb_messages(), at in 0usize..8) {
            prop_assume!(msgs.len() >= 2);
            let i = at % (msgs.len() - 1);
            let mut swapped = msgs.clone();
            swapped.swap(i, i + 1);
            let before = Queue::from_messages(msgs.clone());
            let after = Queue::from_messages(swapped);
            let same_channel = msgs[i].channel() == msgs[i + 1].channel();
            let same_label = msgs[i].label == msgs[i + 1].label;
            prop_assert_eq!(before == after, !same_channel || same_label);
        }
    }
}
