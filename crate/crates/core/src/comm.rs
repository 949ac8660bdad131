//! Communications (transition labels) and traces.
//!
//! Text form: `p>q!l` is `p` sending `l` to `q`; `p<q?l` is `p` reading `l`
//! sent by `q`. The player is always the first participant.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::name::{is_identifier, Label, Participant};
use crate::queue::{Channel, Message};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommKind {
    Send,
    Receive,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Communication {
    pub kind: CommKind,
    pub player: Participant,
    pub peer: Participant,
    pub label: Label,
}

impl Communication {
    /// `player` emits `label` towards `peer`.
    pub fn send(player: Participant, peer: Participant, label: Label) -> Self {
        Self { kind: CommKind::Send, player, peer, label }
    }

    /// `player` reads `label` sent by `peer`.
    pub fn receive(player: Participant, peer: Participant, label: Label) -> Self {
        Self { kind: CommKind::Receive, player, peer, label }
    }

    pub fn player(&self) -> &Participant {
        &self.player
    }

    /// The channel this communication writes to or reads from.
    pub fn channel(&self) -> Channel {
        match self.kind {
            CommKind::Send => Channel::new(self.player.clone(), self.peer.clone()),
            CommKind::Receive => Channel::new(self.peer.clone(), self.player.clone()),
        }
    }

    /// The message written (for a send) or consumed (for a receive).
    pub fn message(&self) -> Message {
        let ch = self.channel();
        Message::new(ch.sender, self.label.clone(), ch.receiver)
    }
}

impl fmt::Display for Communication {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            CommKind::Send => write!(f, "{}>{}!{}", self.player, self.peer, self.label),
            CommKind::Receive => write!(f, "{}<{}?{}", self.player, self.peer, self.label),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed communication {token:?}: expected `p>q!l` or `p<q?l`")]
pub struct CommParseError {
    pub token: String,
}

impl FromStr for Communication {
    type Err = CommParseError;

    fn from_str(token: &str) -> Result<Self, Self::Err> {
        let err = || CommParseError { token: token.to_string() };
        let (kind, arrow, mark) =
            if token.contains('>') { (CommKind::Send, '>', '!') } else { (CommKind::Receive, '<', '?') };
        let (player, rest) = token.split_once(arrow).ok_or_else(err)?;
        let (peer, label) = rest.split_once(mark).ok_or_else(err)?;
        if ![player, peer, label].iter().all(|s| is_identifier(s)) || player == peer {
            return Err(err());
        }
        Ok(Self { kind, player: Participant::new(player), peer: Participant::new(peer), label: Label::new(label) })
    }
}

/// A finite sequence of communications.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Trace(pub Vec<Communication>);

impl Trace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Communication> {
        self.0.iter()
    }

    /// Parses the whitespace-separated text form.
    pub fn parse_text(text: &str) -> Result<Self, CommParseError> {
        text.split_whitespace().map(str::parse).collect::<Result<_, _>>().map(Trace)
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromIterator<Communication> for Trace {
    fn from_iter<I: IntoIterator<Item = Communication>>(iter: I) -> Self {
        Trace(iter.into_iter().collect())
    }
}

impl IntoIterator for Trace {
    type Item = Communication;
    type IntoIter = std::vec::IntoIter<Communication>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}
