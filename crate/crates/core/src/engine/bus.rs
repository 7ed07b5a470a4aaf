//! In-process publish/subscribe bus with dot-separated subjects.
//!
//! Subjects look like `touch.event` or `gesture.double_tap`. A subscription
//! pattern is either an exact subject or a prefix ending in a `*` segment:
//! `gesture.*` matches `gesture.double_tap` (and deeper subjects) but not
//! `gesture` itself; a lone `*` matches everything.
//!
//! Delivery is synchronous and serialized per bus: at most one handler runs at
//! a time, and each subscriber sees messages in publish order. A handler may
//! publish; such messages are queued and delivered once the current handler
//! returns, before the outer `publish` call does. A publish from another
//! thread during delivery is handed to the thread already dispatching.

use std::collections::VecDeque;
use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex, MutexGuard};

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BusMessage {
    pub subject: String,
    pub payload: Value,
}

impl BusMessage {
    pub fn new(subject: impl Into<String>, payload: Value) -> Self {
        Self { subject: subject.into(), payload }
    }

    /// Serialise `payload` into a message.
    pub fn encode<T: Serialize>(subject: impl Into<String>, payload: &T) -> Self {
        Self::new(subject, serde_json::to_value(payload).expect("bus payloads serialise to JSON"))
    }

    pub fn decode<T: for<'de> Deserialize<'de>>(&self) -> Result<T, serde_json::Error> {
        T::deserialize(&self.payload)
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
#[error("invalid subject pattern `{pattern}`: {reason}")]
pub struct PatternError {
    pub pattern: String,
    pub reason: &'static str,
}

/// Parsed subscription pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubjectPattern {
    prefix: Vec<String>,
    wildcard: bool,
}

impl SubjectPattern {
    pub fn parse(pattern: &str) -> Result<Self, PatternError> {
        let err = |reason| PatternError { pattern: pattern.to_owned(), reason };
        if pattern.is_empty() {
            return Err(err("empty pattern"));
        }
        let mut segments: Vec<&str> = pattern.split('.').collect();
        let wildcard = segments.last() == Some(&"*");
        if wildcard {
            segments.pop();
        }
        for seg in &segments {
            if seg.is_empty() {
                return Err(err("empty segment"));
            }
            if seg.contains('*') {
                return Err(err("`*` is only allowed as the whole last segment"));
            }
            if seg.chars().any(char::is_whitespace) {
                return Err(err("whitespace in segment"));
            }
        }
        Ok(Self { prefix: segments.into_iter().map(str::to_owned).collect(), wildcard })
    }

    pub fn matches(&self, subject: &str) -> bool {
        let mut parts = subject.split('.');
        for seg in &self.prefix {
            if parts.next() != Some(seg.as_str()) {
                return false;
            }
        }
        let rest = parts.count();
        if self.wildcard {
            rest >= 1
        } else {
            rest == 0
        }
    }
}

impl fmt::Display for SubjectPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<&str> = self.prefix.iter().map(String::as_str).collect();
        if self.wildcard {
            parts.push("*");
        }
        f.write_str(&parts.join("."))
    }
}

type Handler = Box<dyn FnMut(&BusMessage, &Bus) + Send>;

#[derive(Clone)]
struct Recipient {
    handler: Arc<Mutex<Handler>>,
    active: Arc<AtomicBool>,
}

struct Subscriber {
    pattern: SubjectPattern,
    recipient: Recipient,
}

/// Handle returned by [`Bus::subscribe`]. Dropping it keeps the subscription
/// alive; call [`Subscription::cancel`] to stop delivery.
#[derive(Debug, Clone)]
pub struct Subscription {
    id: u64,
    active: Arc<AtomicBool>,
}

impl Subscription {
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn cancel(&self) {
        self.active.store(false, Ordering::SeqCst);
    }

    pub fn is_active(&self) -> bool {
        self.active.load(Ordering::SeqCst)
    }
}

#[derive(Default)]
pub struct Bus {
    subscribers: Mutex<Vec<Subscriber>>,
    queue: Mutex<VecDeque<(BusMessage, Vec<Recipient>)>>,
    dispatch: Mutex<()>,
    next_id: AtomicU64,
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    // a panicking handler must not wedge the bus
    m.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

impl Bus {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn subscribe<F>(&self, pattern: &str, handler: F) -> Result<Subscription, PatternError>
    where
        F: FnMut(&BusMessage, &Bus) + Send + 'static,
    {
        let pattern = SubjectPattern::parse(pattern)?;
        let active = Arc::new(AtomicBool::new(true));
        let recipient = Recipient { handler: Arc::new(Mutex::new(Box::new(handler))), active: active.clone() };
        lock(&self.subscribers).push(Subscriber { pattern, recipient });
        Ok(Subscription { id: self.next_id.fetch_add(1, Ordering::SeqCst), active })
    }

    /// Deliver `msg` to every matching, active subscriber. Returns how many
    /// subscribers the message was addressed to.
    pub fn publish(&self, msg: BusMessage) -> usize {
        let recipients: Vec<Recipient> = {
            let mut subs = lock(&self.subscribers);
            subs.retain(|s| s.recipient.active.load(Ordering::SeqCst));
            subs.iter().filter(|s| s.pattern.matches(&msg.subject)).map(|s| s.recipient.clone()).collect()
        };
        let count = recipients.len();
        if count > 0 {
            lock(&self.queue).push_back((msg, recipients));
            self.drain();
        }
        count
    }

    pub fn subscriber_count(&self) -> usize {
        lock(&self.subscribers).iter().filter(|s| s.recipient.active.load(Ordering::SeqCst)).count()
    }

    fn drain(&self) {
        loop {
            // Held by an outer publish on this thread or by another thread;
            // whoever holds it delivers what we queued.
            let Ok(_guard) = self.dispatch.try_lock() else { return };
            loop {
                let Some((msg, recipients)) = lock(&self.queue).pop_front() else { break };
                for r in recipients {
                    if r.active.load(Ordering::SeqCst) {
                        let mut handler = lock(&r.handler);
                        (*handler)(&msg, self);
                    }
                }
            }
            drop(_guard);
            if lock(&self.queue).is_empty() {
                return;
            }
        }
    }
}
