//! Coding time from `language-problem-variant keyword` commit messages.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::kernels::Problem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Seq,
    Par,
    ExpertSeq,
    ExpertPar,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Seq, Variant::Par, Variant::ExpertSeq, Variant::ExpertPar];

    /// Token used in commit messages.
    pub fn name(self) -> &'static str {
        match self {
            Variant::Seq => "seq",
            Variant::Par => "par",
            Variant::ExpertSeq => "expertseq",
            Variant::ExpertPar => "expertpar",
        }
    }

    /// Short form used in tables and measurement files.
    pub fn short(self) -> &'static str {
        match self {
            Variant::Seq => "s",
            Variant::Par => "p",
            Variant::ExpertSeq => "ex-s",
            Variant::ExpertPar => "ex-p",
        }
    }

    /// Accepts either the commit token or the short form.
    pub fn parse_any(s: &str) -> Option<Variant> {
        Variant::ALL.into_iter().find(|v| v.name() == s || v.short() == s)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Keyword {
    Start,
    Pause,
    Resume,
    Done,
}

impl Keyword {
    pub const ALL: [Keyword; 4] = [Keyword::Start, Keyword::Pause, Keyword::Resume, Keyword::Done];

    pub fn name(self) -> &'static str {
        match self {
            Keyword::Start => "start",
            Keyword::Pause => "pause",
            Keyword::Resume => "resume",
            Keyword::Done => "done",
        }
    }
}

/// Why a commit message does not match the grammar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MessageError(pub String);

impl fmt::Display for MessageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "malformed commit message: {}", self.0)
    }
}

impl core::error::Error for MessageError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommitEvent {
    /// Seconds since an arbitrary epoch shared by the whole log.
    pub timestamp: i64,
    pub language: String,
    pub problem: Problem,
    pub variant: Variant,
    pub keyword: Keyword,
}

impl CommitEvent {
    /// Parses `language-problem-variant keyword`. The language token is
    /// non-empty and holds neither `-` nor whitespace.
    pub fn parse(timestamp: i64, message: &str) -> Result<Self, MessageError> {
        let err = |why: &str| MessageError(alloc::format!("{why} in {message:?}"));
        let mut words = message.split_whitespace();
        let (Some(tag), Some(kw), None) = (words.next(), words.next(), words.next()) else {
            return Err(err("expected `language-problem-variant keyword`"));
        };
        let mut parts = tag.split('-');
        let (Some(language), Some(problem), Some(variant), None) =
            (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(err("expected three `-`-separated fields"));
        };
        if language.is_empty() {
            return Err(err("empty language"));
        }
        let problem = Problem::from_str(problem).map_err(|_| err("unknown problem"))?;
        let variant = Variant::ALL.into_iter().find(|v| v.name() == variant).ok_or_else(|| err("unknown variant"))?;
        let keyword = Keyword::ALL.into_iter().find(|k| k.name() == kw).ok_or_else(|| err("unknown keyword"))?;
        Ok(CommitEvent { timestamp, language: language.to_string(), problem, variant, keyword })
    }

    fn key(&self) -> (&str, Problem, Variant) {
        (&self.language, self.problem, self.variant)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CodingTime {
    pub language: String,
    pub problem: Problem,
    pub variant: Variant,
    pub minutes: f64,
}

/// A log that violates the start/pause/resume/done protocol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MalformedLog {
    /// Position of the offending event in the input slice.
    pub index: usize,
    pub reason: String,
}

impl fmt::Display for MalformedLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "malformed log at event {}: {}", self.index, self.reason)
    }
}

impl core::error::Error for MalformedLog {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamState {
    Initial,
    Active,
    Paused,
    Done,
}

/// The protocol's transition function; `None` means the keyword is not
/// allowed in `state`.
pub fn transition(state: StreamState, keyword: Keyword) -> Option<StreamState> {
    use StreamState::{Active, Initial, Paused};
    match (state, keyword) {
        (Initial, Keyword::Start) => Some(Active),
        (Active, Keyword::Pause) => Some(Paused),
        (Paused, Keyword::Resume) => Some(Active),
        (Active, Keyword::Done) => Some(StreamState::Done),
        _ => None,
    }
}

struct Stream<'a> {
    key: (&'a str, Problem, Variant),
    state: StreamState,
    since: i64,
    last: i64,
    last_index: usize,
    active_secs: i64,
}

/// Active minutes per (language, problem, variant) stream, in order of first
/// appearance. Events of one stream must be in timestamp order.
pub fn coding_time_from_log(events: &[CommitEvent]) -> Result<Vec<CodingTime>, MalformedLog> {
    let mut streams: Vec<Stream<'_>> = Vec::new();
    for (index, ev) in events.iter().enumerate() {
        let key = ev.key();
        let pos = match streams.iter().position(|s| s.key == key) {
            Some(p) => p,
            None => {
                streams.push(Stream {
                    key,
                    state: StreamState::Initial,
                    since: ev.timestamp,
                    last: ev.timestamp,
                    last_index: index,
                    active_secs: 0,
                });
                streams.len() - 1
            }
        };
        let s = &mut streams[pos];
        let malformed = |reason: String| MalformedLog { index, reason };
        if ev.timestamp < s.last {
            return Err(malformed(alloc::format!(
                "{} goes back in time for {}-{}-{}",
                ev.keyword.name(),
                key.0,
                key.1,
                key.2
            )));
        }
        let next = transition(s.state, ev.keyword).ok_or_else(|| {
            malformed(alloc::format!(
                "{} not allowed after {} for {}-{}-{}",
                ev.keyword.name(),
                state_name(s.state),
                key.0,
                key.1,
                key.2
            ))
        })?;
        if s.state == StreamState::Active {
            s.active_secs += ev.timestamp - s.since;
        }
        s.since = ev.timestamp;
        s.last = ev.timestamp;
        s.last_index = index;
        s.state = next;
    }
    streams
        .into_iter()
        .map(|s| {
            if s.state != StreamState::Done {
                return Err(MalformedLog {
                    index: s.last_index,
                    reason: alloc::format!("{}-{}-{} has no done event", s.key.0, s.key.1, s.key.2),
                });
            }
            Ok(CodingTime {
                language: s.key.0.to_string(),
                problem: s.key.1,
                variant: s.key.2,
                minutes: s.active_secs as f64 / 60.0,
            })
        })
        .collect()
}

fn state_name(s: StreamState) -> &'static str {
    match s {
        StreamState::Initial => "nothing",
        StreamState::Active => "start or resume",
        StreamState::Paused => "pause",
        StreamState::Done => "done",
    }
}

/// Cumulative minutes for one (language, problem): `par` includes `seq`,
/// `expert_seq` adds to `seq` and `expert_par` adds to `par`. A cell whose
/// inputs are missing is `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct CumulativeTime {
    pub language: String,
    pub problem: Problem,
    pub seq: Option<f64>,
    pub par: Option<f64>,
    pub expert_seq: Option<f64>,
    pub expert_par: Option<f64>,
}

impl CumulativeTime {
    pub fn get(&self, v: Variant) -> Option<f64> {
        match v {
            Variant::Seq => self.seq,
            Variant::Par => self.par,
            Variant::ExpertSeq => self.expert_seq,
            Variant::ExpertPar => self.expert_par,
        }
    }
}

/// Turns raw per-variant increments into cumulative times. The first entry
/// wins if a stream appears twice.
pub fn cumulative_coding_time(times: &[CodingTime]) -> Vec<CumulativeTime> {
    let mut keys: Vec<(&str, Problem)> = Vec::new();
    for t in times {
        let k = (t.language.as_str(), t.problem);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|(language, problem)| {
            let raw = |v: Variant| {
                times
                    .iter()
                    .find(|t| t.language == language && t.problem == problem && t.variant == v)
                    .map(|t| t.minutes)
            };
            let seq = raw(Variant::Seq);
            let par = seq.zip(raw(Variant::Par)).map(|(a, b)| a + b);
            let expert_seq = seq.zip(raw(Variant::ExpertSeq)).map(|(a, b)| a + b);
            let expert_par = par.zip(raw(Variant::ExpertPar)).map(|(a, b)| a + b);
            CumulativeTime { language: language.to_string(), problem, seq, par, expert_seq, expert_par }
        })
        .collect()
}
