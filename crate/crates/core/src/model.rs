//! Canonical event and snapshot types, their newline-delimited JSON forms, and
//! tweet-ID timestamp decoding.

use std::fmt;
use std::io::BufRead;

use chrono::{DateTime, NaiveDate, SecondsFormat, TimeZone, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Account identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AccountId(pub u64);

/// Tweet identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TweetId(pub u64);

impl fmt::Display for AccountId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Display for TweetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoticeKind {
    TweetDelete,
    Unlike,
}

impl NoticeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NoticeKind::TweetDelete => "tweet_delete",
            NoticeKind::Unlike => "unlike",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        match name {
            "tweet_delete" => Some(NoticeKind::TweetDelete),
            "unlike" => Some(NoticeKind::Unlike),
            _ => None,
        }
    }
}

/// One deletion or unlike event.
///
/// For `TweetDelete` the actor is the tweet's author; for `Unlike` it is the
/// account whose like was removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ComplianceNotice {
    pub kind: NoticeKind,
    pub actor_id: AccountId,
    pub object_id: TweetId,
    pub observed_at: DateTime<Utc>,
}

impl ComplianceNotice {
    /// Builds a notice, truncating the timestamp to millisecond precision.
    pub fn new(
        kind: NoticeKind,
        actor_id: AccountId,
        object_id: TweetId,
        observed_at: DateTime<Utc>,
    ) -> Result<Self, InvalidRecord> {
        if actor_id.0 == 0 {
            return Err(InvalidRecord("actor_id must be positive".into()));
        }
        if object_id.0 == 0 {
            return Err(InvalidRecord("object_id must be positive".into()));
        }
        Ok(Self {
            kind,
            actor_id,
            object_id,
            observed_at: truncate_millis(observed_at),
        })
    }

    pub fn day(&self) -> NaiveDate {
        self.observed_at.date_naive()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct InvalidRecord(pub String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: malformed record: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: unknown notice kind {kind:?}")]
    UnknownKind { line: usize, kind: String },
}

impl ParseError {
    /// Unknown kinds are skipped with a warning; everything else is a schema
    /// violation.
    pub fn is_skippable(&self) -> bool {
        matches!(self, ParseError::UnknownKind { .. })
    }

    pub fn line(&self) -> usize {
        match self {
            ParseError::Malformed { line, .. } | ParseError::UnknownKind { line, .. } => *line,
        }
    }
}

#[derive(Deserialize)]
struct RawNotice {
    kind: String,
    actor_id: u64,
    object_id: u64,
    observed_at: DateTime<Utc>,
}

#[derive(Serialize)]
struct WireNotice<'a> {
    kind: &'a str,
    actor_id: u64,
    object_id: u64,
    observed_at: String,
}

/// Parses one newline-delimited event record. `line` is the 1-based line
/// number reported in errors.
pub fn parse_notice(record: &str, line: usize) -> Result<ComplianceNotice, ParseError> {
    let raw: RawNotice = serde_json::from_str(record).map_err(|e| ParseError::Malformed {
        line,
        message: e.to_string(),
    })?;
    let kind = NoticeKind::from_name(&raw.kind).ok_or_else(|| ParseError::UnknownKind {
        line,
        kind: raw.kind.clone(),
    })?;
    ComplianceNotice::new(
        kind,
        AccountId(raw.actor_id),
        TweetId(raw.object_id),
        raw.observed_at,
    )
    .map_err(|e| ParseError::Malformed {
        line,
        message: e.0,
    })
}

pub fn serialize_notice(notice: &ComplianceNotice) -> String {
    let wire = WireNotice {
        kind: notice.kind.as_str(),
        actor_id: notice.actor_id.0,
        object_id: notice.object_id.0,
        observed_at: format_timestamp(&notice.observed_at),
    };
    serde_json::to_string(&wire).expect("notice serialization is infallible")
}

/// ISO-8601 UTC with millisecond precision, e.g. `2021-04-26T00:00:01.000Z`.
pub fn format_timestamp(ts: &DateTime<Utc>) -> String {
    ts.to_rfc3339_opts(SecondsFormat::Millis, true)
}

fn truncate_millis(ts: DateTime<Utc>) -> DateTime<Utc> {
    Utc.timestamp_millis_opt(ts.timestamp_millis())
        .single()
        .expect("millisecond truncation stays in range")
}

/// Iterates over the records of a newline-delimited event stream. Blank lines
/// are ignored; I/O failures end the iteration with a `Malformed` error.
pub struct NoticeReader<R> {
    inner: R,
    buf: String,
    line: usize,
    done: bool,
}

impl<R: BufRead> NoticeReader<R> {
    pub fn new(inner: R) -> Self {
        Self {
            inner,
            buf: String::new(),
            line: 0,
            done: false,
        }
    }
}

impl<R: BufRead> Iterator for NoticeReader<R> {
    type Item = Result<ComplianceNotice, ParseError>;

    fn next(&mut self) -> Option<Self::Item> {
        while !self.done {
            self.buf.clear();
            self.line += 1;
            match self.inner.read_line(&mut self.buf) {
                Ok(0) => self.done = true,
                Ok(_) => {
                    let record = self.buf.trim();
                    if record.is_empty() {
                        continue;
                    }
                    return Some(parse_notice(record, self.line));
                }
                Err(e) => {
                    self.done = true;
                    return Some(Err(ParseError::Malformed {
                        line: self.line,
                        message: e.to_string(),
                    }));
                }
            }
        }
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccountStatus {
    Active,
    Suspended,
    /// The account was removed; such accounts are discarded from timelines.
    Deleted,
}

impl AccountStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            AccountStatus::Active => "active",
            AccountStatus::Suspended => "suspended",
            AccountStatus::Deleted => "deleted",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "active" => Some(AccountStatus::Active),
            "suspended" => Some(AccountStatus::Suspended),
            "deleted" => Some(AccountStatus::Deleted),
            _ => None,
        }
    }
}

/// Daily observation of an account's user object.
///
/// `statuses_count` is the tweet count at the end of `snapshot_day`; it is
/// `None` when the account was unavailable (suspended or deleted).
/// `queried_at` records when the user object was actually fetched, which can
/// lag the day boundary by a few hours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccountSnapshot {
    pub account_id: AccountId,
    pub snapshot_day: NaiveDate,
    #[serde(default)]
    pub statuses_count: Option<u64>,
    pub status: AccountStatus,
    #[serde(default)]
    pub description: String,
    #[serde(default, with = "opt_millis", skip_serializing_if = "Option::is_none")]
    pub created_at: Option<DateTime<Utc>>,
    #[serde(default, with = "opt_millis", skip_serializing_if = "Option::is_none")]
    pub queried_at: Option<DateTime<Utc>>,
}

impl AccountSnapshot {
    pub fn validate(&self) -> Result<(), InvalidRecord> {
        if self.account_id.0 == 0 {
            return Err(InvalidRecord("account_id must be positive".into()));
        }
        if self.status == AccountStatus::Active && self.statuses_count.is_none() {
            return Err(InvalidRecord(format!(
                "active snapshot of account {} on {} lacks statuses_count",
                self.account_id, self.snapshot_day
            )));
        }
        Ok(())
    }
}

pub fn parse_snapshot(record: &str, line: usize) -> Result<AccountSnapshot, ParseError> {
    let snap: AccountSnapshot =
        serde_json::from_str(record).map_err(|e| ParseError::Malformed {
            line,
            message: e.to_string(),
        })?;
    snap.validate().map_err(|e| ParseError::Malformed {
        line,
        message: e.0,
    })?;
    Ok(snap)
}

pub fn serialize_snapshot(snapshot: &AccountSnapshot) -> String {
    serde_json::to_string(snapshot).expect("snapshot serialization is infallible")
}

mod opt_millis {
    use chrono::{DateTime, Utc};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<DateTime<Utc>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(ts) => s.serialize_str(&super::format_timestamp(ts)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<DateTime<Utc>>, D::Error> {
        Ok(Option::<DateTime<Utc>>::deserialize(d)?.map(super::truncate_millis))
    }
}

/// Millisecond epoch of the 64-bit time-encoding ID scheme
/// (2010-11-04T01:42:54.657Z).
pub const SNOWFLAKE_EPOCH_MS: i64 = 1_288_834_974_657;

/// First ID issued under the time-encoding scheme. Older, sequential IDs carry
/// no timestamp.
pub const FIRST_SNOWFLAKE_ID: u64 = 29_700_859_247;

const TIMESTAMP_SHIFT: u32 = 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TweetCreationTime {
    pub tweet_id: TweetId,
    /// `None` when the ID predates the time-encoding scheme.
    pub created_at: Option<DateTime<Utc>>,
}

/// Decodes creation times from tweet IDs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SnowflakeDecoder {
    pub epoch_ms: i64,
    pub first_id: u64,
}

impl Default for SnowflakeDecoder {
    fn default() -> Self {
        Self {
            epoch_ms: SNOWFLAKE_EPOCH_MS,
            first_id: FIRST_SNOWFLAKE_ID,
        }
    }
}

impl SnowflakeDecoder {
    pub fn decode(&self, tweet_id: TweetId) -> TweetCreationTime {
        TweetCreationTime {
            tweet_id,
            created_at: self.decode_millis(tweet_id).and_then(|ms| {
                Utc.timestamp_millis_opt(ms).single()
            }),
        }
    }

    /// Creation time in Unix milliseconds.
    pub fn decode_millis(&self, tweet_id: TweetId) -> Option<i64> {
        if tweet_id.0 == 0 || tweet_id.0 < self.first_id {
            return None;
        }
        // top 42 bits fit comfortably in i64
        Some(self.epoch_ms + (tweet_id.0 >> TIMESTAMP_SHIFT) as i64)
    }

    /// Smallest ID whose embedded timestamp is `unix_ms`, with `low_bits`
    /// (worker and sequence) in the lower 22 bits.
    pub fn encode(&self, unix_ms: i64, low_bits: u64) -> Option<TweetId> {
        let offset = unix_ms.checked_sub(self.epoch_ms)?;
        if offset < 0 {
            return None;
        }
        let id = ((offset as u64) << TIMESTAMP_SHIFT) | (low_bits & ((1 << TIMESTAMP_SHIFT) - 1));
        (id >= self.first_id && id > 0).then_some(TweetId(id))
    }
}

/// Decodes with the platform's published epoch and first time-encoded ID.
pub fn decode_creation_time(tweet_id: TweetId) -> TweetCreationTime {
    SnowflakeDecoder::default().decode(tweet_id)
}
