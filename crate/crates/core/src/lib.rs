//! Analytics over streams of tweet-deletion and unlike notices joined with
//! daily account snapshots.
//!
//! The pipeline aggregates raw notices into per-account daily deletion
//! records, estimates deletions from tweet-count differences, detects
//! accounts posting beyond the daily limit, and extracts coordinated
//! like/unlike components.

pub mod cli;
pub mod coord;
pub mod estimator;
pub mod flood;
pub mod ingest;
pub mod io;
pub mod model;
pub mod stats;
pub mod synth;

pub use coord::{detect_coordination, CoordinationGraph, CoordinationOptions, CoordinationReport};
pub use estimator::{compare, estimate_timeline, CompareOptions, ComparisonReport, DeletionEstimate};
pub use flood::{detect as detect_flooding, FloodingViolation, ViolationFilter};
pub use ingest::{aggregate_daily, build_timelines, AccountTimeline, DailyDeletionRecord, UnlikeRecord};
pub use model::{
    decode_creation_time, AccountId, AccountSnapshot, AccountStatus, ComplianceNotice, NoticeKind,
    SnowflakeDecoder, TweetId,
};
pub use stats::{summarize, AccountBehaviorSummary, Category};
pub use synth::{generate, GroundTruth, PopulationSpec, SyntheticDataset};
