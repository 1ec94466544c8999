//! Event streams: text format, replay with Z/R/I/H classification, the
//! shuffle experiment and CSV reports.

pub mod event;
pub mod replay;
pub mod report;
pub mod shuffle;

pub use event::{parse_events, write_events, EdgeEvent, EventKind, EventLog, EventType, LogHeader, ParseOptions};
pub use replay::{
    classify_event, nz_series, replay, EventTypeCounts, Replayer, SnapshotSchedule, StreamGraph, TrajectoryPoint,
    TrajectorySeries,
};
pub use report::{analyze, Analysis, AnalysisOptions, SnapshotAnalysis};
pub use shuffle::{shuffle_events, ShuffleScope};
