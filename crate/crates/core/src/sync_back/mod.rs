//! Reverse synchronization of additive B System edits into the domain chain.

mod apply;
mod delta;

pub use apply::{apply_delta, dispatch, Dispatch, DispatchInput, SyncError, SyncOutcome, SyncReport, Synced, Unsyncable};
pub use delta::{Addition, Change, DeltaFormatError, Hint, ModelDelta};
