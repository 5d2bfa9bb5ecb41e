//! Machine definitions shipped with the crate (also under `fixtures/`).

/// Walks right forever, no status annotation.
pub const LOOP: &str = include_str!("../fixtures/loop.tm");
/// The same walker, declared `status loops`.
pub const LOOP_DECLARED: &str = include_str!("../fixtures/loop_declared.tm");
/// Start state is the halt state.
pub const HALT0: &str = include_str!("../fixtures/halt0.tm");
/// Halts on step 1.
pub const HALT1: &str = include_str!("../fixtures/halt1.tm");
/// Halts on step 14.
pub const HALT14: &str = include_str!("../fixtures/halt14.tm");
