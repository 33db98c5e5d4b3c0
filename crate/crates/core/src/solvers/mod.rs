//! Approximation algorithms for the cover and knapsack problems.

pub mod cert;
pub mod ea;
pub mod greedy;
pub mod iterative;

pub use ea::{eask, eask_c, eassc, eassc_c, EaOptions};
pub use greedy::{greedy_cover, greedy_knapsack, sk_greedy, ssc_greedy, Enumeration};
pub use iterative::{gr, isk, issc, IskMode, IterOptions};
