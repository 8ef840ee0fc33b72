//! Leakage metrics between real training rows and synthetic rows.

mod knn_stats;
mod replicas;

pub use knn_stats::{knn_distance_stats, DistanceStats, PRIVACY_KS};
pub use replicas::replicated_rows;
