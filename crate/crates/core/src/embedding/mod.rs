//! Feature embeddings of tabular rows, random Fourier features for kernel
//! metrics, and ANOVA-F feature selection.

mod anova;
mod bandwidth;
mod embedder;
mod precomputed;
mod rff;

pub use anova::{anova_f_scores, anova_f_select};
pub use bandwidth::median_heuristic_bandwidth;
pub use embedder::{fit_embedder, EmbedBlock, Embedder, FeatureMap};
pub use precomputed::PrecomputedEmbedding;
pub use rff::{rff_features, RffMap};
