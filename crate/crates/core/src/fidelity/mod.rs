//! Fidelity metrics comparing real training data with a synthetic dataset,
//! on quantized tokens (χ², mutual information) or embeddings (MMD witness,
//! Fréchet distance, kNN precision/recall).

mod chi2;
mod frechet;
mod mmd;
mod mutual_info;
mod precision_recall;

pub use chi2::chi_squared_per_field;
pub use frechet::frechet_distance;
pub use mmd::{mmd_permutation_pvalue, mmd_witness_snr, snr, split_halves, MmdWitness};
pub use mutual_info::{mi_l2_difference, mutual_information_matrix};
pub use precision_recall::knn_precision_recall;
