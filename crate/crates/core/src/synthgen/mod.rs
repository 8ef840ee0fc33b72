//! Baseline generators: a Gaussian-copula synthesizer, a per-field
//! independent categorical sampler, a Laplace output-perturbation sampler
//! for categorical distributions, the iterative-retraining harness and a
//! demo population with known structure.

mod baseline;
mod collapse;
mod copula;
mod fixture;
mod independent;
mod private;
mod simplex;

pub use baseline::GeneratorSpec;
pub use collapse::{iterative_retrain, CollapseRun};
pub use copula::{fit_gaussian_copula, sample_gaussian_copula, GaussianCopulaModel, Marginal};
pub use fixture::{demo_population, demo_schema};
pub use independent::IndependentSampler;
pub use private::{perturb_with_noise, private_sample_perturb, PrivateSamplerConfig};
pub use simplex::project_to_simplex;
