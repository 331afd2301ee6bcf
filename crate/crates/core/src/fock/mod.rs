//! Truncated Fock-space Fröhlich model: `N` bosons hopping on the sites of a
//! periodic lattice, coupled to a finite set of phonon modes with a total
//! phonon-number cutoff.
//!
//! Many-body vectors are indexed as `config · P + phonon`, where `config`
//! runs over sorted particle configurations and `P` is the number of phonon
//! occupation states.

mod density;
mod dynamics;
mod gross;
mod hamiltonian;
mod krylov;
mod mean_field;
mod model;
mod sparse;
mod states;
mod weyl;


pub use density::{
    depletion, reduced_density, trace_distance, FunctionalContext, FunctionalReport,
};
pub use dynamics::{compare_with_mean_field, uniform_times, ComparisonConfig, ComparisonRun};
pub use gross::{
    conjugated_apply, continuum_form_gross_hamiltonian, correction_operator, interaction_kernel,
    pair_energies, representation_residual, GrossHamiltonian,
};
pub use hamiltonian::{
    build_cutoff_frohlich_hamiltonian, build_free_hamiltonian, build_frohlich_hamiltonian,
    coupling, field_operator, gradient_entries, kinetic, laplacian_entries, neighbour,
    number_operator, one_body, site_matrix, site_potential, summed_amplitudes,
};
pub use krylov::{evolve_krylov, evolve_sparse, imaginary_time_filter, krylov_exp};
pub use mean_field::{LatticePekarFlow, LatticePekarState};
pub use model::{
    binomial, first_shell, FockModel, ManyBodyBasis, Mode, ModelSpec, ParticleBasis,
    PhononBasis, DEFAULT_DIMENSION_CAP,
};
pub use sparse::{SparseOperator, HERMITIAN_TOL};
pub use states::{
    coherent, gross_dressed_pekar_state, modulated_profile, pekar_state, product_coefficients, random_low_energy_states,
    random_states, tensor,
};
pub use weyl::{
    apply_weyl, apply_weyl_taylor, coherent_leakage, coherent_vector, displacement_generator, weyl_matrix, weyl_operator,
    GrossTransform, PhononOperator,
};
