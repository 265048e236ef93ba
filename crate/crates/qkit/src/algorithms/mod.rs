//! End-to-end algorithms: each is a thin orchestration over circuits and
//! transforms plus its classical pre- and post-processing.

pub mod bv;
pub mod grover;
pub mod groups;
pub mod hhl;
pub mod ising;
pub mod layered;
pub mod minfind;
pub mod pca;
pub mod potts;
pub mod qaoa;
pub mod schrodinger;
pub mod shor;
pub mod walk;

pub use bv::{bv_circuit, bv_hidden_string, bv_oracle, BvRun};
pub use grover::{grover_search, GroverRun};
pub use groups::{a_n, S3_ELEMENTS, rep_matrix_element, regular_representation, s3, FiniteGroup};
pub use hhl::{hhl_classical, hhl_solve, HhlProblem, HhlResult, PauliAxis};
pub use ising::{ansatz_state, sampled_energy, exact_ising_ground, ising_hamiltonian, vqe_ising, AnsatzKind, IsingModel, VqeConfig, VqeResult};
pub use layered::{bfs_layers, layered_partition, LayeredResult, UNREACHED};
pub use minfind::{min_find, min_find_budget, MinFindResult};
pub use pca::{covariance, purity_circuit, qpca_two_feature, PcaResult};
pub use potts::{potts_partition, potts_qft2_circuit, potts_qft2_fragment, PottsModel};
pub use qaoa::{qaoa_grid_search, qaoa_maxcut, MaxCutInstance, QaoaParams, QaoaResult};
pub use schrodinger::{schrodinger_evolve, schrodinger_step_circuit};
pub use shor::{compiled_shor15_circuit, compiled_shor15_distribution, period_find_classical, shor_factor, ShorReport};
pub use walk::{quantum_walk_cycle, walk_circuit, WalkResult};
