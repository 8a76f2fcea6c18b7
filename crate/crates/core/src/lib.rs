//! Finding and certifying small sparse cuts with random walks.
//!
//! A graph is stored as an undirected CSR adjacency ([`graph`]). Lazy random
//! walks, exact or truncated ([`walk`]), are ranked into Lovász–Simonovits
//! curves ([`curve`]) whose level sets are swept for low-conductance cuts
//! ([`partition`]). [`spectral`] turns a vertex set into a lower bound on how
//! much walk mass stays inside it, and [`testbed`] supplies planted instances
//! plus an exhaustive oracle for `φ_k`.

pub mod curve;
pub mod error;
pub mod graph;
pub mod partition;
pub mod spectral;
pub mod testbed;
pub mod walk;

pub use curve::{build_curve, check_chord_bound, Envelope, LsCurve};
pub use error::{Error, Result};
pub use graph::{cut_of, load_edge_list, write_edge_list, Conductance, Cut, EdgeList, Graph};
pub use partition::{
    global_sparsest_cut, global_sparsest_cut_tight_volume, local_partition, GlobalParams,
    LocalOutcome, LocalParams, SweepOutcome,
};
pub use spectral::{certify_lower_bound, restricted_eigenpair, Certificate, LocalEigenpair};
pub use walk::{run_walk, DenseDistribution, Distribution, Masses, SparseDistribution, Walker};
