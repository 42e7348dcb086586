//! Jordan-Wigner toolbox for finitely many fermionic modes.
//!
//! Modes carry positive integer labels; a [`ModeSet`] of size `n` indexes a
//! `2^n`-dimensional space where the smallest label is the most significant
//! bit of a basis index. On top of that sit the exact sign kernels
//! ([`phase`]), fermionic products, embeddings and partial traces
//! ([`algebra`]), parity structure ([`parity`]), states and correlation
//! classes ([`states`]) and superoperators ([`maps`]).
//!
//! ```
//! use fermikit_core::{emit_table, TableArg, TableKind, ModeSet};
//!
//! let y: ModeSet = "{1,2}".parse().unwrap();
//! let f = emit_table(TableKind::F, TableArg::Modes(&y)).unwrap();
//! assert_eq!(f.to_glyphs().lines().next(), Some("+ + + -"));
//! ```

pub mod algebra;
pub mod error;
pub mod io;
pub mod maps;
pub mod modes;
pub mod parity;
pub mod phase;
pub mod random;
pub mod states;

pub use algebra::{
    elementary, embed, embed_standard, hs_inner, jw_ladder, lambda_map, ordered_product, partial_trace, phi, psi,
    tensor_fermionic, tensor_standard, Basis, Direction, LadderKind, Operator, C64, DEFAULT_TOL,
};
pub use error::{Error, Result};
pub use maps::{
    choi, is_local_map, is_physical_map, is_tpcp, map_embed, map_parity, map_tensor, tpcp_report, ChoiMatrix,
    LocalTarget, LocalityReport, MapProduct, SuperOp, TpcpReport, LOCALITY_TOL, MAP_MODE_CAP,
};
pub use modes::{
    index_pattern, pattern_index, restrict, validate_partition, ModeLabel, ModeSet, OccPattern, OrderedPartition,
    Partition, DEFAULT_MODE_CAP,
};
pub use parity::{
    local_parity_projector, local_parity_superprojector, operator_parity, parity_operator, parity_projector,
    product_extension_classify, project_sector, sectors, tps_unitary, vector_parity, Parity, ParitySector,
    ProductExtensionReport, StateVector,
};
pub use phase::{emit_table, phase_f, phase_h, phase_l, phase_u, Sign, SignTable, TableArg, TableKind};
pub use states::{
    classify_correlation, coeffs, reduce_state, separable_certificate, CoeffMatrix, CorrelationReport, DensityMatrix,
    SsrMode,
};
