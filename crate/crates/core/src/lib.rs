//! Exact computation with higher-rank graphs, their representation graphs,
//! Kumjian-Pask algebras and the associated modules.

pub mod fixtures;
pub mod fundgrp;
pub mod kgraph;
pub mod kpalg;
pub mod kpmod;
pub mod linalg;
pub mod repgraph;
pub mod scalar;
pub mod walks;

pub use fundgrp::{
    annihilator_at, annihilator_ball, base_point_independent, classify_group, f_class, indecomposability_verdict,
    presentation, universal_cover_ball, Annihilator, BallEdge, BallNode, CoverBall, FClass, FundError,
    FundamentalGroup, GroupClass, GroupPresentation, Verdict, Word,
};
pub use kgraph::{
    validate_kgraph, Degree, EdgeId, KGraph, KGraphError, KGraphReport, KGraphViolation, PathNF, RawEdge, RawKGraph,
    RawSquare, VertexId,
};
pub use kpalg::{KPElement, KpError, Monomial};
pub use kpmod::{
    act_element, act_generator, act_walk, basis_vertex_in_span, cyclic_closure, hom_from_morphism, hom_section,
    is_simple, reduce_to_vertex, submodule_witness, InducedHom, ModError, ModuleVector, Section,
};
pub use repgraph::{
    validate_rep, AdmissibilityWitness, BackwardWord, CanonicalForm, CoreId, MorphismFailure, RawCoreEdge,
    RawCoreVertex, RawRep, RepKGraph, RepReport, RepViolation, VertexAddr, VertexPartition,
};
pub use scalar::{Field, Scalar, ScalarError};
pub use walks::{lift_walk, parse_walk, reduce_walk, Letter, Reduced, Walk, WalkError};
