//! Properly convex projective domains, their Hilbert geometry and discrete
//! subgroups of their automorphism groups.

pub mod anosov;
pub mod catalog;
pub mod domain;
pub mod error;
pub mod flow;
pub mod group;
pub mod io;
pub mod projlin;

pub use domain::{
    cone_over_base, convex_hull_connected, hausdorff, is_properly_embedded, make_simplex, make_simplex_from_lifts,
    AffineChart, ConvexBody, FaceDescriptor, FaceKind, Mode, Shape,
};
pub use group::{Ball, BallView, LimitSetSample, MatrixGroup};
pub use error::{Error, ErrorKind, Result};
pub use projlin::{
    apply_endo, classify_proximal, eigenvalue_moduli, power_limit, sequence_limit, singular_values,
    translation_length, EndomorphismClass, Mat, ProjectiveMap, ProjectivePoint, ProximalData, Subspace, Vector,
};
pub use flow::{
    axis_shadowing_error, flow, in_invariant_set, transitivity_experiment, EndpointBox, TransitivityOutcome,
    TransitivityWitness, UnitTangent,
};
pub use anosov::{
    boundary_map_sample, chart_boundedness, collinear_triples, gap_profile, hyperplane_separation,
    invariant_domain_from_limit, singular_gap, transversality_check, BoundaryMapSample, GapProfile, InvariantDomain,
    TransversalityReport,
};
