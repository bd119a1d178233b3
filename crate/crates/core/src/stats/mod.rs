//! Analytic statistics of path parameters and the path-length criteria.

pub mod criteria;
pub mod edge;
pub mod moments;
pub mod pdf;
pub mod quadrature;

pub use criteria::{
    criterion_availability, criterion_fidelity, criterion_fidelity_with, decision_tables, expected_waiting_time,
    AvailabilityCriterion, CriteriaConfig, DecisionTable, EntangledMassMode, FidelityCriterion,
};
pub use edge::{EdgeMoments, UniformEdgeDistribution};
pub use moments::{
    average_entangled_path_length, mean_path_fidelity, mean_path_probability, std_path_fidelity,
    std_path_fidelity_narrow_approx, std_path_probability, std_path_probability_narrow_approx, EntangledPathLength,
};
pub use pdf::{pdf_path_fidelity, pdf_path_probability, PathFidelityPdf, PathParameterPdf, PathProbabilityPdf};
