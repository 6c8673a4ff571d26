//! Rotation hypersurfaces in Euclidean space, their intersections with
//! hyperplanes and spheres, height functions on warped surfaces, and the
//! superharmonic witness on `R^n`.

mod decomposition;
mod height;
mod parabolic;
mod rotation;

pub use decomposition::{
    corollary_tolerance, decomposition_check, intersection_angle, section_angle, slice_geodesity, CorollarySign,
    IntersectionReport, Section, SliceGeodesity, DEFAULT_FD_STEP, NORMALITY_TOL, TANGENCY_TOL,
};
pub use height::{height_order_study, random_curves, CurveInWarpedSurface, HeightCheck, HeightSample, TrigCoordinate};
pub use parabolic::{parabolicity_witness, witness_laplacian, witness_radial, SAMPLE_RADIUS};
pub use rotation::{graph_window, make_rotation_hypersurface, PrincipalCurvatures, ProfileJet, RotationHypersurface};
