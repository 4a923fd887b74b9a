//! Geometric quantities of spherically symmetric metrics.

pub mod inequality;
pub mod mass;
pub mod profile;
pub mod slice;
pub mod zas;

pub use inequality::{
    adm_mass, check_nonnegative_curvature, check_penrose, check_zas_inequality, omae_radius, Omae, PenroseCheck,
    ZasInequality,
};
pub use mass::{combine_bh_masses, combine_zas_masses, ExtendedMass};
pub use profile::{JetFn, Local, OriginExponent, Point, RadialProfile, Segment, Tail, Tolerances};
pub use slice::{
    capacity_of_slice, harmonic_potential, hawking_mass, mean_curvature, reg_mass_of_slice, scalar_curvature,
    slice_report, SliceReport,
};
pub use zas::{
    capacity_of_zas, classify_zas, h43_mass_limit, is_zas, origin_power, zas_mass, zas_mass_routes, CapacitySign,
    ZasReport,
};
