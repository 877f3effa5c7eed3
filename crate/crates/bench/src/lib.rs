//! Shared setup for the kernel benchmarks.

use wlim_core::geometry::AngularFamilies;
use wlim_core::outer::OuterFamily;
use wlim_core::seq_space::KoetheMatrix;
use wlim_core::weights::{make_wk, AngularWeight};

pub const M_CUT: usize = 40;

pub fn outer_family() -> OuterFamily {
    OuterFamily::new(AngularFamilies::new(M_CUT).unwrap(), M_CUT).unwrap()
}

pub fn weight() -> AngularWeight {
    let matrix = KoetheMatrix::default_matrix(50, 5).unwrap();
    let families = AngularFamilies::new(M_CUT).unwrap();
    make_wk(2, &matrix, &families, 12).unwrap()
}
