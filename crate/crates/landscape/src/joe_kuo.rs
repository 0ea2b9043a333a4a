//! The full `new-joe-kuo-6.21201` table, for Sobol designs wider than the
//! 64 dimensions embedded in the core crate.

use std::sync::OnceLock;

use landscape_core::sobol::{DirectionNumbers, EmbeddedJoeKuo};
use sobol::params::JoeKuoD6;

pub struct ExtendedJoeKuo {
    dims: Vec<(usize, u32, Vec<u32>)>,
}

impl DirectionNumbers for ExtendedJoeKuo {
    fn max_dims(&self) -> usize {
        self.dims.len() + 1
    }

    fn parameters(&self, dim: usize) -> (usize, u32, &[u32]) {
        let (s, a, m) = &self.dims[dim - 2];
        (*s, *a, m)
    }
}

/// Decompressed on first use.
pub fn extended() -> &'static ExtendedJoeKuo {
    static TABLE: OnceLock<ExtendedJoeKuo> = OnceLock::new();
    TABLE.get_or_init(|| ExtendedJoeKuo {
        dims: JoeKuoD6::extended()
            .dim_params
            .into_iter()
            .map(|p| (p.m.len(), p.a, p.m))
            .collect(),
    })
}

/// The embedded table when it suffices, the full one otherwise.
pub fn for_dim(dim: usize) -> &'static dyn DirectionNumbers {
    static EMBEDDED: EmbeddedJoeKuo = EmbeddedJoeKuo;
    if dim <= EMBEDDED.max_dims() {
        &EMBEDDED
    } else {
        extended()
    }
}
