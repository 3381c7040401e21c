//! Shared fixtures for the benchmarks in `benches/`.

use flexcurv::catalog::{FlexSpec, SurfaceSpec};
use flexcurv::{FlexField, MongePatch};

/// A catalog surface on its default domain.
pub fn surface(name: &str) -> MongePatch {
    SurfaceSpec::parse(name)
        .expect("catalog surface")
        .patch(None)
}

/// A catalog or expression flex resolved against `patch`.
pub fn flex(patch: &MongePatch, text: &str) -> FlexField {
    FlexSpec::parse(text)
        .and_then(|f| f.resolve(patch))
        .expect("valid flex")
        .field
}
