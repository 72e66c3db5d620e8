//! File formats, manifests and parallel drivers for the `sidon` tool.

pub mod app;
pub mod manifest;
pub mod par;
pub mod setfile;
