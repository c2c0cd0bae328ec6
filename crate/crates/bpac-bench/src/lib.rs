//! Shared helpers for the pipeline benchmarks.

use std::path::PathBuf;

use bpac_core::io::parse_canvas;
use bpac_core::model::Canvas;

/// Root of the shipped demo canvas.
pub fn demo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../examples/pizzapazza")
}

/// The demo canvas, parsed once for benchmarks operating in memory.
pub fn demo_canvas() -> Canvas {
    parse_canvas(&demo_root())
        .canvas
        .expect("demo canvas parses cleanly")
}
