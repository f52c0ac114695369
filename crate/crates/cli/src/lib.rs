//! Command-line companion of `denslab-core`: simulation runs as
//! reproducible artifacts, file transforms, geodesic sampling, and the
//! verification entry points.
//!
//! The tool speaks four subcommands:
//!
//! - `simulate <equation> --config <run.json> [--out-dir <dir>]` — integrate
//!   one of the seven flows and write one CSV table per field plus a
//!   self-describing `manifest.json` ([`sim`]);
//! - `verify <check> [--config <overrides.json>] [--tol <t>]` — run a
//!   numerical certificate and print its report; exit 0/1/2 for
//!   pass/fail/config error ([`verify`]);
//! - `transform <madelung|madelung-inv|hasimoto> --in <a.csv> --out <b.csv>`
//!   — map field tables through the core transforms ([`transform`]);
//! - `geodesic <fisher-rao|fubini-study> --config <geo.json>` — sample
//!   distinguished geodesics to disk ([`geodesic`]).
//!
//! Everything written to a file or to stdout is deterministic for a fixed
//! config and seed: tables use 17-significant-digit floats ([`format`]),
//! manifests use sorted keys, and report rendering excludes wall-clock
//! time. The only environment dependence is `DENSLAB_THREADS`, the worker
//! count for `verify all`, which affects scheduling but not output bytes.

pub mod config;
pub mod diag;
pub mod format;
pub mod geodesic;
pub mod sim;
pub mod transform;
pub mod verify;

mod cli;

pub use cli::run_cli;
pub use diag::{CliResult, Diagnostic};
