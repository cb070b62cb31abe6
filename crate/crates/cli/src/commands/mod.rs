//! Subcommand implementations.

pub mod admissible;
pub mod bench;
pub mod expand;
pub mod explore;
pub mod oracle;
pub mod tables;
pub mod verify;

use crate::config::Config;
use crate::manifest::RunManifest;

/// Shared command context: configuration, output style, run manifest.
pub struct Ctx {
    pub cfg: Config,
    pub pretty: bool,
    pub manifest: RunManifest,
}

impl Ctx {
    pub fn pretty(&self) -> bool {
        self.pretty || self.cfg.pretty
    }
}
