//! Acoustic tube models: the Kelly-Lochbaum ladder and a single-reed
//! clarinet.

pub mod clarinet;
pub mod kl;
pub mod reed;

pub use clarinet::{clarinet_render, ClarinetState};
pub use kl::{kl_build, kl_tick, KellyLochbaumTract};
pub use reed::{reed_table_build, ReedTable};
