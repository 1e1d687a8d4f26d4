//! Holds the acceptance suite (`tests/acceptance.rs`). The package exists so
//! that the suite, which fails while any criterion is unmet, runs after every
//! other test target in `cargo test --workspace`.
