//! Holds the `acceptance` test target. Run it with
//! `cargo test -p qdiag-validation --test acceptance`.
