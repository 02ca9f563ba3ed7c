//! Benchmarks for the subset-sum DP, the character-sum transform and group
//! structure computation. Run with `cargo bench -p ecag-bench`.
