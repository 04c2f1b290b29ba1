//! C ABI surface; populated alongside the core build.
