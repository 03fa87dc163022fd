//! Geocast protocols for static sensor networks and the tooling to compare
//! them: random unit-disk topologies, planarization, GPSR-style routing, a
//! discrete-event simulator, a brute-force delivery oracle and sweep harness.

pub mod baselines;
pub mod geometry;
pub mod harness;
pub mod oracle;
pub mod planar;
pub mod protocols;
pub mod routing;
pub mod simulator;
pub mod topology;
