pub mod commands;
pub mod learner;
pub mod logic;
pub mod numerics;
pub mod oracle;
pub mod polytope;
pub mod wfomc;
