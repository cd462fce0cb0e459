pub mod cli;
pub mod datagen;
pub mod grammar;
pub mod logic;
pub mod phasemap;
pub mod solver;
