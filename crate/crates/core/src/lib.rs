pub mod exactnum;
pub mod ifs_core;
pub mod markov;
pub mod dimension;
pub mod analysis;
pub mod words;
pub mod beta_exp;
pub mod open_map;
pub mod codings;
pub mod oracle;
pub mod cli;
