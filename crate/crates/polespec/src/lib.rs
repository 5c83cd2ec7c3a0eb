pub mod arrangement;
pub mod cli;
pub mod graded;
pub mod groebner;
pub mod koszul;
pub mod linalg;
pub mod resolution;
pub mod saturation;
pub mod specseq;
