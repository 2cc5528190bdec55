pub mod moments;
pub mod quad;
