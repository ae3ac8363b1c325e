pub mod cli;
pub mod expr;
pub mod flow;
pub mod poly;
pub mod rational;
pub mod series;
pub mod sheffer;
pub mod weyl;
