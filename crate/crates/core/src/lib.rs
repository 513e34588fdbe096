pub mod classify;
pub mod cli;
pub mod corpus;
pub mod expr;
pub mod ext_real;
pub mod measure;
pub mod norms;
pub mod verify;
