pub mod corpus;
pub mod diffusion;
pub mod dnae;
pub mod factorization;
pub mod synthetic;
