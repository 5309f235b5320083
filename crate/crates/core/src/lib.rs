pub mod ansatz;
pub mod chem;
pub mod cli;
pub mod opt;
pub mod qop;
pub mod sim;
pub mod solve;
