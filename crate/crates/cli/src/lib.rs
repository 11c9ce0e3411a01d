pub mod doc;
pub mod matfile;
