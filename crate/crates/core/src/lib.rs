pub mod bundles;
pub mod cohomology;
pub mod cto;
pub mod forms;
pub mod linalg;
pub mod rational;
pub mod rng;
pub mod square_classes;
