//! Exact integer and rational linear algebra on symmetric matrices.

pub mod io;
pub mod linalg;
pub mod matrix;
pub mod smith;

pub use io::{parse_gram, parse_matrix, read_gram, read_matrix};
pub use linalg::{
    det, det_square, diagonalize_over_q, is_positive_definite, orthogonal_complement, saturate,
};
pub use matrix::{GramMatrix, IntMatrix};
pub use smith::{smith_normal_form, SmithForm};
