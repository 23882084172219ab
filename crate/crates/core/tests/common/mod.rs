//! Dense-matrix oracles shared by the integration suites.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use tcps_core::pauli::PauliString;
use tcps_core::statevector::StateVector;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn letter_matrix(letter: char) -> DMatrix<Complex64> {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    let entries = match letter {
        'I' => [o, z, z, o],
        'X' => [z, o, o, z],
        'Y' => [z, -i, i, z],
        'Z' => [o, z, z, -o],
        other => panic!("not a Pauli letter: {other}"),
    };
    DMatrix::from_row_slice(2, 2, &entries)
}

/// Kronecker product with qubit 0 as the least significant factor.
pub fn dense_pauli(p: &PauliString) -> DMatrix<Complex64> {
    let mut m = DMatrix::from_element(1, 1, c(1.0, 0.0));
    for q in 0..p.n_qubits() {
        m = letter_matrix(p.letter(q)).kronecker(&m);
    }
    m
}

pub fn dense_state(s: &StateVector) -> DVector<Complex64> {
    DVector::from_column_slice(s.amplitudes())
}

pub fn expectation(m: &DMatrix<Complex64>, v: &DVector<Complex64>) -> Complex64 {
    (v.adjoint() * m * v)[(0, 0)]
}

/// Every Pauli string on `n` qubits, identity included.
pub fn all_strings(n: usize) -> Vec<PauliString> {
    (0..4usize.pow(n as u32))
        .map(|code| {
            let letters: String = (0..n).map(|q| ['I', 'X', 'Y', 'Z'][(code >> (2 * q)) & 3]).collect();
            PauliString::from_letters(&letters).unwrap()
        })
        .collect()
}
