#pragma once

#include <complex>
#include <vector>

#include "walg/exact_mat.hpp"
#include "walg/rational.hpp"

namespace walg {

// Floating-point eigensolves over exact inputs.  Everything exact stays in
// the callers; these helpers only cast and diagonalize, so their results are
// diagnostics and tolerance-gated comparisons, never certificates.

// Largest eigenvalue of the quadratic form whose operator matrix in a basis
// with diagonal Gram `norm_sq` is `coords`, computed from the symmetric
// similarity D^{1/2} coords D^{-1/2}.  Empty input gives 0.
double max_form_eigenvalue(const RatMat& coords, const std::vector<Rational>& norm_sq);

// All eigenvalues of the same similarity for a complex, generally non-normal
// operator matrix.
std::vector<std::complex<double>> form_eigenvalues(const GaussMat& coords,
                                                   const std::vector<Rational>& norm_sq);

// Ascending eigenvalues of the pencil (form, gram) with both matrices
// symmetric and gram positive definite.
std::vector<double> generalized_sym_eigenvalues(const RatMat& form, const RatMat& gram);

// Ascending eigenvalues of a dense symmetric matrix given row-major as
// `a` (n*n entries).  The matrix is symmetrized before solving.
std::vector<double> sym_eigenvalues(const std::vector<double>& a, std::size_t n);

}  // namespace walg
