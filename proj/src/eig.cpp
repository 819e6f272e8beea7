#include "walg/eig.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace walg {

namespace {

std::vector<double> norm_roots(const std::vector<Rational>& norm_sq) {
  std::vector<double> out;
  out.reserve(norm_sq.size());
  for (const auto& r : norm_sq) out.push_back(std::sqrt(to_double(r)));
  return out;
}

}  // namespace

double max_form_eigenvalue(const RatMat& coords, const std::vector<Rational>& norm_sq) {
  const std::size_t n = coords.rows();
  if (n == 0) return 0.0;
  const std::vector<double> root = norm_roots(norm_sq);
  Eigen::MatrixXd s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      s(long(i), long(j)) = root[i] * to_double(coords.at(i, j)) / root[j];
  const Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  return solver.eigenvalues().maxCoeff();
}

std::vector<std::complex<double>> form_eigenvalues(const GaussMat& coords,
                                                   const std::vector<Rational>& norm_sq) {
  const std::size_t n = coords.rows();
  if (n == 0) return {};
  const std::vector<double> root = norm_roots(norm_sq);
  Eigen::MatrixXcd s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const GaussianRational& z = coords.at(i, j);
      s(long(i), long(j)) =
          std::complex<double>(to_double(z.re), to_double(z.im)) * (root[i] / root[j]);
    }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(s);
  std::vector<std::complex<double>> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = solver.eigenvalues()(long(i));
  return out;
}

std::vector<double> sym_eigenvalues(const std::vector<double>& a, std::size_t n) {
  if (n == 0) return {};
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(long(i), long(j)) = a[i * n + j];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (m + m.transpose()));
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = solver.eigenvalues()(long(i));
  return out;
}

std::vector<double> generalized_sym_eigenvalues(const RatMat& form, const RatMat& gram) {
  const std::size_t n = form.rows();
  if (n == 0) return {};
  Eigen::MatrixXd a(n, n);
  Eigen::MatrixXd b(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      a(long(i), long(j)) = to_double(form.at(i, j));
      b(long(i), long(j)) = to_double(gram.at(i, j));
    }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (a + a.transpose()),
                                                                   0.5 * (b + b.transpose()));
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = solver.eigenvalues()(long(i));
  return out;
}

}  // namespace walg
