#ifndef POLYMG_SMALLMAT_HPP
#define POLYMG_SMALLMAT_HPP

#include <complex>
#include <stdexcept>
#include <vector>

namespace polymg
{

using Complex = std::complex<double>;

/// Small dense row-major complex matrix for two-grid block symbols.
class ComplexMatrix
{
public:
  ComplexMatrix(int rows, int cols);
  ComplexMatrix(int rows, int cols, std::vector<Complex> entries);

  static ComplexMatrix identity(int n);
  static ComplexMatrix diagonal(const std::vector<Complex> &d);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  Complex &operator()(int i, int j) { return data_[index(i, j)]; }
  const Complex &operator()(int i, int j) const { return data_[index(i, j)]; }
  const std::vector<Complex> &entries() const { return data_; }

  ComplexMatrix adjoint() const;
  /// max_i sum_j |m_ij|
  double norm_inf() const;

private:
  std::size_t index(int i, int j) const
  {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(j);
  }

  int rows_;
  int cols_;
  std::vector<Complex> data_;
};

ComplexMatrix matmul(const ComplexMatrix &a, const ComplexMatrix &b);
ComplexMatrix operator-(const ComplexMatrix &a, const ComplexMatrix &b);

class EigenvalueNonConvergence : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// All eigenvalues of a square matrix: Householder reduction to upper
/// Hessenberg form followed by single-shift complex QR with deflation.
std::vector<Complex> eigenvalues(const ComplexMatrix &m);

double spectral_radius(const ComplexMatrix &m);

} // namespace polymg

#endif
