#include "polymg/smallmat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace polymg
{

ComplexMatrix::ComplexMatrix(int rows, int cols)
    : rows_(rows), cols_(cols)
{
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("matrix dimensions must be positive");
  data_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), Complex{});
}

ComplexMatrix::ComplexMatrix(int rows, int cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries))
{
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("matrix dimensions must be positive");
  if (data_.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
    throw std::invalid_argument("entry count does not match matrix dimensions");
  for (const auto &z : data_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw std::invalid_argument("matrix entries must be finite");
}

ComplexMatrix ComplexMatrix::identity(int n)
{
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(const std::vector<Complex> &d)
{
  ComplexMatrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i)
    m(static_cast<int>(i), static_cast<int>(i)) = d[i];
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const
{
  ComplexMatrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j)
      t(j, i) = std::conj((*this)(i, j));
  return t;
}

double ComplexMatrix::norm_inf() const
{
  double best = 0.0;
  for (int i = 0; i < rows_; ++i)
  {
    double s = 0.0;
    for (int j = 0; j < cols_; ++j)
      s += std::abs((*this)(i, j));
    best = std::max(best, s);
  }
  return best;
}

ComplexMatrix matmul(const ComplexMatrix &a, const ComplexMatrix &b)
{
  if (a.cols() != b.rows())
    throw std::invalid_argument("matmul: inner dimensions disagree (" + std::to_string(a.cols()) +
                                " vs " + std::to_string(b.rows()) + ")");
  ComplexMatrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k)
    {
      const Complex aik = a(i, k);
      if (aik == Complex{})
        continue;
      for (int j = 0; j < b.cols(); ++j)
        c(i, j) += aik * b(k, j);
    }
  return c;
}

ComplexMatrix operator-(const ComplexMatrix &a, const ComplexMatrix &b)
{
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("matrix difference: shape mismatch");
  ComplexMatrix c = a;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      c(i, j) -= b(i, j);
  return c;
}

namespace
{

void reduce_to_hessenberg(ComplexMatrix &h)
{
  const int n = h.rows();
  std::vector<Complex> v(static_cast<std::size_t>(n));
  for (int k = 0; k + 2 < n; ++k)
  {
    double norm2 = 0.0;
    for (int i = k + 1; i < n; ++i)
      norm2 += std::norm(h(i, k));
    const double norm = std::sqrt(norm2);
    if (norm == 0.0)
      continue;
    const Complex x0 = h(k + 1, k);
    const Complex phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : Complex{1.0};
    const Complex alpha = -phase * norm;
    double vnorm2 = 0.0;
    for (int i = k + 1; i < n; ++i)
    {
      v[static_cast<std::size_t>(i)] = h(i, k) - (i == k + 1 ? alpha : Complex{});
      vnorm2 += std::norm(v[static_cast<std::size_t>(i)]);
    }
    if (vnorm2 == 0.0)
      continue;
    const double scale = 2.0 / vnorm2;
    // H <- (I - s v v^H) H
    for (int j = 0; j < n; ++j)
    {
      Complex dot{};
      for (int i = k + 1; i < n; ++i)
        dot += std::conj(v[static_cast<std::size_t>(i)]) * h(i, j);
      dot *= scale;
      for (int i = k + 1; i < n; ++i)
        h(i, j) -= v[static_cast<std::size_t>(i)] * dot;
    }
    // H <- H (I - s v v^H)
    for (int i = 0; i < n; ++i)
    {
      Complex dot{};
      for (int j = k + 1; j < n; ++j)
        dot += h(i, j) * v[static_cast<std::size_t>(j)];
      dot *= scale;
      for (int j = k + 1; j < n; ++j)
        h(i, j) -= dot * std::conj(v[static_cast<std::size_t>(j)]);
    }
    for (int i = k + 2; i < n; ++i)
      h(i, k) = 0.0;
  }
}

} // namespace

std::vector<Complex> eigenvalues(const ComplexMatrix &m)
{
  if (!m.is_square())
    throw std::invalid_argument("eigenvalues: matrix must be square");
  const int n = m.rows();
  ComplexMatrix h = m;
  reduce_to_hessenberg(h);

  const double eps = std::numeric_limits<double>::epsilon();
  const double anorm = std::max(h.norm_inf(), std::numeric_limits<double>::min());
  std::vector<Complex> eig;
  eig.reserve(static_cast<std::size_t>(n));
  std::vector<Complex> cs(static_cast<std::size_t>(n)), sn(static_cast<std::size_t>(n));

  int hi = n - 1;
  int iter = 0;
  int total_iter = 0;
  const int max_total_iter = 30 * std::max(10, n);
  while (hi >= 0)
  {
    if (hi == 0)
    {
      eig.push_back(h(0, 0));
      break;
    }
    int lo = hi;
    while (lo > 0)
    {
      // Relative test, floored at eps*|H| so that (near-)zero eigenvalues deflate.
      const double s = std::abs(h(lo, lo)) + std::abs(h(lo - 1, lo - 1));
      if (std::abs(h(lo, lo - 1)) <= eps * std::max(s, anorm))
      {
        h(lo, lo - 1) = 0.0;
        break;
      }
      --lo;
    }
    if (lo == hi)
    {
      eig.push_back(h(hi, hi));
      --hi;
      iter = 0;
      continue;
    }
    if (lo == hi - 1)
    {
      // Trailing 2x2 block: take its eigenvalues directly.
      const Complex a = h(lo, lo), b = h(lo, hi), c = h(hi, lo), d = h(hi, hi);
      const Complex half_tr = 0.5 * (a + d);
      const Complex disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
      eig.push_back(half_tr + disc);
      eig.push_back(half_tr - disc);
      hi -= 2;
      iter = 0;
      continue;
    }
    ++iter;
    if (total_iter >= max_total_iter)
      throw EigenvalueNonConvergence("QR iteration did not converge after " + std::to_string(total_iter) +
                                     " sweeps (matrix size " + std::to_string(n) + ")");
    ++total_iter;

    Complex mu;
    if (iter % 10 == 0)
    {
      // Exceptional shift to break cycles.
      mu = h(hi, hi) + Complex(std::abs(h(hi, hi - 1)) * 0.75, std::abs(h(hi, hi - 1)) * 0.25);
    }
    else
    {
      const Complex a = h(hi - 1, hi - 1), b = h(hi - 1, hi), c = h(hi, hi - 1), d = h(hi, hi);
      const Complex half_tr = 0.5 * (a + d);
      const Complex disc = std::sqrt(half_tr * half_tr - (a * d - b * c));
      const Complex m1 = half_tr + disc, m2 = half_tr - disc;
      mu = std::abs(m1 - d) < std::abs(m2 - d) ? m1 : m2;
    }

    for (int k = lo; k <= hi; ++k)
      h(k, k) -= mu;
    for (int k = lo; k < hi; ++k)
    {
      const Complex x = h(k, k), y = h(k + 1, k);
      const double r = std::hypot(std::abs(x), std::abs(y));
      Complex c{1.0}, s{};
      if (r > 0.0)
      {
        c = x / r;
        s = y / r;
      }
      cs[static_cast<std::size_t>(k)] = c;
      sn[static_cast<std::size_t>(k)] = s;
      for (int j = k; j <= hi; ++j)
      {
        const Complex u = h(k, j), w = h(k + 1, j);
        h(k, j) = std::conj(c) * u + std::conj(s) * w;
        h(k + 1, j) = -s * u + c * w;
      }
    }
    for (int k = lo; k < hi; ++k)
    {
      const Complex c = cs[static_cast<std::size_t>(k)], s = sn[static_cast<std::size_t>(k)];
      const int last = std::min(k + 2, hi);
      for (int i = lo; i <= last; ++i)
      {
        const Complex u = h(i, k), w = h(i, k + 1);
        h(i, k) = u * c + w * s;
        h(i, k + 1) = -u * std::conj(s) + w * std::conj(c);
      }
    }
    for (int k = lo; k <= hi; ++k)
      h(k, k) += mu;
  }
  return eig;
}

double spectral_radius(const ComplexMatrix &m)
{
  if (!m.is_square())
    throw std::invalid_argument("spectral_radius: matrix must be square");
  if (m.rows() > 512)
    throw std::invalid_argument("spectral_radius: matrix larger than 512");
  double r = 0.0;
  for (const auto &z : eigenvalues(m))
    r = std::max(r, std::abs(z));
  return r;
}

} // namespace polymg
