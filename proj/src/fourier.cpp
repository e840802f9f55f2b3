#include "smpm/fourier.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace smpm {

namespace {

bool power_of_two(Index m) { return m >= 1 && (m & (m - 1)) == 0; }

}  // namespace

void fft_radix2(ComplexVector& a, int sign) {
  const Index m = a.size();
  if (!power_of_two(m)) throw std::invalid_argument("fft_radix2: length must be a power of two");
  // bit-reversal permutation
  for (Index i = 1, j = 0; i < m; ++i) {
    Index bit = m >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a(i), a(j));
  }
  for (Index len = 2; len <= m; len <<= 1) {
    const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (Index i = 0; i < m; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (Index j = 0; j < len / 2; ++j) {
        const std::complex<double> u = a(i + j);
        const std::complex<double> v = a(i + j + len / 2) * w;
        a(i + j) = u + v;
        a(i + j + len / 2) = u - v;
        w *= wl;
      }
    }
  }
}

ComplexMatrix fourier_transform_y(const Matrix& field) {
  const Index m_y = field.cols();
  if (!power_of_two(m_y) || m_y < 2)
    throw std::invalid_argument("fourier_transform_y: m_y must be a power of two >= 2");
  const Index half = m_y / 2;
  ComplexMatrix coeff(field.rows(), half);
  ComplexVector row(m_y);
  for (Index i = 0; i < field.rows(); ++i) {
    row = field.row(i).transpose().cast<std::complex<double>>();
    fft_radix2(row, -1);
    coeff.row(i) = row.head(half).transpose() / static_cast<double>(m_y);
  }
  return coeff;
}

Matrix inverse_fourier_y(const ComplexMatrix& coeff, int m_y, double* max_imag) {
  if (!power_of_two(m_y) || coeff.cols() != m_y / 2)
    throw std::invalid_argument("inverse_fourier_y: coefficient count must be m_y/2");
  Matrix field(coeff.rows(), m_y);
  ComplexVector row(m_y);
  double residue = 0.0;
  for (Index i = 0; i < coeff.rows(); ++i) {
    row.setZero();
    row(0) = coeff(i, 0);
    for (Index j = 1; j < m_y / 2; ++j) {
      row(j) = coeff(i, j);
      row(m_y - j) = std::conj(coeff(i, j));
    }
    fft_radix2(row, +1);  // forward carried the 1/m_y scale
    field.row(i) = row.real().transpose();
    residue = std::max(residue, row.imag().cwiseAbs().maxCoeff());
  }
  if (max_imag) *max_imag = residue;
  return field;
}

}  // namespace smpm
