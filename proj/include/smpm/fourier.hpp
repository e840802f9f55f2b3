#pragma once

#include "smpm/types.hpp"

namespace smpm {

/// In-place radix-2 FFT, unscaled; sign -1 forward (e^{-i...}), +1 inverse.
/// Length must be a power of two.
void fft_radix2(ComplexVector& a, int sign);

/// Row-wise transverse transform of an r x m_y real field: coefficients
/// c_j = (1/m_y) sum_q u_q e^{-2 pi i j q / m_y}, truncated to the modes
/// j = 0 .. m_y/2 - 1 (the Nyquist mode is dropped). Throws when m_y is not
/// a power of two.
ComplexMatrix fourier_transform_y(const Matrix& field);

/// Reconstructs the real field from the truncated half spectrum by Hermitian
/// mirroring with a zero Nyquist mode. Fields band-limited to the kept modes
/// round-trip to machine precision. max_imag, when given, receives the
/// largest imaginary residue discarded.
Matrix inverse_fourier_y(const ComplexMatrix& coeff, int m_y, double* max_imag = nullptr);

}  // namespace smpm
