#ifndef GFDM_FFT_HPP
#define GFDM_FFT_HPP

#include "gfdm/common.hpp"

namespace gfdm {

/// Unitary DFT matrix, [W]_{j,k} = exp(-i*2*pi*j*k/n)/sqrt(n).
CMat dft_matrix(int n);

/// Unitary forward DFT of a vector (matches dft_matrix(n) * x).
CVec fft_unitary(const CVec& x);

/// Unitary inverse DFT (matches dft_matrix(n).adjoint() * x).
CVec ifft_unitary(const CVec& x);

/// In-place unnormalized forward DFT, X[j] = sum_k x[k] exp(-i*2*pi*j*k/n).
void fft_raw(CVec& x);

}  // namespace gfdm

#endif
