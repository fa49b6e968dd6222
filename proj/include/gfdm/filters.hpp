#ifndef GFDM_FILTERS_HPP
#define GFDM_FILTERS_HPP

#include "gfdm/types.hpp"

namespace gfdm {

/// Dirichlet filter: gamma_0..M-1 = 1, gamma_M..2M-1 = 0. GFDM with this
/// filter is SC-FDM; its time response is the periodic sinc kernel.
FilterSpec dirichlet_filter(int M);

/// (Square-root) raised-cosine filter sampled in the frequency domain.
///
/// Bin j < M sits at signed frequency index j, bin j >= M at j - 2M (in units
/// of 1/Tb); the RC magnitude response with period Ts is centered at
/// (M-1)/2 and sampled at those indices, then renormalized to power M.
/// alpha = 0 reproduces the Dirichlet filter exactly.
FilterSpec raised_cosine_filter(int M, double alpha, bool square_root);

}  // namespace gfdm

#endif
