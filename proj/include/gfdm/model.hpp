#ifndef GFDM_MODEL_HPP
#define GFDM_MODEL_HPP

#include "gfdm/fft.hpp"
#include "gfdm/types.hpp"

namespace gfdm {

/// The N x N modulation matrix Phi = W_N^H * P * diag(F,...,F) with
/// F = Gamma * R * W_M, plus the cached factor matrices. Column kM+m of Phi
/// is the time-domain pulse carrying subsymbol m of subcarrier k.
struct ModulationMatrix {
    GfdmConfig cfg;
    FilterSpec filter;
    CMat Phi;   // N x N
    CMat W_M;   // unitary M-point DFT
    CMat W_N;   // unitary N-point DFT

    /// Subcarrier mapping matrix P_k (N x 2M): first M columns land on bin
    /// block k, last M columns on bin block k-1 (mod K).
    CMat subcarrier_map(int k) const;

    /// F = Gamma * R * W_M (2M x M).
    CMat filter_factor() const;
};

/// Eigenvalues d_l(q) = gamma_q + exp(i*2*pi*l/K) * gamma_{M+q} of the block
/// circulant factor, as a K x M array (row l, column q). These drive all the
/// closed-form rates and the fast equalizer.
CMat filter_block_eigenvalues(const FilterSpec& filter, int K);

/// Throws singular_filter_error if any |d_l(q)| < 1e-12 * sqrt(M).
void require_invertible(const CMat& block_eigs, int M);

ModulationMatrix modulation_matrix(const GfdmConfig& cfg, const FilterSpec& filter);

/// x = Phi * s without materializing Phi (per-block DFT, bin mapping, inverse
/// N-point DFT).
CVec modulate(const GfdmConfig& cfg, const FilterSpec& filter, const DataSymbols& data);

/// Time response g[0..N-1] of the shaping filter:
///   g[n] = 1/(sqrt(K)*M) * sum_q exp(i*2*pi*n*q/N) *
///          (gamma_q + exp(-i*2*pi*n/K) * gamma_{M+q}).
CVec time_domain_filter(const GfdmConfig& cfg, const FilterSpec& filter);

/// Prepend the last Ncp samples as a cyclic prefix and append the first Nw
/// samples as a suffix.
CVec add_cp_suffix(const CVec& x, const GfdmConfig& cfg);

/// Drop prefix and suffix again (the inner N samples).
CVec remove_cp(const CVec& y, const GfdmConfig& cfg);

}  // namespace gfdm

#endif
