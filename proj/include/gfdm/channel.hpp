#ifndef GFDM_CHANNEL_HPP
#define GFDM_CHANNEL_HPP

#include "gfdm/types.hpp"

namespace gfdm {

/// Circulant channel after CP removal: FIR taps h plus the cached diagonal
/// Lambda_H = W_N H W_N^H (the N eigenvalues of the circulant matrix).
struct ChannelSpec {
    CVec h;
    CVec lambda;  // length N

    static ChannelSpec awgn(const GfdmConfig& cfg);
    static ChannelSpec from_taps(const GfdmConfig& cfg, const CVec& taps);

    /// Dense circulant matrix with first column [h; 0]. Oracle use only.
    CMat circulant(const GfdmConfig& cfg) const;

    bool is_awgn() const;

    /// Throws singular_channel_error on a (near-)zero eigenvalue.
    void require_invertible() const;
};

/// ITU Pedestrian B power-delay profile (6 paths), resampled to the given
/// chip rate and normalized to unit average power. Each call draws
/// independent circularly symmetric Gaussian tap gains.
///
/// Relative delays {0, 200, 800, 1200, 2300, 3700} ns with average powers
/// {0, -0.9, -4.9, -8, -7.8, -23.9} dB (ITU-R M.1225, Pedestrian B).
CVec pedestrian_b_taps(Rng& rng, double chip_rate_hz = 3.84e6);

/// Number of chips spanned by the Pedestrian B profile at the given rate
/// (use to pick Ncp).
int pedestrian_b_length(double chip_rate_hz = 3.84e6);

}  // namespace gfdm

#endif
