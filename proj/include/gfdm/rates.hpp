#ifndef GFDM_RATES_HPP
#define GFDM_RATES_HPP

#include "gfdm/channel.hpp"
#include "gfdm/model.hpp"

namespace gfdm {

enum class Receiver { MF, MF_SIC, ZF, MMSE };

const char* receiver_name(Receiver r);

/// Per-subsymbol SINR (linear, K x M) and the resulting sum rate in bits per
/// GFDM symbol, sum_rate = sum log2(1 + SINR_{k,m}).
struct RateReport {
    Receiver receiver = Receiver::ZF;
    RMat sinr;  // K x M
    double sum_rate_bits = 0.0;

    static RateReport from_sinr(Receiver r, RMat sinr_matrix);
};

/// Sum capacity of the one-symbol data model: N * log2(1 + Ps/sigma2).
double rate_upper_bound(const GfdmConfig& cfg, const SnrPoint& snr);

/// Matched-filter self-interference coefficient a(gamma) and the resulting
/// per-subsymbol SINR Ps/(a*Ps + sigma2); AWGN channel, identical for every
/// subsymbol. The closed form counts the two neighbouring subcarriers as
/// distinct, so it applies for K >= 3; smaller K is covered by rate_oracle.
struct MfSinr {
    double a_gamma;
    double sinr;
};
MfSinr mf_sinr(const FilterSpec& filter, const SnrPoint& snr);

/// Ideal SIC on top of the MF receiver removes all self-interference, so the
/// rate equals the upper bound regardless of the filter.
double mf_sic_rate(const GfdmConfig& cfg, const SnrPoint& snr);

/// ZF sum rate in the AWGN channel: all N subchannels share the SINR
/// snr / ((1/N) sum_{l,q} 1/|d_l(q)|^2).
RateReport zf_rate_awgn(const GfdmConfig& cfg, const FilterSpec& filter, const SnrPoint& snr);

/// ZF sum rate over a circulant FIR channel; per-subcarrier SINR.
RateReport zf_rate_general(const GfdmConfig& cfg, const FilterSpec& filter,
                           const ChannelSpec& channel, const SnrPoint& snr);

/// MMSE sum rate in the AWGN channel (regularized, no invertibility needed).
RateReport mmse_rate_awgn(const GfdmConfig& cfg, const FilterSpec& filter, const SnrPoint& snr);

/// Low-complexity ZF equalizer: N-point DFT, per-bin channel inversion, block
/// DFT, per-bin filter inversion, block IDFT, K separate M-point IDFTs.
/// Never materializes an N x N inverse.
CVec zf_equalize_fast(const GfdmConfig& cfg, const FilterSpec& filter, const ChannelSpec& channel,
                      const CVec& y);

/// Brute-force dense reference for every closed form above: builds Phi and H
/// explicitly and reads SINRs off matrix inverses. Desk scale only.
RateReport rate_oracle(const GfdmConfig& cfg, const FilterSpec& filter, const ChannelSpec& channel,
                       const SnrPoint& snr, Receiver receiver);

}  // namespace gfdm

#endif
