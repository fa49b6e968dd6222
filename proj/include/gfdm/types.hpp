#ifndef GFDM_TYPES_HPP
#define GFDM_TYPES_HPP

#include "gfdm/common.hpp"

namespace gfdm {

/// System dimensions for one GFDM symbol: K subcarriers carrying M subsymbols
/// each (N = K*M samples), optional cyclic prefix of Ncp samples and window
/// taper of Nw samples, subsymbol duration Ts seconds. The frequency response
/// of the shaping filter occupies L = 2 blocks of M bins, so every subcarrier
/// mixes only with its two neighbours.
struct GfdmConfig {
    int K = 1;
    int M = 1;
    int Ncp = 0;
    int Nw = 0;
    double Ts = 1.0;

    static constexpr int L = 2;

    GfdmConfig() = default;
    GfdmConfig(int K_, int M_, int Ncp_ = 0, int Nw_ = 0, double Ts_ = 1.0)
        : K(K_), M(M_), Ncp(Ncp_), Nw(Nw_), Ts(Ts_) {
        validate();
    }

    int N() const { return K * M; }
    double Tb() const { return M * Ts; }           // symbol duration
    double sample_dt() const { return Ts / K; }    // one chip
    double Tcp() const { return Ncp * sample_dt(); }
    double Tw() const { return Nw * sample_dt(); }

    void validate() const {
        if (K < 1 || M < 1) throw invalid_dimension_error("GfdmConfig: K and M must be positive");
        if (Ts <= 0.0) throw config_error("GfdmConfig: Ts must be positive");
        if (Ncp < 0 || Ncp > N()) throw config_error("GfdmConfig: need 0 <= Ncp <= N");
        // Nw < Ncp except for the degenerate no-CP, no-suffix case.
        if (Nw < 0 || (Nw > 0 && Nw >= Ncp))
            throw config_error("GfdmConfig: need Nw < Ncp (or Nw = Ncp = 0)");
    }
};

/// Frequency-domain shaping filter: 2M coefficients, the first M on the
/// subcarrier's own bin block, the last M on the left-neighbour block.
/// Feasible filters satisfy sum |gamma|^2 = M.
struct FilterSpec {
    int M = 1;
    CVec gamma;

    FilterSpec() : gamma(CVec::Zero(2)) {}
    FilterSpec(int M_, CVec g) : M(M_), gamma(std::move(g)) {
        if (M < 1) throw invalid_dimension_error("FilterSpec: M must be positive");
        if (gamma.size() != 2 * M)
            throw invalid_dimension_error("FilterSpec: gamma must have length 2M");
    }

    double power() const { return gamma.squaredNorm(); }
    bool power_normalized(double rel_tol = 1e-12) const {
        return std::abs(power() - M) <= rel_tol * M;
    }
    cplx front_coeff(int q) const { return gamma[q]; }      // Gamma^(f) diagonal
    cplx rear_coeff(int q) const { return gamma[M + q]; }   // Gamma^(r) diagonal
};

/// One symbol's worth of data: N subsymbols, block k occupying s[kM..kM+M-1].
struct DataSymbols {
    CVec s;
    double Ps = 1.0;

    DataSymbols() = default;
    DataSymbols(CVec s_, double Ps_) : s(std::move(s_)), Ps(Ps_) {
        if (Ps <= 0.0) throw config_error("DataSymbols: Ps must be positive");
    }
    CVec block(const GfdmConfig& cfg, int k) const { return s.segment(k * cfg.M, cfg.M); }
};

/// Operating point: subsymbol power and noise variance.
struct SnrPoint {
    double Ps = 1.0;
    double sigma2 = 1.0;

    SnrPoint() = default;
    SnrPoint(double Ps_, double sigma2_) : Ps(Ps_), sigma2(sigma2_) {
        if (Ps <= 0.0 || sigma2 <= 0.0)
            throw config_error("SnrPoint: Ps and sigma2 must be strictly positive");
    }
    double snr() const { return Ps / sigma2; }

    static SnrPoint from_db(double snr_db, double Ps_ = 1.0) {
        return SnrPoint(Ps_, Ps_ / std::pow(10.0, snr_db / 10.0));
    }
};

}  // namespace gfdm

#endif
