#include "gfdm/channel.hpp"

#include <array>

#include "gfdm/fft.hpp"

namespace gfdm {

ChannelSpec ChannelSpec::awgn(const GfdmConfig& cfg) {
    ChannelSpec c;
    c.h = CVec::Ones(1);
    c.lambda = CVec::Ones(cfg.N());
    return c;
}

ChannelSpec ChannelSpec::from_taps(const GfdmConfig& cfg, const CVec& taps) {
    if (taps.size() < 1) throw invalid_dimension_error("ChannelSpec: need at least one tap");
    // A single tap never needs a CP; longer responses must fit inside it.
    if (taps.size() > std::max<Eigen::Index>(1, cfg.Ncp))
        throw config_error("ChannelSpec: FIR longer than the cyclic prefix");
    ChannelSpec c;
    c.h = taps;
    CVec first = CVec::Zero(cfg.N());
    first.head(taps.size()) = taps;
    fft_raw(first);  // circulant eigenvalues = unnormalized DFT of first column
    c.lambda = first;
    return c;
}

CMat ChannelSpec::circulant(const GfdmConfig& cfg) const {
    const int N = cfg.N();
    CMat H = CMat::Zero(N, N);
    for (int j = 0; j < N; ++j)
        for (int t = 0; t < h.size(); ++t) H((j + t) % N, j) = h[t];
    return H;
}

bool ChannelSpec::is_awgn() const { return h.size() == 1 && h[0] == cplx(1.0, 0.0); }

void ChannelSpec::require_invertible() const {
    const double thresh = 1e-12 * lambda.cwiseAbs().maxCoeff();
    if ((lambda.cwiseAbs().array() <= thresh).any())
        throw singular_channel_error("channel has a (near-)zero eigenvalue");
}

namespace {
constexpr std::array<double, 6> kPbDelayNs = {0.0, 200.0, 800.0, 1200.0, 2300.0, 3700.0};
constexpr std::array<double, 6> kPbPowerDb = {0.0, -0.9, -4.9, -8.0, -7.8, -23.9};
}  // namespace

int pedestrian_b_length(double chip_rate_hz) {
    return static_cast<int>(std::lround(kPbDelayNs.back() * 1e-9 * chip_rate_hz)) + 1;
}

CVec pedestrian_b_taps(Rng& rng, double chip_rate_hz) {
    const int len = pedestrian_b_length(chip_rate_hz);
    RVec power = RVec::Zero(len);
    for (std::size_t p = 0; p < kPbDelayNs.size(); ++p) {
        const int idx = static_cast<int>(std::lround(kPbDelayNs[p] * 1e-9 * chip_rate_hz));
        power[idx] += std::pow(10.0, kPbPowerDb[p] / 10.0);  // merge colliding paths
    }
    power /= power.sum();  // E||h||^2 = 1
    CVec h(len);
    for (int i = 0; i < len; ++i) h[i] = std::sqrt(power[i]) * rng.cnormal();
    return h;
}

}  // namespace gfdm
