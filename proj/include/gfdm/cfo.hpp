#ifndef GFDM_CFO_HPP
#define GFDM_CFO_HPP

#include <vector>

#include "gfdm/channel.hpp"
#include "gfdm/rates.hpp"

namespace gfdm {

/// Per-sample phase ramp convention for a CFO of eps subcarrier spacings.
/// `normalized` advances by 2*pi*eps/N per core sample; `literal` advances by
/// 2*pi*eps per sample (the much harsher reading).
enum class CfoConvention { normalized, literal };

/// Noise accounting for the nominal (CFO-blind) ZF receiver. `row_norm` uses
/// the exact output noise variance sigma^2 * ||row of inv(Psi_hat)||^2;
/// `literal` uses only the diagonal entry |[inv(Psi_hat)]_nn|^2 * sigma^2.
enum class NominalNoiseModel { row_norm, literal };

/// Normalized per-user carrier offsets, |eps_k| < 0.5.
struct CfoProfile {
    RVec eps;

    CfoProfile() = default;
    explicit CfoProfile(RVec e) : eps(std::move(e)) {
        for (Eigen::Index i = 0; i < eps.size(); ++i)
            if (std::abs(eps[i]) >= 0.5) throw config_error("CfoProfile: need |eps| < 0.5");
    }
    static CfoProfile zero(int K) { return CfoProfile(RVec::Zero(K)); }
};

/// K independent uniform draws on [-half_width, half_width], deterministic in
/// the seed.
CfoProfile sample_cfo(int K, double half_width, std::uint64_t seed);

/// Per-user FIR channels for the uplink (one subcarrier per user), with the
/// cached frequency responses.
struct UplinkChannelSet {
    std::vector<CVec> taps;    // per user
    std::vector<CVec> lambda;  // per user, length N

    static UplinkChannelSet awgn(const GfdmConfig& cfg, int users);
    static UplinkChannelSet from_taps(const GfdmConfig& cfg, std::vector<CVec> user_taps);
};

/// Circulant symbol of the CFO mixing matrix D = W_N Pi(eps) W_N^H: D(i,j) =
/// c[(i-j) mod N].
CVec cfo_circulant_symbol(int N, double eps, CfoConvention conv);

/// Dense CFO mixing matrix D_k (unitary; identity exactly when eps = 0).
CMat cfo_mixing_matrix(int N, int Ncp, double eps, CfoConvention conv);

/// Frequency-domain effective matrices of the uplink model: psi column block
/// k is D_k Lambda_k P_k F, psi_hat the same with D_k = I.
struct EffectiveMatrix {
    int K = 1;
    int M = 1;
    CMat psi;
    CMat psi_hat;

    /// Time-domain referenced version W_N^H * psi (coincides with the
    /// modulation matrix when eps = 0 and all channels are flat).
    CMat psi_time() const;
};

EffectiveMatrix build_uplink_matrices(const GfdmConfig& cfg, const FilterSpec& filter,
                                      const UplinkChannelSet& channels, const CfoProfile& cfo,
                                      CfoConvention conv = CfoConvention::normalized);

/// ZF with known CFO: all interference removed, SINR_n = snr /
/// [(Psi^H Psi)^{-1}]_{nn}.
RateReport zf_rate_cfo_known(const EffectiveMatrix& eff, const SnrPoint& snr);

/// CFO-blind nominal ZF: T = inv(Psi_hat) * Psi, per-subsymbol SINR from
/// |T_nn|^2 signal, off-diagonal row power interference, and the chosen noise
/// model.
RateReport zf_rate_cfo_nominal(const EffectiveMatrix& eff, const SnrPoint& snr,
                               NominalNoiseModel model = NominalNoiseModel::row_norm);

/// One Monte Carlo draw for the uplink evaluator.
struct UplinkDraw {
    CfoProfile cfo;
    UplinkChannelSet channels;
};

/// Structured evaluator for the mean nominal-ZF rate over a frozen set of
/// draws. Exploits the block diagonalization of the circulant CFO mixing and
/// the per-bin decoupling of the nominal matrix, so one evaluation costs
/// O(K^2 M^3) per draw instead of a dense N^3 inverse; also provides the
/// analytic gradient with respect to (Re gamma, Im gamma).
class CfoMeanRateEvaluator {
public:
    CfoMeanRateEvaluator(const GfdmConfig& cfg, SnrPoint snr, NominalNoiseModel model,
                         std::vector<UplinkDraw> draws,
                         CfoConvention conv = CfoConvention::normalized);

    int num_draws() const { return static_cast<int>(symbols_.size()); }

    /// Mean rate over the frozen draws (bits per GFDM symbol).
    double mean_rate(const FilterSpec& filter) const;

    /// Mean rate plus d(mean rate)/d[Re gamma; Im gamma] (length 4M).
    double mean_rate_grad(const FilterSpec& filter, RVec& grad) const;

    /// Rate of a single draw (test hook).
    double draw_rate(const FilterSpec& filter, int draw) const;

private:
    double draw_rate_impl(const FilterSpec& filter, int draw, CVec* gamma_bar) const;

    GfdmConfig cfg_;
    SnrPoint snr_;
    NominalNoiseModel model_;
    std::vector<std::vector<CVec>> symbols_;  // per draw, per user: c_k table
    std::vector<std::vector<CVec>> lambdas_;  // per draw, per user
};

}  // namespace gfdm

#endif
