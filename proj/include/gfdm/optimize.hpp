#ifndef GFDM_OPTIMIZE_HPP
#define GFDM_OPTIMIZE_HPP

#include <optional>

#include "gfdm/cfo.hpp"
#include "gfdm/rates.hpp"
#include "gfdm/spectrum.hpp"

namespace gfdm {

/// Shared solver knobs. Every solver is deterministic in (options, seed).
struct OptOptions {
    int max_iters = 300;          // inner projected-gradient iterations
    double tol = 1e-7;            // relative objective-change stop criterion
    double step0 = 1.0;           // initial step for backtracking line search
    int restarts = 8;             // random restarts
    std::uint64_t seed = 0x9e3779b97f4a7c15ull;
    int penalty_rounds = 4;       // rate-constrained design: x10 escalations
    double penalty0 = 100.0;      // initial penalty weight (relative units)
    std::vector<double> p_stages = {8.0, 16.0, 32.0, 64.0};  // smoothed-max ramp
    int max_outer = 12;           // alternating design: outer iterations
    int min_outer = 1;
    int threads = 0;              // 0 = auto; evaluation order is fixed either way

    void validate() const;
};

struct OptResult {
    FilterSpec filter;
    std::optional<WindowSpec> window;
    double objective = 0.0;       // final value in the solver's native units
    RVec objective_trace;         // accepted-step values (monotone)
    RVec constraint_residuals;    // per penalty round, when applicable
    bool converged = false;
    int best_restart = 0;
};

/// Scale gamma onto the power sphere sum |gamma|^2 = M.
FilterSpec project_power(const CVec& gamma);

/// Maximize the AWGN rate under a ZF or MMSE receiver by projected gradient
/// on the closed-form noise-enhancement cost. objective = achieved rate.
OptResult solve_rate_max_awgn(const GfdmConfig& cfg, const SnrPoint& snr, Receiver receiver,
                              const OptOptions& opts);

/// Minimize the stopband emission maximum with only the power constraint
/// (MF/SIC receiver keeps the rate at the upper bound regardless).
/// objective = stopband max (linear PSD units); trace is the smoothed-max
/// objective across the p-ramp.
///
/// The PSD, the power constraint, and all AWGN rates are invariant under a
/// common phase rotation of each pair (gamma_q, gamma_{M+q}); the returned
/// filter is the canonical representative with real nonnegative front
/// coefficients.
OptResult solve_oob_mfsic(const GfdmConfig& cfg, double Ps, const OptOptions& opts);

/// Same stopband objective with the ZF rate constraint
/// R_ZF >= (1-eta) * N log2(1+snr), handled by escalating quadratic penalty
/// plus a final feasibility repair toward the Dirichlet filter.
OptResult solve_oob_zf(const GfdmConfig& cfg, const SnrPoint& snr, double eta,
                       const OptOptions& opts);

/// Uplink channel ensemble for the CFO design.
struct UplinkProfile {
    enum class Kind { awgn, pedestrian_b, fixed };
    Kind kind = Kind::awgn;
    double chip_rate_hz = 3.84e6;  // pedestrian_b resampling rate
    std::vector<CVec> taps;        // fixed: one FIR per user

    static UplinkProfile awgn() { return {}; }
    static UplinkProfile pedestrian_b(double chip_rate = 3.84e6) {
        UplinkProfile p;
        p.kind = Kind::pedestrian_b;
        p.chip_rate_hz = chip_rate;
        return p;
    }
};

/// Frozen Monte Carlo draw set (CFOs and channel realizations) for the CFO
/// design; deterministic in the seed. Degenerate draws (a user with a
/// near-null channel at its own bins) are resampled once.
std::vector<UplinkDraw> make_uplink_draws(const GfdmConfig& cfg, double cfo_half_width,
                                          const UplinkProfile& profile, int n_mc,
                                          std::uint64_t seed);

/// Maximize the mean nominal-ZF rate over the frozen CFO draws (projected
/// gradient ascent, analytic gradient, Dirichlet start plus random restarts).
/// objective = mean rate on the frozen draws; trace is non-decreasing.
OptResult solve_rate_max_cfo(const GfdmConfig& cfg, const SnrPoint& snr, double cfo_half_width,
                             const UplinkProfile& profile, int n_mc, const OptOptions& opts,
                             NominalNoiseModel noise_model = NominalNoiseModel::row_norm,
                             CfoConvention conv = CfoConvention::normalized);

enum class JointStopbandMode {
    unified,        // both steps minimize the same [L/Ts, ...) objective
    split_bands,    // filter step at 1/Ts, window step at L/Ts
};

/// Alternating filter/window design for stopband emission. In unified mode
/// the shared objective is evaluated after every half step and a worsening
/// half step is rejected, so the trace is monotonically non-increasing.
/// objective = stopband max at guard L_stop/Ts with the final pair.
OptResult joint_design_oob(const GfdmConfig& cfg, double Ps, double L_stop,
                           const OptOptions& opts,
                           JointStopbandMode mode = JointStopbandMode::unified,
                           bool optimize_window = true);

/// Precomputed quadratic form of the stopband PSD samples in gamma (window
/// fixed): P_i(gamma) = sum_q [ |g_q|^2 a + |g_{M+q}|^2 b + 2 Re(g_q g_{M+q}^*
/// c) ]. Exact for the analytic PSD; used by the stopband solvers and
/// cross-checked against the reference evaluators in the tests.
class StopbandFilterObjective {
public:
    StopbandFilterObjective(const GfdmConfig& cfg, double Ps, double guard,
                            const WindowSpec* window, int points_per_lobe = 8);

    int grid_size() const { return static_cast<int>(h11_.rows()); }
    void eval_terms(const CVec& gamma, RVec& out) const;
    double eval_max(const CVec& gamma) const;
    /// Smoothed max: p-norm of the stopband samples.
    double eval_smooth(const CVec& gamma, double p) const;

private:
    int M_;
    RMat h11_, h22_;  // grid x M
    CMat h12_;
    double scale_;
};

/// Same idea with the filter fixed and the Nw taper values variable:
/// P_i(w) = u^T G_i u with u = [1; w - 1].
class StopbandWindowObjective {
public:
    StopbandWindowObjective(const GfdmConfig& cfg, double Ps, double guard,
                            const FilterSpec& filter, int points_per_lobe = 8);

    int grid_size() const { return static_cast<int>(forms_.size()); }
    void eval_terms(const RVec& taper, RVec& out) const;
    double eval_max(const RVec& taper) const;
    double eval_smooth(const RVec& taper, double p) const;

private:
    int Nw_;
    std::vector<RMat> forms_;  // (Nw+1) x (Nw+1), symmetric
};

}  // namespace gfdm

#endif
