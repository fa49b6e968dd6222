#ifndef GFDM_SPECTRUM_HPP
#define GFDM_SPECTRUM_HPP

#include <functional>
#include <string>

#include "gfdm/types.hpp"

namespace gfdm {

/// Sampled power spectral density, linear scale.
struct PsdGrid {
    RVec f;  // Hz, strictly increasing
    RVec p;  // linear power density, >= 0
    bool windowed = false;
    std::string meta;
};

/// Symmetric prefix/suffix taper: Nw values in [0,1] ramping up at the head
/// of the CP and mirrored at the end of the suffix. The core of the window is
/// pinned at 1, so a trivial taper leaves the transmit samples untouched.
struct WindowSpec {
    RVec taper;

    WindowSpec() = default;
    explicit WindowSpec(RVec t) : taper(std::move(t)) {
        for (Eigen::Index i = 0; i < taper.size(); ++i)
            if (taper[i] < 0.0 || taper[i] > 1.0)
                throw config_error("WindowSpec: taper values must lie in [0, 1]");
    }

    static WindowSpec rectangular(int Nw) { return WindowSpec(RVec::Ones(Nw)); }

    int Nw() const { return static_cast<int>(taper.size()); }

    /// Sample values over the Ncp + N + Nw grid (plateau at 1).
    RVec full_window(const GfdmConfig& cfg) const;

    /// Same shape scaled to unit l2 norm.
    RVec full_window_normalized(const GfdmConfig& cfg) const;
};

/// Fourier transform G_m(f) of the m-th subsymbol pulse g_m(t); removable
/// singularities at f = q/Tb and f = q/Tb - 1/Ts are evaluated by series.
cplx gm_fourier(const GfdmConfig& cfg, const FilterSpec& filter, int m, double f);

/// Baseband PSD P_BB(f) = (Ps/Tb) sum_m |G_m(f)|^2 at one frequency.
double psd_baseband_at(const GfdmConfig& cfg, const FilterSpec& filter, double Ps, double f);

/// Overall PSD P(f) = sum_k P_BB(f - k/Ts) at one frequency.
double psd_total_at(const GfdmConfig& cfg, const FilterSpec& filter, double Ps, double f);

/// PSD of the CP-plus-suffix windowed, edge-overlapped symbol stream
/// (cyclostationary with period Tcp + Tb). The window is the piecewise-
/// constant sample taper of `window`.
double psd_windowed_at(const GfdmConfig& cfg, const FilterSpec& filter, const WindowSpec& window,
                       double Ps, double f);

PsdGrid psd_baseband(const GfdmConfig& cfg, const FilterSpec& filter, double Ps,
                     const RVec& f_grid);
PsdGrid psd_total(const GfdmConfig& cfg, const FilterSpec& filter, double Ps, const RVec& f_grid);
PsdGrid psd_windowed(const GfdmConfig& cfg, const FilterSpec& filter, const WindowSpec& window,
                     double Ps, const RVec& f_grid);

/// Stopband grid for the out-of-band objective: from `guard` to
/// guard + 2K/Ts in steps of (1/Tb)/points_per_lobe.
RVec stopband_grid(const GfdmConfig& cfg, double guard, int points_per_lobe = 8);

/// max over the stopband grid of P(-1/Ts - f) + P(K/Ts + f), with P supplied
/// as a point evaluator.
double oob_objective(const GfdmConfig& cfg, const std::function<double(double)>& psd_at,
                     double guard, int points_per_lobe = 8);

/// Convenience overloads for the plain and windowed transmit PSDs.
double oob_objective(const GfdmConfig& cfg, const FilterSpec& filter, double Ps, double guard);
double oob_objective(const GfdmConfig& cfg, const FilterSpec& filter, const WindowSpec& window,
                     double Ps, double guard);

namespace detail {

/// (exp(-i*2*pi*Tb*f) - 1) / (i*2*pi*(nu - f)) for nu with Tb*nu integral.
cplx edge_kernel(double f, double nu, double Tb);

/// integral of exp(-i*2*pi*x*t) over [a, a+len].
cplx seg_integral(double x, double a, double len);

/// Fourier transform of the piecewise-constant CP/suffix window at offset
/// frequency x (full-support term plus taper corrections).
cplx windowed_bin_ft(const GfdmConfig& cfg, const RVec& taper, double x);

}  // namespace detail

}  // namespace gfdm

#endif
