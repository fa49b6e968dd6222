#include "gfdm/spectrum.hpp"

namespace gfdm {

RVec WindowSpec::full_window(const GfdmConfig& cfg) const {
    if (Nw() != cfg.Nw) throw config_error("WindowSpec: taper length must equal cfg.Nw");
    const int total = cfg.Ncp + cfg.N() + cfg.Nw;
    RVec w = RVec::Ones(total);
    for (int j = 0; j < cfg.Nw; ++j) {
        w[j] = taper[j];
        w[total - 1 - j] = taper[j];
    }
    return w;
}

RVec WindowSpec::full_window_normalized(const GfdmConfig& cfg) const {
    RVec w = full_window(cfg);
    return w / w.norm();
}

namespace detail {

namespace {
// (exp(y) - 1) / y, series near zero.
cplx expm1_over(cplx y) {
    if (std::abs(y) < 1e-6) return 1.0 + y * (0.5 + y * (1.0 / 6.0 + y / 24.0));
    return (std::exp(y) - 1.0) / y;
}
}  // namespace

cplx seg_integral(double x, double a, double len) {
    const cplx y = cplx(0.0, -2.0 * pi * x * len);
    return len * cis(-2.0 * pi * x * a) * expm1_over(y);
}

// 3-term series inside the singular window.
cplx edge_kernel(double f, double nu, double Tb) {
    const double diff = nu - f;
    if (std::abs(diff) < 1e-8 / Tb) {
        const cplx y = cplx(0.0, 2.0 * pi * Tb * diff);
        return Tb * (1.0 + y * (0.5 + y / 6.0));
    }
    return (cis(-2.0 * pi * Tb * f) - 1.0) / cplx(0.0, 2.0 * pi * diff);
}

cplx windowed_bin_ft(const GfdmConfig& cfg, const RVec& taper, double x) {
    const double dt = cfg.sample_dt();
    const double Tcp = cfg.Tcp();
    const double total_len = Tcp + cfg.Tb() + cfg.Tw();
    const int total_samples = cfg.Ncp + cfg.N() + cfg.Nw;
    cplx acc = seg_integral(x, -Tcp, total_len);
    for (int j = 0; j < cfg.Nw; ++j) {
        const double w = taper[j] - 1.0;
        if (w == 0.0) continue;
        acc += w * seg_integral(x, -Tcp + j * dt, dt);
        acc += w * seg_integral(x, -Tcp + (total_samples - 1 - j) * dt, dt);
    }
    return acc;
}

}  // namespace detail

using detail::edge_kernel;
using detail::seg_integral;

cplx gm_fourier(const GfdmConfig& cfg, const FilterSpec& filter, int m, double f) {
    if (filter.M != cfg.M) throw invalid_dimension_error("gm_fourier: filter/config mismatch");
    if (m < 0 || m >= cfg.M) throw invalid_dimension_error("gm_fourier: subsymbol index");
    const int M = cfg.M;
    const double Tb = cfg.Tb();
    const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.N()) * M);
    cplx acc = 0.0;
    for (int q = 0; q < M; ++q) {
        const cplx front = edge_kernel(f, q / Tb, Tb);
        const cplx rear = edge_kernel(f, q / Tb - 1.0 / cfg.Ts, Tb);
        acc += cis(-2.0 * pi * m * q / M) * (filter.gamma[q] * front + filter.gamma[M + q] * rear);
    }
    return scale * acc;
}

double psd_baseband_at(const GfdmConfig& cfg, const FilterSpec& filter, double Ps, double f) {
    // Summing |G_m|^2 over m collapses the subsymbol DFT phases (Parseval),
    // leaving M identical per-bin terms.
    const int M = cfg.M;
    const double Tb = cfg.Tb();
    double acc = 0.0;
    for (int q = 0; q < M; ++q) {
        const cplx front = edge_kernel(f, q / Tb, Tb);
        const cplx rear = edge_kernel(f, q / Tb - 1.0 / cfg.Ts, Tb);
        acc += std::norm(filter.gamma[q] * front + filter.gamma[M + q] * rear);
    }
    return Ps / (Tb * cfg.N()) * acc;
}

double psd_total_at(const GfdmConfig& cfg, const FilterSpec& filter, double Ps, double f) {
    double acc = 0.0;
    for (int k = 0; k < cfg.K; ++k) acc += psd_baseband_at(cfg, filter, Ps, f - k / cfg.Ts);
    return acc;
}

double psd_windowed_at(const GfdmConfig& cfg, const FilterSpec& filter, const WindowSpec& window,
                       double Ps, double f) {
    if (filter.M != cfg.M) throw invalid_dimension_error("psd_windowed_at: filter mismatch");
    const int M = cfg.M;
    if (window.Nw() != cfg.Nw) throw config_error("psd_windowed_at: taper length must equal Nw");
    const double Tb = cfg.Tb();
    const double period = cfg.Tcp() + Tb;  // suffix overlaps the next prefix

    double acc = 0.0;
    for (int k = 0; k < cfg.K; ++k) {
        const double fk = f - k / cfg.Ts;
        for (int q = 0; q < M; ++q) {
            const cplx front = detail::windowed_bin_ft(cfg, window.taper, fk - q / Tb);
            const cplx rear =
                detail::windowed_bin_ft(cfg, window.taper, fk - q / Tb + 1.0 / cfg.Ts);
            acc += std::norm(filter.gamma[q] * front + filter.gamma[M + q] * rear);
        }
    }
    return Ps / (period * cfg.N()) * acc;
}

namespace {

PsdGrid eval_grid(const RVec& f_grid, bool windowed, const std::function<double(double)>& at) {
    for (Eigen::Index i = 1; i < f_grid.size(); ++i)
        if (f_grid[i] <= f_grid[i - 1]) throw config_error("psd grid must be strictly increasing");
    PsdGrid g;
    g.f = f_grid;
    g.p.resize(f_grid.size());
    g.windowed = windowed;
    for (Eigen::Index i = 0; i < f_grid.size(); ++i) g.p[i] = at(f_grid[i]);
    return g;
}

}  // namespace

PsdGrid psd_baseband(const GfdmConfig& cfg, const FilterSpec& filter, double Ps,
                     const RVec& f_grid) {
    return eval_grid(f_grid, false,
                     [&](double f) { return psd_baseband_at(cfg, filter, Ps, f); });
}

PsdGrid psd_total(const GfdmConfig& cfg, const FilterSpec& filter, double Ps, const RVec& f_grid) {
    return eval_grid(f_grid, false, [&](double f) { return psd_total_at(cfg, filter, Ps, f); });
}

PsdGrid psd_windowed(const GfdmConfig& cfg, const FilterSpec& filter, const WindowSpec& window,
                     double Ps, const RVec& f_grid) {
    return eval_grid(f_grid, true,
                     [&](double f) { return psd_windowed_at(cfg, filter, window, Ps, f); });
}

RVec stopband_grid(const GfdmConfig& cfg, double guard, int points_per_lobe) {
    if (guard < 1.0 / cfg.Ts - 1e-12)
        throw config_error("stopband_grid: guard must be at least 1/Ts");
    if (points_per_lobe < 1) throw config_error("stopband_grid: points_per_lobe must be >= 1");
    const double step = 1.0 / (cfg.Tb() * points_per_lobe);
    const double span = 2.0 * cfg.K / cfg.Ts;
    const int n = static_cast<int>(std::floor(span / step)) + 1;
    if (n < 1) throw config_error("stopband_grid: empty grid");
    RVec f(n);
    for (int i = 0; i < n; ++i) f[i] = guard + i * step;
    return f;
}

double oob_objective(const GfdmConfig& cfg, const std::function<double(double)>& psd_at,
                     double guard, int points_per_lobe) {
    const RVec grid = stopband_grid(cfg, guard, points_per_lobe);
    const double lower_edge = -1.0 / cfg.Ts;
    const double upper_edge = cfg.K / cfg.Ts;
    double best = 0.0;
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const double v = psd_at(lower_edge - grid[i]) + psd_at(upper_edge + grid[i]);
        if (v > best) best = v;
    }
    return best;
}

double oob_objective(const GfdmConfig& cfg, const FilterSpec& filter, double Ps, double guard) {
    return oob_objective(
        cfg, [&](double f) { return psd_total_at(cfg, filter, Ps, f); }, guard);
}

double oob_objective(const GfdmConfig& cfg, const FilterSpec& filter, const WindowSpec& window,
                     double Ps, double guard) {
    return oob_objective(
        cfg, [&](double f) { return psd_windowed_at(cfg, filter, window, Ps, f); }, guard);
}

}  // namespace gfdm
