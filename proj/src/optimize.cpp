#include "gfdm/optimize.hpp"

#include <limits>

#include "gfdm/filters.hpp"

namespace gfdm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CVec theta_to_gamma(const RVec& theta) {
    const int twoM = static_cast<int>(theta.size()) / 2;
    CVec g(twoM);
    for (int j = 0; j < twoM; ++j) g[j] = cplx(theta[j], theta[twoM + j]);
    return g;
}

RVec gamma_to_theta(const CVec& gamma) {
    const int twoM = static_cast<int>(gamma.size());
    RVec t(2 * twoM);
    t.head(twoM) = gamma.real();
    t.tail(twoM) = gamma.imag();
    return t;
}

struct PgdProblem {
    std::function<double(const RVec&)> f;
    std::function<RVec(const RVec&)> grad;  // empty -> central differences
    std::function<RVec(const RVec&)> project;
};

struct PgdOutcome {
    RVec x;
    double fx = kInf;
    std::vector<double> trace;
    bool converged = false;
};

RVec central_diff_grad(const std::function<double(const RVec&)>& f, const RVec& x,
                       double h = 1e-6) {
    RVec g(x.size());
    RVec xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        xp[i] = xi + h;
        const double fp = f(xp);
        xp[i] = xi - h;
        const double fm = f(xp);
        xp[i] = xi;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

PgdOutcome pgd_minimize(const PgdProblem& prob, RVec x0, int max_iters, double tol,
                        double step0) {
    PgdOutcome out;
    RVec x = prob.project(x0);
    double fx = prob.f(x);
    if (!std::isfinite(fx)) {
        out.x = std::move(x);
        out.fx = fx;
        return out;
    }
    out.trace.push_back(fx);
    double step = step0;
    int stall = 0;
    for (int it = 0; it < max_iters; ++it) {
        const RVec g = prob.grad ? prob.grad(x) : central_diff_grad(prob.f, x);
        const double gnorm2 = g.squaredNorm();
        if (!(gnorm2 > 0.0) || !std::isfinite(gnorm2)) break;
        double t = step;
        bool accepted = false;
        RVec xn;
        double fn = fx;
        while (t > 1e-16) {
            xn = prob.project(x - t * g);
            // sufficient decrease against the projected displacement; the raw
            // gradient may be mostly normal to the constraint set
            const double move2 = (xn - x).squaredNorm();
            fn = prob.f(xn);
            if (std::isfinite(fn) && move2 > 0.0 && fn <= fx - 1e-4 * move2 / t) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            out.converged = true;
            break;
        }
        const double drop = fx - fn;
        x = std::move(xn);
        fx = fn;
        out.trace.push_back(fx);
        step = std::min(t * 2.0, step0 * 1e3);
        if (drop <= tol * std::max(1.0, std::abs(fx))) {
            if (++stall >= 3) {
                out.converged = true;
                break;
            }
        } else {
            stall = 0;
        }
    }
    out.x = std::move(x);
    out.fx = fx;
    return out;
}

RVec project_theta_power(const RVec& theta) {
    CVec g = theta_to_gamma(theta);
    const int M = static_cast<int>(g.size()) / 2;
    const double n2 = g.squaredNorm();
    if (n2 <= 0.0) throw std::domain_error("power projection of the zero vector");
    g *= std::sqrt(static_cast<double>(M) / n2);
    return gamma_to_theta(g);
}

RVec random_feasible_theta(int M, Rng& rng) {
    CVec g(2 * M);
    for (int j = 0; j < 2 * M; ++j) g[j] = rng.cnormal();
    g *= std::sqrt(static_cast<double>(M) / g.squaredNorm());
    return gamma_to_theta(g);
}

double smooth_max(const RVec& terms, double p) {
    const double m = terms.maxCoeff();
    if (m <= 0.0) return 0.0;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < terms.size(); ++i) acc += std::pow(terms[i] / m, p);
    return m * std::pow(acc, 1.0 / p);
}

// The stopband objective, the power constraint, and every AWGN rate are
// invariant under a common phase rotation of each coefficient pair
// (gamma_q, gamma_{M+q}). Fix that gauge by making the front coefficient of
// each pair real and nonnegative (largest-magnitude side when the front one
// vanishes), so the returned design is a canonical representative.
CVec canonicalize_pair_phases(CVec gamma) {
    const int M = static_cast<int>(gamma.size()) / 2;
    for (int q = 0; q < M; ++q) {
        const cplx ref =
            (std::abs(gamma[q]) >= 1e-12) ? gamma[q] : gamma[M + q];
        const double mag = std::abs(ref);
        if (mag < 1e-300) continue;
        const cplx ph = std::conj(ref) / mag;
        gamma[q] *= ph;
        gamma[M + q] *= ph;
    }
    return gamma;
}

}  // namespace

void OptOptions::validate() const {
    if (max_iters < 1 || restarts < 1 || penalty_rounds < 1 || max_outer < 1 || min_outer < 1)
        throw config_error("OptOptions: counters must be positive");
    if (!(tol > 0.0 && tol < 1.0)) throw config_error("OptOptions: tol must be in (0,1)");
    if (step0 <= 0.0 || penalty0 <= 0.0) throw config_error("OptOptions: steps must be positive");
    if (p_stages.empty()) throw config_error("OptOptions: need at least one p stage");
}

FilterSpec project_power(const CVec& gamma) {
    if (gamma.size() < 2 || gamma.size() % 2 != 0)
        throw invalid_dimension_error("project_power: gamma must have even length >= 2");
    const int M = static_cast<int>(gamma.size()) / 2;
    const double n2 = gamma.squaredNorm();
    if (n2 <= 0.0) throw std::domain_error("project_power: zero vector");
    return FilterSpec(M, gamma * std::sqrt(static_cast<double>(M) / n2));
}

// ---------------------------------------------------------------------------
// Rate maximization, AWGN (ZF / MMSE)
// ---------------------------------------------------------------------------

OptResult solve_rate_max_awgn(const GfdmConfig& cfg, const SnrPoint& snr, Receiver receiver,
                              const OptOptions& opts) {
    opts.validate();
    if (cfg.K < 2) throw config_error("solve_rate_max_awgn: requires K > 1");
    if (receiver != Receiver::ZF && receiver != Receiver::MMSE)
        throw config_error("solve_rate_max_awgn: receiver must be ZF or MMSE");
    const int K = cfg.K, M = cfg.M;
    const double reg = (receiver == Receiver::MMSE) ? snr.sigma2 / snr.Ps : 0.0;

    auto cost = [&](const RVec& theta) -> double {
        const CVec g = theta_to_gamma(theta);
        double acc = 0.0;
        for (int l = 0; l < K; ++l) {
            const cplx dl = cis(2.0 * pi * l / K);
            for (int q = 0; q < M; ++q) {
                const double mag2 = std::norm(g[q] + dl * g[M + q]) + reg;
                if (mag2 < 1e-30) return kInf;
                acc += 1.0 / mag2;
            }
        }
        return acc;
    };

    PgdProblem prob{cost, nullptr, project_theta_power};
    Rng rng(opts.seed);
    OptResult res;
    double best = kInf;
    std::vector<double> best_trace;
    bool best_conv = false;
    for (int r = 0; r < opts.restarts; ++r) {
        PgdOutcome o = pgd_minimize(prob, random_feasible_theta(M, rng), opts.max_iters, opts.tol,
                                    opts.step0);
        if (o.fx < best) {
            best = o.fx;
            res.filter = project_power(canonicalize_pair_phases(theta_to_gamma(o.x)));
            best_trace = std::move(o.trace);
            best_conv = o.converged;
            res.best_restart = r;
        }
    }
    res.objective_trace = Eigen::Map<RVec>(best_trace.data(), best_trace.size());
    res.converged = best_conv;
    res.objective = (receiver == Receiver::ZF) ? zf_rate_awgn(cfg, res.filter, snr).sum_rate_bits
                                               : mmse_rate_awgn(cfg, res.filter, snr).sum_rate_bits;
    return res;
}

// ---------------------------------------------------------------------------
// Stopband quadratic forms
// ---------------------------------------------------------------------------

StopbandFilterObjective::StopbandFilterObjective(const GfdmConfig& cfg, double Ps, double guard,
                                                 const WindowSpec* window, int points_per_lobe)
    : M_(cfg.M) {
    const RVec grid = stopband_grid(cfg, guard, points_per_lobe);
    const int n = static_cast<int>(grid.size());
    const double Tb = cfg.Tb();
    h11_ = RMat::Zero(n, M_);
    h22_ = RMat::Zero(n, M_);
    h12_ = CMat::Zero(n, M_);
    scale_ = window ? Ps / ((cfg.Tcp() + Tb) * cfg.N()) : Ps / (Tb * cfg.N());
    const double lower = -1.0 / cfg.Ts, upper = cfg.K / cfg.Ts;
    for (int i = 0; i < n; ++i) {
        for (double xe : {lower - grid[i], upper + grid[i]}) {
            for (int k = 0; k < cfg.K; ++k) {
                const double x = xe - k / cfg.Ts;
                for (int q = 0; q < M_; ++q) {
                    cplx u, v;
                    if (window) {
                        u = detail::windowed_bin_ft(cfg, window->taper, x - q / Tb);
                        v = detail::windowed_bin_ft(cfg, window->taper, x - q / Tb + 1.0 / cfg.Ts);
                    } else {
                        u = detail::edge_kernel(x, q / Tb, Tb);
                        v = detail::edge_kernel(x, q / Tb - 1.0 / cfg.Ts, Tb);
                    }
                    h11_(i, q) += std::norm(u);
                    h22_(i, q) += std::norm(v);
                    h12_(i, q) += u * std::conj(v);
                }
            }
        }
    }
}

void StopbandFilterObjective::eval_terms(const CVec& gamma, RVec& out) const {
    const int n = grid_size();
    out.resize(n);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int q = 0; q < M_; ++q) {
            acc += std::norm(gamma[q]) * h11_(i, q) + std::norm(gamma[M_ + q]) * h22_(i, q) +
                   2.0 * (gamma[q] * std::conj(gamma[M_ + q]) * h12_(i, q)).real();
        }
        out[i] = scale_ * acc;
    }
}

double StopbandFilterObjective::eval_max(const CVec& gamma) const {
    RVec t;
    eval_terms(gamma, t);
    return t.maxCoeff();
}

double StopbandFilterObjective::eval_smooth(const CVec& gamma, double p) const {
    RVec t;
    eval_terms(gamma, t);
    return smooth_max(t, p);
}

StopbandWindowObjective::StopbandWindowObjective(const GfdmConfig& cfg, double Ps, double guard,
                                                 const FilterSpec& filter, int points_per_lobe)
    : Nw_(cfg.Nw) {
    const RVec grid = stopband_grid(cfg, guard, points_per_lobe);
    const int n = static_cast<int>(grid.size());
    const int M = cfg.M;
    const double Tb = cfg.Tb();
    const double dt = cfg.sample_dt();
    const double Tcp = cfg.Tcp();
    const double total_len = Tcp + Tb + cfg.Tw();
    const int total_samples = cfg.Ncp + cfg.N() + cfg.Nw;
    const double scale = Ps / ((Tcp + Tb) * cfg.N());
    const double lower = -1.0 / cfg.Ts, upper = cfg.K / cfg.Ts;

    forms_.assign(n, RMat::Zero(Nw_ + 1, Nw_ + 1));
    CVec row(Nw_ + 1);
    for (int i = 0; i < n; ++i) {
        RMat& G = forms_[i];
        for (double xe : {lower - grid[i], upper + grid[i]}) {
            for (int k = 0; k < cfg.K; ++k) {
                for (int q = 0; q < M; ++q) {
                    const double x1 = xe - k / cfg.Ts - q / Tb;
                    const double x2 = x1 + 1.0 / cfg.Ts;
                    row[0] = filter.gamma[q] * detail::seg_integral(x1, -Tcp, total_len) +
                             filter.gamma[M + q] * detail::seg_integral(x2, -Tcp, total_len);
                    for (int j = 0; j < Nw_; ++j) {
                        const double head = -Tcp + j * dt;
                        const double tail = -Tcp + (total_samples - 1 - j) * dt;
                        const cplx e1 = detail::seg_integral(x1, head, dt) +
                                        detail::seg_integral(x1, tail, dt);
                        const cplx e2 = detail::seg_integral(x2, head, dt) +
                                        detail::seg_integral(x2, tail, dt);
                        row[1 + j] = filter.gamma[q] * e1 + filter.gamma[M + q] * e2;
                    }
                    for (int a = 0; a <= Nw_; ++a)
                        for (int b = 0; b <= Nw_; ++b)
                            G(a, b) += scale * (std::conj(row[a]) * row[b]).real();
                }
            }
        }
    }
}

void StopbandWindowObjective::eval_terms(const RVec& taper, RVec& out) const {
    RVec u(Nw_ + 1);
    u[0] = 1.0;
    for (int j = 0; j < Nw_; ++j) u[1 + j] = taper[j] - 1.0;
    out.resize(grid_size());
    for (int i = 0; i < grid_size(); ++i) out[i] = u.dot(forms_[i] * u);
}

double StopbandWindowObjective::eval_max(const RVec& taper) const {
    RVec t;
    eval_terms(taper, t);
    return t.maxCoeff();
}

double StopbandWindowObjective::eval_smooth(const RVec& taper, double p) const {
    RVec t;
    eval_terms(taper, t);
    return smooth_max(t, p);
}

// ---------------------------------------------------------------------------
// OOB minimization, MF/SIC (power constraint only)
// ---------------------------------------------------------------------------

namespace {

struct StagedOutcome {
    RVec theta;
    double true_obj = kInf;
    std::vector<double> trace;
    bool converged = false;
};

StagedOutcome run_p_stages(const StopbandFilterObjective& quad,
                           const std::function<double(const RVec&, double)>& staged_cost,
                           RVec theta, const OptOptions& opts, bool all_stages) {
    StagedOutcome out;
    std::vector<double> stages =
        all_stages ? opts.p_stages : std::vector<double>{opts.p_stages.back()};
    bool conv = false;
    for (double p : stages) {
        PgdProblem prob{[&](const RVec& t) { return staged_cost(t, p); }, nullptr,
                        project_theta_power};
        PgdOutcome o = pgd_minimize(prob, theta, opts.max_iters, opts.tol, opts.step0);
        theta = std::move(o.x);
        conv = o.converged;
        out.trace.insert(out.trace.end(), o.trace.begin(), o.trace.end());
    }
    out.theta = std::move(theta);
    out.true_obj = quad.eval_max(theta_to_gamma(out.theta));
    out.converged = conv;
    return out;
}

}  // namespace

OptResult solve_oob_mfsic(const GfdmConfig& cfg, double Ps, const OptOptions& opts) {
    opts.validate();
    StopbandFilterObjective quad(cfg, Ps, 1.0 / cfg.Ts, nullptr);
    auto cost = [&](const RVec& theta, double p) {
        return quad.eval_smooth(theta_to_gamma(theta), p);
    };

    Rng rng(opts.seed);
    OptResult res;
    double best = kInf;
    for (int r = 0; r < opts.restarts; ++r) {
        StagedOutcome o = run_p_stages(quad, cost, random_feasible_theta(cfg.M, rng), opts, true);
        if (o.true_obj < best) {
            best = o.true_obj;
            res.filter = project_power(canonicalize_pair_phases(theta_to_gamma(o.theta)));
            res.objective_trace = Eigen::Map<RVec>(o.trace.data(), o.trace.size());
            res.converged = o.converged;
            res.best_restart = r;
        }
    }
    res.objective = best;
    return res;
}

// ---------------------------------------------------------------------------
// OOB minimization under the ZF rate constraint
// ---------------------------------------------------------------------------

OptResult solve_oob_zf(const GfdmConfig& cfg, const SnrPoint& snr, double eta,
                       const OptOptions& opts) {
    opts.validate();
    if (eta < 0.0 || eta > 1.0) throw config_error("solve_oob_zf: eta must be in [0, 1]");
    StopbandFilterObjective quad(cfg, snr.Ps, 1.0 / cfg.Ts, nullptr);
    const double rmax = rate_upper_bound(cfg, snr);
    const double target = (1.0 - eta) * rmax;
    const FilterSpec dirichlet = dirichlet_filter(cfg.M);
    const double base_obj = quad.eval_max(dirichlet.gamma);

    auto residual_of = [&](const CVec& g) -> double {
        if (target <= 0.0) return 0.0;
        double rate;
        try {
            rate = zf_rate_awgn(cfg, project_power(g), snr).sum_rate_bits;
        } catch (const singular_filter_error&) {
            return 1.0;
        }
        return std::max(0.0, (target - rate) / target);
    };

    Rng rng(opts.seed);
    OptResult res;
    double best = kInf;
    std::vector<double> residual_log;
    for (int r = 0; r < opts.restarts; ++r) {
        RVec theta = random_feasible_theta(cfg.M, rng);
        double rho = opts.penalty0;
        std::vector<double> trace;
        bool conv = false;
        int rounds = 0;
        double resid = 1.0;
        while (true) {
            auto cost = [&](const RVec& t, double p) {
                const CVec g = theta_to_gamma(t);
                const double v = residual_of(g);
                return quad.eval_smooth(g, p) + rho * base_obj * v * v;
            };
            StagedOutcome o = run_p_stages(quad, cost, theta, opts, rounds == 0);
            theta = std::move(o.theta);
            conv = o.converged;
            trace.insert(trace.end(), o.trace.begin(), o.trace.end());
            resid = residual_of(theta_to_gamma(theta));
            ++rounds;
            if (rounds >= opts.penalty_rounds && (resid <= 1e-6 || rounds >= opts.penalty_rounds + 8))
                break;
            rho *= 10.0;
        }
        // Feasibility repair: blend toward the (strictly feasible) Dirichlet
        // filter until the rate constraint holds with margin.
        CVec g = project_power(theta_to_gamma(theta)).gamma;
        if (resid > 1e-9 && target > 0.0) {
            double lo = 0.0, hi = 1.0;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                const CVec gm =
                    project_power(((1.0 - mid) * g + mid * dirichlet.gamma).eval()).gamma;
                if (residual_of(gm) <= 1e-9)
                    hi = mid;
                else
                    lo = mid;
            }
            g = project_power(((1.0 - hi) * g + hi * dirichlet.gamma).eval()).gamma;
            resid = residual_of(g);
        }
        if (resid > 1e-6)
            throw nonconvergence_error("solve_oob_zf: infeasible at tolerance, best residual " +
                                       std::to_string(resid));
        const double obj = quad.eval_max(g);
        residual_log.push_back(resid);
        if (obj < best) {
            best = obj;
            res.filter = project_power(canonicalize_pair_phases(g));
            res.objective_trace = Eigen::Map<RVec>(trace.data(), trace.size());
            res.converged = conv;
            res.best_restart = r;
        }
    }
    res.objective = best;
    res.constraint_residuals = Eigen::Map<RVec>(residual_log.data(), residual_log.size());
    return res;
}

// ---------------------------------------------------------------------------
// Rate maximization under CFO
// ---------------------------------------------------------------------------

std::vector<UplinkDraw> make_uplink_draws(const GfdmConfig& cfg, double cfo_half_width,
                                          const UplinkProfile& profile, int n_mc,
                                          std::uint64_t seed) {
    if (n_mc < 1) throw config_error("make_uplink_draws: n_mc must be >= 1");
    if (cfo_half_width < 0.0 || cfo_half_width >= 0.5)
        throw config_error("make_uplink_draws: half_width must be in [0, 0.5)");
    Rng rng(seed);
    const int K = cfg.K;

    auto draw_once = [&]() -> UplinkDraw {
        UplinkDraw d;
        RVec eps = RVec::Zero(K);
        if (cfo_half_width > 0.0)
            for (int k = 0; k < K; ++k) eps[k] = cfo_half_width * (2.0 * rng.uniform() - 1.0);
        d.cfo = CfoProfile(std::move(eps));
        switch (profile.kind) {
            case UplinkProfile::Kind::awgn:
                d.channels = UplinkChannelSet::awgn(cfg, K);
                break;
            case UplinkProfile::Kind::pedestrian_b: {
                std::vector<CVec> taps(K);
                for (int k = 0; k < K; ++k) taps[k] = pedestrian_b_taps(rng, profile.chip_rate_hz);
                d.channels = UplinkChannelSet::from_taps(cfg, std::move(taps));
                break;
            }
            case UplinkProfile::Kind::fixed:
                d.channels = UplinkChannelSet::from_taps(cfg, profile.taps);
                break;
        }
        return d;
    };
    auto healthy = [&](const UplinkDraw& d) -> bool {
        const int M = cfg.M;
        for (int k = 0; k < K; ++k) {
            const CVec& lam = d.channels.lambda[k];
            const int kf = k * M, kr = ((k - 1 + K) % K) * M;
            double lo = kInf;
            for (int q = 0; q < M; ++q)
                lo = std::min({lo, std::abs(lam[kf + q]), std::abs(lam[kr + q])});
            if (lo < 1e-9) return false;
        }
        return true;
    };

    std::vector<UplinkDraw> draws;
    draws.reserve(n_mc);
    for (int i = 0; i < n_mc; ++i) {
        UplinkDraw d = draw_once();
        if (!healthy(d)) {
            d = draw_once();  // one resample, then give up
            if (!healthy(d))
                throw singular_effective_matrix_error("make_uplink_draws: degenerate draw");
        }
        draws.push_back(std::move(d));
    }
    return draws;
}

OptResult solve_rate_max_cfo(const GfdmConfig& cfg, const SnrPoint& snr, double cfo_half_width,
                             const UplinkProfile& profile, int n_mc, const OptOptions& opts,
                             NominalNoiseModel noise_model, CfoConvention conv) {
    opts.validate();
    CfoMeanRateEvaluator eval(cfg, snr, noise_model,
                              make_uplink_draws(cfg, cfo_half_width, profile, n_mc, opts.seed),
                              conv);

    auto cost = [&](const RVec& theta) -> double {
        try {
            return -eval.mean_rate(project_power(theta_to_gamma(theta)));
        } catch (const singular_effective_matrix_error&) {
            return kInf;
        }
    };
    auto grad = [&](const RVec& theta) -> RVec {
        RVec g;
        eval.mean_rate_grad(project_power(theta_to_gamma(theta)), g);
        return -g;
    };
    PgdProblem prob{cost, grad, project_theta_power};

    Rng rng(opts.seed ^ 0xabcdef12345678ull);
    OptResult res;
    double best = kInf;
    for (int r = 0; r < opts.restarts; ++r) {
        const RVec x0 =
            (r == 0) ? gamma_to_theta(dirichlet_filter(cfg.M).gamma) : random_feasible_theta(cfg.M, rng);
        PgdOutcome o = pgd_minimize(prob, x0, opts.max_iters, opts.tol, opts.step0);
        if (o.fx < best) {
            best = o.fx;
            res.filter = project_power(theta_to_gamma(o.x));
            res.converged = o.converged;
            res.best_restart = r;
            RVec tr(o.trace.size());
            for (std::size_t i = 0; i < o.trace.size(); ++i) tr[i] = -o.trace[i];
            res.objective_trace = std::move(tr);  // mean rate, non-decreasing
        }
    }
    res.objective = -best;
    return res;
}

// ---------------------------------------------------------------------------
// Alternating filter/window design
// ---------------------------------------------------------------------------

OptResult joint_design_oob(const GfdmConfig& cfg, double Ps, double L_stop,
                           const OptOptions& opts, JointStopbandMode mode, bool optimize_window) {
    opts.validate();
    if (L_stop < 1.0) throw config_error("joint_design_oob: L_stop must be >= 1");
    if (cfg.Nw > 0 && cfg.Nw >= cfg.Ncp) throw config_error("joint_design_oob: need Nw < Ncp");

    const double guard_shared = L_stop / cfg.Ts;
    const double guard_filter =
        (mode == JointStopbandMode::unified) ? guard_shared : 1.0 / cfg.Ts;

    WindowSpec window = WindowSpec::rectangular(cfg.Nw);
    RVec theta;  // current filter iterate, set by the first filter step
    Rng rng(opts.seed);

    auto shared_objective = [&](const CVec& gamma, const WindowSpec& w) {
        StopbandFilterObjective q(cfg, Ps, guard_shared, &w);
        return q.eval_max(gamma);
    };

    std::vector<double> trace;
    double current = kInf;
    bool converged = false;
    CVec gamma;
    for (int outer = 0; outer < opts.max_outer; ++outer) {
        // --- filter step (window fixed)
        StopbandFilterObjective quadF(cfg, Ps, guard_filter, &window);
        auto costF = [&](const RVec& t, double p) {
            return quadF.eval_smooth(theta_to_gamma(t), p);
        };
        StagedOutcome stepF;
        if (outer == 0) {
            double bestF = kInf;
            for (int r = 0; r < opts.restarts; ++r) {
                StagedOutcome o =
                    run_p_stages(quadF, costF, random_feasible_theta(cfg.M, rng), opts, true);
                if (o.true_obj < bestF) {
                    bestF = o.true_obj;
                    stepF = std::move(o);
                }
            }
        } else {
            stepF = run_p_stages(quadF, costF, theta, opts, false);
        }
        const CVec cand = project_power(theta_to_gamma(stepF.theta)).gamma;
        const double cand_obj = shared_objective(cand, window);
        if (outer == 0 || cand_obj <= current * (1.0 + 1e-12)) {
            gamma = cand;
            theta = gamma_to_theta(gamma);
            current = cand_obj;
        }

        // --- window step (filter fixed); the rectangular taper is a local
        // minimum of the stopband objective, so the inner solve is
        // multi-start: current taper, a cosine ramp, and random tapers.
        if (optimize_window && cfg.Nw > 0) {
            StopbandWindowObjective quadW(cfg, Ps, guard_shared, project_power(gamma));
            auto clamp01 = [](const RVec& t) -> RVec { return t.cwiseMax(0.0).cwiseMin(1.0); };
            std::vector<RVec> starts;
            starts.push_back(window.taper);
            RVec ramp(cfg.Nw);
            for (int jj = 0; jj < cfg.Nw; ++jj)
                ramp[jj] = 0.5 * (1.0 - std::cos(pi * (jj + 0.5) / cfg.Nw));
            starts.push_back(ramp);
            for (int rr = 0; rr < std::max(0, opts.restarts - 2); ++rr) {
                RVec t(cfg.Nw);
                for (int jj = 0; jj < cfg.Nw; ++jj) t[jj] = rng.uniform();
                starts.push_back(std::move(t));
            }
            RVec best_taper = window.taper;
            double best_obj = quadW.eval_max(window.taper);
            for (const RVec& s0 : starts) {
                RVec t = s0;
                for (double p : opts.p_stages) {
                    PgdProblem probW{[&](const RVec& tt) { return quadW.eval_smooth(tt, p); },
                                     nullptr, clamp01};
                    t = pgd_minimize(probW, t, opts.max_iters, opts.tol, opts.step0).x;
                }
                const double obj = quadW.eval_max(t);
                if (obj < best_obj) {
                    best_obj = obj;
                    best_taper = t;
                }
            }
            WindowSpec candw(clamp01(best_taper));
            const double cand_obj_w = shared_objective(gamma, candw);
            if (cand_obj_w <= current * (1.0 + 1e-12)) {
                window = std::move(candw);
                current = cand_obj_w;
            }
        }

        const double prev = trace.empty() ? kInf : trace.back();
        trace.push_back(current);
        if (std::isfinite(prev) && prev - current <= opts.tol * std::max(prev, 1e-300)) {
            converged = true;
            if (outer + 1 >= opts.min_outer) break;
        }
    }

    OptResult res;
    res.filter = project_power(canonicalize_pair_phases(gamma));
    res.window = window;
    res.objective = current;
    res.objective_trace = Eigen::Map<RVec>(trace.data(), trace.size());
    res.converged = converged;
    return res;
}

}  // namespace gfdm
