// Acceptance suite: one self-contained check per release criterion, each
// printing a single PASS/FAIL line. Run with no arguments for all criteria,
// or with a criterion number to run one.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "gfdm/filters.hpp"
#include "gfdm/optimize.hpp"
#include "gfdm/serialize.hpp"
#include "periodogram_util.hpp"
#include "test_util.hpp"

using namespace gfdm;

namespace {

struct Checker {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
    void note(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// --------------------------------------------------------------------------
// 1. Dirichlet optimality: ZF and MMSE rates hit N log2(1 + snr) exactly.
void criterion1(Checker& c) {
    const GfdmConfig cfg(30, 9);
    const SnrPoint snr(1.0, 1.0);
    const FilterSpec f = dirichlet_filter(9);
    const double zf = zf_rate_awgn(cfg, f, snr).sum_rate_bits;
    const double mmse = mmse_rate_awgn(cfg, f, snr).sum_rate_bits;
    c.require(std::abs(zf - 270.0) <= 1e-9 * 270.0, "ZF rate " + fmt(zf) + " != 270");
    c.require(std::abs(mmse - 270.0) <= 1e-9 * 270.0, "MMSE rate " + fmt(mmse) + " != 270");
    c.note("ZF = " + fmt(zf) + ", MMSE = " + fmt(mmse) + " bits");
}

// --------------------------------------------------------------------------
// 2. Closed forms match the dense matrix oracle on random instances.
void criterion2(Checker& c) {
    Rng rng(0xc2);
    int mf_checked = 0, zf_awgn_checked = 0, zf_gen_checked = 0, mmse_checked = 0;
    double worst = 0.0;
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); };
    for (int rep = 0; rep < 100; ++rep) {
        const int K = 2 + static_cast<int>(rng.bits() % 5);
        const int M = 2 + static_cast<int>(rng.bits() % 5);
        const GfdmConfig cfg(K, M, 4);
        const FilterSpec f = test::random_filter(M, rng);
        const SnrPoint snr(1.0, std::pow(10.0, -0.1 * static_cast<double>(rng.bits() % 20)));
        const ChannelSpec awgn = ChannelSpec::awgn(cfg);

        if (K >= 3) {  // the MF closed form needs two distinct neighbours
            const double a = mf_sinr(f, snr).sinr;
            const double b = rate_oracle(cfg, f, awgn, snr, Receiver::MF).sinr(0, 0);
            worst = std::max(worst, rel(a, b));
            c.require(rel(a, b) <= 1e-8, "MF closed-form mismatch at rep " + std::to_string(rep));
            ++mf_checked;
        }
        try {
            const double a = zf_rate_awgn(cfg, f, snr).sum_rate_bits;
            const double b = rate_oracle(cfg, f, awgn, snr, Receiver::ZF).sum_rate_bits;
            worst = std::max(worst, rel(a, b));
            c.require(rel(a, b) <= 1e-8, "ZF AWGN closed-form mismatch at rep " + std::to_string(rep));
            ++zf_awgn_checked;

            const ChannelSpec ch = ChannelSpec::from_taps(cfg, test::random_taps(4, rng));
            ch.require_invertible();
            const double g1 = zf_rate_general(cfg, f, ch, snr).sum_rate_bits;
            const double g2 = rate_oracle(cfg, f, ch, snr, Receiver::ZF).sum_rate_bits;
            worst = std::max(worst, rel(g1, g2));
            c.require(rel(g1, g2) <= 1e-8, "ZF general-channel closed-form mismatch at rep " + std::to_string(rep));
            ++zf_gen_checked;
        } catch (const singular_filter_error&) {
        } catch (const singular_channel_error&) {
        }
        const double m1 = mmse_rate_awgn(cfg, f, snr).sum_rate_bits;
        const double m2 = rate_oracle(cfg, f, awgn, snr, Receiver::MMSE).sum_rate_bits;
        worst = std::max(worst, rel(m1, m2));
        c.require(rel(m1, m2) <= 1e-8, "MMSE closed-form mismatch at rep " + std::to_string(rep));
        ++mmse_checked;
    }
    c.require(mf_checked >= 60 && zf_awgn_checked >= 90 && zf_gen_checked >= 85 &&
                  mmse_checked == 100,
              "insufficient effective samples");
    c.note("worst relative error " + fmt(worst) + " over " +
           std::to_string(mf_checked + zf_awgn_checked + zf_gen_checked + mmse_checked) +
           " comparisons");
}

// --------------------------------------------------------------------------
// 3. The projected-gradient rate maximizer attains the analytic optimum.
void criterion3(Checker& c) {
    OptOptions opts;
    opts.restarts = 8;
    opts.max_iters = 200;
    opts.seed = 0xc3;
    double worst = 0.0;
    for (const auto& [K, M] : std::vector<std::pair<int, int>>{{4, 3}, {6, 5}}) {
        const GfdmConfig cfg(K, M);
        for (double db : {0.0, 10.0}) {
            const SnrPoint snr = SnrPoint::from_db(db);
            const double rmax = rate_upper_bound(cfg, snr);
            for (Receiver r : {Receiver::ZF, Receiver::MMSE}) {
                const OptResult res = solve_rate_max_awgn(cfg, snr, r, opts);
                const double gap = std::abs(res.objective - rmax) / rmax;
                worst = std::max(worst, gap);
                c.require(gap <= 1e-3, std::string(receiver_name(r)) + " K=" +
                                           std::to_string(K) + " M=" + std::to_string(M) + " " +
                                           fmt(db) + " dB off by " + fmt(gap));
            }
        }
    }
    c.note("worst relative gap to R_max " + fmt(worst));
}

// --------------------------------------------------------------------------
// 4. Fast ZF pipeline: dense-inverse agreement and exact noiseless recovery.
void criterion4(Checker& c) {
    Rng rng(0xc4);
    int done = 0;
    double worst = 0.0;
    while (done < 50) {
        const int K = 2 + static_cast<int>(rng.bits() % 6);
        const int M = 2 + static_cast<int>(rng.bits() % 6);
        const GfdmConfig cfg(K, M, 3);
        const FilterSpec f = test::random_filter(M, rng);
        try {
            require_invertible(filter_block_eigenvalues(f, K), M);
        } catch (const singular_filter_error&) {
            continue;
        }
        const ChannelSpec ch = (done % 2 == 0)
                                   ? ChannelSpec::awgn(cfg)
                                   : ChannelSpec::from_taps(cfg, test::random_taps(3, rng));
        try {
            ch.require_invertible();
        } catch (const singular_channel_error&) {
            continue;
        }
        const CMat Phi = modulation_matrix(cfg, f).Phi;
        const CMat H = ch.circulant(cfg);
        const CVec s = rng.cnormal_vector(cfg.N());
        const double e1 =
            (zf_equalize_fast(cfg, f, ch, (H * Phi * s).eval()) - s).cwiseAbs().maxCoeff();
        const CVec y = rng.cnormal_vector(cfg.N());
        const double e2 =
            (zf_equalize_fast(cfg, f, ch, y) - ((H * Phi).inverse() * y).eval())
                .cwiseAbs()
                .maxCoeff();
        worst = std::max({worst, e1, e2});
        c.require(e1 <= 1e-9, "round trip error " + fmt(e1));
        c.require(e2 <= 1e-9, "dense-inverse mismatch " + fmt(e2));
        ++done;
    }
    c.note("worst error " + fmt(worst) + " over 50 instances");
}

// --------------------------------------------------------------------------
// 5. Analytic PSD matches a 2000-symbol Monte Carlo periodogram.
void criterion5(Checker& c) {
    const GfdmConfig cfg(30, 9, 0, 0, 1.0);
    const FilterSpec f = dirichlet_filter(9);
    // 2x zero padding puts the odd bins halfway between the common spectral
    // nulls at multiples of 1/Tb, where a dB comparison is well posed.
    const auto per = test::periodogram_unwindowed(cfg, f, 1.0, 2000, 16, 0xc5, 2);
    double worst_db = 0.0;
    int bins = 0;
    for (Eigen::Index i = 0; i < per.f.size(); ++i) {
        const double fr = per.f[i];
        const double j2 = fr * 2.0 * cfg.Tb();  // odd integers are mid-lobe
        if (std::abs(j2 - 2.0 * std::round(j2 / 2.0)) < 0.5) continue;
        const bool in_band = fr >= -1.0 && fr <= 30.0;
        const bool stop_lo = fr >= -11.0 && fr <= -2.0;
        const bool stop_hi = fr >= 31.0 && fr <= 40.0;
        if (!(in_band || stop_lo || stop_hi)) continue;
        const double want = psd_total_at(cfg, f, 1.0, fr);
        const double db = std::abs(10.0 * std::log10(per.p[i] / want));
        worst_db = std::max(worst_db, db);
        ++bins;
    }
    c.require(bins > 400, "too few comparison bins");
    c.require(worst_db < 0.5, "worst deviation " + fmt(worst_db) + " dB");
    c.note(std::to_string(bins) + " bins, worst " + fmt(worst_db) + " dB");
}

// --------------------------------------------------------------------------
// 6. Stopband designs beat the SC-FDM and RRC baselines; the constrained
//    design keeps 90% of the rate.
void criterion6(Checker& c) {
    const GfdmConfig cfg(30, 9, 0, 0, 1.0);
    const SnrPoint snr(1.0, 1.0);
    const double guard = 1.0 / cfg.Ts;
    const double base_scfdm = oob_objective(cfg, dirichlet_filter(9), 1.0, guard);
    const double base_rrc05 = oob_objective(cfg, raised_cosine_filter(9, 0.5, true), 1.0, guard);
    const double base_rrc09 = oob_objective(cfg, raised_cosine_filter(9, 0.9, true), 1.0, guard);

    OptOptions opts;
    opts.seed = 0xc6;
    opts.restarts = 8;
    opts.max_iters = 220;
    const OptResult free = solve_oob_mfsic(cfg, 1.0, opts);
    c.require(free.filter.power_normalized(1e-10), "free design violates the power constraint");
    c.require(free.objective < base_scfdm, "free design does not beat SC-FDM");
    c.require(free.objective < base_rrc05, "free design does not beat RRC 0.5");
    c.require(free.objective < base_rrc09, "free design does not beat RRC 0.9");

    // time response of the unconstrained design: two dominant peaks
    const CVec g = time_domain_filter(cfg, free.filter);
    const RVec mag = g.cwiseAbs();
    const double half = 0.5 * mag.maxCoeff();
    int peaks = 0;
    const int N = cfg.N();
    for (int n = 0; n < N; ++n) {
        const double left = mag[(n - 1 + N) % N], right = mag[(n + 1) % N];
        if (mag[n] > half && mag[n] >= left && mag[n] > right) ++peaks;
    }
    c.require(peaks == 2, "expected 2 dominant time-domain peaks, found " +
                              std::to_string(peaks));

    OptOptions zopts = opts;
    zopts.restarts = 4;
    const OptResult constrained = solve_oob_zf(cfg, snr, 0.1, zopts);
    const double rate = zf_rate_awgn(cfg, constrained.filter, snr).sum_rate_bits;
    c.require(rate >= 0.9 * 270.0 * (1.0 - 1e-6),
              "constrained design rate " + fmt(rate) + " below the 90% floor");
    c.require(constrained.objective < base_scfdm, "constrained design does not beat SC-FDM");

    c.note("stopband max dB: SC-FDM " + fmt(to_db(base_scfdm)) + ", RRC(.5) " +
           fmt(to_db(base_rrc05)) + ", RRC(.9) " + fmt(to_db(base_rrc09)) + ", free " +
           fmt(to_db(free.objective)) + " (-" + fmt(to_db(base_scfdm) - to_db(free.objective)) +
           " dB), eta=0.1 " + fmt(to_db(constrained.objective)) + " (-" +
           fmt(to_db(base_scfdm) - to_db(constrained.objective)) + " dB), R_ZF " + fmt(rate));
}

// --------------------------------------------------------------------------
// 7. CFO design: the optimized filter beats SC-FDM on held-out draws and the
//    gain grows with SNR.
void criterion7(Checker& c) {
    const GfdmConfig cfg(6, 45, 16, 0, 1.0);
    const double hw = 0.005;
    const UplinkProfile profile = UplinkProfile::awgn();
    OptOptions opts;
    opts.seed = 0xc7;   // frozen training draws
    opts.restarts = 1;  // ascent from the rate-optimal no-CFO filter
    opts.max_iters = 30;
    opts.tol = 1e-12;   // the recoverable gain is a ~1e-4 fraction of the rate
    const FilterSpec scfdm = dirichlet_filter(45);

    double gap20 = 0.0, gap0 = 0.0;
    for (double db : {20.0, 0.0}) {
        const SnrPoint snr = SnrPoint::from_db(db);
        const OptResult res = solve_rate_max_cfo(cfg, snr, hw, profile, 200, opts);
        const CfoMeanRateEvaluator held_out(cfg, snr, NominalNoiseModel::row_norm,
                                            make_uplink_draws(cfg, hw, profile, 200, 0x9e1d));
        const double opt_rate = held_out.mean_rate(res.filter);
        const double ref_rate = held_out.mean_rate(scfdm);
        const double gap = opt_rate - ref_rate;
        c.require(gap > 0.0, fmt(db) + " dB: optimized " + fmt(opt_rate) +
                                 " does not beat SC-FDM " + fmt(ref_rate) + " held out");
        (db == 20.0 ? gap20 : gap0) = gap;
        c.note(fmt(db) + " dB held-out: optimized " + fmt(opt_rate) + " vs SC-FDM " +
               fmt(ref_rate) + " (+" + fmt(gap) + " bits)");
    }
    c.require(gap20 > gap0, "gain at 20 dB (" + fmt(gap20) + ") not larger than at 0 dB (" +
                                fmt(gap0) + ")");
}

// --------------------------------------------------------------------------
// 8. Alternating filter/window design: monotone trace, window strictly helps.
void criterion8(Checker& c) {
    const GfdmConfig cfg(30, 9, 30, 3, 1.0);
    OptOptions opts;
    opts.seed = 0xc8;
    opts.restarts = 4;
    opts.max_iters = 200;
    opts.max_outer = 12;
    opts.min_outer = 10;
    const OptResult joint = joint_design_oob(cfg, 1.0, 30.0, opts);
    c.require(static_cast<int>(joint.objective_trace.size()) >= 10,
              "trace has fewer than 10 outer iterations");
    for (Eigen::Index i = 1; i < joint.objective_trace.size(); ++i)
        c.require(joint.objective_trace[i] <=
                      joint.objective_trace[i - 1] * (1.0 + 1e-12) + 1e-300,
                  "trace increases at iteration " + std::to_string(i));

    OptOptions fopts = opts;
    fopts.max_outer = 3;
    fopts.min_outer = 1;
    const OptResult filter_only =
        joint_design_oob(cfg, 1.0, 30.0, fopts, JointStopbandMode::unified, false);
    c.require(joint.objective <= filter_only.objective * (1.0 + 1e-9),
              "joint design (" + fmt(joint.objective) + ") worse than filter-only (" +
                  fmt(filter_only.objective) + ")");
    c.note("joint " + fmt(to_db(joint.objective)) + " dB vs filter-only " +
           fmt(to_db(filter_only.objective)) + " dB on the [L/Ts, ...) stopband, " +
           std::to_string(joint.objective_trace.size()) + " outer iterations");
}

// --------------------------------------------------------------------------
// 9. Invariant sweeps under the default seed (condensed module properties).
void criterion9(Checker& c) {
    Rng rng(0xc9);
    // Dirichlet optimality bound over 200 random feasible filters
    const SnrPoint snr(1.0, 1.0);
    for (int rep = 0; rep < 200; ++rep) {
        const GfdmConfig cfg(2 + static_cast<int>(rng.bits() % 5),
                             2 + static_cast<int>(rng.bits() % 5));
        const FilterSpec f = test::random_filter(cfg.M, rng);
        const double rmax = rate_upper_bound(cfg, snr);
        c.require(mmse_rate_awgn(cfg, f, snr).sum_rate_bits <= rmax + 1e-9,
                  "MMSE rate exceeds the bound");
        try {
            c.require(zf_rate_awgn(cfg, f, snr).sum_rate_bits <= rmax + 1e-9,
                      "ZF rate exceeds the bound");
        } catch (const singular_filter_error&) {
        }
    }
    // modulate agrees with the scalar signal model
    for (int rep = 0; rep < 100; ++rep) {
        const GfdmConfig cfg(2 + static_cast<int>(rng.bits() % 5),
                             2 + static_cast<int>(rng.bits() % 5));
        const FilterSpec f = test::random_filter(cfg.M, rng);
        const CVec s = rng.cnormal_vector(cfg.N());
        const CVec a = modulate(cfg, f, DataSymbols(s, 1.0));
        const CVec b = test::modulate_scalar_oracle(cfg, f, s);
        c.require((a - b).cwiseAbs().maxCoeff() < 1e-10, "modulate/scalar mismatch");
    }
    // filter energy and power invariants
    for (int rep = 0; rep < 50; ++rep) {
        const GfdmConfig cfg(2 + static_cast<int>(rng.bits() % 5),
                             2 + static_cast<int>(rng.bits() % 5));
        const FilterSpec f = test::random_filter(cfg.M, rng);
        c.require(std::abs(time_domain_filter(cfg, f).squaredNorm() - 1.0) < 1e-12,
                  "time response energy != 1");
        const CMat Phi = modulation_matrix(cfg, f).Phi;
        c.require(std::abs(Phi.squaredNorm() - cfg.N()) < 1e-9 * cfg.N(),
                  "transmit power != N");
    }
    // CFO mixing stays unitary; the zero-offset paths collapse
    for (double eps : {-0.4, -0.005, 0.0, 0.01, 0.45}) {
        const CMat D = cfo_mixing_matrix(18, 4, eps, CfoConvention::normalized);
        c.require((D.adjoint() * D - CMat::Identity(18, 18)).cwiseAbs().maxCoeff() < 1e-10,
                  "CFO mixing not unitary");
    }
    // stopband grid adequacy at the reference size
    const GfdmConfig big(30, 9);
    const FilterSpec fd = dirichlet_filter(9);
    const auto eval = [&](double fr) { return psd_total_at(big, fd, 1.0, fr); };
    const double v8 = oob_objective(big, eval, 1.0, 8);
    const double v16 = oob_objective(big, eval, 1.0, 16);
    c.require(std::abs(v16 - v8) < 0.01 * v8, "stopband grid not refinement-stable");
    c.note("200 bound checks, 100 modulation oracles, 50 energy checks, grid refinement ok");
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<void(Checker&)>>> criteria = {
        {"Dirichlet filter attains N log2(1+snr) under ZF and MMSE", criterion1},
        {"closed-form rates match the dense oracle (1e-8)", criterion2},
        {"rate maximizer reaches R_max within 0.1%", criterion3},
        {"fast ZF equalizer matches the dense inverse (1e-9)", criterion4},
        {"analytic PSD matches a 2000-symbol periodogram (0.5 dB)", criterion5},
        {"stopband designs beat SC-FDM/RRC; 90% rate floor holds", criterion6},
        {"CFO design beats SC-FDM held out; gain grows with SNR", criterion7},
        {"joint filter/window design: monotone and no worse than filter-only", criterion8},
        {"module invariant sweeps under the default seed", criterion9},
    };

    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int idx = static_cast<int>(i) + 1;
        if (only != 0 && only != idx) continue;
        Checker c;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i].second(c);
        } catch (const std::exception& e) {
            c.ok = false;
            c.detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %d: %s - %s [%s] (%.1f s)\n", idx, c.ok ? "PASS" : "FAIL",
                    criteria[i].first, c.detail.c_str(), secs);
        std::fflush(stdout);
        if (!c.ok) ++failures;
    }
    return failures;
}
