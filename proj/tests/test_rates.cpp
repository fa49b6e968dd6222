#include <doctest.h>

#include "gfdm/rates.hpp"
#include "test_util.hpp"

using namespace gfdm;

namespace {

GfdmConfig random_small_config(Rng& rng) {
    return GfdmConfig(2 + static_cast<int>(rng.bits() % 5), 2 + static_cast<int>(rng.bits() % 5));
}

}  // namespace

TEST_SUITE_BEGIN("rates");

TEST_CASE("rate upper bound") {
    const GfdmConfig cfg(30, 9);
    CHECK(rate_upper_bound(cfg, SnrPoint(1.0, 1.0)) == 270.0);
    CHECK(rate_upper_bound(cfg, SnrPoint(3.0, 1.0)) == 540.0);
    CHECK(rate_upper_bound(cfg, SnrPoint(1e-13, 1.0)) < 1e-9);
}

TEST_CASE("MF SINR") {
    SUBCASE("Dirichlet filter reaches the ideal MF bound") {
        const MfSinr r = mf_sinr(dirichlet_filter(9), SnrPoint(2.0, 1.0));
        CHECK(r.a_gamma < 1e-20);
        CHECK(r.sinr == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("matches the dense interference decomposition") {
        const GfdmConfig cfg(30, 9);
        const FilterSpec f = raised_cosine_filter(9, 0.5, true);
        const SnrPoint snr(1.0, 1.0);
        const MfSinr r = mf_sinr(f, snr);
        const RateReport oracle = rate_oracle(cfg, f, ChannelSpec::awgn(cfg), snr, Receiver::MF);
        CHECK(r.sinr == doctest::Approx(oracle.sinr(0, 0)).epsilon(1e-8));
        CHECK(r.sinr == doctest::Approx(oracle.sinr(17, 4)).epsilon(1e-8));
    }
    SUBCASE("oracle agreement over random filters") {
        Rng rng(21);
        for (int rep = 0; rep < 50; ++rep) {
            // K >= 3 so each subcarrier has two distinct neighbours
            const GfdmConfig cfg(3 + static_cast<int>(rng.bits() % 4),
                                 2 + static_cast<int>(rng.bits() % 5));
            const FilterSpec f = test::random_filter(cfg.M, rng);
            const SnrPoint snr(1.0, std::pow(10.0, -0.1 * static_cast<double>(rng.bits() % 20)));
            const MfSinr r = mf_sinr(f, snr);
            const RateReport oracle =
                rate_oracle(cfg, f, ChannelSpec::awgn(cfg), snr, Receiver::MF);
            for (int k = 0; k < cfg.K; ++k)
                for (int m = 0; m < cfg.M; ++m)
                    CHECK(r.sinr == doctest::Approx(oracle.sinr(k, m)).epsilon(1e-8));
        }
    }
    SUBCASE("high-SNR saturation at 1/a") {
        const FilterSpec f = raised_cosine_filter(9, 0.9, true);
        const MfSinr r = mf_sinr(f, SnrPoint(1e8, 1.0));
        CHECK(r.sinr == doctest::Approx(1.0 / r.a_gamma).epsilon(1e-6));
        // at 30 dB the rate is already within 1% of the saturation value
        const GfdmConfig cfg(30, 9);
        const double r30 =
            cfg.N() * std::log2(1.0 + mf_sinr(f, SnrPoint::from_db(30.0)).sinr);
        const double rsat = cfg.N() * std::log2(1.0 + 1.0 / r.a_gamma);
        CHECK(std::abs(r30 - rsat) < 0.01 * rsat);
    }
}

TEST_CASE("ideal MF/SIC restores the upper bound for any filter") {
    const GfdmConfig cfg(30, 9);
    CHECK(mf_sic_rate(cfg, SnrPoint(1.0, 1.0)) == 270.0);
    for (double snr_db : {-10.0, 0.0, 10.0, 20.0, 30.0}) {
        const SnrPoint s = SnrPoint::from_db(snr_db);
        CHECK(mf_sic_rate(cfg, s) == rate_upper_bound(cfg, s));
    }
}

TEST_CASE("ZF rate, AWGN") {
    const GfdmConfig cfg(30, 9);
    const SnrPoint snr(1.0, 1.0);
    SUBCASE("Dirichlet filter attains the upper bound exactly") {
        const RateReport r = zf_rate_awgn(cfg, dirichlet_filter(9), snr);
        CHECK(std::abs(r.sum_rate_bits - 270.0) <= 1e-9 * 270.0);
    }
    SUBCASE("RRC 0.9 loses rate and matches the oracle") {
        const FilterSpec f = raised_cosine_filter(9, 0.9, true);
        const RateReport r = zf_rate_awgn(cfg, f, snr);
        CHECK(r.sum_rate_bits < 270.0);
        const RateReport oracle = rate_oracle(cfg, f, ChannelSpec::awgn(cfg), snr, Receiver::ZF);
        CHECK(r.sum_rate_bits == doctest::Approx(oracle.sum_rate_bits).epsilon(1e-8));
    }
    SUBCASE("vanishing block eigenvalue is rejected") {
        CVec g = CVec::Zero(6);
        g[0] = 1.0;
        g[3] = -1.0;  // gamma_0 + d_0 gamma_M = 0
        g *= std::sqrt(3.0 / g.squaredNorm());
        CHECK_THROWS_AS(zf_rate_awgn(GfdmConfig(4, 3), FilterSpec(3, g), snr),
                        singular_filter_error);
    }
}

TEST_CASE("ZF rate, general channel") {
    Rng rng(31);
    SUBCASE("identity channel reduces to the AWGN form") {
        const GfdmConfig cfg(5, 4);
        const FilterSpec f = test::random_filter(4, rng);
        const SnrPoint snr(1.0, 0.5);
        const RateReport a = zf_rate_general(cfg, f, ChannelSpec::awgn(cfg), snr);
        const RateReport b = zf_rate_awgn(cfg, f, snr);
        CHECK(a.sum_rate_bits == doctest::Approx(b.sum_rate_bits).epsilon(1e-9));
    }
    SUBCASE("matches the dense oracle on random FIR channels") {
        for (int rep = 0; rep < 20; ++rep) {
            const GfdmConfig cfg(4, 3, 4);
            const FilterSpec f = (rep % 2 == 0) ? dirichlet_filter(3) : test::random_filter(3, rng);
            const ChannelSpec ch = ChannelSpec::from_taps(cfg, test::random_taps(4, rng));
            const SnrPoint snr(1.0, 1.0);
            const RateReport a = zf_rate_general(cfg, f, ch, snr);
            const RateReport oracle = rate_oracle(cfg, f, ch, snr, Receiver::ZF);
            CHECK(a.sum_rate_bits == doctest::Approx(oracle.sum_rate_bits).epsilon(1e-8));
            for (int k = 0; k < cfg.K; ++k)
                CHECK(a.sinr(k, 0) == doctest::Approx(oracle.sinr(k, 1)).epsilon(1e-8));
        }
    }
    SUBCASE("flat channel rescales the SNR") {
        const GfdmConfig cfg(4, 3, 2);
        const FilterSpec f = raised_cosine_filter(3, 0.4, true);
        const cplx c(0.6, -0.3);
        CVec taps(1);
        taps << c;
        const ChannelSpec ch = ChannelSpec::from_taps(cfg, taps);
        const RateReport a = zf_rate_general(cfg, f, ch, SnrPoint(1.0, 1.0));
        const RateReport b = zf_rate_awgn(cfg, f, SnrPoint(std::norm(c), 1.0));
        CHECK(a.sum_rate_bits == doctest::Approx(b.sum_rate_bits).epsilon(1e-9));
    }
    SUBCASE("zero channel eigenvalue is rejected") {
        const GfdmConfig cfg(4, 3, 2);
        CVec taps(2);
        taps << cplx(1.0), cplx(-1.0);  // null at DC
        CHECK_THROWS_AS(zf_rate_general(cfg, dirichlet_filter(3),
                                        ChannelSpec::from_taps(cfg, taps), SnrPoint(1.0, 1.0)),
                        singular_channel_error);
    }
}

TEST_CASE("MMSE rate, AWGN") {
    SUBCASE("Dirichlet filter attains the upper bound exactly") {
        const GfdmConfig cfg(30, 9);
        const RateReport r = mmse_rate_awgn(cfg, dirichlet_filter(9), SnrPoint(1.0, 1.0));
        CHECK(std::abs(r.sum_rate_bits - 270.0) <= 1e-9 * 270.0);
    }
    SUBCASE("matches the regularized-inverse oracle") {
        const GfdmConfig cfg(6, 5);
        const FilterSpec f = raised_cosine_filter(5, 0.5, true);
        const SnrPoint snr = SnrPoint::from_db(10.0);
        const RateReport r = mmse_rate_awgn(cfg, f, snr);
        const RateReport oracle = rate_oracle(cfg, f, ChannelSpec::awgn(cfg), snr, Receiver::MMSE);
        CHECK(r.sum_rate_bits == doctest::Approx(oracle.sum_rate_bits).epsilon(1e-8));
        CHECK(r.sinr(0, 0) == doctest::Approx(oracle.sinr(3, 2)).epsilon(1e-8));
    }
    SUBCASE("MMSE dominates ZF for every feasible filter") {
        Rng rng(41);
        for (int rep = 0; rep < 100; ++rep) {
            const GfdmConfig cfg = random_small_config(rng);
            const FilterSpec f = test::random_filter(cfg.M, rng);
            const SnrPoint snr(1.0, 0.5);
            const double mmse = mmse_rate_awgn(cfg, f, snr).sum_rate_bits;
            double zf;
            try {
                zf = zf_rate_awgn(cfg, f, snr).sum_rate_bits;
            } catch (const singular_filter_error&) {
                continue;
            }
            CHECK(mmse >= zf - 1e-9);
        }
    }
}

TEST_CASE("Dirichlet optimality as a property (ZF and MMSE bounded by R_max)") {
    Rng rng(51);
    const SnrPoint snr(1.0, 1.0);
    for (int rep = 0; rep < 200; ++rep) {
        const GfdmConfig cfg = random_small_config(rng);
        const FilterSpec f = test::random_filter(cfg.M, rng);
        const double rmax = rate_upper_bound(cfg, snr);
        const double mmse = mmse_rate_awgn(cfg, f, snr).sum_rate_bits;
        CHECK(mmse <= rmax + 1e-9);
        double zf;
        try {
            zf = zf_rate_awgn(cfg, f, snr).sum_rate_bits;
        } catch (const singular_filter_error&) {
            continue;
        }
        CHECK(zf <= rmax + 1e-9);
        // the bound is met only together with vanishing MF self-interference
        // (the MF closed form needs two distinct neighbours, hence K >= 3)
        if (cfg.K >= 3) {
            const double a = mf_sinr(f, snr).a_gamma;
            if (zf >= rmax - 1e-9 * rmax) CHECK(a < 1e-6);
            if (a < 1e-12) CHECK(zf >= rmax - 1e-6 * rmax);
        }
    }
}

TEST_CASE("block-circulant diagonalization identity") {
    Rng rng(61);
    for (int rep = 0; rep < 10; ++rep) {
        const int K = 2 + static_cast<int>(rng.bits() % 5);
        const int M = 2 + static_cast<int>(rng.bits() % 5);
        const FilterSpec f = test::random_filter(M, rng);
        const int N = K * M;
        // block matrix with Gamma^(f) on the diagonal and Gamma^(r) above
        CMat C = CMat::Zero(N, N);
        for (int k = 0; k < K; ++k) {
            const int kr = ((k - 1 + K) % K) * M;
            for (int q = 0; q < M; ++q) {
                C(k * M + q, k * M + q) += f.gamma[q];
                C(kr + q, k * M + q) += f.gamma[M + q];
            }
        }
        // U D U^H with U the block DFT and D the per-block eigenvalue diagonals
        const CMat d = filter_block_eigenvalues(f, K);
        CMat UDU = CMat::Zero(N, N);
        for (int p = 0; p < K; ++p)
            for (int c = 0; c < K; ++c)
                for (int l = 0; l < K; ++l) {
                    const cplx w = cis(2.0 * pi * (p - c) * l / K) / static_cast<double>(K);
                    for (int q = 0; q < M; ++q) UDU(p * M + q, c * M + q) += w * d(l, q);
                }
        CHECK((C - UDU).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("fast ZF equalizer") {
    Rng rng(71);
    SUBCASE("Dirichlet filter has unit per-bin factors") {
        const CMat d = filter_block_eigenvalues(dirichlet_filter(4), 6);
        CHECK((d.array() - 1.0).abs().maxCoeff() == 0.0);
    }
    SUBCASE("noiseless round trip and dense-inverse agreement") {
        for (int rep = 0; rep < 100; ++rep) {
            const int K = 2 + static_cast<int>(rng.bits() % 5);
            const int M = 2 + static_cast<int>(rng.bits() % 5);
            const GfdmConfig cfg(K, M, std::min(K * M, 3));
            FilterSpec f = test::random_filter(M, rng);
            try {
                require_invertible(filter_block_eigenvalues(f, K), M);
            } catch (const singular_filter_error&) {
                continue;
            }
            const ChannelSpec ch = (rep % 2 == 0)
                                       ? ChannelSpec::awgn(cfg)
                                       : ChannelSpec::from_taps(cfg, test::random_taps(2, rng));
            const CVec s = rng.cnormal_vector(cfg.N());
            const CMat Phi = modulation_matrix(cfg, f).Phi;
            const CMat H = ch.circulant(cfg);
            const CVec clean = H * Phi * s;
            CHECK((zf_equalize_fast(cfg, f, ch, clean) - s).cwiseAbs().maxCoeff() < 1e-9);

            const CVec y = rng.cnormal_vector(cfg.N());
            const CVec dense = (H * Phi).inverse() * y;
            CHECK((zf_equalize_fast(cfg, f, ch, y) - dense).cwiseAbs().maxCoeff() < 1e-9);
        }
    }
}

TEST_CASE("rates are monotone in SNR") {
    const GfdmConfig cfg(4, 3, 3);
    const FilterSpec f = raised_cosine_filter(3, 0.5, true);
    Rng rng(81);
    const ChannelSpec ch = ChannelSpec::from_taps(cfg, test::random_taps(3, rng));
    double prev_zf = -1.0, prev_zfg = -1.0, prev_mmse = -1.0, prev_mf = -1.0, prev_sic = -1.0;
    for (double db = -10.0; db <= 30.0; db += 2.5) {
        const SnrPoint s = SnrPoint::from_db(db);
        const double zf = zf_rate_awgn(cfg, f, s).sum_rate_bits;
        const double zfg = zf_rate_general(cfg, f, ch, s).sum_rate_bits;
        const double mmse = mmse_rate_awgn(cfg, f, s).sum_rate_bits;
        const double mf = cfg.N() * std::log2(1.0 + mf_sinr(f, s).sinr);
        const double sic = mf_sic_rate(cfg, s);
        CHECK(zf >= prev_zf);
        CHECK(zfg >= prev_zfg);
        CHECK(mmse >= prev_mmse);
        CHECK(mf >= prev_mf);
        CHECK(sic >= prev_sic);
        prev_zf = zf;
        prev_zfg = zfg;
        prev_mmse = mmse;
        prev_mf = mf;
        prev_sic = sic;
    }
}

TEST_SUITE_END();
