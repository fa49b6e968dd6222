#include "gfdm/rates.hpp"

namespace gfdm {

const char* receiver_name(Receiver r) {
    switch (r) {
        case Receiver::MF: return "MF";
        case Receiver::MF_SIC: return "MF_SIC";
        case Receiver::ZF: return "ZF";
        case Receiver::MMSE: return "MMSE";
    }
    return "?";
}

RateReport RateReport::from_sinr(Receiver r, RMat sinr_matrix) {
    RateReport rep;
    rep.receiver = r;
    rep.sinr = std::move(sinr_matrix);
    rep.sum_rate_bits = (rep.sinr.array() + 1.0).log2().sum();
    return rep;
}

double rate_upper_bound(const GfdmConfig& cfg, const SnrPoint& snr) {
    return cfg.N() * std::log2(1.0 + snr.snr());
}

MfSinr mf_sinr(const FilterSpec& filter, const SnrPoint& snr) {
    const int M = filter.M;
    RVec g(M);
    CVec cross(M);
    for (int l = 0; l < M; ++l) {
        g[l] = std::norm(filter.gamma[l]) + std::norm(filter.gamma[M + l]);
        cross[l] = filter.gamma[l] * std::conj(filter.gamma[M + l]);
    }
    double a = 0.0;
    for (int p = 0; p < M; ++p) {
        cplx ap = 0.0, bp = 0.0;
        for (int l = 0; l < M; ++l) {
            const cplx w = cis(2.0 * pi * p * l / M);
            ap += w * g[l];
            bp += w * cross[l];
        }
        if (p != 0) a += std::norm(ap);
        a += 2.0 * std::norm(bp);
    }
    a /= static_cast<double>(M) * M;
    MfSinr out;
    out.a_gamma = a;
    out.sinr = snr.Ps / (a * snr.Ps + snr.sigma2);
    return out;
}

double mf_sic_rate(const GfdmConfig& cfg, const SnrPoint& snr) {
    return rate_upper_bound(cfg, snr);
}

RateReport zf_rate_awgn(const GfdmConfig& cfg, const FilterSpec& filter, const SnrPoint& snr) {
    if (filter.M != cfg.M) throw invalid_dimension_error("zf_rate_awgn: filter/config mismatch");
    const CMat d = filter_block_eigenvalues(filter, cfg.K);
    require_invertible(d, cfg.M);
    const double denom = d.cwiseAbs2().cwiseInverse().sum() / cfg.N();
    const double sinr = snr.snr() / denom;
    return RateReport::from_sinr(Receiver::ZF, RMat::Constant(cfg.K, cfg.M, sinr));
}

RateReport zf_rate_general(const GfdmConfig& cfg, const FilterSpec& filter,
                           const ChannelSpec& channel, const SnrPoint& snr) {
    if (filter.M != cfg.M)
        throw invalid_dimension_error("zf_rate_general: filter/config mismatch");
    const int K = cfg.K, M = cfg.M;
    const CMat d = filter_block_eigenvalues(filter, K);
    require_invertible(d, M);
    channel.require_invertible();

    // tau_q(xi) = sum_l exp(i*2*pi*xi*l/K) / d_l(q)
    CMat tau(K, M);
    for (int q = 0; q < M; ++q)
        for (int xi = 0; xi < K; ++xi) {
            cplx acc = 0.0;
            for (int l = 0; l < K; ++l) acc += cis(2.0 * pi * xi * l / K) / d(l, q);
            tau(xi, q) = acc;
        }

    const double scale = 1.0 / (static_cast<double>(M) * K * K);
    RMat sinr(K, M);
    for (int k = 0; k < K; ++k) {
        double noise_gain = 0.0;
        for (int p = 0; p < K; ++p) {
            const int xi = ((k - p) % K + K) % K;
            for (int q = 0; q < M; ++q)
                noise_gain += std::norm(tau(xi, q)) / std::norm(channel.lambda[p * M + q]);
        }
        noise_gain *= scale;
        sinr.row(k).setConstant(snr.snr() / noise_gain);
    }
    return RateReport::from_sinr(Receiver::ZF, std::move(sinr));
}

RateReport mmse_rate_awgn(const GfdmConfig& cfg, const FilterSpec& filter, const SnrPoint& snr) {
    if (filter.M != cfg.M) throw invalid_dimension_error("mmse_rate_awgn: filter/config mismatch");
    const CMat d = filter_block_eigenvalues(filter, cfg.K);
    const double inv_snr = snr.sigma2 / snr.Ps;
    const double D = (d.cwiseAbs2().array() + inv_snr).inverse().sum() / cfg.N();
    const double sinr = snr.snr() / D - 1.0;
    return RateReport::from_sinr(Receiver::MMSE, RMat::Constant(cfg.K, cfg.M, sinr));
}

CVec zf_equalize_fast(const GfdmConfig& cfg, const FilterSpec& filter, const ChannelSpec& channel,
                      const CVec& y) {
    if (y.size() != cfg.N()) throw invalid_dimension_error("zf_equalize_fast: |y| must be N");
    const int K = cfg.K, M = cfg.M;
    const CMat d = filter_block_eigenvalues(filter, K);
    require_invertible(d, M);
    channel.require_invertible();

    CVec z = fft_unitary(y);
    z.array() /= channel.lambda.array();

    // block DFT U^H, per-bin filter inversion, block IDFT U
    const double ks = 1.0 / std::sqrt(static_cast<double>(K));
    CMat t(K, M);
    for (int q = 0; q < M; ++q)
        for (int a = 0; a < K; ++a) {
            cplx acc = 0.0;
            for (int p = 0; p < K; ++p) acc += cis(-2.0 * pi * a * p / K) * z[p * M + q];
            t(a, q) = ks * acc / d(a, q);
        }
    for (int p = 0; p < K; ++p)
        for (int q = 0; q < M; ++q) {
            cplx acc = 0.0;
            for (int a = 0; a < K; ++a) acc += cis(2.0 * pi * p * a / K) * t(a, q);
            z[p * M + q] = ks * acc;
        }

    // K separate M-point IDFTs
    const CMat W_M = dft_matrix(M);
    CVec s_hat(cfg.N());
    for (int k = 0; k < K; ++k)
        s_hat.segment(k * M, M) = W_M.adjoint() * z.segment(k * M, M);
    return s_hat;
}

RateReport rate_oracle(const GfdmConfig& cfg, const FilterSpec& filter, const ChannelSpec& channel,
                       const SnrPoint& snr, Receiver receiver) {
    const int N = cfg.N();
    const CMat Phi = modulation_matrix(cfg, filter).Phi;
    const CMat H = channel.circulant(cfg);

    RMat sinr(cfg.K, cfg.M);
    auto sinr_at = [&](int j) -> double& { return sinr(j / cfg.M, j % cfg.M); };

    switch (receiver) {
        case Receiver::MF_SIC:
            sinr.setConstant(snr.snr());
            return RateReport::from_sinr(receiver, std::move(sinr));
        case Receiver::MF: {
            const CMat G = Phi.adjoint() * H * Phi;
            const CMat Gn = Phi.adjoint() * Phi;
            for (int j = 0; j < N; ++j) {
                const double sig = std::norm(G(j, j)) * snr.Ps;
                const double intf = (G.row(j).cwiseAbs2().sum() - std::norm(G(j, j))) * snr.Ps;
                const double noise = snr.sigma2 * Gn(j, j).real();
                sinr_at(j) = sig / (intf + noise);
            }
            return RateReport::from_sinr(receiver, std::move(sinr));
        }
        case Receiver::ZF: {
            require_invertible(filter_block_eigenvalues(filter, cfg.K), cfg.M);
            channel.require_invertible();
            const CMat B = (H * Phi).inverse();
            for (int j = 0; j < N; ++j) sinr_at(j) = snr.snr() / B.row(j).squaredNorm();
            return RateReport::from_sinr(receiver, std::move(sinr));
        }
        case Receiver::MMSE: {
            const CMat A = H * Phi;
            const CMat B =
                (CMat::Identity(N, N) + snr.snr() * A.adjoint() * A).inverse();
            for (int j = 0; j < N; ++j) sinr_at(j) = 1.0 / B(j, j).real() - 1.0;
            return RateReport::from_sinr(receiver, std::move(sinr));
        }
    }
    throw config_error("rate_oracle: unknown receiver");
}

}  // namespace gfdm
