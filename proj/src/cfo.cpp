#include "gfdm/cfo.hpp"

#include "gfdm/fft.hpp"

namespace gfdm {

CfoProfile sample_cfo(int K, double half_width, std::uint64_t seed) {
    if (K < 1) throw invalid_dimension_error("sample_cfo: K must be >= 1");
    if (half_width <= 0.0 || half_width >= 0.5)
        throw config_error("sample_cfo: half_width must lie in (0, 0.5)");
    Rng rng(seed);
    RVec eps(K);
    for (int k = 0; k < K; ++k) eps[k] = half_width * (2.0 * rng.uniform() - 1.0);
    return CfoProfile(std::move(eps));
}

UplinkChannelSet UplinkChannelSet::awgn(const GfdmConfig& cfg, int users) {
    UplinkChannelSet s;
    s.taps.assign(users, CVec::Ones(1));
    s.lambda.assign(users, CVec::Ones(cfg.N()));
    return s;
}

UplinkChannelSet UplinkChannelSet::from_taps(const GfdmConfig& cfg, std::vector<CVec> user_taps) {
    UplinkChannelSet s;
    s.taps = std::move(user_taps);
    s.lambda.reserve(s.taps.size());
    for (const CVec& h : s.taps) s.lambda.push_back(ChannelSpec::from_taps(cfg, h).lambda);
    return s;
}

namespace {

// exp(i*x) - 1 at full precision for small x.
cplx cis_m1(double x) {
    const double h = std::sin(0.5 * x);
    return {-2.0 * h * h, std::sin(x)};
}

}  // namespace

CVec cfo_circulant_symbol(int N, double eps, CfoConvention conv) {
    if (std::abs(eps) >= 0.5) throw config_error("cfo_circulant_symbol: need |eps| < 0.5");
    // phase advance per core sample, in cycles:
    const double cycles = (conv == CfoConvention::normalized) ? eps : eps * N;
    CVec c = CVec::Zero(N);
    if (cycles == 0.0) {
        c[0] = 1.0;
        return c;
    }
    const cplx num = cis_m1(2.0 * pi * cycles);
    for (int d = 0; d < N; ++d) {
        const cplx den = static_cast<double>(N) * cis_m1(2.0 * pi * (cycles - d) / N);
        if (std::abs(den) < 1e-13) {
            cplx acc = 0.0;  // degenerate geometric ratio; sum directly
            for (int n = 0; n < N; ++n) acc += cis(2.0 * pi * (cycles - d) * n / N);
            c[d] = acc / static_cast<double>(N);
        } else {
            c[d] = num / den;
        }
    }
    return c;
}

CMat cfo_mixing_matrix(int N, int /*Ncp*/, double eps, CfoConvention conv) {
    const CVec c = cfo_circulant_symbol(N, eps, conv);
    CMat D(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) D(i, j) = c[((i - j) % N + N) % N];
    return D;
}

CMat EffectiveMatrix::psi_time() const {
    CMat out(psi.rows(), psi.cols());
    for (Eigen::Index j = 0; j < psi.cols(); ++j) out.col(j) = ifft_unitary(psi.col(j));
    return out;
}

EffectiveMatrix build_uplink_matrices(const GfdmConfig& cfg, const FilterSpec& filter,
                                      const UplinkChannelSet& channels, const CfoProfile& cfo,
                                      CfoConvention conv) {
    const int K = cfg.K, M = cfg.M, N = cfg.N();
    if (filter.M != M) throw invalid_dimension_error("build_uplink_matrices: filter mismatch");
    if (static_cast<int>(channels.lambda.size()) != K || cfo.eps.size() != K)
        throw invalid_dimension_error("build_uplink_matrices: need one channel and CFO per user");

    const CMat W_M = dft_matrix(M);
    EffectiveMatrix eff;
    eff.K = K;
    eff.M = M;
    eff.psi = CMat::Zero(N, N);
    eff.psi_hat = CMat::Zero(N, N);
    for (int k = 0; k < K; ++k) {
        const CVec& lam = channels.lambda[k];
        const CVec c = cfo_circulant_symbol(N, cfo.eps[k], conv);
        const int kf = k * M;
        const int kr = ((k - 1 + K) % K) * M;
        auto psi_block = eff.psi.block(0, k * M, N, M);
        CVec dcol(N);
        for (int q = 0; q < M; ++q) {
            const cplx a = filter.gamma[q] * lam[kf + q];
            const cplx b = filter.gamma[M + q] * lam[kr + q];
            // nominal: two single-bin rows per coefficient pair
            eff.psi_hat.row(kf + q).segment(k * M, M) += a * W_M.row(q);
            eff.psi_hat.row(kr + q).segment(k * M, M) += b * W_M.row(q);
            // with CFO: the same columns smeared by the circulant mixing
            for (int r = 0; r < N; ++r)
                dcol[r] = a * c[((r - kf - q) % N + N) % N] + b * c[((r - kr - q) % N + N) % N];
            psi_block.noalias() += dcol * W_M.row(q);
        }
    }
    return eff;
}

namespace {

RateReport report_from_flat_sinr(const EffectiveMatrix& eff, const RVec& sinr_by_n) {
    RMat sinr(eff.K, eff.M);
    for (int k = 0; k < eff.K; ++k)
        for (int m = 0; m < eff.M; ++m) sinr(k, m) = sinr_by_n[k * eff.M + m];
    return RateReport::from_sinr(Receiver::ZF, std::move(sinr));
}

}  // namespace

RateReport zf_rate_cfo_known(const EffectiveMatrix& eff, const SnrPoint& snr) {
    const int N = static_cast<int>(eff.psi.rows());
    const CMat G = eff.psi.adjoint() * eff.psi;
    Eigen::PartialPivLU<CMat> lu(G);
    const CMat Ginv = lu.inverse();
    if (!Ginv.allFinite() || !(G.norm() * Ginv.norm() < 1e24))  // cond(psi)^2 estimate
        throw singular_effective_matrix_error("zf_rate_cfo_known: effective matrix is singular");
    RVec sinr(N);
    for (int n = 0; n < N; ++n) sinr[n] = snr.snr() / Ginv(n, n).real();
    return report_from_flat_sinr(eff, sinr);
}

RateReport zf_rate_cfo_nominal(const EffectiveMatrix& eff, const SnrPoint& snr,
                               NominalNoiseModel model) {
    const int N = static_cast<int>(eff.psi.rows());
    Eigen::PartialPivLU<CMat> lu(eff.psi_hat);
    const CMat V = lu.inverse();
    if (!V.allFinite() || !(eff.psi_hat.norm() * V.norm() < 1e12))
        throw singular_effective_matrix_error("zf_rate_cfo_nominal: nominal matrix is singular");
    const CMat T = V * eff.psi;
    RVec sinr(N);
    for (int n = 0; n < N; ++n) {
        const double sig = std::norm(T(n, n));
        const double intf = T.row(n).squaredNorm() - sig;
        const double vrow = (model == NominalNoiseModel::row_norm) ? V.row(n).squaredNorm()
                                                                   : std::norm(V(n, n));
        sinr[n] = sig * snr.Ps / (intf * snr.Ps + vrow * snr.sigma2);
    }
    return report_from_flat_sinr(eff, sinr);
}

// ---------------------------------------------------------------------------
// Fast mean-rate evaluator
// ---------------------------------------------------------------------------

CfoMeanRateEvaluator::CfoMeanRateEvaluator(const GfdmConfig& cfg, SnrPoint snr,
                                           NominalNoiseModel model, std::vector<UplinkDraw> draws,
                                           CfoConvention conv)
    : cfg_(cfg), snr_(snr), model_(model) {
    const int K = cfg.K, N = cfg.N();
    symbols_.reserve(draws.size());
    lambdas_.reserve(draws.size());
    for (const UplinkDraw& d : draws) {
        if (d.cfo.eps.size() != K || static_cast<int>(d.channels.lambda.size()) != K)
            throw invalid_dimension_error("CfoMeanRateEvaluator: draw dimension mismatch");
        std::vector<CVec> syms;
        syms.reserve(K);
        for (int k = 0; k < K; ++k) syms.push_back(cfo_circulant_symbol(N, d.cfo.eps[k], conv));
        symbols_.push_back(std::move(syms));
        lambdas_.push_back(d.channels.lambda);
    }
}

double CfoMeanRateEvaluator::draw_rate(const FilterSpec& filter, int draw) const {
    return draw_rate_impl(filter, draw, nullptr);
}

double CfoMeanRateEvaluator::mean_rate(const FilterSpec& filter) const {
    double acc = 0.0;
    for (int d = 0; d < num_draws(); ++d) acc += draw_rate_impl(filter, d, nullptr);
    return acc / num_draws();
}

double CfoMeanRateEvaluator::mean_rate_grad(const FilterSpec& filter, RVec& grad) const {
    const int M = cfg_.M;
    CVec gamma_bar = CVec::Zero(2 * M);
    double acc = 0.0;
    for (int d = 0; d < num_draws(); ++d) acc += draw_rate_impl(filter, d, &gamma_bar);
    gamma_bar /= static_cast<double>(num_draws());
    grad.resize(4 * M);
    grad.head(2 * M) = gamma_bar.real();
    grad.tail(2 * M) = gamma_bar.imag();
    return acc / num_draws();
}

double CfoMeanRateEvaluator::draw_rate_impl(const FilterSpec& filter, int draw,
                                            CVec* gamma_bar) const {
    const int K = cfg_.K, M = cfg_.M, N = cfg_.N();
    const double Ps = snr_.Ps, sigma2 = snr_.sigma2;
    const std::vector<CVec>& sym = symbols_[draw];
    const std::vector<CVec>& lam = lambdas_[draw];
    const CVec& g = filter.gamma;

    auto wrap = [N](int x) { return ((x % N) + N) % N; };

    // Per-bin nominal blocks S_q (K x K) and their inverses.
    std::vector<CMat> S(M), iS(M);
    for (int q = 0; q < M; ++q) {
        CMat s = CMat::Zero(K, K);
        for (int c = 0; c < K; ++c) {
            const int cf = c * M, cr = ((c - 1 + K) % K) * M;
            s(c, c) += lam[c][cf + q] * g[q];
            s((c - 1 + K) % K, c) += lam[c][cr + q] * g[M + q];
        }
        Eigen::PartialPivLU<CMat> lu(s);
        CMat inv = lu.inverse();
        if (!inv.allFinite() || !(s.norm() * inv.norm() < 1e12))
            throw singular_effective_matrix_error("CfoMeanRateEvaluator: singular nominal block");
        S[q] = std::move(s);
        iS[q] = std::move(inv);
    }

    // X = [D_k Lambda_k P_k Gamma R]_k, column (k, q).
    CMat X(N, N);
    for (int k = 0; k < K; ++k) {
        const int kf = k * M, kr = ((k - 1 + K) % K) * M;
        const CVec& c = sym[k];
        for (int q = 0; q < M; ++q) {
            const cplx a = g[q] * lam[k][kf + q];
            const cplx b = g[M + q] * lam[k][kr + q];
            cplx* col = X.col(k * M + q).data();
            for (int r = 0; r < N; ++r)
                col[r] = a * c[wrap(r - kf - q)] + b * c[wrap(r - kr - q)];
        }
    }

    // Y = S^{-1} X, mixing the K rows that share each bin offset q.
    CMat Y(N, N), rows(K, N), mixed(K, N);
    for (int q = 0; q < M; ++q) {
        for (int p = 0; p < K; ++p) rows.row(p) = X.row(p * M + q);
        mixed.noalias() = iS[q] * rows;
        for (int p = 0; p < K; ++p) Y.row(p * M + q) = mixed.row(p);
    }

    // Subsymbol-domain SINRs per user block.
    const double ln2 = std::log(2.0);
    double rate = 0.0;

    CMat Ybar;
    std::vector<CMat> iSbar;
    if (gamma_bar) {
        Ybar = CMat::Zero(N, N);
        iSbar.assign(M, CMat::Zero(K, K));
    }

    CMat H(M, M), Hbar(M, M);
    CVec sH(M), sB(2 * M - 1), sBbar(2 * M - 1);
    RVec row_norm(M);
    CVec t_diag(M);
    for (int kp = 0; kp < K; ++kp) {
        const auto Yk = Y.middleRows(kp * M, M);
        H.setZero();
        H.selfadjointView<Eigen::Lower>().rankUpdate(Yk);

        // diagonal sums (lower half; H is Hermitian)
        for (int d = 0; d < M; ++d) {
            cplx acc = 0.0;
            for (int q = d; q < M; ++q) acc += H(q, q - d);
            sH[d] = acc;
        }
        // B = Y block (kp, kp): full range of diagonal sums
        const auto B = Y.block(kp * M, kp * M, M, M);
        for (int d = -(M - 1); d <= M - 1; ++d) {
            cplx acc = 0.0;
            for (int q = std::max(0, d); q < std::min(M, M + d); ++q) acc += B(q, q - d);
            sB[d + M - 1] = acc;
        }
        for (int m = 0; m < M; ++m) {
            double rn = sH[0].real();
            cplx tn = sB[M - 1];
            for (int d = 1; d < M; ++d) {
                const cplx w = cis(2.0 * pi * m * d / M);
                rn += 2.0 * (w * sH[d]).real();
                tn += w * sB[M - 1 + d] + std::conj(w) * sB[M - 1 - d];
            }
            row_norm[m] = rn / M;
            t_diag[m] = tn / static_cast<double>(M);
        }

        // noise terms
        double noise_shared = 0.0;
        if (model_ == NominalNoiseModel::row_norm) {
            for (int q = 0; q < M; ++q) noise_shared += iS[q].row(kp).squaredNorm();
            noise_shared *= sigma2 / M;
        }

        if (gamma_bar) {
            Hbar.setZero();
            sBbar.setZero();
        }
        for (int m = 0; m < M; ++m) {
            const double s = std::norm(t_diag[m]);
            const double interference = row_norm[m] - s;
            const double nu = (model_ == NominalNoiseModel::row_norm)
                                  ? noise_shared
                                  : sigma2 / M * std::norm(iS[m](kp, kp));
            const double den = Ps * interference + nu;
            const double sinr = Ps * s / den;
            rate += std::log2(1.0 + sinr);

            if (!gamma_bar) continue;
            const double dRdS = 1.0 / ((1.0 + sinr) * ln2);
            const double dLds = dRdS * Ps * (Ps * row_norm[m] + nu) / (den * den);
            const double dLdrn = -dRdS * Ps * Ps * s / (den * den);
            const double dLdnu = -dRdS * Ps * s / (den * den);

            // into T_nn and the diagonal sums of B
            const cplx tbar = 2.0 * dLds * t_diag[m];
            for (int d = -(M - 1); d <= M - 1; ++d)
                sBbar[d + M - 1] += cis(-2.0 * pi * m * d / M) * tbar / static_cast<double>(M);
            // into H's diagonal sums
            for (int d = 0; d < M; ++d) {
                const cplx coeff = (d == 0) ? cplx(dLdrn / M, 0.0)
                                            : 2.0 * dLdrn / M * cis(-2.0 * pi * m * d / M);
                for (int q = d; q < M; ++q) Hbar(q, q - d) += coeff;
            }
            // noise adjoints
            if (model_ == NominalNoiseModel::row_norm) {
                const double w = dLdnu * 2.0 * sigma2 / M;
                for (int q = 0; q < M; ++q) iSbar[q].row(kp) += w * iS[q].row(kp);
            } else {
                iSbar[m](kp, kp) += dLdnu * 2.0 * sigma2 / M * iS[m](kp, kp);
            }
        }
        if (gamma_bar) {
            // Ybar_k += (Hbar + Hbar^H) * Y_k ; plus the B-block path
            CMat Hsym = Hbar + Hbar.adjoint();
            Ybar.middleRows(kp * M, M).noalias() += Hsym * Yk;
            auto Bbar = Ybar.block(kp * M, kp * M, M, M);
            for (int d = -(M - 1); d <= M - 1; ++d) {
                const cplx v = sBbar[d + M - 1];
                if (v == cplx(0.0, 0.0)) continue;
                for (int q = std::max(0, d); q < std::min(M, M + d); ++q) Bbar(q, q - d) += v;
            }
        }
    }

    if (!gamma_bar) return rate;

    // Backward through the per-bin solves: Xbar = iS^H Ybar, iSbar += Ybar X^H.
    CMat Xbar(N, N), rbar(K, N);
    for (int q = 0; q < M; ++q) {
        for (int p = 0; p < K; ++p) rbar.row(p) = Ybar.row(p * M + q);
        for (int p = 0; p < K; ++p) rows.row(p) = X.row(p * M + q);
        iSbar[q].noalias() += rbar * rows.adjoint();
        mixed.noalias() = iS[q].adjoint() * rbar;
        for (int p = 0; p < K; ++p) Xbar.row(p * M + q) = mixed.row(p);
    }

    // S_bar = -iS^H iSbar iS^H, then into gamma.
    for (int q = 0; q < M; ++q) {
        const CMat Sbar = -iS[q].adjoint() * iSbar[q] * iS[q].adjoint();
        for (int c = 0; c < K; ++c) {
            const int cf = c * M, cr = ((c - 1 + K) % K) * M;
            (*gamma_bar)[q] += std::conj(lam[c][cf + q]) * Sbar(c, c);
            (*gamma_bar)[M + q] += std::conj(lam[c][cr + q]) * Sbar((c - 1 + K) % K, c);
        }
    }

    // X path: column (k, q) was a*D_k(:,kf+q) + b*D_k(:,kr+q).
    for (int k = 0; k < K; ++k) {
        const int kf = k * M, kr = ((k - 1 + K) % K) * M;
        const CVec& c = sym[k];
        for (int q = 0; q < M; ++q) {
            const cplx* xb = Xbar.col(k * M + q).data();
            cplx dot_f = 0.0, dot_r = 0.0;
            for (int r = 0; r < N; ++r) {
                dot_f += std::conj(c[wrap(r - kf - q)]) * xb[r];
                dot_r += std::conj(c[wrap(r - kr - q)]) * xb[r];
            }
            (*gamma_bar)[q] += std::conj(lam[k][kf + q]) * dot_f;
            (*gamma_bar)[M + q] += std::conj(lam[k][kr + q]) * dot_r;
        }
    }
    return rate;
}

}  // namespace gfdm
