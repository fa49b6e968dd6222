#include "gfdm/model.hpp"

namespace gfdm {

CMat ModulationMatrix::subcarrier_map(int k) const {
    const int M = cfg.M, N = cfg.N(), K = cfg.K;
    CMat P = CMat::Zero(N, 2 * M);
    const int kf = k * M;
    const int kr = ((k - 1 + K) % K) * M;
    for (int q = 0; q < M; ++q) {
        P(kf + q, q) = 1.0;
        P(kr + q, M + q) = 1.0;
    }
    return P;
}

CMat ModulationMatrix::filter_factor() const {
    const int M = cfg.M;
    CMat F(2 * M, M);
    F.topRows(M) = filter.gamma.head(M).asDiagonal() * W_M;
    F.bottomRows(M) = filter.gamma.tail(M).asDiagonal() * W_M;
    return F;
}

CMat filter_block_eigenvalues(const FilterSpec& filter, int K) {
    const int M = filter.M;
    CMat d(K, M);
    for (int l = 0; l < K; ++l) {
        const cplx dl = cis(2.0 * pi * l / K);
        for (int q = 0; q < M; ++q) d(l, q) = filter.gamma[q] + dl * filter.gamma[M + q];
    }
    return d;
}

void require_invertible(const CMat& block_eigs, int M) {
    const double thresh = 1e-12 * std::sqrt(static_cast<double>(M));
    if ((block_eigs.cwiseAbs().array() < thresh).any())
        throw singular_filter_error("filter has a vanishing block eigenvalue; ZF does not exist");
}

ModulationMatrix modulation_matrix(const GfdmConfig& cfg, const FilterSpec& filter) {
    if (filter.M != cfg.M)
        throw invalid_dimension_error("modulation_matrix: filter length does not match config");
    const int K = cfg.K, M = cfg.M, N = cfg.N();

    ModulationMatrix mm;
    mm.cfg = cfg;
    mm.filter = filter;
    mm.W_M = dft_matrix(M);
    mm.W_N = dft_matrix(N);

    // P * diag(F,...,F): column block k puts Gamma^(f) W_M on bin block k and
    // Gamma^(r) W_M on bin block k-1.
    CMat big = CMat::Zero(N, N);
    for (int k = 0; k < K; ++k) {
        const int kf = k * M;
        const int kr = ((k - 1 + K) % K) * M;
        big.block(kf, k * M, M, M) = filter.gamma.head(M).asDiagonal() * mm.W_M;
        big.block(kr, k * M, M, M) = filter.gamma.tail(M).asDiagonal() * mm.W_M;
    }
    mm.Phi = mm.W_N.adjoint() * big;
    return mm;
}

CVec modulate(const GfdmConfig& cfg, const FilterSpec& filter, const DataSymbols& data) {
    if (filter.M != cfg.M)
        throw invalid_dimension_error("modulate: filter length does not match config");
    if (data.s.size() != cfg.N())
        throw invalid_dimension_error("modulate: data vector must have length N");
    const int K = cfg.K, M = cfg.M, N = cfg.N();

    const CMat W_M = dft_matrix(M);
    CVec bins = CVec::Zero(N);
    for (int k = 0; k < K; ++k) {
        const CVec t = W_M * data.s.segment(k * M, M);
        const int kf = k * M;
        const int kr = ((k - 1 + K) % K) * M;
        for (int q = 0; q < M; ++q) {
            bins[kf + q] += filter.gamma[q] * t[q];
            bins[kr + q] += filter.gamma[M + q] * t[q];
        }
    }
    return ifft_unitary(bins);
}

CVec time_domain_filter(const GfdmConfig& cfg, const FilterSpec& filter) {
    if (filter.M != cfg.M)
        throw invalid_dimension_error("time_domain_filter: filter length does not match config");
    const int K = cfg.K, M = cfg.M, N = cfg.N();
    const double scale = 1.0 / (std::sqrt(static_cast<double>(K)) * M);
    CVec g(N);
    for (int n = 0; n < N; ++n) {
        const cplx rear_phase = cis(-2.0 * pi * n / K);
        cplx acc = 0.0;
        for (int q = 0; q < M; ++q)
            acc += cis(2.0 * pi * n * q / N) * (filter.gamma[q] + rear_phase * filter.gamma[M + q]);
        g[n] = scale * acc;
    }
    return g;
}

CVec add_cp_suffix(const CVec& x, const GfdmConfig& cfg) {
    if (x.size() != cfg.N()) throw invalid_dimension_error("add_cp_suffix: |x| must be N");
    cfg.validate();  // rejects Nw >= Ncp > 0 combinations
    CVec y(cfg.Ncp + cfg.N() + cfg.Nw);
    y.head(cfg.Ncp) = x.tail(cfg.Ncp);
    y.segment(cfg.Ncp, cfg.N()) = x;
    y.tail(cfg.Nw) = x.head(cfg.Nw);
    return y;
}

CVec remove_cp(const CVec& y, const GfdmConfig& cfg) {
    if (y.size() != cfg.Ncp + cfg.N() + cfg.Nw)
        throw invalid_dimension_error("remove_cp: |y| must be Ncp + N + Nw");
    return y.segment(cfg.Ncp, cfg.N());
}

}  // namespace gfdm
