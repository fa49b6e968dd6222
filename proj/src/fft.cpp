#include "gfdm/fft.hpp"

#include <unordered_map>

#include <unsupported/Eigen/FFT>

namespace gfdm {

CMat dft_matrix(int n) {
    if (n < 1) throw invalid_dimension_error("dft_matrix: n must be >= 1");
    CMat w(n, n);
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) w(j, k) = s * cis(-2.0 * pi * j * k / n);
    return w;
}

namespace {

Eigen::FFT<double>& plan() {
    thread_local Eigen::FFT<double> f;
    return f;
}

}  // namespace

CVec fft_unitary(const CVec& x) {
    CVec y(x.size());
    plan().fwd(y, x);
    return y / std::sqrt(static_cast<double>(x.size()));
}

CVec ifft_unitary(const CVec& x) {
    CVec y(x.size());
    plan().inv(y, x);  // Eigen scales the inverse by 1/n
    return y * std::sqrt(static_cast<double>(x.size()));
}

void fft_raw(CVec& x) {
    CVec y(x.size());
    plan().fwd(y, x);
    x.swap(y);
}

}  // namespace gfdm
