#include "gfdm/filters.hpp"

namespace gfdm {

FilterSpec dirichlet_filter(int M) {
    if (M < 1) throw invalid_dimension_error("dirichlet_filter: M must be >= 1");
    CVec g = CVec::Zero(2 * M);
    g.head(M).setOnes();
    return FilterSpec(M, std::move(g));
}

namespace {

// RC magnitude response with symbol period Ts, evaluated at frequency
// x/Ts (x dimensionless).
double rc_response(double x, double alpha) {
    const double ax = std::abs(x);
    const double lo = 0.5 * (1.0 - alpha);
    const double hi = 0.5 * (1.0 + alpha);
    if (ax <= lo) return 1.0;
    if (ax >= hi) return 0.0;
    return 0.5 * (1.0 + std::cos(pi / alpha * (ax - lo)));
}

}  // namespace

FilterSpec raised_cosine_filter(int M, double alpha, bool square_root) {
    if (M < 1) throw invalid_dimension_error("raised_cosine_filter: M must be >= 1");
    if (alpha < 0.0 || alpha > 1.0)
        throw std::domain_error("raised_cosine_filter: alpha must be in [0, 1]");

    if (alpha == 0.0) return dirichlet_filter(M);  // brick wall

    const double c = 0.5 * (M - 1);  // center bin
    CVec g(2 * M);
    for (int j = 0; j < 2 * M; ++j) {
        const double kj = (j < M) ? j : j - 2 * M;  // signed bin index
        const double x = (kj - c) / M;              // frequency in units of 1/Ts
        double a = rc_response(x, alpha);
        if (square_root) a = std::sqrt(a);
        g[j] = a;
    }
    g *= std::sqrt(static_cast<double>(M) / g.squaredNorm());
    return FilterSpec(M, std::move(g));
}

}  // namespace gfdm
