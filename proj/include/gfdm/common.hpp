#ifndef GFDM_COMMON_HPP
#define GFDM_COMMON_HPP

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gfdm {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr double pi = 3.14159265358979323846;
inline const cplx iota{0.0, 1.0};

/// e^{i*phase} without going through std::polar's magnitude argument.
inline cplx cis(double phase) { return {std::cos(phase), std::sin(phase)}; }

struct invalid_dimension_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct singular_filter_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct singular_channel_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct singular_effective_matrix_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct nonconvergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Deterministic random stream. Wraps mt19937_64 but maps bits to doubles
/// itself so that results do not depend on the standard library's
/// distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (always consumes two draws).
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
    }

    /// Circularly symmetric complex normal, unit variance (CN(0,1)).
    cplx cnormal() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-std::log(u1));
        return r * cis(2.0 * pi * u2);
    }

    CVec cnormal_vector(Eigen::Index n) {
        CVec v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = cnormal();
        return v;
    }

private:
    std::mt19937_64 eng_;
};

/// FNV-1a over a byte string; used for provenance hashes in CLI output.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace gfdm

#endif
