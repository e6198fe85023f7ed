#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace mdisc {

// Dense row-major matrices; dimensions always carried by the objects themselves.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
    using Error::Error;
};
struct DomainError : Error {
    using Error::Error;
};
struct NotPositiveDefinite : Error {
    using Error::Error;
};
struct FitFailure : Error {
    using Error::Error;
};
struct OptimFailure : Error {
    using Error::Error;
};
struct NonFiniteState : Error {
    using Error::Error;
};
struct NoFeasiblePoint : Error {
    using Error::Error;
};
struct SingularHessian : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};
struct BudgetExceeded : Error {
    using Error::Error;
};

struct BlackBoxFailure : Error {
    int row;
    explicit BlackBoxFailure(int r, const std::string& what) : Error(what), row(r) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw DimensionError(msg);
}

// Deterministic PRNG. Transforms are hand-rolled on top of mt19937_64 so that
// streams do not depend on the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t raw() { return gen_(); }

    // in [0, 1)
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        // Box-Muller; u1 > 0 guaranteed by the offset.
        const double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    Vector normal_vec(int n) {
        Vector v(n);
        for (int i = 0; i < n; ++i) v[i] = normal();
        return v;
    }

    // Independent stream derived from (seed, stream) via splitmix64 mixing.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 gen_;
};

// FNV-1a, used for config/control hashing in reports.
inline std::uint64_t fnv1a(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 1469598103934665603ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t fnv1a(const std::string& s) { return fnv1a(s.data(), s.size()); }

int hardware_threads();

// Runs fn(i) for i in [0, n). Results must be written to per-index slots by the
// caller; scheduling is chunked so output is independent of thread timing.
void parallel_for(int n, const std::function<void(int)>& fn, int n_threads);

}  // namespace mdisc
