#include "mdisc/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

namespace mdisc {

int hardware_threads() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

void parallel_for(int n, const std::function<void(int)>& fn, int n_threads) {
    if (n <= 0) return;
    n_threads = std::min(std::max(n_threads, 1), n);
    if (n_threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    std::exception_ptr first_error;
    std::mutex err_mutex;
    for (int t = 0; t < n_threads; ++t) {
        pool.emplace_back([&, t]() {
            try {
                for (int i = t; i < n; i += n_threads) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace mdisc

namespace mdisc::la {

bool is_symmetric(const Matrix& a, double rel_tol) {
    if (a.rows() != a.cols()) return false;
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    return (a - a.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

Vector SymmetricPD::solve(const Vector& b) const {
    Vector x = l_.triangularView<Eigen::Lower>().solve(b);
    return l_.transpose().triangularView<Eigen::Upper>().solve(x);
}

Matrix SymmetricPD::solve(const Matrix& b) const {
    Matrix x = l_.triangularView<Eigen::Lower>().solve(b);
    return l_.transpose().triangularView<Eigen::Upper>().solve(x);
}

double SymmetricPD::log_det() const {
    double s = 0.0;
    for (int i = 0; i < l_.rows(); ++i) s += std::log(l_(i, i));
    return 2.0 * s;
}

namespace {

// In-place lower Cholesky with a strict positive-pivot check; Eigen's LLT
// tolerates marginally indefinite matrices, which the jitter ladder must not.
bool try_cholesky(const Matrix& a, Matrix& l) {
    const int n = static_cast<int>(a.rows());
    l = a;
    for (int j = 0; j < n; ++j) {
        double d = l(j, j);
        for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        const double lj = std::sqrt(d);
        l(j, j) = lj;
        for (int i = j + 1; i < n; ++i) {
            double s = l(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / lj;
        }
    }
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < j; ++i) l(i, j) = 0.0;
    return true;
}

}  // namespace

SymmetricPD cholesky_with_jitter(const Matrix& a, double max_jitter) {
    require(a.rows() == a.cols(), "cholesky_with_jitter: matrix must be square");
    if (max_jitter < 0.0) throw DomainError("cholesky_with_jitter: max_jitter must be >= 0");
    if (!is_symmetric(a))
        throw DimensionError("cholesky_with_jitter: matrix is not symmetric");

    const int n = static_cast<int>(a.rows());
    Matrix l(n, n);
    double jitter = 0.0;
    while (true) {
        Matrix aj = a;
        aj.diagonal().array() += jitter;
        if (try_cholesky(aj, l)) return SymmetricPD(std::move(aj), std::move(l), jitter);
        if (jitter >= max_jitter) break;
        jitter = (jitter == 0.0) ? 1e-10 : jitter * 100.0;
        if (jitter > max_jitter) jitter = max_jitter;
    }
    throw NotPositiveDefinite("cholesky_with_jitter: not positive definite up to max_jitter");
}

double inverse_error_function(double p) {
    if (!(std::abs(p) < 1.0))
        throw DomainError("inverse_error_function: argument must be in (-1, 1)");
    if (p == 0.0) return 0.0;

    // Giles-style initial estimate, then Newton on erf to full double precision.
    double w = -std::log((1.0 - p) * (1.0 + p));
    double x;
    if (w < 6.25) {
        w -= 3.125;
        x = -3.6444120640178196996e-21;
        x = -1.685059138182016589e-19 + x * w;
        x = 1.2858480715256400167e-18 + x * w;
        x = 1.115787767802518096e-17 + x * w;
        x = -1.333171662854620906e-16 + x * w;
        x = 2.0972767875968561637e-17 + x * w;
        x = 6.6376381343583238325e-15 + x * w;
        x = -4.0545662729752068639e-14 + x * w;
        x = -8.1519341976054721522e-14 + x * w;
        x = 2.6335093153082322977e-12 + x * w;
        x = -1.2975133253453532498e-11 + x * w;
        x = -5.4154120542946279317e-11 + x * w;
        x = 1.051212273321532285e-09 + x * w;
        x = -4.1126339803469836976e-09 + x * w;
        x = -2.9070369957882005086e-08 + x * w;
        x = 4.2347877827932403518e-07 + x * w;
        x = -1.3654692000834678645e-06 + x * w;
        x = -1.3882523362786468719e-05 + x * w;
        x = 0.0001867342080340571352 + x * w;
        x = -0.00074070253416626697512 + x * w;
        x = -0.0060336708714301490533 + x * w;
        x = 0.24015818242558961693 + x * w;
        x = 1.6536545626831027356 + x * w;
    } else if (w < 16.0) {
        w = std::sqrt(w) - 3.25;
        x = 2.2137376921775787049e-09;
        x = 9.0756561938885390979e-08 + x * w;
        x = -2.7517406297064545428e-07 + x * w;
        x = 1.8239629214389227755e-08 + x * w;
        x = 1.5027403968909827627e-06 + x * w;
        x = -4.013867526981545969e-06 + x * w;
        x = 2.9234449089955446044e-06 + x * w;
        x = 1.2475304481671778723e-05 + x * w;
        x = -4.7318229009055733981e-05 + x * w;
        x = 6.8284851459573175448e-05 + x * w;
        x = 2.4031110387097893999e-05 + x * w;
        x = -0.0003550375203628474796 + x * w;
        x = 0.00095328937973738049703 + x * w;
        x = -0.0016882755560235047313 + x * w;
        x = 0.0024914420961078508066 + x * w;
        x = -0.0037512085075692412107 + x * w;
        x = 0.005370914553590063617 + x * w;
        x = 1.0052589676941592334 + x * w;
        x = 3.0838856104922207635 + x * w;
    } else {
        w = std::sqrt(w) - 5.0;
        x = -2.7109920616438573243e-11;
        x = -2.5556418169965252055e-10 + x * w;
        x = 1.5076572693500548083e-09 + x * w;
        x = -3.7894654401267369937e-09 + x * w;
        x = 7.6157012080783393804e-09 + x * w;
        x = -1.4960026627149240478e-08 + x * w;
        x = 2.9147953450901080826e-08 + x * w;
        x = -6.7711997758452339498e-08 + x * w;
        x = 2.2900482228026654717e-07 + x * w;
        x = -9.9298272942317002539e-07 + x * w;
        x = 4.5260625972231537039e-06 + x * w;
        x = -1.9681778105531670567e-05 + x * w;
        x = 7.5995277030017761139e-05 + x * w;
        x = -0.00021503011930044477347 + x * w;
        x = -0.00013871931833623122026 + x * w;
        x = 1.0103004648645343977 + x * w;
        x = 4.8499064014085844221 + x * w;
    }
    x *= p;

    // Two Newton iterations: f(x) = erf(x) - p, f'(x) = 2/sqrt(pi) exp(-x^2).
    constexpr double two_over_sqrt_pi = 1.1283791670955125739;
    for (int it = 0; it < 2; ++it) {
        const double err = std::erf(x) - p;
        x -= err / (two_over_sqrt_pi * std::exp(-x * x));
    }
    return x;
}

namespace {

double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
    // Lentz's algorithm on the continued-fraction representation of Q(a, x).
    const double tiny = std::numeric_limits<double>::min() * 1e10;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw DomainError("gamma_p: requires x >= 0, a > 0");
    if (x == 0.0) return 0.0;
    return (x < a + 1.0) ? gamma_p_series(a, x) : 1.0 - gamma_q_contfrac(a, x);
}

double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw DomainError("gamma_q: requires x >= 0, a > 0");
    if (x == 0.0) return 1.0;
    return (x < a + 1.0) ? 1.0 - gamma_p_series(a, x) : gamma_q_contfrac(a, x);
}

double chi2_survival(double x, int dof) {
    if (dof < 1) throw DomainError("chi2_survival: dof must be >= 1");
    if (x < 0.0) throw DomainError("chi2_survival: x must be >= 0");
    return gamma_q(0.5 * dof, 0.5 * x);
}

MvnSampler::MvnSampler(const Matrix& cov) {
    require(cov.rows() == cov.cols(), "MvnSampler: covariance must be square");
    if (!is_symmetric(cov, 1e-8))
        throw DimensionError("MvnSampler: covariance is not symmetric");
    const int n = static_cast<int>(cov.rows());
    if (cov.cwiseAbs().maxCoeff() == 0.0) {
        zero_ = true;
        root_ = Matrix::Zero(n, n);
        return;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(cov));
    Vector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    root_ = es.eigenvectors() * ev.asDiagonal();
}

Vector MvnSampler::sample(Rng& rng, const Vector& mean) const {
    if (zero_) return mean;
    return mean + root_ * rng.normal_vec(static_cast<int>(root_.cols()));
}

Vector mvn_sample(Rng& rng, const Vector& mean, const Matrix& cov) {
    require(mean.size() == cov.rows(), "mvn_sample: mean/cov dimension mismatch");
    return MvnSampler(cov).sample(rng, mean);
}

}  // namespace mdisc::la
