#pragma once

#include "mdisc/common.hpp"

namespace mdisc::la {

// Cholesky factor of a symmetric positive-definite matrix, together with the
// jitter that had to be added to the diagonal to make the factorisation succeed.
class SymmetricPD {
public:
    SymmetricPD(Matrix a, Matrix l, double jitter)
        : a_(std::move(a)), l_(std::move(l)), jitter_(jitter) {}

    const Matrix& matrix() const { return a_; }
    const Matrix& factor() const { return l_; }
    double jitter() const { return jitter_; }
    int dim() const { return static_cast<int>(a_.rows()); }

    Matrix reconstruct() const { return l_ * l_.transpose(); }

    Vector solve(const Vector& b) const;
    Matrix solve(const Matrix& b) const;
    double log_det() const;

private:
    Matrix a_;  // payload including jitter
    Matrix l_;
    double jitter_;
};

// Factors a + jI for the smallest jitter j in {0, 1e-10, 1e-8, ..., max_jitter}
// that yields a successful Cholesky with strictly positive pivots.
// Throws NotPositiveDefinite when the whole ladder fails.
SymmetricPD cholesky_with_jitter(const Matrix& a, double max_jitter);

bool is_symmetric(const Matrix& a, double rel_tol = 1e-10);
Matrix symmetrize(const Matrix& a);

// erf(result) = p to ~1e-15; DomainError for |p| >= 1.
double inverse_error_function(double p);

// 1 - CDF of the chi-squared distribution with dof degrees of freedom at x.
double chi2_survival(double x, int dof);

// Regularised incomplete gamma functions, exposed for tests.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Draws from N(mean, cov). cov only needs to be symmetric PSD; the square root
// comes from an eigendecomposition with negative eigenvalues clamped to zero.
Vector mvn_sample(Rng& rng, const Vector& mean, const Matrix& cov);

// Precomputed PSD square root for repeated sampling with the same covariance.
class MvnSampler {
public:
    explicit MvnSampler(const Matrix& cov);
    Vector sample(Rng& rng, const Vector& mean) const;
    bool is_zero() const { return zero_; }

private:
    Matrix root_;
    bool zero_ = false;
};

}  // namespace mdisc::la
