#pragma once

// Dense real matrix functions and the equation solvers used by the model
// transforms. Sizes are "desk scale" (n <= ~50): the Lyapunov solvers
// vectorize through Kronecker products and cost O(n^6).

#include "tslift/common.hpp"

#include <string>
#include <vector>

namespace tslift {

/// Symmetric matrix, stored in full. Construction checks
/// ||M - M'||_max <= tol * ||M||_max and then symmetrizes exactly.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(const Matrix& m, double tol = default_tolerances().sym);

    /// Symmetrizes without the tolerance check; for values that are
    /// symmetric by construction up to round-off.
    static SymMatrix from_symmetric_part(const Matrix& m);

    static SymMatrix zero(Eigen::Index dim) { return from_symmetric_part(Matrix::Zero(dim, dim)); }

    const Matrix& matrix() const noexcept { return m_; }
    operator const Matrix&() const noexcept { return m_; }
    Eigen::Index dim() const noexcept { return m_.rows(); }
    double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

    /// Eigenvalues in descending order.
    Vector eigenvalues() const;

private:
    Matrix m_;
};

struct PsdVerdict {
    bool is_psd = false;
    double min_eig = 0.0;
    double tolerance_used = 0.0;
};

enum class FactorWarning { RankAmbiguous };

struct RankFactor {
    Matrix factor;                      // dim x rank, columns by decreasing eigenvalue
    int rank = 0;
    std::vector<double> dropped_eigs;   // eigenvalues at or below the threshold
    std::vector<FactorWarning> warnings;
};

/// e^{F t} by scaling and squaring with a Pade approximant.
Matrix expm(const Matrix& f, double t = 1.0);

/// Principal logarithm. Throws SpectrumOnBranchCut for an eigenvalue on the
/// negative real axis and Singular for a (numerically) zero eigenvalue.
Matrix logm_principal(const Matrix& a);

/// Principal q-th root, computed as expm(logm_principal(A) / q).
Matrix rootq_principal(const Matrix& a, int q);

/// Throws unless every eigenvalue of `a` lies off the closed negative real axis.
void require_principal_branch(const Matrix& a);

/// P with F P + P F' + W = 0. F must be Hurwitz.
SymMatrix lyap_ct(const Matrix& f, const SymMatrix& w);

/// P with P = A P A' + W. A must be Schur stable.
SymMatrix lyap_dt(const Matrix& a, const SymMatrix& w);

/// Q = int_0^h e^{F s} G G' e^{F' s} ds, via one exponential of the
/// block matrix [[-F, GG'], [0, F']] h.
SymMatrix noise_gramian(const Matrix& f, const Matrix& g, double h);

/// tol <= 0 selects dim * ||M||_2 * 1e-10.
PsdVerdict psd_check(const SymMatrix& m, double tol = 0.0);

/// Full-column-rank L with L L' ~ M; throws NotPsd when psd_check fails.
RankFactor psd_rank_factor(const SymMatrix& m, double rank_tol = default_tolerances().rank,
                           double psd_tol = 0.0);

/// Symmetric PSD square root (negative round-off eigenvalues clamped to 0).
Matrix psd_sqrt(const SymMatrix& m);

int numerical_rank(const Matrix& m, double rank_tol = default_tolerances().rank);
int numerical_rank(const CMatrix& m, double rank_tol = default_tolerances().rank);

bool all_finite(const Matrix& m);
double max_abs(const Matrix& m);

/// Largest real part of the spectrum.
double spectral_abscissa(const Matrix& m);
double spectral_radius(const Matrix& m);

}  // namespace tslift
