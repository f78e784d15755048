#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tslift {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

enum class ErrorCode {
    NonSquare,
    DimensionMismatch,
    NonFinite,
    NotSymmetric,
    SpectrumOnBranchCut,
    Singular,
    Unstable,
    IllConditioned,
    NotPsd,
    NoInvertiblePartition,
    DeltaSingular,
    NoConvergence,
    InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable code; all library failures use it.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Numerical tolerances shared by every module. All values are relative.
struct Tolerances {
    double sym = 1e-10;      // symmetry check for SymMatrix
    double fun = 1e-9;       // matrix-function identities, spectral checks
    double lyap = 1e-9;      // Lyapunov residuals
    double rank = 1e-8;      // rank threshold relative to the largest eigen/singular value
    double psd = 0.0;        // 0 selects dim * ||M||_2 * 1e-10
    double singular = 1e-13;  // sigma_min(B) / sigma_max(B) below this counts as det(BB') = 0
    double riccati = 1e-12;  // relative update size that stops the Riccati iteration
    int max_iter = 10000;
    double delta_cond = 1e12;  // Delta(Pi) with a larger condition number is treated as singular
};

inline const Tolerances& default_tolerances() {
    static const Tolerances tol{};
    return tol;
}

}  // namespace tslift
