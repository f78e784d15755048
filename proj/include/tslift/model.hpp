#pragma once

// Continuous and discrete Gauss-Markov models, their spectral densities and
// the input/output decomposition that exposes dynamic relations.

#include "tslift/matfun.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tslift {

/// dx = F x dt + G dw,  zeta = H x.
struct CtModel {
    Matrix F;  // n x n
    Matrix G;  // n x m
    Matrix H;  // p x n

    Eigen::Index states() const { return F.rows(); }
    Eigen::Index noise_dim() const { return G.cols(); }
    Eigen::Index outputs() const { return H.rows(); }
};

enum class Scale { Coarse, Fine };

/// x_{k+1} = A x_k + B v_k,  zeta_k = C x_k + D v_k, one index = `step` time units.
/// A fine-scale model (F, G, H, J) is stored in the same fields.
struct DtModel {
    Matrix A;  // n x n
    Matrix B;  // n x r
    Matrix C;  // p x n
    Matrix D;  // p x r
    double step = 1.0;
    Scale scale = Scale::Coarse;

    Eigen::Index states() const { return A.rows(); }
    Eigen::Index noise_dim() const { return B.cols(); }
    Eigen::Index outputs() const { return C.rows(); }
    bool has_feedthrough() const { return D.size() != 0 && D.cwiseAbs().maxCoeff() > 0.0; }
};

/// Realization C (sI - A)^{-1} B + D of a proper transfer matrix.
struct StateSpace {
    Matrix A;
    Matrix B;
    Matrix C;
    Matrix D;

    CMatrix evaluate(Complex s) const;
};

enum class ViolationKind {
    DimensionMismatch,
    NonFinite,
    Unstable,
    NotControllable,
    NotObservable,
    GNotFullRank,
    HGRankDeficient,
    BadStep,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    std::string detail;
};

std::vector<Violation> validate_ct(const CtModel& model, const Tolerances& tol = default_tolerances());
std::vector<Violation> validate_dt(const DtModel& model, const Tolerances& tol = default_tolerances());

/// PBH test: rank [lambda I - A, B] = n for every eigenvalue lambda of A.
bool is_controllable(const Matrix& a, const Matrix& b, double rank_tol = default_tolerances().rank);
bool is_observable(const Matrix& a, const Matrix& c, double rank_tol = default_tolerances().rank);

struct SpectrumSample {
    double frequency = 0.0;
    CMatrix density;
    int rank = 0;
};

/// Phi(i w) = V(i w) V(i w)^*, V(s) = H (sI - F)^{-1} G.
std::vector<SpectrumSample> spectrum_ct(const CtModel& model, const std::vector<double>& omegas,
                                        const Tolerances& tol = default_tolerances());

/// Psi(e^{i theta}) = W W^*, W(z) = C (zI - A)^{-1} B + D.
std::vector<SpectrumSample> spectrum_dt(const DtModel& model, const std::vector<double>& thetas,
                                        const Tolerances& tol = default_tolerances());

/// Psi(0) = W(0) W(inf)' = (D - C A^{-1} B) D'. Throws Singular when A is.
Matrix psi_at_zero(const DtModel& model);

CMatrix spectral_factor_ct(const CtModel& model, Complex s);
CMatrix spectral_factor_dt(const DtModel& model, Complex z);

/// zeta reordered as (u, y) with u = H0 x, y = H1 x and H0 G invertible.
/// Then V(s) = [I; T(s)] M(s) / s.
struct RelationDecomposition {
    std::vector<int> input_indices;   // rows of H forming u (0-based)
    std::vector<int> output_indices;  // remaining rows, forming y
    Matrix gamma;                     // F - G (H0 G)^{-1} H0 F
    StateSpace T;                     // (Gamma, G (H0 G)^{-1}, H1 Gamma, H1 G (H0 G)^{-1})
    StateSpace M;                     // (F, G, H0 F, H0 G)
    int relation_count = 0;           // p - m
};

/// `row_order_hint`, if given, is a permutation of 0..p-1 whose first m
/// entries are taken as the inputs.
RelationDecomposition decompose_relations(const CtModel& model,
                                          const std::optional<std::vector<int>>& row_order_hint = std::nullopt);

/// N(s) = H1 G + H1 F (sI - F)^{-1} G.
CMatrix relation_numerator(const RelationDecomposition& decomp, const CtModel& model, Complex s);

/// max over the grid of ||L(iw) Phi(iw)|| / ||Phi(iw)|| with L = (-T, I),
/// Phi reordered as (u, y).
double kernel_residual(const RelationDecomposition& decomp, const CtModel& model,
                       const std::vector<double>& omegas);

/// `count` points logarithmically spaced on [lo, hi].
std::vector<double> log_grid(double lo, double hi, int count);

}  // namespace tslift
