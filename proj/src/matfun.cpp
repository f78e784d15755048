#include "tslift/matfun.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tslift {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonSquare: return "NonSquare";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::NotSymmetric: return "NotSymmetric";
        case ErrorCode::SpectrumOnBranchCut: return "SpectrumOnBranchCut";
        case ErrorCode::Singular: return "Singular";
        case ErrorCode::Unstable: return "Unstable";
        case ErrorCode::IllConditioned: return "IllConditioned";
        case ErrorCode::NotPsd: return "NotPsd";
        case ErrorCode::NoInvertiblePartition: return "NoInvertiblePartition";
        case ErrorCode::DeltaSingular: return "DeltaSingular";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

namespace {

void require_square(const Matrix& m, const char* name) {
    if (m.rows() != m.cols()) {
        std::ostringstream os;
        os << name << " is " << m.rows() << "x" << m.cols();
        throw Error(ErrorCode::NonSquare, os.str());
    }
}

void require_finite(const Matrix& m, const char* name) {
    if (!all_finite(m)) throw Error(ErrorCode::NonFinite, std::string(name) + " has NaN/Inf entries");
}

Eigen::VectorXcd eigenvalues_of(const Matrix& m) {
    if (m.size() == 0) return Eigen::VectorXcd();
    Eigen::EigenSolver<Matrix> es(m, false);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "eigenvalue iteration failed");
    return es.eigenvalues();
}

}  // namespace

bool all_finite(const Matrix& m) { return m.allFinite(); }

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double spectral_abscissa(const Matrix& m) {
    const auto ev = eigenvalues_of(m);
    double out = -std::numeric_limits<double>::infinity();
    for (const auto& l : ev) out = std::max(out, l.real());
    return out;
}

double spectral_radius(const Matrix& m) {
    const auto ev = eigenvalues_of(m);
    double out = 0.0;
    for (const auto& l : ev) out = std::max(out, std::abs(l));
    return out;
}

// ---------------------------------------------------------------- SymMatrix

SymMatrix::SymMatrix(const Matrix& m, double tol) {
    require_square(m, "symmetric matrix");
    require_finite(m, "symmetric matrix");
    const double scale = max_abs(m);
    const double asym = max_abs(m - m.transpose());
    if (asym > tol * scale) {
        std::ostringstream os;
        os << "asymmetry " << asym << " exceeds " << tol << " * " << scale;
        throw Error(ErrorCode::NotSymmetric, os.str());
    }
    m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::from_symmetric_part(const Matrix& m) {
    require_square(m, "symmetric matrix");
    SymMatrix out;
    out.m_ = 0.5 * (m + m.transpose());
    return out;
}

Vector SymMatrix::eigenvalues() const {
    if (m_.size() == 0) return Vector();
    Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().reverse();
}

// --------------------------------------------------------- matrix functions

Matrix expm(const Matrix& f, double t) {
    require_square(f, "F");
    require_finite(f, "F");
    if (!std::isfinite(t)) throw Error(ErrorCode::InvalidArgument, "t must be finite");
    if (t == 0.0 || f.size() == 0) return Matrix::Identity(f.rows(), f.cols());
    Matrix scaled = f * t;
    return scaled.exp();
}

void require_principal_branch(const Matrix& a) {
    require_square(a, "A");
    require_finite(a, "A");
    const auto ev = eigenvalues_of(a);
    double scale = 0.0;
    for (const auto& l : ev) scale = std::max(scale, std::abs(l));
    for (const auto& l : ev) {
        if (std::abs(l) <= 1e-14 * std::max(scale, 1e-300)) {
            throw Error(ErrorCode::Singular, "zero eigenvalue, no logarithm exists");
        }
        if (l.real() < 0.0 && std::abs(l.imag()) <= 1e-10 * std::abs(l)) {
            std::ostringstream os;
            os << "eigenvalue " << l.real() << " on the negative real axis";
            throw Error(ErrorCode::SpectrumOnBranchCut, os.str());
        }
    }
}

Matrix logm_principal(const Matrix& a) {
    require_principal_branch(a);
    if (a.size() == 0) return a;
    Matrix out = a.log();
    if (!all_finite(out)) throw Error(ErrorCode::Singular, "logarithm did not produce finite values");
    return out;
}

Matrix rootq_principal(const Matrix& a, int q) {
    if (q <= 0) throw Error(ErrorCode::InvalidArgument, "q must be positive");
    if (q == 1) {
        require_principal_branch(a);
        return a;
    }
    return expm(logm_principal(a), 1.0 / q);
}

// ------------------------------------------------------------------ Lyapunov

namespace {

void check_pairs(const Eigen::VectorXcd& ev, bool discrete) {
    double scale = 1.0;
    for (const auto& l : ev) scale = std::max(scale, std::abs(l));
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        for (Eigen::Index j = i; j < ev.size(); ++j) {
            const double gap = discrete ? std::abs(1.0 - ev(i) * ev(j)) : std::abs(ev(i) + ev(j));
            if (gap <= 1e-12 * scale * scale) {
                throw Error(ErrorCode::IllConditioned, "eigenvalue pair makes the Lyapunov operator singular");
            }
        }
    }
}

SymMatrix solve_vectorized(const Matrix& op, const Matrix& rhs, Eigen::Index n) {
    Vector vec_rhs = Eigen::Map<const Vector>(rhs.data(), n * n);
    Vector x = op.partialPivLu().solve(vec_rhs);
    if (!x.allFinite()) throw Error(ErrorCode::IllConditioned, "Lyapunov solve produced non-finite values");
    return SymMatrix::from_symmetric_part(Eigen::Map<Matrix>(x.data(), n, n));
}

}  // namespace

SymMatrix lyap_ct(const Matrix& f, const SymMatrix& w) {
    require_square(f, "F");
    require_finite(f, "F");
    const Eigen::Index n = f.rows();
    if (w.dim() != n) throw Error(ErrorCode::DimensionMismatch, "W must match F");
    if (n == 0) return w;
    const auto ev = eigenvalues_of(f);
    for (const auto& l : ev) {
        if (l.real() >= 0.0) throw Error(ErrorCode::Unstable, "F has an eigenvalue with nonnegative real part");
    }
    check_pairs(ev, false);
    const Matrix id = Matrix::Identity(n, n);
    // vec(F P + P F') = (I (x) F + F (x) I) vec(P)
    const Matrix op = Eigen::kroneckerProduct(id, f) + Eigen::kroneckerProduct(f, id);
    return solve_vectorized(op, -w.matrix(), n);
}

SymMatrix lyap_dt(const Matrix& a, const SymMatrix& w) {
    require_square(a, "A");
    require_finite(a, "A");
    const Eigen::Index n = a.rows();
    if (w.dim() != n) throw Error(ErrorCode::DimensionMismatch, "W must match A");
    if (n == 0) return w;
    const auto ev = eigenvalues_of(a);
    for (const auto& l : ev) {
        if (std::abs(l) >= 1.0) throw Error(ErrorCode::Unstable, "A has an eigenvalue outside the open unit disc");
    }
    check_pairs(ev, true);
    const Matrix op = Matrix::Identity(n * n, n * n) - Eigen::kroneckerProduct(a, a);
    return solve_vectorized(op, w.matrix(), n);
}

SymMatrix noise_gramian(const Matrix& f, const Matrix& g, double h) {
    require_square(f, "F");
    const Eigen::Index n = f.rows();
    if (g.rows() != n) throw Error(ErrorCode::DimensionMismatch, "G must have as many rows as F");
    if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorCode::InvalidArgument, "h must be positive");
    Matrix block = Matrix::Zero(2 * n, 2 * n);
    block.topLeftCorner(n, n) = -f;
    block.topRightCorner(n, n) = g * g.transpose();
    block.bottomRightCorner(n, n) = f.transpose();
    const Matrix e = expm(block, h);
    // e = [[e^{-Fh}, e^{-Fh} Q], [0, e^{F'h}]]  =>  Q = (e^{F'h})' * e12
    const Matrix q = e.bottomRightCorner(n, n).transpose() * e.topRightCorner(n, n);
    return SymMatrix::from_symmetric_part(q);
}

// ----------------------------------------------------------------------- PSD

PsdVerdict psd_check(const SymMatrix& m, double tol) {
    PsdVerdict v;
    if (m.dim() == 0) {
        v.is_psd = true;
        return v;
    }
    const Vector ev = m.eigenvalues();
    const double norm2 = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
    v.tolerance_used = tol > 0.0 ? tol : static_cast<double>(m.dim()) * norm2 * 1e-10;
    v.min_eig = ev(ev.size() - 1);
    v.is_psd = v.min_eig >= -v.tolerance_used;
    return v;
}

RankFactor psd_rank_factor(const SymMatrix& m, double rank_tol, double psd_tol) {
    const PsdVerdict verdict = psd_check(m, psd_tol);
    if (!verdict.is_psd) {
        std::ostringstream os;
        os << "minimum eigenvalue " << verdict.min_eig << " below -" << verdict.tolerance_used;
        throw Error(ErrorCode::NotPsd, os.str());
    }
    RankFactor out;
    const Eigen::Index n = m.dim();
    if (n == 0) return out;
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.matrix());
    // ascending order from Eigen; walk it backwards
    const Vector& ev = es.eigenvalues();
    const double lmax = ev(n - 1);
    const double threshold = lmax > 0.0 ? rank_tol * lmax : 0.0;
    std::vector<Eigen::Index> kept;
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        const double l = ev(i);
        if (threshold > 0.0 && std::abs(l - threshold) <= 0.1 * threshold &&
            out.warnings.empty()) {
            out.warnings.push_back(FactorWarning::RankAmbiguous);
        }
        if (l > threshold && lmax > 0.0) {
            kept.push_back(i);
        } else {
            out.dropped_eigs.push_back(l);
        }
    }
    out.rank = static_cast<int>(kept.size());
    out.factor.resize(n, out.rank);
    for (int c = 0; c < out.rank; ++c) {
        Vector col = es.eigenvectors().col(kept[static_cast<size_t>(c)]) *
                     std::sqrt(ev(kept[static_cast<size_t>(c)]));
        const double cmax = col.cwiseAbs().maxCoeff();
        for (Eigen::Index r = 0; r < n; ++r) {
            if (std::abs(col(r)) > 1e-12 * cmax) {
                if (col(r) < 0.0) col = -col;
                break;
            }
        }
        out.factor.col(c) = col;
    }
    return out;
}

Matrix psd_sqrt(const SymMatrix& m) {
    if (m.dim() == 0) return Matrix();
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.matrix());
    const Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Matrix out = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
    return 0.5 * (out + out.transpose());
}

int numerical_rank(const Matrix& m, double rank_tol) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(m);
    const Vector& s = svd.singularValues();
    if (s(0) <= 0.0) return 0;
    return static_cast<int>((s.array() > rank_tol * s(0)).count());
}

int numerical_rank(const CMatrix& m, double rank_tol) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<CMatrix> svd(m);
    const Vector& s = svd.singularValues();
    if (s(0) <= 0.0) return 0;
    return static_cast<int>((s.array() > rank_tol * s(0)).count());
}

}  // namespace tslift
