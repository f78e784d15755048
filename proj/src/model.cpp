#include "tslift/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace tslift {

std::string_view to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::DimensionMismatch: return "DimensionMismatch";
        case ViolationKind::NonFinite: return "NonFinite";
        case ViolationKind::Unstable: return "Unstable";
        case ViolationKind::NotControllable: return "NotControllable";
        case ViolationKind::NotObservable: return "NotObservable";
        case ViolationKind::GNotFullRank: return "GNotFullRank";
        case ViolationKind::HGRankDeficient: return "HGRankDeficient";
        case ViolationKind::BadStep: return "BadStep";
    }
    return "Unknown";
}

namespace {

CMatrix resolvent_times(const Matrix& a, Complex s, const Matrix& b) {
    CMatrix shifted = -a.cast<Complex>();
    shifted.diagonal().array() += s;
    return shifted.partialPivLu().solve(b.cast<Complex>());
}

std::string describe_eig(Complex l) {
    std::ostringstream os;
    os << "eigenvalue " << l.real();
    if (l.imag() != 0.0) os << (l.imag() > 0 ? "+" : "") << l.imag() << "i";
    return os.str();
}

// Smallest of the first n singular values of [lambda I - A, B] relative to
// the scale of the pair.
bool pbh_full_rank(const Matrix& a, const Matrix& b, double rank_tol) {
    const Eigen::Index n = a.rows();
    if (n == 0) return true;
    if (b.cols() == 0) return false;
    Eigen::EigenSolver<Matrix> es(a, false);
    const double scale = std::max({max_abs(a), max_abs(b), 1e-300});
    for (const auto& l : es.eigenvalues()) {
        CMatrix pencil(n, n + b.cols());
        pencil.leftCols(n) = -a.cast<Complex>();
        pencil.leftCols(n).diagonal().array() += l;
        pencil.rightCols(b.cols()) = b.cast<Complex>();
        Eigen::JacobiSVD<CMatrix> svd(pencil);
        const auto& sv = svd.singularValues();
        if (sv.size() < n || sv(n - 1) <= rank_tol * scale) return false;
    }
    return true;
}

}  // namespace

CMatrix StateSpace::evaluate(Complex s) const {
    CMatrix out = D.cast<Complex>();
    if (A.rows() == 0) return out;
    out += C.cast<Complex>() * resolvent_times(A, s, B);
    return out;
}

bool is_controllable(const Matrix& a, const Matrix& b, double rank_tol) {
    return pbh_full_rank(a, b, rank_tol);
}

bool is_observable(const Matrix& a, const Matrix& c, double rank_tol) {
    return pbh_full_rank(a.transpose(), c.transpose(), rank_tol);
}

std::vector<Violation> validate_ct(const CtModel& model, const Tolerances& tol) {
    std::vector<Violation> out;
    const auto& [F, G, H] = model;
    const Eigen::Index n = F.rows();
    if (F.cols() != n || G.rows() != n || H.cols() != n || n == 0) {
        out.push_back({ViolationKind::DimensionMismatch, "expected F n x n, G n x m, H p x n with n > 0"});
        return out;
    }
    if (!all_finite(F) || !all_finite(G) || !all_finite(H)) {
        out.push_back({ViolationKind::NonFinite, "model has NaN/Inf entries"});
        return out;
    }
    Eigen::EigenSolver<Matrix> es(F, false);
    for (const auto& l : es.eigenvalues()) {
        if (l.real() >= 0.0) {
            out.push_back({ViolationKind::Unstable, describe_eig(l) + " has nonnegative real part"});
            break;
        }
    }
    if (!is_controllable(F, G, tol.rank)) out.push_back({ViolationKind::NotControllable, "(F, G) not controllable"});
    if (!is_observable(F, H, tol.rank)) out.push_back({ViolationKind::NotObservable, "(F, H) not observable"});
    const int rank_g = numerical_rank(G, tol.rank);
    if (rank_g < G.cols()) {
        std::ostringstream os;
        os << "rank(G) = " << rank_g << " < m = " << G.cols();
        out.push_back({ViolationKind::GNotFullRank, os.str()});
    } else {
        const int rank_hg = numerical_rank(Matrix(H * G), tol.rank);
        if (rank_hg < G.cols()) {
            std::ostringstream os;
            os << "rank(HG) = " << rank_hg << " < m = " << G.cols();
            out.push_back({ViolationKind::HGRankDeficient, os.str()});
        }
    }
    return out;
}

std::vector<Violation> validate_dt(const DtModel& model, const Tolerances& tol) {
    std::vector<Violation> out;
    const Eigen::Index n = model.A.rows();
    const Eigen::Index r = model.B.cols();
    const Eigen::Index p = model.C.rows();
    if (model.A.cols() != n || model.B.rows() != n || model.C.cols() != n || model.D.rows() != p ||
        model.D.cols() != r || n == 0) {
        out.push_back({ViolationKind::DimensionMismatch, "expected A n x n, B n x r, C p x n, D p x r with n > 0"});
        return out;
    }
    if (!all_finite(model.A) || !all_finite(model.B) || !all_finite(model.C) || !all_finite(model.D)) {
        out.push_back({ViolationKind::NonFinite, "model has NaN/Inf entries"});
        return out;
    }
    if (!(model.step > 0.0) || !std::isfinite(model.step)) {
        out.push_back({ViolationKind::BadStep, "step must be positive"});
    }
    Eigen::EigenSolver<Matrix> es(model.A, false);
    for (const auto& l : es.eigenvalues()) {
        if (std::abs(l) >= 1.0) {
            out.push_back({ViolationKind::Unstable, describe_eig(l) + " outside the open unit disc"});
            break;
        }
    }
    if (!is_controllable(model.A, model.B, tol.rank)) {
        out.push_back({ViolationKind::NotControllable, "(A, B) not controllable"});
    }
    if (!is_observable(model.A, model.C, tol.rank)) {
        out.push_back({ViolationKind::NotObservable, "(A, C) not observable"});
    }
    return out;
}

// ------------------------------------------------------------------ spectra

CMatrix spectral_factor_ct(const CtModel& model, Complex s) {
    return model.H.cast<Complex>() * resolvent_times(model.F, s, model.G);
}

CMatrix spectral_factor_dt(const DtModel& model, Complex z) {
    return model.C.cast<Complex>() * resolvent_times(model.A, z, model.B) + model.D.cast<Complex>();
}

std::vector<SpectrumSample> spectrum_ct(const CtModel& model, const std::vector<double>& omegas,
                                        const Tolerances& tol) {
    std::vector<SpectrumSample> out;
    out.reserve(omegas.size());
    for (double w : omegas) {
        const CMatrix v = spectral_factor_ct(model, Complex(0.0, w));
        SpectrumSample s;
        s.frequency = w;
        s.density = v * v.adjoint();
        s.rank = numerical_rank(s.density, tol.rank);
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<SpectrumSample> spectrum_dt(const DtModel& model, const std::vector<double>& thetas,
                                        const Tolerances& tol) {
    std::vector<SpectrumSample> out;
    out.reserve(thetas.size());
    for (double th : thetas) {
        const CMatrix w = spectral_factor_dt(model, std::polar(1.0, th));
        SpectrumSample s;
        s.frequency = th;
        s.density = w * w.adjoint();
        s.rank = numerical_rank(s.density, tol.rank);
        out.push_back(std::move(s));
    }
    return out;
}

Matrix psi_at_zero(const DtModel& model) {
    Eigen::FullPivLU<Matrix> lu(model.A);
    if (!lu.isInvertible()) throw Error(ErrorCode::Singular, "A is singular, W(0) undefined");
    const Matrix w0 = model.D - model.C * lu.solve(model.B);
    return w0 * model.D.transpose();
}

// ------------------------------------------------------------ decomposition

namespace {

// Picks m rows of HG forming an invertible block. Threshold pivoting: at
// each step the earliest row whose residual norm is within a factor 2 of
// the largest residual is taken, so the natural order is kept unless it
// costs conditioning.
std::vector<int> select_input_rows(const Matrix& hg, double rank_tol) {
    const Eigen::Index p = hg.rows();
    const Eigen::Index m = hg.cols();
    Matrix residual = hg;
    const double scale = residual.rowwise().norm().maxCoeff();
    std::vector<int> chosen;
    std::vector<bool> used(static_cast<size_t>(p), false);
    for (Eigen::Index k = 0; k < m; ++k) {
        double best = 0.0;
        for (Eigen::Index i = 0; i < p; ++i) {
            if (!used[static_cast<size_t>(i)]) best = std::max(best, residual.row(i).norm());
        }
        if (!(best > rank_tol * scale)) {
            throw Error(ErrorCode::NoInvertiblePartition, "rank(HG) < m, no invertible H0 G exists");
        }
        Eigen::Index pick = -1;
        for (Eigen::Index i = 0; i < p; ++i) {
            if (!used[static_cast<size_t>(i)] && residual.row(i).norm() >= 0.5 * best) {
                pick = i;
                break;
            }
        }
        used[static_cast<size_t>(pick)] = true;
        chosen.push_back(static_cast<int>(pick));
        const Vector dir = residual.row(pick).transpose() / residual.row(pick).norm();
        residual -= (residual * dir) * dir.transpose();
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

Matrix take_rows(const Matrix& m, const std::vector<int>& rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
    return out;
}

}  // namespace

RelationDecomposition decompose_relations(const CtModel& model,
                                          const std::optional<std::vector<int>>& row_order_hint) {
    const auto& [F, G, H] = model;
    const Eigen::Index n = F.rows();
    const Eigen::Index m = G.cols();
    const Eigen::Index p = H.rows();
    if (F.cols() != n || G.rows() != n || H.cols() != n) {
        throw Error(ErrorCode::DimensionMismatch, "inconsistent (F, G, H) dimensions");
    }
    if (m > p) throw Error(ErrorCode::NoInvertiblePartition, "m exceeds the number of outputs");
    const Matrix hg = H * G;

    RelationDecomposition out;
    if (row_order_hint) {
        const auto& hint = *row_order_hint;
        std::vector<int> sorted = hint;
        std::sort(sorted.begin(), sorted.end());
        std::vector<int> identity(static_cast<size_t>(p));
        std::iota(identity.begin(), identity.end(), 0);
        if (sorted != identity) throw Error(ErrorCode::InvalidArgument, "row order hint is not a permutation");
        out.input_indices.assign(hint.begin(), hint.begin() + m);
    } else {
        out.input_indices = select_input_rows(hg, default_tolerances().rank);
    }
    for (int i = 0; i < p; ++i) {
        if (std::find(out.input_indices.begin(), out.input_indices.end(), i) == out.input_indices.end()) {
            out.output_indices.push_back(i);
        }
    }

    const Matrix h0 = take_rows(H, out.input_indices);
    const Matrix h1 = take_rows(H, out.output_indices);
    const Matrix h0g = h0 * G;
    Eigen::FullPivLU<Matrix> lu(h0g);
    if (!lu.isInvertible() || numerical_rank(h0g) < m) {
        throw Error(ErrorCode::NoInvertiblePartition, "H0 G is singular for the chosen rows");
    }
    const Matrix b_t = G * lu.inverse();
    out.gamma = F - b_t * h0 * F;
    out.T = StateSpace{out.gamma, b_t, h1 * out.gamma, h1 * b_t};
    out.M = StateSpace{F, G, h0 * F, h0g};
    out.relation_count = static_cast<int>(p - m);
    return out;
}

CMatrix relation_numerator(const RelationDecomposition& decomp, const CtModel& model, Complex s) {
    const Matrix h1 = take_rows(model.H, decomp.output_indices);
    return (h1 * model.G).cast<Complex>() +
           (h1 * model.F).cast<Complex>() * resolvent_times(model.F, s, model.G);
}

double kernel_residual(const RelationDecomposition& decomp, const CtModel& model,
                       const std::vector<double>& omegas) {
    const auto y_count = static_cast<Eigen::Index>(decomp.output_indices.size());
    if (y_count == 0) return 0.0;
    std::vector<int> order = decomp.input_indices;
    order.insert(order.end(), decomp.output_indices.begin(), decomp.output_indices.end());
    const Eigen::Index p = model.H.rows();
    const Eigen::Index m = p - y_count;
    const Matrix h_perm = take_rows(model.H, order);
    double worst = 0.0;
    for (double w : omegas) {
        const Complex s(0.0, w);
        const CMatrix v = h_perm.cast<Complex>() * resolvent_times(model.F, s, model.G);
        const CMatrix phi = v * v.adjoint();
        CMatrix kernel(y_count, p);
        kernel.leftCols(m) = -decomp.T.evaluate(s);
        kernel.rightCols(y_count) = CMatrix::Identity(y_count, y_count);
        const double scale = phi.norm();
        if (scale == 0.0) continue;
        worst = std::max(worst, (kernel * phi).norm() / scale);
    }
    return worst;
}

std::vector<double> log_grid(double lo, double hi, int count) {
    if (count <= 0 || !(lo > 0.0) || !(hi >= lo)) throw Error(ErrorCode::InvalidArgument, "bad log grid");
    std::vector<double> out(static_cast<size_t>(count));
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (int i = 0; i < count; ++i) out[static_cast<size_t>(i)] = std::pow(10.0, a + (b - a) * i / (count - 1));
    return out;
}

}  // namespace tslift
