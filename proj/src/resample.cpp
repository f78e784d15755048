#include "tslift/resample.hpp"

#include <cmath>
#include <sstream>

namespace tslift {

std::string_view to_string(FailedCondition c) {
    switch (c) {
        case FailedCondition::NoLogarithm: return "NoLogarithm";
        case FailedCondition::NoRoot: return "NoRoot";
        case FailedCondition::BBSingular: return "BBSingular";
        case FailedCondition::PsdFail: return "PsdFail";
        case FailedCondition::PsiZeroFail: return "PsiZeroFail";
    }
    return "Unknown";
}

namespace {

LiftReport infeasible(FailedCondition c, std::string detail, LiftCertificate cert = {}) {
    LiftReport r;
    r.feasible = false;
    r.failed_condition = c;
    r.detail = std::move(detail);
    r.certificate = std::move(cert);
    return r;
}

// det(BB') != 0, decided on the singular values of B: squaring into BB'
// would double the condition number of an already ill-conditioned Gramian.
bool nonsingular_gram(const Matrix& b, const Tolerances& tol) {
    if (b.rows() == 0) return true;
    if (b.cols() < b.rows()) return false;
    Eigen::JacobiSVD<Matrix> svd(b);
    const Vector& s = svd.singularValues();
    return s(0) > 0.0 && s(b.rows() - 1) > tol.singular * s(0);
}

void require_positive(double h) {
    if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorCode::InvalidArgument, "sampling period must be positive");
}

// Runs the PSD test on `tested` and, when it passes, factors it.
// Returns the failure detail, or nothing on success.
std::optional<std::string> certify(LiftCertificate& cert, const SymMatrix& tested, const Tolerances& tol,
                                   RankFactor& factor) {
    cert.tested = tested;
    cert.eigenvalues = tested.eigenvalues();
    cert.verdict = psd_check(tested, tol.psd);
    if (!cert.verdict.is_psd) {
        std::ostringstream os;
        os << "tested matrix has eigenvalue " << cert.verdict.min_eig << " < -" << cert.verdict.tolerance_used;
        cert.rank = numerical_rank(tested.matrix(), tol.rank);
        return os.str();
    }
    factor = psd_rank_factor(tested, tol.rank, tol.psd);
    cert.rank = factor.rank;
    return std::nullopt;
}

Matrix feedthrough_or_zero(const DtModel& m) {
    if (m.D.size() != 0) return m.D;
    return Matrix::Zero(m.C.rows(), m.B.cols());
}

}  // namespace

DtModel sample_ct(const CtModel& model, double h) {
    require_positive(h);
    DtModel out;
    out.A = expm(model.F, h);
    out.B = psd_sqrt(noise_gramian(model.F, model.G, h));
    out.C = model.H;
    out.D = Matrix::Zero(model.H.rows(), out.B.cols());
    out.step = h;
    out.scale = Scale::Coarse;
    return out;
}

LiftReport lift_to_ct(const DtModel& model, double h, const Tolerances& tol) {
    require_positive(h);
    if (model.has_feedthrough()) {
        throw Error(ErrorCode::InvalidArgument, "lift_to_ct needs D = 0; use lift_general");
    }
    Matrix log_a;
    try {
        log_a = logm_principal(model.A);
    } catch (const Error& e) {
        return infeasible(FailedCondition::NoLogarithm, e.what());
    }

    LiftCertificate cert;
    const SymMatrix bb = SymMatrix::from_symmetric_part(model.B * model.B.transpose());
    cert.P = lyap_dt(model.A, bb);
    if (!nonsingular_gram(model.B, tol)) return infeasible(FailedCondition::BBSingular, "BB' is singular", cert);

    const Matrix f = log_a / h;
    const SymMatrix tested = SymMatrix::from_symmetric_part(-(f * cert.P.matrix() + cert.P.matrix() * f.transpose()));
    RankFactor factor;
    if (auto why = certify(cert, tested, tol, factor)) {
        return infeasible(FailedCondition::PsdFail, *why, cert);
    }

    LiftReport r;
    r.feasible = true;
    r.lifted = CtModel{f, factor.factor, model.C};
    r.certificate = std::move(cert);
    return r;
}

DtModel subsample(const DtModel& fine, int q) {
    if (q <= 0) throw Error(ErrorCode::InvalidArgument, "q must be a positive integer");
    const Eigen::Index n = fine.A.rows();
    const Eigen::Index m = fine.B.cols();
    const Eigen::Index p = fine.C.rows();
    const Matrix j = feedthrough_or_zero(fine);
    DtModel out;
    out.B.resize(n, m * q);
    out.D = Matrix::Zero(p, m * q);
    Matrix power = Matrix::Identity(n, n);
    for (int k = 0; k < q; ++k) {
        out.B.middleCols(k * m, m) = power * fine.B;
        power = power * fine.A;
    }
    out.A = power;
    out.C = fine.C;
    out.D.rightCols(m) = j;
    out.step = fine.step * q;
    out.scale = Scale::Coarse;
    return out;
}

LiftReport lift_q(const DtModel& model, int q, const Tolerances& tol) {
    if (q <= 0) throw Error(ErrorCode::InvalidArgument, "q must be a positive integer");
    const Eigen::Index n = model.A.rows();
    const Eigen::Index p = model.C.rows();
    Matrix root;
    try {
        root = rootq_principal(model.A, q);
    } catch (const Error& e) {
        return infeasible(FailedCondition::NoRoot, e.what());
    }

    LiftCertificate cert;
    cert.P = lyap_dt(model.A, SymMatrix::from_symmetric_part(model.B * model.B.transpose()));
    const Matrix& P = cert.P.matrix();
    const Matrix top = P - root * P * root.transpose();
    const bool feedthrough = model.has_feedthrough();

    SymMatrix tested;
    if (!feedthrough) {
        tested = SymMatrix::from_symmetric_part(top);
    } else {
        // F^{1-q} = F A^{-1}
        const Matrix d = feedthrough_or_zero(model);
        const Matrix cross = root * model.A.partialPivLu().solve(model.B * d.transpose());
        Matrix joint(n + p, n + p);
        joint.topLeftCorner(n, n) = top;
        joint.topRightCorner(n, p) = cross;
        joint.bottomLeftCorner(p, n) = cross.transpose();
        joint.bottomRightCorner(p, p) = d * d.transpose();
        tested = SymMatrix::from_symmetric_part(joint);
    }

    RankFactor factor;
    if (auto why = certify(cert, tested, tol, factor)) {
        return infeasible(FailedCondition::PsdFail, *why, cert);
    }

    DtModel fine;
    fine.A = root;
    fine.C = model.C;
    if (feedthrough) {
        fine.B = factor.factor.topRows(n);
        fine.D = factor.factor.bottomRows(p);
    } else {
        fine.B = factor.factor;
        fine.D = Matrix::Zero(p, factor.rank);
    }
    fine.step = model.step / q;
    fine.scale = Scale::Fine;

    LiftReport r;
    r.feasible = true;
    r.lifted = std::move(fine);
    r.certificate = std::move(cert);
    return r;
}

MinPhaseResult minphase(const DtModel& model, const Tolerances& tol) {
    const Matrix& A = model.A;
    const Matrix& C = model.C;
    const Matrix D = feedthrough_or_zero(model);
    const Eigen::Index n = A.rows();

    MinPhaseResult out;
    const SymMatrix P = lyap_dt(A, SymMatrix::from_symmetric_part(model.B * model.B.transpose()));
    out.Cbar = C * P.matrix() * A.transpose() + D * model.B.transpose();
    out.Lambda0 = SymMatrix::from_symmetric_part(C * P.matrix() * C.transpose() + D * D.transpose());

    // Orthonormal basis of range(Lambda0) = range([C D]); the spectral
    // density, Cbar and Delta(Pi) all live there.
    Eigen::SelfAdjointEigenSolver<Matrix> range_es(out.Lambda0.matrix());
    const Eigen::Index p = out.Lambda0.dim();
    const double lmax = p > 0 ? range_es.eigenvalues()(p - 1) : 0.0;
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < p; ++i) {
        if (lmax > 0.0 && range_es.eigenvalues()(i) > tol.rank * lmax) ++r;
    }
    const Matrix U = range_es.eigenvectors().rightCols(r);
    const Matrix Cr = U.transpose() * C;
    const Matrix CbarR = U.transpose() * out.Cbar;
    const Matrix L0r = U.transpose() * out.Lambda0.matrix() * U;

    auto delta_of = [&](const Matrix& pi) -> Eigen::LLT<Matrix> {
        const Matrix delta = 0.5 * (L0r - Cr * pi * Cr.transpose() + (L0r - Cr * pi * Cr.transpose()).transpose());
        if (r > 0) {
            Eigen::SelfAdjointEigenSolver<Matrix> es(delta, Eigen::EigenvaluesOnly);
            const double lo = es.eigenvalues()(0);
            const double hi = es.eigenvalues()(r - 1);
            if (!(lo > 0.0) || hi / lo > tol.delta_cond) {
                std::ostringstream os;
                os << "Delta(Pi) has eigenvalues in [" << lo << ", " << hi << "]";
                throw Error(ErrorCode::DeltaSingular, os.str());
            }
        }
        return Eigen::LLT<Matrix>(delta);
    };

    Matrix pi = Matrix::Zero(n, n);
    bool converged = false;
    for (int k = 1; k <= tol.max_iter; ++k) {
        const Matrix gain = CbarR.transpose() - A * pi * Cr.transpose();
        const auto llt = delta_of(pi);
        Matrix next = A * pi * A.transpose();
        if (r > 0) next += gain * llt.solve(gain.transpose());
        next = 0.5 * (next + next.transpose());
        const double scale = max_abs(next);
        out.residual = scale > 0.0 ? max_abs(next - pi) / scale : 0.0;
        out.iterations = k;
        pi = std::move(next);
        if (out.residual <= tol.riccati) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        std::ostringstream os;
        os << "Riccati iteration stalled at relative update " << out.residual << " after " << tol.max_iter
           << " steps";
        throw Error(ErrorCode::NoConvergence, os.str());
    }

    out.P_minus = SymMatrix::from_symmetric_part(pi);
    const auto llt = delta_of(pi);
    const Matrix lower = llt.matrixL();
    const Matrix gain = CbarR.transpose() - A * pi * Cr.transpose();
    out.D_minus = U * lower;
    // B_- = K (L')^{-1}  so that  B_- B_-' = K Delta^{-1} K'  and  B_- D_-' = K U'
    out.B_minus = lower.triangularView<Eigen::Lower>().solve(gain.transpose()).transpose();
    return out;
}

LiftReport lift_general(const DtModel& model, double h, const Tolerances& tol) {
    require_positive(h);
    const Eigen::Index n = model.A.rows();
    Eigen::FullPivLU<Matrix> lu_a(model.A);
    if (!lu_a.isInvertible()) return infeasible(FailedCondition::NoLogarithm, "A is singular");

    const Matrix psi0 = psi_at_zero(model);
    const Matrix D = feedthrough_or_zero(model);
    const SymMatrix P = lyap_dt(model.A, SymMatrix::from_symmetric_part(model.B * model.B.transpose()));
    const double scale = max_abs(model.C * P.matrix() * model.C.transpose() + D * D.transpose());
    if (max_abs(psi0) > tol.fun * scale) {
        std::ostringstream os;
        os << "|Psi(0)|_max = " << max_abs(psi0) << " exceeds " << tol.fun << " * " << scale;
        return infeasible(FailedCondition::PsiZeroFail, os.str());
    }

    Matrix log_a;
    try {
        log_a = logm_principal(model.A);
    } catch (const Error& e) {
        return infeasible(FailedCondition::NoLogarithm, e.what());
    }

    const MinPhaseResult mp = minphase(model, tol);
    const Matrix shifted_b = lu_a.solve(mp.B_minus);  // A^{-1} B_-

    // D_- - C A^{-1} B_- = 0 follows from Psi(0) = 0 and D_-'D_- > 0.
    const double eq23 = max_abs(mp.D_minus - model.C * shifted_b);
    const double eq23_scale = std::max(max_abs(mp.D_minus), 1e-300);
    if (eq23 > 1e3 * tol.fun * eq23_scale) {
        std::ostringstream os;
        os << "minimum-phase factor violates D_- = C A^{-1} B_- by " << eq23;
        return infeasible(FailedCondition::PsiZeroFail, os.str());
    }

    LiftCertificate cert;
    const Matrix a_inv_p = lu_a.solve(mp.P_minus.matrix());
    cert.P = SymMatrix::from_symmetric_part(lu_a.solve(a_inv_p.transpose()));  // A^{-1} P_- A^{-T}
    const SymMatrix bb = SymMatrix::from_symmetric_part(shifted_b * shifted_b.transpose());
    if (bb.dim() != n || !nonsingular_gram(shifted_b, tol)) {
        return infeasible(FailedCondition::BBSingular, "A^{-1} B_- B_-' A^{-T} is singular", cert);
    }

    const Matrix f = log_a / h;
    const SymMatrix tested = SymMatrix::from_symmetric_part(-(f * cert.P.matrix() + cert.P.matrix() * f.transpose()));
    RankFactor factor;
    if (auto why = certify(cert, tested, tol, factor)) {
        return infeasible(FailedCondition::PsdFail, *why, cert);
    }

    LiftReport r;
    r.feasible = true;
    r.lifted = CtModel{f, factor.factor, model.C};
    r.certificate = std::move(cert);
    return r;
}

int relation_count(const CtModel& model, const Tolerances& tol) {
    return static_cast<int>(model.H.rows()) - numerical_rank(model.G, tol.rank);
}

int relation_count(const DtModel& fine, const Tolerances& tol) {
    const Matrix j = feedthrough_or_zero(fine);
    Matrix stacked(fine.B.rows() + j.rows(), fine.B.cols());
    stacked << fine.B, j;
    return static_cast<int>(fine.C.rows()) - numerical_rank(stacked, tol.rank);
}

}  // namespace tslift
