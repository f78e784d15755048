#pragma once

// Moving stochastic models between time scales: sampling a continuous model,
// subsampling a discrete one, and the converse liftings together with the
// certificates that decide whether a lifting exists.

#include "tslift/model.hpp"

#include <optional>
#include <string>
#include <variant>

namespace tslift {

enum class FailedCondition { NoLogarithm, NoRoot, BBSingular, PsdFail, PsiZeroFail };

std::string_view to_string(FailedCondition c);

struct LiftCertificate {
    SymMatrix P;            // state covariance used by the test
    SymMatrix tested;       // -(F P + P F'), M(P), or P - R P R'
    Vector eigenvalues;     // of `tested`, descending
    int rank = 0;           // numerical rank of `tested` = recovered noise dimension m
    PsdVerdict verdict;
};

struct LiftReport {
    bool feasible = false;
    std::optional<FailedCondition> failed_condition;
    std::variant<std::monostate, CtModel, DtModel> lifted;
    LiftCertificate certificate;
    std::string detail;     // human-readable reason on failure

    const CtModel* lifted_ct() const { return std::get_if<CtModel>(&lifted); }
    const DtModel* lifted_dt() const { return std::get_if<DtModel>(&lifted); }
};

/// A = e^{Fh}, B = Q^{1/2} (symmetric root), C = H, D = 0, step = h.
DtModel sample_ct(const CtModel& model, double h);

/// Continuous origin of a D = 0 model: log(A) exists, BB' nonsingular and
/// -(log(A) P + P log(A)') >= 0 for P = APA' + BB'.
LiftReport lift_to_ct(const DtModel& model, double h, const Tolerances& tol = default_tolerances());

/// Reads `fine` as (F, G, H, J) and returns A = F^q, B = [G, FG, ..., F^{q-1}G],
/// C = H, D = [0, ..., 0, J], step * q.
DtModel subsample(const DtModel& fine, int q);

/// Fine model q times faster: F = A^{1/q}, H = C, [G; J] a full-rank factor
/// of M(P) = [[P - F P F', F^{1-q} B D'], [D B' F^{1-q}', D D']].
LiftReport lift_q(const DtModel& model, int q, const Tolerances& tol = default_tolerances());

struct MinPhaseResult {
    SymMatrix P_minus;
    Matrix B_minus;
    Matrix D_minus;      // p x r, full column rank
    int iterations = 0;
    double residual = 0.0;  // last relative Riccati update
    Matrix Cbar;         // C P A' + D B'
    SymMatrix Lambda0;   // C P C' + D D'
};

/// Minimum-phase realization (A, B_-, C, D_-) with the same output spectrum,
/// from the Riccati iteration Pi_{k+1} = A Pi A' + K(Pi) Delta(Pi)^{-1} K(Pi)',
/// K(Pi) = Cbar' - A Pi C', Delta(Pi) = Lambda0 - C Pi C', Pi_0 = 0.
/// When Lambda0 is rank deficient the iteration runs on its range.
MinPhaseResult minphase(const DtModel& model, const Tolerances& tol = default_tolerances());

/// Continuous origin of a general (A, B, C, D): requires Psi(0) = 0 and the
/// continuous-lift conditions applied to A^{-1} P_- A^{-T}.
LiftReport lift_general(const DtModel& model, double h, const Tolerances& tol = default_tolerances());

/// Number of deterministic relations p - m of a continuous model (m = rank G)
/// or of a fine discrete model (m = rank [G; J]).
int relation_count(const CtModel& model, const Tolerances& tol = default_tolerances());
int relation_count(const DtModel& fine, const Tolerances& tol = default_tolerances());

}  // namespace tslift
