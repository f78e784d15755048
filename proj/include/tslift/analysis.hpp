#pragma once

#include "tslift/resample.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace tslift {

enum class SweepAxis { SamplePeriod, SubsampleFactor };

struct SweepPoint {
    double value = 0.0;
    std::vector<double> eigenvalues;  // descending; empty when no principal root exists
    bool feasible = true;
};

struct SweepTable {
    SweepAxis axis = SweepAxis::SamplePeriod;
    std::vector<SweepPoint> points;  // ascending in `value`
};

/// Eigenvalues of the one-step noise Gramian BB' = P - e^{Fh} P e^{F'h} for each h.
SweepTable sweep_h(const CtModel& model, std::vector<double> periods);

/// Eigenvalues of the lift_q test matrix (P - A^{1/q} P A^{1/q}' when D = 0,
/// M(P) otherwise) and the verdict for each q.
SweepTable sweep_q(const DtModel& model, std::vector<int> qs, const Tolerances& tol = default_tolerances());

struct LiftSummary {
    bool feasible = false;
    std::optional<FailedCondition> failed_condition;
    int rank = 0;
    double min_eig = 0.0;
};

struct FinestScaleResult {
    int q_star = 1;
    std::map<int, LiftSummary> verdicts;
    DtModel fine_model;                   // lifted model at q_star (the input when q_star = 1)
    int relation_count = 0;               // of fine_model
    std::optional<LiftReport> continuous; // present when a continuous lift was requested
};

/// Tries every q in 1..q_max (feasibility need not be monotone in q). With
/// `h_per_step`, also attempts a continuous lift of the input.
FinestScaleResult finest_scale(const DtModel& model, int q_max, std::optional<double> h_per_step = std::nullopt,
                               const Tolerances& tol = default_tolerances());

/// Output trajectory (steps x p) of the model driven by standard normal noise,
/// started from the stationary state covariance. Bit-reproducible for a seed:
/// mt19937_64 words mapped to uniforms by their top 53 bits, then Box-Muller.
Matrix simulate_dt(const DtModel& model, int steps, std::uint64_t seed);

inline constexpr const char* kSimulatorVersion = "mt19937_64-boxmuller-v1";

/// Worker count for sweeps: hardware concurrency capped by TIMESCALE_LIFT_THREADS.
unsigned worker_count(std::size_t tasks);

}  // namespace tslift
