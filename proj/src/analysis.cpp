#include "tslift/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <numbers>
#include <random>
#include <thread>

namespace tslift {

unsigned worker_count(std::size_t tasks) {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* cap = std::getenv("TIMESCALE_LIFT_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(cap, &end, 10);
        if (end != cap && v > 0) n = std::min(n, static_cast<unsigned>(v));
    }
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(tasks, 1)));
}

namespace {

// Runs fn(i) for i in [0, count); each index writes only its own slot, so
// the result does not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t count, Fn fn) {
    const unsigned workers = worker_count(count);
    std::vector<std::exception_ptr> errors(count);
    auto run = [&](std::size_t begin) {
        for (std::size_t i = begin; i < count; i += workers) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        run(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

std::vector<double> to_vector(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

SweepTable sweep_h(const CtModel& model, std::vector<double> periods) {
    if (periods.empty()) throw Error(ErrorCode::InvalidArgument, "empty period grid");
    std::sort(periods.begin(), periods.end());
    SweepTable table;
    table.axis = SweepAxis::SamplePeriod;
    table.points.resize(periods.size());
    parallel_for(periods.size(), [&](std::size_t i) {
        auto& pt = table.points[i];
        pt.value = periods[i];
        pt.eigenvalues = to_vector(noise_gramian(model.F, model.G, periods[i]).eigenvalues());
        pt.feasible = true;
    });
    return table;
}

SweepTable sweep_q(const DtModel& model, std::vector<int> qs, const Tolerances& tol) {
    if (qs.empty()) throw Error(ErrorCode::InvalidArgument, "empty q grid");
    std::sort(qs.begin(), qs.end());
    for (int q : qs) {
        if (q <= 0) throw Error(ErrorCode::InvalidArgument, "q must be positive");
    }
    SweepTable table;
    table.axis = SweepAxis::SubsampleFactor;
    table.points.resize(qs.size());
    parallel_for(qs.size(), [&](std::size_t i) {
        const LiftReport rep = lift_q(model, qs[i], tol);
        auto& pt = table.points[i];
        pt.value = qs[i];
        pt.feasible = rep.feasible;
        if (rep.failed_condition != FailedCondition::NoRoot) pt.eigenvalues = to_vector(rep.certificate.eigenvalues);
    });
    return table;
}

FinestScaleResult finest_scale(const DtModel& model, int q_max, std::optional<double> h_per_step,
                               const Tolerances& tol) {
    if (q_max <= 0) throw Error(ErrorCode::InvalidArgument, "q_max must be positive");
    std::vector<LiftReport> reports(static_cast<std::size_t>(q_max));
    parallel_for(reports.size(), [&](std::size_t i) { reports[i] = lift_q(model, static_cast<int>(i) + 1, tol); });

    FinestScaleResult out;
    for (int q = 1; q <= q_max; ++q) {
        const LiftReport& rep = reports[static_cast<std::size_t>(q - 1)];
        LiftSummary s;
        s.feasible = rep.feasible;
        s.failed_condition = rep.failed_condition;
        s.rank = rep.certificate.rank;
        s.min_eig = rep.certificate.eigenvalues.size() > 0 ? rep.certificate.eigenvalues(rep.certificate.eigenvalues.size() - 1) : 0.0;
        out.verdicts.emplace(q, s);
        if (rep.feasible) out.q_star = q;
    }
    out.fine_model = out.q_star == 1 ? model : *reports[static_cast<std::size_t>(out.q_star - 1)].lifted_dt();
    out.relation_count = relation_count(out.fine_model, tol);

    if (h_per_step) {
        out.continuous = model.has_feedthrough() ? lift_general(model, *h_per_step, tol)
                                                 : lift_to_ct(model, *h_per_step, tol);
    }
    return out;
}

Matrix simulate_dt(const DtModel& model, int steps, std::uint64_t seed) {
    if (steps < 0) throw Error(ErrorCode::InvalidArgument, "steps must be nonnegative");
    const Eigen::Index n = model.A.rows();
    const Eigen::Index r = model.B.cols();
    const Eigen::Index p = model.C.rows();
    Matrix out(steps, p);
    if (steps == 0) return out;

    std::mt19937_64 engine(seed);
    auto uniform = [&engine] {
        // (0, 1]: never zero, so the logarithm below is finite
        return (static_cast<double>(engine() >> 11) + 1.0) * 0x1.0p-53;
    };
    bool cached = false;
    double spare = 0.0;
    auto normal = [&]() {
        if (cached) {
            cached = false;
            return spare;
        }
        const double radius = std::sqrt(-2.0 * std::log(uniform()));
        const double angle = 2.0 * std::numbers::pi * uniform();
        spare = radius * std::sin(angle);
        cached = true;
        return radius * std::cos(angle);
    };
    auto draw = [&](Eigen::Index dim) {
        Vector v(dim);
        for (Eigen::Index i = 0; i < dim; ++i) v(i) = normal();
        return v;
    };

    const SymMatrix P = lyap_dt(model.A, SymMatrix::from_symmetric_part(model.B * model.B.transpose()));
    Vector x = psd_sqrt(P) * draw(n);
    const Matrix D = model.D.size() != 0 ? model.D : Matrix::Zero(p, r);
    for (int k = 0; k < steps; ++k) {
        const Vector v = draw(r);
        out.row(k) = (model.C * x + D * v).transpose();
        x = model.A * x + model.B * v;
    }
    return out;
}

}  // namespace tslift
