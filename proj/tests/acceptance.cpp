// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Sub-check lines below each criterion list every violated condition.

#include "cli.hpp"
#include "oracles.hpp"
#include "tslift/analysis.hpp"
#include "tslift/reference_models.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>

using namespace tslift;
namespace fs = std::filesystem;

namespace {

const fs::path kData = TSLIFT_DATA_DIR;
const fs::path kGolden = TSLIFT_GOLDEN_DIR;
constexpr double kPi = std::numbers::pi;

class Criterion {
public:
    explicit Criterion(int id) : id_(id) {}

    // Records a condition; failures are kept for the report.
    bool check(bool ok, const std::string& what) {
        ++checks_;
        if (!ok && failures_.size() < 8) failures_.push_back(what);
        if (!ok) ++failed_;
        return ok;
    }

    void note(std::string text) { notes_.push_back(std::move(text)); }

    bool passed() const { return failed_ == 0; }
    int id() const { return id_; }
    int checks() const { return checks_; }
    int failed() const { return failed_; }
    const std::vector<std::string>& failures() const { return failures_; }
    const std::vector<std::string>& notes() const { return notes_; }

private:
    int id_;
    int checks_ = 0;
    int failed_ = 0;
    std::vector<std::string> failures_;
    std::vector<std::string> notes_;
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

double rel_err(const Matrix& a, const Matrix& b) {
    return (a - b).norm() / std::max(b.norm(), 1e-300);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string run_cli(std::vector<std::string> args, int& code) {
    args.insert(args.begin(), "tslift");
    std::ostringstream out, err;
    code = cli::run(args, out, err);
    return out.str();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// ------------------------------------------------------------------ criteria

void example1(Criterion& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const CtModel ex = reference::example1();
    std::vector<double> grid;
    for (int k = 0; k <= 7; ++k) grid.push_back(std::ldexp(1.0, -k));
    const SweepTable t = sweep_h(ex, grid);

    // points ascend in h, so index 0 is h = 2^-7
    const auto& fine = t.points.front().eigenvalues;
    const double r31 = fine[2] / fine[0];
    c.check(r31 < 1e-3, "lambda3/lambda1 at h=2^-7 is " + fmt(r31));
    for (std::size_t i = 1; i < t.points.size(); ++i) {
        const double lo = t.points[i - 1].eigenvalues[2] / t.points[i - 1].eigenvalues[0];
        const double hi = t.points[i].eigenvalues[2] / t.points[i].eigenvalues[0];
        c.check(lo < hi, "lambda3/lambda1 not decreasing between h=" + fmt(t.points[i].value) + " and " +
                             fmt(t.points[i - 1].value));
    }

    const double r12 = fine[0] / fine[1];
    c.check(std::abs(r12 / 3.0 - 1.0) < 0.03, "lambda1/lambda2 at h=2^-7 is " + fmt(r12) + ", " +
                                                  fmt(100.0 * std::abs(r12 / 3.0 - 1.0)) + "% from 3");

    std::mt19937_64 rng(101);
    std::vector<double> omegas;
    for (int i = 0; i < 5; ++i) omegas.push_back(std::pow(10.0, oracle::uniform(rng, -2.0, 2.0)));
    for (const auto& s : spectrum_ct(ex, omegas)) {
        c.check(s.rank == 2, "spectral rank " + std::to_string(s.rank) + " at omega=" + fmt(s.frequency));
    }
    const double dt = seconds_since(t0);
    c.check(dt < 5.0, "runtime " + fmt(dt) + " s");
}

void example2(Criterion& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const DtModel fine = reference::example2_fine();
    const DtModel coarse = subsample(fine, 5);
    for (int q = 1; q <= 8; ++q) {
        const LiftReport r = lift_q(coarse, q);
        const bool want = q <= 5;
        c.check(r.feasible == want, "q=" + std::to_string(q) + " feasible=" + (r.feasible ? "true" : "false") +
                                        " (min eig " + fmt(r.certificate.verdict.min_eig) + ")");
        if (q != 5 || !r.feasible) continue;

        const double lmax = r.certificate.eigenvalues(0);
        int small = 0;
        for (Eigen::Index i = 0; i < r.certificate.eigenvalues.size(); ++i) {
            if (r.certificate.eigenvalues(i) < default_tolerances().rank * lmax) ++small;
        }
        c.check(r.certificate.rank == 2 && small == 2, "certificate rank " + std::to_string(r.certificate.rank));
        const DtModel& got = *r.lifted_dt();
        const double ef = (got.A - fine.A).cwiseAbs().maxCoeff();
        const double eg = (got.B * got.B.transpose() - fine.B * fine.B.transpose()).cwiseAbs().maxCoeff();
        c.check(ef < 1e-8, "recovered F off by " + fmt(ef));
        c.check(eg < 1e-8, "recovered GG' off by " + fmt(eg));
    }
    const double dt = seconds_since(t0);
    c.check(dt < 5.0, "runtime " + fmt(dt) + " s");
}

void continuous_round_trip(Criterion& c) {
    std::mt19937_64 rng(202);
    const double periods[] = {0.1, 0.5, 1.0};
    int done = 0;
    while (done < 50) {
        const int n = oracle::uniform_int(rng, 1, 6);
        const int m = oracle::uniform_int(rng, 1, n);
        const int p = oracle::uniform_int(rng, m, 8);
        const double h = periods[done % 3];
        const CtModel ct = oracle::random_ct(rng, n, m, p);
        if (oracle::max_imag(ct.F) * h >= kPi) continue;
        ++done;
        const std::string tag = "model " + std::to_string(done) + " (n=" + std::to_string(n) +
                                ", m=" + std::to_string(m) + ", h=" + fmt(h) + "): ";

        const DtModel d = sample_ct(ct, h);
        const LiftReport r = lift_to_ct(d, h);
        if (!c.check(r.feasible, tag + "lift infeasible: " + r.detail)) continue;
        const CtModel& got = *r.lifted_ct();
        const double ef = rel_err(got.F, ct.F);
        const double eg = rel_err(got.G * got.G.transpose(), ct.G * ct.G.transpose());
        c.check(ef < 1e-7, tag + "F error " + fmt(ef));
        c.check(got.H == ct.H, tag + "H not exact");
        c.check(eg < 1e-7, tag + "GG' error " + fmt(eg));

        const Matrix& p_cert = r.certificate.P.matrix();
        const double scale = p_cert.norm();
        const Matrix ct_res = ct.F * p_cert + p_cert * ct.F.transpose() + ct.G * ct.G.transpose();
        const Matrix dt_res = d.A * p_cert * d.A.transpose() + d.B * d.B.transpose() - p_cert;
        c.check(ct_res.norm() / scale < 1e-8, tag + "continuous Lyapunov residual " + fmt(ct_res.norm() / scale));
        c.check(dt_res.norm() / scale < 1e-8, tag + "discrete Lyapunov residual " + fmt(dt_res.norm() / scale));
    }
}

void discrete_round_trip(Criterion& c) {
    std::mt19937_64 rng(303);
    const int factors[] = {2, 3, 5};
    int done = 0;
    while (done < 50) {
        const int q = factors[done % 3];
        const bool with_j = done % 2 == 1;
        const int n = oracle::uniform_int(rng, 1, 5);
        const int m = oracle::uniform_int(rng, 1, n);
        const int p = oracle::uniform_int(rng, 1, 4);
        const double delta = 0.4;
        const Matrix fc = oracle::random_stable_ct(rng, n);
        if (oracle::max_imag(fc) * delta * q >= 0.9 * kPi) continue;
        const DtModel fine{expm(fc, delta), oracle::randn(rng, n, m), oracle::randn(rng, p, n),
                           with_j ? oracle::randn(rng, p, m) : Matrix::Zero(p, m), delta, Scale::Fine};
        if (!is_controllable(fine.A, fine.B) || !is_observable(fine.A, fine.C)) continue;
        ++done;
        const std::string tag = "model " + std::to_string(done) + " (q=" + std::to_string(q) +
                                (with_j ? ", J!=0" : ", J=0") + "): ";

        const LiftReport r = lift_q(subsample(fine, q), q);
        if (!c.check(r.feasible, tag + "lift infeasible: " + r.detail)) continue;
        const DtModel& got = *r.lifted_dt();
        const auto err = [](const Matrix& a, const Matrix& b) {
            return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
        };
        c.check(err(got.A, fine.A) < 1e-7, tag + "F error " + fmt(err(got.A, fine.A)));
        c.check(err(got.B * got.B.transpose(), fine.B * fine.B.transpose()) < 1e-7, tag + "GG' error");
        c.check(err(got.D * got.D.transpose(), fine.D * fine.D.transpose()) < 1e-7, tag + "JJ' error");
        c.check(err(got.B * got.D.transpose(), fine.B * fine.D.transpose()) < 1e-7, tag + "GJ' error");
    }
}

void check_relations(Criterion& c, const CtModel& model, const std::string& tag) {
    const RelationDecomposition r = decompose_relations(model);
    const std::vector<double> grid = log_grid(1e-2, 1e2, 50);
    const double kr = kernel_residual(r, model, grid);
    c.check(kr < 1e-8, tag + "kernel residual " + fmt(kr));

    const Eigen::Index m = static_cast<Eigen::Index>(r.input_indices.size());
    std::vector<int> order = r.input_indices;
    order.insert(order.end(), r.output_indices.begin(), r.output_indices.end());
    for (double w : grid) {
        const Complex s(0.0, w);
        const CMatrix tm = r.T.evaluate(s) * r.M.evaluate(s);
        const CMatrix num = relation_numerator(r, model, s);
        const double e = (tm - num).norm() / num.norm();
        c.check(e < 1e-9, tag + "||TM-N||/||N|| = " + fmt(e) + " at omega=" + fmt(w));

        const CMatrix phi = spectrum_ct(model, {w})[0].density;
        CMatrix ordered(phi.rows(), phi.cols());
        for (std::size_t i = 0; i < order.size(); ++i) {
            for (std::size_t j = 0; j < order.size(); ++j) ordered(i, j) = phi(order[i], order[j]);
        }
        const CMatrix phi_u = ordered.topLeftCorner(m, m);
        Eigen::JacobiSVD<CMatrix> svd(phi_u);
        const auto sv = svd.singularValues();
        if (sv(sv.size() - 1) <= 0.0 || sv(0) / sv(sv.size() - 1) >= 1e8) continue;
        const CMatrix t_phi = ordered.bottomLeftCorner(phi.rows() - m, m) * phi_u.inverse();
        const CMatrix t = r.T.evaluate(s);
        const double et = (t_phi - t).norm() / std::max(t.norm(), 1e-300);
        c.check(et < 1e-7, tag + "T vs Phi_yu Phi_u^-1 error " + fmt(et) + " at omega=" + fmt(w));
    }
}

void relations(Criterion& c) {
    check_relations(c, reference::example1(), "Example 1: ");
    std::mt19937_64 rng(404);
    for (int k = 1; k <= 25; ++k) {
        const int n = oracle::uniform_int(rng, 1, 6);
        const int m = oracle::uniform_int(rng, 1, std::min(n, 3));
        const int p = oracle::uniform_int(rng, m + 1, 8);
        check_relations(c, oracle::random_ct(rng, n, m, p), "model " + std::to_string(k) + ": ");
    }
}

void general_lift(Criterion& c) {
    std::mt19937_64 rng(505);
    const double periods[] = {0.1, 0.5, 1.0};
    std::vector<double> thetas;
    for (int k = 0; k < 32; ++k) thetas.push_back(kPi * k / 31.0);

    int done = 0;
    int skipped = 0;
    while (done < 25) {
        const int n = oracle::uniform_int(rng, 1, 4);
        const int m = oracle::uniform_int(rng, 1, n);
        const int p = oracle::uniform_int(rng, n, 6);
        const double h = periods[done % 3];
        const CtModel ct = oracle::random_ct(rng, n, m, p);
        if (oracle::max_imag(ct.F) * h >= 0.9 * kPi) continue;
        const DtModel sampled = sample_ct(ct, h);
        // Delta(Pi) tends to (CB)(CB)'; past cond 1e12 the Riccati guard rejects
        // the model by design, so draws are kept a decade inside that bound
        Eigen::JacobiSVD<Matrix> svd(sampled.C * sampled.B);
        const Vector& sv = svd.singularValues();
        const double cond_delta = std::pow(sv(0) / sv(n - 1), 2);
        if (cond_delta > 1e11) {
            ++skipped;
            oracle::randn(rng, n, m);
            oracle::randn(rng, p, m);
            continue;
        }
        ++done;
        const std::string tag = "model " + std::to_string(done) + ": ";
        const double psi_s = psi_at_zero(sampled).norm();
        c.check(psi_s < 1e-9, tag + "Psi(0) of sampled model " + fmt(psi_s));

        // same output process, one step of noise moved into the feedthrough
        const DtModel shifted{sampled.A, sampled.A * sampled.B, sampled.C, sampled.C * sampled.B, h, Scale::Coarse};
        const double psi_shift = psi_at_zero(shifted).norm() / std::max(1.0, (shifted.D * shifted.D.transpose()).norm());
        c.check(psi_shift < 1e-9, tag + "Psi(0) of shifted model " + fmt(psi_shift));

        LiftReport r;
        try {
            r = lift_general(shifted, h);
        } catch (const Error& e) {
            c.check(false, tag + "lift_general threw: " + e.what());
            continue;
        }
        if (!c.check(r.feasible, tag + "lift_general infeasible: " + r.detail)) continue;
        const DtModel resampled = sample_ct(*r.lifted_ct(), h);
        const auto want = spectrum_dt(shifted, thetas);
        const auto got = spectrum_dt(resampled, thetas);
        for (std::size_t k = 0; k < thetas.size(); ++k) {
            const double e = (got[k].density - want[k].density).norm() / want[k].density.norm();
            c.check(e < 1e-6, tag + "spectral mismatch " + fmt(e) + " at theta=" + fmt(thetas[k]));
        }

        // generic feedthrough breaks Psi(0) = 0
        const DtModel bad{sampled.A, oracle::randn(rng, n, m), sampled.C, oracle::randn(rng, p, m), h, Scale::Coarse};
        const LiftReport rb = lift_general(bad, h);
        c.check(!rb.feasible && rb.failed_condition == FailedCondition::PsiZeroFail,
                tag + "model with Psi(0) != 0 not rejected with PsiZeroFail");
    }
    c.note(std::to_string(skipped) + " draws skipped with cond(Delta) > 1e11 (outside the Riccati guard)");
}

void matfun(Criterion& c) {
    std::mt19937_64 rng(606);
    for (int k = 1; k <= 100; ++k) {
        const int n = oracle::uniform_int(rng, 1, 8);
        const Matrix f = oracle::random_stable_ct(rng, n);
        const std::string tag = "matrix " + std::to_string(k) + " (n=" + std::to_string(n) + "): ";
        const Matrix a = expm(f, 1.0);
        const double e1 = rel_err(logm_principal(a), f);
        const double e2 = rel_err(expm(logm_principal(a), 1.0), a);
        c.check(e1 < 1e-9, tag + "logm(expm(F)) error " + fmt(e1));
        c.check(e2 < 1e-9, tag + "expm(logm(A)) error " + fmt(e2));
        for (int q : {2, 3, 5}) {
            const Matrix r = rootq_principal(a, q);
            Matrix pw = Matrix::Identity(n, n);
            for (int i = 0; i < q; ++i) pw = pw * r;
            const double e3 = rel_err(pw, a);
            c.check(e3 < 1e-9, tag + "rootq^" + std::to_string(q) + " error " + fmt(e3));
        }
    }
    for (int k = 1; k <= 20; ++k) {
        const int n = oracle::uniform_int(rng, 1, 8);
        Vector d(n);
        for (int i = 0; i < n; ++i) d(i) = oracle::uniform(rng, 0.2, 2.0);
        d(oracle::uniform_int(rng, 0, n - 1)) *= -1.0;
        Matrix v = oracle::randn(rng, n, n) + 3.0 * Matrix::Identity(n, n);
        const Matrix a = v * d.asDiagonal() * v.inverse();
        const auto rejects = [&](const std::function<void()>& fn) {
            try {
                fn();
            } catch (const Error& e) {
                return e.code() == ErrorCode::SpectrumOnBranchCut;
            }
            return false;
        };
        c.check(rejects([&] { logm_principal(a); }), "logm accepted a negative real eigenvalue");
        c.check(rejects([&] { rootq_principal(a, 3); }), "rootq accepted a negative real eigenvalue");
    }
}

void golden(Criterion& c) {
    struct Case {
        std::vector<std::string> args;
        const char* file;
    };
    const Case cases[] = {
        {{"sweep", (kData / "example1_ct.json").string(), "--axis", "h"}, "example1_sweep_h.csv"},
        {{"sweep", (kData / "example2_coarse.json").string(), "--axis", "q"}, "example2_sweep_q.csv"},
    };
    for (const auto& cs : cases) {
        int code = 0;
        const std::string out = run_cli(cs.args, code);
        c.check(code == 0, std::string(cs.file) + ": exit code " + std::to_string(code));
        const fs::path g = kGolden / cs.file;
        if (!c.check(fs::exists(g), std::string(cs.file) + ": golden file missing")) continue;
        c.check(out == slurp(g), std::string(cs.file) + ": output differs from golden file");
    }
    int code = 0;
    const std::string out = run_cli({"finest", (kData / "example2_coarse.json").string()}, code);
    c.check(code == 0, "finest exit code " + std::to_string(code));
    c.check(out.find("q*=5\n") != std::string::npos, "finest did not print q*=5");
}

}  // namespace

int main() {
    const std::pair<const char*, void (*)(Criterion&)> suite[] = {
        {"Example 1 reproduction", example1},
        {"Example 2 reproduction", example2},
        {"continuous round trip", continuous_round_trip},
        {"discrete q-lift round trip", discrete_round_trip},
        {"relation decomposition", relations},
        {"minimum-phase general lift", general_lift},
        {"matrix functions", matfun},
        {"CLI golden files", golden},
    };
    int failed = 0;
    int id = 0;
    for (const auto& [name, fn] : suite) {
        Criterion c(++id);
        const auto t0 = std::chrono::steady_clock::now();
        try {
            fn(c);
        } catch (const std::exception& e) {
            c.check(false, std::string("unexpected exception: ") + e.what());
        }
        const double dt = seconds_since(t0);
        std::cout << (c.passed() ? "PASS" : "FAIL") << "  criterion " << c.id() << "  " << name << "  ("
                  << c.checks() - c.failed() << "/" << c.checks() << " checks, " << fmt(dt) << " s)\n";
        for (const auto& f : c.failures()) std::cout << "      - " << f << '\n';
        for (const auto& n : c.notes()) std::cout << "      note: " << n << '\n';
        if (c.failed() > static_cast<int>(c.failures().size())) {
            std::cout << "      - ... " << c.failed() - c.failures().size() << " more\n";
        }
        if (!c.passed()) ++failed;
    }
    std::cout << (8 - failed) << "/8 criteria passed\n";
    return failed == 0 ? 0 : 1;
}
