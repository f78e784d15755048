#include "cli.hpp"

#include "tslift/io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace tslift::cli {

namespace {

using nlohmann::json;

struct RunConfig {
    Tolerances tol;
    std::string format = "text";
    std::string config_path;
    bool no_validate = false;
    std::string output;
    std::string grid;
    std::uint64_t seed = 0;
};

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Ordered key/value report. Text mode prints one `key=value` line per field;
// json-lines mode prints the same fields as one JSON object per record.
class Report {
public:
    void add(std::string key, json value) { fields_.emplace_back(std::move(key), std::move(value)); }

    void emit(std::ostream& out, const std::string& format) const {
        if (format == "json-lines") {
            json obj = json::object();
            for (const auto& [k, v] : fields_) obj[k] = v;
            out << obj.dump() << '\n';
            return;
        }
        for (const auto& [k, v] : fields_) out << k << '=' << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
    }

private:
    std::vector<std::pair<std::string, json>> fields_;
};

json eig_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

std::vector<std::string> split_grid(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        out.push_back(item.substr(b, item.find_last_not_of(" \t") - b + 1));
    }
    return out;
}

std::vector<double> parse_real_grid(const std::string& text) {
    std::vector<double> out;
    for (const auto& s : split_grid(text)) {
        size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw UsageError("bad grid value '" + s + "'");
        }
        if (used != s.size() || !(v > 0.0)) throw UsageError("bad grid value '" + s + "'");
        out.push_back(v);
    }
    if (out.empty()) throw UsageError("grid is empty");
    return out;
}

std::vector<int> parse_int_grid(const std::string& text) {
    std::vector<int> out;
    for (const auto& s : split_grid(text)) {
        size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(s, &used);
        } catch (const std::exception&) {
            throw UsageError("bad grid value '" + s + "'");
        }
        if (used != s.size() || v <= 0) throw UsageError("bad grid value '" + s + "'");
        out.push_back(v);
    }
    if (out.empty()) throw UsageError("grid is empty");
    return out;
}

void apply_config(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw UsageError("config " + path + ": " + e.what());
    }
    auto positive = [&](const char* key, double& slot) {
        if (!j.contains(key)) return;
        const double v = j.at(key).get<double>();
        if (!(v > 0.0)) throw UsageError(std::string("config ") + key + " must be positive");
        slot = v;
    };
    positive("rank_tol", cfg.tol.rank);
    positive("psd_tol", cfg.tol.psd);
    positive("riccati_tol", cfg.tol.riccati);
    if (j.contains("max_iter")) cfg.tol.max_iter = j.at("max_iter").get<int>();
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        if (g.is_array()) {
            std::string joined;
            for (const auto& v : g) joined += (joined.empty() ? "" : ",") + v.dump();
            cfg.grid = joined;
        } else {
            cfg.grid = g.get<std::string>();
        }
    }
    if (j.contains("output")) cfg.output = j.at("output").get<std::string>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("format")) cfg.format = j.at("format").get<std::string>();
}

io::ModelFile load_checked(const std::string& path, const RunConfig& cfg, std::ostream& err, bool& ok) {
    io::ModelFile f = io::load_model(path);
    ok = true;
    if (cfg.no_validate) return f;
    const auto violations = f.is_ct() ? validate_ct(f.ct(), cfg.tol) : validate_dt(f.dt(), cfg.tol);
    for (const auto& v : violations) {
        err << "validation: " << to_string(v.kind) << ": " << v.detail << '\n';
        ok = false;
    }
    return f;
}

void write_output(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << content;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw UsageError("cannot write " + path);
    file << content;
}

void add_lift(Report& rep, const LiftReport& lift) {
    rep.add("feasible", lift.feasible);
    rep.add("failed_condition", lift.failed_condition ? std::string(to_string(*lift.failed_condition)) : "none");
    rep.add("certificate_eigenvalues", eig_json(lift.certificate.eigenvalues));
    rep.add("rank", lift.certificate.rank);
    if (!lift.detail.empty()) rep.add("detail", lift.detail);
}

int cmd_sample(const std::string& path, double h, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    bool ok = false;
    const auto f = load_checked(path, cfg, err, ok);
    if (!ok) return kExitError;
    if (!f.is_ct()) throw UsageError("sample expects a continuous-time (kind \"ct\") model");
    io::ModelFile result;
    result.model = sample_ct(f.ct(), h);
    result.metadata = f.metadata;
    result.metadata["sampled_with_h"] = io::format_double(h);
    write_output(cfg.output, io::model_to_json(result).dump(2) + "\n", out);
    return kExitOk;
}

int cmd_lift(const std::string& path, std::optional<double> h, std::optional<int> q, bool general,
             const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    bool ok = false;
    const auto f = load_checked(path, cfg, err, ok);
    if (!ok) return kExitError;
    if (f.is_ct()) throw UsageError("lift expects a discrete-time (kind \"dt\") model");
    const DtModel& m = f.dt();
    LiftReport lift;
    Report rep;
    if (q) {
        rep.add("mode", "q");
        rep.add("q", *q);
        lift = lift_q(m, *q, cfg.tol);
    } else {
        if (!h) throw UsageError("--h is required for a continuous lift");
        rep.add("mode", general ? "general" : "h");
        rep.add("h", *h);
        lift = general ? lift_general(m, *h, cfg.tol) : lift_to_ct(m, *h, cfg.tol);
    }
    add_lift(rep, lift);
    if (lift.feasible) {
        if (const auto* ct = lift.lifted_ct()) rep.add("relations", relation_count(*ct, cfg.tol));
        if (const auto* dt = lift.lifted_dt()) rep.add("relations", relation_count(*dt, cfg.tol));
    }
    rep.emit(out, cfg.format);
    if (lift.feasible && !cfg.output.empty()) {
        io::ModelFile result;
        if (const auto* ct = lift.lifted_ct()) result.model = *ct;
        if (const auto* dt = lift.lifted_dt()) result.model = *dt;
        result.metadata = f.metadata;
        io::save_model(cfg.output, result);
    }
    return lift.feasible ? kExitOk : kExitInfeasible;
}

int cmd_sweep(const std::string& path, const std::string& axis, const RunConfig& cfg, std::ostream& out,
              std::ostream& err) {
    bool ok = false;
    const auto f = load_checked(path, cfg, err, ok);
    if (!ok) return kExitError;
    SweepTable table;
    if (axis == "h") {
        if (!f.is_ct()) throw UsageError("--axis h needs a continuous-time model");
        table = sweep_h(f.ct(), parse_real_grid(cfg.grid));
    } else if (axis == "q") {
        if (f.is_ct()) throw UsageError("--axis q needs a discrete-time model");
        table = sweep_q(f.dt(), parse_int_grid(cfg.grid), cfg.tol);
    } else {
        throw UsageError("--axis must be h or q");
    }
    write_output(cfg.output, io::sweep_csv(table), out);
    return kExitOk;
}

int cmd_relations(const std::string& path, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    bool ok = false;
    const auto f = load_checked(path, cfg, err, ok);
    if (!ok) return kExitError;
    if (!f.is_ct()) throw UsageError("relations expects a continuous-time model");
    const CtModel& m = f.ct();
    const auto decomp = decompose_relations(m);
    const std::vector<double> grid = cfg.grid.empty() ? log_grid(1e-2, 1e2, 50) : parse_real_grid(cfg.grid);
    Report rep;
    rep.add("p", m.outputs());
    rep.add("m", numerical_rank(m.G, cfg.tol.rank));
    rep.add("relations", decomp.relation_count);
    rep.add("input_rows", decomp.input_indices);
    rep.add("output_rows", decomp.output_indices);
    rep.add("T_A", io::matrix_to_json(decomp.T.A));
    rep.add("T_B", io::matrix_to_json(decomp.T.B));
    rep.add("T_C", io::matrix_to_json(decomp.T.C));
    rep.add("T_D", io::matrix_to_json(decomp.T.D));
    rep.add("kernel_residual", kernel_residual(decomp, m, grid));
    rep.emit(out, cfg.format);
    return kExitOk;
}

int cmd_finest(const std::string& path, int qmax, bool continuous, std::optional<double> h, const RunConfig& cfg,
               std::ostream& out, std::ostream& err) {
    bool ok = false;
    const auto f = load_checked(path, cfg, err, ok);
    if (!ok) return kExitError;
    if (f.is_ct()) throw UsageError("finest expects a discrete-time model");
    const DtModel& m = f.dt();
    std::optional<double> h_step;
    if (continuous) h_step = h ? *h : m.step;
    const auto res = finest_scale(m, qmax, h_step, cfg.tol);
    Report rep;
    rep.add("q*", res.q_star);
    json verdicts = json::array();
    for (const auto& [q, s] : res.verdicts) {
        verdicts.push_back({{"q", q},
                            {"feasible", s.feasible},
                            {"failed_condition", s.failed_condition ? std::string(to_string(*s.failed_condition)) : "none"},
                            {"rank", s.rank},
                            {"min_eig", s.min_eig}});
    }
    rep.add("verdicts", verdicts);
    rep.add("fine_step", res.fine_model.step);
    rep.add("relations", res.relation_count);
    if (res.continuous) {
        rep.add("continuous_feasible", res.continuous->feasible);
        rep.add("continuous_failed_condition", res.continuous->failed_condition
                                                   ? std::string(to_string(*res.continuous->failed_condition))
                                                   : "none");
        if (const auto* ct = res.continuous->lifted_ct()) {
            rep.add("continuous_relations", relation_count(*ct, cfg.tol));
            rep.add("continuous_F", io::matrix_to_json(ct->F));
        }
    }
    rep.emit(out, cfg.format);
    if (!cfg.output.empty()) {
        io::ModelFile result;
        result.model = res.fine_model;
        result.metadata = f.metadata;
        io::save_model(cfg.output, result);
    }
    return kExitOk;
}

int cmd_simulate(const std::string& path, int steps, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    bool ok = false;
    const auto f = load_checked(path, cfg, err, ok);
    if (!ok) return kExitError;
    if (f.is_ct()) throw UsageError("simulate expects a discrete-time model");
    const Matrix traj = simulate_dt(f.dt(), steps, cfg.seed);
    std::ostringstream os;
    for (Eigen::Index c = 0; c < traj.cols(); ++c) os << (c ? "," : "") << "y_" << c + 1;
    os << '\n';
    for (Eigen::Index r = 0; r < traj.rows(); ++r) {
        for (Eigen::Index c = 0; c < traj.cols(); ++c) os << (c ? "," : "") << io::format_double(traj(r, c));
        os << '\n';
    }
    write_output(cfg.output, os.str(), out);
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Move linear stochastic state-space models between time scales"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);
    RunConfig cfg;
    app.add_option("--format", cfg.format, "Report format")->check(CLI::IsMember({"text", "json-lines"}));
    app.add_option("--config", cfg.config_path, "JSON config; its entries override flags");
    app.add_flag("--no-validate", cfg.no_validate, "Skip structural model validation");
    app.add_option("--rank-tol", cfg.tol.rank, "Relative rank threshold")->check(CLI::PositiveNumber);
    app.add_option("--psd-tol", cfg.tol.psd, "Absolute PSD tolerance (default: dim*||M||*1e-10)")
        ->check(CLI::PositiveNumber);
    app.add_option("--riccati-tol", cfg.tol.riccati, "Riccati stopping tolerance")->check(CLI::PositiveNumber);

    std::string model_path;
    double h = 0.0;
    int q = 0;
    bool general = false;
    std::string axis;
    int qmax = 16;
    bool continuous = false;
    int steps = 0;

    auto* sample = app.add_subcommand("sample", "Sample a continuous model with period h");
    sample->set_help_flag("--help", "Print this help message and exit");
    sample->add_option("model", model_path)->required();
    sample->add_option("--h", h)->required()->check(CLI::PositiveNumber);
    sample->add_option("-o,--output", cfg.output);

    auto* lift = app.add_subcommand("lift", "Lift a discrete model to continuous time or a q-times faster clock");
    lift->set_help_flag("--help", "Print this help message and exit");
    lift->add_option("model", model_path)->required();
    auto* opt_h = lift->add_option("--h", h, "Continuous lift with sampling period h")->check(CLI::PositiveNumber);
    auto* opt_q = lift->add_option("--q", q, "Discrete lift by factor q")->check(CLI::PositiveNumber);
    auto* opt_g = lift->add_flag("--general", general, "Continuous lift of a model with feedthrough (needs --h)");
    opt_q->excludes(opt_h)->excludes(opt_g);
    lift->add_option("-o,--output", cfg.output, "Write the lifted model here on success");

    auto* sweep = app.add_subcommand("sweep", "Eigenvalue sweep over h or q (CSV)");
    sweep->set_help_flag("--help", "Print this help message and exit");
    sweep->add_option("model", model_path)->required();
    sweep->add_option("--axis", axis)->required()->check(CLI::IsMember({"h", "q"}));
    auto* opt_grid = sweep->add_option("--grid", cfg.grid, "Comma-separated grid");
    sweep->add_option("-o,--output", cfg.output);

    auto* relations = app.add_subcommand("relations", "Count and expose dynamic relations of a continuous model");
    relations->set_help_flag("--help", "Print this help message and exit");
    relations->add_option("model", model_path)->required();
    relations->add_option("--grid", cfg.grid, "Frequencies for the kernel residual");

    auto* finest = app.add_subcommand("finest", "Search the finest consistent time scale");
    finest->set_help_flag("--help", "Print this help message and exit");
    finest->add_option("model", model_path)->required();
    finest->add_option("--qmax", qmax)->check(CLI::PositiveNumber);
    finest->add_flag("--continuous", continuous, "Also attempt a continuous lift");
    auto* opt_fh = finest->add_option("--h", h, "Time per coarse step (default: model step)")->check(CLI::PositiveNumber);
    finest->add_option("-o,--output", cfg.output, "Write the finest model here");

    auto* simulate = app.add_subcommand("simulate", "Simulate an output trajectory (CSV)");
    simulate->set_help_flag("--help", "Print this help message and exit");
    simulate->add_option("model", model_path)->required();
    simulate->add_option("--steps", steps)->required()->check(CLI::NonNegativeNumber);
    simulate->add_option("--seed", cfg.seed);
    simulate->add_option("-o,--output", cfg.output);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitError;
    }

    try {
        if (!cfg.config_path.empty()) apply_config(cfg, cfg.config_path);
        if (sweep->parsed() && opt_grid->count() == 0 && cfg.grid.empty()) {
            cfg.grid = axis == "h" ? "1,0.5,0.25,0.125,0.0625,0.03125,0.015625,0.0078125" : "1,2,3,4,5,6,7,8";
        }
        if (sample->parsed()) return cmd_sample(model_path, h, cfg, out, err);
        if (lift->parsed()) {
            return cmd_lift(model_path, opt_h->count() ? std::optional<double>(h) : std::nullopt,
                            opt_q->count() ? std::optional<int>(q) : std::nullopt, general, cfg, out, err);
        }
        if (sweep->parsed()) return cmd_sweep(model_path, axis, cfg, out, err);
        if (relations->parsed()) return cmd_relations(model_path, cfg, out, err);
        if (finest->parsed()) {
            return cmd_finest(model_path, qmax, continuous, opt_fh->count() ? std::optional<double>(h) : std::nullopt,
                              cfg, out, err);
        }
        if (simulate->parsed()) return cmd_simulate(model_path, steps, cfg, out, err);
    } catch (const io::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}

}  // namespace tslift::cli
