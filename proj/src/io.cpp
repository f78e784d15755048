#include "tslift/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace tslift::io {

using nlohmann::json;

Matrix matrix_from_json(const json& j, const std::string& field) {
    if (!j.is_array()) throw ParseError(field, "expected a nested array");
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (rows == 0) return Matrix(0, 0);
    if (!j[0].is_array()) throw ParseError(field, "expected rows to be arrays");
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j[static_cast<size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw ParseError(field, "ragged rows");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            const auto& v = row[static_cast<size_t>(c)];
            if (!v.is_number()) throw ParseError(field, "non-numeric entry");
            m(r, c) = v.get<double>();
        }
    }
    return m;
}

json matrix_to_json(const Matrix& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        out.push_back(std::move(row));
    }
    return out;
}

namespace {

const json& require(const json& j, const char* field) {
    if (!j.contains(field)) throw ParseError(field, "missing");
    return j.at(field);
}

}  // namespace

ModelFile model_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("", "model file must be a JSON object");
    const auto& kind = require(j, "kind");
    if (!kind.is_string()) throw ParseError("kind", "expected \"ct\" or \"dt\"");
    ModelFile out;
    if (j.contains("metadata")) {
        for (const auto& [k, v] : j.at("metadata").items()) {
            out.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
        }
    }
    const auto k = kind.get<std::string>();
    if (k == "ct") {
        CtModel m;
        m.F = matrix_from_json(require(j, "F"), "F");
        m.G = matrix_from_json(require(j, "G"), "G");
        m.H = matrix_from_json(require(j, "H"), "H");
        out.model = std::move(m);
    } else if (k == "dt") {
        DtModel m;
        m.A = matrix_from_json(require(j, "A"), "A");
        m.B = matrix_from_json(require(j, "B"), "B");
        m.C = matrix_from_json(require(j, "C"), "C");
        m.D = matrix_from_json(require(j, "D"), "D");
        if (m.D.size() == 0) m.D = Matrix::Zero(m.C.rows(), m.B.cols());
        if (j.contains("step")) {
            if (!j.at("step").is_number()) throw ParseError("step", "expected a number");
            m.step = j.at("step").get<double>();
        }
        if (j.contains("scale")) {
            const auto s = j.at("scale").get<std::string>();
            if (s == "fine") m.scale = Scale::Fine;
            else if (s == "coarse") m.scale = Scale::Coarse;
            else throw ParseError("scale", "expected \"fine\" or \"coarse\"");
        }
        out.model = std::move(m);
    } else {
        throw ParseError("kind", "expected \"ct\" or \"dt\", got \"" + k + "\"");
    }
    return out;
}

json model_to_json(const ModelFile& f) {
    json out;
    if (f.is_ct()) {
        const auto& m = f.ct();
        out["kind"] = "ct";
        out["F"] = matrix_to_json(m.F);
        out["G"] = matrix_to_json(m.G);
        out["H"] = matrix_to_json(m.H);
    } else {
        const auto& m = f.dt();
        out["kind"] = "dt";
        out["A"] = matrix_to_json(m.A);
        out["B"] = matrix_to_json(m.B);
        out["C"] = matrix_to_json(m.C);
        out["D"] = matrix_to_json(m.D);
        out["step"] = m.step;
        out["scale"] = m.scale == Scale::Fine ? "fine" : "coarse";
    }
    if (!f.metadata.empty()) out["metadata"] = f.metadata;
    return out;
}

ModelFile load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("", "cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("", path.string() + ": " + e.what());
    }
    return model_from_json(j);
}

void save_model(const std::filesystem::path& path, const ModelFile& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << model_to_json(f).dump(2) << '\n';
}

std::string format_double(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

std::string sweep_csv(const SweepTable& table) {
    size_t width = 0;
    for (const auto& pt : table.points) width = std::max(width, pt.eigenvalues.size());
    std::ostringstream os;
    os << "axis_value";
    for (size_t i = 1; i <= width; ++i) os << ",eig_" << i;
    os << ",feasible\n";
    for (const auto& pt : table.points) {
        os << format_double(pt.value);
        for (size_t i = 0; i < width; ++i) {
            os << ',';
            if (i < pt.eigenvalues.size()) os << format_double(pt.eigenvalues[i]);
        }
        os << ',' << (pt.feasible ? "true" : "false") << '\n';
    }
    return os.str();
}

}  // namespace tslift::io
