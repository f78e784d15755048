#pragma once

// Model files (JSON, row-major nested arrays) and CSV emission for sweeps.

#include "tslift/analysis.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>

namespace tslift::io {

class ParseError : public std::runtime_error {
public:
    ParseError(std::string field, const std::string& what)
        : std::runtime_error(field.empty() ? what : "field '" + field + "': " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct ModelFile {
    std::variant<CtModel, DtModel> model;
    std::map<std::string, std::string> metadata;

    bool is_ct() const { return std::holds_alternative<CtModel>(model); }
    const CtModel& ct() const { return std::get<CtModel>(model); }
    const DtModel& dt() const { return std::get<DtModel>(model); }
};

Matrix matrix_from_json(const nlohmann::json& j, const std::string& field);
nlohmann::json matrix_to_json(const Matrix& m);

ModelFile model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const ModelFile& f);

ModelFile load_model(const std::filesystem::path& path);
void save_model(const std::filesystem::path& path, const ModelFile& f);

/// Shortest decimal string that reads back to the same double.
std::string format_double(double v);

/// Header `axis_value,eig_1,...,eig_k,feasible`; ',' separated, LF endings.
std::string sweep_csv(const SweepTable& table);

}  // namespace tslift::io
