// Copyright (c) 2026 The ceq Authors.
// SPDX-License-Identifier: Apache-2.0

#include "ceq/artifacts.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "ceq/error.hpp"

namespace ceq {
namespace {

namespace fs = std::filesystem;

constexpr const char* kSummariesVersion = "ceq-summaries 1";
constexpr const char* kEquilibriumVersion = "ceq-equilibrium 1";
constexpr const char* kCheckpointVersion = "ceq-checkpoint 1";
constexpr const char* kLossVersion = "ceq-loss-history 1";
constexpr const char* kExportVersion = "# ceq-export 1";

void atomic_write(const std::string& path, const std::string& contents) {
    const fs::path target(path);
    const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::io, "artifacts", "cannot write " + tmp.string());
        out << contents;
        if (!out.flush()) {
            throw Error(ErrorKind::io, "artifacts", "short write to " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        throw Error(ErrorKind::io, "artifacts",
                    "cannot move " + tmp.string() + " into place: " + ec.message());
    }
}

std::ifstream open_versioned(const std::string& path, const char* version_line,
                             const char* what) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::io, "artifacts",
                    std::string("missing ") + what + " artifact: " + path);
    }
    std::string first;
    std::getline(in, first);
    if (!first.empty() && first.back() == '\r') first.pop_back();
    if (first != version_line) {
        throw Error(ErrorKind::format, "artifacts",
                    std::string("unsupported ") + what + " version in " + path +
                        " (expected \"" + version_line + "\")");
    }
    return in;
}

double parse_double_token(const std::string& token, const std::string& path) {
    double value = 0.0;
    const auto* first = token.data();
    const auto* last = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw Error(ErrorKind::parse, "artifacts",
                    "bad numeric token \"" + token + "\" in " + path);
    }
    return value;
}

std::vector<double> parse_row(std::istream& in, std::size_t count,
                              const std::string& path) {
    std::vector<double> row(count);
    std::string token;
    for (std::size_t i = 0; i < count; ++i) {
        if (!(in >> token)) {
            throw Error(ErrorKind::format, "artifacts", "truncated table in " + path);
        }
        row[i] = parse_double_token(token, path);
    }
    return row;
}

}  // namespace

std::string format_double(double value) {
    char buf[40];
    const auto [ptr, ec] =
        std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
    if (ec != std::errc()) {
        throw Error(ErrorKind::io, "artifacts", "cannot format double");
    }
    return std::string(buf, ptr);
}

void write_summaries(const std::vector<ClassSummary>& summaries,
                     const std::string& path) {
    std::ostringstream out;
    out << kSummariesVersion << '\n';
    for (const auto& s : summaries) {
        out << s.class_id << ' ' << format_double(s.charge);
        for (const double x : s.position) out << ' ' << format_double(x);
        for (const double x : s.spread) out << ' ' << format_double(x);
        out << '\n';
    }
    atomic_write(path, out.str());
}

std::vector<ClassSummary> read_summaries(const std::string& path) {
    auto in = open_versioned(path, kSummariesVersion, "summaries");
    std::vector<ClassSummary> summaries;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::vector<std::string> tokens;
        std::string token;
        while (row >> token) tokens.push_back(token);
        // class_id charge position... spread... (position and spread are d each)
        if (tokens.size() < 4 || (tokens.size() - 2) % 2 != 0) {
            throw Error(ErrorKind::format, "artifacts",
                        "malformed summary row in " + path);
        }
        const std::size_t d = (tokens.size() - 2) / 2;
        ClassSummary s;
        s.class_id = static_cast<int>(parse_double_token(tokens[0], path));
        s.charge = parse_double_token(tokens[1], path);
        s.position.resize(d);
        s.spread.resize(d);
        for (std::size_t j = 0; j < d; ++j) {
            s.position[j] = parse_double_token(tokens[2 + j], path);
            s.spread[j] = parse_double_token(tokens[2 + d + j], path);
        }
        s.count = 0;  // not persisted
        summaries.push_back(std::move(s));
    }
    if (summaries.empty()) {
        throw Error(ErrorKind::format, "artifacts", "no summary rows in " + path);
    }
    return summaries;
}

void write_equilibrium(const EquilibriumModel& model, const std::string& path) {
    std::ostringstream out;
    out << kEquilibriumVersion << '\n';
    out << "n " << model.class_count() << " d " << model.dim() << '\n';
    out << "k " << format_double(model.k) << '\n';
    out << "tolerance " << format_double(model.tolerance) << '\n';
    out << "converged " << (model.converged ? 1 : 0) << '\n';
    out << "final_total_force " << format_double(model.final_total_force) << '\n';
    out << "iterations " << model.iterations_used << '\n';
    out << "positions\n";
    for (std::size_t i = 0; i < model.class_count(); ++i) {
        const auto row = model.equilibrium_positions.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            out << (j ? " " : "") << format_double(row[j]);
        }
        out << '\n';
    }
    out << "deltas\n";
    for (std::size_t i = 0; i < model.class_count(); ++i) {
        const auto row = model.deltas.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            out << (j ? " " : "") << format_double(row[j]);
        }
        out << '\n';
    }
    atomic_write(path, out.str());
}

EquilibriumModel read_equilibrium(const std::string& path,
                                  const std::string& summaries_path) {
    auto in = open_versioned(path, kEquilibriumVersion, "equilibrium");
    EquilibriumModel model;
    std::string key;
    std::size_t n = 0, d = 0;

    auto expect_key = [&](const char* name) {
        if (!(in >> key) || key != name) {
            throw Error(ErrorKind::format, "artifacts",
                        std::string("expected \"") + name + "\" in " + path);
        }
    };
    expect_key("n");
    in >> n;
    expect_key("d");
    in >> d;
    expect_key("k");
    in >> key;
    model.k = parse_double_token(key, path);
    expect_key("tolerance");
    in >> key;
    model.tolerance = parse_double_token(key, path);
    expect_key("converged");
    int converged = 0;
    in >> converged;
    model.converged = converged != 0;
    expect_key("final_total_force");
    in >> key;
    model.final_total_force = parse_double_token(key, path);
    expect_key("iterations");
    in >> model.iterations_used;
    if (!in || n == 0 || d == 0) {
        throw Error(ErrorKind::format, "artifacts", "malformed header in " + path);
    }

    expect_key("positions");
    model.equilibrium_positions = Matrix(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = parse_row(in, d, path);
        std::copy(row.begin(), row.end(), model.equilibrium_positions.row(i).begin());
    }
    expect_key("deltas");
    model.deltas = Matrix(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = parse_row(in, d, path);
        std::copy(row.begin(), row.end(), model.deltas.row(i).begin());
    }

    model.summaries = read_summaries(summaries_path);
    if (model.summaries.size() != n || model.summaries[0].position.size() != d) {
        throw Error(ErrorKind::consistency, "artifacts",
                    "summary table does not match the equilibrium model");
    }
    return model;
}

void write_checkpoint(const TransformModel& model, std::uint64_t seed,
                      const std::vector<double>& epoch_losses,
                      const std::string& path) {
    std::ostringstream out;
    out << kCheckpointVersion << '\n';
    out << "layers " << model.layer_sizes.size();
    for (const std::size_t s : model.layer_sizes) out << ' ' << s;
    out << '\n';
    out << "activation relu\n";
    out << "seed " << seed << '\n';
    out << "epochs_completed " << epoch_losses.size() << '\n';
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        const Matrix& W = model.weights[l];
        out << "W" << l << ' ' << W.rows() << ' ' << W.cols() << '\n';
        for (std::size_t i = 0; i < W.rows(); ++i) {
            const auto row = W.row(i);
            for (std::size_t j = 0; j < row.size(); ++j) {
                out << (j ? " " : "") << format_double(row[j]);
            }
            out << '\n';
        }
        out << "b" << l << ' ' << model.biases[l].size() << '\n';
        for (std::size_t j = 0; j < model.biases[l].size(); ++j) {
            out << (j ? " " : "") << format_double(model.biases[l][j]);
        }
        out << '\n';
    }
    out << "loss_history " << epoch_losses.size() << '\n';
    for (std::size_t e = 0; e < epoch_losses.size(); ++e) {
        out << e << ' ' << format_double(epoch_losses[e]) << '\n';
    }
    atomic_write(path, out.str());
}

Checkpoint read_checkpoint(const std::string& path) {
    auto in = open_versioned(path, kCheckpointVersion, "checkpoint");
    Checkpoint ckpt;
    std::string key;

    auto expect_key = [&](const std::string& name) {
        if (!(in >> key) || key != name) {
            throw Error(ErrorKind::format, "artifacts",
                        "expected \"" + name + "\" in " + path);
        }
    };

    expect_key("layers");
    std::size_t n_layers = 0;
    in >> n_layers;
    if (!in || n_layers < 2) {
        throw Error(ErrorKind::format, "artifacts", "bad layer list in " + path);
    }
    ckpt.model.layer_sizes.resize(n_layers);
    for (auto& s : ckpt.model.layer_sizes) in >> s;

    expect_key("activation");
    in >> key;
    if (key != "relu") {
        throw Error(ErrorKind::format, "artifacts",
                    "unsupported activation \"" + key + "\" in " + path);
    }
    expect_key("seed");
    in >> ckpt.seed;
    expect_key("epochs_completed");
    std::size_t epochs = 0;
    in >> epochs;

    for (std::size_t l = 0; l + 1 < n_layers; ++l) {
        expect_key("W" + std::to_string(l));
        std::size_t rows = 0, cols = 0;
        in >> rows >> cols;
        if (rows != ckpt.model.layer_sizes[l + 1] || cols != ckpt.model.layer_sizes[l]) {
            throw Error(ErrorKind::consistency, "artifacts",
                        "weight shape does not chain in " + path);
        }
        Matrix W(rows, cols);
        for (std::size_t i = 0; i < rows; ++i) {
            const auto row = parse_row(in, cols, path);
            std::copy(row.begin(), row.end(), W.row(i).begin());
        }
        ckpt.model.weights.push_back(std::move(W));
        expect_key("b" + std::to_string(l));
        std::size_t blen = 0;
        in >> blen;
        if (blen != rows) {
            throw Error(ErrorKind::consistency, "artifacts",
                        "bias length does not chain in " + path);
        }
        ckpt.model.biases.push_back(parse_row(in, blen, path));
    }

    expect_key("loss_history");
    std::size_t n_losses = 0;
    in >> n_losses;
    if (n_losses != epochs) {
        throw Error(ErrorKind::consistency, "artifacts",
                    "loss history length disagrees with epochs_completed in " + path);
    }
    ckpt.epoch_losses.resize(n_losses);
    for (std::size_t e = 0; e < n_losses; ++e) {
        std::size_t idx = 0;
        in >> idx >> key;
        ckpt.epoch_losses[e] = parse_double_token(key, path);
    }
    if (!in) throw Error(ErrorKind::format, "artifacts", "truncated " + path);
    return ckpt;
}

void write_loss_history(const std::vector<double>& epoch_losses,
                        const std::string& path) {
    std::ostringstream out;
    out << kLossVersion << '\n';
    for (std::size_t e = 0; e < epoch_losses.size(); ++e) {
        out << e << ' ' << format_double(epoch_losses[e]) << '\n';
    }
    atomic_write(path, out.str());
}

void write_embedding_csv(const Matrix& points, const std::vector<int>& labels,
                         const std::string& path) {
    if (points.rows() != labels.size()) {
        throw Error(ErrorKind::consistency, "artifacts",
                    "embedding rows do not match label count");
    }
    std::ostringstream out;
    out << kExportVersion << '\n';
    out << "label";
    for (std::size_t j = 0; j < points.cols(); ++j) out << ",e_" << (j + 1);
    out << '\n';
    for (std::size_t i = 0; i < points.rows(); ++i) {
        out << labels[i];
        const auto row = points.row(i);
        for (const double x : row) out << ',' << format_double(x);
        out << '\n';
    }
    atomic_write(path, out.str());
}

Embedding read_embedding_csv(const std::string& path) {
    auto in = open_versioned(path, kExportVersion, "export");
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorKind::format, "artifacts", "missing header row in " + path);
    }
    Embedding embedding;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                row.push_back(
                    parse_double_token(line.substr(start, i - start), path));
                start = i + 1;
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw Error(ErrorKind::format, "artifacts", "no data rows in " + path);
    }
    const std::size_t d = rows[0].size() - 1;
    embedding.points = Matrix(rows.size(), d);
    embedding.labels.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != d + 1) {
            throw Error(ErrorKind::format, "artifacts", "ragged row in " + path);
        }
        embedding.labels[i] = static_cast<int>(rows[i][0]);
        for (std::size_t j = 0; j < d; ++j) embedding.points(i, j) = rows[i][j + 1];
    }
    return embedding;
}

void write_report_json(const ClassificationReport& report, const std::string& path,
                       bool include_timing, bool per_sample) {
    nlohmann::ordered_json j;
    j["format"] = "ceq-report/1";
    j["n_samples"] = report.predictions.size();
    if (report.accuracy) j["accuracy"] = *report.accuracy;
    j["erc_used"] = report.erc_used;
    j["n_failures"] = report.n_failures;
    j["class_count"] = report.class_count;
    j["confusion"] = report.confusion;
    j["predictions"] = report.predictions;
    if (include_timing) {
        j["timing_seconds"] = {{"transform", report.timing.transform_seconds},
                               {"erc", report.timing.erc_seconds},
                               {"force", report.timing.force_seconds}};
    }
    if (per_sample) {
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < report.per_sample_forces.rows(); ++i) {
            const auto row = report.per_sample_forces.row(i);
            rows.push_back(std::vector<double>(row.begin(), row.end()));
        }
        j["per_sample"] = std::move(rows);
    }
    atomic_write(path, j.dump(2) + "\n");
}

}  // namespace ceq
