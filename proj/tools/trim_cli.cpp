// Copyright (C) 2026 The trim authors
// SPDX-License-Identifier: Apache-2.0

// trim: command-line front end over the C API in trim/trim.h.
//
//   trim reduce   score, select and reduce one image-token tensor
//   trim heatmap  softmax significance as a text grid and a PGM image
//   trim cost     analytical memory / latency comparison of two token counts
//   trim compare  iqr, topk, random and pool side by side on one input

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "trim/trim.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check(trim_status status) {
    if (status != TRIM_OK) {
        throw CliError(trim_last_error());
    }
}

struct MatrixDeleter {
    void operator()(trim_matrix* p) const { trim_matrix_free(p); }
};
struct ScoresDeleter {
    void operator()(trim_scores* p) const { trim_scores_free(p); }
};
struct SelectionDeleter {
    void operator()(trim_selection* p) const { trim_selection_free(p); }
};
struct ReducedDeleter {
    void operator()(trim_reduced* p) const { trim_reduced_free(p); }
};

using MatrixPtr = std::unique_ptr<trim_matrix, MatrixDeleter>;
using ScoresPtr = std::unique_ptr<trim_scores, ScoresDeleter>;
using SelectionPtr = std::unique_ptr<trim_selection, SelectionDeleter>;
using ReducedPtr = std::unique_ptr<trim_reduced, ReducedDeleter>;

struct Pipeline {
    ScoresPtr scores;
    SelectionPtr selection;
    ReducedPtr reduced;
};

// Shared between subcommands; each one reads the subset it needs.
struct RunConfig {
    std::string image_tokens;
    std::string text_embedding;
    std::string strategy = "iqr";
    std::string out_dir;
    std::string format = "text";
    std::string model_spec;
    std::string hw_spec;
    std::string model_preset = "llava-1.5-7b";
    std::string hw_preset = "v100";
    std::optional<std::string> precision;
    std::optional<std::uint64_t> baseline_tokens;
    std::optional<std::uint64_t> reduced_tokens;
    std::string sidecar;
    std::uint64_t text_len = 40;
    double ratio = 0.21;
    std::uint64_t seed = 0;
};

MatrixPtr load_matrix(const std::string& path) {
    trim_matrix* m = nullptr;
    check(trim_matrix_read(path.c_str(), &m));
    return MatrixPtr(m);
}

Pipeline run(const trim_matrix* image, const trim_matrix* text, const trim_strategy& strategy) {
    trim_scores* scores = nullptr;
    trim_selection* sel = nullptr;
    trim_reduced* reduced = nullptr;
    check(trim_run_pipeline(image, text, &strategy, &scores, &sel, &reduced));
    return Pipeline{ScoresPtr(scores), SelectionPtr(sel), ReducedPtr(reduced)};
}

template <class Fn>
std::string fetch_text(Fn&& fn) {
    std::size_t length = 0;
    check(fn(nullptr, 0, &length));
    std::string out(length + 1, '\0');
    check(fn(out.data(), out.size(), &length));
    out.resize(length);
    return out;
}

std::string fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    return buf;
}

double round_to(double value, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::round(value * scale) / scale;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw CliError("cannot create output directory " + dir + ": " + ec.message());
    }
}

void write_file(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw CliError("cannot write " + path.string());
    }
}

std::pair<trim_model_spec, trim_hardware_spec> load_specs(const RunConfig& cfg) {
    trim_model_spec model{};
    trim_hardware_spec hw{};
    if (!cfg.model_spec.empty()) {
        check(trim_model_spec_load(cfg.model_spec.c_str(), &model));
    } else {
        check(trim_model_preset(cfg.model_preset.c_str(), &model));
    }
    if (!cfg.hw_spec.empty()) {
        check(trim_hardware_spec_load(cfg.hw_spec.c_str(), &hw));
    } else {
        check(trim_hardware_preset(cfg.hw_preset.c_str(), &hw));
    }
    if (cfg.precision) {
        trim_precision p{};
        check(trim_parse_precision(cfg.precision->c_str(), &p));
        trim_model_set_precision(&model, p);
    }
    return {model, hw};
}

const char* strategy_name(trim_strategy_kind kind) {
    switch (kind) {
    case TRIM_STRATEGY_IQR: return "iqr";
    case TRIM_STRATEGY_TOPK: return "topk";
    case TRIM_STRATEGY_RANDOM: return "random";
    case TRIM_STRATEGY_POOL: return "pool";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------

int cmd_reduce(const RunConfig& cfg) {
    const auto image = load_matrix(cfg.image_tokens);
    const auto text = load_matrix(cfg.text_embedding);
    trim_strategy strategy{};
    check(trim_strategy_parse(cfg.strategy.c_str(), &strategy));

    const Pipeline p = run(image.get(), text.get(), strategy);

    ensure_dir(cfg.out_dir);
    const fs::path tensor_path = fs::path(cfg.out_dir) / "reduced.trimt";
    const fs::path sidecar_path = fs::path(cfg.out_dir) / "reduced.json";
    check(trim_reduced_write(p.reduced.get(), p.selection.get(), tensor_path.c_str(), sidecar_path.c_str()));

    const std::size_t n = trim_selection_total(p.selection.get());
    const std::size_t k = trim_selection_count(p.selection.get());
    const std::size_t rows = trim_matrix_rows(trim_reduced_tokens(p.reduced.get()));
    const double ratio = round_to(static_cast<double>(k) / static_cast<double>(n), 6);
    double threshold = 0.0;
    const bool has_threshold = trim_selection_threshold(p.selection.get(), &threshold) != 0;

    std::string summary;
    if (cfg.format == "json") {
        json j{{"strategy", strategy_name(strategy.kind)},
               {"n_total", n},
               {"kept", k},
               {"rows", rows},
               {"has_aggregate", trim_reduced_has_aggregate(p.reduced.get()) != 0},
               {"ratio", ratio},
               {"threshold", has_threshold ? json(threshold) : json(nullptr)},
               {"tensor", tensor_path.string()},
               {"sidecar", sidecar_path.string()}};
        summary = j.dump(2) + "\n";
    } else {
        std::ostringstream out;
        out << "strategy   " << cfg.strategy << '\n'
            << "n_total    " << n << '\n'
            << "kept       " << k << '\n'
            << "rows       " << rows << (trim_reduced_has_aggregate(p.reduced.get()) ? " (kept + aggregate)" : "")
            << '\n'
            << "ratio      " << fixed(ratio, 6) << '\n'
            << "threshold  " << (has_threshold ? json(threshold).dump() : std::string("none")) << '\n'
            << "tensor     " << tensor_path.string() << '\n'
            << "sidecar    " << sidecar_path.string() << '\n';
        summary = out.str();
    }
    write_file(fs::path(cfg.out_dir) / (cfg.format == "json" ? "summary.json" : "summary.txt"), summary);
    std::cout << summary;
    return 0;
}

int cmd_heatmap(const RunConfig& cfg) {
    const auto image = load_matrix(cfg.image_tokens);
    const auto text = load_matrix(cfg.text_embedding);
    trim_scores* raw_scores = nullptr;
    check(trim_score_tokens(image.get(), text.get(), &raw_scores));
    const ScoresPtr scores(raw_scores);

    std::size_t side = 0;
    check(trim_grid_side(trim_scores_count(scores.get()), &side));

    const std::string grid = fetch_text([&](char* buf, std::size_t cap, std::size_t* len) {
        return trim_scores_grid_text(scores.get(), side, buf, cap, len);
    });
    std::size_t pgm_len = 0;
    check(trim_scores_grid_pgm(scores.get(), side, nullptr, 0, &pgm_len));
    std::string pgm(pgm_len, '\0');
    check(trim_scores_grid_pgm(scores.get(), side, reinterpret_cast<std::uint8_t*>(pgm.data()), pgm.size(),
                               &pgm_len));

    ensure_dir(cfg.out_dir);
    const fs::path txt_path = fs::path(cfg.out_dir) / "heatmap.txt";
    const fs::path pgm_path = fs::path(cfg.out_dir) / "heatmap.pgm";
    write_file(txt_path, grid);
    write_file(pgm_path, pgm);

    const double* sm = trim_scores_softmax(scores.get());
    std::size_t best = 0;
    for (std::size_t i = 1; i < trim_scores_count(scores.get()); ++i) {
        if (sm[i] > sm[best]) {
            best = i;
        }
    }
    if (cfg.format == "json") {
        json j{{"side", side},
               {"argmax", {{"row", best / side}, {"col", best % side}}},
               {"max_softmax", sm[best]},
               {"text", txt_path.string()},
               {"pgm", pgm_path.string()}};
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "grid       " << side << "x" << side << '\n'
                  << "argmax     row " << best / side << ", col " << best % side << '\n'
                  << "max        " << json(sm[best]).dump() << '\n'
                  << "text       " << txt_path.string() << '\n'
                  << "pgm        " << pgm_path.string() << '\n';
    }
    return 0;
}

int cmd_cost(const RunConfig& cfg) {
    auto [model, hw] = load_specs(cfg);

    std::uint64_t baseline = 0;
    std::uint64_t reduced = 0;
    if (!cfg.sidecar.empty()) {
        std::uint64_t source_n = 0;
        std::uint64_t n_rows = 0;
        check(trim_sidecar_read(cfg.sidecar.c_str(), &source_n, &n_rows));
        baseline = source_n + cfg.text_len;
        reduced = n_rows + cfg.text_len;
    }
    if (cfg.baseline_tokens) {
        baseline = *cfg.baseline_tokens;
    }
    if (cfg.reduced_tokens) {
        reduced = *cfg.reduced_tokens;
    }
    if (baseline == 0 || reduced == 0) {
        throw CliError("cost needs --baseline-tokens and --reduced-tokens, or --sidecar");
    }

    trim_cost_report report{};
    check(trim_compare_costs(&model, &hw, baseline, reduced, &report));
    if (cfg.format == "json") {
        const std::string text = fetch_text([&](char* buf, std::size_t cap, std::size_t* len) {
            return trim_cost_report_json(&model, &hw, &report, buf, cap, len);
        });
        std::cout << json::parse(text).dump(2) << '\n';
    } else {
        std::cout << fetch_text([&](char* buf, std::size_t cap, std::size_t* len) {
            return trim_cost_report_text(&model, &hw, &report, buf, cap, len);
        });
    }
    return 0;
}

struct CompareRow {
    std::string strategy;
    std::size_t kept = 0;
    std::size_t rows = 0;
    double mass = 0.0;
    double mass_per_token = 0.0;
    double kv_ratio = 0.0;
    double first_ratio = 0.0;
    double next_ratio = 0.0;
};

int cmd_compare(const RunConfig& cfg) {
    const auto image = load_matrix(cfg.image_tokens);
    const auto text = load_matrix(cfg.text_embedding);
    auto [model, hw] = load_specs(cfg);

    const std::string r = json(cfg.ratio).dump();
    const std::vector<std::string> strategies{"iqr", "topk:" + r, "random:" + r + ":" + std::to_string(cfg.seed),
                                              "pool:" + r};

    std::vector<CompareRow> rows;
    for (const auto& name : strategies) {
        trim_strategy strategy{};
        check(trim_strategy_parse(name.c_str(), &strategy));
        const Pipeline p = run(image.get(), text.get(), strategy);

        CompareRow row;
        row.strategy = name;
        row.kept = trim_selection_count(p.selection.get());
        row.rows = trim_matrix_rows(trim_reduced_tokens(p.reduced.get()));
        check(trim_selection_retained_mass(p.selection.get(), p.scores.get(), &row.mass));
        row.mass_per_token = row.mass / static_cast<double>(row.kept);

        const std::uint64_t n = trim_reduced_source_count(p.reduced.get());
        trim_cost_report report{};
        check(trim_compare_costs(&model, &hw, n + cfg.text_len, row.rows + cfg.text_len, &report));
        row.kv_ratio = report.kv_cache_ratio;
        row.first_ratio = report.first_token_ratio;
        row.next_ratio = report.next_token_ratio;

        row.mass = round_to(row.mass, 6);
        row.mass_per_token = round_to(row.mass_per_token, 8);
        row.kv_ratio = round_to(row.kv_ratio, 6);
        row.first_ratio = round_to(row.first_ratio, 6);
        row.next_ratio = round_to(row.next_ratio, 6);
        rows.push_back(row);
    }

    if (cfg.format == "json") {
        json arr = json::array();
        for (const auto& row : rows) {
            arr.push_back({{"strategy", row.strategy},
                           {"kept", row.kept},
                           {"rows", row.rows},
                           {"retained_mass", row.mass},
                           {"retained_mass_per_token", row.mass_per_token},
                           {"kv_cache_ratio", row.kv_ratio},
                           {"first_token_ratio", row.first_ratio},
                           {"next_token_ratio", row.next_ratio}});
        }
        std::cout << json{{"rows", arr}, {"mass_note", "retained softmax mass is a proxy for information kept"}}.dump(2)
                  << '\n';
    } else {
        char line[200];
        std::snprintf(line, sizeof(line), "%-20s %6s %6s %10s %12s %10s %10s %10s\n", "strategy", "kept", "rows",
                      "mass", "mass/token", "kv", "first", "next");
        std::cout << line;
        for (const auto& row : rows) {
            std::snprintf(line, sizeof(line), "%-20s %6zu %6zu %10s %12s %10s %10s %10s\n", row.strategy.c_str(),
                          row.kept, row.rows, fixed(row.mass, 6).c_str(), fixed(row.mass_per_token, 8).c_str(),
                          fixed(row.kv_ratio, 6).c_str(), fixed(row.first_ratio, 6).c_str(),
                          fixed(row.next_ratio, 6).c_str());
            std::cout << line;
        }
        std::cout << "(mass = retained softmax significance, a proxy for information kept)\n";
    }
    return 0;
}

void add_inputs(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--image-tokens", cfg.image_tokens, "image-token tensor (N x D)")->required();
    cmd->add_option("--text-embedding", cfg.text_embedding, "pooled text tensor (D or 1 x D)")->required();
}

void add_format(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--format", cfg.format, "report format")->check(CLI::IsMember({"text", "json"}));
}

void add_cost_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--model-spec", cfg.model_spec, "model spec JSON (overrides --model-preset)");
    cmd->add_option("--hw-spec", cfg.hw_spec, "hardware spec JSON (overrides --hw-preset)");
    cmd->add_option("--model-preset", cfg.model_preset, "llava-1.5-7b | llava-1.5-13b");
    cmd->add_option("--hw-preset", cfg.hw_preset, "v100");
    cmd->add_option("--precision", cfg.precision, "fp16 | int8")->check(CLI::IsMember({"fp16", "int8"}));
    cmd->add_option("--text-len", cfg.text_len, "text prompt tokens added to each visual count");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"trim: CLIP-metric visual token reduction and inference cost model"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto* reduce = app.add_subcommand("reduce", "score, select and reduce image tokens");
    add_inputs(reduce, cfg);
    reduce->add_option("--strategy", cfg.strategy, "iqr | topk:R | random:R:SEED | pool:R");
    reduce->add_option("--out", cfg.out_dir, "output directory")->required();
    add_format(reduce, cfg);

    auto* heatmap = app.add_subcommand("heatmap", "write the significance grid as text and PGM");
    add_inputs(heatmap, cfg);
    heatmap->add_option("--out", cfg.out_dir, "output directory")->required();
    add_format(heatmap, cfg);

    auto* cost = app.add_subcommand("cost", "compare inference cost at two prompt lengths");
    add_cost_options(cost, cfg);
    cost->add_option("--baseline-tokens", cfg.baseline_tokens, "baseline prompt tokens (visual + text)");
    cost->add_option("--reduced-tokens", cfg.reduced_tokens, "reduced prompt tokens (visual + text)");
    cost->add_option("--sidecar", cfg.sidecar, "reduced.json from `trim reduce`; adds --text-len to both counts");
    add_format(cost, cfg);

    auto* compare = app.add_subcommand("compare", "run every strategy on one input");
    add_inputs(compare, cfg);
    add_cost_options(compare, cfg);
    compare->add_option("--ratio", cfg.ratio, "budget for topk, random and pool")->check(CLI::Range(0.0, 1.0));
    compare->add_option("--seed", cfg.seed, "seed for the random baseline");
    add_format(compare, cfg);

    CLI11_PARSE(app, argc, argv);

    try {
        if (reduce->parsed()) {
            return cmd_reduce(cfg);
        }
        if (heatmap->parsed()) {
            return cmd_heatmap(cfg);
        }
        if (cost->parsed()) {
            return cmd_cost(cfg);
        }
        if (compare->parsed()) {
            return cmd_compare(cfg);
        }
    } catch (const std::exception& e) {
        std::cerr << "trim: error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
