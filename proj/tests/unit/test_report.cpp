// Copyright (C) 2026 The trim authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "test_helpers.hpp"
#include "trim/error.hpp"
#include "trim/report.hpp"

using namespace trim;
using trim::testing::TempDir;

namespace {

// Value in the last column of the text row starting with `label`.
double text_ratio(const std::string& text, const std::string& label) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind(label, 0) == 0) {
            return std::stod(line.substr(line.find_last_of(' ') + 1));
        }
    }
    FAIL("missing row " << label);
    return 0.0;
}

void write_file(const std::filesystem::path& p, const std::string& s) {
    std::ofstream(p) << s;
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("format_number round-trips") {
    for (double v : {0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 6.02e23, 5e-324, -1.7976931348623157e308}) {
        CHECK(std::strtod(format_number(v).c_str(), nullptr) == v);
    }
    CHECK(format_number(0.25) == "0.25");
    CHECK(round_to(0.98341812, 6) == 0.983418);
    CHECK(round_to(78.7755, 3) == doctest::Approx(78.776));
}

TEST_CASE("cost report text and json carry the same numbers") {
    const auto r = compare_costs(llava15_7b_preset(), v100_preset(), 616, 163);
    const auto j = to_json(r);
    const auto text = to_text(r);
    CHECK(j.at("memory_scope") == "weights + kv cache");
    CHECK(j.at("baseline").at("n_tokens") == 616);
    CHECK(j.at("reduced").at("kv_cache_bytes") == kv_cache_bytes(llava15_7b_preset(), 163));
    CHECK(j.at("ratios").at("next_token").get<double>() == text_ratio(text, "next token (ms)"));
    CHECK(j.at("ratios").at("first_token").get<double>() == text_ratio(text, "first token (ms)"));
    CHECK(j.at("ratios").at("kv_cache").get<double>() == text_ratio(text, "kv cache (bytes)"));
    CHECK(j.at("ratios").at("memory").get<double>() == text_ratio(text, "weights+kv (bytes)"));
    CHECK(j.at("ratios").at("next_token").get<double>() == 0.983418);
    CHECK(text.find("llava-1.5-7b (fp16)") != std::string::npos);
}

TEST_CASE("selection renderings") {
    const SelectionResult sel{{1, 4}, Strategy::kIqr, 0.125, 6};
    const auto j = to_json(sel);
    CHECK(j.at("strategy") == "iqr");
    CHECK(j.at("threshold") == 0.125);
    CHECK(j.at("indices") == std::vector<std::size_t>{1, 4});
    const auto text = to_text(sel);
    CHECK(text.find("kept      2") != std::string::npos);
    CHECK(text.find("threshold 0.125") != std::string::npos);

    const SelectionResult topk{{0}, Strategy::kTopK, std::nullopt, 3};
    CHECK(to_json(topk).at("threshold").is_null());
    CHECK(to_text(topk).find("threshold none") != std::string::npos);
}

TEST_CASE("sidecar round trip") {
    TempDir dir;
    const Matrix m(4, 2, {0, 1, 2, 3, 4, 5, 6, 7});
    const SelectionResult sel{{0, 3}, Strategy::kPool, std::nullopt, 4};
    const auto reduced = reduce(m, sel);
    write_file(dir / "s.json", sidecar_json(reduced, sel).dump());
    const auto info = read_sidecar(dir / "s.json");
    CHECK(info.source_n == 4);
    CHECK(info.n_rows == 3);
    CHECK(info.has_aggregate);
    CHECK(info.kept_indices == std::vector<std::size_t>{0, 3});
    CHECK(info.strategy == "pool");

    write_file(dir / "bad.json", "{\"source_n\": 4}");
    CHECK_THROWS_AS(read_sidecar(dir / "bad.json"), Error);
    CHECK_THROWS_AS(read_sidecar(dir / "absent.json"), Error);
}

TEST_CASE("grid renderings") {
    const SimilarityGrid grid{2, {0.0, 0.5, 1.0, 0.25}};
    CHECK(grid_text(grid) == "0 0.5\n1 0.25\n");
    CHECK(grid_pixels(grid) == std::vector<std::uint8_t>{0, 128, 255, 64});
    const auto pgm = grid_pgm(grid);
    CHECK(pgm.rfind("P5\n2 2\n255\n", 0) == 0);
    CHECK(pgm.size() == 11 + 4);

    const SimilarityGrid flat{3, std::vector<double>(9, 0.7)};
    CHECK(grid_pixels(flat) == std::vector<std::uint8_t>(9, 128));
}

TEST_CASE("model spec json") {
    const auto full = model_spec_from_json(nlohmann::json::parse(R"({
        "name": "m", "n_params": 7000000000, "n_layers": 32, "d_model": 4096,
        "n_kv_heads": 8, "d_head": 128, "precision": "int8", "vision_overhead_flops": 5e11})"));
    CHECK(full.kv_width() == 1024);
    CHECK(full.bytes_per_param == 1);
    CHECK(full.vision_overhead_flops == 5e11);

    const auto bare = model_spec_from_json(
        nlohmann::json::parse(R"({"n_params": 1000, "n_layers": 2, "d_model": 64})"));
    CHECK(bare.name == "custom");
    CHECK(bare.kv_width() == 64);
    CHECK(bare.bytes_per_param == 2);
    CHECK(bare.vision_overhead_flops == 0.0);

    const auto heads_only = model_spec_from_json(
        nlohmann::json::parse(R"({"n_params": 1000, "n_layers": 2, "d_model": 64, "n_kv_heads": 4})"));
    CHECK(heads_only.d_head == 16);

    for (const char* bad : {R"({"n_layers": 2, "d_model": 64})",
                            R"({"n_params": -1, "n_layers": 2, "d_model": 64})",
                            R"({"n_params": 10, "n_layers": 2, "d_model": 64, "n_kv_heads": 5})",
                            R"({"n_params": 10, "n_layers": 2, "d_model": 64, "precision": "fp8"})",
                            R"({"n_params": 10, "n_layers": 2, "d_model": 64, "bytes_per_param": 4})",
                            R"({"n_params": "ten", "n_layers": 2, "d_model": 64})"}) {
        CAPTURE(bad);
        try {
            model_spec_from_json(nlohmann::json::parse(bad));
            FAIL("accepted");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::kParse);
        }
    }
}

TEST_CASE("hardware spec json and files") {
    TempDir dir;
    write_file(dir / "hw.json", R"({"name": "a100", "peak_flops": 312e12, "mem_bandwidth": 1.555e12})");
    const auto hw = load_hardware_spec(dir / "hw.json");
    CHECK(hw.name == "a100");
    CHECK(hw.peak_flops == 312e12);

    write_file(dir / "broken.json", "{not json");
    CHECK_THROWS_AS(load_hardware_spec(dir / "broken.json"), Error);
    CHECK_THROWS_AS(load_model_spec(dir / "missing.json"), Error);
    CHECK_THROWS_AS(hardware_spec_from_json(nlohmann::json::parse(R"({"peak_flops": 1})")), Error);
    CHECK_THROWS_AS(hardware_spec_from_json(nlohmann::json::parse(R"({"peak_flops": 0, "mem_bandwidth": 1})")),
                    Error);
}

}  // TEST_SUITE
