// Copyright (C) 2026 The trim authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "trim/cost_model.hpp"
#include "trim/error.hpp"

using namespace trim;

namespace {

// Attention share of prefill work, straight from the formula.
double attention_share(const ModelSpec& m, double t) {
    const double attention = 4.0 * static_cast<double>(m.n_layers) * static_cast<double>(m.d_model) * t * t;
    const double weights = 2.0 * static_cast<double>(m.n_params) * t;
    return attention / (attention + weights + m.vision_overhead_flops);
}

ModelSpec random_spec(std::mt19937_64& rng) {
    std::uniform_int_distribution<std::uint64_t> layers(1, 96);
    std::uniform_int_distribution<std::uint64_t> heads(1, 64);
    std::uniform_int_distribution<std::uint64_t> dhead(16, 256);
    std::uniform_int_distribution<std::uint64_t> params(1'000'000, 100'000'000'000);
    const std::uint64_t h = heads(rng);
    const std::uint64_t dh = dhead(rng);
    return ModelSpec{"random", params(rng), layers(rng), h * dh, h, dh, rng() % 2 ? 1u : 2u,
                     std::uniform_real_distribution<double>(0.0, 1e12)(rng)};
}

}  // namespace

TEST_SUITE("cost_model") {

TEST_CASE("kv cache bytes") {
    const auto m = llava15_7b_preset();
    CHECK(kv_cache_bytes(m, 0) == 0);
    CHECK(kv_cache_bytes(m, 1) == 2ull * 32 * 4096 * 2);  // 524288
    CHECK(kv_cache_bytes(m, 1) == 524288);
    const double r = static_cast<double>(kv_cache_bytes(m, 163)) / static_cast<double>(kv_cache_bytes(m, 616));
    CHECK(r == 163.0 / 616.0);
    CHECK(r == doctest::Approx(0.2646).epsilon(1e-3));
}

TEST_CASE("first token latency") {
    const auto hw = v100_preset();
    auto m = llava15_7b_preset();

    // Weight term alone: 2 * 7e9 * 616 / 112e12 s = 77.0 ms.
    const double attention_ms = 4.0 * 32 * 4096 * 616.0 * 616.0 / 112e12 * 1e3;
    CHECK(first_token_ms(m, hw, 616) - attention_ms == doctest::Approx(77.0).epsilon(1e-9));

    // With the attention term negligible the ratio tracks the token ratio.
    ModelSpec tiny_attention{"thin", 7'000'000'000, 1, 64, 1, 64, 2, 0.0};
    const double thin = first_token_ms(tiny_attention, hw, 163) / first_token_ms(tiny_attention, hw, 616);
    CHECK(thin == doctest::Approx(163.0 / 616.0).epsilon(1e-4));
    const double preset = first_token_ms(m, hw, 163) / first_token_ms(m, hw, 616);
    CHECK(preset == doctest::Approx(0.265).epsilon(0.02));

    // Doubling n_params doubles the weight term exactly.
    ModelSpec doubled = m;
    doubled.n_params *= 2;
    const double attention = prefill_flops(m, 616) - 2.0 * 7e9 * 616;
    CHECK(prefill_flops(doubled, 616) - attention == 2.0 * (prefill_flops(m, 616) - attention));

    m.vision_overhead_flops = 1e12;
    CHECK(prefill_flops(m, 616) == doctest::Approx(1e12 + 2.0 * 7e9 * 616 + 4.0 * 32 * 4096 * 616.0 * 616.0));
}

TEST_CASE("next token latency") {
    const auto hw = v100_preset();
    const auto m = llava15_7b_preset();
    CHECK(next_token_ms(m, hw, 0) == doctest::Approx(14e9 / 900e9 * 1e3));
    const double r = next_token_ms(m, hw, 163) / next_token_ms(m, hw, 616);
    CHECK(r == doctest::Approx(0.984).epsilon(1e-3));

    const auto int8 = m.with_precision(Precision::kInt8);
    CHECK(int8.weights_bytes() * 2 == m.weights_bytes());
    CHECK(kv_cache_bytes(int8, 616) * 2 == kv_cache_bytes(m, 616));
}

TEST_CASE("compare_costs") {
    const auto m = llava15_7b_preset();
    const auto hw = v100_preset();
    const auto same = compare_costs(m, hw, 616, 616);
    CHECK(same.ratios.tokens == 1.0);
    CHECK(same.ratios.kv_cache == 1.0);
    CHECK(same.ratios.memory == 1.0);
    CHECK(same.ratios.first_token == 1.0);
    CHECK(same.ratios.next_token == 1.0);

    const auto visual = compare_costs(m, hw, 576, 123);
    CHECK(1.0 - visual.ratios.kv_cache == doctest::Approx(0.786).epsilon(1e-3));

    const auto r = compare_costs(m, hw, 616, 163);
    CHECK(r.ratios.next_token == doctest::Approx(0.983).epsilon(2e-3));
    CHECK(r.baseline.weights_bytes == 14'000'000'000ull);
    CHECK(r.model_name == "llava-1.5-7b");
    CHECK(r.precision == Precision::kFp16);
    CHECK(compare_costs(m.with_precision(Precision::kInt8), hw, 616, 163).precision == Precision::kInt8);

    CHECK_THROWS_AS(compare_costs(m, hw, 0, 10), Error);
    CHECK_THROWS_AS(compare_costs(m, hw, 10, 0), Error);
}

TEST_CASE("monotone in tokens, parameters and layers") {
    std::mt19937_64 rng(41);
    const auto hw = v100_preset();
    for (int trial = 0; trial < 300; ++trial) {
        const auto m = random_spec(rng);
        const std::uint64_t t = rng() % 8192;
        CHECK(kv_cache_bytes(m, t + 1) >= kv_cache_bytes(m, t));
        CHECK(first_token_ms(m, hw, t + 1) >= first_token_ms(m, hw, t));
        CHECK(next_token_ms(m, hw, t + 1) >= next_token_ms(m, hw, t));

        ModelSpec more = m;
        more.n_params += 1 + rng() % 1'000'000'000;
        more.n_layers += 1;
        CHECK(kv_cache_bytes(more, t) >= kv_cache_bytes(m, t));
        CHECK(first_token_ms(more, hw, t) >= first_token_ms(m, hw, t));
        CHECK(next_token_ms(more, hw, t) >= next_token_ms(m, hw, t));
    }
}

TEST_CASE("linearity and precision scaling") {
    std::mt19937_64 rng(42);
    const auto hw = v100_preset();
    for (int trial = 0; trial < 300; ++trial) {
        const auto m = random_spec(rng);
        const std::uint64_t a = rng() % 5000;
        const std::uint64_t b = rng() % 5000;
        CHECK(kv_cache_bytes(m, a + b) == kv_cache_bytes(m, a) + kv_cache_bytes(m, b));
        CHECK(kv_cache_bytes(m, 3 * a) == 3 * kv_cache_bytes(m, a));

        const double n0 = next_token_ms(m, hw, 0);
        const double slope = next_token_ms(m, hw, 1) - n0;
        CHECK(next_token_ms(m, hw, a) == doctest::Approx(n0 + slope * static_cast<double>(a)).epsilon(1e-9));

        const auto fp16 = m.with_precision(Precision::kFp16);
        const auto int8 = m.with_precision(Precision::kInt8);
        CHECK(int8.weights_bytes() * 2 == fp16.weights_bytes());
        CHECK(kv_cache_bytes(int8, a) * 2 == kv_cache_bytes(fp16, a));
    }
}

TEST_CASE("attention stays a small share of 7B prefill") {
    const auto m = llava15_7b_preset();
    for (double t = 1; t <= 2048; t *= 2) {
        CHECK(attention_share(m, t) < 0.10);
    }
    CHECK(attention_share(m, 616) < 0.03);
}

TEST_CASE("ratios cancel hardware when there is no fixed overhead") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> scale(0.01, 100.0);
    for (int trial = 0; trial < 100; ++trial) {
        auto m = random_spec(rng);
        m.vision_overhead_flops = 0.0;
        const auto hw = v100_preset();
        HardwareSpec other{"scaled", hw.peak_flops * scale(rng), hw.mem_bandwidth * scale(rng)};
        const std::uint64_t base = 1 + rng() % 4000;
        const std::uint64_t red = 1 + rng() % base;
        const auto a = compare_costs(m, hw, base, red);
        const auto b = compare_costs(m, other, base, red);
        CHECK(a.ratios.first_token == doctest::Approx(b.ratios.first_token).epsilon(1e-9));
        CHECK(a.ratios.next_token == doctest::Approx(b.ratios.next_token).epsilon(1e-9));
        CHECK(a.ratios.kv_cache == b.ratios.kv_cache);
    }
}

TEST_CASE("spec validation and presets") {
    auto m = llava15_7b_preset();
    m.bytes_per_param = 4;
    CHECK_THROWS_AS(m.validate(), Error);
    m = llava15_7b_preset();
    m.n_layers = 0;
    CHECK_THROWS_AS(m.validate(), Error);
    CHECK_THROWS_AS((HardwareSpec{"x", 0.0, 1.0}.validate()), Error);
    CHECK_THROWS_AS((HardwareSpec{"x", 1.0, -1.0}.validate()), Error);

    CHECK(model_preset("llava-1.5-13b").n_layers == 40);
    CHECK(model_preset("llava-1.5-13b").kv_width() == 5120);
    CHECK(hardware_preset("v100").peak_flops == 112e12);
    CHECK_THROWS_AS(model_preset("gpt-5"), Error);
    CHECK_THROWS_AS(hardware_preset("h100"), Error);
    CHECK(parse_precision("int8") == Precision::kInt8);
    CHECK_THROWS_AS(parse_precision("fp8"), Error);
}

}  // TEST_SUITE
