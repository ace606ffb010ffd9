// Copyright (C) 2026 The trim authors
// SPDX-License-Identifier: Apache-2.0

#include "trim/trim.h"

#include <cstring>
#include <fstream>
#include <new>
#include <string>

#include "trim/clip_metric.hpp"
#include "trim/cost_model.hpp"
#include "trim/error.hpp"
#include "trim/report.hpp"
#include "trim/tensor_io.hpp"
#include "trim/token_reduce.hpp"
#include "trim/token_select.hpp"

struct trim_matrix {
    trim::Matrix m;
};

struct trim_scores {
    trim::SignificanceScores s;
};

struct trim_selection {
    trim::SelectionResult sel;
};

struct trim_reduced {
    trim_matrix tokens;
    std::vector<std::size_t> kept_indices;
    bool has_aggregate;
    std::size_t source_n;
};

namespace {

thread_local std::string g_last_error;

trim_status to_status(trim::ErrorCode code) {
    switch (code) {
    case trim::ErrorCode::kInvalidArgument: return TRIM_ERR_INVALID_ARGUMENT;
    case trim::ErrorCode::kIo: return TRIM_ERR_IO;
    case trim::ErrorCode::kBadMagic: return TRIM_ERR_BAD_MAGIC;
    case trim::ErrorCode::kUnsupported: return TRIM_ERR_UNSUPPORTED;
    case trim::ErrorCode::kMalformedHeader: return TRIM_ERR_MALFORMED_HEADER;
    case trim::ErrorCode::kTruncated: return TRIM_ERR_TRUNCATED;
    case trim::ErrorCode::kTrailingData: return TRIM_ERR_TRAILING_DATA;
    case trim::ErrorCode::kDimsOverflow: return TRIM_ERR_DIMS_OVERFLOW;
    case trim::ErrorCode::kNonFinite: return TRIM_ERR_NON_FINITE;
    case trim::ErrorCode::kDimensionMismatch: return TRIM_ERR_DIMENSION_MISMATCH;
    case trim::ErrorCode::kZeroNorm: return TRIM_ERR_ZERO_NORM;
    case trim::ErrorCode::kShape: return TRIM_ERR_SHAPE;
    case trim::ErrorCode::kOutOfRange: return TRIM_ERR_OUT_OF_RANGE;
    case trim::ErrorCode::kParse: return TRIM_ERR_PARSE;
    }
    return TRIM_ERR_INTERNAL;
}

trim_status fail(trim_status status, std::string message) {
    g_last_error = std::move(message);
    return status;
}

template <class F>
trim_status guarded(F&& body) noexcept {
    try {
        body();
        return TRIM_OK;
    } catch (const trim::Error& e) {
        return fail(to_status(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(TRIM_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(TRIM_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(TRIM_ERR_INTERNAL, "unknown exception");
    }
}

void require(bool condition, const char* what) {
    if (!condition) {
        throw trim::Error(trim::ErrorCode::kInvalidArgument, std::string(what) + " must not be NULL");
    }
}

trim_status copy_text(const std::string& text, char* buffer, std::size_t capacity, std::size_t* length) {
    if (length != nullptr) {
        *length = text.size();
    }
    if (buffer == nullptr && capacity == 0) {
        return TRIM_OK;
    }
    if (buffer == nullptr || capacity == 0) {
        return fail(TRIM_ERR_BUFFER_TOO_SMALL, "output buffer is empty");
    }
    const std::size_t n = std::min(text.size(), capacity - 1);
    std::memcpy(buffer, text.data(), n);
    buffer[n] = '\0';
    if (n < text.size()) {
        return fail(TRIM_ERR_BUFFER_TOO_SMALL, "output needs " + std::to_string(text.size() + 1) + " bytes");
    }
    return TRIM_OK;
}

trim_status copy_bytes(const std::string& bytes, std::uint8_t* buffer, std::size_t capacity, std::size_t* length) {
    if (length != nullptr) {
        *length = bytes.size();
    }
    if (buffer == nullptr && capacity == 0) {
        return TRIM_OK;
    }
    if (buffer == nullptr || capacity < bytes.size()) {
        return fail(TRIM_ERR_BUFFER_TOO_SMALL, "output needs " + std::to_string(bytes.size()) + " bytes");
    }
    std::memcpy(buffer, bytes.data(), bytes.size());
    return TRIM_OK;
}

trim::ModelSpec from_c(const trim_model_spec& c) {
    trim::ModelSpec spec{std::string(c.name, strnlen(c.name, sizeof(c.name))),
                         c.n_params,
                         c.n_layers,
                         c.d_model,
                         c.n_kv_heads,
                         c.d_head,
                         c.bytes_per_param,
                         c.vision_overhead_flops};
    spec.validate();
    return spec;
}

trim_model_spec to_c(const trim::ModelSpec& spec) {
    trim_model_spec c{};
    std::strncpy(c.name, spec.name.c_str(), sizeof(c.name) - 1);
    c.n_params = spec.n_params;
    c.n_layers = spec.n_layers;
    c.d_model = spec.d_model;
    c.n_kv_heads = spec.n_kv_heads;
    c.d_head = spec.d_head;
    c.bytes_per_param = spec.bytes_per_param;
    c.vision_overhead_flops = spec.vision_overhead_flops;
    return c;
}

trim::HardwareSpec from_c(const trim_hardware_spec& c) {
    trim::HardwareSpec spec{std::string(c.name, strnlen(c.name, sizeof(c.name))), c.peak_flops, c.mem_bandwidth};
    spec.validate();
    return spec;
}

trim_hardware_spec to_c(const trim::HardwareSpec& spec) {
    trim_hardware_spec c{};
    std::strncpy(c.name, spec.name.c_str(), sizeof(c.name) - 1);
    c.peak_flops = spec.peak_flops;
    c.mem_bandwidth = spec.mem_bandwidth;
    return c;
}

trim_cost_point to_c(const trim::CostPoint& p) {
    return trim_cost_point{p.n_tokens, p.kv_cache_bytes, p.weights_bytes, p.first_token_ms, p.next_token_ms};
}

trim::CostPoint from_c(const trim_cost_point& p) {
    return trim::CostPoint{p.n_tokens, p.kv_cache_bytes, p.weights_bytes, p.first_token_ms, p.next_token_ms};
}

trim::CostReport from_c(const trim_model_spec& model, const trim_hardware_spec& hw, const trim_cost_report& c) {
    trim::CostReport report;
    report.model_name = std::string(model.name, strnlen(model.name, sizeof(model.name)));
    report.hardware_name = std::string(hw.name, strnlen(hw.name, sizeof(hw.name)));
    report.precision = model.bytes_per_param == 1 ? trim::Precision::kInt8 : trim::Precision::kFp16;
    report.baseline = from_c(c.baseline);
    report.reduced = from_c(c.reduced);
    report.ratios = trim::CostRatios{c.token_ratio, c.kv_cache_ratio, c.memory_ratio, c.first_token_ratio,
                                     c.next_token_ratio};
    return report;
}

trim::StrategySpec from_c(const trim_strategy& c) {
    trim::StrategySpec spec;
    switch (c.kind) {
    case TRIM_STRATEGY_IQR: spec.kind = trim::Strategy::kIqr; break;
    case TRIM_STRATEGY_TOPK: spec.kind = trim::Strategy::kTopK; break;
    case TRIM_STRATEGY_RANDOM: spec.kind = trim::Strategy::kRandom; break;
    case TRIM_STRATEGY_POOL: spec.kind = trim::Strategy::kPool; break;
    default: throw trim::Error(trim::ErrorCode::kInvalidArgument, "unknown strategy kind");
    }
    spec.ratio = c.ratio;
    spec.seed = c.seed;
    return spec;
}

trim_strategy_kind to_c(trim::Strategy s) {
    switch (s) {
    case trim::Strategy::kIqr: return TRIM_STRATEGY_IQR;
    case trim::Strategy::kTopK: return TRIM_STRATEGY_TOPK;
    case trim::Strategy::kRandom: return TRIM_STRATEGY_RANDOM;
    case trim::Strategy::kPool: return TRIM_STRATEGY_POOL;
    }
    return TRIM_STRATEGY_IQR;
}

trim::ReducedSequence to_sequence(const trim_reduced& r) {
    return trim::ReducedSequence{r.tokens.m, r.kept_indices, r.has_aggregate, r.source_n};
}

trim_reduced* make_reduced(trim::ReducedSequence seq) {
    return new trim_reduced{trim_matrix{std::move(seq.tokens)}, std::move(seq.kept_indices), seq.has_aggregate,
                            seq.source_n};
}

}  // namespace

extern "C" {

const char* trim_status_string(trim_status status) {
    switch (status) {
    case TRIM_OK: return "ok";
    case TRIM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case TRIM_ERR_IO: return "i/o error";
    case TRIM_ERR_BAD_MAGIC: return "bad magic";
    case TRIM_ERR_UNSUPPORTED: return "unsupported";
    case TRIM_ERR_MALFORMED_HEADER: return "malformed header";
    case TRIM_ERR_TRUNCATED: return "truncated";
    case TRIM_ERR_TRAILING_DATA: return "trailing data";
    case TRIM_ERR_DIMS_OVERFLOW: return "dims overflow";
    case TRIM_ERR_NON_FINITE: return "non-finite value";
    case TRIM_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case TRIM_ERR_ZERO_NORM: return "zero norm";
    case TRIM_ERR_SHAPE: return "shape mismatch";
    case TRIM_ERR_OUT_OF_RANGE: return "out of range";
    case TRIM_ERR_PARSE: return "parse error";
    case TRIM_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case TRIM_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* trim_last_error(void) { return g_last_error.c_str(); }

const char* trim_version(void) { return "1.0.0"; }

// ---- matrices --------------------------------------------------------------

trim_status trim_matrix_create(size_t rows, size_t cols, const float* data, trim_matrix** out) {
    return guarded([&] {
        require(data != nullptr, "data");
        require(out != nullptr, "out");
        if (rows == 0 || cols == 0 || cols > SIZE_MAX / rows) {
            throw trim::Error(trim::ErrorCode::kShape, "matrix extents must be positive and addressable");
        }
        *out = new trim_matrix{trim::Matrix(rows, cols, std::vector<float>(data, data + rows * cols))};
    });
}

trim_status trim_matrix_read(const char* path, trim_matrix** out) {
    return guarded([&] {
        require(path != nullptr, "path");
        require(out != nullptr, "out");
        *out = new trim_matrix{trim::read_tensor(path)};
    });
}

trim_status trim_matrix_write(const trim_matrix* m, const char* path) {
    return guarded([&] {
        require(m != nullptr, "matrix");
        require(path != nullptr, "path");
        trim::write_tensor(path, m->m);
    });
}

void trim_matrix_free(trim_matrix* m) { delete m; }

size_t trim_matrix_rows(const trim_matrix* m) { return m ? m->m.rows() : 0; }
size_t trim_matrix_cols(const trim_matrix* m) { return m ? m->m.cols() : 0; }
const float* trim_matrix_data(const trim_matrix* m) { return m ? m->m.data().data() : nullptr; }

// ---- scores ----------------------------------------------------------------

trim_status trim_score_tokens(const trim_matrix* image_tokens, const trim_matrix* text, trim_scores** out) {
    return guarded([&] {
        require(image_tokens != nullptr, "image_tokens");
        require(text != nullptr, "text");
        require(out != nullptr, "out");
        const auto pooled = trim::PooledTextEmbedding::from_matrix(text->m);
        *out = new trim_scores{trim::score_tokens(image_tokens->m, pooled)};
    });
}

void trim_scores_free(trim_scores* s) { delete s; }

size_t trim_scores_count(const trim_scores* s) { return s ? s->s.n_tokens() : 0; }
const double* trim_scores_raw(const trim_scores* s) { return s ? s->s.raw.data() : nullptr; }
const double* trim_scores_softmax(const trim_scores* s) { return s ? s->s.softmax.data() : nullptr; }

trim_status trim_grid_side(size_t n_tokens, size_t* side) {
    return guarded([&] {
        require(side != nullptr, "side");
        const auto s = trim::square_side(n_tokens);
        if (!s) {
            throw trim::Error(trim::ErrorCode::kShape, std::to_string(n_tokens) + " tokens do not form a square grid");
        }
        *side = *s;
    });
}

trim_status trim_scores_grid_text(const trim_scores* s, size_t side, char* buffer, size_t capacity, size_t* length) {
    std::string text;
    const trim_status st = guarded([&] {
        require(s != nullptr, "scores");
        text = trim::grid_text(trim::similarity_grid(s->s, side));
    });
    return st != TRIM_OK ? st : copy_text(text, buffer, capacity, length);
}

trim_status trim_scores_grid_pgm(const trim_scores* s, size_t side, uint8_t* buffer, size_t capacity,
                                 size_t* length) {
    std::string bytes;
    const trim_status st = guarded([&] {
        require(s != nullptr, "scores");
        bytes = trim::grid_pgm(trim::similarity_grid(s->s, side));
    });
    return st != TRIM_OK ? st : copy_bytes(bytes, buffer, capacity, length);
}

// ---- selection -------------------------------------------------------------

trim_status trim_strategy_parse(const char* text, trim_strategy* out) {
    return guarded([&] {
        require(text != nullptr, "text");
        require(out != nullptr, "out");
        const auto spec = trim::StrategySpec::parse(text);
        *out = trim_strategy{to_c(spec.kind), spec.ratio, spec.seed};
    });
}

trim_status trim_select(const trim_scores* scores, const trim_strategy* strategy, trim_selection** out) {
    return guarded([&] {
        require(scores != nullptr, "scores");
        require(strategy != nullptr, "strategy");
        require(out != nullptr, "out");
        *out = new trim_selection{trim::select(scores->s, from_c(*strategy))};
    });
}

trim_status trim_select_iqr_values(const double* scores, size_t n, trim_selection** out) {
    return guarded([&] {
        require(scores != nullptr, "scores");
        require(out != nullptr, "out");
        *out = new trim_selection{trim::select_iqr(std::span<const double>(scores, n))};
    });
}

void trim_selection_free(trim_selection* sel) { delete sel; }

trim_strategy_kind trim_selection_strategy(const trim_selection* sel) {
    return sel ? to_c(sel->sel.strategy) : TRIM_STRATEGY_IQR;
}
size_t trim_selection_count(const trim_selection* sel) { return sel ? sel->sel.indices.size() : 0; }
const size_t* trim_selection_indices(const trim_selection* sel) { return sel ? sel->sel.indices.data() : nullptr; }
size_t trim_selection_total(const trim_selection* sel) { return sel ? sel->sel.n_total : 0; }

int trim_selection_threshold(const trim_selection* sel, double* threshold) {
    if (sel == nullptr || !sel->sel.threshold) {
        return 0;
    }
    if (threshold != nullptr) {
        *threshold = *sel->sel.threshold;
    }
    return 1;
}

trim_status trim_selection_retained_mass(const trim_selection* sel, const trim_scores* scores, double* mass) {
    return guarded([&] {
        require(sel != nullptr, "selection");
        require(scores != nullptr, "scores");
        require(mass != nullptr, "mass");
        *mass = trim::retained_mass(scores->s, sel->sel);
    });
}

trim_status trim_selection_json(const trim_selection* sel, char* buffer, size_t capacity, size_t* length) {
    std::string text;
    const trim_status st = guarded([&] {
        require(sel != nullptr, "selection");
        text = trim::to_json(sel->sel).dump();
    });
    return st != TRIM_OK ? st : copy_text(text, buffer, capacity, length);
}

trim_status trim_selection_text(const trim_selection* sel, char* buffer, size_t capacity, size_t* length) {
    std::string text;
    const trim_status st = guarded([&] {
        require(sel != nullptr, "selection");
        text = trim::to_text(sel->sel);
    });
    return st != TRIM_OK ? st : copy_text(text, buffer, capacity, length);
}

// ---- reduction -------------------------------------------------------------

trim_status trim_reduce(const trim_matrix* source, const trim_selection* sel, trim_reduced** out) {
    return guarded([&] {
        require(source != nullptr, "source");
        require(sel != nullptr, "selection");
        require(out != nullptr, "out");
        *out = make_reduced(trim::reduce(source->m, sel->sel));
    });
}

trim_status trim_run_pipeline(const trim_matrix* image_tokens, const trim_matrix* text, const trim_strategy* strategy,
                              trim_scores** scores, trim_selection** sel, trim_reduced** reduced) {
    return guarded([&] {
        require(image_tokens != nullptr, "image_tokens");
        require(text != nullptr, "text");
        require(strategy != nullptr, "strategy");
        auto result = trim::run_pipeline(image_tokens->m, trim::PooledTextEmbedding::from_matrix(text->m),
                                          from_c(*strategy));
        if (scores != nullptr) {
            *scores = new trim_scores{std::move(result.scores)};
        }
        if (sel != nullptr) {
            *sel = new trim_selection{std::move(result.selection)};
        }
        if (reduced != nullptr) {
            *reduced = make_reduced(std::move(result.reduced));
        }
    });
}

void trim_reduced_free(trim_reduced* r) { delete r; }

const trim_matrix* trim_reduced_tokens(const trim_reduced* r) { return r ? &r->tokens : nullptr; }
int trim_reduced_has_aggregate(const trim_reduced* r) { return r && r->has_aggregate ? 1 : 0; }
size_t trim_reduced_source_count(const trim_reduced* r) { return r ? r->source_n : 0; }
size_t trim_reduced_kept_count(const trim_reduced* r) { return r ? r->kept_indices.size() : 0; }
const size_t* trim_reduced_kept_indices(const trim_reduced* r) { return r ? r->kept_indices.data() : nullptr; }

trim_status trim_reduced_write(const trim_reduced* r, const trim_selection* sel, const char* tensor_path,
                               const char* sidecar_path) {
    return guarded([&] {
        require(r != nullptr, "reduced");
        require(sel != nullptr, "selection");
        require(tensor_path != nullptr, "tensor_path");
        require(sidecar_path != nullptr, "sidecar_path");
        trim::write_tensor(tensor_path, r->tokens.m);
        std::ofstream out(sidecar_path, std::ios::trunc);
        if (!out) {
            throw trim::Error(trim::ErrorCode::kIo, std::string("cannot open ") + sidecar_path + " for writing");
        }
        out << trim::sidecar_json(to_sequence(*r), sel->sel).dump(2) << '\n';
        if (!out) {
            throw trim::Error(trim::ErrorCode::kIo, std::string("write failed: ") + sidecar_path);
        }
    });
}

trim_status trim_sidecar_read(const char* sidecar_path, uint64_t* source_n, uint64_t* n_rows) {
    return guarded([&] {
        require(sidecar_path != nullptr, "sidecar_path");
        const auto info = trim::read_sidecar(sidecar_path);
        if (source_n != nullptr) {
            *source_n = info.source_n;
        }
        if (n_rows != nullptr) {
            *n_rows = info.n_rows;
        }
    });
}

// ---- cost model ------------------------------------------------------------

trim_status trim_model_preset(const char* name, trim_model_spec* out) {
    return guarded([&] {
        require(name != nullptr, "name");
        require(out != nullptr, "out");
        *out = to_c(trim::model_preset(name));
    });
}

trim_status trim_hardware_preset(const char* name, trim_hardware_spec* out) {
    return guarded([&] {
        require(name != nullptr, "name");
        require(out != nullptr, "out");
        *out = to_c(trim::hardware_preset(name));
    });
}

trim_status trim_model_spec_load(const char* path, trim_model_spec* out) {
    return guarded([&] {
        require(path != nullptr, "path");
        require(out != nullptr, "out");
        *out = to_c(trim::load_model_spec(path));
    });
}

trim_status trim_hardware_spec_load(const char* path, trim_hardware_spec* out) {
    return guarded([&] {
        require(path != nullptr, "path");
        require(out != nullptr, "out");
        *out = to_c(trim::load_hardware_spec(path));
    });
}

trim_status trim_parse_precision(const char* text, trim_precision* out) {
    return guarded([&] {
        require(text != nullptr, "text");
        require(out != nullptr, "out");
        *out = trim::parse_precision(text) == trim::Precision::kInt8 ? TRIM_PRECISION_INT8 : TRIM_PRECISION_FP16;
    });
}

void trim_model_set_precision(trim_model_spec* spec, trim_precision precision) {
    if (spec != nullptr) {
        spec->bytes_per_param = precision == TRIM_PRECISION_INT8 ? 1 : 2;
    }
}

trim_status trim_kv_cache_bytes(const trim_model_spec* model, uint64_t n_tokens, uint64_t* bytes) {
    return guarded([&] {
        require(model != nullptr, "model");
        require(bytes != nullptr, "bytes");
        *bytes = trim::kv_cache_bytes(from_c(*model), n_tokens);
    });
}

trim_status trim_first_token_ms(const trim_model_spec* model, const trim_hardware_spec* hw, uint64_t n_tokens,
                                double* ms) {
    return guarded([&] {
        require(model != nullptr, "model");
        require(hw != nullptr, "hw");
        require(ms != nullptr, "ms");
        *ms = trim::first_token_ms(from_c(*model), from_c(*hw), n_tokens);
    });
}

trim_status trim_next_token_ms(const trim_model_spec* model, const trim_hardware_spec* hw, uint64_t n_cached,
                               double* ms) {
    return guarded([&] {
        require(model != nullptr, "model");
        require(hw != nullptr, "hw");
        require(ms != nullptr, "ms");
        *ms = trim::next_token_ms(from_c(*model), from_c(*hw), n_cached);
    });
}

trim_status trim_compare_costs(const trim_model_spec* model, const trim_hardware_spec* hw, uint64_t baseline_tokens,
                               uint64_t reduced_tokens, trim_cost_report* out) {
    return guarded([&] {
        require(model != nullptr, "model");
        require(hw != nullptr, "hw");
        require(out != nullptr, "out");
        const auto report = trim::compare_costs(from_c(*model), from_c(*hw), baseline_tokens, reduced_tokens);
        *out = trim_cost_report{to_c(report.baseline),      to_c(report.reduced),        report.ratios.tokens,
                                report.ratios.kv_cache,     report.ratios.memory,        report.ratios.first_token,
                                report.ratios.next_token};
    });
}

trim_status trim_cost_report_json(const trim_model_spec* model, const trim_hardware_spec* hw,
                                  const trim_cost_report* report, char* buffer, size_t capacity, size_t* length) {
    std::string text;
    const trim_status st = guarded([&] {
        require(model != nullptr, "model");
        require(hw != nullptr, "hw");
        require(report != nullptr, "report");
        text = trim::to_json(from_c(*model, *hw, *report)).dump();
    });
    return st != TRIM_OK ? st : copy_text(text, buffer, capacity, length);
}

trim_status trim_cost_report_text(const trim_model_spec* model, const trim_hardware_spec* hw,
                                  const trim_cost_report* report, char* buffer, size_t capacity, size_t* length) {
    std::string text;
    const trim_status st = guarded([&] {
        require(model != nullptr, "model");
        require(hw != nullptr, "hw");
        require(report != nullptr, "report");
        text = trim::to_text(from_c(*model, *hw, *report));
    });
    return st != TRIM_OK ? st : copy_text(text, buffer, capacity, length);
}

}  // extern "C"
