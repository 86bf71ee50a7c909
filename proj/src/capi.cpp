#include "prunesid/prunesid.h"

#include "prunesid/batch.hpp"
#include "prunesid/budget.hpp"
#include "prunesid/error.hpp"
#include "prunesid/oracle.hpp"
#include "prunesid/pipeline.hpp"
#include "prunesid/report.hpp"
#include "prunesid/token_io.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

struct prunesid_matrix {
    prunesid::TokenMatrix tokens;
};

struct prunesid_result {
    prunesid::CompressionResult result;
};

namespace {

thread_local std::string last_error;

prunesid_status status_of(prunesid::ErrorKind kind) {
    using prunesid::ErrorKind;
    switch (kind) {
        case ErrorKind::invalid_input: return PRUNESID_ERROR_INVALID_INPUT;
        case ErrorKind::parameter: return PRUNESID_ERROR_INVALID_ARGUMENT;
        case ErrorKind::format: return PRUNESID_ERROR_FORMAT;
        case ErrorKind::io: return PRUNESID_ERROR_IO;
        case ErrorKind::guard: return PRUNESID_ERROR_GUARD;
        case ErrorKind::internal: return PRUNESID_ERROR_INTERNAL;
    }
    return PRUNESID_ERROR_INTERNAL;
}

prunesid_status set_error(prunesid_status status, std::string message) {
    last_error = std::move(message);
    return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename Body>
prunesid_status guarded(Body&& body) {
    try {
        body();
        return PRUNESID_OK;
    } catch (const prunesid::Error& e) {
        return set_error(status_of(e.kind()), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(PRUNESID_ERROR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return set_error(PRUNESID_ERROR_INTERNAL, e.what());
    } catch (...) {
        return set_error(PRUNESID_ERROR_INTERNAL, "unknown error");
    }
}

prunesid_status null_argument(const char* name) {
    return set_error(PRUNESID_ERROR_INVALID_ARGUMENT, std::string(name) + " must not be null");
}

char* duplicate(const std::string& text) {
    char* out = static_cast<char*>(std::malloc(text.size() + 1));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

prunesid::TokenFormat to_format(prunesid_format format) {
    switch (format) {
        case PRUNESID_FORMAT_TOKM: return prunesid::TokenFormat::tokm;
        case PRUNESID_FORMAT_CSV: return prunesid::TokenFormat::csv;
    }
    prunesid::fail(prunesid::ErrorKind::parameter, "unknown token format " + std::to_string(format));
}

prunesid::SimilaritySource to_source(prunesid_similarity source) {
    switch (source) {
        case PRUNESID_SIMILARITY_RAW: return prunesid::SimilaritySource::raw;
        case PRUNESID_SIMILARITY_RESCALED: return prunesid::SimilaritySource::rescaled;
    }
    prunesid::fail(prunesid::ErrorKind::parameter, "unknown similarity source " + std::to_string(source));
}

prunesid::CompressConfig to_config(const prunesid_config* config) {
    prunesid_config defaults;
    prunesid_config_init(&defaults);
    const prunesid_config& c = config ? *config : defaults;
    prunesid::CompressConfig out;
    if (c.groups > 0) out.groups = c.groups;
    out.alpha = c.alpha;
    out.seed = c.seed;
    out.similarity = to_source(c.similarity);
    out.svd_iters = c.svd_iters;
    out.strict = c.strict != 0;
    return out;
}

}  // namespace

extern "C" {

const char* prunesid_version(void) { return "0.1.0"; }

const char* prunesid_last_error(void) { return last_error.c_str(); }

void prunesid_string_free(char* text) { std::free(text); }

void prunesid_config_init(prunesid_config* config) {
    if (config == nullptr) return;
    config->groups = 0;
    config->alpha = prunesid::default_alpha;
    config->seed = 0;
    config->similarity = PRUNESID_SIMILARITY_RAW;
    config->svd_iters = prunesid::default_power_iterations;
    config->strict = 0;
}

void prunesid_batch_options_init(prunesid_batch_options* options) {
    if (options == nullptr) return;
    options->manifest_path = nullptr;
    options->avg_budget = 0;
    options->dynamic = -1;
    options->min_budget = 0;
    options->jobs = 1;
    options->out_dir = ".";
    options->include_timing = 0;
}

prunesid_status prunesid_matrix_create(const double* values, uint64_t tokens, uint64_t dims, prunesid_matrix** out) {
    if (out == nullptr) return null_argument("out");
    if (values == nullptr && tokens * dims > 0) return null_argument("values");
    return guarded([&] {
        *out = new prunesid_matrix{prunesid::TokenMatrix::from_values(
            std::span<const double>(values, static_cast<std::size_t>(tokens * dims)), tokens, dims)};
    });
}

prunesid_status prunesid_matrix_create_f32(const float* values, uint64_t tokens, uint64_t dims,
                                           prunesid_matrix** out) {
    if (out == nullptr) return null_argument("out");
    if (values == nullptr && tokens * dims > 0) return null_argument("values");
    return guarded([&] {
        *out = new prunesid_matrix{prunesid::TokenMatrix::from_values(
            std::span<const float>(values, static_cast<std::size_t>(tokens * dims)), tokens, dims)};
    });
}

prunesid_status prunesid_matrix_read(const char* path, prunesid_format format, prunesid_matrix** out) {
    if (path == nullptr) return null_argument("path");
    if (out == nullptr) return null_argument("out");
    return guarded([&] { *out = new prunesid_matrix{prunesid::read_token_matrix(path, to_format(format))}; });
}

prunesid_status prunesid_matrix_write(const prunesid_matrix* matrix, const char* path, prunesid_format format) {
    if (matrix == nullptr) return null_argument("matrix");
    if (path == nullptr) return null_argument("path");
    return guarded([&] { prunesid::write_token_matrix(matrix->tokens, path, to_format(format)); });
}

uint64_t prunesid_matrix_tokens(const prunesid_matrix* matrix) { return matrix ? matrix->tokens.tokens() : 0; }

uint64_t prunesid_matrix_dims(const prunesid_matrix* matrix) { return matrix ? matrix->tokens.dims() : 0; }

void prunesid_matrix_free(prunesid_matrix* matrix) { delete matrix; }

prunesid_status prunesid_information_score(const prunesid_matrix* matrix, prunesid_similarity source, double* rho,
                                           double* phi) {
    if (matrix == nullptr) return null_argument("matrix");
    return guarded([&] {
        const double r = prunesid::global_redundancy(prunesid::similarity_rows(matrix->tokens, to_source(source)));
        if (rho) *rho = r;
        if (phi) *phi = prunesid::information_score(r);
    });
}

prunesid_status prunesid_compress(const prunesid_matrix* matrix, uint64_t budget, const prunesid_config* config,
                                  prunesid_result** out) {
    if (matrix == nullptr) return null_argument("matrix");
    if (out == nullptr) return null_argument("out");
    return guarded([&] { *out = new prunesid_result{prunesid::compress(matrix->tokens, budget, to_config(config))}; });
}

prunesid_status prunesid_result_stats(const prunesid_result* result, prunesid_stats* out) {
    if (result == nullptr) return null_argument("result");
    if (out == nullptr) return null_argument("out");
    const auto& r = result->result;
    out->rho = r.stats.rho;
    out->phi = r.stats.phi;
    out->tau = r.stats.tau;
    out->lambda = r.stats.lambda;
    out->groups = r.groups.groups;
    out->retained = r.selection.retained.size();
    out->identity = r.identity ? 1 : 0;
    return PRUNESID_OK;
}

prunesid_status prunesid_result_retained(const prunesid_result* result, uint64_t* indices, size_t capacity,
                                         size_t* count) {
    if (result == nullptr) return null_argument("result");
    if (indices == nullptr && capacity > 0) return null_argument("indices");
    const auto& retained = result->result.selection.retained;
    for (std::size_t i = 0; i < retained.size() && i < capacity; ++i) indices[i] = retained[i];
    if (count) *count = retained.size();
    return PRUNESID_OK;
}

prunesid_status prunesid_result_report_json(const prunesid_result* result, const char* image_id,
                                            int32_t include_timing, char** json) {
    if (result == nullptr) return null_argument("result");
    if (json == nullptr) return null_argument("json");
    return guarded([&] {
        *json = duplicate(prunesid::render_canonical(
            prunesid::selection_report_json(result->result, image_id ? image_id : "", include_timing != 0)));
    });
}

prunesid_status prunesid_result_write_report(const prunesid_result* result, const char* image_id, const char* path,
                                             int32_t include_timing) {
    if (result == nullptr) return null_argument("result");
    if (path == nullptr) return null_argument("path");
    return guarded([&] {
        prunesid::write_selection_report(result->result, image_id ? image_id : "", path, include_timing != 0);
    });
}

void prunesid_result_free(prunesid_result* result) { delete result; }

prunesid_status prunesid_allocate_budgets(const double* phis, size_t count, uint64_t target_avg, uint64_t n_min,
                                          const uint64_t* caps, uint64_t* budgets) {
    if (phis == nullptr && count > 0) return null_argument("phis");
    if (budgets == nullptr && count > 0) return null_argument("budgets");
    return guarded([&] {
        std::vector<std::size_t> cap_values;
        if (caps) cap_values.assign(caps, caps + count);
        const prunesid::BudgetPlan plan =
            prunesid::allocate_dynamic_budgets(std::span<const double>(phis, count), target_avg, n_min, cap_values);
        for (std::size_t i = 0; i < count; ++i) budgets[i] = plan.per_image[i].n_prime;
    });
}

prunesid_status prunesid_batch_run(const prunesid_batch_options* options, char** summary_json) {
    if (options == nullptr) return null_argument("options");
    if (options->manifest_path == nullptr) return null_argument("options->manifest_path");
    prunesid_status status = PRUNESID_OK;
    const prunesid_status run = guarded([&] {
        const prunesid::Manifest manifest = prunesid::read_manifest(options->manifest_path);
        prunesid::BatchOptions batch;
        if (options->avg_budget > 0) batch.avg_budget = options->avg_budget;
        if (options->dynamic >= 0) batch.dynamic = options->dynamic != 0;
        if (options->min_budget > 0) batch.min_budget = options->min_budget;
        batch.jobs = options->jobs > 0 ? options->jobs : 1;
        batch.out_dir = options->out_dir ? options->out_dir : ".";
        batch.include_timing = options->include_timing != 0;

        const prunesid::BatchSummary summary = prunesid::run_batch(manifest, batch);
        if (summary_json) *summary_json = duplicate(prunesid::render_canonical(prunesid::batch_summary_json(summary)));
        for (const auto& image : summary.images) {
            if (image.ok) continue;
            status = set_error(status_of(image.error_kind), std::to_string(summary.failures()) + " of " +
                                                                std::to_string(summary.images.size()) +
                                                                " images failed; first: " + image.id + ": " +
                                                                image.error);
            break;
        }
    });
    return run != PRUNESID_OK ? run : status;
}

prunesid_status prunesid_oracle_run(const prunesid_matrix* matrix, uint64_t budget, uint64_t trials, uint64_t seed,
                                    const prunesid_config* config, char** json) {
    if (matrix == nullptr) return null_argument("matrix");
    if (json == nullptr) return null_argument("json");
    return guarded([&] {
        const prunesid::OracleReport report =
            prunesid::run_oracle(matrix->tokens, budget, trials, seed, to_config(config));
        *json = duplicate(prunesid::render_canonical(prunesid::oracle_report_json(report)));
    });
}

}  // extern "C"
