#pragma once

#include "prunesid/budget.hpp"
#include "prunesid/error.hpp"
#include "prunesid/pipeline.hpp"
#include "prunesid/token_io.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace prunesid {

struct ManifestEntry {
    std::string id;
    std::filesystem::path path;  // resolved against the manifest directory
    TokenFormat format = TokenFormat::tokm;
};

/// JSON manifest:
///   {"images": [{"id": "a", "path": "a.tokm", "format": "tokm"}, ...],
///    "config": {"avg_budget": 64, "dynamic": false, "min_budget": 16,
///               "alpha": 32, "seed": 0, "groups": 16, "similarity": "raw"}}
/// Every config key is optional; "format" defaults from the file extension.
struct Manifest {
    std::vector<ManifestEntry> images;
    CompressConfig config;
    std::optional<std::size_t> avg_budget;
    bool dynamic = false;
    std::size_t min_budget = default_min_budget;
};

Manifest parse_manifest(const nlohmann::json& document, const std::filesystem::path& base_dir);
Manifest read_manifest(const std::filesystem::path& path);

/// Command-line overrides on top of the manifest config.
struct BatchOptions {
    std::optional<std::size_t> avg_budget;
    std::optional<bool> dynamic;
    std::optional<std::size_t> min_budget;
    std::size_t jobs = 1;
    std::filesystem::path out_dir = ".";
    std::size_t histogram_bins = 10;
    bool include_timing = false;
};

struct ImageOutcome {
    std::string id;
    bool ok = false;
    std::string error;
    ErrorKind error_kind = ErrorKind::internal;
    std::size_t tokens = 0;
    double rho = 0.0;
    double phi = 0.0;
    std::size_t n_prime = 0;
    std::size_t retained = 0;
    std::filesystem::path report;
};

struct BatchSummary {
    bool dynamic = false;
    std::size_t avg_budget = 0;
    std::size_t min_budget = 0;
    std::vector<ImageOutcome> images;
    Histogram phi_histogram;
    double n_prime_mean = 0.0;
    double n_prime_std = 0.0;
    std::vector<std::string> warnings;

    bool all_ok() const;
    std::size_t failures() const;
};

/// Two passes: redundancy per image, then compression under each image's
/// budget (dynamic or fixed). Writes `<out_dir>/<id>.json` per image and
/// `<out_dir>/summary.json`. Per-image failures are recorded, not thrown.
BatchSummary run_batch(const Manifest& manifest, const BatchOptions& options);

nlohmann::json batch_summary_json(const BatchSummary& summary);

}  // namespace prunesid
