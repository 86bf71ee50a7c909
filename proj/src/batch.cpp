#include "prunesid/batch.hpp"

#include "prunesid/log.hpp"
#include "prunesid/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <set>
#include <thread>

namespace prunesid {

using nlohmann::json;

namespace {

bool valid_id(const std::string& id) {
    if (id.empty() || id == "." || id == ".." || id == "summary") return false;
    return std::all_of(id.begin(), id.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '-' || c == '_' || c == '.';
    });
}

template <typename T>
T get_field(const json& object, const char* key, const std::string& where) {
    try {
        return object.at(key).get<T>();
    } catch (const json::exception&) {
        fail(ErrorKind::format, where + ": field '" + key + "' is missing or has the wrong type");
    }
}

// Runs `work(i)` for i in [0, count) on up to `jobs` threads.
template <typename Work>
void parallel_for(std::size_t count, std::size_t jobs, Work&& work) {
    jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(count, 1));
    if (jobs == 1) {
        for (std::size_t i = 0; i < count; ++i) work(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    for (std::size_t j = 0; j < jobs; ++j) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) work(i);
        });
    }
}

void record_failure(ImageOutcome& outcome, const std::exception& e) {
    outcome.ok = false;
    outcome.error = e.what();
    if (const auto* err = dynamic_cast<const Error*>(&e)) outcome.error_kind = err->kind();
    log::warn("image '" + outcome.id + "': " + outcome.error);
}

}  // namespace

Manifest parse_manifest(const json& document, const std::filesystem::path& base_dir) {
    if (!document.is_object() || !document.contains("images") || !document["images"].is_array()) {
        fail(ErrorKind::format, "manifest must be an object with an 'images' array");
    }
    Manifest manifest;
    std::set<std::string> seen;
    for (const json& entry : document["images"]) {
        const std::string where = "manifest entry " + std::to_string(manifest.images.size());
        if (!entry.is_object()) fail(ErrorKind::format, where + " is not an object");
        ManifestEntry image;
        image.id = get_field<std::string>(entry, "id", where);
        if (!valid_id(image.id)) {
            fail(ErrorKind::format, where + ": image id '" + image.id + "' must be non-empty [A-Za-z0-9._-]");
        }
        if (!seen.insert(image.id).second) fail(ErrorKind::format, "duplicate image id '" + image.id + "'");
        image.path = get_field<std::string>(entry, "path", where);
        if (image.path.is_relative()) image.path = base_dir / image.path;
        image.format = entry.contains("format") ? parse_token_format(get_field<std::string>(entry, "format", where))
                                                : infer_token_format(image.path);
        manifest.images.push_back(std::move(image));
    }

    if (document.contains("config")) {
        const json& config = document["config"];
        const std::string where = "manifest config";
        if (!config.is_object()) fail(ErrorKind::format, where + " must be an object");
        if (config.contains("avg_budget")) manifest.avg_budget = get_field<std::size_t>(config, "avg_budget", where);
        if (config.contains("dynamic")) manifest.dynamic = get_field<bool>(config, "dynamic", where);
        if (config.contains("min_budget")) manifest.min_budget = get_field<std::size_t>(config, "min_budget", where);
        if (config.contains("alpha")) manifest.config.alpha = get_field<double>(config, "alpha", where);
        if (config.contains("seed")) manifest.config.seed = get_field<std::uint64_t>(config, "seed", where);
        if (config.contains("groups") && !config["groups"].is_null())
            manifest.config.groups = get_field<std::size_t>(config, "groups", where);
        if (config.contains("similarity"))
            manifest.config.similarity = parse_similarity_source(get_field<std::string>(config, "similarity", where));
        if (config.contains("svd_iters")) manifest.config.svd_iters = get_field<int>(config, "svd_iters", where);
    }
    return manifest;
}

Manifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot open manifest '" + path.string() + "'");
    json document;
    try {
        document = json::parse(in);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::format, "manifest '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return parse_manifest(document, path.parent_path());
}

bool BatchSummary::all_ok() const { return failures() == 0; }

std::size_t BatchSummary::failures() const {
    return static_cast<std::size_t>(
        std::count_if(images.begin(), images.end(), [](const ImageOutcome& o) { return !o.ok; }));
}

BatchSummary run_batch(const Manifest& manifest, const BatchOptions& options) {
    if (manifest.images.empty()) fail(ErrorKind::parameter, "manifest lists no images");
    const std::optional<std::size_t> avg = options.avg_budget ? options.avg_budget : manifest.avg_budget;
    if (!avg || *avg < 1) fail(ErrorKind::parameter, "an average budget of at least 1 is required");

    BatchSummary summary;
    summary.avg_budget = *avg;
    summary.dynamic = options.dynamic.value_or(manifest.dynamic);
    summary.min_budget = options.min_budget.value_or(manifest.min_budget);
    if (summary.dynamic && (summary.min_budget < 1 || summary.min_budget > summary.avg_budget)) {
        fail(ErrorKind::parameter, "dynamic budgets need 1 <= min budget <= average budget");
    }
    std::error_code ec;
    std::filesystem::create_directories(options.out_dir, ec);
    if (ec) fail(ErrorKind::io, "cannot create output directory '" + options.out_dir.string() + "': " + ec.message());

    const std::size_t n = manifest.images.size();
    summary.images.resize(n);

    // Pass 1: redundancy and information score per image.
    parallel_for(n, options.jobs, [&](std::size_t i) {
        ImageOutcome& outcome = summary.images[i];
        outcome.id = manifest.images[i].id;
        try {
            const TokenMatrix tokens = read_token_matrix(manifest.images[i].path, manifest.images[i].format);
            outcome.tokens = tokens.tokens();
            outcome.rho = global_redundancy(similarity_rows(tokens, manifest.config.similarity));
            outcome.phi = information_score(outcome.rho);
            outcome.ok = true;
        } catch (const std::exception& e) {
            record_failure(outcome, e);
        }
    });

    std::vector<double> phis;
    std::vector<std::size_t> caps;
    std::vector<std::string> ids;
    std::vector<std::size_t> readable;
    for (std::size_t i = 0; i < n; ++i) {
        if (!summary.images[i].ok) continue;
        readable.push_back(i);
        phis.push_back(summary.images[i].phi);
        caps.push_back(summary.images[i].tokens);
        ids.push_back(summary.images[i].id);
    }

    if (summary.dynamic && !readable.empty()) {
        const BudgetPlan plan = allocate_dynamic_budgets(phis, summary.avg_budget, summary.min_budget, caps, ids);
        for (std::size_t r = 0; r < readable.size(); ++r) summary.images[readable[r]].n_prime = plan.per_image[r].n_prime;
        summary.warnings.insert(summary.warnings.end(), plan.warnings.begin(), plan.warnings.end());
    } else {
        for (const std::size_t i : readable) summary.images[i].n_prime = summary.avg_budget;
    }

    // Pass 2: compress under the planned budgets.
    parallel_for(readable.size(), options.jobs, [&](std::size_t r) {
        const std::size_t i = readable[r];
        ImageOutcome& outcome = summary.images[i];
        try {
            const TokenMatrix tokens = read_token_matrix(manifest.images[i].path, manifest.images[i].format);
            const CompressionResult result = compress(tokens, outcome.n_prime, manifest.config);
            outcome.retained = result.selection.retained.size();
            outcome.report = options.out_dir / (outcome.id + ".json");
            write_selection_report(result, outcome.id, outcome.report, options.include_timing);
        } catch (const std::exception& e) {
            record_failure(outcome, e);
        }
    });

    if (!phis.empty()) {
        summary.phi_histogram = information_histogram(phis, options.histogram_bins);
        double sum = 0.0;
        for (const std::size_t i : readable) sum += static_cast<double>(summary.images[i].n_prime);
        summary.n_prime_mean = sum / static_cast<double>(readable.size());
        double var = 0.0;
        for (const std::size_t i : readable) {
            const double d = static_cast<double>(summary.images[i].n_prime) - summary.n_prime_mean;
            var += d * d;
        }
        summary.n_prime_std = std::sqrt(var / static_cast<double>(readable.size()));
    } else {
        summary.phi_histogram.counts.assign(options.histogram_bins, 0);
    }

    write_text_file(options.out_dir / "summary.json", render_canonical(batch_summary_json(summary)));
    return summary;
}

json batch_summary_json(const BatchSummary& summary) {
    json images = json::array();
    for (const auto& o : summary.images) {
        json entry = {{"id", o.id}, {"status", o.ok ? "ok" : "error"}};
        if (o.ok) {
            entry["tokens"] = o.tokens;
            entry["rho"] = canonical_number(o.rho);
            entry["phi"] = canonical_number(o.phi);
            entry["n_prime"] = o.n_prime;
            entry["retained"] = o.retained;
            entry["report"] = o.report.filename().string();
        } else {
            entry["error"] = o.error;
        }
        images.push_back(std::move(entry));
    }
    return {
        {"schema_version", report_schema_version},
        {"mode", summary.dynamic ? "dynamic" : "fixed"},
        {"avg_budget", summary.avg_budget},
        {"min_budget", summary.min_budget},
        {"images", images},
        {"succeeded", summary.images.size() - summary.failures()},
        {"failed", summary.failures()},
        {"n_prime_mean", canonical_number(summary.n_prime_mean)},
        {"n_prime_std", canonical_number(summary.n_prime_std)},
        {"phi_histogram",
         {{"bins", summary.phi_histogram.counts.size()},
          {"min", canonical_number(summary.phi_histogram.min)},
          {"max", canonical_number(summary.phi_histogram.max)},
          {"counts", summary.phi_histogram.counts}}},
        {"warnings", summary.warnings},
    };
}

}  // namespace prunesid
