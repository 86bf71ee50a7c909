#include "prunesid/report.hpp"

#include "prunesid/error.hpp"
#include "prunesid/grouping.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace prunesid {

using nlohmann::json;

double canonical_number(double value) {
    if (!std::isfinite(value)) return value;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    const double rounded = std::strtod(buf, nullptr);
    return rounded == 0.0 ? 0.0 : rounded;  // no negative zero
}

std::string render_canonical(const json& document) { return document.dump(2) + "\n"; }

namespace {

json config_json(const CompressConfig& config) {
    return {
        {"alpha", canonical_number(config.alpha)},
        {"groups", config.groups ? json(*config.groups) : json(nullptr)},
        {"seed", config.seed},
        {"similarity", std::string(to_string(config.similarity))},
        {"strict", config.strict},
        {"svd_iters", config.svd_iters},
    };
}

}  // namespace

json selection_report_json(const CompressionResult& result, std::string_view image_id, bool include_timing) {
    const PrunedSelection& sel = result.selection;
    std::vector<std::size_t> suppressed;
    std::vector<std::size_t> over_quota;
    for (const auto& d : sel.dropped)
        (d.reason == DropReason::suppressed_by_nms ? suppressed : over_quota).push_back(d.index);

    std::vector<std::size_t> retained_per_group;
    if (!result.identity && result.groups.groups > 0) {
        retained_per_group.assign(result.groups.groups, 0);
        for (const std::size_t i : sel.retained) ++retained_per_group[result.groups.group_of[i]];
    }

    json doc = {
        {"schema_version", report_schema_version},
        {"image_id", std::string(image_id)},
        {"tokens", result.tokens},
        {"dims", result.dims},
        {"budget", result.budget},
        {"groups", result.groups.groups},
        {"alpha", canonical_number(result.stats.alpha)},
        {"lambda", canonical_number(result.stats.lambda)},
        {"rho", canonical_number(result.stats.rho)},
        {"phi", canonical_number(result.stats.phi)},
        {"tau", canonical_number(result.stats.tau)},
        {"identity_selection", result.identity},
        {"retained", sel.retained},
        {"retained_count", sel.retained.size()},
        {"quotas", sel.quotas},
        {"group_sizes",
         {
             {"before_nms", result.identity ? std::vector<std::size_t>{} : group_sizes(result.groups)},
             {"after_nms", sel.survivors_per_group},
             {"retained", retained_per_group},
         }},
        {"backfilled", sel.backfilled},
        {"dropped", {{"suppressed_by_nms", suppressed}, {"over_quota", over_quota}}},
        {"config", config_json(result.config)},
        {"warnings", result.warnings},
    };
    if (sel.retained.empty()) doc["warning"] = "no tokens retained";
    if (include_timing) {
        doc["timing_us"] = {
            {"grouping", result.timings.grouping_us}, {"similarity", result.timings.similarity_us},
            {"nms", result.timings.nms_us},           {"selection", result.timings.selection_us},
            {"total", result.timings.total_us},
        };
    }
    return doc;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot open '" + path.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) fail(ErrorKind::io, "failed writing '" + path.string() + "'");
}

void write_selection_report(const CompressionResult& result, std::string_view image_id,
                            const std::filesystem::path& path, bool include_timing) {
    write_text_file(path, render_canonical(selection_report_json(result, image_id, include_timing)));
}

namespace {

json tally_json(const Tally& t) {
    return {{"wins", t.wins},
            {"ties", t.ties},
            {"losses", t.losses},
            {"win_rate", canonical_number(t.win_rate())},
            {"tie_rate", canonical_number(t.tie_rate())}};
}

}  // namespace

json oracle_report_json(const OracleReport& report) {
    json trials = json::array();
    for (const auto& t : report.trials) {
        trials.push_back({
            {"seed", t.seed},
            {"j_compress", canonical_number(t.compress)},
            {"j_random", canonical_number(t.random)},
            {"j_ascend", canonical_number(t.ascend)},
            {"j_descend", canonical_number(t.descend)},
            {"j_best", canonical_number(t.best)},
            {"compress_subset", t.compress_subset},
            {"random_subset", t.random_subset},
            {"best_subset", t.best_subset},
        });
    }
    const bool all_ties = report.vs_random.ties == report.vs_random.total() &&
                          report.vs_ascend.ties == report.vs_ascend.total() &&
                          report.vs_descend.ties == report.vs_descend.total();
    return {
        {"schema_version", report_schema_version},
        {"tokens", report.tokens},
        {"dims", report.dims},
        {"budget", report.budget},
        {"seed", report.seed},
        {"trial_count", report.trials.size()},
        {"trials", trials},
        {"summary",
         {
             {"vs_random", tally_json(report.vs_random)},
             {"vs_ascend", tally_json(report.vs_ascend)},
             {"vs_descend", tally_json(report.vs_descend)},
             {"win_rate_vs_random", canonical_number(report.vs_random.win_rate())},
             {"near_optimal_fraction", canonical_number(near_optimal_fraction)},
             {"near_optimal_rate", canonical_number(report.near_optimal_rate())},
             {"all_ties", all_ties},
         }},
    };
}

}  // namespace prunesid
