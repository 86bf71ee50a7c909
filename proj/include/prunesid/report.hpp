#pragma once

#include "prunesid/oracle.hpp"
#include "prunesid/pipeline.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>

namespace prunesid {

inline constexpr int report_schema_version = 1;

/// Round to 9 significant digits so serialised reports are stable.
double canonical_number(double value);

/// Sorted keys, two-space indent, trailing newline.
std::string render_canonical(const nlohmann::json& document);

/// Stage timings vary between runs; reports are byte-identical only when
/// `include_timing` is false.
nlohmann::json selection_report_json(const CompressionResult& result, std::string_view image_id,
                                     bool include_timing = false);

void write_selection_report(const CompressionResult& result, std::string_view image_id,
                            const std::filesystem::path& path, bool include_timing = false);

nlohmann::json oracle_report_json(const OracleReport& report);

/// Writes `text` to `path`, throwing ErrorKind::io on failure.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace prunesid
