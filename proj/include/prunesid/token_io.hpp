#pragma once

#include "prunesid/tensor.hpp"

#include <cstdint>
#include <filesystem>
#include <string_view>

namespace prunesid {

enum class TokenFormat { tokm, csv };

TokenFormat parse_token_format(std::string_view text);
std::string_view to_string(TokenFormat format);

/// `.csv` selects CSV, anything else TOKM.
TokenFormat infer_token_format(const std::filesystem::path& path);

// TOKM layout, all integers little-endian:
//   0  char[4]  "TOKM"
//   4  u32      version (1)
//   8  u64      T
//   16 u64      D
//   24 u32      dtype (1 = IEEE-754 binary32)
//   28 f32[T*D] row-major payload
inline constexpr std::uint32_t tokm_version = 1;
inline constexpr std::uint32_t tokm_dtype_f32 = 1;
inline constexpr std::size_t tokm_header_bytes = 28;

TokenMatrix read_token_matrix(const std::filesystem::path& path, TokenFormat format);

/// TOKM stores binary32, so values are rounded to float on write. CSV is
/// written with 17 significant digits and round-trips doubles exactly.
void write_token_matrix(const TokenMatrix& tokens, const std::filesystem::path& path, TokenFormat format);

}  // namespace prunesid
