#include "prunesid/token_io.hpp"

#include "prunesid/error.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace prunesid {
namespace {

template <typename T>
T load_le(const unsigned char* bytes) {
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(bytes[i]) << (8 * i);
    return value;
}

template <typename T>
void store_le(std::string& out, T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot open '" + path.string() + "' for reading");
    return in;
}

TokenMatrix read_tokm(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
    if (bytes.size() < tokm_header_bytes) {
        fail(ErrorKind::format, "'" + path.string() + "': truncated TOKM header (" + std::to_string(bytes.size()) +
                                    " bytes)");
    }
    if (std::memcmp(data, "TOKM", 4) != 0) fail(ErrorKind::format, "'" + path.string() + "': bad magic, not a TOKM file");
    const auto version = load_le<std::uint32_t>(data + 4);
    if (version != tokm_version) {
        fail(ErrorKind::format, "'" + path.string() + "': unsupported TOKM version " + std::to_string(version));
    }
    const auto tokens = load_le<std::uint64_t>(data + 8);
    const auto dims = load_le<std::uint64_t>(data + 16);
    const auto dtype = load_le<std::uint32_t>(data + 24);
    if (dtype != tokm_dtype_f32) {
        fail(ErrorKind::format, "'" + path.string() + "': unsupported TOKM dtype " + std::to_string(dtype));
    }
    const std::uint64_t max_values = (std::numeric_limits<std::uint64_t>::max() - tokm_header_bytes) / 4;
    if (dims != 0 && tokens > max_values / dims) fail(ErrorKind::format, "'" + path.string() + "': TOKM shape overflows");
    const std::uint64_t expected = tokm_header_bytes + 4 * tokens * dims;
    if (bytes.size() != expected) {
        fail(ErrorKind::format, "'" + path.string() + "': size mismatch, header says " + std::to_string(tokens) + "x" +
                                    std::to_string(dims) + " (" + std::to_string(expected) + " bytes) but file has " +
                                    std::to_string(bytes.size()) + " bytes");
    }

    std::vector<float> values(tokens * dims);
    for (std::size_t i = 0; i < values.size(); ++i)
        values[i] = std::bit_cast<float>(load_le<std::uint32_t>(data + tokm_header_bytes + 4 * i));
    return TokenMatrix::from_values(std::span<const float>(values), tokens, dims);
}

TokenMatrix read_csv(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    std::vector<double> values;
    std::size_t width = 0;
    std::size_t rows = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;

        std::size_t count = 0;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            std::string_view field(line.data() + start, (comma == std::string::npos ? line.size() : comma) - start);
            while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
            while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
            double v = 0.0;
            const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
            if (field.empty() || ec != std::errc() || end != field.data() + field.size()) {
                fail(ErrorKind::format, "'" + path.string() + "' line " + std::to_string(line_no) +
                                            ": cannot parse value '" + std::string(field) + "'");
            }
            values.push_back(v);
            ++count;
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (rows == 0) {
            width = count;
        } else if (count != width) {
            fail(ErrorKind::format, "'" + path.string() + "' line " + std::to_string(line_no) + ": expected " +
                                        std::to_string(width) + " values, got " + std::to_string(count));
        }
        ++rows;
    }
    if (rows == 0) fail(ErrorKind::format, "'" + path.string() + "': no rows");
    return TokenMatrix::from_values(std::span<const double>(values), rows, width);
}

}  // namespace

TokenFormat parse_token_format(std::string_view text) {
    if (text == "tokm") return TokenFormat::tokm;
    if (text == "csv") return TokenFormat::csv;
    fail(ErrorKind::parameter, "format must be tokm or csv, got '" + std::string(text) + "'");
}

std::string_view to_string(TokenFormat format) { return format == TokenFormat::tokm ? "tokm" : "csv"; }

TokenFormat infer_token_format(const std::filesystem::path& path) {
    return path.extension() == ".csv" ? TokenFormat::csv : TokenFormat::tokm;
}

TokenMatrix read_token_matrix(const std::filesystem::path& path, TokenFormat format) {
    return format == TokenFormat::tokm ? read_tokm(path) : read_csv(path);
}

void write_token_matrix(const TokenMatrix& tokens, const std::filesystem::path& path, TokenFormat format) {
    std::string out;
    const RowMatrix& v = tokens.values();
    if (format == TokenFormat::tokm) {
        out.reserve(tokm_header_bytes + 4 * static_cast<std::size_t>(v.size()));
        out.append("TOKM", 4);
        store_le<std::uint32_t>(out, tokm_version);
        store_le<std::uint64_t>(out, tokens.tokens());
        store_le<std::uint64_t>(out, tokens.dims());
        store_le<std::uint32_t>(out, tokm_dtype_f32);
        for (Eigen::Index i = 0; i < v.size(); ++i)
            store_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v.data()[i])));
    } else {
        std::array<char, 32> buf{};
        for (Eigen::Index r = 0; r < v.rows(); ++r) {
            for (Eigen::Index c = 0; c < v.cols(); ++c) {
                if (c) out.push_back(',');
                const int len = std::snprintf(buf.data(), buf.size(), "%.17g", v(r, c));
                out.append(buf.data(), static_cast<std::size_t>(len));
            }
            out.push_back('\n');
        }
    }

    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) fail(ErrorKind::io, "cannot open '" + path.string() + "' for writing");
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!file) fail(ErrorKind::io, "failed writing '" + path.string() + "'");
}

}  // namespace prunesid
