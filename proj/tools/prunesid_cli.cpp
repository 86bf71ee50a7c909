// Command-line front end. Talks to the engine only through the C API.
//
// Exit codes: 0 success, 1 validation error, 2 I/O error. Every error is
// written to stderr as a single "error: ..." line.

#include "prunesid/prunesid.h"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_validation = 1;
constexpr int exit_io = 2;

int report_failure(prunesid_status status) {
    std::cerr << "error: " << prunesid_last_error() << '\n';
    return status == PRUNESID_ERROR_IO ? exit_io : exit_validation;
}

struct MatrixDeleter {
    void operator()(prunesid_matrix* m) const { prunesid_matrix_free(m); }
};
struct ResultDeleter {
    void operator()(prunesid_result* r) const { prunesid_result_free(r); }
};
struct StringDeleter {
    void operator()(char* s) const { prunesid_string_free(s); }
};
using MatrixHandle = std::unique_ptr<prunesid_matrix, MatrixDeleter>;
using ResultHandle = std::unique_ptr<prunesid_result, ResultDeleter>;
using OwnedString = std::unique_ptr<char, StringDeleter>;

prunesid_format format_for(const std::string& path, const std::string& flag) {
    if (flag == "csv") return PRUNESID_FORMAT_CSV;
    if (flag == "tokm") return PRUNESID_FORMAT_TOKM;
    return std::filesystem::path(path).extension() == ".csv" ? PRUNESID_FORMAT_CSV : PRUNESID_FORMAT_TOKM;
}

int emit(const char* text, const std::string& output) {
    if (output.empty()) {
        std::cout << text;
        return exit_ok;
    }
    std::FILE* f = std::fopen(output.c_str(), "wb");
    if (f == nullptr) {
        std::cerr << "error: cannot open '" << output << "' for writing\n";
        return exit_io;
    }
    const std::string body(text);
    const bool ok = std::fwrite(body.data(), 1, body.size(), f) == body.size();
    std::fclose(f);
    if (!ok) {
        std::cerr << "error: failed writing '" << output << "'\n";
        return exit_io;
    }
    return exit_ok;
}

struct CommonFlags {
    std::optional<std::uint64_t> groups;
    double alpha = 32.0;
    std::uint64_t seed = 0;
    std::string sim = "raw";

    void attach(CLI::App* cmd) {
        cmd->add_option("--groups", groups, "Group count K (default floor(N/4))");
        cmd->add_option("--alpha", alpha, "Threshold divisor, lambda = N / alpha")->capture_default_str();
        cmd->add_option("--seed", seed, "Seed for the randomised SVD")->capture_default_str();
        cmd->add_option("--sim", sim, "Similarity source")->check(CLI::IsMember({"raw", "rescaled"}))
            ->capture_default_str();
    }

    prunesid_config config() const {
        prunesid_config c;
        prunesid_config_init(&c);
        c.groups = groups.value_or(0);
        c.alpha = alpha;
        c.seed = seed;
        c.similarity = sim == "rescaled" ? PRUNESID_SIMILARITY_RESCALED : PRUNESID_SIMILARITY_RAW;
        return c;
    }
};

int run_compress(const std::string& input, const std::string& format, std::uint64_t budget, const CommonFlags& flags,
                 const std::string& output, const std::string& image_id, bool timing) {
    if (flags.groups && *flags.groups == 0) {
        std::cerr << "error: --groups must be at least 1\n";
        return exit_validation;
    }
    prunesid_matrix* raw_matrix = nullptr;
    if (auto s = prunesid_matrix_read(input.c_str(), format_for(input, format), &raw_matrix); s != PRUNESID_OK)
        return report_failure(s);
    MatrixHandle matrix(raw_matrix);

    const prunesid_config config = flags.config();
    prunesid_result* raw_result = nullptr;
    if (auto s = prunesid_compress(matrix.get(), budget, &config, &raw_result); s != PRUNESID_OK)
        return report_failure(s);
    ResultHandle result(raw_result);

    const std::string id = image_id.empty() ? std::filesystem::path(input).stem().string() : image_id;
    char* raw_json = nullptr;
    if (auto s = prunesid_result_report_json(result.get(), id.c_str(), timing ? 1 : 0, &raw_json); s != PRUNESID_OK)
        return report_failure(s);
    OwnedString json(raw_json);
    return emit(json.get(), output);
}

int run_batch(const std::string& manifest, std::optional<std::uint64_t> avg_budget, bool dynamic,
              std::optional<std::uint64_t> min_budget, std::uint64_t jobs, const std::string& out_dir, bool timing) {
    if ((avg_budget && *avg_budget == 0) || (min_budget && *min_budget == 0)) {
        std::cerr << "error: budgets must be at least 1\n";
        return exit_validation;
    }
    prunesid_batch_options options;
    prunesid_batch_options_init(&options);
    options.manifest_path = manifest.c_str();
    options.avg_budget = avg_budget.value_or(0);
    options.dynamic = dynamic ? 1 : -1;
    options.min_budget = min_budget.value_or(0);
    options.jobs = jobs;
    options.out_dir = out_dir.c_str();
    options.include_timing = timing ? 1 : 0;

    char* raw_summary = nullptr;
    const prunesid_status status = prunesid_batch_run(&options, &raw_summary);
    OwnedString summary(raw_summary);
    if (summary) std::cout << summary.get();
    return status == PRUNESID_OK ? exit_ok : report_failure(status);
}

int run_oracle(const std::string& input, const std::string& format, std::uint64_t budget, std::uint64_t trials,
               const CommonFlags& flags, const std::string& output) {
    prunesid_matrix* raw_matrix = nullptr;
    if (auto s = prunesid_matrix_read(input.c_str(), format_for(input, format), &raw_matrix); s != PRUNESID_OK)
        return report_failure(s);
    MatrixHandle matrix(raw_matrix);

    const prunesid_config config = flags.config();
    char* raw_json = nullptr;
    if (auto s = prunesid_oracle_run(matrix.get(), budget, trials, flags.seed, &config, &raw_json); s != PRUNESID_OK)
        return report_failure(s);
    OwnedString json(raw_json);
    return emit(json.get(), output);
}

int run_convert(const std::string& input, const std::string& from, const std::string& output, const std::string& to) {
    prunesid_matrix* raw_matrix = nullptr;
    if (auto s = prunesid_matrix_read(input.c_str(), format_for(input, from), &raw_matrix); s != PRUNESID_OK)
        return report_failure(s);
    MatrixHandle matrix(raw_matrix);
    if (auto s = prunesid_matrix_write(matrix.get(), output.c_str(), format_for(output, to)); s != PRUNESID_OK)
        return report_failure(s);
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"prunesid: training-free visual token compression"};
    app.set_version_flag("--version", std::string(prunesid_version()));
    app.require_subcommand(1);

    std::string input;
    std::string format;
    std::string output;
    std::uint64_t budget = 0;
    CommonFlags flags;

    auto* compress = app.add_subcommand("compress", "Compress one token matrix and write a selection report");
    std::string image_id;
    bool timing = false;
    compress->add_option("--input", input, "Token matrix (TOKM or CSV)")->required();
    compress->add_option("--budget", budget, "Tokens to retain (N)")->required();
    compress->add_option("--format", format, "Input format (default: from extension)")
        ->check(CLI::IsMember({"tokm", "csv"}));
    compress->add_option("--output", output, "Report path (default: stdout)");
    compress->add_option("--id", image_id, "Image id recorded in the report (default: file stem)");
    compress->add_flag("--timing", timing, "Include per-stage timings (makes reports run-dependent)");
    flags.attach(compress);

    auto* batch = app.add_subcommand("batch", "Compress every image listed in a manifest");
    std::string manifest;
    std::optional<std::uint64_t> avg_budget;
    std::optional<std::uint64_t> min_budget;
    bool dynamic = false;
    std::uint64_t jobs = 1;
    std::string out_dir = ".";
    batch->add_option("--manifest", manifest, "Manifest JSON")->required();
    batch->add_option("--avg-budget", avg_budget, "Average tokens per image (fixed N when not dynamic)");
    batch->add_flag("--dynamic", dynamic, "Scale budgets with each image's information score");
    batch->add_option("--min-budget", min_budget, "Smallest dynamic budget (default 16)");
    batch->add_option("--jobs", jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    batch->add_option("--out-dir", out_dir, "Directory for reports and summary.json")->capture_default_str();
    batch->add_flag("--timing", timing, "Include per-stage timings in image reports");

    auto* oracle = app.add_subcommand("oracle", "Compare compress against baselines and the exhaustive optimum");
    std::uint64_t trials = 0;
    oracle->add_option("--input", input, "Token matrix (T <= 16)")->required();
    oracle->add_option("--budget", budget, "Tokens to retain (N)")->required();
    oracle->add_option("--trials", trials, "Number of seeded trials")->required();
    oracle->add_option("--format", format, "Input format (default: from extension)")
        ->check(CLI::IsMember({"tokm", "csv"}));
    oracle->add_option("--output", output, "Report path (default: stdout)");
    flags.attach(oracle);

    auto* convert = app.add_subcommand("convert", "Convert a token matrix between TOKM and CSV");
    std::string to_format;
    convert->add_option("--input", input, "Source matrix")->required();
    convert->add_option("--output", output, "Destination path")->required();
    convert->add_option("--from", format, "Source format (default: from extension)")
        ->check(CLI::IsMember({"tokm", "csv"}));
    convert->add_option("--to", to_format, "Destination format (default: from extension)")
        ->check(CLI::IsMember({"tokm", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_validation;
    }

    if (compress->parsed()) return run_compress(input, format, budget, flags, output, image_id, timing);
    if (batch->parsed()) return run_batch(manifest, avg_budget, dynamic, min_budget, jobs, out_dir, timing);
    if (oracle->parsed()) return run_oracle(input, format, budget, trials, flags, output);
    return run_convert(input, format, output, to_format);
}
