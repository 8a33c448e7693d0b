#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uic/uic.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitCodec = 4;

// Bad flag values detected after parsing.
class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

const std::map<std::string, uic::ShrinkMode> kShrinkModes{
    {"soft", uic::ShrinkMode::soft}, {"hard", uic::ShrinkMode::hard}, {"none", uic::ShrinkMode::none}};

std::vector<std::string> technique_names() {
    std::vector<std::string> names;
    for (auto t : uic::kAllTechniques) names.push_back(uic::technique_name(t));
    return names;
}

// "sp:<density>"
uic::NoiseSpec parse_noise(const std::string& text, std::uint64_t seed) {
    const std::string prefix = "sp:";
    if (text.rfind(prefix, 0) != 0) throw UsageError("--noise must look like sp:<density>");
    double density = 0.0;
    try {
        std::size_t used = 0;
        density = std::stod(text.substr(prefix.size()), &used);
        if (used != text.size() - prefix.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
        throw UsageError("--noise density is not a number: " + text);
    }
    if (!(density >= 0.0 && density <= 1.0)) throw UsageError("--noise density must be in [0, 1]");
    return uic::NoiseSpec{uic::NoiseKind::salt_and_pepper, density, seed};
}

// Input images that cannot be read or parsed are I/O failures.
uic::Image load_input(const fs::path& path) {
    try {
        return uic::read_pgm(path);
    } catch (const uic::FormatError& e) {
        throw uic::IoError(path.string() + ": " + e.what());
    }
}

uic::CompressedArtifact load_artifact(const fs::path& path) { return uic::deserialize(uic::read_file(path)); }

struct CodecFlags {
    std::string technique = "haar+morton+klt";
    std::size_t block = 64;
    double cr = 4.0;
    std::size_t levels = 1;
    std::string shrink = "soft";
    unsigned bits = 8;
    std::string noise;
    std::uint64_t seed = 0;
};

void add_codec_flags(CLI::App* cmd, CodecFlags& f, bool with_technique) {
    if (with_technique)
        cmd->add_option("--technique", f.technique, "Technique name")
            ->check(CLI::IsMember(technique_names()))
            ->capture_default_str();
    cmd->add_option("--block", f.block, "Sub-block side in pixels")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--cr", f.cr, "Target compression ratio (>= 1)")->check(CLI::Range(1.0, 1e12))->capture_default_str();
    cmd->add_option("--levels", f.levels, "Pyramid levels for the haar technique")
        ->check(CLI::Range(1, 20))
        ->capture_default_str();
    cmd->add_option("--shrink", f.shrink, "Detail shrinkage")->check(CLI::IsMember({"soft", "hard", "none"}))->capture_default_str();
    cmd->add_option("--bits", f.bits, "Quantizer bit budget per coefficient")->check(CLI::Range(2, 16))->capture_default_str();
    cmd->add_option("--noise", f.noise, "Pre-compression noise, sp:<density>");
    cmd->add_option("--seed", f.seed, "Noise seed")->capture_default_str();
}

uic::CodecConfig to_config(const CodecFlags& f) {
    uic::CodecConfig cfg;
    cfg.technique = *uic::parse_technique(f.technique);
    cfg.block = f.block;
    cfg.target_cr = f.cr;
    cfg.levels = f.levels;
    cfg.shrink = kShrinkModes.at(f.shrink);
    cfg.bits = f.bits;
    if (!f.noise.empty()) cfg.noise = parse_noise(f.noise, f.seed);
    return cfg;
}

int run_compress(const CodecFlags& f, const fs::path& in, const fs::path& out) {
    const uic::CodecConfig cfg = to_config(f);
    const uic::Image img = load_input(in);
    const auto start = std::chrono::steady_clock::now();
    const auto bytes = uic::serialize(uic::compress(img, cfg));
    const std::chrono::duration<double, std::milli> elapsed = std::chrono::steady_clock::now() - start;
    uic::write_file_atomic(out, bytes);
    std::printf("cr %.4f\ntime_ms %.1f\n", uic::measured_cr(img.size(), bytes.size()), elapsed.count());
    return kExitOk;
}

int run_decompress(const fs::path& in, const fs::path& out) {
    uic::write_pgm(out, uic::decompress(load_artifact(in)));
    return kExitOk;
}

int run_metrics(const fs::path& in, const fs::path& ref, const std::optional<fs::path>& artifact) {
    const uic::Image test = load_input(in);
    const uic::Image reference = load_input(ref);
    if (test.width() != reference.width() || test.height() != reference.height())
        throw UsageError("--in and --ref have different dimensions");
    const double m = uic::mse(reference, test);
    std::printf("mse %s\npsnr %s\n", uic::detail::fixed4(m).c_str(), uic::detail::fixed4(uic::psnr(m)).c_str());
    if (artifact) {
        const auto size = fs::file_size(*artifact);
        std::printf("cr %s\n", uic::detail::fixed4(uic::measured_cr(reference.size(), size)).c_str());
    }
    return kExitOk;
}

int run_noise(const std::string& noise, std::uint64_t seed, const fs::path& in, const fs::path& out) {
    const uic::NoiseSpec spec = parse_noise(noise, seed);
    uic::write_pgm(out, uic::add_salt_pepper(load_input(in), spec));
    return kExitOk;
}

uic::BlockStack eigen_stack(const uic::Image& img, std::size_t block, const std::string& variant, uic::ShrinkMode shrink,
                            const std::optional<uic::NoiseSpec>& noise) {
    uic::CodecConfig cfg;
    cfg.technique = variant == "tile" ? uic::Technique::morton_klt : uic::Technique::haar_morton_klt;
    cfg.block = block;
    cfg.shrink = shrink;
    cfg.noise = noise;
    return uic::klt_input_stack(img, cfg);
}

int run_eigen_report(const fs::path& in, std::size_t block, const std::string& variant, const std::string& shrink,
                     const std::string& noise, std::uint64_t seed, const fs::path& out) {
    std::optional<uic::NoiseSpec> spec;
    if (!noise.empty()) spec = parse_noise(noise, seed);
    const uic::Image img = load_input(in);
    const auto report = uic::energy_report(uic::fit(eigen_stack(img, block, variant, kShrinkModes.at(shrink), spec)));
    uic::write_file_atomic(out, uic::eigen_csv(report));
    std::printf("channels %zu\n", report.eigenvalues.size());
    if (report.zero_trace)
        std::printf("zero_trace true\n");
    else
        std::printf("channels_for_0.95 %zu\n", report.channels_for(0.95));
    return kExitOk;
}

struct ExperimentFlags {
    std::string preset = "exp1";
    double cr = 4.0;
    std::size_t block = 64;
    std::size_t haar_block = 256;
    std::size_t levels = 1;
    std::string shrink = "soft";
    unsigned bits = 8;
    std::string noise;
    std::uint64_t seed = 0;
    std::string report;
};

struct Preset {
    double cr;
    std::size_t block, haar_block, levels;
    const char* noise;
};

const std::map<std::string, Preset> kPresets{
    {"exp1", {4.0, 64, 256, 1, ""}},
    {"exp2", {4.0, 64, 256, 1, "sp:0.02"}},
    {"exp3", {16.0, 64, 128, 2, ""}},
    {"exp4", {16.0, 64, 128, 2, "sp:0.02"}},
};

struct TechniqueRun {
    uic::MetricsRow row;
    std::vector<std::uint8_t> artifact;
    uic::Image reconstruction;
    std::string eigen_csv;
};

TechniqueRun run_technique(const uic::Image& img, const uic::CodecConfig& cfg) {
    TechniqueRun run;
    const uic::CompressedArtifact a = uic::compress(img, cfg);
    run.artifact = uic::serialize(a);
    run.reconstruction = uic::decompress(uic::deserialize(run.artifact));
    const double m = uic::mse(img, run.reconstruction);
    run.row = {uic::technique_name(cfg.technique), uic::measured_cr(img.size(), run.artifact.size()), m, uic::psnr(m)};
    if (uic::traits(cfg.technique).uses_klt)
        run.eigen_csv = uic::eigen_csv(uic::energy_report(uic::fit(uic::klt_input_stack(img, cfg))));
    return run;
}

int run_experiment(ExperimentFlags f, const CLI::App& cmd, const fs::path& in, const fs::path& out_dir) {
    const Preset& p = kPresets.at(f.preset);
    if (cmd.count("--cr") == 0) f.cr = p.cr;
    if (cmd.count("--block") == 0) f.block = p.block;
    if (cmd.count("--haar-block") == 0) f.haar_block = p.haar_block;
    if (cmd.count("--levels") == 0) f.levels = p.levels;
    if (cmd.count("--noise") == 0) f.noise = p.noise;

    std::optional<uic::NoiseSpec> noise;
    if (!f.noise.empty()) noise = parse_noise(f.noise, f.seed);
    const uic::Image img = load_input(in);

    std::vector<uic::CodecConfig> configs;
    for (auto t : uic::kAllTechniques) {
        uic::CodecConfig cfg;
        cfg.technique = t;
        const auto tr = uic::traits(t);
        cfg.block = tr.uses_haar && !tr.uses_klt ? f.haar_block : f.block;
        cfg.target_cr = f.cr;
        cfg.levels = f.levels;
        cfg.shrink = kShrinkModes.at(f.shrink);
        cfg.bits = f.bits;
        cfg.noise = noise;
        configs.push_back(cfg);
    }

    std::vector<std::future<TechniqueRun>> pending;
    for (const auto& cfg : configs) pending.push_back(std::async(std::launch::async, run_technique, std::cref(img), cfg));
    std::vector<TechniqueRun> runs;
    for (auto& fut : pending) runs.push_back(fut.get());

    fs::create_directories(out_dir);
    std::vector<uic::MetricsRow> rows;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const std::string id = std::to_string(static_cast<int>(configs[i].technique));
        uic::write_file_atomic(out_dir / ("t" + id + ".uic"), runs[i].artifact);
        uic::write_pgm(out_dir / ("t" + id + ".pgm"), runs[i].reconstruction);
        if (!runs[i].eigen_csv.empty()) uic::write_file_atomic(out_dir / ("eigen_t" + id + ".csv"), runs[i].eigen_csv);
        rows.push_back(runs[i].row);
    }
    if (noise) uic::write_pgm(out_dir / "noisy.pgm", uic::add_salt_pepper(img, *noise));

    const uic::Report report = uic::build_report(rows);
    uic::write_file_atomic(out_dir / "report.txt", report.table);
    uic::write_file_atomic(f.report.empty() ? out_dir / "report.csv" : fs::path(f.report), report.csv);
    std::fputs(report.table.c_str(), stdout);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lossy grayscale image codec: Haar packets, block scans, cross-block KLT"};
    app.require_subcommand(1);
    std::function<int()> action;

    std::string in, out, ref, artifact_path;

    CodecFlags compress_flags;
    auto* compress = app.add_subcommand("compress", "Compress a PGM image to a .uic artifact");
    add_codec_flags(compress, compress_flags, true);
    compress->add_option("--in", in, "Input PGM")->required();
    compress->add_option("--out", out, "Output .uic")->required();
    compress->callback([&] { action = [&] { return run_compress(compress_flags, in, out); }; });

    auto* decompress = app.add_subcommand("decompress", "Decode a .uic artifact to PGM");
    decompress->add_option("--in", in, "Input .uic")->required();
    decompress->add_option("--out", out, "Output PGM")->required();
    decompress->callback([&] { action = [&] { return run_decompress(in, out); }; });

    auto* metrics = app.add_subcommand("metrics", "MSE and PSNR of an image against a reference");
    metrics->add_option("--in", in, "Reconstructed PGM")->required();
    metrics->add_option("--ref", ref, "Reference PGM")->required();
    metrics->add_option("--artifact", artifact_path, "Artifact whose size gives the CR");
    metrics->callback([&] {
        action = [&] {
            return run_metrics(in, ref, artifact_path.empty() ? std::nullopt : std::optional<fs::path>(artifact_path));
        };
    });

    std::string noise_text;
    std::uint64_t noise_seed = 0;
    auto* noise = app.add_subcommand("noise", "Add salt-and-pepper noise to a PGM");
    noise->add_option("--noise", noise_text, "sp:<density>")->required();
    noise->add_option("--seed", noise_seed, "Noise seed")->capture_default_str();
    noise->add_option("--in", in, "Input PGM")->required();
    noise->add_option("--out", out, "Output PGM")->required();
    noise->callback([&] { action = [&] { return run_noise(noise_text, noise_seed, in, out); }; });

    ExperimentFlags exp;
    auto* experiment = app.add_subcommand("experiment", "Run all seven techniques and write reports");
    experiment->add_option("--preset", exp.preset, "Geometry preset")->check(CLI::IsMember({"exp1", "exp2", "exp3", "exp4"}))->capture_default_str();
    experiment->add_option("--cr", exp.cr, "Target compression ratio (>= 1)")->check(CLI::Range(1.0, 1e12));
    experiment->add_option("--block", exp.block, "Sub-block side for the scan techniques")->check(CLI::PositiveNumber);
    experiment->add_option("--haar-block", exp.haar_block, "Sub-block side for the haar+scan techniques")->check(CLI::PositiveNumber);
    experiment->add_option("--levels", exp.levels, "Pyramid levels for the haar technique")->check(CLI::Range(1, 20));
    experiment->add_option("--shrink", exp.shrink, "Detail shrinkage")->check(CLI::IsMember({"soft", "hard", "none"}))->capture_default_str();
    experiment->add_option("--bits", exp.bits, "Quantizer bit budget per coefficient")->check(CLI::Range(2, 16))->capture_default_str();
    experiment->add_option("--noise", exp.noise, "Pre-compression noise, sp:<density>");
    experiment->add_option("--seed", exp.seed, "Noise seed")->capture_default_str();
    experiment->add_option("--report", exp.report, "CSV report path (default <out>/report.csv)");
    experiment->add_option("--in", in, "Input PGM")->required();
    experiment->add_option("--out", out, "Output directory")->required();
    experiment->callback([&] { action = [&] { return run_experiment(exp, *experiment, in, out); }; });

    std::size_t eigen_block = 64;
    std::string variant = "packet", eigen_shrink = "soft", eigen_noise;
    std::uint64_t eigen_seed = 0;
    auto* eigen = app.add_subcommand("eigen-report", "Eigenvalue energy report of the KLT input stack");
    eigen->add_option("--block", eigen_block, "Sub-block side")->check(CLI::PositiveNumber)->capture_default_str();
    eigen->add_option("--variant", variant, "Stack variant")->check(CLI::IsMember({"tile", "packet"}))->capture_default_str();
    eigen->add_option("--shrink", eigen_shrink, "Detail shrinkage (packet variant)")->check(CLI::IsMember({"soft", "hard", "none"}))->capture_default_str();
    eigen->add_option("--noise", eigen_noise, "Pre-transform noise, sp:<density>");
    eigen->add_option("--seed", eigen_seed, "Noise seed")->capture_default_str();
    eigen->add_option("--in", in, "Input PGM")->required();
    eigen->add_option("--out", out, "Output CSV")->required();
    eigen->callback([&] {
        action = [&] { return run_eigen_report(in, eigen_block, variant, eigen_shrink, eigen_noise, eigen_seed, out); };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        return action();
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const uic::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "codec error: " << e.what() << "\n";
        return kExitCodec;
    }
}
