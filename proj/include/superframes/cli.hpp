#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "superframes/features.hpp"
#include "superframes/pc_baseline.hpp"
#include "superframes/superframe.hpp"

// Subcommand bodies, separated from argument parsing so tests can drive them
// directly. Each returns a process exit code; 0 iff every output was written.
namespace superframes::cli {

enum class Descriptor { Histogram, Averaged };

struct FrameInput {
    std::optional<std::filesystem::path> flow_dir;
    std::optional<std::filesystem::path> features_csv;
    Descriptor descriptor = Descriptor::Histogram;
};

struct FeaturesConfig {
    std::filesystem::path flow_dir;
    std::filesystem::path out;
    FeatureParams params;
};

struct SegmentConfig {
    FrameInput input;
    FeatureParams feature_params;
    SuperframeParams params;
    // Boundaries go to the sidecar (see boundary_sidecar).
    std::filesystem::path out;
};

struct BaselineConfig {
    std::filesystem::path frame_dir;
    PcParams params;
    std::optional<int> k;
    // Correlation series CSV; boundaries go to the sidecar.
    std::filesystem::path out;
};

struct EvaluateConfig {
    std::filesystem::path result;
    std::filesystem::path truth;
    int n_frames = 0;
    double range_frac = 0.008;
    double beta = 0.25;
    std::optional<std::filesystem::path> out;
};

struct SweepConfig {
    FrameInput input;
    FeatureParams feature_params;
    std::filesystem::path truth;
    std::vector<int> k_list;
    // Applied to every K; compactness still defaults to 0.1 * K when unset.
    SuperframeParams base;
    double range_frac = 0.008;
    double beta = 0.25;
    std::filesystem::path out;
};

struct SynthConfig {
    std::filesystem::path spec;
    std::optional<std::uint64_t> seed;
    std::filesystem::path out_dir;
};

int cmd_features(const FeaturesConfig& config, std::ostream& out, std::ostream& err);
int cmd_segment(const SegmentConfig& config, std::ostream& out, std::ostream& err);
int cmd_baseline(const BaselineConfig& config, std::ostream& out, std::ostream& err);
int cmd_evaluate(const EvaluateConfig& config, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepConfig& config, std::ostream& out, std::ostream& err);
int cmd_synth(const SynthConfig& config, std::ostream& out, std::ostream& err);

// Sorted regular files in dir with the given extension.
std::vector<std::filesystem::path> list_files(const std::filesystem::path& dir,
                                              const std::string& extension);

FeatureSequence load_sequence(const FrameInput& input, const FeatureParams& params);

}  // namespace superframes::cli
