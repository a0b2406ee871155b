#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "superframes/flow_io.hpp"

namespace superframes {

struct SynthSegment {
    int length = 0;
    double flow_u = 0.0;
    double flow_v = 0.0;
};

struct SynthSpec {
    int n_frames = 0;
    std::vector<SynthSegment> segments;
    double noise_sigma = 0.0;
    int width = 64;
    int height = 64;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SynthSequence {
    std::vector<FlowField> fields;
    BoundarySet truth;
};

// Noise is drawn from std::mt19937_64 (bit-exact per the C++ standard)
// through a Box-Muller transform, so sequences reproduce on every platform.
// Draw order: frame by frame, pixel by pixel; one Box-Muller pair per pixel
// gives (u noise, v noise).
SynthSequence generate(const SynthSpec& spec);

// Portable standard normal pair from two mt19937_64 outputs.
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}
    std::pair<double, double> next_pair();

private:
    // Uniform in (0, 1], 53 bits.
    double uniform_open_closed();

    std::mt19937_64 engine_;
};

// The 600-frame, six-segment benchmark used by the acceptance suite.
SynthSpec benchmark_spec(std::uint64_t seed = 20180101);

SynthSpec synth_spec_from_json(const nlohmann::json& j);
SynthSpec read_synth_spec(const std::filesystem::path& path);

// frame_000000.flo, frame_000001.flo, ...
std::string flow_frame_name(std::size_t index);

// Writes flow_frame_name(i) for every field into dir.
void write_flow_sequence(const std::vector<FlowField>& fields, const std::filesystem::path& dir);

}  // namespace superframes
