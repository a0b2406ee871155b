#include "superframes/synth.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include <nlohmann/json.hpp>

#include "superframes/error.hpp"

namespace superframes {

namespace fs = std::filesystem;

void SynthSpec::validate() const {
    if (n_frames < 1) throw Error(ErrorCode::SpecInvalid, "n_frames must be >= 1");
    if (segments.empty()) throw Error(ErrorCode::SpecInvalid, "at least one segment is required");
    long total = 0;
    for (const auto& s : segments) {
        if (s.length < 1) throw Error(ErrorCode::SpecInvalid, "segment lengths must be >= 1");
        total += s.length;
    }
    if (total != n_frames) {
        throw Error(ErrorCode::SpecInvalid, "segment lengths sum to " + std::to_string(total) +
                                                ", n_frames is " + std::to_string(n_frames));
    }
    if (!(noise_sigma >= 0.0)) throw Error(ErrorCode::SpecInvalid, "noise_sigma must be >= 0");
    if (width < 1 || height < 1) throw Error(ErrorCode::SpecInvalid, "field size must be >= 1");
}

double GaussianSource::uniform_open_closed() {
    // Top 53 bits -> [0, 1), then flipped to (0, 1] so log() stays finite.
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return 1.0 - u;
}

std::pair<double, double> GaussianSource::next_pair() {
    const double u1 = uniform_open_closed();
    const double u2 = uniform_open_closed();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

SynthSequence generate(const SynthSpec& spec) {
    spec.validate();
    GaussianSource noise(spec.seed);
    SynthSequence out;
    out.fields.reserve(static_cast<std::size_t>(spec.n_frames));
    std::vector<int> starts;
    int frame = 0;
    for (const auto& segment : spec.segments) {
        if (frame > 0) starts.push_back(frame);
        for (int t = 0; t < segment.length; ++t, ++frame) {
            FlowField field;
            field.width = spec.width;
            field.height = spec.height;
            const std::size_t n = field.pixel_count();
            field.u.resize(n);
            field.v.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                const auto [nu, nv] = noise.next_pair();
                field.u[i] = static_cast<float>(segment.flow_u + spec.noise_sigma * nu);
                field.v[i] = static_cast<float>(segment.flow_v + spec.noise_sigma * nv);
            }
            out.fields.push_back(std::move(field));
        }
    }
    out.truth = BoundarySet(std::move(starts), spec.n_frames);
    return out;
}

SynthSpec benchmark_spec(std::uint64_t seed) {
    SynthSpec spec;
    spec.n_frames = 600;
    spec.noise_sigma = 0.1;
    spec.width = 64;
    spec.height = 64;
    spec.seed = seed;
    const std::pair<double, double> flows[] = {{2.0, 0.0},  {0.0, 2.0},  {-2.0, 0.0},
                                               {0.0, -2.0}, {1.5, 1.5},  {-1.5, 1.5}};
    for (const auto& [u, v] : flows) spec.segments.push_back({100, u, v});
    return spec;
}

SynthSpec synth_spec_from_json(const nlohmann::json& j) {
    try {
        SynthSpec spec;
        spec.n_frames = j.at("n_frames").get<int>();
        spec.noise_sigma = j.value("noise_sigma", 0.0);
        spec.width = j.value("width", 64);
        spec.height = j.value("height", 64);
        spec.seed = j.value("seed", std::uint64_t{0});
        for (const auto& s : j.at("segments")) {
            spec.segments.push_back({s.at("length").get<int>(), s.value("u", 0.0), s.value("v", 0.0)});
        }
        spec.validate();
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::SpecInvalid, e.what());
    }
}

SynthSpec read_synth_spec(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::SpecInvalid, path.string() + ": " + e.what());
    }
    return synth_spec_from_json(j);
}

std::string flow_frame_name(std::size_t index) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%06zu.flo", index);
    return name;
}

void write_flow_sequence(const std::vector<FlowField>& fields, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir.string());
    for (std::size_t i = 0; i < fields.size(); ++i) {
        write_flo(fields[i], dir / flow_frame_name(i));
    }
}

}  // namespace superframes
