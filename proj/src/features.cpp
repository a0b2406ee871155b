#include "superframes/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "superframes/error.hpp"

namespace superframes {

std::array<double, kHofDims> FrameFeatures::values() const {
    std::array<double, kHofDims> out{};
    std::copy(hom.begin(), hom.end(), out.begin());
    std::copy(hod.begin(), hod.end(), out.begin() + kHomBins);
    return out;
}

void FeatureParams::validate() const {
    if (mag_edges.front() != 0.0) {
        throw Error(ErrorCode::InvalidArgument, "first magnitude edge must be 0");
    }
    if (!std::isinf(mag_edges.back()) || mag_edges.back() < 0) {
        throw Error(ErrorCode::InvalidArgument, "last magnitude edge must be +infinity");
    }
    for (std::size_t i = 1; i < mag_edges.size(); ++i) {
        if (!(mag_edges[i] > mag_edges[i - 1])) {
            throw Error(ErrorCode::InvalidArgument, "magnitude edges must be strictly ascending");
        }
    }
    if (!(motion_gate >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "motion gate must be >= 0");
    }
}

namespace {

// Sector k covers [45k - 22.5, 45k + 22.5) degrees. v is negated first so
// that screen-up is +90 degrees.
std::size_t direction_bin(double u, double v) {
    const double degrees = std::atan2(-v, u) * 180.0 / std::numbers::pi;
    const auto sector = static_cast<long>(std::floor((degrees + 22.5) / 45.0));
    return static_cast<std::size_t>(((sector % 8) + 8) % 8);
}

}  // namespace

FrameFeatures compute_features(const FlowField& flow, int frame, const FeatureParams& params) {
    flow.validate();
    params.validate();

    std::array<std::size_t, kHomBins> hom_votes{};
    std::array<std::size_t, kHodBins> hod_votes{};
    std::size_t moving = 0;
    for (std::size_t i = 0; i < flow.pixel_count(); ++i) {
        const double u = flow.u[i];
        const double v = flow.v[i];
        const double magnitude = std::sqrt(u * u + v * v);
        // First edge strictly greater than m closes the bin holding m.
        const auto upper = std::upper_bound(params.mag_edges.begin(), params.mag_edges.end(),
                                            magnitude);
        const auto bin = static_cast<std::size_t>(upper - params.mag_edges.begin()) - 1;
        ++hom_votes[std::min(bin, kHomBins - 1)];
        if (magnitude >= params.motion_gate && magnitude > 0.0) {
            ++hod_votes[direction_bin(u, v)];
            ++moving;
        }
    }

    FrameFeatures out;
    out.frame = frame;
    const auto total = static_cast<double>(flow.pixel_count());
    for (std::size_t b = 0; b < kHomBins; ++b) out.hom[b] = hom_votes[b] / total;
    if (moving > 0) {
        for (std::size_t b = 0; b < kHodBins; ++b) {
            out.hod[b] = hod_votes[b] / static_cast<double>(moving);
        }
    }
    return out;
}

AveragedFlow averaged_flow_features(const FlowField& flow, int frame) {
    flow.validate();
    double su = 0.0;
    double sv = 0.0;
    for (std::size_t i = 0; i < flow.pixel_count(); ++i) {
        su += flow.u[i];
        sv += flow.v[i];
    }
    const auto n = static_cast<double>(flow.pixel_count());
    return {frame, su / n, sv / n};
}

FeatureSequence::FeatureSequence(std::size_t dims, std::vector<double> values)
    : dims_(dims), values_(std::move(values)) {
    if (dims_ == 0 || values_.size() % dims_ != 0) {
        throw Error(ErrorCode::InvalidArgument,
                    "feature matrix size is not a multiple of its dimension");
    }
}

FeatureSequence FeatureSequence::from(std::span<const FrameFeatures> frames) {
    std::vector<double> values;
    values.reserve(frames.size() * kHofDims);
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (frames[i].frame != static_cast<int>(i)) {
            throw Error(ErrorCode::NonConsecutiveFrames,
                        "feature row " + std::to_string(i) + " has frame " +
                            std::to_string(frames[i].frame));
        }
        const auto row = frames[i].values();
        values.insert(values.end(), row.begin(), row.end());
    }
    return FeatureSequence(kHofDims, std::move(values));
}

FeatureSequence FeatureSequence::from(std::span<const AveragedFlow> frames) {
    std::vector<double> values;
    values.reserve(frames.size() * 2);
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (frames[i].frame != static_cast<int>(i)) {
            throw Error(ErrorCode::NonConsecutiveFrames,
                        "feature row " + std::to_string(i) + " has frame " +
                            std::to_string(frames[i].frame));
        }
        values.push_back(frames[i].mean_u);
        values.push_back(frames[i].mean_v);
    }
    return FeatureSequence(2, std::move(values));
}

double feature_gradient(const FeatureSequence& seq, std::size_t i) {
    if (i < 1 || i + 1 >= seq.size()) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "gradient needs both neighbours; index " + std::to_string(i) +
                        " with N=" + std::to_string(seq.size()));
    }
    const auto next = seq.row(i + 1);
    const auto prev = seq.row(i - 1);
    double sum = 0.0;
    for (std::size_t d = 0; d < seq.dims(); ++d) {
        const double diff = next[d] - prev[d];
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

double feature_gradient(std::span<const FrameFeatures> seq, std::size_t i) {
    if (i < 1 || i + 1 >= seq.size()) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "gradient needs both neighbours; index " + std::to_string(i) +
                        " with N=" + std::to_string(seq.size()));
    }
    const auto next = seq[i + 1].values();
    const auto prev = seq[i - 1].values();
    double sum = 0.0;
    for (std::size_t d = 0; d < kHofDims; ++d) {
        const double diff = next[d] - prev[d];
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

}  // namespace superframes
