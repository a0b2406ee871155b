#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "superframes/flow_io.hpp"

namespace superframes {

inline constexpr std::size_t kHomBins = 11;
inline constexpr std::size_t kHodBins = 8;
inline constexpr std::size_t kHofDims = kHomBins + kHodBins;

// Histogram-of-flow descriptor for one frame: magnitude and direction
// histograms, each normalized to unit mass by its own vote count.
struct FrameFeatures {
    int frame = 0;
    std::array<double, kHomBins> hom{};
    std::array<double, kHodBins> hod{};

    // hom followed by hod; the frame index is kept apart.
    std::array<double, kHofDims> values() const;

    friend bool operator==(const FrameFeatures&, const FrameFeatures&) = default;
};

struct FeatureParams {
    // 12 edges -> 11 half-open bins [edge_i, edge_{i+1}); last edge is +inf.
    std::array<double, kHomBins + 1> mag_edges{
        0.0, 0.1, 0.5, 1.0, 2.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0,
        std::numeric_limits<double>::infinity()};
    // Pixels slower than this do not vote in the direction histogram.
    double motion_gate = 0.1;

    void validate() const;
};

FrameFeatures compute_features(const FlowField& flow, int frame, const FeatureParams& params = {});

// Mean flow over the frame; the weaker descriptor the histogram is compared
// against.
struct AveragedFlow {
    int frame = 0;
    double mean_u = 0.0;
    double mean_v = 0.0;
};

AveragedFlow averaged_flow_features(const FlowField& flow, int frame);

// Row-major N x D matrix of per-frame feature vectors; row i belongs to
// frame i. The clustering engine works on this so that both descriptors
// share one code path.
class FeatureSequence {
public:
    FeatureSequence() = default;
    FeatureSequence(std::size_t dims, std::vector<double> values);

    static FeatureSequence from(std::span<const FrameFeatures> frames);
    static FeatureSequence from(std::span<const AveragedFlow> frames);

    std::size_t size() const { return dims_ == 0 ? 0 : values_.size() / dims_; }
    std::size_t dims() const { return dims_; }
    std::span<const double> row(std::size_t i) const {
        return {values_.data() + i * dims_, dims_};
    }

private:
    std::size_t dims_ = 0;
    std::vector<double> values_;
};

// Central-difference gradient ||X(i+1) - X(i-1)||. Valid for 1 <= i <= N-2;
// throws Error{IndexOutOfRange} otherwise.
double feature_gradient(const FeatureSequence& seq, std::size_t i);
double feature_gradient(std::span<const FrameFeatures> seq, std::size_t i);

}  // namespace superframes
