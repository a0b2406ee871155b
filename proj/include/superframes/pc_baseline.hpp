#pragma once

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "superframes/flow_io.hpp"

namespace superframes {

// depth frames of width x height voxels, each frame row-major, frames
// stacked.
struct SpaceTimeVolume {
    int width = 0;
    int height = 0;
    int depth = 0;
    std::vector<double> voxels;

    double& at(int x, int y, int t) {
        return voxels[(static_cast<std::size_t>(t) * height + y) * width + x];
    }
    double at(int x, int y, int t) const {
        return voxels[(static_cast<std::size_t>(t) * height + y) * width + x];
    }
};

struct PcParams {
    int crop = 240;
    int depth = 30;
    int stride = 2;
    std::optional<double> threshold;

    void validate() const;
};

struct VolumeBuild {
    std::vector<SpaceTimeVolume> volumes;
    int crop = 0;
    int offset_x = 0;
    int offset_y = 0;
    // True when frames were smaller than the requested crop and the largest
    // centered square was used instead.
    bool crop_reduced = false;
    int dropped_frames = 0;
};

VolumeBuild build_volumes(std::span<const FrameImage> frames, const PcParams& params);

struct PhaseCorrelationResult {
    double corr = 0.0;
    // (x, y, t) such that b(p) ~ a(p - shift), wrapped to signed values.
    std::array<int, 3> shift{};
};

PhaseCorrelationResult phase_correlation(const SpaceTimeVolume& a, const SpaceTimeVolume& b);

// corrs[i] compares volumes i and i + 1.
std::vector<double> correlation_series(std::span<const SpaceTimeVolume> volumes);

// Frame in the original video where volume i + 1 starts.
int junction_frame(std::size_t i, const PcParams& params);

BoundarySet segment_by_threshold(std::span<const double> corrs, double threshold,
                                 const PcParams& params, int n_frames);

struct ThresholdChoice {
    double threshold = 0.0;
    int achieved = 1;
    // k_target was out of reach; achieved is the closest count.
    bool saturated = false;
};

ThresholdChoice threshold_for_k(std::span<const double> corrs, int k_target);

// Unnormalized complex 3-D DFT over a depth x height x width grid
// (row-major, x fastest). Inverse applies the 1/n factor.
std::vector<std::complex<double>> fft3d(std::span<const std::complex<double>> data, int width,
                                        int height, int depth);
std::vector<std::complex<double>> ifft3d(std::span<const std::complex<double>> spectrum,
                                         int width, int height, int depth);

}  // namespace superframes
