#pragma once

#include <optional>
#include <span>
#include <vector>

#include "superframes/features.hpp"
#include "superframes/flow_io.hpp"

namespace superframes {

struct ClusterCenter {
    std::vector<double> features;
    // Real-valued frame coordinate in [0, N-1].
    double position = 0.0;

    friend bool operator==(const ClusterCenter&, const ClusterCenter&) = default;
};

struct SuperframeParams {
    int k = 1;
    // Defaults to 0.1 * k.
    std::optional<double> compactness;
    double convergence_eps = 1e-3;
    int max_iters = 100;
    // Defaults to max(2, round(S / 4)) with S = N / k.
    std::optional<int> min_length;

    double resolved_compactness() const { return compactness.value_or(0.1 * k); }
    int resolved_min_length(int n_frames) const;
    // Throws Error{InvalidArgument} or Error{KTooLarge}.
    void validate(int n_frames) const;
};

struct Segmentation {
    std::vector<int> labels;
    // Converged clustering centers. Merging is label surgery only, so these
    // are not re-fit to the final runs.
    std::vector<ClusterCenter> centers;
    int iterations = 0;
    double final_error = 0.0;

    // Number of contiguous runs (H).
    int run_count() const;
};

struct CenterUpdate {
    std::vector<ClusterCenter> centers;
    double error = 0.0;
};

double grid_interval(int n_frames, int k);

std::vector<ClusterCenter> init_centers(const FeatureSequence& features, int k);
std::vector<ClusterCenter> perturb_centers(std::vector<ClusterCenter> centers,
                                           const FeatureSequence& features);

// sqrt((d_c / m)^2 + (d_s / S)^2)
double center_distance(const ClusterCenter& center, std::span<const double> frame_features,
                       int frame, double compactness, double interval);

std::vector<int> assign_frames(std::span<const ClusterCenter> centers,
                               const FeatureSequence& features, double compactness,
                               double interval);

CenterUpdate update_centers(std::span<const int> labels, const FeatureSequence& features,
                            std::span<const ClusterCenter> previous);

std::vector<int> enforce_contiguity(std::span<const int> labels, const FeatureSequence& features);

// Labels come back renumbered 0..H-1 from left to right.
std::vector<int> merge_short_clusters(std::span<const int> labels,
                                      const FeatureSequence& features, int min_length);

Segmentation run(const FeatureSequence& features, const SuperframeParams& params);
Segmentation run(std::span<const FrameFeatures> features, const SuperframeParams& params);

BoundarySet boundaries_of(const Segmentation& seg);

}  // namespace superframes
