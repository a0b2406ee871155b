#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "superframes/flow_io.hpp"

namespace superframes {

inline constexpr double kDefaultRangeFrac = 0.008;
inline constexpr double kDefaultBetaFrac = 0.25;

struct BoundaryMatch {
    int truth = 0;
    std::optional<int> matched;
    std::optional<int> distance;
};

struct EvalReport {
    double recall = 0.0;
    double under_segmentation = 0.0;
    int tp = 0;
    int fn = 0;
    int r_frames = 0;
    // Ground truth had no boundaries; recall is reported as 1.0.
    bool empty_truth = false;
    std::vector<BoundaryMatch> per_boundary;
};

// Tolerance in frames: max(1, round(range_frac * N)).
int recall_tolerance(int n_frames, double range_frac);

// Fills recall, tp, fn, r_frames, empty_truth and per_boundary.
EvalReport boundary_recall(const BoundarySet& result, const BoundarySet& truth,
                           double range_frac = kDefaultRangeFrac);

double undersegmentation_error(const BoundarySet& result, const BoundarySet& truth,
                               double beta_frac = kDefaultBetaFrac);

EvalReport evaluate(const BoundarySet& result, const BoundarySet& truth,
                    double range_frac = kDefaultRangeFrac, double beta_frac = kDefaultBetaFrac);

// Inclusive (start, end) frame intervals partitioning [0, N-1].
std::vector<std::pair<int, int>> intervals_of(const BoundarySet& boundaries);

void to_json(nlohmann::json& j, const EvalReport& report);
std::string csv_header();
std::string to_csv_row(const EvalReport& report);

}  // namespace superframes
