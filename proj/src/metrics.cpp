#include "superframes/metrics.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include <nlohmann/json.hpp>

#include "superframes/error.hpp"
#include "text_util.hpp"

namespace superframes {

namespace {

void check_same_length(const BoundarySet& result, const BoundarySet& truth) {
    if (result.n_frames() != truth.n_frames()) {
        throw Error(ErrorCode::FrameCountMismatch,
                    "result has N=" + std::to_string(result.n_frames()) + ", truth has N=" +
                        std::to_string(truth.n_frames()));
    }
}

}  // namespace

int recall_tolerance(int n_frames, double range_frac) {
    return std::max(1, static_cast<int>(std::lround(range_frac * n_frames)));
}

EvalReport boundary_recall(const BoundarySet& result, const BoundarySet& truth,
                           double range_frac) {
    check_same_length(result, truth);
    if (!(range_frac >= 0.0)) throw Error(ErrorCode::InvalidArgument, "range_frac must be >= 0");

    EvalReport report;
    report.r_frames = recall_tolerance(truth.n_frames(), range_frac);
    const auto& found = result.boundaries();
    std::vector<bool> used(found.size(), false);

    // One-to-one greedy matching: ground truth in ascending order, each takes
    // the nearest unused result boundary within r (ties to the smaller one).
    for (int g : truth.boundaries()) {
        std::optional<std::size_t> best;
        int best_distance = 0;
        for (std::size_t j = 0; j < found.size(); ++j) {
            if (used[j]) continue;
            const int d = std::abs(found[j] - g);
            if (d > report.r_frames) continue;
            if (!best || d < best_distance) {
                best = j;
                best_distance = d;
            }
        }
        BoundaryMatch match{g, std::nullopt, std::nullopt};
        if (best) {
            used[*best] = true;
            match.matched = found[*best];
            match.distance = best_distance;
            ++report.tp;
        } else {
            ++report.fn;
        }
        report.per_boundary.push_back(match);
    }

    if (truth.empty()) {
        report.empty_truth = true;
        report.recall = 1.0;
    } else {
        report.recall = static_cast<double>(report.tp) / static_cast<double>(report.tp + report.fn);
    }
    return report;
}

std::vector<std::pair<int, int>> intervals_of(const BoundarySet& boundaries) {
    std::vector<std::pair<int, int>> out;
    int start = 0;
    for (int b : boundaries.boundaries()) {
        out.emplace_back(start, b - 1);
        start = b;
    }
    out.emplace_back(start, boundaries.n_frames() - 1);
    return out;
}

double undersegmentation_error(const BoundarySet& result, const BoundarySet& truth,
                               double beta_frac) {
    check_same_length(result, truth);
    const auto segments = intervals_of(result);
    const auto truth_segments = intervals_of(truth);
    long leak = 0;
    for (const auto& [g_start, g_end] : truth_segments) {
        for (const auto& [s_start, s_end] : segments) {
            const int overlap = std::min(s_end, g_end) - std::max(s_start, g_start) + 1;
            if (overlap <= 0) continue;
            const int length = s_end - s_start + 1;
            if (static_cast<double>(overlap) > beta_frac * length) {
                leak += std::min(overlap, length - overlap);
            }
        }
    }
    return static_cast<double>(leak) / static_cast<double>(truth.n_frames());
}

EvalReport evaluate(const BoundarySet& result, const BoundarySet& truth, double range_frac,
                    double beta_frac) {
    EvalReport report = boundary_recall(result, truth, range_frac);
    report.under_segmentation = undersegmentation_error(result, truth, beta_frac);
    return report;
}

void to_json(nlohmann::json& j, const EvalReport& report) {
    auto per_boundary = nlohmann::json::array();
    for (const auto& m : report.per_boundary) {
        per_boundary.push_back({
            {"gt", m.truth},
            {"matched", m.matched ? nlohmann::json(*m.matched) : nlohmann::json(nullptr)},
            {"distance", m.distance ? nlohmann::json(*m.distance) : nlohmann::json(nullptr)},
        });
    }
    j = nlohmann::json{
        {"recall", report.recall},
        {"under_segmentation", report.under_segmentation},
        {"tp", report.tp},
        {"fn", report.fn},
        {"r_frames", report.r_frames},
        {"empty_truth", report.empty_truth},
        {"per_boundary", std::move(per_boundary)},
    };
}

std::string csv_header() { return "recall,under_segmentation,tp,fn,r_frames,empty_truth"; }

std::string to_csv_row(const EvalReport& report) {
    std::ostringstream out;
    out << detail::format_double(report.recall) << ','
        << detail::format_double(report.under_segmentation) << ',' << report.tp << ','
        << report.fn << ',' << report.r_frames << ',' << (report.empty_truth ? 1 : 0);
    return out.str();
}

}  // namespace superframes
