#include "superframes/superframe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "superframes/error.hpp"

namespace superframes {

namespace {

double feature_distance(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double diff = a[d] - b[d];
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

long ceil_div(long num, long den) { return (num + den - 1) / den; }

struct Run {
    int start = 0;
    int length = 0;
    int label = 0;
};

std::vector<Run> runs_of(std::span<const int> labels) {
    std::vector<Run> runs;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i == 0 || labels[i] != labels[i - 1]) {
            runs.push_back({static_cast<int>(i), 0, labels[i]});
        }
        ++runs.back().length;
    }
    return runs;
}

std::vector<double> mean_of(const FeatureSequence& features, int start, int length) {
    std::vector<double> mean(features.dims(), 0.0);
    for (int i = start; i < start + length; ++i) {
        const auto row = features.row(static_cast<std::size_t>(i));
        for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += row[d];
    }
    for (double& x : mean) x /= length;
    return mean;
}

void check_labels(std::span<const int> labels, const FeatureSequence& features) {
    if (labels.size() != features.size()) {
        throw Error(ErrorCode::FrameCountMismatch,
                    std::to_string(labels.size()) + " labels for " +
                        std::to_string(features.size()) + " frames");
    }
    for (int label : labels) {
        if (label < 0) throw Error(ErrorCode::InvalidArgument, "labels must be non-negative");
    }
}

}  // namespace

int SuperframeParams::resolved_min_length(int n_frames) const {
    if (min_length) return *min_length;
    const double s = grid_interval(n_frames, k);
    return std::max(2, static_cast<int>(std::lround(s / 4.0)));
}

void SuperframeParams::validate(int n_frames) const {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
    if (k > n_frames) {
        throw Error(ErrorCode::KTooLarge, "k=" + std::to_string(k) + " exceeds N=" +
                                              std::to_string(n_frames));
    }
    if (!(resolved_compactness() > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "compactness must be > 0");
    }
    if (max_iters < 1) throw Error(ErrorCode::InvalidArgument, "max_iters must be >= 1");
    if (!(convergence_eps >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "convergence eps must be >= 0");
    }
    if (min_length && *min_length < 1) {
        throw Error(ErrorCode::InvalidArgument, "min_length must be >= 1");
    }
}

int Segmentation::run_count() const {
    return static_cast<int>(runs_of(labels).size());
}

double grid_interval(int n_frames, int k) {
    return static_cast<double>(n_frames) / static_cast<double>(k);
}

std::vector<ClusterCenter> init_centers(const FeatureSequence& features, int k) {
    const long n = static_cast<long>(features.size());
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
    if (k > n) {
        throw Error(ErrorCode::KTooLarge,
                    "k=" + std::to_string(k) + " exceeds N=" + std::to_string(n));
    }
    std::vector<ClusterCenter> centers;
    centers.reserve(static_cast<std::size_t>(k));
    for (long i = 0; i < k; ++i) {
        // round(S/2 + i*S) with S = N/k, half away from zero, in exact
        // integer arithmetic; then kept inside the seed segment's own frames
        // [ceil(i*S), ceil((i+1)*S) - 1].
        const long seed = ((2 * i + 1) * n + k) / (2L * k);
        const long lo = ceil_div(i * n, k);
        const long hi = ceil_div((i + 1) * n, k) - 1;
        const long frame = std::clamp(seed, lo, hi);
        const auto row = features.row(static_cast<std::size_t>(frame));
        centers.push_back({{row.begin(), row.end()}, static_cast<double>(frame)});
    }
    return centers;
}

std::vector<ClusterCenter> perturb_centers(std::vector<ClusterCenter> centers,
                                           const FeatureSequence& features) {
    const long n = static_cast<long>(features.size());
    if (n < 3) return centers;
    for (auto& center : centers) {
        const long p = std::lround(center.position);
        long best = -1;
        double best_gradient = std::numeric_limits<double>::infinity();
        // Evaluation order encodes the tie-break: original position first,
        // then the smaller index.
        for (long candidate : {p, p - 1, p + 1}) {
            if (candidate < 1 || candidate > n - 2) continue;
            const double g = feature_gradient(features, static_cast<std::size_t>(candidate));
            if (g < best_gradient) {
                best_gradient = g;
                best = candidate;
            }
        }
        if (best < 0) continue;
        const auto row = features.row(static_cast<std::size_t>(best));
        center.features.assign(row.begin(), row.end());
        center.position = static_cast<double>(best);
    }
    return centers;
}

double center_distance(const ClusterCenter& center, std::span<const double> frame_features,
                       int frame, double compactness, double interval) {
    const double dc = feature_distance(center.features, frame_features);
    const double ds = std::abs(center.position - static_cast<double>(frame));
    const double a = dc / compactness;
    const double b = ds / interval;
    return std::sqrt(a * a + b * b);
}

std::vector<int> assign_frames(std::span<const ClusterCenter> centers,
                               const FeatureSequence& features, double compactness,
                               double interval) {
    if (centers.empty()) throw Error(ErrorCode::InvalidArgument, "no cluster centers");
    std::vector<int> labels(features.size(), 0);
    for (std::size_t i = 0; i < features.size(); ++i) {
        const auto row = features.row(i);
        const int frame = static_cast<int>(i);
        int windowed = -1;
        double windowed_best = std::numeric_limits<double>::infinity();
        int global = 0;
        double global_best = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < centers.size(); ++c) {
            const double d = center_distance(centers[c], row, frame, compactness, interval);
            if (d < global_best) {
                global_best = d;
                global = static_cast<int>(c);
            }
            const bool covered = std::abs(centers[c].position - frame) <= interval;
            if (covered && d < windowed_best) {
                windowed_best = d;
                windowed = static_cast<int>(c);
            }
        }
        labels[i] = windowed >= 0 ? windowed : global;
    }
    return labels;
}

CenterUpdate update_centers(std::span<const int> labels, const FeatureSequence& features,
                            std::span<const ClusterCenter> previous) {
    check_labels(labels, features);
    const std::size_t k = previous.size();
    const std::size_t dims = features.dims();
    std::vector<std::vector<double>> sums(k, std::vector<double>(dims, 0.0));
    std::vector<double> position_sums(k, 0.0);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto c = static_cast<std::size_t>(labels[i]);
        if (c >= k) {
            throw Error(ErrorCode::InvalidArgument,
                        "label " + std::to_string(c) + " has no center");
        }
        const auto row = features.row(i);
        for (std::size_t d = 0; d < dims; ++d) sums[c][d] += row[d];
        position_sums[c] += static_cast<double>(i);
        ++counts[c];
    }

    CenterUpdate out;
    out.centers.assign(previous.begin(), previous.end());
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] == 0) continue;
        auto& center = out.centers[c];
        const auto count = static_cast<double>(counts[c]);
        center.features.resize(dims);
        for (std::size_t d = 0; d < dims; ++d) center.features[d] = sums[c][d] / count;
        center.position = position_sums[c] / count;
    }
    for (std::size_t c = 0; c < k; ++c) {
        const auto& before = previous[c];
        const auto& after = out.centers[c];
        for (std::size_t d = 0; d < dims; ++d) {
            out.error += std::abs(after.features[d] - before.features[d]);
        }
        out.error += std::abs(after.position - before.position);
    }
    return out;
}

std::vector<int> enforce_contiguity(std::span<const int> labels, const FeatureSequence& features) {
    check_labels(labels, features);
    const auto runs = runs_of(labels);
    if (runs.empty()) return {};

    // Longest run per id survives; ties go to the earliest.
    std::vector<bool> kept(runs.size(), false);
    {
        std::vector<std::pair<int, std::size_t>> best;  // (label, run index)
        for (std::size_t r = 0; r < runs.size(); ++r) {
            auto it = std::find_if(best.begin(), best.end(),
                                   [&](const auto& b) { return b.first == runs[r].label; });
            if (it == best.end()) {
                best.emplace_back(runs[r].label, r);
            } else if (runs[r].length > runs[it->second].length) {
                it->second = r;
            }
        }
        for (const auto& b : best) kept[b.second] = true;
    }

    std::vector<std::vector<double>> kept_means(runs.size());
    for (std::size_t r = 0; r < runs.size(); ++r) {
        if (kept[r]) kept_means[r] = mean_of(features, runs[r].start, runs[r].length);
    }

    std::vector<int> out(labels.begin(), labels.end());
    for (std::size_t r = 0; r < runs.size(); ++r) {
        if (kept[r]) continue;
        std::optional<std::size_t> right;
        for (std::size_t q = r + 1; q < runs.size(); ++q) {
            if (kept[q]) {
                right = q;
                break;
            }
        }
        std::optional<std::size_t> left;
        for (std::size_t q = r; q-- > 0;) {
            if (kept[q]) {
                left = q;
                break;
            }
        }

        int target = 0;
        if (r > 0 && right && out[runs[r].start - 1] == runs[*right].label) {
            // An earlier displaced run in this gap already went right.
            target = runs[*right].label;
        } else if (!left) {
            target = runs[*right].label;
        } else if (!right) {
            target = runs[*left].label;
        } else {
            const auto mean = mean_of(features, runs[r].start, runs[r].length);
            const double to_left = feature_distance(mean, kept_means[*left]);
            const double to_right = feature_distance(mean, kept_means[*right]);
            target = to_right < to_left ? runs[*right].label : runs[*left].label;
        }
        std::fill(out.begin() + runs[r].start, out.begin() + runs[r].start + runs[r].length,
                  target);
    }
    return out;
}

std::vector<int> merge_short_clusters(std::span<const int> labels,
                                      const FeatureSequence& features, int min_length) {
    check_labels(labels, features);
    struct Block {
        int start;
        int length;
        std::vector<double> sum;
    };
    std::vector<Block> blocks;
    for (const auto& run : runs_of(labels)) {
        auto mean = mean_of(features, run.start, run.length);
        for (double& x : mean) x *= run.length;
        blocks.push_back({run.start, run.length, std::move(mean)});
    }
    auto mean = [](const Block& b) {
        std::vector<double> m = b.sum;
        for (double& x : m) x /= b.length;
        return m;
    };

    while (blocks.size() > 1) {
        std::optional<std::size_t> shortest;
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            if (blocks[b].length < min_length &&
                (!shortest || blocks[b].length < blocks[*shortest].length)) {
                shortest = b;
            }
        }
        if (!shortest) break;
        const std::size_t s = *shortest;
        std::size_t into = 0;
        if (s == 0) {
            into = 1;
        } else if (s + 1 == blocks.size()) {
            into = s - 1;
        } else {
            const auto own = mean(blocks[s]);
            const double to_left = feature_distance(own, mean(blocks[s - 1]));
            const double to_right = feature_distance(own, mean(blocks[s + 1]));
            into = to_right < to_left ? s + 1 : s - 1;
        }
        auto& target = blocks[into];
        target.start = std::min(target.start, blocks[s].start);
        target.length += blocks[s].length;
        for (std::size_t d = 0; d < target.sum.size(); ++d) target.sum[d] += blocks[s].sum[d];
        blocks.erase(blocks.begin() + static_cast<std::ptrdiff_t>(s));
    }

    std::vector<int> out(labels.size(), 0);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        std::fill(out.begin() + blocks[b].start,
                  out.begin() + blocks[b].start + blocks[b].length, static_cast<int>(b));
    }
    return out;
}

Segmentation run(const FeatureSequence& features, const SuperframeParams& params) {
    const int n = static_cast<int>(features.size());
    params.validate(n);
    const double interval = grid_interval(n, params.k);
    const double compactness = params.resolved_compactness();

    Segmentation seg;
    seg.centers = perturb_centers(init_centers(features, params.k), features);
    std::vector<int> labels;
    for (int iter = 1; iter <= params.max_iters; ++iter) {
        labels = assign_frames(seg.centers, features, compactness, interval);
        auto update = update_centers(labels, features, seg.centers);
        seg.centers = std::move(update.centers);
        seg.final_error = update.error;
        seg.iterations = iter;
        if (update.error <= params.convergence_eps) break;
    }
    labels = enforce_contiguity(labels, features);
    seg.labels = merge_short_clusters(labels, features, params.resolved_min_length(n));
    return seg;
}

Segmentation run(std::span<const FrameFeatures> features, const SuperframeParams& params) {
    return run(FeatureSequence::from(features), params);
}

BoundarySet boundaries_of(const Segmentation& seg) { return boundaries_from_labels(seg.labels); }

}  // namespace superframes
