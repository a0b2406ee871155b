#include "superframes/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string_view>

#include <nlohmann/json.hpp>

#include "superframes/error.hpp"
#include "superframes/flow_io.hpp"
#include "superframes/metrics.hpp"
#include "superframes/synth.hpp"
#include "text_util.hpp"

namespace superframes::cli {

namespace fs = std::filesystem;

namespace {

enum class Verbosity { Quiet = 0, Warn = 1, Info = 2, Debug = 3 };

Verbosity verbosity() {
    const char* env = std::getenv("SUPERFRAME_LOG");
    if (env == nullptr) return Verbosity::Warn;
    const std::string_view level(env);
    if (level == "quiet" || level == "0") return Verbosity::Quiet;
    if (level == "info" || level == "2") return Verbosity::Info;
    if (level == "debug" || level == "3") return Verbosity::Debug;
    return Verbosity::Warn;
}

bool enabled(Verbosity level) { return static_cast<int>(verbosity()) >= static_cast<int>(level); }

// Files registered here are deleted unless commit() is reached.
class OutputGuard {
public:
    OutputGuard() = default;
    OutputGuard(const OutputGuard&) = delete;
    OutputGuard& operator=(const OutputGuard&) = delete;
    ~OutputGuard() {
        if (committed_) return;
        for (const auto& path : paths_) {
            std::error_code ec;
            fs::remove(path, ec);
        }
    }

    const fs::path& track(const fs::path& path) {
        paths_.push_back(path);
        return path;
    }
    void commit() { committed_ = true; }

private:
    std::vector<fs::path> paths_;
    bool committed_ = false;
};

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
    }
    return 1;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot create " + path.string());
    out << text;
    out.flush();
    if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

std::vector<FrameFeatures> features_from_flow_dir(const fs::path& dir,
                                                  const FeatureParams& params) {
    const auto files = list_files(dir, ".flo");
    if (files.empty()) {
        throw Error(ErrorCode::InvalidArgument, "no .flo files in " + dir.string());
    }
    std::vector<FrameFeatures> features;
    features.reserve(files.size());
    for (std::size_t i = 0; i < files.size(); ++i) {
        features.push_back(compute_features(read_flo(files[i]), static_cast<int>(i), params));
    }
    return features;
}

}  // namespace

std::vector<fs::path> list_files(const fs::path& dir, const std::string& extension) {
    if (!fs::is_directory(dir)) {
        throw Error(ErrorCode::IoFailure, dir.string() + " is not a directory");
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == extension) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

FeatureSequence load_sequence(const FrameInput& input, const FeatureParams& params) {
    if (input.flow_dir.has_value() == input.features_csv.has_value()) {
        throw Error(ErrorCode::InvalidArgument,
                    "exactly one of a flow directory or a feature CSV is required");
    }
    if (input.descriptor == Descriptor::Averaged) {
        if (!input.flow_dir) {
            throw Error(ErrorCode::InvalidArgument,
                        "averaged-flow features need a flow directory");
        }
        const auto files = list_files(*input.flow_dir, ".flo");
        if (files.empty()) {
            throw Error(ErrorCode::InvalidArgument, "no .flo files in " + input.flow_dir->string());
        }
        std::vector<AveragedFlow> rows;
        for (std::size_t i = 0; i < files.size(); ++i) {
            rows.push_back(averaged_flow_features(read_flo(files[i]), static_cast<int>(i)));
        }
        return FeatureSequence::from(rows);
    }
    if (input.flow_dir) {
        return FeatureSequence::from(features_from_flow_dir(*input.flow_dir, params));
    }
    const auto rows = read_feature_csv(*input.features_csv);
    if (rows.empty()) {
        throw Error(ErrorCode::InvalidArgument, input.features_csv->string() + " has no rows");
    }
    return FeatureSequence::from(rows);
}

int cmd_features(const FeaturesConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        OutputGuard guard;
        const auto features = features_from_flow_dir(config.flow_dir, config.params);
        write_feature_csv(features, guard.track(config.out));
        guard.commit();
        out << "frames=" << features.size() << '\n';
        return 0;
    });
}

int cmd_segment(const SegmentConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        OutputGuard guard;
        const auto sequence = load_sequence(config.input, config.feature_params);
        const auto seg = run(sequence, config.params);
        const fs::path boundaries = boundary_sidecar(config.out);
        guard.track(config.out);
        guard.track(boundaries);
        write_segmentation(seg.labels, config.out, boundaries);
        guard.commit();
        out << "frames=" << sequence.size() << " iterations=" << seg.iterations
            << " final_error=" << detail::format_double(seg.final_error)
            << " clusters=" << seg.run_count() << '\n';
        if (enabled(Verbosity::Info)) {
            err << "info: k=" << config.params.k
                << " compactness=" << config.params.resolved_compactness()
                << " min_length=" << config.params.resolved_min_length(static_cast<int>(sequence.size()))
                << '\n';
        }
        return 0;
    });
}

int cmd_baseline(const BaselineConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (config.k.has_value() == config.params.threshold.has_value()) {
            throw Error(ErrorCode::InvalidArgument, "give exactly one of --threshold or --k");
        }
        OutputGuard guard;
        const auto files = list_files(config.frame_dir, ".pgm");
        if (files.empty()) {
            throw Error(ErrorCode::InvalidArgument, "no .pgm files in " + config.frame_dir.string());
        }
        std::vector<FrameImage> frames;
        frames.reserve(files.size());
        for (const auto& f : files) frames.push_back(read_pgm(f));
        const int n_frames = static_cast<int>(frames.size());

        const auto build = build_volumes(frames, config.params);
        if (build.crop_reduced && enabled(Verbosity::Warn)) {
            err << "warning: frames smaller than crop " << config.params.crop << ", using "
                << build.crop << "x" << build.crop << '\n';
        }
        const auto corrs = correlation_series(build.volumes);

        double threshold = 0.0;
        if (config.k) {
            const auto choice = threshold_for_k(corrs, *config.k);
            threshold = choice.threshold;
            if (choice.saturated && enabled(Verbosity::Warn)) {
                err << "warning: k=" << *config.k << " not attainable, achieved "
                    << choice.achieved << " segments\n";
            }
        } else {
            threshold = *config.params.threshold;
        }
        const auto boundaries = segment_by_threshold(corrs, threshold, config.params, n_frames);

        std::string csv = "junction_frame,corr\n";
        for (std::size_t i = 0; i < corrs.size(); ++i) {
            csv += std::to_string(junction_frame(i, config.params)) + ',' +
                   detail::format_double(corrs[i]) + '\n';
        }
        write_text(guard.track(config.out), csv);
        write_boundaries(boundaries, guard.track(boundary_sidecar(config.out)));
        guard.commit();
        out << "frames=" << n_frames << " volumes=" << build.volumes.size()
            << " threshold=" << detail::format_double(threshold)
            << " segments=" << boundaries.size() + 1 << '\n';
        return 0;
    });
}

int cmd_evaluate(const EvaluateConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        OutputGuard guard;
        const auto result = read_boundaries(config.result, config.n_frames);
        const auto truth = read_boundaries(config.truth, config.n_frames);
        const auto report = evaluate(result, truth, config.range_frac, config.beta);
        const std::string text = nlohmann::json(report).dump(2) + '\n';
        if (config.out) write_text(guard.track(*config.out), text);
        guard.commit();
        out << text;
        return 0;
    });
}

int cmd_sweep(const SweepConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (config.k_list.empty()) throw Error(ErrorCode::InvalidArgument, "empty K list");
        OutputGuard guard;
        const auto sequence = load_sequence(config.input, config.feature_params);
        const int n_frames = static_cast<int>(sequence.size());
        const auto truth = read_boundaries(config.truth, n_frames);

        std::string csv = "K,H,recall,UE\n";
        for (int k : config.k_list) {
            SuperframeParams params = config.base;
            params.k = k;
            const auto seg = run(sequence, params);
            const auto report = evaluate(boundaries_of(seg), truth, config.range_frac, config.beta);
            csv += std::to_string(k) + ',' + std::to_string(seg.run_count()) + ',' +
                   detail::format_double(report.recall) + ',' +
                   detail::format_double(report.under_segmentation) + '\n';
            if (enabled(Verbosity::Info)) {
                err << "info: K=" << k << " iterations=" << seg.iterations << '\n';
            }
        }
        write_text(guard.track(config.out), csv);
        guard.commit();
        out << csv;
        return 0;
    });
}

int cmd_synth(const SynthConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        SynthSpec spec = read_synth_spec(config.spec);
        if (config.seed) spec.seed = *config.seed;
        const auto sequence = generate(spec);
        OutputGuard guard;
        std::error_code ec;
        fs::create_directories(config.out_dir, ec);
        if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + config.out_dir.string());
        for (std::size_t i = 0; i < sequence.fields.size(); ++i) {
            write_flo(sequence.fields[i], guard.track(config.out_dir / flow_frame_name(i)));
        }
        write_boundaries(sequence.truth, guard.track(config.out_dir / "truth.boundaries"));
        guard.commit();
        out << "frames=" << sequence.fields.size() << " boundaries=" << sequence.truth.size()
            << '\n';
        return 0;
    });
}

}  // namespace superframes::cli
