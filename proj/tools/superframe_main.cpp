#include <iostream>
#include <limits>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "superframes/cli.hpp"

namespace {

using namespace superframes;
using namespace superframes::cli;

void add_feature_flags(CLI::App& cmd, FeatureParams& params, std::string& edges) {
    cmd.add_option("--gate", params.motion_gate, "Minimum magnitude that votes for direction")
        ->check(CLI::NonNegativeNumber);
    cmd.add_option("--mag-edges", edges,
                   "Comma-separated 11 finite magnitude edges starting at 0 (+inf is appended)");
}

void apply_edges(const std::string& edges, FeatureParams& params) {
    if (edges.empty()) return;
    std::stringstream in(edges);
    std::string item;
    std::size_t i = 0;
    while (std::getline(in, item, ',')) {
        if (i + 1 >= params.mag_edges.size()) throw CLI::ValidationError("--mag-edges", "expected 11 values");
        params.mag_edges[i++] = std::stod(item);
    }
    if (i + 1 != params.mag_edges.size()) throw CLI::ValidationError("--mag-edges", "expected 11 values");
    params.mag_edges.back() = std::numeric_limits<double>::infinity();
}

void add_input_flags(CLI::App& cmd, FrameInput& input, std::string& descriptor) {
    auto* flow = cmd.add_option("--flow-dir", input.flow_dir, "Directory of .flo files")
                     ->check(CLI::ExistingDirectory);
    auto* csv = cmd.add_option("--features", input.features_csv, "Feature CSV")
                    ->check(CLI::ExistingFile);
    flow->excludes(csv);
    csv->excludes(flow);
    cmd.add_option("--descriptor", descriptor, "hof (default) or averaged")
        ->check(CLI::IsMember({"hof", "averaged"}));
}

void add_cluster_flags(CLI::App& cmd, SuperframeParams& params) {
    cmd.add_option("--compactness", params.compactness, "Compactness m (default 0.1*K)")
        ->check(CLI::PositiveNumber);
    cmd.add_option("--eps", params.convergence_eps, "L1 convergence threshold")
        ->check(CLI::NonNegativeNumber);
    cmd.add_option("--max-iters", params.max_iters, "Iteration cap")->check(CLI::PositiveNumber);
    cmd.add_option("--min-length", params.min_length,
                   "Minimum run length after merging (default max(2, round(S/4)))")
        ->check(CLI::PositiveNumber);
}

Descriptor parse_descriptor(const std::string& name) {
    return name == "averaged" ? Descriptor::Averaged : Descriptor::Histogram;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Temporal video segmentation into superframes"};
    app.require_subcommand(1);

    FeaturesConfig features;
    std::string features_edges;
    auto* features_cmd = app.add_subcommand("features", "Compute histogram-of-flow features");
    features_cmd->add_option("--flow-dir", features.flow_dir, "Directory of .flo files")
        ->required()
        ->check(CLI::ExistingDirectory);
    features_cmd->add_option("--out", features.out, "Output feature CSV")->required();
    add_feature_flags(*features_cmd, features.params, features_edges);

    SegmentConfig segment;
    std::string segment_edges;
    std::string segment_descriptor = "hof";
    auto* segment_cmd = app.add_subcommand("segment", "Cluster frames into superframes");
    add_input_flags(*segment_cmd, segment.input, segment_descriptor);
    add_feature_flags(*segment_cmd, segment.feature_params, segment_edges);
    segment_cmd->add_option("--k", segment.params.k, "Desired number of clusters")
        ->required()
        ->check(CLI::PositiveNumber);
    add_cluster_flags(*segment_cmd, segment.params);
    segment_cmd->add_option("--out", segment.out, "Output label CSV")->required();

    BaselineConfig baseline;
    auto* baseline_cmd = app.add_subcommand("baseline", "Phase-correlation segmentation");
    baseline_cmd->add_option("--frame-dir", baseline.frame_dir, "Directory of PGM frames")
        ->required()
        ->check(CLI::ExistingDirectory);
    baseline_cmd->add_option("--crop", baseline.params.crop, "Center crop side")
        ->check(CLI::Range(8, 1 << 20));
    baseline_cmd->add_option("--depth", baseline.params.depth, "Frames per volume")
        ->check(CLI::Range(2, 1 << 20));
    baseline_cmd->add_option("--stride", baseline.params.stride, "Temporal subsampling")
        ->check(CLI::PositiveNumber);
    auto* threshold = baseline_cmd->add_option("--threshold", baseline.params.threshold,
                                               "Correlation cutoff");
    auto* k = baseline_cmd->add_option("--k", baseline.k, "Solve the threshold for K segments")
                  ->check(CLI::PositiveNumber);
    threshold->excludes(k);
    k->excludes(threshold);
    baseline_cmd->add_option("--out", baseline.out, "Correlation series CSV")->required();

    EvaluateConfig evaluate;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Boundary recall and under-segmentation");
    evaluate_cmd->add_option("--result", evaluate.result, "Result boundary file")
        ->required()
        ->check(CLI::ExistingFile);
    evaluate_cmd->add_option("--truth", evaluate.truth, "Ground-truth boundary file")
        ->required()
        ->check(CLI::ExistingFile);
    evaluate_cmd->add_option("--n-frames", evaluate.n_frames, "Video length")
        ->required()
        ->check(CLI::PositiveNumber);
    evaluate_cmd->add_option("--range-frac", evaluate.range_frac, "Recall tolerance fraction")
        ->check(CLI::NonNegativeNumber);
    evaluate_cmd->add_option("--beta", evaluate.beta, "Overlap fraction")
        ->check(CLI::NonNegativeNumber);
    evaluate_cmd->add_option("--out", evaluate.out, "Report JSON");

    SweepConfig sweep;
    std::string sweep_edges;
    std::string sweep_descriptor = "hof";
    auto* sweep_cmd = app.add_subcommand("sweep", "Recall and UE over a list of K");
    add_input_flags(*sweep_cmd, sweep.input, sweep_descriptor);
    add_feature_flags(*sweep_cmd, sweep.feature_params, sweep_edges);
    sweep_cmd->add_option("--truth", sweep.truth, "Ground-truth boundary file")
        ->required()
        ->check(CLI::ExistingFile);
    sweep_cmd->add_option("--k", sweep.k_list, "K values")
        ->required()
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    add_cluster_flags(*sweep_cmd, sweep.base);
    sweep_cmd->add_option("--range-frac", sweep.range_frac, "Recall tolerance fraction")
        ->check(CLI::NonNegativeNumber);
    sweep_cmd->add_option("--beta", sweep.beta, "Overlap fraction")->check(CLI::NonNegativeNumber);
    sweep_cmd->add_option("--out", sweep.out, "Output CSV (K,H,recall,UE)")->required();

    SynthConfig synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic flow sequence");
    synth_cmd->add_option("--spec", synth.spec, "JSON spec")->required()->check(CLI::ExistingFile);
    synth_cmd->add_option("--seed", synth.seed, "Override the spec seed");
    synth_cmd->add_option("--out", synth.out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
        apply_edges(features_edges, features.params);
        apply_edges(segment_edges, segment.feature_params);
        apply_edges(sweep_edges, sweep.feature_params);
        segment.input.descriptor = parse_descriptor(segment_descriptor);
        sweep.input.descriptor = parse_descriptor(sweep_descriptor);
        if (*segment_cmd && !segment.input.flow_dir && !segment.input.features_csv) {
            throw CLI::RequiredError("--flow-dir or --features");
        }
        if (*sweep_cmd && !sweep.input.flow_dir && !sweep.input.features_csv) {
            throw CLI::RequiredError("--flow-dir or --features");
        }
        if (*baseline_cmd && !baseline.k && !baseline.params.threshold) {
            throw CLI::RequiredError("--threshold or --k");
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    if (*features_cmd) return cmd_features(features, std::cout, std::cerr);
    if (*segment_cmd) return cmd_segment(segment, std::cout, std::cerr);
    if (*baseline_cmd) return cmd_baseline(baseline, std::cout, std::cerr);
    if (*evaluate_cmd) return cmd_evaluate(evaluate, std::cout, std::cerr);
    if (*sweep_cmd) return cmd_sweep(sweep, std::cout, std::cerr);
    if (*synth_cmd) return cmd_synth(synth, std::cout, std::cerr);
    return 2;
}
