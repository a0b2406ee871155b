#include <filesystem>
#include <sstream>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "superframes/cli.hpp"
#include "superframes/flow_io.hpp"
#include "superframes/synth.hpp"
#include "test_support.hpp"

using namespace superframes;
using namespace superframes::cli;
namespace fs = std::filesystem;

namespace {

struct Streams {
    std::ostringstream out;
    std::ostringstream err;
};

SynthSpec small_spec(std::vector<SynthSegment> segments, double sigma = 0.05) {
    SynthSpec spec;
    spec.segments = std::move(segments);
    for (const auto& s : spec.segments) spec.n_frames += s.length;
    spec.noise_sigma = sigma;
    spec.width = 16;
    spec.height = 16;
    spec.seed = 5;
    return spec;
}

SynthSequence write_synth(const fs::path& dir, const SynthSpec& spec) {
    fs::create_directories(dir);
    auto seq = generate(spec);
    write_flow_sequence(seq.fields, dir);
    write_boundaries(seq.truth, dir / "truth.boundaries");
    return seq;
}

FrameImage textured_frame(int w, int h, unsigned seed) {
    std::mt19937 rng(seed);
    FrameImage f{w, h, {}};
    f.pixels.resize(static_cast<std::size_t>(w) * h);
    for (auto& p : f.pixels) p = static_cast<std::uint8_t>(rng() & 0xFF);
    return f;
}

void write_frames(const fs::path& dir, const std::vector<FrameImage>& frames) {
    fs::create_directories(dir);
    for (std::size_t i = 0; i < frames.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "frame_%06zu.pgm", i);
        write_pgm(frames[i], dir / name);
    }
}

}  // namespace

TEST_CASE("features subcommand") {
    testing::TempDir dir;
    write_synth(dir / "flow", small_spec({{3, 1, 0}}));

    FeaturesConfig config{dir / "flow", dir / "features.csv", {}};
    Streams s;
    REQUIRE(cmd_features(config, s.out, s.err) == 0);
    const auto rows = read_feature_csv(dir / "features.csv");
    CHECK(rows.size() == 3);
    CHECK(s.out.str() == "frames=3\n");

    const auto first = testing::read_file(dir / "features.csv");
    REQUIRE(cmd_features(config, s.out, s.err) == 0);
    CHECK(testing::read_file(dir / "features.csv") == first);

    fs::create_directories(dir / "empty");
    FeaturesConfig empty{dir / "empty", dir / "empty.csv", {}};
    Streams e;
    CHECK(cmd_features(empty, e.out, e.err) == 1);
    CHECK(e.err.str().find("error:") == 0);
    CHECK_FALSE(fs::exists(dir / "empty.csv"));
}

TEST_CASE("segment subcommand") {
    testing::TempDir dir;
    const auto seq = write_synth(dir / "flow", small_spec({{20, 2, 0}, {20, 0, 2}}));

    SegmentConfig config;
    config.input.flow_dir = dir / "flow";
    config.params.k = 2;
    config.out = dir / "seg.csv";
    Streams s;
    REQUIRE(cmd_segment(config, s.out, s.err) == 0);
    CHECK(read_boundaries(dir / "seg.boundaries", 40) == seq.truth);
    CHECK(s.out.str().find("clusters=2") != std::string::npos);
    CHECK(read_segmentation(dir / "seg.csv").size() == 40);

    SUBCASE("features CSV input gives the same answer") {
        FeaturesConfig fc{dir / "flow", dir / "f.csv", {}};
        Streams f;
        REQUIRE(cmd_features(fc, f.out, f.err) == 0);
        SegmentConfig from_csv = config;
        from_csv.input.flow_dir.reset();
        from_csv.input.features_csv = dir / "f.csv";
        from_csv.out = dir / "seg2.csv";
        REQUIRE(cmd_segment(from_csv, f.out, f.err) == 0);
        CHECK(testing::read_file(dir / "seg2.csv") == testing::read_file(dir / "seg.csv"));
    }
    SUBCASE("k=1 writes an empty boundary file") {
        config.params.k = 1;
        REQUIRE(cmd_segment(config, s.out, s.err) == 0);
        CHECK(testing::read_file(dir / "seg.boundaries").empty());
    }
    SUBCASE("averaged descriptor") {
        config.input.descriptor = Descriptor::Averaged;
        REQUIRE(cmd_segment(config, s.out, s.err) == 0);
        CHECK(read_boundaries(dir / "seg.boundaries", 40) == seq.truth);
    }
    SUBCASE("failure leaves no partial output") {
        config.params.k = 41;
        config.out = dir / "bad.csv";
        Streams e;
        CHECK(cmd_segment(config, e.out, e.err) == 1);
        CHECK_FALSE(fs::exists(dir / "bad.csv"));
        CHECK_FALSE(fs::exists(dir / "bad.boundaries"));
    }
    SUBCASE("missing output directory") {
        config.out = dir / "nowhere" / "seg.csv";
        Streams e;
        CHECK(cmd_segment(config, e.out, e.err) == 1);
    }
    SUBCASE("two inputs are rejected") {
        config.input.features_csv = dir / "f.csv";
        Streams e;
        CHECK(cmd_segment(config, e.out, e.err) == 1);
    }
}

TEST_CASE("evaluate subcommand") {
    testing::TempDir dir;
    write_boundaries(BoundarySet({10, 20}, 125), dir / "truth.boundaries");
    write_boundaries(BoundarySet({10, 22}, 125), dir / "result.boundaries");

    EvaluateConfig config;
    config.result = dir / "truth.boundaries";
    config.truth = dir / "truth.boundaries";
    config.n_frames = 125;
    Streams s;
    REQUIRE(cmd_evaluate(config, s.out, s.err) == 0);
    auto j = nlohmann::json::parse(s.out.str());
    CHECK(j.at("recall") == 1.0);
    CHECK(j.at("under_segmentation") == 0.0);

    config.result = dir / "result.boundaries";
    config.out = dir / "report.json";
    Streams h;
    REQUIRE(cmd_evaluate(config, h.out, h.err) == 0);
    CHECK(nlohmann::json::parse(testing::read_file(dir / "report.json")).at("recall") == 0.5);

    // A boundary at 130 does not fit 125 frames.
    write_boundaries(BoundarySet({130}, 200), dir / "long.boundaries");
    config.result = dir / "long.boundaries";
    config.out = dir / "bad.json";
    Streams e;
    CHECK(cmd_evaluate(config, e.out, e.err) == 1);
    CHECK_FALSE(fs::exists(dir / "bad.json"));
}

TEST_CASE("sweep subcommand") {
    testing::TempDir dir;
    write_synth(dir / "flow", small_spec({{30, 2, 0}, {30, 0, 2}, {30, -2, 0}}));

    SweepConfig config;
    config.input.flow_dir = dir / "flow";
    config.truth = dir / "flow" / "truth.boundaries";
    config.k_list = {2, 4, 8};
    config.out = dir / "sweep.csv";
    Streams s;
    REQUIRE(cmd_sweep(config, s.out, s.err) == 0);
    const auto text = testing::read_file(dir / "sweep.csv");
    CHECK(text.rfind("K,H,recall,UE\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);

    config.k_list.clear();
    config.out = dir / "empty.csv";
    Streams e;
    CHECK(cmd_sweep(config, e.out, e.err) == 1);
    CHECK_FALSE(fs::exists(dir / "empty.csv"));

    config.k_list = {2, 1000};
    config.out = dir / "partial.csv";
    CHECK(cmd_sweep(config, e.out, e.err) == 1);
    CHECK_FALSE(fs::exists(dir / "partial.csv"));
}

TEST_CASE("baseline subcommand") {
    testing::TempDir dir;
    BaselineConfig config;
    config.params.crop = 16;
    config.params.depth = 4;
    config.params.stride = 2;

    SUBCASE("repeated frame gives no boundaries") {
        write_frames(dir / "same", std::vector<FrameImage>(40, textured_frame(20, 20, 1)));
        config.frame_dir = dir / "same";
        config.params.threshold = 0.5;
        config.out = dir / "same.csv";
        Streams s;
        REQUIRE(cmd_baseline(config, s.out, s.err) == 0);
        CHECK(testing::read_file(dir / "same.boundaries").empty());
        const auto csv = testing::read_file(dir / "same.csv");
        CHECK(csv.rfind("junction_frame,corr\n8,", 0) == 0);
    }
    SUBCASE("two scenes split at the junction") {
        // Volumes cover 8 source frames each; the scene changes at frame 24.
        std::vector<FrameImage> frames(24, textured_frame(16, 16, 1));
        frames.resize(48, textured_frame(16, 16, 2));
        write_frames(dir / "two", frames);
        config.frame_dir = dir / "two";
        config.params.threshold = 0.5;
        config.out = dir / "two.csv";
        Streams s;
        REQUIRE(cmd_baseline(config, s.out, s.err) == 0);
        CHECK(read_boundaries(dir / "two.boundaries", 48).boundaries() == std::vector<int>{24});

        config.params.threshold.reset();
        config.k = 2;
        config.out = dir / "k.csv";
        REQUIRE(cmd_baseline(config, s.out, s.err) == 0);
        CHECK(read_boundaries(dir / "k.boundaries", 48).boundaries() == std::vector<int>{24});

        config.k = 9;
        config.out = dir / "sat.csv";
        Streams w;
        REQUIRE(cmd_baseline(config, w.out, w.err) == 0);
        CHECK(w.err.str().find("warning") != std::string::npos);
        CHECK(w.out.str().find("segments=6") != std::string::npos);
    }
    SUBCASE("threshold and k are exclusive") {
        write_frames(dir / "f", std::vector<FrameImage>(16, textured_frame(16, 16, 1)));
        config.frame_dir = dir / "f";
        config.out = dir / "x.csv";
        Streams e;
        CHECK(cmd_baseline(config, e.out, e.err) == 1);
        config.k = 2;
        config.params.threshold = 0.3;
        CHECK(cmd_baseline(config, e.out, e.err) == 1);
        CHECK_FALSE(fs::exists(dir / "x.csv"));
    }
}

TEST_CASE("synth subcommand") {
    testing::TempDir dir;
    testing::write_file(dir / "spec.json", R"({"n_frames": 4, "noise_sigma": 0, "width": 3,
        "height": 2, "seed": 1, "segments": [{"length": 1, "u": 1, "v": 0},
        {"length": 3, "u": 0, "v": 1}]})");
    SynthConfig config{dir / "spec.json", std::nullopt, dir / "out"};
    Streams s;
    REQUIRE(cmd_synth(config, s.out, s.err) == 0);
    CHECK(list_files(dir / "out", ".flo").size() == 4);
    CHECK(testing::read_file(dir / "out" / "truth.boundaries") == "1\n");

    testing::write_file(dir / "bad.json", R"({"n_frames": 5, "noise_sigma": 0, "segments": []})");
    SynthConfig bad{dir / "bad.json", std::nullopt, dir / "bad"};
    Streams e;
    CHECK(cmd_synth(bad, e.out, e.err) == 1);
    CHECK_FALSE(fs::exists(dir / "bad" / "truth.boundaries"));
}
