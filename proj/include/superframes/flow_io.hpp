#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace superframes {

struct FrameFeatures;

// Dense per-pixel motion for one frame pair. u and v are row-major,
// pixels/frame.
struct FlowField {
    int width = 0;
    int height = 0;
    std::vector<float> u;
    std::vector<float> v;

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }

    // Throws Error{InvalidArgument} when dims or component lengths disagree.
    void validate() const;

    friend bool operator==(const FlowField&, const FlowField&) = default;
};

// 8-bit grayscale, row-major.
struct FrameImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }

    friend bool operator==(const FrameImage&, const FrameImage&) = default;
};

// Each boundary is the first frame (0-based) of a new segment, so the
// segment before boundary b ends at b - 1. Indices are strictly increasing
// and lie in [1, n_frames - 1].
class BoundarySet {
public:
    BoundarySet() = default;

    // Sorts and deduplicates, then range-checks. Throws Error{OutOfRange}.
    BoundarySet(std::vector<int> boundaries, int n_frames);

    const std::vector<int>& boundaries() const { return boundaries_; }
    int n_frames() const { return n_frames_; }
    std::size_t size() const { return boundaries_.size(); }
    bool empty() const { return boundaries_.empty(); }

    friend bool operator==(const BoundarySet&, const BoundarySet&) = default;

private:
    std::vector<int> boundaries_;
    int n_frames_ = 0;
};

inline constexpr float kFloMagic = 202021.25f;

FlowField read_flo(const std::filesystem::path& path);
void write_flo(const FlowField& field, const std::filesystem::path& path);

// Binary PGM (P5) only, maxval <= 255. Header comments are skipped.
FrameImage read_pgm(const std::filesystem::path& path);
void write_pgm(const FrameImage& image, const std::filesystem::path& path);

// One integer per line; blank lines and '#' comments are ignored.
BoundarySet read_boundaries(const std::filesystem::path& path, int n_frames);
void write_boundaries(const BoundarySet& boundaries, const std::filesystem::path& path);

// Header `frame,hom0..hom10,hod0..hod7` (column order free, names exact).
std::vector<FrameFeatures> read_feature_csv(const std::filesystem::path& path);
void write_feature_csv(std::span<const FrameFeatures> features, const std::filesystem::path& path);

// Writes `frame,label` rows to csv_path and the derived boundary list to
// boundary_path. Labels must already form contiguous runs.
void write_segmentation(std::span<const int> labels, const std::filesystem::path& csv_path,
                        const std::filesystem::path& boundary_path);
std::vector<int> read_segmentation(const std::filesystem::path& csv_path);

// Default sidecar name used by the CLI: `seg.csv` -> `seg.boundaries`.
std::filesystem::path boundary_sidecar(const std::filesystem::path& csv_path);

// Boundaries implied by a per-frame label array (first frame of every run
// except the first).
BoundarySet boundaries_from_labels(std::span<const int> labels);

}  // namespace superframes
