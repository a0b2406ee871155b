#include "superframes/pc_baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <string>

#include <fftw3.h>

#include "superframes/error.hpp"

namespace superframes {

namespace {

// Spectrum elements whose cross-power magnitude falls below this are
// zeroed instead of divided.
constexpr double kSpectrumFloor = 1e-12;

struct PlanDeleter {
    void operator()(fftw_plan_s* plan) const { fftw_destroy_plan(plan); }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

struct BufferDeleter {
    void operator()(fftw_complex* p) const { fftw_free(p); }
};
using Buffer = std::unique_ptr<fftw_complex[], BufferDeleter>;

Buffer make_buffer(std::size_t n) {
    auto* raw = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    if (raw == nullptr) throw std::bad_alloc();
    return Buffer(raw);
}

// In-place unnormalized 3-D DFT.
void transform(fftw_complex* data, int width, int height, int depth, int sign) {
    Plan plan(fftw_plan_dft_3d(depth, height, width, data, data, sign, FFTW_ESTIMATE));
    if (!plan) throw Error(ErrorCode::InvalidArgument, "FFTW could not plan the transform");
    fftw_execute(plan.get());
}

std::size_t volume_size(int width, int height, int depth) {
    if (width < 1 || height < 1 || depth < 1) {
        throw Error(ErrorCode::InvalidArgument, "volume dimensions must be positive");
    }
    return static_cast<std::size_t>(width) * height * depth;
}

int wrap_signed(long value, int n) {
    long v = ((value % n) + n) % n;
    if (v > n / 2) v -= n;
    return static_cast<int>(v);
}

Buffer centered_spectrum(const SpaceTimeVolume& vol) {
    const std::size_t n = vol.voxels.size();
    const double mean = std::accumulate(vol.voxels.begin(), vol.voxels.end(), 0.0) /
                        static_cast<double>(n);
    auto buf = make_buffer(n);
    for (std::size_t i = 0; i < n; ++i) {
        buf[i][0] = vol.voxels[i] - mean;
        buf[i][1] = 0.0;
    }
    transform(buf.get(), vol.width, vol.height, vol.depth, FFTW_FORWARD);
    return buf;
}

}  // namespace

void PcParams::validate() const {
    if (crop < 8) throw Error(ErrorCode::InvalidArgument, "crop must be >= 8");
    if (depth < 2) throw Error(ErrorCode::InvalidArgument, "depth must be >= 2");
    if (stride < 1) throw Error(ErrorCode::InvalidArgument, "stride must be >= 1");
}

std::vector<std::complex<double>> fft3d(std::span<const std::complex<double>> data, int width,
                                        int height, int depth) {
    const std::size_t n = volume_size(width, height, depth);
    if (data.size() != n) throw Error(ErrorCode::DimensionMismatch, "fft3d input size");
    auto buf = make_buffer(n);
    for (std::size_t i = 0; i < n; ++i) {
        buf[i][0] = data[i].real();
        buf[i][1] = data[i].imag();
    }
    transform(buf.get(), width, height, depth, FFTW_FORWARD);
    std::vector<std::complex<double>> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = {buf[i][0], buf[i][1]};
    return out;
}

std::vector<std::complex<double>> ifft3d(std::span<const std::complex<double>> spectrum,
                                         int width, int height, int depth) {
    const std::size_t n = volume_size(width, height, depth);
    if (spectrum.size() != n) throw Error(ErrorCode::DimensionMismatch, "ifft3d input size");
    auto buf = make_buffer(n);
    for (std::size_t i = 0; i < n; ++i) {
        buf[i][0] = spectrum[i].real();
        buf[i][1] = spectrum[i].imag();
    }
    transform(buf.get(), width, height, depth, FFTW_BACKWARD);
    std::vector<std::complex<double>> out(n);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = {buf[i][0] * scale, buf[i][1] * scale};
    return out;
}

VolumeBuild build_volumes(std::span<const FrameImage> frames, const PcParams& params) {
    params.validate();
    if (frames.empty()) throw Error(ErrorCode::InvalidArgument, "no frames");
    const int width = frames.front().width;
    const int height = frames.front().height;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (frames[i].width != width || frames[i].height != height) {
            throw Error(ErrorCode::MixedDimensions,
                        "frame " + std::to_string(i) + " is " + std::to_string(frames[i].width) +
                            "x" + std::to_string(frames[i].height) + ", frame 0 is " +
                            std::to_string(width) + "x" + std::to_string(height));
        }
    }

    VolumeBuild build;
    build.crop = std::min({params.crop, width, height});
    build.crop_reduced = build.crop < params.crop;
    build.offset_x = (width - build.crop) / 2;
    build.offset_y = (height - build.crop) / 2;

    std::vector<const FrameImage*> sampled;
    for (std::size_t i = 0; i < frames.size(); i += static_cast<std::size_t>(params.stride)) {
        sampled.push_back(&frames[i]);
    }
    const std::size_t groups = sampled.size() / static_cast<std::size_t>(params.depth);
    build.dropped_frames = static_cast<int>(sampled.size() - groups * params.depth);

    for (std::size_t g = 0; g < groups; ++g) {
        SpaceTimeVolume vol;
        vol.width = build.crop;
        vol.height = build.crop;
        vol.depth = params.depth;
        vol.voxels.resize(volume_size(vol.width, vol.height, vol.depth));
        for (int t = 0; t < params.depth; ++t) {
            const FrameImage& frame = *sampled[g * params.depth + t];
            for (int y = 0; y < build.crop; ++y) {
                for (int x = 0; x < build.crop; ++x) {
                    vol.at(x, y, t) = frame.at(x + build.offset_x, y + build.offset_y);
                }
            }
        }
        build.volumes.push_back(std::move(vol));
    }
    return build;
}

PhaseCorrelationResult phase_correlation(const SpaceTimeVolume& a, const SpaceTimeVolume& b) {
    if (a.width != b.width || a.height != b.height || a.depth != b.depth) {
        throw Error(ErrorCode::DimensionMismatch, "phase correlation needs equal volume shapes");
    }
    const std::size_t n = volume_size(a.width, a.height, a.depth);
    if (a.voxels.size() != n || b.voxels.size() != n) {
        throw Error(ErrorCode::InvalidArgument, "voxel count does not match volume shape");
    }

    auto fa = centered_spectrum(a);
    auto fb = centered_spectrum(b);
    // R = Fa * conj(Fb) / |Fa * conj(Fb)|, written back into fa.
    std::size_t kept = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::complex<double> ca(fa[i][0], fa[i][1]);
        const std::complex<double> cb(fb[i][0], fb[i][1]);
        const std::complex<double> cross = ca * std::conj(cb);
        const double magnitude = std::abs(cross);
        if (magnitude < kSpectrumFloor) {
            fa[i][0] = 0.0;
            fa[i][1] = 0.0;
        } else {
            fa[i][0] = cross.real() / magnitude;
            fa[i][1] = cross.imag() / magnitude;
            ++kept;
        }
    }

    PhaseCorrelationResult result;
    if (kept == 0) return result;

    transform(fa.get(), a.width, a.height, a.depth, FFTW_BACKWARD);
    // Normalizing by the contributing frequencies (not all n) puts a perfect
    // match at exactly 1 even though the zeroed DC term carries no phase.
    std::size_t peak = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        if (fa[i][0] > best) {
            best = fa[i][0];
            peak = i;
        }
    }
    result.corr = best / static_cast<double>(kept);

    const auto plane = static_cast<std::size_t>(a.width) * a.height;
    const auto t = static_cast<long>(peak / plane);
    const auto y = static_cast<long>((peak % plane) / a.width);
    const auto x = static_cast<long>(peak % a.width);
    // Fa * conj(Fb) peaks at -d when b is a displaced by d.
    result.shift = {wrap_signed(-x, a.width), wrap_signed(-y, a.height), wrap_signed(-t, a.depth)};
    return result;
}

std::vector<double> correlation_series(std::span<const SpaceTimeVolume> volumes) {
    std::vector<double> corrs;
    for (std::size_t i = 0; i + 1 < volumes.size(); ++i) {
        corrs.push_back(phase_correlation(volumes[i], volumes[i + 1]).corr);
    }
    return corrs;
}

int junction_frame(std::size_t i, const PcParams& params) {
    return static_cast<int>(i + 1) * params.depth * params.stride;
}

BoundarySet segment_by_threshold(std::span<const double> corrs, double threshold,
                                 const PcParams& params, int n_frames) {
    std::vector<int> boundaries;
    for (std::size_t i = 0; i < corrs.size(); ++i) {
        if (corrs[i] < threshold) boundaries.push_back(junction_frame(i, params));
    }
    return BoundarySet(std::move(boundaries), n_frames);
}

ThresholdChoice threshold_for_k(std::span<const double> corrs, int k_target) {
    if (k_target < 1) throw Error(ErrorCode::InvalidArgument, "k_target must be >= 1");

    // Candidates: 0, every observed value, and one step above the largest so
    // that every junction can become a boundary.
    std::vector<double> candidates(corrs.begin(), corrs.end());
    candidates.push_back(0.0);
    if (!corrs.empty()) {
        const double top = *std::max_element(corrs.begin(), corrs.end());
        candidates.push_back(std::nextafter(std::max(top, 0.0), std::numeric_limits<double>::infinity()));
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    auto segments_at = [&](double threshold) {
        return 1 + static_cast<int>(std::count_if(corrs.begin(), corrs.end(),
                                                  [&](double c) { return c < threshold; }));
    };

    ThresholdChoice best{candidates.front(), segments_at(candidates.front()), true};
    int best_gap = std::abs(best.achieved - k_target);
    for (double t : candidates) {
        const int count = segments_at(t);
        if (count == k_target) return {t, count, false};
        const int gap = std::abs(count - k_target);
        // Ascending candidates give non-decreasing counts, so on a tie the
        // incumbent already has the fewer segments.
        if (gap < best_gap) {
            best = {t, count, true};
            best_gap = gap;
        }
    }
    return best;
}

}  // namespace superframes
