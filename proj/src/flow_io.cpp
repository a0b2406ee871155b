#include "superframes/flow_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "superframes/error.hpp"
#include "superframes/features.hpp"
#include "text_util.hpp"

namespace superframes {

namespace fs = std::filesystem;

namespace {

std::vector<unsigned char> slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::ofstream open_for_write(const fs::path& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::IoFailure, "cannot create " + path.string());
    }
    return out;
}

void finish_write(std::ofstream& out, const fs::path& path) {
    out.flush();
    if (!out) {
        throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
    }
}

std::uint32_t load_le32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void store_le32(std::uint32_t value, std::string& out) {
    for (int shift = 0; shift < 32; shift += 8) {
        out.push_back(static_cast<char>((value >> shift) & 0xFFu));
    }
}

}  // namespace

void FlowField::validate() const {
    if (width < 1 || height < 1) {
        throw Error(ErrorCode::InvalidArgument, "flow field dimensions must be positive");
    }
    if (u.size() != pixel_count() || v.size() != pixel_count()) {
        throw Error(ErrorCode::InvalidArgument,
                    "flow components must each hold width*height values (u=" +
                        std::to_string(u.size()) + ", v=" + std::to_string(v.size()) +
                        ", expected " + std::to_string(pixel_count()) + ")");
    }
}

BoundarySet::BoundarySet(std::vector<int> boundaries, int n_frames)
    : boundaries_(std::move(boundaries)), n_frames_(n_frames) {
    if (n_frames_ < 1) {
        throw Error(ErrorCode::InvalidArgument, "n_frames must be positive");
    }
    std::sort(boundaries_.begin(), boundaries_.end());
    boundaries_.erase(std::unique(boundaries_.begin(), boundaries_.end()), boundaries_.end());
    for (int b : boundaries_) {
        if (b < 1 || b > n_frames_ - 1) {
            throw Error(ErrorCode::OutOfRange, "boundary " + std::to_string(b) +
                                                   " outside [1, " +
                                                   std::to_string(n_frames_ - 1) + "]");
        }
    }
}

FlowField read_flo(const fs::path& path) {
    const auto bytes = slurp(path);
    if (bytes.size() < 4) {
        throw Error(ErrorCode::Truncated, path.string() + ": missing header");
    }
    if (std::bit_cast<float>(load_le32(bytes.data())) != kFloMagic) {
        throw Error(ErrorCode::BadMagic, path.string() + " is not a .flo file");
    }
    if (bytes.size() < 12) {
        throw Error(ErrorCode::Truncated, path.string() + ": missing header");
    }
    const auto width = std::bit_cast<std::int32_t>(load_le32(bytes.data() + 4));
    const auto height = std::bit_cast<std::int32_t>(load_le32(bytes.data() + 8));
    if (width < 1 || height < 1) {
        throw Error(ErrorCode::NonPositiveDims, path.string() + ": " + std::to_string(width) +
                                                    "x" + std::to_string(height));
    }

    FlowField field;
    field.width = width;
    field.height = height;
    const std::size_t n = field.pixel_count();
    if ((bytes.size() - 12) / 8 < n) {
        throw Error(ErrorCode::Truncated, path.string() + ": payload shorter than " +
                                              std::to_string(width) + "x" +
                                              std::to_string(height));
    }
    field.u.resize(n);
    field.v.resize(n);
    const unsigned char* p = bytes.data() + 12;
    for (std::size_t i = 0; i < n; ++i, p += 8) {
        field.u[i] = std::bit_cast<float>(load_le32(p));
        field.v[i] = std::bit_cast<float>(load_le32(p + 4));
    }
    return field;
}

void write_flo(const FlowField& field, const fs::path& path) {
    field.validate();
    std::string buffer;
    buffer.reserve(12 + 8 * field.pixel_count());
    store_le32(std::bit_cast<std::uint32_t>(kFloMagic), buffer);
    store_le32(std::bit_cast<std::uint32_t>(static_cast<std::int32_t>(field.width)), buffer);
    store_le32(std::bit_cast<std::uint32_t>(static_cast<std::int32_t>(field.height)), buffer);
    for (std::size_t i = 0; i < field.pixel_count(); ++i) {
        store_le32(std::bit_cast<std::uint32_t>(field.u[i]), buffer);
        store_le32(std::bit_cast<std::uint32_t>(field.v[i]), buffer);
    }
    auto out = open_for_write(path, std::ios::binary);
    out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    finish_write(out, path);
}

FrameImage read_pgm(const fs::path& path) {
    const auto bytes = slurp(path);
    std::size_t pos = 0;
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
        throw Error(ErrorCode::BadHeader, path.string() + " is not a binary PGM (P5)");
    }
    pos = 2;

    auto is_space = [](unsigned char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
    };
    // Header numbers are separated by whitespace and '#' comments running to
    // end of line.
    auto next_number = [&](const char* what) {
        for (;;) {
            while (pos < bytes.size() && is_space(bytes[pos])) ++pos;
            if (pos < bytes.size() && bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
                continue;
            }
            break;
        }
        const std::size_t start = pos;
        while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') ++pos;
        if (start == pos || (pos < bytes.size() && !is_space(bytes[pos]))) {
            throw Error(ErrorCode::BadHeader, path.string() + ": bad " + what);
        }
        long value = 0;
        const auto* first = reinterpret_cast<const char*>(bytes.data() + start);
        const auto* last = reinterpret_cast<const char*>(bytes.data() + pos);
        if (std::from_chars(first, last, value).ec != std::errc{}) {
            throw Error(ErrorCode::BadHeader, path.string() + ": bad " + what);
        }
        return value;
    };

    const long width = next_number("width");
    const long height = next_number("height");
    const long maxval = next_number("maxval");
    if (width < 1 || height < 1) {
        throw Error(ErrorCode::BadHeader, path.string() + ": non-positive dimensions");
    }
    if (maxval < 1 || maxval > 255) {
        throw Error(ErrorCode::UnsupportedMaxval, path.string() + ": maxval " +
                                                      std::to_string(maxval));
    }
    if (pos >= bytes.size()) {
        throw Error(ErrorCode::Truncated, path.string() + ": no pixel data");
    }
    ++pos;  // single whitespace byte after maxval

    FrameImage image;
    image.width = static_cast<int>(width);
    image.height = static_cast<int>(height);
    const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (bytes.size() - pos < n) {
        throw Error(ErrorCode::Truncated, path.string() + ": expected " + std::to_string(n) +
                                              " pixels, found " +
                                              std::to_string(bytes.size() - pos));
    }
    image.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                        bytes.begin() + static_cast<std::ptrdiff_t>(pos + n));
    return image;
}

void write_pgm(const FrameImage& image, const fs::path& path) {
    if (image.width < 1 || image.height < 1 ||
        image.pixels.size() != static_cast<std::size_t>(image.width) * image.height) {
        throw Error(ErrorCode::InvalidArgument, "image pixel count does not match dimensions");
    }
    auto out = open_for_write(path, std::ios::binary);
    out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.pixels.data()),
              static_cast<std::streamsize>(image.pixels.size()));
    finish_write(out, path);
}

BoundarySet read_boundaries(const fs::path& path, int n_frames) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    }
    std::vector<int> values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view text = line;
        if (auto hash = text.find('#'); hash != std::string_view::npos) {
            text = text.substr(0, hash);
        }
        text = detail::trim(text);
        if (text.empty()) continue;
        const auto value = detail::parse_int(text);
        if (!value) {
            throw Error(ErrorCode::NotAnInteger, path.string() + ":" + std::to_string(line_no) +
                                                     ": '" + std::string(text) + "'");
        }
        values.push_back(*value);
    }
    return BoundarySet(std::move(values), n_frames);
}

void write_boundaries(const BoundarySet& boundaries, const fs::path& path) {
    auto out = open_for_write(path);
    for (int b : boundaries.boundaries()) {
        out << b << '\n';
    }
    finish_write(out, path);
}

std::vector<FrameFeatures> read_feature_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::MissingColumn, path.string() + ": empty file, no header");
    }
    const auto header = detail::split_csv(line);
    std::map<std::string, std::size_t, std::less<>> column;
    for (std::size_t i = 0; i < header.size(); ++i) {
        column.emplace(std::string(detail::trim(header[i])), i);
    }
    auto require = [&](const std::string& name) {
        auto it = column.find(name);
        if (it == column.end()) {
            throw Error(ErrorCode::MissingColumn, path.string() + ": no column '" + name + "'");
        }
        return it->second;
    };
    const std::size_t frame_col = require("frame");
    std::array<std::size_t, kHomBins> hom_cols{};
    std::array<std::size_t, kHodBins> hod_cols{};
    for (std::size_t b = 0; b < kHomBins; ++b) hom_cols[b] = require("hom" + std::to_string(b));
    for (std::size_t b = 0; b < kHodBins; ++b) hod_cols[b] = require("hod" + std::to_string(b));

    std::vector<FrameFeatures> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_csv(line);
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (fields.size() != header.size()) {
            throw Error(ErrorCode::MissingColumn, where + ": expected " +
                                                      std::to_string(header.size()) +
                                                      " fields, got " +
                                                      std::to_string(fields.size()));
        }
        FrameFeatures f;
        const auto frame = detail::parse_int(detail::trim(fields[frame_col]));
        if (!frame) {
            throw Error(ErrorCode::NotAnInteger, where + ": frame '" +
                                                     std::string(fields[frame_col]) + "'");
        }
        f.frame = *frame;
        if (f.frame != static_cast<int>(rows.size())) {
            throw Error(ErrorCode::NonConsecutiveFrames,
                        where + ": expected frame " + std::to_string(rows.size()) + ", got " +
                            std::to_string(f.frame));
        }
        auto number = [&](std::size_t col) {
            const auto value = detail::parse_double(detail::trim(fields[col]));
            if (!value) {
                throw Error(ErrorCode::NotANumber, where + ": column '" +
                                                       std::string(detail::trim(header[col])) +
                                                       "'");
            }
            if (*value < 0.0) {
                throw Error(ErrorCode::NegativeHistogramValue,
                            where + ": column '" + std::string(detail::trim(header[col])) +
                                "' is negative");
            }
            return *value;
        };
        for (std::size_t b = 0; b < kHomBins; ++b) f.hom[b] = number(hom_cols[b]);
        for (std::size_t b = 0; b < kHodBins; ++b) f.hod[b] = number(hod_cols[b]);
        rows.push_back(f);
    }
    return rows;
}

void write_feature_csv(std::span<const FrameFeatures> features, const fs::path& path) {
    auto out = open_for_write(path);
    out << "frame";
    for (std::size_t b = 0; b < kHomBins; ++b) out << ",hom" << b;
    for (std::size_t b = 0; b < kHodBins; ++b) out << ",hod" << b;
    out << '\n';
    for (const auto& f : features) {
        out << f.frame;
        for (double x : f.hom) out << ',' << detail::format_double(x);
        for (double x : f.hod) out << ',' << detail::format_double(x);
        out << '\n';
    }
    finish_write(out, path);
}

BoundarySet boundaries_from_labels(std::span<const int> labels) {
    if (labels.empty()) {
        throw Error(ErrorCode::InvalidArgument, "label array is empty");
    }
    std::vector<int> starts;
    for (std::size_t i = 1; i < labels.size(); ++i) {
        if (labels[i] != labels[i - 1]) starts.push_back(static_cast<int>(i));
    }
    return BoundarySet(std::move(starts), static_cast<int>(labels.size()));
}

void write_segmentation(std::span<const int> labels, const fs::path& csv_path,
                        const fs::path& boundary_path) {
    const BoundarySet boundaries = boundaries_from_labels(labels);
    // Contiguity: one run per label.
    std::vector<int> seen;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i == 0 || labels[i] != labels[i - 1]) {
            if (std::find(seen.begin(), seen.end(), labels[i]) != seen.end()) {
                throw Error(ErrorCode::InvalidArgument,
                            "label " + std::to_string(labels[i]) + " forms more than one run");
            }
            seen.push_back(labels[i]);
        }
    }
    auto out = open_for_write(csv_path);
    out << "frame,label\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out << i << ',' << labels[i] << '\n';
    }
    finish_write(out, csv_path);
    write_boundaries(boundaries, boundary_path);
}

std::vector<int> read_segmentation(const fs::path& csv_path) {
    std::ifstream in(csv_path);
    if (!in) {
        throw Error(ErrorCode::IoFailure, "cannot open " + csv_path.string());
    }
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != "frame,label") {
        throw Error(ErrorCode::MissingColumn, csv_path.string() + ": expected header frame,label");
    }
    std::vector<int> labels;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_csv(line);
        if (fields.size() != 2) {
            throw Error(ErrorCode::MissingColumn, csv_path.string() + ": malformed row");
        }
        const auto frame = detail::parse_int(detail::trim(fields[0]));
        const auto label = detail::parse_int(detail::trim(fields[1]));
        if (!frame || !label) {
            throw Error(ErrorCode::NotAnInteger, csv_path.string() + ": malformed row '" + line +
                                                     "'");
        }
        if (*frame != static_cast<int>(labels.size())) {
            throw Error(ErrorCode::NonConsecutiveFrames, csv_path.string() + ": frame " +
                                                             std::to_string(*frame));
        }
        labels.push_back(*label);
    }
    return labels;
}

fs::path boundary_sidecar(const fs::path& csv_path) {
    fs::path sidecar = csv_path;
    sidecar.replace_extension(".boundaries");
    return sidecar;
}

}  // namespace superframes
