#include "polypuzzle/io.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "polypuzzle/errors.hpp"
#include "polypuzzle/version.hpp"

namespace polypuzzle {

namespace {

using OrderedJson = nlohmann::ordered_json;

OrderedJson point_array(const std::vector<Complex>& points) {
    OrderedJson arr = OrderedJson::array();
    for (const Complex& z : points) arr.push_back({z.real(), z.imag()});
    return arr;
}

// Two-space indent, trailing newline: stable layout for byte comparisons.
std::string dump(const OrderedJson& j) { return j.dump(2) + "\n"; }

void put_be32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>((v >> 24) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>(v & 0xff));
}

void put_chunk(std::string& out, const char type[4], const std::string& data) {
    put_be32(out, static_cast<std::uint32_t>(data.size()));
    std::string body(type, 4);
    body += data;
    out += body;
    const auto crc =
        crc32(0L, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size()));
    put_be32(out, static_cast<std::uint32_t>(crc));
}

void check_raster(int width, int height, const std::vector<std::uint8_t>& pixels) {
    if (width <= 0 || height <= 0 ||
        pixels.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
        throw Error("raster size mismatch");
}

}  // namespace

std::string format_double(double x) {
    if (x == 0.0) return "0";  // merge the zero signs
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::string polyline_csv(const std::vector<Complex>& points) {
    std::string out = "re,im\n";
    for (const Complex& z : points) {
        out += format_double(z.real());
        out += ',';
        out += format_double(z.imag());
        out += '\n';
    }
    return out;
}

std::string equipotential_json(double level, const std::vector<Complex>& points) {
    OrderedJson j;
    j["level"] = level;
    j["points"] = point_array(points);
    return dump(j);
}

std::string ray_json(const ExternalRay& ray) {
    OrderedJson j;
    j["angle"] = ray.angle.str();
    j["points"] = point_array(ray.points);
    if (ray.landing)
        j["landing"] = {ray.landing->real(), ray.landing->imag()};
    else
        j["landing"] = nullptr;
    return dump(j);
}

std::string piece_json(const PuzzlePiece& piece) {
    std::vector<Angle> angles;
    for (const PieceEdge& edge : piece.boundary)
        if (edge.kind == PieceEdge::Kind::Ray) angles.push_back(edge.angle);
    std::sort(angles.begin(), angles.end());
    angles.erase(std::unique(angles.begin(), angles.end()), angles.end());

    OrderedJson j;
    j["depth"] = piece.depth;
    OrderedJson names = OrderedJson::array();
    for (const Angle& a : angles) names.push_back(a.str());
    j["angles"] = names;
    j["polygon"] = point_array(piece.polygon);
    j["vertices_on_julia"] = point_array(piece.vertex_points);
    return dump(j);
}

std::string components_csv(const std::vector<ComponentRecord>& records) {
    std::string out = "id,kind,cycle,pixels,diameter,touches_boundary\n";
    for (const ComponentRecord& r : records) {
        out += std::to_string(r.id);
        out += r.kind == ComponentKind::FilledJulia ? ",filled-julia," : ",fatou,";
        out += std::to_string(r.cycle);
        out += ',';
        out += std::to_string(r.pixel_count);
        out += ',';
        out += format_double(r.diameter);
        out += ',';
        out += r.touches_boundary ? '1' : '0';
        out += '\n';
    }
    return out;
}

std::string shrink_csv(const std::vector<ShrinkRow>& rows) {
    std::string out = "epsilon,count\n";
    for (const ShrinkRow& row : rows) {
        out += format_double(row.epsilon);
        out += ',';
        out += std::to_string(row.count);
        out += '\n';
    }
    return out;
}

void write_pgm(const std::string& path, int width, int height,
               const std::vector<std::uint8_t>& pixels) {
    check_raster(width, height, pixels);
    std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(pixels.data()), pixels.size());
    write_text_file(path, out);
}

void write_png(const std::string& path, int width, int height,
               const std::vector<std::uint8_t>& pixels) {
    check_raster(width, height, pixels);

    // Filter byte 0 before each scanline, then one deflate stream.
    std::string raw;
    raw.reserve(static_cast<std::size_t>(height) * (static_cast<std::size_t>(width) + 1));
    for (int y = 0; y < height; ++y) {
        raw.push_back('\0');
        raw.append(reinterpret_cast<const char*>(pixels.data()) +
                       static_cast<std::size_t>(y) * width,
                   static_cast<std::size_t>(width));
    }
    uLongf compressed_size = compressBound(static_cast<uLong>(raw.size()));
    std::string compressed(compressed_size, '\0');
    if (compress2(reinterpret_cast<Bytef*>(compressed.data()), &compressed_size,
                  reinterpret_cast<const Bytef*>(raw.data()), static_cast<uLong>(raw.size()),
                  9) != Z_OK)
        throw Error("png deflate failed");
    compressed.resize(compressed_size);

    std::string out("\x89PNG\r\n\x1a\n", 8);
    std::string ihdr;
    put_be32(ihdr, static_cast<std::uint32_t>(width));
    put_be32(ihdr, static_cast<std::uint32_t>(height));
    ihdr += '\x08';  // bit depth
    ihdr += '\x00';  // grayscale
    ihdr += '\x00';  // deflate
    ihdr += '\x00';  // adaptive filtering
    ihdr += '\x00';  // no interlace
    put_chunk(out, "IHDR", ihdr);
    put_chunk(out, "IDAT", compressed);
    put_chunk(out, "IEND", "");
    write_text_file(path, out);
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw Error("cannot open " + path + " for writing");
    file.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!file) throw Error("write failed for " + path);
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t hash = 14695981039346656037ull;
    for (unsigned char byte : text) {
        hash ^= byte;
        hash *= 1099511628211ull;
    }
    return hash;
}

std::string manifest_json(const std::string& config_text, std::vector<std::string> files) {
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(config_text)));
    std::sort(files.begin(), files.end());
    OrderedJson j;
    j["config_hash"] = std::string("fnv1a:") + hex;
    j["version"] = kVersion;
    j["files"] = files;
    return dump(j);
}

}  // namespace polypuzzle
