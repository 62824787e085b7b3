#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polypuzzle/components.hpp"
#include "polypuzzle/pieces.hpp"
#include "polypuzzle/polynomial.hpp"
#include "polypuzzle/ray.hpp"

namespace polypuzzle {

// Serializers for the command line front end. Every writer is
// deterministic: equal values produce equal bytes, so runs with the same
// config and seed diff clean.

// Shortest decimal digits that parse back to the same double.
std::string format_double(double x);

// CSV with header `re,im`, one vertex per row.
std::string polyline_csv(const std::vector<Complex>& points);

// {"level": r, "points": [[re,im],...]}
std::string equipotential_json(double level, const std::vector<Complex>& points);

// {"angle": "p/q", "points": [[re,im],...], "landing": [re,im] | null}
std::string ray_json(const ExternalRay& ray);

// {"depth": n, "angles": ["p/q",...], "polygon": [[re,im],...],
//  "vertices_on_julia": [[re,im],...]}; angles are the boundary ray angles,
// sorted, without repeats.
std::string piece_json(const PuzzlePiece& piece);

// CSV with header `id,kind,cycle,pixels,diameter,touches_boundary`.
std::string components_csv(const std::vector<ComponentRecord>& records);

// CSV with header `epsilon,count`.
std::string shrink_csv(const std::vector<ShrinkRow>& rows);

// 8-bit grayscale rasters, row-major, top row first. PNG is emitted by a
// self-contained encoder over zlib deflate; PGM is binary P5.
void write_pgm(const std::string& path, int width, int height,
               const std::vector<std::uint8_t>& pixels);
void write_png(const std::string& path, int width, int height,
               const std::vector<std::uint8_t>& pixels);

// Throws Error when the file cannot be created or written.
void write_text_file(const std::string& path, const std::string& content);

// 64-bit FNV-1a over the bytes of `text`.
std::uint64_t fnv1a64(const std::string& text);

// manifest.json content for one output batch: the config hash, the library
// version, and the file names written, sorted.
std::string manifest_json(const std::string& config_text,
                          std::vector<std::string> files);

}  // namespace polypuzzle
