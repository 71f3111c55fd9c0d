#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "embexp/cbow.hpp"

namespace embexp::cbow {

enum class VectorFormat { text, binary };

// File format shared with standard embedding tooling: header line "V D",
// then one record per word.  Text records hold D decimals (round trip within
// 1e-6 per coordinate); binary records hold D little-endian 32-bit floats
// (bit-exact round trip).
void save_vectors(const EmbeddingModel& model, Layer layer, const std::filesystem::path& path,
                  VectorFormat format);

struct VectorFile {
    std::vector<std::string> words;
    std::vector<float> matrix;  // row-major words.size() x dimension
    int dimension = 0;
};

VectorFile load_vectors(const std::filesystem::path& path, VectorFormat format);

// Parses a "V D" header line; throws IoError on malformed input.
std::pair<std::size_t, int> parse_vector_header(const std::string& line);

}  // namespace embexp::cbow
