#pragma once

#include <string>

#include "gradsec/model.hpp"

namespace gradsec {

// Binary model format (magic "GSEC1", little-endian; see docs/FORMATS.md).
// Round-trips structure and weights exactly.
void save_model(const Model& m, const std::string& path);
Model load_model(const std::string& path);

// Simple tensor container (magic "GTNS1"); used for reconstruction artifacts.
void save_tensor(const Tensor& t, const std::string& path);
Tensor load_tensor(const std::string& path);

// 8-bit grayscale (P5) or RGB (P6) preview of an image tensor shaped
// (h, w, 1|3) or (1, h, w, 1|3); values clipped to [0, 1].
void save_image_preview(const Tensor& t, const std::string& path);

}  // namespace gradsec
