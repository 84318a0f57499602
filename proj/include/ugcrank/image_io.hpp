// Copyright 2026 The ugcrank Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "ugcrank/image.hpp"

namespace ugcrank {

// Decodes any format OpenCV's imgcodecs understands (PNG, JPEG, PPM, BMP,
// TIFF, ...) into RGB. Throws IoError if the file is missing or undecodable.
RgbImage read_image(const std::filesystem::path& path);

// Writes an 8-bit lossless PNG. Samples are clamped and rounded to the nearest
// of 256 levels, so write -> read reproduces quantize8(img) exactly.
void write_png(const std::filesystem::path& path, const RgbImage& img);

// PNG-encoded bytes of the 8-bit quantization.
std::vector<std::uint8_t> encode_png(const RgbImage& img);

// Round every sample to the 8-bit grid the PNG writer uses.
RgbImage quantize8(const RgbImage& img);

}  // namespace ugcrank
