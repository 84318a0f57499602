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

#include <memory>
#include <string>

#include "ugcrank/features.hpp"

namespace ugcrank {

// Loads a pretrained backbone exported to ONNX and runs it through OpenCV's
// dnn module. The graph takes a 1x3x224x224 NCHW tensor scaled to [-1,1]
// and must expose two outputs named "embedding" and "probs" (10 values).
// Throws IoError if the file cannot be loaded and ContractError if the
// outputs do not have that shape.
std::shared_ptr<const FeatureExtractor> make_onnx_extractor(const std::string& path, BackboneRole role);

}  // namespace ugcrank
