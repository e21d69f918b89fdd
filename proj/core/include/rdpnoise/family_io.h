// Copyright 2026 The RDP Noise Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Text serialization of tailed noise families.
//
// A distribution file is one JSON document:
//
//   {"schema_version": 1, "kind": "continuous", "N": 8000, "r": 0.9999,
//    "delta_bin": 0.01, "p": [...], "metadata": {...}}

#ifndef RDPNOISE_FAMILY_IO_H_
#define RDPNOISE_FAMILY_IO_H_

#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "rdpnoise/noise_family.h"

namespace rdpnoise {

inline constexpr int kSchemaVersion = 1;

struct FamilyMetadata {
  std::optional<double> sigma;
  std::optional<double> sensitivity;
  std::optional<double> target_delta;
  std::optional<int> compositions;
  std::optional<double> final_alpha;
  std::optional<std::string> config_hash;
};

struct FamilyRecord {
  TailedNoiseFamily family;
  FamilyMetadata metadata;
};

// Doubles are written with 17 significant digits, so parsing the output
// reproduces the family bit for bit. tail_mass is added to the metadata.
std::string SerializeFamily(const TailedNoiseFamily& family,
                            const FamilyMetadata& metadata = {});

// Throws kParseError (with line or field), or the MakeFamily validation
// errors.
FamilyRecord DeserializeFamily(std::string_view text);

// "index,mass" rows for |i| <= N + ceil(log(1e-12) / log r).
void WriteMassCsv(const TailedNoiseFamily& family, std::ostream& out);

}  // namespace rdpnoise

#endif  // RDPNOISE_FAMILY_IO_H_
