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

#include "rdpnoise/family_io.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <vector>

#include <nlohmann/json.hpp>

#include "rdpnoise/error.h"

namespace rdpnoise {
namespace {

using nlohmann::json;

[[noreturn]] void FieldError(std::string_view field, std::string_view what) {
  throw Error(ErrorCode::kParseError,
              "field '" + std::string(field) + "': " + std::string(what));
}

const json& Require(const json& doc, const char* field) {
  const auto it = doc.find(field);
  if (it == doc.end()) FieldError(field, "missing");
  return *it;
}

double RequireNumber(const json& doc, const char* field) {
  const json& v = Require(doc, field);
  if (!v.is_number()) FieldError(field, "expected a number");
  return v.get<double>();
}

int RequireInt(const json& doc, const char* field) {
  const json& v = Require(doc, field);
  if (!v.is_number_integer()) FieldError(field, "expected an integer");
  return v.get<int>();
}

template <typename T>
void ReadOptional(const json& meta, const char* field, std::optional<T>& out) {
  const auto it = meta.find(field);
  if (it == meta.end() || it->is_null()) return;
  if constexpr (std::is_same_v<T, std::string>) {
    if (!it->is_string()) FieldError(std::string("metadata.") + field,
                                     "expected a string");
  } else if constexpr (std::is_integral_v<T>) {
    if (!it->is_number_integer()) {
      FieldError(std::string("metadata.") + field, "expected an integer");
    }
  } else {
    if (!it->is_number()) {
      FieldError(std::string("metadata.") + field, "expected a number");
    }
  }
  out = it->get<T>();
}

template <typename T>
void WriteOptional(json& meta, const char* field, const std::optional<T>& v) {
  if (v) meta[field] = *v;
}

}  // namespace

std::string SerializeFamily(const TailedNoiseFamily& family,
                            const FamilyMetadata& metadata) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = std::string(DomainKindName(family.kind()));
  doc["N"] = family.tail_start();
  doc["r"] = family.tail_ratio();
  doc["delta_bin"] = family.bin_width();
  doc["p"] = std::vector<double>(family.head().begin(), family.head().end());
  json meta = json::object();
  WriteOptional(meta, "sigma", metadata.sigma);
  WriteOptional(meta, "sensitivity", metadata.sensitivity);
  WriteOptional(meta, "target_delta", metadata.target_delta);
  WriteOptional(meta, "compositions", metadata.compositions);
  WriteOptional(meta, "final_alpha", metadata.final_alpha);
  meta["tail_mass"] = family.tail_mass();
  WriteOptional(meta, "config_hash", metadata.config_hash);
  doc["metadata"] = std::move(meta);
  return doc.dump(1) + "\n";
}

FamilyRecord DeserializeFamily(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t at = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + at, '\n');
    throw Error(ErrorCode::kParseError,
                "line " + std::to_string(line) + ": " + e.what());
  }
  if (!doc.is_object()) {
    throw Error(ErrorCode::kParseError, "line 1: expected a JSON object");
  }
  const int version = RequireInt(doc, "schema_version");
  if (version != kSchemaVersion) {
    FieldError("schema_version", "unsupported version " +
                                     std::to_string(version));
  }
  const json& kind_field = Require(doc, "kind");
  if (!kind_field.is_string()) FieldError("kind", "expected a string");
  DomainKind kind;
  try {
    kind = ParseDomainKind(kind_field.get<std::string>());
  } catch (const Error&) {
    FieldError("kind", "expected \"continuous\" or \"discrete\"");
  }
  const int n = RequireInt(doc, "N");
  const double r = RequireNumber(doc, "r");
  const double w = RequireNumber(doc, "delta_bin");
  const json& p_field = Require(doc, "p");
  if (!p_field.is_array()) FieldError("p", "expected an array");
  std::vector<double> p;
  p.reserve(p_field.size());
  for (std::size_t i = 0; i < p_field.size(); ++i) {
    if (!p_field[i].is_number()) {
      FieldError("p[" + std::to_string(i) + "]", "expected a number");
    }
    p.push_back(p_field[i].get<double>());
  }

  FamilyMetadata metadata;
  if (const auto it = doc.find("metadata"); it != doc.end()) {
    if (!it->is_object()) FieldError("metadata", "expected an object");
    ReadOptional(*it, "sigma", metadata.sigma);
    ReadOptional(*it, "sensitivity", metadata.sensitivity);
    ReadOptional(*it, "target_delta", metadata.target_delta);
    ReadOptional(*it, "compositions", metadata.compositions);
    ReadOptional(*it, "final_alpha", metadata.final_alpha);
    ReadOptional(*it, "config_hash", metadata.config_hash);
  }
  return FamilyRecord{MakeFamily(std::move(p), r, n, w, kind),
                      std::move(metadata)};
}

void WriteMassCsv(const TailedNoiseFamily& family, std::ostream& out) {
  const std::int64_t reach =
      family.tail_start() +
      static_cast<std::int64_t>(
          std::ceil(std::log(1e-12) / std::log(family.tail_ratio())));
  out << "index,mass\n" << std::setprecision(17);
  for (std::int64_t i = -reach; i <= reach; ++i) {
    out << i << ',' << MassAt(family, i) << '\n';
  }
}

}  // namespace rdpnoise
