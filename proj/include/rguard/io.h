// Copyright 2026 the retrievalguard authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rguard/certifier.h"
#include "rguard/embedding.h"
#include "rguard/eval.h"

namespace rguard::io {

/// Round-trip exact decimal: 17 significant digits (%.17g), '.' separator, no locale.
std::string format_double(double v);

/// Locale-independent strict parse; throws kConfig on trailing junk.
double parse_double(std::string_view text);

/// FNV-1a 64-bit digest as 16 lowercase hex digits.
std::string hash_hex(std::string_view bytes);

std::string read_file(const std::filesystem::path& path);

/// Writes via a temporary sibling and rename, so readers never see a
/// partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// EMB1 embedding tables: magic "EMB1\0\0\0\0", u32 k, u64 count, then per
// record u32 id length, UTF-8 id bytes and k float64 values. All integers
// and floats little-endian.
struct Emb1Record {
  std::string id;
  std::vector<double> values;
};

struct Emb1Table {
  std::uint32_t k = 0;
  std::vector<Emb1Record> records;
};

std::string encode_emb1(const Emb1Table& table);
Emb1Table decode_emb1(std::string_view bytes);
void write_emb1(const std::filesystem::path& path, const Emb1Table& table);
Emb1Table read_emb1(const std::filesystem::path& path);

/// Labels CSV: header "id,label", one row per id.
std::map<std::string, Label> read_labels_csv(const std::filesystem::path& path);

/// Dataset CSV: header "id,label,x0,...,x{d-1}".
std::vector<LabeledSample> read_dataset_csv(const std::filesystem::path& path);
std::string encode_dataset_csv(std::span<const LabeledSample> samples);

/// Dataset stored as an EMB1 table of inputs plus a labels CSV.
std::vector<LabeledSample> read_dataset_emb1(const std::filesystem::path& table, const std::filesystem::path& labels);

// Records CSV: optional "# key=value" comment lines, then header
// "id,score,d_hat,d_lower,radius". score is 1, 0 or "rejected"; radius is
// -1 for every record without a certificate.
std::string encode_records_csv(std::span<const CertificationRecord> records, std::string_view config_hash);
std::vector<CertificationRecord> decode_records_csv(std::string_view text);

/// Curve CSV: "# config_hash=..." then header "r,recall_at_1_r".
std::string encode_curve_csv(const RecallCurve& curve, std::string_view config_hash);

}  // namespace rguard::io
