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

#include "rguard/io.h"

#include <charconv>
#include <cstring>
#include <fstream>
#include <cstdio>
#include <sstream>
#include <system_error>

namespace rguard::io {

namespace {

constexpr char kEmb1Magic[8] = {'E', 'M', 'B', '1', '\0', '\0', '\0', '\0'};

[[noreturn]] void format_error(const std::string& where, const std::string& what) {
  throw_error(ErrorCode::kConfig, where + ": " + what);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

// Data lines of a CSV document: comments ("#...") and blank lines dropped,
// '\r' stripped.
std::vector<std::string_view> data_lines(std::string_view text) {
  std::vector<std::string_view> out;
  for (std::string_view line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    out.push_back(line);
  }
  return out;
}

void check_token(std::string_view token, const char* what) {
  if (token.empty()) format_error(what, "empty value");
  if (token.find_first_of(",\n\r") != std::string_view::npos || token.front() == '#') {
    format_error(what, "value '" + std::string(token) + "' contains a reserved character");
  }
}

template <class T>
void put_le(std::string& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

template <class T>
T get_le(std::string_view bytes, std::size_t& pos) {
  if (bytes.size() - pos < sizeof(T)) format_error("EMB1", "truncated file");
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<T>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
  }
  pos += sizeof(T);
  return v;
}

std::uint64_t double_bits(double v) {
  std::uint64_t b;
  std::memcpy(&b, &v, sizeof b);
  return b;
}

double bits_double(std::uint64_t b) {
  double v;
  std::memcpy(&v, &b, sizeof v);
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (begin != end && *begin == '+') ++begin;
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw_error(ErrorCode::kConfig, "cannot parse number '" + std::string(text) + "'");
  }
  return v;
}

std::string hash_hex(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_error(ErrorCode::kIo, "cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw_error(ErrorCode::kIo, "error reading '" + path.string() + "'");
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw_error(ErrorCode::kIo, "cannot open '" + tmp.string() + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw_error(ErrorCode::kIo, "error writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw_error(ErrorCode::kIo, "cannot move output into place at '" + path.string() + "': " + ec.message());
}

std::string encode_emb1(const Emb1Table& table) {
  std::string out(kEmb1Magic, sizeof kEmb1Magic);
  put_le<std::uint32_t>(out, table.k);
  put_le<std::uint64_t>(out, table.records.size());
  for (const auto& rec : table.records) {
    if (rec.values.size() != table.k) {
      throw_error(ErrorCode::kDimensionMismatch, "EMB1 record '" + rec.id + "' does not have k values");
    }
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(rec.id.size()));
    out += rec.id;
    for (double v : rec.values) put_le<std::uint64_t>(out, double_bits(v));
  }
  return out;
}

Emb1Table decode_emb1(std::string_view bytes) {
  if (bytes.size() < sizeof kEmb1Magic || std::memcmp(bytes.data(), kEmb1Magic, sizeof kEmb1Magic) != 0) {
    format_error("EMB1", "bad magic");
  }
  std::size_t pos = sizeof kEmb1Magic;
  Emb1Table table;
  table.k = get_le<std::uint32_t>(bytes, pos);
  const auto count = get_le<std::uint64_t>(bytes, pos);
  if (table.k == 0) format_error("EMB1", "k must be >= 1");
  // Each record needs at least 4 + 8k bytes; reject absurd counts early.
  if (count > (bytes.size() - pos) / (4 + 8ull * table.k)) format_error("EMB1", "record count exceeds file size");
  table.records.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    Emb1Record rec;
    const auto len = get_le<std::uint32_t>(bytes, pos);
    if (bytes.size() - pos < len) format_error("EMB1", "truncated id");
    rec.id.assign(bytes.substr(pos, len));
    pos += len;
    rec.values.resize(table.k);
    for (auto& v : rec.values) v = bits_double(get_le<std::uint64_t>(bytes, pos));
    table.records.push_back(std::move(rec));
  }
  if (pos != bytes.size()) format_error("EMB1", "trailing bytes after last record");
  return table;
}

void write_emb1(const std::filesystem::path& path, const Emb1Table& table) {
  write_file_atomic(path, encode_emb1(table));
}

Emb1Table read_emb1(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  try {
    return decode_emb1(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::map<std::string, Label> read_labels_csv(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const auto lines = data_lines(text);
  const std::string where = path.string();
  if (lines.empty() || lines.front() != "id,label") format_error(where, "expected header 'id,label'");
  std::map<std::string, Label> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cols = split(lines[i], ',');
    if (cols.size() != 2) format_error(where, "expected 2 columns on data line " + std::to_string(i));
    check_token(cols[0], "label file id");
    check_token(cols[1], "label file label");
    if (!out.emplace(std::string(cols[0]), std::string(cols[1])).second) {
      format_error(where, "duplicate id '" + std::string(cols[0]) + "'");
    }
  }
  return out;
}

std::vector<LabeledSample> read_dataset_csv(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const auto lines = data_lines(text);
  const std::string where = path.string();
  if (lines.empty()) format_error(where, "missing header");
  const auto header = split(lines.front(), ',');
  if (header.size() < 3 || header[0] != "id" || header[1] != "label") {
    format_error(where, "expected header 'id,label,x0,...'");
  }
  const std::size_t d = header.size() - 2;
  std::vector<LabeledSample> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cols = split(lines[i], ',');
    if (cols.size() != d + 2) format_error(where, "wrong column count on data line " + std::to_string(i));
    check_token(cols[0], "dataset id");
    check_token(cols[1], "dataset label");
    std::vector<double> x(d);
    for (std::size_t j = 0; j < d; ++j) x[j] = parse_double(cols[j + 2]);
    try {
      out.push_back(LabeledSample{std::string(cols[0]), std::string(cols[1]), InputVector(std::move(x))});
    } catch (const Error& e) {
      format_error(where, "sample '" + std::string(cols[0]) + "': " + e.what());
    }
  }
  if (out.empty()) format_error(where, "dataset has no samples");
  check_unique_ids(out);
  return out;
}

std::string encode_dataset_csv(std::span<const LabeledSample> samples) {
  std::string out = "id,label";
  const std::size_t d = samples.empty() ? 0 : samples.front().input.size();
  for (std::size_t j = 0; j < d; ++j) out += ",x" + std::to_string(j);
  out += '\n';
  for (const auto& s : samples) {
    check_token(s.id, "dataset id");
    check_token(s.label, "dataset label");
    out += s.id + "," + s.label;
    for (double v : s.input.values()) out += "," + format_double(v);
    out += '\n';
  }
  return out;
}

std::vector<LabeledSample> read_dataset_emb1(const std::filesystem::path& table_path,
                                             const std::filesystem::path& labels_path) {
  const Emb1Table table = read_emb1(table_path);
  const auto labels = read_labels_csv(labels_path);
  std::vector<LabeledSample> out;
  out.reserve(table.records.size());
  for (const auto& rec : table.records) {
    auto it = labels.find(rec.id);
    if (it == labels.end()) {
      format_error(labels_path.string(), "no label for id '" + rec.id + "'");
    }
    out.push_back(LabeledSample{rec.id, it->second, InputVector(rec.values)});
  }
  if (out.empty()) format_error(table_path.string(), "dataset has no samples");
  check_unique_ids(out);
  return out;
}

std::string encode_records_csv(std::span<const CertificationRecord> records, std::string_view config_hash) {
  std::string out = "# config_hash=" + std::string(config_hash) + "\n";
  out += "id,score,d_hat,d_lower,radius\n";
  for (const auto& r : records) {
    check_token(r.query_id, "record id");
    out += r.query_id;
    out += ',';
    out += cert_status_token(r.status);
    out += ',' + format_double(r.d_hat) + ',' + format_double(r.d_lower) + ',' + format_double(r.radius) + '\n';
  }
  return out;
}

std::vector<CertificationRecord> decode_records_csv(std::string_view text) {
  const auto lines = data_lines(text);
  if (lines.empty() || lines.front() != "id,score,d_hat,d_lower,radius") {
    format_error("records", "expected header 'id,score,d_hat,d_lower,radius'");
  }
  std::vector<CertificationRecord> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cols = split(lines[i], ',');
    if (cols.size() != 5) format_error("records", "expected 5 columns on data line " + std::to_string(i));
    CertificationRecord r;
    r.query_id = std::string(cols[0]);
    if (cols[1] == "1") {
      r.status = CertStatus::kCertified;
    } else if (cols[1] == "0") {
      r.status = CertStatus::kNotRetrieved;
    } else if (cols[1] == "rejected") {
      r.status = CertStatus::kRejected;
    } else {
      format_error("records", "unknown score '" + std::string(cols[1]) + "'");
    }
    r.d_hat = parse_double(cols[2]);
    r.d_lower = parse_double(cols[3]);
    r.radius = parse_double(cols[4]);
    if (r.certified() != (r.radius > 0.0)) {
      format_error("records", "record '" + r.query_id + "' has inconsistent score and radius");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string encode_curve_csv(const RecallCurve& curve, std::string_view config_hash) {
  std::string out = "# config_hash=" + std::string(config_hash) + "\n";
  out += "r,recall_at_1_r\n";
  for (std::size_t i = 0; i < curve.radii.size(); ++i) {
    out += format_double(curve.radii[i]) + ',' + format_double(curve.values[i]) + '\n';
  }
  return out;
}

}  // namespace rguard::io
