#pragma once

// Artifact plumbing: the NLFD binary field format, FNV-1a content hashing,
// and a deterministic artifact sink (JSON reports, CSV tables, field files,
// manifest.json). Artifact bytes are a pure function of their inputs so that
// reruns with identical configs produce identical manifests.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "nlelast/core.hpp"
#include "nlelast/field.hpp"
#include "nlelast/geometry.hpp"

namespace nlelast {

using Json = nlohmann::ordered_json;

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_f64(std::string& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i)
    out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

inline std::uint32_t get_u32(const std::string& s, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(s[at + static_cast<std::size_t>(i)]))
         << (8 * i);
  return v;
}

inline double get_f64(const std::string& s, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(s[at + static_cast<std::size_t>(i)]))
         << (8 * i);
  return std::bit_cast<double>(v);
}

}  // namespace detail

// NLFD v1: magic "NLFD", u32 version=1, u32 d, u32 n[d], f64 spacing[d],
// u8 components, then f64 samples component-major (row-major per component),
// all little-endian. Origin and periodicity are out-of-band metadata.
inline std::string encode_nlfd(const GridField& u) {
  const Grid& g = u.grid;
  std::string out;
  out.reserve(17 + 12 * static_cast<std::size_t>(g.d) + 8 * u.data.size());
  out += "NLFD";
  detail::put_u32(out, 1);
  detail::put_u32(out, static_cast<std::uint32_t>(g.d));
  for (int a = 0; a < g.d; ++a)
    detail::put_u32(out, static_cast<std::uint32_t>(g.n[static_cast<std::size_t>(a)]));
  for (int a = 0; a < g.d; ++a)
    detail::put_f64(out, g.h[static_cast<std::size_t>(a)]);
  out.push_back(static_cast<char>(u.components));
  for (double v : u.data) detail::put_f64(out, v);
  return out;
}

inline GridField decode_nlfd(const std::string& bytes, bool periodic = false,
                             const Vec& origin = Vec()) {
  require(bytes.size() >= 13 && bytes.compare(0, 4, "NLFD") == 0, ErrorKind::usage,
          "decode_nlfd: bad magic");
  std::size_t at = 4;
  std::uint32_t version = detail::get_u32(bytes, at);
  at += 4;
  require(version == 1, ErrorKind::usage, "decode_nlfd: unsupported version");
  std::uint32_t d = detail::get_u32(bytes, at);
  at += 4;
  require(d >= 1 && d <= static_cast<std::uint32_t>(kMaxDim), ErrorKind::usage,
          "decode_nlfd: dimension outside {1,2,3}");
  require(bytes.size() >= at + 12 * d + 1, ErrorKind::usage,
          "decode_nlfd: truncated header");
  std::array<int, kMaxDim> n{1, 1, 1};
  for (std::uint32_t a = 0; a < d; ++a) {
    n[a] = static_cast<int>(detail::get_u32(bytes, at));
    at += 4;
  }
  std::array<double, kMaxDim> h{1.0, 1.0, 1.0};
  for (std::uint32_t a = 0; a < d; ++a) {
    h[a] = detail::get_f64(bytes, at);
    at += 8;
  }
  int components = static_cast<unsigned char>(bytes[at]);
  at += 1;
  Vec orig = origin.d == static_cast<int>(d) ? origin : Vec(static_cast<int>(d));
  Grid g(static_cast<int>(d), n, h, periodic, orig);
  GridField u(g, components);
  require(bytes.size() == at + 8 * u.data.size(), ErrorKind::usage,
          "decode_nlfd: sample count does not match the header");
  for (double& v : u.data) {
    v = detail::get_f64(bytes, at);
    at += 8;
  }
  return u;
}

inline void write_file_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorKind::usage, "cannot open for writing: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  require(out.good(), ErrorKind::usage, "write failed: " + path);
}

inline std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::usage, "cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_nlfd(const std::string& path, const GridField& u) {
  write_file_bytes(path, encode_nlfd(u));
}

inline GridField read_nlfd(const std::string& path, bool periodic = false,
                           const Vec& origin = Vec()) {
  return decode_nlfd(read_file_bytes(path), periodic, origin);
}

inline std::uint64_t fnv1a64(const void* data, std::size_t nbytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < nbytes; ++i) {
    hash ^= p[i];
    hash *= 0x100000001b3ull;
  }
  return hash;
}

inline std::string fnv1a64_hex(const std::string& bytes) {
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(bytes.data(), bytes.size());
  return ss.str();
}

// Fixed-format decimal used in CSV artifacts: up to 17 significant digits,
// locale independent (the process never switches locale).
inline std::string format_double(double v) {
  std::ostringstream ss;
  ss << std::setprecision(17) << v;
  return ss.str();
}

// Writes artifacts under one directory and finalizes a manifest.json listing
// every artifact with its content hash.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::string dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    require(!ec, ErrorKind::usage, "cannot create output directory: " + dir_);
  }

  const std::string& dir() const { return dir_; }

  void write_bytes(const std::string& name, const std::string& bytes) {
    write_file_bytes(dir_ + "/" + name, bytes);
    entries_.emplace_back(name, bytes);
  }

  void write_json(const std::string& name, const Json& j) {
    write_bytes(name, j.dump(2) + "\n");
  }

  void write_csv(const std::string& name, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c) out += ",";
      out += header[c];
    }
    out += "\n";
    for (const auto& row : rows) {
      require(row.size() == header.size(), ErrorKind::usage,
              "write_csv: row width does not match the header");
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) out += ",";
        out += format_double(row[c]);
      }
      out += "\n";
    }
    write_bytes(name, out);
  }

  void write_field(const std::string& name, const GridField& u) {
    write_bytes(name, encode_nlfd(u));
  }

  // manifest.json itself is not listed (its own hash cannot contain itself).
  void write_manifest() {
    std::vector<std::pair<std::string, const std::string*>> sorted;
    sorted.reserve(entries_.size());
    for (const auto& e : entries_) sorted.emplace_back(e.first, &e.second);
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    Json list = Json::array();
    for (const auto& [name, bytes] : sorted) {
      Json item;
      item["path"] = name;
      item["bytes"] = bytes->size();
      item["fnv1a64"] = fnv1a64_hex(*bytes);
      list.push_back(item);
    }
    Json m;
    m["artifacts"] = list;
    write_file_bytes(dir_ + "/manifest.json", m.dump(2) + "\n");
  }

 private:
  std::string dir_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace nlelast
