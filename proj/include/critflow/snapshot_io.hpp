#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "critflow/field.hpp"

namespace critflow {

inline constexpr char kSnapshotMagic[8] = {'C', 'R', 'I', 'T', 'F', 'L', 'D', '1'};
inline constexpr const char* kConventionTag = "fourier-series-coeffs-v1";

static_assert(std::endian::native == std::endian::little, "snapshot format is little-endian");

// Layout: magic[8] | u32 n | f64 L | u32 components | u32 tag_len | tag |
// then for m0, m1, m2 each ascending over [-n/2, n/2): three (re, im) f64 pairs.

namespace detail {
template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}
template <class T>
T take(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw std::runtime_error("snapshot: truncated file");
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}
}  // namespace detail

inline std::string encode_snapshot(const SpectralVectorField& f) {
  const Grid& g = f.grid();
  std::string out(kSnapshotMagic, sizeof(kSnapshotMagic));
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(g.n()));
  detail::put<double>(out, g.box_length());
  detail::put<std::uint32_t>(out, 3);
  const std::string tag = kConventionTag;
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(tag.size()));
  out += tag;
  const int h = g.n() / 2;
  for (int m0 = -h; m0 < h; ++m0) {
    for (int m1 = -h; m1 < h; ++m1) {
      for (int m2 = -h; m2 < h; ++m2) {
        const auto c = f.at(g.index_of_mode(m0, m1, m2));
        for (const auto& z : c) {
          detail::put<double>(out, z.real());
          detail::put<double>(out, z.imag());
        }
      }
    }
  }
  return out;
}

inline SpectralVectorField decode_snapshot(const std::string& bytes) {
  if (bytes.size() < sizeof(kSnapshotMagic) || std::memcmp(bytes.data(), kSnapshotMagic, sizeof(kSnapshotMagic)) != 0) {
    throw std::runtime_error("snapshot: bad magic");
  }
  std::size_t pos = sizeof(kSnapshotMagic);
  const auto n = detail::take<std::uint32_t>(bytes, pos);
  const auto L = detail::take<double>(bytes, pos);
  const auto comps = detail::take<std::uint32_t>(bytes, pos);
  const auto tag_len = detail::take<std::uint32_t>(bytes, pos);
  if (comps != 3) throw std::runtime_error("snapshot: expected 3 components");
  if (pos + tag_len > bytes.size()) throw std::runtime_error("snapshot: truncated file");
  const std::string tag = bytes.substr(pos, tag_len);
  pos += tag_len;
  if (tag != kConventionTag) throw std::runtime_error("snapshot: unknown convention tag '" + tag + "'");
  SpectralVectorField f(Grid(static_cast<int>(n), L));
  const Grid& g = f.grid();
  const int h = g.n() / 2;
  for (int m0 = -h; m0 < h; ++m0) {
    for (int m1 = -h; m1 < h; ++m1) {
      for (int m2 = -h; m2 < h; ++m2) {
        Vec3c c;
        for (auto& z : c) {
          const double re = detail::take<double>(bytes, pos);
          const double im = detail::take<double>(bytes, pos);
          z = Complex(re, im);
        }
        f.set(g.index_of_mode(m0, m1, m2), c);
      }
    }
  }
  if (pos != bytes.size()) throw std::runtime_error("snapshot: trailing bytes");
  return f;
}

inline void write_snapshot(const std::filesystem::path& path, const SpectralVectorField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("snapshot: cannot open " + path.string() + " for writing");
  const std::string bytes = encode_snapshot(f);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline SpectralVectorField read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("snapshot: cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return decode_snapshot(ss.str());
}

}  // namespace critflow
