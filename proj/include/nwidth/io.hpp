#pragma once

// File formats (documented in docs/formats.md):
//   HWF1  field/coefficient arrays: magic, u32 dim, u32 n, u32 complex flag,
//         u64 count, count doubles (or 2*count for complex), little-endian.
//   HWT1  coefficient-table archive: magic, u64 count, then per entry a
//         length-prefixed index string followed by an HWF1 payload.
//   HWB1  covering centers: magic, u32 dims, u64 count, count*dims complex
//         values as (re, im) double pairs.
// CSV files carry a header row; numbers are printed with "%.17g".

#include <Eigen/Dense>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "nwidth/grid.hpp"
#include "nwidth/multiindex.hpp"
#include "nwidth/taylor.hpp"

namespace nwidth {

inline std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {

template <class T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw DomainError("unexpected end of binary file");
  return v;
}

inline void write_magic(std::ostream& os, const char magic[4]) {
  os.write(magic, 4);
}

inline void expect_magic(std::istream& is, const char magic[4],
                         const std::string& what) {
  char buf[4];
  is.read(buf, 4);
  if (!is || std::memcmp(buf, magic, 4) != 0)
    throw DomainError("bad magic in " + what + " file");
}

}  // namespace detail

struct ArrayFile {
  Grid grid;
  bool complex_valued = false;
  Eigen::VectorXd real_values;
  Eigen::VectorXcd complex_values;
};

inline void write_array(std::ostream& os, const Grid& g,
                        const Eigen::VectorXd& values) {
  detail::write_magic(os, "HWF1");
  detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(g.dim));
  detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(g.n));
  detail::write_pod<std::uint32_t>(os, 0);
  detail::write_pod<std::uint64_t>(os, static_cast<std::uint64_t>(values.size()));
  os.write(reinterpret_cast<const char*>(values.data()),
           values.size() * sizeof(double));
}

inline void write_array(std::ostream& os, const Grid& g,
                        const Eigen::VectorXcd& values) {
  detail::write_magic(os, "HWF1");
  detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(g.dim));
  detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(g.n));
  detail::write_pod<std::uint32_t>(os, 1);
  detail::write_pod<std::uint64_t>(os, static_cast<std::uint64_t>(values.size()));
  os.write(reinterpret_cast<const char*>(values.data()),
           values.size() * 2 * sizeof(double));
}

inline ArrayFile read_array(std::istream& is) {
  detail::expect_magic(is, "HWF1", "array");
  const auto dim = detail::read_pod<std::uint32_t>(is);
  const auto n = detail::read_pod<std::uint32_t>(is);
  const auto flag = detail::read_pod<std::uint32_t>(is);
  const auto count = detail::read_pod<std::uint64_t>(is);
  ArrayFile out;
  out.grid = Grid(static_cast<int>(dim), static_cast<int>(n));
  out.complex_valued = flag != 0;
  if (out.complex_valued) {
    out.complex_values.resize(static_cast<Eigen::Index>(count));
    is.read(reinterpret_cast<char*>(out.complex_values.data()),
            static_cast<std::streamsize>(count * 2 * sizeof(double)));
  } else {
    out.real_values.resize(static_cast<Eigen::Index>(count));
    is.read(reinterpret_cast<char*>(out.real_values.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
  }
  if (!is) throw DomainError("truncated array payload");
  return out;
}

inline void write_array_file(const std::filesystem::path& path, const Grid& g,
                             const Eigen::VectorXd& values) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DomainError("cannot open " + path.string() + " for writing");
  write_array(os, g, values);
}

inline ArrayFile read_array_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DomainError("cannot open " + path.string());
  return read_array(is);
}

// Coefficient-table archive plus the plain-text index ("<nu> <norm>" lines).
inline void write_taylor_archive(const std::filesystem::path& path,
                                 const TaylorTable& table) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DomainError("cannot open " + path.string() + " for writing");
  detail::write_magic(os, "HWT1");
  detail::write_pod<std::uint64_t>(os, table.indices.size());
  for (std::size_t i = 0; i < table.indices.size(); ++i) {
    const std::string key = table.indices[i].str();
    detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(key.size()));
    os.write(key.data(), static_cast<std::streamsize>(key.size()));
    write_array(os, table.grid, table.coefficients[i]);
  }
}

inline TaylorTable read_taylor_archive(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DomainError("cannot open " + path.string());
  detail::expect_magic(is, "HWT1", "table archive");
  const auto count = detail::read_pod<std::uint64_t>(is);
  TaylorTable table;
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto len = detail::read_pod<std::uint32_t>(is);
    std::string key(len, '\0');
    is.read(key.data(), len);
    ArrayFile arr = read_array(is);
    if (arr.complex_valued)
      throw DomainError("table archive holds complex coefficients");
    table.grid = arr.grid;
    table.indices.push_back(MultiIndex::parse(key));
    table.coefficients.push_back(arr.real_values);
  }
  Energy energy(table.grid);
  for (std::size_t i = 0; i < table.indices.size(); ++i) {
    table.norms.push_back(energy.norm(table.coefficients[i]));
    table.position.emplace(table.indices[i], static_cast<int>(i));
  }
  return table;
}

inline void write_taylor_index(const std::filesystem::path& path,
                               const TaylorTable& table) {
  std::ofstream os(path);
  if (!os) throw DomainError("cannot open " + path.string() + " for writing");
  for (std::size_t i = 0; i < table.indices.size(); ++i)
    os << table.indices[i].str() << ' ' << fmt_num(table.norms[i]) << '\n';
}

inline void write_centers_file(const std::filesystem::path& path,
                               const Eigen::MatrixXcd& centers) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DomainError("cannot open " + path.string() + " for writing");
  detail::write_magic(os, "HWB1");
  detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(centers.rows()));
  detail::write_pod<std::uint64_t>(os, static_cast<std::uint64_t>(centers.cols()));
  os.write(reinterpret_cast<const char*>(centers.data()),
           centers.size() * 2 * sizeof(double));
}

inline Eigen::MatrixXcd read_centers_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DomainError("cannot open " + path.string());
  detail::expect_magic(is, "HWB1", "centers");
  const auto dims = detail::read_pod<std::uint32_t>(is);
  const auto count = detail::read_pod<std::uint64_t>(is);
  Eigen::MatrixXcd centers(dims, static_cast<Eigen::Index>(count));
  is.read(reinterpret_cast<char*>(centers.data()),
          static_cast<std::streamsize>(centers.size() * 2 * sizeof(double)));
  if (!is) throw DomainError("truncated centers payload");
  return centers;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path,
            const std::vector<std::string>& header)
      : os_(path) {
    if (!os_) throw DomainError("cannot open " + path.string() + " for writing");
    write_row(header);
  }

  void write_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os_ << ',';
      os_ << cells[i];
    }
    os_ << '\n';
  }

 private:
  std::ofstream os_;
};

inline std::uint64_t fnv1a64(const char* data, std::size_t size) {
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t hash_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DomainError("cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(is)),
                   std::istreambuf_iterator<char>());
  return fnv1a64(data.data(), data.size());
}

// Manifest line per artifact: "<bytes> <fnv64 hex> <relative path>", sorted
// by path. The manifest itself is excluded.
inline void write_manifest(const std::filesystem::path& dir,
                           const std::string& manifest_name = "manifest.txt") {
  std::map<std::string, std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string rel =
        std::filesystem::relative(entry.path(), dir).generic_string();
    if (rel == manifest_name) continue;
    files.emplace(rel, entry.path());
  }
  std::ofstream os(dir / manifest_name);
  if (!os) throw DomainError("cannot write manifest in " + dir.string());
  for (const auto& [rel, path] : files) {
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(hash_file(path)));
    os << std::filesystem::file_size(path) << ' ' << hex << ' ' << rel << '\n';
  }
}

}  // namespace nwidth
