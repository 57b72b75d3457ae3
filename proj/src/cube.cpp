#include "hsdr/cube.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace hsdr {

namespace {

constexpr char kMagic[4] = {'H', 'S', 'C', '1'};
constexpr std::uint16_t kVersion = 1;
constexpr std::uint64_t kHeaderBytes = 4 + 2 + 3 * 4;

void put_u16(std::ostream& out, std::uint16_t v) {
  const unsigned char bytes[2] = {static_cast<unsigned char>(v & 0xff),
                                  static_cast<unsigned char>(v >> 8)};
  out.write(reinterpret_cast<const char*>(bytes), 2);
}

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

void put_f32(std::ostream& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(out, bits);
}

bool get_bytes(std::istream& in, unsigned char* dst, std::size_t n) {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
  return static_cast<std::size_t>(in.gcount()) == n;
}

std::uint32_t decode_u32(const unsigned char* b) {
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

Matrix HsiCube::band_plane(Index band) const {
  Matrix plane(lines, samples);
  for (Index l = 0; l < lines; ++l)
    for (Index s = 0; s < samples; ++s) plane(l, s) = values(pixel_index(l, s), band);
  return plane;
}

void save_cube(const HsiCube& cube, const std::string& path) {
  if (cube.bands < 1 || cube.lines < 1 || cube.samples < 1)
    throw InvalidInput("save_cube: empty cube");
  if (cube.values.rows() != cube.pixel_count() || cube.values.cols() != cube.bands)
    throw InvalidInput("save_cube: value matrix does not match declared dimensions");
  if (!cube.values.allFinite()) throw InvalidInput("save_cube: non-finite values");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("save_cube: cannot open " + path);
  out.write(kMagic, 4);
  put_u16(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(cube.lines));
  put_u32(out, static_cast<std::uint32_t>(cube.samples));
  put_u32(out, static_cast<std::uint32_t>(cube.bands));
  for (Index p = 0; p < cube.pixel_count(); ++p)
    for (Index b = 0; b < cube.bands; ++b)
      put_f32(out, static_cast<float>(cube.values(p, b)));
  if (!out) throw IoError("save_cube: write failed for " + path);
}

HsiCube load_cube(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_cube: cannot open " + path);

  unsigned char magic[4];
  if (!get_bytes(in, magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw FormatError("load_cube: bad magic", 0);
  unsigned char ver[2];
  if (!get_bytes(in, ver, 2))
    throw FormatError("load_cube: truncated header", 4);
  if ((static_cast<std::uint16_t>(ver[0]) | (static_cast<std::uint16_t>(ver[1]) << 8)) != kVersion)
    throw FormatError("load_cube: unsupported version", 4);

  std::uint32_t dims[3];
  for (int i = 0; i < 3; ++i) {
    unsigned char raw[4];
    if (!get_bytes(in, raw, 4))
      throw FormatError("load_cube: truncated header", 6 + 4 * static_cast<std::uint64_t>(i));
    dims[i] = decode_u32(raw);
  }
  if (dims[2] < 1) throw FormatError("load_cube: zero bands", 14);
  if (dims[0] == 0 || dims[1] == 0) throw FormatError("load_cube: zero extent", 6);

  // 2^33 values (32 GiB of f32 payload) is far beyond any real scene.
  constexpr std::uint64_t kMaxValues = 1ULL << 33;
  const std::uint64_t pixels = static_cast<std::uint64_t>(dims[0]) * dims[1];
  if (pixels / dims[1] != dims[0] || pixels > kMaxValues / dims[2])
    throw FormatError("load_cube: dimension overflow", 6);

  HsiCube cube;
  cube.lines = static_cast<Index>(dims[0]);
  cube.samples = static_cast<Index>(dims[1]);
  cube.bands = static_cast<Index>(dims[2]);
  cube.values.resize(cube.pixel_count(), cube.bands);

  std::uint64_t offset = kHeaderBytes;
  for (Index p = 0; p < cube.pixel_count(); ++p) {
    for (Index b = 0; b < cube.bands; ++b) {
      unsigned char raw[4];
      if (!get_bytes(in, raw, 4))
        throw FormatError("load_cube: truncated payload",
                          offset + static_cast<std::uint64_t>(in.gcount()));
      const std::uint32_t bits = decode_u32(raw);
      float v;
      std::memcpy(&v, &bits, 4);
      if (!std::isfinite(v))
        throw FormatError("load_cube: non-finite value", offset);
      cube.values(p, b) = static_cast<Scalar>(v);
      offset += 4;
    }
  }
  return cube;
}

void save_labels(const LabelSet& labels, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("save_labels: cannot open " + path);
  if (!labels.class_names.empty()) {
    out << "# classes:";
    for (std::size_t i = 0; i < labels.class_names.size(); ++i)
      out << (i ? "," : " ") << labels.class_names[i];
    out << "\n";
  }
  out << "pixel_index,class_id\n";
  for (std::size_t p = 0; p < labels.class_of.size(); ++p)
    out << p << "," << labels.class_of[p] << "\n";
  if (!out) throw IoError("save_labels: write failed for " + path);
}

LabelSet load_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_labels: cannot open " + path);
  LabelSet labels;
  std::string line;
  std::vector<std::pair<std::size_t, int>> entries;
  int max_class = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("classes:");
      if (pos != std::string::npos) {
        std::stringstream names(line.substr(pos + 8));
        std::string name;
        while (std::getline(names, name, ',')) {
          while (!name.empty() && name.front() == ' ') name.erase(name.begin());
          if (!name.empty()) labels.class_names.push_back(name);
        }
      }
      continue;
    }
    if (line.rfind("pixel_index", 0) == 0) continue;
    std::stringstream row(line);
    std::string a, b;
    if (!std::getline(row, a, ',') || !std::getline(row, b))
      throw IoError("load_labels: malformed row '" + line + "'");
    try {
      entries.emplace_back(static_cast<std::size_t>(std::stoull(a)), std::stoi(b));
    } catch (const std::exception&) {
      throw IoError("load_labels: malformed row '" + line + "'");
    }
    max_class = std::max(max_class, entries.back().second);
  }
  labels.class_of.assign(entries.size(), 0);
  for (auto& [pixel, cls] : entries) {
    if (pixel >= labels.class_of.size())
      throw IoError("load_labels: pixel index out of range in " + path);
    labels.class_of[pixel] = cls;
  }
  if (labels.class_names.empty())
    for (int c = 0; c <= max_class; ++c)
      labels.class_names.push_back("class_" + std::to_string(c));
  return labels;
}

void save_mask(const TargetMask& mask, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("save_mask: cannot open " + path);
  out << "pixel_index\n";
  for (Index p : mask.indices) out << p << "\n";
  if (!out) throw IoError("save_mask: write failed for " + path);
}

TargetMask load_mask(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_mask: cannot open " + path);
  TargetMask mask;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("pixel_index", 0) == 0) continue;
    try {
      mask.indices.push_back(static_cast<Index>(std::stoll(line)));
    } catch (const std::exception&) {
      throw IoError("load_mask: malformed row '" + line + "'");
    }
  }
  std::sort(mask.indices.begin(), mask.indices.end());
  mask.indices.erase(std::unique(mask.indices.begin(), mask.indices.end()),
                     mask.indices.end());
  return mask;
}

}  // namespace hsdr
