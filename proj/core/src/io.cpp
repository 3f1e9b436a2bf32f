#include "texfuse/io.hpp"

#include <unistd.h>
#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace texfuse {

namespace {

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---- PGM (P5) ----

// Consumes whitespace and '#' comments between header tokens.
std::size_t skip_pgm_space(const std::string& bytes, std::size_t pos) {
  while (pos < bytes.size()) {
    const char c = bytes[pos];
    if (c == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else {
      break;
    }
  }
  return pos;
}

long parse_pgm_int(const std::string& bytes, std::size_t& pos) {
  pos = skip_pgm_space(bytes, pos);
  std::size_t start = pos;
  while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) ++pos;
  if (pos == start) throw input_error("malformed PGM header");
  return std::stol(bytes.substr(start, pos - start));
}

GrayField read_pgm(const std::string& bytes, const std::string& path) {
  std::size_t pos = 2;  // past "P5"
  const long w = parse_pgm_int(bytes, pos);
  const long h = parse_pgm_int(bytes, pos);
  const long maxval = parse_pgm_int(bytes, pos);
  if (w <= 0 || h <= 0) throw input_error("bad PGM dimensions in " + path);
  if (maxval != 255) throw input_error("unsupported PGM maxval (want 255) in " + path);
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos])))
    throw input_error("malformed PGM header in " + path);
  ++pos;  // single whitespace byte before raster
  const std::size_t npix = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (bytes.size() - pos < npix) throw input_error("truncated PGM payload in " + path);
  GrayField f(static_cast<int>(w), static_cast<int>(h));
  for (std::size_t i = 0; i < npix; ++i)
    f.data[i] = static_cast<unsigned char>(bytes[pos + i]) / 255.0;
  return f;
}

// ---- PNG (8-bit, color types 0 and 2, no interlace) ----

std::uint32_t be32(const unsigned char* p) {
  return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
         (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

int paeth(int a, int b, int c) {
  const int p = a + b - c;
  const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

GrayField read_png(const std::string& bytes, const std::string& path) {
  static const unsigned char sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() < 8 || std::memcmp(bytes.data(), sig, 8) != 0)
    throw input_error("not a PNG file: " + path);

  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  std::size_t pos = 8;
  std::uint32_t width = 0, height = 0;
  int color_type = -1, bit_depth = 0;
  std::string idat;
  bool seen_iend = false;

  while (pos + 8 <= bytes.size()) {
    const std::uint32_t len = be32(data + pos);
    if (pos + 12 + len > bytes.size()) throw input_error("truncated PNG chunk in " + path);
    const char* type = bytes.data() + pos + 4;
    const unsigned char* payload = data + pos + 8;
    const std::uint32_t stored_crc = be32(payload + len);
    const auto crc = static_cast<std::uint32_t>(
        crc32(crc32(0L, Z_NULL, 0), data + pos + 4, len + 4));
    if (crc != stored_crc) throw input_error("PNG CRC mismatch in " + path);

    if (std::memcmp(type, "IHDR", 4) == 0) {
      if (len != 13) throw input_error("bad IHDR in " + path);
      width = be32(payload);
      height = be32(payload + 4);
      bit_depth = payload[8];
      color_type = payload[9];
      const int interlace = payload[12];
      if (bit_depth != 8) throw input_error("unsupported PNG bit depth in " + path);
      if (color_type != 0 && color_type != 2)
        throw input_error("unsupported PNG color type in " + path);
      if (interlace != 0) throw input_error("interlaced PNG unsupported: " + path);
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      idat.append(reinterpret_cast<const char*>(payload), len);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      seen_iend = true;
      break;
    }
    pos += 12 + len;
  }
  if (width == 0 || height == 0 || color_type < 0)
    throw input_error("PNG missing IHDR: " + path);
  if (!seen_iend) throw input_error("PNG missing IEND: " + path);

  const int channels = color_type == 2 ? 3 : 1;
  const std::size_t stride = static_cast<std::size_t>(width) * channels;
  const std::size_t raw_size = (stride + 1) * height;
  std::vector<unsigned char> raw(raw_size);

  z_stream zs{};
  if (inflateInit(&zs) != Z_OK) throw input_error("zlib init failed");
  zs.next_in = reinterpret_cast<Bytef*>(idat.data());
  zs.avail_in = static_cast<uInt>(idat.size());
  zs.next_out = raw.data();
  zs.avail_out = static_cast<uInt>(raw.size());
  const int zret = inflate(&zs, Z_FINISH);
  inflateEnd(&zs);
  if (zret != Z_STREAM_END || zs.total_out != raw_size)
    throw input_error("PNG decompression failed (truncated payload?) in " + path);

  // Undo per-scanline filters in place; prev points at the defiltered line above.
  const int bpp = channels;
  std::vector<unsigned char> pixels(stride * height);
  for (std::uint32_t y = 0; y < height; ++y) {
    const unsigned char filter = raw[(stride + 1) * y];
    const unsigned char* src = raw.data() + (stride + 1) * y + 1;
    unsigned char* dst = pixels.data() + stride * y;
    const unsigned char* prev = y > 0 ? pixels.data() + stride * (y - 1) : nullptr;
    for (std::size_t x = 0; x < stride; ++x) {
      const int left = x >= static_cast<std::size_t>(bpp) ? dst[x - bpp] : 0;
      const int up = prev ? prev[x] : 0;
      const int ul = (prev && x >= static_cast<std::size_t>(bpp)) ? prev[x - bpp] : 0;
      int v = src[x];
      switch (filter) {
        case 0: break;
        case 1: v += left; break;
        case 2: v += up; break;
        case 3: v += (left + up) / 2; break;
        case 4: v += paeth(left, up, ul); break;
        default: throw input_error("unknown PNG filter type in " + path);
      }
      dst[x] = static_cast<unsigned char>(v & 0xff);
    }
  }

  GrayField f(static_cast<int>(width), static_cast<int>(height));
  for (std::size_t i = 0; i < static_cast<std::size_t>(width) * height; ++i) {
    if (channels == 1) {
      f.data[i] = pixels[i] / 255.0;
    } else {
      const double sum = pixels[3 * i] + pixels[3 * i + 1] + pixels[3 * i + 2];
      f.data[i] = sum / (3.0 * 255.0);
    }
  }
  return f;
}

void write_bytes_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path dir = target.parent_path();
  if (dir.empty()) dir = ".";
  const fs::path tmp = dir / (target.filename().string() + ".tmp." +
                              std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw input_error("cannot write file: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw input_error("write failed: " + path);
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw input_error("cannot rename into place: " + path);
  }
}

void append_u64_le(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t read_u64_le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(p[i]) << (8 * i);
  return v;
}

}  // namespace

GrayField read_image(const std::string& path) {
  const std::string bytes = read_file_bytes(path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return read_pgm(bytes, path);
  if (bytes.size() >= 8 && static_cast<unsigned char>(bytes[0]) == 0x89 &&
      bytes[1] == 'P')
    return read_png(bytes, path);
  throw input_error("unrecognized image format: " + path);
}

void write_image(const GrayField& field, const std::string& path) {
  if (field.empty()) throw input_error("cannot write empty field");
  std::string out = "P5\n" + std::to_string(field.width) + " " +
                    std::to_string(field.height) + "\n255\n";
  out.reserve(out.size() + field.size());
  for (double v : field.data) {
    const double c = std::clamp(v, 0.0, 1.0);
    out.push_back(static_cast<char>(static_cast<int>(std::floor(c * 255.0 + 0.5))));
  }
  write_bytes_atomic(path, out);
}

void write_field_raw(const GrayField& field, const std::string& path) {
  if (field.empty()) throw input_error("cannot write empty field");
  std::string out;
  out.reserve(16 + field.size() * 8);
  append_u64_le(out, static_cast<std::uint64_t>(field.width));
  append_u64_le(out, static_cast<std::uint64_t>(field.height));
  for (double v : field.data) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    append_u64_le(out, bits);
  }
  write_bytes_atomic(path, out);
}

GrayField read_field_raw(const std::string& path) {
  const std::string bytes = read_file_bytes(path);
  if (bytes.size() < 16) throw input_error("truncated raw field: " + path);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint64_t w = read_u64_le(p);
  const std::uint64_t h = read_u64_le(p + 8);
  if (w == 0 || h == 0 || w > (1u << 20) || h > (1u << 20))
    throw input_error("bad raw field dimensions: " + path);
  const std::size_t npix = static_cast<std::size_t>(w * h);
  if (bytes.size() != 16 + npix * 8) throw input_error("raw field size mismatch: " + path);
  GrayField f(static_cast<int>(w), static_cast<int>(h));
  for (std::size_t i = 0; i < npix; ++i) {
    std::uint64_t bits = read_u64_le(p + 16 + 8 * i);
    std::memcpy(&f.data[i], &bits, 8);
  }
  return f;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  write_bytes_atomic(path, content);
}

std::vector<GrayField> extract_patches(const GrayField& field, int patch_size,
                                       int stride) {
  if (patch_size <= 0 || stride <= 0) throw input_error("patch size and stride must be positive");
  if (patch_size > field.width || patch_size > field.height)
    throw input_error("patch size exceeds field dimensions");
  std::vector<GrayField> patches;
  const int nx = (field.width - patch_size) / stride + 1;
  const int ny = (field.height - patch_size) / stride + 1;
  patches.reserve(static_cast<std::size_t>(nx) * ny);
  for (int py = 0; py < ny; ++py) {
    for (int px = 0; px < nx; ++px) {
      GrayField p(patch_size, patch_size);
      for (int y = 0; y < patch_size; ++y)
        for (int x = 0; x < patch_size; ++x)
          p.at(x, y) = field.at(px * stride + x, py * stride + y);
      patches.push_back(std::move(p));
    }
  }
  return patches;
}

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  for (auto& cell : cells) {
    const auto a = cell.find_first_not_of(" \t");
    const auto b = cell.find_last_not_of(" \t");
    cell = a == std::string::npos ? "" : cell.substr(a, b - a + 1);
  }
  return cells;
}

int parse_int_cell(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw input_error("manifest: cannot parse " + what + " from '" + s + "'");
  }
}

}  // namespace

DatasetManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open manifest: " + path);
  std::string line;
  if (!std::getline(in, line)) throw input_error("empty manifest: " + path);
  const auto header = split_csv_row(line);
  if (header.size() < 2 || header[0] != "path" || header[1] != "label")
    throw input_error("manifest must start with header 'path,label[,roi_x,roi_y,roi_w,roi_h]'");

  DatasetManifest m;
  std::map<int, int> label_map;  // raw -> dense
  std::map<std::string, bool> seen_paths;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_row(line);
    if (cells.size() != 2 && cells.size() != 6)
      throw input_error("manifest line " + std::to_string(line_no) +
                        ": expected 2 or 6 columns");
    ManifestEntry e;
    e.path = cells[0];
    if (e.path.empty())
      throw input_error("manifest line " + std::to_string(line_no) + ": empty path");
    if (seen_paths.count(e.path))
      throw input_error("manifest: duplicate path '" + e.path + "'");
    seen_paths[e.path] = true;
    const int raw_label = parse_int_cell(cells[1], "label");
    if (raw_label < 0)
      throw input_error("manifest line " + std::to_string(line_no) + ": negative label");
    auto it = label_map.find(raw_label);
    if (it == label_map.end())
      it = label_map.emplace(raw_label, static_cast<int>(label_map.size())).first;
    e.label = it->second;
    if (cells.size() == 6) {
      RoiRect r;
      r.x = parse_int_cell(cells[2], "roi_x");
      r.y = parse_int_cell(cells[3], "roi_y");
      r.w = parse_int_cell(cells[4], "roi_w");
      r.h = parse_int_cell(cells[5], "roi_h");
      if (r.w <= 0 || r.h <= 0)
        throw input_error("manifest line " + std::to_string(line_no) + ": bad ROI extent");
      e.roi = r;
    }
    m.entries.push_back(std::move(e));
  }

  m.class_count = static_cast<int>(label_map.size());
  if (m.class_count < 2) throw input_error("manifest needs at least 2 classes");
  std::vector<int> counts(m.class_count, 0);
  for (const auto& e : m.entries) ++counts[e.label];
  for (int c = 0; c < m.class_count; ++c)
    if (counts[c] < 2)
      throw input_error("manifest: class " + std::to_string(c) + " has fewer than 2 entries");
  return m;
}

}  // namespace texfuse
