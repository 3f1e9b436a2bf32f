#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <zlib.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "texfuse/errors.hpp"
#include "texfuse/io.hpp"

using namespace texfuse;
using testutil::TempDir;

namespace {

void write_raw_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return s;
}

// ---- minimal PNG encoder (independent of the library decoder) ----

std::string be32s(std::uint32_t v) {
  std::string s(4, '\0');
  s[0] = static_cast<char>((v >> 24) & 0xff);
  s[1] = static_cast<char>((v >> 16) & 0xff);
  s[2] = static_cast<char>((v >> 8) & 0xff);
  s[3] = static_cast<char>(v & 0xff);
  return s;
}

std::string png_chunk(const char* type, const std::string& payload) {
  std::string body = std::string(type, 4) + payload;
  const auto crc = static_cast<std::uint32_t>(
      crc32(crc32(0L, Z_NULL, 0), reinterpret_cast<const Bytef*>(body.data()),
            static_cast<uInt>(body.size())));
  return be32s(static_cast<std::uint32_t>(payload.size())) + body + be32s(crc);
}

std::string deflate_bytes(const std::vector<unsigned char>& raw) {
  uLongf cap = compressBound(static_cast<uLong>(raw.size()));
  std::vector<unsigned char> buf(cap);
  REQUIRE(compress2(buf.data(), &cap, raw.data(), static_cast<uLong>(raw.size()), 6) == Z_OK);
  return std::string(reinterpret_cast<char*>(buf.data()), cap);
}

std::string make_png(int w, int h, int color_type, int bit_depth,
                     const std::vector<unsigned char>& filtered) {
  std::string ihdr = be32s(static_cast<std::uint32_t>(w)) +
                     be32s(static_cast<std::uint32_t>(h));
  ihdr.push_back(static_cast<char>(bit_depth));
  ihdr.push_back(static_cast<char>(color_type));
  ihdr.push_back(0);  // compression
  ihdr.push_back(0);  // filter method
  ihdr.push_back(0);  // no interlace
  std::string png("\x89PNG\r\n\x1a\n", 8);
  png += png_chunk("IHDR", ihdr);
  png += png_chunk("IDAT", deflate_bytes(filtered));
  png += png_chunk("IEND", "");
  return png;
}

int paeth_ref(int a, int b, int c) {
  const int p = a + b - c;
  const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

// Applies the forward scanline filter so the decoder has to invert it.
std::vector<unsigned char> filter_rows(const std::vector<std::vector<unsigned char>>& rows,
                                       const std::vector<int>& filters, int bpp) {
  std::vector<unsigned char> out;
  for (std::size_t y = 0; y < rows.size(); ++y) {
    const auto& row = rows[y];
    const int f = filters[y];
    out.push_back(static_cast<unsigned char>(f));
    for (std::size_t x = 0; x < row.size(); ++x) {
      const int raw = row[x];
      const int left = x >= static_cast<std::size_t>(bpp) ? rows[y][x - bpp] : 0;
      const int up = y > 0 ? rows[y - 1][x] : 0;
      const int ul = (y > 0 && x >= static_cast<std::size_t>(bpp)) ? rows[y - 1][x - bpp] : 0;
      int v = raw;
      switch (f) {
        case 0: break;
        case 1: v = raw - left; break;
        case 2: v = raw - up; break;
        case 3: v = raw - (left + up) / 2; break;
        case 4: v = raw - paeth_ref(left, up, ul); break;
      }
      out.push_back(static_cast<unsigned char>(v & 0xff));
    }
  }
  return out;
}

}  // namespace

TEST_CASE("PGM round trip is exact for every byte value") {
  TempDir dir("pgm");
  GrayField f(16, 16);
  for (int i = 0; i < 256; ++i) f.data[i] = i / 255.0;
  const std::string path = dir.file("all.pgm");
  write_image(f, path);
  const GrayField g = read_image(path);
  REQUIRE(g.width == 16);
  REQUIRE(g.height == 16);
  for (int i = 0; i < 256; ++i) CHECK(g.data[i] == f.data[i]);

  // Second write produces identical bytes.
  const std::string path2 = dir.file("all2.pgm");
  write_image(g, path2);
  CHECK(slurp(path) == slurp(path2));
}

TEST_CASE("write_image quantizes round-half-up and clamps") {
  TempDir dir("pgmq");
  GrayField f(8, 8, 0.5);
  f.data[0] = -0.2;
  f.data[1] = 1.7;
  f.data[2] = 1.0;
  f.data[3] = 0.0;
  const std::string path = dir.file("q.pgm");
  write_image(f, path);
  const std::string bytes = slurp(path);
  // Header "P5\n8 8\n255\n" is 11 bytes.
  const auto* pix = reinterpret_cast<const unsigned char*>(bytes.data()) + 11;
  CHECK(pix[0] == 0);
  CHECK(pix[1] == 255);
  CHECK(pix[2] == 255);
  CHECK(pix[3] == 0);
  CHECK(pix[4] == 128);  // 0.5 * 255 = 127.5 rounds up
}

TEST_CASE("PGM parsing handles comments and rejects damage") {
  TempDir dir("pgmh");
  const std::string ok = "P5\n# comment line\n2 2\n255\n\x01\x02\x03\x04";
  write_raw_file(dir.file("ok.pgm"), ok);
  const GrayField f = read_image(dir.file("ok.pgm"));
  CHECK(f.width == 2);
  CHECK(f.at(0, 0) == doctest::Approx(1 / 255.0));
  CHECK(f.at(1, 1) == doctest::Approx(4 / 255.0));

  write_raw_file(dir.file("trunc.pgm"), std::string("P5\n4 4\n255\n\x01\x02"));
  CHECK_THROWS_AS(read_image(dir.file("trunc.pgm")), input_error);

  write_raw_file(dir.file("maxval.pgm"), std::string("P5\n2 2\n65535\n\x01\x02\x03\x04"));
  CHECK_THROWS_AS(read_image(dir.file("maxval.pgm")), input_error);

  CHECK_THROWS_AS(read_image(dir.file("missing.pgm")), input_error);

  write_raw_file(dir.file("junk.bin"), "not an image at all");
  CHECK_THROWS_AS(read_image(dir.file("junk.bin")), input_error);
}

TEST_CASE("spec example: 2x2 P5 with bytes 0,255,128,64") {
  TempDir dir("pgms");
  write_raw_file(dir.file("s.pgm"), std::string("P5\n2 2\n255\n") +
                                        std::string("\x00\xff\x80\x40", 4));
  const GrayField f = read_image(dir.file("s.pgm"));
  CHECK(f.data[0] == 0.0);
  CHECK(f.data[1] == 1.0);
  CHECK(f.data[2] == doctest::Approx(128 / 255.0));
  CHECK(f.data[3] == doctest::Approx(64 / 255.0));
}

TEST_CASE("PNG grayscale decode with every filter type") {
  TempDir dir("png");
  const int w = 8, h = 5;
  std::vector<std::vector<unsigned char>> rows(h, std::vector<unsigned char>(w));
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      rows[y][x] = static_cast<unsigned char>((x * 37 + y * 11 + x * y) % 256);
  const std::vector<int> filters = {0, 1, 2, 3, 4};
  const std::string png = make_png(w, h, 0, 8, filter_rows(rows, filters, 1));
  write_raw_file(dir.file("g.png"), png);
  const GrayField f = read_image(dir.file("g.png"));
  REQUIRE(f.width == w);
  REQUIRE(f.height == h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      CHECK(f.at(x, y) == doctest::Approx(rows[y][x] / 255.0).epsilon(1e-12));
}

TEST_CASE("PNG RGB decode averages channels") {
  TempDir dir("pngc");
  const int w = 4, h = 3;
  std::vector<std::vector<unsigned char>> rows(h, std::vector<unsigned char>(3 * w));
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      rows[y][3 * x + 0] = static_cast<unsigned char>(10 + 40 * x);
      rows[y][3 * x + 1] = static_cast<unsigned char>(20 + 10 * y);
      rows[y][3 * x + 2] = static_cast<unsigned char>(30);
    }
  const std::vector<int> filters = {0, 4, 1};
  const std::string png = make_png(w, h, 2, 8, filter_rows(rows, filters, 3));
  write_raw_file(dir.file("c.png"), png);
  const GrayField f = read_image(dir.file("c.png"));
  REQUIRE(f.width == w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double want =
          (rows[y][3 * x] + rows[y][3 * x + 1] + rows[y][3 * x + 2]) / (3.0 * 255.0);
      CHECK(f.at(x, y) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("PNG rejects corruption and unsupported variants") {
  TempDir dir("pngbad");
  std::vector<std::vector<unsigned char>> rows(4, std::vector<unsigned char>(4, 100));
  const std::vector<int> filters = {0, 0, 0, 0};
  std::string png = make_png(4, 4, 0, 8, filter_rows(rows, filters, 1));

  // Flip one byte inside the IDAT payload: CRC must catch it.
  std::string bad = png;
  bad[8 + 25 + 8 + 2] ^= 0x40;  // past IHDR chunk (25 bytes) and IDAT header
  write_raw_file(dir.file("crc.png"), bad);
  CHECK_THROWS_AS(read_image(dir.file("crc.png")), input_error);

  write_raw_file(dir.file("trunc.png"), png.substr(0, png.size() - 20));
  CHECK_THROWS_AS(read_image(dir.file("trunc.png")), input_error);

  const std::string rgba = make_png(4, 4, 6, 8, filter_rows(rows, filters, 1));
  write_raw_file(dir.file("rgba.png"), rgba);
  CHECK_THROWS_AS(read_image(dir.file("rgba.png")), input_error);

  const std::string deep = make_png(4, 4, 0, 16, filter_rows(rows, filters, 1));
  write_raw_file(dir.file("deep.png"), deep);
  CHECK_THROWS_AS(read_image(dir.file("deep.png")), input_error);
}

TEST_CASE("raw f64 fields round trip bit-exactly") {
  TempDir dir("raw");
  GrayField f = testutil::gaussian_field(7, 5, 99);
  f.data[0] = -1.5e300;
  f.data[1] = 3.25e-300;
  const std::string path = dir.file("f.f64");
  write_field_raw(f, path);
  const GrayField g = read_field_raw(path);
  REQUIRE(g.width == 7);
  REQUIRE(g.height == 5);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(g.data[i] == f.data[i]);

  write_raw_file(dir.file("short.f64"), "0123456789");
  CHECK_THROWS_AS(read_field_raw(dir.file("short.f64")), input_error);

  std::string bytes = slurp(path);
  bytes.pop_back();
  write_raw_file(dir.file("sized.f64"), bytes);
  CHECK_THROWS_AS(read_field_raw(dir.file("sized.f64")), input_error);
}

TEST_CASE("atomic writes leave no temp files behind") {
  TempDir dir("atomic");
  write_text_atomic(dir.file("a.txt"), "hello\n");
  CHECK(slurp(dir.file("a.txt")) == "hello\n");
  int entries = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir.path())) {
    (void)e;
    ++entries;
  }
  CHECK(entries == 1);
}

TEST_CASE("extract_patches geometry and content") {
  GrayField f(65, 33);
  for (int y = 0; y < 33; ++y)
    for (int x = 0; x < 65; ++x) f.at(x, y) = x + 1000.0 * y;

  const auto tiles = extract_patches(f, 16, 16);
  CHECK(tiles.size() == 4 * 2);

  const auto dense = extract_patches(f, 16, 8);
  CHECK(dense.size() == 7 * 3);
  // Patch (px=1, py=1) starts at (8, 8).
  const GrayField& p = dense[1 * 7 + 1];
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) CHECK(p.at(x, y) == f.at(8 + x, 8 + y));

  CHECK_THROWS_AS(extract_patches(f, 66, 1), input_error);
  CHECK_THROWS_AS(extract_patches(f, 0, 1), input_error);
  CHECK_THROWS_AS(extract_patches(f, 16, 0), input_error);

  // Spec counts: 64x64 tiled by 32 -> 4; 33x33 -> 1; 96x64 stride 16 -> 15.
  GrayField a(64, 64, 0.0), b(33, 33, 0.0), c(96, 64, 0.0);
  CHECK(extract_patches(a, 32, 32).size() == 4);
  CHECK(extract_patches(b, 32, 32).size() == 1);
  CHECK(extract_patches(c, 32, 16).size() == 15);
}

TEST_CASE("manifest parsing, label remapping, and validation") {
  TempDir dir("man");
  const std::string ok =
      "path,label\n"
      "a.pgm,7\n"
      "b.pgm,3\n"
      "c.pgm,7\n"
      "d.pgm,3\n";
  write_raw_file(dir.file("ok.csv"), ok);
  const DatasetManifest m = load_manifest(dir.file("ok.csv"));
  REQUIRE(m.entries.size() == 4);
  CHECK(m.class_count == 2);
  // Dense labels preserve first-occurrence order: 7 -> 0, 3 -> 1.
  CHECK(m.entries[0].label == 0);
  CHECK(m.entries[1].label == 1);
  CHECK(m.entries[2].label == 0);
  CHECK(m.entries[3].label == 1);
  CHECK_FALSE(m.entries[0].roi.has_value());

  const std::string roi =
      "path,label,roi_x,roi_y,roi_w,roi_h\n"
      "a.pgm,0,4,6,10,12\n"
      "b.pgm,0,0,0,5,5\n"
      "c.pgm,1,1,1,2,2\n"
      "d.pgm,1,2,2,3,3\n";
  write_raw_file(dir.file("roi.csv"), roi);
  const DatasetManifest mr = load_manifest(dir.file("roi.csv"));
  REQUIRE(mr.entries[0].roi.has_value());
  CHECK(mr.entries[0].roi->x == 4);
  CHECK(mr.entries[0].roi->y == 6);
  CHECK(mr.entries[0].roi->w == 10);
  CHECK(mr.entries[0].roi->h == 12);

  write_raw_file(dir.file("dup.csv"), "path,label\na.pgm,0\na.pgm,1\nb.pgm,1\nc.pgm,0\n");
  CHECK_THROWS_AS(load_manifest(dir.file("dup.csv")), input_error);

  write_raw_file(dir.file("single.csv"), "path,label\na.pgm,0\nb.pgm,0\n");
  CHECK_THROWS_AS(load_manifest(dir.file("single.csv")), input_error);

  write_raw_file(dir.file("few.csv"), "path,label\na.pgm,0\nb.pgm,0\nc.pgm,1\n");
  CHECK_THROWS_AS(load_manifest(dir.file("few.csv")), input_error);

  write_raw_file(dir.file("head.csv"), "file,class\na.pgm,0\n");
  CHECK_THROWS_AS(load_manifest(dir.file("head.csv")), input_error);

  write_raw_file(dir.file("cols.csv"), "path,label\na.pgm,0,9\nb.pgm,1\n");
  CHECK_THROWS_AS(load_manifest(dir.file("cols.csv")), input_error);

  write_raw_file(dir.file("badroi.csv"),
                 "path,label,roi_x,roi_y,roi_w,roi_h\na.pgm,0,1,1,0,5\n"
                 "b.pgm,0,1,1,2,2\nc.pgm,1,1,1,2,2\nd.pgm,1,1,1,2,2\n");
  CHECK_THROWS_AS(load_manifest(dir.file("badroi.csv")), input_error);
}
