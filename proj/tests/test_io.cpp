#include "support/oracles.hpp"

#include <tsvd/io.hpp>
#include <tsvd/synthetic.hpp>
#include <tsvd/tsvd.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace tsvd;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("tsvd_io_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

private:
  fs::path path_;
};

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream os(p);
  os << text;
}

} // namespace

TEST(TensorFile, HeaderLayout) {
  Tensor t({1, 1, 3}, {1.0, -2.0, 0.5});
  std::ostringstream os;
  write_tensor(os, t);
  const std::string bytes = os.str();
  ASSERT_EQ(bytes.size(), 4u + 1u + 3u * 8u + 3u * 8u);
  EXPECT_EQ(bytes.substr(0, 4), "TSR1");
  EXPECT_EQ(bytes[4], 3);
  EXPECT_EQ(bytes[5 + 16], 3); // third extent, little-endian low byte
  // 1.0 == 0x3FF0000000000000, stored little-endian.
  EXPECT_EQ(static_cast<unsigned char>(bytes[29 + 7]), 0x3F);
  EXPECT_EQ(static_cast<unsigned char>(bytes[29 + 6]), 0xF0);
}

TEST(TensorFile, RoundTripIsByteIdentical) {
  oracle::Gen gen(401);
  for (int trial = 0; trial < 5; ++trial) {
    const Tensor t = gen.tensor({gen.extent(1, 5), gen.extent(1, 5), gen.extent(1, 5), gen.extent(1, 3)});
    std::stringstream first;
    write_tensor(first, t);
    const Tensor back = read_tensor(first);
    EXPECT_EQ(back, t);
    std::stringstream second;
    write_tensor(second, back);
    EXPECT_EQ(first.str(), second.str());
  }
}

TEST(TensorFile, Malformed) {
  std::stringstream bad_magic("XSR1");
  EXPECT_THROW(read_tensor(bad_magic), FormatError);

  std::stringstream good;
  write_tensor(good, Tensor({2, 2, 2}));
  const std::string bytes = good.str();
  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(read_tensor(truncated), FormatError);
  std::stringstream trailing(bytes + "x");
  EXPECT_THROW(read_tensor(trailing), FormatError);

  std::stringstream nan_file;
  write_tensor(nan_file, Tensor({1, 1, 1}, {std::nan("")}));
  EXPECT_THROW(read_tensor(nan_file), FormatError);

  std::string low_order = bytes;
  low_order[4] = 2;
  std::stringstream order2(low_order);
  EXPECT_THROW(read_tensor(order2), FormatError);
}

TEST(MaskCoordinates, OneBasedTriples) {
  std::istringstream is("# observed\n1 1 1\n2 3 2\n\n");
  const Mask m = read_mask_coordinates(is, {2, 3, 2});
  EXPECT_EQ(m.observed(), 2u);
  EXPECT_TRUE(m[0]);
  EXPECT_TRUE(m[1 + 2 * (2 + 3 * 1)]);

  std::istringstream out_of_range("3 1 1\n");
  EXPECT_THROW(read_mask_coordinates(out_of_range, {2, 3, 2}), FormatError);
  std::istringstream too_many("1 1 1 1\n");
  EXPECT_THROW(read_mask_coordinates(too_many, {2, 3, 2}), FormatError);
}

TEST(Pgm, ParsesCommentsAndWhitespace) {
  std::istringstream is("P2\n# a comment\n3 2\n# another\n255\n0 255 51\n  102\t204 255\n");
  const PgmImage img = read_pgm(is);
  EXPECT_EQ(img.width, 3u);
  EXPECT_EQ(img.height, 2u);
  EXPECT_DOUBLE_EQ(img.pixels[1], 1.0);
  EXPECT_DOUBLE_EQ(img.pixels[2], 0.2);
  EXPECT_DOUBLE_EQ(img.pixels[3], 0.4);
}

TEST(Pgm, RejectsMalformed) {
  std::istringstream p5("P5\n1 1\n255\n0\n");
  EXPECT_THROW(read_pgm(p5), FormatError);
  std::istringstream short_data("P2\n2 2\n255\n1 2 3\n");
  EXPECT_THROW(read_pgm(short_data), FormatError);
  std::istringstream big_max("P2\n1 1\n70000\n1\n");
  EXPECT_THROW(read_pgm(big_max), FormatError);
  std::istringstream over("P2\n1 1\n10\n11\n");
  EXPECT_THROW(read_pgm(over), FormatError);
}

TEST(ImportPgm, StacksFramesInLexicographicOrder) {
  TempDir dir;
  for (int f = 0; f < 3; ++f) {
    write_text(dir.path() / ("frame" + std::to_string(f) + ".pgm"), "P2\n2 2\n255\n255 255\n255 255\n");
  }
  const Tensor t = import_pgm_directory(dir.path());
  ASSERT_EQ(t.dims(), (Shape{2, 2, 3}));
  for (double v : t.data()) {
    EXPECT_EQ(v, 1.0);
  }

  write_text(dir.path() / "frame0.pgm", "P2\n2 1\n4\n1 2\n");
  write_text(dir.path() / "frame1.pgm", "P2\n2 1\n4\n3 4\n");
  fs::remove(dir.path() / "frame2.pgm");
  const Tensor ordered = import_pgm_directory(dir.path());
  ASSERT_EQ(ordered.dims(), (Shape{1, 2, 2}));
  EXPECT_EQ(ordered.values(), (std::vector<double>{0.25, 0.5, 0.75, 1.0}));
}

TEST(ImportPgm, SingleFrameDegeneratesToMatrixSvd) {
  TempDir dir;
  write_text(dir.path() / "only.pgm", "P2\n3 2\n9\n1 2 3\n4 5 6\n");
  const Tensor t = import_pgm_directory(dir.path());
  ASSERT_EQ(t.dims(), (Shape{2, 3, 1}));
  Eigen::JacobiSVD<Matrix<double>> svd(Matrix<double>(t.slice(0)));
  const TSvdFactors f = t_svd(t);
  EXPECT_NEAR(f.S(0, 0, 0), svd.singularValues()(0), 1e-12);
  EXPECT_NEAR(f.S(1, 1, 0), svd.singularValues()(1), 1e-12);
}

TEST(ImportPgm, Errors) {
  TempDir dir;
  EXPECT_THROW(import_pgm_directory(dir.path()), FormatError);
  write_text(dir.path() / "a.pgm", "P2\n2 2\n255\n1 2 3 4\n");
  write_text(dir.path() / "b.pgm", "P2\n3 2\n255\n1 2 3 4 5 6\n");
  EXPECT_THROW(import_pgm_directory(dir.path()), FormatError);
  EXPECT_THROW(import_pgm_directory(dir.path() / "missing"), FormatError);
}

TEST(Files, SaveAndLoad) {
  TempDir dir;
  const Tensor t = low_tubal_rank({5, 4, 3}, 2, 1);
  save_tensor(dir.path() / "t.tsr", t);
  EXPECT_EQ(load_tensor(dir.path() / "t.tsr"), t);
  save_tensor(dir.path() / "m.tsr", Mask::bernoulli(t.dims(), 0.5, 2).to_tensor());
  EXPECT_EQ(load_mask(dir.path() / "m.tsr"), Mask::bernoulli(t.dims(), 0.5, 2));
  EXPECT_THROW(load_tensor(dir.path() / "missing.tsr"), FormatError);
  EXPECT_THROW(save_tensor(dir.path() / "no" / "such" / "dir.tsr", t), FormatError);
}
