#ifndef TSVD_IO_HPP
#define TSVD_IO_HPP

#include <tsvd/compression.hpp>
#include <tsvd/tensor.hpp>
#include <tsvd/transform.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace tsvd {

// TensorFile layout (all integers and reals little-endian):
//   "TSR1" | u8 order N | N x u64 extents | prod(extents) x f64, first index fastest.
inline constexpr std::array<char, 4> kTensorMagic{'T', 'S', 'R', '1'};
// Compressed form layout:
//   "TSC1" | u8 method | u8 order | order x u64 extents | u64 k | u64 n_coefficients
//   | n_coefficients x f64 | u64 n_records
//   | per record: u64 slice, u64 index, f64 sigma, n1 x (f64 re, f64 im), n2 x (f64 re, f64 im)
inline constexpr std::array<char, 4> kCompressedMagic{'T', 'S', 'C', '1'};

namespace detail {

inline void put_u64(std::ostream& os, std::uint64_t v) {
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) {
    b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xFFu);
  }
  os.write(b.data(), 8);
}

inline void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

inline std::uint64_t get_u64(std::istream& is) {
  std::array<unsigned char, 8> b{};
  if (!is.read(reinterpret_cast<char*>(b.data()), 8)) {
    throw FormatError("unexpected end of file");
  }
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) {
    v = (v << 8) | b[static_cast<std::size_t>(i)];
  }
  return v;
}

inline double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

inline std::uint8_t get_u8(std::istream& is) {
  char c = 0;
  if (!is.get(c)) {
    throw FormatError("unexpected end of file");
  }
  return static_cast<std::uint8_t>(c);
}

inline void expect_magic(std::istream& is, const std::array<char, 4>& magic) {
  std::array<char, 4> got{};
  if (!is.read(got.data(), 4) || got != magic) {
    throw FormatError("bad magic, expected " + std::string(magic.begin(), magic.end()));
  }
}

inline Shape read_dims(std::istream& is, std::size_t order) {
  if (order < 3) {
    throw FormatError("tensor order " + std::to_string(order) + " < 3");
  }
  Shape dims(order);
  std::uint64_t total = 1;
  for (auto& d : dims) {
    const std::uint64_t v = get_u64(is);
    if (v == 0 || v > (std::uint64_t{1} << 40) || total > (std::uint64_t{1} << 40) / v) {
      throw FormatError("implausible extent " + std::to_string(v));
    }
    total *= v;
    d = static_cast<std::size_t>(v);
  }
  return dims;
}

inline void expect_eof(std::istream& is) {
  if (is.peek() != std::char_traits<char>::eof()) {
    throw FormatError("trailing bytes after payload");
  }
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) {
    throw FormatError("cannot open " + path.string() + " for writing");
  }
  return os;
}

inline std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw FormatError("cannot open " + path.string());
  }
  return is;
}

} // namespace detail

inline void write_tensor(std::ostream& os, const Tensor& t) {
  os.write(kTensorMagic.data(), 4);
  os.put(static_cast<char>(t.order()));
  for (auto d : t.dims()) {
    detail::put_u64(os, d);
  }
  for (double v : t.data()) {
    detail::put_f64(os, v);
  }
}

/// Reads a TensorFile; rejects non-finite payload values.
inline Tensor read_tensor(std::istream& is) {
  detail::expect_magic(is, kTensorMagic);
  const Shape dims = detail::read_dims(is, detail::get_u8(is));
  std::vector<double> data(element_count(dims));
  for (auto& v : data) {
    v = detail::get_f64(is);
    if (!std::isfinite(v)) {
      throw FormatError("non-finite value in tensor payload");
    }
  }
  detail::expect_eof(is);
  return Tensor(dims, std::move(data));
}

inline void save_tensor(const std::filesystem::path& path, const Tensor& t) {
  auto os = detail::open_out(path);
  write_tensor(os, t);
  if (!os) {
    throw FormatError("write to " + path.string() + " failed");
  }
}

inline Tensor load_tensor(const std::filesystem::path& path) {
  auto is = detail::open_in(path);
  return read_tensor(is);
}

inline Mask load_mask(const std::filesystem::path& path) { return Mask::from_tensor(load_tensor(path)); }

/// Dense mask from a text list of 1-based coordinates, one per line ("i j k" for order 3).
inline Mask read_mask_coordinates(std::istream& is, const Shape& dims) {
  Mask mask(dims);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') {
      continue;
    }
    std::istringstream ls(line);
    std::size_t linear = 0;
    std::size_t stride = 1;
    for (std::size_t mode = 0; mode < dims.size(); ++mode) {
      long long idx = 0;
      if (!(ls >> idx) || idx < 1 || static_cast<std::size_t>(idx) > dims[mode]) {
        throw FormatError("bad coordinate on line " + std::to_string(line_no));
      }
      linear += (static_cast<std::size_t>(idx) - 1) * stride;
      stride *= dims[mode];
    }
    std::string extra;
    if (ls >> extra) {
      throw FormatError("too many indices on line " + std::to_string(line_no));
    }
    mask.set(linear, true);
  }
  return mask;
}

inline void write_compressed(std::ostream& os, const CompressedForm& form) {
  os.write(kCompressedMagic.data(), 4);
  os.put(static_cast<char>(form.method));
  os.put(static_cast<char>(form.dims.size()));
  for (auto d : form.dims) {
    detail::put_u64(os, d);
  }
  detail::put_u64(os, form.k);
  detail::put_u64(os, form.coefficients.size());
  for (double v : form.coefficients) {
    detail::put_f64(os, v);
  }
  detail::put_u64(os, form.records.size());
  for (const auto& r : form.records) {
    detail::put_u64(os, r.slice);
    detail::put_u64(os, r.index);
    detail::put_f64(os, r.sigma);
    for (const auto* col : {&r.u, &r.v}) {
      for (const auto& z : *col) {
        detail::put_f64(os, z.real());
        detail::put_f64(os, z.imag());
      }
    }
  }
}

inline CompressedForm read_compressed(std::istream& is) {
  detail::expect_magic(is, kCompressedMagic);
  CompressedForm form;
  const auto method = detail::get_u8(is);
  if (method > 2) {
    throw FormatError("unknown compression method tag " + std::to_string(method));
  }
  form.method = static_cast<Method>(method);
  form.dims = detail::read_dims(is, detail::get_u8(is));
  if (form.dims.size() != 3) {
    throw FormatError("compressed tensors must be order 3");
  }
  form.k = static_cast<std::size_t>(detail::get_u64(is));
  if (form.k < 1 || form.k > max_k(form.method, form.dims)) {
    throw FormatError("k out of range in compressed form");
  }
  const auto n_coeff = detail::get_u64(is);
  if (n_coeff > static_cast<std::uint64_t>(stored_scalars(form.method, form.dims, form.k))) {
    throw FormatError("coefficient count exceeds what k allows");
  }
  form.coefficients.resize(static_cast<std::size_t>(n_coeff));
  for (auto& v : form.coefficients) {
    v = detail::get_f64(is);
  }
  const auto n_records = detail::get_u64(is);
  if (n_records > form.k) {
    throw FormatError("more spectral records than k");
  }
  const std::size_t n0 = std::min(form.dims[0], form.dims[1]);
  form.records.resize(static_cast<std::size_t>(n_records));
  for (auto& r : form.records) {
    r.slice = static_cast<std::size_t>(detail::get_u64(is));
    r.index = static_cast<std::size_t>(detail::get_u64(is));
    if (r.slice >= form.dims[2] || r.index >= n0) {
      throw FormatError("spectral record index out of range");
    }
    r.sigma = detail::get_f64(is);
    r.u.resize(form.dims[0]);
    r.v.resize(form.dims[1]);
    for (auto* col : {&r.u, &r.v}) {
      for (auto& z : *col) {
        const double re = detail::get_f64(is);
        z = Complex(re, detail::get_f64(is));
      }
    }
  }
  detail::expect_eof(is);
  return form;
}

namespace detail {

// Next whitespace-delimited token of a plain PGM, skipping '#' comments.
inline std::string pgm_token(std::istream& is) {
  std::string tok;
  char c = 0;
  while (is.get(c)) {
    if (c == '#') {
      std::string rest;
      std::getline(is, rest);
      if (!tok.empty()) {
        return tok;
      }
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!tok.empty()) {
        return tok;
      }
      continue;
    }
    tok.push_back(c);
  }
  return tok;
}

inline unsigned long pgm_number(std::istream& is, const char* what) {
  const std::string tok = pgm_token(is);
  if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw FormatError(std::string("malformed PGM ") + what + ": '" + tok + "'");
  }
  return std::stoul(tok);
}

} // namespace detail

/// A plain (P2) grayscale image, pixels scaled to [0, 1] by maxval. Row-major as read.
struct PgmImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> pixels;
};

inline PgmImage read_pgm(std::istream& is) {
  if (detail::pgm_token(is) != "P2") {
    throw FormatError("not a plain PGM (P2) file");
  }
  PgmImage img;
  img.width = detail::pgm_number(is, "width");
  img.height = detail::pgm_number(is, "height");
  const unsigned long maxval = detail::pgm_number(is, "maxval");
  if (img.width == 0 || img.height == 0 || maxval == 0 || maxval > 65535) {
    throw FormatError("PGM header out of range");
  }
  img.pixels.resize(img.width * img.height);
  for (auto& p : img.pixels) {
    const unsigned long v = detail::pgm_number(is, "pixel");
    if (v > maxval) {
      throw FormatError("PGM pixel exceeds maxval");
    }
    p = static_cast<double>(v) / static_cast<double>(maxval);
  }
  if (!detail::pgm_token(is).empty()) {
    throw FormatError("trailing data after PGM pixels");
  }
  return img;
}

/// Stacks every *.pgm file of a directory, in lexicographic order, into height x width x frames.
inline Tensor import_pgm_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw FormatError(dir.string() + " is not a directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) {
    throw FormatError("no .pgm frames in " + dir.string());
  }
  std::sort(files.begin(), files.end());

  Tensor out;
  for (std::size_t f = 0; f < files.size(); ++f) {
    auto is = detail::open_in(files[f]);
    PgmImage img;
    try {
      img = read_pgm(is);
    } catch (const FormatError& e) {
      throw FormatError(files[f].filename().string() + ": " + e.what());
    }
    if (f == 0) {
      out = Tensor({img.height, img.width, files.size()});
    } else if (img.height != out.rows() || img.width != out.cols()) {
      throw FormatError("mixed frame dimensions: " + files[f].filename().string() + " is " +
                        std::to_string(img.width) + "x" + std::to_string(img.height));
    }
    for (std::size_t r = 0; r < img.height; ++r) {
      for (std::size_t c = 0; c < img.width; ++c) {
        out(r, c, f) = img.pixels[r * img.width + c];
      }
    }
  }
  return out;
}

} // namespace tsvd

#endif // TSVD_IO_HPP
