#include "maub/matrix.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "maub/error.hpp"
#include "maub/text.hpp"

namespace maub {

namespace {

constexpr std::array<char, 4> kMagic{'M', 'A', 'U', 'B'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderSize = 24;

template <typename U>
void put_le(std::string& buf, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

template <typename U>
U get_le(const unsigned char* p) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(p[i]) << (8 * i);
  return v;
}

}  // namespace

RepresentationMatrix::RepresentationMatrix(std::size_t rows, std::size_t cols, double frame_rate)
    : RepresentationMatrix(rows, cols, frame_rate, std::vector<float>(rows * cols, 0.0f)) {}

RepresentationMatrix::RepresentationMatrix(std::size_t rows, std::size_t cols, double frame_rate,
                                           std::vector<float> data)
    : rows_(rows), cols_(cols), frame_rate_(frame_rate), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) throw Error(Errc::kDimensionMismatch, "matrix data size != rows * cols");
  if (!(frame_rate_ > 0.0) || !std::isfinite(frame_rate_)) {
    throw Error(Errc::kInvalidArgument, "frame rate must be positive");
  }
}

void write_matrix(std::ostream& out, const RepresentationMatrix& m) {
  std::string buf;
  buf.reserve(kHeaderSize + 4 * m.data().size());
  buf.append(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(buf, kVersion);
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(m.rows()));
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(m.cols()));
  put_le<std::uint64_t>(buf, std::bit_cast<std::uint64_t>(m.frame_rate()));
  for (float v : m.data()) put_le<std::uint32_t>(buf, std::bit_cast<std::uint32_t>(v));
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(Errc::kIoError, "matrix write failed");
}

void write_matrix(const RepresentationMatrix& m, const std::filesystem::path& path) {
  auto out = text::open_output(path);
  write_matrix(out, m);
}

RepresentationMatrix read_matrix(std::istream& in) {
  std::array<unsigned char, kHeaderSize> header{};
  in.read(reinterpret_cast<char*>(header.data()), 4);
  if (in.gcount() != 4 || !std::equal(kMagic.begin(), kMagic.end(), header.begin(),
                                      [](char a, unsigned char b) { return static_cast<unsigned char>(a) == b; })) {
    throw Error(Errc::kNotAMatrixFile, "bad magic");
  }
  in.read(reinterpret_cast<char*>(header.data() + 4), kHeaderSize - 4);
  if (in.gcount() != static_cast<std::streamsize>(kHeaderSize - 4)) throw Error(Errc::kTruncatedFile, "short header");

  const auto version = get_le<std::uint32_t>(header.data() + 4);
  if (version != kVersion) throw Error(Errc::kNotAMatrixFile, "unsupported version " + std::to_string(version));
  const auto rows = get_le<std::uint32_t>(header.data() + 8);
  const auto cols = get_le<std::uint32_t>(header.data() + 12);
  const auto frame_rate = std::bit_cast<double>(get_le<std::uint64_t>(header.data() + 16));
  if (!(frame_rate > 0.0) || !std::isfinite(frame_rate)) throw Error(Errc::kNotAMatrixFile, "bad frame rate");

  const std::size_t count = static_cast<std::size_t>(rows) * cols;
  std::vector<unsigned char> payload(count * 4);
  in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  if (static_cast<std::size_t>(in.gcount()) != payload.size()) {
    throw Error(Errc::kTruncatedFile, "expected " + std::to_string(rows) + "x" + std::to_string(cols) +
                                          " payload, got " + std::to_string(in.gcount()) + " bytes");
  }
  if (in.peek() != std::char_traits<char>::eof()) throw Error(Errc::kNotAMatrixFile, "trailing bytes after payload");

  std::vector<float> data(count);
  for (std::size_t i = 0; i < count; ++i) data[i] = std::bit_cast<float>(get_le<std::uint32_t>(&payload[4 * i]));
  return RepresentationMatrix(rows, cols, frame_rate, std::move(data));
}

RepresentationMatrix read_matrix(const std::filesystem::path& path) {
  auto in = text::open_input(path);
  try {
    return read_matrix(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

RepresentationMatrix read_text_matrix(std::istream& in, double frame_rate) {
  std::vector<float> data;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::size_t n = 0;
    std::string tok;
    while (fields >> tok) {
      double v = 0.0;
      if (!text::parse_double(tok, v)) throw Error(Errc::kMalformedRow, "bad number '" + tok + "'");
      data.push_back(static_cast<float>(v));
      ++n;
    }
    if (n == 0) continue;
    if (rows > 0 && n != cols) throw Error(Errc::kMalformedRow, "row " + std::to_string(rows + 1) + " width differs");
    cols = n;
    ++rows;
  }
  return RepresentationMatrix(rows, cols, frame_rate, std::move(data));
}

void write_text_matrix(std::ostream& out, const RepresentationMatrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      out << text::format_double(m(r, c));
    }
    out << '\n';
  }
}

}  // namespace maub
