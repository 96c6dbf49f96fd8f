#pragma once

// Frame-level representation matrices and their on-disk format:
//
//   offset  size  field
//   0       4     magic "MAUB"
//   4       4     u32 version (= 1)
//   8       4     u32 rows
//   12      4     u32 cols
//   16      8     f64 frame_rate
//   24      4*rows*cols  f32 payload, row-major
//
// All integers and floats little-endian.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace maub {

// Read-only view of consecutive frames of a matrix.
struct FrameSlice {
  const float* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::span<const float> row(std::size_t i) const { return {data + i * cols, cols}; }
  bool empty() const { return rows == 0; }
};

class RepresentationMatrix {
 public:
  RepresentationMatrix() = default;
  RepresentationMatrix(std::size_t rows, std::size_t cols, double frame_rate);
  RepresentationMatrix(std::size_t rows, std::size_t cols, double frame_rate, std::vector<float> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double frame_rate() const { return frame_rate_; }

  std::span<float> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const float> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  float& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  float operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  const std::vector<float>& data() const { return data_; }

  // Frames [begin, end); caller guarantees end <= rows().
  FrameSlice slice(std::size_t begin, std::size_t end) const {
    return {data_.data() + begin * cols_, end - begin, cols_};
  }

  bool operator==(const RepresentationMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  double frame_rate_ = 1.0;
  std::vector<float> data_;
};

void write_matrix(std::ostream& out, const RepresentationMatrix& m);
void write_matrix(const RepresentationMatrix& m, const std::filesystem::path& path);

// Throws kNotAMatrixFile (magic, version, trailing bytes, bad frame rate) or
// kTruncatedFile.
RepresentationMatrix read_matrix(std::istream& in);
RepresentationMatrix read_matrix(const std::filesystem::path& path);

// Whitespace-separated text, one frame per line.
RepresentationMatrix read_text_matrix(std::istream& in, double frame_rate);
void write_text_matrix(std::ostream& out, const RepresentationMatrix& m);

}  // namespace maub
