#include <doctest.h>

#include "maub/error.hpp"
#include "maub/parallel.hpp"
#include "maub/text.hpp"

using namespace maub;

TEST_CASE("text helpers") {
  CHECK(text::split("a\tb\t", '\t') == std::vector<std::string_view>{"a", "b", ""});
  CHECK(text::chomp("\xEF\xBB\xBFsegment\r") == "segment");
  double d = 0;
  CHECK(text::parse_double("0.25", d));
  CHECK(d == 0.25);
  CHECK_FALSE(text::parse_double("0.25x", d));
  CHECK_FALSE(text::parse_double("", d));
  long long i = 0;
  CHECK(text::parse_int("-12", i));
  CHECK(i == -12);
  CHECK(text::format_double(0.1) == "0.1");
  CHECK(text::format_double(2.0) == "2");
  CHECK(text::format_fixed(1.0 / 3.0, 3) == "0.333");
}

TEST_CASE("errors carry a code") {
  const Error e(Errc::kTruncatedFile, "short");
  CHECK(e.code() == Errc::kTruncatedFile);
  CHECK(std::string(e.what()) == "TruncatedFile: short");
  CHECK(to_string(Errc::kUnknownSegment) == "UnknownSegment");
}

TEST_CASE("missing files raise IoError") {
  try {
    text::open_input("/nonexistent/file.tsv");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kIoError);
  }
}

TEST_CASE("parallel_for") {
  std::vector<int> out(100, 0);
  parallel_for(out.size(), 4, [&](std::size_t i) { out[i] = static_cast<int>(i * i); });
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i * i));
  try {
    parallel_for(50, 4, [](std::size_t i) {
      if (i == 7 || i == 30) throw Error(Errc::kInvalidArgument, std::to_string(i));
    });
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("7") != std::string::npos);
  }
}
