#include "holomed/gesture/fixture.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "holomed/error.hpp"

namespace holomed::gesture {

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::string next() {
    std::string line;
    if (!std::getline(in_, line)) fail("unexpected end of file");
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw Error(ErrorCode::Parse, message, "line " + std::to_string(line_no_ + (in_.eof() ? 1 : 0)));
  }
  [[noreturn]] void fail_here(const std::string& message) const {
    throw Error(ErrorCode::Parse, message, "line " + std::to_string(line_no_));
  }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

template <typename T>
std::vector<T> parse_numbers(const std::string& line, const LineReader& reader) {
  std::vector<T> values;
  const char* p = line.data();
  const char* end = line.data() + line.size();
  while (p < end) {
    while (p < end && (*p == ' ' || *p == '\t')) ++p;
    if (p == end) break;
    T v{};
    auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc{} || (next < end && *next != ' ' && *next != '\t')) {
      reader.fail_here("malformed number near column " + std::to_string(p - line.data() + 1));
    }
    values.push_back(v);
    p = next;
  }
  return values;
}

}  // namespace

std::vector<DepthFrame> read_depth_sequence(std::istream& in) {
  LineReader reader(in);
  std::istringstream header(reader.next());
  std::string magic;
  long long width = 0;
  long long height = 0;
  long long count = 0;
  header >> magic >> width >> height >> count;
  if (!header || magic != "DSEQ1") reader.fail_here("expected header 'DSEQ1 <width> <height> <frame_count>'");
  std::string trailing;
  if (header >> trailing) reader.fail_here("unexpected token '" + trailing + "' in header");
  if (width < 8 || height < 8 || width > 4096 || height > 4096) reader.fail_here("frame size out of range");
  if (count < 0) reader.fail_here("negative frame count");

  std::vector<DepthFrame> frames;
  frames.reserve(static_cast<std::size_t>(count));
  for (long long f = 0; f < count; ++f) {
    const auto tline = reader.next();
    std::istringstream ts(tline);
    std::string tag;
    long long stamp = 0;
    ts >> tag >> stamp;
    if (!ts || tag != "T" || (ts >> trailing)) reader.fail_here("expected 'T <timestamp_ms>'");
    if (!frames.empty() && stamp <= frames.back().timestamp_ms) {
      reader.fail_here("timestamps must strictly increase");
    }
    DepthFrame frame(static_cast<int>(width), static_cast<int>(height), stamp);
    for (int y = 0; y < frame.height; ++y) {
      const auto row = parse_numbers<unsigned>(reader.next(), reader);
      if (row.size() != static_cast<std::size_t>(width)) {
        reader.fail_here("expected " + std::to_string(width) + " values, got " + std::to_string(row.size()));
      }
      for (int x = 0; x < frame.width; ++x) {
        if (row[x] > std::numeric_limits<std::uint16_t>::max()) reader.fail_here("depth value out of range");
        frame.at(x, y) = static_cast<std::uint16_t>(row[x]);
      }
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

std::vector<DepthFrame> read_depth_sequence(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open fixture", path.string());
  return read_depth_sequence(in);
}

void write_depth_sequence(std::ostream& out, const std::vector<DepthFrame>& frames) {
  const int w = frames.empty() ? 8 : frames.front().width;
  const int h = frames.empty() ? 8 : frames.front().height;
  out << "DSEQ1 " << w << ' ' << h << ' ' << frames.size() << '\n';
  for (const auto& frame : frames) {
    if (frame.width != w || frame.height != h) throw Error(ErrorCode::InvalidInput, "mixed frame sizes");
    out << "T " << frame.timestamp_ms << '\n';
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (x) out << ' ';
        out << frame.at(x, y);
      }
      out << '\n';
    }
  }
}

void write_depth_sequence(const std::filesystem::path& path, const std::vector<DepthFrame>& frames) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write fixture", path.string());
  write_depth_sequence(out, frames);
}

}  // namespace holomed::gesture
