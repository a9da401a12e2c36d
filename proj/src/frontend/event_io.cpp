#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gpeio/common/error.hpp"
#include "gpeio/frontend/event.hpp"

namespace gpeio {

std::vector<Event> read_events_text(std::istream& in) {
  std::vector<Event> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    Event e;
    int p = 0;
    if (!(ss >> e.t >> e.x >> e.y >> p) || (p != 0 && p != 1) || !std::isfinite(e.t))
      throw Error(ErrorCode::kDataError, "malformed event on line " + std::to_string(lineno));
    e.polarity = p == 1 ? 1 : -1;
    out.push_back(e);
  }
  return out;
}

void write_events_text(std::ostream& out, const std::vector<Event>& events) {
  char buf[96];
  for (const Event& e : events) {
    std::snprintf(buf, sizeof(buf), "%.9f %d %d %d\n", e.t, e.x, e.y, e.polarity > 0 ? 1 : 0);
    out << buf;
  }
}

namespace {

template <typename T>
void put_le(std::ostream& out, T v) {
  unsigned char b[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<unsigned char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <typename T>
T get_le(const unsigned char* b) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return static_cast<T>(v);
}

}  // namespace

std::vector<Event> read_events_binary(std::istream& in) {
  std::vector<Event> out;
  unsigned char rec[13];
  while (in.read(reinterpret_cast<char*>(rec), sizeof(rec))) {
    Event e;
    e.t = static_cast<double>(get_le<std::uint64_t>(rec)) * 1e-9;
    e.x = get_le<std::uint16_t>(rec + 8);
    e.y = get_le<std::uint16_t>(rec + 10);
    if (rec[12] > 1) throw Error(ErrorCode::kDataError, "bad polarity byte in event record " + std::to_string(out.size()));
    e.polarity = rec[12] == 1 ? 1 : -1;
    out.push_back(e);
  }
  if (in.gcount() != 0) throw Error(ErrorCode::kDataError, "truncated binary event record");
  return out;
}

void write_events_binary(std::ostream& out, const std::vector<Event>& events) {
  for (const Event& e : events) {
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(std::llround(e.t * 1e9)));
    put_le<std::uint16_t>(out, static_cast<std::uint16_t>(e.x));
    put_le<std::uint16_t>(out, static_cast<std::uint16_t>(e.y));
    put_le<std::uint8_t>(out, e.polarity > 0 ? 1 : 0);
  }
}

namespace {
bool is_binary(const std::string& path) { return path.size() >= 4 && path.compare(path.size() - 4, 4, ".bin") == 0; }
}  // namespace

std::vector<Event> read_events_file(const std::string& path) {
  std::ifstream in(path, is_binary(path) ? std::ios::binary : std::ios::in);
  if (!in) throw Error(ErrorCode::kDataError, "cannot open events file " + path);
  return is_binary(path) ? read_events_binary(in) : read_events_text(in);
}

void write_events_file(const std::string& path, const std::vector<Event>& events) {
  std::ofstream out(path, is_binary(path) ? std::ios::binary : std::ios::out);
  if (!out) throw Error(ErrorCode::kDataError, "cannot write events file " + path);
  if (is_binary(path))
    write_events_binary(out, events);
  else
    write_events_text(out, events);
}

}  // namespace gpeio
