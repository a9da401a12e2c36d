#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace gpeio {

struct Event {
  double t = 0.0;
  int x = 0;
  int y = 0;
  int polarity = 1;  // +1 or -1
};

// Text format: one `t x y p` line per event, p in {0, 1}. Lines starting with
// '#' are skipped. Throws kDataError on malformed lines.
std::vector<Event> read_events_text(std::istream& in);
void write_events_text(std::ostream& out, const std::vector<Event>& events);

// Packed little-endian records: u64 t in ns, u16 x, u16 y, u8 p (13 bytes).
std::vector<Event> read_events_binary(std::istream& in);
void write_events_binary(std::ostream& out, const std::vector<Event>& events);

// Picks the format from the extension (.bin is binary, anything else text).
std::vector<Event> read_events_file(const std::string& path);
void write_events_file(const std::string& path, const std::vector<Event>& events);

}  // namespace gpeio
