// Copyright 2026 The bpm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <expat.h>
#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <deque>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/tokenizer.hpp>

#include "bpm/errors.hpp"

namespace bpm {

/// Interned activity label. Equality and ordering are by intern id.
class Activity {
 public:
  Activity() = default;

  static Activity intern(std::string_view name) {
    auto& t = table();
    {
      std::shared_lock lock(t.mu);
      auto it = t.ids.find(std::string(name));
      if (it != t.ids.end()) return Activity(it->second);
    }
    std::unique_lock lock(t.mu);
    auto [it, inserted] =
        t.ids.emplace(std::string(name), static_cast<std::uint32_t>(t.names.size()));
    if (inserted) t.names.emplace_back(name);
    return Activity(it->second);
  }

  std::uint32_t id() const { return id_; }
  bool valid() const { return id_ != kInvalid; }

  const std::string& name() const {
    auto& t = table();
    std::shared_lock lock(t.mu);
    return t.names.at(id_);
  }

  friend bool operator==(Activity a, Activity b) { return a.id_ == b.id_; }
  friend bool operator!=(Activity a, Activity b) { return a.id_ != b.id_; }
  friend bool operator<(Activity a, Activity b) { return a.id_ < b.id_; }

 private:
  static constexpr std::uint32_t kInvalid = 0xffffffffu;

  struct Table {
    std::shared_mutex mu;
    std::unordered_map<std::string, std::uint32_t> ids;
    std::deque<std::string> names;  // deque keeps references stable
  };
  static Table& table() {
    static Table t;
    return t;
  }

  explicit Activity(std::uint32_t id) : id_(id) {}
  std::uint32_t id_ = kInvalid;
};

using ActivitySet = std::set<Activity>;
using Word = std::vector<Activity>;

inline bool name_less(Activity a, Activity b) { return a.name() < b.name(); }

/// An identified activity sequence. Contracts use 1-based indices.
struct Trace {
  std::string id;
  std::vector<Activity> events;

  std::size_t size() const { return events.size(); }
  Activity at(std::size_t i) const {
    if (i < 1 || i > events.size()) throw ContractViolation("trace index out of range");
    return events[i - 1];
  }
};

/// A set of traces with unique ids; immutable once built.
class EventLog {
 public:
  EventLog() = default;

  /// Builds a log, suffixing "#k" to repeated trace ids.
  static EventLog from_traces(std::vector<Trace> traces, std::size_t skipped_events = 0) {
    EventLog log;
    std::set<std::string> seen;
    std::map<std::string, int> repeats;
    for (auto& t : traces) {
      if (seen.count(t.id)) {
        int& k = repeats[t.id];
        if (k == 0) k = 1;
        std::string fresh;
        do {
          fresh = t.id + "#" + std::to_string(++k);
        } while (seen.count(fresh));
        t.id = fresh;
      }
      seen.insert(t.id);
      for (Activity a : t.events) log.alphabet_.insert(a);
    }
    log.traces_ = std::move(traces);
    log.skipped_events_ = skipped_events;
    return log;
  }

  const std::vector<Trace>& traces() const { return traces_; }
  const ActivitySet& alphabet() const { return alphabet_; }
  std::size_t size() const { return traces_.size(); }
  bool empty() const { return traces_.empty(); }
  std::size_t skipped_events() const { return skipped_events_; }
  const Trace& operator[](std::size_t i) const { return traces_[i]; }

  std::size_t event_count() const {
    std::size_t n = 0;
    for (const auto& t : traces_) n += t.size();
    return n;
  }

 private:
  std::vector<Trace> traces_;
  ActivitySet alphabet_;
  std::size_t skipped_events_ = 0;
};

/// Events of a trace restricted to an alphabet, with their source positions.
struct ProjectedTrace {
  std::vector<Activity> events;
  std::vector<int> origin_index;  // 1-based, strictly increasing
};

inline ProjectedTrace project(const Trace& trace, const ActivitySet& alphabet) {
  ProjectedTrace p;
  for (std::size_t i = 0; i < trace.events.size(); ++i) {
    if (alphabet.count(trace.events[i])) {
      p.events.push_back(trace.events[i]);
      p.origin_index.push_back(static_cast<int>(i + 1));
    }
  }
  return p;
}

/// Suffix starting at index min(k, n); k must be >= 1.
template <typename T>
std::vector<T> tail(const std::vector<T>& seq, long long k) {
  if (k <= 0) throw ContractViolation("tail requires k >= 1");
  if (seq.empty()) return {};
  auto start = static_cast<std::size_t>(std::min<long long>(k, static_cast<long long>(seq.size())));
  return std::vector<T>(seq.begin() + static_cast<std::ptrdiff_t>(start - 1), seq.end());
}

inline Word to_word(std::initializer_list<std::string_view> names) {
  Word w;
  for (auto n : names) w.push_back(Activity::intern(n));
  return w;
}

inline Trace make_trace(std::string id, const std::vector<std::string>& names) {
  Trace t{std::move(id), {}};
  for (const auto& n : names) t.events.push_back(Activity::intern(n));
  return t;
}

/// Splits on whitespace; convenient for hand-written logs.
inline Trace make_trace(std::string id, std::string_view spaced) {
  std::istringstream in{std::string(spaced)};
  std::vector<std::string> names{std::istream_iterator<std::string>(in), {}};
  return make_trace(std::move(id), names);
}

namespace detail {

struct XesState {
  enum class Scope { kOther, kTrace, kEvent };
  std::vector<Scope> stack;
  std::vector<Trace> traces;
  std::optional<std::string> trace_name;
  std::optional<std::string> event_name;
  std::vector<Activity> events;
  std::size_t skipped = 0;
};

inline const char* xml_attr(const XML_Char** attrs, std::string_view key) {
  for (int i = 0; attrs[i]; i += 2)
    if (key == attrs[i]) return attrs[i + 1];
  return nullptr;
}

inline std::string_view local_name(std::string_view n) {
  auto c = n.find(':');
  return c == std::string_view::npos ? n : n.substr(c + 1);
}

inline void XMLCALL xes_start(void* ud, const XML_Char* name, const XML_Char** attrs) {
  auto* s = static_cast<XesState*>(ud);
  auto tag = local_name(name);
  auto parent = s->stack.empty() ? XesState::Scope::kOther : s->stack.back();
  if (tag == "trace") {
    s->stack.push_back(XesState::Scope::kTrace);
    s->trace_name.reset();
    s->events.clear();
    return;
  }
  if (tag == "event" && parent == XesState::Scope::kTrace) {
    s->stack.push_back(XesState::Scope::kEvent);
    s->event_name.reset();
    return;
  }
  if (tag == "string" && parent != XesState::Scope::kOther) {
    const char* key = xml_attr(attrs, "key");
    const char* value = xml_attr(attrs, "value");
    if (key && value && std::string_view(key) == "concept:name") {
      if (parent == XesState::Scope::kTrace) s->trace_name = value;
      else s->event_name = value;
    }
  }
  s->stack.push_back(XesState::Scope::kOther);
}

inline void XMLCALL xes_end(void* ud, const XML_Char* /*name*/) {
  auto* s = static_cast<XesState*>(ud);
  auto scope = s->stack.back();
  s->stack.pop_back();
  if (scope == XesState::Scope::kEvent) {
    if (s->event_name) s->events.push_back(Activity::intern(*s->event_name));
    else ++s->skipped;
  } else if (scope == XesState::Scope::kTrace) {
    std::string id = s->trace_name ? *s->trace_name : std::to_string(s->traces.size() + 1);
    s->traces.push_back(Trace{std::move(id), std::move(s->events)});
    s->events.clear();
  }
}

inline bool is_gzip(std::string_view bytes) {
  return bytes.size() >= 2 && static_cast<unsigned char>(bytes[0]) == 0x1f &&
         static_cast<unsigned char>(bytes[1]) == 0x8b;
}

inline std::string gunzip(std::string_view bytes) {
  z_stream zs{};
  if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) throw ParseError("gzip: init failed", 0, 0);
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(bytes.data()));
  zs.avail_in = static_cast<uInt>(bytes.size());
  std::string out;
  char buf[1 << 15];
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = reinterpret_cast<Bytef*>(buf);
    zs.avail_out = sizeof(buf);
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw ParseError("gzip: corrupt stream", 0, 0);
    }
    out.append(buf, sizeof(buf) - zs.avail_out);
    if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
      inflateEnd(&zs);
      throw ParseError("gzip: truncated stream", 0, 0);
    }
  }
  inflateEnd(&zs);
  return out;
}

inline std::optional<double> parse_timestamp(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  if (s.empty()) return std::nullopt;
  {
    std::size_t used = 0;
    try {
      double v = std::stod(s, &used);
      if (used == s.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
  }
  std::tm tm{};
  std::istringstream in(s);
  in >> std::get_time(&tm, "%Y-%m-%d");
  if (in.fail()) return std::nullopt;
  double frac = 0;
  long offset = 0;
  if (in.peek() == 'T' || in.peek() == ' ') {
    in.get();
    in >> std::get_time(&tm, "%H:%M:%S");
    if (in.fail()) return std::nullopt;
    if (in.peek() == '.') {
      std::string digits;
      in.get();
      while (std::isdigit(in.peek())) digits.push_back(static_cast<char>(in.get()));
      if (digits.empty()) return std::nullopt;
      frac = std::stod("0." + digits);
    }
    int c = in.peek();
    if (c == 'Z') {
      in.get();
    } else if (c == '+' || c == '-') {
      in.get();
      int hh = 0, mm = 0;
      char colon = 0;
      in >> std::setw(2) >> hh;
      if (in.peek() == ':') in >> colon;
      in >> std::setw(2) >> mm;
      if (in.fail()) return std::nullopt;
      offset = (hh * 3600L + mm * 60L) * (c == '+' ? 1 : -1);
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) return std::nullopt;
  return static_cast<double>(timegm(&tm) - offset) + frac;
}

using CsvTokenizer = boost::tokenizer<boost::escaped_list_separator<char>>;

inline std::vector<std::string> split_csv(const std::string& line) {
  boost::escaped_list_separator<char> sep('\\', ',', '"');
  CsvTokenizer tok(line, sep);
  return {tok.begin(), tok.end()};
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\\\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + "\"";
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace detail

/// Reads the concept:name subset of XES. Gzip input is detected by magic bytes.
inline EventLog parse_xes(std::string_view input) {
  std::string inflated;
  if (detail::is_gzip(input)) {
    inflated = detail::gunzip(input);
    input = inflated;
  }
  detail::XesState state;
  XML_Parser parser = XML_ParserCreate(nullptr);
  XML_SetUserData(parser, &state);
  XML_SetElementHandler(parser, detail::xes_start, detail::xes_end);
  if (XML_Parse(parser, input.data(), static_cast<int>(input.size()), XML_TRUE) ==
      XML_STATUS_ERROR) {
    ParseError err(std::string("malformed XES: ") + XML_ErrorString(XML_GetErrorCode(parser)),
                   XML_GetCurrentLineNumber(parser), XML_GetCurrentColumnNumber(parser) + 1);
    XML_ParserFree(parser);
    throw err;
  }
  XML_ParserFree(parser);
  if (state.traces.empty()) throw EmptyLogError("event log contains no traces");
  return EventLog::from_traces(std::move(state.traces), state.skipped);
}

struct CsvColumns {
  std::string case_col = "case";
  std::string activity_col = "activity";
  std::optional<std::string> time_col;
};

/// One trace per case id, in first-appearance order; rows stable-sorted by time.
inline EventLog parse_csv(std::string_view input, const CsvColumns& cols = {}) {
  std::string inflated;
  if (detail::is_gzip(input)) {
    inflated = detail::gunzip(input);
    input = inflated;
  }
  std::istringstream in{std::string(input)};
  std::string line;
  std::size_t row = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++row;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  };
  if (!next_line()) throw EmptyLogError("CSV input is empty");
  std::vector<std::string> header;
  try {
    header = detail::split_csv(line);
  } catch (const boost::escaped_list_error& e) {
    throw RowError(std::string("malformed CSV header: ") + e.what(), row);
  }
  auto column = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ConfigError("CSV column not found: " + name);
    return static_cast<std::size_t>(it - header.begin());
  };
  std::size_t ci = column(cols.case_col);
  std::size_t ai = column(cols.activity_col);
  std::optional<std::size_t> ti;
  if (cols.time_col) ti = column(*cols.time_col);

  struct Row {
    double time;
    Activity act;
  };
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<Row>> cases;
  while (next_line()) {
    std::vector<std::string> f;
    try {
      f = detail::split_csv(line);
    } catch (const boost::escaped_list_error& e) {
      throw RowError(std::string("malformed CSV row: ") + e.what(), row);
    }
    std::size_t need = std::max(ci, ai);
    if (ti) need = std::max(need, *ti);
    if (f.size() <= need) throw RowError("CSV row has too few fields", row);
    double time = 0;
    if (ti) {
      auto t = detail::parse_timestamp(f[*ti]);
      if (!t) throw RowError("unparsable timestamp '" + f[*ti] + "'", row);
      time = *t;
    }
    auto [it, fresh] = cases.try_emplace(f[ci]);
    if (fresh) order.push_back(f[ci]);
    it->second.push_back(Row{time, Activity::intern(f[ai])});
  }
  if (order.empty()) throw EmptyLogError("CSV input has a header but no rows");
  std::vector<Trace> traces;
  for (const auto& id : order) {
    auto& rows = cases[id];
    if (ti)
      std::stable_sort(rows.begin(), rows.end(),
                       [](const Row& a, const Row& b) { return a.time < b.time; });
    Trace t{id, {}};
    for (const auto& r : rows) t.events.push_back(r.act);
    traces.push_back(std::move(t));
  }
  return EventLog::from_traces(std::move(traces));
}

/// Writes "case,activity" rows; parse_csv reads it back.
inline std::string emit_csv(const EventLog& log) {
  std::ostringstream out;
  out << "case,activity\n";
  for (const auto& t : log.traces())
    for (Activity a : t.events)
      out << detail::csv_field(t.id) << ',' << detail::csv_field(a.name()) << '\n';
  return out.str();
}

inline std::string emit_xes(const EventLog& log) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<log xes.version=\"1.0\">\n";
  for (const auto& t : log.traces()) {
    out << "  <trace>\n    <string key=\"concept:name\" value=\"" << detail::xml_escape(t.id)
        << "\"/>\n";
    for (Activity a : t.events)
      out << "    <event><string key=\"concept:name\" value=\"" << detail::xml_escape(a.name())
          << "\"/></event>\n";
    out << "  </trace>\n";
  }
  out << "</log>\n";
  return out.str();
}

enum class LogFormat { kXes, kCsv };

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open " + path);
  return {std::istreambuf_iterator<char>(f), {}};
}

inline EventLog read_log(const std::string& path, LogFormat format, const CsvColumns& cols = {}) {
  std::string bytes = read_file(path);
  return format == LogFormat::kXes ? parse_xes(bytes) : parse_csv(bytes, cols);
}

}  // namespace bpm
