#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tiestrength/error.hpp"
#include "tiestrength/graph.hpp"
#include "tiestrength/measures.hpp"

namespace tiestrength {

enum class EventFormat { Jsonl, Csv };

inline EventFormat parse_format(std::string_view name) {
  if (name == "jsonl" || name == "json") return EventFormat::Jsonl;
  if (name == "csv") return EventFormat::Csv;
  throw ConfigError("unknown event format '" + std::string(name) + "' (expected jsonl or csv)");
}

/// Picks the format from the file extension; anything but .csv is jsonl.
inline EventFormat format_for_path(std::string_view path) {
  return path.size() >= 4 && path.substr(path.size() - 4) == ".csv" ? EventFormat::Csv
                                                                      : EventFormat::Jsonl;
}

struct ParsedEvents {
  std::vector<EventRecord> events;
  std::vector<std::string> warnings;
  std::size_t duplicates_removed = 0;
};

namespace detail {

inline void dedup_participants(EventRecord& rec, ParsedEvents& out) {
  std::set<std::string> seen;
  std::vector<std::string> kept;
  std::size_t dropped = 0;
  for (auto& p : rec.participants) {
    if (seen.insert(p).second) {
      kept.push_back(std::move(p));
    } else {
      ++dropped;
    }
  }
  rec.participants = std::move(kept);
  if (dropped > 0) {
    out.duplicates_removed += dropped;
    out.warnings.push_back("event '" + rec.event_id + "': dropped " + std::to_string(dropped) +
                           " duplicate participant(s)");
  }
}

/// Splits one CSV record; supports double-quoted fields with "" escapes.
inline std::vector<std::string> split_csv(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw InputError("line " + std::to_string(line_no) + ": unterminated quote");
  fields.push_back(std::move(cur));
  return fields;
}

inline std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

inline std::int64_t parse_time(const std::string& text, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw InputError("line " + std::to_string(line_no) + ": time '" + text + "' is not an integer");
  }
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string dot_id(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

/// One JSON object per line: {"event_id": str, "participants": [str], "time": int?}.
inline ParsedEvents parse_events_jsonl(std::istream& in) {
  ParsedEvents out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError(where + "malformed JSON (" + e.what() + ")");
    }
    if (!obj.is_object()) throw InputError(where + "expected a JSON object");
    EventRecord rec;
    auto id = obj.find("event_id");
    if (id == obj.end() || !id->is_string() || id->get<std::string>().empty()) {
      throw InputError(where + "missing or empty string field 'event_id'");
    }
    rec.event_id = id->get<std::string>();
    auto parts = obj.find("participants");
    if (parts == obj.end() || !parts->is_array()) {
      throw InputError(where + "missing array field 'participants'");
    }
    for (const auto& p : *parts) {
      if (!p.is_string() || p.get<std::string>().empty()) {
        throw InputError(where + "participants must be nonempty strings");
      }
      rec.participants.push_back(p.get<std::string>());
    }
    auto t = obj.find("time");
    if (t != obj.end() && !t->is_null()) {
      if (!t->is_number_integer()) throw InputError(where + "'time' must be an integer");
      rec.time = t->get<std::int64_t>();
    }
    detail::dedup_participants(rec, out);
    if (rec.participants.empty()) {
      out.warnings.push_back("event '" + rec.event_id + "' has no participants");
    }
    out.events.push_back(std::move(rec));
  }
  return out;
}

/// Rows of event_id,person_label[,time], grouped by event_id in order of first
/// appearance. An optional header row starting with "event_id" is skipped; an
/// empty person_label declares an event without adding anyone to it.
inline ParsedEvents parse_events_csv(std::istream& in) {
  ParsedEvents out;
  std::map<std::string, std::size_t> index;
  std::string line;
  std::size_t line_no = 0;
  bool first_row = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split_csv(line, line_no);
    for (auto& f : fields) f = detail::trim(f);
    if (first_row && fields[0] == "event_id") {
      first_row = false;
      continue;
    }
    first_row = false;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (fields.size() < 2 || fields.size() > 3) {
      throw InputError(where + "expected event_id,person_label[,time]");
    }
    if (fields[0].empty()) throw InputError(where + "empty event_id");
    std::optional<std::int64_t> time;
    if (fields.size() == 3 && !fields[2].empty()) time = detail::parse_time(fields[2], line_no);

    auto [it, fresh] = index.try_emplace(fields[0], out.events.size());
    if (fresh) out.events.push_back(EventRecord{fields[0], time, {}});
    EventRecord& rec = out.events[it->second];
    if (time) {
      if (rec.time && *rec.time != *time) {
        throw InputError(where + "conflicting time for event '" + rec.event_id + "'");
      }
      rec.time = time;
    }
    if (!fields[1].empty()) rec.participants.push_back(fields[1]);
  }
  for (auto& rec : out.events) {
    detail::dedup_participants(rec, out);
    if (rec.participants.empty()) {
      out.warnings.push_back("event '" + rec.event_id + "' has no participants");
    }
  }
  return out;
}

inline ParsedEvents parse_events(std::istream& in, EventFormat format) {
  return format == EventFormat::Csv ? parse_events_csv(in) : parse_events_jsonl(in);
}

inline ParsedEvents parse_events(const std::string& path, EventFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  return parse_events(in, format);
}

// ---------------------------------------------------------------------------
// Exports.

struct EdgeRow {
  std::string person_a;
  std::string person_b;
  double score = 0.0;

  friend bool operator==(const EdgeRow&, const EdgeRow&) = default;
};

/// Table rows with labels ordered inside each row and rows sorted by label.
inline std::vector<EdgeRow> edge_rows(const BipartiteGraph& g, const TieScoreTable& scores) {
  std::vector<EdgeRow> rows;
  rows.reserve(scores.size());
  for (const auto& [tie, s] : scores) {
    std::string a = g.person_label(tie.first), b = g.person_label(tie.second);
    if (b < a) std::swap(a, b);
    rows.push_back({std::move(a), std::move(b), s});
  }
  std::sort(rows.begin(), rows.end(), [](const EdgeRow& x, const EdgeRow& y) {
    return x.person_a != y.person_a ? x.person_a < y.person_a : x.person_b < y.person_b;
  });
  return rows;
}

inline std::string format_score(double s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", s);
  return buf;
}

inline void write_edges(std::ostream& out, const BipartiteGraph& g, const TieScoreTable& scores) {
  out << "person_a,person_b,score\n";
  for (const auto& r : edge_rows(g, scores)) {
    out << detail::csv_field(r.person_a) << ',' << detail::csv_field(r.person_b) << ','
        << format_score(r.score) << '\n';
  }
}

inline void export_edges(const BipartiteGraph& g, const TieScoreTable& scores, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  write_edges(out, g, scores);
  if (!out) throw InputError("write to '" + path + "' failed");
}

/// Reads an edge file written by write_edges.
inline std::vector<EdgeRow> read_edges(std::istream& in) {
  std::vector<EdgeRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = detail::split_csv(line, line_no);
    if (line_no == 1 && f.size() == 3 && f[0] == "person_a") continue;
    if (f.size() != 3) throw InputError("line " + std::to_string(line_no) + ": expected 3 fields");
    try {
      rows.push_back({f[0], f[1], std::stod(f[2])});
    } catch (const std::exception&) {
      throw InputError("line " + std::to_string(line_no) + ": bad score '" + f[2] + "'");
    }
  }
  return rows;
}

/// Undirected graph description, one edge per tie, pen width
/// width_scale * score / max_score. Returns false (and writes an empty
/// graph) when the table is empty.
inline bool write_dot(std::ostream& out, const BipartiteGraph& g, const TieScoreTable& scores,
                      double width_scale) {
  if (!(width_scale > 0.0)) throw ConfigError("width_scale must be > 0");
  const auto rows = edge_rows(g, scores);
  double max_score = 0.0;
  for (const auto& r : rows) max_score = std::max(max_score, r.score);
  out << "graph tiestrength {\n";
  char buf[64];
  for (const auto& r : rows) {
    const double w = max_score > 0.0 ? width_scale * r.score / max_score : width_scale;
    std::snprintf(buf, sizeof buf, "%.6g", w);
    out << "  " << detail::dot_id(r.person_a) << " -- " << detail::dot_id(r.person_b)
        << " [penwidth=" << buf << "];\n";
  }
  out << "}\n";
  return !rows.empty();
}

inline bool export_dot(const BipartiteGraph& g, const TieScoreTable& scores, const std::string& path,
                       double width_scale) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  return write_dot(out, g, scores, width_scale);
}

inline void write_histogram(std::ostream& out, const std::map<std::size_t, std::size_t>& hist) {
  out << "size,count\n";
  for (const auto& [size, count] : hist) out << size << ',' << count << '\n';
}

}  // namespace tiestrength
