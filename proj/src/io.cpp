#include "dirfilt/io.hpp"

#include <cctype>
#include <cstdio>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace dirfilt::io {

namespace {

using nlohmann::json;

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_number(const std::string& token, const char* what, long line) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &pos);
  } catch (const std::exception&) {
    throw StreamReader::ParseError(std::string("bad ") + what + " '" + token + "'", line);
  }
  while (pos < token.size() && std::isspace(static_cast<unsigned char>(token[pos]))) ++pos;
  if (pos != token.size())
    throw StreamReader::ParseError(std::string("bad ") + what + " '" + token + "'", line);
  return v;
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

void append_array(std::string& out, const std::vector<double>& values) {
  out.push_back('[');
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out.push_back(',');
    out += format_double(values[i]);
  }
  out.push_back(']');
}

}  // namespace

StreamFormat parse_format(std::string_view token) {
  if (token == "jsonl") return StreamFormat::Jsonl;
  if (token == "csv") return StreamFormat::Csv;
  throw std::invalid_argument("unknown format '" + std::string(token) + "' (expected jsonl or csv)");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

StreamReader::StreamReader(std::istream& in, StreamFormat format) : in_(in), format_(format) {}

std::optional<StreamRecord> StreamReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    if (format_ == StreamFormat::Csv && !header_seen_) {
      const auto cells = split_csv(line);
      if (cells.size() < 4 || cells[0] != "t" || cells[1] != "source")
        throw ParseError("expected CSV header t,source,p1,...,pK", line_);
      k_ = cells.size() - 2;
      header_seen_ = true;
      continue;
    }

    StreamRecord record;
    if (format_ == StreamFormat::Jsonl) {
      json j;
      try {
        j = json::parse(line);
      } catch (const json::parse_error& e) {
        throw ParseError(std::string("bad JSON: ") + e.what(), line_);
      }
      if (!j.is_object() || !j.contains("t") || !j.contains("source") || !j.contains("probs"))
        throw ParseError("record needs fields t, source, probs", line_);
      if (!j["t"].is_number() || !j["source"].is_string() || !j["probs"].is_array())
        throw ParseError("record fields have wrong types", line_);
      record.t = j["t"].get<double>();
      record.source = j["source"].get<std::string>();
      for (const auto& v : j["probs"]) {
        if (!v.is_number()) throw ParseError("probs entries must be numbers", line_);
        record.probs.push_back(v.get<double>());
      }
      if (k_ == 0) k_ = record.probs.size();
      if (record.probs.size() != k_)
        throw ParseError("probs dimension changed mid-stream", line_);
    } else {
      const auto cells = split_csv(line);
      if (cells.size() != k_ + 2)
        throw ParseError("expected " + std::to_string(k_ + 2) + " CSV cells", line_);
      record.t = parse_number(cells[0], "timestamp", line_);
      record.source = cells[1];
      for (std::size_t i = 2; i < cells.size(); ++i)
        record.probs.push_back(parse_number(cells[i], "probability", line_));
    }
    if (record.probs.size() < 2) throw ParseError("need at least 2 classes", line_);
    return record;
  }
  return std::nullopt;
}

std::string stream_csv_header(std::size_t k) {
  std::string out = "t,source";
  for (std::size_t i = 1; i <= k; ++i) out += ",p" + std::to_string(i);
  return out + "\n";
}

std::string stream_record_line(const StreamRecord& record, StreamFormat format) {
  std::string out;
  if (format == StreamFormat::Jsonl) {
    out = "{\"t\":" + format_double(record.t) + ",\"source\":\"" + json_escape(record.source) +
          "\",\"probs\":";
    append_array(out, record.probs);
    out += "}";
  } else {
    out = format_double(record.t) + "," + record.source;
    for (double v : record.probs) out += "," + format_double(v);
  }
  return out + "\n";
}

std::string output_csv_header(std::size_t k) {
  std::string out = "t,source";
  for (std::size_t i = 1; i <= k; ++i) out += ",p" + std::to_string(i);
  for (std::size_t i = 1; i <= k; ++i) out += ",s" + std::to_string(i);
  return out + ",class,converged\n";
}

std::string output_record_line(const OutputRecord& record, StreamFormat format) {
  std::string out;
  if (format == StreamFormat::Jsonl) {
    out = "{\"t\":" + format_double(record.t) + ",\"source\":\"" + json_escape(record.source) +
          "\",\"probs\":";
    append_array(out, record.probs);
    out += ",\"smoothed\":";
    append_array(out, record.smoothed);
    out += ",\"class\":" + std::to_string(record.class_1based);
    out += std::string(",\"converged\":") + (record.converged ? "true" : "false") + "}";
  } else {
    out = format_double(record.t) + "," + record.source;
    for (double v : record.probs) out += "," + format_double(v);
    for (double v : record.smoothed) out += "," + format_double(v);
    out += "," + std::to_string(record.class_1based);
    out += record.converged ? ",1" : ",0";
  }
  return out + "\n";
}

std::vector<OutputRecord> read_output_records(std::istream& in) {
  std::vector<OutputRecord> records;
  std::string line;
  long line_no = 0;
  bool csv_header_seen = false;
  std::size_t k = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    if (line.front() == '{') {
      json j;
      try {
        j = json::parse(line);
      } catch (const json::parse_error& e) {
        throw StreamReader::ParseError(std::string("bad JSON: ") + e.what(), line_no);
      }
      OutputRecord record;
      record.t = j.at("t").get<double>();
      record.source = j.at("source").get<std::string>();
      record.probs = j.at("probs").get<std::vector<double>>();
      record.smoothed = j.at("smoothed").get<std::vector<double>>();
      record.class_1based = j.at("class").get<int>();
      record.converged = j.at("converged").get<bool>();
      records.push_back(std::move(record));
      continue;
    }

    const auto cells = split_csv(line);
    if (!csv_header_seen) {
      if (cells.size() < 6 || cells[0] != "t")
        throw StreamReader::ParseError("expected output CSV header", line_no);
      k = (cells.size() - 4) / 2;
      csv_header_seen = true;
      continue;
    }
    if (cells.size() != 2 * k + 4)
      throw StreamReader::ParseError("expected " + std::to_string(2 * k + 4) + " CSV cells",
                                     line_no);
    OutputRecord record;
    record.t = parse_number(cells[0], "timestamp", line_no);
    record.source = cells[1];
    for (std::size_t i = 0; i < k; ++i)
      record.probs.push_back(parse_number(cells[2 + i], "probability", line_no));
    for (std::size_t i = 0; i < k; ++i)
      record.smoothed.push_back(parse_number(cells[2 + k + i], "probability", line_no));
    record.class_1based = static_cast<int>(parse_number(cells[2 + 2 * k], "class", line_no));
    record.converged = parse_number(cells[3 + 2 * k], "flag", line_no) != 0.0;
    records.push_back(std::move(record));
  }
  return records;
}

std::string truth_csv_header() { return "t,true_class\n"; }

std::string truth_record_line(const TruthRecord& record) {
  return format_double(record.t) + "," + std::to_string(record.true_class_1based) + "\n";
}

std::vector<TruthRecord> read_truth(std::istream& in) {
  std::vector<TruthRecord> records;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("t,", 0) == 0) continue;  // header
    const auto cells = split_csv(line);
    if (cells.size() != 2)
      throw StreamReader::ParseError("expected t,true_class", line_no);
    TruthRecord record;
    record.t = parse_number(cells[0], "timestamp", line_no);
    record.true_class_1based = static_cast<int>(parse_number(cells[1], "class", line_no));
    records.push_back(record);
  }
  return records;
}

}  // namespace dirfilt::io
