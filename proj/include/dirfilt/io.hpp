#ifndef DIRFILT_IO_HPP
#define DIRFILT_IO_HPP

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dirfilt::io {

enum class StreamFormat { Jsonl, Csv };

StreamFormat parse_format(std::string_view token);  // "jsonl" | "csv"

/// One classifier output on the wire: timestamp, source id, and the
/// class-probability vector.
struct StreamRecord {
  double t = 0.0;
  std::string source;
  std::vector<double> probs;
};

/// One filtered record: the post-clamp input, the smoothed vector, the
/// 1-based argmax class, and the solver's convergence flag.
struct OutputRecord {
  double t = 0.0;
  std::string source;
  std::vector<double> probs;
  std::vector<double> smoothed;
  int class_1based = 0;
  bool converged = true;
};

/// Numbers are written with 12 significant digits throughout.
std::string format_double(double v);

/// Reads StreamRecords line by line; for CSV the first line must be
/// the header `t,source,p1,...,pK`. Malformed-line handling is the
/// caller's: next() throws ParseError with the offending line number.
class StreamReader {
 public:
  StreamReader(std::istream& in, StreamFormat format);

  struct ParseError : std::runtime_error {
    ParseError(const std::string& what, long line) : std::runtime_error(what), line_number(line) {}
    long line_number = 0;
  };

  /// Next record, or nullopt at end of input.
  std::optional<StreamRecord> next();

  long line_number() const { return line_; }

 private:
  std::istream& in_;
  StreamFormat format_;
  long line_ = 0;
  bool header_seen_ = false;
  std::size_t k_ = 0;
};

std::string stream_record_line(const StreamRecord& record, StreamFormat format);
std::string stream_csv_header(std::size_t k);

std::string output_record_line(const OutputRecord& record, StreamFormat format);
std::string output_csv_header(std::size_t k);

/// Parses filtered output back in (used by the evaluate command); only
/// the fields present in OutputRecord are recognized.
std::vector<OutputRecord> read_output_records(std::istream& in);

/// Truth files: CSV `t,true_class` with a header line, 1-based labels.
struct TruthRecord {
  double t = 0.0;
  int true_class_1based = 0;
};
std::string truth_csv_header();
std::string truth_record_line(const TruthRecord& record);
std::vector<TruthRecord> read_truth(std::istream& in);

}  // namespace dirfilt::io

#endif  // DIRFILT_IO_HPP
