#include "pitchlab/annotation.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "pitchlab/error.hpp"

namespace pitchlab {
namespace {

constexpr double kMinTruthHz = 20.0;
constexpr double kMaxTruthHz = 4000.0;

Error bad(std::size_t line_no, const std::string& why) {
  return Error(Errc::invalid_annotation, "line " + std::to_string(line_no) + ": " + why);
}

}  // namespace

void validate_notes(const std::vector<NoteSegment>& notes) {
  if (notes.empty()) throw Error(Errc::invalid_annotation, "annotation has no notes");
  for (std::size_t i = 0; i < notes.size(); ++i) {
    const auto& n = notes[i];
    if (!std::isfinite(n.onset) || !std::isfinite(n.offset) || n.onset < 0.0 || !(n.onset < n.offset)) {
      throw bad(i + 1, "onset must be non-negative and before offset");
    }
    if (i > 0 && n.onset < notes[i - 1].offset) throw bad(i + 1, "notes overlap or are not sorted");
    if (n.f0_truth && !(*n.f0_truth >= kMinTruthHz && *n.f0_truth <= kMaxTruthHz)) {
      throw bad(i + 1, "f0 outside [20, 4000] Hz");
    }
  }
}

std::vector<NoteSegment> parse_annotation(std::istream& in) {
  std::vector<NoteSegment> notes;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::vector<double> values;
    std::string token;
    while (fields >> token) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
      if (ec != std::errc() || ptr != token.data() + token.size()) throw bad(line_no, "not a number: '" + token + "'");
      values.push_back(v);
    }
    if (values.size() != 2 && values.size() != 3) throw bad(line_no, "expected 'onset offset [f0]'");
    NoteSegment n{values[0], values[1], std::nullopt};
    if (values.size() == 3) n.f0_truth = values[2];
    notes.push_back(n);
  }
  validate_notes(notes);
  return notes;
}

std::vector<NoteSegment> load_annotation(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open annotation " + path.string());
  return parse_annotation(in);
}

void write_annotation(std::ostream& out, const std::vector<NoteSegment>& notes) {
  std::ostringstream ss;
  ss << std::fixed;
  for (const auto& n : notes) {
    ss << std::setprecision(6) << n.onset << ' ' << n.offset;
    if (n.f0_truth) ss << ' ' << std::setprecision(4) << *n.f0_truth;
    ss << '\n';
  }
  out << ss.str();
}

void save_annotation(const std::filesystem::path& path, const std::vector<NoteSegment>& notes) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_error, "cannot write annotation " + path.string());
  write_annotation(out, notes);
}

}  // namespace pitchlab
