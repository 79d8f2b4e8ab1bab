#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pitchlab {

struct NoteSegment {
  double onset = 0.0;   // seconds
  double offset = 0.0;  // seconds
  std::optional<double> f0_truth;
};

/// Sidecar format: one note per line, "onset_sec offset_sec [f0_hz]".
/// Blank lines and lines starting with '#' are skipped. Throws
/// Errc::invalid_annotation on malformed lines, an empty file, onset >=
/// offset, overlapping or unsorted notes, or truths outside [20, 4000] Hz.
std::vector<NoteSegment> parse_annotation(std::istream& in);
std::vector<NoteSegment> load_annotation(const std::filesystem::path& path);

void validate_notes(const std::vector<NoteSegment>& notes);

void write_annotation(std::ostream& out, const std::vector<NoteSegment>& notes);
void save_annotation(const std::filesystem::path& path, const std::vector<NoteSegment>& notes);

}  // namespace pitchlab
