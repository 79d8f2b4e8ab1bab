#include "pitchlab/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "pitchlab/error.hpp"
#include "pitchlab/log.hpp"

namespace pitchlab {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t read_u32(const unsigned char* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
}

std::uint16_t read_u16(const unsigned char* p) { return std::uint16_t(p[0] | p[1] << 8); }

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

double decode_sample(const unsigned char* p, int bits, bool is_float) {
  if (is_float) {
    if (bits == 32) return static_cast<double>(std::bit_cast<float>(read_u32(p)));
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(p[i]) << (8 * i);
    return std::bit_cast<double>(v);
  }
  switch (bits) {
    case 8: return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16: return static_cast<std::int16_t>(read_u16(p)) / 32768.0;
    case 24: {
      std::int32_t v = std::int32_t(p[0]) | std::int32_t(p[1]) << 8 | std::int32_t(p[2]) << 16;
      if (v & 0x800000) v -= 0x1000000;
      return v / 8388608.0;
    }
    case 32: return static_cast<std::int32_t>(read_u32(p)) / 2147483648.0;
    default: return 0.0;
  }
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::io_error, "write failed for " + path.string());
}

std::string wav_header(std::uint16_t format, std::uint16_t bits, int sample_rate, std::size_t n) {
  const std::uint32_t block_align = bits / 8;
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(n * block_align);
  std::string out;
  out.reserve(44 + data_bytes);
  out.append("RIFF");
  put_u32(out, 36 + data_bytes);
  out.append("WAVEfmt ");
  put_u32(out, 16);
  put_u16(out, format);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(sample_rate));
  put_u32(out, static_cast<std::uint32_t>(sample_rate) * block_align);
  put_u16(out, static_cast<std::uint16_t>(block_align));
  put_u16(out, bits);
  out.append("data");
  put_u32(out, data_bytes);
  return out;
}

}  // namespace

AudioBuffer read_wav(const std::filesystem::path& path, WavInfo* info) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto bad = [&](const std::string& why) { return Error(Errc::invalid_audio, path.string() + ": " + why); };

  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw bad("not a RIFF/WAVE file");
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t sample_rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::size_t size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t available = std::min(size, bytes.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (available < 16) throw bad("short fmt chunk");
      format = read_u16(bytes.data() + body);
      channels = read_u16(bytes.data() + body + 2);
      sample_rate = read_u32(bytes.data() + body + 4);
      bits = read_u16(bytes.data() + body + 14);
      if (format == kFormatExtensible) {
        if (available < 26) throw bad("short extensible fmt chunk");
        format = read_u16(bytes.data() + body + 24);
      }
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = available;
    }
    pos = body + size + (size & 1);
  }

  if (format == 0) throw bad("missing fmt chunk");
  if (data == nullptr) throw bad("missing data chunk");
  const bool is_float = format == kFormatFloat;
  if (!is_float && format != kFormatPcm) throw bad("unsupported format tag " + std::to_string(format));
  if (is_float ? (bits != 32 && bits != 64) : (bits != 8 && bits != 16 && bits != 24 && bits != 32)) {
    throw bad("unsupported bit depth " + std::to_string(bits));
  }
  if (channels == 0) throw bad("zero channels");
  if (sample_rate == 0) throw bad("zero sample rate");

  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * channels;
  const std::size_t n = data_size / frame_bytes;
  std::vector<double> samples(n);
  std::size_t clamped = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      acc += decode_sample(data + i * frame_bytes + c * bytes_per_sample, bits, is_float);
    }
    double v = acc / channels;
    if (!std::isfinite(v)) throw bad("non-finite sample at index " + std::to_string(i));
    if (v > 1.0 || v < -1.0) {
      v = std::clamp(v, -1.0, 1.0);
      ++clamped;
    }
    samples[i] = v;
  }
  if (clamped > 0) {
    log::warn(path.string() + ": clipped " + std::to_string(clamped) + " out-of-range samples on ingest");
  }
  if (info) *info = WavInfo{channels, bits, is_float, clamped};
  return AudioBuffer(std::move(samples), static_cast<int>(sample_rate));
}

void write_wav_float(const std::filesystem::path& path, const AudioBuffer& audio) {
  std::string out = wav_header(kFormatFloat, 32, audio.sample_rate(), audio.size());
  for (double s : audio.samples()) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(s)));
  write_file(path, out);
}

void write_wav_pcm16(const std::filesystem::path& path, const AudioBuffer& audio) {
  std::string out = wav_header(kFormatPcm, 16, audio.sample_rate(), audio.size());
  for (double s : audio.samples()) {
    const double scaled = std::clamp(std::round(s * 32768.0), -32768.0, 32767.0);
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
  }
  write_file(path, out);
}

}  // namespace pitchlab
