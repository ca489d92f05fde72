#pragma once

#include <string>
#include <vector>

#include "wsf/signal.hpp"

namespace wsf::io {

// CSV with a header row. Accepts either (t,x) columns or a single x column;
// in the latter case fs_hint must be > 0.
Signal read_signal_csv(const std::string& path, double fs_hint = 0.0);

void write_signal_csv(const std::string& path, const Signal& signal);

// Mono 16- or 32-bit PCM WAV; the sampling rate comes from the header.
Signal read_wav(const std::string& path);

// Reads by extension: .wav -> read_wav, anything else -> read_signal_csv.
Signal read_signal(const std::string& path, double fs_hint = 0.0);

// Generic numeric matrix CSV with a caller-supplied header.
void write_matrix_csv(const std::string& path, const std::vector<double>& rows,
                      std::size_t n_rows, std::size_t n_cols,
                      const std::vector<std::string>& header);

// 8-bit grayscale PNG; pixels row-major, top row first.
void write_png_gray(const std::string& path, const std::vector<unsigned char>& pixels,
                    std::size_t width, std::size_t height);

// Maps a matrix to pixels: log-magnitude, min..max -> 0..255, row 0 at the
// bottom (frequency axis up), columns are frames.
std::vector<unsigned char> spectrogram_pixels(const std::vector<double>& magnitudes,
                                              std::size_t n_frames, std::size_t n_bins,
                                              double dynamic_range_db = 60.0);

}  // namespace wsf::io
