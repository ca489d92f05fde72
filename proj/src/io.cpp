#include "wsf/io.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "wsf/errors.hpp"

namespace wsf::io {

namespace {

std::string lower_ext(const std::string& path) {
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return "";
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
        // trim whitespace and CR
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
    }
    return out;
}

bool is_number(const std::string& s) {
    if (s.empty()) return false;
    char* end = nullptr;
    std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

template <typename T>
T read_le(std::istream& in) {
    std::array<char, sizeof(T)> buf;
    in.read(buf.data(), sizeof(T));
    T v;
    std::memcpy(&v, buf.data(), sizeof(T));
    return v;
}

void put_be32(std::vector<unsigned char>& v, std::uint32_t x) {
    v.push_back(static_cast<unsigned char>(x >> 24));
    v.push_back(static_cast<unsigned char>(x >> 16));
    v.push_back(static_cast<unsigned char>(x >> 8));
    v.push_back(static_cast<unsigned char>(x));
}

void png_chunk(std::ofstream& out, const char type[4], const std::vector<unsigned char>& data) {
    std::vector<unsigned char> buf;
    put_be32(buf, static_cast<std::uint32_t>(data.size()));
    buf.insert(buf.end(), type, type + 4);
    buf.insert(buf.end(), data.begin(), data.end());
    const auto crc = crc32(crc32(0L, Z_NULL, 0),
                           buf.data() + 4, static_cast<uInt>(buf.size() - 4));
    put_be32(buf, static_cast<std::uint32_t>(crc));
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size()));
}

}  // namespace

Signal read_signal_csv(const std::string& path, double fs_hint) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open CSV file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty CSV file: " + path);
    auto header = split_csv_line(line);
    if (header.empty()) throw DataError("CSV header missing: " + path);
    bool has_time = header.size() >= 2;
    if (is_number(header[0]))
        throw DataError("CSV must start with a header row: " + path);

    std::vector<double> t, x;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv_line(line);
        if (fields.size() < header.size())
            throw DataError(path + ": short row at line " + std::to_string(lineno));
        auto parse = [&](const std::string& s) {
            try {
                std::size_t pos = 0;
                const double v = std::stod(s, &pos);
                if (pos != s.size()) throw std::invalid_argument(s);
                return v;
            } catch (const std::exception&) {
                throw DataError(path + ": non-numeric value '" + s + "' at line " +
                                std::to_string(lineno));
            }
        };
        if (has_time) {
            t.push_back(parse(fields[0]));
            x.push_back(parse(fields[1]));
        } else {
            x.push_back(parse(fields[0]));
        }
    }
    if (x.size() < 2) throw DataError(path + ": need at least 2 samples");

    Signal s;
    s.samples = std::move(x);
    if (has_time) {
        const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
        if (!(dt > 0.0)) throw DataError(path + ": time column must be increasing");
        for (std::size_t i = 1; i < t.size(); ++i)
            if (std::abs((t[i] - t[i - 1]) - dt) > 1e-6 * dt + 1e-12)
                throw DataError(path + ": time column must be uniform");
        s.fs = 1.0 / dt;
        s.t0 = t.front();
    } else {
        if (!(fs_hint > 0.0))
            throw DataError(path + ": single-column CSV requires a sampling rate (--fs)");
        s.fs = fs_hint;
        s.t0 = 0.0;
    }
    s.validate();
    return s;
}

void write_signal_csv(const std::string& path, const Signal& signal) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    out.precision(17);
    out << "t,x\n";
    for (std::size_t n = 0; n < signal.size(); ++n)
        out << signal.time_at(n) << ',' << signal.samples[n] << '\n';
    if (!out) throw DataError("write failed: " + path);
}

Signal read_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open WAV file: " + path);
    char riff[4], wave[4];
    in.read(riff, 4);
    read_le<std::uint32_t>(in);  // file size
    in.read(wave, 4);
    if (!in || std::memcmp(riff, "RIFF", 4) != 0 || std::memcmp(wave, "WAVE", 4) != 0)
        throw DataError(path + ": not a RIFF/WAVE file");

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    std::vector<char> data;
    while (in) {
        char id[4];
        in.read(id, 4);
        if (!in) break;
        const auto size = read_le<std::uint32_t>(in);
        if (std::memcmp(id, "fmt ", 4) == 0) {
            format = read_le<std::uint16_t>(in);
            channels = read_le<std::uint16_t>(in);
            rate = read_le<std::uint32_t>(in);
            read_le<std::uint32_t>(in);  // byte rate
            read_le<std::uint16_t>(in);  // block align
            bits = read_le<std::uint16_t>(in);
            if (size > 16) in.seekg(size - 16, std::ios::cur);
        } else if (std::memcmp(id, "data", 4) == 0) {
            data.resize(size);
            in.read(data.data(), size);
        } else {
            in.seekg(size + (size & 1), std::ios::cur);
        }
    }
    if (format != 1) throw DataError(path + ": only PCM WAV is supported");
    if (channels != 1) throw DataError(path + ": only mono WAV is supported");
    if (bits != 16 && bits != 32) throw DataError(path + ": only 16/32-bit PCM supported");
    if (rate == 0 || data.empty()) throw DataError(path + ": missing fmt/data chunk");

    Signal s;
    s.fs = static_cast<double>(rate);
    const std::size_t n = data.size() / (bits / 8);
    s.samples.resize(n);
    if (bits == 16) {
        for (std::size_t i = 0; i < n; ++i) {
            std::int16_t v;
            std::memcpy(&v, data.data() + 2 * i, 2);
            s.samples[i] = static_cast<double>(v) / 32768.0;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            std::int32_t v;
            std::memcpy(&v, data.data() + 4 * i, 4);
            s.samples[i] = static_cast<double>(v) / 2147483648.0;
        }
    }
    s.validate();
    return s;
}

Signal read_signal(const std::string& path, double fs_hint) {
    if (lower_ext(path) == "wav") return read_wav(path);
    return read_signal_csv(path, fs_hint);
}

void write_matrix_csv(const std::string& path, const std::vector<double>& rows,
                      std::size_t n_rows, std::size_t n_cols,
                      const std::vector<std::string>& header) {
    if (rows.size() != n_rows * n_cols || header.size() != n_cols)
        throw std::invalid_argument("write_matrix_csv: shape mismatch");
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    out.precision(17);
    for (std::size_t j = 0; j < n_cols; ++j)
        out << header[j] << (j + 1 < n_cols ? ',' : '\n');
    for (std::size_t i = 0; i < n_rows; ++i)
        for (std::size_t j = 0; j < n_cols; ++j)
            out << rows[i * n_cols + j] << (j + 1 < n_cols ? ',' : '\n');
    if (!out) throw DataError("write failed: " + path);
}

void write_png_gray(const std::string& path, const std::vector<unsigned char>& pixels,
                    std::size_t width, std::size_t height) {
    if (pixels.size() != width * height || width == 0 || height == 0)
        throw std::invalid_argument("write_png_gray: shape mismatch");
    // raw scanlines with filter byte 0
    std::vector<unsigned char> raw;
    raw.reserve(height * (width + 1));
    for (std::size_t y = 0; y < height; ++y) {
        raw.push_back(0);
        raw.insert(raw.end(), pixels.begin() + static_cast<std::ptrdiff_t>(y * width),
                   pixels.begin() + static_cast<std::ptrdiff_t>((y + 1) * width));
    }
    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<unsigned char> compressed(bound);
    if (compress2(compressed.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
        throw NumericError("write_png_gray: zlib compression failed");
    compressed.resize(bound);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    static const unsigned char magic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    out.write(reinterpret_cast<const char*>(magic), 8);
    std::vector<unsigned char> ihdr;
    put_be32(ihdr, static_cast<std::uint32_t>(width));
    put_be32(ihdr, static_cast<std::uint32_t>(height));
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(0);  // grayscale
    ihdr.push_back(0);  // compression
    ihdr.push_back(0);  // filter
    ihdr.push_back(0);  // no interlace
    png_chunk(out, "IHDR", ihdr);
    png_chunk(out, "IDAT", compressed);
    png_chunk(out, "IEND", {});
    if (!out) throw DataError("write failed: " + path);
}

std::vector<unsigned char> spectrogram_pixels(const std::vector<double>& magnitudes,
                                              std::size_t n_frames, std::size_t n_bins,
                                              double dynamic_range_db) {
    if (magnitudes.size() != n_frames * n_bins)
        throw std::invalid_argument("spectrogram_pixels: shape mismatch");
    double peak = 0.0;
    for (double v : magnitudes) peak = std::max(peak, std::abs(v));
    if (peak <= 0.0) peak = 1.0;
    const double floor_db = -std::abs(dynamic_range_db);
    std::vector<unsigned char> px(n_frames * n_bins);
    for (std::size_t m = 0; m < n_frames; ++m)
        for (std::size_t k = 0; k < n_bins; ++k) {
            const double mag = std::abs(magnitudes[m * n_bins + k]);
            double db = mag > 0.0 ? 20.0 * std::log10(mag / peak) : floor_db;
            db = std::clamp(db, floor_db, 0.0);
            const double level = (db - floor_db) / (-floor_db);
            // row 0 at the bottom: flip the frequency axis into image rows
            px[(n_bins - 1 - k) * n_frames + m] =
                static_cast<unsigned char>(std::lround(255.0 * level));
        }
    return px;
}

}  // namespace wsf::io
