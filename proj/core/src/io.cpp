// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#include "sglv/io.hpp"

#include <png.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace sglv::io {

namespace {

std::string read_token(std::istream& in) {
    std::string tok;
    char c;
    while (in.get(c)) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(c);
    }
    return tok;
}

std::uint32_t byteswap32(std::uint32_t v) {
    return (v >> 24) | ((v >> 8) & 0xff00u) | ((v << 8) & 0xff0000u) | (v << 24);
}

}  // namespace

void write_pfm(const std::filesystem::path& path, const Image& img) {
    if (img.channels() != 1 && img.channels() != 3) throw Error("write_pfm: only 1 or 3 channels supported");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("write_pfm: cannot open " + path.string());
    out << (img.channels() == 3 ? "PF" : "Pf") << '\n' << img.width() << ' ' << img.height() << "\n-1.0\n";
    std::vector<float> row(static_cast<std::size_t>(img.width()) * img.channels());
    for (int r = img.height() - 1; r >= 0; --r) {
        for (int c = 0; c < img.width(); ++c)
            for (int ch = 0; ch < img.channels(); ++ch)
                row[static_cast<std::size_t>(c) * img.channels() + ch] = static_cast<float>(img.at(r, c, ch));
        if constexpr (std::endian::native == std::endian::big) {
            for (float& f : row) {
                std::uint32_t u;
                std::memcpy(&u, &f, 4);
                u = byteswap32(u);
                std::memcpy(&f, &u, 4);
            }
        }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * 4));
    }
    if (!out) throw Error("write_pfm: write failed for " + path.string());
}

Image read_pfm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("read_pfm: cannot open " + path.string());
    const std::string magic = read_token(in);
    int channels = 0;
    if (magic == "PF") channels = 3;
    else if (magic == "Pf") channels = 1;
    else throw Error("read_pfm: bad magic in " + path.string());
    int width = 0, height = 0;
    double scale = 0.0;
    try {
        width = std::stoi(read_token(in));
        height = std::stoi(read_token(in));
        scale = std::stod(read_token(in));
    } catch (const std::exception&) {
        throw Error("read_pfm: malformed header in " + path.string());
    }
    if (width <= 0 || height <= 0 || scale == 0.0) throw Error("read_pfm: malformed header in " + path.string());
    const bool little = scale < 0.0;
    const bool swap = little != (std::endian::native == std::endian::little);
    Image img(width, height, channels);
    std::vector<float> row(static_cast<std::size_t>(width) * channels);
    for (int r = height - 1; r >= 0; --r) {
        in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size() * 4));
        if (!in) throw Error("read_pfm: truncated pixel data in " + path.string());
        for (std::size_t i = 0; i < row.size(); ++i) {
            float f = row[i];
            if (swap) {
                std::uint32_t u;
                std::memcpy(&u, &f, 4);
                u = byteswap32(u);
                std::memcpy(&f, &u, 4);
            }
            img.data()[static_cast<std::size_t>(r) * row.size() + i] = f;
        }
    }
    return img;
}

void write_png(const std::filesystem::path& path, const Image& img, int bit_depth) {
    if (img.channels() != 1 && img.channels() != 3) throw Error("write_png: only 1 or 3 channels supported");
    if (bit_depth != 8 && bit_depth != 16) throw Error("write_png: bit depth must be 8 or 16");
    png_image pi;
    std::memset(&pi, 0, sizeof(pi));
    pi.version = PNG_IMAGE_VERSION;
    pi.width = static_cast<png_uint_32>(img.width());
    pi.height = static_cast<png_uint_32>(img.height());
    pi.format = img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    const std::size_t n = img.pixel_count() * img.channels();
    int ok = 0;
    if (bit_depth == 8) {
        std::vector<std::uint8_t> buf(n);
        for (std::size_t i = 0; i < n; ++i)
            buf[i] = static_cast<std::uint8_t>(std::lround(clamp01(img.data()[i]) * 255.0));
        ok = png_image_write_to_file(&pi, path.string().c_str(), 0, buf.data(), 0, nullptr);
    } else {
        // 16-bit simplified API writes linear data
        pi.format |= PNG_FORMAT_FLAG_LINEAR;
        std::vector<std::uint16_t> buf(n);
        for (std::size_t i = 0; i < n; ++i)
            buf[i] = static_cast<std::uint16_t>(std::lround(clamp01(img.data()[i]) * 65535.0));
        ok = png_image_write_to_file(&pi, path.string().c_str(), 0, buf.data(), 0, nullptr);
    }
    if (!ok) throw Error("write_png: " + std::string(pi.message));
}

Image read_png(const std::filesystem::path& path) {
    png_image pi;
    std::memset(&pi, 0, sizeof(pi));
    pi.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&pi, path.string().c_str()))
        throw Error("read_png: " + std::string(pi.message));
    const bool gray = (pi.format & PNG_FORMAT_FLAG_COLOR) == 0;
    const bool wide = (pi.format & PNG_FORMAT_FLAG_LINEAR) != 0;
    pi.format = (gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB) | (wide ? PNG_FORMAT_FLAG_LINEAR : 0);
    const int channels = gray ? 1 : 3;
    Image img(static_cast<int>(pi.width), static_cast<int>(pi.height), channels);
    const auto finish = [&](void* buffer) {
        if (!png_image_finish_read(&pi, nullptr, buffer, 0, nullptr)) {
            const std::string msg = pi.message;
            png_image_free(&pi);
            throw Error("read_png: " + msg);
        }
    };
    if (wide) {
        // 16-bit files come back as the stored linear samples
        std::vector<std::uint16_t> buf(PNG_IMAGE_SIZE(pi) / 2);
        finish(buf.data());
        for (std::size_t i = 0; i < buf.size(); ++i) img.data()[i] = buf[i] / 65535.0;
    } else {
        std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(pi));
        finish(buf.data());
        for (std::size_t i = 0; i < buf.size(); ++i) img.data()[i] = buf[i] / 255.0;
    }
    return img;
}

void write_depth_pfm(const std::filesystem::path& path, const DepthMap& depth) {
    Image out(depth.width(), depth.height(), 1);
    for (int r = 0; r < depth.height(); ++r)
        for (int c = 0; c < depth.width(); ++c) out.at(r, c) = depth.is_valid(r, c) ? depth.depth.at(r, c) : 0.0;
    write_pfm(path, out);
}

DepthMap read_depth_pfm(const std::filesystem::path& path) {
    const Image img = read_pfm(path);
    if (img.channels() != 1) throw Error("read_depth_pfm: expected a single-channel PFM");
    DepthMap d(img.width(), img.height());
    for (int r = 0; r < img.height(); ++r)
        for (int c = 0; c < img.width(); ++c) d.set(r, c, img.at(r, c));
    return d;
}

void write_map(const std::filesystem::path& path, const EquirectMap& map) {
    if (path.extension() == ".png") {
        write_png(path, map.image());
        return;
    }
    write_pfm(path, map.image());
}

EquirectMap read_map(const std::filesystem::path& path) {
    if (path.extension() == ".png") {
        Image img = read_png(path);
        const MapKind kind = img.channels() == 3 ? MapKind::Ldr : MapKind::Mask;
        return EquirectMap::from_image(kind, std::move(img));
    }
    Image img = read_pfm(path);
    const MapKind kind = img.channels() == 3 ? MapKind::Hdr : MapKind::Mask;
    return EquirectMap::from_image(kind, std::move(img));
}

}  // namespace sglv::io
