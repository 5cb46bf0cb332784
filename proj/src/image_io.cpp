#include <gridsight/image_io.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include <png.h>

namespace gridsight {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) {
            std::fclose(f);
        }
    }
};

using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::string& path, const char* mode) {
    std::FILE* f = std::fopen(path.c_str(), mode);
    if (!f) {
        if (mode[0] == 'r') {
            throw MissingFileError("cannot open file: " + path);
        }
        throw IoError("cannot open file for writing: " + path);
    }
    return FilePtr(f);
}

std::string lower_ext(const std::string& path) {
    std::string ext = std::filesystem::path(path).extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

// ---------------------------------------------------------------------------
// PNG via libpng
// ---------------------------------------------------------------------------

RasterRgb load_png_file(const std::string& path) {
    FilePtr f = open_file(path, "rb");
    unsigned char sig[8];
    if (std::fread(sig, 1, 8, f.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        throw MalformedHeaderError("not a PNG file: " + path);
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) {
        throw IoError("libpng init failed");
    }
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("libpng init failed");
    }
    std::vector<png_bytep> row_ptrs;
    RasterRgb out;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw MalformedHeaderError("corrupt PNG data: " + path);
    }
    png_init_io(png, f.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int bit_depth = png_get_bit_depth(png, info);
    const int color_type = png_get_color_type(png, info);

    // normalize everything to 8-bit RGB
    if (bit_depth == 16) {
        png_set_strip_16(png);
    }
    if (color_type == PNG_COLOR_TYPE_PALETTE) {
        png_set_palette_to_rgb(png);
    }
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
        png_set_expand_gray_1_2_4_to_8(png);
    }
    if (png_get_valid(png, info, PNG_INFO_tRNS)) {
        png_set_tRNS_to_alpha(png);
    }
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
        png_set_gray_to_rgb(png);
    }
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    out = RasterRgb(static_cast<int>(w), static_cast<int>(h));
    std::vector<unsigned char> raw(static_cast<std::size_t>(w) * h * 3);
    row_ptrs.resize(h);
    for (png_uint_32 y = 0; y < h; ++y) {
        row_ptrs[y] = raw.data() + static_cast<std::size_t>(y) * w * 3;
    }
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    for (std::size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] = {raw[3 * i], raw[3 * i + 1], raw[3 * i + 2]};
    }
    return out;
}

// rows delivers one packed scanline at a time
template <typename RowFn>
void write_png_file(const std::string& path, int width, int height, int color_type, RowFn&& rows) {
    FilePtr f = open_file(path, "wb");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) {
        throw IoError("libpng init failed");
    }
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG write failed: " + path);
    }
    png_init_io(png, f.get());
    png_set_IHDR(png, info, width, height, 8, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const int channels = color_type == PNG_COLOR_TYPE_RGB ? 3 : 1;
    std::vector<unsigned char> row(static_cast<std::size_t>(width) * channels);
    for (int y = 0; y < height; ++y) {
        rows(y, row.data());
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

void save_png_file(const RasterRgb& img, const std::string& path) {
    if (img.empty()) {
        throw InvalidArgumentError("save_png: empty image");
    }
    write_png_file(path, img.width, img.height, PNG_COLOR_TYPE_RGB, [&](int y, unsigned char* row) {
        for (int x = 0; x < img.width; ++x) {
            const Rgb8 p = img.at(x, y);
            row[3 * x] = p.r;
            row[3 * x + 1] = p.g;
            row[3 * x + 2] = p.b;
        }
    });
}

void save_png_gray_file(const RasterGray& img, const std::string& path) {
    if (img.empty()) {
        throw InvalidArgumentError("save_png: empty image");
    }
    write_png_file(path, img.width, img.height, PNG_COLOR_TYPE_GRAY, [&](int y, unsigned char* row) {
        for (int x = 0; x < img.width; ++x) {
            row[x] = to_u8(img.at(x, y));
        }
    });
}

// ---------------------------------------------------------------------------
// PGM / PPM (binary, maxval 255)
// ---------------------------------------------------------------------------

// Reads one whitespace/comment-delimited header token.
std::string pnm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
        } else if (!std::isspace(c)) {
            tok.push_back(static_cast<char>(c));
            while ((c = in.peek()) != EOF && !std::isspace(c) && c != '#') {
                tok.push_back(static_cast<char>(in.get()));
            }
            return tok;
        }
    }
    return tok;
}

RasterRgb load_pnm_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw MissingFileError("cannot open file: " + path);
    }
    const std::string magic = pnm_token(in);
    if (magic != "P5" && magic != "P6") {
        throw UnsupportedFormatError("unsupported PNM variant '" + magic + "' in " + path);
    }
    const std::string ws = pnm_token(in);
    const std::string hs = pnm_token(in);
    const std::string ms = pnm_token(in);
    int w = 0;
    int h = 0;
    int maxval = 0;
    try {
        w = std::stoi(ws);
        h = std::stoi(hs);
        maxval = std::stoi(ms);
    } catch (const std::exception&) {
        throw MalformedHeaderError("malformed PNM header in " + path);
    }
    if (w < 1 || h < 1 || maxval != 255) {
        throw MalformedHeaderError("malformed PNM header in " + path);
    }
    in.get(); // single whitespace after maxval
    const int channels = magic == "P6" ? 3 : 1;
    std::vector<unsigned char> raw(static_cast<std::size_t>(w) * h * channels);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
        throw MalformedHeaderError("truncated PNM data in " + path);
    }
    RasterRgb out(w, h);
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        if (channels == 3) {
            out.data[i] = {raw[3 * i], raw[3 * i + 1], raw[3 * i + 2]};
        } else {
            out.data[i] = {raw[i], raw[i], raw[i]};
        }
    }
    return out;
}

void save_pnm_file(const RasterRgb* rgb, const RasterGray* gray, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open file for writing: " + path);
    }
    if (rgb) {
        out << "P6\n" << rgb->width << " " << rgb->height << "\n255\n";
        for (const Rgb8 p : rgb->data) {
            out.put(static_cast<char>(p.r));
            out.put(static_cast<char>(p.g));
            out.put(static_cast<char>(p.b));
        }
    } else {
        out << "P5\n" << gray->width << " " << gray->height << "\n255\n";
        for (const double v : gray->data) {
            out.put(static_cast<char>(to_u8(v)));
        }
    }
    if (!out) {
        throw IoError("PNM write failed: " + path);
    }
}

void draw_one(RasterRgb& img, const BoxAnnotation& box) {
    const int x1 = box.x + box.w - 1;
    const int y1 = box.y + box.h - 1;
    auto put = [&](int x, int y) {
        if (x >= 0 && x < img.width && y >= 0 && y < img.height) {
            img.at(x, y) = box.color;
        }
    };
    for (int x = box.x; x <= x1; ++x) {
        put(x, box.y);
        put(x, y1);
    }
    for (int y = box.y; y <= y1; ++y) {
        put(box.x, y);
        put(x1, y);
    }
}

void draw_one(RasterRgb& img, const LineAnnotation& line) {
    // Bresenham
    int x0 = line.x0;
    int y0 = line.y0;
    const int x1 = line.x1;
    const int y1 = line.y1;
    const int dx = std::abs(x1 - x0);
    const int dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1;
    const int sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
        if (x0 >= 0 && x0 < img.width && y0 >= 0 && y0 < img.height) {
            img.at(x0, y0) = line.color;
        }
        if (x0 == x1 && y0 == y1) {
            break;
        }
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

void draw_one(RasterRgb& img, const MaskAnnotation& ann) {
    if (ann.mask.width != img.width || ann.mask.height != img.height) {
        throw DimensionMismatchError("mask annotation dimensions do not match image");
    }
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            if (ann.mask.get(x, y)) {
                img.at(x, y) = ann.color;
            }
        }
    }
}

} // namespace

RasterRgb load_image(const std::string& path) {
    if (!std::filesystem::exists(path)) {
        throw MissingFileError("no such file: " + path);
    }
    const std::string ext = lower_ext(path);
    if (ext == ".png") {
        return load_png_file(path);
    }
    if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") {
        return load_pnm_file(path);
    }
    throw UnsupportedFormatError("unsupported image format: " + path);
}

void save_png(const RasterRgb& img, const std::string& path) { save_png_file(img, path); }

void save_png(const RasterGray& img, const std::string& path) { save_png_gray_file(img, path); }

void save_pnm(const RasterRgb& img, const std::string& path) { save_pnm_file(&img, nullptr, path); }

void save_pnm(const RasterGray& img, const std::string& path) { save_pnm_file(nullptr, &img, path); }

void draw_annotations(RasterRgb& img, const std::vector<Annotation>& shapes) {
    for (const Annotation& a : shapes) {
        std::visit([&](const auto& shape) { draw_one(img, shape); }, a);
    }
}

void save_overlay(const RasterRgb& img, const std::vector<Annotation>& shapes, const std::string& path) {
    RasterRgb copy = img;
    draw_annotations(copy, shapes);
    save_png(copy, path);
}

RasterRgb gray_to_rgb(const RasterGray& img) {
    if (img.empty()) {
        throw InvalidArgumentError("gray_to_rgb: empty image");
    }
    RasterRgb out(img.width, img.height);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        const std::uint8_t v = to_u8(img.data[i]);
        out.data[i] = {v, v, v};
    }
    return out;
}

RasterGray mask_to_gray(const BitMask& mask) {
    RasterGray out(mask.width, mask.height);
    for (std::size_t i = 0; i < mask.bits.size(); ++i) {
        out.data[i] = mask.bits[i] ? 1.0 : 0.0;
    }
    return out;
}

} // namespace gridsight
