#include "qnsplit/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <string>

namespace qnsplit {

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string next_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return tok;
}

long parse_positive(const std::string& tok, const char* what) {
    try {
        std::size_t used = 0;
        const long v = std::stol(tok, &used);
        if (used != tok.size() || v <= 0) throw PgmError("");
        return v;
    } catch (const std::exception&) {
        throw PgmError(std::string("pgm: invalid ") + what + " '" + tok + "'");
    }
}

}  // namespace

Image read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PgmError("pgm: cannot open " + path.string());
    const std::string magic = next_token(in);
    if (magic != "P2" && magic != "P5") throw PgmError("pgm: unsupported magic '" + magic + "'");
    Image img;
    img.cols = parse_positive(next_token(in), "width");
    img.rows = parse_positive(next_token(in), "height");
    const long maxval = parse_positive(next_token(in), "maxval");
    if (maxval > 255) throw PgmError("pgm: only 8-bit images are supported");
    img.pixels.resize(img.rows * img.cols);
    const double scale = 255.0 / static_cast<double>(maxval);
    if (magic == "P2") {
        for (Eigen::Index i = 0; i < img.pixels.size(); ++i) {
            const std::string tok = next_token(in);
            if (tok.empty()) throw PgmError("pgm: truncated pixel data");
            long v;
            try {
                v = std::stol(tok);
            } catch (const std::exception&) {
                throw PgmError("pgm: invalid pixel '" + tok + "'");
            }
            if (v < 0 || v > maxval) throw PgmError("pgm: pixel out of range");
            img.pixels[i] = static_cast<double>(v) * scale;
        }
    } else {
        std::string raw(static_cast<std::size_t>(img.pixels.size()), '\0');
        in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
        if (in.gcount() != static_cast<std::streamsize>(raw.size())) throw PgmError("pgm: truncated pixel data");
        for (Eigen::Index i = 0; i < img.pixels.size(); ++i)
            img.pixels[i] = static_cast<double>(static_cast<unsigned char>(raw[static_cast<std::size_t>(i)])) * scale;
    }
    return img;
}

void write_pgm(const std::filesystem::path& path, const Image& img, PgmFormat format) {
    require_dim(img.pixels, img.rows * img.cols, "write_pgm");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw PgmError("pgm: cannot write " + path.string());
    auto to_byte = [](double v) { return static_cast<int>(std::clamp(std::lround(v), 0L, 255L)); };
    out << (format == PgmFormat::plain ? "P2" : "P5") << '\n' << img.cols << ' ' << img.rows << "\n255\n";
    if (format == PgmFormat::plain) {
        for (Eigen::Index r = 0; r < img.rows; ++r) {
            for (Eigen::Index c = 0; c < img.cols; ++c) out << (c ? " " : "") << to_byte(img.pixels[r * img.cols + c]);
            out << '\n';
        }
    } else {
        for (Eigen::Index i = 0; i < img.pixels.size(); ++i) out.put(static_cast<char>(to_byte(img.pixels[i])));
    }
    if (!out) throw PgmError("pgm: write failed for " + path.string());
}

}  // namespace qnsplit
