#include "tcn/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <fstream>
#include <sstream>

#include "tcn/error.hpp"

namespace tcn {

namespace detail {

void write_u64(std::ostream& out, std::uint64_t v) {
    std::array<char, 8> bytes{};
    for (std::size_t i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    out.write(bytes.data(), bytes.size());
}

void write_f64(std::ostream& out, double v) { write_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t read_u64(std::istream& in, const std::filesystem::path& path) {
    std::array<unsigned char, 8> bytes{};
    if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
        throw Error(ErrorKind::Format, "unexpected end of file in " + path.string());
    }
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < 8; ++i) v |= std::uint64_t{bytes[i]} << (8 * i);
    return v;
}

double read_f64(std::istream& in, const std::filesystem::path& path) {
    return std::bit_cast<double>(read_u64(in, path));
}

}  // namespace detail

namespace {

std::ifstream open_input(const std::filesystem::path& path, std::ios::openmode mode = {}) {
    if (!std::filesystem::exists(path)) {
        throw Error(ErrorKind::MissingFile, "file not found: " + path.string());
    }
    std::ifstream in(path, mode);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path, std::ios::openmode mode = {}) {
    std::ofstream out(path, mode | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

ClassId parse_class_id(std::string_view token, const std::filesystem::path& path,
                       std::size_t line) {
    token = trim(token);
    ClassId id = -1;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), id);
    if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size() || id < 0) {
        throw Error(ErrorKind::Format, path.string() + ":" + std::to_string(line) +
                                           ": invalid class index '" + std::string(token) + "'");
    }
    return id;
}

std::string join_ids(const std::vector<ClassId>& ids) {
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(ids[i]);
    }
    return out;
}

}  // namespace

void write_matrix(const std::filesystem::path& path, const Matrix& m, std::string_view magic) {
    auto out = open_output(path, std::ios::binary);
    out.write(magic.data(), static_cast<std::streamsize>(magic.size()));
    detail::write_u64(out, m.rows());
    detail::write_u64(out, m.cols());
    for (double v : m.values()) detail::write_f64(out, v);
    finish(out, path);
}

Matrix read_matrix(const std::filesystem::path& path, std::string_view magic) {
    auto in = open_input(path, std::ios::binary);
    std::string header(magic.size(), '\0');
    if (!in.read(header.data(), static_cast<std::streamsize>(header.size())) || header != magic) {
        throw Error(ErrorKind::Format, path.string() + ": bad magic, expected " + std::string(magic));
    }
    const auto rows = detail::read_u64(in, path);
    const auto cols = detail::read_u64(in, path);
    const auto expected_bytes = std::filesystem::file_size(path) - magic.size() - 16;
    if (cols != 0 && rows > expected_bytes / 8 / cols) {
        throw Error(ErrorKind::Format, path.string() + ": header shape exceeds payload");
    }
    std::vector<double> data(rows * cols);
    for (double& v : data) v = detail::read_f64(in, path);
    if (in.peek() != std::char_traits<char>::eof()) {
        throw Error(ErrorKind::Format, path.string() + ": trailing bytes after payload");
    }
    Matrix m(rows, cols, std::move(data));
    if (!m.all_finite()) throw Error(ErrorKind::Format, path.string() + ": non-finite values");
    return m;
}

void write_labels(const std::filesystem::path& path, const std::vector<ClassId>& labels) {
    auto out = open_output(path);
    for (ClassId id : labels) out << id << '\n';
    finish(out, path);
}

std::vector<ClassId> read_labels(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::vector<ClassId> labels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        labels.push_back(parse_class_id(line, path, lineno));
    }
    return labels;
}

void write_splits(const std::filesystem::path& path, const Splits& splits) {
    auto out = open_output(path);
    out << "source:" << join_ids(splits.source) << '\n';
    out << "target:" << join_ids(splits.target) << '\n';
    out << "val:" << join_ids(splits.val) << '\n';
    finish(out, path);
}

Splits read_splits(const std::filesystem::path& path) {
    auto in = open_input(path);
    Splits splits;
    bool seen_source = false;
    bool seen_target = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto body = trim(line);
        if (body.empty()) continue;
        const auto colon = body.find(':');
        if (colon == std::string_view::npos) {
            throw Error(ErrorKind::Format,
                        path.string() + ":" + std::to_string(lineno) + ": expected 'name:'");
        }
        const auto name = trim(body.substr(0, colon));
        std::vector<ClassId>* dst = nullptr;
        if (name == "source") {
            dst = &splits.source;
            seen_source = true;
        } else if (name == "target") {
            dst = &splits.target;
            seen_target = true;
        } else if (name == "val") {
            dst = &splits.val;
        } else {
            throw Error(ErrorKind::Format, path.string() + ":" + std::to_string(lineno) +
                                               ": unknown section '" + std::string(name) + "'");
        }
        auto rest = trim(body.substr(colon + 1));
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            dst->push_back(parse_class_id(rest.substr(0, comma), path, lineno));
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
    }
    if (!seen_source || !seen_target) {
        throw Error(ErrorKind::Format, path.string() + ": missing source or target section");
    }
    return splits;
}

}  // namespace tcn
