#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "tcn/matrix.hpp"

namespace tcn {

using ClassId = int;

// Binary matrix container: 4-byte magic, u64 rows, u64 cols (little-endian),
// then rows×cols little-endian f64 values in row-major order.
inline constexpr std::string_view kFeatureMagic = "TCNF";

void write_matrix(const std::filesystem::path& path, const Matrix& m,
                  std::string_view magic = kFeatureMagic);
Matrix read_matrix(const std::filesystem::path& path, std::string_view magic = kFeatureMagic);

// One decimal class index per line.
void write_labels(const std::filesystem::path& path, const std::vector<ClassId>& labels);
std::vector<ClassId> read_labels(const std::filesystem::path& path);

struct Splits {
    std::vector<ClassId> source;
    std::vector<ClassId> target;
    std::vector<ClassId> val;
};

// Text file with "source:", "target:" and "val:" lines, each followed by
// comma-separated class indices.
void write_splits(const std::filesystem::path& path, const Splits& splits);
Splits read_splits(const std::filesystem::path& path);

// Little-endian primitives shared by the binary containers.
namespace detail {
void write_u64(std::ostream& out, std::uint64_t v);
void write_f64(std::ostream& out, double v);
std::uint64_t read_u64(std::istream& in, const std::filesystem::path& path);
double read_f64(std::istream& in, const std::filesystem::path& path);
}  // namespace detail

}  // namespace tcn
