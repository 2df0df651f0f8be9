#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace arda::util {

std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::string hex64(std::uint64_t value);

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Lowercased alphanumeric token runs ("MinMaxNorm norm." -> {"minmaxnorm", "norm"}).
std::vector<std::string> tokenize(std::string_view text);

std::string read_file(const std::string& path);
std::optional<std::string> try_read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);
void append_line(const std::string& path, std::string_view line);

/// Standard-normal variates from mt19937_64 + Box-Muller. std::normal_distribution
/// is implementation-defined, so the transform is spelled out here to keep
/// sequences identical across standard libraries.
class GaussianRng {
public:
    explicit GaussianRng(std::uint64_t seed) : rng_(seed) {}
    double next();

private:
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Uniform draw in [0, 1) using the top 53 bits of the engine output.
double uniform01(std::mt19937_64& rng);

}  // namespace arda::util
