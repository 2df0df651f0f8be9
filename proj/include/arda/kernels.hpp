#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "arda/embedding.hpp"

namespace arda::kernels {

/// Execution mode for the scan kernels. Both modes compute each element with
/// the same floating-point operations, so results are bit-identical; Parallel
/// only distributes independent rows across OpenMP threads.
enum class ExecMode { Serial, Parallel };

ExecMode exec_mode_from_string(const std::string& name);
std::string to_string(ExecMode mode);

struct Scored {
    std::size_t index;
    double score;
};

/// Cosine of the query against every item. Items must share the query's
/// dimension. The serial variant is the reference implementation; the
/// parallel variant is the production kernel.
std::vector<double> cosine_scan_serial(const embed::Vector& query,
                                       const std::vector<embed::Vector>& items);
std::vector<double> cosine_scan_parallel(const embed::Vector& query,
                                         const std::vector<embed::Vector>& items);
std::vector<double> cosine_scan(const embed::Vector& query,
                                const std::vector<embed::Vector>& items, ExecMode mode);

/// Top-k indices by score descending; ties broken by lower index (insertion
/// order). k is clamped to the item count.
std::vector<Scored> top_k(const std::vector<double>& scores, std::size_t k);

/// Index of the extremal value (largest when maximize, else smallest); ties
/// broken by lower index. Returns items.size() when empty.
std::size_t argbest(const std::vector<double>& values, bool maximize);

/// Evaluates fn(i) for i in [0, n) into a vector, in parallel when requested.
/// fn must be pure; results are identical across modes.
template <typename Fn>
std::vector<double> map_indexed(std::size_t n, ExecMode mode, Fn&& fn) {
    std::vector<double> out(n, 0.0);
    if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    }
    return out;
}

}  // namespace arda::kernels
