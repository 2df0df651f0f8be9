#include "arda/kernels.hpp"

#include <algorithm>
#include <numeric>

#include "arda/error.hpp"

namespace arda::kernels {

ExecMode exec_mode_from_string(const std::string& name) {
    if (name == "serial") return ExecMode::Serial;
    if (name == "parallel") return ExecMode::Parallel;
    throw Error("unknown scan mode: " + name);
}

std::string to_string(ExecMode mode) {
    return mode == ExecMode::Serial ? "serial" : "parallel";
}

std::vector<double> cosine_scan_serial(const embed::Vector& query,
                                       const std::vector<embed::Vector>& items) {
    std::vector<double> scores(items.size(), 0.0);
    for (std::size_t i = 0; i < items.size(); ++i) {
        scores[i] = embed::cosine(query, items[i]);
    }
    return scores;
}

std::vector<double> cosine_scan_parallel(const embed::Vector& query,
                                         const std::vector<embed::Vector>& items) {
    std::vector<double> scores(items.size(), 0.0);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(items.size()); ++i) {
        scores[static_cast<std::size_t>(i)] = embed::cosine(query, items[static_cast<std::size_t>(i)]);
    }
    return scores;
}

std::vector<double> cosine_scan(const embed::Vector& query,
                                const std::vector<embed::Vector>& items, ExecMode mode) {
    return mode == ExecMode::Parallel ? cosine_scan_parallel(query, items)
                                      : cosine_scan_serial(query, items);
}

std::vector<Scored> top_k(const std::vector<double>& scores, std::size_t k) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    k = std::min(k, scores.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&scores](std::size_t a, std::size_t b) {
                          if (scores[a] != scores[b]) return scores[a] > scores[b];
                          return a < b;
                      });
    std::vector<Scored> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.push_back({order[i], scores[order[i]]});
    return out;
}

std::size_t argbest(const std::vector<double>& values, bool maximize) {
    if (values.empty()) return 0;
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        const bool better = maximize ? values[i] > values[best] : values[i] < values[best];
        if (better) best = i;
    }
    return best;
}

}  // namespace arda::kernels
