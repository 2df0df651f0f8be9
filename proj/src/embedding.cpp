#include "arda/embedding.hpp"

#include <chrono>
#include <cmath>
#include <thread>

#include <json.hpp>

#include "arda/error.hpp"
#include "arda/util.hpp"

#ifndef ARDA_NO_HTTP
#include <httplib.h>
#endif

namespace arda::embed {

double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw Error("embedding dimension mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double l2_norm(const Vector& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

double cosine(const Vector& a, const Vector& b) {
    const double na = l2_norm(a);
    const double nb = l2_norm(b);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot(a, b) / (na * nb);
}

HashingProvider::HashingProvider(std::size_t dim) : dim_(dim) {
    if (dim_ == 0) throw Error("embedding dimension must be positive");
}

Vector HashingProvider::embed(std::string_view text) const {
    Vector v(dim_, 0.0);
    const auto tokens = util::tokenize(text);
    for (const auto& token : tokens) {
        const std::uint64_t h = util::fnv1a64(token);
        const std::size_t bucket = static_cast<std::size_t>(h % dim_);
        const double sign = (h >> 63) ? -1.0 : 1.0;
        v[bucket] += sign;
    }
    const double norm = l2_norm(v);
    if (norm == 0.0) {
        v.assign(dim_, 0.0);
        v[0] = 1.0;
        return v;
    }
    for (double& x : v) x /= norm;
    return v;
}

RemoteProvider::RemoteProvider(RemoteEmbedOptions options, std::size_t dim)
    : options_(std::move(options)), dim_(dim) {
    if (dim_ == 0) throw Error("embedding dimension must be positive");
}

#ifndef ARDA_NO_HTTP
Vector RemoteProvider::embed(std::string_view text) const {
    nlohmann::json body = {{"model", options_.model}, {"input", std::string(text)}};
    const std::string payload = body.dump();

    double backoff = options_.initial_backoff_s;
    std::string last_error = "no attempt made";
    for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
        httplib::Client client(options_.endpoint);
        client.set_connection_timeout(std::chrono::duration<double>(options_.timeout_s));
        client.set_read_timeout(std::chrono::duration<double>(options_.timeout_s));
        httplib::Headers headers;
        if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);

        auto res = client.Post("/v1/embeddings", headers, payload, "application/json");
        if (res && res->status == 200) {
            try {
                auto parsed = nlohmann::json::parse(res->body);
                Vector v = parsed.at("data").at(0).at("embedding").get<Vector>();
                if (v.size() != dim_) throw Error("embedding dimension mismatch from endpoint");
                const double norm = l2_norm(v);
                if (norm == 0.0) throw Error("endpoint returned zero embedding");
                for (double& x : v) x /= norm;
                return v;
            } catch (const nlohmann::json::exception& e) {
                throw RetryableError(std::string("malformed embedding response: ") + e.what());
            }
        }
        if (res && res->status >= 400 && res->status < 500 && res->status != 429 && res->status != 408) {
            throw Error("embedding endpoint rejected request: status " + std::to_string(res->status));
        }
        last_error = res ? "status " + std::to_string(res->status) : "connection failure";
        if (attempt < options_.max_attempts) {
            std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
            backoff *= 2.0;
        }
    }
    throw RetryableError("embedding request failed after " + std::to_string(options_.max_attempts) +
                         " attempts: " + last_error);
}
#else
Vector RemoteProvider::embed(std::string_view) const {
    throw Error("remote embedding support compiled out");
}
#endif

std::shared_ptr<Provider> make_provider(const std::string& name, std::size_t dim,
                                        const RemoteEmbedOptions* remote) {
    if (name == "hash") return std::make_shared<HashingProvider>(dim);
    if (name == "remote") {
        if (remote == nullptr) throw Error("remote embedding provider requires endpoint options");
        return std::make_shared<RemoteProvider>(*remote, dim);
    }
    throw Error("unknown embedding provider: " + name);
}

}  // namespace arda::embed
