#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace arda::embed {

using Vector = std::vector<double>;

double dot(const Vector& a, const Vector& b);
double l2_norm(const Vector& v);
double cosine(const Vector& a, const Vector& b);

/// Text -> unit vector. Providers must be deterministic for a fixed
/// configuration except where documented (remote endpoints).
class Provider {
public:
    virtual ~Provider() = default;
    virtual Vector embed(std::string_view text) const = 0;
    virtual std::size_t dimension() const noexcept = 0;
    virtual std::string name() const = 0;
};

/// Default offline provider: token feature hashing (FNV-1a buckets with a
/// sign bit), L2-normalized. Texts with no tokens map to the first basis
/// vector so every embedding is a unit vector.
class HashingProvider final : public Provider {
public:
    explicit HashingProvider(std::size_t dim = 256);
    Vector embed(std::string_view text) const override;
    std::size_t dimension() const noexcept override { return dim_; }
    std::string name() const override { return "hash"; }

private:
    std::size_t dim_;
};

struct RemoteEmbedOptions {
    std::string endpoint;      // e.g. http://host:port
    std::string api_key;
    std::string model = "text-embedding";
    int max_attempts = 3;
    double initial_backoff_s = 0.5;
    double timeout_s = 60.0;
};

/// Remote embeddings over an OpenAI-compatible /v1/embeddings endpoint.
/// Failures after the retry budget surface as RetryableError.
class RemoteProvider final : public Provider {
public:
    RemoteProvider(RemoteEmbedOptions options, std::size_t dim);
    Vector embed(std::string_view text) const override;
    std::size_t dimension() const noexcept override { return dim_; }
    std::string name() const override { return "remote"; }

private:
    RemoteEmbedOptions options_;
    std::size_t dim_;
};

/// Factory keyed by provider name ("hash" or "remote").
std::shared_ptr<Provider> make_provider(const std::string& name, std::size_t dim,
                                        const RemoteEmbedOptions* remote = nullptr);

}  // namespace arda::embed
