#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "arda/embedding.hpp"
#include "arda/kernels.hpp"
#include "arda/symlang.hpp"

namespace arda::knowledge {

using Json = nlohmann::ordered_json;

enum class Direction { Maximize, Minimize };
std::string to_string(Direction d);
Direction direction_from_string(std::string_view name);

// ---------------------------------------------------------------------------
// Core records
// ---------------------------------------------------------------------------

/// Named metric results under one evaluation setting. Values must be finite.
struct MetricVector {
    std::map<std::string, double> entries;
    std::string evaluation_setting;

    void check() const;  // throws on non-finite values
    bool empty() const { return entries.empty(); }
    std::optional<double> get(std::string_view metric) const;
    Json to_json() const;
    static MetricVector from_json(const Json& j);
};

struct KnowledgeItem {
    std::string key;
    std::optional<std::string> value;
    std::string category;
    embed::Vector embedding;  // unit L2; validated on put
};

struct StoredKnowledgeItem {
    std::string id;
    KnowledgeItem item;
    std::int64_t created_at = 0;
};

enum class ExperimentStatus { Succeeded, Failed };
std::string to_string(ExperimentStatus s);
ExperimentStatus status_from_string(std::string_view name);

struct ArtifactFragment {
    std::string slot;
    std::string config_json;
    std::string code;
};

struct ExperimentRecord {
    std::string id;
    std::map<std::string, std::string> components;  // data, model, evaluation, goal
    std::map<std::string, embed::Vector> component_embeddings;
    symlang::ExperimentPlan plan;
    std::optional<std::vector<ArtifactFragment>> implementation;
    std::optional<MetricVector> results;  // present iff status == Succeeded
    ExperimentStatus status = ExperimentStatus::Failed;
    std::int64_t created_at = 0;

    void check(std::size_t embedding_dim) const;
    Json to_json() const;
    static ExperimentRecord from_json(const Json& j);
};

struct LeaderboardRow {
    std::string experiment_id;
    double value = 0.0;
};

struct Leaderboard {
    std::string evaluation_setting;
    std::string metric;
    Direction direction = Direction::Maximize;
    std::vector<LeaderboardRow> rows;  // sorted best-first, ties by insertion
};

struct IdeaCandidate {
    symlang::PlanDelta delta;
    std::pair<std::string, std::string> source_pair;  // (worse, better) experiment ids
    double gap = 0.0;                                 // >= 0
    double novelty = 0.0;                             // in [0, 1]
    std::string evaluation_setting;
    std::string metric;
};

// ---------------------------------------------------------------------------
// Component predicates
// ---------------------------------------------------------------------------

enum class PredicateKind { EqualsTemplate, AllowedTemplates, ForbiddenTemplates, HasTag };
std::string to_string(PredicateKind k);
PredicateKind predicate_kind_from_string(std::string_view name);

/// A constraint over one experiment component (data/model/evaluation/goal).
/// HasTag matches template tags and, failing that, the rendered component
/// text (case-insensitive substring), which covers parameter-level wording
/// like "daily" or "A-share".
struct ComponentPredicate {
    std::string component;
    PredicateKind kind = PredicateKind::HasTag;
    std::vector<std::string> values;

    Json to_json() const;
    static ComponentPredicate from_json(const Json& j);
};

bool predicate_matches_plan(const ComponentPredicate& pred, const symlang::ExperimentPlan& plan,
                            const symlang::FrameworkSchema& schema);
bool predicate_matches_record(const ComponentPredicate& pred, const ExperimentRecord& record,
                              const symlang::FrameworkSchema* schema);

// ---------------------------------------------------------------------------
// Query results
// ---------------------------------------------------------------------------

struct Demonstration {
    std::string experiment_id;
    std::string slot;
    symlang::SlotPlan plan_fragment;
    ArtifactFragment artifact;
    double similarity = 0.0;
};

// ---------------------------------------------------------------------------
// Knowledge base
// ---------------------------------------------------------------------------

/// Append-only store of general knowledge and experiment records. Logs under
/// `dir/` are the source of truth; leaderboards and embedding indexes are
/// rebuilt on open. Concurrent readers, single serialized writer.
class KnowledgeBase {
public:
    struct Config {
        std::size_t embedding_dim = 256;
        std::string provider = "hash";
        std::map<std::string, Direction> metric_directions;
        kernels::ExecMode scan_mode = kernels::ExecMode::Parallel;
        double transfer_threshold = 0.8;  // cosine floor for cross-context delta transfer
        std::string schema_name;

        Json to_json() const;
        static Config from_json(const Json& j);
    };

    /// Opens (creating if absent) the store at `dir`. When the directory is
    /// new, `init` supplies the configuration; reopening validates that the
    /// provider dimension matches the stored configuration.
    static std::shared_ptr<KnowledgeBase> open(const std::string& dir,
                                               std::shared_ptr<embed::Provider> provider,
                                               std::optional<Config> init = std::nullopt,
                                               std::optional<symlang::FrameworkSchema> schema = std::nullopt);

    const Config& config() const { return config_; }
    const embed::Provider& provider() const { return *provider_; }
    const symlang::FrameworkSchema* schema() const { return schema_ ? &*schema_ : nullptr; }

    // -- general knowledge ---------------------------------------------------
    std::string put_knowledge(const KnowledgeItem& item);
    std::vector<StoredKnowledgeItem> query_general(std::string_view query, std::string_view category,
                                                   std::size_t k) const;

    // -- experiments ----------------------------------------------------------
    std::string add_experiment(const ExperimentRecord& record);
    std::vector<ExperimentRecord> query_experiments(std::string_view goal,
                                                    const std::vector<ComponentPredicate>& constraints,
                                                    std::size_t k) const;
    std::vector<IdeaCandidate> propose_idea_candidates(std::string_view goal,
                                                       const std::vector<ComponentPredicate>& constraints,
                                                       std::size_t k) const;
    std::vector<Demonstration> query_demonstrations(const symlang::SubTask& subtask,
                                                    std::size_t k) const;

    // -- introspection ---------------------------------------------------------
    std::size_t experiment_count() const;
    std::size_t knowledge_count() const;
    std::optional<ExperimentRecord> find_experiment(std::string_view id) const;
    std::vector<ExperimentRecord> experiments() const;  // insertion order
    std::optional<Leaderboard> leaderboard(std::string_view evaluation_setting,
                                           std::string_view metric) const;
    std::vector<Leaderboard> leaderboards() const;
    std::string next_experiment_id() const;

    embed::Vector embed(std::string_view text) const { return provider_->embed(text); }

private:
    KnowledgeBase() = default;
    void load_logs();
    void index_experiment_locked(const ExperimentRecord& record);
    std::vector<std::size_t> matching_indices_locked(const std::vector<ComponentPredicate>& constraints) const;

    std::string dir_;
    Config config_;
    std::shared_ptr<embed::Provider> provider_;
    std::optional<symlang::FrameworkSchema> schema_;

    std::vector<StoredKnowledgeItem> knowledge_;
    std::vector<ExperimentRecord> experiments_;
    std::vector<embed::Vector> goal_embeddings_;  // parallel to experiments_
    std::vector<embed::Vector> plan_embeddings_;  // rendered-plan embeddings
    std::map<std::pair<std::string, std::string>, Leaderboard> leaderboards_;

    mutable std::shared_mutex mutex_;
};

// ---------------------------------------------------------------------------
// Infrastructure query corpus
// ---------------------------------------------------------------------------

/// Documentation corpus chunked and embedded at ingest.
class DocCorpus {
public:
    struct Excerpt {
        std::string doc_id;
        std::string excerpt;
        double similarity = 0.0;
    };

    explicit DocCorpus(std::shared_ptr<embed::Provider> provider,
                       kernels::ExecMode mode = kernels::ExecMode::Parallel);

    void add_document(const std::string& doc_id, std::string_view text);
    static DocCorpus from_directory(const std::string& dir, std::shared_ptr<embed::Provider> provider,
                                    kernels::ExecMode mode = kernels::ExecMode::Parallel);

    std::vector<Excerpt> query(std::string_view query, std::size_t k) const;
    bool empty() const { return chunks_.empty(); }
    std::size_t chunk_count() const { return chunks_.size(); }

private:
    struct Chunk {
        std::string doc_id;
        std::string text;
    };
    std::shared_ptr<embed::Provider> provider_;
    kernels::ExecMode mode_;
    std::vector<Chunk> chunks_;
    std::vector<embed::Vector> embeddings_;
};

}  // namespace arda::knowledge
