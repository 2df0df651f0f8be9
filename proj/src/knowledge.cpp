#include "arda/knowledge.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "arda/error.hpp"
#include "arda/util.hpp"

namespace arda::knowledge {

namespace {

constexpr int kRecordVersion = 1;
constexpr double kUnitNormTolerance = 1e-9;

const std::vector<std::string> kComponentKeys = {"data", "model", "evaluation", "goal"};

Json embedding_to_json(const embed::Vector& v) { return Json(v); }

embed::Vector embedding_from_json(const Json& j) { return j.get<embed::Vector>(); }

std::optional<symlang::SlotKind> component_kind(std::string_view component) {
    if (component == "data") return symlang::SlotKind::Data;
    if (component == "model") return symlang::SlotKind::Model;
    if (component == "evaluation") return symlang::SlotKind::Evaluation;
    return std::nullopt;  // "goal" has no schema slot
}

bool contains_ci(std::string_view haystack, std::string_view needle) {
    const std::string h = util::to_lower(haystack);
    const std::string n = util::to_lower(needle);
    return h.find(n) != std::string::npos;
}

}  // namespace

std::string to_string(Direction d) { return d == Direction::Maximize ? "maximize" : "minimize"; }

Direction direction_from_string(std::string_view name) {
    if (name == "maximize") return Direction::Maximize;
    if (name == "minimize") return Direction::Minimize;
    throw ParseError("unknown metric direction '" + std::string(name) + "'");
}

std::string to_string(ExperimentStatus s) {
    return s == ExperimentStatus::Succeeded ? "succeeded" : "failed";
}

ExperimentStatus status_from_string(std::string_view name) {
    if (name == "succeeded") return ExperimentStatus::Succeeded;
    if (name == "failed") return ExperimentStatus::Failed;
    throw ParseError("unknown experiment status '" + std::string(name) + "'");
}

std::string to_string(PredicateKind k) {
    switch (k) {
        case PredicateKind::EqualsTemplate: return "equals_template";
        case PredicateKind::AllowedTemplates: return "allowed_templates";
        case PredicateKind::ForbiddenTemplates: return "forbidden_templates";
        case PredicateKind::HasTag: return "has_tag";
    }
    return "has_tag";
}

PredicateKind predicate_kind_from_string(std::string_view name) {
    if (name == "equals_template") return PredicateKind::EqualsTemplate;
    if (name == "allowed_templates") return PredicateKind::AllowedTemplates;
    if (name == "forbidden_templates") return PredicateKind::ForbiddenTemplates;
    if (name == "has_tag") return PredicateKind::HasTag;
    throw ParseError("unknown predicate kind '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// MetricVector
// ---------------------------------------------------------------------------

void MetricVector::check() const {
    for (const auto& [name, value] : entries) {
        if (!std::isfinite(value)) {
            throw Error("metric '" + name + "' is not finite");
        }
    }
}

std::optional<double> MetricVector::get(std::string_view metric) const {
    auto it = entries.find(std::string(metric));
    if (it == entries.end()) return std::nullopt;
    return it->second;
}

Json MetricVector::to_json() const {
    Json j;
    j["evaluation_setting"] = evaluation_setting;
    Json e = Json::object();
    for (const auto& [k, v] : entries) e[k] = v;
    j["entries"] = e;
    return j;
}

MetricVector MetricVector::from_json(const Json& j) {
    MetricVector mv;
    mv.evaluation_setting = j.value("evaluation_setting", "");
    if (j.contains("entries")) {
        for (const auto& [k, v] : j.at("entries").items()) mv.entries[k] = v.get<double>();
    }
    mv.check();
    return mv;
}

// ---------------------------------------------------------------------------
// ExperimentRecord
// ---------------------------------------------------------------------------

void ExperimentRecord::check(std::size_t embedding_dim) const {
    for (const auto& key : kComponentKeys) {
        if (components.find(key) == components.end()) {
            throw Error("experiment record missing component '" + key + "'");
        }
        auto it = component_embeddings.find(key);
        if (it == component_embeddings.end()) {
            throw Error("experiment record missing embedding for component '" + key + "'");
        }
        if (it->second.size() != embedding_dim) {
            throw Error("embedding dimension mismatch for component '" + key + "'");
        }
        if (std::abs(embed::l2_norm(it->second) - 1.0) > kUnitNormTolerance) {
            throw Error("component embedding for '" + key + "' is not unit length");
        }
    }
    const bool has_results = results.has_value() && !results->empty();
    if ((status == ExperimentStatus::Succeeded) != has_results) {
        throw Error("results must be non-empty exactly when status is succeeded");
    }
    if (results) results->check();
}

Json ExperimentRecord::to_json() const {
    Json j;
    j["record_version"] = kRecordVersion;
    j["id"] = id;
    Json comp = Json::object();
    for (const auto& [k, v] : components) comp[k] = v;
    j["components"] = comp;
    Json emb = Json::object();
    for (const auto& [k, v] : component_embeddings) emb[k] = embedding_to_json(v);
    j["component_embeddings"] = emb;
    j["plan"] = plan.to_json();
    if (implementation) {
        Json frags = Json::array();
        for (const auto& f : *implementation) {
            frags.push_back(Json{{"slot", f.slot}, {"config", f.config_json}, {"code", f.code}});
        }
        j["implementation"] = frags;
    } else {
        j["implementation"] = nullptr;
    }
    j["results"] = results ? results->to_json() : Json(nullptr);
    j["status"] = to_string(status);
    j["created_at"] = created_at;
    return j;
}

ExperimentRecord ExperimentRecord::from_json(const Json& j) {
    ExperimentRecord r;
    r.id = j.value("id", "");
    if (j.contains("components")) {
        for (const auto& [k, v] : j.at("components").items()) r.components[k] = v.get<std::string>();
    }
    if (j.contains("component_embeddings")) {
        for (const auto& [k, v] : j.at("component_embeddings").items()) {
            r.component_embeddings[k] = embedding_from_json(v);
        }
    }
    r.plan = symlang::ExperimentPlan::from_json(j.at("plan"));
    if (j.contains("implementation") && !j.at("implementation").is_null()) {
        std::vector<ArtifactFragment> frags;
        for (const auto& fj : j.at("implementation")) {
            frags.push_back({fj.value("slot", ""), fj.value("config", ""), fj.value("code", "")});
        }
        r.implementation = std::move(frags);
    }
    if (j.contains("results") && !j.at("results").is_null()) {
        r.results = MetricVector::from_json(j.at("results"));
    }
    r.status = status_from_string(j.value("status", "failed"));
    r.created_at = j.value("created_at", std::int64_t{0});
    return r;
}

// ---------------------------------------------------------------------------
// Predicates
// ---------------------------------------------------------------------------

Json ComponentPredicate::to_json() const {
    Json j;
    j["component"] = component;
    j["kind"] = to_string(kind);
    j["values"] = values;
    return j;
}

ComponentPredicate ComponentPredicate::from_json(const Json& j) {
    ComponentPredicate p;
    p.component = j.value("component", "");
    p.kind = predicate_kind_from_string(j.value("kind", "has_tag"));
    p.values = j.value("values", std::vector<std::string>{});
    return p;
}

namespace {

bool template_predicate_holds(const ComponentPredicate& pred, const std::string& template_name) {
    switch (pred.kind) {
        case PredicateKind::EqualsTemplate:
            return !pred.values.empty() && template_name == pred.values.front();
        case PredicateKind::AllowedTemplates:
            return std::find(pred.values.begin(), pred.values.end(), template_name) !=
                   pred.values.end();
        case PredicateKind::ForbiddenTemplates:
            return std::find(pred.values.begin(), pred.values.end(), template_name) ==
                   pred.values.end();
        case PredicateKind::HasTag:
            return true;  // handled separately
    }
    return true;
}

bool tag_predicate_holds(const ComponentPredicate& pred, const symlang::Template* tmpl,
                         std::string_view rendered_text) {
    for (const auto& wanted : pred.values) {
        const bool in_tags = tmpl != nullptr && tmpl->has_tag(wanted);
        if (!in_tags && !contains_ci(rendered_text, wanted)) return false;
    }
    return true;
}

}  // namespace

bool predicate_matches_plan(const ComponentPredicate& pred, const symlang::ExperimentPlan& plan,
                            const symlang::FrameworkSchema& schema) {
    const auto kind = component_kind(pred.component);
    if (!kind) return true;  // goal predicates do not constrain plans
    for (const auto* slot : schema.slots_of_kind(*kind)) {
        const symlang::SlotPlan* sp = plan.find_slot(slot->name);
        if (sp == nullptr) return false;
        if (pred.kind == PredicateKind::HasTag) {
            const symlang::Template* tmpl = slot->find_template(sp->template_name);
            if (!tag_predicate_holds(pred, tmpl, symlang::render_slot_plan(slot->name, *sp))) {
                return false;
            }
        } else if (!template_predicate_holds(pred, sp->template_name)) {
            return false;
        }
    }
    return true;
}

bool predicate_matches_record(const ComponentPredicate& pred, const ExperimentRecord& record,
                              const symlang::FrameworkSchema* schema) {
    auto comp_it = record.components.find(pred.component);
    const std::string component_text = comp_it == record.components.end() ? "" : comp_it->second;

    if (pred.kind == PredicateKind::HasTag) {
        const auto kind = component_kind(pred.component);
        const symlang::Template* tmpl = nullptr;
        std::string rendered = component_text;
        if (kind && schema != nullptr) {
            for (const auto* slot : schema->slots_of_kind(*kind)) {
                if (const auto* sp = record.plan.find_slot(slot->name)) {
                    tmpl = slot->find_template(sp->template_name);
                    rendered += " " + symlang::render_slot_plan(slot->name, *sp);
                }
            }
        }
        return tag_predicate_holds(pred, tmpl, rendered);
    }

    const auto kind = component_kind(pred.component);
    if (!kind) return true;  // template predicates never constrain the goal
    if (schema == nullptr) {
        throw Error("template predicates require the knowledge base to carry a schema");
    }
    for (const auto* slot : schema->slots_of_kind(*kind)) {
        const symlang::SlotPlan* sp = record.plan.find_slot(slot->name);
        if (sp == nullptr || !template_predicate_holds(pred, sp->template_name)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// KnowledgeBase config
// ---------------------------------------------------------------------------

Json KnowledgeBase::Config::to_json() const {
    Json j;
    j["record_version"] = kRecordVersion;
    j["embedding_dim"] = embedding_dim;
    j["provider"] = provider;
    Json dirs = Json::object();
    for (const auto& [metric, dir] : metric_directions) dirs[metric] = to_string(dir);
    j["metric_directions"] = dirs;
    j["scan_mode"] = kernels::to_string(scan_mode);
    j["transfer_threshold"] = transfer_threshold;
    j["schema_name"] = schema_name;
    return j;
}

KnowledgeBase::Config KnowledgeBase::Config::from_json(const Json& j) {
    Config c;
    c.embedding_dim = j.value("embedding_dim", std::size_t{256});
    c.provider = j.value("provider", "hash");
    if (j.contains("metric_directions")) {
        for (const auto& [k, v] : j.at("metric_directions").items()) {
            c.metric_directions[k] = direction_from_string(v.get<std::string>());
        }
    }
    c.scan_mode = kernels::exec_mode_from_string(j.value("scan_mode", "parallel"));
    c.transfer_threshold = j.value("transfer_threshold", 0.8);
    c.schema_name = j.value("schema_name", "");
    return c;
}

// ---------------------------------------------------------------------------
// KnowledgeBase
// ---------------------------------------------------------------------------

std::shared_ptr<KnowledgeBase> KnowledgeBase::open(const std::string& dir,
                                                   std::shared_ptr<embed::Provider> provider,
                                                   std::optional<Config> init,
                                                   std::optional<symlang::FrameworkSchema> schema) {
    auto kb = std::shared_ptr<KnowledgeBase>(new KnowledgeBase());
    kb->dir_ = dir;
    kb->provider_ = std::move(provider);
    kb->schema_ = std::move(schema);

    std::filesystem::create_directories(dir);
    const std::string config_path = dir + "/config";
    if (auto existing = util::try_read_file(config_path)) {
        try {
            kb->config_ = Config::from_json(Json::parse(*existing));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("knowledge base config: " + std::string(e.what()));
        }
    } else {
        kb->config_ = init.value_or(Config{});
        util::write_file(config_path, kb->config_.to_json().dump(2));
    }
    if (kb->provider_->dimension() != kb->config_.embedding_dim) {
        throw Error("embedding dimension mismatch: provider " +
                    std::to_string(kb->provider_->dimension()) + ", store " +
                    std::to_string(kb->config_.embedding_dim));
    }
    kb->load_logs();
    return kb;
}

void KnowledgeBase::load_logs() {
    const std::string kpath = dir_ + "/knowledge.log";
    if (auto content = util::try_read_file(kpath)) {
        std::istringstream in(*content);
        std::string line;
        while (std::getline(in, line)) {
            if (util::trim(line).empty()) continue;
            Json j = Json::parse(line);
            StoredKnowledgeItem stored;
            stored.id = j.value("id", "");
            stored.item.key = j.value("key", "");
            if (j.contains("value") && !j.at("value").is_null()) {
                stored.item.value = j.at("value").get<std::string>();
            }
            stored.item.category = j.value("category", "");
            stored.item.embedding = embedding_from_json(j.at("embedding"));
            stored.created_at = j.value("created_at", std::int64_t{0});
            knowledge_.push_back(std::move(stored));
        }
    }
    const std::string epath = dir_ + "/experiments.log";
    if (auto content = util::try_read_file(epath)) {
        std::istringstream in(*content);
        std::string line;
        while (std::getline(in, line)) {
            if (util::trim(line).empty()) continue;
            ExperimentRecord record = ExperimentRecord::from_json(Json::parse(line));
            record.check(config_.embedding_dim);
            index_experiment_locked(record);
            experiments_.push_back(std::move(record));
        }
    }
}

void KnowledgeBase::index_experiment_locked(const ExperimentRecord& record) {
    goal_embeddings_.push_back(record.component_embeddings.at("goal"));
    plan_embeddings_.push_back(provider_->embed(symlang::render_plan(record.plan)));
    if (record.status != ExperimentStatus::Succeeded || !record.results) return;
    for (const auto& [metric, value] : record.results->entries) {
        auto dir_it = config_.metric_directions.find(metric);
        if (dir_it == config_.metric_directions.end()) continue;  // undeclared metrics stay off boards
        const auto key = std::make_pair(record.results->evaluation_setting, metric);
        auto& board = leaderboards_[key];
        board.evaluation_setting = record.results->evaluation_setting;
        board.metric = metric;
        board.direction = dir_it->second;
        board.rows.push_back({record.id, value});
        const bool maximize = board.direction == Direction::Maximize;
        std::stable_sort(board.rows.begin(), board.rows.end(),
                         [maximize](const LeaderboardRow& a, const LeaderboardRow& b) {
                             return maximize ? a.value > b.value : a.value < b.value;
                         });
    }
}

std::string KnowledgeBase::put_knowledge(const KnowledgeItem& item) {
    std::unique_lock lock(mutex_);
    if (item.category.empty()) throw Error("knowledge item category must be non-empty");
    if (item.embedding.size() != config_.embedding_dim) {
        throw Error("embedding dimension mismatch: item " + std::to_string(item.embedding.size()) +
                    ", store " + std::to_string(config_.embedding_dim));
    }
    if (std::abs(embed::l2_norm(item.embedding) - 1.0) > kUnitNormTolerance) {
        throw Error("knowledge item embedding is not unit length");
    }
    StoredKnowledgeItem stored;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "kn-%06zu", knowledge_.size() + 1);
    stored.id = buf;
    stored.item = item;
    stored.created_at = static_cast<std::int64_t>(knowledge_.size());

    Json j;
    j["record_version"] = kRecordVersion;
    j["id"] = stored.id;
    j["key"] = item.key;
    j["value"] = item.value ? Json(*item.value) : Json(nullptr);
    j["category"] = item.category;
    j["embedding"] = embedding_to_json(item.embedding);
    j["created_at"] = stored.created_at;
    util::append_line(dir_ + "/knowledge.log", j.dump());

    knowledge_.push_back(stored);
    return knowledge_.back().id;
}

std::vector<StoredKnowledgeItem> KnowledgeBase::query_general(std::string_view query,
                                                              std::string_view category,
                                                              std::size_t k) const {
    if (k < 1) throw Error("query_general: k must be >= 1");
    std::shared_lock lock(mutex_);
    std::vector<std::size_t> candidates;
    std::vector<embed::Vector> vectors;
    for (std::size_t i = 0; i < knowledge_.size(); ++i) {
        if (knowledge_[i].item.category == category) {
            candidates.push_back(i);
            vectors.push_back(knowledge_[i].item.embedding);
        }
    }
    if (candidates.empty()) return {};
    const auto query_vec = provider_->embed(query);
    const auto scores = kernels::cosine_scan(query_vec, vectors, config_.scan_mode);
    const auto picked = kernels::top_k(scores, k);
    std::vector<StoredKnowledgeItem> out;
    out.reserve(picked.size());
    for (const auto& s : picked) out.push_back(knowledge_[candidates[s.index]]);
    return out;
}

std::string KnowledgeBase::next_experiment_id() const {
    std::shared_lock lock(mutex_);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "exp-%06zu", experiments_.size() + 1);
    return buf;
}

std::string KnowledgeBase::add_experiment(const ExperimentRecord& record) {
    std::unique_lock lock(mutex_);
    ExperimentRecord stored = record;
    if (stored.id.empty()) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "exp-%06zu", experiments_.size() + 1);
        stored.id = buf;
    }
    for (const auto& existing : experiments_) {
        if (existing.id == stored.id) throw Error("duplicate experiment id '" + stored.id + "'");
    }
    stored.check(config_.embedding_dim);
    util::append_line(dir_ + "/experiments.log", stored.to_json().dump());
    index_experiment_locked(stored);
    experiments_.push_back(stored);
    return experiments_.back().id;
}

std::vector<std::size_t> KnowledgeBase::matching_indices_locked(
    const std::vector<ComponentPredicate>& constraints) const {
    std::vector<std::size_t> out;
    const symlang::FrameworkSchema* schema = schema_ ? &*schema_ : nullptr;
    for (std::size_t i = 0; i < experiments_.size(); ++i) {
        const bool ok = std::all_of(constraints.begin(), constraints.end(),
                                    [&](const ComponentPredicate& pred) {
                                        return predicate_matches_record(pred, experiments_[i], schema);
                                    });
        if (ok) out.push_back(i);
    }
    return out;
}

std::vector<ExperimentRecord> KnowledgeBase::query_experiments(
    std::string_view goal, const std::vector<ComponentPredicate>& constraints, std::size_t k) const {
    if (k < 1) throw Error("query_experiments: k must be >= 1");
    std::shared_lock lock(mutex_);
    const auto indices = matching_indices_locked(constraints);
    if (indices.empty()) return {};
    std::vector<embed::Vector> vectors;
    vectors.reserve(indices.size());
    for (auto i : indices) vectors.push_back(goal_embeddings_[i]);
    const auto query_vec = provider_->embed(goal);
    const auto scores = kernels::cosine_scan(query_vec, vectors, config_.scan_mode);
    const auto picked = kernels::top_k(scores, k);
    std::vector<ExperimentRecord> out;
    out.reserve(picked.size());
    for (const auto& s : picked) out.push_back(experiments_[indices[s.index]]);
    return out;
}

std::vector<IdeaCandidate> KnowledgeBase::propose_idea_candidates(
    std::string_view /*goal*/, const std::vector<ComponentPredicate>& constraints,
    std::size_t k) const {
    if (k < 1) throw Error("propose_idea_candidates: k must be >= 1");
    std::shared_lock lock(mutex_);
    const auto indices = matching_indices_locked(constraints);
    if (indices.size() < 2) return {};
    const std::set<std::string> matching_ids = [&] {
        std::set<std::string> ids;
        for (auto i : indices) ids.insert(experiments_[i].id);
        return ids;
    }();

    std::map<std::string, std::size_t> index_by_id;
    for (std::size_t i = 0; i < experiments_.size(); ++i) index_by_id[experiments_[i].id] = i;

    std::vector<IdeaCandidate> candidates;
    for (const auto& [key, board] : leaderboards_) {
        std::vector<const LeaderboardRow*> rows;
        for (const auto& row : board.rows) {
            if (matching_ids.count(row.experiment_id)) rows.push_back(&row);
        }
        for (std::size_t a = 0; a < rows.size(); ++a) {
            for (std::size_t b = a + 1; b < rows.size(); ++b) {
                const auto& ra = experiments_[index_by_id[rows[a]->experiment_id]];
                const auto& rb = experiments_[index_by_id[rows[b]->experiment_id]];
                if (ra.plan.schema_name != rb.plan.schema_name) continue;
                const bool maximize = board.direction == Direction::Maximize;
                const double va = rows[a]->value;
                const double vb = rows[b]->value;
                const bool a_better = maximize ? va >= vb : va <= vb;
                const auto& worse = a_better ? rb : ra;
                const auto& better = a_better ? ra : rb;
                IdeaCandidate cand;
                cand.delta = symlang::diff_plans(worse.plan, better.plan);
                if (cand.delta.empty()) continue;  // identical plans carry no idea
                cand.source_pair = {worse.id, better.id};
                cand.gap = std::abs(va - vb);
                cand.evaluation_setting = board.evaluation_setting;
                cand.metric = board.metric;
                const auto delta_vec = provider_->embed(symlang::render_delta(cand.delta));
                const auto sims = kernels::cosine_scan(delta_vec, plan_embeddings_, config_.scan_mode);
                double max_sim = -1.0;
                for (double s : sims) max_sim = std::max(max_sim, s);
                cand.novelty = std::clamp(1.0 - max_sim, 0.0, 1.0);
                candidates.push_back(std::move(cand));
            }
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const IdeaCandidate& x, const IdeaCandidate& y) {
                         if (x.gap != y.gap) return x.gap > y.gap;
                         if (x.novelty != y.novelty) return x.novelty > y.novelty;
                         return x.source_pair < y.source_pair;
                     });
    if (candidates.size() > k) candidates.resize(k);
    return candidates;
}

std::vector<Demonstration> KnowledgeBase::query_demonstrations(const symlang::SubTask& subtask,
                                                               std::size_t k) const {
    if (k < 1) throw Error("query_demonstrations: k must be >= 1");
    std::shared_lock lock(mutex_);

    const std::string component = to_string(subtask.kind);
    std::vector<Demonstration> found;
    std::vector<embed::Vector> vectors;
    for (const auto& record : experiments_) {
        if (record.status != ExperimentStatus::Succeeded || !record.implementation) continue;
        // Match by schema slot kind; without a schema fall back to slot name.
        std::string slot_name = subtask.slot;
        if (schema_) {
            const auto slots = schema_->slots_of_kind(subtask.kind);
            bool matched = false;
            for (const auto* slot : slots) {
                if (record.plan.find_slot(slot->name) != nullptr) {
                    slot_name = slot->name;
                    matched = true;
                    break;
                }
            }
            if (!matched) continue;
        } else if (record.plan.find_slot(slot_name) == nullptr) {
            continue;
        }
        const ArtifactFragment* fragment = nullptr;
        for (const auto& f : *record.implementation) {
            if (f.slot == slot_name) {
                fragment = &f;
                break;
            }
        }
        if (fragment == nullptr) continue;
        auto emb_it = record.component_embeddings.find(component);
        if (emb_it == record.component_embeddings.end()) continue;
        Demonstration demo;
        demo.experiment_id = record.id;
        demo.slot = slot_name;
        demo.plan_fragment = *record.plan.find_slot(slot_name);
        demo.artifact = *fragment;
        found.push_back(std::move(demo));
        vectors.push_back(emb_it->second);
    }
    if (found.empty()) return {};
    const auto query_vec = provider_->embed(symlang::render_slot_plan(subtask.slot, subtask.plan));
    const auto scores = kernels::cosine_scan(query_vec, vectors, config_.scan_mode);
    const auto picked = kernels::top_k(scores, k);
    std::vector<Demonstration> out;
    out.reserve(picked.size());
    for (const auto& s : picked) {
        auto demo = found[s.index];
        demo.similarity = s.score;
        out.push_back(std::move(demo));
    }
    return out;
}

std::size_t KnowledgeBase::experiment_count() const {
    std::shared_lock lock(mutex_);
    return experiments_.size();
}

std::size_t KnowledgeBase::knowledge_count() const {
    std::shared_lock lock(mutex_);
    return knowledge_.size();
}

std::optional<ExperimentRecord> KnowledgeBase::find_experiment(std::string_view id) const {
    std::shared_lock lock(mutex_);
    for (const auto& record : experiments_) {
        if (record.id == id) return record;
    }
    return std::nullopt;
}

std::vector<ExperimentRecord> KnowledgeBase::experiments() const {
    std::shared_lock lock(mutex_);
    return experiments_;
}

std::optional<Leaderboard> KnowledgeBase::leaderboard(std::string_view evaluation_setting,
                                                      std::string_view metric) const {
    std::shared_lock lock(mutex_);
    auto it = leaderboards_.find({std::string(evaluation_setting), std::string(metric)});
    if (it == leaderboards_.end()) return std::nullopt;
    return it->second;
}

std::vector<Leaderboard> KnowledgeBase::leaderboards() const {
    std::shared_lock lock(mutex_);
    std::vector<Leaderboard> out;
    out.reserve(leaderboards_.size());
    for (const auto& [_, board] : leaderboards_) out.push_back(board);
    return out;
}

// ---------------------------------------------------------------------------
// DocCorpus
// ---------------------------------------------------------------------------

DocCorpus::DocCorpus(std::shared_ptr<embed::Provider> provider, kernels::ExecMode mode)
    : provider_(std::move(provider)), mode_(mode) {}

void DocCorpus::add_document(const std::string& doc_id, std::string_view text) {
    // Chunk on blank lines, merging consecutive paragraphs up to ~400 chars.
    std::vector<std::string> paragraphs;
    std::string current;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (util::trim(line).empty()) {
            if (!current.empty()) {
                paragraphs.push_back(current);
                current.clear();
            }
        } else {
            if (!current.empty()) current += "\n";
            current += line;
        }
    }
    if (!current.empty()) paragraphs.push_back(current);

    std::string chunk;
    auto flush = [&] {
        if (chunk.empty()) return;
        chunks_.push_back({doc_id, chunk});
        embeddings_.push_back(provider_->embed(chunk));
        chunk.clear();
    };
    for (const auto& para : paragraphs) {
        if (!chunk.empty() && chunk.size() + para.size() > 400) flush();
        if (!chunk.empty()) chunk += "\n\n";
        chunk += para;
    }
    flush();
}

DocCorpus DocCorpus::from_directory(const std::string& dir, std::shared_ptr<embed::Provider> provider,
                                    kernels::ExecMode mode) {
    DocCorpus corpus(std::move(provider), mode);
    std::vector<std::filesystem::path> paths;
    if (std::filesystem::exists(dir)) {
        for (const auto& entry : std::filesystem::directory_iterator(dir)) {
            if (entry.is_regular_file()) paths.push_back(entry.path());
        }
    }
    std::sort(paths.begin(), paths.end());
    for (const auto& path : paths) {
        corpus.add_document(path.filename().string(), util::read_file(path.string()));
    }
    return corpus;
}

std::vector<DocCorpus::Excerpt> DocCorpus::query(std::string_view query, std::size_t k) const {
    if (k < 1) throw Error("query_infrastructure: k must be >= 1");
    if (chunks_.empty()) return {};
    const auto query_vec = provider_->embed(query);
    const auto scores = kernels::cosine_scan(query_vec, embeddings_, mode_);
    const auto picked = kernels::top_k(scores, k);
    std::vector<Excerpt> out;
    out.reserve(picked.size());
    for (const auto& s : picked) {
        out.push_back({chunks_[s.index].doc_id, chunks_[s.index].text, s.score});
    }
    return out;
}

}  // namespace arda::knowledge
