#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace arda::symlang {

using Json = nlohmann::ordered_json;

enum class SlotKind { Data, Model, Evaluation };
std::string to_string(SlotKind kind);
SlotKind slot_kind_from_string(std::string_view name);

// ---------------------------------------------------------------------------
// Parameter value domains
// ---------------------------------------------------------------------------

struct RealRange {
    double min = 0.0;
    double max = 0.0;
    bool min_inclusive = true;
    bool max_inclusive = true;
    bool contains(double v) const;
};

struct IntRange {
    long long min = 0;
    long long max = 0;
    bool contains(long long v) const;
};

struct Categorical {
    std::vector<std::string> values;
    bool contains(std::string_view v) const;
};

struct FreeText {};

using Domain = std::variant<RealRange, IntRange, Categorical, FreeText>;
std::string domain_to_string(const Domain& d);

/// A parameter assignment value. Integers and reals are kept distinct so
/// integer-range domains stay exact.
using Value = std::variant<long long, double, std::string, bool>;
std::string value_to_string(const Value& v);
bool values_equal(const Value& a, const Value& b);
bool domain_contains(const Domain& d, const Value& v);

// ---------------------------------------------------------------------------
// Schema
// ---------------------------------------------------------------------------

struct Parameter {
    std::string name;
    Domain domain = FreeText{};
};

struct Template {
    std::string name;
    std::vector<Parameter> parameters;
    std::map<std::string, Value> defaults;
    std::string doc;
    std::vector<std::string> tags;

    const Parameter* find_parameter(std::string_view pname) const;
    bool has_tag(std::string_view tag) const;
};

struct ModuleSlot {
    std::string name;
    SlotKind kind = SlotKind::Data;
    std::vector<Template> templates;
    std::string extension_interface;

    const Template* find_template(std::string_view tname) const;
};

/// The declared symbolic language of a framework: named, typed slots with
/// their templates and extension contracts. Immutable after construction.
class FrameworkSchema {
public:
    static FrameworkSchema from_json(const Json& doc);
    static FrameworkSchema load(const std::string& path);
    Json to_json() const;

    const std::string& name() const { return name_; }
    const std::string& version() const { return version_; }
    const std::vector<ModuleSlot>& slots() const { return slots_; }

    const ModuleSlot* find_slot(std::string_view slot_name) const;
    std::vector<const ModuleSlot*> slots_of_kind(SlotKind kind) const;
    /// First slot of the given kind (every kind is guaranteed present).
    const ModuleSlot& slot_of_kind(SlotKind kind) const;

private:
    FrameworkSchema() = default;
    void check_invariants() const;

    std::string name_;
    std::string version_;
    std::vector<ModuleSlot> slots_;
};

// ---------------------------------------------------------------------------
// Plans
// ---------------------------------------------------------------------------

struct SlotPlan {
    std::string template_name;
    std::map<std::string, Value> parameters;
    std::optional<std::string> extension;  // free-text extension spec

    bool operator==(const SlotPlan& other) const;
};

struct ExperimentPlan {
    std::string schema_name;
    std::string hypothesis;
    std::string target_slot;
    std::vector<std::string> controls;
    std::map<std::string, SlotPlan> slots;  // keyed by slot name

    static ExperimentPlan from_json(const Json& doc);
    static ExperimentPlan load(const std::string& path);
    Json to_json() const;

    const SlotPlan* find_slot(std::string_view slot_name) const;
    bool operator==(const ExperimentPlan& other) const;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct Violation {
    std::string slot;
    std::string rule;
    std::string message;
};

struct ExtensionFlag {
    std::string slot;
    std::string note;
};

struct ValidationReport {
    bool valid = false;
    std::vector<Violation> violations;
    /// Non-fatal notes: extension specs and extension parameters cannot be
    /// checked statically but do not invalidate a plan.
    std::vector<ExtensionFlag> flags;
};

ValidationReport validate_plan(const ExperimentPlan& plan, const FrameworkSchema& schema);

// ---------------------------------------------------------------------------
// Decomposition
// ---------------------------------------------------------------------------

enum class SubTaskRole { Target, Control };
std::string to_string(SubTaskRole role);

struct SubTask {
    std::string slot;
    SlotKind kind = SlotKind::Data;
    std::string extension_interface;
    SlotPlan plan;
    SubTaskRole role = SubTaskRole::Control;
};

/// One subtask per schema slot, in schema declaration order. Throws if the
/// plan does not validate.
std::vector<SubTask> decompose(const ExperimentPlan& plan, const FrameworkSchema& schema);

// ---------------------------------------------------------------------------
// Diffing
// ---------------------------------------------------------------------------

struct SlotChange {
    std::string slot;
    SlotPlan before;
    SlotPlan after;
};

struct PlanDelta {
    std::vector<SlotChange> changed_slots;
    std::vector<std::string> unchanged_slots;
    bool empty() const { return changed_slots.empty(); }
};

/// Slot-wise difference between two plans on the same schema. Throws on
/// schema mismatch.
PlanDelta diff_plans(const ExperimentPlan& a, const ExperimentPlan& b);

// ---------------------------------------------------------------------------
// Canonical text renderings (used for embeddings and novelty scoring)
// ---------------------------------------------------------------------------

std::string render_slot_plan(std::string_view slot_name, const SlotPlan& plan);
std::string render_plan(const ExperimentPlan& plan);
std::string render_delta(const PlanDelta& delta);

}  // namespace arda::symlang
