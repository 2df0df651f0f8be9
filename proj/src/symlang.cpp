#include "arda/symlang.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "arda/error.hpp"
#include "arda/util.hpp"

namespace arda::symlang {

namespace {

constexpr int kSchemaDocVersion = 1;

[[noreturn]] void fail(const std::string& location, const std::string& message) {
    throw ParseError(location + ": " + message);
}

Value value_from_json(const Json& j, const std::string& location) {
    if (j.is_boolean()) return j.get<bool>();
    if (j.is_number_integer()) return j.get<long long>();
    if (j.is_number_float()) return j.get<double>();
    if (j.is_string()) return j.get<std::string>();
    fail(location, "parameter values must be scalars");
}

Json value_to_json(const Value& v) {
    return std::visit([](const auto& x) { return Json(x); }, v);
}

Domain domain_from_json(const Json& j, const std::string& location) {
    if (j.is_null()) return FreeText{};
    const std::string type = j.value("type", "");
    if (type == "real_range") {
        RealRange r;
        r.min = j.at("min").get<double>();
        r.max = j.at("max").get<double>();
        r.min_inclusive = j.value("min_inclusive", true);
        r.max_inclusive = j.value("max_inclusive", true);
        return r;
    }
    if (type == "integer_range") {
        IntRange r;
        r.min = j.at("min").get<long long>();
        r.max = j.at("max").get<long long>();
        return r;
    }
    if (type == "categorical") {
        Categorical c;
        c.values = j.at("values").get<std::vector<std::string>>();
        if (c.values.empty()) fail(location, "categorical domain needs at least one value");
        return c;
    }
    if (type == "free_text") return FreeText{};
    fail(location, "unknown domain type '" + type + "'");
}

Json domain_to_json(const Domain& d) {
    Json j;
    if (const auto* r = std::get_if<RealRange>(&d)) {
        j["type"] = "real_range";
        j["min"] = r->min;
        j["max"] = r->max;
        j["min_inclusive"] = r->min_inclusive;
        j["max_inclusive"] = r->max_inclusive;
    } else if (const auto* i = std::get_if<IntRange>(&d)) {
        j["type"] = "integer_range";
        j["min"] = i->min;
        j["max"] = i->max;
    } else if (const auto* c = std::get_if<Categorical>(&d)) {
        j["type"] = "categorical";
        j["values"] = c->values;
    } else {
        j["type"] = "free_text";
    }
    return j;
}

}  // namespace

std::string to_string(SlotKind kind) {
    switch (kind) {
        case SlotKind::Data: return "data";
        case SlotKind::Model: return "model";
        case SlotKind::Evaluation: return "evaluation";
    }
    return "data";
}

SlotKind slot_kind_from_string(std::string_view name) {
    if (name == "data") return SlotKind::Data;
    if (name == "model") return SlotKind::Model;
    if (name == "evaluation") return SlotKind::Evaluation;
    throw ParseError("unknown slot kind '" + std::string(name) + "'");
}

bool RealRange::contains(double v) const {
    if (std::isnan(v)) return false;
    const bool above = min_inclusive ? v >= min : v > min;
    const bool below = max_inclusive ? v <= max : v < max;
    return above && below;
}

bool IntRange::contains(long long v) const { return v >= min && v <= max; }

bool Categorical::contains(std::string_view v) const {
    return std::find(values.begin(), values.end(), v) != values.end();
}

std::string domain_to_string(const Domain& d) {
    if (const auto* r = std::get_if<RealRange>(&d)) {
        std::ostringstream ss;
        ss << (r->min_inclusive ? '[' : '(') << r->min << ", " << r->max
           << (r->max_inclusive ? ']' : ')');
        return ss.str();
    }
    if (const auto* i = std::get_if<IntRange>(&d)) {
        std::ostringstream ss;
        ss << "[" << i->min << ", " << i->max << "] integer";
        return ss.str();
    }
    if (const auto* c = std::get_if<Categorical>(&d)) {
        return "{" + util::join(c->values, ", ") + "}";
    }
    return "free-text";
}

std::string value_to_string(const Value& v) {
    if (const auto* i = std::get_if<long long>(&v)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&v)) {
        Json j = *d;  // shortest round-trip formatting
        return j.dump();
    }
    if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
    return std::get<std::string>(v);
}

bool values_equal(const Value& a, const Value& b) {
    // Integer/real cross-comparisons count as equal when numerically equal,
    // so a JSON round trip of 1.0 vs 1 cannot flip a diff.
    const auto as_number = [](const Value& v) -> std::optional<double> {
        if (const auto* i = std::get_if<long long>(&v)) return static_cast<double>(*i);
        if (const auto* d = std::get_if<double>(&v)) return *d;
        return std::nullopt;
    };
    const auto na = as_number(a);
    const auto nb = as_number(b);
    if (na && nb) return *na == *nb;
    return a == b;
}

bool domain_contains(const Domain& d, const Value& v) {
    if (std::holds_alternative<FreeText>(d)) return true;
    if (const auto* r = std::get_if<RealRange>(&d)) {
        if (const auto* i = std::get_if<long long>(&v)) return r->contains(static_cast<double>(*i));
        if (const auto* x = std::get_if<double>(&v)) return r->contains(*x);
        return false;
    }
    if (const auto* ir = std::get_if<IntRange>(&d)) {
        if (const auto* i = std::get_if<long long>(&v)) return ir->contains(*i);
        if (const auto* x = std::get_if<double>(&v)) {
            return *x == std::floor(*x) && ir->contains(static_cast<long long>(*x));
        }
        return false;
    }
    const auto& c = std::get<Categorical>(d);
    if (const auto* s = std::get_if<std::string>(&v)) return c.contains(*s);
    return c.contains(value_to_string(v));
}

const Parameter* Template::find_parameter(std::string_view pname) const {
    for (const auto& p : parameters) {
        if (p.name == pname) return &p;
    }
    return nullptr;
}

bool Template::has_tag(std::string_view tag) const {
    return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

const Template* ModuleSlot::find_template(std::string_view tname) const {
    for (const auto& t : templates) {
        if (t.name == tname) return &t;
    }
    return nullptr;
}

// ---------------------------------------------------------------------------
// Schema parsing
// ---------------------------------------------------------------------------

FrameworkSchema FrameworkSchema::from_json(const Json& doc) {
    if (!doc.is_object()) throw ParseError("schema: document must be an object");
    if (doc.value("schema_version", 0) != kSchemaDocVersion) {
        throw ParseError("schema: unsupported schema_version");
    }
    FrameworkSchema schema;
    schema.name_ = doc.value("name", "");
    schema.version_ = doc.value("version", "");
    if (schema.name_.empty()) fail("schema", "missing name");

    if (!doc.contains("slots") || !doc.at("slots").is_array()) {
        fail("schema", "missing kind coverage: no slots declared");
    }
    std::size_t slot_index = 0;
    for (const auto& sj : doc.at("slots")) {
        const std::string loc = "slots[" + std::to_string(slot_index) + "]";
        ModuleSlot slot;
        slot.name = sj.value("name", "");
        if (slot.name.empty()) fail(loc, "missing slot name");
        slot.kind = slot_kind_from_string(sj.value("kind", ""));
        slot.extension_interface = sj.value("extension_interface", "");
        if (!sj.contains("templates") || !sj.at("templates").is_array() || sj.at("templates").empty()) {
            fail(loc, "slot '" + slot.name + "' declares no templates");
        }
        std::size_t template_index = 0;
        for (const auto& tj : sj.at("templates")) {
            const std::string tloc = loc + ".templates[" + std::to_string(template_index) + "]";
            Template tmpl;
            tmpl.name = tj.value("name", "");
            if (tmpl.name.empty()) fail(tloc, "missing template name");
            tmpl.doc = tj.value("doc", "");
            if (tj.contains("tags")) tmpl.tags = tj.at("tags").get<std::vector<std::string>>();
            if (tj.contains("parameters")) {
                for (const auto& pj : tj.at("parameters")) {
                    Parameter p;
                    p.name = pj.value("name", "");
                    if (p.name.empty()) fail(tloc, "parameter without a name");
                    // Omitted domains default to free-text.
                    p.domain = pj.contains("domain") ? domain_from_json(pj.at("domain"), tloc)
                                                     : Domain{FreeText{}};
                    tmpl.parameters.push_back(std::move(p));
                }
            }
            if (tj.contains("defaults")) {
                for (const auto& [key, vj] : tj.at("defaults").items()) {
                    tmpl.defaults[key] = value_from_json(vj, tloc + ".defaults." + key);
                }
            }
            slot.templates.push_back(std::move(tmpl));
            ++template_index;
        }
        schema.slots_.push_back(std::move(slot));
        ++slot_index;
    }
    schema.check_invariants();
    return schema;
}

void FrameworkSchema::check_invariants() const {
    std::set<std::string> names;
    for (const auto& slot : slots_) {
        if (!names.insert(slot.name).second) {
            throw ParseError("schema slot '" + slot.name + "': duplicate slot name");
        }
        std::set<std::string> template_names;
        for (const auto& tmpl : slot.templates) {
            const std::string loc = "schema slot '" + slot.name + "' template '" + tmpl.name + "'";
            if (!template_names.insert(tmpl.name).second) {
                throw ParseError(loc + ": duplicate template name");
            }
            for (const auto& [pname, value] : tmpl.defaults) {
                const Parameter* param = tmpl.find_parameter(pname);
                if (param == nullptr) {
                    throw ParseError(loc + ": default references unknown parameter '" + pname + "'");
                }
                if (!domain_contains(param->domain, value)) {
                    throw ParseError(loc + ": default for '" + pname + "' outside domain " +
                                     domain_to_string(param->domain));
                }
            }
        }
    }
    for (SlotKind kind : {SlotKind::Data, SlotKind::Model, SlotKind::Evaluation}) {
        const bool covered = std::any_of(slots_.begin(), slots_.end(),
                                         [kind](const ModuleSlot& s) { return s.kind == kind; });
        if (!covered) {
            throw ParseError("schema '" + name_ + "': missing kind coverage: no slot of kind '" +
                             to_string(kind) + "'");
        }
    }
}

FrameworkSchema FrameworkSchema::load(const std::string& path) {
    Json doc;
    try {
        doc = Json::parse(util::read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("schema file " + path + ": " + e.what());
    }
    return from_json(doc);
}

Json FrameworkSchema::to_json() const {
    Json doc;
    doc["schema_version"] = kSchemaDocVersion;
    doc["name"] = name_;
    doc["version"] = version_;
    doc["slots"] = Json::array();
    for (const auto& slot : slots_) {
        Json sj;
        sj["name"] = slot.name;
        sj["kind"] = to_string(slot.kind);
        sj["extension_interface"] = slot.extension_interface;
        sj["templates"] = Json::array();
        for (const auto& tmpl : slot.templates) {
            Json tj;
            tj["name"] = tmpl.name;
            tj["doc"] = tmpl.doc;
            tj["tags"] = tmpl.tags;
            tj["parameters"] = Json::array();
            for (const auto& p : tmpl.parameters) {
                Json pj;
                pj["name"] = p.name;
                pj["domain"] = domain_to_json(p.domain);
                tj["parameters"].push_back(pj);
            }
            Json defaults = Json::object();
            for (const auto& [k, v] : tmpl.defaults) defaults[k] = value_to_json(v);
            tj["defaults"] = defaults;
            sj["templates"].push_back(tj);
        }
        doc["slots"].push_back(sj);
    }
    return doc;
}

const ModuleSlot* FrameworkSchema::find_slot(std::string_view slot_name) const {
    for (const auto& slot : slots_) {
        if (slot.name == slot_name) return &slot;
    }
    return nullptr;
}

std::vector<const ModuleSlot*> FrameworkSchema::slots_of_kind(SlotKind kind) const {
    std::vector<const ModuleSlot*> out;
    for (const auto& slot : slots_) {
        if (slot.kind == kind) out.push_back(&slot);
    }
    return out;
}

const ModuleSlot& FrameworkSchema::slot_of_kind(SlotKind kind) const {
    for (const auto& slot : slots_) {
        if (slot.kind == kind) return slot;
    }
    throw Error("schema '" + name_ + "' has no slot of kind " + to_string(kind));
}

// ---------------------------------------------------------------------------
// Plans
// ---------------------------------------------------------------------------

bool SlotPlan::operator==(const SlotPlan& other) const {
    if (template_name != other.template_name) return false;
    if (extension != other.extension) return false;
    if (parameters.size() != other.parameters.size()) return false;
    for (const auto& [k, v] : parameters) {
        auto it = other.parameters.find(k);
        if (it == other.parameters.end() || !values_equal(v, it->second)) return false;
    }
    return true;
}

ExperimentPlan ExperimentPlan::from_json(const Json& doc) {
    if (!doc.is_object()) throw ParseError("plan: document must be an object");
    if (doc.value("schema_version", 0) != kSchemaDocVersion) {
        throw ParseError("plan: unsupported schema_version");
    }
    ExperimentPlan plan;
    plan.schema_name = doc.value("schema", "");
    plan.hypothesis = doc.value("hypothesis", "");
    plan.target_slot = doc.value("target_slot", "");
    if (doc.contains("controls")) plan.controls = doc.at("controls").get<std::vector<std::string>>();
    if (doc.contains("slots")) {
        for (const auto& [slot_name, sj] : doc.at("slots").items()) {
            SlotPlan sp;
            sp.template_name = sj.value("template", "");
            if (sj.contains("parameters")) {
                for (const auto& [k, vj] : sj.at("parameters").items()) {
                    sp.parameters[k] = value_from_json(vj, "plan slot '" + slot_name + "' parameter " + k);
                }
            }
            if (sj.contains("extension") && !sj.at("extension").is_null()) {
                sp.extension = sj.at("extension").get<std::string>();
            }
            plan.slots[slot_name] = std::move(sp);
        }
    }
    return plan;
}

ExperimentPlan ExperimentPlan::load(const std::string& path) {
    Json doc;
    try {
        doc = Json::parse(util::read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("plan file " + path + ": " + e.what());
    }
    return from_json(doc);
}

Json ExperimentPlan::to_json() const {
    Json doc;
    doc["schema_version"] = kSchemaDocVersion;
    doc["schema"] = schema_name;
    doc["hypothesis"] = hypothesis;
    doc["target_slot"] = target_slot;
    doc["controls"] = controls;
    Json slots_json = Json::object();
    for (const auto& [slot_name, sp] : slots) {
        Json sj;
        sj["template"] = sp.template_name;
        Json params = Json::object();
        for (const auto& [k, v] : sp.parameters) params[k] = value_to_json(v);
        sj["parameters"] = params;
        sj["extension"] = sp.extension ? Json(*sp.extension) : Json(nullptr);
        slots_json[slot_name] = sj;
    }
    doc["slots"] = slots_json;
    return doc;
}

const SlotPlan* ExperimentPlan::find_slot(std::string_view slot_name) const {
    auto it = slots.find(std::string(slot_name));
    return it == slots.end() ? nullptr : &it->second;
}

bool ExperimentPlan::operator==(const ExperimentPlan& other) const {
    return schema_name == other.schema_name && hypothesis == other.hypothesis &&
           target_slot == other.target_slot && controls == other.controls && slots == other.slots;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

ValidationReport validate_plan(const ExperimentPlan& plan, const FrameworkSchema& schema) {
    ValidationReport report;
    auto violation = [&report](const std::string& slot, const std::string& rule,
                               const std::string& message) {
        report.violations.push_back({slot, rule, message});
    };

    if (plan.schema_name != schema.name()) {
        violation("", "schema_mismatch",
                  "plan targets schema '" + plan.schema_name + "', validated against '" +
                      schema.name() + "'");
    }

    for (const auto& slot : schema.slots()) {
        const SlotPlan* sp = plan.find_slot(slot.name);
        if (sp == nullptr) {
            violation(slot.name, "missing_slot", "plan omits slot '" + slot.name + "'");
            continue;
        }
        const Template* tmpl = slot.find_template(sp->template_name);
        if (tmpl == nullptr) {
            if (sp->extension) {
                report.flags.push_back(
                    {slot.name, "extension template '" + sp->template_name +
                                    "', unverifiable statically"});
            } else {
                violation(slot.name, "unknown_template",
                          "slot '" + slot.name + "' uses unknown template '" + sp->template_name + "'");
            }
            continue;
        }
        for (const auto& [pname, value] : sp->parameters) {
            const Parameter* param = tmpl->find_parameter(pname);
            if (param == nullptr) {
                if (sp->extension) {
                    report.flags.push_back(
                        {slot.name, "extension parameter '" + pname + "', unverifiable statically"});
                } else {
                    violation(slot.name, "unknown_parameter",
                              "template '" + tmpl->name + "' declares no parameter '" + pname + "'");
                }
                continue;
            }
            if (!domain_contains(param->domain, value)) {
                violation(slot.name, "domain_violation",
                          "parameter '" + pname + "' = " + value_to_string(value) +
                              " outside domain " + domain_to_string(param->domain));
            }
        }
        if (sp->extension) {
            report.flags.push_back({slot.name, "extension, unverifiable statically"});
        }
    }

    for (const auto& [slot_name, sp] : plan.slots) {
        if (schema.find_slot(slot_name) == nullptr) {
            violation(slot_name, "unknown_slot", "schema declares no slot '" + slot_name + "'");
        }
    }

    if (plan.target_slot.empty()) {
        violation("", "missing_target", "plan declares no target slot");
    } else if (schema.find_slot(plan.target_slot) == nullptr) {
        violation(plan.target_slot, "unknown_target", "target slot not in schema");
    }
    for (const auto& control : plan.controls) {
        if (schema.find_slot(control) == nullptr) {
            violation(control, "unknown_control", "control slot not in schema");
        }
        if (control == plan.target_slot) {
            violation(control, "target_in_controls", "target slot is also listed as a control");
        }
    }

    report.valid = report.violations.empty();
    return report;
}

// ---------------------------------------------------------------------------
// Decomposition
// ---------------------------------------------------------------------------

std::string to_string(SubTaskRole role) {
    return role == SubTaskRole::Target ? "target" : "control";
}

std::vector<SubTask> decompose(const ExperimentPlan& plan, const FrameworkSchema& schema) {
    const auto report = validate_plan(plan, schema);
    if (!report.valid) {
        std::string msg = "cannot decompose invalid plan:";
        for (const auto& v : report.violations) msg += " [" + v.rule + "] " + v.message + ";";
        throw Error(msg);
    }
    std::vector<SubTask> tasks;
    tasks.reserve(schema.slots().size());
    for (const auto& slot : schema.slots()) {
        SubTask task;
        task.slot = slot.name;
        task.kind = slot.kind;
        task.extension_interface = slot.extension_interface;
        task.plan = *plan.find_slot(slot.name);
        task.role = (slot.name == plan.target_slot) ? SubTaskRole::Target : SubTaskRole::Control;
        tasks.push_back(std::move(task));
    }
    return tasks;
}

// ---------------------------------------------------------------------------
// Diffing
// ---------------------------------------------------------------------------

PlanDelta diff_plans(const ExperimentPlan& a, const ExperimentPlan& b) {
    if (a.schema_name != b.schema_name) {
        throw Error("diff_plans: schema mismatch ('" + a.schema_name + "' vs '" + b.schema_name + "')");
    }
    std::set<std::string> slot_names;
    for (const auto& [name, _] : a.slots) slot_names.insert(name);
    for (const auto& [name, _] : b.slots) slot_names.insert(name);

    PlanDelta delta;
    for (const auto& name : slot_names) {
        const SlotPlan* pa = a.find_slot(name);
        const SlotPlan* pb = b.find_slot(name);
        const SlotPlan empty;
        const SlotPlan& va = pa ? *pa : empty;
        const SlotPlan& vb = pb ? *pb : empty;
        if (va == vb) {
            delta.unchanged_slots.push_back(name);
        } else {
            delta.changed_slots.push_back({name, va, vb});
        }
    }
    return delta;
}

// ---------------------------------------------------------------------------
// Renderings
// ---------------------------------------------------------------------------

std::string render_slot_plan(std::string_view slot_name, const SlotPlan& plan) {
    std::string out(slot_name);
    out += ": ";
    out += plan.template_name;
    for (const auto& [k, v] : plan.parameters) {
        out += " " + k + "=" + value_to_string(v);
    }
    if (plan.extension) out += " extension: " + *plan.extension;
    return out;
}

std::string render_plan(const ExperimentPlan& plan) {
    std::string out;
    for (const auto& [slot_name, sp] : plan.slots) {
        if (!out.empty()) out += "; ";
        out += render_slot_plan(slot_name, sp);
    }
    return out;
}

std::string render_delta(const PlanDelta& delta) {
    std::string out;
    for (const auto& change : delta.changed_slots) {
        if (!out.empty()) out += "; ";
        out += change.slot + ": " + render_slot_plan(change.slot, change.before) + " -> " +
               render_slot_plan(change.slot, change.after);
    }
    return out.empty() ? "no change" : out;
}

}  // namespace arda::symlang
