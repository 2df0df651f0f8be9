#pragma once

#include <string>
#include <vector>

#include "arda/symlang.hpp"

namespace arda::agent {

/// One grounded slot: the validated configuration fragment plus any code the
/// backend produced for an extension.
struct GroundedFragment {
    std::string slot;
    std::string config_json;
    std::string code;
};

/// A plan grounded into an executable unit. `runnable` is set only when every
/// schema slot was grounded successfully.
struct RunnableProject {
    symlang::ExperimentPlan plan;
    std::string schema_name;
    std::string evaluation_setting;
    std::vector<GroundedFragment> fragments;
    bool runnable = false;
};

}  // namespace arda::agent
