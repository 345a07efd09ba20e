// Orchestration: runs the enabled stages in dependency order, collecting a
// machine-readable report. A stage failure halts its dependents but not
// independent stages; the report is always produced.

#ifndef KS_PIPELINE_HPP
#define KS_PIPELINE_HPP

#include <json.hpp>

#include "ks/config.hpp"

namespace ks {

struct PipelineResult {
    nlohmann::json report;
    bool any_failed = false;
};

// Stage names: model, states, window, equilibria, trap, shoot, continue,
// spectrum, resolvent, pde.
PipelineResult run_pipeline(const RunConfig& cfg, bool write_files = true);

// The report with its "timings" subtree removed; identical configs produce
// byte-identical dumps of this view.
nlohmann::json report_without_timings(const nlohmann::json& report);

}  // namespace ks

#endif
