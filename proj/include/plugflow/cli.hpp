#pragma once

#include "plugflow/config.hpp"
#include "plugflow/insertion.hpp"
#include "plugflow/wilson.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace plugflow {

/// Largest circular gap of the values reduced mod 10 (density proxy).
double sup_gap_mod10(std::vector<double> values);

/// Dispatches a verification suite for the configured plug. Throws
/// std::invalid_argument for an inapplicable suite/plug pair.
SuiteReport run_suite(const RunConfig& cfg, const std::string& suite);

/// Command entry points. Exit statuses: 0 pass, 1 verification failure,
/// 2 usage or domain error.
int cmd_trace(const RunConfig& cfg, const std::string& start_text, std::ostream& out,
              std::ostream& err);
int cmd_verify(const RunConfig& cfg, const std::string& suite, std::ostream& out,
               std::ostream& err);
int cmd_symbolic(const RunConfig& cfg, int count, std::ostream& out, std::ostream& err);
int cmd_asymptotics(const RunConfig& cfg, int n_max, std::ostream& out, std::ostream& err);

/// JSON form of a suite report, with the provenance header object.
std::string report_json(const RunConfig& cfg, const SuiteReport& rep);

std::string provenance_comment(const RunConfig& cfg);

}  // namespace plugflow
