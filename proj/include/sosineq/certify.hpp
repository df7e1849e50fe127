// Glue between an assembled SOS program, its SDP solution, and the
// certificate document: canonical statement extraction and population of
// values, Gram blocks, and solver metadata.
#pragma once

#include <string>

#include "sosineq/certificate.hpp"
#include "sosineq/program.hpp"
#include "sosineq/sdp.hpp"
#include "sosineq/sosprogram.hpp"

namespace sosineq {

ProblemStatement statement_from_program(const SosProgram& prog, const std::string& kind,
                                        const std::string& description);

// Statement, per-variable values from the free-variable solution, Gram
// blocks, solver metadata, and a stamped fingerprint. Scalars, multipliers
// and degrees are left for the caller to fill in.
Certificate certificate_from_solution(const SosProgram& prog, const SosAssembly& asmb,
                                      const SdpSolution& sol, const std::string& kind,
                                      const std::string& description);

}  // namespace sosineq
