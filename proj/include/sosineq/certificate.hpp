#pragma once
// Self-contained proof certificates. A certificate embeds the full problem
// statement (as plain data, variables referenced by name), the optimal
// variable values, and the Gram matrices of every sum-of-squares block, so
// that check_certificate can re-verify the claim with nothing but polynomial
// arithmetic and eigenvalue bounds; it never trusts the solver that produced
// the certificate. The statement is fingerprinted, and a certificate whose
// fingerprint does not match its own statement is rejected outright.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sosineq/boundary.hpp"
#include "sosineq/polymatrix.hpp"

namespace sosineq {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kCertificateFormat = "sosineq-certificate";
inline constexpr int kCertificateVersion = 1;

// One matrix inequality T(x) >= 0 on [0,1], T affine in named scalars.
struct StatementSos {
  std::string name;
  int m = 0;
  int deg_N = 0;
  PolyMat constant;
  std::vector<std::pair<std::string, PolyMat>> terms;
};

// sum coeff * value  rel  rhs.
struct StatementLinear {
  std::vector<std::pair<std::string, double>> terms;
  Rel rel = Rel::Eq;
  double rhs = 0.0;
  std::string tag;
};

struct ProblemStatement {
  std::string kind;         // e.g. "integral-inequality", "stability"
  std::string description;  // canonical human-readable claim
  std::vector<std::string> variables;
  std::vector<StatementSos> sos;
  std::vector<StatementLinear> linear;
};

struct CertGram {
  std::string name;
  int m = 0;
  std::vector<int> support;  // jet coordinates carried by the Gram blocks
  int d_main = 0;
  int d_loc = 0;
  Basis basis = Basis::Monomial;
  Eigen::MatrixXd q_main, q_loc;  // full symmetric matrices
};

struct CertScalar {
  std::string name;
  std::string role;  // "kappa", "eps1", "eps2", "rate", "param"
  double value = 0.0;
};

struct CertPoly {
  std::string name;
  Poly poly;
};

struct Certificate {
  std::string kind;
  std::string fingerprint;  // FNV-1a64 of the canonical statement text
  ProblemStatement statement;
  std::map<std::string, double> values;  // every decision scalar, by name
  std::vector<CertScalar> scalars;       // the headline quantities
  std::vector<CertPoly> multipliers;     // readable projections of the h's
  std::vector<CertGram> grams;
  std::map<std::string, int> degrees;
  std::string solver_status;
  int solver_iterations = 0;
  double solver_primal_residual = 0.0;
  double solver_dual_residual = 0.0;
  double solver_gap = 0.0;
  std::string tool_version = kToolVersion;
};

// Deterministic serialization of the statement, input of the fingerprint.
std::string canonical_statement(const ProblemStatement& st);
std::string fnv1a64_hex(const std::string& text);

// Sets cert.fingerprint from cert.statement.
void stamp_fingerprint(Certificate& cert);

std::string certificate_to_json(const Certificate& cert);
Certificate certificate_from_json(const std::string& text);
void write_certificate(const std::string& path, const Certificate& cert);
Certificate read_certificate(const std::string& path);

struct CheckReport {
  bool pass = false;
  double min_gram_eig = 0.0;    // most negative Gram eigenvalue seen
  double match_error = 0.0;     // worst relative coefficient mismatch
  double worst_slack = 0.0;     // most negative linear-constraint slack
  double min_pointwise_eig = 0.0;
  std::vector<std::string> failures;
};

// Re-verifies the certificate: fingerprint, Gram positivity, coefficient
// match between each T and its Gram expansion (entries outside the Gram
// support must vanish), linear-constraint slacks, and pointwise minimum
// eigenvalues of each T on a Chebyshev grid.
CheckReport check_certificate(const Certificate& cert, double tol = 1e-7);

}  // namespace sosineq
