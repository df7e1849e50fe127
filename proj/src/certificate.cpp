#include "sosineq/certificate.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace sosineq {

using nlohmann::json;

namespace {

std::string basis_name(Basis b) {
  return b == Basis::Monomial ? "monomial" : "chebyshev01";
}

Basis basis_from_name(const std::string& s) {
  if (s == "monomial") return Basis::Monomial;
  if (s == "chebyshev01") return Basis::Chebyshev01;
  throw std::runtime_error("invalid certificate: unknown basis \"" + s + "\"");
}

std::string rel_name(Rel r) {
  switch (r) {
    case Rel::Eq: return "eq";
    case Rel::Le: return "le";
    case Rel::Ge: return "ge";
  }
  return "eq";
}

Rel rel_from_name(const std::string& s) {
  if (s == "eq") return Rel::Eq;
  if (s == "le") return Rel::Le;
  if (s == "ge") return Rel::Ge;
  throw std::runtime_error("invalid certificate: unknown relation \"" + s + "\"");
}

json poly_to_json(const Poly& p) {
  json j;
  j["basis"] = basis_name(p.basis());
  j["coeffs"] = std::vector<double>(p.coeffs().data(), p.coeffs().data() + p.coeffs().size());
  return j;
}

Poly poly_from_json(const json& j) {
  std::vector<double> c = j.at("coeffs").get<std::vector<double>>();
  Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(c.data(), long(c.size()));
  return Poly(std::move(v), basis_from_name(j.at("basis").get<std::string>()));
}

json polymat_to_json(const PolyMat& m) {
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  json entries = json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int jj = 0; jj < m.cols(); ++jj) entries.push_back(poly_to_json(m(i, jj)));
  j["entries"] = std::move(entries);
  return j;
}

PolyMat polymat_from_json(const json& j) {
  int r = j.at("rows").get<int>(), c = j.at("cols").get<int>();
  const json& entries = j.at("entries");
  if (int(entries.size()) != r * c)
    throw std::runtime_error("invalid certificate: polynomial matrix entry count mismatch");
  PolyMat m(r, c);
  int k = 0;
  for (int i = 0; i < r; ++i)
    for (int jj = 0; jj < c; ++jj) m(i, jj) = poly_from_json(entries[k++]);
  return m;
}

json statement_to_json(const ProblemStatement& st) {
  json j;
  j["kind"] = st.kind;
  j["description"] = st.description;
  j["variables"] = st.variables;
  json sos = json::array();
  for (const StatementSos& s : st.sos) {
    json b;
    b["name"] = s.name;
    b["m"] = s.m;
    b["deg_N"] = s.deg_N;
    b["constant"] = polymat_to_json(s.constant);
    json terms = json::array();
    for (const auto& [var, mat] : s.terms) {
      json t;
      t["var"] = var;
      t["matrix"] = polymat_to_json(mat);
      terms.push_back(std::move(t));
    }
    b["terms"] = std::move(terms);
    sos.push_back(std::move(b));
  }
  j["sos"] = std::move(sos);
  json lin = json::array();
  for (const StatementLinear& l : st.linear) {
    json b;
    json terms = json::array();
    for (const auto& [var, c] : l.terms) terms.push_back(json::array({var, c}));
    b["terms"] = std::move(terms);
    b["rel"] = rel_name(l.rel);
    b["rhs"] = l.rhs;
    b["tag"] = l.tag;
    lin.push_back(std::move(b));
  }
  j["linear"] = std::move(lin);
  return j;
}

ProblemStatement statement_from_json(const json& j) {
  ProblemStatement st;
  st.kind = j.at("kind").get<std::string>();
  st.description = j.at("description").get<std::string>();
  st.variables = j.at("variables").get<std::vector<std::string>>();
  for (const json& b : j.at("sos")) {
    StatementSos s;
    s.name = b.at("name").get<std::string>();
    s.m = b.at("m").get<int>();
    s.deg_N = b.at("deg_N").get<int>();
    s.constant = polymat_from_json(b.at("constant"));
    for (const json& t : b.at("terms"))
      s.terms.emplace_back(t.at("var").get<std::string>(), polymat_from_json(t.at("matrix")));
    st.sos.push_back(std::move(s));
  }
  for (const json& b : j.at("linear")) {
    StatementLinear l;
    for (const json& t : b.at("terms"))
      l.terms.emplace_back(t.at(0).get<std::string>(), t.at(1).get<double>());
    l.rel = rel_from_name(b.at("rel").get<std::string>());
    l.rhs = b.at("rhs").get<double>();
    l.tag = b.at("tag").get<std::string>();
    st.linear.push_back(std::move(l));
  }
  return st;
}

std::vector<double> lower_triangle(const Eigen::MatrixXd& q) {
  std::vector<double> out;
  for (int i = 0; i < q.rows(); ++i)
    for (int j = 0; j <= i; ++j) out.push_back(q(i, j));
  return out;
}

Eigen::MatrixXd from_lower_triangle(const std::vector<double>& v, int n) {
  if (int(v.size()) != n * (n + 1) / 2)
    throw std::runtime_error("invalid certificate: gram triangle length mismatch");
  Eigen::MatrixXd q(n, n);
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      q(i, j) = v[size_t(k)];
      q(j, i) = v[size_t(k)];
      ++k;
    }
  return q;
}

// Gram expansion of one entry pair, reimplemented here so the checker shares
// no code with the program assembler it is auditing.
Poly cert_unit(int p, Basis basis) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(p + 1);
  c[p] = 1.0;
  return Poly(std::move(c), basis);
}

Poly cert_localizer(Basis basis) {
  Eigen::VectorXd c(3);
  if (basis == Basis::Monomial)
    c << 0.0, 1.0, -1.0;
  else
    c << 0.125, 0.0, -0.125;
  return Poly(std::move(c), basis);
}

PolyMat cert_expand(const CertGram& g) {
  PolyMat out(g.m, g.m);
  for (int i = 0; i < g.m; ++i)
    for (int j = 0; j < g.m; ++j) out(i, j) = Poly::constant(0.0, g.basis);
  const int msup = int(g.support.size());
  Poly loc = cert_localizer(g.basis);
  std::vector<Poly> units_main, units_loc;
  for (int p = 0; p <= g.d_main; ++p) units_main.push_back(cert_unit(p, g.basis));
  for (int p = 0; p <= g.d_loc; ++p) units_loc.push_back(cert_unit(p, g.basis));
  for (int r = 0; r < msup; ++r)
    for (int s = r; s < msup; ++s) {
      Poly acc = Poly::constant(0.0, g.basis);
      for (int p = 0; p <= g.d_main; ++p)
        for (int q = 0; q <= g.d_main; ++q) {
          double v = g.q_main(r * (g.d_main + 1) + p, s * (g.d_main + 1) + q);
          if (v != 0.0) acc = acc + v * (units_main[p] * units_main[q]);
        }
      for (int p = 0; p <= g.d_loc; ++p)
        for (int q = 0; q <= g.d_loc; ++q) {
          double v = g.q_loc(r * (g.d_loc + 1) + p, s * (g.d_loc + 1) + q);
          if (v != 0.0) acc = acc + v * (loc * (units_loc[p] * units_loc[q]));
        }
      out(g.support[r], g.support[s]) = acc;
      out(g.support[s], g.support[r]) = acc;
    }
  return out;
}

}  // namespace

std::string canonical_statement(const ProblemStatement& st) {
  return statement_to_json(st).dump();
}

std::string fnv1a64_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= std::uint64_t(c);
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

void stamp_fingerprint(Certificate& cert) {
  cert.fingerprint = fnv1a64_hex(canonical_statement(cert.statement));
}

std::string certificate_to_json(const Certificate& cert) {
  json j;
  j["format"] = kCertificateFormat;
  j["version"] = kCertificateVersion;
  j["kind"] = cert.kind;
  j["fingerprint"] = cert.fingerprint;
  j["statement"] = statement_to_json(cert.statement);
  j["values"] = cert.values;
  json scalars = json::array();
  for (const CertScalar& s : cert.scalars) {
    json b;
    b["name"] = s.name;
    b["role"] = s.role;
    b["value"] = s.value;
    scalars.push_back(std::move(b));
  }
  j["scalars"] = std::move(scalars);
  json mults = json::array();
  for (const CertPoly& m : cert.multipliers) {
    json b;
    b["name"] = m.name;
    b["poly"] = poly_to_json(m.poly);
    mults.push_back(std::move(b));
  }
  j["multipliers"] = std::move(mults);
  json grams = json::array();
  for (const CertGram& g : cert.grams) {
    json b;
    b["name"] = g.name;
    b["m"] = g.m;
    b["support"] = g.support;
    b["d_main"] = g.d_main;
    b["d_loc"] = g.d_loc;
    b["basis"] = basis_name(g.basis);
    b["q_main"] = lower_triangle(g.q_main);
    b["q_loc"] = lower_triangle(g.q_loc);
    grams.push_back(std::move(b));
  }
  j["grams"] = std::move(grams);
  json meta;
  meta["degrees"] = cert.degrees;
  json solver;
  solver["status"] = cert.solver_status;
  solver["iterations"] = cert.solver_iterations;
  solver["primal_residual"] = cert.solver_primal_residual;
  solver["dual_residual"] = cert.solver_dual_residual;
  solver["gap"] = cert.solver_gap;
  meta["solver"] = std::move(solver);
  meta["tool_version"] = cert.tool_version;
  j["metadata"] = std::move(meta);
  return j.dump(2) + "\n";
}

Certificate certificate_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("invalid certificate: ") + e.what());
  }
  if (j.value("format", "") != kCertificateFormat)
    throw std::runtime_error("invalid certificate: unrecognized format field");
  if (j.value("version", 0) != kCertificateVersion)
    throw std::runtime_error("invalid certificate: unsupported version");
  Certificate cert;
  cert.kind = j.at("kind").get<std::string>();
  cert.fingerprint = j.at("fingerprint").get<std::string>();
  cert.statement = statement_from_json(j.at("statement"));
  cert.values = j.at("values").get<std::map<std::string, double>>();
  for (const json& b : j.at("scalars"))
    cert.scalars.push_back({b.at("name").get<std::string>(), b.at("role").get<std::string>(),
                            b.at("value").get<double>()});
  for (const json& b : j.at("multipliers"))
    cert.multipliers.push_back({b.at("name").get<std::string>(), poly_from_json(b.at("poly"))});
  for (const json& b : j.at("grams")) {
    CertGram g;
    g.name = b.at("name").get<std::string>();
    g.m = b.at("m").get<int>();
    g.support = b.at("support").get<std::vector<int>>();
    g.d_main = b.at("d_main").get<int>();
    g.d_loc = b.at("d_loc").get<int>();
    g.basis = basis_from_name(b.at("basis").get<std::string>());
    int nm = int(g.support.size()) * (g.d_main + 1);
    int nl = int(g.support.size()) * (g.d_loc + 1);
    g.q_main = from_lower_triangle(b.at("q_main").get<std::vector<double>>(), nm);
    g.q_loc = from_lower_triangle(b.at("q_loc").get<std::vector<double>>(), nl);
    cert.grams.push_back(std::move(g));
  }
  const json& meta = j.at("metadata");
  cert.degrees = meta.at("degrees").get<std::map<std::string, int>>();
  const json& solver = meta.at("solver");
  cert.solver_status = solver.at("status").get<std::string>();
  cert.solver_iterations = solver.at("iterations").get<int>();
  cert.solver_primal_residual = solver.at("primal_residual").get<double>();
  cert.solver_dual_residual = solver.at("dual_residual").get<double>();
  cert.solver_gap = solver.at("gap").get<double>();
  cert.tool_version = meta.at("tool_version").get<std::string>();
  return cert;
}

void write_certificate(const std::string& path, const Certificate& cert) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write certificate file " + path);
  out << certificate_to_json(cert);
  if (!out.good()) throw std::runtime_error("write failed for certificate file " + path);
}

Certificate read_certificate(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read certificate file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return certificate_from_json(ss.str());
}

CheckReport check_certificate(const Certificate& cert, double tol) {
  CheckReport rep;
  rep.min_gram_eig = std::numeric_limits<double>::infinity();
  rep.min_pointwise_eig = std::numeric_limits<double>::infinity();
  rep.worst_slack = std::numeric_limits<double>::infinity();

  if (fnv1a64_hex(canonical_statement(cert.statement)) != cert.fingerprint) {
    rep.failures.push_back("fingerprint does not match the embedded statement");
    return rep;
  }

  auto value_of = [&](const std::string& name, bool& ok) {
    auto it = cert.values.find(name);
    if (it == cert.values.end()) {
      rep.failures.push_back("missing value for variable " + name);
      ok = false;
      return 0.0;
    }
    return it->second;
  };

  for (const CertGram& g : cert.grams) {
    for (const Eigen::MatrixXd* q : {&g.q_main, &g.q_loc}) {
      if (q->rows() == 0) continue;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(*q, Eigen::EigenvaluesOnly);
      double lo = es.eigenvalues().minCoeff();
      rep.min_gram_eig = std::min(rep.min_gram_eig, lo);
      if (lo < -tol)
        rep.failures.push_back("gram block " + g.name + " has eigenvalue " + std::to_string(lo));
    }
  }

  for (const StatementSos& s : cert.statement.sos) {
    const CertGram* gram = nullptr;
    for (const CertGram& g : cert.grams)
      if (g.name == s.name) gram = &g;
    if (!gram) {
      rep.failures.push_back("no gram data for constraint " + s.name);
      continue;
    }

    bool ok = true;
    PolyMat tval = s.constant;
    for (const auto& [var, mat] : s.terms) {
      double v = value_of(var, ok);
      for (int i = 0; i < s.m; ++i)
        for (int j = 0; j < s.m; ++j) tval(i, j) = tval(i, j) + v * mat(i, j);
    }
    if (!ok) continue;

    double scale = std::max(1.0, max_abs_coeff(tval));
    PolyMat expansion = cert_expand(*gram);
    double worst = 0.0;
    // Compare coefficients in the gram's own basis: converting the target
    // into it is stable, while expanding a Chebyshev gram into monomials
    // would inflate roundoff exponentially with the degree.
    for (int i = 0; i < s.m; ++i)
      for (int j = 0; j < s.m; ++j) {
        Poly diff = to_basis(tval(i, j), gram->basis) - expansion(i, j);
        worst = std::max(worst, diff.coeffs().cwiseAbs().maxCoeff());
      }
    rep.match_error = std::max(rep.match_error, worst / scale);
    if (worst > tol * scale)
      rep.failures.push_back("gram expansion of " + s.name +
                             " misses the target by coefficient error " + std::to_string(worst));

    double block_min = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 64; ++k) {
      double x = 0.5 * (1.0 - std::cos(M_PI * double(k) / 64.0));
      Eigen::MatrixXd txr = tval.eval(x);
      Eigen::MatrixXd tx = 0.5 * (txr + txr.transpose());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tx, Eigen::EigenvaluesOnly);
      block_min = std::min(block_min, es.eigenvalues().minCoeff());
    }
    rep.min_pointwise_eig = std::min(rep.min_pointwise_eig, block_min);
    if (block_min < -10.0 * tol) {
      rep.failures.push_back("constraint " + s.name + " dips to eigenvalue " +
                             std::to_string(block_min) + " on the sample grid");
    }
  }

  for (const StatementLinear& l : cert.statement.linear) {
    bool ok = true;
    double lhs = 0.0;
    for (const auto& [var, c] : l.terms) lhs += c * value_of(var, ok);
    if (!ok) continue;
    double slack = 0.0;
    switch (l.rel) {
      case Rel::Eq: slack = -std::abs(lhs - l.rhs); break;
      case Rel::Le: slack = l.rhs - lhs; break;
      case Rel::Ge: slack = lhs - l.rhs; break;
    }
    rep.worst_slack = std::min(rep.worst_slack, slack);
    if (slack < -tol) {
      std::string what = l.tag.empty() ? "linear constraint" : l.tag + " constraint";
      rep.failures.push_back(what + " violated by " + std::to_string(-slack));
    }
  }

  rep.pass = rep.failures.empty();
  return rep;
}

}  // namespace sosineq
