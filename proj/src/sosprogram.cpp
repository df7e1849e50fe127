#include "sosineq/sosprogram.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace sosineq {

namespace {

constexpr double kPrune = 1e-14;

Poly unit_poly(int p, Basis basis) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(p + 1);
  c[p] = 1.0;
  return Poly(std::move(c), basis);
}

// prods[p][q] = phi_p * phi_q (optionally times the localizer).
std::vector<std::vector<Poly>> product_table(int d, Basis basis, bool localized) {
  std::vector<Poly> units;
  for (int p = 0; p <= d; ++p) units.push_back(unit_poly(p, basis));
  Poly g = localizer_poly(basis);
  std::vector<std::vector<Poly>> prods(d + 1);
  for (int p = 0; p <= d; ++p) {
    prods[p].resize(d + 1);
    for (int q = 0; q <= d; ++q) {
      Poly pr = units[p] * units[q];
      prods[p][q] = localized ? g * pr : pr;
    }
  }
  return prods;
}

bool structurally_zero(const AffinePolyMat& T, int i, int j) {
  if (!trim(T.constant(i, j)).is_zero()) return false;
  for (const auto& [var, mat] : T.terms)
    if (!trim(mat(i, j)).is_zero()) return false;
  return true;
}

}  // namespace

Poly localizer_poly(Basis basis) {
  Eigen::VectorXd c(3);
  if (basis == Basis::Monomial)
    c << 0.0, 1.0, -1.0;
  else
    c << 0.125, 0.0, -0.125;
  return Poly(std::move(c), basis);
}

PolyMat gram_expansion(const GramLayout& layout, const Eigen::MatrixXd& q_main,
                       const Eigen::MatrixXd& q_loc) {
  const int msup = int(layout.support.size());
  if (q_main.rows() != layout.dim_main() || q_loc.rows() != layout.dim_loc())
    throw std::invalid_argument("gram matrix size does not match layout");
  PolyMat out(layout.m, layout.m);
  for (int i = 0; i < layout.m; ++i)
    for (int j = 0; j < layout.m; ++j) out(i, j) = Poly::constant(0.0, layout.basis);

  auto prods_main = product_table(layout.d_main, layout.basis, false);
  auto prods_loc = product_table(layout.d_loc, layout.basis, true);
  for (int r = 0; r < msup; ++r)
    for (int s = r; s < msup; ++s) {
      Poly acc = Poly::constant(0.0, layout.basis);
      for (int p = 0; p <= layout.d_main; ++p)
        for (int q = 0; q <= layout.d_main; ++q) {
          double v = q_main(r * (layout.d_main + 1) + p, s * (layout.d_main + 1) + q);
          if (v != 0.0) acc = acc + v * prods_main[p][q];
        }
      for (int p = 0; p <= layout.d_loc; ++p)
        for (int q = 0; q <= layout.d_loc; ++q) {
          double v = q_loc(r * (layout.d_loc + 1) + p, s * (layout.d_loc + 1) + q);
          if (v != 0.0) acc = acc + v * prods_loc[p][q];
        }
      out(layout.support[r], layout.support[s]) = acc;
      out(layout.support[s], layout.support[r]) = acc;
    }
  return out;
}

SosAssembly assemble_sdp(const SosProgram& prog) {
  if (prog.sos.empty())
    throw std::invalid_argument("program has no sum-of-squares constraints");
  const int nvars = prog.pool.size();

  SosAssembly out;
  std::vector<int> dims;

  for (const SosConstraintSpec& spec : prog.sos) {
    const int m = spec.T.dim();
    if (m == 0) throw std::invalid_argument("empty matrix in constraint " + spec.name);
    for (const auto& [var, mat] : spec.T.terms)
      if (var < 0 || var >= nvars)
        throw std::invalid_argument("constraint " + spec.name + " references an unknown variable");
    if (spec.deg_N < 0) throw std::invalid_argument("negative localizer degree");

    GramLayout L;
    L.name = spec.name;
    L.m = m;
    L.d_loc = spec.deg_N / 2;
    int deg_T = spec.T.max_degree();
    int twod = std::max(deg_T + (deg_T % 2), 2 * L.d_loc + 2);
    L.d_main = twod / 2;
    L.basis = twod > 12 ? Basis::Chebyshev01 : Basis::Monomial;
    for (int i = 0; i < m; ++i)
      if (!structurally_zero(spec.T, i, i)) L.support.push_back(i);
    if (!L.support.empty()) {
      L.block_main = int(dims.size());
      dims.push_back(L.dim_main());
      L.block_loc = int(dims.size());
      dims.push_back(L.dim_loc());
    }
    out.grams.push_back(std::move(L));
  }

  std::vector<int> slack_block(prog.linear.size(), -1);
  std::vector<double> slack_sign(prog.linear.size(), 0.0);
  for (size_t idx = 0; idx < prog.linear.size(); ++idx) {
    if (prog.linear[idx].rel == Rel::Eq) continue;
    slack_block[idx] = int(dims.size());
    dims.push_back(1);
    slack_sign[idx] = prog.linear[idx].rel == Rel::Le ? 1.0 : -1.0;
  }

  SdpProblem& sdp = out.sdp;
  sdp.set_dims(std::move(dims), nvars);
  for (const auto& [v, c] : prog.objective_min) {
    if (v < 0 || v >= nvars) throw std::invalid_argument("objective references an unknown variable");
    sdp.objective_free[v] += c;
  }

  for (size_t si = 0; si < prog.sos.size(); ++si) {
    const SosConstraintSpec& spec = prog.sos[si];
    const GramLayout& L = out.grams[si];
    const int m = L.m;
    const int twod = 2 * L.d_main;

    std::vector<int> pos(m, -1);
    for (size_t r = 0; r < L.support.size(); ++r) pos[L.support[r]] = int(r);
    auto prods_main = product_table(L.d_main, L.basis, false);
    auto prods_loc = product_table(L.d_loc, L.basis, true);

    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        Poly cpoly = to_basis(trim(spec.T.constant(i, j)), L.basis);
        std::vector<std::pair<int, Poly>> tpolys;
        for (const auto& [var, mat] : spec.T.terms) {
          Poly tp = to_basis(trim(mat(i, j)), L.basis);
          if (!tp.is_zero()) tpolys.emplace_back(var, tp);
        }
        const bool in_support = pos[i] >= 0 && pos[j] >= 0;

        for (int t = 0; t <= twod; ++t) {
          SdpProblem::Row row;
          row.rhs = cpoly.coeff(t);
          double max_coeff = 0.0;

          std::map<std::pair<int, int>, double> amain, aloc;
          if (in_support) {
            const int base_r = pos[i] * (L.d_main + 1);
            const int base_s = pos[j] * (L.d_main + 1);
            for (int p = 0; p <= L.d_main; ++p)
              for (int q = 0; q <= L.d_main; ++q) {
                double c = prods_main[p][q].coeff(t);
                if (c == 0.0) continue;
                int a = base_r + p, b = base_s + q;
                amain[{std::min(a, b), std::max(a, b)}] += c;
              }
            const int lbase_r = pos[i] * (L.d_loc + 1);
            const int lbase_s = pos[j] * (L.d_loc + 1);
            for (int p = 0; p <= L.d_loc; ++p)
              for (int q = 0; q <= L.d_loc; ++q) {
                double c = prods_loc[p][q].coeff(t);
                if (c == 0.0) continue;
                int a = lbase_r + p, b = lbase_s + q;
                aloc[{std::min(a, b), std::max(a, b)}] += c;
              }
            std::vector<BlockEntry> emain, eloc;
            for (const auto& [ab, v] : amain) {
              double e = ab.first == ab.second ? v : 0.5 * v;
              if (std::abs(e) <= kPrune) continue;
              emain.push_back({ab.first, ab.second, e});
              max_coeff = std::max(max_coeff, std::abs(e));
            }
            for (const auto& [ab, v] : aloc) {
              double e = ab.first == ab.second ? v : 0.5 * v;
              if (std::abs(e) <= kPrune) continue;
              eloc.push_back({ab.first, ab.second, e});
              max_coeff = std::max(max_coeff, std::abs(e));
            }
            if (!emain.empty()) row.block_terms.emplace_back(L.block_main, std::move(emain));
            if (!eloc.empty()) row.block_terms.emplace_back(L.block_loc, std::move(eloc));
          }

          for (const auto& [var, tp] : tpolys) {
            double c = tp.coeff(t);
            if (std::abs(c) <= kPrune) continue;
            row.free_terms.emplace_back(var, -c);
            max_coeff = std::max(max_coeff, std::abs(c));
          }

          if (max_coeff <= kPrune && std::abs(row.rhs) <= kPrune) continue;
          sdp.rows.push_back(std::move(row));
        }
      }
  }

  for (size_t idx = 0; idx < prog.linear.size(); ++idx) {
    const LinearConstraint& lc = prog.linear[idx];
    SdpProblem::Row row;
    row.rhs = lc.rhs;
    std::map<int, double> acc;
    for (const auto& [v, c] : lc.terms) {
      if (v < 0 || v >= nvars)
        throw std::invalid_argument("linear constraint references an unknown variable");
      acc[v] += c;
    }
    for (const auto& [v, c] : acc)
      if (c != 0.0) row.free_terms.emplace_back(v, c);
    if (slack_block[idx] >= 0)
      row.block_terms.emplace_back(slack_block[idx],
                                   std::vector<BlockEntry>{{0, 0, slack_sign[idx]}});
    sdp.rows.push_back(std::move(row));
  }

  return out;
}

}  // namespace sosineq
