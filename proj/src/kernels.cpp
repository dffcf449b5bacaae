#include "sulreg/kernels.hpp"

#include "sulreg/normals.hpp"

namespace sulreg::kernels {

namespace {

std::optional<Vec3> normal_or_empty(const SpatialIndex& index, const Vec3& q, std::size_t k) {
  try {
    return estimate_normal(index, q, k);
  } catch (const Error&) {
    return std::nullopt;
  }
}

void append_row(const CorrespondenceSet& corrs, std::span<const Index> members, std::size_t a,
                LineVectorSet& out, std::size_t& skipped) {
  for (std::size_t b = a + 1; b < members.size(); ++b) {
    if (auto lv = make_line_vector(corrs, members[a], members[b])) {
      out.push_back(*lv);
    } else {
      ++skipped;
    }
  }
}

}  // namespace

std::optional<LineVector> make_line_vector(const CorrespondenceSet& corrs, Index a, Index b) {
  if (a > b) std::swap(a, b);
  LineVector lv;
  lv.i = a;
  lv.j = b;
  lv.v_source = corrs[a].source - corrs[b].source;
  lv.v_target = corrs[a].target - corrs[b].target;
  const double ns = lv.v_source.norm();
  const double nt = lv.v_target.norm();
  if (ns == 0.0 || nt == 0.0) return std::nullopt;
  lv.scale_ratio = ns / nt;
  return lv;
}

std::vector<double> compute_residuals(const RigidTransform& t, const CorrespondenceSet& corrs) {
  std::vector<double> out(corrs.size());
  const auto n = static_cast<std::ptrdiff_t>(corrs.size());
#pragma omp parallel for schedule(static) if (n > 4096)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& c = corrs[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] = (t(c.source) - c.target).norm();
  }
  return out;
}

std::vector<std::optional<Vec3>> estimate_normals(const SpatialIndex& index,
                                                  std::span<const Vec3> queries, std::size_t k) {
  std::vector<std::optional<Vec3>> out(queries.size());
  const auto n = static_cast<std::ptrdiff_t>(queries.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] =
        normal_or_empty(index, queries[static_cast<std::size_t>(i)], k);
  }
  return out;
}

PairVectors build_pair_vectors(const CorrespondenceSet& corrs, std::span<const Index> members) {
  const std::size_t m = members.size();
  std::vector<LineVectorSet> rows(m);
  std::vector<std::size_t> row_skipped(m, 0);
  const auto n = static_cast<std::ptrdiff_t>(m);
#pragma omp parallel for schedule(dynamic, 16) if (m > 256)
  for (std::ptrdiff_t a = 0; a < n; ++a) {
    auto& row = rows[static_cast<std::size_t>(a)];
    row.reserve(m - static_cast<std::size_t>(a) - 1);
    append_row(corrs, members, static_cast<std::size_t>(a), row,
               row_skipped[static_cast<std::size_t>(a)]);
  }
  PairVectors out;
  std::size_t total = 0;
  for (const auto& r : rows) total += r.size();
  out.vectors.reserve(total);
  for (std::size_t a = 0; a < m; ++a) {
    out.vectors.insert(out.vectors.end(), rows[a].begin(), rows[a].end());
    out.skipped += row_skipped[a];
  }
  return out;
}

std::size_t count_below(std::span<const double> values, double threshold) {
  std::size_t count = 0;
  const auto n = static_cast<std::ptrdiff_t>(values.size());
  // Integer reduction: order independent.
#pragma omp parallel for reduction(+ : count) schedule(static) if (n > 16384)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (values[static_cast<std::size_t>(i)] < threshold) ++count;
  }
  return count;
}

namespace serial {

std::vector<double> compute_residuals(const RigidTransform& t, const CorrespondenceSet& corrs) {
  std::vector<double> out;
  out.reserve(corrs.size());
  for (const auto& c : corrs) out.push_back((t(c.source) - c.target).norm());
  return out;
}

std::vector<std::optional<Vec3>> estimate_normals(const SpatialIndex& index,
                                                  std::span<const Vec3> queries, std::size_t k) {
  std::vector<std::optional<Vec3>> out;
  out.reserve(queries.size());
  for (const auto& q : queries) out.push_back(normal_or_empty(index, q, k));
  return out;
}

PairVectors build_pair_vectors(const CorrespondenceSet& corrs, std::span<const Index> members) {
  PairVectors out;
  for (std::size_t a = 0; a < members.size(); ++a) {
    append_row(corrs, members, a, out.vectors, out.skipped);
  }
  return out;
}

std::size_t count_below(std::span<const double> values, double threshold) {
  std::size_t count = 0;
  for (double v : values) count += v < threshold ? 1 : 0;
  return count;
}

}  // namespace serial

}  // namespace sulreg::kernels
