#pragma once

#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "socioscope/class_matrix.hpp"
#include "socioscope/common.hpp"
#include "socioscope/directory.hpp"
#include "socioscope/ingest.hpp"
#include "socioscope/socio.hpp"

namespace socioscope {

/// Fractions of non-cash spending over the 16 retained groups, plus the cash share.
struct SpendingVector {
  UserId user_id;
  std::array<double, kNonCashPcgCount> values{};  // SV_k(u), k = 2..17, normalized over non-cash spend
  double cash_fraction = 0;                       // SV_1(u), share of cash in the retained total
};

struct SpendingVectors {
  std::map<UserId, SpendingVector, IdLess> vectors;
  std::vector<std::string> diagnostics;
};

/// Which part of a user's spending a measure looks at.
enum class Subset {
  NonCash,  // K_{2-17}: the 16-vector
  Cash,     // {k_1}: the scalar cash share
  Full,     // K_17: (SV_1, (1 - SV_1) * SV_k), sums to one
};

inline std::string subset_name(Subset s) {
  switch (s) {
    case Subset::NonCash: return "k2-17";
    case Subset::Cash: return "k1";
    case Subset::Full: return "k1-17";
  }
  return "?";
}

inline Subset parse_subset(std::string_view s) {
  if (s == "k2-17") return Subset::NonCash;
  if (s == "k1") return Subset::Cash;
  if (s == "k1-17") return Subset::Full;
  throw Error("unknown subset '" + std::string(s) + "' (want k2-17, k1 or k1-17)");
}

inline std::size_t subset_dim(Subset s) {
  switch (s) {
    case Subset::NonCash: return kNonCashPcgCount;
    case Subset::Cash: return 1;
    case Subset::Full: return kActivePcgCount;
  }
  return 0;
}

inline void subset_values(const SpendingVector& sv, Subset s, double* out) {
  switch (s) {
    case Subset::NonCash:
      std::copy(sv.values.begin(), sv.values.end(), out);
      break;
    case Subset::Cash:
      out[0] = sv.cash_fraction;
      break;
    case Subset::Full:
      out[0] = sv.cash_fraction;
      for (std::size_t k = 0; k < kNonCashPcgCount; ++k) out[k + 1] = (1.0 - sv.cash_fraction) * sv.values[k];
      break;
  }
}

inline std::vector<double> subset_values(const SpendingVector& sv, Subset s) {
  std::vector<double> v(subset_dim(s));
  subset_values(sv, s, v.data());
  return v;
}

/// SV_k(u) = m_u^k / m_u with m_u the non-cash retained total; users without non-cash
/// spend have no vector and are reported.
inline SpendingVectors spending_vectors(const Profiles& profiles) {
  SpendingVectors out;
  std::size_t dropped = 0;
  for (const auto& [id, p] : profiles) {
    Cents noncash = 0;
    for (std::size_t k = 1; k < kActivePcgCount; ++k) noncash += p.pcg_spend[k];
    if (noncash <= 0) {
      ++dropped;
      continue;
    }
    SpendingVector sv;
    sv.user_id = id;
    for (std::size_t k = 1; k < kActivePcgCount; ++k) {
      sv.values[k - 1] = static_cast<double>(p.pcg_spend[k]) / static_cast<double>(noncash);
    }
    const Cents cash = p.pcg_spend[CategoryDirectory::cash_pcg()];
    sv.cash_fraction = static_cast<double>(cash) / static_cast<double>(cash + noncash);
    out.vectors.emplace(id, sv);
  }
  if (dropped) out.diagnostics.push_back(std::to_string(dropped) + " users without non-cash spend have no spending vector");
  return out;
}

// ---------------------------------------------------------------------------
// Class share distribution r(k, s_j)

struct ShareTable {
  std::vector<int> pcgs;                    // retained PCGs with nonzero global spend
  std::vector<std::vector<double>> shares;  // [row for pcgs[i]][class j - 1]
  std::vector<double> totals;               // global spend per row, currency units
};

/// r(k, s_j) = (spend of class j on k) / (spend of everyone on k). With per_capita, the
/// class totals are divided by class size before normalizing.
inline ShareTable class_share_distribution(const Profiles& profiles, const ClassPartition& partition,
                                           bool per_capita = false) {
  const int n = partition.n_classes();
  std::vector<std::vector<long double>> sums(kActivePcgCount, std::vector<long double>(static_cast<std::size_t>(n), 0));
  for (const auto& [id, p] : profiles) {
    auto cls = partition.class_of(id);
    if (!cls) continue;
    for (std::size_t k = 0; k < kActivePcgCount; ++k) sums[k][static_cast<std::size_t>(*cls - 1)] += p.pcg_spend[k];
  }
  ShareTable t;
  for (std::size_t k = 0; k < kActivePcgCount; ++k) {
    std::vector<long double> row = sums[k];
    long double global = std::accumulate(row.begin(), row.end(), 0.0L);
    if (global <= 0) continue;
    if (per_capita) {
      for (int j = 1; j <= n; ++j) {
        auto sz = partition.size(j);
        row[static_cast<std::size_t>(j - 1)] = sz ? row[static_cast<std::size_t>(j - 1)] / sz : 0;
      }
    }
    long double norm = std::accumulate(row.begin(), row.end(), 0.0L);
    std::vector<double> shares(static_cast<std::size_t>(n));
    for (std::size_t j = 0; j < shares.size(); ++j) shares[j] = static_cast<double>(row[j] / norm);
    t.pcgs.push_back(static_cast<int>(k));
    t.shares.push_back(std::move(shares));
    t.totals.push_back(static_cast<double>(global / 100));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Class-level similarity

/// Mean subset vector per class (index j - 1). Throws if a class has no member with a vector.
inline std::vector<std::vector<double>> class_mean_vectors(const SpendingVectors& sv, const ClassPartition& partition,
                                                           Subset subset) {
  const std::size_t dim = subset_dim(subset);
  std::vector<std::vector<double>> means;
  std::vector<double> buf(dim);
  for (int j = 1; j <= partition.n_classes(); ++j) {
    std::vector<long double> acc(dim, 0);
    std::size_t count = 0;
    for (const auto& id : partition.members(j)) {
      auto it = sv.vectors.find(id);
      if (it == sv.vectors.end()) continue;
      subset_values(it->second, subset, buf.data());
      for (std::size_t k = 0; k < dim; ++k) acc[k] += buf[k];
      ++count;
    }
    if (count == 0) throw Error("class " + std::to_string(j) + " has no users with a spending vector");
    std::vector<double> m(dim);
    for (std::size_t k = 0; k < dim; ++k) m[k] = static_cast<double>(acc[k] / count);
    means.push_back(std::move(m));
  }
  return means;
}

inline double euclidean(std::span<const double> a, std::span<const double> b) {
  long double s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    long double d = static_cast<long double>(a[k]) - b[k];
    s += d * d;
  }
  return static_cast<double>(std::sqrt(s));
}

/// d(s_i, s_j) = L2 distance between class mean vectors over the subset.
inline ClassMatrix class_distance_matrix(const SpendingVectors& sv, const ClassPartition& partition, Subset subset) {
  const int n = partition.n_classes();
  if (n < 2) throw Error("class distances need at least two classes");
  auto means = class_mean_vectors(sv, partition, subset);
  ClassMatrix d(n, subset == Subset::Cash ? "d_k1" : "d_SV");
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      double v = euclidean(means[static_cast<std::size_t>(i - 1)], means[static_cast<std::size_t>(j - 1)]);
      d(i, j) = d(j, i) = v;
    }
  }
  return d;
}

struct DispersionStat {
  double sigma = 0;   // mean distance of members to the class mean
  double stddev = 0;  // standard deviation of those distances
  std::size_t members = 0;
  bool singleton = false;
};

inline std::vector<DispersionStat> class_dispersion(const SpendingVectors& sv, const ClassPartition& partition,
                                                    Subset subset) {
  auto means = class_mean_vectors(sv, partition, subset);
  std::vector<DispersionStat> out;
  std::vector<double> buf(subset_dim(subset));
  for (int j = 1; j <= partition.n_classes(); ++j) {
    const auto& mean = means[static_cast<std::size_t>(j - 1)];
    std::vector<double> dist;
    for (const auto& id : partition.members(j)) {
      auto it = sv.vectors.find(id);
      if (it == sv.vectors.end()) continue;
      subset_values(it->second, subset, buf.data());
      dist.push_back(euclidean(mean, buf));
    }
    DispersionStat s;
    s.members = dist.size();
    s.singleton = dist.size() == 1;
    long double sum = std::accumulate(dist.begin(), dist.end(), 0.0L);
    s.sigma = static_cast<double>(sum / dist.size());
    long double var = 0;
    for (double d : dist) var += (d - s.sigma) * (d - s.sigma);
    s.stddev = dist.size() > 1 ? static_cast<double>(std::sqrt(var / (dist.size() - 1))) : 0.0;
    out.push_back(s);
  }
  return out;
}

/// Shannon entropy with natural log and 0 ln 0 = 0.
inline double shannon_entropy(std::span<const double> v) {
  long double s = 0;
  for (double x : v) {
    if (x < 0) throw Error("entropy of a negative share");
    if (x > 0) s -= x * std::log(static_cast<long double>(x));
  }
  return static_cast<double>(s);
}

/// S_SV(s_j) on class mean vectors; include_cash uses the 17-group vector.
inline std::vector<double> class_entropy(const SpendingVectors& sv, const ClassPartition& partition,
                                         bool include_cash) {
  auto means = class_mean_vectors(sv, partition, include_cash ? Subset::Full : Subset::NonCash);
  std::vector<double> out;
  for (const auto& m : means) out.push_back(shannon_entropy(m));
  return out;
}

}  // namespace socioscope
