#include "mieq/meta.hpp"

#include <cmath>
#include <numeric>

#include "mieq/error.hpp"
#include "mieq/infomeasure.hpp"

namespace mieq {

StudySet::StudySet(std::vector<CountTable> studies) : studies_(std::move(studies)) {
  if (studies_.empty()) {
    throw DomainError("StudySet: at least one study required");
  }
  for (const auto& t : studies_) {
    if (t.rows() != studies_.front().rows() || t.cols() != studies_.front().cols()) {
      throw DomainError("StudySet: all studies must have the same shape");
    }
  }
}

std::vector<Count> StudySet::sample_sizes() const {
  std::vector<Count> n;
  n.reserve(studies_.size());
  for (const auto& t : studies_) n.push_back(t.sample_size());
  return n;
}

PooledResult pool_cellwise(const StudySet& s, const FisherOptions& options) {
  const auto& first = s.studies().front();
  std::vector<Count> cells(first.cells().size(), 0);
  for (const auto& t : s.studies()) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      cells[k] += t.cells()[k];
    }
  }
  CountTable pooled(first.rows(), first.cols(), std::move(cells));
  RelTable rel = normalize(pooled);
  const Nats mi = mutual_information(rel);
  const FisherResult fisher = fisher_exact(pooled, options);
  BoundCertificate cert = check_certificate(pooled, fisher);
  const Count n_s = pooled.sample_size();
  return PooledResult{std::move(pooled), std::move(rel), n_s, mi, fisher, cert, PoolingMethod::Cellwise};
}

StudyMi pool_weighted(std::span<const StudyMi> studies) {
  if (studies.empty()) {
    throw DomainError("pool_weighted: at least one study required");
  }
  Count n_s = 0;
  double weighted = 0.0;
  for (const auto& st : studies) {
    if (st.n < 1) {
      throw DomainError("pool_weighted: sample sizes must be positive");
    }
    if (!(st.mi.value >= 0.0)) {
      throw DomainError("pool_weighted: MI must be nonnegative");
    }
    n_s += st.n;
    weighted += static_cast<double>(st.n) * st.mi.value;
  }
  return {n_s, Nats{weighted / static_cast<double>(n_s)}};
}

CombinedPValue combine_log_pvalues(std::span<const double> log_p_list, std::span<const Count> n_list) {
  if (log_p_list.empty()) {
    throw DomainError("combine_pvalues: at least one p-value required");
  }
  if (log_p_list.size() != n_list.size()) {
    throw DomainError("combine_pvalues: p-value and sample-size lists differ in length");
  }
  CombinedPValue r;
  for (std::size_t h = 0; h < log_p_list.size(); ++h) {
    if (!(log_p_list[h] <= 0.0) || std::isinf(log_p_list[h])) {
      throw DomainError("combine_pvalues: p-values must lie in (0, 1]");
    }
    if (n_list[h] < 1) {
      throw DomainError("combine_pvalues: sample sizes must be positive");
    }
    r.log_p_s += log_p_list[h];
    r.n_s += n_list[h];
  }
  r.p_s = std::exp(r.log_p_s);
  r.mi_s = mi_from_log_pvalue(r.log_p_s, static_cast<std::uint64_t>(r.n_s));
  return r;
}

CombinedPValue combine_pvalues(std::span<const double> p_list, std::span<const Count> n_list) {
  std::vector<double> logs;
  logs.reserve(p_list.size());
  for (double p : p_list) {
    if (!(p > 0.0 && p <= 1.0)) {
      throw DomainError("combine_pvalues: p-values must lie in (0, 1]");
    }
    logs.push_back(std::log(p));
  }
  return combine_log_pvalues(logs, n_list);
}

double per_study_pvalue(Nats mi_h, Count n_h) {
  if (n_h < 1) {
    throw DomainError("per_study_pvalue: sample size must be positive");
  }
  return pvalue_from_mi(mi_h, static_cast<std::uint64_t>(n_h));
}

}  // namespace mieq
